//! Closed-form bounds that put the leader-election threshold between 0.2L
//! and 0.21L without summing anything.

use sybil_threshold::approximation::{harmonic_bounds, le_threshold_band, BoundReport};

fn show(side: &str, r: &Option<BoundReport>) {
    match r {
        Some(r) => println!(
            "  {side:<5} t={:<8} f in [{:.5}, {:.5}]  g in [{:.5}, {:.5}]  {}",
            r.t,
            r.f_lb.to_f64().value(),
            r.f_ub.to_f64().value(),
            r.g_lb.to_f64().value(),
            r.g_ub.to_f64().value(),
            r.verdict.as_str()
        ),
        None => println!("  {side:<5} below the minimum network size"),
    }
}

fn main() -> sybil_threshold::Result<()> {
    for l in [10, 1_000, 100_000, 1_000_000, 1_000_000_000] {
        let band = le_threshold_band(l)?;
        println!("L={l} t~{} band {}", band.approx_threshold, band.verdict());
        show("cheat", &band.cheat_side);
        show("safe", &band.safe_side);
    }

    let h = harmonic_bounds(1_000_000)?;
    let width = h.upper - h.lower;
    println!("H_1e6 bracket width {:e}", width.to_f64().value());
    Ok(())
}
