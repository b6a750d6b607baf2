//! Synchronous ring: ids circulate once (duplicates abort the run), then a
//! random-sum election picks the leader.

use sybil_threshold::models::leader_election_model;
use sybil_threshold::simulator::{ring_fixed_size, simulate, SimConfig, SimMode};

fn main() -> sybil_threshold::Result<()> {
    let trials = 50_000;

    let honest = ring_fixed_size(1000, 5, 0, trials, 1)?;
    let shares: Vec<String> = (0..5)
        .map(|i| format!("{:.3}", honest.frequency(i)))
        .collect();
    println!("honest ring of 5: {}", shares.join(" "));

    for (n, m) in [(10, 1), (10, 3), (20, 5)] {
        let t = ring_fixed_size(1000, n, m, trials, 2)?;
        println!(
            "n={n} m={m}: cheater wins {:.4} of undetected runs (expected {:.4}), {} aborted",
            t.frequency(0),
            (1 + m) as f64 / (n + m) as f64,
            t.detected
        );
    }

    let config = SimConfig {
        l: 30,
        t: 8,
        m: 1,
        model: leader_election_model(),
        trials,
        seed: 3,
        mode: SimMode::RingProtocol,
    };
    let r = simulate(&config)?;
    println!(
        "full pipeline: {:.4} vs g={:.4} (z={:+.2})",
        r.estimate,
        r.analytic.to_f64(),
        r.z_score
    );
    Ok(())
}
