//! Minimal equilibrium threshold for leader election at a few id-space sizes,
//! exact and in high-precision float mode.
//!
//!     cargo run --release --example threshold_search -- 5000

use sybil_threshold::models::leader_election_model;
use sybil_threshold::{minimal_threshold, Precision, ThresholdOptions};

fn main() -> sybil_threshold::Result<()> {
    let extra: Vec<u64> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let sizes = if extra.is_empty() {
        vec![10, 100, 1000, 2000]
    } else {
        extra
    };
    let le = leader_election_model();

    println!(
        "{:>8} {:>8} {:>8} {:>28} certification",
        "L", "t*", "t*/L", "method"
    );
    for l in sizes {
        let precision = if l > 1000 {
            Precision::Float { bits: 128 }
        } else {
            Precision::Exact
        };
        let options = ThresholdOptions {
            precision,
            ..Default::default()
        };
        let Some(r) = minimal_threshold(l, &le, options)? else {
            println!("{l:>8} no equilibrium threshold");
            continue;
        };
        println!(
            "{:>8} {:>8} {:>8.4} {:>28} {:?}",
            l,
            r.t_star,
            r.ratio(),
            format!("{} ({})", r.method, r.precision),
            r.certification
        );
        if let Some(below) = &r.witness_below {
            // at t*-1 one duplicate still pays
            println!(
                "         t={} f={:.6} g*={:.6} (m*={})",
                below.t,
                below.f_value.to_f64(),
                below.g_star.to_f64(),
                below.m_star
            );
        }
    }
    Ok(())
}
