//! Game-level Monte Carlo against the exact engine, plus the raw collision
//! rate of m fake ids.

use sybil_threshold::models::{knowledge_sharing_model, leader_election_model};
use sybil_threshold::simulator::{collision_rate, simulate, SimConfig, SimMode};

fn main() -> sybil_threshold::Result<()> {
    let trials = 100_000;
    let cases = [
        (leader_election_model(), 200, 40, 0),
        (leader_election_model(), 200, 40, 1),
        (leader_election_model(), 200, 40, 5),
        (knowledge_sharing_model(50)?, 60, 5, 5),
    ];
    for (i, (model, l, t, m)) in cases.into_iter().enumerate() {
        let config = SimConfig {
            l,
            t,
            m,
            model,
            trials,
            seed: 42 + i as u64,
            mode: SimMode::GameLevel,
        };
        let r = simulate(&config)?;
        println!(
            "{:<8} L={l} t={t} m={m}: {:.5} +- {:.5} vs {:.5} (z={:+.2}, detected {})",
            r.model,
            r.estimate,
            r.stderr,
            r.analytic.to_f64(),
            r.z_score,
            r.detected
        );
    }

    for m in [1, 3, 10] {
        let c = collision_rate(200, 50, m, trials, 7)?;
        println!(
            "n=50 m={m}: collision rate {:.4} vs 1-p_m = {:.4}",
            c.rate,
            c.analytic.to_f64()
        );
    }
    Ok(())
}
