//! The cheater's full best-response table at one (L, t).

use sybil_threshold::models::leader_election_model;
use sybil_threshold::{best_cheat, is_equilibrium, DupScan};

fn main() -> sybil_threshold::Result<()> {
    let le = leader_election_model();
    let (l, t) = (100, 15);

    let a = best_cheat(l, t, &le, DupScan::Full, true)?;
    println!("f({l},{t}) = {} ~ {:.6}", a.f_value, a.f_value.to_f64());
    for row in a.per_m.iter().flatten().take(6) {
        let mark = if row.g > a.f_value { "profitable" } else { "" };
        println!("  m={:<3} g={:.6} {mark}", row.m, row.g.to_f64());
    }
    println!("  ...");
    println!(
        "best response m*={} (equilibrium: {})",
        a.m_star,
        a.in_equilibrium()
    );

    // a single fake id at t = L always collides
    let top = is_equilibrium(l, l, &le, DupScan::Full)?;
    println!(
        "t=L: g*={} equilibrium={}",
        top.assessment.g_star, top.in_equilibrium
    );
    Ok(())
}
