//! Equilibrium indicator over every t, and t*/L across id-space sizes.

use sybil_threshold::engine::{equilibrium_sweep, linear_threshold_pivot};
use sybil_threshold::models::leader_election_model;
use sybil_threshold::DupScan;

fn main() -> sybil_threshold::Result<()> {
    let le = leader_election_model();

    let rows = equilibrium_sweep(40, &le, DupScan::Full, Some(1))?;
    let strip: String = rows
        .iter()
        .map(|r| if r.in_equilibrium { '#' } else { '.' })
        .collect();
    println!("L=40 t=3..40  {strip}");

    for l in (50..=500).step_by(50) {
        let rows = equilibrium_sweep(l, &le, DupScan::Hinted, None)?;
        let indicator: Vec<(u64, bool)> = rows.iter().map(|r| (r.t, r.in_equilibrium)).collect();
        match linear_threshold_pivot(&indicator) {
            Some(t) => println!("L={l:<4} t*={t:<4} t*/L={:.3}", t as f64 / l as f64),
            None => println!("L={l:<4} no single pivot"),
        }
    }
    Ok(())
}
