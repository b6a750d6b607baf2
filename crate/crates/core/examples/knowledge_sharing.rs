//! Knowledge sharing: the threshold only becomes non-trivial once the number
//! of possible outputs k is large.

use sybil_threshold::engine::verify_limited_dup;
use sybil_threshold::models::knowledge_sharing_model;
use sybil_threshold::{honest_utility, minimal_threshold, ThresholdOptions};

fn main() -> sybil_threshold::Result<()> {
    let l = 60;
    println!("{:>6} {:>6} {:>8} {:>14}", "k", "t*", "f", "m'=1 suffices");
    for k in [2, 10, 50, 200, 1000, 5000] {
        let ks = knowledge_sharing_model(k)?;
        let r = minimal_threshold(l, &ks, ThresholdOptions::default())?
            .expect("t = L is an equilibrium");
        let f = honest_utility(l, r.t_star, &ks)?;
        println!(
            "{k:>6} {:>6} {:>8} {:>14}",
            r.t_star,
            f.to_string(),
            verify_limited_dup(l, &ks, 1)?
        );
    }
    Ok(())
}
