//! Registering a third-party utility model and auditing the search shortcuts
//! it claims.

use sybil_threshold::engine::{limited_dup_counterexamples, verify_linear_threshold};
use sybil_threshold::models::EnhancementHints;
use sybil_threshold::{
    minimal_threshold, ExactRational, ModelRegistry, ThresholdOptions, UtilityModel,
};

/// Each extra identity adds a vote; a majority of `x + m` wins.
fn voting(quorum: u64) -> UtilityModel {
    UtilityModel::custom(
        format!("vote:{quorum}"),
        |x| ExactRational::new(1u64, x),
        move |x, m| {
            if 2 * (1 + m) > x + m && m >= quorum {
                ExactRational::one()
            } else {
                ExactRational::new(1 + m, 2 * (x + m))
            }
        },
        EnhancementHints {
            linear_threshold: true,
            limited_dup: Some(1),
        },
    )
}

fn main() -> sybil_threshold::Result<()> {
    let mut registry = ModelRegistry::with_builtins();
    registry.register("vote", |arg| {
        let quorum = arg.and_then(|a| a.parse().ok()).unwrap_or(2);
        Ok(voting(quorum))
    });
    println!("models: {:?}", registry.names().collect::<Vec<_>>());

    let model = registry.resolve("vote:2")?;
    model.audit(80)?;
    let l = 80;
    println!(
        "linear threshold holds: {}",
        verify_linear_threshold(l, &model)?
    );
    let bad = limited_dup_counterexamples(l, &model, 1)?;
    println!("limited-dup(1) counterexamples: {bad:?}");

    // The hint is wrong, so a hinted search can disagree with a full one.
    let hinted = minimal_threshold(l, &model, ThresholdOptions::default())?.unwrap();
    let full = minimal_threshold(
        l,
        &model,
        ThresholdOptions {
            use_hints: false,
            ..Default::default()
        },
    )?
    .unwrap();
    println!(
        "t* hinted={} ({:?}) full={}",
        hinted.t_star, hinted.certification, full.t_star
    );
    Ok(())
}
