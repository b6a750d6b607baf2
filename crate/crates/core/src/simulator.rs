//! Monte Carlo validation of the duplication game and a synchronous ring
//! leader-election protocol.
//!
//! Every trial draws from its own ChaCha8 stream selected by the trial index,
//! so results do not depend on how trials are scheduled across threads.
//! Aggregation is an integer sum.

use std::collections::HashSet;
use std::str::FromStr;

use dashu_int::ops::BitTest;
use dashu_int::{IBig, UBig};
use rand::seq::index::sample;
use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::engine::{cheat_utility, check_domain};
use crate::error::{Error, Result};
use crate::models::{ModelKind, UtilityModel};
use crate::numerics::{collision_survival, ExactRational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SimMode {
    GameLevel,
    RingProtocol,
}

impl SimMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::GameLevel => "game-level",
            Self::RingProtocol => "ring-protocol",
        }
    }
}

impl FromStr for SimMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "game" | "game-level" => Ok(Self::GameLevel),
            "ring" | "ring-protocol" => Ok(Self::RingProtocol),
            other => Err(Error::InvalidConfig(format!(
                "unknown simulation mode {other:?}"
            ))),
        }
    }
}

#[derive(Clone)]
pub struct SimConfig {
    pub l: u64,
    pub t: u64,
    /// Fake identities the cheater commits to before the run starts.
    pub m: u64,
    pub model: UtilityModel,
    pub trials: u64,
    pub seed: u64,
    pub mode: SimMode,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        check_domain(self.l, self.t)?;
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be at least 1".into()));
        }
        if self.mode == SimMode::RingProtocol && self.model.kind() != ModelKind::LeaderElection {
            return Err(Error::InvalidConfig(format!(
                "ring protocol simulates leader election only, got model {}",
                self.model.name()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutcomeClass {
    Legal,
    Erroneous,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TrialOutcome {
    pub n: u64,
    pub detected: bool,
    pub utility: u8,
    pub outcome_class: OutcomeClass,
}

impl TrialOutcome {
    fn aborted(n: u64) -> Self {
        Self {
            n,
            detected: true,
            utility: 0,
            outcome_class: OutcomeClass::Erroneous,
        }
    }

    fn legal(n: u64, win: bool) -> Self {
        Self {
            n,
            detected: false,
            utility: win as u8,
            outcome_class: OutcomeClass::Legal,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimReport {
    pub mode: SimMode,
    pub model: String,
    pub l: u64,
    pub t: u64,
    pub m: u64,
    pub seed: u64,
    pub trials: u64,
    pub successes: u64,
    pub detected: u64,
    pub estimate: f64,
    /// `sqrt(p (1 - p) / trials)` with `p` the estimate.
    pub stderr: f64,
    /// Engine value `g(L, t, m)`, which is `f(L, t)` for `m = 0`.
    pub analytic: ExactRational,
    pub z_score: f64,
}

impl SimReport {
    /// `|estimate - analytic| <= k * stderr`, judged through the z-score.
    pub fn agrees_within(&self, k: f64) -> bool {
        self.z_score.abs() <= k
    }
}

/// Bernoulli proportion summary shared by the reports.
fn proportion(successes: u64, trials: u64, analytic: f64) -> (f64, f64, f64) {
    let n = trials as f64;
    let p = successes as f64 / n;
    let stderr = (p * (1.0 - p) / n).sqrt();
    // A degenerate estimate has zero sample error; fall back to the analytic
    // variance so that a rare event that never fired is not an infinite z.
    let scale = if stderr > 0.0 {
        stderr
    } else {
        (analytic * (1.0 - analytic) / n).sqrt()
    };
    let diff = p - analytic;
    let z = if diff == 0.0 {
        0.0
    } else if scale > 0.0 {
        diff / scale
    } else {
        diff.signum() * f64::MAX
    };
    (p, stderr, z)
}

fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Uniform draw in `[0, bound)` for arbitrary-size bounds, by rejection.
fn below_ubig(rng: &mut impl Rng, bound: &UBig) -> UBig {
    let bits = bound.bit_len();
    let mut bytes = vec![0u8; bits.div_ceil(8)];
    let spare = bytes.len() * 8 - bits;
    loop {
        rng.fill_bytes(&mut bytes);
        if let Some(top) = bytes.last_mut() {
            *top &= 0xff >> spare;
        }
        let candidate = UBig::from_le_bytes(&bytes);
        if &candidate < bound {
            return candidate;
        }
    }
}

/// Exact Bernoulli draw with success probability `p` in `[0, 1]`.
fn bernoulli(rng: &mut impl Rng, p: &ExactRational) -> bool {
    let den = p.denominator();
    match (u64::try_from(den), u64::try_from(p.numerator())) {
        (Ok(d), Ok(n)) => rng.random_range(0..d) < n,
        _ => IBig::from(below_ubig(rng, den)) < *p.numerator(),
    }
}

/// One sampled population: the cheater's own id, the honest ids and the fake
/// ids, all in `[0, L)`. `None` when the claimed count exceeds `L`.
struct Population {
    own: u64,
    honest: Vec<u64>,
    fakes: Vec<u64>,
}

impl Population {
    fn draw(rng: &mut impl Rng, l: u64, n: u64, m: u64) -> Option<Self> {
        let own = rng.random_range(0..l);
        let lift = |i: usize| {
            if (i as u64) < own {
                i as u64
            } else {
                i as u64 + 1
            }
        };
        let others = (l - 1) as usize;
        let honest = sample(rng, others, (n - 1) as usize)
            .into_iter()
            .map(lift)
            .collect();
        if n + m > l {
            return None;
        }
        let fakes = sample(rng, others, m as usize)
            .into_iter()
            .map(lift)
            .collect();
        Some(Self { own, honest, fakes })
    }

    fn collides(&self) -> bool {
        let honest: HashSet<u64> = self.honest.iter().copied().collect();
        self.fakes.iter().any(|id| honest.contains(id))
    }
}

/// Per-`n` success probabilities for an undetected cheater.
fn utility_table(config: &SimConfig) -> Vec<ExactRational> {
    (config.t..=config.l)
        .map(|x| config.model.em_unchecked(x, config.m))
        .collect()
}

fn game_trial(config: &SimConfig, table: &[ExactRational], index: u64) -> TrialOutcome {
    let mut rng = trial_rng(config.seed, index);
    let n = rng.random_range(config.t..=config.l);
    match Population::draw(&mut rng, config.l, n, config.m) {
        Some(pop) if !pop.collides() => {
            TrialOutcome::legal(n, bernoulli(&mut rng, &table[(n - config.t) as usize]))
        }
        _ => TrialOutcome::aborted(n),
    }
}

/// Replays a single trial of `config`; the same `(config, index)` always
/// yields the same outcome.
pub fn run_trial(config: &SimConfig, index: u64) -> Result<TrialOutcome> {
    config.validate()?;
    Ok(match config.mode {
        SimMode::GameLevel => game_trial(config, &utility_table(config), index),
        SimMode::RingProtocol => ring_outcome(config, index),
    })
}

fn tally<F>(trials: u64, trial: F) -> (u64, u64)
where
    F: Fn(u64) -> TrialOutcome + Sync,
{
    (0..trials)
        .into_par_iter()
        .map(|i| {
            let o = trial(i);
            (o.utility as u64, o.detected as u64)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1))
}

fn report(config: &SimConfig, successes: u64, detected: u64) -> Result<SimReport> {
    let analytic = cheat_utility(config.l, config.t, config.m, &config.model)?;
    let (estimate, stderr, z_score) = proportion(successes, config.trials, analytic.to_f64());
    Ok(SimReport {
        mode: config.mode,
        model: config.model.name().to_string(),
        l: config.l,
        t: config.t,
        m: config.m,
        seed: config.seed,
        trials: config.trials,
        successes,
        detected,
        estimate,
        stderr,
        analytic,
        z_score,
    })
}

/// Game-level Monte Carlo estimate of `g(L, t, m)` (or `f` when `m = 0`).
pub fn simulate_duplication_game(config: &SimConfig) -> Result<SimReport> {
    config.validate()?;
    if config.mode != SimMode::GameLevel {
        return Err(Error::InvalidConfig("expected game-level mode".into()));
    }
    let table = utility_table(config);
    let (successes, detected) = tally(config.trials, |i| game_trial(config, &table, i));
    report(config, successes, detected)
}

/// Dispatches on `config.mode`.
pub fn simulate(config: &SimConfig) -> Result<SimReport> {
    match config.mode {
        SimMode::GameLevel => simulate_duplication_game(config),
        SimMode::RingProtocol => simulate_ring_leader_election(config),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CollisionReport {
    pub l: u64,
    pub n: u64,
    pub m: u64,
    pub trials: u64,
    pub collisions: u64,
    pub rate: f64,
    pub stderr: f64,
    /// `1 - p_m(n)`.
    pub analytic: ExactRational,
    pub z_score: f64,
}

/// Empirical probability that at least one of `m` fake ids collides with an
/// honest id, for a fixed network size `n`.
pub fn collision_rate(l: u64, n: u64, m: u64, trials: u64, seed: u64) -> Result<CollisionReport> {
    let analytic = ExactRational::one() - collision_survival(l, n, m)?;
    if trials == 0 {
        return Err(Error::InvalidConfig("trials must be at least 1".into()));
    }
    let collisions = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            match Population::draw(&mut rng, l, n, m) {
                Some(pop) => pop.collides() as u64,
                None => 1,
            }
        })
        .sum::<u64>();
    let (rate, stderr, z_score) = proportion(collisions, trials, analytic.to_f64());
    Ok(CollisionReport {
        l,
        n,
        m,
        trials,
        collisions,
        rate,
        stderr,
        analytic,
        z_score,
    })
}

/// Result of one ring run at a fixed population.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RingRun {
    pub detected: bool,
    /// Physical agent that won; `0` is the cheater (or, with `m = 0`, just
    /// the first honest agent).
    pub winner: Option<usize>,
}

/// Ring of `N = n + m` virtual nodes. The cheater's own id and its fakes
/// occupy a contiguous block starting at position 0.
struct Ring {
    ids: Vec<u64>,
    honest: Vec<bool>,
    /// Physical owner of each virtual node.
    owner: Vec<usize>,
}

impl Ring {
    fn build(pop: &Population) -> Self {
        let mut ids = vec![pop.own];
        ids.extend(&pop.fakes);
        let block = ids.len();
        ids.extend(&pop.honest);
        let honest = (0..ids.len()).map(|i| i >= block).collect();
        let owner = (0..ids.len())
            .map(|i| i.saturating_sub(block - 1))
            .collect();
        Self { ids, honest, owner }
    }

    /// Phase 1: every id travels once around the ring, one hop per round.
    /// Honest nodes abort on a repeated id or when the circulated count
    /// exceeds `L`.
    fn circulate(&self, l: u64) -> bool {
        let size = self.ids.len();
        let words = (l as usize).div_ceil(64);
        let mut seen = vec![0u64; size * words];
        for (i, &id) in self.ids.iter().enumerate() {
            seen[i * words + (id / 64) as usize] |= 1 << (id % 64);
        }
        for round in 1..size {
            for i in 0..size {
                if !self.honest[i] {
                    continue;
                }
                let id = self.ids[(i + size - round) % size];
                let slot = &mut seen[i * words + (id / 64) as usize];
                let bit = 1 << (id % 64);
                if *slot & bit != 0 {
                    return true;
                }
                *slot |= bit;
            }
        }
        size as u64 > l
    }

    /// Phase 2: each virtual node contributes `r_i` uniform in `[0, N)`; the
    /// leader is entry `sum r_i mod N` of the id-sorted node list.
    fn elect(&self, rng: &mut impl Rng) -> usize {
        let size = self.ids.len() as u64;
        let pick = (0..size).fold(0u64, |acc, _| (acc + rng.random_range(0..size)) % size);
        let mut order: Vec<usize> = (0..self.ids.len()).collect();
        order.sort_by_key(|&i| self.ids[i]);
        self.owner[order[pick as usize]]
    }
}

fn ring_run(rng: &mut impl Rng, l: u64, n: u64, m: u64) -> RingRun {
    let Some(pop) = Population::draw(rng, l, n, m) else {
        return RingRun {
            detected: true,
            winner: None,
        };
    };
    let ring = Ring::build(&pop);
    if ring.circulate(l) {
        return RingRun {
            detected: true,
            winner: None,
        };
    }
    RingRun {
        detected: false,
        winner: Some(ring.elect(rng)),
    }
}

fn ring_outcome(config: &SimConfig, index: u64) -> TrialOutcome {
    let mut rng = trial_rng(config.seed, index);
    let n = rng.random_range(config.t..=config.l);
    let run = ring_run(&mut rng, config.l, n, config.m);
    if run.detected {
        TrialOutcome::aborted(n)
    } else {
        TrialOutcome::legal(n, run.winner == Some(0))
    }
}

/// Full ring pipeline with `n` uniform on `[t, L]`; estimates `g(L, t, m)`.
pub fn simulate_ring_leader_election(config: &SimConfig) -> Result<SimReport> {
    config.validate()?;
    if config.mode != SimMode::RingProtocol {
        return Err(Error::InvalidConfig("expected ring-protocol mode".into()));
    }
    let (successes, detected) = tally(config.trials, |i| ring_outcome(config, i));
    report(config, successes, detected)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RingTally {
    pub l: u64,
    pub n: u64,
    pub m: u64,
    pub trials: u64,
    pub detected: u64,
    /// Wins per physical agent; index 0 is the cheater.
    pub wins: Vec<u64>,
}

impl RingTally {
    pub fn undetected(&self) -> u64 {
        self.trials - self.detected
    }

    /// Win frequency of agent `i` among undetected runs.
    pub fn frequency(&self, i: usize) -> f64 {
        self.wins[i] as f64 / self.undetected() as f64
    }
}

/// Ring runs at a fixed network size `n` (the cheater plus `n - 1` honest
/// agents), tallying winners.
pub fn ring_fixed_size(l: u64, n: u64, m: u64, trials: u64, seed: u64) -> Result<RingTally> {
    check_domain(l, n)?;
    let runs: Vec<RingRun> = (0..trials)
        .into_par_iter()
        .map(|i| ring_run(&mut trial_rng(seed, i), l, n, m))
        .collect();
    let mut wins = vec![0u64; n as usize];
    let mut detected = 0;
    for run in runs {
        match run.winner {
            Some(w) => wins[w] += 1,
            None => detected += 1,
        }
    }
    Ok(RingTally {
        l,
        n,
        m,
        trials,
        detected,
        wins,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{knowledge_sharing_model, leader_election_model};

    fn config(l: u64, t: u64, m: u64, trials: u64, seed: u64) -> SimConfig {
        SimConfig {
            l,
            t,
            m,
            model: leader_election_model(),
            trials,
            seed,
            mode: SimMode::GameLevel,
        }
    }

    #[test]
    fn honest_runs_are_never_detected() {
        let r = simulate_duplication_game(&config(40, 5, 0, 5_000, 3)).unwrap();
        assert_eq!(r.detected, 0);
        assert!(r.agrees_within(4.0), "{r:?}");
    }

    #[test]
    fn full_threshold_single_fake_always_collides() {
        let r = simulate_duplication_game(&config(50, 50, 1, 1_000, 1)).unwrap();
        assert_eq!(r.successes, 0);
        assert_eq!(r.detected, 1_000);
        assert_eq!(r.estimate, 0.0);
        assert!(r.analytic.is_zero());
        assert_eq!(r.z_score, 0.0);
    }

    #[test]
    fn game_matches_engine() {
        let r = simulate_duplication_game(&config(60, 12, 2, 20_000, 9)).unwrap();
        assert!(r.agrees_within(4.0), "{r:?}");
    }

    #[test]
    fn knowledge_sharing_game() {
        let mut c = config(30, 5, 4, 20_000, 4);
        c.model = knowledge_sharing_model(3).unwrap();
        let r = simulate_duplication_game(&c).unwrap();
        assert!(r.agrees_within(4.0), "{r:?}");
    }

    #[test]
    fn detection_implies_zero_utility() {
        let c = config(20, 3, 6, 1, 11);
        let mut detected = 0;
        for i in 0..2_000 {
            let o = run_trial(&c, i).unwrap();
            if o.detected {
                detected += 1;
                assert_eq!(o.utility, 0);
                assert_eq!(o.outcome_class, OutcomeClass::Erroneous);
            }
            assert!((3..=20).contains(&o.n));
        }
        assert!(detected > 0);
    }

    #[test]
    fn collision_rate_tracks_survival() {
        let r = collision_rate(30, 10, 2, 20_000, 5).unwrap();
        assert!(r.z_score.abs() <= 4.0, "{r:?}");
        let over = collision_rate(10, 8, 3, 100, 5).unwrap();
        assert_eq!(over.collisions, 100);
    }

    #[test]
    fn same_result_on_any_pool_size() {
        let c = config(80, 10, 1, 4_000, 77);
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| simulate_duplication_game(&c).unwrap())
        };
        let one = run(1);
        assert_eq!(one, run(2));
        assert_eq!(one, run(8));
    }

    #[test]
    fn exact_bernoulli_with_big_denominator() {
        let mut rng = trial_rng(1, 0);
        let den = UBig::from(3u8).pow(60);
        let p = ExactRational::new(IBig::from(den.clone()) / 2, den);
        let hits = (0..4_000).filter(|_| bernoulli(&mut rng, &p)).count();
        assert!((1_800..2_200).contains(&hits), "{hits}");
        assert!(!bernoulli(&mut rng, &ExactRational::zero()));
        assert!(bernoulli(&mut rng, &ExactRational::one()));
    }

    #[test]
    fn ring_detects_planted_duplicate() {
        let ring = Ring {
            ids: vec![4, 7, 4, 9],
            honest: vec![false, false, true, true],
            owner: vec![0, 0, 1, 2],
        };
        assert!(ring.circulate(20));
        let clean = Ring {
            ids: vec![1, 2, 3],
            honest: vec![true; 3],
            owner: vec![0, 1, 2],
        };
        assert!(!clean.circulate(20));
        assert!(clean.circulate(2));
    }

    #[test]
    fn honest_ring_is_fair() {
        let tally = ring_fixed_size(100, 5, 0, 20_000, 2).unwrap();
        assert_eq!(tally.detected, 0);
        for i in 0..5 {
            assert!((tally.frequency(i) - 0.2).abs() < 0.02, "{tally:?}");
        }
    }

    #[test]
    fn ring_cheater_share() {
        let tally = ring_fixed_size(2_000, 10, 3, 10_000, 8).unwrap();
        let share = tally.frequency(0);
        assert!((share - 4.0 / 13.0).abs() < 0.03, "{share}");
    }

    #[test]
    fn ring_pipeline_matches_engine() {
        let mut c = config(30, 8, 1, 10_000, 21);
        c.mode = SimMode::RingProtocol;
        let r = simulate_ring_leader_election(&c).unwrap();
        assert!(r.agrees_within(4.0), "{r:?}");
    }

    #[test]
    fn ring_rejects_knowledge_sharing() {
        let mut c = config(30, 8, 1, 10, 21);
        c.mode = SimMode::RingProtocol;
        c.model = knowledge_sharing_model(2).unwrap();
        assert!(c.validate().is_err());
        assert!(config(30, 8, 1, 0, 1).validate().is_err());
    }
}
