//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any fails. Pass criterion numbers as arguments to run a
//! subset, e.g. `cargo test --test acceptance -- 3 10`.

mod common;

use std::time::{Duration, Instant};

use serde_json::Value;
use sybil_threshold::approximation::{
    f_bounds_le_with, g1_bounds_le_with, harmonic_bounds_with, le_unnormalized_sums,
};
use sybil_threshold::engine::{
    equilibrium_sweep, equilibrium_sweep_from, limited_dup_counterexamples, linear_threshold_pivot,
    Certification,
};
use sybil_threshold::models::{knowledge_sharing_model, leader_election_model};
use sybil_threshold::numerics::{rational_to_real, HarmonicPartialSums, RealContext};
use sybil_threshold::simulator::{
    collision_rate, ring_fixed_size, run_trial, simulate, SimConfig, SimMode,
};
use sybil_threshold::{
    cheat_utility, honest_utility, is_equilibrium, minimal_threshold, DupScan, ExactRational,
    Precision, SearchMethod, ThresholdOptions, UtilityModel,
};

use common::{ks_em, le_e0, le_em, oracle_f, oracle_g, oracle_g_sums, Pascal};

const BAND_CONSTANT_TOL: f64 = 0.005;
const BAND_CONSTANTS: [(&str, f64); 4] = [
    ("f_ub", 1.609),
    ("g_lb", 1.619),
    ("g_ub", 1.541),
    ("f_lb", 1.560),
];
const RATIO_WINDOW: (f64, f64) = (0.19, 0.22);
const SIGMAS: f64 = 4.0;
const MC_TRIALS: u64 = 100_000;
const HARMONIC_N: u64 = 100_000;
const HARMONIC_BITS: usize = 192;
const SANDWICH_BITS: usize = 128;

type Check = fn() -> (bool, String);

fn cli(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let argv = std::iter::once("sybil-threshold").chain(args.iter().copied());
    let code = sybil_threshold::cli::run(argv, &mut out);
    (code, String::from_utf8(out).expect("utf8 output"))
}

fn c01_band_constants() -> (bool, String) {
    let start = Instant::now();
    let (code, out) = cli(&["approx", "--L", "1000000"]);
    let elapsed = start.elapsed();
    let doc: Value = serde_json::from_str(&out).expect("approx json");
    let r = &doc["result"];
    let got = [
        r["cheat_side"]["f_ub"].as_f64().unwrap(),
        r["cheat_side"]["g_lb"].as_f64().unwrap(),
        r["safe_side"]["g_ub"].as_f64().unwrap(),
        r["safe_side"]["f_lb"].as_f64().unwrap(),
    ];
    let mut ok = code == 0 && elapsed < Duration::from_secs(1);
    let mut detail = Vec::new();
    for ((name, want), value) in BAND_CONSTANTS.iter().zip(got) {
        ok &= (value - want).abs() <= BAND_CONSTANT_TOL;
        detail.push(format!("{name}={value:.4}"));
    }
    ok &= r["cheat_verdict"] == "certified-cheat" && r["safe_verdict"] == "certified-no-cheat";
    detail.push(format!("{} / {}", r["cheat_verdict"], r["safe_verdict"]));
    detail.push(format!("{:.1}ms", elapsed.as_secs_f64() * 1e3));
    (ok, detail.join(" "))
}

fn c02_threshold_band() -> (bool, String) {
    let le = leader_election_model();
    let options = ThresholdOptions {
        method: SearchMethod::Auto,
        precision: Precision::Float { bits: 128 },
        use_hints: true,
    };
    let mut ok = true;
    let mut detail = Vec::new();
    for l in [2000, 5000, 10000] {
        let r = minimal_threshold(l, &le, options)
            .unwrap()
            .expect("threshold exists");
        let ratio = r.ratio();
        ok &= r.certification == Certification::Certified;
        ok &= RATIO_WINDOW.0 < ratio && ratio < RATIO_WINDOW.1;
        detail.push(format!(
            "L={l} t*={} ratio={}={ratio:.4}",
            r.t_star,
            ExactRational::new(r.t_star, l)
        ));
    }
    (ok, detail.join("; "))
}

fn c03_limited_dup() -> (bool, String) {
    let le = leader_election_model();
    let mut failures = Vec::new();
    for l in 10..=300 {
        let bad = limited_dup_counterexamples(l, &le, 1).unwrap();
        if !bad.is_empty() {
            failures.push((l, bad));
        }
    }
    // Independent check at small L with Pascal binomials and direct sums.
    let pascal = Pascal::new(40);
    let mut oracle_bad = 0;
    for l in [10, 25, 40] {
        for t in 3..=l {
            let f = oracle_f(l, t, le_e0);
            let any = (1..=l - t).any(|m| oracle_g(&pascal, l, t, m, le_em) > f);
            let one = oracle_g(&pascal, l, t, 1, le_em) > f;
            oracle_bad += (any != one) as u32;
        }
    }
    let ok = failures.is_empty() && oracle_bad == 0;
    (
        ok,
        format!(
            "counterexamples: engine {} L values, oracle {oracle_bad}",
            failures.len()
        ),
    )
}

fn c04_linear_threshold() -> (bool, String) {
    let models: Vec<UtilityModel> = vec![
        leader_election_model(),
        knowledge_sharing_model(2).unwrap(),
        knowledge_sharing_model(5).unwrap(),
        knowledge_sharing_model(10).unwrap(),
    ];
    let binary = ThresholdOptions {
        method: SearchMethod::Binary,
        precision: Precision::Exact,
        use_hints: true,
    };
    let mut ok = true;
    let mut detail = Vec::new();
    for model in &models {
        let (mut no_pivot, mut mismatch) = (0, 0);
        let (mut lo, mut hi) = (f64::MAX, 0.0f64);
        for l in 10..=300 {
            let rows = equilibrium_sweep(l, model, DupScan::Full, None).unwrap();
            let indicator: Vec<(u64, bool)> =
                rows.iter().map(|r| (r.t, r.in_equilibrium)).collect();
            match linear_threshold_pivot(&indicator) {
                None => no_pivot += 1,
                Some(p) => {
                    let found = minimal_threshold(l, model, binary)
                        .unwrap()
                        .map(|r| r.t_star);
                    mismatch += (found != Some(p)) as u32;
                    lo = lo.min(p as f64 / l as f64);
                    hi = hi.max(p as f64 / l as f64);
                }
            }
        }
        ok &= no_pivot == 0 && mismatch == 0;
        detail.push(format!(
            "{}: non-pivot {no_pivot}, mismatch {mismatch}, t*/L in [{lo:.3}, {hi:.3}]",
            model.name()
        ));
    }
    (ok, detail.join("; "))
}

fn c05_knowledge_sharing() -> (bool, String) {
    let mut ok = true;
    let mut checked = 0u64;
    for k in [2u64, 5, 10] {
        let model = knowledge_sharing_model(k).unwrap();
        let inv_k = ExactRational::new(1u64, k);
        for l in 3..=200 {
            for t in 3..=l {
                ok &= honest_utility(l, t, &model).unwrap() == inv_k;
            }
            for m in 1..=l {
                ok &= cheat_utility(l, l, m, &model).unwrap().is_zero();
            }
        }
        let pascal = Pascal::new(200);
        for l in (10..=200).step_by(10) {
            for m in 1..=l - 3 {
                let sums = oracle_g_sums(&pascal, l, m, ks_em(k));
                let norm: Vec<ExactRational> = sums
                    .iter()
                    .enumerate()
                    .map(|(i, s)| s.clone() / ExactRational::from(l - (i as u64 + 3) + 1))
                    .collect();
                ok &= sums.windows(2).all(|w| w[1] <= w[0]);
                ok &= norm.windows(2).all(|w| w[1] <= w[0]);
                for t in [3, l / 2, l - m] {
                    ok &= cheat_utility(l, t, m, &model).unwrap() == norm[(t - 3) as usize];
                }
                checked += norm.len() as u64;
            }
        }
    }
    (
        ok,
        format!("f = 1/k on L<=200, g(L,L,m)=0, {checked} g values monotone in t"),
    )
}

fn c06_harmonic_sandwich() -> (bool, String) {
    let ctx = RealContext::new(HARMONIC_BITS);
    let mut sums = HarmonicPartialSums::new();
    let mut bad = Vec::new();
    for n in 1..=HARMONIC_N {
        sums.advance();
        assert_eq!(sums.n(), n);
        let h = sums.to_real(&ctx);
        let b = harmonic_bounds_with(n, &ctx).unwrap();
        if !(b.lower <= h && h < b.upper) {
            bad.push(n);
        }
    }
    (
        bad.is_empty(),
        format!("n in [1, {HARMONIC_N}], violations {bad:?}"),
    )
}

fn c07_bound_sandwich() -> (bool, String) {
    let ctx = RealContext::new(SANDWICH_BITS);
    let mut bad = Vec::new();
    let mut checked = 0;
    for l in [50u64, 200, 1000] {
        let mut f = ExactRational::zero();
        let mut g = ExactRational::zero();
        for t in (3..=l).rev() {
            f = f + ExactRational::new(1u64, t);
            g = g + ExactRational::new(2 * (l - t), (l - 1) * (t + 1));
            let (fr, gr) = (
                rational_to_real(&f, SANDWICH_BITS),
                rational_to_real(&g, SANDWICH_BITS),
            );
            let (f_lb, f_ub) = f_bounds_le_with(l, t, &ctx).unwrap();
            let (g_lb, g_ub) = g1_bounds_le_with(l, t, &ctx).unwrap();
            if !(f_lb <= fr && fr <= f_ub && g_lb <= gr && gr <= g_ub) {
                bad.push((l, t));
            }
            if l == 50 {
                // The reduced comparison is the engine's single-duplication one.
                let width = ExactRational::from(l - t + 1);
                assert_eq!(
                    g.clone() / width.clone(),
                    cheat_utility(l, t, 1, &leader_election_model()).unwrap()
                );
                assert_eq!(le_unnormalized_sums(l, t).unwrap(), (f.clone(), g.clone()));
            }
            checked += 1;
        }
    }
    (
        bad.is_empty(),
        format!("{checked} (L, t) pairs, violations {bad:?}"),
    )
}

fn c08_monte_carlo() -> (bool, String) {
    let le = leader_election_model();
    let ks3 = knowledge_sharing_model(3).unwrap();
    let ks50 = knowledge_sharing_model(50).unwrap();
    let bases: [(&UtilityModel, u64, u64); 4] = [
        (&le, 200, 40),
        (&le, 60, 10),
        (&ks3, 60, 10),
        (&ks50, 60, 5),
    ];
    let mut ok = true;
    let mut worst = 0.0f64;
    let mut configs = 0;
    for (seed, (model, l, t)) in bases.iter().enumerate() {
        let mut ms = vec![0, 1, *t, l - t - 1];
        ms.retain(|&m| m <= l - t);
        ms.dedup();
        for m in ms {
            let config = SimConfig {
                l: *l,
                t: *t,
                m,
                model: (*model).clone(),
                trials: MC_TRIALS,
                seed: 1000 + seed as u64 * 10 + m,
                mode: SimMode::GameLevel,
            };
            let r = simulate(&config).unwrap();
            ok &= r.agrees_within(SIGMAS);
            worst = worst.max(r.z_score.abs());
            configs += 1;
        }
    }
    let mut worst_collision = 0.0f64;
    for (i, (l, n, m)) in [
        (200u64, 50u64, 1u64),
        (200, 50, 5),
        (60, 10, 3),
        (60, 30, 10),
    ]
    .into_iter()
    .enumerate()
    {
        let r = collision_rate(l, n, m, MC_TRIALS, 77 + i as u64).unwrap();
        ok &= r.z_score.abs() <= SIGMAS;
        worst_collision = worst_collision.max(r.z_score.abs());
    }
    ok &= configs >= 12;
    (
        ok,
        format!(
            "{configs} game configs, max |z| {worst:.2}; collision max |z| {worst_collision:.2}"
        ),
    )
}

fn c09_ring() -> (bool, String) {
    let mut ok = true;
    let mut detail = Vec::new();
    for n in [5u64, 10, 20] {
        let tally = ring_fixed_size(1000, n, 0, MC_TRIALS, n).unwrap();
        let p = 1.0 / n as f64;
        let se = (p * (1.0 - p) / tally.undetected() as f64).sqrt();
        let worst = (0..n as usize)
            .map(|i| (tally.frequency(i) - p).abs() / se)
            .fold(0.0, f64::max);
        ok &= tally.detected == 0 && worst <= SIGMAS;
        detail.push(format!("honest n={n} max|z|={worst:.2}"));
    }
    for (n, m) in [(10u64, 1u64), (10, 3), (20, 5)] {
        let tally = ring_fixed_size(1000, n, m, MC_TRIALS, 100 + n * m).unwrap();
        let p = (1 + m) as f64 / (n + m) as f64;
        let se = (p * (1.0 - p) / tally.undetected() as f64).sqrt();
        let z = (tally.frequency(0) - p) / se;
        ok &= z.abs() <= SIGMAS;
        detail.push(format!("cheater n={n} m={m} z={z:.2}"));
    }
    for m in [0u64, 1, 3] {
        let config = SimConfig {
            l: 30,
            t: 8,
            m,
            model: leader_election_model(),
            trials: MC_TRIALS,
            seed: 500 + m,
            mode: SimMode::RingProtocol,
        };
        let r = simulate(&config).unwrap();
        ok &= r.agrees_within(SIGMAS);
        // Erroneous runs never pay more than legal ones.
        for i in 0..2_000 {
            let o = run_trial(&config, i).unwrap();
            ok &= !o.detected || o.utility == 0;
        }
        detail.push(format!("pipeline m={m} z={:.2}", r.z_score));
    }
    (ok, detail.join("; "))
}

fn c10_half_range() -> (bool, String) {
    let le = leader_election_model();
    let mut bad = Vec::new();
    for l in 10..=500u64 {
        let half = (l + 1).div_ceil(2);
        let rows = equilibrium_sweep_from(l, &le, DupScan::Full, None, half).unwrap();
        if rows.iter().any(|r| !r.in_equilibrium) || rows.len() as u64 != l - half + 1 {
            bad.push(l);
        }
    }
    for l in 10..=40u64 {
        for t in (l + 1).div_ceil(2)..=l {
            if !is_equilibrium(l, t, &le, DupScan::Full)
                .unwrap()
                .in_equilibrium
            {
                bad.push(l);
            }
        }
    }
    (bad.is_empty(), format!("violations {bad:?}"))
}

fn c11_determinism() -> (bool, String) {
    let mut ok = true;
    let runs = [
        vec![
            "simulate", "--model", "le", "--L", "200", "--t", "40", "--m", "1", "--trials",
            "20000", "--seed", "42",
        ],
        vec![
            "simulate", "--model", "ks:3", "--L", "60", "--t", "10", "--m", "10", "--trials",
            "20000", "--seed", "7",
        ],
        vec![
            "simulate", "--model", "le", "--L", "30", "--t", "8", "--m", "2", "--trials", "20000",
            "--seed", "9", "--mode", "ring",
        ],
    ];
    let mut compared = 0;
    for base in &runs {
        for format in ["json", "csv"] {
            let mut outputs = Vec::new();
            for threads in ["1", "2", "8", "8"] {
                let mut args = vec!["--threads", threads, "--no-timing", "--output", format];
                args.extend(base.iter().copied());
                outputs.push(cli(&args).1);
            }
            ok &= outputs.windows(2).all(|w| w[0] == w[1]) && !outputs[0].is_empty();
            compared += outputs.len();
        }
    }
    (
        ok,
        format!("{compared} outputs byte-identical across 1/2/8 threads"),
    )
}

fn main() {
    let criteria: [(u32, &str, u64, Check); 11] = [
        (1, "band constants at L = 1e6", 1, c01_band_constants),
        (2, "exact threshold band", 300, c02_threshold_band),
        (3, "limited duplications", 600, c03_limited_dup),
        (4, "linear threshold pivot", 600, c04_linear_threshold),
        (5, "knowledge sharing structure", 120, c05_knowledge_sharing),
        (6, "harmonic sandwich", 60, c06_harmonic_sandwich),
        (7, "bound sandwiches", 120, c07_bound_sandwich),
        (8, "Monte Carlo agreement", 300, c08_monte_carlo),
        (9, "ring protocol fidelity", 300, c09_ring),
        (10, "half-range safety", 120, c10_half_range),
        (11, "determinism across threads", 300, c11_determinism),
    ];
    let only: Vec<u32> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let mut failed = 0;
    for (id, name, budget_s, check) in criteria {
        if !only.is_empty() && !only.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let (pass, detail) = check();
        let secs = start.elapsed().as_secs_f64();
        let in_budget = secs <= budget_s as f64;
        let verdict = if pass && in_budget { "PASS" } else { "FAIL" };
        failed += (verdict == "FAIL") as u32;
        println!("criterion {id:>2} {verdict} [{name}] {detail} ({secs:.2}s, budget {budget_s}s)");
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
