//! Command-line front end. [`run`] parses arguments, executes one command and
//! returns the process exit code; the binary is a thin wrapper around it.
//!
//! Exit codes: 0 success, 2 usage or domain error, 3 no equilibrium threshold,
//! 4 simulation disagrees with the engine (`|z| > 5`).

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::approximation::{le_threshold_band, BoundReport, DEFAULT_BITS};
use crate::engine::equilibrium_sweep;
use crate::engine::{
    best_cheat, cheat_utility, honest_utility, limited_dup_counterexamples, linear_threshold_pivot,
    minimal_threshold, CheatAssessment, DupScan, SearchMethod, ThresholdOptions, ThresholdResult,
    BRUTE_FORCE_LIMIT,
};
use crate::error::{Error, Result};
use crate::models::{ModelRegistry, UtilityModel};
use crate::numerics::{ExactRational, Precision};
use crate::simulator::{simulate, SimConfig, SimMode, SimReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NO_THRESHOLD: i32 = 3;
pub const EXIT_DISAGREEMENT: i32 = 4;

/// `|z|` above which `simulate` exits with [`EXIT_DISAGREEMENT`].
pub const Z_LIMIT: f64 = 5.0;

const DECIMAL_DIGITS: usize = 20;

#[derive(Debug, Parser)]
#[command(
    name = "sybil-threshold",
    version,
    about = "Equilibrium thresholds against Sybil duplication"
)]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = OutputFormat::Json, global = true)]
    pub output: OutputFormat,
    /// Write output to this file instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for sweeps and simulations.
    #[arg(long, env = "SYBIL_THREADS", global = true)]
    pub threads: Option<usize>,
    /// Leave the wall time out of JSON metadata so output is byte-stable.
    #[arg(long, global = true)]
    pub no_timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScanArg {
    Auto,
    Full,
    Hinted,
}

impl ScanArg {
    fn resolve(self, l: u64) -> DupScan {
        match self {
            Self::Full => DupScan::Full,
            Self::Hinted => DupScan::Hinted,
            Self::Auto if l <= BRUTE_FORCE_LIMIT => DupScan::Full,
            Self::Auto => DupScan::Hinted,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Game,
    Ring,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// `le`, `ks:<k>`, or `ks` together with `--k`.
    #[arg(long)]
    pub model: String,
    #[arg(long)]
    pub k: Option<u64>,
}

impl ModelArgs {
    fn selection(&self) -> String {
        match self.k {
            Some(k) if !self.model.contains(':') => format!("{}:{k}", self.model),
            _ => self.model.clone(),
        }
    }

    fn resolve(&self) -> Result<UtilityModel> {
        ModelRegistry::with_builtins().resolve(&self.selection())
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Minimal threshold t* for an id space of size L.
    Threshold {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long = "L")]
        l: u64,
        #[arg(long, default_value = "auto")]
        method: SearchMethod,
        #[arg(long, default_value = "exact")]
        precision: Precision,
        /// Ignore the model's limited-duplications hint.
        #[arg(long)]
        no_hints: bool,
    },
    /// Honest and cheating utilities at one (L, t).
    Check {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long = "L")]
        l: u64,
        #[arg(long)]
        t: u64,
        /// Evaluate a single duplication count instead of the full table.
        #[arg(long)]
        m: Option<u64>,
        /// Duplication counts the cheater considers. `auto` scans every `m`
        /// up to L = 500 and follows the model's hint above that.
        #[arg(long, value_enum, default_value_t = ScanArg::Auto)]
        scan: ScanArg,
    },
    /// t* for every L in a range.
    Sweep {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long = "L-min")]
        l_min: u64,
        #[arg(long = "L-max")]
        l_max: u64,
        #[arg(long, default_value_t = 1)]
        step: u64,
        #[arg(long, default_value = "auto")]
        method: SearchMethod,
        #[arg(long, default_value = "exact")]
        precision: Precision,
    },
    /// Closed-form leader-election bounds at t = 0.2L and t = 0.21L.
    Approx {
        #[arg(long = "L")]
        l: u64,
    },
    /// Monte Carlo estimate of g(L, t, m) compared with the engine.
    Simulate {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long = "L")]
        l: u64,
        #[arg(long)]
        t: u64,
        #[arg(long, default_value_t = 0)]
        m: u64,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = ModeArg::Game)]
        mode: ModeArg,
    },
    /// Brute-force audit of the linear-threshold and limited-duplications claims.
    Verify {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long = "L")]
        l: u64,
        /// Duplication count for the limited-duplications audit; defaults to
        /// the model's hint, else 1.
        #[arg(long)]
        m_prime: Option<u64>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Self::Threshold { .. } => "threshold",
            Self::Check { .. } => "check",
            Self::Sweep { .. } => "sweep",
            Self::Approx { .. } => "approx",
            Self::Simulate { .. } => "simulate",
            Self::Verify { .. } => "verify",
        }
    }
}

/// What a command produced: JSON parts, CSV text and the exit code.
struct Rendered {
    params: Value,
    result: Value,
    precision: String,
    csv: String,
    code: i32,
}

/// `{exact: "p/q", decimal: "..."}`
pub fn rational_json(r: &ExactRational) -> Value {
    json!({ "exact": r.to_string(), "decimal": r.to_decimal_string(DECIMAL_DIGITS) })
}

fn assessment_json(a: &CheatAssessment) -> Value {
    let mut v = json!({
        "l": a.l,
        "t": a.t,
        "f": rational_json(&a.f_value),
        "g_star": rational_json(&a.g_star),
        "m_star": a.m_star,
        "in_equilibrium": a.in_equilibrium(),
        "limited_to": a.limited_to,
    });
    if let Some(table) = &a.per_m {
        v["per_m"] = table
            .iter()
            .map(|e| json!({ "m": e.m, "g": rational_json(&e.g) }))
            .collect();
    }
    v
}

fn threshold_json(r: &ThresholdResult) -> Value {
    json!({
        "l": r.l,
        "model": r.model,
        "t_star": r.t_star,
        "ratio": rational_json(&ExactRational::new(r.t_star, r.l)),
        "method": r.method.as_str(),
        "precision": r.precision.to_string(),
        "certification": r.certification,
        "witness_below": r.witness_below.as_ref().map(assessment_json),
        "witness_at": assessment_json(&r.witness_at),
    })
}

fn bound_json(r: &BoundReport) -> Value {
    serde_json::to_value(r).expect("bound report serializes")
}

fn sim_json(r: &SimReport) -> Value {
    let mut v = serde_json::to_value(r).expect("sim report serializes");
    v["analytic"] = rational_json(&r.analytic);
    v
}

fn csv_line<I, S>(cells: I) -> String
where
    I: IntoIterator<Item = S>,
    S: ToString,
{
    let mut line = cells
        .into_iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(",");
    line.push('\n');
    line
}

pub const THRESHOLD_HEADER: &str =
    "L,model,t_star,ratio,method,precision,certification,f_at,g_at,m_star_below";
pub const SWEEP_HEADER: &str = "L,t_star,ratio,f_at,g_at,m_star_below";
pub const CHECK_HEADER: &str = "L,t,m,f,g,profitable";
pub const APPROX_HEADER: &str = "L,t,side,f_lb,f_ub,g_lb,g_ub,verdict";
pub const SIMULATE_HEADER: &str =
    "mode,model,L,t,m,seed,trials,successes,detected,estimate,stderr,analytic,z_score";
pub const VERIFY_HEADER: &str = "property,parameter,holds,detail";

fn threshold_row(r: &ThresholdResult) -> Vec<String> {
    vec![
        r.l.to_string(),
        r.t_star.to_string(),
        ExactRational::new(r.t_star, r.l).to_string(),
        r.witness_at.f_value.to_string(),
        r.witness_at.g_star.to_string(),
        r.witness_below
            .as_ref()
            .map_or(String::new(), |w| w.m_star.to_string()),
    ]
}

fn threshold_options(
    method: SearchMethod,
    precision: Precision,
    use_hints: bool,
) -> ThresholdOptions {
    ThresholdOptions {
        method,
        precision,
        use_hints,
    }
}

fn cmd_threshold(
    model: &ModelArgs,
    l: u64,
    method: SearchMethod,
    precision: Precision,
    no_hints: bool,
) -> Result<Rendered> {
    let m = model.resolve()?;
    let params = json!({
        "model": m.name(), "L": l, "method": method, "precision": precision.to_string(), "use_hints": !no_hints,
    });
    let found = minimal_threshold(l, &m, threshold_options(method, precision, !no_hints))?;
    let mut csv = csv_line([THRESHOLD_HEADER]);
    let (result, code) = match &found {
        Some(r) => {
            let mut cells = threshold_row(r);
            cells.insert(1, r.model.clone());
            cells.insert(4, r.method.as_str().to_string());
            cells.insert(5, r.precision.to_string());
            cells.insert(
                6,
                serde_json::to_value(r.certification)
                    .unwrap()
                    .as_str()
                    .unwrap_or("")
                    .to_string(),
            );
            csv.push_str(&csv_line(cells));
            (threshold_json(r), EXIT_OK)
        }
        None => (
            json!({ "l": l, "model": m.name(), "t_star": null }),
            EXIT_NO_THRESHOLD,
        ),
    };
    Ok(Rendered {
        params,
        result,
        precision: precision.to_string(),
        csv,
        code,
    })
}

fn cmd_check(model: &ModelArgs, l: u64, t: u64, m: Option<u64>, scan: ScanArg) -> Result<Rendered> {
    let um = model.resolve()?;
    let scan = scan.resolve(l);
    let params = json!({ "model": um.name(), "L": l, "t": t, "m": m, "scan": scan });
    let mut csv = csv_line([CHECK_HEADER]);
    let result = match m {
        Some(m) => {
            let f = honest_utility(l, t, &um)?;
            let g = cheat_utility(l, t, m, &um)?;
            let verdict = best_cheat(l, t, &um, scan, false)?;
            csv.push_str(&csv_line([
                l.to_string(),
                t.to_string(),
                m.to_string(),
                f.to_string(),
                g.to_string(),
                (g > f).to_string(),
            ]));
            json!({
                "l": l,
                "t": t,
                "m": m,
                "f": rational_json(&f),
                "g": rational_json(&g),
                "profitable": g > f,
                "in_equilibrium": verdict.in_equilibrium(),
                "m_star": verdict.m_star,
            })
        }
        None => {
            let a = best_cheat(l, t, &um, scan, true)?;
            for e in a.per_m.iter().flatten() {
                csv.push_str(&csv_line([
                    l.to_string(),
                    t.to_string(),
                    e.m.to_string(),
                    a.f_value.to_string(),
                    e.g.to_string(),
                    (e.g > a.f_value).to_string(),
                ]));
            }
            assessment_json(&a)
        }
    };
    Ok(Rendered {
        params,
        result,
        precision: Precision::Exact.to_string(),
        csv,
        code: EXIT_OK,
    })
}

fn cmd_sweep(
    model: &ModelArgs,
    l_min: u64,
    l_max: u64,
    step: u64,
    method: SearchMethod,
    precision: Precision,
) -> Result<Rendered> {
    let um = model.resolve()?;
    if step == 0 {
        return Err(Error::InvalidConfig("--step must be positive".into()));
    }
    if l_min < crate::MIN_NETWORK {
        return Err(Error::IdSpaceTooSmall(l_min));
    }
    let params = json!({
        "model": um.name(), "L_min": l_min, "L_max": l_max, "step": step,
        "method": method, "precision": precision.to_string(),
    });
    let sizes: Vec<u64> = (l_min..=l_max).step_by(step as usize).collect();
    let options = threshold_options(method, precision, true);
    let rows: Vec<Option<ThresholdResult>> = sizes
        .par_iter()
        .map(|&l| minimal_threshold(l, &um, options))
        .collect::<Result<_>>()?;
    let mut csv = csv_line([SWEEP_HEADER]);
    let mut json_rows = Vec::new();
    let mut code = EXIT_OK;
    for (l, row) in sizes.iter().zip(&rows) {
        match row {
            Some(r) => {
                csv.push_str(&csv_line(threshold_row(r)));
                json_rows.push(threshold_json(r));
            }
            None => {
                csv.push_str(&csv_line([
                    l.to_string(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                ]));
                json_rows.push(json!({ "l": l, "t_star": null }));
                code = EXIT_NO_THRESHOLD;
            }
        }
    }
    Ok(Rendered {
        params,
        result: json!({ "rows": json_rows }),
        precision: precision.to_string(),
        csv,
        code,
    })
}

fn cmd_approx(l: u64) -> Result<Rendered> {
    let band = le_threshold_band(l)?;
    let mut csv = csv_line([APPROX_HEADER]);
    for (side, report) in [("cheat", &band.cheat_side), ("safe", &band.safe_side)] {
        let t = if side == "cheat" {
            band.cheat_t
        } else {
            band.safe_t
        };
        let cells = match report {
            Some(r) => {
                let num = |x: &crate::numerics::Real| x.to_f64().value().to_string();
                vec![
                    l.to_string(),
                    t.to_string(),
                    side.into(),
                    num(&r.f_lb),
                    num(&r.f_ub),
                    num(&r.g_lb),
                    num(&r.g_ub),
                    r.verdict.as_str().into(),
                ]
            }
            None => vec![
                l.to_string(),
                t.to_string(),
                side.into(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                "indeterminate".into(),
            ],
        };
        csv.push_str(&csv_line(cells));
    }
    csv.push_str(&csv_line([
        l.to_string(),
        String::new(),
        "band".into(),
        String::new(),
        String::new(),
        String::new(),
        String::new(),
        band.verdict().into(),
    ]));
    let result = json!({
        "l": l,
        "verdict": band.verdict(),
        "approx_threshold": band.approx_threshold,
        "cheat_t": band.cheat_t,
        "cheat_verdict": band.cheat_verdict(),
        "cheat_side": band.cheat_side.as_ref().map(bound_json),
        "safe_t": band.safe_t,
        "safe_verdict": band.safe_verdict(),
        "safe_side": band.safe_side.as_ref().map(bound_json),
    });
    Ok(Rendered {
        params: json!({ "L": l }),
        result,
        precision: Precision::Float { bits: DEFAULT_BITS }.to_string(),
        csv,
        code: EXIT_OK,
    })
}

fn cmd_simulate(
    model: &ModelArgs,
    l: u64,
    t: u64,
    m: u64,
    trials: u64,
    seed: u64,
    mode: ModeArg,
) -> Result<Rendered> {
    let um = model.resolve()?;
    let mode = match mode {
        ModeArg::Game => SimMode::GameLevel,
        ModeArg::Ring => SimMode::RingProtocol,
    };
    let config = SimConfig {
        l,
        t,
        m,
        model: um,
        trials,
        seed,
        mode,
    };
    let report = simulate(&config)?;
    let params = json!({
        "model": config.model.name(), "L": l, "t": t, "m": m, "trials": trials, "seed": seed, "mode": mode,
    });
    let mut csv = csv_line([SIMULATE_HEADER]);
    csv.push_str(&csv_line([
        mode.as_str().to_string(),
        report.model.clone(),
        l.to_string(),
        t.to_string(),
        m.to_string(),
        seed.to_string(),
        trials.to_string(),
        report.successes.to_string(),
        report.detected.to_string(),
        report.estimate.to_string(),
        report.stderr.to_string(),
        report.analytic.to_string(),
        report.z_score.to_string(),
    ]));
    let code = if report.z_score.abs() > Z_LIMIT {
        EXIT_DISAGREEMENT
    } else {
        EXIT_OK
    };
    Ok(Rendered {
        params,
        result: sim_json(&report),
        precision: Precision::Exact.to_string(),
        csv,
        code,
    })
}

fn cmd_verify(model: &ModelArgs, l: u64, m_prime: Option<u64>) -> Result<Rendered> {
    let um = model.resolve()?;
    crate::engine::check_id_space(l)?;
    if l > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLargeForBruteForce {
            l,
            max: BRUTE_FORCE_LIMIT,
        });
    }
    let m_prime = m_prime.or(um.hints().limited_dup).unwrap_or(1);
    let rows = equilibrium_sweep(l, &um, DupScan::Full, None)?;
    let indicator: Vec<(u64, bool)> = rows.iter().map(|r| (r.t, r.in_equilibrium)).collect();
    let pivot = linear_threshold_pivot(&indicator);
    let counterexamples = limited_dup_counterexamples(l, &um, m_prime)?;
    let limited_ok = counterexamples.is_empty();
    let mut csv = csv_line([VERIFY_HEADER]);
    csv.push_str(&csv_line([
        "linear-threshold".to_string(),
        String::new(),
        pivot.is_some().to_string(),
        pivot.map_or(String::new(), |p| format!("pivot={p}")),
    ]));
    csv.push_str(&csv_line([
        "limited-dup".to_string(),
        m_prime.to_string(),
        limited_ok.to_string(),
        format!("counterexamples={}", counterexamples.len()),
    ]));
    let result = json!({
        "l": l,
        "model": um.name(),
        "linear_threshold": { "holds": pivot.is_some(), "pivot": pivot },
        "limited_dup": { "m_prime": m_prime, "holds": limited_ok, "counterexamples": counterexamples },
        "hints": um.hints(),
    });
    Ok(Rendered {
        params: json!({ "model": um.name(), "L": l, "m_prime": m_prime }),
        result,
        precision: Precision::Exact.to_string(),
        csv,
        code: EXIT_OK,
    })
}

fn execute(command: &Command) -> Result<Rendered> {
    match command {
        Command::Threshold {
            model,
            l,
            method,
            precision,
            no_hints,
        } => cmd_threshold(model, *l, *method, *precision, *no_hints),
        Command::Check {
            model,
            l,
            t,
            m,
            scan,
        } => cmd_check(model, *l, *t, *m, *scan),
        Command::Sweep {
            model,
            l_min,
            l_max,
            step,
            method,
            precision,
        } => cmd_sweep(model, *l_min, *l_max, *step, *method, *precision),
        Command::Approx { l } => cmd_approx(*l),
        Command::Simulate {
            model,
            l,
            t,
            m,
            trials,
            seed,
            mode,
        } => cmd_simulate(model, *l, *t, *m, *trials, *seed, *mode),
        Command::Verify { model, l, m_prime } => cmd_verify(model, *l, *m_prime),
    }
}

#[derive(Serialize)]
struct Meta {
    version: &'static str,
    precision: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    wall_time_ms: Option<f64>,
}

fn render(cli: &Cli, rendered: &Rendered, elapsed_ms: f64) -> String {
    match cli.output {
        OutputFormat::Csv => rendered.csv.clone(),
        OutputFormat::Json => {
            let meta = Meta {
                version: env!("CARGO_PKG_VERSION"),
                precision: rendered.precision.clone(),
                wall_time_ms: (!cli.no_timing).then_some(elapsed_ms),
            };
            let doc = json!({
                "command": cli.command.name(),
                "params": rendered.params,
                "result": rendered.result,
                "meta": meta,
            });
            let mut text = serde_json::to_string_pretty(&doc).expect("json output");
            text.push('\n');
            text
        }
    }
}

fn run_parsed(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let start = Instant::now();
    let outcome = match cli.threads {
        Some(0) => Err(Error::InvalidConfig("--threads must be positive".into())),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| execute(&cli.command)),
            Err(e) => Err(Error::InvalidConfig(e.to_string())),
        },
        None => execute(&cli.command),
    };
    let rendered = match outcome {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let text = render(cli, &rendered, start.elapsed().as_secs_f64() * 1e3);
    let written = match &cli.out {
        Some(path) => File::create(path).and_then(|mut f| f.write_all(text.as_bytes())),
        None => out.write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        let _ = writeln!(err, "error: {e}");
        return EXIT_USAGE;
    }
    rendered.code
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code. Primary output goes to `out` (or `--out`), diagnostics to
/// standard error.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with_stderr(args, out, &mut io::stderr())
}

pub fn run_with_stderr<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run_parsed(&cli, out, err),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            code
        }
    }
}
