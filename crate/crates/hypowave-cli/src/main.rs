//! Command-line front end for the spectral workbench.
//!
//! Each subcommand drives one verification suite from `hypowave-core`,
//! prints a one-line-per-check summary table, and writes CSV / plot-data /
//! JSON artifacts atomically (write to `<path>.partial`, then rename).
//!
//! Exit codes: `0` when every check passes, `1` when a check fails, is
//! inconclusive, or a computation error surfaces mid-run, `2` on usage
//! errors (bad flags, malformed config files, unreadable or
//! schema-violating inputs).
//!
//! Flags may also be given through `--config <file>` (TOML preferred, JSON
//! accepted; keys match the long flag names with `_` for `-`). Explicit
//! flags override file values. The environment variable `HYPOWAVE_THREADS`
//! caps sweep parallelism.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Deserialize;
use serde_json::json;

use hypowave_core::coefficient::{PropagationSpeed, SpeedSpec};
use hypowave_core::gevrey;
use hypowave_core::heisenberg::{self, ZLetter};
use hypowave_core::mode_ode::{
    self, EnvelopeOptions, IntegrateOptions, ModeProblem, WMonotonicityOptions,
};
use hypowave_core::spectral::{self, SpectralField};
use hypowave_core::su2::{self, HalfInt, SpectralFieldSU2};
use hypowave_core::wave::{self, GevreyVerdict, SolveOptions};

// ---------------------------------------------------------------------------
// Errors and exit-code plumbing
// ---------------------------------------------------------------------------

/// Failures are split by exit code: usage problems (anything that prevents
/// the experiment from starting) exit 2, runtime failures exit 1.
#[derive(Debug)]
enum CliError {
    Usage(String),
    Run(String),
}

fn usage<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Usage(msg.into()))
}

type CliResult<T> = Result<T, CliError>;

// ---------------------------------------------------------------------------
// Check summary: one line per verified property, plus machine JSON
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

/// One verified property: a measured value against its bound.
#[derive(Debug, Clone)]
struct CheckLine {
    name: &'static str,
    measured: f64,
    bound: f64,
    verdict: Verdict,
}

impl CheckLine {
    /// Check of the form `measured ≤ bound` (NaN fails the comparison).
    fn at_most(name: &'static str, measured: f64, bound: f64) -> Self {
        let verdict = if measured <= bound { Verdict::Pass } else { Verdict::Fail };
        CheckLine { name, measured, bound, verdict }
    }

    /// Check of the form `measured ≥ bound` (NaN fails the comparison).
    fn at_least(name: &'static str, measured: f64, bound: f64) -> Self {
        let verdict = if measured >= bound { Verdict::Pass } else { Verdict::Fail };
        CheckLine { name, measured, bound, verdict }
    }

    /// Informational line: always passes, prints the measurement.
    fn info(name: &'static str, measured: f64) -> Self {
        CheckLine { name, measured, bound: f64::INFINITY, verdict: Verdict::Pass }
    }
}

/// Everything a subcommand hands back for reporting.
struct RunOutcome {
    checks: Vec<CheckLine>,
    /// Extra subcommand-specific fields for the JSON summary.
    extra: serde_json::Value,
    /// Optional JSON summary path.
    summary: Option<PathBuf>,
}

impl RunOutcome {
    fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.verdict == Verdict::Pass)
    }
}

/// Fixed-width float formatting; `{:.12e}` keeps artifacts byte-identical
/// across runs of the same configuration.
fn fx(x: f64) -> String {
    format!("{x:.12e}")
}

/// JSON number that degrades non-finite values to `null` explicitly instead
/// of relying on serializer defaults.
fn json_num(x: f64) -> serde_json::Value {
    if x.is_finite() { json!(x) } else { serde_json::Value::Null }
}

/// Print one line to stdout; if the reading end of a pipe has gone away
/// (e.g. `hypowave … | head`), exit with the conventional SIGPIPE status
/// instead of panicking. Artifacts are written before any table output, so
/// nothing is lost by stopping here.
fn emit(line: std::fmt::Arguments<'_>) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    if let Err(e) = writeln!(out, "{line}") {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(141);
        }
    }
}

fn print_table(subcommand: &str, checks: &[CheckLine]) {
    emit(format_args!("{:<28} {:>20} {:>20} {:>12}", "check", "measured", "bound", "verdict"));
    for c in checks {
        emit(format_args!("{:<28} {:>20} {:>20} {:>12}", c.name, fx(c.measured), fx(c.bound), c.verdict));
    }
    let failed = checks.iter().filter(|c| c.verdict != Verdict::Pass).count();
    emit(format_args!("{subcommand}: {}/{} checks passed", checks.len() - failed, checks.len()));
}

fn write_summary(subcommand: &str, outcome: &RunOutcome) -> CliResult<()> {
    let Some(path) = &outcome.summary else { return Ok(()) };
    let checks: Vec<serde_json::Value> = outcome
        .checks
        .iter()
        .map(|c| {
            json!({
                "name": c.name,
                "measured": json_num(c.measured),
                "bound": json_num(c.bound),
                "verdict": c.verdict.to_string(),
            })
        })
        .collect();
    let doc = json!({ "subcommand": subcommand, "checks": checks, "detail": outcome.extra });
    let text = serde_json::to_string_pretty(&doc)
        .map_err(|e| CliError::Run(format!("cannot serialize summary: {e}")))?;
    write_atomic(path, &(text + "\n"))
}

// ---------------------------------------------------------------------------
// Artifact writing
// ---------------------------------------------------------------------------

/// Writes via a `.partial` sibling and renames, so no artifact is ever left
/// half-written.
fn write_atomic(path: &Path, contents: &str) -> CliResult<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".partial");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, contents)
        .map_err(|e| CliError::Run(format!("cannot write {}: {e}", tmp.display())))?;
    fs::rename(&tmp, path)
        .map_err(|e| CliError::Run(format!("cannot rename {} into place: {e}", tmp.display())))
}

/// Assembles a CSV artifact: header row, then `{:.12e}`-formatted cells.
fn csv_text(header: &str, rows: &[Vec<String>]) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

// ---------------------------------------------------------------------------
// Shared flag parsing
// ---------------------------------------------------------------------------

/// Parses the speed catalogue syntax: `const:c`, `sin:c,b,omega`,
/// `cusp:c,t0,alpha`, `tsq`, `sinsq`.
fn parse_speed_spec(text: &str) -> CliResult<SpeedSpec> {
    let (head, rest) = match text.split_once(':') {
        Some((h, r)) => (h, Some(r)),
        None => (text, None),
    };
    let nums = |rest: Option<&str>, n: usize| -> CliResult<Vec<f64>> {
        let body = rest.unwrap_or("");
        let vals: Vec<f64> = body
            .split(',')
            .filter(|s| !s.is_empty())
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| CliError::Usage(format!("bad number in speed '{text}': {e}")))?;
        if vals.len() != n {
            return usage(format!("speed '{head}' takes {n} parameters, got {}", vals.len()));
        }
        Ok(vals)
    };
    match head {
        "const" => {
            let v = nums(rest, 1)?;
            Ok(SpeedSpec::Constant { c: v[0] })
        }
        "sin" => {
            let v = nums(rest, 3)?;
            Ok(SpeedSpec::Sine { c: v[0], b: v[1], omega: v[2] })
        }
        "cusp" => {
            let v = nums(rest, 3)?;
            Ok(SpeedSpec::Cusp { c: v[0], t0: v[1], alpha: v[2] })
        }
        "tsq" => {
            nums(rest, 0)?;
            Ok(SpeedSpec::Quadratic)
        }
        "sinsq" => {
            nums(rest, 0)?;
            Ok(SpeedSpec::SineSquared)
        }
        other => usage(format!(
            "unknown speed '{other}'; use const:c, sin:c,b,omega, cusp:c,t0,alpha, tsq, sinsq"
        )),
    }
}

fn build_speed(text: &str, horizon: f64) -> CliResult<PropagationSpeed> {
    let spec = parse_speed_spec(text)?;
    PropagationSpeed::from_spec(spec, horizon)
        .map_err(|e| CliError::Usage(format!("invalid speed '{text}': {e}")))
}

fn parse_f64_list(text: &str, what: &str) -> CliResult<Vec<f64>> {
    let vals: Vec<f64> = text
        .split(',')
        .filter(|s| !s.is_empty())
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Usage(format!("bad number in {what} '{text}': {e}")))?;
    if vals.is_empty() {
        return usage(format!("{what} must contain at least one value"));
    }
    Ok(vals)
}

fn parse_halfint(text: &str, what: &str) -> CliResult<HalfInt> {
    text.parse::<HalfInt>()
        .map_err(|e| CliError::Usage(format!("bad {what} '{text}': {e}")))
}

/// Loads a subcommand's config file; absent path means all-defaults.
fn load_config<T: Default + serde::de::DeserializeOwned>(path: Option<&Path>) -> CliResult<T> {
    let Some(path) = path else { return Ok(T::default()) };
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    if path.extension().is_some_and(|e| e == "json") {
        serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("malformed config {}: {e}", path.display())))
    } else {
        toml::from_str(&text)
            .map_err(|e| CliError::Usage(format!("malformed config {}: {e}", path.display())))
    }
}

/// Loads a spectral field from its JSON schema, classifying schema
/// violations as usage errors (they name the offending key).
fn load_field(path: &Path) -> CliResult<SpectralField> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read field {}: {e}", path.display())))?;
    spectral::from_json_str(&text)
        .map_err(|e| CliError::Usage(format!("invalid field {}: {e}", path.display())))
}

fn save_field(path: &Path, field: &SpectralField) -> CliResult<()> {
    let text = spectral::to_json_string(field)
        .map_err(|e| CliError::Run(format!("cannot serialize field: {e}")))?;
    write_atomic(path, &(text + "\n"))
}

// ---------------------------------------------------------------------------
// Command-line surface
// ---------------------------------------------------------------------------

#[derive(Parser)]
#[command(
    name = "hypowave",
    version,
    about = "Spectral workbench runner: mode energies, group symbol sweeps, \
             wave solves, Gevrey ladders, trace sums"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Energy envelopes of single modes v'' + β²a(t)v = 0 over a β grid.
    OdeEnergy(OdeEnergyArgs),
    /// Operator norms of SU(2) Riesz words against the sharp √(len!)·2^(len/2) uniform bound.
    Su2Riesz(Su2RieszArgs),
    /// Heisenberg Riesz words: λ sweep and λ-invariance of the valid block.
    HeisRiesz(HeisRieszArgs),
    /// Wave Cauchy solve with Sobolev or Gevrey well-posedness measurement.
    Wave(WaveArgs),
    /// Power-norm ladder against the closed-form bound; optional order fit.
    Gevrey(GevreyArgs),
    /// Bessel-type trace partial sums and convergence classification.
    Bessel(BesselArgs),
}

#[derive(Args)]
struct OdeEnergyArgs {
    /// Expected regularity case 1–4; errors if the speed lands elsewhere.
    #[arg(long)]
    case: Option<u8>,
    /// Speed: const:c | sin:c,b,omega | cusp:c,t0,alpha | tsq | sinsq.
    #[arg(long)]
    speed: Option<String>,
    /// Comma-separated frequency grid, e.g. 1,10,100.
    #[arg(long = "beta-grid", value_name = "LIST")]
    beta_grid: Option<String>,
    /// Final time of the interval [0, T].
    #[arg(long = "T", value_name = "T")]
    horizon: Option<f64>,
    /// Gevrey index the envelope abscissa is scaled with (cases 2–4).
    #[arg(long)]
    s: Option<f64>,
    /// Relative tolerance of the mode integrator.
    #[arg(long = "rel-tol")]
    rel_tol: Option<f64>,
    /// Samples per trajectory.
    #[arg(long)]
    samples: Option<usize>,
    /// CSV artifact path (case,beta,s,sup_ratio,fitted_K,residual).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Plot-data path for the largest-β trajectory (t, v, v', E columns).
    #[arg(long)]
    trajectories: Option<PathBuf>,
    /// JSON summary path.
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Config file; explicit flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct OdeEnergyFile {
    case: Option<u8>,
    speed: Option<String>,
    beta_grid: Option<Vec<f64>>,
    horizon: Option<f64>,
    s: Option<f64>,
    rel_tol: Option<f64>,
    samples: Option<usize>,
    out: Option<PathBuf>,
    trajectories: Option<PathBuf>,
    summary: Option<PathBuf>,
}

#[derive(Args)]
struct Su2RieszArgs {
    /// Single word over {X, Y}, e.g. XY; dense norms per representation.
    #[arg(long, conflicts_with = "max_len")]
    word: Option<String>,
    /// Sweep all words up to this length instead (band fast path).
    #[arg(long = "max-len")]
    max_len: Option<usize>,
    /// Largest representation index (integer or half-integer, e.g. 50 or 51/2).
    #[arg(long)]
    lmax: Option<String>,
    /// CSV artifact path (l,word,op_norm,max_norm).
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON summary path.
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Config file; explicit flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Su2RieszFile {
    word: Option<String>,
    max_len: Option<usize>,
    lmax: Option<String>,
    out: Option<PathBuf>,
    summary: Option<PathBuf>,
}

#[derive(Args)]
struct HeisRieszArgs {
    /// Single word over {Z, Zbar} (also accepts B for Zbar), e.g. ZZbar.
    #[arg(long, conflicts_with = "max_len")]
    word: Option<String>,
    /// Sweep all words up to this length instead.
    #[arg(long = "max-len")]
    max_len: Option<usize>,
    /// Comma-separated λ values (nonzero, e.g. -10,-1,-0.1,0.1,1,10).
    #[arg(long, allow_hyphen_values = true)]
    lambdas: Option<String>,
    /// Hermite truncation N.
    #[arg(long)]
    trunc: Option<usize>,
    /// Tolerance of the λ-invariance deviation check.
    #[arg(long)]
    tol: Option<f64>,
    /// CSV artifact path (lambda,word,op_norm,block_size).
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON summary path.
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Config file; explicit flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct HeisRieszFile {
    word: Option<String>,
    max_len: Option<usize>,
    lambdas: Option<Vec<f64>>,
    trunc: Option<usize>,
    tol: Option<f64>,
    out: Option<PathBuf>,
    summary: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
enum WaveCheck {
    Sobolev,
    Gevrey,
}

#[derive(Args)]
struct WaveArgs {
    /// Initial position field (JSON schema).
    #[arg(long)]
    u0: Option<PathBuf>,
    /// Initial velocity field (JSON schema).
    #[arg(long)]
    u1: Option<PathBuf>,
    /// Use built-in demo data instead of field files.
    #[arg(long, conflicts_with_all = ["u0", "u1"])]
    demo: bool,
    /// Speed: const:c | sin:c,b,omega | cusp:c,t0,alpha | tsq | sinsq.
    #[arg(long)]
    speed: Option<String>,
    /// Final time of the interval [0, T].
    #[arg(long = "T", value_name = "T")]
    horizon: Option<f64>,
    /// Which well-posedness measurement to run.
    #[arg(long, value_enum)]
    check: Option<WaveCheck>,
    /// Sobolev or Gevrey index.
    #[arg(long)]
    s: Option<f64>,
    /// Data weight exponent A (Gevrey check).
    #[arg(long = "a-data")]
    a_data: Option<f64>,
    /// Exponent loss rate k per unit time (Gevrey check).
    #[arg(long = "k-rate")]
    k_rate: Option<f64>,
    /// Relative tolerance of the mode integrator.
    #[arg(long = "rel-tol")]
    rel_tol: Option<f64>,
    /// Time samples of the solution.
    #[arg(long)]
    samples: Option<usize>,
    /// CSV artifact path (t,lhs,rhs,ratio).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Path to save the final-time position field (JSON schema).
    #[arg(long = "save-final")]
    save_final: Option<PathBuf>,
    /// JSON summary path.
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Config file; explicit flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct WaveFile {
    u0: Option<PathBuf>,
    u1: Option<PathBuf>,
    demo: Option<bool>,
    speed: Option<String>,
    horizon: Option<f64>,
    check: Option<WaveCheck>,
    s: Option<f64>,
    a_data: Option<f64>,
    k_rate: Option<f64>,
    rel_tol: Option<f64>,
    samples: Option<usize>,
    out: Option<PathBuf>,
    save_final: Option<PathBuf>,
    summary: Option<PathBuf>,
}

#[derive(Args)]
struct GevreyArgs {
    /// Input field (JSON schema); omit to use the built-in demo field.
    #[arg(long)]
    field: Option<PathBuf>,
    /// Demo field decay rate c in e^{−c(2l+1)} (used when --field is absent).
    #[arg(long = "demo-decay")]
    demo_decay: Option<f64>,
    /// Demo field cutoff (integer or half-integer).
    #[arg(long = "demo-lmax")]
    demo_lmax: Option<String>,
    /// Weight scale D of the exponential norm.
    #[arg(long)]
    d: Option<f64>,
    /// Gevrey index s ≥ 1.
    #[arg(long)]
    s: Option<f64>,
    /// Largest power order k of the ladder.
    #[arg(long)]
    kmax: Option<usize>,
    /// Also fit (s, A) from the measured ladder.
    #[arg(long)]
    fit: bool,
    /// CSV artifact path (k,lk_norm,bound,margin).
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON summary path.
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Config file; explicit flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct GevreyFile {
    field: Option<PathBuf>,
    demo_decay: Option<f64>,
    demo_lmax: Option<String>,
    d: Option<f64>,
    s: Option<f64>,
    kmax: Option<usize>,
    fit: Option<bool>,
    out: Option<PathBuf>,
    summary: Option<PathBuf>,
}

#[derive(Args)]
struct BesselArgs {
    /// Trace-weight exponent s > 0.
    #[arg(long)]
    s: Option<f64>,
    /// Largest cutoff the doubling sweep may reach.
    #[arg(long)]
    lmax: Option<String>,
    /// First cutoff of the doubling sweep.
    #[arg(long)]
    base: Option<String>,
    /// Convergence needs the increment ratio below 1 − margin.
    #[arg(long = "ratio-margin")]
    ratio_margin: Option<f64>,
    /// CSV artifact path (lmax,partial_sum,increment,ratio).
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON summary path.
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Config file; explicit flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct BesselFile {
    s: Option<f64>,
    lmax: Option<String>,
    base: Option<String>,
    ratio_margin: Option<f64>,
    out: Option<PathBuf>,
    summary: Option<PathBuf>,
}

// ---------------------------------------------------------------------------
// Subcommand runners
// ---------------------------------------------------------------------------

fn run_ode_energy(args: OdeEnergyArgs) -> CliResult<RunOutcome> {
    let file: OdeEnergyFile = load_config(args.config.as_deref())?;
    let speed_text = args
        .speed
        .or(file.speed)
        .ok_or_else(|| CliError::Usage("--speed is required".into()))?;
    let betas = match args.beta_grid {
        Some(text) => parse_f64_list(&text, "--beta-grid")?,
        None => file
            .beta_grid
            .ok_or_else(|| CliError::Usage("--beta-grid is required".into()))?,
    };
    let horizon = args.horizon.or(file.horizon).unwrap_or(1.0);
    let s = args.s.or(file.s).unwrap_or(1.0);
    let rel_tol = args.rel_tol.or(file.rel_tol).unwrap_or(1e-10);
    let samples = args.samples.or(file.samples).unwrap_or(256);
    let out = args.out.or(file.out).unwrap_or_else(|| PathBuf::from("ode-energy.csv"));
    let trajectories = args.trajectories.or(file.trajectories);
    let summary = args.summary.or(file.summary);

    let speed = build_speed(&speed_text, horizon)?;
    let case = speed.class().case_index();
    if let Some(expected) = args.case.or(file.case) {
        if case != expected {
            return usage(format!(
                "speed '{speed_text}' has regularity case {case}, not the requested {expected}"
            ));
        }
    }
    let opts = EnvelopeOptions { rel_tol, samples, beta0: 1.0 };
    for &beta in &betas {
        if !beta.is_finite() || beta < opts.beta0 {
            return usage(format!("beta {beta} must be finite and ≥ {}", opts.beta0));
        }
    }

    let report = mode_ode::verify_envelope(&speed, &betas, s, opts)
        .map_err(|e| CliError::Run(format!("envelope verification failed: {e}")))?;

    let mut checks = vec![CheckLine::at_most(
        "envelope-fit-residual",
        report.max_residual(),
        10f64.ln(),
    )];
    if case == 1 {
        // Bounded propagation: sup ratios agree across the grid (factor 2)
        // and sit under the symmetriser growth bound
        // exp(T·sup‖S_t‖/c₀ + ln(c₁/c₀)).
        checks.push(CheckLine::at_most("energy-ratio-spread", report.ratio_spread(), 2.0));
        if let Some(rate) = mode_ode::groenwall_rate(&speed) {
            let c_prime =
                horizon * rate + (speed.a_sup().max(1.0) / speed.a0().min(1.0)).ln();
            let worst = report.sup_ratios.iter().copied().fold(0.0, f64::max);
            // The bound can be attained exactly (constant speed), so leave
            // the integrator's relative-error budget as slack.
            checks.push(CheckLine::at_most(
                "energy-growth-bound",
                worst,
                c_prime.exp() * (1.0 + 100.0 * rel_tol),
            ));
        }
        if let SpeedSpec::Constant { c } = *speed.spec() {
            // Exact oracle: with a ≡ c the standard energy of the two
            // unit-energy data sets is 1 + (c−1)·sin²(√c·β·t) respectively
            // 1 + (1/c−1)·sin²(√c·β·t) — identically 1 at c = 1. The sup is
            // taken over the integrator's sample grid, so evaluate the
            // closed form on the same grid.
            let gain = (c - 1.0).max(1.0 / c - 1.0).max(0.0);
            let dev = report
                .sup_ratios
                .iter()
                .zip(&betas)
                .map(|(r, &beta)| {
                    let expected = (0..=samples)
                        .map(|i| {
                            let t = horizon * i as f64 / samples as f64;
                            1.0 + gain * (c.sqrt() * beta * t).sin().powi(2)
                        })
                        .fold(0.0, f64::max);
                    (r - expected).abs()
                })
                .fold(0.0, f64::max);
            checks.push(CheckLine::at_most("const-energy-ratio", dev, 1e-8));
        }
    }
    if case == 2 || case == 4 {
        // Damped-transform monotonicity at every grid frequency.
        let mut worst_rise = 0.0f64;
        let mut all_passed = true;
        let wopts = WMonotonicityOptions { ode_rel_tol: rel_tol, ..Default::default() };
        for &beta in &betas {
            let rep = mode_ode::w_monotonicity_check(&speed, beta, s, wopts)
                .map_err(|e| CliError::Run(format!("monotonicity check failed: {e}")))?;
            if rep.w0 > 0.0 {
                worst_rise = worst_rise.max(rep.max_rise / rep.w0);
            }
            all_passed &= rep.passed;
        }
        let mut line =
            CheckLine::at_most("w-monotonicity", worst_rise, 10.0 * wopts.rel_tol);
        if !all_passed {
            line.verdict = Verdict::Fail;
        }
        checks.push(line);
    }

    let rows: Vec<Vec<String>> = betas
        .iter()
        .enumerate()
        .map(|(i, &beta)| {
            vec![
                case.to_string(),
                fx(beta),
                fx(s),
                fx(report.sup_ratios[i]),
                fx(report.fitted_k),
                fx(report.residuals[i]),
            ]
        })
        .collect();
    write_atomic(&out, &csv_text("case,beta,s,sup_ratio,fitted_K,residual", &rows))?;

    if let Some(path) = trajectories {
        let beta = betas.iter().copied().fold(f64::MIN, f64::max);
        let p = ModeProblem {
            beta,
            speed: speed.clone(),
            v0: Complex64::from(1.0 / beta),
            v1: Complex64::from(0.0),
        };
        let traj = mode_ode::integrate_mode(&p, IntegrateOptions { rel_tol, samples })
            .map_err(|e| CliError::Run(format!("trajectory export failed: {e}")))?;
        let energy = traj.standard_energy();
        let mut dat = String::from("# t re_v im_v re_dv im_dv energy\n");
        for (i, &t) in traj.times.iter().enumerate() {
            dat.push_str(&format!(
                "{} {} {} {} {} {}\n",
                fx(t),
                fx(traj.v[i].re),
                fx(traj.v[i].im),
                fx(traj.dv[i].re),
                fx(traj.dv[i].im),
                fx(energy[i])
            ));
        }
        write_atomic(&path, &dat)?;
    }

    let extra = json!({
        "case": case,
        "s": s,
        "betas": betas,
        "sup_ratios": report.sup_ratios.iter().map(|&r| json_num(r)).collect::<Vec<_>>(),
        "fitted_k": json_num(report.fitted_k),
        "intercept": json_num(report.intercept),
    });
    Ok(RunOutcome { checks, extra, summary })
}

fn run_su2_riesz(args: Su2RieszArgs) -> CliResult<RunOutcome> {
    let file: Su2RieszFile = load_config(args.config.as_deref())?;
    let word_text = args.word.or(file.word);
    let max_len = args.max_len.or(file.max_len);
    let lmax_text = args.lmax.or(file.lmax).unwrap_or_else(|| "50".into());
    let out = args.out.or(file.out).unwrap_or_else(|| PathBuf::from("su2-riesz.csv"));
    let summary = args.summary.or(file.summary);

    let lmax = parse_halfint(&lmax_text, "--lmax")?;
    if lmax.is_zero() {
        return usage("--lmax must be at least 1/2");
    }

    // Single-word mode cross-checks dense norms; sweep mode uses the exact
    // band fast path (operator norm = max-entry norm for these symbols).
    let rows: Vec<su2::RieszSweepRow> = match &word_text {
        Some(text) => {
            let word = su2::parse_word(text)
                .map_err(|e| CliError::Usage(format!("bad --word '{text}': {e}")))?;
            if word.is_empty() {
                return usage("--word must not be empty");
            }
            HalfInt::range_inclusive(lmax)
                .filter(|l| !l.is_zero())
                .map(|l| {
                    let norms = su2::riesz_symbol(&word, l)
                        .map_err(|e| CliError::Run(format!("norms at l = {l}: {e}")))?
                        .norms();
                    Ok(su2::RieszSweepRow {
                        l,
                        word: su2::word_string(&word),
                        op_norm: norms.op,
                        max_norm: norms.max,
                    })
                })
                .collect::<CliResult<_>>()?
        }
        None => su2::riesz_norm_sweep(max_len.unwrap_or(3), lmax),
    };

    // Uniform bound: ‖σ_w σ_L^{−|w|/2}‖ ≤ √(|w|!)·2^{|w|/2} (sharp over l,
    // attained by pure words at the extreme column), reported as the largest
    // norm-to-bound quotient over the whole table.
    let word_len = |w: &str| w.chars().filter(|c| !c.is_whitespace() && *c != '·').count();
    let worst = rows
        .iter()
        .map(|r| r.op_norm / su2::riesz_uniform_bound(word_len(&r.word)))
        .fold(0.0, f64::max);
    let mut checks = vec![CheckLine::at_most("riesz-uniform-bound", worst, 1.0 + 1e-12)];
    if rows.iter().any(|r| word_len(&r.word) == 1) {
        let single = rows
            .iter()
            .filter(|r| word_len(&r.word) == 1)
            .map(|r| r.op_norm)
            .fold(0.0, f64::max);
        checks.push(CheckLine::at_most(
            "single-letter-deviation",
            (single - 2f64.sqrt()).abs(),
            1e-10,
        ));
    }

    let csv_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| vec![r.l.to_string(), r.word.clone(), fx(r.op_norm), fx(r.max_norm)])
        .collect();
    write_atomic(&out, &csv_text("l,word,op_norm,max_norm", &csv_rows))?;

    let extra = json!({ "rows": rows.len(), "lmax": lmax.to_string() });
    Ok(RunOutcome { checks, extra, summary })
}

/// All words over {Z, Z̄} of the given length, mirroring the SU(2) sweep.
fn z_words_of_length(len: usize) -> Vec<Vec<ZLetter>> {
    (0..1usize << len)
        .map(|mask| {
            (0..len)
                .map(|i| if mask >> i & 1 == 0 { ZLetter::Z } else { ZLetter::Zbar })
                .collect()
        })
        .collect()
}

fn run_heis_riesz(args: HeisRieszArgs) -> CliResult<RunOutcome> {
    let file: HeisRieszFile = load_config(args.config.as_deref())?;
    let word_text = args.word.or(file.word);
    let max_len = args.max_len.or(file.max_len).unwrap_or(3);
    let lambdas = match args.lambdas {
        Some(text) => parse_f64_list(&text, "--lambdas")?,
        None => file
            .lambdas
            .unwrap_or_else(|| vec![-10.0, -1.0, -0.1, 0.1, 1.0, 10.0]),
    };
    let trunc = args.trunc.or(file.trunc).unwrap_or(128);
    let tol = args.tol.or(file.tol).unwrap_or(1e-12);
    let out = args.out.or(file.out).unwrap_or_else(|| PathBuf::from("heis-riesz.csv"));
    let summary = args.summary.or(file.summary);

    for &l in &lambdas {
        if !l.is_finite() || l == 0.0 {
            return usage(format!("lambda {l} must be finite and nonzero"));
        }
    }
    let words: Vec<Vec<ZLetter>> = match &word_text {
        Some(text) => vec![heisenberg::parse_z_word(text)
            .map_err(|e| CliError::Usage(format!("bad --word '{text}': {e}")))?],
        None => (1..=max_len).flat_map(z_words_of_length).collect(),
    };
    let longest = words.iter().map(Vec::len).max().unwrap_or(0);
    if longest == 0 {
        return usage("--word must not be empty");
    }
    if 2 * longest >= trunc {
        return usage(format!(
            "truncation {trunc} too small for words of length {longest}; need > {}",
            2 * longest
        ));
    }

    let mut rows = Vec::new();
    let mut worst_dev = 0.0f64;
    for word in &words {
        for &lambda in &lambdas {
            let op = heisenberg::riesz_op_norm_valid(word, lambda, trunc)
                .map_err(|e| CliError::Run(format!("word norm failed: {e}")))?;
            rows.push(vec![
                fx(lambda),
                heisenberg::z_word_string(word),
                fx(op),
                (trunc - word.len()).to_string(),
            ]);
        }
        let dev = heisenberg::lambda_invariance_max_dev(word, &lambdas, trunc)
            .map_err(|e| CliError::Run(format!("invariance check failed: {e}")))?;
        worst_dev = worst_dev.max(dev);
    }
    let checks = vec![CheckLine::at_most("lambda-invariance", worst_dev, tol)];
    write_atomic(&out, &csv_text("lambda,word,op_norm,block_size", &rows))?;

    let extra = json!({
        "words": words.len(),
        "lambdas": lambdas,
        "trunc": trunc,
    });
    Ok(RunOutcome { checks, extra, summary })
}

/// Small built-in SU(2) datum: diagonal coefficients e^{−(2l+1)} up to
/// l = 2, zero initial velocity.
fn demo_pair() -> (SpectralField, SpectralField) {
    let lmax = HalfInt::from_twice(4);
    let mut u0 = SpectralFieldSU2::new(lmax);
    for l in HalfInt::range_inclusive(lmax) {
        let dim = l.dim();
        let decay = Complex64::from((-(l.twice() as f64 + 1.0)).exp());
        let m = nalgebra::DMatrix::from_fn(dim, dim, |r, c| {
            if r == c { decay } else { Complex64::from(0.0) }
        });
        u0.insert(l, m).expect("demo matrix shape is correct by construction");
    }
    let u1 = SpectralFieldSU2::new(lmax);
    (SpectralField::from(u0), SpectralField::from(u1))
}

fn run_wave(args: WaveArgs) -> CliResult<RunOutcome> {
    let file: WaveFile = load_config(args.config.as_deref())?;
    let demo = args.demo || file.demo.unwrap_or(false);
    let speed_text = args
        .speed
        .or(file.speed)
        .ok_or_else(|| CliError::Usage("--speed is required".into()))?;
    let horizon = args.horizon.or(file.horizon).unwrap_or(1.0);
    let check = args.check.or(file.check).unwrap_or(WaveCheck::Sobolev);
    let s = args.s.or(file.s).unwrap_or(1.0);
    let rel_tol = args.rel_tol.or(file.rel_tol).unwrap_or(1e-10);
    let samples = args.samples.or(file.samples).unwrap_or(201);
    let out = args.out.or(file.out).unwrap_or_else(|| PathBuf::from("wave.csv"));
    let save_final = args.save_final.or(file.save_final);
    let summary = args.summary.or(file.summary);

    let (u0, u1) = if demo {
        demo_pair()
    } else {
        let u0_path = args
            .u0
            .or(file.u0)
            .ok_or_else(|| CliError::Usage("--u0 is required (or use --demo)".into()))?;
        let u1_path = args
            .u1
            .or(file.u1)
            .ok_or_else(|| CliError::Usage("--u1 is required (or use --demo)".into()))?;
        (load_field(&u0_path)?, load_field(&u1_path)?)
    };
    let speed = build_speed(&speed_text, horizon)?;
    let opts = SolveOptions { rel_tol, n_samples: samples };

    // Input-shape problems surface before any integration starts; classify
    // them as usage errors, everything mid-run as runtime failures.
    let classify = |e: wave::WaveError| match e {
        wave::WaveError::GroupMismatch { .. }
        | wave::WaveError::ShapeMismatch(_)
        | wave::WaveError::BadSamples { .. }
        | wave::WaveError::NeedsLipschitz { .. }
        | wave::WaveError::ZeroData => CliError::Usage(e.to_string()),
        other => CliError::Run(other.to_string()),
    };

    let mut checks = Vec::new();
    let extra;
    let solution = wave::solve_cauchy(&speed, &u0, &u1, opts).map_err(classify)?;
    match check {
        WaveCheck::Sobolev => {
            let report =
                wave::verify_sobolev_wellposedness(&speed, &u0, &u1, s, opts).map_err(classify)?;
            let rows: Vec<Vec<String>> = solution
                .times()
                .iter()
                .zip(&report.profile)
                .map(|(&t, &ratio)| {
                    vec![fx(t), fx(ratio * report.data_norm), fx(report.data_norm), fx(ratio)]
                })
                .collect();
            write_atomic(&out, &csv_text("t,lhs,rhs,ratio", &rows))?;
            checks.push(CheckLine::info("sobolev-constant", report.c_meas));
            if matches!(speed.spec(), SpeedSpec::Constant { .. }) {
                // Constant speed with zero velocity admits the exact constant 1.
                let zero_velocity = u1.plancherel_norm() == 0.0;
                if zero_velocity {
                    checks.push(CheckLine::at_most(
                        "const-sobolev-deviation",
                        (report.c_meas - 1.0).abs(),
                        1e-8,
                    ));
                }
            }
            extra = json!({
                "check": "sobolev",
                "s": s,
                "c_meas": json_num(report.c_meas),
                "data_norm": json_num(report.data_norm),
                "sup_index": report.sup_index,
            });
        }
        WaveCheck::Gevrey => {
            let a_data = args
                .a_data
                .or(file.a_data)
                .ok_or_else(|| CliError::Usage("--a-data is required for --check gevrey".into()))?;
            let k_rate = args
                .k_rate
                .or(file.k_rate)
                .ok_or_else(|| CliError::Usage("--k-rate is required for --check gevrey".into()))?;
            let report =
                wave::verify_gevrey_wellposedness(&speed, &u0, &u1, s, a_data, k_rate, opts)
                    .map_err(classify)?;
            match &report.verdict {
                GevreyVerdict::Verified => {
                    let data_norm = wave::gevrey_pair_norm(&u0, &u1, a_data, s);
                    let rows: Vec<Vec<String>> = (0..solution.times().len())
                        .map(|i| {
                            let (u, ut) = solution.field_at(i);
                            let lhs = wave::gevrey_pair_norm(&u, &ut, report.b, s);
                            vec![
                                fx(solution.times()[i]),
                                fx(lhs),
                                fx(data_norm),
                                fx(lhs / data_norm),
                            ]
                        })
                        .collect();
                    write_atomic(&out, &csv_text("t,lhs,rhs,ratio", &rows))?;
                    checks.push(CheckLine::info(
                        "gevrey-constant",
                        report.c_meas.unwrap_or(f64::NAN),
                    ));
                }
                GevreyVerdict::Inconclusive { reason } => {
                    eprintln!("gevrey check inconclusive: {reason}");
                    checks.push(CheckLine {
                        name: "gevrey-constant",
                        measured: f64::NAN,
                        bound: f64::INFINITY,
                        verdict: Verdict::Inconclusive,
                    });
                }
            }
            extra = json!({
                "check": "gevrey",
                "s": s,
                "a_data": a_data,
                "k_rate": k_rate,
                "b": json_num(report.b),
                "c_meas": report.c_meas.map_or(serde_json::Value::Null, json_num),
                "verdict": match &report.verdict {
                    GevreyVerdict::Verified => "verified".to_string(),
                    GevreyVerdict::Inconclusive { reason } => format!("inconclusive: {reason}"),
                },
            });
        }
    }

    if let Some(path) = save_final {
        let (u_final, _) = solution.field_at(solution.times().len() - 1);
        save_field(&path, &u_final)?;
    }
    Ok(RunOutcome { checks, extra, summary })
}

fn run_gevrey(args: GevreyArgs) -> CliResult<RunOutcome> {
    let file: GevreyFile = load_config(args.config.as_deref())?;
    let field_path = args.field.or(file.field);
    let demo_decay = args.demo_decay.or(file.demo_decay).unwrap_or(1.0);
    let demo_lmax_text = args.demo_lmax.or(file.demo_lmax).unwrap_or_else(|| "6".into());
    let d = args.d.or(file.d).unwrap_or(1.0);
    let s = args.s.or(file.s).unwrap_or(1.5);
    let kmax = args.kmax.or(file.kmax).unwrap_or(20);
    let fit = args.fit || file.fit.unwrap_or(false);
    let out = args.out.or(file.out).unwrap_or_else(|| PathBuf::from("gevrey.csv"));
    let summary = args.summary.or(file.summary);

    let field = match &field_path {
        Some(path) => load_field(path)?,
        None => {
            let lmax = parse_halfint(&demo_lmax_text, "--demo-lmax")?;
            if !(demo_decay.is_finite() && demo_decay > 0.0) {
                return usage(format!("--demo-decay {demo_decay} must be positive"));
            }
            let mut f = SpectralFieldSU2::new(lmax);
            for l in HalfInt::range_inclusive(lmax) {
                let dim = l.dim();
                let decay = Complex64::from((-demo_decay * (l.twice() as f64 + 1.0)).exp());
                let m = nalgebra::DMatrix::from_fn(dim, dim, |r, c| {
                    if r == c { decay } else { Complex64::from(0.0) }
                });
                f.insert(l, m).expect("demo matrix shape is correct by construction");
            }
            SpectralField::from(f)
        }
    };

    let report = gevrey::forward_constant_check(&field, d, s, kmax)
        .map_err(|e| CliError::Usage(format!("invalid ladder parameters: {e}")))?;
    let rows: Vec<Vec<String>> = report
        .rows
        .iter()
        .map(|r| vec![r.k.to_string(), fx(r.lk_norm), fx(r.log_bound.exp()), fx(r.margin)])
        .collect();
    write_atomic(&out, &csv_text("k,lk_norm,bound,margin", &rows))?;

    let mut checks =
        vec![CheckLine::at_least("forward-margins", report.min_margin(), 0.0)];
    let mut extra = json!({
        "d": d,
        "s": s,
        "a": json_num(report.a),
        "log_m": json_num(report.log_m),
        "min_margin": json_num(report.min_margin()),
    });
    if fit {
        let norms = gevrey::lk_norms(&field, kmax)
            .map_err(|e| CliError::Run(format!("ladder norms failed: {e}")))?;
        let fitted = gevrey::gevrey_order_fit(&norms)
            .map_err(|e| CliError::Run(format!("order fit failed: {e}")))?;
        checks.push(CheckLine::info("order-fit-s", fitted.s));
        extra["fit"] = json!({
            "s": json_num(fitted.s),
            "a": json_num(fitted.a),
            "log_m": json_num(fitted.log_m),
            "rms_residual": json_num(fitted.rms_residual),
        });
    }
    Ok(RunOutcome { checks, extra, summary })
}

fn run_bessel(args: BesselArgs) -> CliResult<RunOutcome> {
    let file: BesselFile = load_config(args.config.as_deref())?;
    let s = args
        .s
        .or(file.s)
        .ok_or_else(|| CliError::Usage("--s is required".into()))?;
    let lmax_text = args.lmax.or(file.lmax).unwrap_or_else(|| "200".into());
    let base_text = args.base.or(file.base).unwrap_or_else(|| "25".into());
    let ratio_margin = args.ratio_margin.or(file.ratio_margin).unwrap_or(0.05);
    let out = args.out.or(file.out).unwrap_or_else(|| PathBuf::from("bessel.csv"));
    let summary = args.summary.or(file.summary);

    if !(s.is_finite() && s > 0.0) {
        return usage(format!("--s {s} must be positive"));
    }
    let lmax = parse_halfint(&lmax_text, "--lmax")?;
    let base = parse_halfint(&base_text, "--base")?;
    if base.is_zero() {
        return usage("--base must be at least 1/2");
    }
    let mut doublings = 0usize;
    let mut reach = base.twice();
    while reach * 2 <= lmax.twice() {
        reach *= 2;
        doublings += 1;
    }
    if doublings == 0 {
        return usage(format!(
            "--lmax {lmax} must be at least twice --base {base} for one doubling"
        ));
    }

    let mut cuts = vec![base];
    for _ in 0..doublings {
        cuts.push(HalfInt::from_twice(cuts.last().unwrap().twice() * 2));
    }
    let sums: Vec<f64> = cuts.iter().map(|&c| su2::bessel_partial_sum(s, c)).collect();
    let increments: Vec<f64> = sums.windows(2).map(|w| w[1] - w[0]).collect();
    let ratios: Vec<f64> = increments.windows(2).map(|w| w[1] / w[0]).collect();

    // Shell l contributes ≳ l^{1−2s} through its extreme weights, so the
    // series converges exactly for s > 1; per cutoff doubling the increment
    // scales by ≈ 2^{2−2s}. Classify by the last measured ratio and compare
    // with that prediction — agreement is the check, and a divergent
    // classification at small s is the expected outcome, not a failure.
    let threshold = 1.0 - ratio_margin;
    let last_ratio = ratios.last().copied().unwrap_or(f64::NAN);
    let measured = if last_ratio < threshold { "convergent" } else { "divergent" };
    let predicted = if s > 1.0 { "convergent" } else { "divergent" };
    emit(format_args!("classification: {measured} (predicted {predicted} for s = {s})"));
    let mut line = CheckLine::at_most("bessel-classification", last_ratio, f64::INFINITY);
    line.bound = threshold;
    line.verdict = if measured == predicted { Verdict::Pass } else { Verdict::Fail };
    if ratios.is_empty() {
        // One doubling yields a single increment and no ratio; report the
        // run as inconclusive rather than guessing.
        line.verdict = Verdict::Inconclusive;
    }
    let checks = vec![line];

    let rows: Vec<Vec<String>> = cuts
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            let inc = if i > 0 { increments[i - 1] } else { f64::NAN };
            let ratio = if i > 1 { ratios[i - 2] } else { f64::NAN };
            vec![c.to_string(), fx(sums[i]), fx(inc), fx(ratio)]
        })
        .collect();
    write_atomic(&out, &csv_text("lmax,partial_sum,increment,ratio", &rows))?;

    let extra = json!({
        "s": s,
        "cuts": cuts.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        "partial_sums": sums.iter().map(|&v| json_num(v)).collect::<Vec<_>>(),
        "increment_ratios": ratios.iter().map(|&v| json_num(v)).collect::<Vec<_>>(),
        "classification": measured,
        "predicted": predicted,
    });
    Ok(RunOutcome { checks, extra, summary })
}

// ---------------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------------

fn init_thread_pool() -> CliResult<()> {
    match std::env::var("HYPOWAVE_THREADS") {
        Err(_) => Ok(()),
        Ok(text) => {
            let n: usize = text.parse().map_err(|_| {
                CliError::Usage(format!("HYPOWAVE_THREADS must be a positive integer, got '{text}'"))
            })?;
            if n == 0 {
                return usage("HYPOWAVE_THREADS must be a positive integer, got '0'");
            }
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| CliError::Run(format!("cannot size the thread pool: {e}")))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = init_thread_pool().and_then(|()| match cli.cmd {
        Cmd::OdeEnergy(args) => run_ode_energy(args).map(|o| ("ode-energy", o)),
        Cmd::Su2Riesz(args) => run_su2_riesz(args).map(|o| ("su2-riesz", o)),
        Cmd::HeisRiesz(args) => run_heis_riesz(args).map(|o| ("heis-riesz", o)),
        Cmd::Wave(args) => run_wave(args).map(|o| ("wave", o)),
        Cmd::Gevrey(args) => run_gevrey(args).map(|o| ("gevrey", o)),
        Cmd::Bessel(args) => run_bessel(args).map(|o| ("bessel", o)),
    });
    match run {
        Ok((name, outcome)) => {
            print_table(name, &outcome.checks);
            if let Err(e) = write_summary(name, &outcome) {
                match e {
                    CliError::Usage(msg) | CliError::Run(msg) => {
                        eprintln!("error: {msg}");
                        return ExitCode::from(1);
                    }
                }
            }
            if outcome.all_passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
