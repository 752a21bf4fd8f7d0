//! The `ripbounds` command line.
//!
//! Every subcommand writes one CSV (to `--out` or stdout). With `--out`,
//! auxiliary tables go next to it and a `<out>.manifest` records the
//! command line, config digest, seed, version, wall time and the SHA-256 of
//! every file written.
//!
//! A `--config` file holds `key=value` lines named after the long flags;
//! flags given on the command line win.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::empirical_lab::{aspect_ratio_columns, empirical_vs_analytic, wishart_histogram, DEFAULT_RESTARTS};
use crate::error::Error;
use crate::l1_recovery::{empirical_weak_transition, SignalModel};
use crate::phase_transitions::{
    build_curve, default_delta_grid, fmt_f64, rho_s_candes, rho_s_fl, rho_s_rv, uniform_grid, CurveMethod,
    FactorCap, StabilityFactor, CURVE_TOL,
};
use crate::rip_bounds::{expected_extreme_eigenvalues, rip_bounds_with_tol, PhasePoint};
use crate::rng::derive_seed;
use crate::scalar_kernels::DEFAULT_ROOT_TOL;

/// Largest `n` accepted by the Monte-Carlo commands without `--allow-large`.
pub const DESK_SCALE_N: usize = 1000;

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// `lo:hi:steps`, both ends included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl GridSpec {
    pub fn points(&self) -> Vec<f64> {
        uniform_grid(self.lo, self.hi, self.steps)
    }
}

impl FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, steps] = parts[..] else {
            return Err(format!("grid '{s}' is not lo:hi:steps"));
        };
        let lo: f64 = lo.trim().parse().map_err(|_| format!("bad grid start '{lo}'"))?;
        let hi: f64 = hi.trim().parse().map_err(|_| format!("bad grid end '{hi}'"))?;
        let steps: usize = steps.trim().parse().map_err(|_| format!("bad grid step count '{steps}'"))?;
        if steps == 0 || !lo.is_finite() || !hi.is_finite() || (steps > 1 && !(lo < hi)) {
            return Err(format!("grid '{s}' needs steps >= 1 and lo < hi"));
        }
        Ok(GridSpec { lo, hi, steps })
    }
}

fn parse_method(s: &str) -> Result<CurveMethod, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_factor(s: &str) -> Result<StabilityFactor, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_model(s: &str) -> Result<SignalModel, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "ripbounds", version, about = "Asymmetric RIP bounds, phase transitions and recovery experiments")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Master seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Delta grid as lo:hi:steps.
    #[arg(long, global = true)]
    pub grid: Option<GridSpec>,
    /// Root-finding (or decoder) tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Output CSV; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// key=value file with defaults for any long flag.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// lambda_min, lambda_max, L and U at one point or over a grid.
    #[command(args_override_self = true)]
    Bounds(BoundsArgs),
    /// A strong-equivalence transition curve rho_S(delta).
    #[command(args_override_self = true)]
    Curve(CurveArgs),
    /// The lq transition curve, optionally with a stability-factor cap.
    #[command(args_override_self = true)]
    LqCurve(LqArgs),
    /// Greedy empirical RIP constants against the analytic bounds.
    #[command(args_override_self = true)]
    Empirical(EmpiricalArgs),
    /// Extreme eigenvalues of sampled Wishart matrices.
    #[command(args_override_self = true)]
    Wishart(WishartArgs),
    /// l1 recovery success over the phase plane.
    #[command(args_override_self = true)]
    Recover(RecoverArgs),
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub rho: Option<f64>,
    /// Rho grid as lo:hi:steps.
    #[arg(long)]
    pub rho_grid: Option<GridSpec>,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    /// FL, RV or C.
    #[arg(long, value_parser = parse_method)]
    pub method: CurveMethod,
}

#[derive(Debug, Args)]
pub struct LqArgs {
    #[arg(long, default_value_t = 1.0)]
    pub q: f64,
    /// Stability factor to cap: C1, D1, C2 or D2.
    #[arg(long, value_parser = parse_factor, requires = "cap")]
    pub factor: Option<StabilityFactor>,
    #[arg(long, requires = "factor")]
    pub cap: Option<f64>,
}

#[derive(Debug, Args)]
pub struct EmpiricalArgs {
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    /// Number of aspect ratios n/N, spread over [1/20, 20/21].
    #[arg(long, default_value_t = 20)]
    pub aspects: usize,
    /// Largest support size (defaults to n - 1).
    #[arg(long)]
    pub k_max: Option<usize>,
    /// Matrices per aspect ratio.
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    #[arg(long, default_value_t = DEFAULT_RESTARTS)]
    pub restarts: usize,
    #[arg(long)]
    pub allow_large: bool,
}

#[derive(Debug, Args)]
pub struct WishartArgs {
    #[arg(long, default_value_t = 200)]
    pub n: usize,
    /// Rho grid as lo:hi:steps.
    #[arg(long)]
    pub rho_grid: Option<GridSpec>,
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    #[arg(long)]
    pub allow_large: bool,
}

#[derive(Debug, Args)]
pub struct RecoverArgs {
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    /// Rho grid as lo:hi:steps.
    #[arg(long)]
    pub rho_grid: Option<GridSpec>,
    /// Trials per (delta, rho) cell.
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    /// UNIT, GAUSSIAN or RADEMACHER.
    #[arg(long, value_parser = parse_model, default_value = "UNIT")]
    pub model: SignalModel,
    #[arg(long)]
    pub allow_large: bool,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_) => Failure::Usage(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(format!("i/o error: {e}"))
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

const VALUE_FLAGS: [&str; 6] = ["--seed", "--grid", "--tol", "--out", "--config", "--threads"];

/// Splices `--config` entries in right after the subcommand so that
/// explicit flags, which follow them, take precedence.
fn expand_config(args: Vec<OsString>) -> CliResult<(Vec<OsString>, Option<String>)> {
    let strings: Vec<String> = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let mut config = None;
    let mut sub = None;
    let mut i = 1;
    while i < strings.len() {
        let tok = &strings[i];
        if let Some(path) = tok.strip_prefix("--config=") {
            config = Some(path.to_string());
        } else if tok == "--config" {
            config = strings.get(i + 1).cloned();
        }
        if tok.starts_with('-') {
            if VALUE_FLAGS.contains(&tok.as_str()) {
                i += 1;
            }
        } else if sub.is_none() {
            sub = Some(i);
        }
        i += 1;
    }
    let (Some(path), Some(sub)) = (config, sub) else {
        return Ok((args, None));
    };
    let bytes = std::fs::read(&path).map_err(|e| Failure::Usage(format!("cannot read config '{path}': {e}")))?;
    let text = String::from_utf8(bytes.clone()).map_err(|_| Failure::Usage(format!("config '{path}' is not UTF-8")))?;
    let mut injected: Vec<OsString> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Failure::Usage(format!("{path}:{}: expected key=value", lineno + 1)));
        };
        let (key, value) = (key.trim(), value.trim());
        if key == "config" {
            return Err(Failure::Usage(format!("{path}:{}: nested config files are not supported", lineno + 1)));
        }
        match value {
            "true" => injected.push(format!("--{key}").into()),
            "false" => {}
            _ => {
                injected.push(format!("--{key}").into());
                injected.push(value.into());
            }
        }
    }
    let mut out = vec![args[0].clone(), args[sub].clone()];
    out.extend(injected);
    out.extend(args[1..sub].iter().cloned());
    out.extend(args[sub + 1..].iter().cloned());
    Ok((out, Some(sha256_hex(&bytes))))
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// A CSV destination that flushes after every block of rows.
struct CsvSink {
    inner: Box<dyn Write>,
}

impl CsvSink {
    fn open(path: Option<&Path>) -> CliResult<Self> {
        let inner: Box<dyn Write> = match path {
            Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| {
                Failure::Runtime(format!("cannot create '{}': {e}", p.display()))
            })?)),
            None => Box::new(BufWriter::new(io::stdout())),
        };
        Ok(CsvSink { inner })
    }

    fn rows(&mut self, text: &str) -> CliResult<()> {
        self.inner.write_all(text.as_bytes())?;
        self.inner.flush()?;
        Ok(())
    }
}

fn sibling(out: &Path, suffix: &str) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

struct Run {
    common: CommonArgs,
    written: Vec<PathBuf>,
}

impl Run {
    fn primary(&mut self) -> CliResult<CsvSink> {
        if let Some(p) = self.common.out.clone() {
            self.written.push(p);
        }
        CsvSink::open(self.common.out.as_deref())
    }

    /// An auxiliary table next to `--out`; skipped when writing to stdout.
    fn auxiliary(&mut self, suffix: &str) -> CliResult<Option<CsvSink>> {
        let Some(out) = self.common.out.clone() else {
            return Ok(None);
        };
        let p = sibling(&out, suffix);
        self.written.push(p.clone());
        CsvSink::open(Some(&p)).map(Some)
    }
}

fn check_desk_scale(n: usize, allow_large: bool) -> CliResult<()> {
    if n == 0 {
        return Err(Failure::Usage("n must be positive".into()));
    }
    if n > DESK_SCALE_N && !allow_large {
        return Err(Failure::Usage(format!(
            "n = {n} exceeds {DESK_SCALE_N}; pass --allow-large to run it anyway"
        )));
    }
    Ok(())
}

fn cmd_bounds(run: &mut Run, args: &BoundsArgs) -> CliResult<()> {
    let tol = run.common.tol.unwrap_or(DEFAULT_ROOT_TOL);
    let (deltas, rhos) = match (args.delta, args.rho) {
        (Some(d), Some(r)) => (vec![d], vec![r]),
        (None, None) => (
            run.common.grid.map_or_else(|| uniform_grid(0.05, 0.95, 50), |g| g.points()),
            args.rho_grid.map_or_else(|| uniform_grid(0.02, 0.98, 50), |g| g.points()),
        ),
        _ => return Err(Failure::Usage("--delta and --rho must be given together".into())),
    };
    for &d in &deltas {
        for &r in &rhos {
            PhasePoint::new(d, r)?;
        }
    }
    let mut sink = run.primary()?;
    sink.rows("delta,rho,lambda_min,lambda_max,L,U\n")?;
    for &d in &deltas {
        let rows: Vec<Result<String, Error>> = rhos
            .par_iter()
            .map(|&r| {
                let b = rip_bounds_with_tol(PhasePoint::new(d, r)?, tol)?;
                Ok(format!(
                    "{},{},{},{},{},{}\n",
                    fmt_f64(d),
                    fmt_f64(r),
                    fmt_f64(b.lambda_min),
                    fmt_f64(b.lambda_max),
                    fmt_f64(b.lower),
                    fmt_f64(b.upper)
                ))
            })
            .collect();
        let block: String = rows.into_iter().collect::<Result<_, _>>()?;
        sink.rows(&block)?;
    }
    Ok(())
}

fn write_curve(run: &mut Run, method: CurveMethod, q: f64, cap: Option<FactorCap>) -> CliResult<()> {
    let grid = run.common.grid.map_or_else(default_delta_grid, |g| g.points());
    let tol = run.common.tol.unwrap_or(CURVE_TOL);
    let curve = build_curve(method, q, cap, &grid, tol)?;
    for (d, why) in &curve.failures {
        eprintln!("warning: {method} at delta = {d}: {why}");
    }
    let mut sink = run.primary()?;
    sink.rows(&curve.to_csv())?;
    if let Some(min_inv) = curve.samples.iter().map(|s| 1.0 / s.rho_s).reduce(f64::min) {
        eprintln!("{method}: min 1/rho_S = {min_inv:.4} over {} samples", curve.samples.len());
    }
    Ok(())
}

fn cmd_curve(run: &mut Run, args: &CurveArgs) -> CliResult<()> {
    match args.method {
        CurveMethod::FlQ | CurveMethod::FlQBounded => {
            Err(Failure::Usage("lq curves are computed by the lq-curve subcommand".into()))
        }
        m => write_curve(run, m, 1.0, None),
    }
}

fn cmd_lq_curve(run: &mut Run, args: &LqArgs) -> CliResult<()> {
    match (args.factor, args.cap) {
        (Some(factor), Some(cap)) => write_curve(run, CurveMethod::FlQBounded, args.q, Some(FactorCap { factor, cap })),
        _ => write_curve(run, CurveMethod::FlQ, args.q, None),
    }
}

fn cmd_empirical(run: &mut Run, args: &EmpiricalArgs) -> CliResult<()> {
    check_desk_scale(args.n, args.allow_large)?;
    let n = args.n;
    let k_max = args.k_max.unwrap_or(n - 1);
    if n < 2 || k_max == 0 || k_max >= n {
        return Err(Failure::Usage(format!("k_max = {k_max} must lie in 1..={}", n.saturating_sub(1))));
    }
    if args.aspects == 0 || args.trials == 0 {
        return Err(Failure::Usage("aspects and trials must be positive".into()));
    }
    let columns = aspect_ratio_columns(n, args.aspects);
    let mut records = run.primary()?;
    let mut cells = run.auxiliary(".ratios.csv")?;
    records.rows("n,N,k,mode,seed,eigenvalue,support\n")?;
    if let Some(c) = cells.as_mut() {
        c.rows("n,N,delta,k,rho,empirical_l,empirical_u,bound_l,bound_u,ratio_l,ratio_u,exceeds\n")?;
    }
    let mut all = Vec::new();
    for (i, &big_n) in columns.iter().enumerate() {
        let table = empirical_vs_analytic(n, &[big_n], k_max, args.trials, args.restarts, derive_seed(run.common.seed, i as u64))?;
        let mut block = String::new();
        for r in &table.records {
            let support: Vec<String> = r.support.iter().map(usize::to_string).collect();
            let _ = writeln!(
                block,
                "{},{},{},{},{},{},{}",
                n,
                big_n,
                r.size.k,
                r.mode.name(),
                r.seed,
                fmt_f64(r.eigenvalue),
                support.join(";")
            );
        }
        records.rows(&block)?;
        if let Some(c) = cells.as_mut() {
            let mut block = String::new();
            for cell in &table.cells {
                let _ = writeln!(
                    block,
                    "{},{},{},{},{},{},{},{},{},{},{},{}",
                    n,
                    big_n,
                    fmt_f64(cell.size.delta()),
                    cell.size.k,
                    fmt_f64(cell.size.rho()),
                    fmt_f64(cell.empirical_l),
                    fmt_f64(cell.empirical_u),
                    fmt_f64(cell.bound_l),
                    fmt_f64(cell.bound_u),
                    fmt_f64(cell.ratio_l()),
                    fmt_f64(cell.ratio_u()),
                    cell.exceeds_l() || cell.exceeds_u()
                );
            }
            c.rows(&block)?;
        }
        for (big_n, k, why) in &table.failures {
            eprintln!("warning: analytic bounds at N = {big_n}, k = {k}: {why}");
        }
        all.extend(table.cells);
    }
    let summary = crate::empirical_lab::RatioTable {
        n,
        cells: all,
        records: Vec::new(),
        failures: Vec::new(),
    };
    let line = format!(
        "{},{},{},{},{},{},{}\n",
        n,
        args.trials,
        columns.len(),
        summary.cells.len(),
        fmt_f64(summary.exceedance_fraction()),
        fmt_f64(summary.max_ratio_l()),
        fmt_f64(summary.max_ratio_u())
    );
    if let Some(mut s) = run.auxiliary(".summary.csv")? {
        s.rows("n,matrices_per_ratio,aspect_ratios,cells,exceedance_fraction,max_ratio_l,max_ratio_u\n")?;
        s.rows(&line)?;
    }
    eprintln!(
        "n = {n}: {} cells, exceedance fraction {:.4}, max L/L_emp {:.3}, max U/U_emp {:.3}",
        summary.cells.len(),
        summary.exceedance_fraction(),
        summary.max_ratio_l(),
        summary.max_ratio_u()
    );
    Ok(())
}

fn cmd_wishart(run: &mut Run, args: &WishartArgs) -> CliResult<()> {
    check_desk_scale(args.n, args.allow_large)?;
    let rhos = args.rho_grid.map_or_else(|| vec![0.25, 0.5, 0.75, 1.0], |g| g.points());
    let samples = wishart_histogram(args.n, &rhos, args.trials, run.common.seed)?;
    let mut sink = run.primary()?;
    sink.rows("n,k,rho,trial,min_eig,max_eig\n")?;
    for s in &samples {
        let mut block = String::new();
        for (t, (lo, hi)) in s.min_eigs.iter().zip(&s.max_eigs).enumerate() {
            let _ = writeln!(block, "{},{},{},{},{},{}", s.n, s.k, fmt_f64(s.rho), t, fmt_f64(*lo), fmt_f64(*hi));
        }
        sink.rows(&block)?;
        let (lo, hi) = expected_extreme_eigenvalues(s.k as f64 / s.n as f64)?;
        eprintln!(
            "k = {}: mean min {:.4} (limit {lo:.4}), mean max {:.4} (limit {hi:.4})",
            s.k,
            s.mean_min(),
            s.mean_max()
        );
    }
    Ok(())
}

fn cmd_recover(run: &mut Run, args: &RecoverArgs) -> CliResult<()> {
    check_desk_scale(args.n, args.allow_large)?;
    if args.trials == 0 {
        return Err(Failure::Usage("trials must be positive".into()));
    }
    let deltas = run.common.grid.map_or_else(|| uniform_grid(0.1, 0.9, 5), |g| g.points());
    let rhos = args.rho_grid.map_or_else(|| uniform_grid(0.02, 0.98, 49), |g| g.points());
    let mut sink = run.primary()?;
    sink.rows("delta,rho,n,N,k,trials,successes,fraction,smoothed,crossing,rho_s_fl,rho_s_rv,rho_s_c\n")?;
    for (i, &delta) in deltas.iter().enumerate() {
        let surface = empirical_weak_transition(
            &[delta],
            &rhos,
            args.n,
            args.trials,
            args.model,
            derive_seed(run.common.seed, i as u64),
        )?;
        let crossing = surface.crossings[0].1.unwrap_or(f64::NAN);
        let analytic = [rho_s_fl(delta), rho_s_rv(delta), rho_s_candes(delta)].map(|r| r.unwrap_or(f64::NAN));
        let mut block = String::new();
        for c in &surface.cells {
            let _ = writeln!(
                block,
                "{},{},{},{},{},{},{},{},{},{},{},{},{}",
                fmt_f64(c.delta),
                fmt_f64(c.rho),
                c.n,
                c.big_n,
                c.k,
                c.trials,
                c.successes,
                fmt_f64(c.fraction()),
                fmt_f64(c.smoothed),
                fmt_f64(crossing),
                fmt_f64(analytic[0]),
                fmt_f64(analytic[1]),
                fmt_f64(analytic[2])
            );
        }
        sink.rows(&block)?;
        let failures: usize = surface.cells.iter().map(|c| c.decoder_failures).sum();
        if failures > 0 {
            eprintln!("warning: {failures} decoder failures at delta = {delta} (counted as unsuccessful)");
        }
    }
    Ok(())
}

fn write_manifest(out: &Path, command_line: &str, config_digest: Option<&str>, seed: u64, wall: f64, files: &[PathBuf]) -> CliResult<()> {
    let mut text = String::new();
    let _ = writeln!(text, "command_line={command_line}");
    let _ = writeln!(text, "config_sha256={}", config_digest.unwrap_or("none"));
    let _ = writeln!(text, "seed={seed}");
    let _ = writeln!(text, "version={}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(text, "wall_time_seconds={wall:.3}");
    for f in files {
        let digest = sha256_hex(&std::fs::read(f)?);
        let _ = writeln!(text, "output={} sha256={digest}", f.display());
    }
    std::fs::write(sibling(out, ".manifest"), text)?;
    Ok(())
}

fn execute(cli: Cli, command_line: &str, config_digest: Option<&str>) -> CliResult<()> {
    let start = Instant::now();
    let mut run = Run {
        common: cli.common.clone(),
        written: Vec::new(),
    };
    match &cli.command {
        Command::Bounds(a) => cmd_bounds(&mut run, a)?,
        Command::Curve(a) => cmd_curve(&mut run, a)?,
        Command::LqCurve(a) => cmd_lq_curve(&mut run, a)?,
        Command::Empirical(a) => cmd_empirical(&mut run, a)?,
        Command::Wishart(a) => cmd_wishart(&mut run, a)?,
        Command::Recover(a) => cmd_recover(&mut run, a)?,
    }
    if let Some(out) = &run.common.out {
        write_manifest(
            out,
            command_line,
            config_digest,
            run.common.seed,
            start.elapsed().as_secs_f64(),
            &run.written,
        )?;
    }
    Ok(())
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let command_line = args.iter().map(|a| a.to_string_lossy()).collect::<Vec<_>>().join(" ");
    let (args, config_digest) = match expand_config(args) {
        Ok(v) => v,
        Err(f) => return report(f),
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let outcome = match cli.common.threads {
        Some(0) => Err(Failure::Usage("--threads must be positive".into())),
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(|| execute(cli, &command_line, config_digest.as_deref())),
            Err(e) => Err(Failure::Runtime(format!("cannot start thread pool: {e}"))),
        },
        None => execute(cli, &command_line, config_digest.as_deref()),
    };
    match outcome {
        Ok(()) => EXIT_OK,
        Err(f) => report(f),
    }
}

fn report(f: Failure) -> i32 {
    match f {
        Failure::Usage(m) => {
            eprintln!("error: {m}");
            EXIT_USAGE
        }
        Failure::Runtime(m) => {
            eprintln!("error: {m}");
            EXIT_RUNTIME
        }
    }
}
