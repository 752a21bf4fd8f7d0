//! Lower bounds on the strong-equivalence phase transition of l1 (and lq)
//! minimisation for Gaussian matrices.
//!
//! Each curve `rho_S(delta)` is the root in `rho` of a recovery condition:
//!
//! * `FL`: `mu_fl(delta, rho) = (1 + sqrt 2)/4 * ((1 + U(delta, 2 rho)) / (1 - L(delta, 2 rho)) - 1) = 1`
//! * `RV`: `mu_rv(delta, rho) = rho (12 + 8 log(1/(rho delta)) gamma(rho delta)^2) = 1`
//! * `CANDES`: `max(L(delta, 2 rho), U(delta, 2 rho)) = sqrt 2 - 1`
//! * `FL_Q`: the largest `rho` over `alpha >= 1` with
//!   `alpha^{1/2 - 1/q} mu(delta, 2 alpha rho) = 1`, optionally with a cap on
//!   one of the stability factors.

use std::f64::consts::SQRT_2;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rip_bounds::{self, eigen_ratio, PhasePoint};
use crate::scalar_kernels::{find_root_bracketed, golden_section_min};

/// `(1 + sqrt 2) / 4`.
const FL_PREFACTOR: f64 = (1.0 + SQRT_2) / 4.0;
/// The symmetric RIP threshold `sqrt 2 - 1` of the Candes condition.
pub const CANDES_THRESHOLD: f64 = SQRT_2 - 1.0;
/// Default tolerance for curve roots.
pub const CURVE_TOL: f64 = 1e-12;
/// Points in the log-spaced scan behind [`rho_s_fl_q`].
pub const LQ_GRID_POINTS: usize = 256;

const RHO_FLOOR: f64 = 1e-12;
const RHO_CEIL: f64 = 0.5 * (1.0 - 1e-9);

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("delta = {delta} outside (0, 1)")))
    }
}

fn check_q(q: f64) -> Result<()> {
    if q > 0.0 && q <= 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("q = {q} outside (0, 1]")))
    }
}

/// The Foucart-Lai quantity at sparsity ratio `s` (so `s = 2 rho` for
/// `mu_fl`).
fn fl_condition(delta: f64, s: f64) -> Result<f64> {
    Ok(FL_PREFACTOR * (eigen_ratio(delta, s)? - 1.0))
}

/// `mu_fl(delta, rho)`; the bounds are evaluated at doubled sparsity.
pub fn mu_fl(point: PhasePoint) -> Result<f64> {
    let s = 2.0 * point.rho();
    if s >= 1.0 {
        return Err(Error::domain(format!("2 rho = {s} must be below 1")));
    }
    fl_condition(point.delta(), s)
}

fn solve_rho(delta: f64, tol: f64, f: impl Fn(f64) -> f64) -> Result<f64> {
    check_delta(delta)?;
    bisect_log_rho(tol, f)
}

/// Bisection in `log rho`, so the stopping width is relative to `rho`; the
/// conditions are steep in `rho` near the small roots.
fn bisect_log_rho(tol: f64, f: impl Fn(f64) -> f64) -> Result<f64> {
    find_root_bracketed(|t| f(t.exp()), RHO_FLOOR.ln(), RHO_CEIL.ln(), tol).map(f64::exp)
}

/// `rho_S^FL(delta)`: the root of `mu_fl(delta, .) = 1`.
pub fn rho_s_fl(delta: f64) -> Result<f64> {
    rho_s_fl_with_tol(delta, CURVE_TOL)
}

pub fn rho_s_fl_with_tol(delta: f64, tol: f64) -> Result<f64> {
    solve_rho(delta, tol, |rho| fl_residual(delta, rho))
}

fn fl_residual(delta: f64, rho: f64) -> f64 {
    fl_condition(delta, 2.0 * rho).map_or(f64::NAN, |m| m - 1.0)
}

/// `gamma(x) = exp(log(1 + 2 log(e/x)) / (4 log(e/x)))`, with `x` standing
/// for `rho delta`.
pub fn gamma_rv(x: f64) -> Result<f64> {
    if !(x > 0.0 && x < std::f64::consts::E) {
        return Err(Error::domain(format!("gamma argument {x} outside (0, e)")));
    }
    let l = 1.0 - x.ln();
    Ok(((1.0 + 2.0 * l).ln() / (4.0 * l)).exp())
}

/// `mu_rv(delta, rho) = rho (12 + 8 log(1/(rho delta)) gamma(rho delta)^2)`.
pub fn mu_rv(point: PhasePoint) -> Result<f64> {
    let x = point.rho() * point.delta();
    let g = gamma_rv(x)?;
    Ok(point.rho() * (12.0 + 8.0 * (1.0 / x).ln() * g * g))
}

fn rv_residual(delta: f64, rho: f64) -> f64 {
    PhasePoint::new(delta, rho)
        .and_then(mu_rv)
        .map_or(f64::NAN, |m| m - 1.0)
}

/// `rho_S^RV(delta)`: the root of `mu_rv(delta, .) = 1`.
pub fn rho_s_rv(delta: f64) -> Result<f64> {
    rho_s_rv_with_tol(delta, CURVE_TOL)
}

pub fn rho_s_rv_with_tol(delta: f64, tol: f64) -> Result<f64> {
    let root = solve_rho(delta, tol, |rho| rv_residual(delta, rho))?;
    // Uniqueness rests on mu_rv increasing through the root.
    let below = rv_residual(delta, root * (1.0 - 1e-6));
    let above = rv_residual(delta, root * (1.0 + 1e-6));
    if !(below < above) {
        return Err(Error::Infeasible(format!(
            "mu_rv not increasing at rho = {root} (delta = {delta})"
        )));
    }
    Ok(root)
}

fn candes_residual(delta: f64, rho: f64) -> f64 {
    rip_bounds::tight_bounds(delta, 2.0 * rho).map_or(f64::NAN, |(l, u)| l.max(u) - CANDES_THRESHOLD)
}

/// `rho_S^C(delta)`: the root of `max(L(delta, 2 rho), U(delta, 2 rho)) = sqrt 2 - 1`.
pub fn rho_s_candes(delta: f64) -> Result<f64> {
    rho_s_candes_with_tol(delta, CURVE_TOL)
}

pub fn rho_s_candes_with_tol(delta: f64, tol: f64) -> Result<f64> {
    solve_rho(delta, tol, |rho| candes_residual(delta, rho))
}

/// `mu_alpha(delta, 2 alpha rho) = alpha^{1/2 - 1/q} mu(delta, 2 alpha rho)`.
pub fn mu_alpha(point: PhasePoint, q: f64, alpha: f64) -> Result<f64> {
    check_q(q)?;
    let s = 2.0 * alpha * point.rho();
    if !(alpha >= 1.0) || s >= 1.0 {
        return Err(Error::domain(format!(
            "alpha = {alpha} outside [1, 1/(2 rho)) for rho = {}",
            point.rho()
        )));
    }
    Ok(alpha.powf(0.5 - 1.0 / q) * fl_condition(point.delta(), s)?)
}

/// Which stability factor a cap applies to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StabilityFactor {
    C1,
    D1,
    C2,
    D2,
}

impl StabilityFactor {
    pub fn name(self) -> &'static str {
        match self {
            StabilityFactor::C1 => "C1",
            StabilityFactor::D1 => "D1",
            StabilityFactor::C2 => "C2",
            StabilityFactor::D2 => "D2",
        }
    }
}

impl fmt::Display for StabilityFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StabilityFactor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "C1" => Ok(StabilityFactor::C1),
            "D1" => Ok(StabilityFactor::D1),
            "C2" => Ok(StabilityFactor::C2),
            "D2" => Ok(StabilityFactor::D2),
            other => Err(Error::domain(format!("unknown stability factor {other:?}"))),
        }
    }
}

/// Multiplicative error constants of the lq recovery guarantee.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityFactors {
    pub c1: f64,
    pub d1: f64,
    pub c2: f64,
    pub d2: f64,
    pub beta: f64,
    pub mu: f64,
    pub q: f64,
    pub alpha: f64,
}

impl StabilityFactors {
    pub fn get(&self, factor: StabilityFactor) -> f64 {
        match factor {
            StabilityFactor::C1 => self.c1,
            StabilityFactor::D1 => self.d1,
            StabilityFactor::C2 => self.c2,
            StabilityFactor::D2 => self.d2,
        }
    }
}

/// Factor values from `mu = mu_alpha` and `beta = (1 + sqrt 2)(1 + U)/(1 - L)`.
fn factor_values(q: f64, mu: f64, beta: f64) -> [f64; 4] {
    let inv_q = 1.0 / q;
    let mq = mu.powf(q);
    let denom = (1.0 - mq).powf(inv_q);
    let c1 = 2f64.powf(2.0 * inv_q - 1.0) * (1.0 + mq).powf(inv_q) / denom;
    let d1 = 2f64.powf(2.0 * inv_q - 1.0) * beta / denom;
    let c2 = 2f64.powf(2.0 * inv_q - 2.0) * (beta + 1.0 - SQRT_2) / denom;
    let d2 = 2f64.powf(inv_q - 2.0) * beta * (beta + 1.0 - SQRT_2) / denom + 2.0 * beta;
    [c1, d1, c2, d2]
}

fn factor_value(factor: StabilityFactor, q: f64, mu: f64, beta: f64) -> f64 {
    let v = factor_values(q, mu, beta);
    match factor {
        StabilityFactor::C1 => v[0],
        StabilityFactor::D1 => v[1],
        StabilityFactor::C2 => v[2],
        StabilityFactor::D2 => v[3],
    }
}

/// `(C1, D1, C2, D2, beta)` at `(delta, 2 alpha rho)`.
pub fn stability_factors(point: PhasePoint, q: f64, alpha: f64) -> Result<StabilityFactors> {
    let mu = mu_alpha(point, q, alpha)?;
    if mu >= 1.0 {
        return Err(Error::Infeasible(format!(
            "mu_alpha = {mu} >= 1 at (delta, rho, q, alpha) = ({}, {}, {q}, {alpha})",
            point.delta(),
            point.rho()
        )));
    }
    let beta = (1.0 + SQRT_2) * eigen_ratio(point.delta(), 2.0 * alpha * point.rho())?;
    let [c1, d1, c2, d2] = factor_values(q, mu, beta);
    Ok(StabilityFactors {
        c1,
        d1,
        c2,
        d2,
        beta,
        mu,
        q,
        alpha,
    })
}

/// The result of the maximisation over `alpha` behind `rho_S^FL(delta; q)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LqTransition {
    pub rho: f64,
    pub alpha: f64,
    /// `2 alpha rho`, the sparsity ratio the RIP bounds are evaluated at.
    pub sparsity: f64,
    /// Largest admissible `mu_alpha` at the optimum (1 without a factor cap).
    pub mu_target: f64,
    /// `|mu_alpha(delta, 2 alpha rho) - mu_target|` re-evaluated at the optimum.
    pub residual: f64,
    /// Scan cells with no admissible `alpha`.
    pub infeasible_cells: usize,
}

/// A bound on one stability factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactorCap {
    pub factor: StabilityFactor,
    pub cap: f64,
}

/// Largest `mu` in `(0, 1)` with `factor(mu, beta) <= cap`, or `None` when
/// even `mu -> 0` violates the cap.
fn mu_target(cap: Option<FactorCap>, q: f64, beta: f64) -> Option<f64> {
    let Some(FactorCap { factor, cap }) = cap else {
        return Some(1.0);
    };
    if factor_value(factor, q, 0.0, beta) >= cap {
        return None;
    }
    let g = |mu: f64| factor_value(factor, q, mu, beta) - cap;
    let hi = 1.0 - 1e-15;
    if g(hi) <= 0.0 {
        return Some(hi);
    }
    find_root_bracketed(g, 0.0, hi, 1e-14).ok()
}

struct SparsitySample {
    m: f64,
    beta: f64,
}

fn sample_at(delta: f64, s: f64) -> Result<SparsitySample> {
    let ratio = eigen_ratio(delta, s)?;
    Ok(SparsitySample {
        m: FL_PREFACTOR * (ratio - 1.0),
        beta: (1.0 + SQRT_2) * ratio,
    })
}

/// `rho_S^FL(delta; q)`: the largest root over `alpha >= 1`.
pub fn rho_s_fl_q(delta: f64, q: f64) -> Result<LqTransition> {
    lq_transition(delta, q, None, CURVE_TOL)
}

/// `rho_S^FL(delta; q, factor <= cap)`.
pub fn rho_s_fl_q_bounded(delta: f64, q: f64, factor: StabilityFactor, cap: f64) -> Result<LqTransition> {
    lq_transition(delta, q, Some(FactorCap { factor, cap }), CURVE_TOL)
}

/// Shared solver for the lq curves.
///
/// For a fixed `alpha` the binding condition is increasing in the sparsity
/// ratio `s = 2 alpha rho`, so every `alpha` has exactly one boundary point.
/// Walking that boundary by `s` instead of `alpha` gives, per `s`,
/// `alpha(s) = (mu(delta, s) / mu_target)^{2q/(2-q)}` and
/// `rho(s) = s / (2 alpha(s))`, with `alpha >= 1` marking admissible cells.
/// The `alpha = 1` boundary point is solved in `rho` exactly as for
/// [`rho_s_fl`]; the rest of the boundary is scanned on a log grid in `s`
/// and the best cell refined by golden section.
pub fn lq_transition(delta: f64, q: f64, cap: Option<FactorCap>, tol: f64) -> Result<LqTransition> {
    check_delta(delta)?;
    check_q(q)?;
    if let Some(FactorCap { factor, cap: c }) = cap {
        let floor = factor_value(factor, q, 0.0, 1.0 + SQRT_2);
        if !(c > floor) {
            return Err(Error::domain(format!(
                "cap {c} on {factor} must exceed its mu -> 0 limit {floor}"
            )));
        }
    }
    let exponent = 2.0 * q / (2.0 - q);

    // alpha = 1: mu(delta, 2 rho) = mu_target(beta(delta, 2 rho)).
    let boundary = |rho: f64| -> f64 {
        if cap.is_none() {
            // Same arithmetic as `rho_s_fl`, so both roots coincide.
            return fl_residual(delta, rho);
        }
        match sample_at(delta, 2.0 * rho) {
            Ok(smp) => mu_target(cap, q, smp.beta).map_or(f64::INFINITY, |t| smp.m - t),
            Err(_) => f64::NAN,
        }
    };
    let rho_one = bisect_log_rho(tol, boundary).map_err(|e| match e {
        Error::NotBracketed { .. } => Error::Infeasible(format!(
            "no admissible rho at delta = {delta}, q = {q} ({e})"
        )),
        other => other,
    })?;

    let rho_of = |s: f64| -> Option<(f64, f64, f64)> {
        let smp = sample_at(delta, s).ok()?;
        let target = mu_target(cap, q, smp.beta)?;
        let alpha = (smp.m / target).powf(exponent);
        if !(alpha >= 1.0) || !alpha.is_finite() {
            return None;
        }
        Some((s / (2.0 * alpha), alpha, target))
    };

    let s_lo = 2.0 * rho_one;
    let s_hi = 1.0 - 1e-9;
    let ratio = s_hi / s_lo;
    let s_at = |i: usize| s_lo * ratio.powf(i as f64 / (LQ_GRID_POINTS - 1) as f64);

    let mut best_i = None;
    let mut best_rho = f64::NEG_INFINITY;
    let mut infeasible_cells = 0;
    for i in 0..LQ_GRID_POINTS {
        match rho_of(s_at(i)) {
            Some((rho, _, _)) if rho > best_rho => {
                best_rho = rho;
                best_i = Some(i);
            }
            Some(_) => {}
            None => infeasible_cells += 1,
        }
    }

    let one_mu = match cap {
        None => 1.0,
        Some(_) => {
            let smp = sample_at(delta, 2.0 * rho_one)?;
            mu_target(cap, q, smp.beta).unwrap_or(0.0)
        }
    };
    let mut best = (rho_one, 1.0, 2.0 * rho_one, one_mu);

    if let Some(i) = best_i {
        let a = s_at(i.saturating_sub(1)).ln();
        let b = s_at((i + 1).min(LQ_GRID_POINTS - 1)).ln();
        let neg_rho = |log_s: f64| rho_of(log_s.exp()).map_or(f64::INFINITY, |(r, _, _)| -r);
        let (log_s, neg) = golden_section_min(neg_rho, a, b, 1e-10);
        let (s, refined) = if -neg > best_rho {
            (log_s.exp(), -neg)
        } else {
            (s_at(i), best_rho)
        };
        if refined > best.0 {
            let (rho, alpha, target) = rho_of(s).expect("scanned cell is admissible");
            best = (rho, alpha, s, target);
        }
    }

    let (rho, alpha, sparsity, target) = best;
    let point = PhasePoint::new(delta, rho)?;
    let residual = if alpha == 1.0 {
        (mu_alpha(point, q, 1.0)? - target).abs()
    } else {
        // Evaluate at the exact sparsity the optimum was found at.
        (alpha.powf(0.5 - 1.0 / q) * fl_condition(delta, sparsity)? - target).abs()
    };
    Ok(LqTransition {
        rho,
        alpha,
        sparsity,
        mu_target: target,
        residual,
        infeasible_cells,
    })
}

/// Which transition a curve samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CurveMethod {
    Fl,
    Rv,
    Candes,
    FlQ,
    FlQBounded,
}

impl CurveMethod {
    pub fn name(self) -> &'static str {
        match self {
            CurveMethod::Fl => "FL",
            CurveMethod::Rv => "RV",
            CurveMethod::Candes => "CANDES",
            CurveMethod::FlQ => "FL_Q",
            CurveMethod::FlQBounded => "FL_Q_BOUNDED",
        }
    }
}

impl fmt::Display for CurveMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CurveMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "FL" => Ok(CurveMethod::Fl),
            "RV" => Ok(CurveMethod::Rv),
            "C" | "CANDES" => Ok(CurveMethod::Candes),
            "FL_Q" | "FLQ" => Ok(CurveMethod::FlQ),
            "FL_Q_BOUNDED" | "FLQ_BOUNDED" => Ok(CurveMethod::FlQBounded),
            other => Err(Error::domain(format!("unknown curve method {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveSample {
    pub delta: f64,
    pub rho_s: f64,
    /// `|condition - target|` at the returned root.
    pub residual: f64,
    /// The maximising `alpha` for lq curves, 1 otherwise.
    pub alpha: f64,
}

/// A sampled curve `delta -> rho_S(delta)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionCurve {
    pub method: CurveMethod,
    pub q: f64,
    pub constraint: Option<FactorCap>,
    pub samples: Vec<CurveSample>,
    /// Grid points whose solve failed, with the reason.
    pub failures: Vec<(f64, String)>,
    pub solver_tol: f64,
}

pub const CURVE_CSV_HEADER: &str = "method,q,factor,cap,solver_tol,delta,rho_s,inv_rho_s,residual,alpha";

impl TransitionCurve {
    pub fn to_csv(&self) -> String {
        let (factor, cap) = match self.constraint {
            Some(c) => (c.factor.name().to_string(), fmt_f64(c.cap)),
            None => ("none".to_string(), "inf".to_string()),
        };
        let mut out = String::with_capacity(64 * (self.samples.len() + 1));
        out.push_str(CURVE_CSV_HEADER);
        out.push('\n');
        for s in &self.samples {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                self.method.name(),
                fmt_f64(self.q),
                factor,
                cap,
                fmt_f64(self.solver_tol),
                fmt_f64(s.delta),
                fmt_f64(s.rho_s),
                fmt_f64(1.0 / s.rho_s),
                fmt_f64(s.residual),
                fmt_f64(s.alpha),
            ));
        }
        out
    }

    /// Parses the output of [`TransitionCurve::to_csv`]. Failures are not
    /// serialised and come back empty.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        match lines.next() {
            Some(h) if h == CURVE_CSV_HEADER => {}
            other => return Err(Error::domain(format!("unexpected curve header {other:?}"))),
        }
        let mut curve: Option<TransitionCurve> = None;
        for line in lines.filter(|l| !l.is_empty()) {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 10 {
                return Err(Error::domain(format!("malformed curve row {line:?}")));
            }
            let num = |s: &str| -> Result<f64> {
                s.parse::<f64>()
                    .map_err(|_| Error::domain(format!("bad number {s:?}")))
            };
            let method: CurveMethod = f[0].parse()?;
            let constraint = if f[2] == "none" {
                None
            } else {
                Some(FactorCap {
                    factor: f[2].parse()?,
                    cap: num(f[3])?,
                })
            };
            let c = curve.get_or_insert_with(|| TransitionCurve {
                method,
                q: 0.0,
                constraint,
                samples: Vec::new(),
                failures: Vec::new(),
                solver_tol: 0.0,
            });
            c.q = num(f[1])?;
            c.solver_tol = num(f[4])?;
            c.samples.push(CurveSample {
                delta: num(f[5])?,
                rho_s: num(f[6])?,
                residual: num(f[8])?,
                alpha: num(f[9])?,
            });
        }
        curve.ok_or_else(|| Error::domain("curve CSV has no rows"))
    }
}

/// `f64` with 17 significant digits, enough to round-trip exactly.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

/// Uniform grid of `steps` points on `[lo, hi]` (both ends included).
pub fn uniform_grid(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..steps)
            .map(|i| {
                if i == steps - 1 {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (steps - 1) as f64
                }
            })
            .collect(),
    }
}

/// The default curve grid: 91 points on `[0.05, 0.95]`.
pub fn default_delta_grid() -> Vec<f64> {
    uniform_grid(0.05, 0.95, 91)
}

fn sample_curve(method: CurveMethod, q: f64, constraint: Option<FactorCap>, delta: f64, tol: f64) -> Result<CurveSample> {
    let simple = |rho: f64, residual: f64| CurveSample {
        delta,
        rho_s: rho,
        residual: residual.abs(),
        alpha: 1.0,
    };
    match method {
        CurveMethod::Fl => {
            let rho = rho_s_fl_with_tol(delta, tol)?;
            Ok(simple(rho, fl_residual(delta, rho)))
        }
        CurveMethod::Rv => {
            let rho = rho_s_rv_with_tol(delta, tol)?;
            Ok(simple(rho, rv_residual(delta, rho)))
        }
        CurveMethod::Candes => {
            let rho = rho_s_candes_with_tol(delta, tol)?;
            Ok(simple(rho, candes_residual(delta, rho)))
        }
        CurveMethod::FlQ | CurveMethod::FlQBounded => {
            let cap = if method == CurveMethod::FlQBounded {
                Some(constraint.ok_or_else(|| Error::domain("FL_Q_BOUNDED needs a factor cap"))?)
            } else {
                None
            };
            let t = lq_transition(delta, q, cap, tol)?;
            Ok(CurveSample {
                delta,
                rho_s: t.rho,
                residual: t.residual,
                alpha: t.alpha,
            })
        }
    }
}

/// Samples a transition curve over `delta_grid` (in parallel; output order
/// follows the grid).
pub fn build_curve(
    method: CurveMethod,
    q: f64,
    constraint: Option<FactorCap>,
    delta_grid: &[f64],
    tol: f64,
) -> Result<TransitionCurve> {
    if delta_grid.is_empty() {
        return Err(Error::domain("empty delta grid"));
    }
    if delta_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::domain("delta grid must be strictly increasing"));
    }
    if !(tol > 0.0) {
        return Err(Error::domain(format!("tolerance {tol} must be positive")));
    }
    let q = match method {
        CurveMethod::FlQ | CurveMethod::FlQBounded => {
            check_q(q)?;
            q
        }
        _ => 1.0,
    };
    let constraint = if method == CurveMethod::FlQBounded { constraint } else { None };
    let results: Vec<(f64, Result<CurveSample>)> = delta_grid
        .par_iter()
        .map(|&d| (d, sample_curve(method, q, constraint, d, tol)))
        .collect();

    let mut samples = Vec::new();
    let mut failures = Vec::new();
    for (d, r) in results {
        match r {
            Ok(s) if s.rho_s > 0.0 && s.rho_s < 0.5 => samples.push(s),
            Ok(s) => failures.push((d, format!("root {} outside (0, 0.5)", s.rho_s))),
            Err(e) => failures.push((d, e.to_string())),
        }
    }
    if samples.is_empty() {
        return Err(Error::Infeasible(format!(
            "every sample of the {method} curve failed: {}",
            failures.first().map(|f| f.1.as_str()).unwrap_or("")
        )));
    }
    Ok(TransitionCurve {
        method,
        q,
        constraint,
        samples,
        failures,
        solver_tol: tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(d: f64, r: f64) -> PhasePoint {
        PhasePoint::new(d, r).unwrap()
    }

    #[test]
    fn gamma_values() {
        assert!((gamma_rv(1.0).unwrap() - 3f64.powf(0.25)).abs() < 1e-14);
        assert!((gamma_rv(1e-300).unwrap() - 1.0).abs() < 1e-2);
        for i in 1..1000 {
            assert!(gamma_rv(i as f64 / 1000.0).unwrap() > 1.0);
        }
        assert!(gamma_rv(0.0).is_err());
        assert!(gamma_rv(3.0).is_err());
    }

    #[test]
    fn mu_fl_domain_and_small_values() {
        assert!(mu_fl(pt(0.5, 0.5)).is_err());
        let m = mu_fl(pt(0.5, 0.001)).unwrap();
        assert!(m > 0.0 && m < 1.0, "{m}");
    }

    #[test]
    fn mu_rv_vanishes_with_rho() {
        assert!(mu_rv(pt(0.5, 1e-12)).unwrap() < 1e-9);
    }

    #[test]
    fn fl_root_below_and_residual() {
        let d = 0.5;
        let r = rho_s_fl(d).unwrap();
        assert!((mu_fl(pt(d, r)).unwrap() - 1.0).abs() <= 1e-8);
        assert!(mu_fl(pt(d, 0.5 * r)).unwrap() < 1.0);
    }

    #[test]
    fn mu_alpha_reduces_to_mu_fl() {
        let p = pt(0.5, 0.01);
        assert_eq!(mu_alpha(p, 1.0, 1.0).unwrap(), mu_fl(p).unwrap());
        let m = mu_alpha(p, 0.5, 4.0).unwrap();
        let direct = fl_condition(0.5, 0.08).unwrap() / 8.0;
        assert!((m - direct).abs() <= 1e-15 * direct);
        assert!(mu_alpha(p, 1.0, 0.5).is_err());
        assert!(mu_alpha(p, 1.0, 60.0).is_err());
        assert!(mu_alpha(p, 1.5, 1.0).is_err());
    }

    #[test]
    fn stability_factor_limits() {
        // q = 1, mu = 0: C1 = 2.
        let v = factor_values(1.0, 0.0, 1.0 + SQRT_2);
        assert!((v[0] - 2.0).abs() < 1e-15);
        let f = stability_factors(pt(0.5, 0.001), 1.0, 1.0).unwrap();
        assert!(f.c1 > 2.0 && f.d1 > 0.0 && f.c2 > 0.0 && f.d2 > 0.0);
        assert!(f.beta >= 1.0 + SQRT_2);
        let r = rho_s_fl(0.5).unwrap();
        assert!(matches!(
            stability_factors(pt(0.5, r * 1.01), 1.0, 1.0),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn mu_target_inverts_c1() {
        let t = mu_target(Some(FactorCap { factor: StabilityFactor::C1, cap: 50.0 }), 1.0, 3.0).unwrap();
        // 2 (1 + mu) / (1 - mu) = 50.
        assert!((t - 48.0 / 52.0).abs() < 1e-12);
        assert!(mu_target(Some(FactorCap { factor: StabilityFactor::C1, cap: 1.5 }), 1.0, 3.0).is_none());
    }

    #[test]
    fn curve_method_parsing() {
        assert_eq!("fl".parse::<CurveMethod>().unwrap(), CurveMethod::Fl);
        assert_eq!("C".parse::<CurveMethod>().unwrap(), CurveMethod::Candes);
        assert!("XX".parse::<CurveMethod>().is_err());
        assert_eq!("d2".parse::<StabilityFactor>().unwrap(), StabilityFactor::D2);
    }

    #[test]
    fn grid_endpoints() {
        let g = default_delta_grid();
        assert_eq!(g.len(), 91);
        assert_eq!(g[0], 0.05);
        assert_eq!(g[90], 0.95);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn build_curve_rejects_bad_grid() {
        assert!(build_curve(CurveMethod::Fl, 1.0, None, &[0.5, 0.4], 1e-12).is_err());
        assert!(build_curve(CurveMethod::Fl, 1.0, None, &[], 1e-12).is_err());
        let c = build_curve(CurveMethod::Rv, 1.0, None, &[0.5, 1.5], 1e-12).unwrap();
        assert_eq!(c.samples.len(), 1);
        assert_eq!(c.failures.len(), 1);
    }
}
