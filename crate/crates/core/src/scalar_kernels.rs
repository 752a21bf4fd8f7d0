//! Scalar building blocks shared by every other module.
//!
//! Everything here is a pure function of its arguments. Logarithms are
//! natural throughout, so entropies and rate functions are in nats.

use crate::error::{Error, Result};

/// Iteration cap for [`find_root_bracketed`].
pub const MAX_BISECTION_ITERATIONS: usize = 200;

/// Default tolerance for [`find_root_bracketed`].
pub const DEFAULT_ROOT_TOL: f64 = 1e-10;

/// A value in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Probability(f64);

impl Probability {
    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Probability(value))
        } else {
            Err(Error::domain(format!("probability {value} outside [0, 1]")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Binary Shannon entropy `H(p) = p log(1/p) + (1-p) log(1/(1-p))`.
///
/// The endpoints are defined by continuity, `H(0) = H(1) = 0`.
pub fn shannon_entropy(p: Probability) -> f64 {
    entropy(p.0)
}

#[inline]
pub(crate) fn entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    let q = 1.0 - p;
    // Evaluate the two terms in the same order for p and 1-p so that H is
    // symmetric up to rounding.
    let (a, b) = if p <= q { (p, q) } else { (q, p) };
    -a * a.ln() - b * b.ln()
}

/// A rate function evaluated at one `(lambda, rho)` point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateEvaluation {
    pub lambda: f64,
    pub rho: f64,
    pub value: f64,
}

impl RateEvaluation {
    pub fn psi_min(lambda: f64, rho: f64) -> Result<Self> {
        Ok(RateEvaluation {
            lambda,
            rho,
            value: psi_min(lambda, rho)?,
        })
    }

    pub fn psi_max(lambda: f64, rho: f64) -> Result<Self> {
        Ok(RateEvaluation {
            lambda,
            rho,
            value: psi_max(lambda, rho)?,
        })
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("lambda = {lambda} must be positive and finite")))
    }
}

fn check_open_unit(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} = {x} outside (0, 1)")))
    }
}

fn check_half_open_unit(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x <= 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} = {x} outside (0, 1]")))
    }
}

/// `psi_min(lambda, rho) = H(rho) + [(1-rho) log(lambda) + 1 - rho + rho log(rho) - lambda] / 2`.
pub fn psi_min(lambda: f64, rho: f64) -> Result<f64> {
    check_lambda(lambda)?;
    check_open_unit("rho", rho)?;
    Ok(psi_min_at_log(lambda.ln(), rho))
}

/// `psi_min` with the eigenvalue coordinate given as `log(lambda)`.
///
/// Smallest-eigenvalue roots can sit far below the smallest positive `f64`,
/// so the solver works in this coordinate.
#[inline]
pub(crate) fn psi_min_at_log(log_lambda: f64, rho: f64) -> f64 {
    entropy(rho) + 0.5 * ((1.0 - rho) * log_lambda + 1.0 - rho + rho * rho.ln() - log_lambda.exp())
}

/// `psi_max(lambda, rho) = [(1+rho) log(lambda) + 1 + rho - rho log(rho) - lambda] / 2`.
pub fn psi_max(lambda: f64, rho: f64) -> Result<f64> {
    check_lambda(lambda)?;
    check_half_open_unit("rho", rho)?;
    Ok(psi_max_unchecked(lambda, rho))
}

#[inline]
pub(crate) fn psi_max_unchecked(lambda: f64, rho: f64) -> f64 {
    0.5 * ((1.0 + rho) * lambda.ln() + 1.0 + rho - rho * rho.ln() - lambda)
}

/// Exponent of the union bound over all `C(N, k)` largest eigenvalues:
/// `H(rho * delta) + delta * psi_max(lambda, rho)`.
pub fn rate_max(delta: f64, rho: f64, lambda: f64) -> Result<f64> {
    check_half_open_unit("delta", delta)?;
    check_half_open_unit("rho", rho)?;
    check_lambda(lambda)?;
    Ok(rate_max_unchecked(delta, rho, lambda))
}

#[inline]
pub(crate) fn rate_max_unchecked(delta: f64, rho: f64, lambda: f64) -> f64 {
    entropy(rho * delta) + delta * psi_max_unchecked(lambda, rho)
}

/// Smallest-eigenvalue counterpart of [`rate_max`]:
/// `H(rho * delta) + delta * psi_min(lambda, rho)`.
pub fn rate_min(delta: f64, rho: f64, lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    rate_min_at_log(delta, rho, lambda.ln())
}

/// [`rate_min`] with the eigenvalue given as `log(lambda)`; accepts
/// arbitrarily negative logs.
pub fn rate_min_at_log(delta: f64, rho: f64, log_lambda: f64) -> Result<f64> {
    check_half_open_unit("delta", delta)?;
    check_open_unit("rho", rho)?;
    if log_lambda.is_nan() || log_lambda == f64::INFINITY {
        return Err(Error::domain(format!("log lambda = {log_lambda}")));
    }
    Ok(rate_min_at_log_unchecked(delta, rho, log_lambda))
}

#[inline]
pub(crate) fn rate_min_at_log_unchecked(delta: f64, rho: f64, log_lambda: f64) -> f64 {
    entropy(rho * delta) + delta * psi_min_at_log(log_lambda, rho)
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// `log Gamma(x)` for `x > 0`, Lanczos approximation (g = 7, 9 terms).
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain(format!("ln_gamma argument {x} must be positive")));
    }
    Ok(ln_gamma_unchecked(x))
}

pub(crate) fn ln_gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        // Reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x).
        return (std::f64::consts::PI / (std::f64::consts::PI * x).sin()).ln()
            - ln_gamma_unchecked(1.0 - x);
    }
    let z = x - 1.0;
    let mut series = LANCZOS_COEFFS[0];
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        series += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    LN_SQRT_2PI + (z + 0.5) * t.ln() - t + series.ln()
}

/// `log C(n, k)` through log-gamma, safe for `n` in the millions.
pub fn ln_binomial(n: u64, k: u64) -> Result<f64> {
    if k > n {
        return Err(Error::domain(format!("binomial C({n}, {k}) with k > n")));
    }
    if k == 0 || k == n {
        return Ok(0.0);
    }
    let (n, k) = (n as f64, k as f64);
    Ok(ln_gamma_unchecked(n + 1.0) - ln_gamma_unchecked(k + 1.0) - ln_gamma_unchecked(n - k + 1.0))
}

/// Bisection on a bracket `[lo, hi]` where `f` changes sign.
///
/// Stops when `|f(x)| <= tol` or the bracket width falls below
/// `tol * max(1, |x|)`. Identical inputs give identical outputs.
pub fn find_root_bracketed<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(tol > 0.0) {
        return Err(Error::domain(format!("tolerance {tol} must be positive")));
    }
    let (mut lo, mut hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.is_nan() || f_hi.is_nan() || f_lo.signum() == f_hi.signum() {
        return Err(Error::NotBracketed { lo, hi, f_lo, f_hi });
    }

    let mut best = (lo, f_lo);
    for _ in 0..MAX_BISECTION_ITERATIONS {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if f_mid.abs() < best.1.abs() || best.1.is_nan() {
            best = (mid, f_mid);
        }
        if f_mid.abs() <= tol || (hi - lo) <= tol * mid.abs().max(1.0) {
            return Ok(mid);
        }
        // No representable midpoint left between the endpoints.
        if mid <= lo || mid >= hi {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::NoConvergence {
        iterations: MAX_BISECTION_ITERATIONS,
        best: best.0,
        residual: best.1,
    })
}

/// Golden-section search for a minimum of `f` on `[a, b]`; returns
/// `(argmin, min)`. Stops once the interval is narrower than `tol`.
pub fn golden_section_min<F>(f: F, a: f64, b: f64, tol: f64) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = if a <= b { (a, b) } else { (b, a) };
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..MAX_BISECTION_ITERATIONS {
        if (b - a) <= tol {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}
