//! Asymptotic bounds on the asymmetric RIP constants of Gaussian matrices.
//!
//! For a phase point `(delta, rho)` the largest-eigenvalue root
//! `lambda_max` solves `H(rho delta) + delta psi_max(lambda, rho) = 0` on
//! `[1 + rho, inf)` and the smallest-eigenvalue root `lambda_min` solves the
//! `psi_min` analogue on `(0, 1 - rho]`. The bounds are
//!
//! ```text
//! L(delta, rho) = 1 - lambda_min(delta, rho)
//! U(delta, rho) = min_{nu in [rho, 1]} lambda_max(delta, nu) - 1
//! ```
//!
//! The module also carries Edelman's finite-`n` density bounds for the
//! extreme eigenvalues of a `k x k` Wishart matrix and the union bound built
//! from them.

use crate::error::{Error, Result};
use crate::scalar_kernels::{
    entropy, find_root_bracketed, golden_section_min, ln_binomial, ln_gamma_unchecked,
    rate_max_unchecked, rate_min_at_log_unchecked, DEFAULT_ROOT_TOL,
};

/// Points in the uniform grid scanned by the `nu`-minimisation of [`bound_u`].
pub const NU_GRID_POINTS: usize = 1024;
/// Final interval width of the golden-section refinement in [`bound_u`].
pub const NU_REFINE_TOL: f64 = 1e-8;
const MAX_BRACKET_DOUBLINGS: usize = 60;
/// Root tolerance inside the transition conditions, which are solved for
/// their own roots on top of these.
const RATIO_ROOT_TOL: f64 = 1e-14;

/// A point of the phase space: `delta = n/N`, `rho = k/n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    delta: f64,
    rho: f64,
}

impl PhasePoint {
    pub fn new(delta: f64, rho: f64) -> Result<Self> {
        if !(delta > 0.0 && delta <= 1.0) {
            return Err(Error::domain(format!("delta = {delta} outside (0, 1]")));
        }
        if !(rho > 0.0 && rho < 1.0) {
            return Err(Error::domain(format!("rho = {rho} outside (0, 1)")));
        }
        Ok(PhasePoint { delta, rho })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }
}

/// A finite problem size `(k, n, N)` with `1 <= k <= n <= N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ProblemSize {
    pub k: usize,
    pub n: usize,
    pub big_n: usize,
}

impl ProblemSize {
    pub fn new(k: usize, n: usize, big_n: usize) -> Result<Self> {
        if k < 1 || k > n || n > big_n {
            return Err(Error::domain(format!(
                "problem size (k, n, N) = ({k}, {n}, {big_n}) violates 1 <= k <= n <= N"
            )));
        }
        Ok(ProblemSize { k, n, big_n })
    }

    pub fn delta(&self) -> f64 {
        self.n as f64 / self.big_n as f64
    }

    pub fn rho(&self) -> f64 {
        self.k as f64 / self.n as f64
    }
}

/// The pair `(L, U)` at one phase point together with the roots behind it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RipBoundPair {
    pub point: PhasePoint,
    /// `exp(log_lambda_min)`; may underflow to zero far out in the phase space.
    pub lambda_min: f64,
    pub log_lambda_min: f64,
    /// `lambda_max(delta, rho)` at the point itself (not the minimising `nu`).
    pub lambda_max: f64,
    /// The `nu` attaining the minimum in `U`.
    pub nu_star: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Largest-eigenvalue root for `rho` in `(0, 1]`.
pub(crate) fn lambda_max_raw(delta: f64, rho: f64, tol: f64) -> Result<f64> {
    let f = |lambda: f64| rate_max_unchecked(delta, rho, lambda);
    let lo = 1.0 + rho;
    let mut width = 1.0;
    let mut hi = lo + width;
    let mut doublings = 0;
    while f(hi) > 0.0 {
        doublings += 1;
        if doublings > MAX_BRACKET_DOUBLINGS {
            return Err(Error::NotBracketed {
                lo,
                hi,
                f_lo: f(lo),
                f_hi: f(hi),
            });
        }
        width *= 2.0;
        hi = lo + width;
    }
    find_root_bracketed(f, lo, hi, tol)
}

/// The root of `rate_max(delta, rho, .)` on `[1 + rho, inf)`.
pub fn lambda_max(point: PhasePoint) -> Result<f64> {
    lambda_max_raw(point.delta, point.rho, DEFAULT_ROOT_TOL)
}

/// `log` of the root of `rate_min(delta, rho, .)` on `(0, 1 - rho]`.
pub fn log_lambda_min(point: PhasePoint) -> Result<f64> {
    log_lambda_min_raw(point.delta, point.rho, DEFAULT_ROOT_TOL)
}

pub(crate) fn log_lambda_min_raw(delta: f64, rho: f64, tol: f64) -> Result<f64> {
    let f = |t: f64| rate_min_at_log_unchecked(delta, rho, t);
    let hi = (1.0 - rho).ln();
    // Start at machine epsilon below the window edge, then walk further down
    // in log space; the rate tends to -inf as lambda -> 0.
    let mut lo = hi + f64::EPSILON.ln();
    let mut doublings = 0;
    while f(lo) > 0.0 {
        doublings += 1;
        if doublings > MAX_BRACKET_DOUBLINGS {
            return Err(Error::NotBracketed {
                lo,
                hi,
                f_lo: f(lo),
                f_hi: f(hi),
            });
        }
        lo = hi + 2.0 * (lo - hi);
    }
    find_root_bracketed(f, lo, hi, tol)
}

/// The root of `rate_min(delta, rho, .)` on `(0, 1 - rho]`.
///
/// Underflows to `0.0` where the root is below the smallest positive
/// double; use [`log_lambda_min`] there.
pub fn lambda_min(point: PhasePoint) -> Result<f64> {
    Ok(log_lambda_min(point)?.exp())
}

/// `L(delta, rho) = 1 - lambda_min(delta, rho)`.
pub fn bound_l(point: PhasePoint) -> Result<f64> {
    Ok(-log_lambda_min(point)?.exp_m1())
}

/// Minimum of `lambda_max(delta, nu)` over `nu in [rho, 1]`, as
/// `(nu_star, lambda)`.
pub(crate) fn min_lambda_max_over_nu(delta: f64, rho: f64) -> Result<(f64, f64)> {
    min_lambda_max_over_nu_tol(delta, rho, DEFAULT_ROOT_TOL)
}

fn min_lambda_max_over_nu_tol(delta: f64, rho: f64, tol: f64) -> Result<(f64, f64)> {
    let h = (1.0 - rho) / (NU_GRID_POINTS - 1) as f64;
    let nu_at = |i: usize| {
        if i == NU_GRID_POINTS - 1 {
            1.0
        } else {
            rho + i as f64 * h
        }
    };
    // The scan only locates the minimising cell; values that are returned
    // are solved to `tol`.
    let scan_tol = tol.max(DEFAULT_ROOT_TOL);
    let mut best_i = 0;
    let mut best = f64::INFINITY;
    for i in 0..NU_GRID_POINTS {
        let v = lambda_max_raw(delta, nu_at(i), scan_tol)?;
        if v < best {
            best = v;
            best_i = i;
        }
    }
    let a = nu_at(best_i.saturating_sub(1));
    let b = nu_at((best_i + 1).min(NU_GRID_POINTS - 1));
    let (nu_ref, v_ref) = golden_section_min(
        |nu| lambda_max_raw(delta, nu, tol).unwrap_or(f64::INFINITY),
        a,
        b,
        NU_REFINE_TOL,
    );
    let best = if scan_tol == tol { best } else { lambda_max_raw(delta, nu_at(best_i), tol)? };
    if v_ref < best {
        Ok((nu_ref, v_ref))
    } else {
        Ok((nu_at(best_i), best))
    }
}

/// `U(delta, rho) = min_{nu in [rho, 1]} lambda_max(delta, nu) - 1`.
pub fn bound_u(point: PhasePoint) -> Result<f64> {
    Ok(min_lambda_max_over_nu(point.delta, point.rho)?.1 - 1.0)
}

/// Both bounds and their roots at one point.
pub fn rip_bounds(point: PhasePoint) -> Result<RipBoundPair> {
    rip_bounds_with_tol(point, DEFAULT_ROOT_TOL)
}

/// [`rip_bounds`] with an explicit root-finding tolerance.
pub fn rip_bounds_with_tol(point: PhasePoint, tol: f64) -> Result<RipBoundPair> {
    if !(tol > 0.0) {
        return Err(Error::domain(format!("tolerance {tol} must be positive")));
    }
    let log_lambda_min = log_lambda_min_raw(point.delta, point.rho, tol)?;
    let lambda_max = lambda_max_raw(point.delta, point.rho, tol)?;
    let (nu_star, min_lambda_max) = min_lambda_max_over_nu_tol(point.delta, point.rho, tol)?;
    Ok(RipBoundPair {
        point,
        lambda_min: log_lambda_min.exp(),
        log_lambda_min,
        lambda_max,
        nu_star,
        lower: -log_lambda_min.exp_m1(),
        upper: min_lambda_max - 1.0,
    })
}

/// `(1 + U) / (1 - L)` at sparsity ratio `s`, the quantity every
/// strong-equivalence condition is built on.
pub(crate) fn eigen_ratio(delta: f64, s: f64) -> Result<f64> {
    let (log_lmin, lmax) = tight_extremes(delta, s)?;
    Ok(lmax * (-log_lmin).exp())
}

/// `(L, U)` with the roots solved to the tight tolerance.
pub(crate) fn tight_bounds(delta: f64, s: f64) -> Result<(f64, f64)> {
    let (log_lmin, lmax) = tight_extremes(delta, s)?;
    Ok((-log_lmin.exp_m1(), lmax - 1.0))
}

/// `(log lambda_min, min_nu lambda_max)` at `(delta, s)`.
fn tight_extremes(delta: f64, s: f64) -> Result<(f64, f64)> {
    PhasePoint::new(delta, s)?;
    let log_lmin = log_lambda_min_raw(delta, s, RATIO_ROOT_TOL)?;
    let (_, lmax) = min_lambda_max_over_nu_tol(delta, s, RATIO_ROOT_TOL)?;
    Ok((log_lmin, lmax))
}

fn check_kn(k: usize, n: usize) -> Result<()> {
    if k < 1 || k > n {
        return Err(Error::domain(format!("(k, n) = ({k}, {n}) violates 1 <= k <= n")));
    }
    Ok(())
}

fn check_positive(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("lambda = {lambda} must be positive")))
    }
}

/// `log g_max(k, n; lambda)`, Edelman's bound on the density of the largest
/// eigenvalue of `A^T A` for an `n x k` matrix with `N(0, 1/n)` entries:
///
/// ```text
/// g_max = (2 pi)^{1/2} (n lambda)^{-3/2} (n lambda / 2)^{(n+k)/2} e^{-n lambda / 2}
///         / (Gamma(k/2) Gamma(n/2))
/// ```
pub fn ln_edelman_density_bound_max(k: usize, n: usize, lambda: f64) -> Result<f64> {
    check_kn(k, n)?;
    check_positive(lambda)?;
    let (kf, nf) = (k as f64, n as f64);
    let nl = nf * lambda;
    Ok(0.5 * (2.0 * std::f64::consts::PI).ln() - 1.5 * nl.ln() + 0.5 * (nf + kf) * (0.5 * nl).ln()
        - 0.5 * nl
        - ln_gamma_unchecked(0.5 * kf)
        - ln_gamma_unchecked(0.5 * nf))
}

/// `g_max(k, n; lambda)`; see [`ln_edelman_density_bound_max`].
pub fn edelman_density_bound_max(k: usize, n: usize, lambda: f64) -> Result<f64> {
    Ok(ln_edelman_density_bound_max(k, n, lambda)?.exp())
}

/// `log g_min(k, n; lambda)`, Edelman's bound on the density of the smallest
/// eigenvalue:
///
/// ```text
/// g_min = (pi / (2 n lambda))^{1/2} e^{-n lambda / 2} (n lambda / 2)^{(n-k)/2}
///         Gamma((n+1)/2) / (Gamma(k/2) Gamma((n-k+1)/2) Gamma((n-k+2)/2))
/// ```
pub fn ln_edelman_density_bound_min(k: usize, n: usize, lambda: f64) -> Result<f64> {
    check_kn(k, n)?;
    check_positive(lambda)?;
    let (kf, nf) = (k as f64, n as f64);
    let nl = nf * lambda;
    Ok(0.5 * (std::f64::consts::PI / (2.0 * nl)).ln() - 0.5 * nl
        + 0.5 * (nf - kf) * (0.5 * nl).ln()
        + ln_gamma_unchecked(0.5 * (nf + 1.0))
        - ln_gamma_unchecked(0.5 * kf)
        - ln_gamma_unchecked(0.5 * (nf - kf + 1.0))
        - ln_gamma_unchecked(0.5 * (nf - kf + 2.0)))
}

/// `g_min(k, n; lambda)`; see [`ln_edelman_density_bound_min`].
pub fn edelman_density_bound_min(k: usize, n: usize, lambda: f64) -> Result<f64> {
    Ok(ln_edelman_density_bound_min(k, n, lambda)?.exp())
}

/// Union bound on `Prob[1 + U(k, n, N) > t]`:
/// `min(1, C(N, k) * 2 t * g_max(k, n; t))`, evaluated in log space.
pub fn finite_n_exceedance_bound_max(size: ProblemSize, t: f64) -> Result<f64> {
    let window = 1.0 + size.rho();
    if !(t >= window) || !t.is_finite() {
        return Err(Error::domain(format!(
            "threshold t = {t} below the admissible window 1 + k/n = {window}"
        )));
    }
    let log_bound = ln_binomial(size.big_n as u64, size.k as u64)?
        + (2.0 * t).ln()
        + ln_edelman_density_bound_max(size.k, size.n, t)?;
    Ok(if log_bound >= 0.0 { 1.0 } else { log_bound.exp() })
}

/// `int_t^inf g_max(k, n; lambda) d lambda` by composite Simpson quadrature.
///
/// The upper limit is pushed out until the integrand has dropped 60 nats
/// below its largest value on the range.
pub fn edelman_tail_integral_max(k: usize, n: usize, t: f64) -> Result<f64> {
    check_kn(k, n)?;
    check_positive(t)?;
    let ln_g = |l: f64| ln_edelman_density_bound_max(k, n, l).unwrap_or(f64::NEG_INFINITY);
    // The log-density is concave in lambda with its mode at (n + k - 3) / n.
    let mode = ((n + k) as f64 - 3.0) / n as f64;
    let peak_at = if mode > t { mode } else { t };
    let ln_peak = ln_g(peak_at);
    let mut upper = peak_at + 1.0;
    while ln_g(upper) > ln_peak - 60.0 {
        upper = peak_at + 2.0 * (upper - peak_at);
    }
    let intervals = 20_000;
    let h = (upper - t) / intervals as f64;
    let mut acc = 0.0;
    for i in 0..=intervals {
        let w = if i == 0 || i == intervals {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc += w * (ln_g(t + i as f64 * h) - ln_peak).exp();
    }
    Ok(acc * h / 3.0 * ln_peak.exp())
}

/// Limits of the expected extreme eigenvalues of a Wishart matrix with
/// aspect ratio `rho`: `((1 - sqrt rho)^2, (1 + sqrt rho)^2)`.
pub fn expected_extreme_eigenvalues(rho: f64) -> Result<(f64, f64)> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::domain(format!("rho = {rho} outside [0, 1]")));
    }
    let s = rho.sqrt();
    Ok(((1.0 - s) * (1.0 - s), (1.0 + s) * (1.0 + s)))
}

/// Entropy term `H(rho delta)` shared by both defining equations.
pub fn counting_exponent(point: PhasePoint) -> f64 {
    entropy(point.rho * point.delta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar_kernels::{rate_max, rate_min_at_log};

    fn pt(d: f64, r: f64) -> PhasePoint {
        PhasePoint::new(d, r).unwrap()
    }

    #[test]
    fn phase_point_domain() {
        assert!(PhasePoint::new(0.0, 0.5).is_err());
        assert!(PhasePoint::new(1.0, 0.5).is_ok());
        assert!(PhasePoint::new(0.5, 1.0).is_err());
        assert!(PhasePoint::new(1.2, 0.5).is_err());
        assert!(ProblemSize::new(0, 5, 10).is_err());
        assert!(ProblemSize::new(6, 5, 10).is_err());
        assert!(ProblemSize::new(2, 5, 4).is_err());
    }

    #[test]
    fn lambda_max_square_full() {
        // delta = rho = 1: 2 log(l) + 2 - l = 0 on [2, inf).
        let l = lambda_max_raw(1.0, 1.0, 1e-13).unwrap();
        assert!((2.0 * l.ln() + 2.0 - l).abs() < 1e-11);
        assert!((l - 5.356_693_98).abs() < 1e-7, "{l}");
    }

    #[test]
    fn lambda_min_reference_point() {
        let p = pt(1.0, 0.5);
        let l = lambda_min(p).unwrap();
        assert!(l > 0.0028 && l < 0.0030, "{l}");
        // Twice the rate at delta = 1, rho = 1/2, written out by hand.
        let g = 0.5 * l.ln() - l + 4.0 * std::f64::consts::LN_2 + 0.5 + 0.5 * 0.5f64.ln();
        assert!(g.abs() < 1e-8, "{g}");
        let big_l = bound_l(p).unwrap();
        assert!(big_l > 0.9970 && big_l < 0.9972);
    }

    #[test]
    fn roots_strictly_inside_windows() {
        for &(d, r) in &[(0.5, 0.25), (0.1, 0.02), (0.9, 0.7)] {
            let p = pt(d, r);
            let lmax = lambda_max(p).unwrap();
            assert!(lmax > 1.0 + r);
            assert!(rate_max(d, r, lmax).unwrap().abs() <= 1e-9);
            let t = log_lambda_min(p).unwrap();
            assert!(t < (1.0 - r).ln());
            assert!(rate_min_at_log(d, r, t).unwrap().abs() <= 1e-9);
        }
    }

    #[test]
    fn lambda_min_survives_underflow() {
        let p = pt(0.05, 0.99);
        let t = log_lambda_min(p).unwrap();
        assert!(t < -700.0);
        assert!(rate_min_at_log(0.05, 0.99, t).unwrap().abs() <= 1e-9);
        assert_eq!(bound_l(p).unwrap(), 1.0);
    }

    #[test]
    fn bound_u_matches_dense_nu_scan() {
        let p = pt(0.5, 0.25);
        let u = bound_u(p).unwrap();
        let mut oracle = f64::INFINITY;
        for i in 0..10_000 {
            let nu = 0.25 + 0.75 * i as f64 / 9_999.0;
            oracle = oracle.min(lambda_max_raw(0.5, nu, 1e-12).unwrap() - 1.0);
        }
        assert!(u <= oracle + 1e-8, "{u} vs {oracle}");
        assert!((u - oracle).abs() < 1e-7);
        assert!(u <= lambda_max(p).unwrap() - 1.0 + 1e-12);
    }

    #[test]
    fn bound_u_interior_minimiser_near_square() {
        // Near delta = 1 the minimum moves to nu = 1.
        let pair = rip_bounds(pt(20.0 / 21.0, 0.9)).unwrap();
        assert!(pair.nu_star > 0.9);
        assert!(pair.upper < pair.lambda_max - 1.0);
    }

    #[test]
    fn edelman_max_unit_case() {
        // k = n = 1: Gamma(1/2)^2 = pi.
        let l: f64 = 0.7;
        let closed = (2.0 * std::f64::consts::PI).sqrt() * l.powf(-1.5) * (l / 2.0) * (-l / 2.0).exp()
            / std::f64::consts::PI;
        let got = edelman_density_bound_max(1, 1, l).unwrap();
        assert!((got - closed).abs() < 1e-14 * closed);
    }

    #[test]
    fn edelman_exponents_converge_to_psi() {
        // The exponents differ from psi by O(log n / n).
        let err_max = |n: usize| {
            let v = ln_edelman_density_bound_max(n / 2, n, 3.0).unwrap() / n as f64;
            (v - crate::scalar_kernels::psi_max(3.0, 0.5).unwrap()).abs()
        };
        let err_min = |n: usize| {
            let v = ln_edelman_density_bound_min(n / 2, n, 0.1).unwrap() / n as f64;
            (v - crate::scalar_kernels::psi_min(0.1, 0.5).unwrap()).abs()
        };
        assert!(err_max(2000) < 5e-3, "{}", err_max(2000));
        assert!(err_min(2000) < 5e-3, "{}", err_min(2000));
        assert!(err_max(8000) < err_max(2000));
        assert!(err_min(8000) < err_min(2000));
    }

    #[test]
    fn edelman_max_decays_beyond_window() {
        let mut prev = f64::INFINITY;
        for i in 0..100 {
            let l = 1.5 + 0.05 * i as f64;
            let v = ln_edelman_density_bound_max(50, 100, l).unwrap();
            assert!(v < prev);
            prev = v;
        }
        assert!(edelman_density_bound_min(30, 100, 0.2).unwrap() >= 0.0);
        assert!(ln_edelman_density_bound_min(0, 100, 0.2).is_err());
    }

    #[test]
    fn exceedance_bound_behaviour() {
        let size = ProblemSize::new(2, 100, 200).unwrap();
        let t = lambda_max(pt(0.5, 0.02)).unwrap() + 0.3;
        let b = finite_n_exceedance_bound_max(size, t).unwrap();
        assert!(b < 1.0 && b >= 0.0, "{b}");
        let mut prev = 1.0;
        for i in 0..200 {
            let t = 1.02 + 0.02 * i as f64;
            let v = finite_n_exceedance_bound_max(size, t).unwrap();
            assert!(v <= prev + 1e-300);
            prev = v;
        }
        assert_eq!(finite_n_exceedance_bound_max(size, 1.02).unwrap(), 1.0);
        assert!(finite_n_exceedance_bound_max(size, 1.0).is_err());
    }

    #[test]
    fn tail_integral_of_small_case() {
        // k = n = 1: the density bound integrates in closed form to
        // erfc-like tails; compare against a brute Riemann sum.
        let t = 2.0;
        let got = edelman_tail_integral_max(1, 1, t).unwrap();
        let mut brute = 0.0;
        let h = 1e-4;
        let mut l = t + 0.5 * h;
        while l < 200.0 {
            brute += edelman_density_bound_max(1, 1, l).unwrap() * h;
            l += h;
        }
        assert!((got - brute).abs() < 1e-6 * brute, "{got} vs {brute}");
    }

    #[test]
    fn expected_eigenvalue_limits() {
        assert_eq!(expected_extreme_eigenvalues(0.25).unwrap(), (0.25, 2.25));
        assert_eq!(expected_extreme_eigenvalues(0.0).unwrap(), (1.0, 1.0));
        assert_eq!(expected_extreme_eigenvalues(1.0).unwrap(), (0.0, 4.0));
        assert!(expected_extreme_eigenvalues(1.5).is_err());
    }
}
