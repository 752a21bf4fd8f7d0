//! Basis pursuit, `min ||z||_1 subject to Az = y`, and recovery trials over
//! the phase plane.
//!
//! The decoder is scaled-form ADMM on the split `x = z`, with `x` projected
//! onto the affine set `{Ax = y}` and `z` soft-thresholded. Every few
//! iterations the current support is polished by least squares and, if a
//! dual certificate `||A^T nu||_inf <= 1` closes the duality gap, the
//! polished point is returned.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rayon::prelude::*;

use crate::empirical_lab::sample_gaussian;
use crate::error::{Error, Result};
use crate::rng::{derive_seed, index_below, stream_rng, NormalSampler};

pub const MAX_DECODER_ITERATIONS: usize = 50_000;
pub const DEFAULT_DECODER_TOL: f64 = 1e-9;
pub const DEFAULT_SUCCESS_THRESHOLD: f64 = 1e-4;
const POLISH_EVERY: usize = 25;

/// Distribution of the nonzero entries of a planted signal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SignalModel {
    Unit,
    Gaussian,
    Rademacher,
}

impl std::str::FromStr for SignalModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "UNIT" => Ok(SignalModel::Unit),
            "GAUSSIAN" => Ok(SignalModel::Gaussian),
            "RADEMACHER" => Ok(SignalModel::Rademacher),
            _ => Err(Error::domain(format!("unknown signal model '{s}'"))),
        }
    }
}

impl SignalModel {
    pub fn name(self) -> &'static str {
        match self {
            SignalModel::Unit => "UNIT",
            SignalModel::Gaussian => "GAUSSIAN",
            SignalModel::Rademacher => "RADEMACHER",
        }
    }
}

/// A `k`-sparse vector of length `big_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSignal {
    pub big_n: usize,
    support: Vec<usize>,
    values: Vec<f64>,
    pub model: SignalModel,
}

impl SparseSignal {
    pub fn new(big_n: usize, support: Vec<usize>, values: Vec<f64>, model: SignalModel) -> Result<Self> {
        if support.len() != values.len() || support.len() > big_n {
            return Err(Error::domain("support and values must have equal length k <= N"));
        }
        if support.windows(2).any(|w| w[0] >= w[1]) || support.last().is_some_and(|&j| j >= big_n) {
            return Err(Error::domain("support must be sorted, distinct and below N"));
        }
        if values.iter().any(|&v| v == 0.0 || !v.is_finite()) {
            return Err(Error::domain("signal values must be finite and nonzero"));
        }
        Ok(SparseSignal {
            big_n,
            support,
            values,
            model,
        })
    }

    /// Draws a uniformly random support of size `k` and values from `model`.
    pub fn random<R: rand::RngCore>(big_n: usize, k: usize, model: SignalModel, rng: &mut R) -> Result<Self> {
        if k > big_n {
            return Err(Error::domain(format!("k = {k} exceeds N = {big_n}")));
        }
        // Partial Fisher-Yates.
        let mut idx: Vec<usize> = (0..big_n).collect();
        for i in 0..k {
            let j = i + index_below(rng, big_n - i);
            idx.swap(i, j);
        }
        let mut support = idx[..k].to_vec();
        support.sort_unstable();
        let values = match model {
            SignalModel::Unit => vec![1.0; k],
            SignalModel::Rademacher => (0..k)
                .map(|_| if rng.next_u64() >> 63 == 0 { 1.0 } else { -1.0 })
                .collect(),
            SignalModel::Gaussian => {
                let mut normals = NormalSampler::new(rng);
                (0..k)
                    .map(|_| loop {
                        let v = normals.sample();
                        if v != 0.0 {
                            break v;
                        }
                    })
                    .collect()
            }
        };
        SparseSignal::new(big_n, support, values, model)
    }

    pub fn k(&self) -> usize {
        self.support.len()
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn to_dense(&self) -> DVector<f64> {
        let mut x = DVector::zeros(self.big_n);
        for (&j, &v) in self.support.iter().zip(&self.values) {
            x[j] = v;
        }
        x
    }
}

/// A decoded vector with its optimality evidence.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisPursuitSolution {
    pub z: DVector<f64>,
    pub objective: f64,
    /// `y^T nu` for a dual-feasible `nu`; a lower bound on the optimum.
    pub dual_objective: f64,
    pub iterations: usize,
}

fn soft_threshold(v: f64, t: f64) -> f64 {
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        0.0
    }
}

struct Projector<'a> {
    a: &'a DMatrix<f64>,
    y: &'a DVector<f64>,
    chol: Cholesky<f64, Dyn>,
}

impl Projector<'_> {
    /// Orthogonal projection of `v` onto `{x : Ax = y}`.
    fn project(&self, v: &DVector<f64>) -> DVector<f64> {
        let r = self.a * v - self.y;
        v - self.a.tr_mul(&self.chol.solve(&r))
    }

    /// `nu` minimising `||A^T nu - g||`, rescaled to be dual feasible.
    fn dual_from_gradient(&self, g: &DVector<f64>) -> (DVector<f64>, f64) {
        let nu = self.chol.solve(&(self.a * g));
        let scale = (self.a.tr_mul(&nu)).amax().max(1.0);
        let nu = nu / scale;
        let value = self.y.dot(&nu);
        (nu, value)
    }
}

fn l1(v: &DVector<f64>) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

/// Least squares on `support` followed by a dual certificate with
/// `A_S^T nu = sign(w)`: the least-norm one, and `hint` corrected onto that
/// affine set. Returns the polished point and `y^T nu` for the first
/// certificate with `||A^T nu||_inf <= 1`.
fn polish(
    a: &DMatrix<f64>,
    y: &DVector<f64>,
    support: &[usize],
    hint: Option<&DVector<f64>>,
) -> Option<(DVector<f64>, f64)> {
    let mut support = support.to_vec();
    for _ in 0..2 {
        if support.is_empty() || support.len() > a.nrows() {
            return None;
        }
        let a_s = a.select_columns(&support);
        let chol = Cholesky::new(a_s.tr_mul(&a_s))?;
        let w = chol.solve(&a_s.tr_mul(y));
        let peak = w.amax();
        let keep: Vec<usize> = (0..w.len()).filter(|&i| w[i].abs() > 1e-9 * peak).collect();
        if keep.len() < w.len() {
            support = keep.iter().map(|&i| support[i]).collect();
            continue;
        }
        let signs = w.map(f64::signum);
        let least_norm = &a_s * chol.solve(&signs);
        let corrected = hint.map(|h| h + &a_s * chol.solve(&(&signs - a_s.tr_mul(h))));
        for nu in std::iter::once(least_norm).chain(corrected) {
            let corr = a.tr_mul(&nu).amax();
            if corr <= 1.0 + 1e-9 {
                let mut z = DVector::zeros(a.ncols());
                for (&j, &v) in support.iter().zip(w.iter()) {
                    z[j] = v;
                }
                return Some((z, y.dot(&nu) / corr.max(1.0)));
            }
        }
        return None;
    }
    None
}

fn feasible(a: &DMatrix<f64>, y: &DVector<f64>, z: &DVector<f64>, tol: f64) -> bool {
    (a * z - y).norm() <= tol * y.norm().max(1.0)
}

fn support_of(z: &DVector<f64>, n: usize) -> Vec<usize> {
    let peak = z.amax();
    if peak == 0.0 {
        return Vec::new();
    }
    let mut idx: Vec<usize> = (0..z.len()).filter(|&i| z[i].abs() > 1e-7 * peak).collect();
    if idx.len() > n {
        idx.sort_by(|&i, &j| z[j].abs().total_cmp(&z[i].abs()).then(i.cmp(&j)));
        idx.truncate(n);
    }
    idx.sort_unstable();
    idx
}

/// Solves basis pursuit to relative feasibility and duality gap `tol`.
pub fn solve_basis_pursuit(a: &DMatrix<f64>, y: &DVector<f64>, tol: f64) -> Result<BasisPursuitSolution> {
    let (n, big_n) = a.shape();
    if y.len() != n {
        return Err(Error::domain(format!("measurement length {} != {n}", y.len())));
    }
    if !(tol > 0.0) {
        return Err(Error::domain(format!("tolerance {tol} must be positive")));
    }
    if y.iter().all(|&v| v == 0.0) {
        return Ok(BasisPursuitSolution {
            z: DVector::zeros(big_n),
            objective: 0.0,
            dual_objective: 0.0,
            iterations: 0,
        });
    }
    let chol = Cholesky::new(a * a.transpose())
        .ok_or_else(|| Error::domain("measurement matrix does not have full row rank"))?;
    let proj = Projector { a, y, chol };

    let mut x = proj.project(&DVector::zeros(big_n));
    let mut z = x.clone();
    let mut u = DVector::zeros(big_n);
    // Threshold 1/rho starts at a tenth of the typical entry size.
    let mut rho = 10.0 * big_n as f64 / l1(&x).max(f64::MIN_POSITIVE);
    let mut best_gap = f64::INFINITY;

    for it in 1..=MAX_DECODER_ITERATIONS {
        x = proj.project(&(&z - &u));
        let z_prev = z.clone();
        let v = &x + &u;
        z = v.map(|t| soft_threshold(t, 1.0 / rho));
        u += &x - &z;

        let r = (&x - &z).norm();
        let s = rho * (&z - &z_prev).norm();
        if r > 10.0 * s {
            rho *= 2.0;
            u /= 2.0;
        } else if s > 10.0 * r {
            rho /= 2.0;
            u *= 2.0;
        }

        if it % POLISH_EVERY != 0 {
            continue;
        }
        // The ADMM multiplier rho u is a subgradient of ||.||_1 at z.
        let (nu, dual) = proj.dual_from_gradient(&(&u * rho));
        if let Some((zp, dual)) = polish(a, y, &support_of(&z, n), Some(&nu)) {
            let obj = l1(&zp);
            if feasible(a, y, &zp, tol) && obj - dual <= tol * obj.max(1.0) {
                return Ok(BasisPursuitSolution {
                    z: zp,
                    objective: obj,
                    dual_objective: dual,
                    iterations: it,
                });
            }
        }
        let obj = l1(&x);
        best_gap = best_gap.min(obj - dual);
        if feasible(a, y, &x, tol) && obj - dual <= tol * obj.max(1.0) {
            return Ok(BasisPursuitSolution {
                z: x,
                objective: obj,
                dual_objective: dual,
                iterations: it,
            });
        }
    }
    Err(Error::NoConvergence {
        iterations: MAX_DECODER_ITERATIONS,
        best: l1(&x),
        residual: best_gap,
    })
}

/// One decode of a planted signal.
#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryOutcome {
    pub n: usize,
    pub big_n: usize,
    pub k: usize,
    pub seed: u64,
    /// `||z - x|| / ||x||` (absolute error when `x = 0`); infinite when the
    /// decoder failed.
    pub relative_error: f64,
    pub threshold: f64,
    pub solver_iterations: usize,
    pub failure: Option<String>,
}

impl RecoveryOutcome {
    pub fn success(&self) -> bool {
        self.relative_error <= self.threshold
    }
}

/// Draws `A` (from `seed`) and a `k`-sparse signal, decodes `y = Ax`.
pub fn recovery_trial(n: usize, big_n: usize, k: usize, model: SignalModel, seed: u64) -> Result<RecoveryOutcome> {
    recovery_trial_with(n, big_n, k, model, seed, DEFAULT_DECODER_TOL, DEFAULT_SUCCESS_THRESHOLD)
}

pub fn recovery_trial_with(
    n: usize,
    big_n: usize,
    k: usize,
    model: SignalModel,
    seed: u64,
    tol: f64,
    threshold: f64,
) -> Result<RecoveryOutcome> {
    if k > n || n > big_n || n == 0 {
        return Err(Error::domain(format!(
            "trial size (k, n, N) = ({k}, {n}, {big_n}) violates k <= n <= N"
        )));
    }
    let a = sample_gaussian(n, big_n, seed)?.into_entries();
    let signal = SparseSignal::random(big_n, k, model, &mut stream_rng(seed, 1))?;
    let x = signal.to_dense();
    let y = &a * &x;
    let (relative_error, solver_iterations, failure) = match solve_basis_pursuit(&a, &y, tol) {
        Ok(sol) => {
            let err = (&sol.z - &x).norm();
            let scale = x.norm();
            (if scale > 0.0 { err / scale } else { err }, sol.iterations, None)
        }
        Err(e) => (f64::INFINITY, MAX_DECODER_ITERATIONS, Some(e.to_string())),
    };
    Ok(RecoveryOutcome {
        n,
        big_n,
        k,
        seed,
        relative_error,
        threshold,
        solver_iterations,
        failure,
    })
}

/// Success counts at one `(delta, rho)` cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceCell {
    pub delta: f64,
    pub rho: f64,
    pub n: usize,
    pub big_n: usize,
    pub k: usize,
    pub trials: usize,
    pub successes: usize,
    pub decoder_failures: usize,
    /// Fraction after isotonic (nonincreasing in `rho`) smoothing.
    pub smoothed: f64,
}

impl SurfaceCell {
    pub fn fraction(&self) -> f64 {
        self.successes as f64 / self.trials as f64
    }
}

/// Success fractions over a `(delta, rho)` grid and the 50% crossing per
/// `delta` column.
#[derive(Debug, Clone, PartialEq)]
pub struct RecoverySurface {
    /// Column-major: all `rho` for the first `delta`, then the next.
    pub cells: Vec<SurfaceCell>,
    /// Interpolated `rho` at which the smoothed fraction drops through 1/2;
    /// `None` when the column never crosses inside the grid.
    pub crossings: Vec<(f64, Option<f64>)>,
    pub outcomes: Vec<RecoveryOutcome>,
}

/// Least-squares nonincreasing fit (pool adjacent violators).
pub fn isotonic_nonincreasing(values: &[f64], weights: &[f64]) -> Vec<f64> {
    let mut blocks: Vec<(f64, f64, usize)> = Vec::new();
    for (&v, &w) in values.iter().zip(weights) {
        blocks.push((v, w, 1));
        while blocks.len() > 1 {
            let (v2, w2, c2) = blocks[blocks.len() - 1];
            let (v1, w1, c1) = blocks[blocks.len() - 2];
            if v1 >= v2 {
                break;
            }
            blocks.pop();
            let w = w1 + w2;
            *blocks.last_mut().unwrap() = ((v1 * w1 + v2 * w2) / w, w, c1 + c2);
        }
    }
    blocks.into_iter().flat_map(|(v, _, c)| std::iter::repeat_n(v, c)).collect()
}

/// `rho` at which the nonincreasing `fractions` fall through one half.
pub fn half_crossing(rhos: &[f64], fractions: &[f64]) -> Option<f64> {
    if fractions.first().is_none_or(|&f| f < 0.5) {
        return None;
    }
    let j = fractions.iter().position(|&f| f < 0.5)?;
    let (r0, r1, f0, f1) = (rhos[j - 1], rhos[j], fractions[j - 1], fractions[j]);
    Some(r0 + (f0 - 0.5) / (f0 - f1) * (r1 - r0))
}

/// Runs `trials` recovery trials at every `(delta, rho)` cell with
/// `N = round(n / delta)` and `k = max(1, round(rho n))`.
pub fn empirical_weak_transition(
    delta_grid: &[f64],
    rho_grid: &[f64],
    n: usize,
    trials: usize,
    model: SignalModel,
    seed: u64,
) -> Result<RecoverySurface> {
    if trials == 0 || n == 0 {
        return Err(Error::domain("n and trials must be positive"));
    }
    if rho_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::domain("rho grid must be strictly increasing"));
    }
    let mut shapes = Vec::new();
    for &delta in delta_grid {
        if !(delta > 0.0 && delta <= 1.0) {
            return Err(Error::domain(format!("delta = {delta} outside (0, 1]")));
        }
        let big_n = ((n as f64 / delta).round() as usize).max(n);
        for &rho in rho_grid {
            if !(rho > 0.0 && rho <= 1.0) {
                return Err(Error::domain(format!("rho = {rho} outside (0, 1]")));
            }
            let k = ((rho * n as f64).round() as usize).clamp(1, n);
            shapes.push((delta, rho, big_n, k));
        }
    }
    let jobs: Vec<(usize, usize)> = (0..shapes.len()).flat_map(|c| (0..trials).map(move |t| (c, t))).collect();
    let outcomes: Vec<RecoveryOutcome> = jobs
        .par_iter()
        .enumerate()
        .map(|(j, &(c, _))| {
            let (_, _, big_n, k) = shapes[c];
            recovery_trial(n, big_n, k, model, derive_seed(seed, j as u64))
        })
        .collect::<Result<_>>()?;

    let mut cells: Vec<SurfaceCell> = shapes
        .iter()
        .enumerate()
        .map(|(c, &(delta, rho, big_n, k))| {
            let mine = &outcomes[c * trials..(c + 1) * trials];
            SurfaceCell {
                delta,
                rho,
                n,
                big_n,
                k,
                trials,
                successes: mine.iter().filter(|o| o.success()).count(),
                decoder_failures: mine.iter().filter(|o| o.failure.is_some()).count(),
                smoothed: f64::NAN,
            }
        })
        .collect();
    let mut crossings = Vec::new();
    for (column, &delta) in cells.chunks_mut(rho_grid.len()).zip(delta_grid) {
        let raw: Vec<f64> = column.iter().map(SurfaceCell::fraction).collect();
        let smooth = isotonic_nonincreasing(&raw, &vec![1.0; raw.len()]);
        for (cell, s) in column.iter_mut().zip(&smooth) {
            cell.smoothed = *s;
        }
        crossings.push((delta, half_crossing(rho_grid, &smooth)));
    }
    Ok(RecoverySurface {
        cells,
        crossings,
        outcomes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_measurement_gives_zero() {
        let a = sample_gaussian(5, 10, 1).unwrap().into_entries();
        let sol = solve_basis_pursuit(&a, &DVector::zeros(5), 1e-9).unwrap();
        assert_eq!(sol.z, DVector::zeros(10));
        assert_eq!(sol.iterations, 0);
    }

    #[test]
    fn identity_recovers_anything() {
        let a = DMatrix::<f64>::identity(6, 6);
        let x = DVector::from_vec(vec![1.0, -2.0, 0.0, 0.5, 3.0, -0.25]);
        let sol = solve_basis_pursuit(&a, &x, 1e-10).unwrap();
        assert!((&sol.z - &x).norm() < 1e-9);
    }

    #[test]
    fn planted_sparse_recovery() {
        let a = sample_gaussian(20, 40, 3).unwrap().into_entries();
        let mut x = DVector::zeros(40);
        x[4] = 1.0;
        x[31] = 1.0;
        let sol = solve_basis_pursuit(&a, &(&a * &x), 1e-9).unwrap();
        assert!((&sol.z - &x).norm() / x.norm() < 1e-6);
        assert!(sol.objective - sol.dual_objective <= 1e-8);
    }

    #[test]
    fn dense_signal_still_solves() {
        // Far above any transition: the optimum is not the planted vector,
        // but the decoder still certifies it.
        let a = sample_gaussian(30, 60, 8).unwrap().into_entries();
        let x = DVector::from_fn(60, |i, _| if i % 3 == 0 { 0.0 } else { 1.0 });
        let y = &a * &x;
        let sol = solve_basis_pursuit(&a, &y, 1e-9).unwrap();
        assert!((&a * &sol.z - &y).norm() <= 1e-9 * y.norm());
        assert!(sol.objective <= l1(&x) + 1e-9);
        assert!(sol.objective - sol.dual_objective <= 1e-9 * sol.objective);
    }

    #[test]
    fn signal_validation() {
        assert!(SparseSignal::new(5, vec![1, 1], vec![1.0, 1.0], SignalModel::Unit).is_err());
        assert!(SparseSignal::new(5, vec![1, 7], vec![1.0, 1.0], SignalModel::Unit).is_err());
        assert!(SparseSignal::new(5, vec![1, 2], vec![1.0, 0.0], SignalModel::Unit).is_err());
        let s = SparseSignal::random(30, 7, SignalModel::Rademacher, &mut stream_rng(1, 1)).unwrap();
        assert_eq!(s.k(), 7);
        assert!(s.values().iter().all(|v| v.abs() == 1.0));
        assert!(s.support().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn zero_sparsity_trial_succeeds() {
        let o = recovery_trial(10, 20, 0, SignalModel::Unit, 5).unwrap();
        assert!(o.success());
        assert_eq!(o.relative_error, 0.0);
    }

    #[test]
    fn pava_examples() {
        let fit = isotonic_nonincreasing(&[1.0, 0.8, 0.9, 0.2, 0.3, 0.0], &[1.0; 6]);
        let want = [1.0, 0.85, 0.85, 0.25, 0.25, 0.0];
        assert!(fit.iter().zip(want).all(|(a, b)| (a - b).abs() < 1e-15));
    }

    #[test]
    fn crossing_interpolates() {
        let c = half_crossing(&[0.1, 0.2, 0.3], &[1.0, 0.7, 0.3]).unwrap();
        assert!((c - 0.25).abs() < 1e-15);
        assert_eq!(half_crossing(&[0.1, 0.2], &[0.4, 0.0]), None);
        assert_eq!(half_crossing(&[0.1, 0.2], &[1.0, 0.6]), None);
    }
}
