//! Monte-Carlo side of the RIP analysis.
//!
//! Samples matrices from the Gaussian ensemble (`N(0, 1/n)` entries), takes
//! extreme eigenvalues of Gram submatrices `A_K^T A_K`, and runs greedy
//! local searches whose results are lower bounds on the extremal
//! eigenvalues over all supports of a given size.

use std::time::Instant;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rip_bounds::{bound_l, bound_u, PhasePoint, ProblemSize};
use crate::rng::{derive_seed, index_below, stream_rng, NormalSampler};

/// Default number of random-first-column restarts in the greedy search.
pub const DEFAULT_RESTARTS: usize = 8;
const SECULAR_ITERATIONS: usize = 100;
const PRE_BISECTIONS: usize = 6;

/// An `n x N` draw from the Gaussian ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianMatrix {
    pub n: usize,
    pub big_n: usize,
    pub seed: u64,
    entries: DMatrix<f64>,
}

impl GaussianMatrix {
    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn into_entries(self) -> DMatrix<f64> {
        self.entries
    }
}

/// Which extreme of the Gram spectrum a search or record concerns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EigenMode {
    MinEig,
    MaxEig,
}

impl EigenMode {
    pub fn name(self) -> &'static str {
        match self {
            EigenMode::MinEig => "MIN_EIG",
            EigenMode::MaxEig => "MAX_EIG",
        }
    }

    fn better(self, candidate: f64, incumbent: f64) -> bool {
        match self {
            EigenMode::MinEig => candidate < incumbent,
            EigenMode::MaxEig => candidate > incumbent,
        }
    }
}

/// One Monte-Carlo outcome of a greedy search.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    /// Seed that regenerates the matrix through [`sample_gaussian`].
    pub seed: u64,
    pub size: ProblemSize,
    pub mode: EigenMode,
    /// Sorted column indices.
    pub support: Vec<usize>,
    pub eigenvalue: f64,
    /// Seconds spent in the search that produced the record.
    pub wall_time: f64,
}

pub(crate) fn gaussian_entries<R: rand::RngCore>(rows: usize, cols: usize, rng: R) -> DMatrix<f64> {
    let scale = 1.0 / (rows as f64).sqrt();
    let mut sampler = NormalSampler::new(rng);
    let data: Vec<f64> = (0..rows * cols).map(|_| scale * sampler.sample()).collect();
    DMatrix::from_vec(rows, cols, data)
}

/// Draws an `n x N` matrix with i.i.d. `N(0, 1/n)` entries; bit-identical
/// for identical `(n, N, seed)`.
pub fn sample_gaussian(n: usize, big_n: usize, seed: u64) -> Result<GaussianMatrix> {
    if n < 1 || n > big_n {
        return Err(Error::domain(format!("matrix size {n} x {big_n} violates 1 <= n <= N")));
    }
    Ok(GaussianMatrix {
        n,
        big_n,
        seed,
        entries: gaussian_entries(n, big_n, stream_rng(seed, 0)),
    })
}

fn check_support(ncols: usize, nrows: usize, support: &[usize]) -> Result<()> {
    if support.is_empty() || support.len() > nrows {
        return Err(Error::domain(format!(
            "support of size {} must be in 1..={nrows}",
            support.len()
        )));
    }
    let mut seen = vec![false; ncols];
    for &j in support {
        if j >= ncols || std::mem::replace(&mut seen[j], true) {
            return Err(Error::domain(format!("support index {j} out of range or repeated")));
        }
    }
    Ok(())
}

fn min_max(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

/// Smallest and largest eigenvalue of `A_K^T A_K` for the columns in
/// `support`. The smallest is clamped at zero.
pub fn gram_extreme_eigs(matrix: &DMatrix<f64>, support: &[usize]) -> Result<(f64, f64)> {
    check_support(matrix.ncols(), matrix.nrows(), support)?;
    let sub = matrix.select_columns(support);
    let gram = sub.tr_mul(&sub);
    let (lo, hi) = min_max(gram.symmetric_eigenvalues().iter().copied());
    Ok((lo.max(0.0), hi))
}

/// Extreme eigenvalue of the bordered matrix `[[diag(lams), z], [z^T, c]]`
/// through its secular equation `c - x - sum z_i^2 / (lams_i - x) = 0`.
///
/// `lams` are the eigenvalues of the current Gram matrix and `z` the new
/// column's coupling expressed in its eigenbasis.
fn bordered_extreme(lams: &[f64], z: &[f64], c: f64, mode: EigenMode) -> f64 {
    let znorm = z.iter().map(|v| v * v).sum::<f64>().sqrt();
    let (lam_lo, lam_hi) = min_max(lams.iter().copied());
    if znorm == 0.0 {
        return match mode {
            EigenMode::MaxEig => lam_hi.max(c),
            EigenMode::MinEig => lam_lo.min(c),
        };
    }
    // Beyond the old spectrum f(x) = c - x - sum z_i^2 / (lams_i - x) is
    // decreasing, and convex on the right (concave on the left). A few
    // bisection steps give a point between the pole and the root; Newton
    // from there moves monotonically onto the root.
    let f_df = |x: f64| {
        let mut f = c - x;
        let mut df = -1.0;
        for (l, zi) in lams.iter().zip(z) {
            let d = l - x;
            let w = zi * zi / d;
            f -= w;
            df -= w / d;
        }
        (f, df)
    };
    let (pole, far) = match mode {
        EigenMode::MaxEig => (lam_hi, lam_hi.max(c) + znorm),
        EigenMode::MinEig => (lam_lo, lam_lo.min(c) - znorm),
    };
    let (mut near, mut outer) = (pole, far);
    for i in 0..SECULAR_ITERATIONS {
        let mid = 0.5 * (near + outer);
        if mid == near || mid == outer || (i >= PRE_BISECTIONS && near != pole) {
            break;
        }
        if (f_df(mid).0 > 0.0) == (mode == EigenMode::MaxEig) {
            near = mid;
        } else {
            outer = mid;
        }
    }
    if near == pole {
        return 0.5 * (near + outer);
    }
    let mut x = near;
    for _ in 0..SECULAR_ITERATIONS {
        let (f, df) = f_df(x);
        let next = x - f / df;
        let inside = match mode {
            EigenMode::MaxEig => next > x && next <= outer,
            EigenMode::MinEig => next < x && next >= outer,
        };
        if !inside {
            break;
        }
        x = next;
    }
    x
}

/// A nested sequence of supports grown one column at a time.
#[derive(Debug, Clone, PartialEq)]
pub struct GreedyPath {
    /// Columns in the order they were added.
    pub order: Vec<usize>,
    /// Extreme eigenvalue of the support `order[..=i]`.
    pub values: Vec<f64>,
}

fn column_sq_norms(a: &DMatrix<f64>) -> Vec<f64> {
    a.column_iter().map(|c| c.norm_squared()).collect()
}

fn greedy_path_inner(a: &DMatrix<f64>, col_sq: &[f64], first: usize, k_max: usize, mode: EigenMode) -> GreedyPath {
    let big_n = a.ncols();
    let mut order = vec![first];
    let mut in_support = vec![false; big_n];
    in_support[first] = true;
    // Row i holds the inner products of column order[i] with every column.
    let mut cross: Vec<DVector<f64>> = vec![a.tr_mul(&a.column(first))];
    let mut values = Vec::with_capacity(k_max);

    loop {
        let k = order.len();
        let gram = DMatrix::from_fn(k, k, |i, j| cross[i][order[j]]);
        let eig = SymmetricEigen::new(gram);
        let (lo, hi) = min_max(eig.eigenvalues.iter().copied());
        values.push(match mode {
            EigenMode::MinEig => lo.max(0.0),
            EigenMode::MaxEig => hi,
        });
        if k == k_max {
            break;
        }

        let stacked = DMatrix::from_fn(k, big_n, |i, j| cross[i][j]);
        let projected = eig.eigenvectors.tr_mul(&stacked);
        let lams: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        let mut best: Option<(usize, f64)> = None;
        let mut z = vec![0.0; k];
        for j in 0..big_n {
            if in_support[j] {
                continue;
            }
            for (i, zi) in z.iter_mut().enumerate() {
                *zi = projected[(i, j)];
            }
            let score = bordered_extreme(&lams, &z, col_sq[j], mode);
            if best.map_or(true, |(_, b)| mode.better(score, b)) {
                best = Some((j, score));
            }
        }
        let Some((next, _)) = best else { break };
        order.push(next);
        in_support[next] = true;
        cross.push(a.tr_mul(&a.column(next)));
    }
    GreedyPath { order, values }
}

/// One greedy path from column `first` up to `k_max` columns.
pub fn greedy_path(matrix: &DMatrix<f64>, first: usize, k_max: usize, mode: EigenMode) -> Result<GreedyPath> {
    if first >= matrix.ncols() || k_max < 1 || k_max > matrix.nrows() || k_max > matrix.ncols() {
        return Err(Error::domain(format!(
            "greedy path from column {first} to size {k_max} on a {} x {} matrix",
            matrix.nrows(),
            matrix.ncols()
        )));
    }
    Ok(greedy_path_inner(matrix, &column_sq_norms(matrix), first, k_max, mode))
}

/// Best value and support per size `1..=k_max` over the greedy paths.
#[derive(Debug, Clone, PartialEq)]
pub struct GreedyProfile {
    pub mode: EigenMode,
    pub values: Vec<f64>,
    pub supports: Vec<Vec<usize>>,
    pub wall_time: f64,
}

/// Runs the path from the extreme single column plus `restarts` paths from
/// random first columns and keeps the best value at every size.
pub fn greedy_profile(matrix: &DMatrix<f64>, k_max: usize, mode: EigenMode, restarts: usize, seed: u64) -> Result<GreedyProfile> {
    let (n, big_n) = matrix.shape();
    if k_max < 1 || k_max >= n || k_max > big_n {
        return Err(Error::domain(format!(
            "greedy search size {k_max} outside 1..={} for n = {n}",
            n.saturating_sub(1)
        )));
    }
    let start = Instant::now();
    let col_sq = column_sq_norms(matrix);
    let extreme_col = (0..big_n)
        .reduce(|b, j| if mode.better(col_sq[j], col_sq[b]) { j } else { b })
        .expect("matrix has columns");
    let mut rng = stream_rng(seed, 0);
    let mut firsts = vec![extreme_col];
    firsts.extend((0..restarts).map(|_| index_below(&mut rng, big_n)));

    let mut values = vec![f64::NAN; k_max];
    let mut supports = vec![Vec::new(); k_max];
    for first in firsts {
        let path = greedy_path_inner(matrix, &col_sq, first, k_max, mode);
        for (i, &v) in path.values.iter().enumerate() {
            if values[i].is_nan() || mode.better(v, values[i]) {
                values[i] = v;
                let mut s = path.order[..=i].to_vec();
                s.sort_unstable();
                supports[i] = s;
            }
        }
    }
    Ok(GreedyProfile {
        mode,
        values,
        supports,
        wall_time: start.elapsed().as_secs_f64(),
    })
}

/// Greedy lower bound on the extreme Gram eigenvalue over supports of
/// size `k` (for `MinEig`, an upper bound on the true minimum).
pub fn greedy_rip_search(matrix: &GaussianMatrix, k: usize, mode: EigenMode, restarts: usize, seed: u64) -> Result<TrialRecord> {
    let profile = greedy_profile(matrix.entries(), k, mode, restarts, seed)?;
    Ok(TrialRecord {
        seed: matrix.seed,
        size: ProblemSize::new(k, matrix.n, matrix.big_n)?,
        mode,
        support: profile.supports[k - 1].clone(),
        eigenvalue: profile.values[k - 1],
        wall_time: profile.wall_time,
    })
}

/// Exhaustive extreme over all `C(N, k)` supports; for toy sizes only.
pub fn exhaustive_extreme(matrix: &DMatrix<f64>, k: usize, mode: EigenMode) -> Result<f64> {
    let big_n = matrix.ncols();
    if k < 1 || k > matrix.nrows() || k > big_n {
        return Err(Error::domain(format!("exhaustive search size {k}")));
    }
    let mut idx: Vec<usize> = (0..k).collect();
    let mut best = f64::NAN;
    loop {
        let (lo, hi) = gram_extreme_eigs(matrix, &idx)?;
        let v = match mode {
            EigenMode::MinEig => lo,
            EigenMode::MaxEig => hi,
        };
        if best.is_nan() || mode.better(v, best) {
            best = v;
        }
        // Next combination in lexicographic order.
        let mut i = k;
        while i > 0 && idx[i - 1] == big_n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return Ok(best);
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// One `(n, N, k)` cell of the empirical-versus-analytic comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioCell {
    pub size: ProblemSize,
    /// Largest observed `1 - min eig` over the matrices drawn.
    pub empirical_l: f64,
    /// Largest observed `max eig - 1` over the matrices drawn.
    pub empirical_u: f64,
    pub bound_l: f64,
    pub bound_u: f64,
}

impl RatioCell {
    pub fn ratio_l(&self) -> f64 {
        self.bound_l / self.empirical_l
    }

    pub fn ratio_u(&self) -> f64 {
        self.bound_u / self.empirical_u
    }

    pub fn exceeds_l(&self) -> bool {
        self.empirical_l > self.bound_l
    }

    pub fn exceeds_u(&self) -> bool {
        self.empirical_u > self.bound_u
    }
}

/// Ratios of analytic bounds to observed lower bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioTable {
    pub n: usize,
    pub cells: Vec<RatioCell>,
    pub records: Vec<TrialRecord>,
    /// `(N, k, reason)` for cells whose analytic bounds failed.
    pub failures: Vec<(usize, usize, String)>,
}

impl RatioTable {
    /// Largest `L / L_emp` over cells where the bound holds.
    pub fn max_ratio_l(&self) -> f64 {
        self.cells
            .iter()
            .filter(|c| !c.exceeds_l() && c.empirical_l > 0.0)
            .map(RatioCell::ratio_l)
            .fold(f64::NAN, f64::max)
    }

    /// Largest `U / U_emp` over cells where the bound holds.
    pub fn max_ratio_u(&self) -> f64 {
        self.cells
            .iter()
            .filter(|c| !c.exceeds_u() && c.empirical_u > 0.0)
            .map(RatioCell::ratio_u)
            .fold(f64::NAN, f64::max)
    }

    /// Fraction of cells where either observed constant exceeds its bound.
    pub fn exceedance_fraction(&self) -> f64 {
        if self.cells.is_empty() {
            return 0.0;
        }
        let bad = self.cells.iter().filter(|c| c.exceeds_l() || c.exceeds_u()).count();
        bad as f64 / self.cells.len() as f64
    }
}

/// Column counts `N` with `n/N` spread uniformly over `[1/20, 20/21]`.
pub fn aspect_ratio_columns(n: usize, count: usize) -> Vec<usize> {
    let mut cols: Vec<usize> = crate::phase_transitions::uniform_grid(1.0 / 20.0, 20.0 / 21.0, count)
        .into_iter()
        .map(|d| ((n as f64 / d).round() as usize).max(n + 1))
        .collect();
    cols.sort_unstable();
    cols.dedup();
    cols.reverse();
    cols
}

/// Runs the greedy searches on `trials` matrices for every `N` and compares
/// the best observed constants with the analytic bounds at
/// `(delta, rho) = (n/N, k/n)` for every `k` in `1..=k_max`.
pub fn empirical_vs_analytic(
    n: usize,
    big_n_list: &[usize],
    k_max: usize,
    trials: usize,
    restarts: usize,
    seed: u64,
) -> Result<RatioTable> {
    if k_max < 1 || k_max >= n {
        return Err(Error::domain(format!("k_max = {k_max} outside 1..={}", n - 1)));
    }
    if trials == 0 {
        return Err(Error::domain("at least one trial is required"));
    }
    if let Some(&bad) = big_n_list.iter().find(|&&m| m < n) {
        return Err(Error::domain(format!("N = {bad} below n = {n}")));
    }
    let tasks: Vec<(usize, usize)> = (0..big_n_list.len())
        .flat_map(|i| (0..trials).map(move |t| (i, t)))
        .collect();
    let outcomes: Vec<Result<(GreedyProfile, GreedyProfile, u64)>> = tasks
        .par_iter()
        .enumerate()
        .map(|(task, &(i, _))| {
            let matrix_seed = derive_seed(seed, task as u64);
            let a = sample_gaussian(n, big_n_list[i], matrix_seed)?;
            let search_seed = derive_seed(matrix_seed, 1);
            let lo = greedy_profile(a.entries(), k_max, EigenMode::MinEig, restarts, search_seed)?;
            let hi = greedy_profile(a.entries(), k_max, EigenMode::MaxEig, restarts, search_seed)?;
            Ok((lo, hi, matrix_seed))
        })
        .collect();

    let mut records = Vec::new();
    let mut emp = vec![vec![(f64::NEG_INFINITY, f64::NEG_INFINITY); k_max]; big_n_list.len()];
    for (&(i, _), outcome) in tasks.iter().zip(outcomes) {
        let (lo, hi, matrix_seed) = outcome?;
        for k in 1..=k_max {
            let e = &mut emp[i][k - 1];
            e.0 = e.0.max(1.0 - lo.values[k - 1]);
            e.1 = e.1.max(hi.values[k - 1] - 1.0);
            let size = ProblemSize::new(k, n, big_n_list[i])?;
            for p in [&lo, &hi] {
                records.push(TrialRecord {
                    seed: matrix_seed,
                    size,
                    mode: p.mode,
                    support: p.supports[k - 1].clone(),
                    eigenvalue: p.values[k - 1],
                    wall_time: p.wall_time,
                });
            }
        }
    }

    let cell_keys: Vec<(usize, usize)> = (0..big_n_list.len())
        .flat_map(|i| (1..=k_max).map(move |k| (i, k)))
        .collect();
    let analytic: Vec<Result<(f64, f64)>> = cell_keys
        .par_iter()
        .map(|&(i, k)| {
            let point = PhasePoint::new(n as f64 / big_n_list[i] as f64, k as f64 / n as f64)?;
            Ok((bound_l(point)?, bound_u(point)?))
        })
        .collect();

    let mut cells = Vec::new();
    let mut failures = Vec::new();
    for (&(i, k), bounds) in cell_keys.iter().zip(analytic) {
        match bounds {
            Ok((bl, bu)) => cells.push(RatioCell {
                size: ProblemSize::new(k, n, big_n_list[i])?,
                empirical_l: emp[i][k - 1].0,
                empirical_u: emp[i][k - 1].1,
                bound_l: bl,
                bound_u: bu,
            }),
            Err(e) => failures.push((big_n_list[i], k, e.to_string())),
        }
    }
    Ok(RatioTable {
        n,
        cells,
        records,
        failures,
    })
}

/// Raw extreme-eigenvalue samples of `k x k` Wishart matrices, `k = round(rho n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WishartSamples {
    pub rho: f64,
    pub n: usize,
    pub k: usize,
    pub min_eigs: Vec<f64>,
    pub max_eigs: Vec<f64>,
}

impl WishartSamples {
    pub fn mean_min(&self) -> f64 {
        self.min_eigs.iter().sum::<f64>() / self.min_eigs.len() as f64
    }

    pub fn mean_max(&self) -> f64 {
        self.max_eigs.iter().sum::<f64>() / self.max_eigs.len() as f64
    }
}

/// Extreme eigenvalues of `A^T A` for `trials` draws of an `n x k` Gaussian
/// matrix per aspect ratio in `rho_list`.
pub fn wishart_histogram(n: usize, rho_list: &[f64], trials: usize, seed: u64) -> Result<Vec<WishartSamples>> {
    if n == 0 {
        return Err(Error::domain("n must be positive"));
    }
    let mut out = Vec::with_capacity(rho_list.len());
    for (ri, &rho) in rho_list.iter().enumerate() {
        if !(rho > 0.0 && rho <= 1.0) {
            return Err(Error::domain(format!("rho = {rho} outside (0, 1]")));
        }
        let k = ((rho * n as f64).round() as usize).clamp(1, n);
        let pairs: Vec<(f64, f64)> = (0..trials)
            .into_par_iter()
            .map(|t| {
                let a = gaussian_entries(n, k, stream_rng(seed, (ri * trials + t) as u64));
                let (lo, hi) = min_max(a.tr_mul(&a).symmetric_eigenvalues().iter().copied());
                (lo.max(0.0), hi)
            })
            .collect();
        out.push(WishartSamples {
            rho,
            n,
            k,
            min_eigs: pairs.iter().map(|p| p.0).collect(),
            max_eigs: pairs.iter().map(|p| p.1).collect(),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampling_is_deterministic() {
        let a = sample_gaussian(30, 50, 9).unwrap();
        let b = sample_gaussian(30, 50, 9).unwrap();
        let c = sample_gaussian(30, 50, 10).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.entries(), c.entries());
        assert!(sample_gaussian(60, 50, 1).is_err());
    }

    #[test]
    fn entry_statistics() {
        let a = sample_gaussian(100, 200, 2024).unwrap();
        let mean = a.entries().mean();
        assert!(mean.abs() < 0.01, "{mean}");
        let b = sample_gaussian(100, 2000, 7).unwrap();
        let avg_sq = column_sq_norms(b.entries()).iter().sum::<f64>() / 2000.0;
        assert!(avg_sq > 0.97 && avg_sq < 1.03, "{avg_sq}");
    }

    #[test]
    fn single_column_gram() {
        let a = sample_gaussian(20, 40, 3).unwrap();
        let c = a.entries().column(5).norm_squared();
        let (lo, hi) = gram_extreme_eigs(a.entries(), &[5]).unwrap();
        assert!((lo - c).abs() < 1e-14 && (hi - c).abs() < 1e-14);
    }

    #[test]
    fn orthonormal_columns_give_unit_spectrum() {
        let eye = DMatrix::<f64>::identity(6, 6);
        let (lo, hi) = gram_extreme_eigs(&eye, &[0, 2, 3, 5]).unwrap();
        assert!((lo - 1.0).abs() < 1e-15 && (hi - 1.0).abs() < 1e-15);
    }

    #[test]
    fn support_validation() {
        let eye = DMatrix::<f64>::identity(4, 6);
        assert!(gram_extreme_eigs(&eye, &[]).is_err());
        assert!(gram_extreme_eigs(&eye, &[0, 0]).is_err());
        assert!(gram_extreme_eigs(&eye, &[7]).is_err());
        assert!(gram_extreme_eigs(&eye, &[0, 1, 2, 3, 4]).is_err());
    }

    #[test]
    fn secular_matches_dense_eigensolve() {
        let a = sample_gaussian(12, 20, 5).unwrap();
        let m = a.entries();
        let support = [1, 4, 7, 9];
        let sub = m.select_columns(&support);
        let eig = SymmetricEigen::new(sub.tr_mul(&sub));
        let lams: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        for j in [0, 3, 15] {
            let z: Vec<f64> = (eig.eigenvectors.transpose() * sub.tr_mul(&m.column(j))).iter().copied().collect();
            let c = m.column(j).norm_squared();
            let mut ext = support.to_vec();
            ext.push(j);
            let (lo, hi) = gram_extreme_eigs(m, &ext).unwrap();
            assert!((bordered_extreme(&lams, &z, c, EigenMode::MaxEig) - hi).abs() < 1e-12);
            assert!((bordered_extreme(&lams, &z, c, EigenMode::MinEig) - lo).abs() < 1e-12);
        }
    }

    #[test]
    fn greedy_exact_at_k1() {
        let a = sample_gaussian(10, 30, 1).unwrap();
        let norms = column_sq_norms(a.entries());
        let best = norms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let rec = greedy_rip_search(&a, 1, EigenMode::MaxEig, 0, 0).unwrap();
        assert!((rec.eigenvalue - best).abs() < 1e-14);
        let worst = norms.iter().cloned().fold(f64::INFINITY, f64::min);
        let rec = greedy_rip_search(&a, 1, EigenMode::MinEig, 0, 0).unwrap();
        assert!((rec.eigenvalue - worst).abs() < 1e-14);
    }

    #[test]
    fn greedy_path_is_monotone() {
        let a = sample_gaussian(20, 40, 17).unwrap();
        let up = greedy_path(a.entries(), 0, 19, EigenMode::MaxEig).unwrap();
        assert!(up.values.windows(2).all(|w| w[0] <= w[1] + 1e-12));
        let down = greedy_path(a.entries(), 0, 19, EigenMode::MinEig).unwrap();
        assert!(down.values.windows(2).all(|w| w[0] + 1e-12 >= w[1]));
        // The recorded values are the exact eigenvalues of the nested supports.
        let (_, hi) = gram_extreme_eigs(a.entries(), &up.order[..7]).unwrap();
        assert!((hi - up.values[6]).abs() < 1e-12);
    }

    #[test]
    fn greedy_never_beats_exhaustive() {
        let a = sample_gaussian(10, 14, 77).unwrap();
        let rec = greedy_rip_search(&a, 3, EigenMode::MaxEig, 4, 1).unwrap();
        let best = exhaustive_extreme(a.entries(), 3, EigenMode::MaxEig).unwrap();
        assert!(rec.eigenvalue <= best + 1e-12);
        let rec = greedy_rip_search(&a, 3, EigenMode::MinEig, 4, 1).unwrap();
        let best = exhaustive_extreme(a.entries(), 3, EigenMode::MinEig).unwrap();
        assert!(rec.eigenvalue >= best - 1e-12);
        assert_eq!(rec.support.len(), 3);
        assert!(rec.support.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn unit_columns_have_zero_rip_at_k1() {
        let mut m = sample_gaussian(15, 40, 4).unwrap().into_entries();
        for mut c in m.column_iter_mut() {
            let norm = c.norm();
            c /= norm;
        }
        let hi = greedy_profile(&m, 1, EigenMode::MaxEig, 2, 0).unwrap();
        let lo = greedy_profile(&m, 1, EigenMode::MinEig, 2, 0).unwrap();
        assert!((hi.values[0] - 1.0).abs() < 1e-14);
        assert!((1.0 - lo.values[0]).abs() < 1e-14);
    }

    #[test]
    fn aspect_ratio_columns_span_range() {
        let cols = aspect_ratio_columns(100, 20);
        assert_eq!(cols.len(), 20);
        assert_eq!(cols[0], 2000);
        assert_eq!(*cols.last().unwrap(), 105);
    }

    #[test]
    fn wishart_sample_shapes() {
        let s = wishart_histogram(40, &[0.25, 0.5], 5, 3).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].k, 10);
        assert_eq!(s[1].max_eigs.len(), 5);
        assert!(s[0].min_eigs.iter().zip(&s[0].max_eigs).all(|(a, b)| a <= b));
        assert_eq!(s, wishart_histogram(40, &[0.25, 0.5], 5, 3).unwrap());
    }
}
