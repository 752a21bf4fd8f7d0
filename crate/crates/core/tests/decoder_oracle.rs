//! Basis pursuit against an independent simplex solve of the split LP
//! `min 1'(u + v)  s.t.  A(u - v) = y,  u, v >= 0`.

use minilp::{ComparisonOp, LinearExpr, OptimizationDirection, Problem};
use nalgebra::{DMatrix, DVector};
use ripbounds::empirical_lab::sample_gaussian;
use ripbounds::l1_recovery::{solve_basis_pursuit, SignalModel, SparseSignal, DEFAULT_DECODER_TOL};
use ripbounds::rng::{stream_rng, NormalSampler};

fn lp_l1(a: &DMatrix<f64>, y: &DVector<f64>) -> (f64, DVector<f64>) {
    let (n, big_n) = a.shape();
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let u: Vec<_> = (0..big_n).map(|_| lp.add_var(1.0, (0.0, f64::INFINITY))).collect();
    let v: Vec<_> = (0..big_n).map(|_| lp.add_var(1.0, (0.0, f64::INFINITY))).collect();
    for i in 0..n {
        let mut e = LinearExpr::empty();
        for j in 0..big_n {
            e.add(u[j], a[(i, j)]);
            e.add(v[j], -a[(i, j)]);
        }
        lp.add_constraint(e, ComparisonOp::Eq, y[i]);
    }
    let sol = lp.solve().expect("split LP is feasible and bounded");
    let z = DVector::from_iterator(big_n, (0..big_n).map(|j| sol[u[j]] - sol[v[j]]));
    (sol.objective(), z)
}

fn instances() -> Vec<(DMatrix<f64>, DVector<f64>, Option<DVector<f64>>)> {
    let shapes = [(10, 20), (15, 40), (20, 30), (25, 60), (30, 45), (40, 80), (12, 12), (8, 50), (35, 70), (40, 100)];
    let mut out = Vec::new();
    for (i, &(n, big_n)) in shapes.iter().enumerate() {
        let a = sample_gaussian(n, big_n, 100 + i as u64).unwrap().into_entries();
        // A planted sparse signal...
        let k = (n / 5).max(1);
        let x = SparseSignal::random(big_n, k, SignalModel::Gaussian, &mut stream_rng(200 + i as u64, 0))
            .unwrap()
            .to_dense();
        out.push((a.clone(), &a * &x, Some(x)));
        // ...and a generic right-hand side.
        let mut s = NormalSampler::new(stream_rng(300 + i as u64, 0));
        let y = DVector::from_iterator(n, (0..n).map(|_| s.sample()));
        out.push((a, y, None));
    }
    out
}

#[test]
fn objective_matches_simplex() {
    let cases = instances();
    assert_eq!(cases.len(), 20);
    for (idx, (a, y, planted)) in cases.iter().enumerate() {
        let (lp_obj, lp_z) = lp_l1(a, y);
        let bp = solve_basis_pursuit(a, y, DEFAULT_DECODER_TOL).unwrap();
        let scale = lp_obj.max(1.0);
        assert!((bp.objective - lp_obj).abs() <= 1e-6 * scale, "case {idx}: {} vs {lp_obj}", bp.objective);
        assert!(bp.dual_objective <= lp_obj + 1e-6 * scale, "case {idx}: dual {} above {lp_obj}", bp.dual_objective);
        let resid = (a * &bp.z - y).norm() / y.norm().max(1.0);
        assert!(resid <= 1e-6, "case {idx}: residual {resid}");
        assert!((a * &lp_z - y).norm() <= 1e-6 * y.norm().max(1.0));
        if let Some(x) = planted {
            assert!(lp_obj <= x.abs().sum() + 1e-9 * scale);
        }
    }
}

#[test]
fn planted_signals_are_recovered() {
    for (idx, (a, y, planted)) in instances().iter().enumerate() {
        let Some(x) = planted else { continue };
        let (n, big_n) = a.shape();
        // Only well inside the recovery region: k small relative to n.
        if n < 15 || big_n > 4 * n {
            continue;
        }
        let bp = solve_basis_pursuit(a, y, DEFAULT_DECODER_TOL).unwrap();
        let (_, lp_z) = lp_l1(a, y);
        let err = (&bp.z - x).norm() / x.norm();
        assert!(err <= 1e-6, "case {idx}: decoder error {err}");
        assert!((&lp_z - x).norm() / x.norm() <= 1e-6, "case {idx}: simplex disagrees");
    }
}

#[test]
fn zero_measurement_decodes_to_zero() {
    let a = sample_gaussian(5, 9, 1).unwrap().into_entries();
    let bp = solve_basis_pursuit(&a, &DVector::zeros(5), DEFAULT_DECODER_TOL).unwrap();
    assert_eq!(bp.z, DVector::zeros(9));
    assert_eq!(bp.objective, 0.0);
}
