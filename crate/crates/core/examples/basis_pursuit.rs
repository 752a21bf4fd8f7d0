//! Decodes a planted sparse vector by l1 minimisation and shows the dual
//! certificate that proves optimality.

use nalgebra::DVector;
use ripbounds::empirical_lab::sample_gaussian;
use ripbounds::l1_recovery::{solve_basis_pursuit, SignalModel, SparseSignal};
use ripbounds::rng::stream_rng;

fn main() -> ripbounds::Result<()> {
    let (n, big_n) = (60, 200);
    let a = sample_gaussian(n, big_n, 11)?.into_entries();
    for k in [5, 15, 30] {
        let x = SparseSignal::random(big_n, k, SignalModel::Gaussian, &mut stream_rng(11, k as u64))?.to_dense();
        let y: DVector<f64> = &a * &x;
        let sol = solve_basis_pursuit(&a, &y, 1e-9)?;
        println!(
            "k = {k:>2}: |z|_1 = {:.6}, dual bound = {:.6}, |x|_1 = {:.6}, rel err = {:.2e} ({} iterations)",
            sol.objective,
            sol.dual_objective,
            x.iter().map(|v| v.abs()).sum::<f64>(),
            (&sol.z - &x).norm() / x.norm(),
            sol.iterations
        );
    }
    Ok(())
}
