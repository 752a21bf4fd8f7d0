//! Prints lambda_min, lambda_max and the asymmetric RIP bounds at a few
//! phase points, next to the finite-n union bound they come from.

use ripbounds::rip_bounds::{finite_n_exceedance_bound_max, rip_bounds};
use ripbounds::{PhasePoint, ProblemSize};

fn main() -> ripbounds::Result<()> {
    println!("{:>6} {:>6} {:>12} {:>10} {:>10} {:>10}", "delta", "rho", "lambda_min", "lambda_max", "L", "U");
    for &(delta, rho) in &[(0.1, 0.01), (0.25, 0.1), (0.5, 0.25), (0.5, 0.5), (0.9, 0.1)] {
        let b = rip_bounds(PhasePoint::new(delta, rho)?)?;
        println!(
            "{delta:>6.2} {rho:>6.2} {:>12.4e} {:>10.4} {:>10.6} {:>10.4}",
            b.lambda_min, b.lambda_max, b.lower, b.upper
        );
    }

    // At (k, n, N) = (20, 200, 400) the union bound on a single support
    // exceeding lambda_max(1 + eps) decays quickly with eps.
    let size = ProblemSize::new(20, 200, 400)?;
    let lmax = rip_bounds(PhasePoint::new(size.delta(), size.rho())?)?.lambda_max;
    for eps in [0.0, 0.05, 0.1, 0.2] {
        let t = lmax * (1.0 + eps);
        let p = finite_n_exceedance_bound_max(size, t)?;
        println!("P(some support has max eig > {t:.3}) <= {p:.3e}");
    }
    Ok(())
}
