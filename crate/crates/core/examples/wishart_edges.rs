//! Extreme eigenvalues of sampled Wishart matrices against their limits
//! (1 -+ sqrt rho)^2, and the sampled tail of the largest eigenvalue
//! against Edelman's bound.

use ripbounds::empirical_lab::wishart_histogram;
use ripbounds::rip_bounds::{edelman_tail_integral_max, expected_extreme_eigenvalues};

fn main() -> ripbounds::Result<()> {
    let n = 200;
    let trials = 400;
    let samples = wishart_histogram(n, &[0.1, 0.25, 0.5], trials, 7)?;
    for s in &samples {
        let (lo, hi) = expected_extreme_eigenvalues(s.k as f64 / n as f64)?;
        println!(
            "k = {:>3}: mean min {:.4} (limit {lo:.4}), mean max {:.4} (limit {hi:.4})",
            s.k,
            s.mean_min(),
            s.mean_max()
        );
    }

    // The bound is loose at this size; it only drops below one well past
    // the bulk edge.
    let s = &samples[1];
    for t in [2.2, 2.4, 2.8, 3.2, 3.6] {
        let freq = s.max_eigs.iter().filter(|&&v| v > t).count() as f64 / trials as f64;
        println!("k = {}: P(max > {t}) observed {freq:.4}, bound {:.3e}", s.k, edelman_tail_integral_max(s.k, n, t)?);
    }
    Ok(())
}
