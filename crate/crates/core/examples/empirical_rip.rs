//! Greedy searches for badly conditioned supports of one Gaussian matrix,
//! compared with the analytic bounds at the same (delta, rho).

use ripbounds::empirical_lab::{greedy_profile, sample_gaussian, EigenMode};
use ripbounds::rip_bounds::{bound_l, bound_u};
use ripbounds::PhasePoint;

fn main() -> ripbounds::Result<()> {
    let (n, big_n) = (100, 400);
    let a = sample_gaussian(n, big_n, 2024)?;
    let k_max = 60;
    let lo = greedy_profile(a.entries(), k_max, EigenMode::MinEig, 4, 1)?;
    let hi = greedy_profile(a.entries(), k_max, EigenMode::MaxEig, 4, 1)?;
    println!("{:>3} {:>9} {:>9} {:>9} {:>9}", "k", "L_emp", "L", "U_emp", "U");
    for k in (5..=k_max).step_by(5) {
        let p = PhasePoint::new(n as f64 / big_n as f64, k as f64 / n as f64)?;
        println!(
            "{k:>3} {:>9.4} {:>9.4} {:>9.4} {:>9.4}",
            1.0 - lo.values[k - 1],
            bound_l(p)?,
            hi.values[k - 1] - 1.0,
            bound_u(p)?
        );
    }
    Ok(())
}
