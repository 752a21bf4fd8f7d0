//! The lq transition for a few q, and what capping the stability factor C1
//! costs in admissible sparsity.

use ripbounds::phase_transitions::{rho_s_fl, rho_s_fl_q, rho_s_fl_q_bounded, stability_factors};
use ripbounds::{PhasePoint, StabilityFactor};

fn main() -> ripbounds::Result<()> {
    let delta = 0.5;
    println!("delta = {delta}, l1 curve rho_S = {:.4e}", rho_s_fl(delta)?);
    for q in [1.0, 0.75, 0.5, 0.25] {
        let t = rho_s_fl_q(delta, q)?;
        println!("q = {q:<4}: rho_S = {:.4e} at alpha = {:.3}", t.rho, t.alpha);
    }

    // Along the l1 curve the factors blow up as the transition is approached.
    let rho_s = rho_s_fl(delta)?;
    for frac in [1e-3, 0.5, 0.9, 0.99, 0.999] {
        let f = stability_factors(PhasePoint::new(delta, frac * rho_s)?, 1.0, 1.0)?;
        println!("rho = {frac:<5} rho_S: C1 = {:.4e}  D1 = {:.4e}  C2 = {:.4e}  D2 = {:.4e}", f.c1, f.d1, f.c2, f.d2);
    }

    for cap in [10.0, 30.0, 100.0] {
        let t = rho_s_fl_q_bounded(delta, 0.5, StabilityFactor::C1, cap)?;
        println!("q = 0.5, C1 <= {cap:<5}: rho_S = {:.4e}", t.rho);
    }
    Ok(())
}
