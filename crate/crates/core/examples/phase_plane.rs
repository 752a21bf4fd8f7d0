//! A small recovery sweep at delta = 1/2: the empirical 50% crossing sits
//! far above the guaranteed strong-equivalence curves.

use ripbounds::l1_recovery::{empirical_weak_transition, SignalModel};
use ripbounds::phase_transitions::{rho_s_candes, rho_s_fl, rho_s_rv, uniform_grid};

fn main() -> ripbounds::Result<()> {
    let delta = 0.5;
    let rhos = uniform_grid(0.05, 0.5, 10);
    let surface = empirical_weak_transition(&[delta], &rhos, 60, 10, SignalModel::Unit, 3)?;
    for c in &surface.cells {
        println!("rho = {:.3}  k = {:>2}  success {:>2}/{}", c.rho, c.k, c.successes, c.trials);
    }
    match surface.crossings[0].1 {
        Some(r) => println!("empirical 50% crossing: rho = {r:.3}"),
        None => println!("no crossing inside the grid"),
    }
    println!(
        "guarantees: C {:.2e}, FL {:.2e}, RV {:.2e}",
        rho_s_candes(delta)?,
        rho_s_fl(delta)?,
        rho_s_rv(delta)?
    );
    Ok(())
}
