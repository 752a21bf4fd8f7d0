//! Samples the three l1 strong-equivalence curves and reports the
//! proportionality constants n >= c k they guarantee.

use ripbounds::phase_transitions::{build_curve, default_delta_grid, CURVE_TOL};
use ripbounds::CurveMethod;

fn main() -> ripbounds::Result<()> {
    let grid = default_delta_grid();
    let mut curves = Vec::new();
    for method in [CurveMethod::Candes, CurveMethod::Fl, CurveMethod::Rv] {
        let curve = build_curve(method, 1.0, None, &grid, CURVE_TOL)?;
        let (at, worst) = curve
            .samples
            .iter()
            .map(|s| (s.delta, 1.0 / s.rho_s))
            .fold((0.0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
        println!("{method:>7}: n >= {worst:.1} k suffices everywhere (tightest at delta = {at:.2})");
        curves.push(curve);
    }
    println!("\n{:>6} {:>12} {:>12} {:>12}", "delta", "rho_S^C", "rho_S^FL", "rho_S^RV");
    for i in (0..grid.len()).step_by(10) {
        println!(
            "{:>6.2} {:>12.4e} {:>12.4e} {:>12.4e}",
            grid[i], curves[0].samples[i].rho_s, curves[1].samples[i].rho_s, curves[2].samples[i].rho_s
        );
    }
    Ok(())
}
