//! The lq transitions recomputed the long way: for each `alpha` on a log
//! grid, bisect `rho` on the public `mu_alpha` / `stability_factors`, then
//! maximise over `alpha`.

use ripbounds::phase_transitions::{mu_alpha, rho_s_fl, rho_s_fl_q, rho_s_fl_q_bounded, stability_factors};
use ripbounds::{PhasePoint, StabilityFactor};

/// Largest `rho < 1/(2 alpha)` with `ok(rho)`, assuming `ok` holds on an
/// initial segment.
fn largest_ok(alpha: f64, ok: impl Fn(f64) -> bool) -> Option<f64> {
    let mut lo = 1e-9;
    let mut hi = 0.5 / alpha * (1.0 - 1e-9);
    if !ok(lo) {
        return None;
    }
    if ok(hi) {
        return Some(hi);
    }
    for _ in 0..36 {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(lo)
}

fn plain(delta: f64, q: f64, alpha: f64) -> Option<f64> {
    largest_ok(alpha, |rho| {
        mu_alpha(PhasePoint::new(delta, rho).unwrap(), q, alpha).is_ok_and(|m| m < 1.0)
    })
}

fn capped(delta: f64, q: f64, alpha: f64, factor: StabilityFactor, cap: f64) -> Option<f64> {
    largest_ok(alpha, |rho| {
        stability_factors(PhasePoint::new(delta, rho).unwrap(), q, alpha).is_ok_and(|f| f.get(factor) <= cap)
    })
}

fn log_grid(hi: f64, points: usize) -> Vec<f64> {
    (0..points).map(|i| hi.powf(i as f64 / (points - 1) as f64)).collect()
}

/// `max_alpha route(alpha)` on a log grid over `[1, 100]`, then on a fine
/// grid across the best coarse cell; returns `(rho, alpha)`.
fn brute(points: usize, route: impl Fn(f64) -> Option<f64>) -> (f64, f64) {
    let best_of = |grid: Vec<f64>| {
        grid.iter()
            .filter_map(|&a| route(a).map(|r| (r, a)))
            .fold((0.0, 1.0), |b, c| if c.0 > b.0 { c } else { b })
    };
    let coarse = best_of(log_grid(100.0, points));
    let step = 100f64.powf(1.0 / (points - 1) as f64);
    let fine = (0..64)
        .map(|i| coarse.1 * step.powf(-1.0 + 2.0 * i as f64 / 63.0))
        .filter(|&a| a >= 1.0)
        .collect();
    let fine = best_of(fine);
    if fine.0 > coarse.0 { fine } else { coarse }
}

#[test]
fn half_norm_matches_alpha_scan() {
    let (delta, q) = (0.5, 0.5);
    let solved = rho_s_fl_q(delta, q).unwrap();
    let (oracle, alpha) = brute(512, |a| plain(delta, q, a));
    assert!(oracle <= solved.rho * (1.0 + 1e-6), "{oracle} > {}", solved.rho);
    assert!((solved.rho - oracle) <= 1e-4 * solved.rho, "{} vs {oracle}", solved.rho);
    assert!((solved.alpha / alpha).ln().abs() < 0.05, "{} vs {alpha}", solved.alpha);
    assert!(solved.alpha > 1.0);
    // q = 1/2 strictly improves on l1.
    assert!(solved.rho > rho_s_fl(delta).unwrap());
}

#[test]
fn other_cells_match_alpha_scan() {
    for &(delta, q) in &[(0.1, 0.3), (0.3, 0.9), (0.8, 0.6)] {
        let solved = rho_s_fl_q(delta, q).unwrap();
        let (oracle, _) = brute(128, |a| plain(delta, q, a));
        assert!(oracle <= solved.rho * (1.0 + 1e-6), "({delta}, {q}): {oracle} > {}", solved.rho);
        assert!((solved.rho - oracle) <= 1e-4 * solved.rho, "({delta}, {q}): {} vs {oracle}", solved.rho);
    }
}

#[test]
fn l1_optimum_is_at_alpha_one() {
    for &delta in &[0.2, 0.5, 0.9] {
        let solved = rho_s_fl_q(delta, 1.0).unwrap();
        let (oracle, alpha) = brute(64, |a| plain(delta, 1.0, a));
        assert!(oracle <= solved.rho * (1.0 + 1e-6));
        assert!((solved.rho - oracle) <= 1e-6 * solved.rho, "{} vs {oracle} (alpha {alpha})", solved.rho);
    }
}

#[test]
fn capped_half_norm_matches_alpha_scan() {
    let (delta, q, cap) = (0.5, 0.5, 30.0);
    let solved = rho_s_fl_q_bounded(delta, q, StabilityFactor::C1, cap).unwrap();
    let (oracle, _) = brute(128, |a| capped(delta, q, a, StabilityFactor::C1, cap));
    assert!(oracle <= solved.rho * (1.0 + 1e-6), "{oracle} > {}", solved.rho);
    assert!((solved.rho - oracle) <= 1e-4 * solved.rho, "{} vs {oracle}", solved.rho);
    let f = stability_factors(PhasePoint::new(delta, solved.rho * (1.0 - 1e-9)).unwrap(), q, solved.alpha).unwrap();
    assert!(f.c1 <= cap * (1.0 + 1e-9));
}

#[test]
fn capped_d2_matches_alpha_scan() {
    let (delta, q, cap) = (0.3, 0.8, 200.0);
    let solved = rho_s_fl_q_bounded(delta, q, StabilityFactor::D2, cap).unwrap();
    let (oracle, _) = brute(128, |a| capped(delta, q, a, StabilityFactor::D2, cap));
    assert!(oracle <= solved.rho * (1.0 + 1e-6), "{oracle} > {}", solved.rho);
    assert!((solved.rho - oracle) <= 1e-4 * solved.rho, "{} vs {oracle}", solved.rho);
}
