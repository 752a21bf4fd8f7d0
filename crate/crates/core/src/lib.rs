//! Asymmetric restricted isometry bounds for Gaussian matrices and the
//! strong-equivalence phase transitions they imply for l1 and lq decoding.
//!
//! * [`scalar_kernels`]: entropy, rate functions, log-gamma, bisection.
//! * [`rip_bounds`]: `lambda_min`, `lambda_max`, the bounds `L` and `U`, and
//!   Edelman's finite-`n` density bounds.
//! * [`phase_transitions`]: `rho_S` curves (FL, RV, Candes, lq) and the lq
//!   stability factors.
//! * [`empirical_lab`]: Gaussian sampling, Gram eigenvalues, greedy searches
//!   for empirical RIP lower bounds.
//! * [`l1_recovery`]: a basis-pursuit decoder and recovery trials.
//! * [`cli`]: the `ripbounds` command line.

pub mod cli;
pub mod empirical_lab;
pub mod error;
pub mod l1_recovery;
pub mod phase_transitions;
pub mod rip_bounds;
pub mod rng;
pub mod scalar_kernels;

pub use error::{Error, Result};
pub use phase_transitions::{CurveMethod, StabilityFactor, TransitionCurve};
pub use rip_bounds::{PhasePoint, ProblemSize, RipBoundPair};
