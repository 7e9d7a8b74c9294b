//! Numerical toolkit for skew tent maps.
//!
//! A skew tent map rises linearly from `(0, 0)` to a peak at `(alpha, beta)`
//! and falls linearly back to `(1, 0)`. Over the parameter region
//! `0.5 < beta <= 1`, `1 - beta < alpha < beta` these maps are expanding and
//! carry a unique absolutely continuous invariant measure. This crate
//! computes symbolic itineraries of the turning point ([`kneading`]), the
//! auxiliary series `Theta` whose zero set carries the constant-entropy
//! curves ([`theta`]), traces those curves ([`isentrope`]), and obtains
//! Lyapunov exponents by three independent routes:
//!
//! * orbit averaging of the time spent left of the peak ([`birkhoff`]),
//! * implicit differentiation of the constant-entropy curve ([`theta`]),
//! * exact transfer-matrix solves when the turning point is periodic
//!   ([`markov`]).
//!
//! The [`raster`] module draws the parameter plane colored by kneading
//! prefix, with optional tangent-line overlays, and [`cli`] backs the
//! `skewtent` binary. See the `examples/` directory for one runnable
//! program per capability.

pub mod birkhoff;
pub mod cli;
pub mod isentrope;
pub mod kneading;
pub mod map;
pub mod markov;
pub mod raster;
pub mod theta;

pub use birkhoff::{
    estimate_gamma, gamma_from_slope, lyapunov_from_gamma, slope_from_gamma, GammaEstimate,
    Method, SplitMix64, TangentEstimate,
};
pub use isentrope::{
    domain_endpoints, solve_beta, trace_isentrope, DomainEndpoints, EndpointStatus,
    IsentropeError, IsentropePoint, IsentropeTrace,
};
pub use kneading::{
    kneading_prefix, parity_lex_compare, BlockTail, KneadingError, KneadingSequence, RlBlocks,
    SequenceKind, Symbol,
};
pub use map::{in_region_u, BranchSlopes, MapError, Orbit, SkewTentMap};
pub use markov::{
    detect_markov, gamma_exact, invariant_density, lyapunov_exact, markov_partition,
    transfer_matrix, MarkovError, MarkovPartition, MarkovSolution, PiecewiseDensity,
    TransferMatrix,
};
pub use theta::{implicit_slope, theta_eval, theta_partials, ThetaError, ThetaEval, ThetaGradient};
