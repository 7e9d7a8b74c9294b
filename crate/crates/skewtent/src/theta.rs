//! The auxiliary series `Theta_M`, its partial derivatives, and the implicit
//! slope of constant-entropy curves.
//!
//! For a kneading word with block exponents `m_1, m_2, ...` and running sums
//! `mbar_k = m_1 + ... + m_k`,
//!
//! ```text
//! Theta_M(alpha, beta) = 1 - beta
//!     + sum_{k>=1} (-1)^k ((1-alpha)/beta)^k (alpha/beta)^(mbar_k).
//! ```
//!
//! The series vanishes exactly on the constant-entropy curve of `M`, and
//! since the k-th term is bounded by `rho^k` with `rho = (1-alpha)/beta < 1`
//! in region U, both the series and its term-wise partial derivatives
//! converge at a geometric rate. Implicit differentiation of
//! `Theta_M(alpha, Psi(alpha)) = 0` gives the curve slope
//! `Psi'(alpha) = -d_alpha Theta / d_beta Theta`.
//!
//! Every returned value carries a certified bound on the discarded tail;
//! truncated block data yields a reported (possibly larger) achievable
//! bound rather than a silent loss of accuracy.

use thiserror::Error;

use crate::kneading::{BlockTail, RlBlocks};
use crate::map::in_region_u;

/// Default requested tail bound.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Hard cap on series terms; convergence degrades as `rho -> 1` near the
/// boundary of U and the cap converts nontermination into a reported
/// achievable bound.
pub const TERM_CAP: usize = 10_000;

/// A truncated series value with a certified tail bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaEval {
    pub value: f64,
    pub tail_bound: f64,
    pub terms_used: usize,
}

/// Term-wise partial derivatives of the series with a certified tail bound
/// covering both components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaGradient {
    pub d_alpha: f64,
    pub d_beta: f64,
    pub tail_bound: f64,
    pub terms_used: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum ThetaError {
    #[error("parameters (alpha = {alpha}, beta = {beta}) lie outside region U")]
    OutsideRegionU { alpha: f64, beta: f64 },
    #[error("tolerance must be positive, got {0}")]
    NonPositiveTolerance(f64),
    #[error("certified tail bound {achievable:e} cannot reach requested tolerance {requested:e}")]
    Truncation { achievable: f64, requested: f64 },
    #[error("beta-partial {d_beta:e} is indistinguishable from zero at tail bound {tail_bound:e}")]
    DegenerateGradient { d_beta: f64, tail_bound: f64 },
}

/// Neumaier-compensated accumulator; the series alternates and cancels
/// mildly near its zero set.
#[derive(Debug, Clone, Copy, Default)]
struct Compensated {
    sum: f64,
    c: f64,
}

impl Compensated {
    fn new(x: f64) -> Self {
        Self { sum: x, c: 0.0 }
    }

    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.c += (self.sum - t) + x;
        } else {
            self.c += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.c
    }
}

#[derive(Debug, Clone, Copy)]
struct SeriesRun {
    value: f64,
    d_alpha: f64,
    d_beta: f64,
    tail_value: f64,
    tail_grad: f64,
    terms: usize,
}

fn sigma_pow(sigma: f64, m: u64) -> f64 {
    if m <= i32::MAX as u64 {
        sigma.powi(m as i32)
    } else {
        sigma.powf(m as f64)
    }
}

/// Tail majorants after `k` summed terms, using `mbar_j >= mbar_k` for
/// `j > k`:
///
/// * value tail: `sigma^mbar_k * sum_{j>k} rho^j = spow * rho^(k+1)/(1-rho)`;
/// * gradient tails add a factor `j` (from the `k`-derivative) and
///   `mbar_j * sigma^mbar_j` (from the `mbar`-derivative), the latter bounded
///   by `sup_{x >= mbar_k} x sigma^x` which is `mbar_k sigma^mbar_k` past the
///   maximizer `x* = 1/ln(1/sigma)` and `x*/e` before it.
#[allow(clippy::too_many_arguments)]
fn tail_majorants(
    rho: f64,
    sigma: f64,
    alpha: f64,
    beta: f64,
    k: usize,
    mbar: u64,
    rpow: f64,
    spow: f64,
) -> (f64, f64) {
    let one_minus_rho = 1.0 - rho;
    let g0 = rpow * rho / one_minus_rho;
    let kp1 = (k + 1) as f64;
    let g1 = rpow * rho * (kp1 * one_minus_rho + rho) / (one_minus_rho * one_minus_rho);
    let tail_value = spow * g0;
    let x_star = -1.0 / sigma.ln();
    let c1 = if mbar as f64 >= x_star {
        mbar as f64 * spow
    } else {
        x_star / std::f64::consts::E
    };
    let tail_da = c1 * g0 / alpha + spow * g1 / (1.0 - alpha);
    let tail_db = (spow * g1 + c1 * g0) / beta;
    (tail_value, tail_da.max(tail_db))
}

/// Single ascending pass over the series, accumulating the value and both
/// partials. Stops once both tails are certified below `tol` (periodic
/// data), the data runs out (truncated or `L^inf` tails), or the term cap
/// is hit.
fn run_series(
    blocks: &RlBlocks,
    alpha: f64,
    beta: f64,
    tol: f64,
    need_grad: bool,
) -> Result<SeriesRun, ThetaError> {
    if !in_region_u(alpha, beta) {
        return Err(ThetaError::OutsideRegionU { alpha, beta });
    }
    if tol <= 0.0 || tol.is_nan() {
        return Err(ThetaError::NonPositiveTolerance(tol));
    }
    let rho = (1.0 - alpha) / beta;
    let sigma = alpha / beta;
    let mut value = Compensated::new(1.0 - beta);
    let mut d_alpha = Compensated::default();
    let mut d_beta = Compensated::new(-1.0);
    let mut rpow = 1.0_f64;
    let mut spow = 1.0_f64;
    let mut mbar = 0_u64;
    let mut sign = 1.0_f64;
    let mut k = 0_usize;
    let periodic = matches!(blocks.tail(), BlockTail::Periodic { .. });

    let (tail_value, tail_grad) = loop {
        if k == TERM_CAP {
            break tail_majorants(rho, sigma, alpha, beta, k, mbar, rpow, spow);
        }
        match blocks.exponent(k + 1) {
            None => match blocks.tail() {
                BlockTail::LInfinity => break (0.0, 0.0),
                _ => break tail_majorants(rho, sigma, alpha, beta, k, mbar, rpow, spow),
            },
            Some(mk) => {
                k += 1;
                mbar += mk;
                rpow *= rho;
                spow *= sigma_pow(sigma, mk);
                sign = -sign;
                let t = rpow * spow;
                value.add(sign * t);
                let kf = k as f64;
                let mf = mbar as f64;
                d_alpha.add(sign * t * (mf / alpha - kf / (1.0 - alpha)));
                d_beta.add(-sign * t * (kf + mf) / beta);
                if periodic {
                    let (tv, tg) = tail_majorants(rho, sigma, alpha, beta, k, mbar, rpow, spow);
                    if tv <= tol && (!need_grad || tg <= tol) {
                        break (tv, tg);
                    }
                }
            }
        }
    };

    Ok(SeriesRun {
        value: value.value(),
        d_alpha: d_alpha.value(),
        d_beta: d_beta.value(),
        tail_value,
        tail_grad,
        terms: k,
    })
}

/// Partial sum of the series with `tail_bound <= tol`.
///
/// Errors with the achievable bound when the available blocks (or the term
/// cap) cannot certify the requested tolerance.
pub fn theta_eval(
    blocks: &RlBlocks,
    alpha: f64,
    beta: f64,
    tol: f64,
) -> Result<ThetaEval, ThetaError> {
    let run = run_series(blocks, alpha, beta, tol, false)?;
    if run.tail_value > tol {
        return Err(ThetaError::Truncation {
            achievable: run.tail_value,
            requested: tol,
        });
    }
    Ok(ThetaEval {
        value: run.value,
        tail_bound: run.tail_value,
        terms_used: run.terms,
    })
}

/// Like [`theta_eval`] but never fails on tolerance: sums everything the
/// block data supports and reports the achieved bound. Used for residual
/// certificates and finite differences.
pub fn theta_eval_best(blocks: &RlBlocks, alpha: f64, beta: f64) -> Result<ThetaEval, ThetaError> {
    let run = run_series(blocks, alpha, beta, DEFAULT_TOL, false)?;
    Ok(ThetaEval {
        value: run.value,
        tail_bound: run.tail_value,
        terms_used: run.terms,
    })
}

/// Term-wise partial derivatives `d_alpha Theta` and `d_beta Theta` with a
/// shared certified tail bound.
pub fn theta_partials(
    blocks: &RlBlocks,
    alpha: f64,
    beta: f64,
    tol: f64,
) -> Result<ThetaGradient, ThetaError> {
    let run = run_series(blocks, alpha, beta, tol, true)?;
    if run.tail_grad > tol {
        return Err(ThetaError::Truncation {
            achievable: run.tail_grad,
            requested: tol,
        });
    }
    Ok(ThetaGradient {
        d_alpha: run.d_alpha,
        d_beta: run.d_beta,
        tail_bound: run.tail_grad,
        terms_used: run.terms,
    })
}

/// Best-effort gradient: sums everything available and reports the achieved
/// bound instead of gating on a tolerance.
pub fn theta_partials_best(
    blocks: &RlBlocks,
    alpha: f64,
    beta: f64,
) -> Result<ThetaGradient, ThetaError> {
    let run = run_series(blocks, alpha, beta, DEFAULT_TOL, true)?;
    Ok(ThetaGradient {
        d_alpha: run.d_alpha,
        d_beta: run.d_beta,
        tail_bound: run.tail_grad,
        terms_used: run.terms,
    })
}

/// Slope of the constant-entropy curve through `(alpha, beta)` by implicit
/// differentiation: `-d_alpha / d_beta`.
///
/// Meaningful when `(alpha, beta)` lies (approximately) on the zero set of
/// the series for these blocks. Errors when the denominator cannot be
/// distinguished from zero at the certified precision.
pub fn implicit_slope(
    blocks: &RlBlocks,
    alpha: f64,
    beta: f64,
    tol: f64,
) -> Result<f64, ThetaError> {
    let run = run_series(blocks, alpha, beta, tol, true)?;
    if run.d_beta.abs() <= 10.0 * run.tail_grad {
        return Err(ThetaError::DegenerateGradient {
            d_beta: run.d_beta,
            tail_bound: run.tail_grad,
        });
    }
    Ok(-run.d_alpha / run.d_beta)
}
