//! The skew tent map, its parameter region, orbit iteration, branch slopes,
//! and the dynamical core.

use thiserror::Error;

/// Errors from map construction and evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum MapError {
    #[error("parameters (alpha = {alpha}, beta = {beta}) lie outside region U")]
    OutsideRegionU { alpha: f64, beta: f64 },
    #[error("point {x} lies outside the unit interval")]
    OutsideDomain { x: f64 },
}

/// True iff `0.5 < beta <= 1` and `1 - beta < alpha < beta`, the region of
/// nontrivial dynamics. Both inequalities on `alpha` are strict; `beta = 1`
/// is allowed, `beta = 0.5` is not.
pub fn in_region_u(alpha: f64, beta: f64) -> bool {
    beta > 0.5 && beta <= 1.0 && alpha > 1.0 - beta && alpha < beta
}

/// A skew tent map with peak `(alpha, beta)`:
///
/// ```text
/// T(x) = beta * x / alpha              for 0 <= x <= alpha,
/// T(x) = beta * (1 - x) / (1 - alpha)  for alpha < x <= 1.
/// ```
///
/// Construction validates membership in region U, so both branch slopes
/// exceed 1 in absolute value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkewTentMap {
    alpha: f64,
    beta: f64,
}

/// Magnitudes of the two branch slopes, `lambda = beta/alpha` (rising) and
/// `mu = beta/(1 - alpha)` (falling).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchSlopes {
    pub lambda: f64,
    pub mu: f64,
}

/// A finite stretch of an orbit, recorded after `burn_in` discarded iterates.
///
/// `points[0] = T^(burn_in + 1)(start)` and `points[i + 1] = T(points[i])`.
#[derive(Debug, Clone, PartialEq)]
pub struct Orbit {
    pub start: f64,
    pub points: Vec<f64>,
    pub burn_in: usize,
}

impl SkewTentMap {
    pub fn new(alpha: f64, beta: f64) -> Result<Self, MapError> {
        if in_region_u(alpha, beta) {
            Ok(Self { alpha, beta })
        } else {
            Err(MapError::OutsideRegionU { alpha, beta })
        }
    }

    #[inline]
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    #[inline]
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Apply the map once. `x` is assumed to lie in `[0, 1]`; the point `alpha`
    /// itself belongs to the rising branch, so `eval(alpha) == beta` exactly.
    ///
    /// Written as `beta * (x / alpha)` rather than `(beta / alpha) * x` so the
    /// peak and the endpoints evaluate without rounding.
    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        debug_assert!((0.0..=1.0).contains(&x));
        if x <= self.alpha {
            self.beta * (x / self.alpha)
        } else {
            self.beta * ((1.0 - x) / (1.0 - self.alpha))
        }
    }

    /// Like [`eval`](Self::eval) but rejects points outside `[0, 1]`.
    pub fn eval_checked(&self, x: f64) -> Result<f64, MapError> {
        if !(0.0..=1.0).contains(&x) {
            return Err(MapError::OutsideDomain { x });
        }
        Ok(self.eval(x))
    }

    /// Record `n` iterates of `x0` after discarding the first `burn_in`.
    pub fn orbit(&self, x0: f64, n: usize, burn_in: usize) -> Result<Orbit, MapError> {
        if !(0.0..=1.0).contains(&x0) {
            return Err(MapError::OutsideDomain { x: x0 });
        }
        let mut x = x0;
        for _ in 0..burn_in {
            x = self.eval(x);
        }
        let mut points = Vec::with_capacity(n);
        for _ in 0..n {
            x = self.eval(x);
            points.push(x);
        }
        Ok(Orbit {
            start: x0,
            points,
            burn_in,
        })
    }

    pub fn branch_slopes(&self) -> BranchSlopes {
        BranchSlopes {
            lambda: self.beta / self.alpha,
            mu: self.beta / (1.0 - self.alpha),
        }
    }

    /// The invariant interval `[T(beta), beta]`. Every orbit started in
    /// `(0, 1)` eventually enters it and never leaves.
    pub fn dynamical_core(&self) -> (f64, f64) {
        (self.eval(self.beta), self.beta)
    }
}
