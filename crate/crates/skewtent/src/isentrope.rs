//! Solving `beta = Psi_M(alpha)` for given kneading data and tracing
//! constant-entropy curves across the parameter region.
//!
//! Root finding is bisection on the parity-lexicographic kneading order in
//! `beta`, not on the sign of the Theta series: kneading grows with `beta`
//! at fixed `alpha` (entropy monotonicity), which gives a reliable bracket,
//! while the Theta value serves as an a-posteriori residual certificate on
//! every accepted point.

use std::cmp::Ordering;

use thiserror::Error;

use crate::kneading::{
    kneading_prefix, parity_lex_compare, KneadingError, RlBlocks, DEFAULT_C_TOL,
};
use crate::map::SkewTentMap;
use crate::theta::{self, ThetaError};

/// Default bisection width in `beta`.
pub const DEFAULT_BETA_TOL: f64 = 1e-10;

/// Default bracket width for the domain-endpoint search in `alpha`.
pub const DEFAULT_ENDPOINT_TOL: f64 = 1e-4;

/// Ambiguous prefix comparisons trigger automatic doubling up to this.
const MAX_PREFIX_LEN: usize = 1600;

/// Offset keeping bisection brackets strictly inside region U.
const BRACKET_EPS: f64 = 1e-9;

/// Residual certificates below this are always accepted.
const RESIDUAL_FLOOR: f64 = 1e-6;

/// The endpoint search never leaves `[ALPHA_CLAMP, 1 - ALPHA_CLAMP]`.
const ALPHA_CLAMP: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IsentropeError {
    #[error("no beta with the target kneading at alpha = {alpha} (residual {residual:e})")]
    NotBracketed { alpha: f64, residual: f64 },
    #[error("kneading comparison is ambiguous at alpha = {alpha} even at prefix length {prefix_len}")]
    Ambiguous { alpha: f64, prefix_len: usize },
    #[error("no grid point produced a solution")]
    EmptyTrace,
    #[error("invalid trace range or step count")]
    InvalidRange,
    #[error(transparent)]
    Kneading(#[from] KneadingError),
    #[error(transparent)]
    Theta(#[from] ThetaError),
}

/// One solved point of a constant-entropy curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsentropePoint {
    pub alpha: f64,
    pub beta: f64,
    /// Theta value of the reference blocks at the solved point.
    pub theta_residual: f64,
    /// Curve slope by implicit differentiation at the solved point.
    pub slope: f64,
    /// Width of the final bisection bracket (or kneading plateau).
    pub bracket_width: f64,
}

/// A polyline approximation of one curve.
#[derive(Debug, Clone, PartialEq)]
pub struct IsentropeTrace {
    pub reference: SkewTentMap,
    pub points: Vec<IsentropePoint>,
    /// Grid alphas where the target kneading was out of range.
    pub skipped: Vec<f64>,
    pub alpha_lo: f64,
    pub alpha_hi: f64,
}

impl IsentropeTrace {
    /// CSV rows `alpha,beta,theta_residual,slope` with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("alpha,beta,theta_residual,slope\n");
        for p in &self.points {
            out.push_str(&format!(
                "{},{},{},{}\n",
                crate::cli::format_float(p.alpha),
                crate::cli::format_float(p.beta),
                crate::cli::format_float(p.theta_residual),
                crate::cli::format_float(p.slope)
            ));
        }
        out
    }

    /// JSON array of point objects with stable key order.
    pub fn to_json(&self) -> String {
        let mut out = String::from("[");
        for (i, p) in self.points.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&format!(
                "{{\"alpha\":{},\"beta\":{},\"theta_residual\":{},\"slope\":{}}}",
                crate::cli::format_float(p.alpha),
                crate::cli::format_float(p.beta),
                crate::cli::format_float(p.theta_residual),
                crate::cli::format_float(p.slope)
            ));
        }
        out.push(']');
        out
    }
}

/// Interval status reported by [`domain_endpoints`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EndpointStatus {
    /// The curve was observed climbing to the top edge `beta = 1`.
    ExactEdge,
    /// Generic bracket between the last solvable and first unsolvable alpha.
    Bracketed,
}

/// Approximate domain `(alpha_1, alpha_2)` of a curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainEndpoints {
    pub alpha_1: f64,
    pub alpha_2: f64,
    pub status: EndpointStatus,
}

/// Smallest beta admissible at this alpha: `max(0.5, alpha, 1 - alpha)`.
fn beta_floor(alpha: f64) -> f64 {
    0.5_f64.max(alpha).max(1.0 - alpha)
}

enum BisectFail {
    TargetBelow,
    TargetAbove,
    AllEqual,
}

/// Bisection on a three-way comparison that is nondecreasing in beta.
/// Returns the solved beta and the final bracket (or plateau) width.
fn bisect_kneading(
    cmp: &dyn Fn(f64) -> Ordering,
    lo0: f64,
    hi0: f64,
    tol: f64,
) -> Result<(f64, f64), BisectFail> {
    let c_lo = cmp(lo0);
    if c_lo == Ordering::Greater {
        return Err(BisectFail::TargetBelow);
    }
    let c_hi = cmp(hi0);
    if c_hi == Ordering::Less {
        return Err(BisectFail::TargetAbove);
    }
    match (c_lo, c_hi) {
        (Ordering::Equal, Ordering::Equal) => Err(BisectFail::AllEqual),
        (Ordering::Equal, _) => {
            let right = refine_edge(cmp, lo0, hi0, tol, true);
            Ok(((lo0 + right) / 2.0, right - lo0))
        }
        (_, Ordering::Equal) => {
            let left = refine_edge(cmp, lo0, hi0, tol, false);
            Ok(((left + hi0) / 2.0, hi0 - left))
        }
        _ => {
            let (mut lo, mut hi) = (lo0, hi0);
            while hi - lo > tol {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                match cmp(mid) {
                    Ordering::Less => lo = mid,
                    Ordering::Greater => hi = mid,
                    Ordering::Equal => {
                        let left = refine_edge(cmp, lo, mid, tol, false);
                        let right = refine_edge(cmp, mid, hi, tol, true);
                        return Ok(((left + right) / 2.0, right - left));
                    }
                }
            }
            Ok(((lo + hi) / 2.0, hi - lo))
        }
    }
}

/// Shrink toward the edge of an equality plateau. With `upper = true`,
/// `a` compares equal and the returned value is the innermost equal point
/// below the first greater one; symmetrically for `upper = false`.
fn refine_edge(cmp: &dyn Fn(f64) -> Ordering, a: f64, b: f64, tol: f64, upper: bool) -> f64 {
    let (mut eq, mut other) = if upper { (a, b) } else { (b, a) };
    while (eq - other).abs() > 0.5 * tol {
        let mid = 0.5 * (eq + other);
        if mid == eq || mid == other {
            break;
        }
        if cmp(mid) == Ordering::Equal {
            eq = mid;
        } else {
            other = mid;
        }
    }
    eq
}

fn solve_with_bracket(
    reference: &SkewTentMap,
    alpha: f64,
    prefix_len: usize,
    beta_tol: f64,
    bracket: Option<(f64, f64)>,
) -> Result<IsentropePoint, IsentropeError> {
    let floor = beta_floor(alpha);
    if !(alpha > 0.0 && alpha < 1.0) || floor + BRACKET_EPS >= 1.0 {
        return Err(IsentropeError::NotBracketed {
            alpha,
            residual: f64::INFINITY,
        });
    }
    let target = kneading_prefix(reference, prefix_len, DEFAULT_C_TOL);
    let blocks = RlBlocks::from_sequence(&target, usize::MAX)?;

    let (mut lo0, mut hi0) = bracket.unwrap_or((floor + BRACKET_EPS, 1.0));
    lo0 = lo0.max(floor + BRACKET_EPS);
    hi0 = hi0.min(1.0);
    if lo0 >= hi0 {
        return Err(IsentropeError::NotBracketed {
            alpha,
            residual: f64::INFINITY,
        });
    }
    let cmp = |beta: f64| -> Ordering {
        let m = SkewTentMap::new(alpha, beta).expect("bracket keeps parameters inside U");
        parity_lex_compare(&kneading_prefix(&m, prefix_len, DEFAULT_C_TOL), &target)
    };
    let (beta, width) = match bisect_kneading(&cmp, lo0, hi0, beta_tol) {
        Ok(found) => found,
        Err(BisectFail::AllEqual) => {
            // The whole bracket shares the target prefix. When the bracket
            // reaches the top edge and the series vanishes at beta = 1 the
            // curve is the top edge itself (Psi = 1); otherwise the prefix
            // is too short to separate candidates.
            let top = theta::theta_eval_best(&blocks, alpha, 1.0)?;
            if hi0 == 1.0 && top.value.abs() <= RESIDUAL_FLOOR.max(100.0 * top.tail_bound) {
                (1.0, hi0 - lo0)
            } else {
                return Err(IsentropeError::Ambiguous { alpha, prefix_len });
            }
        }
        Err(_) => {
            return Err(IsentropeError::NotBracketed {
                alpha,
                residual: f64::NAN,
            })
        }
    };

    // a-posteriori certificate: the reference series must vanish here
    let eval = theta::theta_eval_best(&blocks, alpha, beta)?;
    let gate = RESIDUAL_FLOOR.max(100.0 * eval.tail_bound);
    if eval.value.abs() > gate {
        return Err(IsentropeError::NotBracketed {
            alpha,
            residual: eval.value,
        });
    }
    let slope = theta::implicit_slope(&blocks, alpha, beta, theta::DEFAULT_TOL)?;
    Ok(IsentropePoint {
        alpha,
        beta,
        theta_residual: eval.value,
        slope,
        bracket_width: width,
    })
}

/// Solve `beta = Psi_M(alpha)` where `M` is the kneading prefix of the
/// reference map, by bisection on the kneading order over
/// `beta in (max(0.5, alpha, 1 - alpha), 1]`.
///
/// Ambiguous comparisons (the whole bracket shares the target prefix)
/// retry with doubled prefix length up to 1600 symbols.
pub fn solve_beta(
    reference: &SkewTentMap,
    alpha: f64,
    prefix_len: usize,
    beta_tol: f64,
) -> Result<IsentropePoint, IsentropeError> {
    let mut plen = prefix_len.max(1);
    loop {
        match solve_with_bracket(reference, alpha, plen, beta_tol, None) {
            Err(IsentropeError::Ambiguous { .. }) if plen < MAX_PREFIX_LEN => {
                plen = (plen * 2).min(MAX_PREFIX_LEN);
            }
            other => return other,
        }
    }
}

/// Solve across an alpha grid, warm-starting each bracket from the previous
/// point via the one-sided Lipschitz bounds on the curve. Grid points whose
/// target kneading is out of range are recorded in `skipped` rather than
/// aborting the trace.
pub fn trace_isentrope(
    reference: &SkewTentMap,
    alpha_lo: f64,
    alpha_hi: f64,
    steps: usize,
    prefix_len: usize,
    beta_tol: f64,
) -> Result<IsentropeTrace, IsentropeError> {
    if alpha_lo.partial_cmp(&alpha_hi) != Some(Ordering::Less) || steps < 2 {
        return Err(IsentropeError::InvalidRange);
    }
    let mut points: Vec<IsentropePoint> = Vec::with_capacity(steps);
    let mut skipped = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for i in 0..steps {
        let alpha = alpha_lo + (alpha_hi - alpha_lo) * i as f64 / (steps - 1) as f64;
        let warm = prev.map(|(pa, pb)| {
            let da = (alpha - pa).abs();
            let up = pb / pa;
            let down = pb / (1.0 - pa);
            (
                pb - 1.5 * da * down - 1e-6,
                pb + 1.5 * da * up + 1e-6,
            )
        });
        let result = match warm {
            Some(bracket) => {
                match solve_with_bracket(reference, alpha, prefix_len, beta_tol, Some(bracket)) {
                    Err(IsentropeError::NotBracketed { .. })
                    | Err(IsentropeError::Ambiguous { .. }) => {
                        solve_beta(reference, alpha, prefix_len, beta_tol)
                    }
                    other => other,
                }
            }
            None => solve_beta(reference, alpha, prefix_len, beta_tol),
        };
        match result {
            Ok(p) => {
                prev = Some((p.alpha, p.beta));
                points.push(p);
            }
            Err(IsentropeError::NotBracketed { .. }) => skipped.push(alpha),
            Err(e) => return Err(e),
        }
    }
    if points.is_empty() {
        return Err(IsentropeError::EmptyTrace);
    }
    Ok(IsentropeTrace {
        reference: *reference,
        points,
        skipped,
        alpha_lo,
        alpha_hi,
    })
}

/// Expand outward from the reference alpha by geometric steps, then bisect
/// the solvability boundary to width `tol`. The search is clamped to
/// `[1e-3, 1 - 1e-3]`; a curve still solvable at the clamp reports the
/// clamp itself.
pub fn domain_endpoints(
    reference: &SkewTentMap,
    prefix_len: usize,
    tol: f64,
) -> Result<DomainEndpoints, IsentropeError> {
    let tol = tol.max(1e-12);
    let a0 = reference.alpha();
    let solve = |alpha: f64| -> Option<IsentropePoint> {
        if !(ALPHA_CLAMP..=1.0 - ALPHA_CLAMP).contains(&alpha) {
            return None;
        }
        solve_beta(reference, alpha, prefix_len, DEFAULT_BETA_TOL).ok()
    };
    if solve(a0).is_none() {
        return Err(IsentropeError::NotBracketed {
            alpha: a0,
            residual: f64::NAN,
        });
    }
    let alpha_2 = expand_edge(a0, 1.0, &solve, tol);
    let alpha_1 = expand_edge(a0, -1.0, &solve, tol);
    let status = match solve(alpha_1) {
        Some(p) if p.beta > 0.95 => EndpointStatus::ExactEdge,
        _ => EndpointStatus::Bracketed,
    };
    Ok(DomainEndpoints {
        alpha_1,
        alpha_2,
        status,
    })
}

fn expand_edge(
    a0: f64,
    dir: f64,
    solve: &dyn Fn(f64) -> Option<IsentropePoint>,
    tol: f64,
) -> f64 {
    let clamp = if dir > 0.0 { 1.0 - ALPHA_CLAMP } else { ALPHA_CLAMP };
    let mut good = a0;
    let mut step = 0.01;
    let mut bad = loop {
        let next = a0 + dir * step;
        let past_clamp = if dir > 0.0 { next >= clamp } else { next <= clamp };
        if past_clamp {
            if solve(clamp).is_some() {
                return clamp;
            }
            break clamp;
        }
        if solve(next).is_some() {
            good = next;
            step *= 2.0;
        } else {
            break next;
        }
    };
    while (bad - good).abs() > tol {
        let mid = 0.5 * (good + bad);
        if mid == good || mid == bad {
            break;
        }
        if solve(mid).is_some() {
            good = mid;
        } else {
            bad = mid;
        }
    }
    good
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kneading::DEFAULT_PREFIX_LEN;

    fn golden() -> SkewTentMap {
        SkewTentMap::new(0.5, (1.0 + 5.0_f64.sqrt()) / 4.0).unwrap()
    }

    #[test]
    fn self_solve_recovers_the_reference_beta() {
        let m = golden();
        let p = solve_beta(&m, 0.5, DEFAULT_PREFIX_LEN, 1e-10).unwrap();
        assert!((p.beta - m.beta()).abs() <= 1e-9, "beta = {}", p.beta);
        assert!(p.theta_residual.abs() < 1e-8);
    }

    #[test]
    fn top_edge_curve_solves_to_one() {
        let reference = SkewTentMap::new(0.5, 1.0).unwrap();
        let p = solve_beta(&reference, 0.3, DEFAULT_PREFIX_LEN, 1e-10).unwrap();
        assert!((p.beta - 1.0).abs() <= 1e-9, "beta = {}", p.beta);
        assert!(p.slope.abs() < 1e-9);
    }

    #[test]
    fn solved_points_certify_a_small_theta_residual() {
        let reference = SkewTentMap::new(0.3, 0.8).unwrap();
        let p = solve_beta(&reference, 0.31, DEFAULT_PREFIX_LEN, 1e-10).unwrap();
        assert!(p.theta_residual.abs() < 1e-6, "residual = {}", p.theta_residual);
        assert!(p.beta > beta_floor(0.31) && p.beta <= 1.0);
    }

    #[test]
    fn slope_lies_within_the_lipschitz_bounds() {
        let reference = SkewTentMap::new(0.3, 0.8).unwrap();
        for alpha in [0.28, 0.3, 0.33] {
            let p = solve_beta(&reference, alpha, DEFAULT_PREFIX_LEN, 1e-10).unwrap();
            assert!(p.slope <= p.beta / p.alpha + 1e-9);
            assert!(p.slope >= -p.beta / (1.0 - p.alpha) - 1e-9);
        }
    }

    #[test]
    fn trace_of_the_top_edge_is_flat() {
        let reference = SkewTentMap::new(0.5, 1.0).unwrap();
        let trace = trace_isentrope(&reference, 0.2, 0.8, 7, DEFAULT_PREFIX_LEN, 1e-10).unwrap();
        assert_eq!(trace.points.len(), 7);
        for p in &trace.points {
            assert!((p.beta - 1.0).abs() <= 1e-9);
        }
    }

    #[test]
    fn golden_trace_stays_on_the_zero_set() {
        let trace = trace_isentrope(&golden(), 0.45, 0.55, 11, DEFAULT_PREFIX_LEN, 1e-10).unwrap();
        assert_eq!(trace.points.len(), 11);
        for p in &trace.points {
            assert!(
                p.theta_residual.abs() < 1e-6,
                "residual {} at alpha {}",
                p.theta_residual,
                p.alpha
            );
        }
        // strictly increasing alphas
        for w in trace.points.windows(2) {
            assert!(w[1].alpha > w[0].alpha);
        }
    }

    #[test]
    fn secant_slopes_obey_lipschitz_bounds() {
        let trace = trace_isentrope(&golden(), 0.42, 0.58, 17, DEFAULT_PREFIX_LEN, 1e-10).unwrap();
        for w in trace.points.windows(2) {
            let secant = (w[1].beta - w[0].beta) / (w[1].alpha - w[0].alpha);
            assert!(secant <= w[0].beta / w[0].alpha + 1e-6);
            assert!(secant >= -w[1].beta / (1.0 - w[1].alpha) - 1e-6);
        }
    }

    #[test]
    fn traces_of_distinct_kneading_do_not_cross() {
        let low = SkewTentMap::new(0.3, 0.8).unwrap();
        let high = SkewTentMap::new(0.3, 0.85).unwrap();
        let ta = trace_isentrope(&low, 0.28, 0.33, 6, DEFAULT_PREFIX_LEN, 1e-10).unwrap();
        let tb = trace_isentrope(&high, 0.28, 0.33, 6, DEFAULT_PREFIX_LEN, 1e-10).unwrap();
        assert_eq!(ta.points.len(), 6);
        assert_eq!(tb.points.len(), 6);
        for (pa, pb) in ta.points.iter().zip(&tb.points) {
            assert_eq!(pa.alpha, pb.alpha);
            assert!(pb.beta > pa.beta, "crossing at alpha {}", pa.alpha);
        }
    }

    #[test]
    fn implicit_slope_matches_centered_secants() {
        let trace = trace_isentrope(&golden(), 0.46, 0.54, 17, DEFAULT_PREFIX_LEN, 1e-10).unwrap();
        let grid_step = (0.54 - 0.46) / 16.0;
        let tol = 1e-2_f64.max(5.0 * grid_step);
        for w in trace.points.windows(3) {
            let secant = (w[2].beta - w[0].beta) / (w[2].alpha - w[0].alpha);
            assert!(
                (w[1].slope - secant).abs() <= tol,
                "slope {} vs secant {secant}",
                w[1].slope
            );
        }
    }

    #[test]
    fn out_of_range_alpha_is_not_bracketed() {
        // the golden curve exists only for alpha < 2/3
        let err = solve_beta(&golden(), 0.7, DEFAULT_PREFIX_LEN, 1e-10).unwrap_err();
        assert!(matches!(err, IsentropeError::NotBracketed { .. }), "{err:?}");
    }

    #[test]
    fn trace_skips_unsolvable_grid_points() {
        let trace = trace_isentrope(&golden(), 0.6, 0.72, 7, DEFAULT_PREFIX_LEN, 1e-10).unwrap();
        assert!(!trace.points.is_empty());
        assert!(!trace.skipped.is_empty());
        for &a in &trace.skipped {
            assert!(a > 2.0 / 3.0 - 0.01, "unexpected skip at alpha {a}");
        }
    }

    #[test]
    fn invalid_ranges_are_rejected() {
        assert!(matches!(
            trace_isentrope(&golden(), 0.5, 0.4, 5, 200, 1e-10),
            Err(IsentropeError::InvalidRange)
        ));
        assert!(matches!(
            trace_isentrope(&golden(), 0.4, 0.5, 1, 200, 1e-10),
            Err(IsentropeError::InvalidRange)
        ));
    }

    #[test]
    fn top_edge_domain_spans_the_whole_interval() {
        let reference = SkewTentMap::new(0.5, 1.0).unwrap();
        let d = domain_endpoints(&reference, DEFAULT_PREFIX_LEN, 1e-3).unwrap();
        assert!(d.alpha_1 <= 0.02, "alpha_1 = {}", d.alpha_1);
        assert!(d.alpha_2 >= 0.98, "alpha_2 = {}", d.alpha_2);
        assert_eq!(d.status, EndpointStatus::ExactEdge);
    }

    #[test]
    fn golden_domain_brackets_are_solvable_at_the_inner_ends() {
        let d = domain_endpoints(&golden(), DEFAULT_PREFIX_LEN, 1e-4).unwrap();
        assert!(solve_beta(&golden(), d.alpha_1, DEFAULT_PREFIX_LEN, 1e-10).is_ok());
        assert!(solve_beta(&golden(), d.alpha_2, DEFAULT_PREFIX_LEN, 1e-10).is_ok());
        // the golden curve leaves U through beta = alpha at alpha = 2/3
        assert!((d.alpha_2 - 2.0 / 3.0).abs() < 5e-3, "alpha_2 = {}", d.alpha_2);
        // and climbs to the top edge on the left
        assert_eq!(d.status, EndpointStatus::ExactEdge);
    }

    #[test]
    fn skew_domain_classification_is_recorded() {
        let reference = SkewTentMap::new(0.3, 0.8).unwrap();
        let d = domain_endpoints(&reference, DEFAULT_PREFIX_LEN, 1e-3).unwrap();
        assert!(d.alpha_1 < 0.3 && d.alpha_2 > 0.3);
        // whichever branch the curve takes, the report is one of the two
        assert!(matches!(
            d.status,
            EndpointStatus::ExactEdge | EndpointStatus::Bracketed
        ));
    }

    #[test]
    fn csv_and_json_exports_are_well_formed() {
        let trace = trace_isentrope(&golden(), 0.48, 0.52, 5, DEFAULT_PREFIX_LEN, 1e-10).unwrap();
        let csv = trace.to_csv();
        assert!(csv.starts_with("alpha,beta,theta_residual,slope\n"));
        assert_eq!(csv.lines().count(), 6);
        let json = trace.to_json();
        assert!(json.starts_with("[{\"alpha\":"));
        assert!(json.ends_with("}]"));
    }
}
