//! Markov partitions from periodic turning points, the transfer operator on
//! piecewise-constant densities, and exact invariant measures.
//!
//! When `T^n(beta) = alpha` the points `{0, alpha, beta, T(beta), ...,
//! T^(n-1)(beta), 1}` cut `[0, 1]` into cells each of which maps onto an
//! exact union of cells. The transfer operator
//! `(Pf)(x) = sum over preimages z of f(z)/|T'(z)|` then acts on
//! piecewise-constant densities as a finite matrix whose fixed point is the
//! density of the unique absolutely continuous invariant measure. From it,
//! `gamma = mu([0, alpha])` and the Lyapunov exponent follow exactly.

use thiserror::Error;

use crate::birkhoff::{tangent_from_gamma, Method, TangentEstimate};
use crate::map::SkewTentMap;

/// Default orbit-length budget when searching for a periodic turning point.
pub const DEFAULT_MAX_ITER: usize = 100;

/// Default periodicity tolerance: binary64 orbit drift over <= 100 iterates
/// of slopes <= 2 stays well below this.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Partition points closer than this are merged.
const DEDUP_TOL: f64 = 1e-9;

/// Tolerance for matching cell-image endpoints against partition points
/// when verifying the Markov property.
const CELL_IMAGE_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MarkovError {
    #[error("no period <= {max_iter} found at tolerance {tol:e}")]
    NoPeriod { max_iter: usize, tol: f64 },
    #[error("cell {cell} image endpoint {endpoint} is not a partition point (nearest {nearest})")]
    MarkovViolation {
        cell: usize,
        endpoint: f64,
        nearest: f64,
    },
    #[error("invariant density is not unique at tolerance 1e-9 (nullspace dimension > 1)")]
    NonUniqueDensity,
    #[error("solved density has negative value {value} on cell {cell}")]
    NegativeDensity { cell: usize, value: f64 },
    #[error("top-edge partition requires beta = 1, got {beta}")]
    NotTopEdge { beta: f64 },
}

/// A verified Markov partition of `[0, 1]` for one map.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovPartition {
    points: Vec<f64>,
    /// Minimal `n` with `T^n(beta) = alpha`, or `None` for the top-edge case
    /// `beta = 1`, where the turning-point orbit is absorbed by the fixed
    /// point 0 instead of returning to `alpha`.
    period: Option<usize>,
}

impl MarkovPartition {
    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn period(&self) -> Option<usize> {
        self.period
    }

    pub fn cell_count(&self) -> usize {
        self.points.len() - 1
    }

    pub fn cell(&self, i: usize) -> (f64, f64) {
        (self.points[i], self.points[i + 1])
    }

    pub fn cell_length(&self, i: usize) -> f64 {
        self.points[i + 1] - self.points[i]
    }
}

/// The transfer operator restricted to densities constant on the cells of a
/// Markov partition. `entry(i, j)` is the reciprocal branch slope of cell
/// `j` when its image covers cell `i`, zero otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferMatrix {
    size: usize,
    entries: Vec<f64>,
    cell_lengths: Vec<f64>,
}

impl TransferMatrix {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.size + j]
    }

    pub fn cell_lengths(&self) -> &[f64] {
        &self.cell_lengths
    }

    /// One application of the operator to a vector of cell values.
    pub fn apply(&self, values: &[f64]) -> Vec<f64> {
        assert_eq!(values.len(), self.size);
        (0..self.size)
            .map(|i| {
                (0..self.size)
                    .map(|j| self.entry(i, j) * values[j])
                    .sum::<f64>()
            })
            .collect()
    }

    /// Defect of the integral-preservation identity
    /// `sum_i entry(i, j) len(i) = len(j)` for column `j`.
    pub fn integral_defect(&self, j: usize) -> f64 {
        let lhs: f64 = (0..self.size)
            .map(|i| self.entry(i, j) * self.cell_lengths[i])
            .sum();
        lhs - self.cell_lengths[j]
    }
}

/// A piecewise-constant probability density over a Markov partition.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseDensity {
    pub partition: MarkovPartition,
    pub values: Vec<f64>,
}

impl PiecewiseDensity {
    /// CSV rows `cell_left,cell_right,value` with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("cell_left,cell_right,value\n");
        for (i, v) in self.values.iter().enumerate() {
            let (l, r) = self.partition.cell(i);
            out.push_str(&format!(
                "{},{},{}\n",
                crate::cli::format_float(l),
                crate::cli::format_float(r),
                crate::cli::format_float(*v)
            ));
        }
        out
    }
}

/// Minimal `n <= max_iter` with `|T^n(beta) - alpha| <= tol`, if any.
pub fn detect_markov(map: &SkewTentMap, max_iter: usize, tol: f64) -> Option<usize> {
    let alpha = map.alpha();
    let mut x = map.beta();
    for n in 1..=max_iter {
        x = map.eval(x);
        if (x - alpha).abs() <= tol {
            return Some(n);
        }
    }
    None
}

/// Candidate partition points with merge priorities: interval endpoints and
/// the peak coordinates must survive deduplication exactly.
fn build_points(map: &SkewTentMap, orbit_len: usize) -> Vec<f64> {
    let mut candidates: Vec<(f64, u8)> = vec![
        (0.0, 0),
        (1.0, 0),
        (map.alpha(), 1),
        (map.beta(), 2),
    ];
    let mut x = map.beta();
    for _ in 1..orbit_len {
        x = map.eval(x);
        candidates.push((x, 3));
    }
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut points = Vec::with_capacity(candidates.len());
    let mut i = 0;
    while i < candidates.len() {
        let mut j = i + 1;
        let mut best = candidates[i];
        while j < candidates.len() && candidates[j].0 - candidates[i].0 <= DEDUP_TOL {
            if candidates[j].1 < best.1 {
                best = candidates[j];
            }
            j += 1;
        }
        points.push(best.0);
        i = j;
    }
    points
}

fn nearest_point_index(points: &[f64], x: f64) -> usize {
    match points.binary_search_by(|p| p.total_cmp(&x)) {
        Ok(i) => i,
        Err(i) => {
            if i == 0 {
                0
            } else if i == points.len() {
                points.len() - 1
            } else if (x - points[i - 1]).abs() <= (points[i] - x).abs() {
                i - 1
            } else {
                i
            }
        }
    }
}

/// Verify the Markov property cell by cell: each open cell must map onto
/// the interior of a union of consecutive cells. Returns per-cell image
/// index ranges for the matrix assembly.
fn verify_cells(
    map: &SkewTentMap,
    points: &[f64],
) -> Result<Vec<(usize, usize)>, MarkovError> {
    let alpha = map.alpha();
    let mut spans = Vec::with_capacity(points.len() - 1);
    for i in 0..points.len() - 1 {
        let (a, b) = (points[i], points[i + 1]);
        // cells never straddle the peak (alpha is a partition point), so
        // the midpoint decides the branch unambiguously
        let rising = 0.5 * (a + b) <= alpha;
        let (lo, hi) = if rising {
            (map.eval(a), map.eval(b))
        } else {
            (map.eval(b), map.eval(a))
        };
        let mut idx = [0usize; 2];
        for (slot, endpoint) in [(0, lo), (1, hi)] {
            let near = nearest_point_index(points, endpoint);
            if (points[near] - endpoint).abs() > CELL_IMAGE_TOL {
                return Err(MarkovError::MarkovViolation {
                    cell: i,
                    endpoint,
                    nearest: points[near],
                });
            }
            idx[slot] = near;
        }
        if idx[1] <= idx[0] {
            return Err(MarkovError::MarkovViolation {
                cell: i,
                endpoint: hi,
                nearest: points[idx[0]],
            });
        }
        spans.push((idx[0], idx[1]));
    }
    Ok(spans)
}

/// Build and verify the partition `{0, alpha, beta, T(beta), ...,
/// T^(period-1)(beta), 1}` for a detected period.
pub fn markov_partition(map: &SkewTentMap, period: usize) -> Result<MarkovPartition, MarkovError> {
    assert!(period >= 1);
    let points = build_points(map, period);
    verify_cells(map, &points)?;
    Ok(MarkovPartition {
        points,
        period: Some(period),
    })
}

/// Partition for `beta = 1`: the turning-point orbit falls onto the fixed
/// point 0 after one step, so `{0, alpha, 1}` is already Markov even though
/// the orbit never returns to `alpha`.
pub fn top_edge_partition(map: &SkewTentMap) -> Result<MarkovPartition, MarkovError> {
    if map.beta() != 1.0 {
        return Err(MarkovError::NotTopEdge { beta: map.beta() });
    }
    let points = build_points(map, 1);
    verify_cells(map, &points)?;
    Ok(MarkovPartition {
        points,
        period: None,
    })
}

/// Assemble the transfer matrix on the cells of a verified partition.
///
/// Reciprocal slopes are formed directly as `alpha/beta` and
/// `(1-alpha)/beta` so the integral-preservation identity holds to
/// rounding.
pub fn transfer_matrix(map: &SkewTentMap, partition: &MarkovPartition) -> TransferMatrix {
    let points = partition.points();
    let spans = verify_cells(map, points).expect("partition was verified at construction");
    let k = partition.cell_count();
    let alpha = map.alpha();
    let recip_rising = alpha / map.beta();
    let recip_falling = (1.0 - alpha) / map.beta();
    let mut entries = vec![0.0; k * k];
    for (j, &(lo, hi)) in spans.iter().enumerate() {
        let rising = 0.5 * (points[j] + points[j + 1]) <= alpha;
        let recip = if rising { recip_rising } else { recip_falling };
        for i in lo..hi {
            entries[i * k + j] = recip;
        }
    }
    let cell_lengths = (0..k).map(|i| partition.cell_length(i)).collect();
    TransferMatrix {
        size: k,
        entries,
        cell_lengths,
    }
}

/// Gaussian elimination with partial pivoting on an augmented system.
/// Returns `None` when a pivot degenerates.
fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    let scale = a
        .iter()
        .flat_map(|row| row.iter())
        .fold(0.0_f64, |m, &x| m.max(x.abs()))
        .max(1.0);
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&p, &q| a[p][col].abs().total_cmp(&a[q][col].abs()))
            .unwrap();
        if a[pivot_row][col].abs() <= 1e-13 * scale {
            return None;
        }
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        let pivot = a[col].clone();
        for row in col + 1..n {
            let f = a[row][col] / pivot[col];
            if f != 0.0 {
                for (dst, src) in a[row][col..].iter_mut().zip(&pivot[col..]) {
                    *dst -= f * src;
                }
                b[row] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut s = b[row];
        for c in row + 1..n {
            s -= a[row][c] * x[c];
        }
        x[row] = s / a[row][row];
    }
    Some(x)
}

/// Count nearly-zero pivots of a matrix, i.e. its numerical rank deficiency.
fn rank_deficiency(mut a: Vec<Vec<f64>>, tol: f64) -> usize {
    let n = a.len();
    let scale = a
        .iter()
        .flat_map(|row| row.iter())
        .fold(0.0_f64, |m, &x| m.max(x.abs()))
        .max(1.0);
    let mut deficient = 0;
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&p, &q| a[p][col].abs().total_cmp(&a[q][col].abs()))
            .unwrap();
        if a[pivot_row][col].abs() <= tol * scale {
            deficient += 1;
            continue;
        }
        a.swap(col, pivot_row);
        let pivot = a[col].clone();
        for row in a.iter_mut().skip(col + 1) {
            let f = row[col] / pivot[col];
            if f != 0.0 {
                for (dst, src) in row[col..].iter_mut().zip(&pivot[col..]) {
                    *dst -= f * src;
                }
            }
        }
    }
    deficient
}

/// Solve `(P - I) v = 0` normalized to `sum v_i len_i = 1`.
///
/// The lengths form a left eigenvector of the matrix (the integral
/// identity), so the rows of `P - I` carry one dependency with all-nonzero
/// weights and any single row may be traded for the normalization.
pub fn invariant_density(
    matrix: &TransferMatrix,
    partition: &MarkovPartition,
) -> Result<PiecewiseDensity, MarkovError> {
    let k = matrix.size();
    let m_minus_i: Vec<Vec<f64>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| matrix.entry(i, j) - if i == j { 1.0 } else { 0.0 })
                .collect()
        })
        .collect();
    if rank_deficiency(m_minus_i.clone(), 1e-9) >= 2 {
        return Err(MarkovError::NonUniqueDensity);
    }

    let mut solution = None;
    for replace in (0..k).rev() {
        let mut a = m_minus_i.clone();
        let mut b = vec![0.0; k];
        a[replace] = matrix.cell_lengths().to_vec();
        b[replace] = 1.0;
        if let Some(v) = gauss_solve(a, b) {
            solution = Some(v);
            break;
        }
    }
    let mut values = solution.ok_or(MarkovError::NonUniqueDensity)?;

    for (i, v) in values.iter().enumerate() {
        if *v < -1e-9 {
            return Err(MarkovError::NegativeDensity { cell: i, value: *v });
        }
    }
    for v in values.iter_mut() {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    let mass: f64 = values
        .iter()
        .zip(matrix.cell_lengths())
        .map(|(v, l)| v * l)
        .sum();
    if (mass - 1.0).abs() > f64::EPSILON {
        for v in values.iter_mut() {
            *v /= mass;
        }
    }
    Ok(PiecewiseDensity {
        partition: partition.clone(),
        values,
    })
}

/// `gamma = mu([0, alpha])`: the density mass of the cells left of the peak.
pub fn gamma_exact(density: &PiecewiseDensity, alpha: f64) -> f64 {
    let mut sum = 0.0;
    for (i, v) in density.values.iter().enumerate() {
        let (_, right) = density.partition.cell(i);
        if right <= alpha + 1e-12 {
            sum += v * density.partition.cell_length(i);
        }
    }
    sum
}

/// Exact `(gamma, Lambda, Psi')` from a solved invariant density.
pub fn lyapunov_exact(map: &SkewTentMap, density: &PiecewiseDensity) -> TangentEstimate {
    let gamma = gamma_exact(density, map.alpha());
    tangent_from_gamma(map, gamma, Method::MarkovExact)
}

/// Everything the Markov route produces for one map.
#[derive(Debug, Clone)]
pub struct MarkovSolution {
    pub period: Option<usize>,
    pub partition: MarkovPartition,
    pub matrix: TransferMatrix,
    pub density: PiecewiseDensity,
    pub tangent: TangentEstimate,
}

/// Detect a periodic turning point (or the absorbed top-edge orbit) and run
/// the full pipeline: partition, transfer matrix, density, exact constants.
pub fn solve(map: &SkewTentMap, max_iter: usize, tol: f64) -> Result<MarkovSolution, MarkovError> {
    let partition = match detect_markov(map, max_iter, tol) {
        Some(period) => markov_partition(map, period)?,
        None if map.beta() == 1.0 => top_edge_partition(map)?,
        None => return Err(MarkovError::NoPeriod { max_iter, tol }),
    };
    let matrix = transfer_matrix(map, &partition);
    let density = invariant_density(&matrix, &partition)?;
    let tangent = lyapunov_exact(map, &density);
    Ok(MarkovSolution {
        period: partition.period(),
        partition,
        matrix,
        density,
        tangent,
    })
}
