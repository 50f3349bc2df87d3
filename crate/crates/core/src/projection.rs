//! Metric projection onto segments, flats, simplices and polytopes.
//!
//! The simplex routine follows the facet-descent recursion: reduce onto the
//! affine hull, return the reduced point if it is already inside, and
//! otherwise recurse into every facet and keep the nearest candidate.
//! Distances are carried through the recursion with the Pythagorean
//! identity `d^2(x, C) = d^2(x, A) + d^2(P_A x, C)`.

use crate::bodies::{affine_coordinates, nnls_hull, AffineFlat, Polytope, Segment, Simplex};
use crate::error::{GeomError, Result};
use crate::vectorspace::{is_affinely_independent, Vector};

/// A reduced point counts as inside the simplex when every barycentric
/// weight is at least `-BARY_TOL`.
pub const BARY_TOL: f64 = 1e-10;

/// Default cap on the number of vertex subsets `project_polytope` visits.
pub const DEFAULT_SUBSET_BUDGET: u128 = 1 << 20;

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionResult {
    pub point: Vector,
    /// Euclidean distance from the query point.
    pub distance: f64,
    /// Barycentric or hull weights over the body's vertices; for flats, the
    /// direction coefficients.
    pub weights: Vec<f64>,
    /// Vertices dropped along the facet recursion, outermost first.
    pub facet_chain: Vec<usize>,
}

/// Clamped projection onto `[e0, e1]`; returns the point and its parameter.
fn segment_foot(e0: &Vector, e1: &Vector, x: &Vector) -> (Vector, f64) {
    let dir = e1 - e0;
    let len_sq = dir.norm_sq();
    if len_sq == 0.0 {
        return (e0.clone(), 0.0);
    }
    let t = ((x - e0).dot(&dir) / len_sq).clamp(0.0, 1.0);
    (e0.add_scaled(t, &dir), t)
}

/// `e0 + [<x - e0, e1 - e0> / ||e1 - e0||^2]_0^1 (e1 - e0)`.
pub fn project_segment(s: &Segment, x: &Vector) -> Result<ProjectionResult> {
    x.check_dim(s.e0().dim())?;
    let (point, t) = segment_foot(s.e0(), s.e1(), x);
    Ok(ProjectionResult {
        distance: x.dist(&point),
        point,
        weights: vec![1.0 - t, t],
        facet_chain: Vec::new(),
    })
}

/// Orthogonal projection onto an affine flat via the normal equations.
pub fn project_affine(f: &AffineFlat, x: &Vector) -> Result<ProjectionResult> {
    let (coeffs, point) = f.foot(x)?;
    Ok(ProjectionResult {
        distance: x.dist(&point),
        point,
        weights: coeffs,
        facet_chain: Vec::new(),
    })
}

struct Descent {
    point: Vector,
    /// Squared distance from the point handed to this level.
    dist_sq: f64,
    weights: Vec<f64>,
    facet_chain: Vec<usize>,
}

fn descend(vertices: &[Vector], labels: &[usize], x: &Vector) -> Result<Descent> {
    if vertices.len() == 1 {
        return Ok(Descent {
            dist_sq: x.dist(&vertices[0]).powi(2),
            point: vertices[0].clone(),
            weights: vec![1.0],
            facet_chain: Vec::new(),
        });
    }
    if vertices.len() == 2 {
        let (point, t) = segment_foot(&vertices[0], &vertices[1], x);
        return Ok(Descent {
            dist_sq: x.dist(&point).powi(2),
            point,
            weights: vec![1.0 - t, t],
            facet_chain: Vec::new(),
        });
    }

    // Reduction onto the affine hull.
    let (bary, reduced, residual) = affine_coordinates(vertices, x).map_err(|e| match e {
        GeomError::NotPositiveDefinite { .. } => GeomError::DegenerateFlat,
        other => other,
    })?;
    let to_hull_sq = residual * residual;

    if bary.iter().all(|&w| w >= -BARY_TOL) {
        let clamped: Vec<f64> = bary.iter().map(|w| w.max(0.0)).collect();
        let total: f64 = clamped.iter().sum();
        return Ok(Descent {
            point: reduced,
            dist_sq: to_hull_sq,
            weights: clamped.iter().map(|w| w / total).collect(),
            facet_chain: Vec::new(),
        });
    }

    let mut best: Option<(usize, Descent)> = None;
    for j in 0..vertices.len() {
        let facet: Vec<Vector> = vertices
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != j)
            .map(|(_, v)| v.clone())
            .collect();
        let facet_labels: Vec<usize> = labels
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != j)
            .map(|(_, &l)| l)
            .collect();
        let candidate = descend(&facet, &facet_labels, &reduced)?;
        if best
            .as_ref()
            .is_none_or(|(_, b)| candidate.dist_sq < b.dist_sq)
        {
            best = Some((j, candidate));
        }
    }
    let (j, inner) = best.expect("simplex has at least three vertices here");

    let mut weights = inner.weights;
    weights.insert(j, 0.0);
    let mut facet_chain = vec![labels[j]];
    facet_chain.extend(inner.facet_chain);
    Ok(Descent {
        point: inner.point,
        dist_sq: to_hull_sq + inner.dist_sq,
        weights,
        facet_chain,
    })
}

/// Nearest point of a simplex by recursive facet descent.
pub fn project_simplex(s: &Simplex, x: &Vector) -> Result<ProjectionResult> {
    x.check_dim(s.vertices()[0].dim())?;
    let labels: Vec<usize> = (0..s.vertices().len()).collect();
    let d = descend(s.vertices(), &labels, x)?;
    Ok(ProjectionResult {
        point: d.point,
        distance: d.dist_sq.sqrt(),
        weights: d.weights,
        facet_chain: d.facet_chain,
    })
}

fn binomial(n: u128, k: u128) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Number of subsets of size `1..=min(m, dim + 1)` of an `m`-point set.
pub fn subset_count(m: usize, dim: usize) -> u128 {
    let top = m.min(dim + 1);
    (1..=top)
        .map(|k| binomial(m as u128, k as u128))
        .fold(0u128, u128::saturating_add)
}

/// Advances `idx` to the next `k`-combination of `0..m` in lexicographic
/// order; returns false after the last one.
fn next_combination(idx: &mut [usize], m: usize) -> bool {
    let k = idx.len();
    for i in (0..k).rev() {
        if idx[i] < m - k + i {
            idx[i] += 1;
            for j in (i + 1)..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Nearest point of a polytope as the best projection over all affinely
/// independent vertex subsets (Caratheodory decomposition of the hull).
pub fn project_polytope(p: &Polytope, x: &Vector) -> Result<ProjectionResult> {
    project_polytope_with_budget(p, x, DEFAULT_SUBSET_BUDGET)
}

pub fn project_polytope_with_budget(
    p: &Polytope,
    x: &Vector,
    budget: u128,
) -> Result<ProjectionResult> {
    let dim = p.vertices()[0].dim();
    x.check_dim(dim)?;
    let m = p.len();
    let count = subset_count(m, dim);
    if count > budget {
        return Err(GeomError::SubsetBudgetExceeded { count, budget });
    }

    let mut best: Option<(Vec<usize>, Descent)> = None;
    for k in 1..=m.min(dim + 1) {
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            let subset: Vec<Vector> = idx.iter().map(|&i| p.vertices()[i].clone()).collect();
            if k <= 2 || is_affinely_independent(&subset)? {
                let candidate = descend(&subset, &idx, x)?;
                if best
                    .as_ref()
                    .is_none_or(|(_, b)| candidate.dist_sq < b.dist_sq)
                {
                    best = Some((idx.clone(), candidate));
                }
            }
            if !next_combination(&mut idx, m) {
                break;
            }
        }
    }

    let (idx, d) = best.expect("polytope has at least one vertex");
    let mut weights = vec![0.0; m];
    for (&i, &w) in idx.iter().zip(&d.weights) {
        weights[i] = w;
    }
    Ok(ProjectionResult {
        point: d.point,
        distance: d.dist_sq.sqrt(),
        weights,
        facet_chain: d.facet_chain,
    })
}

/// Independent reference projection: the min-norm point of `conv(p) - x`
/// found by the active-set hull fit.
pub fn min_norm_oracle(p: &Polytope, x: &Vector) -> Result<ProjectionResult> {
    let dim = p.vertices()[0].dim();
    x.check_dim(dim)?;
    let shifted = Polytope::from_unique(p.vertices().iter().map(|v| v - x).collect());
    let fit = nnls_hull(&shifted, &Vector::zeros(dim))?;
    let point = Vector::combination(p.vertices(), &fit.weights);
    Ok(ProjectionResult {
        distance: x.dist(&point),
        point,
        weights: fit.weights,
        facet_chain: Vec::new(),
    })
}
