//! Slow brute-force references for the projection and visibility routines.
//!
//! Neither routine here calls into the projection recursion or the hull fit;
//! they only use membership queries and plain linear algebra.

use crate::bodies::ConvexBody;
use crate::error::{GeomError, Result};
use crate::projection::ProjectionResult;
use crate::vectorspace::{orthonormal_basis, Vector};
use crate::visibility::{BISECTION_MEMBERSHIP_TOL, BODY_TOL};

/// Largest vertex count accepted by [`grid_project`].
pub const GRID_MAX_VERTICES: usize = 8;

/// Node budget of the lattice search.
pub const GRID_NODE_BUDGET: u64 = 10_000_000;

/// Closest point to `x` among the lattice hull points
/// `sum_i (w_i / resolution) v_i` with integer `w_i >= 0` summing to
/// `resolution`.
///
/// The minimum is exact over the whole lattice: a depth-first enumeration
/// of the weight vectors that skips a subtree only when a valid lower bound
/// on every completion exceeds the incumbent. Ties go to the
/// lexicographically smallest weight vector.
pub fn grid_project(vertices: &[Vector], x: &Vector, resolution: u32) -> Result<ProjectionResult> {
    grid_project_with_budget(vertices, x, resolution, GRID_NODE_BUDGET)
}

pub fn grid_project_with_budget(
    vertices: &[Vector],
    x: &Vector,
    resolution: u32,
    node_budget: u64,
) -> Result<ProjectionResult> {
    if resolution < 2 {
        return Err(GeomError::InvalidArgument(
            "grid resolution must be at least 2",
        ));
    }
    if vertices.is_empty() {
        return Err(GeomError::Empty("grid vertices"));
    }
    if vertices.len() > GRID_MAX_VERTICES {
        return Err(GeomError::InvalidArgument(
            "grid oracle accepts at most 8 vertices",
        ));
    }
    let dim = vertices[0].dim();
    for v in vertices {
        v.check_dim(dim)?;
    }
    x.check_dim(dim)?;

    let res = resolution as i64;
    let incumbent = local_search(vertices, x, res);
    let mut search = LatticeSearch::new(vertices, x, res, incumbent, node_budget);
    search.run()?;

    let weights: Vec<f64> = search
        .best_w
        .iter()
        .map(|&w| w as f64 / res as f64)
        .collect();
    let point = Vector::combination(vertices, &weights);
    Ok(ProjectionResult {
        distance: x.dist(&point),
        point,
        weights,
        facet_chain: Vec::new(),
    })
}

fn lattice_point(vertices: &[Vector], w: &[i64], res: i64) -> Vector {
    let weights: Vec<f64> = w.iter().map(|&wi| wi as f64 / res as f64).collect();
    Vector::combination(vertices, &weights)
}

/// Pairwise mass-transfer descent on the lattice; only supplies a starting
/// incumbent for the exact search.
fn local_search(vertices: &[Vector], x: &Vector, res: i64) -> Vec<i64> {
    let m = vertices.len();
    let start = (0..m)
        .min_by(|&a, &b| x.dist(&vertices[a]).total_cmp(&x.dist(&vertices[b])))
        .unwrap_or(0);
    let mut w = vec![0i64; m];
    w[start] = res;
    let mut best = x.dist(&lattice_point(vertices, &w, res));
    let mut step = (res / 2).max(1);
    loop {
        let mut improved = false;
        for i in 0..m {
            for j in 0..m {
                if i == j || w[i] < step {
                    continue;
                }
                w[i] -= step;
                w[j] += step;
                let d = x.dist(&lattice_point(vertices, &w, res));
                if d < best {
                    best = d;
                    improved = true;
                } else {
                    w[i] += step;
                    w[j] -= step;
                }
            }
        }
        if !improved {
            if step == 1 {
                break;
            }
            step /= 2;
        }
    }
    w
}

struct LatticeSearch<'a> {
    vertices: &'a [Vector],
    x: &'a Vector,
    res: i64,
    /// Enumeration order of the vertices.
    order: Vec<usize>,
    /// Unit direction for the half-space bound, if any.
    direction: Option<Vector>,
    /// `min_{i >= k} <direction, v_order[i]>`.
    suffix_min: Vec<f64>,
    /// Orthonormal basis of the suffix difference span at each depth.
    suffix_basis: Vec<Vec<Vector>>,
    best_w: Vec<i64>,
    best_dist_sq: f64,
    nodes: u64,
    budget: u64,
    current: Vec<i64>,
}

impl<'a> LatticeSearch<'a> {
    fn new(
        vertices: &'a [Vector],
        x: &'a Vector,
        res: i64,
        incumbent: Vec<i64>,
        budget: u64,
    ) -> Self {
        let m = vertices.len();
        let inc_point = lattice_point(vertices, &incumbent, res);
        let offset = &inc_point - x;
        let offset_norm = offset.norm();
        let direction = (offset_norm > 0.0).then(|| offset.scale(1.0 / offset_norm));

        // Vertices with large slack against the incumbent's supporting
        // hyperplane go first so the half-space bound cuts them early; the
        // near-optimal face ends up in the suffix where the affine bound is
        // tight.
        let mut order: Vec<usize> = (0..m).collect();
        if let Some(u) = &direction {
            let slack: Vec<f64> = vertices.iter().map(|v| u.dot(&(v - &inc_point))).collect();
            order.sort_by(|&a, &b| slack[b].total_cmp(&slack[a]).then(a.cmp(&b)));
        }

        let suffix_min = (0..m)
            .map(|k| match &direction {
                Some(u) => order[k..]
                    .iter()
                    .map(|&i| u.dot(&vertices[i]))
                    .fold(f64::INFINITY, f64::min),
                None => f64::NEG_INFINITY,
            })
            .collect();
        let suffix_basis = (0..m)
            .map(|k| {
                let base = &vertices[order[k]];
                let diffs: Vec<Vector> = order[k + 1..]
                    .iter()
                    .map(|&i| &vertices[i] - base)
                    .collect();
                orthonormal_basis(&diffs, 1e-12)
            })
            .collect();

        let best_dist_sq = x.dist(&inc_point).powi(2);
        Self {
            vertices,
            x,
            res,
            order,
            direction,
            suffix_min,
            suffix_basis,
            best_w: incumbent,
            best_dist_sq,
            nodes: 0,
            budget,
            current: vec![0; m],
        }
    }

    fn run(&mut self) -> Result<()> {
        let prefix = Vector::zeros(self.x.dim());
        self.visit(0, &prefix, self.res)
    }

    fn lower_bound(&self, depth: usize, prefix: &Vector, remaining: i64) -> f64 {
        let r = remaining as f64 / self.res as f64;
        let anchor = prefix.add_scaled(r, &self.vertices[self.order[depth]]);
        let mut gap = self.x - &anchor;
        for q in &self.suffix_basis[depth] {
            gap = gap.add_scaled(-q.dot(&gap), q);
        }
        let affine = gap.norm();
        let halfspace = match &self.direction {
            Some(u) => u.dot(prefix) + r * self.suffix_min[depth] - u.dot(self.x),
            None => 0.0,
        };
        affine.max(halfspace)
    }

    fn offer(&mut self, point: &Vector) {
        let d = self.x.dist(point).powi(2);
        if d < self.best_dist_sq || (d == self.best_dist_sq && self.current < self.best_w) {
            self.best_dist_sq = d;
            self.best_w = self.current.clone();
        }
    }

    fn visit(&mut self, depth: usize, prefix: &Vector, remaining: i64) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(GeomError::BudgetExceeded(self.budget));
        }
        let m = self.order.len();
        let vi = self.order[depth];
        if remaining == 0 || depth == m - 1 {
            self.current[vi] = remaining;
            for &i in &self.order[depth + 1..] {
                self.current[i] = 0;
            }
            let point = prefix.add_scaled(remaining as f64 / self.res as f64, &self.vertices[vi]);
            self.offer(&point);
            self.current[vi] = 0;
            return Ok(());
        }
        let best = self.best_dist_sq.sqrt();
        if self.lower_bound(depth, prefix, remaining) > best + 1e-12 * (1.0 + best) {
            return Ok(());
        }
        for w in 0..=remaining {
            self.current[vi] = w;
            let child = prefix.add_scaled(w as f64 / self.res as f64, &self.vertices[vi]);
            self.visit(depth + 1, &child, remaining - w)?;
        }
        self.current[vi] = 0;
        Ok(())
    }
}

/// Largest `k / steps` for which `(k/steps) x + (1 - k/steps) v` is in the
/// body, found by checking every grid value.
pub fn scan_lambda<B: ConvexBody + ?Sized>(
    body: &B,
    x: &Vector,
    v: &Vector,
    steps: u32,
) -> Result<f64> {
    if steps == 0 {
        return Err(GeomError::InvalidArgument("scan needs at least one step"));
    }
    x.check_dim(body.dim())?;
    v.check_dim(body.dim())?;
    if !body.contains(v, BODY_TOL)? {
        return Err(GeomError::VNotInBody);
    }
    let tol = BISECTION_MEMBERSHIP_TOL * (1.0 + x.dist(v));
    let mut best = 0.0;
    for k in 0..=steps {
        let lambda = k as f64 / steps as f64;
        if body.contains(&x.lerp(lambda, v), tol)? {
            best = lambda;
        }
    }
    Ok(best)
}
