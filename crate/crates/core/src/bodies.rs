//! Convex bodies behind a common membership oracle.
//!
//! Five concrete shapes are supported: segments, simplices, polytopes given
//! by vertex lists, affine flats, and the fixed cone over a disk
//! `(1,0,0) + cone{(1, a, b) : a^2 + (b-1)^2 <= 1}` whose visible set from
//! the origin is not closed.

use crate::error::{GeomError, Result};
use crate::nnls::nnls;
use crate::vectorspace::{
    affine_foot, common_dim, is_affinely_independent, PivotedCholesky, SymMatrix, Vector,
};

/// Minimum separation between segment endpoints.
pub const SEGMENT_MIN_LENGTH: f64 = 1e-12;

/// Weights must sum to one within this tolerance.
pub const BARYCENTRIC_SUM_TOL: f64 = 1e-10;

/// Anything that can answer "is `x` in the body, up to `tol`?".
pub trait ConvexBody {
    fn dim(&self) -> usize;

    fn contains(&self, x: &Vector, tol: f64) -> Result<bool>;
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(GeomError::InvalidArgument(
            "tolerance must be positive and finite",
        ))
    }
}

/// Residual tolerance for "x lies in the affine hull".
pub fn in_aff_tol(x: &Vector) -> f64 {
    1e-8 * (1.0 + x.norm())
}

/// Affine coordinates of the foot of `x` on `aff(vertices)`.
///
/// Returns `(weights, foot, residual)` with `sum(weights) = 1` and
/// `residual = ||x - foot||`.
pub(crate) fn affine_coordinates(
    vertices: &[Vector],
    x: &Vector,
) -> Result<(Vec<f64>, Vector, f64)> {
    let base = &vertices[0];
    let dirs: Vec<Vector> = vertices[1..].iter().map(|v| v - base).collect();
    let (alpha, foot) = affine_foot(base, &dirs, x)?;
    let mut weights = Vec::with_capacity(vertices.len());
    weights.push(1.0 - alpha.iter().sum::<f64>());
    weights.extend(alpha);
    let residual = x.dist(&foot);
    Ok((weights, foot, residual))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    e0: Vector,
    e1: Vector,
}

impl Segment {
    pub fn new(e0: Vector, e1: Vector) -> Result<Self> {
        e1.check_dim(e0.dim())?;
        if e0.dist(&e1) <= SEGMENT_MIN_LENGTH {
            return Err(GeomError::InvalidBody("segment endpoints coincide".into()));
        }
        Ok(Self { e0, e1 })
    }

    pub fn e0(&self) -> &Vector {
        &self.e0
    }

    pub fn e1(&self) -> &Vector {
        &self.e1
    }

    pub fn endpoints(&self) -> [Vector; 2] {
        [self.e0.clone(), self.e1.clone()]
    }

    /// Unclamped parameter of the foot of `x` on the carrying line.
    pub(crate) fn line_parameter(&self, x: &Vector) -> f64 {
        let dir = &self.e1 - &self.e0;
        (x - &self.e0).dot(&dir) / dir.norm_sq()
    }
}

impl ConvexBody for Segment {
    fn dim(&self) -> usize {
        self.e0.dim()
    }

    fn contains(&self, x: &Vector, tol: f64) -> Result<bool> {
        check_tol(tol)?;
        x.check_dim(self.dim())?;
        let t = self.line_parameter(x);
        let foot = self.e0.add_scaled(t, &(&self.e1 - &self.e0));
        Ok(x.dist(&foot) <= tol && t >= -tol && t <= 1.0 + tol)
    }
}

/// Convex hull of `n + 1` affinely independent points, `1 <= n <= d`.
#[derive(Debug, Clone, PartialEq)]
pub struct Simplex {
    vertices: Vec<Vector>,
}

impl Simplex {
    pub fn new(vertices: Vec<Vector>) -> Result<Self> {
        let dim = common_dim(&vertices)?;
        if vertices.len() < 2 {
            return Err(GeomError::InvalidBody(
                "a simplex needs at least two vertices".into(),
            ));
        }
        if vertices.len() > dim + 1 {
            return Err(GeomError::InvalidBody(format!(
                "{} vertices cannot be affinely independent in dimension {dim}",
                vertices.len()
            )));
        }
        if !is_affinely_independent(&vertices)? {
            return Err(GeomError::InvalidBody(
                "simplex vertices are affinely dependent".into(),
            ));
        }
        Ok(Self { vertices })
    }

    pub fn vertices(&self) -> &[Vector] {
        &self.vertices
    }

    /// Simplex dimension `n` (vertex count minus one).
    pub fn order(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn affine_hull(&self) -> AffineFlat {
        let base = self.vertices[0].clone();
        let directions = self.vertices[1..].iter().map(|v| v - &base).collect();
        AffineFlat { base, directions }
    }

    /// Vertex list of the facet opposite vertex `j`.
    pub fn facet_vertices(&self, j: usize) -> Vec<Vector> {
        self.vertices
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != j)
            .map(|(_, v)| v.clone())
            .collect()
    }
}

impl ConvexBody for Simplex {
    fn dim(&self) -> usize {
        self.vertices[0].dim()
    }

    fn contains(&self, x: &Vector, tol: f64) -> Result<bool> {
        check_tol(tol)?;
        x.check_dim(self.dim())?;
        let (weights, _, residual) = affine_coordinates(&self.vertices, x)?;
        Ok(residual <= tol && weights.iter().all(|&w| w >= -tol))
    }
}

/// Barycentric weights of a point with respect to a simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct BarycentricCoords {
    weights: Vec<f64>,
}

impl BarycentricCoords {
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn into_weights(self) -> Vec<f64> {
        self.weights
    }

    /// `sum_i weights[i] * vertices[i]`.
    pub fn recombine(&self, simplex: &Simplex) -> Vector {
        Vector::combination(simplex.vertices(), &self.weights)
    }
}

/// Unique barycentric coordinates of `x`, which must lie in `aff(s)`.
pub fn barycentric_coords(s: &Simplex, x: &Vector) -> Result<BarycentricCoords> {
    x.check_dim(s.dim())?;
    let (weights, _, residual) = affine_coordinates(s.vertices(), x)?;
    if residual > in_aff_tol(x) {
        return Err(GeomError::NotInAffineHull { residual });
    }
    debug_assert!((weights.iter().sum::<f64>() - 1.0).abs() <= BARYCENTRIC_SUM_TOL);
    Ok(BarycentricCoords { weights })
}

/// Convex hull of a finite point set. Exact duplicate vertices are dropped
/// at construction; affine dependence is allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct Polytope {
    vertices: Vec<Vector>,
}

impl Polytope {
    pub fn new(vertices: Vec<Vector>) -> Result<Self> {
        common_dim(&vertices)?;
        let mut unique: Vec<Vector> = Vec::with_capacity(vertices.len());
        for v in vertices {
            if !unique.contains(&v) {
                unique.push(v);
            }
        }
        Ok(Self { vertices: unique })
    }

    /// Wraps a vertex list that is already known to be duplicate-free.
    pub(crate) fn from_unique(vertices: Vec<Vector>) -> Self {
        Self { vertices }
    }

    pub fn vertices(&self) -> &[Vector] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn diameter(&self) -> f64 {
        let mut best = 0.0f64;
        for (i, a) in self.vertices.iter().enumerate() {
            for b in &self.vertices[i + 1..] {
                best = best.max(a.dist(b));
            }
        }
        best
    }
}

impl From<&Simplex> for Polytope {
    fn from(s: &Simplex) -> Self {
        Self {
            vertices: s.vertices.clone(),
        }
    }
}

impl From<&Segment> for Polytope {
    fn from(s: &Segment) -> Self {
        Self {
            vertices: vec![s.e0.clone(), s.e1.clone()],
        }
    }
}

impl ConvexBody for Polytope {
    fn dim(&self) -> usize {
        self.vertices[0].dim()
    }

    fn contains(&self, x: &Vector, tol: f64) -> Result<bool> {
        check_tol(tol)?;
        Ok(nnls_hull(self, x)?.residual <= tol)
    }
}

/// Result of the constrained hull fit.
#[derive(Debug, Clone, PartialEq)]
pub struct HullFit {
    /// Convex weights over the polytope's (deduplicated) vertices.
    pub weights: Vec<f64>,
    /// `||sum_i weights[i] v_i - x||`.
    pub residual: f64,
}

/// Nearest point of `conv(p)` to `x` as convex weights.
///
/// Solves `min ||sum_i l_i v_i - x||` over the probability simplex. The
/// vertices are shifted by `-x` and lifted with a homogenizing row of
/// weight `mu = max(1, max ||v_i - x||)`; the nonnegative least-squares
/// solution `u` of `min ||[V - x; mu 1^T] u - [0; mu]||` normalized to
/// `u / sum(u)` is exactly the minimizer, because the lifted objective
/// equals `mu^2 f / (mu^2 + f)` with `f = ||V l - x||^2`, which is monotone
/// in `f`.
pub fn nnls_hull(p: &Polytope, x: &Vector) -> Result<HullFit> {
    let dim = p.dim();
    x.check_dim(dim)?;
    let shifted: Vec<Vector> = p.vertices.iter().map(|v| v - x).collect();
    let mu = shifted.iter().map(Vector::norm).fold(1.0, f64::max);
    let columns: Vec<Vec<f64>> = shifted
        .iter()
        .map(|v| {
            let mut c = v.coords().to_vec();
            c.push(mu);
            c
        })
        .collect();
    let mut rhs = vec![0.0; dim];
    rhs.push(mu);
    let cap = 50 * p.len();
    let sol = nnls(&columns, &rhs, cap)?;
    let total: f64 = sol.z.iter().sum();
    if total <= 0.0 {
        // Unreachable for nonempty vertex lists; the zero vector is never optimal.
        return Err(GeomError::MaxIterationsExceeded(cap));
    }
    let weights: Vec<f64> = sol.z.iter().map(|u| u / total).collect();
    let residual = Vector::combination(&shifted, &weights).norm();
    Ok(HullFit { weights, residual })
}

/// Affine flat `base + span(directions)` with independent directions.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineFlat {
    base: Vector,
    directions: Vec<Vector>,
}

impl AffineFlat {
    pub fn new(base: Vector, directions: Vec<Vector>) -> Result<Self> {
        let dim = base.dim();
        for d in &directions {
            d.check_dim(dim)?;
        }
        if directions.len() > dim {
            return Err(GeomError::DegenerateFlat);
        }
        if !directions.is_empty() {
            let slices: Vec<&[f64]> = directions.iter().map(Vector::coords).collect();
            if !PivotedCholesky::factor(&SymMatrix::from_gram_slices(&slices)).is_full_rank() {
                return Err(GeomError::DegenerateFlat);
            }
        }
        Ok(Self { base, directions })
    }

    pub fn base(&self) -> &Vector {
        &self.base
    }

    pub fn directions(&self) -> &[Vector] {
        &self.directions
    }

    /// Point `base + sum_j coeffs[j] * directions[j]`.
    pub fn point_at(&self, coeffs: &[f64]) -> Vector {
        assert_eq!(coeffs.len(), self.directions.len());
        coeffs
            .iter()
            .zip(&self.directions)
            .fold(self.base.clone(), |acc, (c, d)| acc.add_scaled(*c, d))
    }

    /// Direction coefficients and foot point of the orthogonal projection.
    pub fn foot(&self, x: &Vector) -> Result<(Vec<f64>, Vector)> {
        x.check_dim(self.dim())?;
        affine_foot(&self.base, &self.directions, x).map_err(|e| match e {
            GeomError::NotPositiveDefinite { .. } => GeomError::DegenerateFlat,
            other => other,
        })
    }
}

impl ConvexBody for AffineFlat {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn contains(&self, x: &Vector, tol: f64) -> Result<bool> {
        check_tol(tol)?;
        let (_, foot) = self.foot(x)?;
        Ok(x.dist(&foot) <= tol)
    }
}

/// The closed convex set `(1,0,0) + cone{(1, a, b) : a^2 + (b-1)^2 <= 1}`
/// in `R^3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DiskCone;

impl DiskCone {
    /// The point `(1,0,0) + rho * (1, alpha, beta)`.
    pub fn point(rho: f64, alpha: f64, beta: f64) -> Vector {
        Vector::from_raw(vec![1.0 + rho, rho * alpha, rho * beta])
    }
}

impl ConvexBody for DiskCone {
    fn dim(&self) -> usize {
        3
    }

    fn contains(&self, x: &Vector, tol: f64) -> Result<bool> {
        check_tol(tol)?;
        x.check_dim(3)?;
        let rho = x[0] - 1.0;
        Ok(if rho < -tol {
            false
        } else if rho.abs() <= tol {
            x[1] * x[1] + x[2] * x[2] <= tol * tol
        } else {
            let a = x[1] / rho;
            let b = x[2] / rho - 1.0;
            a * a + b * b <= 1.0 + tol
        })
    }
}

/// Any of the supported bodies.
#[derive(Debug, Clone, PartialEq)]
pub enum Body {
    Segment(Segment),
    Simplex(Simplex),
    Polytope(Polytope),
    Flat(AffineFlat),
    DiskCone(DiskCone),
}

impl Body {
    pub fn kind(&self) -> &'static str {
        match self {
            Body::Segment(_) => "segment",
            Body::Simplex(_) => "simplex",
            Body::Polytope(_) => "polytope",
            Body::Flat(_) => "flat",
            Body::DiskCone(_) => "disk_cone",
        }
    }

    /// Vertex list for the bodies that have one.
    pub fn vertices(&self) -> Option<Vec<Vector>> {
        match self {
            Body::Segment(s) => Some(s.endpoints().to_vec()),
            Body::Simplex(s) => Some(s.vertices().to_vec()),
            Body::Polytope(p) => Some(p.vertices().to_vec()),
            Body::Flat(_) | Body::DiskCone(_) => None,
        }
    }
}

impl ConvexBody for Body {
    fn dim(&self) -> usize {
        match self {
            Body::Segment(b) => b.dim(),
            Body::Simplex(b) => b.dim(),
            Body::Polytope(b) => b.dim(),
            Body::Flat(b) => b.dim(),
            Body::DiskCone(b) => b.dim(),
        }
    }

    fn contains(&self, x: &Vector, tol: f64) -> Result<bool> {
        match self {
            Body::Segment(b) => b.contains(x, tol),
            Body::Simplex(b) => b.contains(x, tol),
            Body::Polytope(b) => b.contains(x, tol),
            Body::Flat(b) => b.contains(x, tol),
            Body::DiskCone(b) => b.contains(x, tol),
        }
    }
}

/// Shifts every defining point of the body by `t`.
pub fn translate(body: &Body, t: &Vector) -> Result<Body> {
    t.check_dim(body.dim())?;
    let shift = |v: &Vector| v + t;
    Ok(match body {
        Body::Segment(s) => Body::Segment(Segment::new(shift(&s.e0), shift(&s.e1))?),
        Body::Simplex(s) => Body::Simplex(Simplex {
            vertices: s.vertices.iter().map(shift).collect(),
        }),
        Body::Polytope(p) => Body::Polytope(Polytope::new(p.vertices.iter().map(shift).collect())?),
        Body::Flat(f) => Body::Flat(AffineFlat {
            base: shift(&f.base),
            directions: f.directions.clone(),
        }),
        Body::DiskCone(_) => return Err(GeomError::Unsupported("disk_cone translation")),
    })
}
