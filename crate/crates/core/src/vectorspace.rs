//! Dense linear algebra on small real vectors.
//!
//! Everything here is plain `f64` arithmetic sized for desk-scale problems
//! (a few dozen coordinates at most). [`solve_spd`] and
//! [`is_affinely_independent`] share one pivoted Cholesky factorization for
//! rank decisions.

use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};

use crate::error::{GeomError, Result};

/// Relative pivot threshold of the pivoted Cholesky factorization.
pub const PIVOT_REL_TOL: f64 = 1e-12;

/// A point or displacement in `R^d`.
#[derive(Clone, PartialEq)]
pub struct Vector {
    coords: Vec<f64>,
}

impl Vector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(GeomError::Empty("vector coordinates"));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(GeomError::NonFinite);
        }
        Ok(Self { coords })
    }

    /// Builds a vector from coordinates already known to be finite.
    ///
    /// Panics on an empty slice; used internally where the dimension is
    /// inherited from validated inputs.
    pub(crate) fn from_raw(coords: Vec<f64>) -> Self {
        debug_assert!(!coords.is_empty());
        debug_assert!(coords.iter().all(|c| c.is_finite()));
        Self { coords }
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "vector dimension must be positive");
        Self {
            coords: vec![0.0; dim],
        }
    }

    /// The `i`-th standard basis vector.
    pub fn unit(dim: usize, i: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.coords[i] = 1.0;
        v
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }

    pub fn check_dim(&self, expected: usize) -> Result<()> {
        if self.dim() == expected {
            Ok(())
        } else {
            Err(GeomError::DimensionMismatch {
                expected,
                found: self.dim(),
            })
        }
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        dot(&self.coords, &other.coords)
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn norm_inf(&self) -> f64 {
        self.coords.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn dist(&self, other: &Vector) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    pub fn scale(&self, s: f64) -> Vector {
        Vector::from_raw(self.coords.iter().map(|c| c * s).collect())
    }

    /// `self + s * other`
    pub fn add_scaled(&self, s: f64, other: &Vector) -> Vector {
        Vector::from_raw(
            self.coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + s * b)
                .collect(),
        )
    }

    /// `lambda * self + (1 - lambda) * other`
    pub fn lerp(&self, lambda: f64, other: &Vector) -> Vector {
        if lambda == 1.0 {
            return self.clone();
        }
        if lambda == 0.0 {
            return other.clone();
        }
        Vector::from_raw(
            self.coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| lambda * a + (1.0 - lambda) * b)
                .collect(),
        )
    }

    /// Convex (or affine) combination `sum_i weights[i] * points[i]`.
    pub fn combination(points: &[Vector], weights: &[f64]) -> Vector {
        assert_eq!(points.len(), weights.len());
        let dim = points[0].dim();
        let mut out = vec![0.0; dim];
        for (p, &w) in points.iter().zip(weights) {
            if w == 0.0 {
                continue;
            }
            for (o, c) in out.iter_mut().zip(&p.coords) {
                *o += w * c;
            }
        }
        Vector::from_raw(out)
    }
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.coords).finish()
    }
}

impl Index<usize> for Vector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.coords[i]
    }
}

impl Add for &Vector {
    type Output = Vector;

    fn add(self, rhs: &Vector) -> Vector {
        self.add_scaled(1.0, rhs)
    }
}

impl Sub for &Vector {
    type Output = Vector;

    fn sub(self, rhs: &Vector) -> Vector {
        self.add_scaled(-1.0, rhs)
    }
}

impl Mul<f64> for &Vector {
    type Output = Vector;

    fn mul(self, rhs: f64) -> Vector {
        self.scale(rhs)
    }
}

impl Neg for &Vector {
    type Output = Vector;

    fn neg(self) -> Vector {
        self.scale(-1.0)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Checks that all vectors share one dimension and returns it.
pub fn common_dim(vectors: &[Vector]) -> Result<usize> {
    let first = vectors.first().ok_or(GeomError::Empty("vector list"))?;
    let dim = first.dim();
    for v in &vectors[1..] {
        v.check_dim(dim)?;
    }
    Ok(dim)
}

/// Symmetric `n x n` matrix, stored densely.
#[derive(Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl SymMatrix {
    /// Builds a matrix from rows; fails unless it is square and exactly
    /// symmetric.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(GeomError::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            entries.extend_from_slice(row);
        }
        if entries.iter().any(|e| !e.is_finite()) {
            return Err(GeomError::NonFinite);
        }
        for i in 0..n {
            for j in 0..i {
                if entries[i * n + j] != entries[j * n + i] {
                    return Err(GeomError::InvalidArgument("matrix is not symmetric"));
                }
            }
        }
        Ok(Self { n, entries })
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            entries[i * n + i] = 1.0;
        }
        Self { n, entries }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.entries
            .chunks(self.n.max(1))
            .take(self.n)
            .map(<[f64]>::to_vec)
            .collect()
    }

    pub(crate) fn from_gram_slices(vectors: &[&[f64]]) -> Self {
        let n = vectors.len();
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let g = dot(vectors[i], vectors[j]);
                entries[i * n + j] = g;
                entries[j * n + i] = g;
            }
        }
        Self { n, entries }
    }

    fn max_diagonal(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).fold(0.0, f64::max)
    }
}

impl fmt::Debug for SymMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows()).finish()
    }
}

/// Gram matrix `G[i][j] = <vectors[i], vectors[j]>`.
pub fn gram_matrix(vectors: &[Vector]) -> Result<SymMatrix> {
    common_dim(vectors)?;
    let slices: Vec<&[f64]> = vectors.iter().map(Vector::coords).collect();
    Ok(SymMatrix::from_gram_slices(&slices))
}

/// Diagonally pivoted Cholesky factorization `P^T A P = L L^T`, truncated at
/// the first pivot that falls below `PIVOT_REL_TOL * max_diag`.
#[derive(Debug, Clone)]
pub struct PivotedCholesky {
    n: usize,
    /// Lower-triangular factor in pivoted order, row-major `n x n`.
    lower: Vec<f64>,
    /// `perm[k]` is the original index placed at pivoted position `k`.
    perm: Vec<usize>,
    rank: usize,
    /// First rejected pivot, if the factorization stopped early.
    failed_pivot: Option<f64>,
    tolerance: f64,
}

impl PivotedCholesky {
    pub fn factor(m: &SymMatrix) -> Self {
        let n = m.size();
        let tolerance = PIVOT_REL_TOL * m.max_diagonal();
        let mut a = m.entries.clone();
        let mut lower = vec![0.0; n * n];
        let mut perm: Vec<usize> = (0..n).collect();
        let mut rank = n;
        let mut failed_pivot = None;

        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| a[i * n + i].total_cmp(&a[j * n + j]))
                .expect("non-empty pivot range");
            let pivot = a[p * n + p];
            if pivot <= tolerance {
                rank = k;
                failed_pivot = Some(pivot);
                break;
            }
            if p != k {
                perm.swap(k, p);
                for col in 0..n {
                    a.swap(k * n + col, p * n + col);
                }
                for row in 0..n {
                    a.swap(row * n + k, row * n + p);
                }
                for col in 0..k {
                    lower.swap(k * n + col, p * n + col);
                }
            }
            let diag = a[k * n + k].sqrt();
            lower[k * n + k] = diag;
            for i in (k + 1)..n {
                lower[i * n + k] = a[i * n + k] / diag;
            }
            for i in (k + 1)..n {
                let lik = lower[i * n + k];
                for j in (k + 1)..=i {
                    let v = a[i * n + j] - lik * lower[j * n + k];
                    a[i * n + j] = v;
                    a[j * n + i] = v;
                }
            }
        }

        Self {
            n,
            lower,
            perm,
            rank,
            failed_pivot,
            tolerance,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_full_rank(&self) -> bool {
        self.rank == self.n
    }

    /// Solves `A x = rhs` for the full-rank case.
    pub fn solve_slice(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        if rhs.len() != self.n {
            return Err(GeomError::DimensionMismatch {
                expected: self.n,
                found: rhs.len(),
            });
        }
        if !self.is_full_rank() {
            return Err(GeomError::NotPositiveDefinite {
                pivot: self.failed_pivot.unwrap_or(0.0),
                tolerance: self.tolerance,
            });
        }
        let n = self.n;
        let mut y: Vec<f64> = self.perm.iter().map(|&p| rhs[p]).collect();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s -= self.lower[i * n + k] * y[k];
            }
            y[i] = s / self.lower[i * n + i];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in (i + 1)..n {
                s -= self.lower[k * n + i] * y[k];
            }
            y[i] = s / self.lower[i * n + i];
        }
        let mut x = vec![0.0; n];
        for (k, &p) in self.perm.iter().enumerate() {
            x[p] = y[k];
        }
        Ok(x)
    }
}

/// Solves the symmetric positive-definite system `m * alpha = rhs`.
pub fn solve_spd(m: &SymMatrix, rhs: &Vector) -> Result<Vector> {
    let x = PivotedCholesky::factor(m).solve_slice(rhs.coords())?;
    Ok(Vector::from_raw(x))
}

/// True iff `points[1..] - points[0]` are linearly independent.
pub fn is_affinely_independent(points: &[Vector]) -> Result<bool> {
    let dim = common_dim(points)?;
    if points.len() == 1 {
        return Ok(true);
    }
    if points.len() > dim + 1 {
        return Ok(false);
    }
    let diffs: Vec<Vector> = points[1..].iter().map(|p| p - &points[0]).collect();
    let slices: Vec<&[f64]> = diffs.iter().map(Vector::coords).collect();
    Ok(PivotedCholesky::factor(&SymMatrix::from_gram_slices(&slices)).is_full_rank())
}

/// Nearest point of the affine flat `base + span(directions)` to `x`.
///
/// Returns the direction coefficients together with the foot point.
/// `directions` may be empty. The Gram factorization decides rank; the
/// coefficients come from Householder QR when it accepts the columns, since
/// the normal equations lose half the digits on thin simplices.
pub(crate) fn affine_foot(
    base: &Vector,
    directions: &[Vector],
    x: &Vector,
) -> Result<(Vec<f64>, Vector)> {
    if directions.is_empty() {
        return Ok((Vec::new(), base.clone()));
    }
    let slices: Vec<&[f64]> = directions.iter().map(Vector::coords).collect();
    let gram = SymMatrix::from_gram_slices(&slices);
    let offset = x - base;
    let rhs: Vec<f64> = directions.iter().map(|d| d.dot(&offset)).collect();
    let normal = PivotedCholesky::factor(&gram).solve_slice(&rhs)?;
    let alpha = least_squares(&slices, offset.coords()).unwrap_or(normal);
    let mut foot = base.clone();
    for (a, d) in alpha.iter().zip(directions) {
        foot = foot.add_scaled(*a, d);
    }
    Ok((alpha, foot))
}

/// Orthonormal basis of `span(vectors)` by modified Gram-Schmidt with one
/// reorthogonalization pass. Vectors whose residual falls below `rel_tol`
/// times their original norm are dropped.
pub fn orthonormal_basis(vectors: &[Vector], rel_tol: f64) -> Vec<Vector> {
    let mut basis: Vec<Vector> = Vec::new();
    for v in vectors {
        let original = v.norm();
        if original == 0.0 {
            continue;
        }
        let mut r = v.clone();
        for _ in 0..2 {
            for q in &basis {
                r = r.add_scaled(-q.dot(&r), q);
            }
        }
        let n = r.norm();
        if n > rel_tol * original {
            basis.push(r.scale(1.0 / n));
        }
    }
    basis
}

/// Dense least squares `min ||A z - b||` by Householder QR, where `A` is
/// given column by column (each of length `b.len()`).
///
/// Returns `None` when a column is numerically dependent on the earlier
/// ones (`|R_kk| <= 1e-13 * ||a_k||`).
pub(crate) fn least_squares(columns: &[&[f64]], b: &[f64]) -> Option<Vec<f64>> {
    let m = b.len();
    let n = columns.len();
    if n == 0 {
        return Some(Vec::new());
    }
    if n > m {
        return None;
    }
    // Column-major working copy.
    let mut a: Vec<Vec<f64>> = columns.iter().map(|c| c.to_vec()).collect();
    let col_norms: Vec<f64> = a.iter().map(|c| dot(c, c).sqrt()).collect();
    let mut rhs = b.to_vec();
    let mut diag = vec![0.0; n];

    for k in 0..n {
        let alpha_norm = a[k][k..].iter().map(|v| v * v).sum::<f64>().sqrt();
        if alpha_norm <= 1e-13 * col_norms[k].max(f64::MIN_POSITIVE) {
            return None;
        }
        let alpha = if a[k][k] > 0.0 {
            -alpha_norm
        } else {
            alpha_norm
        };
        // Householder vector u = a_k[k..] - alpha e_1, stored in place.
        let mut u: Vec<f64> = a[k][k..].to_vec();
        u[0] -= alpha;
        let u_norm_sq: f64 = u.iter().map(|v| v * v).sum();
        diag[k] = alpha;
        if u_norm_sq > 0.0 {
            for col in a.iter_mut().skip(k + 1) {
                let s = 2.0 * dot(&u, &col[k..]) / u_norm_sq;
                for (c, ui) in col[k..].iter_mut().zip(&u) {
                    *c -= s * ui;
                }
            }
            let s = 2.0 * dot(&u, &rhs[k..]) / u_norm_sq;
            for (c, ui) in rhs[k..].iter_mut().zip(&u) {
                *c -= s * ui;
            }
        }
    }

    let mut z = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = rhs[i];
        for j in (i + 1)..n {
            s -= a[j][i] * z[j];
        }
        z[i] = s / diag[i];
    }
    Some(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(c: &[f64]) -> Vector {
        Vector::new(c.to_vec()).unwrap()
    }

    #[test]
    fn rejects_bad_coordinates() {
        assert_eq!(
            Vector::new(vec![]).unwrap_err(),
            GeomError::Empty("vector coordinates")
        );
        assert_eq!(
            Vector::new(vec![1.0, f64::NAN]).unwrap_err(),
            GeomError::NonFinite
        );
        assert_eq!(
            Vector::new(vec![f64::INFINITY]).unwrap_err(),
            GeomError::NonFinite
        );
    }

    #[test]
    fn gram_examples() {
        let g = gram_matrix(&[v(&[1.0, 0.0]), v(&[0.0, 1.0])]).unwrap();
        assert_eq!(g.rows(), vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        let g = gram_matrix(&[v(&[1.0, 1.0]), v(&[1.0, -1.0])]).unwrap();
        assert_eq!(g.rows(), vec![vec![2.0, 0.0], vec![0.0, 2.0]]);
        let g = gram_matrix(&[v(&[1.0, 2.0]), v(&[2.0, 4.0])]).unwrap();
        assert_eq!(g.rows(), vec![vec![5.0, 10.0], vec![10.0, 20.0]]);
    }

    #[test]
    fn gram_dimension_mismatch() {
        let err = gram_matrix(&[v(&[1.0, 0.0]), v(&[1.0, 0.0, 0.0])]).unwrap_err();
        assert_eq!(
            err,
            GeomError::DimensionMismatch {
                expected: 2,
                found: 3
            }
        );
    }

    #[test]
    fn solve_examples() {
        let x = solve_spd(&SymMatrix::identity(2), &v(&[3.0, 4.0])).unwrap();
        assert_eq!(x.coords(), &[3.0, 4.0]);
        let m = SymMatrix::from_rows(&[vec![2.0, 0.0], vec![0.0, 2.0]]).unwrap();
        let x = solve_spd(&m, &v(&[2.0, 4.0])).unwrap();
        assert!(x.dist(&v(&[1.0, 2.0])) < 1e-15);
        let m = SymMatrix::from_rows(&[vec![5.0, 10.0], vec![10.0, 20.0]]).unwrap();
        assert!(matches!(
            solve_spd(&m, &v(&[1.0, 1.0])),
            Err(GeomError::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn solve_rhs_mismatch() {
        let err = solve_spd(&SymMatrix::identity(2), &v(&[1.0, 2.0, 3.0])).unwrap_err();
        assert_eq!(
            err,
            GeomError::DimensionMismatch {
                expected: 2,
                found: 3
            }
        );
    }

    #[test]
    fn from_rows_rejects_asymmetric() {
        assert!(SymMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 1.0]]).is_err());
    }

    #[test]
    fn affine_independence_examples() {
        let tri = [v(&[0.0, 0.0]), v(&[1.0, 0.0]), v(&[0.0, 1.0])];
        assert!(is_affinely_independent(&tri).unwrap());
        let line = [v(&[0.0, 0.0]), v(&[1.0, 1.0]), v(&[2.0, 2.0])];
        assert!(!is_affinely_independent(&line).unwrap());
        let four = [
            v(&[0.0, 0.0]),
            v(&[1.0, 0.0]),
            v(&[0.0, 1.0]),
            v(&[3.0, 7.0]),
        ];
        assert!(!is_affinely_independent(&four).unwrap());
        assert!(is_affinely_independent(&[v(&[5.0])]).unwrap());
    }

    #[test]
    fn least_squares_overdetermined() {
        // Fit y = a + b t through (0,1), (1,3), (2,5) exactly.
        let ones = [1.0, 1.0, 1.0];
        let t = [0.0, 1.0, 2.0];
        let z = least_squares(&[&ones, &t], &[1.0, 3.0, 5.0]).unwrap();
        assert!((z[0] - 1.0).abs() < 1e-14 && (z[1] - 2.0).abs() < 1e-14);
        assert!(least_squares(&[&t, &t], &[1.0, 3.0, 5.0]).is_none());
    }

    #[test]
    fn orthonormal_basis_drops_dependent() {
        let b = orthonormal_basis(
            &[
                v(&[1.0, 1.0, 0.0]),
                v(&[2.0, 2.0, 0.0]),
                v(&[0.0, 1.0, 0.0]),
            ],
            1e-12,
        );
        assert_eq!(b.len(), 2);
        for (i, q) in b.iter().enumerate() {
            assert!((q.norm() - 1.0).abs() < 1e-14);
            for p in &b[..i] {
                assert!(q.dot(p).abs() < 1e-14);
            }
        }
    }

    fn matrix_strategy() -> impl Strategy<Value = (usize, Vec<f64>, Vec<f64>, f64)> {
        (1usize..8).prop_flat_map(|n| {
            (
                Just(n),
                prop::collection::vec(-1.0f64..1.0, n * n),
                prop::collection::vec(-10.0f64..10.0, n),
                1e-3f64..1.0,
            )
        })
    }

    proptest! {
        #[test]
        fn gram_is_exactly_symmetric(vs in prop::collection::vec(prop::collection::vec(-5.0f64..5.0, 4), 1..7)) {
            let vectors: Vec<Vector> = vs.into_iter().map(|c| Vector::new(c).unwrap()).collect();
            let g = gram_matrix(&vectors).unwrap();
            for i in 0..g.size() {
                for j in 0..g.size() {
                    prop_assert_eq!(g.get(i, j).to_bits(), g.get(j, i).to_bits());
                }
            }
        }

        #[test]
        fn spd_residual_is_small((n, entries, rhs, eps) in matrix_strategy()) {
            // M = G^T G + eps I
            let mut rows = vec![vec![0.0; n]; n];
            for i in 0..n {
                for j in 0..n {
                    let s: f64 = (0..n).map(|k| entries[k * n + i] * entries[k * n + j]).sum();
                    rows[i][j] = s + if i == j { eps } else { 0.0 };
                }
            }
            for i in 0..n {
                for j in 0..i {
                    rows[i][j] = rows[j][i];
                }
            }
            let m = SymMatrix::from_rows(&rows).unwrap();
            let b = Vector::new(rhs).unwrap();
            let x = solve_spd(&m, &b).unwrap();
            let residual: f64 = (0..n)
                .map(|i| {
                    let r = (0..n).map(|j| rows[i][j] * x[j]).sum::<f64>() - b[i];
                    r * r
                })
                .sum::<f64>()
                .sqrt();
            prop_assert!(residual <= 1e-10 * (1.0 + b.norm()), "residual {residual:e}");
        }

        #[test]
        fn affine_independence_is_rotation_invariant(
            pts in prop::collection::vec(prop::collection::vec(-3i32..3, 3), 1..7)
        ) {
            // Small integer coordinates produce plenty of dependent configurations.
            let points: Vec<Vector> = pts
                .into_iter()
                .map(|c| Vector::new(c.into_iter().map(f64::from).collect()).unwrap())
                .collect();
            let reference = is_affinely_independent(&points).unwrap();
            for shift in 1..points.len() {
                let mut rotated = points.clone();
                rotated.rotate_left(shift);
                prop_assert_eq!(is_affinely_independent(&rotated).unwrap(), reference);
            }
        }
    }
}
