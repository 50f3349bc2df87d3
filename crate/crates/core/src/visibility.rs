//! Visible points of a convex body as seen from an outside point.
//!
//! A point `v` of the body `C` is visible from `x` when the half-open
//! segment `[x, v[` misses `C`. Every query here reduces to the scalar
//! `lambda* = max{ l in [0,1] : l x + (1 - l) v in C }`, which is zero
//! exactly for visible points. For vertex-described bodies the same verdict
//! is also available through the translated cone `cone(C - v) + v`: `v` is
//! blocked iff `x` lies in that cone.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bodies::{nnls_hull, Body, ConvexBody, DiskCone, Polytope};
use crate::error::{GeomError, Result};
use crate::nnls::nnls;
use crate::vectorspace::Vector;

/// `lambda*` at or below this value means "visible".
pub const VIS_TOL: f64 = 1e-7;

/// Tolerance for the "candidate lies in the body" preconditions.
pub const BODY_TOL: f64 = 1e-8;

/// Bisection steps for `lambda*`; resolves the interval to `2^-60`.
pub const BISECTION_STEPS: u32 = 60;

/// Relative membership tolerance used inside the bisection.
///
/// Must stay well below `VIS_TOL` times the sine of the angle between the
/// ray and the boundary, otherwise grazing rays read as blocked.
pub const BISECTION_MEMBERSHIP_TOL: f64 = 1e-12;

/// Relative residual below which `x - v` is taken to lie in the cone.
pub const CONE_TOL: f64 = 1e-8;

/// Squared gaps at or below this value are reported as `NotDisjoint`.
pub const SEPARATION_MIN_GAP: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub vis_tol: f64,
    pub body_tol: f64,
    pub bisection_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            vis_tol: VIS_TOL,
            body_tol: BODY_TOL,
            bisection_tol: BISECTION_MEMBERSHIP_TOL,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    LambdaScan,
    ConeTest,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VisibilityCertificate {
    pub visible: bool,
    pub lambda_star: f64,
    /// A point of `[x, v[` inside the body, when `v` is blocked.
    pub blocker: Option<Vector>,
    pub method: Method,
    /// For vertex bodies: whether the translated-cone test agrees.
    pub cone_agrees: Option<bool>,
}

fn is_degenerate(x: &Vector, v: &Vector) -> bool {
    x.dist(v) <= 1e-12 * (1.0 + x.norm())
}

fn require_member<B: ConvexBody + ?Sized>(body: &B, v: &Vector, tol: f64) -> Result<()> {
    v.check_dim(body.dim())?;
    if body.contains(v, tol)? {
        Ok(())
    } else {
        Err(GeomError::VNotInBody)
    }
}

/// `max{ l in [0,1] : l x + (1 - l) v in body }` by bisection.
pub fn lambda_max<B: ConvexBody + ?Sized>(body: &B, x: &Vector, v: &Vector) -> Result<f64> {
    lambda_max_with(body, x, v, &Tolerances::default())
}

pub fn lambda_max_with<B: ConvexBody + ?Sized>(
    body: &B,
    x: &Vector,
    v: &Vector,
    tols: &Tolerances,
) -> Result<f64> {
    x.check_dim(body.dim())?;
    require_member(body, v, tols.body_tol)?;
    if is_degenerate(x, v) {
        return Ok(1.0);
    }
    let tol = tols.bisection_tol * (1.0 + x.dist(v));
    if body.contains(x, tol)? {
        return Ok(1.0);
    }
    // The feasible set is an interval [0, lambda*] since v is in the body.
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if body.contains(&x.lerp(mid, v), tol)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Decides whether `v` is visible from `x`.
pub fn is_visible(body: &Body, x: &Vector, v: &Vector) -> Result<VisibilityCertificate> {
    is_visible_with(body, x, v, &Tolerances::default())
}

pub fn is_visible_with(
    body: &Body,
    x: &Vector,
    v: &Vector,
    tols: &Tolerances,
) -> Result<VisibilityCertificate> {
    x.check_dim(body.dim())?;
    require_member(body, v, tols.body_tol)?;
    if is_degenerate(x, v) {
        // [x, v[ is empty.
        return Ok(VisibilityCertificate {
            visible: true,
            lambda_star: 0.0,
            blocker: None,
            method: Method::LambdaScan,
            cone_agrees: None,
        });
    }
    let lambda_star = lambda_max_with(body, x, v, tols)?;
    let visible = lambda_star <= tols.vis_tol;
    let blocker = (!visible).then(|| x.lerp(lambda_star, v));
    let cone_agrees = match body.vertices() {
        Some(vertices) => {
            let p = Polytope::new(vertices)?;
            Some(in_translated_cone(&p, v, x)? != visible)
        }
        None => None,
    };
    Ok(VisibilityCertificate {
        visible,
        lambda_star,
        blocker,
        method: Method::LambdaScan,
        cone_agrees,
    })
}

/// Visibility verdict from the translated-cone test alone.
pub fn is_visible_by_cone(p: &Polytope, x: &Vector, v: &Vector) -> Result<VisibilityCertificate> {
    let blocked = !is_degenerate(x, v) && in_translated_cone(p, v, x)?;
    Ok(VisibilityCertificate {
        visible: !blocked,
        lambda_star: if blocked { f64::NAN } else { 0.0 },
        blocker: None,
        method: Method::ConeTest,
        cone_agrees: None,
    })
}

/// Result of walking from `toward` back to the first point hit from `from`.
#[derive(Debug, Clone, PartialEq)]
pub struct Raycast {
    pub point: Vector,
    pub lambda: f64,
}

/// `v0 = l0 x + (1 - l0) y` with `l0 = lambda*(x, y)`: the point where the
/// segment from `x` toward `y` first meets the body.
pub fn raycast<B: ConvexBody + ?Sized>(body: &B, x: &Vector, y: &Vector) -> Result<Raycast> {
    raycast_with(body, x, y, &Tolerances::default())
}

pub fn raycast_with<B: ConvexBody + ?Sized>(
    body: &B,
    x: &Vector,
    y: &Vector,
    tols: &Tolerances,
) -> Result<Raycast> {
    let lambda = lambda_max_with(body, x, y, tols)?;
    Ok(Raycast {
        point: x.lerp(lambda, y),
        lambda,
    })
}

pub fn raycast_visible<B: ConvexBody + ?Sized>(body: &B, x: &Vector, y: &Vector) -> Result<Vector> {
    Ok(raycast(body, x, y)?.point)
}

/// True iff `x` lies in `cone(conv(p) - v) + v`, i.e. `x - v` is a
/// nonnegative combination of the `v_i - v`.
pub fn in_translated_cone(p: &Polytope, v: &Vector, x: &Vector) -> Result<bool> {
    x.check_dim(p.dim())?;
    require_member(p, v, BODY_TOL)?;
    let target = x - v;
    let columns: Vec<Vec<f64>> = p
        .vertices()
        .iter()
        .map(|vi| (vi - v).into_coords())
        .collect();
    let sol = nnls(&columns, target.coords(), 50 * p.len())?;
    Ok(sol.residual_norm <= CONE_TOL * (1.0 + target.norm()))
}

/// Membership as the intersection of the translated cones at the vertices.
pub fn member_by_cone_intersection(p: &Polytope, x: &Vector) -> Result<bool> {
    for e in p.vertices() {
        if !in_translated_cone(p, e, x)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A seeded point of the body, used as a raycast target.
pub fn random_body_point<R: Rng>(body: &Body, rng: &mut R) -> Vector {
    let hull_point = |vertices: &[Vector], rng: &mut R| {
        let raw: Vec<f64> = vertices
            .iter()
            .map(|_| -(1.0 - rng.gen::<f64>()).ln())
            .collect();
        let total: f64 = raw.iter().sum();
        let w: Vec<f64> = raw.iter().map(|r| r / total).collect();
        Vector::combination(vertices, &w)
    };
    match body {
        Body::Segment(s) => s.e1().lerp(rng.gen::<f64>(), s.e0()),
        Body::Simplex(s) => hull_point(s.vertices(), rng),
        Body::Polytope(p) => hull_point(p.vertices(), rng),
        Body::Flat(f) => {
            let coeffs: Vec<f64> = f
                .directions()
                .iter()
                .map(|_| rng.gen_range(-1.0..1.0))
                .collect();
            f.point_at(&coeffs)
        }
        Body::DiskCone(_) => {
            let rho = rng.gen_range(0.0..2.0);
            let r = rng.gen::<f64>().sqrt();
            let theta = rng.gen_range(0.0..std::f64::consts::TAU);
            DiskCone::point(rho, r * theta.cos(), 1.0 + r * theta.sin())
        }
    }
}

/// A visible point together with its certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct VisibleSample {
    pub point: Vector,
    pub certificate: VisibilityCertificate,
}

/// `count` visible points obtained by raycasting from `x` toward seeded
/// random points of the body.
pub fn sample_visible(body: &Body, x: &Vector, count: usize, seed: u64) -> Result<Vec<Vector>> {
    Ok(sample_visible_certified(body, x, count, seed)?
        .into_iter()
        .map(|s| s.point)
        .collect())
}

pub fn sample_visible_certified(
    body: &Body,
    x: &Vector,
    count: usize,
    seed: u64,
) -> Result<Vec<VisibleSample>> {
    sample_visible_certified_with(body, x, count, seed, &Tolerances::default())
}

pub fn sample_visible_certified_with(
    body: &Body,
    x: &Vector,
    count: usize,
    seed: u64,
    tols: &Tolerances,
) -> Result<Vec<VisibleSample>> {
    x.check_dim(body.dim())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let target = random_body_point(body, &mut rng);
        let point = raycast_with(body, x, &target, tols)?.point;
        let certificate = is_visible_with(body, x, &point, tols)?;
        out.push(VisibleSample { point, certificate });
    }
    Ok(out)
}

/// Strong separation of a segment from a polytope: `<normal, s> <= offset`
/// on the segment and `<normal, c> >= offset` on the body, with squared
/// closest-pair distance `gap`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparationCertificate {
    pub normal: Vector,
    pub offset: f64,
    pub gap: f64,
}

impl SeparationCertificate {
    /// Largest value of the functional over `[x, y]`.
    pub fn segment_max(&self, x: &Vector, y: &Vector) -> f64 {
        self.normal.dot(x).max(self.normal.dot(y))
    }

    /// Smallest value of the functional over the polytope.
    pub fn body_min(&self, p: &Polytope) -> f64 {
        p.vertices()
            .iter()
            .map(|v| self.normal.dot(v))
            .fold(f64::INFINITY, f64::min)
    }

    /// Checks the separation inequalities against the segment endpoints and
    /// every vertex.
    pub fn separates(&self, p: &Polytope, x: &Vector, y: &Vector) -> bool {
        let lo = self.segment_max(x, y);
        let hi = self.body_min(p);
        lo <= self.offset && self.offset <= hi && hi > lo
    }
}

/// Separating functional for a segment `[x, y]` disjoint from `conv(p)`.
///
/// The closest pair comes from the minimum-norm point of the difference
/// body `conv{v_i - x, v_i - y}`: hull weights `a_i` on `v_i - x` and `b_i`
/// on `v_i - y` give `q = sum (a_i + b_i) v_i` and
/// `s = (sum a) x + (sum b) y`.
pub fn separate_segment(p: &Polytope, x: &Vector, y: &Vector) -> Result<SeparationCertificate> {
    x.check_dim(p.dim())?;
    y.check_dim(p.dim())?;
    let m = p.len();
    let diff: Vec<Vector> = p
        .vertices()
        .iter()
        .map(|v| v - x)
        .chain(p.vertices().iter().map(|v| v - y))
        .collect();
    let fit = nnls_hull(&Polytope::from_unique(diff), &Vector::zeros(p.dim()))?;
    let (a, b) = fit.weights.split_at(m);
    let merged: Vec<f64> = a.iter().zip(b).map(|(u, w)| u + w).collect();
    let q = Vector::combination(p.vertices(), &merged);
    let sa: f64 = a.iter().sum();
    let s = x.scale(sa).add_scaled(1.0 - sa, y);

    let normal = &q - &s;
    let gap = normal.norm_sq();
    if gap <= SEPARATION_MIN_GAP {
        return Err(GeomError::NotDisjoint { gap });
    }
    // At the exact closest pair these are <n, s> and <n, s> + gap.
    let seg_max = normal.dot(x).max(normal.dot(y));
    let body_min = p
        .vertices()
        .iter()
        .map(|v| normal.dot(v))
        .fold(f64::INFINITY, f64::min);
    if body_min <= seg_max {
        return Err(GeomError::NotDisjoint {
            gap: body_min - seg_max,
        });
    }
    Ok(SeparationCertificate {
        normal,
        offset: 0.5 * (seg_max + body_min),
        gap,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Endpoint {
    X,
    Y,
    Both,
}

/// Which endpoint of `[x, y]` maximizes the certificate's functional.
pub fn argmax_on_segment(cert: &SeparationCertificate, x: &Vector, y: &Vector) -> Endpoint {
    let diff = cert.normal.dot(&(y - x));
    let scale = cert.normal.norm() * x.dist(y);
    if diff.abs() <= 1e-12 * scale {
        Endpoint::Both
    } else if diff > 0.0 {
        Endpoint::Y
    } else {
        Endpoint::X
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::{Segment, Simplex};

    fn v(c: &[f64]) -> Vector {
        Vector::new(c.to_vec()).unwrap()
    }

    fn unit_square() -> Polytope {
        Polytope::new(vec![
            v(&[0.0, 0.0]),
            v(&[1.0, 0.0]),
            v(&[1.0, 1.0]),
            v(&[0.0, 1.0]),
        ])
        .unwrap()
    }

    fn arc(t: f64) -> Vector {
        v(&[2.0, t.sin(), 1.0 + t.cos()])
    }

    #[test]
    fn lambda_max_examples() {
        let sq = unit_square();
        let x = v(&[0.5, 0.5]);
        assert_eq!(lambda_max(&sq, &x, &x).unwrap(), 1.0);

        let origin = v(&[0.0, 0.0, 0.0]);
        let l = lambda_max(&DiskCone, &origin, &v(&[2.0, 0.0, 0.0])).unwrap();
        assert!((l - 0.5).abs() < 1e-9);
        let l = lambda_max(&DiskCone, &origin, &v(&[2.0, 1.0, 1.0])).unwrap();
        assert!(l <= VIS_TOL);
    }

    #[test]
    fn lambda_max_requires_member() {
        let err = lambda_max(&unit_square(), &v(&[3.0, 3.0]), &v(&[2.0, 2.0])).unwrap_err();
        assert_eq!(err, GeomError::VNotInBody);
    }

    #[test]
    fn visibility_examples() {
        let cone = Body::DiskCone(DiskCone);
        let origin = v(&[0.0, 0.0, 0.0]);
        let c = is_visible(&cone, &origin, &v(&[2.0, 1.0, 1.0])).unwrap();
        assert!(c.visible && c.blocker.is_none() && c.cone_agrees.is_none());

        let c = is_visible(&cone, &origin, &v(&[2.0, 0.0, 0.0])).unwrap();
        assert!(!c.visible);
        assert!((c.lambda_star - 0.5).abs() < 1e-9);
        let blocker = c.blocker.unwrap();
        assert!(DiskCone.contains(&blocker, 1e-8).unwrap());

        let sq = Body::Polytope(unit_square());
        let inside = v(&[0.3, 0.3]);
        assert!(is_visible(&sq, &inside, &inside).unwrap().visible);
        assert!(!is_visible(&sq, &inside, &v(&[1.0, 1.0])).unwrap().visible);
    }

    #[test]
    fn arc_points_are_visible_but_limit_is_not() {
        let cone = Body::DiskCone(DiskCone);
        let origin = v(&[0.0, 0.0, 0.0]);
        for k in 1..=100 {
            let t = k as f64 * std::f64::consts::PI / 101.0;
            assert!(
                is_visible(&cone, &origin, &arc(t)).unwrap().visible,
                "t = {t}"
            );
        }
        assert!(
            !is_visible(&cone, &origin, &arc(std::f64::consts::PI))
                .unwrap()
                .visible
        );
    }

    #[test]
    fn polytope_certificates_cross_check() {
        let sq = Body::Polytope(unit_square());
        let x = v(&[2.0, 0.5]);
        let c = is_visible(&sq, &x, &v(&[1.0, 0.5])).unwrap();
        assert!(c.visible);
        assert_eq!(c.cone_agrees, Some(true));
        let c = is_visible(&sq, &x, &v(&[0.0, 0.5])).unwrap();
        assert!(!c.visible);
        assert_eq!(c.cone_agrees, Some(true));
        assert!((c.lambda_star - 0.5).abs() < 1e-9);
    }

    #[test]
    fn raycast_examples() {
        let sq = unit_square();
        let x = v(&[2.0, 0.5]);
        let r = raycast(&sq, &x, &v(&[0.0, 0.5])).unwrap();
        assert!(r.point.dist(&v(&[1.0, 0.5])) < 1e-9);
        let r = raycast(&sq, &x, &v(&[1.0, 0.5])).unwrap();
        assert!(r.lambda <= VIS_TOL);
        assert!(r.point.dist(&v(&[1.0, 0.5])) < 1e-9);
        let inside = v(&[0.25, 0.75]);
        assert_eq!(
            raycast_visible(&sq, &inside, &v(&[1.0, 0.0])).unwrap(),
            inside
        );
    }

    #[test]
    fn translated_cone_examples() {
        let sq = unit_square();
        let x = v(&[2.0, 0.5]);
        assert!(!in_translated_cone(&sq, &v(&[1.0, 0.5]), &x).unwrap());
        assert!(in_translated_cone(&sq, &v(&[0.0, 0.5]), &x).unwrap());
        assert!(in_translated_cone(&sq, &v(&[1.0, 1.0]), &v(&[0.2, 0.9])).unwrap());
        assert_eq!(
            in_translated_cone(&sq, &v(&[3.0, 0.0]), &x).unwrap_err(),
            GeomError::VNotInBody
        );
    }

    #[test]
    fn cone_intersection_examples() {
        let sq = unit_square();
        assert!(member_by_cone_intersection(&sq, &v(&[0.5, 0.5])).unwrap());
        assert!(!member_by_cone_intersection(&sq, &v(&[2.0, 0.5])).unwrap());
        let tri = Polytope::new(vec![v(&[0.0, 0.0]), v(&[1.0, 0.0]), v(&[0.0, 1.0])]).unwrap();
        assert!(member_by_cone_intersection(&tri, &v(&[0.5, 0.5])).unwrap());
    }

    #[test]
    fn sampling_examples() {
        let cone = Body::DiskCone(DiskCone);
        let origin = v(&[0.0, 0.0, 0.0]);
        assert!(sample_visible(&cone, &origin, 0, 1).unwrap().is_empty());

        let samples = sample_visible_certified(&cone, &origin, 64, 7).unwrap();
        assert_eq!(samples.len(), 64);
        for s in &samples {
            assert!(s.point[0] >= 1.0 - 1e-12);
            assert!(s.certificate.visible);
        }
        let again = sample_visible(&cone, &origin, 64, 7).unwrap();
        assert_eq!(
            again,
            samples.into_iter().map(|s| s.point).collect::<Vec<_>>()
        );

        let tri = Body::Simplex(
            Simplex::new(vec![v(&[0.0, 0.0]), v(&[1.0, 0.0]), v(&[0.0, 1.0])]).unwrap(),
        );
        let inside = v(&[0.2, 0.2]);
        assert_eq!(
            sample_visible(&tri, &inside, 5, 3).unwrap(),
            vec![inside; 5]
        );
    }

    #[test]
    fn separation_examples() {
        let sq = unit_square();
        let (x, y) = (v(&[3.0, 0.5]), v(&[2.0, 0.5]));
        let cert = separate_segment(&sq, &x, &y).unwrap();
        assert!((cert.gap - 1.0).abs() < 1e-12);
        assert!(cert.normal.dist(&v(&[-1.0, 0.0])) < 1e-12);
        assert!(cert.separates(&sq, &x, &y));
        assert_eq!(argmax_on_segment(&cert, &x, &y), Endpoint::Y);

        let err = separate_segment(&sq, &v(&[0.5, 2.0]), &v(&[0.5, 0.5])).unwrap_err();
        assert!(matches!(err, GeomError::NotDisjoint { .. }));

        let p = v(&[-1.0, -2.0]);
        let cert = separate_segment(&sq, &p, &p).unwrap();
        assert!(cert.separates(&sq, &p, &p));
        assert!((cert.gap - 5.0).abs() < 1e-12);
    }

    #[test]
    fn argmax_examples() {
        let cert = SeparationCertificate {
            normal: v(&[-1.0, 0.0]),
            offset: -1.5,
            gap: 1.0,
        };
        assert_eq!(
            argmax_on_segment(&cert, &v(&[3.0, 0.5]), &v(&[2.0, 0.5])),
            Endpoint::Y
        );
        assert_eq!(
            argmax_on_segment(&cert, &v(&[3.0, 0.0]), &v(&[3.0, 1.0])),
            Endpoint::Both
        );
        let cert = SeparationCertificate {
            normal: v(&[1.0, 0.0]),
            offset: 0.0,
            gap: 1.0,
        };
        assert_eq!(
            argmax_on_segment(&cert, &v(&[0.0, 0.0]), &v(&[1.0, 0.0])),
            Endpoint::Y
        );
    }

    #[test]
    fn segment_body_raycast() {
        let seg = Body::Segment(Segment::new(v(&[0.0, 0.0]), v(&[2.0, 0.0])).unwrap());
        let x = v(&[-1.0, 0.0]);
        let r = raycast(&seg, &x, &v(&[1.5, 0.0])).unwrap();
        assert!(r.point.dist(&v(&[0.0, 0.0])) < 1e-9);
    }
}
