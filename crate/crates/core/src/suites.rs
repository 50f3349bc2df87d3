//! Seeded randomized cross-checks.
//!
//! Each suite draws its own instances from a `ChaCha8Rng` seeded with the
//! caller's seed, so a report is reproducible from `(count, seed)` alone.
//! An error raised inside an instance counts as a failure of that instance.

use std::f64::consts::PI;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bodies::{
    barycentric_coords, translate, AffineFlat, Body, ConvexBody, DiskCone, Polytope, Segment,
    Simplex,
};
use crate::error::Result;
use crate::oracle::{grid_project, scan_lambda};
use crate::projection::{
    min_norm_oracle, project_affine, project_polytope, project_segment, project_simplex,
};
use crate::vectorspace::{orthonormal_basis, Vector};
use crate::visibility::{
    argmax_on_segment, in_translated_cone, is_visible, lambda_max, member_by_cone_intersection,
    random_body_point, raycast, raycast_visible, sample_visible, separate_segment, Endpoint,
    VIS_TOL,
};

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub name: &'static str,
    pub instances: usize,
    pub failures: usize,
    /// Largest observed value of the suite's error measure.
    pub worst: f64,
    /// First failure message, if any.
    pub detail: Option<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures == 0 && self.instances > 0
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        write!(
            f,
            "{verdict} {}: {} instances, {} failures, worst {:.3e}",
            self.name, self.instances, self.failures, self.worst
        )?;
        if let Some(d) = &self.detail {
            write!(f, " ({d})")?;
        }
        Ok(())
    }
}

struct Tally {
    report: SuiteReport,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Self {
            report: SuiteReport {
                name,
                instances: 0,
                failures: 0,
                worst: 0.0,
                detail: None,
            },
        }
    }

    fn record(&mut self, outcome: Result<(bool, f64, String)>) {
        self.report.instances += 1;
        let (ok, err, msg) = match outcome {
            Ok(t) => t,
            Err(e) => (false, f64::NAN, format!("error: {e}")),
        };
        if err.is_finite() {
            self.report.worst = self.report.worst.max(err);
        }
        if !ok {
            self.report.failures += 1;
            if self.report.detail.is_none() {
                self.report.detail = Some(format!("instance {}: {msg}", self.report.instances - 1));
            }
        }
    }

    fn finish(self) -> SuiteReport {
        self.report
    }
}

fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn uniform_vector<R: Rng>(rng: &mut R, dim: usize, half_width: f64) -> Vector {
    Vector::new(
        (0..dim)
            .map(|_| rng.gen_range(-half_width..half_width))
            .collect(),
    )
    .expect("finite coordinates")
}

/// Random simplex with `n + 1` vertices (`1 <= n <= 6`) i.i.d. in
/// `[-1, 1]^d`, `n <= d <= 8`, and a query point in `[-2, 2]^d`.
pub fn random_simplex_instance<R: Rng>(rng: &mut R) -> (Simplex, Vector) {
    let n = rng.gen_range(1..=6usize);
    let d = rng.gen_range(n..=8usize);
    loop {
        let vertices: Vec<Vector> = (0..=n).map(|_| uniform_vector(rng, d, 1.0)).collect();
        if let Ok(s) = Simplex::new(vertices) {
            return (s, uniform_vector(rng, d, 2.0));
        }
    }
}

/// Random polytope in dimension `2..=5`. With `full` set the vertices
/// affinely span the space; otherwise low-dimensional hulls also occur.
pub fn random_polytope<R: Rng>(rng: &mut R, full: bool) -> Polytope {
    let d = rng.gen_range(2..=5usize);
    loop {
        let m = if full || rng.gen_bool(0.7) {
            rng.gen_range(d + 1..=d + 5)
        } else {
            rng.gen_range(1..=d)
        };
        let vertices: Vec<Vector> = (0..m).map(|_| uniform_vector(rng, d, 1.0)).collect();
        if full && affine_rank(&vertices) < d {
            continue;
        }
        return Polytope::new(vertices).expect("nonempty finite vertices");
    }
}

fn affine_rank(points: &[Vector]) -> usize {
    let diffs: Vec<Vector> = points[1..].iter().map(|p| p - &points[0]).collect();
    orthonormal_basis(&diffs, 1e-10).len()
}

/// Query point at distance at least `0.01` from the polytope.
fn outside_point<R: Rng>(rng: &mut R, p: &Polytope) -> Result<Vector> {
    loop {
        let x = uniform_vector(rng, p.dim(), 2.5);
        if min_norm_oracle(p, &x)?.distance > 1e-2 {
            return Ok(x);
        }
    }
}

fn check_simplex_instances<F>(
    name: &'static str,
    count: usize,
    seed: u64,
    mut check: F,
) -> SuiteReport
where
    F: FnMut(&Simplex, &Vector) -> Result<(bool, f64, String)>,
{
    let mut rng = rng_for(seed);
    let mut tally = Tally::new(name);
    for _ in 0..count {
        let (s, x) = random_simplex_instance(&mut rng);
        tally.record(check(&s, &x));
    }
    tally.finish()
}

/// Visibility of the arc `(2, sin t, 1 + cos t)` for `points` grid values
/// of `t` strictly inside `(0, pi)`.
pub fn disk_cone_arc(points: usize) -> SuiteReport {
    let body = Body::DiskCone(DiskCone);
    let origin = Vector::zeros(3);
    let mut tally = Tally::new("disk cone: arc points visible");
    for k in 1..=points {
        let t = k as f64 * PI / (points + 1) as f64;
        let v = Vector::new(vec![2.0, t.sin(), 1.0 + t.cos()]).expect("finite");
        tally.record(is_visible(&body, &origin, &v).map(|c| {
            (
                c.visible,
                c.lambda_star,
                format!("t = {t}: lambda* = {}", c.lambda_star),
            )
        }));
    }
    tally.finish()
}

/// `(2, 0, 0)`, the limit of the arc, is blocked with `lambda* = 1/2`.
pub fn disk_cone_limit() -> SuiteReport {
    let body = Body::DiskCone(DiskCone);
    let origin = Vector::zeros(3);
    let v = Vector::new(vec![2.0, 0.0, 0.0]).expect("finite");
    let mut tally = Tally::new("disk cone: (2,0,0) blocked, lambda* = 0.5");
    tally.record(is_visible(&body, &origin, &v).map(|c| {
        let err = (c.lambda_star - 0.5).abs();
        (
            !c.visible && err <= 1e-6,
            err,
            format!("visible = {}, lambda* = {}", c.visible, c.lambda_star),
        )
    }));
    tally.finish()
}

pub fn disk_cone_membership() -> SuiteReport {
    let x = Vector::new(vec![1.5, 0.0, 0.0]).expect("finite");
    let mut tally = Tally::new("disk cone: (1.5,0,0) in C");
    tally.record(
        DiskCone
            .contains(&x, 1e-9)
            .map(|inside| (inside, 0.0, "not a member".to_string())),
    );
    tally.finish()
}

pub fn disk_cone_checks() -> Vec<SuiteReport> {
    vec![
        disk_cone_arc(100),
        disk_cone_limit(),
        disk_cone_membership(),
    ]
}

pub fn oracle_min_norm(count: usize, seed: u64) -> SuiteReport {
    check_simplex_instances("projection vs min-norm oracle", count, seed, |s, x| {
        let p = project_simplex(s, x)?;
        let q = min_norm_oracle(&Polytope::from(s), x)?;
        let err = p.point.dist(&q.point);
        Ok((err <= 1e-6, err, format!("||p - q|| = {err:e}")))
    })
}

pub fn oracle_grid(count: usize, seed: u64, resolution: u32) -> SuiteReport {
    check_simplex_instances("projection vs lattice oracle", count, seed, |s, x| {
        let p = project_simplex(s, x)?;
        let g = grid_project(s.vertices(), x, resolution)?;
        let bound = Polytope::from(s).diameter() / resolution as f64 + 1e-6;
        let err = p.point.dist(&g.point);
        Ok((
            err <= bound,
            err / bound,
            format!("||p - g|| = {err:e} > {bound:e}"),
        ))
    })
}

pub fn variational_inequality(count: usize, seed: u64) -> SuiteReport {
    check_simplex_instances("variational inequality", count, seed, |s, x| {
        let p = project_simplex(s, x)?.point;
        let r = x - &p;
        let tol = 1e-8 * (1.0 + x.norm_sq());
        let worst = s
            .vertices()
            .iter()
            .map(|e| r.dot(&(e - &p)))
            .fold(f64::NEG_INFINITY, f64::max);
        Ok((
            worst <= tol,
            worst / tol,
            format!("<x - p, e - p> = {worst:e}"),
        ))
    })
}

pub fn pythagorean_identity(count: usize, seed: u64) -> SuiteReport {
    check_simplex_instances("reduction identity", count, seed, |s, x| {
        let d_c = project_simplex(s, x)?.distance;
        let on_hull = project_affine(&s.affine_hull(), x)?;
        let d_rest = project_simplex(s, &on_hull.point)?.distance;
        let err = (d_c * d_c - on_hull.distance.powi(2) - d_rest * d_rest).abs();
        let tol = 1e-8 * (1.0 + d_c * d_c);
        Ok((err <= tol, err / tol, format!("identity off by {err:e}")))
    })
}

pub fn projection_visible(count: usize, seed: u64) -> SuiteReport {
    check_simplex_instances("projection point visible", count, seed, |s, x| {
        let p = project_simplex(s, x)?.point;
        let c = is_visible(&Body::Simplex(s.clone()), x, &p)?;
        Ok((
            c.visible,
            c.lambda_star,
            format!("lambda* = {}", c.lambda_star),
        ))
    })
}

/// Every vertex carrying weight above `1e-7` in the projection is visible.
/// Instances with `x` inside the simplex hold vacuously.
pub fn carrying_vertices_visible(count: usize, seed: u64) -> SuiteReport {
    check_simplex_instances("carrying vertices visible", count, seed, |s, x| {
        let proj = project_simplex(s, x)?;
        if proj.distance <= 1e-9 {
            return Ok((true, 0.0, String::new()));
        }
        let body = Body::Simplex(s.clone());
        let mut worst = 0.0f64;
        for (i, &w) in proj.weights.iter().enumerate() {
            if w > 1e-7 {
                let c = is_visible(&body, x, &s.vertices()[i])?;
                worst = worst.max(c.lambda_star);
                if !c.visible {
                    return Ok((
                        false,
                        worst,
                        format!(
                            "vertex {i} (weight {w:e}) blocked, lambda* = {}",
                            c.lambda_star
                        ),
                    ));
                }
            }
        }
        Ok((true, worst, String::new()))
    })
}

pub fn idempotence(count: usize, seed: u64) -> SuiteReport {
    check_simplex_instances("projection idempotent", count, seed, |s, x| {
        let p = project_simplex(s, x)?.point;
        let pp = project_simplex(s, &p)?.point;
        let err = p.dist(&pp);
        Ok((err <= 1e-9, err, format!("moved by {err:e}")))
    })
}

pub fn non_expansive(count: usize, seed: u64) -> SuiteReport {
    let mut rng = rng_for(seed);
    let mut tally = Tally::new("projection non-expansive");
    for _ in 0..count {
        let (s, x) = random_simplex_instance(&mut rng);
        let y = uniform_vector(&mut rng, x.dim(), 2.0);
        tally.record((|| {
            let gap = project_simplex(&s, &x)?
                .point
                .dist(&project_simplex(&s, &y)?.point)
                - x.dist(&y);
            Ok((gap <= 1e-9, gap, format!("expanded by {gap:e}")))
        })());
    }
    tally.finish()
}

/// Triangles with `x` in the plane of the triangle but outside it: the
/// projection is the nearest of the three edge projections.
pub fn triangle_edges(count: usize, seed: u64) -> SuiteReport {
    let mut rng = rng_for(seed);
    let mut tally = Tally::new("triangle via edges");
    let mut done = 0;
    while done < count {
        let d = rng.gen_range(2..=5usize);
        let vertices: Vec<Vector> = (0..3).map(|_| uniform_vector(&mut rng, d, 1.0)).collect();
        let Ok(s) = Simplex::new(vertices.clone()) else {
            continue;
        };
        let coeffs: Vec<f64> = (0..2).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let x = s.affine_hull().point_at(&coeffs);
        if s.contains(&x, 1e-6).unwrap_or(true) {
            continue;
        }
        done += 1;
        tally.record((|| {
            let p = project_simplex(&s, &x)?;
            let mut best: Option<(f64, Vector)> = None;
            for (a, b) in [(0, 1), (1, 2), (0, 2)] {
                let e =
                    project_segment(&Segment::new(vertices[a].clone(), vertices[b].clone())?, &x)?;
                if best.as_ref().is_none_or(|(dist, _)| e.distance < *dist) {
                    best = Some((e.distance, e.point));
                }
            }
            let (_, q) = best.expect("three edges");
            let err = p.point.dist(&q);
            Ok((
                err <= 1e-9,
                err,
                format!("differs from best edge by {err:e}"),
            ))
        })());
    }
    tally.finish()
}

/// `v` is a hull sample, a vertex, or the midpoint of two vertices, so
/// both verdicts occur and boundary candidates sit exactly on the
/// boundary.
fn polytope_triple<R: Rng>(rng: &mut R) -> Result<(Polytope, Vector, Vector)> {
    let p = random_polytope(rng, false);
    let x = outside_point(rng, &p)?;
    let verts = p.vertices();
    let v = match rng.gen_range(0..3) {
        0 => random_body_point(&Body::Polytope(p.clone()), rng),
        1 => verts[rng.gen_range(0..verts.len())].clone(),
        _ => {
            let (i, j) = (rng.gen_range(0..verts.len()), rng.gen_range(0..verts.len()));
            verts[i].lerp(0.5, &verts[j])
        }
    };
    Ok((p, x, v))
}

pub fn cone_agreement(count: usize, seed: u64) -> SuiteReport {
    let mut rng = rng_for(seed);
    let mut tally = Tally::new("lambda scan vs translated cone");
    for _ in 0..count {
        tally.record((|| {
            let (p, x, v) = polytope_triple(&mut rng)?;
            let lambda = lambda_max(&p, &x, &v)?;
            let scan_visible = lambda <= VIS_TOL;
            let cone_blocked = in_translated_cone(&p, &v, &x)?;
            Ok((
                scan_visible != cone_blocked,
                0.0,
                format!("lambda* = {lambda}, cone says blocked = {cone_blocked}"),
            ))
        })());
    }
    tally.finish()
}

/// Signed distance from `x` to the boundary of a full-dimensional
/// polytope: negative inside. Facets are found by brute force over vertex
/// subsets.
pub fn boundary_distance(p: &Polytope, x: &Vector) -> Result<f64> {
    let outside = min_norm_oracle(p, x)?.distance;
    if outside > 1e-12 {
        return Ok(outside);
    }
    let d = p.dim();
    let verts = p.vertices();
    let scale = 1.0 + p.diameter();
    let mut depth = f64::INFINITY;
    let mut idx: Vec<usize> = (0..d).collect();
    loop {
        let base = &verts[idx[0]];
        let diffs: Vec<Vector> = idx[1..].iter().map(|&i| &verts[i] - base).collect();
        let basis = orthonormal_basis(&diffs, 1e-10);
        if basis.len() == d - 1 {
            if let Some(normal) = complement_direction(&basis, d) {
                let side: Vec<f64> = verts.iter().map(|v| normal.dot(&(v - base))).collect();
                let eps = 1e-9 * scale;
                let supporting = side.iter().all(|&s| s <= eps) || side.iter().all(|&s| s >= -eps);
                if supporting {
                    depth = depth.min(normal.dot(&(x - base)).abs());
                }
            }
        }
        if !advance(&mut idx, verts.len()) {
            break;
        }
    }
    Ok(-depth)
}

fn complement_direction(basis: &[Vector], d: usize) -> Option<Vector> {
    let mut best: Option<Vector> = None;
    for k in 0..d {
        let mut r = Vector::unit(d, k);
        for b in basis {
            r = r.add_scaled(-r.dot(b), b);
        }
        if best.as_ref().is_none_or(|b| r.norm() > b.norm()) {
            best = Some(r);
        }
    }
    best.filter(|r| r.norm() > 1e-8)
        .map(|r| r.scale(1.0 / r.norm()))
}

fn advance(idx: &mut [usize], m: usize) -> bool {
    let k = idx.len();
    for i in (0..k).rev() {
        if idx[i] < m - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Cone-intersection membership against the hull fit, `per_body` points
/// per full-dimensional polytope. Points within `1e-6` of the boundary are
/// redrawn.
pub fn cone_intersection_membership(bodies: usize, per_body: usize, seed: u64) -> SuiteReport {
    let mut rng = rng_for(seed);
    let mut tally = Tally::new("cone intersection vs membership");
    for _ in 0..bodies {
        let p = random_polytope(&mut rng, true);
        let body = Body::Polytope(p.clone());
        let mut done = 0;
        while done < per_body {
            let x = if rng.gen_bool(0.5) {
                random_body_point(&body, &mut rng)
            } else {
                uniform_vector(&mut rng, p.dim(), 1.6)
            };
            match boundary_distance(&p, &x) {
                Ok(b) if b.abs() <= 1e-6 => continue,
                Ok(_) => {}
                Err(e) => {
                    done += 1;
                    tally.record(Err(e));
                    continue;
                }
            }
            done += 1;
            tally.record((|| {
                let by_cones = member_by_cone_intersection(&p, &x)?;
                let direct = p.contains(&x, 1e-8)?;
                Ok((
                    by_cones == direct,
                    0.0,
                    format!("cones say {by_cones}, hull fit says {direct}"),
                ))
            })());
        }
    }
    tally.finish()
}

pub fn translation_invariance(count: usize, seed: u64) -> SuiteReport {
    let mut rng = rng_for(seed);
    let mut tally = Tally::new("translation invariance");
    for _ in 0..count {
        tally.record((|| {
            let (p, x, v) = polytope_triple(&mut rng)?;
            let t = uniform_vector(&mut rng, p.dim(), 5.0);
            let body = Body::Polytope(p);
            let moved = translate(&body, &t)?;
            let a = is_visible(&body, &x, &v)?;
            let b = is_visible(&moved, &(&x + &t), &(&v + &t))?;
            let err = (a.lambda_star - b.lambda_star).abs();
            Ok((
                a.visible == b.visible && err <= 1e-9,
                err,
                format!(
                    "lambda* {} vs {} after translation",
                    a.lambda_star, b.lambda_star
                ),
            ))
        })());
    }
    tally.finish()
}

/// For visible `v` and `y` strictly between `x` and `v`, the segment
/// `[x, y]` is strongly separated from the body and the separating
/// functional is not maximized at `x` alone.
pub fn separation_argmax(count: usize, seed: u64) -> SuiteReport {
    let mut rng = rng_for(seed);
    let mut tally = Tally::new("separation of [x, y] toward visible v");
    for _ in 0..count {
        tally.record((|| {
            let p = random_polytope(&mut rng, false);
            let x = outside_point(&mut rng, &p)?;
            let target = random_body_point(&Body::Polytope(p.clone()), &mut rng);
            let v = raycast_visible(&p, &x, &target)?;
            let s = rng.gen_range(0.1..0.9);
            let y = x.add_scaled(s, &(&v - &x));
            let cert = separate_segment(&p, &x, &y)?;
            let end = argmax_on_segment(&cert, &x, &y);
            let ok = cert.gap > 0.0 && cert.separates(&p, &x, &y) && end != Endpoint::X;
            Ok((ok, 0.0, format!("gap {:e}, argmax {end:?}", cert.gap)))
        })());
    }
    tally.finish()
}

/// Full-dimensional simplex; `x0` a visible point from raycasting, split
/// as a proper convex combination of points in its carrying face.
pub fn face_decomposition(count: usize, seed: u64) -> SuiteReport {
    let mut rng = rng_for(seed);
    let mut tally = Tally::new("face decomposition visible");
    let mut done = 0;
    while done < count {
        let d = rng.gen_range(2..=5usize);
        let vertices: Vec<Vector> = (0..=d).map(|_| uniform_vector(&mut rng, d, 1.0)).collect();
        let Ok(s) = Simplex::new(vertices) else {
            continue;
        };
        done += 1;
        tally.record(decompose_and_check(&mut rng, &s));
    }
    tally.finish()
}

fn decompose_and_check<R: Rng>(rng: &mut R, s: &Simplex) -> Result<(bool, f64, String)> {
    let p = Polytope::from(s);
    let x = outside_point(rng, &p)?;
    let body = Body::Simplex(s.clone());
    let target = random_body_point(&body, rng);
    let hit = raycast_visible(s, &x, &target)?;

    // Snap to the carrying face so every piece lies in it exactly. The hit
    // is on the boundary, so the smallest weight is always dropped.
    let weights = barycentric_coords(s, &hit)?.into_weights();
    let smallest = (0..weights.len())
        .min_by(|&i, &j| weights[i].total_cmp(&weights[j]))
        .expect("nonempty");
    let face: Vec<usize> = (0..weights.len())
        .filter(|&i| i != smallest && weights[i] > 1e-9)
        .collect();
    let face_w: Vec<f64> = face.iter().map(|&i| weights[i]).collect();
    let total: f64 = face_w.iter().sum();
    let face_w: Vec<f64> = face_w.iter().map(|w| w / total).collect();
    let face_v: Vec<Vector> = face.iter().map(|&i| s.vertices()[i].clone()).collect();
    let x0 = Vector::combination(&face_v, &face_w);

    // Pieces c_i = x0 + t * delta_i with sum_i l_i delta_i = 0, as
    // face-weight perturbations.
    let k = rng.gen_range(2..=4usize);
    let mut lambdas: Vec<f64> = (0..k).map(|_| rng.gen_range(0.05..1.0)).collect();
    let lsum: f64 = lambdas.iter().sum();
    lambdas.iter_mut().for_each(|l| *l /= lsum);
    if lambdas.iter().any(|&l| l <= 0.05) {
        lambdas = vec![1.0 / k as f64; k];
    }
    let mut deltas: Vec<Vec<f64>> = (0..k)
        .map(|_| {
            let raw: Vec<f64> = face.iter().map(|_| rng.gen_range(-1.0..1.0)).collect();
            let mean = raw.iter().sum::<f64>() / raw.len() as f64;
            raw.iter().map(|r| r - mean).collect()
        })
        .collect();
    let centre: Vec<f64> = (0..face.len())
        .map(|j| deltas.iter().zip(&lambdas).map(|(dl, l)| l * dl[j]).sum())
        .collect();
    for dl in &mut deltas {
        for (a, c) in dl.iter_mut().zip(&centre) {
            *a -= c;
        }
    }
    let mut t_max = 1.0f64;
    for dl in &deltas {
        for (a, w) in dl.iter().zip(&face_w) {
            if *a < 0.0 {
                t_max = t_max.min(w / -a);
            }
        }
    }
    let t = 0.5 * t_max;
    let mut worst = 0.0f64;
    for dl in &deltas {
        let w: Vec<f64> = face_w.iter().zip(dl).map(|(w, a)| w + t * a).collect();
        let c = Vector::combination(&face_v, &w);
        let cert = is_visible(&body, &x, &c)?;
        worst = worst.max(cert.lambda_star);
        if !cert.visible {
            return Ok((
                false,
                worst,
                format!(
                    "piece blocked, lambda* = {}, face {face:?}",
                    cert.lambda_star
                ),
            ));
        }
    }
    let x0_cert = is_visible(&body, &x, &x0)?;
    Ok((
        x0_cert.visible,
        worst,
        format!("snapped point blocked, lambda* = {}", x0_cert.lambda_star),
    ))
}

/// Random flats of dimension 1 to 3 in `R^d`, `d <= 5`, seen from a point
/// off the flat: every sampled flat point is its own raycast, i.e.
/// `lambda0 <= 1e-7`. The reported error is `||v0 - y||`, which is about
/// `lambda0 ||x - y||` and so grows as `x` approaches the flat.
pub fn flat_fully_visible(count: usize, per_flat: usize, seed: u64) -> SuiteReport {
    let mut rng = rng_for(seed);
    let mut tally = Tally::new("flat points visible");
    let mut done = 0;
    while done < count {
        let k = rng.gen_range(1..=3usize);
        let d = rng.gen_range(k + 1..=5usize.max(k + 1));
        let base = uniform_vector(&mut rng, d, 1.0);
        let dirs: Vec<Vector> = (0..k).map(|_| uniform_vector(&mut rng, d, 1.0)).collect();
        let Ok(flat) = AffineFlat::new(base, dirs) else {
            continue;
        };
        let x = uniform_vector(&mut rng, d, 2.0);
        match project_affine(&flat, &x) {
            Ok(r) if r.distance > 1e-3 => {}
            _ => continue,
        }
        done += 1;
        for _ in 0..per_flat {
            let coeffs: Vec<f64> = (0..k).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let y = flat.point_at(&coeffs);
            tally.record(raycast(&flat, &x, &y).map(|r| {
                let moved = r.point.dist(&y);
                (
                    r.lambda <= 1e-7,
                    moved,
                    format!("lambda0 = {}, moved {moved:e}", r.lambda),
                )
            }));
        }
    }
    tally.finish()
}

/// Raycast results are visible and sit on the boundary: a step of `1e-6`
/// (in the ray parameter) back toward `x` leaves the body.
pub fn raycast_boundary(count: usize, seed: u64) -> SuiteReport {
    let mut rng = rng_for(seed);
    let mut tally = Tally::new("raycast lands on the boundary");
    for _ in 0..count {
        tally.record((|| {
            let p = random_polytope(&mut rng, false);
            let x = outside_point(&mut rng, &p)?;
            let y = random_body_point(&Body::Polytope(p.clone()), &mut rng);
            let r = raycast(&p, &x, &y)?;
            let back = x.lerp(r.lambda + 1e-6, &y);
            let lam = lambda_max(&p, &x, &r.point)?;
            let ok = lam <= VIS_TOL && p.contains(&r.point, 1e-8)? && !p.contains(&back, 1e-12)?;
            Ok((ok, lam, format!("lambda* of hit = {lam}")))
        })());
    }
    tally.finish()
}

/// Sampled visible points are never closer to `x` than the projection.
pub fn visible_not_closer(count: usize, seed: u64) -> SuiteReport {
    let mut rng = rng_for(seed);
    let mut tally = Tally::new("visible points no closer than projection");
    for _ in 0..count {
        tally.record((|| {
            let p = random_polytope(&mut rng, false);
            let x = outside_point(&mut rng, &p)?;
            let dist = project_polytope(&p, &x)?.distance;
            let pts = sample_visible(&Body::Polytope(p), &x, 10, rng.gen())?;
            let slack = pts
                .iter()
                .map(|v| dist - x.dist(v))
                .fold(f64::NEG_INFINITY, f64::max);
            Ok((
                slack <= 1e-9 * (1.0 + dist),
                slack,
                format!("a visible point is closer by {slack:e}"),
            ))
        })());
    }
    tally.finish()
}

/// The dense lambda scan brackets the bisection result.
pub fn scan_agrees(count: usize, seed: u64, steps: u32) -> SuiteReport {
    let mut rng = rng_for(seed);
    let mut tally = Tally::new("lambda scan vs bisection");
    for _ in 0..count {
        tally.record((|| {
            let (p, x, v) = polytope_triple(&mut rng)?;
            let a = lambda_max(&p, &x, &v)?;
            let b = scan_lambda(&p, &x, &v, steps)?;
            let err = (a - b).abs();
            let tol = 1e-6 + 1.0 / steps as f64;
            Ok((err <= tol, err, format!("bisection {a} vs scan {b}")))
        })());
    }
    tally.finish()
}

pub fn sample_determinism(count: usize, seed: u64) -> SuiteReport {
    let mut rng = rng_for(seed);
    let mut tally = Tally::new("sampling deterministic");
    for _ in 0..count {
        tally.record((|| {
            let p = random_polytope(&mut rng, false);
            let x = outside_point(&mut rng, &p)?;
            let body = Body::Polytope(p);
            let s: u64 = rng.gen();
            let a = sample_visible(&body, &x, 8, s)?;
            let b = sample_visible(&body, &x, 8, s)?;
            Ok((a == b, 0.0, "repeated sample differs".to_string()))
        })());
    }
    tally.finish()
}

/// Every suite with `instances` as the base count. The lattice oracle and
/// the dense scan are the slow ones and run at a tenth of that.
pub fn run_all(instances: usize, seed: u64) -> Vec<SuiteReport> {
    let tenth = instances.div_ceil(10).max(1);
    let mut out = disk_cone_checks();
    out.extend([
        oracle_min_norm(instances, seed),
        oracle_grid(tenth, seed, 300),
        variational_inequality(instances, seed),
        pythagorean_identity(instances, seed),
        projection_visible(instances, seed),
        carrying_vertices_visible(instances, seed),
        idempotence(instances, seed),
        non_expansive(instances, seed),
        triangle_edges(instances, seed),
        cone_agreement(instances, seed),
        cone_intersection_membership(tenth, 10, seed),
        translation_invariance(instances, seed),
        separation_argmax(instances, seed),
        face_decomposition(instances, seed),
        flat_fully_visible(tenth, 10, seed),
        raycast_boundary(instances, seed),
        visible_not_closer(tenth, seed),
        scan_agrees(tenth, seed, 10_000),
        sample_determinism(tenth, seed),
    ]);
    out
}
