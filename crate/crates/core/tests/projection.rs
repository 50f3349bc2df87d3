use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use visicone::projection::{project_polytope_with_budget, subset_count};
use visicone::suites::random_simplex_instance;
use visicone::{
    grid_project, min_norm_oracle, project_affine, project_polytope, project_segment,
    project_simplex, AffineFlat, GeomError, Polytope, Segment, Simplex, Vector,
};

fn v(c: &[f64]) -> Vector {
    Vector::new(c.to_vec()).unwrap()
}

fn triangle() -> Simplex {
    Simplex::new(vec![v(&[0.0, 0.0]), v(&[1.0, 0.0]), v(&[0.0, 1.0])]).unwrap()
}

fn close(a: &Vector, b: &[f64], tol: f64) -> bool {
    a.dist(&v(b)) <= tol
}

#[test]
fn segment_examples() {
    let s = Segment::new(v(&[0.0, 0.0]), v(&[1.0, 0.0])).unwrap();
    let r = project_segment(&s, &v(&[0.0, 0.0])).unwrap();
    assert!(close(&r.point, &[0.0, 0.0], 0.0) && r.distance == 0.0);
    let r = project_segment(&s, &v(&[2.0, 5.0])).unwrap();
    assert!(close(&r.point, &[1.0, 0.0], 1e-15));
    assert!((r.distance - 26f64.sqrt()).abs() < 1e-12);
    let r = project_segment(&s, &v(&[0.3, 7.0])).unwrap();
    assert!(close(&r.point, &[0.3, 0.0], 1e-15));
    assert!((r.distance - 7.0).abs() < 1e-12);
}

#[test]
fn flat_examples() {
    let axis = AffineFlat::new(v(&[0.0, 0.0]), vec![v(&[1.0, 0.0])]).unwrap();
    let r = project_affine(&axis, &v(&[2.0, 3.0])).unwrap();
    assert!(close(&r.point, &[2.0, 0.0], 1e-12));
    assert!((r.distance - 3.0).abs() < 1e-12);

    let pt = AffineFlat::new(v(&[4.0, -1.0]), vec![]).unwrap();
    assert!(close(
        &project_affine(&pt, &v(&[9.0, 9.0])).unwrap().point,
        &[4.0, -1.0],
        0.0
    ));

    let plane = AffineFlat::new(
        v(&[1.0, 1.0, 1.0]),
        vec![v(&[1.0, 2.0, 0.0]), v(&[0.0, 1.0, -1.0])],
    )
    .unwrap();
    let on = plane.point_at(&[0.7, -1.3]);
    assert!(project_affine(&plane, &on).unwrap().distance <= 1e-10);
}

#[test]
fn flat_residual_is_orthogonal() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..200 {
        let d = rng.gen_range(2..=7);
        let k = rng.gen_range(1..d);
        let rv =
            |rng: &mut ChaCha8Rng| v(&(0..d).map(|_| rng.gen_range(-1.0..1.0)).collect::<Vec<_>>());
        let Ok(f) = AffineFlat::new(rv(&mut rng), (0..k).map(|_| rv(&mut rng)).collect()) else {
            continue;
        };
        let x = rv(&mut rng).scale(3.0);
        let r = project_affine(&f, &x).unwrap();
        let resid = &x - &r.point;
        for dir in f.directions() {
            assert!(resid.dot(dir).abs() <= 1e-9 * (1.0 + x.norm()) * dir.norm());
        }
    }
}

#[test]
fn simplex_examples() {
    let r = project_simplex(&triangle(), &v(&[0.2, 0.2])).unwrap();
    assert!(close(&r.point, &[0.2, 0.2], 1e-15) && r.distance <= 1e-15 && r.facet_chain.is_empty());

    let r = project_simplex(&triangle(), &v(&[1.0, 1.0])).unwrap();
    assert!(close(&r.point, &[0.5, 0.5], 1e-12));
    assert!((r.distance - 0.5f64.sqrt()).abs() < 1e-12);
    assert_eq!(r.facet_chain, vec![0]);

    let r = project_simplex(&triangle(), &v(&[-1.0, -1.0])).unwrap();
    assert!(close(&r.point, &[0.0, 0.0], 1e-12));
    assert!((r.distance - 2f64.sqrt()).abs() < 1e-12);
}

#[test]
fn polytope_examples() {
    let sq = Polytope::new(vec![
        v(&[0.0, 0.0]),
        v(&[1.0, 0.0]),
        v(&[1.0, 1.0]),
        v(&[0.0, 1.0]),
    ])
    .unwrap();
    let r = project_polytope(&sq, &v(&[2.0, 0.5])).unwrap();
    assert!(close(&r.point, &[1.0, 0.5], 1e-12));
    assert!((r.distance - 1.0).abs() < 1e-12);

    let q = min_norm_oracle(&sq, &v(&[0.3, 0.6])).unwrap();
    assert!(close(&q.point, &[0.3, 0.6], 1e-10) && q.distance <= 1e-10);

    let tri = Polytope::from(&triangle());
    for x in [[1.0, 1.0], [-1.0, 3.0], [0.1, 0.1]] {
        let a = project_polytope(&tri, &v(&x)).unwrap();
        let b = project_simplex(&triangle(), &v(&x)).unwrap();
        assert!(a.point.dist(&b.point) <= 1e-12);
    }

    let single = Polytope::new(vec![v(&[1.0, 2.0])]).unwrap();
    let r = min_norm_oracle(&single, &v(&[4.0, 6.0])).unwrap();
    assert!(close(&r.point, &[1.0, 2.0], 0.0) && (r.distance - 5.0).abs() < 1e-12);
}

#[test]
fn polytope_matches_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..150 {
        let d = rng.gen_range(2..=4);
        let m = rng.gen_range(1..=d + 4);
        let p = Polytope::new(
            (0..m)
                .map(|_| v(&(0..d).map(|_| rng.gen_range(-1.0..1.0)).collect::<Vec<_>>()))
                .collect(),
        )
        .unwrap();
        let x = v(&(0..d).map(|_| rng.gen_range(-2.0..2.0)).collect::<Vec<_>>());
        let a = project_polytope(&p, &x).unwrap();
        let b = min_norm_oracle(&p, &x).unwrap();
        assert!(
            a.point.dist(&b.point) <= 1e-6,
            "{:?} vs {:?}",
            a.point,
            b.point
        );
        let recombined = Vector::combination(p.vertices(), &a.weights);
        assert!(recombined.dist(&a.point) <= 1e-9);
    }
}

#[test]
fn subset_budget_is_enforced() {
    let p = Polytope::new(
        (0..30)
            .map(|i| v(&[i as f64, (i * i) as f64, (i % 7) as f64, 1.0]))
            .collect(),
    )
    .unwrap();
    assert!(subset_count(30, 4) > 1 << 10);
    let err = project_polytope_with_budget(&p, &Vector::zeros(4), 1 << 10).unwrap_err();
    assert!(matches!(err, GeomError::SubsetBudgetExceeded { .. }));
}

#[test]
fn result_invariants_on_random_simplices() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..300 {
        let (s, x) = random_simplex_instance(&mut rng);
        let r = project_simplex(&s, &x).unwrap();
        let direct = x.dist(&r.point);
        assert!(
            (r.distance - direct).abs() <= 1e-12 * direct.max(1.0),
            "{} vs {direct}",
            r.distance
        );
        assert!(Vector::combination(s.vertices(), &r.weights).dist(&r.point) <= 1e-9);
        assert!(r.weights.iter().all(|&w| w >= 0.0));
    }
}

#[test]
fn lattice_oracle_brackets_the_distance() {
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    for _ in 0..60 {
        let (s, x) = random_simplex_instance(&mut rng);
        let exact = project_simplex(&s, &x).unwrap().distance;
        let res = 40;
        let g = grid_project(s.vertices(), &x, res).unwrap();
        let diam = Polytope::from(&s).diameter();
        assert!(g.distance >= exact - 1e-12);
        assert!(g.distance <= exact + diam / res as f64 + 1e-12);
    }
}

#[test]
fn lattice_oracle_examples() {
    let tri = triangle();
    let g = grid_project(tri.vertices(), &v(&[1.0, 1.0]), 1000).unwrap();
    assert!(close(&g.point, &[0.5, 0.5], 2e-3));
    let g = grid_project(tri.vertices(), &v(&[1.0, 0.0]), 7).unwrap();
    assert!(close(&g.point, &[1.0, 0.0], 0.0));
    let seg = [v(&[0.0, 0.0]), v(&[1.0, 0.0])];
    let g = grid_project(&seg, &v(&[0.4, 1.0]), 2).unwrap();
    assert!(close(&g.point, &[0.5, 0.0], 0.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn idempotent_and_non_expansive(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (s, x) = random_simplex_instance(&mut rng);
        let y = v(&(0..x.dim()).map(|_| rng.gen_range(-2.0..2.0)).collect::<Vec<_>>());
        let px = project_simplex(&s, &x).unwrap().point;
        let py = project_simplex(&s, &y).unwrap().point;
        prop_assert!(project_simplex(&s, &px).unwrap().point.dist(&px) <= 1e-9);
        prop_assert!(px.dist(&py) <= x.dist(&y) + 1e-9);
    }

    #[test]
    fn segment_variational_inequality(a in prop::array::uniform3(-5.0f64..5.0), b in prop::array::uniform3(-5.0f64..5.0), x in prop::array::uniform3(-9.0f64..9.0)) {
        prop_assume!(v(&a).dist(&v(&b)) > 1e-6);
        let s = Segment::new(v(&a), v(&b)).unwrap();
        let x = v(&x);
        let p = project_segment(&s, &x).unwrap().point;
        for e in [v(&a), v(&b)] {
            prop_assert!((&x - &p).dot(&(&e - &p)) <= 1e-10);
        }
    }
}
