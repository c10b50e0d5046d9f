use std::sync::Arc;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::graded::{integer, Chart, GradedPolynomial};
use crate::samples::random_function;
use crate::structures::{permutation_sign, PreCourantData, Sampling};

fn konst(chart: &Arc<Chart>, n: i64) -> GradedPolynomial {
    GradedPolynomial::integer(chart, n)
}

fn x(chart: &Arc<Chart>, i: i64) -> GradedPolynomial {
    GradedPolynomial::var(chart, "x", &[i]).unwrap()
}

fn eps(i: usize, j: usize, k: usize) -> i64 {
    permutation_sign(&[i, j, k])
}

fn lie(d: usize, r: usize, rho: impl Fn(&Arc<Chart>, usize, usize) -> GradedPolynomial, c: impl Fn(&Arc<Chart>, usize, usize, usize) -> GradedPolynomial) -> LieAlgebroidData {
    let chart = LieAlgebroidData::standard_chart(d, r);
    let rho = (0..d).map(|i| (0..r).map(|a| rho(&chart, i, a)).collect()).collect();
    let cc = (0..r).map(|k| (0..r).map(|a| (0..r).map(|b| c(&chart, k, a, b)).collect()).collect()).collect();
    LieAlgebroidData::new(&chart, "x", "q", rho, cc).unwrap()
}

fn tangent(d: usize) -> LieAlgebroidData {
    lie(d, d, |c, i, a| konst(c, (i == a) as i64), |c, _, _, _| konst(c, 0))
}

fn so3() -> LieAlgebroidData {
    lie(
        3,
        3,
        |c, i, a| {
            let mut t = GradedPolynomial::zero(c);
            for b in 0..3 {
                t += &x(c, b as i64 + 1).scale_int(-eps(i, a, b));
            }
            t
        },
        |c, k, a, b| konst(c, eps(a, b, k)),
    )
}

/// Action of `span{x1 d_1 + x2 d_2, d_1, d_2}` on the plane.
fn affine_action() -> LieAlgebroidData {
    lie(
        2,
        3,
        |c, i, a| match (i, a) {
            (_, 0) => x(c, i as i64 + 1),
            (0, 1) | (1, 2) => konst(c, 1),
            _ => konst(c, 0),
        },
        |c, k, a, b| match (k, a, b) {
            (1, 0, 1) | (2, 0, 2) => konst(c, -1),
            (1, 1, 0) | (2, 2, 0) => konst(c, 1),
            _ => konst(c, 0),
        },
    )
}

fn cube(d: usize, r: usize, f: impl FnMut(usize, usize, usize) -> GradedPolynomial) -> Vec<Vec<Vec<GradedPolynomial>>> {
    let mut f = f;
    (0..d).map(|i| (0..r).map(|a| (0..r).map(|b| f(i, a, b)).collect()).collect()).collect()
}

fn random_connection(data: &LieAlgebroidData, seed: u64) -> Connection {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (d, r) = (data.dim(), data.rank());
    let chart = data.chart().clone();
    let body = data.base().ids().to_vec();
    let omega = cube(d, r, |_, _, _| random_function(&chart, &mut rng, &body, 2, 2));
    let gamma = cube(d, d, |_, _, _| random_function(&chart, &mut rng, &body, 1, 2));
    Connection::new(data.base(), r, omega, gamma).unwrap()
}

fn sampling(trials: usize) -> Sampling {
    Sampling { trials, ..Sampling::default() }
}

#[test]
fn e_differential_on_the_tangent_algebroid() {
    let t = tangent(2);
    let c = t.chart().clone();
    let f = EForm::new(&t, 0, vec![x(&c, 1)]).unwrap();
    let df = e_differential(&f, &t);
    assert_eq!(df.get(&[0]), &konst(&c, 1));
    assert!(df.get(&[1]).is_zero());
    let alpha = EForm::new(&t, 1, vec![x(&c, 2), konst(&c, 0)]).unwrap();
    let da = e_differential(&alpha, &t);
    assert_eq!(da.get(&[0, 1]), &konst(&c, -1));
    assert_eq!(da.get(&[1, 0]), &konst(&c, 1));
}

#[test]
fn e_form_rejects_non_alternating_input() {
    let t = tangent(2);
    let c = t.chart().clone();
    let bad = vec![konst(&c, 0), konst(&c, 1), konst(&c, 1), konst(&c, 0)];
    assert!(EForm::new(&t, 2, bad).is_err());
    assert!(EForm::new(&t, 2, vec![konst(&c, 0)]).is_err());
}

#[test]
fn e_differential_squares_to_zero() {
    for data in [tangent(3), so3(), affine_action()] {
        let rep = e_differential_squared(&data, &sampling(6));
        assert!(rep.passed(), "{:?}", rep.failing_parts().map(|p| p.label.clone()).collect::<Vec<_>>());
    }
}

#[test]
fn basic_connections_for_the_flat_tangent_case() {
    let t = tangent(2);
    let conn = Connection::flat(t.base(), 2);
    let g = LieGeometry::new(&t, &conn).unwrap();
    let c = t.chart().clone();
    let e = vec![x(&c, 2), konst(&c, 0)];
    let f = vec![konst(&c, 0), x(&c, 1)];
    // flat and torsion free: both basic connections reduce to nabla_e f
    assert_eq!(g.basic_e(&e, &f), conn.covariant(&e, &f));
    assert_eq!(g.basic_tm(&e, &f), conn.covariant(&e, &f));
    assert!(g.torsion_components().iter().flatten().flatten().all(|p| p.is_zero()));
}

#[test]
fn zero_anchor_reduces_torsion_to_minus_bracket() {
    let data = lie(1, 3, |c, _, _| konst(c, 0), |c, k, a, b| konst(c, eps(a, b, k)));
    let conn = random_connection(&data, 7);
    let g = LieGeometry::new(&data, &conn).unwrap();
    let t = g.torsion_components();
    for a in 0..3 {
        for b in 0..3 {
            for k in 0..3 {
                assert_eq!(t[a][b][k].as_constant(), Some(integer(-eps(a, b, k))));
            }
        }
    }
    // basic E-connection on E with zero anchor is the bracket
    let c = data.chart().clone();
    let e = data.frame(0);
    let f = data.frame(1);
    assert_eq!(g.basic_e(&e, &f), vec![konst(&c, 0), konst(&c, 0), konst(&c, 1)]);
}

#[test]
fn basic_connection_leibniz_rule() {
    let data = so3();
    let conn = random_connection(&data, 11);
    let g = LieGeometry::new(&data, &conn).unwrap();
    let c = data.chart().clone();
    let body = data.base().ids().to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut rf = || random_function(&c, &mut rng, &body, 2, 2);
    let e: Vec<_> = (0..3).map(|_| rf()).collect();
    let s: Vec<_> = (0..3).map(|_| rf()).collect();
    let h = rf();
    // E nabla_e (h s) = h E nabla_e s + rho(e)(h) s
    let lhs = g.basic_e(&e, &times(&h, &s));
    let rhoh = data.base().apply(&data.anchor(&e), &h);
    let rhs = add(&times(&h, &g.basic_e(&e, &s)), &times(&rhoh, &s));
    assert_eq!(lhs, rhs);
    // and function linear in e
    assert_eq!(g.basic_e(&times(&h, &e), &s), times(&h, &g.basic_e(&e, &s)));
    let v: Vec<_> = (0..3).map(|_| rf()).collect();
    assert_eq!(g.basic_tm(&times(&h, &e), &v), times(&h, &g.basic_tm(&e, &v)));
}

#[test]
fn curvature_of_a_rank_one_connection() {
    let data = lie(2, 1, |c, i, _| konst(c, (i == 0) as i64), |c, _, _, _| konst(c, 0));
    let c = data.chart().clone();
    let omega = vec![vec![vec![x(&c, 2)]], vec![vec![konst(&c, 0)]]];
    let gamma = cube(2, 2, |_, _, _| konst(&c, 0));
    let conn = Connection::new(data.base(), 1, omega, gamma).unwrap();
    let r = conn.curvature_components();
    assert_eq!(r[0][1][0][0], konst(&c, -1));
    assert_eq!(r[1][0][0][0], konst(&c, 1));
    assert_eq!(conn.curvature_coordinate(0, 1, 0, 0), konst(&c, -1));
    assert!(Connection::flat(data.base(), 1).curvature_components().iter().flatten().flatten().flatten().all(|p| p.is_zero()));
}

#[test]
fn connection_validation() {
    let data = tangent(2);
    let c = data.chart().clone();
    let q = GradedPolynomial::var(&c, "q", &[1]).unwrap();
    let mut omega = cube(2, 2, |_, _, _| konst(&c, 0));
    omega[0][0][0] = q;
    let gamma = cube(2, 2, |_, _, _| konst(&c, 0));
    assert!(matches!(Connection::new(data.base(), 2, omega, gamma.clone()), Err(GeometryError::NotBody(_))));
    let short = cube(1, 2, |_, _, _| konst(&c, 0));
    assert!(matches!(Connection::new(data.base(), 2, short, gamma), Err(GeometryError::Shape(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn coordinate_curvature_matches_definition(seed in any::<u64>()) {
        let data = so3();
        let conn = random_connection(&data, seed);
        let r = conn.curvature_components();
        for i in 0..3 {
            for j in 0..3 {
                for a in 0..3 {
                    for b in 0..3 {
                        prop_assert_eq!(&r[i][j][a][b], &conn.curvature_coordinate(i, j, a, b));
                        prop_assert_eq!(&r[i][j][a][b], &r[j][i][a][b].scale_int(-1));
                    }
                }
            }
        }
    }

    #[test]
    fn basic_curvature_two_lines_agree(seed in any::<u64>()) {
        for data in [so3(), affine_action(), tangent(2)] {
            let conn = random_connection(&data, seed);
            let g = LieGeometry::new(&data, &conn).unwrap();
            prop_assert!(g.decomposition_check().passed());
        }
    }

    #[test]
    fn bianchi_identity(seed in any::<u64>()) {
        let data = so3();
        let conn = random_connection(&data, seed);
        let g = LieGeometry::new(&data, &conn).unwrap();
        prop_assert!(g.bianchi_check().passed());
    }
}

#[test]
fn torsion_and_basic_curvature_are_tensorial() {
    for data in [so3(), affine_action()] {
        let conn = random_connection(&data, 3);
        let g = LieGeometry::new(&data, &conn).unwrap();
        assert!(g.tensoriality_check(&sampling(3)).passed());
    }
}

#[test]
fn bianchi_detects_a_non_algebroid() {
    // the broken bracket [e1,e2] = e1, [e2,e3] = x1 e2 with zero anchor
    let data = lie(1, 3, |c, _, _| konst(c, 0), |c, k, a, b| match (k, a, b) {
        (0, 0, 1) => konst(c, 1),
        (0, 1, 0) => konst(c, -1),
        (1, 1, 2) => x(c, 1),
        (1, 2, 1) => x(c, 1).scale_int(-1),
        _ => konst(c, 0),
    });
    assert!(!data.report().passed());
    let conn = random_connection(&data, 1);
    let g = LieGeometry::new(&data, &conn).unwrap();
    assert!(!e_differential_squared(&data, &sampling(6)).passed() || !g.bianchi_check().passed());
}

#[test]
fn geometry_report_shapes() {
    let data = so3();
    let conn = random_connection(&data, 2);
    let g = LieGeometry::new(&data, &conn).unwrap();
    let rep = g.report(&sampling(2));
    assert_eq!(rep.torsion.len(), 3);
    assert_eq!(rep.curvature.len(), 3);
    assert_eq!(rep.basic_curvature[0][1].len(), 3);
    assert!(rep.checks.iter().all(|c| c.passed()));
}

fn standard(d: usize, c3: impl Fn(&Arc<Chart>, usize, usize, usize) -> GradedPolynomial) -> CourantData {
    CourantData::standard(d, c3)
}

/// Metric connection on `T + T*` induced by `omega` on `T`: `nabla p_j = w p_k`, `nabla q^k = -w q^j`.
fn induced(data: &CourantData, w: impl Fn(usize, usize, usize) -> GradedPolynomial) -> Connection {
    let (d, r) = (data.dim(), data.rank());
    let chart = data.chart().clone();
    let omega = cube(d, r, |i, a, b| {
        if a >= d && b >= d {
            w(i, a - d, b - d)
        } else if a < d && b < d {
            w(i, b, a).scale_int(-1)
        } else {
            GradedPolynomial::zero(&chart)
        }
    });
    let gamma = cube(d, d, |_, _, _| GradedPolynomial::zero(&chart));
    Connection::new(data.base(), r, omega, gamma).unwrap()
}

#[test]
fn courant_torsion_vanishes_for_flat_standard_data() {
    let data = standard(2, |c, _, _, _| konst(c, 0));
    let conn = Connection::flat(data.base(), data.rank());
    let g = CourantGeometry::new(&data, &conn).unwrap();
    assert!(g.torsion_components().iter().flatten().flatten().all(|p| p.is_zero()));
    assert!(g.basic_curvature_components().iter().flatten().flatten().flatten().all(|p| p.is_zero()));
}

#[test]
fn courant_connection_must_be_metric() {
    let data = standard(2, |c, _, _, _| konst(c, 0));
    let c = data.chart().clone();
    let mut omega = cube(2, 4, |_, _, _| konst(&c, 0));
    omega[0][0][0] = konst(&c, 1);
    let gamma = cube(2, 2, |_, _, _| konst(&c, 0));
    let conn = Connection::new(data.base(), 4, omega, gamma).unwrap();
    assert!(matches!(CourantGeometry::new(&data, &conn), Err(GeometryError::NotMetric(1))));
    let ok = induced(&data, |i, a, b| if (i, a, b) == (0, 0, 1) { x(&c, 2) } else { konst(&c, 0) });
    assert!(CourantGeometry::new(&data, &ok).is_ok());
}

#[test]
fn courant_torsion_is_a_three_form() {
    let data = standard(3, |c, _, _, _| x(c, 1));
    let c = data.chart().clone();
    let conn = induced(&data, |i, a, b| match (i, a, b) {
        (0, 0, 1) => x(&c, 2),
        (2, 1, 2) => konst(&c, 1),
        _ => konst(&c, 0),
    });
    let g = CourantGeometry::new(&data, &conn).unwrap();
    assert!(g.torsion_report(&sampling(3)).passed());
}

#[test]
fn courant_torsion_of_a_twist_is_minus_the_twist() {
    // flat connection: T(p_i, p_j, p_k) = -C_{ijk}
    let data = standard(3, |c, _, _, _| konst(c, 2));
    let conn = Connection::flat(data.base(), data.rank());
    let g = CourantGeometry::new(&data, &conn).unwrap();
    let t = g.torsion_components();
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                assert_eq!(t[3 + i][3 + j][3 + k].as_constant(), Some(integer(-2 * eps(i, j, k))));
            }
        }
    }
}

#[test]
fn pre_courant_geometry() {
    let data = standard(4, |c, i, j, k| if (i, j, k) == (0, 1, 2) { x(c, 4) } else { konst(c, 0) });
    let pre = PreCourantData::alternating(data.clone(), |ix| {
        if ix == [0, 1, 2, 3] {
            konst(data.chart(), -1)
        } else {
            konst(data.chart(), 0)
        }
    })
    .unwrap();
    let conn = Connection::flat(pre.courant().base(), pre.courant().rank());
    let g = CourantGeometry::from_pre(&pre, &conn).unwrap();
    assert!(g.torsion_report(&sampling(2)).passed());
}



#[test]
fn basic_e_connection_breaks_courant_torsion() {
    let data = standard(3, |c, _, _, _| x(c, 1));
    let flat = Connection::flat(data.base(), data.rank());
    let g = CourantGeometry::new(&data, &flat).unwrap().with_connection(ECourantConnection::Basic);
    let rep = g.torsion_report(&sampling(2));
    assert_eq!(rep.part_verdict("t0/swap12"), crate::bracket::Verdict::Pass);
    assert!(!rep.passed());
    assert!(rep.failing_parts().any(|p| p.label == "t0/swap23"));
    // constant twist: 2 C instead of -C
    let z = standard(3, |c, _, _, _| konst(c, 2));
    let g = CourantGeometry::new(&z, &flat).unwrap().with_connection(ECourantConnection::Basic);
    assert_eq!(g.torsion_components()[3][4][5].as_constant(), Some(integer(4)));
}

#[test]
fn courant_basic_curvature_is_tensorial() {
    let data = standard(3, |c, _, _, _| x(c, 1));
    let c = data.chart().clone();
    let conn = induced(&data, |i, a, b| match (i, a, b) {
        (0, 0, 1) => x(&c, 2),
        (2, 1, 2) => konst(&c, 1),
        _ => konst(&c, 0),
    });
    let g = CourantGeometry::new(&data, &conn).unwrap();
    assert!(g.basic_curvature_report(&sampling(2)).passed());
}
