use std::sync::Arc;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::graded::{integer, rational, Chart, GradedPolynomial};
use crate::samples::{random_function, random_polynomial, PolyShape};

fn konst(chart: &Arc<Chart>, n: i64) -> GradedPolynomial {
    GradedPolynomial::integer(chart, n)
}

fn x(chart: &Arc<Chart>, i: i64) -> GradedPolynomial {
    GradedPolynomial::var(chart, "x", &[i]).unwrap()
}

fn eps(i: usize, j: usize, k: usize) -> i64 {
    permutation_sign(&[i, j, k])
}

fn explicit_pi(d: usize, f: impl Fn(&Arc<Chart>, usize, usize) -> GradedPolynomial) -> PoissonData {
    let chart = PoissonData::standard_chart(d);
    let pi = (0..d).map(|i| (0..d).map(|j| f(&chart, i, j)).collect()).collect();
    PoissonData::new(&chart, "x", "xi", pi).unwrap()
}

fn linear_so3() -> PoissonData {
    explicit_pi(3, |c, i, j| {
        let mut t = GradedPolynomial::zero(c);
        for k in 0..3 {
            t += &x(c, k as i64 + 1).scale_int(eps(i, j, k));
        }
        t
    })
}

#[test]
fn function_bracket_keeps_half() {
    let p = explicit_pi(2, |c, i, j| konst(c, (j as i64) - (i as i64)));
    let c = p.chart().clone();
    assert_eq!(p.bracket_of_functions(&x(&c, 1), &x(&c, 2)).as_constant(), Some(rational(1, 2)));
    let f = &(&x(&c, 1) * &x(&c, 2)) + &x(&c, 2);
    assert!(p.bracket_of_functions(&f, &f).is_zero());
    let so3 = linear_so3();
    let c = so3.chart().clone();
    assert_eq!(so3.bracket_of_functions(&x(&c, 1), &x(&c, 2)), x(&c, 3).scale(&rational(1, 2)));
}

#[test]
fn schouten_examples() {
    let p = PoissonData::formal(2);
    let c = p.chart().clone();
    let d1 = p.momentum(0);
    let d2 = p.momentum(1);
    assert!(p.schouten(&d1, &d2).unwrap().is_zero());
    assert!(p.schouten_direct(&d1, &d2).unwrap().is_zero());
    let xf = p.vector_field(&[GradedPolynomial::zero(&c), x(&c, 1)]);
    assert_eq!(p.schouten(&xf, &x(&c, 2)).unwrap(), x(&c, 1));
    assert_eq!(p.schouten_direct(&xf, &x(&c, 2)).unwrap(), x(&c, 1));
    let theta = p.theta();
    assert!(p.schouten(&theta, &theta).unwrap().is_zero());
    assert!(p.schouten_report().passed());
}

#[test]
fn poisson_triangle_on_formal_three_fold() {
    let p = PoissonData::formal(3);
    let master = p.master_report();
    let schouten = p.schouten_report();
    let jac = p.jacobi_report();
    assert!(!master.passed() && !schouten.passed() && !jac.passed());
    assert_eq!(master.obstruction(), schouten.obstruction());
    // 1/6 sum_{ijk} J^{ijk} xi xi xi = J^{123} xi_1 xi_2 xi_3
    let contraction = p.trivector(|i, j, k| p.jacobiator(i, j, k));
    assert_eq!(master.obstruction().unwrap(), &contraction);
    let xi123 = &(&p.momentum(0) * &p.momentum(1)) * &p.momentum(2);
    assert_eq!(master.obstruction().unwrap(), &(&p.jacobiator(0, 1, 2) * &xi123));
}

#[test]
fn linear_poisson_passes() {
    let p = linear_so3();
    assert!(p.master_report().passed());
    assert!(p.jacobi_report().passed());
    assert!(p.schouten_report().passed());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn schouten_formula_matches_bracket(seed in any::<u64>()) {
        let p = PoissonData::formal(3);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shape = |deg| PolyShape { terms: 3, ..PolyShape::homogeneous(deg).with_jets(&["pi"]) };
        let deg_a = rng.gen_range(0..=3);
        let a = random_polynomial(p.chart(), &mut rng, &shape(deg_a));
        let deg_b = rng.gen_range(0..=3);
        let b = random_polynomial(p.chart(), &mut rng, &shape(deg_b));
        prop_assert_eq!(p.schouten(&a, &b).unwrap(), p.schouten_direct(&a, &b).unwrap());
    }
}

fn lie(d: usize, r: usize, rho: impl Fn(&Arc<Chart>, usize, usize) -> GradedPolynomial, c: impl Fn(&Arc<Chart>, usize, usize, usize) -> GradedPolynomial) -> Result<LieAlgebroidData, StructureError> {
    let chart = LieAlgebroidData::standard_chart(d, r);
    let rho = (0..d).map(|i| (0..r).map(|a| rho(&chart, i, a)).collect()).collect();
    let cc = (0..r).map(|k| (0..r).map(|a| (0..r).map(|b| c(&chart, k, a, b)).collect()).collect()).collect();
    LieAlgebroidData::new(&chart, "x", "q", rho, cc)
}

#[test]
fn tangent_algebroid_passes() {
    let t = lie(3, 3, |c, i, a| konst(c, (i == a) as i64), |c, _, _, _| konst(c, 0)).unwrap();
    assert!(t.report().passed());
}

fn so3_action(sign: i64) -> LieAlgebroidData {
    lie(
        3,
        3,
        |c, i, a| {
            let mut t = GradedPolynomial::zero(c);
            for b in 0..3 {
                t += &x(c, b as i64 + 1).scale_int(sign * eps(i, a, b));
            }
            t
        },
        |c, k, a, b| konst(c, eps(a, b, k)),
    )
    .unwrap()
}

#[test]
fn so3_action_algebroid() {
    // rho(e_a) = eps_{iba} x^b d_i is the rotation action with [e_a,e_b] = eps_{abc} e_c
    let good = so3_action(-1);
    assert!(good.report().passed());
    // with rho^i_a = eps_{iab} x^b the anchor reverses the bracket
    let bad = so3_action(1);
    let r = bad.report();
    assert_eq!(r.part_verdict("anchor"), crate::bracket::Verdict::Fail);
    assert_eq!(r.part_verdict("jacobi"), crate::bracket::Verdict::Pass);
}

#[test]
fn broken_structure_constants_fail_jacobi() {
    let l = lie(
        3,
        3,
        |c, _, _| konst(c, 0),
        |c, k, a, b| {
            let v = |k2, a2, b2, p: GradedPolynomial| {
                if (k, a, b) == (k2, a2, b2) {
                    p
                } else if (k, b, a) == (k2, a2, b2) {
                    -p
                } else {
                    GradedPolynomial::zero(c)
                }
            };
            // [e1,e2] = e1, [e2,e3] = x1 e2
            &v(0, 0, 1, konst(c, 1)) + &v(1, 1, 2, x(c, 1))
        },
    )
    .unwrap();
    let r = l.report();
    assert_eq!(r.part_verdict("anchor"), crate::bracket::Verdict::Pass);
    assert_eq!(r.part_verdict("jacobi"), crate::bracket::Verdict::Fail);
}

#[test]
fn formal_algebroid_reports_both_families() {
    let f = LieAlgebroidData::formal(2, 2);
    let r = f.report();
    assert_eq!(r.part_verdict("anchor"), crate::bracket::Verdict::Fail);
    // rank 2: Q^2 q^a has no cubic q terms left, only anchor-derivative ones
    assert!(r.parts.len() == 4);
}

#[test]
fn algebroid_rejects_symmetric_c() {
    let e = lie(1, 2, |c, _, _| konst(c, 0), |c, _, _, _| konst(c, 1));
    assert!(matches!(e, Err(StructureError::NotAntisymmetric(_))));
}

fn standard(d: usize, c123: impl Fn(&Arc<Chart>) -> GradedPolynomial) -> CourantData {
    CourantData::standard(d, |c, i, j, k| if (i, j, k) == (0, 1, 2) { c123(c) } else { GradedPolynomial::zero(c) })
}

#[test]
fn standard_courant_dictionary() {
    let s = standard(1, |c| konst(c, 0));
    let c = s.chart().clone();
    let f = |n: i64| konst(&c, n);
    // eta = (q^1, p_1); X + a is X p_1 + a q^1
    let e = |v: GradedPolynomial, a: GradedPolynomial| s.section(&[a, v]);
    let (xx, a, y, b) = (&f(2) * &x(&c, 1), f(3), f(5), &x(&c, 1) * &x(&c, 1));
    let lhs = s.inner(&e(xx.clone(), a.clone()), &e(y.clone(), b.clone()));
    assert_eq!(lhs, &(&xx * &b) + &(&y * &a));
    let d1 = e(f(1), f(0));
    assert_eq!(s.anchor(&d1, &x(&c, 1)).as_constant(), Some(integer(1)));
    let raw = s.symplectic().derived_bracket(&d1, &x(&c, 1), s.theta()).unwrap();
    assert_eq!(raw.as_constant(), Some(integer(-1)));
    let x1 = x(&c, 1);
    assert!(s.symplectic().derived_bracket(&x1, &x1, s.theta()).unwrap().is_zero());
}

#[test]
fn standard_courant_axioms_hold() {
    let s = standard(3, |c| &konst(c, 1) + &(&x(c, 1) * &x(c, 2)));
    let report = s.axiom_report(&Sampling { trials: 8, ..Sampling::default() });
    assert!(report.passed(), "{report}");
}

#[test]
fn non_closed_c_breaks_jacobi() {
    let s = standard(4, |c| x(c, 4));
    let report = s.axiom_report(&Sampling { trials: 4, seed: 3, ..Sampling::default() });
    assert_eq!(report.part_verdict("master"), crate::bracket::Verdict::Fail);
    assert_eq!(report.part_verdict("ax1-jacobi"), crate::bracket::Verdict::Fail);
    for label in ["ax2-anchor", "ax3-leibniz", "ax4-symmetric", "ax5-invariance", "d-pairing"] {
        assert_eq!(report.part_verdict(label), crate::bracket::Verdict::Pass, "{label}");
    }
    // constant f: the Leibniz axiom is bilinearity
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let sm = Sampling::default();
    let (e1, e2, e3) = (s.random_section(&mut rng, &sm), s.random_section(&mut rng, &sm), s.random_section(&mut rng, &sm));
    let r = s.axiom_residuals(&e1, &e2, &e3, &konst(s.chart(), 7));
    assert!(r[2].is_zero());
}

#[test]
fn anchor_is_a_derivation() {
    let s = standard(3, |c| x(c, 3));
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let sm = Sampling::default();
    for _ in 0..10 {
        let e = s.random_section(&mut rng, &sm);
        let f = s.random_function(&mut rng, &sm);
        let g = s.random_function(&mut rng, &sm);
        assert_eq!(s.anchor(&e, &(&f * &g)), &(&s.anchor(&e, &f) * &g) + &(&f * &s.anchor(&e, &g)));
    }
}

#[test]
fn paper_d_has_opposite_pairing() {
    let s = standard(2, |c| konst(c, 0));
    let c = s.chart().clone();
    let e = s.section(&[konst(&c, 0), konst(&c, 0), x(&c, 2), konst(&c, 1)]);
    let f = &x(&c, 1) * &x(&c, 2);
    assert_eq!(s.inner(&s.d(&f), &e), s.anchor(&e, &f));
    assert_eq!(s.inner(&s.d_bracket(&f), &e), -s.anchor(&e, &f));
}

#[test]
fn pre_courant_standard_h_zero() {
    let s = standard(3, |c| &x(c, 1) * &x(c, 3));
    let chart = s.chart().clone();
    let p = PreCourantData::alternating(s, move |_| GradedPolynomial::zero(&chart)).unwrap();
    assert!(p.report(&Sampling { trials: 5, ..Sampling::default() }).passed());
}

#[test]
fn pre_courant_four_form_twist() {
    let build = |scale: i64| {
        let s = standard(4, |c| x(c, 4));
        let chart = s.chart().clone();
        PreCourantData::alternating(s, move |_| GradedPolynomial::integer(&chart, -scale)).unwrap()
    };
    let sm = Sampling { trials: 4, ..Sampling::default() };
    let plus = build(1).report(&sm);
    let minus = build(-1).report(&sm);
    assert!(plus.passed(), "{plus}");
    assert!(!minus.passed());
}

#[test]
fn schouten_of_vector_fields_is_lie_bracket() {
    let p = PoissonData::formal(2);
    let c = p.chart().clone();
    let z = GradedPolynomial::zero(&c);
    let v = p.vector_field(&[z.clone(), x(&c, 1)]);
    let w = p.vector_field(&[x(&c, 2), z]);
    let expected = p.vector_field(&[x(&c, 1), -x(&c, 2)]);
    assert_eq!(p.schouten_direct(&v, &w).unwrap(), expected);
    assert_eq!(p.schouten(&v, &w).unwrap(), expected);
}

fn omega_inverse(sign: i64) -> PoissonData {
    // inverse of dx1dx2 + dx3dx4 + x4 dx1dx3
    explicit_pi(4, move |c, i, j| {
        let t = match (i, j) {
            (0, 1) => konst(c, -1),
            (1, 0) => konst(c, 1),
            (1, 3) => x(c, 4),
            (3, 1) => -x(c, 4),
            (2, 3) => konst(c, -1),
            (3, 2) => konst(c, 1),
            _ => konst(c, 0),
        };
        t.scale_int(sign)
    })
}

fn d_omega(p: &PoissonData, scale: crate::graded::Rational) -> Vec<Vec<Vec<GradedPolynomial>>> {
    let c = p.chart().clone();
    TwistedPoissonData::three_form(4, &c, |i, j, k| {
        if (i, j, k) == (0, 2, 3) {
            konst(&c, 1).scale(&scale)
        } else {
            GradedPolynomial::zero(&c)
        }
    })
}

#[test]
fn twisted_reduces_to_jacobiator_at_zero() {
    let p = PoissonData::formal(3);
    let c = p.chart().clone();
    let zero = TwistedPoissonData::three_form(3, &c, |_, _, _| GradedPolynomial::zero(&c));
    let t = TwistedPoissonData::new(p.clone(), zero).unwrap();
    assert_eq!(t.obstruction().obstruction(), p.master_report().obstruction());
    let two = PoissonData::formal(2);
    let c2 = two.chart().clone();
    let h = TwistedPoissonData::three_form(2, &c2, |_, _, _| konst(&c2, 1));
    assert!(TwistedPoissonData::new(two, h).unwrap().obstruction().passed());
}

#[test]
fn twisted_linear_so3_any_scale() {
    let p = linear_so3();
    let c = p.chart().clone();
    let h = TwistedPoissonData::three_form(3, &c, |_, _, _| konst(&c, 1));
    assert_eq!(solve_twist_scale(&p, h).unwrap(), TwistScale::Any);
}

#[test]
fn twisted_rejects_open_form() {
    let p = PoissonData::formal(4);
    let c = p.chart().clone();
    let h = TwistedPoissonData::three_form(4, &c, |i, j, k| if (i, j, k) == (0, 1, 2) { x(&c, 4) } else { GradedPolynomial::zero(&c) });
    assert!(matches!(TwistedPoissonData::new(p, h), Err(StructureError::NotClosed(_))));
}

#[test]
fn inverse_of_non_closed_two_form_is_twisted() {
    let p = omega_inverse(1);
    assert!(!p.master_report().passed());
    let scale = solve_twist_scale(&p, d_omega(&p, rational(1, 1))).unwrap();
    let TwistScale::Unique(s) = scale else { panic!("{scale:?}") };
    let t = TwistedPoissonData::new(p.clone(), d_omega(&p, s.clone())).unwrap();
    assert!(t.obstruction().passed());
    let algebroid = t.cotangent_algebroid().unwrap();
    assert!(algebroid.report().passed(), "{}", algebroid.report());

    // the anchor -pi# is not a morphism for this bracket
    let c = algebroid.chart().clone();
    let d = 4;
    let rho = (0..d).map(|i| (0..d).map(|a| -algebroid.rho(i, a).clone()).collect()).collect();
    let cc = (0..d).map(|k| (0..d).map(|a| (0..d).map(|b| algebroid.structure(k, a, b).clone()).collect()).collect()).collect();
    let flipped = LieAlgebroidData::new(&c, "x", "q", rho, cc).unwrap();
    assert_eq!(flipped.report().part_verdict("anchor"), crate::bracket::Verdict::Fail);

    // with the opposite scale the twisted condition fails
    let wrong = TwistedPoissonData::new(p.clone(), d_omega(&p, -s)).unwrap();
    assert!(!wrong.obstruction().passed());
}

#[test]
fn twisted_bracket_jacobi_and_skew() {
    let p = omega_inverse(1);
    let TwistScale::Unique(s) = solve_twist_scale(&p, d_omega(&p, rational(1, 1))).unwrap() else { panic!() };
    let t = TwistedPoissonData::new(p.clone(), d_omega(&p, s)).unwrap();
    let c = p.chart().clone();
    let body: Vec<_> = p.base().ids().to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let form = |rng: &mut ChaCha8Rng| (0..4).map(|_| random_function(&c, rng, &body, 2, 2)).collect::<Vec<_>>();
    for _ in 0..4 {
        let (a, b, e) = (form(&mut rng), form(&mut rng), form(&mut rng));
        assert!(t.bracket(&a, &a).iter().all(|v| v.is_zero()));
        let ab = t.bracket(&a, &b);
        let be = t.bracket(&b, &e);
        let ea = t.bracket(&e, &a);
        let j: Vec<_> = (0..4)
            .map(|k| &(&t.bracket(&ab, &e)[k] + &t.bracket(&be, &a)[k]) + &t.bracket(&ea, &b)[k])
            .collect();
        assert!(j.iter().all(|v| v.is_zero()), "{j:?}");
    }
}
