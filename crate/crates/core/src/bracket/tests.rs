use std::sync::Arc;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::graded::{integer, Chart, Symmetry, SymbolDecl};
use crate::samples::{random_polynomial, PolyShape};

/// `1/2 {Theta, Theta}` for `Theta = 1/2 pi xi xi` equals this constant times
/// `sum_{ijk} J^{ijk} xi_i xi_j xi_k` with `J^{ijk} = d_m pi^{ij} pi^{mk} + cyclic`.
const POISSON_MASTER_NORMALIZATION: (i64, i64) = (1, 6);

fn cotangent(d: i64) -> SymplecticChart {
    let chart = Chart::builder()
        .family("x", 1, d, 0)
        .family("xi", 1, d, 1)
        .symbol(SymbolDecl::new("pi", 2, 0, Symmetry::Antisymmetric))
        .build()
        .unwrap();
    SymplecticChart::darboux(&chart, 1, &[("x", "xi")], None).unwrap()
}

fn bv_chart() -> SymplecticChart {
    let chart = Chart::builder()
        .family("phi", 1, 2, 0)
        .family("phis", 1, 2, -1)
        .coord("c", &[], 1)
        .coord("cs", &[], -2)
        .symbol(SymbolDecl::new("V", 0, 1, Symmetry::None))
        .build()
        .unwrap();
    let phi = chart.family("phi");
    let phis = chart.family("phis");
    let mut pairs: Vec<ConjugatePair> = phi
        .into_iter()
        .zip(phis)
        .map(|(a, b)| ConjugatePair { first: a, second: b, weight: integer(1) })
        .collect();
    pairs.push(ConjugatePair {
        first: chart.id("c", &[]).unwrap(),
        second: chart.id("cs", &[]).unwrap(),
        weight: integer(1),
    });
    SymplecticChart::new(&chart, -1, pairs, None).unwrap()
}

fn metric() -> Matrix {
    vec![vec![integer(2), integer(1)], vec![integer(1), integer(1)]]
}

fn degree_two() -> SymplecticChart {
    let chart = Chart::builder()
        .family("x", 1, 2, 0)
        .family("xi", 1, 2, 2)
        .family("eta", 1, 2, 1)
        .symbol(SymbolDecl::new("rho", 1, 1, Symmetry::None))
        .build()
        .unwrap();
    SymplecticChart::darboux(&chart, 2, &[("x", "xi")], Some(("eta", metric()))).unwrap()
}

fn lie_chart() -> SymplecticChart {
    let chart = Chart::builder()
        .family("c", 1, 3, 1)
        .family("b", 1, 3, 1)
        .symbol(SymbolDecl::new("C", 1, 2, Symmetry::Antisymmetric))
        .build()
        .unwrap();
    SymplecticChart::darboux(&chart, 2, &[("c", "b")], None).unwrap()
}

fn v(s: &SymplecticChart, name: &str, i: &[i64]) -> GradedPolynomial {
    GradedPolynomial::var(s.chart(), name, i).unwrap()
}

fn lie_theta(s: &SymplecticChart) -> GradedPolynomial {
    let mut t = GradedPolynomial::zero(s.chart());
    for a in 1..=3 {
        for b in 1..=3 {
            for c in 1..=3 {
                let cj = GradedPolynomial::jet(s.chart(), "C", &[c], &[a, b]).unwrap();
                t += &(&(&(&cj * &v(s, "c", &[a])) * &v(s, "c", &[b])) * &v(s, "b", &[c]));
            }
        }
    }
    t.scale(&rational(1, 2))
}

fn su2(s: &SymplecticChart) -> crate::graded::Substitution {
    let one = GradedPolynomial::one(s.chart());
    crate::graded::Substitution::new(s.chart())
        .jet("C", &[3], &[1, 2], one.clone())
        .unwrap()
        .jet("C", &[1], &[2, 3], one.clone())
        .unwrap()
        .jet("C", &[2], &[3, 1], one)
        .unwrap()
}

fn poisson_theta(s: &SymplecticChart, d: i64) -> GradedPolynomial {
    let mut t = GradedPolynomial::zero(s.chart());
    for i in 1..=d {
        for j in 1..=d {
            let p = GradedPolynomial::jet(s.chart(), "pi", &[i, j], &[]).unwrap();
            t += &(&(&p * &v(s, "xi", &[i])) * &v(s, "xi", &[j]));
        }
    }
    t.scale(&rational(1, 2))
}

#[test]
fn darboux_pairs() {
    let s = cotangent(3);
    for i in 1..=3 {
        for j in 1..=3 {
            let b = s.poisson_bracket(&v(&s, "x", &[i]), &v(&s, "xi", &[j])).unwrap();
            assert_eq!(b.as_constant(), Some(integer((i == j) as i64)));
            assert!(s.poisson_bracket(&v(&s, "xi", &[i]), &v(&s, "xi", &[j])).unwrap().is_zero());
        }
    }
}

#[test]
fn metric_block_inverts() {
    let s = degree_two();
    let inv = [[integer(1), integer(-1)], [integer(-1), integer(2)]];
    for a in 1..=2 {
        for b in 1..=2 {
            let r = s.poisson_bracket(&v(&s, "eta", &[a]), &v(&s, "eta", &[b])).unwrap();
            assert_eq!(r.as_constant().unwrap(), inv[a as usize - 1][b as usize - 1]);
        }
    }
}

#[test]
fn chart_validation() {
    let chart = Chart::builder().family("x", 1, 2, 0).family("xi", 1, 2, 1).build().unwrap();
    assert!(matches!(
        SymplecticChart::darboux(&chart, 2, &[("x", "xi")], None),
        Err(BracketError::PairDegree { .. })
    ));
    let lonely = Chart::builder().family("x", 1, 2, 0).family("xi", 1, 1, 1).build().unwrap();
    assert!(SymplecticChart::darboux(&lonely, 1, &[("x", "xi")], None).is_err());
    let c2 = Chart::builder().family("eta", 1, 2, 1).build().unwrap();
    let singular = vec![vec![integer(1), integer(1)], vec![integer(1), integer(1)]];
    assert_eq!(
        SymplecticChart::darboux(&c2, 2, &[], Some(("eta", singular))),
        Err(BracketError::BadMetric(2))
    );
    let skew = vec![vec![integer(0), integer(1)], vec![integer(-1), integer(0)]];
    assert_eq!(SymplecticChart::darboux(&c2, 2, &[], Some(("eta", skew))), Err(BracketError::BadMetric(2)));
}

#[test]
fn q_on_lie_generators() {
    let s = lie_chart();
    let theta = lie_theta(&s);
    for a in 1..=3 {
        let got = s.q_apply(&theta, &v(&s, "c", &[a])).unwrap();
        let mut want = GradedPolynomial::zero(s.chart());
        for b in 1..=3 {
            for c in 1..=3 {
                let cj = GradedPolynomial::jet(s.chart(), "C", &[a], &[b, c]).unwrap();
                want += &(&(&cj * &v(&s, "c", &[b])) * &v(&s, "c", &[c]));
            }
        }
        assert_eq!(got, want.scale(&rational(1, 2)));
    }
    assert!(s.q_apply(&theta, &GradedPolynomial::one(s.chart())).unwrap().is_zero());
    assert!(matches!(
        s.q_apply(&v(&s, "c", &[1]), &v(&s, "c", &[1])),
        Err(BracketError::DegreeMismatch { .. })
    ));
}

#[test]
fn q_on_poisson_base() {
    let s = cotangent(3);
    let theta = poisson_theta(&s, 3);
    for i in 1..=3 {
        let got = s.q_apply(&theta, &v(&s, "x", &[i])).unwrap();
        let mut want = GradedPolynomial::zero(s.chart());
        for j in 1..=3 {
            want += &(&GradedPolynomial::jet(s.chart(), "pi", &[i, j], &[]).unwrap() * &v(&s, "xi", &[j]));
        }
        assert_eq!(got, want);
    }
}

#[test]
fn su2_master_passes() {
    let s = lie_chart();
    let theta = lie_theta(&s).substitute(&su2(&s)).unwrap();
    assert!(s.master_obstruction(&theta).unwrap().passed());
    // the formal one does not
    assert!(!s.master_obstruction(&lie_theta(&s)).unwrap().passed());
}

#[test]
fn poisson_master_matches_jacobiator() {
    let s = cotangent(3);
    let chart = s.chart().clone();
    let theta = poisson_theta(&s, 3);
    let report = s.master_obstruction(&theta).unwrap();
    assert!(!report.passed());
    let pi = |i: i64, j: i64| GradedPolynomial::jet(&chart, "pi", &[i, j], &[]).unwrap();
    let jac = |i: i64, j: i64, k: i64| {
        let mut t = GradedPolynomial::zero(&chart);
        for (a, b, c) in [(i, j, k), (j, k, i), (k, i, j)] {
            for m in 1..=3 {
                let xm = chart.id("x", &[m]).unwrap();
                t += &(&pi(a, b).derive_left(xm) * &pi(m, c));
            }
        }
        t
    };
    let mut contraction = GradedPolynomial::zero(&chart);
    for i in 1..=3 {
        for j in 1..=3 {
            for k in 1..=3 {
                let xis = &(&v(&s, "xi", &[i]) * &v(&s, "xi", &[j])) * &v(&s, "xi", &[k]);
                contraction += &(&jac(i, j, k) * &xis);
            }
        }
    }
    let (n, d) = POISSON_MASTER_NORMALIZATION;
    assert_eq!(report.obstruction().unwrap(), &contraction.scale(&rational(n, d)));
}

#[test]
fn planar_bivector_is_poisson() {
    let s = cotangent(2);
    let x1 = v(&s, "x", &[1]);
    let sub = crate::graded::Substitution::new(s.chart()).jet("pi", &[1, 2], &[], x1).unwrap();
    let theta = poisson_theta(&s, 2).substitute(&sub).unwrap();
    assert!(s.master_obstruction(&theta).unwrap().passed());
    // formal planar pi passes as well: no three distinct indices
    assert!(s.master_obstruction(&poisson_theta(&s, 2)).unwrap().passed());
}

#[test]
fn derived_bracket_degree_counting() {
    let s = degree_two();
    let chart = s.chart().clone();
    let mut theta = GradedPolynomial::zero(&chart);
    for i in 1..=2 {
        for a in 1..=2 {
            let r = GradedPolynomial::jet(&chart, "rho", &[i], &[a]).unwrap();
            theta += &(&(&r * &v(&s, "xi", &[i])) * &v(&s, "eta", &[a]));
        }
    }
    let x1 = v(&s, "x", &[1]);
    let x2 = v(&s, "x", &[2]);
    assert!(s.derived_bracket(&x1, &x2, &theta).unwrap().is_zero());
    assert!(s.derived_bracket(&x1, &x1, &theta).unwrap().is_zero());
}

#[test]
fn laplacian_examples() {
    let s = bv_chart();
    let one = GradedPolynomial::one(s.chart());
    assert!(s.bv_laplacian(&one).unwrap().is_zero());
    let ss = &v(&s, "phi", &[1]) * &v(&s, "phis", &[1]);
    assert_eq!(s.bv_laplacian(&ss).unwrap().as_constant(), Some(integer(1)));
    let q = s.quantum_master_obstruction(&ss).unwrap();
    assert!(!q.passed());
    assert!(!q.obstruction().unwrap().hbar_coefficient(1).is_zero());
    assert!(matches!(cotangent(1).bv_laplacian(&one), Err(BracketError::WrongChartDegree { .. })));
}

#[test]
fn quantum_master_of_antifield_product() {
    let s = bv_chart();
    let ss = &v(&s, "phis", &[1]) * &v(&s, "phis", &[2]);
    assert!(s.bv_laplacian(&ss).unwrap().is_zero());
    assert!(s.quantum_master_obstruction(&ss).unwrap().passed());
}

#[test]
fn quantum_reduces_to_classical() {
    let s = bv_chart();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let f = random_polynomial(s.chart(), &mut rng, &PolyShape::homogeneous(0).with_jets(&["V"]));
        let q = s.quantum_master_obstruction(&f).unwrap();
        let classical = s.bracket(&f, &f);
        assert_eq!(q.obstruction().map(|o| o.at_hbar_zero()).unwrap_or_else(|| GradedPolynomial::zero(s.chart())), classical);
    }
}

fn sign(e: i32) -> i64 {
    if e.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

fn charts() -> Vec<(SymplecticChart, Vec<&'static str>)> {
    vec![(bv_chart(), vec!["V"]), (cotangent(3), vec!["pi"]), (degree_two(), vec!["rho"]), (lie_chart(), vec![])]
}

fn homogeneous(s: &SymplecticChart, rng: &mut ChaCha8Rng, jets: &[&str]) -> (GradedPolynomial, i32) {
    use rand::Rng;
    loop {
        let d = rng.gen_range(-2..=4);
        let shape = PolyShape { terms: 3, ..PolyShape::homogeneous(d).with_jets(jets) };
        let p = random_polynomial(s.chart(), rng, &shape);
        if !p.is_zero() {
            return (p, d);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn graded_antisymmetry_leibniz_jacobi(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for (s, jets) in charts() {
            let n = s.degree();
            let (f, a) = homogeneous(&s, &mut rng, &jets);
            let (g, b) = homogeneous(&s, &mut rng, &jets);
            let (h, _) = homogeneous(&s, &mut rng, &jets);
            let fg = s.bracket(&f, &g);
            let gf = s.bracket(&g, &f);
            prop_assert_eq!(&fg, &gf.scale_int(-sign((a - n) * (b - n))));
            let lhs = s.bracket(&f, &(&g * &h));
            let rhs = &(&fg * &h) + &(&g * &s.bracket(&f, &h)).scale_int(sign((a - n) * b));
            prop_assert_eq!(lhs, rhs);
            let lhs = s.bracket(&f, &s.bracket(&g, &h));
            let rhs = &s.bracket(&fg, &h) + &s.bracket(&g, &s.bracket(&f, &h)).scale_int(sign((a - n) * (b - n)));
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn q_squared_is_half_master(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = lie_chart();
        let theta = lie_theta(&s);
        let (f, _) = homogeneous(&s, &mut rng, &[]);
        let qq = s.bracket(&theta, &s.bracket(&theta, &f));
        let half = s.bracket(&s.half_self_bracket(&theta), &f);
        prop_assert_eq!(&qq, &half);
        let flat = lie_theta(&s).substitute(&su2(&s)).unwrap();
        prop_assert!(s.bracket(&flat, &s.bracket(&flat, &f)).is_zero());
    }

    #[test]
    fn laplacian_squares_to_zero_and_generates_bracket(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = bv_chart();
        let (f, a) = homogeneous(&s, &mut rng, &["V"]);
        let (g, _) = homogeneous(&s, &mut rng, &["V"]);
        let lap = |p: &GradedPolynomial| s.bv_laplacian(p).unwrap();
        prop_assert!(lap(&lap(&f)).is_zero());
        let defect = &(&lap(&(&f * &g)) - &(&lap(&f) * &g)) - &(&f * &lap(&g)).scale_int(sign(a));
        prop_assert_eq!(defect, s.bracket(&f, &g).scale_int(sign(a)));
    }
}

#[test]
fn rejects_foreign_chart() {
    let s = cotangent(2);
    let other: Arc<Chart> = Chart::builder().family("y", 1, 1, 0).build().unwrap();
    let y = GradedPolynomial::var(&other, "y", &[1]).unwrap();
    assert!(s.poisson_bracket(&y, &y).is_err());
}

