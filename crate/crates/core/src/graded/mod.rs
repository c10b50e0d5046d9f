//! Free graded-commutative polynomial algebra over a single chart.
//!
//! Coordinates carry integer degrees; parity is the degree mod 2 and governs
//! both nilpotency and the Koszul sign `qp = (-1)^{|q||p|} pq`. Coefficients
//! are exact rationals times monomials in formal structure functions
//! ([`JetSymbol`]) and the formal scalars `hbar` and `I`.
//!
//! Canonical coordinate order is ascending `(degree, name, index)`.

mod chart;
mod jet;
mod monomial;
mod poly;
mod subst;

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

pub use chart::{Chart, ChartBuilder, CoordId, GradedCoordinate, IndexGroup, Symmetry, SymbolDecl};
pub use jet::JetSymbol;
pub use monomial::Monomial;
pub use poly::{GradedPolynomial, Side};
pub use subst::Substitution;

pub(crate) use poly::{fmt_monomial, fmt_rational};

/// Exact scalar type.
pub type Rational = BigRational;

pub fn rational(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn integer(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GradedError {
    #[error("unknown coordinate `{0}`")]
    UnknownCoordinate(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("symbol `{symbol}` takes {expected} indices, got {found}")]
    SymbolArity { symbol: String, expected: usize, found: usize },
    #[error("duplicate coordinate `{0}`")]
    DuplicateCoordinate(String),
    #[error("polynomials live on different charts")]
    ChartMismatch,
    #[error("degree mismatch for `{what}`: expected {expected}, found {found:?}")]
    DegreeMismatch { what: String, expected: i32, found: Option<i32> },
    #[error("jets can only be differentiated along degree-0 coordinates, not `{0}`")]
    OddJetDerivative(String),
    #[error("missing derivative closure for `{0}`")]
    MissingDerivativeClosure(String),
}

/// One factor of a raw, unnormalized product.
#[derive(Clone, Debug, PartialEq)]
pub enum Factor {
    Coord { name: String, index: Vec<i64> },
    Jet { base: String, upper: Vec<i64>, lower: Vec<i64>, deriv: Vec<(String, Vec<i64>)> },
    Hbar,
    Imag,
}

impl Factor {
    pub fn coord(name: &str, index: &[i64]) -> Self {
        Factor::Coord { name: name.into(), index: index.to_vec() }
    }

    pub fn jet(base: &str, upper: &[i64], lower: &[i64]) -> Self {
        Factor::Jet { base: base.into(), upper: upper.to_vec(), lower: lower.to_vec(), deriv: Vec::new() }
    }
}

/// A coefficient times an ordered product of factors, in written order.
#[derive(Clone, Debug, PartialEq)]
pub struct RawTerm {
    pub coeff: Rational,
    pub factors: Vec<Factor>,
}

impl RawTerm {
    pub fn new(coeff: Rational, factors: Vec<Factor>) -> Self {
        Self { coeff, factors }
    }
}

/// Brings a list of written products into normal form: canonical factor
/// order with Koszul signs, odd squares dropped, like terms merged.
pub fn normalize(chart: &std::sync::Arc<Chart>, raw: &[RawTerm]) -> Result<GradedPolynomial, GradedError> {
    let mut out = GradedPolynomial::zero(chart);
    for term in raw {
        let mut acc = GradedPolynomial::constant(chart, term.coeff.clone());
        for f in &term.factors {
            let p = match f {
                Factor::Coord { name, index } => GradedPolynomial::var(chart, name, index)?,
                Factor::Jet { base, upper, lower, deriv } => {
                    let mut p = GradedPolynomial::jet(chart, base, upper, lower)?;
                    for (n, i) in deriv {
                        let id = chart.id(n, i)?;
                        if chart.degree(id) != 0 {
                            return Err(GradedError::OddJetDerivative(chart.coord(id).to_string()));
                        }
                        p = p.derive_left(id);
                    }
                    p
                }
                Factor::Hbar => GradedPolynomial::hbar(chart),
                Factor::Imag => GradedPolynomial::imaginary_unit(chart),
            };
            acc = &acc * &p;
        }
        out += &acc;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn theta_chart() -> Arc<Chart> {
        Chart::builder()
            .family("x", 1, 2, 0)
            .family("theta", 1, 2, 1)
            .family("xi", 1, 2, 1)
            .symbol(SymbolDecl::new("pi", 2, 0, Symmetry::Antisymmetric))
            .build()
            .unwrap()
    }

    fn v(c: &Arc<Chart>, n: &str, i: i64) -> GradedPolynomial {
        GradedPolynomial::var(c, n, &[i]).unwrap()
    }

    #[test]
    fn normalize_reorders_odd_factors() {
        let c = theta_chart();
        let p = normalize(
            &c,
            &[RawTerm::new(integer(1), vec![Factor::coord("theta", &[2]), Factor::coord("theta", &[1])])],
        )
        .unwrap();
        let expected = -(&v(&c, "theta", 1) * &v(&c, "theta", 2));
        assert_eq!(p, expected);
        assert_eq!(p.to_string(), "-theta[1]*theta[2]");
    }

    #[test]
    fn odd_square_vanishes() {
        let c = theta_chart();
        let p = normalize(
            &c,
            &[RawTerm::new(integer(1), vec![Factor::coord("theta", &[1]), Factor::coord("theta", &[1])])],
        )
        .unwrap();
        assert!(p.is_zero());
    }

    #[test]
    fn even_odd_commute() {
        let c = theta_chart();
        let p = normalize(
            &c,
            &[
                RawTerm::new(integer(1), vec![Factor::coord("x", &[1]), Factor::coord("xi", &[1])]),
                RawTerm::new(integer(-1), vec![Factor::coord("xi", &[1]), Factor::coord("x", &[1])]),
            ],
        )
        .unwrap();
        assert!(p.is_zero());
    }

    #[test]
    fn unknown_coordinate_is_reported() {
        let c = theta_chart();
        let err = normalize(&c, &[RawTerm::new(integer(1), vec![Factor::coord("y", &[1])])]).unwrap_err();
        assert_eq!(err, GradedError::UnknownCoordinate("y[1]".into()));
    }

    #[test]
    fn products() {
        let c = theta_chart();
        let (t1, t2) = (v(&c, "theta", 1), v(&c, "theta", 2));
        let s = &t1 + &t2;
        assert!((&s * &s).is_zero());
        let a = &GradedPolynomial::integer(&c, 2) + &t1;
        let b = &GradedPolynomial::integer(&c, 3) + &t2;
        let expected = GradedPolynomial::integer(&c, 6) + t1.scale_int(3) + t2.scale_int(2) + &t1 * &t2;
        assert_eq!(&a * &b, expected);
    }

    #[test]
    fn jet_coefficients_are_even() {
        let c = theta_chart();
        let pi = GradedPolynomial::jet(&c, "pi", &[1, 2], &[]).unwrap();
        let lhs = &(&pi * &v(&c, "xi", 1)) * &v(&c, "xi", 2);
        let rhs = &pi * &(&v(&c, "xi", 1) * &v(&c, "xi", 2));
        assert_eq!(lhs, rhs);
        assert_eq!(lhs.to_string(), "pi[1,2]*xi[1]*xi[2]");
    }

    #[test]
    fn chart_mismatch() {
        let c1 = theta_chart();
        let c2 = Chart::builder().family("y", 1, 1, 0).build().unwrap();
        let a = GradedPolynomial::one(&c1);
        let b = GradedPolynomial::one(&c2);
        assert_eq!(a.checked_mul(&b), Err(GradedError::ChartMismatch));
    }

    #[test]
    fn derivatives() {
        let c = theta_chart();
        let t1 = c.id("theta", &[1]).unwrap();
        let p = &v(&c, "theta", 1) * &v(&c, "theta", 2);
        assert_eq!(p.derive(t1, Side::Left), v(&c, "theta", 2));
        // oracle: theta1 theta2 = -theta2 theta1, strip the rightmost factor
        assert_eq!(p.derive(t1, Side::Right), -v(&c, "theta", 2));

        let x1 = c.id("x", &[1]).unwrap();
        let pi = GradedPolynomial::jet(&c, "pi", &[1, 2], &[]).unwrap();
        let q = &(&pi * &v(&c, "xi", 1)) * &v(&c, "xi", 2);
        assert_eq!(q.derive_left(x1).to_string(), "pi[1,2],1*xi[1]*xi[2]");
    }

    #[test]
    fn even_coordinates_of_nonzero_degree_have_powers() {
        let c = Chart::builder().family("x", 1, 1, 0).family("xi", 1, 1, 2).build().unwrap();
        let xi = GradedPolynomial::var(&c, "xi", &[1]).unwrap();
        let sq = &xi * &xi;
        assert_eq!(sq.to_string(), "xi[1]^2");
        assert_eq!(sq.derive_left(c.id("xi", &[1]).unwrap()), xi.scale_int(2));
    }

    #[test]
    fn degree_reporting() {
        let c = theta_chart();
        let p = &v(&c, "x", 1) + &v(&c, "theta", 1);
        assert_eq!(p.degree(), None);
        assert!(!p.is_homogeneous());
        assert_eq!(v(&c, "theta", 1).degree(), Some(1));
        assert!(GradedPolynomial::zero(&c).is_homogeneous());
    }

    #[test]
    fn imaginary_unit_squares_to_minus_one() {
        let c = theta_chart();
        let i = GradedPolynomial::imaginary_unit(&c);
        assert_eq!(&i * &i, GradedPolynomial::integer(&c, -1));
    }

    #[test]
    fn substitution_of_jets_and_derivatives() {
        let c = theta_chart();
        let x1 = GradedPolynomial::var(&c, "x", &[1]).unwrap();
        let pi = GradedPolynomial::jet(&c, "pi", &[1, 2], &[]).unwrap();
        let xx = &v(&c, "xi", 1) * &v(&c, "xi", 2);
        let s = Substitution::new(&c).jet("pi", &[1, 2], &[], x1.clone()).unwrap();
        assert_eq!((&pi * &xx).substitute(&s).unwrap(), &x1 * &xx);
        let dpi = pi.derive_left(c.id("x", &[1]).unwrap());
        assert_eq!((&dpi * &xx).substitute(&s).unwrap(), xx);
        // antisymmetric partner picks up the sign
        let pi21 = GradedPolynomial::jet(&c, "pi", &[2, 1], &[]).unwrap();
        assert_eq!(pi21.substitute(&s).unwrap(), -x1);
    }

    #[test]
    fn substitution_degree_checks() {
        let c = theta_chart();
        let t1 = c.id("theta", &[1]).unwrap();
        let err = Substitution::new(&c).coordinate(t1, v(&c, "x", 1)).unwrap_err();
        assert!(matches!(err, GradedError::DegreeMismatch { .. }));
        let err = Substitution::new(&c).jet("pi", &[1, 2], &[], v(&c, "xi", 1)).unwrap_err();
        assert!(matches!(err, GradedError::DegreeMismatch { .. }));
    }

    #[test]
    fn su2_structure_constants_by_substitution() {
        let c = Chart::builder()
            .family("c", 1, 3, 1)
            .family("b", 1, 3, 1)
            .symbol(SymbolDecl::new("C", 1, 2, Symmetry::Antisymmetric))
            .build()
            .unwrap();
        let mut theta = GradedPolynomial::zero(&c);
        for a in 1..=3 {
            for b in 1..=3 {
                for k in 1..=3 {
                    let t = GradedPolynomial::jet(&c, "C", &[k], &[a, b]).unwrap();
                    let m = &(&t * &GradedPolynomial::var(&c, "c", &[a]).unwrap())
                        * &(&GradedPolynomial::var(&c, "c", &[b]).unwrap() * &GradedPolynomial::var(&c, "b", &[k]).unwrap());
                    theta += &m;
                }
            }
        }
        let theta = theta.scale(&rational(1, 2));
        let one = GradedPolynomial::one(&c);
        let s = Substitution::new(&c)
            .jet("C", &[3], &[1, 2], one.clone())
            .unwrap()
            .jet("C", &[1], &[2, 3], one.clone())
            .unwrap()
            .jet("C", &[2], &[3, 1], one)
            .unwrap();
        let got = theta.substitute(&s).unwrap();
        // brute-force oracle: sum over a<b of eps_{abk} c^a c^b b_k
        let cv = |i| GradedPolynomial::var(&c, "c", &[i]).unwrap();
        let bv = |i| GradedPolynomial::var(&c, "b", &[i]).unwrap();
        let want = &(&cv(1) * &cv(2)) * &bv(3) + &(&cv(2) * &cv(3)) * &bv(1) + &(&cv(3) * &cv(1)) * &bv(2);
        assert_eq!(got, want);
    }
}
