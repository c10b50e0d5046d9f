use std::sync::Arc;

use rand::Rng;

use crate::graded::{integer, Chart, CoordId, GradedPolynomial, JetSymbol, Monomial};

/// Shape of a random polynomial.
#[derive(Clone, Debug)]
pub struct PolyShape {
    pub terms: usize,
    pub max_factors: usize,
    /// Required total degree; `None` for inhomogeneous output.
    pub degree: Option<i32>,
    pub coeff_bound: i64,
    /// Jet bases that may appear as coefficients.
    pub jets: Vec<String>,
    pub index_range: i64,
    /// Restrict coordinate factors to these ids (all when empty).
    pub coords: Vec<CoordId>,
}

impl Default for PolyShape {
    fn default() -> Self {
        Self { terms: 4, max_factors: 4, degree: None, coeff_bound: 3, jets: Vec::new(), index_range: 2, coords: Vec::new() }
    }
}

impl PolyShape {
    pub fn homogeneous(degree: i32) -> Self {
        Self { degree: Some(degree), ..Self::default() }
    }

    pub fn with_jets(mut self, jets: &[&str]) -> Self {
        self.jets = jets.iter().map(|s| s.to_string()).collect();
        self
    }

    pub fn over(mut self, coords: Vec<CoordId>) -> Self {
        self.coords = coords;
        self
    }
}

/// A random polynomial with small integer coefficients. Homogeneous shapes
/// retry monomials until the degree matches, so the result may have fewer
/// terms than requested (possibly zero) when the degree is hard to reach.
pub fn random_polynomial<R: Rng + ?Sized>(chart: &Arc<Chart>, rng: &mut R, shape: &PolyShape) -> GradedPolynomial {
    let pool: Vec<CoordId> = if shape.coords.is_empty() { (0..chart.len()).collect() } else { shape.coords.clone() };
    let mut out = GradedPolynomial::zero(chart);
    for _ in 0..shape.terms {
        for _attempt in 0..64 {
            let Some(p) = random_monomial(chart, rng, shape, &pool) else { continue };
            if let Some(d) = shape.degree {
                if p.degree() != Some(d) {
                    continue;
                }
            }
            let mut c = 0;
            while c == 0 {
                c = rng.gen_range(-shape.coeff_bound..=shape.coeff_bound);
            }
            out += &p.scale(&integer(c));
            break;
        }
    }
    out
}

fn random_monomial<R: Rng + ?Sized>(
    chart: &Arc<Chart>,
    rng: &mut R,
    shape: &PolyShape,
    pool: &[CoordId],
) -> Option<GradedPolynomial> {
    let mut p = GradedPolynomial::one(chart);
    let n = rng.gen_range(0..=shape.max_factors);
    for _ in 0..n {
        if !shape.jets.is_empty() && rng.gen_bool(0.3) {
            let base = &shape.jets[rng.gen_range(0..shape.jets.len())];
            let decl = chart.symbol(base)?;
            let upper: Vec<i64> = (0..decl.upper).map(|_| rng.gen_range(1..=shape.index_range)).collect();
            let lower: Vec<i64> = (0..decl.lower).map(|_| rng.gen_range(1..=shape.index_range)).collect();
            let (sign, mut j) = JetSymbol::canonical(chart, base, &upper, &lower).ok()??;
            if rng.gen_bool(0.3) {
                let body = chart.ids_of_degree(0);
                if !body.is_empty() {
                    j = j.differentiated(body[rng.gen_range(0..body.len())]);
                }
            }
            let f = GradedPolynomial::from_term(chart, Monomial::jet(j), integer(sign.into()));
            p = &p * &f;
        } else if !pool.is_empty() {
            let c = pool[rng.gen_range(0..pool.len())];
            p = &p * &GradedPolynomial::coordinate(chart, c);
        }
        if p.is_zero() {
            return None;
        }
    }
    Some(p)
}

/// Random polynomial in the given degree-0 coordinates with total degree at
/// most `max_degree` and at most `terms` terms.
pub fn random_function<R: Rng + ?Sized>(
    chart: &Arc<Chart>,
    rng: &mut R,
    body: &[CoordId],
    max_degree: u32,
    terms: usize,
) -> GradedPolynomial {
    let mut out = GradedPolynomial::zero(chart);
    for _ in 0..terms {
        let deg = rng.gen_range(0..=max_degree);
        let mut m = GradedPolynomial::constant(chart, integer(rng.gen_range(-3..=3)));
        for _ in 0..deg {
            if body.is_empty() {
                break;
            }
            m = &m * &GradedPolynomial::coordinate(chart, body[rng.gen_range(0..body.len())]);
        }
        out += &m;
    }
    out
}
