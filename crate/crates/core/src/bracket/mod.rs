//! Graded symplectic charts, the induced graded Poisson bracket of degree
//! `-n`, homological functions and their master obstructions, derived
//! brackets and the finite-dimensional BV Laplacian.
//!
//! Sign convention: for a conjugate pair `(a, b)` of weight `w`,
//!
//! ```text
//! {f, g} = w (f <-d_a)(d_b-> g) - (-1)^{|a||b|} w (f <-d_b)(d_a-> g)
//! ```
//!
//! with right derivatives on `f` and left derivatives on `g`; a metric
//! block contributes `(f <-d_{eta^a}) k^{ab} (d_{eta^b}-> g)`. Hence
//! `{x^i, xi_j} = +delta^i_j` and every other sign follows.

mod report;

use std::sync::Arc;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::graded::{rational, Chart, CoordId, GradedError, GradedPolynomial, Rational, Side};
use crate::linalg::{self, Matrix};

pub use report::{CheckPart, CheckReport, Verdict};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BracketError {
    #[error(transparent)]
    Graded(#[from] GradedError),
    #[error("coordinate `{0}` is not paired")]
    Unpaired(String),
    #[error("coordinate `{0}` is paired more than once")]
    PairedTwice(String),
    #[error("pair ({a}, {b}) has degrees summing to {sum}, chart degree is {n}")]
    PairDegree { a: String, b: String, sum: i32, n: i32 },
    #[error("metric block coordinate `{coord}` has degree {degree}; need 2*degree = {n}")]
    MetricDegree { coord: String, degree: i32, n: i32 },
    #[error("fiber metric must be a symmetric invertible {0}x{0} matrix")]
    BadMetric(usize),
    #[error("{what} must have degree {expected}, found {found:?}")]
    DegreeMismatch { what: String, expected: i32, found: Option<i32> },
    #[error("operation needs a chart of degree {expected}, this one has degree {found}")]
    WrongChartDegree { expected: i32, found: i32 },
}

/// One Darboux pair with its weight in the bracket.
#[derive(Clone, Debug, PartialEq)]
pub struct ConjugatePair {
    pub first: CoordId,
    pub second: CoordId,
    pub weight: Rational,
}

/// Self-paired block of degree-n/2 coordinates with fiber metric `k_{ab}`.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricBlock {
    pub coords: Vec<CoordId>,
    pub metric: Matrix,
    pub inverse: Matrix,
}

/// A chart together with a Darboux symplectic form of degree `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymplecticChart {
    chart: Arc<Chart>,
    degree: i32,
    pairs: Vec<ConjugatePair>,
    metric: Option<MetricBlock>,
    // partner table: coordinate -> (pair index, is_first)
    role: Vec<Role>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Role {
    Pair(usize, bool),
    Metric(usize),
}

impl SymplecticChart {
    /// Validates that every coordinate is paired exactly once, that paired
    /// degrees sum to `n`, and that the metric block is symmetric, invertible
    /// and sits in degree `n/2`.
    pub fn new(
        chart: &Arc<Chart>,
        degree: i32,
        pairs: Vec<ConjugatePair>,
        metric: Option<(Vec<CoordId>, Matrix)>,
    ) -> Result<Self, BracketError> {
        let name = |id: CoordId| chart.coord(id).to_string();
        let mut role: Vec<Option<Role>> = vec![None; chart.len()];
        for (k, p) in pairs.iter().enumerate() {
            for (id, first) in [(p.first, true), (p.second, false)] {
                if role[id].is_some() {
                    return Err(BracketError::PairedTwice(name(id)));
                }
                role[id] = Some(Role::Pair(k, first));
            }
            let sum = chart.degree(p.first) + chart.degree(p.second);
            if sum != degree {
                return Err(BracketError::PairDegree { a: name(p.first), b: name(p.second), sum, n: degree });
            }
        }
        let metric = match metric {
            None => None,
            Some((coords, k)) => {
                if k.len() != coords.len() || !linalg::is_symmetric(&k) {
                    return Err(BracketError::BadMetric(coords.len()));
                }
                let inverse = linalg::invert(&k).ok_or(BracketError::BadMetric(coords.len()))?;
                for (slot, &id) in coords.iter().enumerate() {
                    if role[id].is_some() {
                        return Err(BracketError::PairedTwice(name(id)));
                    }
                    if 2 * chart.degree(id) != degree {
                        return Err(BracketError::MetricDegree { coord: name(id), degree: chart.degree(id), n: degree });
                    }
                    role[id] = Some(Role::Metric(slot));
                }
                Some(MetricBlock { coords, metric: k, inverse })
            }
        };
        let role = role
            .into_iter()
            .enumerate()
            .map(|(id, r)| r.ok_or_else(|| BracketError::Unpaired(name(id))))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { chart: chart.clone(), degree, pairs, metric, role })
    }

    /// Pairs `first[i] <-> second[i]` family-wise with unit weight.
    pub fn darboux(
        chart: &Arc<Chart>,
        degree: i32,
        families: &[(&str, &str)],
        metric: Option<(&str, Matrix)>,
    ) -> Result<Self, BracketError> {
        let mut pairs = Vec::new();
        for (a, b) in families {
            let fa = chart.family(a);
            let fb = chart.family(b);
            if fa.len() != fb.len() {
                return Err(BracketError::Unpaired(format!("{a}/{b}")));
            }
            for (x, y) in fa.into_iter().zip(fb) {
                pairs.push(ConjugatePair { first: x, second: y, weight: Rational::one() });
            }
        }
        let metric = metric.map(|(name, k)| (chart.family(name), k));
        Self::new(chart, degree, pairs, metric)
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn degree(&self) -> i32 {
        self.degree
    }

    pub fn pairs(&self) -> &[ConjugatePair] {
        &self.pairs
    }

    pub fn metric(&self) -> Option<&MetricBlock> {
        self.metric.as_ref()
    }

    fn sign(&self, a: CoordId, b: CoordId) -> i64 {
        if self.chart.parity(a) * self.chart.parity(b) == 1 {
            -1
        } else {
            1
        }
    }

    /// `Omega^{AB}` as a list of `(A, B, value)` nonzero entries.
    fn inverse_entries(&self) -> Vec<(CoordId, CoordId, Rational)> {
        let mut out = Vec::new();
        for p in &self.pairs {
            out.push((p.first, p.second, p.weight.clone()));
            let s = -self.sign(p.first, p.second);
            out.push((p.second, p.first, &p.weight * Rational::from_integer(s.into())));
        }
        if let Some(m) = &self.metric {
            for (i, &a) in m.coords.iter().enumerate() {
                for (j, &b) in m.coords.iter().enumerate() {
                    if !m.inverse[i][j].is_zero() {
                        out.push((a, b, m.inverse[i][j].clone()));
                    }
                }
            }
        }
        out
    }

    fn check(&self, p: &GradedPolynomial) -> Result<(), BracketError> {
        p.rebind(&self.chart)?;
        Ok(())
    }

    /// The graded Poisson bracket `{f, g}` of degree `-n`.
    pub fn poisson_bracket(&self, f: &GradedPolynomial, g: &GradedPolynomial) -> Result<GradedPolynomial, BracketError> {
        self.check(f)?;
        self.check(g)?;
        Ok(self.bracket(f, g))
    }

    pub(crate) fn bracket(&self, f: &GradedPolynomial, g: &GradedPolynomial) -> GradedPolynomial {
        let mut out = GradedPolynomial::zero(&self.chart);
        if f.is_zero() || g.is_zero() {
            return out;
        }
        let fv = occurring(f);
        let gv = occurring(g);
        let mut right: Vec<Option<GradedPolynomial>> = vec![None; self.chart.len()];
        let mut left: Vec<Option<GradedPolynomial>> = vec![None; self.chart.len()];
        for (a, b, w) in self.inverse_entries() {
            if !fv[a] || !gv[b] {
                continue;
            }
            let fa = right[a].get_or_insert_with(|| f.derive(a, Side::Right)).clone();
            let gb = left[b].get_or_insert_with(|| g.derive(b, Side::Left)).clone();
            if fa.is_zero() || gb.is_zero() {
                continue;
            }
            out += &(&fa * &gb).scale(&w);
        }
        out
    }

    /// Hamiltonian vector field of `theta` applied to `f`: `{Theta, f}`.
    pub fn q_apply(&self, theta: &GradedPolynomial, f: &GradedPolynomial) -> Result<GradedPolynomial, BracketError> {
        self.check_homological(theta)?;
        self.poisson_bracket(theta, f)
    }

    pub fn check_homological(&self, theta: &GradedPolynomial) -> Result<(), BracketError> {
        self.check(theta)?;
        let want = self.degree + 1;
        if !theta.is_zero() && theta.degree() != Some(want) {
            return Err(BracketError::DegreeMismatch { what: "Theta".into(), expected: want, found: theta.degree() });
        }
        Ok(())
    }

    /// `1/2 {Theta, Theta}` in normal form.
    pub fn half_self_bracket(&self, theta: &GradedPolynomial) -> GradedPolynomial {
        self.bracket(theta, theta).scale(&rational(1, 2))
    }

    /// Classical master obstruction `1/2 {Theta, Theta}`.
    pub fn master_obstruction(&self, theta: &GradedPolynomial) -> Result<CheckReport, BracketError> {
        self.check_homological(theta)?;
        Ok(CheckReport::single(
            "master",
            format!("1/2{{Theta,Theta}} on a degree-{} chart", self.degree),
            self.half_self_bracket(theta),
        ))
    }

    /// Derived bracket `{{a, Theta}, b}`. Extractors apply their own signs.
    pub fn derived_bracket(
        &self,
        a: &GradedPolynomial,
        b: &GradedPolynomial,
        theta: &GradedPolynomial,
    ) -> Result<GradedPolynomial, BracketError> {
        self.check(a)?;
        self.check(b)?;
        self.check(theta)?;
        Ok(self.bracket(&self.bracket(a, theta), b))
    }

    fn require_bv(&self) -> Result<(), BracketError> {
        if self.degree != -1 {
            return Err(BracketError::WrongChartDegree { expected: -1, found: self.degree });
        }
        Ok(())
    }

    /// `Delta F = sum over pairs (Phi, Phi*) of (-1)^{|Phi|} d_Phi d_{Phi*} F`,
    /// both left derivatives, the first member of each pair being the field.
    /// The parity sign only matters for odd fields; without it `Delta` fails
    /// to generate the bracket on charts with ghosts.
    pub fn bv_laplacian(&self, f: &GradedPolynomial) -> Result<GradedPolynomial, BracketError> {
        self.require_bv()?;
        self.check(f)?;
        Ok(self.laplacian(f))
    }

    fn laplacian(&self, f: &GradedPolynomial) -> GradedPolynomial {
        let mut out = GradedPolynomial::zero(&self.chart);
        for p in &self.pairs {
            let inner = f.derive(p.second, Side::Left);
            if inner.is_zero() {
                continue;
            }
            let w = if self.chart.parity(p.first) == 1 { -p.weight.clone() } else { p.weight.clone() };
            out += &inner.derive(p.first, Side::Left).scale(&w);
        }
        out
    }

    /// Quantum master obstruction `-2 I hbar Delta S + {S, S}`.
    pub fn quantum_master_obstruction(&self, s: &GradedPolynomial) -> Result<CheckReport, BracketError> {
        self.require_bv()?;
        self.check(s)?;
        let chart = &self.chart;
        let pref = (&GradedPolynomial::imaginary_unit(chart) * &GradedPolynomial::hbar(chart)).scale_int(-2);
        let obstruction = &(&pref * &self.laplacian(s)) + &self.bracket(s, s);
        Ok(CheckReport::single("quantum-master", "-2 I hbar Delta S + {S,S} on a degree -1 chart", obstruction))
    }
}

fn occurring(p: &GradedPolynomial) -> Vec<bool> {
    let n = p.chart().len();
    let mut v = vec![false; n];
    let body = p.chart().ids_of_degree(0);
    for (m, _) in p.terms() {
        for &(c, _) in m.coords() {
            v[c] = true;
        }
        if !m.jets().is_empty() {
            for &b in &body {
                v[b] = true;
            }
        }
    }
    v
}

#[cfg(test)]
mod tests;
