use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use super::chart::{same_chart, Chart, CoordId};
use super::jet::JetSymbol;
use super::monomial::Monomial;
use super::{GradedError, Rational};

/// Which end a graded derivative strips its variable from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Element of the free graded-commutative algebra over a chart, kept in
/// normal form: canonical monomials, nonzero rational coefficients.
#[derive(Clone, Debug)]
pub struct GradedPolynomial {
    chart: Arc<Chart>,
    terms: BTreeMap<Monomial, Rational>,
}

impl PartialEq for GradedPolynomial {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms && same_chart(&self.chart, &other.chart)
    }
}

impl Eq for GradedPolynomial {}

impl GradedPolynomial {
    pub fn zero(chart: &Arc<Chart>) -> Self {
        Self { chart: chart.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(chart: &Arc<Chart>, c: impl Into<Rational>) -> Self {
        Self::from_term(chart, Monomial::one(), c.into())
    }

    pub fn one(chart: &Arc<Chart>) -> Self {
        Self::constant(chart, Rational::one())
    }

    pub fn integer(chart: &Arc<Chart>, n: i64) -> Self {
        Self::constant(chart, Rational::from_integer(n.into()))
    }

    pub fn coordinate(chart: &Arc<Chart>, id: CoordId) -> Self {
        assert!(id < chart.len(), "coordinate id {id} outside chart");
        Self::from_term(chart, Monomial::coordinate(id), Rational::one())
    }

    /// Looks a coordinate up by name and index.
    pub fn var(chart: &Arc<Chart>, name: &str, index: &[i64]) -> Result<Self, GradedError> {
        Ok(Self::coordinate(chart, chart.id(name, index)?))
    }

    /// The jet component `base^{upper}_{lower}`, with its symmetry sign applied.
    pub fn jet(chart: &Arc<Chart>, base: &str, upper: &[i64], lower: &[i64]) -> Result<Self, GradedError> {
        Ok(match JetSymbol::canonical(chart, base, upper, lower)? {
            None => Self::zero(chart),
            Some((sign, j)) => Self::from_term(chart, Monomial::jet(j), Rational::from_integer(sign.into())),
        })
    }

    pub fn jet_symbol(chart: &Arc<Chart>, j: JetSymbol) -> Self {
        Self::from_term(chart, Monomial::jet(j), Rational::one())
    }

    pub fn hbar(chart: &Arc<Chart>) -> Self {
        Self::from_term(chart, Monomial::hbar(), Rational::one())
    }

    pub fn imaginary_unit(chart: &Arc<Chart>) -> Self {
        Self::from_term(chart, Monomial::imaginary_unit(), Rational::one())
    }

    pub fn from_term(chart: &Arc<Chart>, m: Monomial, c: Rational) -> Self {
        let mut p = Self::zero(chart);
        p.add_term(m, c);
        p
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The rational constant term.
    pub fn constant_term(&self) -> Rational {
        self.terms.get(&Monomial::one()).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Common degree of all terms; `None` for the zero polynomial or a mixed one.
    pub fn degree(&self) -> Option<i32> {
        let mut it = self.terms.keys().map(|m| m.degree(&self.chart));
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.is_zero() || self.degree().is_some()
    }

    /// Common parity of all terms; `None` when zero or of mixed parity.
    pub fn parity(&self) -> Option<u8> {
        let mut it = self.terms.keys().map(|m| m.parity(&self.chart));
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(&self.chart);
        }
        Self {
            chart: self.chart.clone(),
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn scale_int(&self, n: i64) -> Self {
        self.scale(&Rational::from_integer(n.into()))
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, GradedError> {
        self.ensure_chart(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, GradedError> {
        self.ensure_chart(other)?;
        let mut out = Self::zero(&self.chart);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if let Some((sign, m)) = ma.mul(mb, &self.chart) {
                    let c = ca * cb;
                    out.add_term(m, if sign < 0 { -c } else { c });
                }
            }
        }
        Ok(out)
    }

    fn ensure_chart(&self, other: &Self) -> Result<(), GradedError> {
        if same_chart(&self.chart, &other.chart) {
            Ok(())
        } else {
            Err(GradedError::ChartMismatch)
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = Self::one(&self.chart);
        for _ in 0..n {
            out = &out * self;
        }
        out
    }

    /// Graded derivative by a coordinate.
    ///
    /// The derivation has the parity of `c`. For a degree-0 `c`, jet factors
    /// are differentiated by appending `c` to their derivative multiset.
    pub fn derive(&self, c: CoordId, side: Side) -> Self {
        let chart = &self.chart;
        let mut out = Self::zero(chart);
        let body = chart.degree(c) == 0;
        for (m, coef) in &self.terms {
            if let Some((sign, exp, rest)) = m.strip_coordinate(c, side == Side::Left, chart) {
                let k = coef * Rational::from_integer(exp.into());
                out.add_term(rest, if sign < 0 { -k } else { k });
            }
            if body {
                for (slot, (j, exp)) in m.jets.iter().enumerate() {
                    let next = m.replace_jet(slot, j.differentiated(c));
                    out.add_term(next, coef * Rational::from_integer((*exp).into()));
                }
            }
        }
        out
    }

    pub fn derive_left(&self, c: CoordId) -> Self {
        self.derive(c, Side::Left)
    }

    pub fn derive_right(&self, c: CoordId) -> Self {
        self.derive(c, Side::Right)
    }

    /// Keeps only terms satisfying `keep`.
    pub fn filter_terms(&self, mut keep: impl FnMut(&Monomial) -> bool) -> Self {
        Self {
            chart: self.chart.clone(),
            terms: self.terms.iter().filter(|(m, _)| keep(m)).map(|(m, c)| (m.clone(), c.clone())).collect(),
        }
    }

    /// Part of the polynomial containing no odd coordinate.
    pub fn body(&self) -> Self {
        let chart = self.chart.clone();
        self.filter_terms(|m| m.is_body(&chart))
    }

    /// Sets the formal `hbar` to zero.
    pub fn at_hbar_zero(&self) -> Self {
        self.filter_terms(|m| m.hbar == 0)
    }

    /// Coefficient of `hbar^k` (still possibly containing `I`).
    pub fn hbar_coefficient(&self, k: u32) -> Self {
        let mut out = Self::zero(&self.chart);
        for (m, c) in &self.terms {
            if m.hbar == k {
                out.add_term(Monomial { hbar: 0, ..m.clone() }, c.clone());
            }
        }
        out
    }

    /// Drops `hbar` and `I` from every monomial, merging coefficients.
    pub fn forget_scalars(&self) -> Self {
        let mut out = Self::zero(&self.chart);
        for (m, c) in &self.terms {
            out.add_term(m.without_scalars(), c.clone());
        }
        out
    }

    /// Coefficient polynomial of the coordinate monomial `coords` (with
    /// exponents), as a polynomial in jets and formal scalars.
    pub fn coefficient_of_coords(&self, coords: &[(CoordId, u32)]) -> Self {
        let mut out = Self::zero(&self.chart);
        for (m, c) in &self.terms {
            if m.coords == coords {
                out.add_term(Monomial { coords: Vec::new(), ..m.clone() }, c.clone());
            }
        }
        out
    }

    /// Distinct coordinate parts of the terms, in order.
    pub fn coordinate_monomials(&self) -> Vec<Vec<(CoordId, u32)>> {
        let mut out: Vec<Vec<(CoordId, u32)>> = self.terms.keys().map(|m| m.coords.clone()).collect();
        out.sort();
        out.dedup();
        out
    }

    /// Rebinds the polynomial to a structurally equal chart.
    pub fn rebind(&self, chart: &Arc<Chart>) -> Result<Self, GradedError> {
        if !same_chart(&self.chart, chart) {
            return Err(GradedError::ChartMismatch);
        }
        Ok(Self { chart: chart.clone(), terms: self.terms.clone() })
    }

    /// Moves the polynomial to another chart, matching coordinates by
    /// `(name, index)` and jets by base. Fails if anything is missing there.
    pub fn transport(&self, target: &Arc<Chart>) -> Result<Self, GradedError> {
        if same_chart(&self.chart, target) {
            return Ok(Self { chart: target.clone(), terms: self.terms.clone() });
        }
        let map = |id: CoordId| {
            let c = self.chart.coord(id);
            target.id(&c.name, &c.index)
        };
        let mut out = Self::zero(target);
        for (m, c) in &self.terms {
            let scalars = Monomial { hbar: m.hbar, imag: m.imag, ..Monomial::default() };
            let mut acc = Self::from_term(target, scalars, c.clone());
            for (j, e) in &m.jets {
                if target.symbol(j.base()).is_none() {
                    return Err(GradedError::UnknownSymbol(j.base().to_string()));
                }
                let deriv = j.deriv().iter().map(|&d| map(d)).collect::<Result<Vec<_>, _>>()?;
                let moved = j.clone().with_deriv(deriv);
                acc = &acc * &Self::from_term(target, Monomial::jet(moved), Rational::one()).pow(*e);
            }
            for &(id, e) in &m.coords {
                acc = &acc * &Self::coordinate(target, map(id)?).pow(e);
            }
            out += &acc;
        }
        Ok(out)
    }

    /// Largest absolute value of the numerators and denominators, for reporting.
    pub fn max_coefficient(&self) -> Rational {
        self.terms.values().map(|c| c.abs()).max().unwrap_or_else(Rational::zero)
    }
}

impl<'a> Add<&'a GradedPolynomial> for &'a GradedPolynomial {
    type Output = GradedPolynomial;
    fn add(self, rhs: &'a GradedPolynomial) -> GradedPolynomial {
        self.checked_add(rhs).expect("chart mismatch in polynomial addition")
    }
}

impl Add for GradedPolynomial {
    type Output = GradedPolynomial;
    fn add(mut self, rhs: GradedPolynomial) -> GradedPolynomial {
        self += &rhs;
        self
    }
}

impl<'a> AddAssign<&'a GradedPolynomial> for GradedPolynomial {
    fn add_assign(&mut self, rhs: &'a GradedPolynomial) {
        self.ensure_chart(rhs).expect("chart mismatch in polynomial addition");
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl<'a> SubAssign<&'a GradedPolynomial> for GradedPolynomial {
    fn sub_assign(&mut self, rhs: &'a GradedPolynomial) {
        self.ensure_chart(rhs).expect("chart mismatch in polynomial subtraction");
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c.clone());
        }
    }
}

impl<'a> Sub<&'a GradedPolynomial> for &'a GradedPolynomial {
    type Output = GradedPolynomial;
    fn sub(self, rhs: &'a GradedPolynomial) -> GradedPolynomial {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for GradedPolynomial {
    type Output = GradedPolynomial;
    fn sub(mut self, rhs: GradedPolynomial) -> GradedPolynomial {
        self -= &rhs;
        self
    }
}

impl Neg for &GradedPolynomial {
    type Output = GradedPolynomial;
    fn neg(self) -> GradedPolynomial {
        GradedPolynomial {
            chart: self.chart.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }
}

impl Neg for GradedPolynomial {
    type Output = GradedPolynomial;
    fn neg(self) -> GradedPolynomial {
        -&self
    }
}

impl<'a> Mul<&'a GradedPolynomial> for &'a GradedPolynomial {
    type Output = GradedPolynomial;
    fn mul(self, rhs: &'a GradedPolynomial) -> GradedPolynomial {
        self.checked_mul(rhs).expect("chart mismatch in polynomial product")
    }
}

impl Mul for GradedPolynomial {
    type Output = GradedPolynomial;
    fn mul(self, rhs: GradedPolynomial) -> GradedPolynomial {
        &self * &rhs
    }
}

impl std::iter::Sum for GradedPolynomial {
    fn sum<I: Iterator<Item = GradedPolynomial>>(mut iter: I) -> Self {
        let mut acc = iter.next().expect("sum of an empty polynomial iterator has no chart");
        for p in iter {
            acc += &p;
        }
        acc
    }
}

/// Formats a monomial as a product of factors, `1` when empty.
pub(crate) fn fmt_monomial(m: &Monomial, chart: &Chart) -> String {
    let mut factors: Vec<String> = Vec::new();
    if m.imag {
        factors.push("I".into());
    }
    match m.hbar {
        0 => {}
        1 => factors.push("hbar".into()),
        k => factors.push(format!("hbar^{k}")),
    }
    for (j, e) in &m.jets {
        let s = fmt_jet(j, chart);
        if *e == 1 {
            factors.push(s);
        } else {
            factors.push(format!("{s}^{e}"));
        }
    }
    for &(c, e) in &m.coords {
        let s = chart.coord(c).to_string();
        if e == 1 {
            factors.push(s);
        } else {
            factors.push(format!("{s}^{e}"));
        }
    }
    if factors.is_empty() {
        "1".into()
    } else {
        factors.join("*")
    }
}

pub(crate) fn fmt_jet(j: &JetSymbol, chart: &Chart) -> String {
    let mut s = j.base().to_string();
    let idx: Vec<String> = j.upper().iter().chain(j.lower()).map(|i| i.to_string()).collect();
    if !idx.is_empty() {
        s.push('[');
        s.push_str(&idx.join(","));
        s.push(']');
    }
    let bare = chart.single_body_family().is_some();
    for &d in j.deriv() {
        let c = chart.coord(d);
        if bare {
            s.push_str(&format!(",{}", c.index[0]));
        } else {
            s.push_str(&format!(",{c}"));
        }
    }
    s
}

pub(crate) fn fmt_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for GradedPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if k == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            let mono = fmt_monomial(m, &self.chart);
            if m.is_one() {
                f.write_str(&fmt_rational(&mag))?;
            } else if mag.is_one() {
                f.write_str(&mono)?;
            } else {
                write!(f, "{}*{}", fmt_rational(&mag), mono)?;
            }
        }
        Ok(())
    }
}
