use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use super::chart::{Chart, CoordId};
use super::jet::JetSymbol;
use super::monomial::Monomial;
use super::poly::GradedPolynomial;
use super::GradedError;

/// A parity-respecting algebra morphism given on generators.
///
/// Coordinates map to polynomials of the same degree. Jet components map to
/// degree-0 polynomials in the body coordinates; derivatives of a bound jet
/// become actual derivatives of its value. Once any component of a family is
/// bound, the family is treated as explicit and its unbound components are 0.
#[derive(Clone, Debug)]
pub struct Substitution {
    chart: Arc<Chart>,
    coords: BTreeMap<CoordId, GradedPolynomial>,
    jets: BTreeMap<JetSymbol, GradedPolynomial>,
    families: BTreeSet<String>,
}

impl Substitution {
    pub fn new(chart: &Arc<Chart>) -> Self {
        Self { chart: chart.clone(), coords: BTreeMap::new(), jets: BTreeMap::new(), families: BTreeSet::new() }
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn coordinate(mut self, id: CoordId, value: GradedPolynomial) -> Result<Self, GradedError> {
        let value = value.rebind(&self.chart)?;
        let want = self.chart.degree(id);
        if !value.is_zero() && value.degree() != Some(want) {
            return Err(GradedError::DegreeMismatch {
                what: self.chart.coord(id).to_string(),
                expected: want,
                found: value.degree(),
            });
        }
        self.coords.insert(id, value);
        Ok(self)
    }

    /// Binds the component `base^{upper}_{lower}`; the value is stored for the
    /// canonical index order with the symmetry sign folded in.
    pub fn jet(mut self, base: &str, upper: &[i64], lower: &[i64], value: GradedPolynomial) -> Result<Self, GradedError> {
        let value = value.rebind(&self.chart)?;
        self.check_body_value(base, &value)?;
        self.families.insert(base.to_string());
        if let Some((sign, j)) = JetSymbol::canonical(&self.chart, base, upper, lower)? {
            let v = if sign < 0 { -value } else { value };
            self.jets.insert(j, v);
        }
        Ok(self)
    }

    /// Marks a family as explicit without binding any component (all zero).
    pub fn zero_family(mut self, base: &str) -> Result<Self, GradedError> {
        if self.chart.symbol(base).is_none() {
            return Err(GradedError::UnknownSymbol(base.to_string()));
        }
        self.families.insert(base.to_string());
        Ok(self)
    }

    fn check_body_value(&self, base: &str, value: &GradedPolynomial) -> Result<(), GradedError> {
        let body_only = value.terms().all(|(m, _)| {
            m.coords().iter().all(|&(c, _)| self.chart.degree(c) == 0) && m.hbar_power() == 0 && !m.has_imaginary_unit()
        });
        if !body_only {
            return Err(GradedError::DegreeMismatch { what: base.to_string(), expected: 0, found: value.degree() });
        }
        Ok(())
    }

    pub fn is_bound_family(&self, base: &str) -> bool {
        self.families.contains(base)
    }

    fn jet_value(&self, j: &JetSymbol) -> Option<GradedPolynomial> {
        if !self.families.contains(j.base()) {
            return None;
        }
        let base_value = match self.jets.get(&j.underived()) {
            Some(v) => v.clone(),
            None => return Some(GradedPolynomial::zero(&self.chart)),
        };
        let mut v = base_value;
        for &d in j.deriv() {
            v = v.derive_left(d);
        }
        Some(v)
    }

    /// Applies the morphism. Factors of each monomial are replaced in
    /// canonical order, so odd images keep their relative Koszul signs.
    pub fn apply(&self, p: &GradedPolynomial) -> Result<GradedPolynomial, GradedError> {
        let p = p.rebind(&self.chart)?;
        let mut out = GradedPolynomial::zero(&self.chart);
        for (m, c) in p.terms() {
            let scalars = Monomial { hbar: m.hbar_power(), imag: m.has_imaginary_unit(), ..Monomial::default() };
            let mut acc = GradedPolynomial::from_term(&self.chart, scalars, c.clone());
            for (j, e) in m.jets() {
                let factor = match self.jet_value(j) {
                    Some(v) => v,
                    None => GradedPolynomial::jet_symbol(&self.chart, j.clone()),
                };
                acc = &acc * &factor.pow(*e);
                if acc.is_zero() {
                    break;
                }
            }
            for &(id, e) in m.coords() {
                let factor = match self.coords.get(&id) {
                    Some(v) => v.clone(),
                    None => GradedPolynomial::coordinate(&self.chart, id),
                };
                acc = &acc * &factor.pow(e);
                if acc.is_zero() {
                    break;
                }
            }
            out += &acc;
        }
        Ok(out)
    }
}

impl GradedPolynomial {
    /// Shorthand for [`Substitution::apply`].
    pub fn substitute(&self, s: &Substitution) -> Result<GradedPolynomial, GradedError> {
        s.apply(self)
    }
}
