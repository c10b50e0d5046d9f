use std::sync::Arc;

use super::chart::{Chart, CoordId, IndexGroup, Symmetry};
use super::GradedError;

/// A formal degree-0 structure function `base^{upper}_{lower}` together with
/// the sorted multiset of degree-0 coordinates it has been differentiated by.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct JetSymbol {
    base: Arc<str>,
    upper: Vec<i64>,
    lower: Vec<i64>,
    deriv: Vec<CoordId>,
}

impl JetSymbol {
    /// Builds the canonical representative of `base^{upper}_{lower}`.
    ///
    /// Returns `Ok(None)` when the declared symmetry forces the component to
    /// vanish (repeated index under antisymmetry), otherwise the sign picked up
    /// while reordering indices.
    pub fn canonical(
        chart: &Chart,
        base: &str,
        upper: &[i64],
        lower: &[i64],
    ) -> Result<Option<(i8, JetSymbol)>, GradedError> {
        let decl = chart
            .symbol(base)
            .ok_or_else(|| GradedError::UnknownSymbol(base.to_string()))?;
        if decl.upper != upper.len() || decl.lower != lower.len() {
            return Err(GradedError::SymbolArity {
                symbol: base.to_string(),
                expected: decl.upper + decl.lower,
                found: upper.len() + lower.len(),
            });
        }
        let mut upper = upper.to_vec();
        let mut lower = lower.to_vec();
        let group = match decl.group {
            IndexGroup::Upper => &mut upper,
            IndexGroup::Lower => &mut lower,
        };
        let sign = match decl.symmetry {
            Symmetry::None => 1,
            Symmetry::Symmetric => {
                group.sort_unstable();
                1
            }
            Symmetry::Antisymmetric | Symmetry::TotallyAntisymmetric => {
                match sort_with_sign(group) {
                    Some(s) => s,
                    None => return Ok(None),
                }
            }
        };
        Ok(Some((sign, JetSymbol { base: Arc::from(base), upper, lower, deriv: Vec::new() })))
    }

    /// Jet with no indices and no derivatives.
    pub fn scalar(chart: &Chart, base: &str) -> Result<JetSymbol, GradedError> {
        Ok(Self::canonical(chart, base, &[], &[])?.expect("scalar jet never vanishes").1)
    }

    pub fn base(&self) -> &str {
        &self.base
    }

    pub fn upper(&self) -> &[i64] {
        &self.upper
    }

    pub fn lower(&self) -> &[i64] {
        &self.lower
    }

    pub fn deriv(&self) -> &[CoordId] {
        &self.deriv
    }

    /// The same component with all derivatives stripped.
    pub fn underived(&self) -> JetSymbol {
        JetSymbol { deriv: Vec::new(), ..self.clone() }
    }

    /// `∂/∂x` applied once more; keeps the multiset sorted.
    pub fn differentiated(&self, by: CoordId) -> JetSymbol {
        let mut deriv = self.deriv.clone();
        let pos = deriv.partition_point(|&d| d <= by);
        deriv.insert(pos, by);
        JetSymbol { deriv, ..self.clone() }
    }

    pub(crate) fn with_deriv(mut self, mut deriv: Vec<CoordId>) -> JetSymbol {
        deriv.sort_unstable();
        self.deriv = deriv;
        self
    }
}

/// Bubble-sorts `xs`, returning the permutation sign, or `None` on a repeat.
fn sort_with_sign(xs: &mut [i64]) -> Option<i8> {
    let mut sign = 1i8;
    for i in 0..xs.len() {
        for j in 0..xs.len() - 1 - i {
            if xs[j] == xs[j + 1] {
                return None;
            }
            if xs[j] > xs[j + 1] {
                xs.swap(j, j + 1);
                sign = -sign;
            }
        }
    }
    if xs.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some(sign)
}
