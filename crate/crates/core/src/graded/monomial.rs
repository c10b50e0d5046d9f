use super::chart::{Chart, CoordId};
use super::jet::JetSymbol;

/// A normal-form monomial: coordinate factors in canonical chart order, a
/// multiset of jet coefficients, and powers of the formal scalars `hbar`
/// and `I` (with `I^2 = -1`, so at most one `I` survives).
///
/// Odd coordinates always carry exponent one.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub(crate) coords: Vec<(CoordId, u32)>,
    pub(crate) jets: Vec<(JetSymbol, u32)>,
    pub(crate) hbar: u32,
    pub(crate) imag: bool,
}

impl Monomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn coordinate(id: CoordId) -> Self {
        Self { coords: vec![(id, 1)], ..Self::default() }
    }

    pub fn jet(j: JetSymbol) -> Self {
        Self { jets: vec![(j, 1)], ..Self::default() }
    }

    pub fn hbar() -> Self {
        Self { hbar: 1, ..Self::default() }
    }

    pub fn imaginary_unit() -> Self {
        Self { imag: true, ..Self::default() }
    }

    pub fn coords(&self) -> &[(CoordId, u32)] {
        &self.coords
    }

    pub fn jets(&self) -> &[(JetSymbol, u32)] {
        &self.jets
    }

    pub fn hbar_power(&self) -> u32 {
        self.hbar
    }

    pub fn has_imaginary_unit(&self) -> bool {
        self.imag
    }

    pub fn is_one(&self) -> bool {
        self.coords.is_empty() && self.jets.is_empty() && self.hbar == 0 && !self.imag
    }

    pub fn degree(&self, chart: &Chart) -> i32 {
        self.coords.iter().map(|&(c, e)| chart.degree(c) * e as i32).sum()
    }

    pub fn parity(&self, chart: &Chart) -> u8 {
        self.coords
            .iter()
            .filter(|&&(c, _)| chart.parity(c) == 1)
            .count() as u8
            % 2
    }

    pub fn exponent(&self, id: CoordId) -> u32 {
        self.coords
            .binary_search_by_key(&id, |&(c, _)| c)
            .map(|p| self.coords[p].1)
            .unwrap_or(0)
    }

    /// True when the monomial contains no odd coordinate.
    pub fn is_body(&self, chart: &Chart) -> bool {
        self.coords.iter().all(|&(c, _)| chart.parity(c) == 0)
    }

    /// Graded product `self * other`; `None` when an odd factor repeats.
    /// The sign collects the Koszul sign of moving odd factors of `other`
    /// past the larger odd factors of `self`, and `I*I = -1`.
    pub fn mul(&self, other: &Monomial, chart: &Chart) -> Option<(i8, Monomial)> {
        let mut sign = 1i8;
        let mut coords = Vec::with_capacity(self.coords.len() + other.coords.len());
        let (mut i, mut j) = (0, 0);
        // odd factors of `self` not yet merged
        let mut odd_left_remaining =
            self.coords.iter().filter(|&&(c, _)| chart.parity(c) == 1).count();
        while i < self.coords.len() || j < other.coords.len() {
            let take_left = match (self.coords.get(i), other.coords.get(j)) {
                (Some(a), Some(b)) => {
                    if a.0 == b.0 {
                        if chart.parity(a.0) == 1 {
                            return None;
                        }
                        coords.push((a.0, a.1 + b.1));
                        i += 1;
                        j += 1;
                        continue;
                    }
                    a.0 < b.0
                }
                (Some(_), None) => true,
                (None, Some(_)) => false,
                (None, None) => unreachable!(),
            };
            if take_left {
                let a = self.coords[i];
                if chart.parity(a.0) == 1 {
                    odd_left_remaining -= 1;
                }
                coords.push(a);
                i += 1;
            } else {
                let b = other.coords[j];
                if chart.parity(b.0) == 1 && odd_left_remaining % 2 == 1 {
                    sign = -sign;
                }
                coords.push(b);
                j += 1;
            }
        }
        let jets = merge_jets(&self.jets, &other.jets);
        let imag = self.imag ^ other.imag;
        if self.imag && other.imag {
            sign = -sign;
        }
        Some((sign, Monomial { coords, jets, hbar: self.hbar + other.hbar, imag }))
    }

    /// Removes one power of coordinate `id`, returning the multiplicity and the
    /// Koszul sign for stripping it from the left (`from_left`) or right end.
    pub(crate) fn strip_coordinate(
        &self,
        id: CoordId,
        from_left: bool,
        chart: &Chart,
    ) -> Option<(i8, u32, Monomial)> {
        let pos = self.coords.iter().position(|&(c, _)| c == id)?;
        let (_, exp) = self.coords[pos];
        let mut sign = 1i8;
        if chart.parity(id) == 1 {
            let range = if from_left { &self.coords[..pos] } else { &self.coords[pos + 1..] };
            let passed = range.iter().filter(|&&(c, _)| chart.parity(c) == 1).count();
            if passed % 2 == 1 {
                sign = -1;
            }
        }
        let mut rest = self.clone();
        if exp == 1 {
            rest.coords.remove(pos);
        } else {
            rest.coords[pos].1 -= 1;
        }
        Some((sign, exp, rest))
    }

    /// Replaces one power of the jet at `slot` by `replacement`.
    pub(crate) fn replace_jet(&self, slot: usize, replacement: JetSymbol) -> Monomial {
        let mut out = self.clone();
        if out.jets[slot].1 == 1 {
            out.jets.remove(slot);
        } else {
            out.jets[slot].1 -= 1;
        }
        out.jets = merge_jets(&out.jets, &[(replacement, 1)]);
        out
    }

    pub(crate) fn without_scalars(&self) -> Monomial {
        Monomial { hbar: 0, imag: false, ..self.clone() }
    }
}

fn merge_jets(a: &[(JetSymbol, u32)], b: &[(JetSymbol, u32)]) -> Vec<(JetSymbol, u32)> {
    let mut out: Vec<(JetSymbol, u32)> = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        match (a.get(i), b.get(j)) {
            (Some(x), Some(y)) if x.0 == y.0 => {
                out.push((x.0.clone(), x.1 + y.1));
                i += 1;
                j += 1;
            }
            (Some(x), Some(y)) if x.0 < y.0 => {
                out.push(x.clone());
                i += 1;
            }
            (Some(_), Some(y)) => {
                out.push(y.clone());
                j += 1;
            }
            (Some(x), None) => {
                out.push(x.clone());
                i += 1;
            }
            (None, Some(y)) => {
                out.push(y.clone());
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    out
}
