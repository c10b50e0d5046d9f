use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use super::GradedError;

/// Position of a coordinate in its chart's canonical order.
pub type CoordId = usize;

/// A graded coordinate `name[index]` of integer degree. Parity is always
/// `degree mod 2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GradedCoordinate {
    pub name: String,
    pub index: Vec<i64>,
    pub degree: i32,
}

impl GradedCoordinate {
    pub fn new(name: impl Into<String>, index: Vec<i64>, degree: i32) -> Self {
        Self { name: name.into(), index, degree }
    }

    pub fn parity(&self) -> u8 {
        self.degree.rem_euclid(2) as u8
    }

    fn sort_key(&self) -> (i32, &str, &[i64]) {
        (self.degree, self.name.as_str(), self.index.as_slice())
    }
}

impl fmt::Display for GradedCoordinate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        if !self.index.is_empty() {
            f.write_str("[")?;
            for (k, i) in self.index.iter().enumerate() {
                if k > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{i}")?;
            }
            f.write_str("]")?;
        }
        Ok(())
    }
}

/// Index symmetry declared for a jet symbol family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Symmetry {
    None,
    Antisymmetric,
    Symmetric,
    TotallyAntisymmetric,
}

impl Symmetry {
    pub fn keyword(self) -> &'static str {
        match self {
            Symmetry::None => "none",
            Symmetry::Antisymmetric => "antisymmetric",
            Symmetry::Symmetric => "symmetric",
            Symmetry::TotallyAntisymmetric => "totally-antisymmetric",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        Some(match s {
            "none" => Symmetry::None,
            "antisymmetric" => Symmetry::Antisymmetric,
            "symmetric" => Symmetry::Symmetric,
            "totally-antisymmetric" => Symmetry::TotallyAntisymmetric,
            _ => return None,
        })
    }
}

/// Which index group a symmetry acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum IndexGroup {
    Upper,
    Lower,
}

/// Declaration of a formal structure-function family such as `pi^{ij}` or
/// `C^c_{ab}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymbolDecl {
    pub base: String,
    pub upper: usize,
    pub lower: usize,
    pub symmetry: Symmetry,
    pub group: IndexGroup,
}

impl SymbolDecl {
    /// A family with `upper` upper and `lower` lower indices. The symmetry acts on
    /// the lower group when it has at least two indices, otherwise on the upper one.
    pub fn new(base: impl Into<String>, upper: usize, lower: usize, symmetry: Symmetry) -> Self {
        let group = if lower >= 2 || upper < 2 { IndexGroup::Lower } else { IndexGroup::Upper };
        Self { base: base.into(), upper, lower, symmetry, group }
    }

    pub fn on_group(mut self, group: IndexGroup) -> Self {
        self.group = group;
        self
    }

    pub fn scalar(base: impl Into<String>) -> Self {
        Self::new(base, 0, 0, Symmetry::None)
    }
}

/// A finite set of graded coordinates in canonical order together with the
/// jet-symbol families that may appear as coefficients.
#[derive(Debug)]
pub struct Chart {
    coords: Vec<GradedCoordinate>,
    lookup: HashMap<(String, Vec<i64>), CoordId>,
    symbols: BTreeMap<String, SymbolDecl>,
}

impl PartialEq for Chart {
    fn eq(&self, other: &Self) -> bool {
        self.coords == other.coords && self.symbols == other.symbols
    }
}

impl Eq for Chart {}

impl Chart {
    pub fn builder() -> ChartBuilder {
        ChartBuilder::default()
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coord(&self, id: CoordId) -> &GradedCoordinate {
        &self.coords[id]
    }

    pub fn coords(&self) -> &[GradedCoordinate] {
        &self.coords
    }

    pub fn degree(&self, id: CoordId) -> i32 {
        self.coords[id].degree
    }

    pub fn parity(&self, id: CoordId) -> u8 {
        self.coords[id].parity()
    }

    pub fn id(&self, name: &str, index: &[i64]) -> Result<CoordId, GradedError> {
        self.lookup
            .get(&(name.to_string(), index.to_vec()))
            .copied()
            .ok_or_else(|| {
                GradedError::UnknownCoordinate(GradedCoordinate::new(name, index.to_vec(), 0).to_string())
            })
    }

    /// Ids of a coordinate family, ordered by index.
    pub fn family(&self, name: &str) -> Vec<CoordId> {
        let mut ids: Vec<CoordId> =
            (0..self.coords.len()).filter(|&i| self.coords[i].name == name).collect();
        ids.sort_by(|&a, &b| self.coords[a].index.cmp(&self.coords[b].index));
        ids
    }

    /// Names of all coordinate families, in canonical order of first appearance.
    pub fn family_names(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for c in &self.coords {
            if !out.contains(&c.name) {
                out.push(c.name.clone());
            }
        }
        out
    }

    pub fn ids_of_degree(&self, degree: i32) -> Vec<CoordId> {
        (0..self.coords.len()).filter(|&i| self.coords[i].degree == degree).collect()
    }

    pub fn symbol(&self, base: &str) -> Option<&SymbolDecl> {
        self.symbols.get(base)
    }

    pub fn symbols(&self) -> impl Iterator<Item = &SymbolDecl> {
        self.symbols.values()
    }

    /// True when the degree-0 coordinates form a single family, in which case
    /// jet derivatives print as a bare index.
    pub(crate) fn single_body_family(&self) -> Option<&str> {
        let mut body = self.coords.iter().filter(|c| c.degree == 0);
        let first = body.next()?;
        let ok = first.index.len() == 1 && body.all(|c| c.name == first.name && c.index.len() == 1);
        ok.then_some(first.name.as_str())
    }
}

pub(crate) fn same_chart(a: &Arc<Chart>, b: &Arc<Chart>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

#[derive(Default, Debug, Clone)]
pub struct ChartBuilder {
    coords: Vec<GradedCoordinate>,
    symbols: BTreeMap<String, SymbolDecl>,
}

impl ChartBuilder {
    pub fn coord(mut self, name: &str, index: &[i64], degree: i32) -> Self {
        self.coords.push(GradedCoordinate::new(name, index.to_vec(), degree));
        self
    }

    /// Adds `name[lo]..=name[hi]`, all of one degree.
    pub fn family(mut self, name: &str, lo: i64, hi: i64, degree: i32) -> Self {
        for i in lo..=hi {
            self.coords.push(GradedCoordinate::new(name, vec![i], degree));
        }
        self
    }

    pub fn symbol(mut self, decl: SymbolDecl) -> Self {
        self.symbols.insert(decl.base.clone(), decl);
        self
    }

    pub fn build(mut self) -> Result<Arc<Chart>, GradedError> {
        self.coords.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
        let mut lookup = HashMap::new();
        for (id, c) in self.coords.iter().enumerate() {
            if lookup.insert((c.name.clone(), c.index.clone()), id).is_some() {
                return Err(GradedError::DuplicateCoordinate(c.to_string()));
            }
        }
        Ok(Arc::new(Chart { coords: self.coords, lookup, symbols: self.symbols }))
    }
}
