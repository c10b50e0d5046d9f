use std::sync::Arc;

use crate::graded::{Chart, CoordId, GradedPolynomial};

use super::StructureError;

/// Calculus on the body `M` of a chart: functions are polynomials in the
/// degree-0 family, vector fields and 1-forms are component lists.
#[derive(Clone, Debug)]
pub struct Base {
    chart: Arc<Chart>,
    x: Vec<CoordId>,
}

impl Base {
    pub fn new(chart: &Arc<Chart>, family: &str) -> Result<Self, StructureError> {
        let x = chart.family(family);
        if x.is_empty() || x.iter().any(|&c| chart.degree(c) != 0) {
            return Err(StructureError::Shape(format!("`{family}` must be a nonempty degree-0 family")));
        }
        Ok(Self { chart: chart.clone(), x })
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    pub fn ids(&self) -> &[CoordId] {
        &self.x
    }

    pub fn coordinate(&self, i: usize) -> GradedPolynomial {
        GradedPolynomial::coordinate(&self.chart, self.x[i])
    }

    pub fn zero(&self) -> GradedPolynomial {
        GradedPolynomial::zero(&self.chart)
    }

    pub fn partial(&self, f: &GradedPolynomial, i: usize) -> GradedPolynomial {
        f.derive_left(self.x[i])
    }

    /// `v(f) = v^i d_i f`.
    pub fn apply(&self, v: &[GradedPolynomial], f: &GradedPolynomial) -> GradedPolynomial {
        let mut out = self.zero();
        for (i, vi) in v.iter().enumerate() {
            if !vi.is_zero() {
                out += &(vi * &self.partial(f, i));
            }
        }
        out
    }

    pub fn lie_bracket(&self, v: &[GradedPolynomial], w: &[GradedPolynomial]) -> Vec<GradedPolynomial> {
        (0..self.dim()).map(|k| &self.apply(v, &w[k]) - &self.apply(w, &v[k])).collect()
    }

    pub fn differential(&self, f: &GradedPolynomial) -> Vec<GradedPolynomial> {
        (0..self.dim()).map(|i| self.partial(f, i)).collect()
    }

    /// `(L_v a)_k = v^j d_j a_k + a_j d_k v^j`.
    pub fn lie_derivative_form(&self, v: &[GradedPolynomial], a: &[GradedPolynomial]) -> Vec<GradedPolynomial> {
        (0..self.dim())
            .map(|k| {
                let mut t = self.apply(v, &a[k]);
                for j in 0..self.dim() {
                    t += &(&a[j] * &self.partial(&v[j], k));
                }
                t
            })
            .collect()
    }

    pub fn pair(&self, v: &[GradedPolynomial], a: &[GradedPolynomial]) -> GradedPolynomial {
        let mut out = self.zero();
        for (vi, ai) in v.iter().zip(a) {
            out += &(vi * ai);
        }
        out
    }
}

/// True when every term is built from degree-0 coordinates and jets only.
pub fn is_body(p: &GradedPolynomial) -> bool {
    let chart = p.chart();
    p.terms().all(|(m, _)| {
        m.coords().iter().all(|&(c, _)| chart.degree(c) == 0) && m.hbar_power() == 0 && !m.has_imaginary_unit()
    })
}

pub(crate) fn require_body(what: &str, p: &GradedPolynomial) -> Result<(), StructureError> {
    if is_body(p) {
        Ok(())
    } else {
        Err(StructureError::NotBody(format!("{what} = {p}")))
    }
}

/// Returns the sign of the permutation sorting `idx`, or 0 on a repeat.
pub(crate) fn permutation_sign(idx: &[usize]) -> i64 {
    let mut v = idx.to_vec();
    let mut sign = 1;
    for i in 0..v.len() {
        for j in 0..v.len() - 1 - i {
            if v[j] == v[j + 1] {
                return 0;
            }
            if v[j] > v[j + 1] {
                v.swap(j, j + 1);
                sign = -sign;
            }
        }
    }
    sign
}

/// Checks `t(idx)` is totally antisymmetric under every transposition.
pub(crate) fn check_alternating(
    what: &str,
    n: usize,
    arity: usize,
    get: impl Fn(&[usize]) -> GradedPolynomial,
) -> Result<(), StructureError> {
    let mut idx = vec![0; arity];
    loop {
        let v = get(&idx);
        for a in 0..arity {
            for b in a + 1..arity {
                let mut sw = idx.clone();
                sw.swap(a, b);
                if !(&v + &get(&sw)).is_zero() {
                    return Err(StructureError::NotAntisymmetric(format!("{what}{:?}", one_based(&idx))));
                }
            }
        }
        if !next_index(&mut idx, n) {
            return Ok(());
        }
    }
}

pub(crate) fn one_based(idx: &[usize]) -> Vec<usize> {
    idx.iter().map(|i| i + 1).collect()
}

/// Odometer over `[0, n)^k`; false after the last tuple.
pub(crate) fn next_index(idx: &mut [usize], n: usize) -> bool {
    for slot in idx.iter_mut().rev() {
        *slot += 1;
        if *slot < n {
            return true;
        }
        *slot = 0;
    }
    false
}

