//! Connection-level geometry of Lie algebroids: the E-differential,
//! connections and basic E-connections, curvatures, E-torsion and the basic
//! curvature, plus the torsion and basic curvature of pre-Courant data.
//!
//! Index conventions (all 0-based in code, 1-based in labels):
//! - `omega[i][a][b]`: `nabla_{d_i} e_a = omega[i][a][b] e_b`
//! - `gamma[k][i][j]`: `nabla_{d_i} d_j = gamma[k][i][j] d_k`
//! - curvature `R[i][j][a][b]`: `R(d_i, d_j) e_a = R[i][j][a][b] e_b`
//! - E-torsion `T[a][b]` is the section `T(e_a, e_b)`
//! - basic curvature `S[a][b][i]` is the section `S(e_a, e_b)(d_i)`

mod courant;
mod forms;
mod lie;

use std::sync::Arc;

use thiserror::Error;

use crate::graded::{Chart, GradedPolynomial};
use crate::linalg::Matrix;
use crate::structures::{is_body, Base, CourantData, LieAlgebroidData, StructureError};

pub use courant::{CourantGeometry, ECourantConnection};
pub use forms::{e_differential, EForm};
pub use lie::{e_differential_squared, GeometryReport, LieGeometry, ALT_SIGN};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeometryError {
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error("{0}")]
    Shape(String),
    #[error("connection coefficient must be a body function: {0}")]
    NotBody(String),
    #[error("connection is not metric compatible at omega[{0}]")]
    NotMetric(usize),
}

pub type Section = Vec<GradedPolynomial>;
pub type VectorField = Vec<GradedPolynomial>;

/// Anchor and bracket on frame components.
pub trait Algebroid {
    fn base(&self) -> &Base;
    fn rank(&self) -> usize;
    fn anchor_of(&self, e: &[GradedPolynomial]) -> VectorField;
    fn bracket_of(&self, e: &[GradedPolynomial], f: &[GradedPolynomial]) -> Section;

    fn chart(&self) -> &Arc<Chart> {
        self.base().chart()
    }

    fn frame(&self, a: usize) -> Section {
        (0..self.rank()).map(|b| GradedPolynomial::integer(self.chart(), (a == b) as i64)).collect()
    }
}

impl Algebroid for LieAlgebroidData {
    fn base(&self) -> &Base {
        LieAlgebroidData::base(self)
    }

    fn rank(&self) -> usize {
        LieAlgebroidData::rank(self)
    }

    fn anchor_of(&self, e: &[GradedPolynomial]) -> VectorField {
        self.anchor(e)
    }

    fn bracket_of(&self, e: &[GradedPolynomial], f: &[GradedPolynomial]) -> Section {
        self.bracket(e, f)
    }
}

/// Courant data on frame components `e_a eta^a`, with the skew bracket.
impl Algebroid for CourantData {
    fn base(&self) -> &Base {
        CourantData::base(self)
    }

    fn rank(&self) -> usize {
        CourantData::rank(self)
    }

    fn anchor_of(&self, e: &[GradedPolynomial]) -> VectorField {
        self.anchor_vector(&self.section(e))
    }

    fn bracket_of(&self, e: &[GradedPolynomial], f: &[GradedPolynomial]) -> Section {
        self.components(&self.skew(&self.section(e), &self.section(f)))
    }
}

pub(crate) fn add(a: &[GradedPolynomial], b: &[GradedPolynomial]) -> Vec<GradedPolynomial> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub(crate) fn sub(a: &[GradedPolynomial], b: &[GradedPolynomial]) -> Vec<GradedPolynomial> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub(crate) fn times(f: &GradedPolynomial, a: &[GradedPolynomial]) -> Vec<GradedPolynomial> {
    a.iter().map(|x| f * x).collect()
}

pub(crate) fn scaled(a: &[GradedPolynomial], n: i64) -> Vec<GradedPolynomial> {
    a.iter().map(|x| x.scale_int(n)).collect()
}

pub(crate) fn first_nonzero(chart: &Arc<Chart>, v: &[GradedPolynomial]) -> GradedPolynomial {
    v.iter().find(|p| !p.is_zero()).cloned().unwrap_or_else(|| GradedPolynomial::zero(chart))
}

/// A connection `nabla` on a rank-`r` bundle together with an affine
/// connection on `TM`.
#[derive(Clone, Debug)]
pub struct Connection {
    base: Base,
    rank: usize,
    omega: Vec<Vec<Vec<GradedPolynomial>>>,
    gamma: Vec<Vec<Vec<GradedPolynomial>>>,
}

impl Connection {
    pub fn new(
        base: &Base,
        rank: usize,
        omega: Vec<Vec<Vec<GradedPolynomial>>>,
        gamma: Vec<Vec<Vec<GradedPolynomial>>>,
    ) -> Result<Self, GeometryError> {
        let d = base.dim();
        let cube = |t: &Vec<Vec<Vec<GradedPolynomial>>>, n0: usize, n1: usize, n2: usize| {
            t.len() == n0 && t.iter().all(|m| m.len() == n1 && m.iter().all(|r| r.len() == n2))
        };
        if !cube(&omega, d, rank, rank) {
            return Err(GeometryError::Shape(format!("omega must be {d}x{rank}x{rank}")));
        }
        if !cube(&gamma, d, d, d) {
            return Err(GeometryError::Shape(format!("gamma must be {d}x{d}x{d}")));
        }
        let chart = base.chart();
        let fix = |t: Vec<Vec<Vec<GradedPolynomial>>>| -> Result<Vec<Vec<Vec<GradedPolynomial>>>, GeometryError> {
            let mut out = Vec::new();
            for m in t {
                let mut mm = Vec::new();
                for r in m {
                    let mut rr = Vec::new();
                    for p in r {
                        let p = p.rebind(chart).map_err(StructureError::from)?;
                        if !is_body(&p) {
                            return Err(GeometryError::NotBody(p.to_string()));
                        }
                        rr.push(p);
                    }
                    mm.push(rr);
                }
                out.push(mm);
            }
            Ok(out)
        };
        Ok(Self { base: base.clone(), rank, omega: fix(omega)?, gamma: fix(gamma)? })
    }

    pub fn flat(base: &Base, rank: usize) -> Self {
        let d = base.dim();
        let z = base.zero();
        Self { base: base.clone(), rank, omega: vec![vec![vec![z.clone(); rank]; rank]; d], gamma: vec![vec![vec![z; d]; d]; d] }
    }

    pub fn base(&self) -> &Base {
        &self.base
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn omega(&self, i: usize, a: usize, b: usize) -> &GradedPolynomial {
        &self.omega[i][a][b]
    }

    pub fn gamma(&self, k: usize, i: usize, j: usize) -> &GradedPolynomial {
        &self.gamma[k][i][j]
    }

    /// `(nabla_v s)^b = v^i (d_i s^b + s^a omega[i][a][b])`.
    pub fn covariant(&self, v: &[GradedPolynomial], s: &[GradedPolynomial]) -> Section {
        (0..self.rank)
            .map(|b| {
                let mut t = self.base.apply(v, &s[b]);
                for (i, vi) in v.iter().enumerate() {
                    if vi.is_zero() {
                        continue;
                    }
                    let mut inner = self.base.zero();
                    for (a, sa) in s.iter().enumerate() {
                        if !self.omega[i][a][b].is_zero() {
                            inner += &(sa * &self.omega[i][a][b]);
                        }
                    }
                    t += &(vi * &inner);
                }
                t
            })
            .collect()
    }

    /// `(nabla_v w)^k = v^i (d_i w^k + w^j gamma[k][i][j])`.
    pub fn covariant_tm(&self, v: &[GradedPolynomial], w: &[GradedPolynomial]) -> VectorField {
        let d = self.base.dim();
        (0..d)
            .map(|k| {
                let mut t = self.base.apply(v, &w[k]);
                for i in 0..d {
                    for j in 0..d {
                        if !self.gamma[k][i][j].is_zero() {
                            t += &(&(&v[i] * &w[j]) * &self.gamma[k][i][j]);
                        }
                    }
                }
                t
            })
            .collect()
    }

    /// `R(v, w) s = [nabla_v, nabla_w] s - nabla_{[v,w]} s`.
    pub fn curvature(&self, v: &[GradedPolynomial], w: &[GradedPolynomial], s: &[GradedPolynomial]) -> Section {
        let a = self.covariant(v, &self.covariant(w, s));
        let b = self.covariant(w, &self.covariant(v, s));
        sub(&sub(&a, &b), &self.covariant(&self.base.lie_bracket(v, w), s))
    }

    pub fn coordinate_field(&self, i: usize) -> VectorField {
        (0..self.base.dim()).map(|k| GradedPolynomial::integer(self.base.chart(), (i == k) as i64)).collect()
    }

    fn frame(&self, a: usize) -> Section {
        (0..self.rank).map(|b| GradedPolynomial::integer(self.base.chart(), (a == b) as i64)).collect()
    }

    /// `R[i][j][a][b]` from the definition on coordinate fields and frames.
    pub fn curvature_components(&self) -> Vec<Vec<Vec<Section>>> {
        let d = self.base.dim();
        (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| (0..self.rank).map(|a| self.curvature(&self.coordinate_field(i), &self.coordinate_field(j), &self.frame(a))).collect())
                    .collect()
            })
            .collect()
    }

    /// `R[i][j][a][b] = d_i w_ja^b - d_j w_ia^b + w_ja^c w_ic^b - w_ia^c w_jc^b`.
    pub fn curvature_coordinate(&self, i: usize, j: usize, a: usize, b: usize) -> GradedPolynomial {
        let w = &self.omega;
        let mut t = &self.base.partial(&w[j][a][b], i) - &self.base.partial(&w[i][a][b], j);
        for c in 0..self.rank {
            t += &(&w[j][a][c] * &w[i][c][b]);
            t -= &(&w[i][a][c] * &w[j][c][b]);
        }
        t
    }

    /// Checks `d_i k^{ab} = omega[i][a][c] k^{cb} + omega[i][b][c] k^{ac}` for a
    /// constant pairing `k`.
    pub fn check_metric(&self, k: &Matrix) -> Result<(), GeometryError> {
        let chart = self.base.chart();
        for i in 0..self.base.dim() {
            for a in 0..self.rank {
                for b in 0..self.rank {
                    let mut t = GradedPolynomial::zero(chart);
                    for c in 0..self.rank {
                        t += &self.omega[i][a][c].scale(&k[c][b]);
                        t += &self.omega[i][b][c].scale(&k[a][c]);
                    }
                    if !t.is_zero() {
                        return Err(GeometryError::NotMetric(i + 1));
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests;
