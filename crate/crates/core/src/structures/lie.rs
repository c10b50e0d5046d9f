use std::sync::Arc;

use crate::bracket::CheckReport;
use crate::graded::{rational, Chart, CoordId, GradedPolynomial, Symmetry, SymbolDecl};

use super::base::{require_body, Base};
use super::StructureError;

/// Anchor `rho^i_a` and structure functions `C^c_{ab}` of a rank-`r` bundle
/// over a `d`-dimensional base, living on the `E[1]` chart `(x^i, q^a)` of
/// degree `(0, 1)`. Sections are component lists in the frame `e_a`.
#[derive(Clone, Debug)]
pub struct LieAlgebroidData {
    base: Base,
    q: Vec<CoordId>,
    rho: Vec<Vec<GradedPolynomial>>,
    c: Vec<Vec<Vec<GradedPolynomial>>>,
}

impl LieAlgebroidData {
    /// Chart `x[1..d]:0, q[1..r]:1` with symbols `rho^i_a` and `C^c_{ab}`.
    pub fn standard_chart(d: usize, r: usize) -> Arc<Chart> {
        Chart::builder()
            .family("x", 1, d as i64, 0)
            .family("q", 1, r as i64, 1)
            .symbol(SymbolDecl::new("rho", 1, 1, Symmetry::None))
            .symbol(SymbolDecl::new("C", 1, 2, Symmetry::Antisymmetric))
            .build()
            .expect("standard chart")
    }

    pub fn formal(d: usize, r: usize) -> Self {
        let chart = Self::standard_chart(d, r);
        let j = |b: &str, u: &[i64], l: &[i64]| GradedPolynomial::jet(&chart, b, u, l).unwrap();
        let rho = (1..=d as i64).map(|i| (1..=r as i64).map(|a| j("rho", &[i], &[a])).collect()).collect();
        let c = (1..=r as i64)
            .map(|k| (1..=r as i64).map(|a| (1..=r as i64).map(|b| j("C", &[k], &[a, b])).collect()).collect())
            .collect();
        Self::new(&chart, "x", "q", rho, c).expect("formal data is valid")
    }

    /// `rho[i][a]`, `c[k][a][b]` with `c` antisymmetric in `(a, b)`.
    pub fn new(
        chart: &Arc<Chart>,
        base: &str,
        fiber: &str,
        rho: Vec<Vec<GradedPolynomial>>,
        c: Vec<Vec<Vec<GradedPolynomial>>>,
    ) -> Result<Self, StructureError> {
        let base = Base::new(chart, base)?;
        let q = chart.family(fiber);
        if q.is_empty() || q.iter().any(|&id| chart.degree(id) != 1) {
            return Err(StructureError::Shape(format!("`{fiber}` must be a nonempty degree-1 family")));
        }
        let (d, r) = (base.dim(), q.len());
        if rho.len() != d || rho.iter().any(|row| row.len() != r) {
            return Err(StructureError::Shape(format!("rho must be {d}x{r}")));
        }
        if c.len() != r || c.iter().any(|m| m.len() != r || m.iter().any(|row| row.len() != r)) {
            return Err(StructureError::Shape(format!("C must be {r}x{r}x{r}")));
        }
        let rb = |p: GradedPolynomial| p.rebind(chart);
        let rho: Vec<Vec<_>> = rho.into_iter().map(|row| row.into_iter().map(rb).collect::<Result<_, _>>()).collect::<Result<_, _>>()?;
        let c: Vec<Vec<Vec<_>>> = c
            .into_iter()
            .map(|m| m.into_iter().map(|row| row.into_iter().map(rb).collect::<Result<_, _>>()).collect::<Result<_, _>>())
            .collect::<Result<_, _>>()?;
        for (i, row) in rho.iter().enumerate() {
            for (a, p) in row.iter().enumerate() {
                require_body(&format!("rho[{},{}]", i + 1, a + 1), p)?;
            }
        }
        for k in 0..r {
            for a in 0..r {
                for b in 0..r {
                    require_body("C", &c[k][a][b])?;
                    if !(&c[k][a][b] + &c[k][b][a]).is_zero() {
                        return Err(StructureError::NotAntisymmetric(format!("C[{}][{},{}]", k + 1, a + 1, b + 1)));
                    }
                }
            }
        }
        Ok(Self { base, q, rho, c })
    }

    pub fn chart(&self) -> &Arc<Chart> {
        self.base.chart()
    }

    pub fn base(&self) -> &Base {
        &self.base
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn rank(&self) -> usize {
        self.q.len()
    }

    pub fn rho(&self, i: usize, a: usize) -> &GradedPolynomial {
        &self.rho[i][a]
    }

    pub fn structure(&self, k: usize, a: usize, b: usize) -> &GradedPolynomial {
        &self.c[k][a][b]
    }

    pub fn fiber_coordinate(&self, a: usize) -> GradedPolynomial {
        GradedPolynomial::coordinate(self.chart(), self.q[a])
    }

    /// `Q f = rho^i_a q^a d_i f - 1/2 C^a_{bc} q^b q^c d f/d q^a`.
    pub fn q_apply(&self, f: &GradedPolynomial) -> GradedPolynomial {
        let (d, r) = (self.dim(), self.rank());
        let mut out = self.base.zero();
        for i in 0..d {
            let fi = self.base.partial(f, i);
            if fi.is_zero() {
                continue;
            }
            for a in 0..r {
                out += &(&(&self.rho[i][a] * &self.fiber_coordinate(a)) * &fi);
            }
        }
        let mut odd = self.base.zero();
        for a in 0..r {
            let fa = f.derive_left(self.q[a]);
            if fa.is_zero() {
                continue;
            }
            for b in 0..r {
                for c in 0..r {
                    let v = &(&self.c[a][b][c] * &self.fiber_coordinate(b)) * &self.fiber_coordinate(c);
                    odd += &(&v * &fa);
                }
            }
        }
        &out - &odd.scale(&rational(1, 2))
    }

    /// `Q^2` on the generators: `Q^2 x^i` carries the anchor compatibility
    /// `rho[e_b,e_c] = [rho e_b, rho e_c]`, `Q^2 q^a` the anchored Jacobi
    /// identity.
    pub fn report(&self) -> CheckReport {
        let mut r = CheckReport::new("lie-algebroid", "Q^2 = 0 on E[1]: anchor morphism and Jacobi identity");
        for i in 0..self.dim() {
            let x = self.base.coordinate(i);
            r.push(format!("anchor/x{}", i + 1), self.q_apply(&self.q_apply(&x)));
        }
        for a in 0..self.rank() {
            let q = self.fiber_coordinate(a);
            r.push(format!("jacobi/q{}", a + 1), self.q_apply(&self.q_apply(&q)));
        }
        r
    }

    /// `rho(e)^i = e^a rho^i_a`.
    pub fn anchor(&self, e: &[GradedPolynomial]) -> Vec<GradedPolynomial> {
        (0..self.dim())
            .map(|i| {
                let mut t = self.base.zero();
                for (a, ea) in e.iter().enumerate() {
                    t += &(ea * &self.rho[i][a]);
                }
                t
            })
            .collect()
    }

    /// `[e, e']^c = rho(e) e'^c - rho(e') e^c + e^a e'^b C^c_{ab}`.
    pub fn bracket(&self, e: &[GradedPolynomial], f: &[GradedPolynomial]) -> Vec<GradedPolynomial> {
        let re = self.anchor(e);
        let rf = self.anchor(f);
        (0..self.rank())
            .map(|k| {
                let mut t = &self.base.apply(&re, &f[k]) - &self.base.apply(&rf, &e[k]);
                for a in 0..self.rank() {
                    if e[a].is_zero() {
                        continue;
                    }
                    for b in 0..self.rank() {
                        if !self.c[k][a][b].is_zero() {
                            t += &(&(&e[a] * &f[b]) * &self.c[k][a][b]);
                        }
                    }
                }
                t
            })
            .collect()
    }

    /// The frame section `e_a`.
    pub fn frame(&self, a: usize) -> Vec<GradedPolynomial> {
        (0..self.rank()).map(|b| GradedPolynomial::integer(self.chart(), (a == b) as i64)).collect()
    }
}
