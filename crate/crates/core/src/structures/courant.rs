use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bracket::{CheckReport, SymplecticChart};
use crate::graded::{integer, rational, Chart, CoordId, GradedPolynomial, Symmetry, SymbolDecl};
use crate::linalg::Matrix;
use crate::samples::random_function;

use super::base::{check_alternating, next_index, one_based, permutation_sign, require_body, Base};
use super::StructureError;

/// Degree-2 data on `T*[2]E[1]` with coordinates `(x^i, xi_i, eta^a)` of
/// degree `(0, 2, 1)` and fiber metric `k`:
/// `Theta = rho^i_a xi_i eta^a + 1/6 C_{abc} eta^a eta^b eta^c`.
///
/// Sections of `E` are degree-1 polynomials `e_a(x) eta^a`.
#[derive(Clone, Debug)]
pub struct CourantData {
    sym: SymplecticChart,
    base: Base,
    xi: Vec<CoordId>,
    eta: Vec<CoordId>,
    rho: Vec<Vec<GradedPolynomial>>,
    c: Vec<Vec<Vec<GradedPolynomial>>>,
    theta: GradedPolynomial,
}

/// Sampling parameters for axiom checks on random sections.
#[derive(Clone, Copy, Debug)]
pub struct Sampling {
    pub trials: usize,
    pub seed: u64,
    pub max_degree: u32,
    pub terms: usize,
}

impl Default for Sampling {
    fn default() -> Self {
        Self { trials: 20, seed: 42, max_degree: 2, terms: 2 }
    }
}

impl Sampling {
    pub fn rng(&self, trial: usize) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(trial as u64))
    }
}

impl CourantData {
    /// Chart `x[1..d]:0, xi[1..d]:2, eta[1..r]:1` with symbols `rho`, `C`.
    pub fn standard_chart(d: usize, r: usize) -> Arc<Chart> {
        Chart::builder()
            .family("x", 1, d as i64, 0)
            .family("xi", 1, d as i64, 2)
            .family("eta", 1, r as i64, 1)
            .symbol(SymbolDecl::new("rho", 1, 1, Symmetry::None))
            .symbol(SymbolDecl::new("C", 0, 3, Symmetry::TotallyAntisymmetric))
            .build()
            .expect("standard chart")
    }

    #[allow(clippy::too_many_arguments)]
    pub fn new(
        chart: &Arc<Chart>,
        base: &str,
        momenta: &str,
        fiber: &str,
        metric: Matrix,
        rho: Vec<Vec<GradedPolynomial>>,
        c: Vec<Vec<Vec<GradedPolynomial>>>,
    ) -> Result<Self, StructureError> {
        let base_calc = Base::new(chart, base)?;
        let sym = SymplecticChart::darboux(chart, 2, &[(base, momenta)], Some((fiber, metric)))?;
        let (d, eta) = (base_calc.dim(), chart.family(fiber));
        let r = eta.len();
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
        for row in &rho {
            for p in row {
                require_body("rho", p)?;
            }
        }
        for m in &c {
            for row in m {
                for p in row {
                    require_body("C", p)?;
                }
            }
        }
        check_alternating("C", r, 3, |ix| c[ix[0]][ix[1]][ix[2]].clone())?;
        let xi = chart.family(momenta);
        let mut data = Self { sym, base: base_calc, xi, eta, rho, c, theta: GradedPolynomial::zero(chart) };
        data.theta = data.build_theta();
        Ok(data)
    }

    /// Standard data on `R^d`: `eta = (q^1..q^d, p_1..p_d)` paired by
    /// `k = [[0,1],[1,0]]`, `Theta = xi_i q^i + 1/6 C_{ijk} q^i q^j q^k`.
    /// A vector field `X` is the section `X^i p_i`, a 1-form `a` is `a_i q^i`.
    /// `c3(i,j,k)` supplies the `i<j<k` components of the 3-form.
    pub fn standard(d: usize, c3: impl Fn(&Arc<Chart>, usize, usize, usize) -> GradedPolynomial) -> Self {
        let chart = Self::standard_chart(d, 2 * d);
        let r = 2 * d;
        let mut k = vec![vec![integer(0); r]; r];
        for i in 0..d {
            k[i][d + i] = integer(1);
            k[d + i][i] = integer(1);
        }
        let mut rho = vec![vec![GradedPolynomial::zero(&chart); r]; d];
        for (i, row) in rho.iter_mut().enumerate() {
            row[i] = GradedPolynomial::one(&chart);
        }
        let small = super::poisson::alternating3(d, &chart, |i, j, l| c3(&chart, i, j, l));
        let mut c = vec![vec![vec![GradedPolynomial::zero(&chart); r]; r]; r];
        for i in 0..d {
            for j in 0..d {
                for l in 0..d {
                    c[i][j][l] = small[i][j][l].clone();
                }
            }
        }
        Self::new(&chart, "x", "xi", "eta", k, rho, c).expect("standard Courant data is valid")
    }

    fn build_theta(&self) -> GradedPolynomial {
        let (d, r) = (self.dim(), self.rank());
        let mut t = self.base.zero();
        for i in 0..d {
            for a in 0..r {
                if !self.rho[i][a].is_zero() {
                    t += &(&(&self.rho[i][a] * &self.momentum(i)) * &self.fiber(a));
                }
            }
        }
        let mut cubic = self.base.zero();
        for a in 0..r {
            for b in 0..r {
                for c in 0..r {
                    if !self.c[a][b][c].is_zero() {
                        cubic += &(&(&(&self.c[a][b][c] * &self.fiber(a)) * &self.fiber(b)) * &self.fiber(c));
                    }
                }
            }
        }
        &t + &cubic.scale(&rational(1, 6))
    }

    pub fn chart(&self) -> &Arc<Chart> {
        self.sym.chart()
    }

    pub fn symplectic(&self) -> &SymplecticChart {
        &self.sym
    }

    pub fn base(&self) -> &Base {
        &self.base
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn rank(&self) -> usize {
        self.eta.len()
    }

    pub fn theta(&self) -> &GradedPolynomial {
        &self.theta
    }

    pub fn metric(&self) -> &Matrix {
        &self.sym.metric().expect("courant chart has a metric").metric
    }

    pub fn rho(&self, i: usize, a: usize) -> &GradedPolynomial {
        &self.rho[i][a]
    }

    pub fn structure(&self, a: usize, b: usize, c: usize) -> &GradedPolynomial {
        &self.c[a][b][c]
    }

    pub fn momentum(&self, i: usize) -> GradedPolynomial {
        GradedPolynomial::coordinate(self.chart(), self.xi[i])
    }

    pub fn fiber(&self, a: usize) -> GradedPolynomial {
        GradedPolynomial::coordinate(self.chart(), self.eta[a])
    }

    /// `e_a eta^a`.
    pub fn section(&self, comps: &[GradedPolynomial]) -> GradedPolynomial {
        let mut out = self.base.zero();
        for (a, ea) in comps.iter().enumerate() {
            out += &(ea * &self.fiber(a));
        }
        out
    }

    /// Coefficients `e_a` of a section.
    pub fn components(&self, e: &GradedPolynomial) -> Vec<GradedPolynomial> {
        self.eta.iter().map(|&id| e.derive_left(id)).collect()
    }

    pub fn inner(&self, e1: &GradedPolynomial, e2: &GradedPolynomial) -> GradedPolynomial {
        self.sym.bracket(e1, e2)
    }

    /// `rho(e) f = -{{e, Theta}, f}`.
    pub fn anchor(&self, e: &GradedPolynomial, f: &GradedPolynomial) -> GradedPolynomial {
        -self.sym.bracket(&self.sym.bracket(e, &self.theta), f)
    }

    /// Components of the vector field `rho(e)`.
    pub fn anchor_vector(&self, e: &GradedPolynomial) -> Vec<GradedPolynomial> {
        let inner = self.sym.bracket(e, &self.theta);
        (0..self.dim()).map(|i| -self.sym.bracket(&inner, &self.base.coordinate(i))).collect()
    }

    /// `e1 o e2 = -{{e1, Theta}, e2}`.
    pub fn dorfman(&self, e1: &GradedPolynomial, e2: &GradedPolynomial) -> GradedPolynomial {
        -self.sym.bracket(&self.sym.bracket(e1, &self.theta), e2)
    }

    /// Skew bracket `[e1,e2]_E = 1/2 (e1 o e2 - e2 o e1)`.
    pub fn skew(&self, e1: &GradedPolynomial, e2: &GradedPolynomial) -> GradedPolynomial {
        (&self.dorfman(e1, e2) - &self.dorfman(e2, e1)).scale(&rational(1, 2))
    }

    /// `{Theta, f}` as written for the derived-bracket dictionary.
    pub fn d_bracket(&self, f: &GradedPolynomial) -> GradedPolynomial {
        self.sym.bracket(&self.theta, f)
    }

    /// The map with `<D f, e> = rho(e) f`. Under this chart's conventions it
    /// equals `-{Theta, f}`; see [`CourantData::d_bracket`].
    pub fn d(&self, f: &GradedPolynomial) -> GradedPolynomial {
        -self.d_bracket(f)
    }

    /// `rho^*(a) = a_l rho^l_a eta^a`, so that `<rho^* a, e> = a(rho e)`.
    pub fn rho_star(&self, a: &[GradedPolynomial]) -> GradedPolynomial {
        let mut out = self.base.zero();
        for (l, al) in a.iter().enumerate() {
            for b in 0..self.rank() {
                if !self.rho[l][b].is_zero() {
                    out += &(&(al * &self.rho[l][b]) * &self.fiber(b));
                }
            }
        }
        out
    }

    pub fn master_report(&self) -> CheckReport {
        self.sym.master_obstruction(&self.theta).expect("theta has degree 3")
    }

    pub fn random_function(&self, rng: &mut ChaCha8Rng, s: &Sampling) -> GradedPolynomial {
        random_function(self.chart(), rng, self.base.ids(), s.max_degree, s.terms)
    }

    pub fn random_section(&self, rng: &mut ChaCha8Rng, s: &Sampling) -> GradedPolynomial {
        let comps: Vec<_> = (0..self.rank()).map(|_| self.random_function(rng, s)).collect();
        self.section(&comps)
    }

    fn vector_bracket(&self, e1: &GradedPolynomial, e2: &GradedPolynomial, f: &GradedPolynomial) -> GradedPolynomial {
        &self.anchor(e1, &self.anchor(e2, f)) - &self.anchor(e2, &self.anchor(e1, f))
    }

    /// Residuals of the five Courant axioms on one sample, plus the defining
    /// property of `D`.
    pub fn axiom_residuals(
        &self,
        e1: &GradedPolynomial,
        e2: &GradedPolynomial,
        e3: &GradedPolynomial,
        f: &GradedPolynomial,
    ) -> [GradedPolynomial; 6] {
        let e12 = self.dorfman(e1, e2);
        let e13 = self.dorfman(e1, e3);
        let ax1 = &(&self.dorfman(e1, &self.dorfman(e2, e3)) - &self.dorfman(&e12, e3)) - &self.dorfman(e2, &e13);
        let mut ax2 = self.base.zero();
        for i in 0..self.dim() {
            let x = self.base.coordinate(i);
            let r = &self.anchor(&e12, &x) - &self.vector_bracket(e1, e2, &x);
            if !r.is_zero() {
                ax2 = r;
                break;
            }
        }
        let fe2 = f * e2;
        let ax3 = &(&self.dorfman(e1, &fe2) - &(f * &e12)) - &(&self.anchor(e1, f) * e2);
        let ax4 = &self.dorfman(e1, e1) - &self.d(&self.inner(e1, e1)).scale(&rational(1, 2));
        let ax5 = &(&self.anchor(e1, &self.inner(e2, e3)) - &self.inner(&e12, e3)) - &self.inner(e2, &e13);
        let dd = &self.inner(&self.d(f), e1) - &self.anchor(e1, f);
        [ax1, ax2, ax3, ax4, ax5, dd]
    }

    /// Master obstruction, then the five axioms on seeded random sections.
    pub fn axiom_report(&self, sampling: &Sampling) -> CheckReport {
        let mut report = CheckReport::new("courant-axioms", "Courant algebroid axioms from the derived bracket");
        report.absorb("master", self.master_report());
        let samples: Vec<_> = (0..sampling.trials)
            .map(|t| {
                let mut rng = sampling.rng(t);
                let e1 = self.random_section(&mut rng, sampling);
                let e2 = self.random_section(&mut rng, sampling);
                let e3 = self.random_section(&mut rng, sampling);
                let f = self.random_function(&mut rng, sampling);
                (e1, e2, e3, f)
            })
            .collect();
        let residuals: Vec<[GradedPolynomial; 6]> =
            samples.par_iter().map(|(a, b, c, f)| self.axiom_residuals(a, b, c, f)).collect();
        for (slot, label) in AXIOM_LABELS.iter().enumerate() {
            let first = residuals.iter().map(|r| &r[slot]).find(|p| !p.is_zero()).cloned();
            report.push(*label, first.unwrap_or_else(|| self.base.zero()));
        }
        report.note(format!("{} random section triples, seed {}", sampling.trials, sampling.seed));
        report.note("D f := -{Theta,f}, the sign for which <Df,e> = rho(e)f");
        report
    }
}

pub const AXIOM_LABELS: [&str; 6] =
    ["ax1-jacobi", "ax2-anchor", "ax3-leibniz", "ax4-symmetric", "ax5-invariance", "d-pairing"];

/// Courant-type data whose Jacobiator is governed by a closed 4-form `H`.
#[derive(Clone, Debug)]
pub struct PreCourantData {
    courant: CourantData,
    h: Vec<GradedPolynomial>,
}

impl PreCourantData {
    /// `h(idx)` gives `H_{ijkl}`; checked to be alternating and closed.
    pub fn new(courant: CourantData, h: impl Fn(&[usize]) -> GradedPolynomial) -> Result<Self, StructureError> {
        let d = courant.dim();
        let mut comps = Vec::with_capacity(d.pow(4));
        let mut idx = vec![0; 4];
        loop {
            let v = h(&idx).rebind(courant.chart())?;
            require_body("H", &v)?;
            comps.push(v);
            if !next_index(&mut idx, d) {
                break;
            }
        }
        let data = Self { courant, h: comps };
        check_alternating("H", d, 4, |ix| data.h(ix).clone())?;
        data.check_closed()?;
        Ok(data)
    }

    /// 4-form from its strictly increasing components.
    pub fn alternating(courant: CourantData, sorted: impl Fn(&[usize]) -> GradedPolynomial) -> Result<Self, StructureError> {
        let chart = courant.chart().clone();
        Self::new(courant, move |ix| {
            let s = permutation_sign(ix);
            if s == 0 {
                return GradedPolynomial::zero(&chart);
            }
            let mut sorted_ix = ix.to_vec();
            sorted_ix.sort_unstable();
            sorted(&sorted_ix).scale_int(s)
        })
    }

    pub fn courant(&self) -> &CourantData {
        &self.courant
    }

    pub fn h(&self, idx: &[usize]) -> &GradedPolynomial {
        let d = self.courant.dim();
        &self.h[idx.iter().fold(0, |acc, &i| acc * d + i)]
    }

    fn check_closed(&self) -> Result<(), StructureError> {
        let d = self.courant.dim();
        let base = self.courant.base();
        let mut idx = vec![0; 5];
        loop {
            if permutation_sign(&idx) == 1 {
                let mut t = base.zero();
                for s in 0..5 {
                    let rest: Vec<usize> = idx.iter().enumerate().filter(|&(p, _)| p != s).map(|(_, &v)| v).collect();
                    let term = base.partial(self.h(&rest), idx[s]);
                    t += &term.scale_int(if s % 2 == 0 { 1 } else { -1 });
                }
                if !t.is_zero() {
                    return Err(StructureError::NotClosed(format!("dH{:?}", one_based(&idx))));
                }
            }
            if !next_index(&mut idx, d) {
                return Ok(());
            }
        }
    }

    /// `e o (e' o e'') - (e o e') o e'' - e' o (e o e'')`.
    pub fn jacobiator(&self, e1: &GradedPolynomial, e2: &GradedPolynomial, e3: &GradedPolynomial) -> GradedPolynomial {
        let c = &self.courant;
        &(&c.dorfman(e1, &c.dorfman(e2, e3)) - &c.dorfman(&c.dorfman(e1, e2), e3)) - &c.dorfman(e2, &c.dorfman(e1, e3))
    }

    /// `rho^* H(rho e, rho e', rho e'', -)`.
    pub fn target(&self, e1: &GradedPolynomial, e2: &GradedPolynomial, e3: &GradedPolynomial) -> GradedPolynomial {
        let c = &self.courant;
        let d = c.dim();
        let (x, y, z) = (c.anchor_vector(e1), c.anchor_vector(e2), c.anchor_vector(e3));
        let form: Vec<GradedPolynomial> = (0..d)
            .map(|l| {
                let mut t = c.base().zero();
                for i in 0..d {
                    if x[i].is_zero() {
                        continue;
                    }
                    for j in 0..d {
                        if y[j].is_zero() {
                            continue;
                        }
                        for k in 0..d {
                            let h = self.h(&[i, j, k, l]);
                            if !h.is_zero() && !z[k].is_zero() {
                                t += &(&(&(h * &x[i]) * &y[j]) * &z[k]);
                            }
                        }
                    }
                }
                t
            })
            .collect();
        c.rho_star(&form)
    }

    /// The four pre-Courant axioms on one sample.
    pub fn pre_axiom_residuals(
        &self,
        e1: &GradedPolynomial,
        e2: &GradedPolynomial,
        e3: &GradedPolynomial,
    ) -> [GradedPolynomial; 3] {
        let c = &self.courant;
        let e12 = c.dorfman(e1, e2);
        let mut anchor = c.base().zero();
        for i in 0..c.dim() {
            let x = c.base().coordinate(i);
            let r = &c.anchor(&e12, &x) - &c.vector_bracket(e1, e2, &x);
            if !r.is_zero() {
                anchor = r;
                break;
            }
        }
        let selfdual = &c.inner(&c.dorfman(e1, e1), e2) - &c.anchor(e2, &c.inner(e1, e1)).scale(&rational(1, 2));
        let invariance =
            &(&c.anchor(e1, &c.inner(e2, e3)) - &c.inner(&e12, e3)) - &c.inner(e2, &c.dorfman(e1, e3));
        [anchor, selfdual, invariance]
    }

    /// `rho rho^* = 0` as the matrix `rho k^{-1} rho^T` read off the anchor.
    pub fn rho_rho_star(&self) -> GradedPolynomial {
        let c = &self.courant;
        let d = c.dim();
        for m in 0..d {
            let a: Vec<_> = (0..d).map(|l| GradedPolynomial::integer(c.chart(), (l == m) as i64)).collect();
            let v = c.anchor_vector(&c.rho_star(&a));
            if let Some(p) = v.into_iter().find(|p| !p.is_zero()) {
                return p;
            }
        }
        c.base().zero()
    }

    pub fn report(&self, sampling: &Sampling) -> CheckReport {
        let c = &self.courant;
        let mut report = CheckReport::new("pre-courant-jacobiator", "Jacobiator equals rho^* H(rho e, rho e', rho e'')");
        report.push("rho-rho-star", self.rho_rho_star());
        let samples: Vec<_> = (0..sampling.trials)
            .map(|t| {
                let mut rng = sampling.rng(t);
                (c.random_section(&mut rng, sampling), c.random_section(&mut rng, sampling), c.random_section(&mut rng, sampling))
            })
            .collect();
        let res: Vec<([GradedPolynomial; 3], GradedPolynomial)> = samples
            .par_iter()
            .map(|(a, b, e)| (self.pre_axiom_residuals(a, b, e), &self.jacobiator(a, b, e) - &self.target(a, b, e)))
            .collect();
        for (slot, label) in ["anchor-morphism", "self-pairing", "invariance"].iter().enumerate() {
            let first = res.iter().map(|r| &r.0[slot]).find(|p| !p.is_zero()).cloned();
            report.push(*label, first.unwrap_or_else(|| c.base().zero()));
        }
        let first = res.iter().map(|r| &r.1).find(|p| !p.is_zero()).cloned();
        report.push("jacobiator", first.unwrap_or_else(|| c.base().zero()));
        report.note(format!("{} random section triples, seed {}", sampling.trials, sampling.seed));
        report
    }
}
