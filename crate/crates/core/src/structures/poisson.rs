use std::sync::Arc;

use crate::bracket::{CheckReport, SymplecticChart};
use crate::graded::{rational, Chart, CoordId, GradedPolynomial, Symmetry, SymbolDecl};

use super::base::{check_alternating, next_index, one_based, permutation_sign, require_body, Base};
use super::StructureError;

/// A bivector on `M`, realized on `T*[1]M` with coordinates `(x^i, xi_i)` of
/// degree `(0, 1)`. Multivectors are encoded as polynomials in `xi`:
/// `pi = 1/2 pi^{ij} d_i ^ d_j` becomes `1/2 pi^{ij} xi_i xi_j`.
#[derive(Clone, Debug)]
pub struct PoissonData {
    sym: SymplecticChart,
    base: Base,
    xi: Vec<CoordId>,
    pi: Vec<Vec<GradedPolynomial>>,
}

impl PoissonData {
    /// Chart `x[1..d]:0, xi[1..d]:1` with an antisymmetric symbol `pi`.
    pub fn standard_chart(d: usize) -> Arc<Chart> {
        Chart::builder()
            .family("x", 1, d as i64, 0)
            .family("xi", 1, d as i64, 1)
            .symbol(SymbolDecl::new("pi", 2, 0, Symmetry::Antisymmetric))
            .build()
            .expect("standard chart")
    }

    /// `pi^{ij}` left as formal structure functions.
    pub fn formal(d: usize) -> Self {
        let chart = Self::standard_chart(d);
        let pi = (1..=d as i64)
            .map(|i| (1..=d as i64).map(|j| GradedPolynomial::jet(&chart, "pi", &[i, j], &[]).unwrap()).collect())
            .collect();
        Self::new(&chart, "x", "xi", pi).expect("formal data is valid")
    }

    pub fn new(
        chart: &Arc<Chart>,
        base: &str,
        momenta: &str,
        pi: Vec<Vec<GradedPolynomial>>,
    ) -> Result<Self, StructureError> {
        let base_calc = Base::new(chart, base)?;
        let d = base_calc.dim();
        let sym = SymplecticChart::darboux(chart, 1, &[(base, momenta)], None)?;
        if pi.len() != d || pi.iter().any(|r| r.len() != d) {
            return Err(StructureError::Shape(format!("pi must be {d}x{d}")));
        }
        for (i, row) in pi.iter().enumerate() {
            for (j, p) in row.iter().enumerate() {
                require_body(&format!("pi[{},{}]", i + 1, j + 1), p)?;
            }
        }
        let pi: Vec<Vec<GradedPolynomial>> =
            pi.into_iter().map(|r| r.into_iter().map(|p| p.rebind(chart)).collect::<Result<_, _>>()).collect::<Result<_, _>>()?;
        check_alternating("pi", d, 2, |ix| pi[ix[0]][ix[1]].clone())?;
        let xi = chart.family(momenta);
        Ok(Self { sym, base: base_calc, xi, pi })
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
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

    pub fn pi(&self, i: usize, j: usize) -> &GradedPolynomial {
        &self.pi[i][j]
    }

    pub fn momentum(&self, i: usize) -> GradedPolynomial {
        GradedPolynomial::coordinate(self.chart(), self.xi[i])
    }

    /// `Theta = 1/2 pi^{ij} xi_i xi_j`.
    pub fn theta(&self) -> GradedPolynomial {
        let d = self.dim();
        let mut t = self.base.zero();
        for i in 0..d {
            for j in 0..d {
                t += &(&(&self.pi[i][j] * &self.momentum(i)) * &self.momentum(j));
            }
        }
        t.scale(&rational(1, 2))
    }

    /// `{f, g}_PB = 1/2 pi^{ij} d_i f d_j g`, with the factor one half kept.
    pub fn bracket_of_functions(&self, f: &GradedPolynomial, g: &GradedPolynomial) -> GradedPolynomial {
        let d = self.dim();
        let mut out = self.base.zero();
        for i in 0..d {
            let fi = self.base.partial(f, i);
            if fi.is_zero() {
                continue;
            }
            for j in 0..d {
                out += &(&(&self.pi[i][j] * &fi) * &self.base.partial(g, j));
            }
        }
        out.scale(&rational(1, 2))
    }

    /// `v^i xi_i` for a vector field `v`.
    pub fn vector_field(&self, v: &[GradedPolynomial]) -> GradedPolynomial {
        let mut out = self.base.zero();
        for (i, vi) in v.iter().enumerate() {
            out += &(vi * &self.momentum(i));
        }
        out
    }

    /// `1/6 t^{ijk} xi_i xi_j xi_k` for alternating components `t`.
    pub fn trivector(&self, t: impl Fn(usize, usize, usize) -> GradedPolynomial) -> GradedPolynomial {
        let d = self.dim();
        let mut out = self.base.zero();
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    let m = &(&self.momentum(i) * &self.momentum(j)) * &self.momentum(k);
                    out += &(&t(i, j, k) * &m);
                }
            }
        }
        out.scale(&rational(1, 6))
    }

    /// Schouten bracket through the degree-1 Poisson bracket: `[P,Q]_S = {Q,P}`,
    /// so that `[X, f]_S = X(f)` and `1/2 [pi,pi]_S = 1/2 {Theta,Theta}`.
    pub fn schouten(&self, p: &GradedPolynomial, q: &GradedPolynomial) -> Result<GradedPolynomial, StructureError> {
        Ok(self.sym.poisson_bracket(q, p)?)
    }

    /// Schouten bracket from the coordinate formula, for homogeneous multivectors
    /// of degrees `p`, `q`:
    /// `[P,Q]_S = (-1)^{(p-1)(q-1)} (P d/dxi_i)(d_i Q) - (Q d/dxi_i)(d_i P)`
    /// with right derivatives in `xi`. On vector fields this is the Lie bracket.
    pub fn schouten_direct(&self, p: &GradedPolynomial, q: &GradedPolynomial) -> Result<GradedPolynomial, StructureError> {
        let p = p.rebind(self.chart())?;
        let q = q.rebind(self.chart())?;
        if p.is_zero() || q.is_zero() {
            return Ok(self.base.zero());
        }
        let (Some(pd), Some(qd)) = (p.degree(), q.degree()) else {
            return Err(StructureError::Shape("Schouten bracket needs homogeneous multivectors".into()));
        };
        let sign = if ((pd - 1) * (qd - 1)).rem_euclid(2) == 0 { 1 } else { -1 };
        let mut out = self.base.zero();
        for i in 0..self.dim() {
            let xi = self.xi[i];
            out += &(&p.derive_right(xi) * &self.base.partial(&q, i)).scale_int(sign);
            out -= &(&q.derive_right(xi) * &self.base.partial(&p, i));
        }
        Ok(out)
    }

    /// `J^{ijk} = d_m pi^{ij} pi^{mk} + (ijk cyclic)`.
    pub fn jacobiator(&self, i: usize, j: usize, k: usize) -> GradedPolynomial {
        let mut t = self.base.zero();
        for (a, b, c) in [(i, j, k), (j, k, i), (k, i, j)] {
            for m in 0..self.dim() {
                t += &(&self.base.partial(&self.pi[a][b], m) * &self.pi[m][c]);
            }
        }
        t
    }

    /// Componentwise Jacobi identity, one part per `i<j<k`.
    pub fn jacobi_report(&self) -> CheckReport {
        let mut r = CheckReport::new("poisson-jacobi", "Jacobi identity of the bivector, cyclic sum of d pi . pi");
        let d = self.dim();
        for i in 0..d {
            for j in i + 1..d {
                for k in j + 1..d {
                    r.push(format!("J[{},{},{}]", i + 1, j + 1, k + 1), self.jacobiator(i, j, k));
                }
            }
        }
        r
    }

    pub fn master_report(&self) -> CheckReport {
        self.sym.master_obstruction(&self.theta()).expect("theta has degree 2")
    }

    /// `1/2 [pi, pi]_S` via the independent coordinate formula.
    pub fn schouten_report(&self) -> CheckReport {
        let theta = self.theta();
        let half = self.schouten_direct(&theta, &theta).expect("homogeneous").scale(&rational(1, 2));
        CheckReport::single("schouten", "Poisson condition [pi,pi]_S = 0", half)
    }
}

/// A bivector with a closed 3-form twist.
#[derive(Clone, Debug)]
pub struct TwistedPoissonData {
    poisson: PoissonData,
    h: Vec<Vec<Vec<GradedPolynomial>>>,
}

impl TwistedPoissonData {
    pub fn new(poisson: PoissonData, h: Vec<Vec<Vec<GradedPolynomial>>>) -> Result<Self, StructureError> {
        let d = poisson.dim();
        if h.len() != d || h.iter().any(|a| a.len() != d || a.iter().any(|b| b.len() != d)) {
            return Err(StructureError::Shape(format!("H must be {d}x{d}x{d}")));
        }
        let chart = poisson.chart().clone();
        let h: Vec<Vec<Vec<GradedPolynomial>>> = h
            .into_iter()
            .map(|a| a.into_iter().map(|b| b.into_iter().map(|p| p.rebind(&chart)).collect::<Result<_, _>>()).collect::<Result<_, _>>())
            .collect::<Result<_, _>>()?;
        for a in &h {
            for b in a {
                for p in b {
                    require_body("H", p)?;
                }
            }
        }
        check_alternating("H", d, 3, |ix| h[ix[0]][ix[1]][ix[2]].clone())?;
        let data = Self { poisson, h };
        if let Some(idx) = data.closure_defect() {
            return Err(StructureError::NotClosed(format!("dH{:?}", one_based(&idx))));
        }
        Ok(data)
    }

    /// Builds a 3-form from its `i<j<k` components.
    pub fn three_form(d: usize, chart: &Arc<Chart>, comp: impl Fn(usize, usize, usize) -> GradedPolynomial) -> Vec<Vec<Vec<GradedPolynomial>>> {
        alternating3(d, chart, comp)
    }

    pub fn poisson(&self) -> &PoissonData {
        &self.poisson
    }

    pub fn h(&self, i: usize, j: usize, k: usize) -> &GradedPolynomial {
        &self.h[i][j][k]
    }

    fn closure_defect(&self) -> Option<Vec<usize>> {
        let d = self.poisson.dim();
        let base = self.poisson.base();
        let mut idx = vec![0; 4];
        loop {
            if permutation_sign(&idx) == 1 {
                let [a, b, c, e] = [idx[0], idx[1], idx[2], idx[3]];
                let dh = &(&(&base.partial(&self.h[b][c][e], a) - &base.partial(&self.h[a][c][e], b))
                    + &base.partial(&self.h[a][b][e], c))
                    - &base.partial(&self.h[a][b][c], e);
                if !dh.is_zero() {
                    return Some(idx);
                }
            }
            if !next_index(&mut idx, d) {
                return None;
            }
        }
    }

    /// `pi#(a)^j = a_i pi^{ij}`.
    pub fn sharp(&self, a: &[GradedPolynomial]) -> Vec<GradedPolynomial> {
        let d = self.poisson.dim();
        (0..d)
            .map(|j| {
                let mut t = self.poisson.base().zero();
                for (i, ai) in a.iter().enumerate() {
                    t += &(ai * self.poisson.pi(i, j));
                }
                t
            })
            .collect()
    }

    /// Components `H_{abc} pi^{ia} pi^{jb} pi^{kc}` of `<(x)^3 pi, H>`.
    pub fn contracted(&self, i: usize, j: usize, k: usize) -> GradedPolynomial {
        let d = self.poisson.dim();
        let pi = |a, b| self.poisson.pi(a, b);
        let mut t = self.poisson.base().zero();
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    if self.h[a][b][c].is_zero() {
                        continue;
                    }
                    t += &(&(&(&self.h[a][b][c] * pi(i, a)) * pi(j, b)) * pi(k, c));
                }
            }
        }
        t
    }

    /// `1/2 [pi,pi]_S - <(x)^3 pi, H>` as a trivector polynomial.
    pub fn obstruction(&self) -> CheckReport {
        let half = self.poisson.master_report().parts.remove(0).residual;
        let target = self.poisson.trivector(|i, j, k| self.contracted(i, j, k));
        CheckReport::single("twisted-poisson", "twisted Poisson condition 1/2[pi,pi]_S = <(x)^3 pi, H>", &half - &target)
    }

    /// `[a,b]_{pi,H} = L_{pi#a} b - L_{pi#b} a - d(pi(a,b)) + H(pi#a, pi#b, -)`.
    pub fn bracket(&self, a: &[GradedPolynomial], b: &[GradedPolynomial]) -> Vec<GradedPolynomial> {
        let base = self.poisson.base();
        let d = base.dim();
        let va = self.sharp(a);
        let vb = self.sharp(b);
        let la = base.lie_derivative_form(&va, b);
        let lb = base.lie_derivative_form(&vb, a);
        let pab = base.pair(&va, b);
        let dp = base.differential(&pab);
        (0..d)
            .map(|k| {
                let mut t = &(&la[k] - &lb[k]) - &dp[k];
                for x in 0..d {
                    for y in 0..d {
                        if !self.h[x][y][k].is_zero() {
                            t += &(&(&self.h[x][y][k] * &va[x]) * &vb[y]);
                        }
                    }
                }
                t
            })
            .collect()
    }

    /// `(T*M, [-,-]_{pi,H}, pi#)` on the chart `x[1..d]:0, q[1..d]:1`, with
    /// `e_a = dx^a`, `rho^i_a = pi^{ai}` and `C^c_{ab} = [dx^a, dx^b]_c`.
    pub fn cotangent_algebroid(&self) -> Result<super::LieAlgebroidData, StructureError> {
        let d = self.poisson.dim();
        let src = self.poisson.chart();
        let mut builder = Chart::builder().family("x", 1, d as i64, 0).family("q", 1, d as i64, 1);
        for s in src.symbols() {
            builder = builder.symbol(s.clone());
        }
        let target = builder.build()?;
        let rho = (0..d)
            .map(|i| (0..d).map(|a| self.poisson.pi(a, i).transport(&target)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        let basis = |a: usize| -> Vec<GradedPolynomial> {
            (0..d).map(|i| GradedPolynomial::integer(src, (i == a) as i64)).collect()
        };
        let mut c = vec![vec![vec![GradedPolynomial::zero(&target); d]; d]; d];
        for a in 0..d {
            for b in 0..d {
                let br = self.bracket(&basis(a), &basis(b));
                for (k, comp) in br.into_iter().enumerate() {
                    c[k][a][b] = comp.transport(&target)?;
                }
            }
        }
        super::LieAlgebroidData::new(&target, "x", "q", rho, c)
    }
}

pub(crate) fn alternating3(
    d: usize,
    chart: &Arc<Chart>,
    comp: impl Fn(usize, usize, usize) -> GradedPolynomial,
) -> Vec<Vec<Vec<GradedPolynomial>>> {
    let mut h = vec![vec![vec![GradedPolynomial::zero(chart); d]; d]; d];
    for i in 0..d {
        for j in i + 1..d {
            for k in j + 1..d {
                let v = comp(i, j, k);
                for (p, s) in [([i, j, k], 1), ([j, k, i], 1), ([k, i, j], 1), ([j, i, k], -1), ([i, k, j], -1), ([k, j, i], -1)] {
                    h[p[0]][p[1]][p[2]] = v.scale_int(s);
                }
            }
        }
    }
    h
}

/// Solution set of `c` in `1/2[pi,pi]_S = c <(x)^3 pi, H>`.
#[derive(Clone, Debug, PartialEq)]
pub enum TwistScale {
    Any,
    Unique(crate::graded::Rational),
    Inconsistent,
}

/// Solves for the scale of a fixed closed 3-form making `(pi, c H)` twisted
/// Poisson, by matching coefficients of the obstruction.
pub fn solve_twist_scale(poisson: &PoissonData, h: Vec<Vec<Vec<GradedPolynomial>>>) -> Result<TwistScale, StructureError> {
    use num_traits::Zero;
    let data = TwistedPoissonData::new(poisson.clone(), h)?;
    let a = poisson.master_report().parts.remove(0).residual;
    let b = poisson.trivector(|i, j, k| data.contracted(i, j, k));
    let mut keys: Vec<_> = a.terms().map(|(m, _)| m.clone()).collect();
    keys.extend(b.terms().map(|(m, _)| m.clone()));
    keys.sort();
    keys.dedup();
    if keys.is_empty() {
        return Ok(TwistScale::Any);
    }
    let mat: Vec<Vec<crate::graded::Rational>> = keys.iter().map(|m| vec![b.coefficient(m)]).collect();
    let rhs: Vec<_> = keys.iter().map(|m| a.coefficient(m)).collect();
    Ok(match crate::linalg::solve(&mat, &rhs) {
        None => TwistScale::Inconsistent,
        Some((_, kernel)) if !kernel.is_empty() => {
            if rhs.iter().all(|r| r.is_zero()) {
                TwistScale::Any
            } else {
                TwistScale::Inconsistent
            }
        }
        Some((x, _)) => TwistScale::Unique(x[0].clone()),
    })
}
