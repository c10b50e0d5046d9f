use crate::bracket::CheckReport;
use crate::graded::GradedPolynomial;
use crate::samples::random_function;
use crate::structures::Sampling;

use super::forms::{e_differential, EForm};
use super::{add, first_nonzero, scaled, sub, times, Algebroid, Connection, GeometryError, Section, VectorField};

/// Sign `s` in `2 Alt(i_rho R)(e, e')(v) = s (R(rho e, v) e' - R(rho e', v) e)`,
/// fixed by requiring both lines of the basic-curvature identity to agree.
pub const ALT_SIGN: i64 = 1;

/// A Lie algebroid together with a connection on `E`.
pub struct LieGeometry<'a, A: Algebroid> {
    data: &'a A,
    conn: &'a Connection,
}

/// Components of the geometric tensors of a [`LieGeometry`].
#[derive(Clone, Debug)]
pub struct GeometryReport {
    /// `torsion[a][b]`: the section `T(e_a, e_b)`.
    pub torsion: Vec<Vec<Section>>,
    /// `curvature[i][j][a]`: the section `R(d_i, d_j) e_a`.
    pub curvature: Vec<Vec<Vec<Section>>>,
    /// `e_curvature[a][b][c]`: the section `ER(e_a, e_b) e_c`.
    pub e_curvature: Vec<Vec<Vec<Section>>>,
    /// `basic_curvature[a][b][i]`: the section `S(e_a, e_b)(d_i)`.
    pub basic_curvature: Vec<Vec<Vec<Section>>>,
    pub checks: Vec<CheckReport>,
}

impl<'a, A: Algebroid> LieGeometry<'a, A> {
    pub fn new(data: &'a A, conn: &'a Connection) -> Result<Self, GeometryError> {
        if conn.rank() != data.rank() || conn.base().dim() != data.base().dim() {
            return Err(GeometryError::Shape("connection does not match the algebroid".into()));
        }
        Ok(Self { data, conn })
    }

    pub fn data(&self) -> &A {
        self.data
    }

    pub fn connection(&self) -> &Connection {
        self.conn
    }

    fn d(&self) -> usize {
        self.data.base().dim()
    }

    fn r(&self) -> usize {
        self.data.rank()
    }

    fn rho(&self, e: &[GradedPolynomial]) -> VectorField {
        self.data.anchor_of(e)
    }

    fn br(&self, e: &[GradedPolynomial], f: &[GradedPolynomial]) -> Section {
        self.data.bracket_of(e, f)
    }

    fn nabla(&self, v: &[GradedPolynomial], s: &[GradedPolynomial]) -> Section {
        self.conn.covariant(v, s)
    }

    /// `E nabla_e v = [rho(e), v] + rho(nabla_v e)`.
    pub fn basic_tm(&self, e: &[GradedPolynomial], v: &[GradedPolynomial]) -> VectorField {
        let base = self.data.base();
        add(&base.lie_bracket(&self.rho(e), v), &self.rho(&self.nabla(v, e)))
    }

    /// `E nabla_e e' = nabla_{rho(e')} e + [e, e']`.
    pub fn basic_e(&self, e: &[GradedPolynomial], f: &[GradedPolynomial]) -> Section {
        add(&self.nabla(&self.rho(f), e), &self.br(e, f))
    }

    /// `T(e, e') = nabla_{rho(e)} e' - nabla_{rho(e')} e - [e, e']`.
    pub fn torsion(&self, e: &[GradedPolynomial], f: &[GradedPolynomial]) -> Section {
        sub(&sub(&self.nabla(&self.rho(e), f), &self.nabla(&self.rho(f), e)), &self.br(e, f))
    }

    /// `ER(e, e') s` for the basic connection on `E`.
    pub fn e_curvature(&self, e: &[GradedPolynomial], f: &[GradedPolynomial], s: &[GradedPolynomial]) -> Section {
        let a = self.basic_e(e, &self.basic_e(f, s));
        let b = self.basic_e(f, &self.basic_e(e, s));
        sub(&sub(&a, &b), &self.basic_e(&self.br(e, f), s))
    }

    /// `ER(e, e') v` for the basic connection on `TM`.
    pub fn e_curvature_tm(&self, e: &[GradedPolynomial], f: &[GradedPolynomial], v: &[GradedPolynomial]) -> VectorField {
        let a = self.basic_tm(e, &self.basic_tm(f, v));
        let b = self.basic_tm(f, &self.basic_tm(e, v));
        sub(&sub(&a, &b), &self.basic_tm(&self.br(e, f), v))
    }

    /// First line: `[e, nabla e'] - [e', nabla e] - nabla [e, e']
    /// - nabla_{rho(nabla e)} e' + nabla_{rho(nabla e')} e` at `v`, where
    /// `[e, nabla e']` is the Lie derivative of the E-valued 1-form:
    /// `[e, nabla_v e'] - nabla_{[rho(e), v]} e'`.
    pub fn basic_curvature(&self, e: &[GradedPolynomial], f: &[GradedPolynomial], v: &[GradedPolynomial]) -> Section {
        let base = self.data.base();
        let ne = self.nabla(v, e);
        let nf = self.nabla(v, f);
        let lie_e = sub(&self.br(e, &nf), &self.nabla(&base.lie_bracket(&self.rho(e), v), f));
        let lie_f = sub(&self.br(f, &ne), &self.nabla(&base.lie_bracket(&self.rho(f), v), e));
        let mut t = sub(&lie_e, &lie_f);
        t = sub(&t, &self.nabla(v, &self.br(e, f)));
        t = sub(&t, &self.nabla(&self.rho(&ne), f));
        add(&t, &self.nabla(&self.rho(&nf), e))
    }

    /// `(nabla_v T)(e, e')`.
    pub fn torsion_derivative(&self, v: &[GradedPolynomial], e: &[GradedPolynomial], f: &[GradedPolynomial]) -> Section {
        let t = self.nabla(v, &self.torsion(e, f));
        sub(&sub(&t, &self.torsion(&self.nabla(v, e), f)), &self.torsion(e, &self.nabla(v, f)))
    }

    /// Second line: `(nabla T + 2 Alt i_rho R)(e, e')(v)`.
    pub fn basic_curvature_decomposed(&self, e: &[GradedPolynomial], f: &[GradedPolynomial], v: &[GradedPolynomial]) -> Section {
        let alt = sub(&self.conn.curvature(&self.rho(e), v, f), &self.conn.curvature(&self.rho(f), v, e));
        add(&self.torsion_derivative(v, e, f), &scaled(&alt, ALT_SIGN))
    }

    /// `E nabla` on `Hom(TM, E)` applied to `S(e2, e3)` and evaluated on `v`.
    fn nabla_s(&self, e: &[GradedPolynomial], e2: &[GradedPolynomial], e3: &[GradedPolynomial], v: &[GradedPolynomial]) -> Section {
        let outer = self.basic_e(e, &self.basic_curvature(e2, e3, v));
        sub(&outer, &self.basic_curvature(e2, e3, &self.basic_tm(e, v)))
    }

    /// `(E d S)(e1, e2, e3)(v)`: the E-exterior derivative of the basic
    /// curvature for the basic connections, with the `TM` slot dualized.
    pub fn bianchi(&self, e1: &[GradedPolynomial], e2: &[GradedPolynomial], e3: &[GradedPolynomial], v: &[GradedPolynomial]) -> Section {
        let mut t = self.nabla_s(e1, e2, e3, v);
        t = sub(&t, &self.nabla_s(e2, e1, e3, v));
        t = add(&t, &self.nabla_s(e3, e1, e2, v));
        t = sub(&t, &self.basic_curvature(&self.br(e1, e2), e3, v));
        t = add(&t, &self.basic_curvature(&self.br(e1, e3), e2, v));
        sub(&t, &self.basic_curvature(&self.br(e2, e3), e1, v))
    }

    fn frame(&self, a: usize) -> Section {
        self.data.frame(a)
    }

    fn field(&self, i: usize) -> VectorField {
        self.conn.coordinate_field(i)
    }

    pub fn torsion_components(&self) -> Vec<Vec<Section>> {
        (0..self.r()).map(|a| (0..self.r()).map(|b| self.torsion(&self.frame(a), &self.frame(b))).collect()).collect()
    }

    pub fn e_curvature_components(&self) -> Vec<Vec<Vec<Section>>> {
        let r = self.r();
        (0..r)
            .map(|a| (0..r).map(|b| (0..r).map(|c| self.e_curvature(&self.frame(a), &self.frame(b), &self.frame(c))).collect()).collect())
            .collect()
    }

    pub fn basic_curvature_components(&self) -> Vec<Vec<Vec<Section>>> {
        let (r, d) = (self.r(), self.d());
        (0..r)
            .map(|a| (0..r).map(|b| (0..d).map(|i| self.basic_curvature(&self.frame(a), &self.frame(b), &self.field(i))).collect()).collect())
            .collect()
    }

    /// Line 1 minus line 2 on frames and coordinate fields.
    pub fn decomposition_check(&self) -> CheckReport {
        let mut rep = CheckReport::new("basic-curvature-decomposition", "basic curvature, first line equals nabla T + 2 Alt i_rho R");
        let chart = self.data.chart();
        let (r, d) = (self.r(), self.d());
        for a in 0..r {
            for b in a + 1..r {
                for i in 0..d {
                    let (ea, eb, v) = (self.frame(a), self.frame(b), self.field(i));
                    let diff = sub(&self.basic_curvature(&ea, &eb, &v), &self.basic_curvature_decomposed(&ea, &eb, &v));
                    rep.push(format!("S[{},{};{}]", a + 1, b + 1, i + 1), first_nonzero(chart, &diff));
                }
            }
        }
        rep.note(format!("Alt sign {ALT_SIGN}"));
        rep
    }

    pub fn bianchi_check(&self) -> CheckReport {
        let mut rep = CheckReport::new("bianchi", "E nabla of the basic curvature, basic connections on every slot");
        let chart = self.data.chart();
        let (r, d) = (self.r(), self.d());
        for a in 0..r {
            for b in a + 1..r {
                for c in b + 1..r {
                    for i in 0..d {
                        let res = self.bianchi(&self.frame(a), &self.frame(b), &self.frame(c), &self.field(i));
                        rep.push(format!("dS[{},{},{};{}]", a + 1, b + 1, c + 1, i + 1), first_nonzero(chart, &res));
                    }
                }
            }
        }
        if rep.parts.is_empty() {
            rep.push("rank<3", GradedPolynomial::zero(chart));
        }
        rep
    }

    /// `(Ed)^2 alpha = 0` on random forms of every degree below the rank.
    pub fn e_differential_squared(&self, sampling: &Sampling) -> CheckReport {
        e_differential_squared(self.data, sampling)
    }

    /// Function linearity and antisymmetry of `T` and `S` on random input.
    pub fn tensoriality_check(&self, sampling: &Sampling) -> CheckReport {
        let mut rep = CheckReport::new("tensoriality", "T and S are function linear and antisymmetric in their E slots");
        let chart = self.data.chart().clone();
        let body = self.data.base().ids().to_vec();
        for trial in 0..sampling.trials {
            let mut rng = sampling.rng(trial);
            let mut f = || random_function(&chart, &mut rng, &body, sampling.max_degree, sampling.terms);
            let e: Section = (0..self.r()).map(|_| f()).collect();
            let g: Section = (0..self.r()).map(|_| f()).collect();
            let v: VectorField = (0..self.d()).map(|_| f()).collect();
            let h = f();
            let t = self.torsion(&e, &g);
            rep.push(format!("t{trial}/T-skew"), first_nonzero(&chart, &add(&t, &self.torsion(&g, &e))));
            rep.push(format!("t{trial}/T-linear"), first_nonzero(&chart, &sub(&self.torsion(&times(&h, &e), &g), &times(&h, &t))));
            let s = self.basic_curvature(&e, &g, &v);
            rep.push(format!("t{trial}/S-skew"), first_nonzero(&chart, &add(&s, &self.basic_curvature(&g, &e, &v))));
            rep.push(format!("t{trial}/S-linear"), first_nonzero(&chart, &sub(&self.basic_curvature(&times(&h, &e), &g, &v), &times(&h, &s))));
            rep.push(format!("t{trial}/S-linear-v"), first_nonzero(&chart, &sub(&self.basic_curvature(&e, &g, &times(&h, &v)), &times(&h, &s))));
        }
        rep
    }

    pub fn report(&self, sampling: &Sampling) -> GeometryReport {
        GeometryReport {
            torsion: self.torsion_components(),
            curvature: self.conn.curvature_components(),
            e_curvature: self.e_curvature_components(),
            basic_curvature: self.basic_curvature_components(),
            checks: vec![self.e_differential_squared(sampling), self.decomposition_check(), self.bianchi_check(), self.tensoriality_check(sampling)],
        }
    }
}

/// `(Ed)^2 alpha = 0` on random E-forms, cycling through degrees `0..r`.
pub fn e_differential_squared(data: &impl Algebroid, sampling: &Sampling) -> CheckReport {
    let mut rep = CheckReport::new("e-differential-squared", "E-differential squares to zero");
    let chart = data.chart();
    let r = data.rank();
    for trial in 0..sampling.trials {
        let mut rng = sampling.rng(trial);
        let m = trial % r.max(1);
        let alpha = EForm::random(data, m, &mut rng, sampling.max_degree, sampling.terms);
        let dd = e_differential(&e_differential(&alpha, data), data);
        let res = dd.first_nonzero().map(|(_, p)| p.clone()).unwrap_or_else(|| GradedPolynomial::zero(chart));
        rep.push(format!("t{trial}/deg{m}"), res);
    }
    rep
}
