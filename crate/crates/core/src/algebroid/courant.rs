use num_traits::Zero;

use crate::bracket::CheckReport;
use crate::graded::{rational, GradedPolynomial};
use crate::samples::random_function;
use crate::structures::{CourantData, PreCourantData, Sampling};

use super::{add, sub, times, Algebroid, Connection, GeometryError, Section, VectorField};

/// Which E-connection on `E` enters the torsion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ECourantConnection {
    /// `E nabla_e e' = nabla_{rho(e)} e'`.
    #[default]
    Anchored,
    /// `E nabla_e e' = nabla_{rho(e')} e + [e, e']_E`.
    Basic,
}

/// Pre-Courant (or Courant) data with a metric connection on `E`.
///
/// On `TM` the E-connection is always the basic one,
/// `E nabla_e v = [rho(e), v] + rho(nabla_v e)`.
pub struct CourantGeometry<'a> {
    data: &'a CourantData,
    conn: &'a Connection,
    kind: ECourantConnection,
}

impl<'a> CourantGeometry<'a> {
    pub fn new(data: &'a CourantData, conn: &'a Connection) -> Result<Self, GeometryError> {
        if conn.rank() != data.rank() || conn.base().dim() != data.dim() {
            return Err(GeometryError::Shape("connection does not match the Courant data".into()));
        }
        conn.check_metric(data.metric())?;
        Ok(Self { data, conn, kind: ECourantConnection::default() })
    }

    pub fn from_pre(data: &'a PreCourantData, conn: &'a Connection) -> Result<Self, GeometryError> {
        Self::new(data.courant(), conn)
    }

    pub fn with_connection(mut self, kind: ECourantConnection) -> Self {
        self.kind = kind;
        self
    }

    fn rho(&self, e: &[GradedPolynomial]) -> VectorField {
        self.data.anchor_of(e)
    }

    fn nabla(&self, v: &[GradedPolynomial], s: &[GradedPolynomial]) -> Section {
        self.conn.covariant(v, s)
    }

    fn skew(&self, e: &[GradedPolynomial], f: &[GradedPolynomial]) -> Section {
        self.data.bracket_of(e, f)
    }

    /// `<e, f> = e_a k^{ab} f_b`.
    pub fn pairing(&self, e: &[GradedPolynomial], f: &[GradedPolynomial]) -> GradedPolynomial {
        let k = self.data.metric();
        let mut t = self.data.base().zero();
        for (a, ea) in e.iter().enumerate() {
            if ea.is_zero() {
                continue;
            }
            for (b, fb) in f.iter().enumerate() {
                if k[a][b].is_zero() {
                    continue;
                }
                t += &(ea * fb).scale(&k[a][b]);
            }
        }
        t
    }

    pub fn e_nabla(&self, e: &[GradedPolynomial], f: &[GradedPolynomial]) -> Section {
        match self.kind {
            ECourantConnection::Anchored => self.nabla(&self.rho(e), f),
            ECourantConnection::Basic => add(&self.nabla(&self.rho(f), e), &self.skew(e, f)),
        }
    }

    pub fn basic_tm(&self, e: &[GradedPolynomial], v: &[GradedPolynomial]) -> VectorField {
        add(&self.data.base().lie_bracket(&self.rho(e), v), &self.rho(&self.nabla(v, e)))
    }

    /// `T(e1,e2,e3) = <E nabla_{e1} e2 - E nabla_{e2} e1 - [e1,e2]_E, e3>
    ///  + 1/2 (<E nabla_{e3} e1, e2> - <E nabla_{e3} e2, e1>)`.
    pub fn torsion(&self, e1: &[GradedPolynomial], e2: &[GradedPolynomial], e3: &[GradedPolynomial]) -> GradedPolynomial {
        let first = sub(&sub(&self.e_nabla(e1, e2), &self.e_nabla(e2, e1)), &self.skew(e1, e2));
        let half = &self.pairing(&self.e_nabla(e3, e1), e2) - &self.pairing(&self.e_nabla(e3, e2), e1);
        &self.pairing(&first, e3) + &half.scale(&rational(1, 2))
    }

    /// `S(e1,e2,e3)v = <nabla_v[e1,e2]_E - [nabla_v e1,e2]_E - [e1,nabla_v e2]_E
    ///  - nabla_{E nabla_{e2} v} e1 + nabla_{E nabla_{e1} v} e2, e3>
    ///  + 1/2 (<nabla_{E nabla_{e3} v} e1, e2> - <nabla_{E nabla_{e3} v} e2, e1>)`.
    pub fn basic_curvature(&self, e1: &[GradedPolynomial], e2: &[GradedPolynomial], e3: &[GradedPolynomial], v: &[GradedPolynomial]) -> GradedPolynomial {
        let mut s = self.nabla(v, &self.skew(e1, e2));
        s = sub(&s, &self.skew(&self.nabla(v, e1), e2));
        s = sub(&s, &self.skew(e1, &self.nabla(v, e2)));
        s = sub(&s, &self.nabla(&self.basic_tm(e2, v), e1));
        s = add(&s, &self.nabla(&self.basic_tm(e1, v), e2));
        let w = self.basic_tm(e3, v);
        let half = &self.pairing(&self.nabla(&w, e1), e2) - &self.pairing(&self.nabla(&w, e2), e1);
        &self.pairing(&s, e3) + &half.scale(&rational(1, 2))
    }

    fn frame(&self, a: usize) -> Section {
        self.data.frame(a)
    }

    /// `torsion[a][b][c] = T(e_a, e_b, e_c)`.
    pub fn torsion_components(&self) -> Vec<Vec<Vec<GradedPolynomial>>> {
        let r = self.data.rank();
        (0..r)
            .map(|a| (0..r).map(|b| (0..r).map(|c| self.torsion(&self.frame(a), &self.frame(b), &self.frame(c))).collect()).collect())
            .collect()
    }

    /// `S[a][b][c][i] = S(e_a, e_b, e_c)(d_i)`.
    pub fn basic_curvature_components(&self) -> Vec<Vec<Vec<Vec<GradedPolynomial>>>> {
        let (r, d) = (self.data.rank(), self.data.dim());
        (0..r)
            .map(|a| {
                (0..r)
                    .map(|b| {
                        (0..r)
                            .map(|c| (0..d).map(|i| self.basic_curvature(&self.frame(a), &self.frame(b), &self.frame(c), &self.conn.coordinate_field(i))).collect())
                            .collect()
                    })
                    .collect()
            })
            .collect()
    }

    fn random_section(&self, rng: &mut rand_chacha::ChaCha8Rng, s: &Sampling) -> Section {
        (0..self.data.rank()).map(|_| self.random_function(rng, s)).collect()
    }

    fn random_function(&self, rng: &mut rand_chacha::ChaCha8Rng, s: &Sampling) -> GradedPolynomial {
        random_function(self.data.chart(), rng, self.data.base().ids(), s.max_degree, s.terms)
    }

    /// Total antisymmetry and function linearity of `T` on random sections.
    pub fn torsion_report(&self, sampling: &Sampling) -> CheckReport {
        let mut rep = CheckReport::new("twisted-courant-torsion", "E-torsion of pre-Courant data is a 3-form on E");
        for trial in 0..sampling.trials {
            let mut rng = sampling.rng(trial);
            let e1 = self.random_section(&mut rng, sampling);
            let e2 = self.random_section(&mut rng, sampling);
            let e3 = self.random_section(&mut rng, sampling);
            let f = self.random_function(&mut rng, sampling);
            let t = self.torsion(&e1, &e2, &e3);
            rep.push(format!("t{trial}/swap12"), &t + &self.torsion(&e2, &e1, &e3));
            rep.push(format!("t{trial}/swap23"), &t + &self.torsion(&e1, &e3, &e2));
            let ft = &f * &t;
            rep.push(format!("t{trial}/linear1"), &self.torsion(&times(&f, &e1), &e2, &e3) - &ft);
            rep.push(format!("t{trial}/linear2"), &self.torsion(&e1, &times(&f, &e2), &e3) - &ft);
            rep.push(format!("t{trial}/linear3"), &self.torsion(&e1, &e2, &times(&f, &e3)) - &ft);
        }
        rep
    }

    /// Antisymmetry in the first two slots and function linearity of `S`.
    pub fn basic_curvature_report(&self, sampling: &Sampling) -> CheckReport {
        let mut rep = CheckReport::new("twisted-courant-basic-curvature", "basic curvature of pre-Courant data is tensorial");
        for trial in 0..sampling.trials {
            let mut rng = sampling.rng(trial);
            let e1 = self.random_section(&mut rng, sampling);
            let e2 = self.random_section(&mut rng, sampling);
            let e3 = self.random_section(&mut rng, sampling);
            let v: VectorField = (0..self.data.dim()).map(|_| self.random_function(&mut rng, sampling)).collect();
            let f = self.random_function(&mut rng, sampling);
            let s = self.basic_curvature(&e1, &e2, &e3, &v);
            let fs = &f * &s;
            rep.push(format!("t{trial}/swap12"), &s + &self.basic_curvature(&e2, &e1, &e3, &v));
            rep.push(format!("t{trial}/linear1"), &self.basic_curvature(&times(&f, &e1), &e2, &e3, &v) - &fs);
            rep.push(format!("t{trial}/linear3"), &self.basic_curvature(&e1, &e2, &times(&f, &e3), &v) - &fs);
            rep.push(format!("t{trial}/linear-v"), &self.basic_curvature(&e1, &e2, &e3, &times(&f, &v)) - &fs);
        }
        rep
    }
}
