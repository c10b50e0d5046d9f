use rand::Rng;

use crate::graded::GradedPolynomial;
use crate::samples::random_function;
use crate::structures::StructureError;

use super::{Algebroid, GeometryError};

/// Totally antisymmetric `E`-form of degree `m`, stored densely over
/// `[0, r)^m` with `alpha(e_{a1}, ..., e_{am}) = comps[a1..am]`.
#[derive(Clone, Debug, PartialEq)]
pub struct EForm {
    rank: usize,
    degree: usize,
    comps: Vec<GradedPolynomial>,
}

fn flat(idx: &[usize], r: usize) -> usize {
    idx.iter().fold(0, |acc, &a| acc * r + a)
}

fn sort_sign(idx: &[usize]) -> (Vec<usize>, i64) {
    let mut v = idx.to_vec();
    let mut sign = 1;
    for i in 0..v.len() {
        for j in 0..v.len().saturating_sub(1 + i) {
            if v[j] == v[j + 1] {
                return (v, 0);
            }
            if v[j] > v[j + 1] {
                v.swap(j, j + 1);
                sign = -sign;
            }
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return (v, 0);
    }
    (v, sign)
}

/// Increasing tuples of length `m` from `[0, r)`.
pub(crate) fn increasing(r: usize, m: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, r: usize, m: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        for a in start..r {
            cur.push(a);
            go(a + 1, r, m, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, r, m, &mut Vec::new(), &mut out);
    out
}

impl EForm {
    /// Builds the form from its components on increasing index tuples.
    pub fn from_sorted(data: &impl Algebroid, degree: usize, mut comp: impl FnMut(&[usize]) -> GradedPolynomial) -> Self {
        let r = data.rank();
        let zero = data.base().zero();
        let mut comps = vec![zero; r.pow(degree as u32)];
        for idx in increasing(r, degree) {
            let v = comp(&idx);
            comps[flat(&idx, r)] = v;
        }
        let mut out = Self { rank: r, degree, comps };
        out.fill_from_sorted();
        out
    }

    /// Dense constructor; rejects non-alternating input.
    pub fn new(data: &impl Algebroid, degree: usize, comps: Vec<GradedPolynomial>) -> Result<Self, GeometryError> {
        let r = data.rank();
        if comps.len() != r.pow(degree as u32) {
            return Err(GeometryError::Shape(format!("a {degree}-form of rank {r} has {} components", r.pow(degree as u32))));
        }
        let chart = data.chart();
        let comps = comps.into_iter().map(|p| p.rebind(chart)).collect::<Result<Vec<_>, _>>().map_err(StructureError::from)?;
        let form = Self { rank: r, degree, comps };
        for (pos, v) in form.comps.iter().enumerate() {
            let idx = form.unflat(pos);
            let (sorted, sign) = sort_sign(&idx);
            let expect = if sign == 0 { GradedPolynomial::zero(chart) } else { form.comps[flat(&sorted, r)].scale_int(sign) };
            if *v != expect {
                return Err(StructureError::NotAntisymmetric(format!("alpha{:?}", idx.iter().map(|a| a + 1).collect::<Vec<_>>())).into());
            }
        }
        Ok(form)
    }

    fn unflat(&self, mut pos: usize) -> Vec<usize> {
        let mut idx = vec![0; self.degree];
        for slot in idx.iter_mut().rev() {
            *slot = pos % self.rank;
            pos /= self.rank;
        }
        idx
    }

    fn fill_from_sorted(&mut self) {
        for pos in 0..self.comps.len() {
            let idx = self.unflat(pos);
            let (sorted, sign) = sort_sign(&idx);
            if sorted == idx {
                continue;
            }
            self.comps[pos] = if sign == 0 {
                GradedPolynomial::zero(self.comps[pos].chart())
            } else {
                self.comps[flat(&sorted, self.rank)].scale_int(sign)
            };
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn get(&self, idx: &[usize]) -> &GradedPolynomial {
        &self.comps[flat(idx, self.rank)]
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|p| p.is_zero())
    }

    /// First nonzero component on an increasing tuple, with the tuple.
    pub fn first_nonzero(&self) -> Option<(Vec<usize>, &GradedPolynomial)> {
        increasing(self.rank, self.degree).into_iter().map(|idx| {
            let p = self.get(&idx);
            (idx, p)
        }).find(|(_, p)| !p.is_zero())
    }

    /// `alpha(s_1, ..., s_m)` for sections given by frame components.
    pub fn eval(&self, sections: &[Vec<GradedPolynomial>]) -> GradedPolynomial {
        let chart = self.comps[0].chart().clone();
        let mut out = GradedPolynomial::zero(&chart);
        for (pos, c) in self.comps.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let idx = self.unflat(pos);
            let mut t = c.clone();
            for (s, &a) in sections.iter().zip(&idx) {
                t = &t * &s[a];
                if t.is_zero() {
                    break;
                }
            }
            out += &t;
        }
        out
    }

    pub fn random<R: Rng>(data: &impl Algebroid, degree: usize, rng: &mut R, max_degree: u32, terms: usize) -> Self {
        let chart = data.chart().clone();
        let body = data.base().ids().to_vec();
        Self::from_sorted(data, degree, |_| random_function(&chart, rng, &body, max_degree, terms))
    }
}

/// `(Ed alpha)(e_1..e_{m+1}) = sum_i (-1)^{i-1} rho(e_i) alpha(..^e_i..)
///  + sum_{i<j} (-1)^{i+j} alpha([e_i,e_j], ..^e_i..^e_j..)` on frames.
pub fn e_differential(alpha: &EForm, data: &impl Algebroid) -> EForm {
    let m = alpha.degree;
    let frames: Vec<_> = (0..data.rank()).map(|a| data.frame(a)).collect();
    let anchors: Vec<_> = frames.iter().map(|e| data.anchor_of(e)).collect();
    let base = data.base();
    EForm::from_sorted(data, m + 1, |idx| {
        let mut t = base.zero();
        for i in 0..=m {
            let rest: Vec<usize> = idx.iter().enumerate().filter(|(k, _)| *k != i).map(|(_, &a)| a).collect();
            let term = base.apply(&anchors[idx[i]], alpha.get(&rest));
            if i % 2 == 0 {
                t += &term;
            } else {
                t -= &term;
            }
        }
        for i in 0..=m {
            for j in i + 1..=m {
                let br = data.bracket_of(&frames[idx[i]], &frames[idx[j]]);
                let rest: Vec<usize> = idx.iter().enumerate().filter(|(k, _)| *k != i && *k != j).map(|(_, &a)| a).collect();
                let mut term = base.zero();
                for (c, bc) in br.iter().enumerate() {
                    if bc.is_zero() {
                        continue;
                    }
                    let mut full = vec![c];
                    full.extend_from_slice(&rest);
                    term += &(bc * alpha.get(&full));
                }
                // 1-based (i+1)+(j+1) has the parity of i+j
                if (i + j) % 2 == 0 {
                    t += &term;
                } else {
                    t -= &term;
                }
            }
        }
        t
    })
}
