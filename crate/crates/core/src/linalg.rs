//! Small dense exact linear algebra over the rationals.

use num_traits::{One, Zero};

use crate::graded::Rational;

pub type Matrix = Vec<Vec<Rational>>;

pub fn identity(n: usize) -> Matrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect())
        .collect()
}

pub fn is_square(m: &Matrix) -> bool {
    m.iter().all(|row| row.len() == m.len())
}

pub fn is_symmetric(m: &Matrix) -> bool {
    is_square(m) && (0..m.len()).all(|i| (0..i).all(|j| m[i][j] == m[j][i]))
}

/// Gauss-Jordan inverse; `None` when singular or not square.
pub fn invert(m: &Matrix) -> Option<Matrix> {
    if !is_square(m) {
        return None;
    }
    let n = m.len();
    let mut a: Matrix = m.clone();
    let mut inv = identity(n);
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col].clone();
        for j in 0..n {
            a[col][j] = &a[col][j] / &p;
            inv[col][j] = &inv[col][j] / &p;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for j in 0..n {
                    let t = &f * &a[col][j];
                    a[r][j] -= t;
                    let t = &f * &inv[col][j];
                    inv[r][j] -= t;
                }
            }
        }
    }
    Some(inv)
}

pub fn mul(a: &Matrix, b: &Matrix) -> Matrix {
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).fold(Rational::zero(), |acc, k| acc + &row[k] * &b[k][j]))
                .collect()
        })
        .collect()
}

/// Solves `A x = b` exactly. Returns one particular solution (free variables
/// set to zero) together with a basis of the kernel, or `None` if inconsistent.
pub fn solve(a: &Matrix, b: &[Rational]) -> Option<(Vec<Rational>, Vec<Vec<Rational>>)> {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut m: Matrix = a.iter().zip(b).map(|(r, v)| r.iter().cloned().chain(std::iter::once(v.clone())).collect()).collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r >= rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let pv = m[r][c].clone();
        for j in 0..=cols {
            m[r][j] = &m[r][j] / &pv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..=cols {
                    let t = &f * &m[r][j];
                    m[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if m[r..].iter().any(|row| !row[cols].is_zero()) {
        return None;
    }
    let mut x = vec![Rational::zero(); cols];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = m[i][cols].clone();
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let kernel = free
        .iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); cols];
            v[f] = Rational::one();
            for (i, &c) in pivots.iter().enumerate() {
                v[c] = -m[i][f].clone();
            }
            v
        })
        .collect();
    Some((x, kernel))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded::{integer, rational};

    #[test]
    fn inverse_of_two_by_two() {
        let m = vec![vec![integer(2), integer(1)], vec![integer(1), integer(1)]];
        let inv = invert(&m).unwrap();
        assert_eq!(inv, vec![vec![integer(1), integer(-1)], vec![integer(-1), integer(2)]]);
        assert_eq!(mul(&m, &inv), identity(2));
        assert!(invert(&vec![vec![integer(1), integer(2)], vec![integer(2), integer(4)]]).is_none());
    }

    #[test]
    fn solve_with_kernel() {
        let a = vec![vec![integer(1), integer(1)], vec![integer(2), integer(2)]];
        let (x, k) = solve(&a, &[integer(1), integer(2)]).unwrap();
        assert_eq!(x, vec![integer(1), integer(0)]);
        assert_eq!(k, vec![vec![integer(-1), integer(1)]]);
        assert!(solve(&a, &[integer(1), integer(3)]).is_none());
        let (x, _) = solve(&vec![vec![integer(2)]], &[integer(1)]).unwrap();
        assert_eq!(x, vec![rational(1, 2)]);
    }
}
