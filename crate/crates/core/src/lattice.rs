//! Integer lattices: short-vector enumeration under a positive-definite
//! quadratic form, saturated integer kernels, and exact rational solving.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

/// Coefficients `q_ii`, `q_ij` (`j > i`) with
/// `Q(x) = Σ_i q_ii (x_i + Σ_{j>i} q_ij x_j)²`.
#[derive(Clone, Debug)]
pub struct ReducedForm {
    n: usize,
    q: Vec<Vec<f64>>,
}

impl ReducedForm {
    pub fn new(gram: &[Vec<f64>]) -> Result<Self> {
        let n = gram.len();
        let mut q: Vec<Vec<f64>> = gram.to_vec();
        for row in &q {
            if row.len() != n {
                return Err(Error::Invalid("Gram matrix must be square".into()));
            }
        }
        for i in 0..n {
            if !(q[i][i] > 0.0) {
                return Err(Error::Invalid(
                    "quadratic form is not positive definite".into(),
                ));
            }
            for j in i + 1..n {
                q[j][i] = q[i][j];
                q[i][j] /= q[i][i];
            }
            for k in i + 1..n {
                for l in k..n {
                    q[k][l] -= q[k][i] * q[i][l];
                }
            }
        }
        Ok(ReducedForm { n, q })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn eval(&self, x: &[i64]) -> f64 {
        let mut total = 0.0;
        for i in 0..self.n {
            let mut t = x[i] as f64;
            for j in i + 1..self.n {
                t += self.q[i][j] * x[j] as f64;
            }
            total += self.q[i][i] * t * t;
        }
        total
    }

    /// Call `visit` on every `x ∈ Zⁿ` with `Q(x) ≤ bound`, including zero.
    /// Returns the number of vectors visited.
    pub fn enumerate<F: FnMut(&[i64])>(&self, bound: f64, mut visit: F) -> usize {
        let mut x = vec![0i64; self.n];
        let mut count = 0;
        if self.n == 0 {
            visit(&x);
            return 1;
        }
        self.descend(
            self.n - 1,
            bound * (1.0 + 1e-12) + 1e-12,
            &mut x,
            &mut visit,
            &mut count,
        );
        count
    }

    fn descend<F: FnMut(&[i64])>(
        &self,
        i: usize,
        rem: f64,
        x: &mut Vec<i64>,
        visit: &mut F,
        count: &mut usize,
    ) {
        let mut center = 0.0;
        for j in i + 1..self.n {
            center -= self.q[i][j] * x[j] as f64;
        }
        let radius = libm::sqrt(rem.max(0.0) / self.q[i][i]);
        let lo = libm::ceil(center - radius) as i64;
        let hi = libm::floor(center + radius) as i64;
        for v in lo..=hi {
            let t = v as f64 - center;
            let used = self.q[i][i] * t * t;
            if used > rem {
                continue;
            }
            x[i] = v;
            if i == 0 {
                *count += 1;
                visit(x);
            } else {
                self.descend(i - 1, rem - used, x, visit, count);
            }
        }
        x[i] = 0;
    }
}

/// A `Z`-basis of `{x ∈ Zⁿ : A x = 0}` for an integer matrix `A` given by rows.
pub fn integer_kernel(rows: &[Vec<BigInt>], n: usize) -> Vec<Vec<BigInt>> {
    let mut a: Vec<Vec<BigInt>> = rows.to_vec();
    let mut u: Vec<Vec<BigInt>> = (0..n)
        .map(|i| (0..n).map(|j| BigInt::from((i == j) as i64)).collect())
        .collect();
    let col_axpy = |m: &mut Vec<Vec<BigInt>>, dst: usize, src: usize, q: &BigInt| {
        for row in m.iter_mut() {
            let s = row[src].clone();
            row[dst] -= q * s;
        }
    };
    let col_swap = |m: &mut Vec<Vec<BigInt>>, x: usize, y: usize| {
        for row in m.iter_mut() {
            row.swap(x, y);
        }
    };
    let mut pivot = 0;
    for r in 0..a.len() {
        if pivot >= n {
            break;
        }
        loop {
            let nonzero: Vec<usize> = (pivot..n).filter(|&c| !a[r][c].is_zero()).collect();
            if nonzero.len() <= 1 {
                if let Some(&k) = nonzero.first() {
                    col_swap(&mut a, pivot, k);
                    col_swap(&mut u, pivot, k);
                    pivot += 1;
                }
                break;
            }
            let k = *nonzero
                .iter()
                .min_by_key(|&&c| a[r][c].abs())
                .expect("nonempty");
            for &c in &nonzero {
                if c == k {
                    continue;
                }
                let q = a[r][c].div_floor(&a[r][k]);
                col_axpy(&mut a, c, k, &q);
                col_axpy(&mut u, c, k, &q);
            }
        }
    }
    (pivot..n)
        .map(|c| u.iter().map(|row| row[c].clone()).collect())
        .collect()
}

/// The unique solution of `A x = b` over `Q`, if any; `A` has full column rank.
pub fn solve_rational(
    a: &[Vec<BigRational>],
    b: &[BigRational],
) -> Result<Option<Vec<BigRational>>> {
    let rows = a.len();
    let n = a.first().map_or(0, |r| r.len());
    let mut m: Vec<Vec<BigRational>> = a
        .iter()
        .zip(b)
        .map(|(r, bi)| {
            r.iter()
                .cloned()
                .chain(core::iter::once(bi.clone()))
                .collect()
        })
        .collect();
    let mut row = 0;
    for col in 0..n {
        let Some(p) = (row..rows).find(|&i| !m[i][col].is_zero()) else {
            return Err(Error::BadBasis("basis is linearly dependent".into()));
        };
        m.swap(row, p);
        let inv = m[row][col].recip();
        for v in m[row].iter_mut() {
            *v = &*v * &inv;
        }
        for i in 0..rows {
            if i != row && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                for j in col..=n {
                    let t = &m[row][j] * &f;
                    m[i][j] -= t;
                }
            }
        }
        row += 1;
    }
    if (row..rows).any(|i| !m[i][n].is_zero()) {
        return Ok(None);
    }
    Ok(Some((0..n).map(|i| m[i][n].clone()).collect()))
}

/// Size-reduce and LLL-reduce an integer basis (rows) with respect to the
/// Gram function `gram(x, y)`, in floating point. Returns the reduced basis.
pub fn lll_reduce<G>(mut basis: Vec<Vec<i64>>, gram: G) -> Vec<Vec<i64>>
where
    G: Fn(&[i64], &[i64]) -> f64,
{
    let n = basis.len();
    if n < 2 {
        return basis;
    }
    let delta = 0.99;
    let mut k = 1;
    let mut guard = 0;
    while k < n && guard < 100_000 {
        guard += 1;
        let (mu, bstar) = gram_schmidt(&basis, &gram);
        for j in (0..k).rev() {
            let q = libm::round(mu[k][j]) as i64;
            if q != 0 {
                let bj = basis[j].clone();
                for (x, y) in basis[k].iter_mut().zip(bj.iter()) {
                    *x -= q * y;
                }
            }
        }
        let (mu, _) = gram_schmidt(&basis, &gram);
        if bstar[k] >= (delta - mu[k][k - 1] * mu[k][k - 1]) * bstar[k - 1] {
            k += 1;
        } else {
            basis.swap(k, k - 1);
            k = (k - 1).max(1);
        }
    }
    basis
}

fn gram_schmidt<G>(basis: &[Vec<i64>], gram: &G) -> (Vec<Vec<f64>>, Vec<f64>)
where
    G: Fn(&[i64], &[i64]) -> f64,
{
    let n = basis.len();
    let mut mu = vec![vec![0.0; n]; n];
    let mut bstar = vec![0.0; n];
    for i in 0..n {
        for j in 0..i {
            let mut s = gram(&basis[i], &basis[j]);
            for k in 0..j {
                s -= mu[j][k] * mu[i][k] * bstar[k];
            }
            mu[i][j] = s / bstar[j];
        }
        let mut s = gram(&basis[i], &basis[i]);
        for k in 0..i {
            s -= mu[i][k] * mu[i][k] * bstar[k];
        }
        bstar[i] = s;
    }
    (mu, bstar)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::rational;

    #[test]
    fn enumeration_matches_brute_force() {
        let gram = vec![
            vec![2.0, 0.5, 0.1],
            vec![0.5, 1.5, -0.3],
            vec![0.1, -0.3, 1.0],
        ];
        let form = ReducedForm::new(&gram).unwrap();
        let bound = 9.0;
        let mut seen = Vec::new();
        form.enumerate(bound, |x| seen.push(x.to_vec()));
        let q = |x: &[i64]| -> f64 {
            let mut s = 0.0;
            for i in 0..3 {
                for j in 0..3 {
                    s += gram[i][j] * (x[i] * x[j]) as f64;
                }
            }
            s
        };
        let mut brute = Vec::new();
        for a in -6..=6i64 {
            for b in -6..=6i64 {
                for c in -6..=6i64 {
                    if q(&[a, b, c]) <= bound {
                        brute.push(vec![a, b, c]);
                    }
                }
            }
        }
        seen.sort();
        brute.sort();
        assert_eq!(seen, brute);
        for x in &seen {
            assert!((form.eval(x) - q(x)).abs() < 1e-9);
        }
    }

    #[test]
    fn kernel_is_saturated() {
        // 2x + 4y + 6z = 0 has kernel basis spanning {x + 2y + 3z = 0}
        let rows = vec![vec![BigInt::from(2), BigInt::from(4), BigInt::from(6)]];
        let k = integer_kernel(&rows, 3);
        assert_eq!(k.len(), 2);
        for v in &k {
            let s: BigInt = &v[0] + &v[1] * 2 + &v[2] * 3;
            assert!(s.is_zero());
        }
        // index one: the 2×2 minors of the kernel basis have gcd 1
        let m = |i: usize, j: usize| &k[0][i] * &k[1][j] - &k[0][j] * &k[1][i];
        let g = m(0, 1).gcd(&m(0, 2)).gcd(&m(1, 2));
        assert_eq!(g, BigInt::from(1));
    }

    #[test]
    fn kernel_of_full_rank_is_trivial() {
        let rows = vec![
            vec![BigInt::from(1), BigInt::from(0)],
            vec![BigInt::from(0), BigInt::from(3)],
        ];
        assert!(integer_kernel(&rows, 2).is_empty());
    }

    #[test]
    fn rational_solve() {
        let a = vec![
            vec![rational(1, 1), rational(1, 1)],
            vec![rational(1, 1), rational(-1, 1)],
            vec![rational(2, 1), rational(0, 1)],
        ];
        let x = solve_rational(&a, &[rational(3, 1), rational(1, 1), rational(4, 1)])
            .unwrap()
            .unwrap();
        assert_eq!(x, vec![rational(2, 1), rational(1, 1)]);
        assert!(
            solve_rational(&a, &[rational(3, 1), rational(1, 1), rational(5, 1)])
                .unwrap()
                .is_none()
        );
    }

    #[test]
    fn lll_shortens() {
        let basis = vec![vec![1, 0], vec![1000, 1]];
        let red = lll_reduce(basis, |x, y| (x[0] * y[0] + x[1] * y[1]) as f64);
        assert!(red.iter().all(|v| v[0].abs() <= 1 && v[1].abs() <= 1));
    }
}
