//! Banded LU factorization with partial pivoting (compact row storage) and a
//! 1-norm condition estimate.

use crate::error::{Error, Result};

/// Square band matrix with `m1` sub- and `m2` super-diagonals.
///
/// Row `i` stores A(i, i − m1 ..= i + m2) in slots `0..=m1 + m2`.
#[derive(Debug, Clone)]
pub struct BandMatrix {
    n: usize,
    m1: usize,
    m2: usize,
    rows: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, m1: usize, m2: usize) -> Self {
        Self {
            n,
            m1,
            m2,
            rows: vec![0.0; n * (m1 + m2 + 1)],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn width(&self) -> usize {
        self.m1 + self.m2 + 1
    }

    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        if i >= self.n || j >= self.n || j + self.m1 < i || j > i + self.m2 {
            return None;
        }
        Some(i * self.width() + j + self.m1 - i)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.slot(i, j).map_or(0.0, |k| self.rows[k])
    }

    /// Panics if (i, j) lies outside the band.
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self
            .slot(i, j)
            .unwrap_or_else(|| panic!("({i}, {j}) outside band"));
        self.rows[k] = v;
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.m1);
                let hi = (i + self.m2).min(self.n - 1);
                (lo..=hi).map(|j| self.get(i, j) * x[j]).sum()
            })
            .collect()
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> f64 {
        let mut cols = vec![0.0; self.n];
        for i in 0..self.n {
            let lo = i.saturating_sub(self.m1);
            let hi = (i + self.m2).min(self.n - 1);
            for (j, c) in cols.iter_mut().enumerate().take(hi + 1).skip(lo) {
                *c += self.get(i, j).abs();
            }
        }
        cols.into_iter().fold(0.0, f64::max)
    }

    pub fn factor(&self) -> Result<BandLu> {
        BandLu::new(self)
    }
}

/// Row-pivoted LU factors; U occupies `m1 + m2 + 1` slots per row.
#[derive(Debug, Clone)]
pub struct BandLu {
    n: usize,
    m1: usize,
    mm: usize,
    upper: Vec<f64>,
    lower: Vec<f64>,
    pivots: Vec<usize>,
}

impl BandLu {
    fn new(a: &BandMatrix) -> Result<Self> {
        let (n, m1) = (a.n, a.m1);
        let mm = a.width();
        let mut up = a.rows.clone();
        let mut lower = vec![0.0; n * m1.max(1)];
        let mut pivots = vec![0; n];

        // Left-justify the first m1 rows, which have fewer than mm entries.
        let mut l = m1;
        for i in 0..m1.min(n) {
            let row = &mut up[i * mm..(i + 1) * mm];
            row.copy_within(l.., 0);
            l -= 1;
            for v in &mut row[mm - l - 1..] {
                *v = 0.0;
            }
        }

        // `l` is one past the last row reached by the band below row k.
        let mut l = m1;
        for k in 0..n {
            if l < n {
                l += 1;
            }
            let mut piv = k;
            let mut best = up[k * mm];
            for j in k + 1..l {
                if up[j * mm].abs() > best.abs() {
                    best = up[j * mm];
                    piv = j;
                }
            }
            pivots[k] = piv;
            if best == 0.0 {
                return Err(Error::Singular(k));
            }
            if piv != k {
                for j in 0..mm {
                    up.swap(k * mm + j, piv * mm + j);
                }
            }
            for i in k + 1..l {
                let f = up[i * mm] / up[k * mm];
                lower[k * m1 + (i - k - 1)] = f;
                for j in 1..mm {
                    up[i * mm + j - 1] = up[i * mm + j] - f * up[k * mm + j];
                }
                up[i * mm + mm - 1] = 0.0;
            }
        }
        Ok(Self {
            n,
            m1,
            mm,
            upper: up,
            lower,
            pivots,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Solves A x = b in place.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let (n, m1, mm) = (self.n, self.m1, self.mm);
        assert_eq!(b.len(), n);
        let mut l = m1;
        for k in 0..n {
            let piv = self.pivots[k];
            if piv != k {
                b.swap(k, piv);
            }
            if l < n {
                l += 1;
            }
            for i in k + 1..l {
                b[i] -= self.lower[k * m1 + (i - k - 1)] * b[k];
            }
        }
        let mut l = 1;
        for i in (0..n).rev() {
            let mut acc = b[i];
            for k in 1..l {
                acc -= self.upper[i * mm + k] * b[k + i];
            }
            b[i] = acc / self.upper[i * mm];
            if l < mm {
                l += 1;
            }
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }

    /// Lower-bound estimate of ‖A⁻¹‖₁ by Hager's method, valid only when A is
    /// symmetric (the transposed solve is replaced by a plain solve).
    pub fn inverse_norm1_estimate_symmetric(&self) -> f64 {
        let n = self.n;
        let norm1 = |v: &[f64]| v.iter().map(|x| x.abs()).sum::<f64>();
        let mut x = vec![1.0 / n as f64; n];
        let mut est = 0.0;
        let mut last = usize::MAX;
        for _ in 0..5 {
            let y = self.solve(&x);
            est = norm1(&y);
            let xi: Vec<f64> = y
                .iter()
                .map(|v| if *v >= 0.0 { 1.0 } else { -1.0 })
                .collect();
            let z = self.solve(&xi);
            let (jmax, zmax) = z.iter().enumerate().fold((0, 0.0), |acc, (j, v)| {
                if v.abs() > acc.1 {
                    (j, v.abs())
                } else {
                    acc
                }
            });
            let ztx: f64 = z.iter().zip(&x).map(|(a, b)| a * b).sum();
            if zmax <= ztx || jmax == last {
                break;
            }
            x.iter_mut().for_each(|v| *v = 0.0);
            x[jmax] = 1.0;
            last = jmax;
        }
        // Alternating test vector guards against cancellation in the iteration.
        if n > 1 {
            let b: Vec<f64> = (0..n)
                .map(|i| {
                    let s = if i % 2 == 0 { 1.0 } else { -1.0 };
                    s * (1.0 + i as f64 / (n - 1) as f64)
                })
                .collect();
            let y = self.solve(&b);
            est = f64::max(est, 2.0 * norm1(&y) / (3.0 * n as f64));
        }
        est
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[allow(clippy::needless_range_loop)]
    fn dense_solve(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
        let n = b.len();
        let mut m: Vec<Vec<f64>> = a.to_vec();
        let mut x = b.to_vec();
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| m[i][k].abs().total_cmp(&m[j][k].abs()))
                .unwrap();
            m.swap(k, p);
            x.swap(k, p);
            for i in k + 1..n {
                let f = m[i][k] / m[k][k];
                for j in k..n {
                    m[i][j] -= f * m[k][j];
                }
                x[i] -= f * x[k];
            }
        }
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|j| m[i][j] * x[j]).sum();
            x[i] = (x[i] - s) / m[i][i];
        }
        x
    }

    fn sample(n: usize, m1: usize, m2: usize) -> BandMatrix {
        let mut a = BandMatrix::zeros(n, m1, m2);
        for i in 0..n {
            for j in i.saturating_sub(m1)..=(i + m2).min(n - 1) {
                let v = ((i * 7 + j * 13) % 11) as f64 - 5.0 + if i == j { 0.5 } else { 0.0 };
                a.set(i, j, v);
            }
        }
        a
    }

    #[test]
    fn matches_dense_elimination() {
        for &(n, m1, m2) in &[(1, 0, 0), (5, 1, 1), (9, 2, 3), (12, 4, 1), (7, 0, 2)] {
            let a = sample(n, m1, m2);
            let dense: Vec<Vec<f64>> = (0..n)
                .map(|i| (0..n).map(|j| a.get(i, j)).collect())
                .collect();
            let b: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin() + 1.0).collect();
            let x = a.factor().unwrap().solve(&b);
            let xd = dense_solve(&dense, &b);
            for (u, v) in x.iter().zip(&xd) {
                assert!(
                    (u - v).abs() < 1e-9 * (1.0 + v.abs()),
                    "n={n} m1={m1} m2={m2}"
                );
            }
            let back = a.mul_vec(&x);
            for (u, v) in back.iter().zip(&b) {
                assert!((u - v).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn pivoting_handles_zero_diagonal() {
        let mut a = BandMatrix::zeros(3, 1, 1);
        a.set(0, 0, 0.0);
        a.set(0, 1, 1.0);
        a.set(1, 0, 1.0);
        a.set(1, 1, 0.0);
        a.set(1, 2, 1.0);
        a.set(2, 1, 1.0);
        a.set(2, 2, 1.0);
        let x = a.factor().unwrap().solve(&[1.0, 2.0, 3.0]);
        let back = a.mul_vec(&x);
        assert!((back[0] - 1.0).abs() < 1e-14);
        assert!((back[1] - 2.0).abs() < 1e-14);
        assert!((back[2] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let mut a = BandMatrix::zeros(3, 1, 1);
        a.set(0, 0, 1.0);
        a.set(0, 1, 2.0);
        a.set(1, 0, 2.0);
        a.set(1, 1, 4.0);
        a.set(2, 2, 1.0);
        assert!(matches!(a.factor(), Err(Error::Singular(_))));
    }

    #[test]
    fn condition_estimate_for_diagonal_is_exact() {
        let mut a = BandMatrix::zeros(4, 1, 1);
        for (i, d) in [2.0, 0.5, 4.0, 1e-3].into_iter().enumerate() {
            a.set(i, i, d);
        }
        let est = a.factor().unwrap().inverse_norm1_estimate_symmetric();
        assert!((est - 1e3).abs() < 1e-9);
        assert_eq!(a.norm1(), 4.0);
    }

    #[test]
    fn condition_estimate_for_laplacian_is_close() {
        // 1D Dirichlet Laplacian; ‖A⁻¹‖₁ is known exactly from the Green's function.
        let n = 50;
        let mut a = BandMatrix::zeros(n, 1, 1);
        for i in 0..n {
            a.set(i, i, 2.0);
            if i > 0 {
                a.set(i, i - 1, -1.0);
            }
            if i + 1 < n {
                a.set(i, i + 1, -1.0);
            }
        }
        let lu = a.factor().unwrap();
        let exact = (0..n)
            .map(|j| {
                let e: Vec<f64> = (0..n).map(|i| if i == j { 1.0 } else { 0.0 }).collect();
                lu.solve(&e).iter().map(|v| v.abs()).sum::<f64>()
            })
            .fold(0.0, f64::max);
        let est = lu.inverse_norm1_estimate_symmetric();
        assert!(est <= exact * (1.0 + 1e-12));
        assert!(est >= 0.5 * exact);
    }
}
