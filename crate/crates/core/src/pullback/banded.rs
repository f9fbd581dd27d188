//! Banded LU factorisation with partial pivoting.

use crate::error::{Error, Result};

/// Row-window band storage: row `i` holds columns `i - kl ..= i + kl + ku`,
/// the extra `kl` superdiagonals absorbing pivoting fill-in.
#[derive(Debug, Clone)]
pub struct BandedMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<f64>,
}

impl BandedMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        Self {
            n,
            kl,
            ku,
            width,
            data: vec![0.0; n * width],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> usize {
        debug_assert!(j + self.kl >= i && j <= i + self.kl + self.ku);
        i * self.width + (j + self.kl - i)
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        assert!(
            j + self.kl >= i && j <= i + self.ku,
            "entry ({i}, {j}) outside the band"
        );
        let s = self.slot(i, j);
        self.data[s] += v;
    }

    pub fn factor(mut self) -> Result<BandedLu> {
        let (n, kl) = (self.n, self.kl);
        let reach = kl + self.ku;
        let mut pivots = vec![0usize; n];
        let mut lower = vec![0.0; n * kl];
        for k in 0..n {
            let last = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = self.data[self.slot(k, k)].abs();
            for i in k + 1..=last {
                let v = self.data[self.slot(i, k)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 {
                return Err(Error::Singular(k));
            }
            pivots[k] = p;
            let cols = k..=(k + reach).min(n - 1);
            if p != k {
                for c in cols.clone() {
                    let (a, b) = (self.slot(k, c), self.slot(p, c));
                    self.data.swap(a, b);
                }
            }
            let pivot = self.data[self.slot(k, k)];
            for i in k + 1..=last {
                let s = self.slot(i, k);
                let m = self.data[s] / pivot;
                self.data[s] = 0.0;
                lower[k * kl + (i - k - 1)] = m;
                if m != 0.0 {
                    for c in k + 1..=*cols.end() {
                        let (src, dst) = (self.slot(k, c), self.slot(i, c));
                        self.data[dst] -= m * self.data[src];
                    }
                }
            }
        }
        Ok(BandedLu {
            upper: self,
            lower,
            pivots,
        })
    }
}

#[derive(Debug, Clone)]
pub struct BandedLu {
    upper: BandedMatrix,
    lower: Vec<f64>,
    pivots: Vec<usize>,
}

impl BandedLu {
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let u = &self.upper;
        let (n, kl) = (u.n, u.kl);
        for k in 0..n {
            b.swap(k, self.pivots[k]);
            let bk = b[k];
            if bk != 0.0 {
                for i in k + 1..=(k + kl).min(n - 1) {
                    b[i] -= self.lower[k * kl + (i - k - 1)] * bk;
                }
            }
        }
        let reach = kl + u.ku;
        for k in (0..n).rev() {
            let mut acc = b[k];
            for c in k + 1..=(k + reach).min(n - 1) {
                acc -= u.data[u.slot(k, c)] * b[c];
            }
            b[k] = acc / u.data[u.slot(k, k)];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_a_pivoting_band_system() {
        // tridiagonal-plus with a zero leading diagonal forces a row swap
        let n = 40;
        let (kl, ku) = (2, 3);
        let mut dense = vec![vec![0.0; n]; n];
        let mut a = BandedMatrix::zeros(n, kl, ku);
        for i in 0..n {
            for j in i.saturating_sub(kl)..=(i + ku).min(n - 1) {
                let v = if i == j && i % 7 == 0 {
                    0.0
                } else {
                    ((i * 31 + j * 17) % 11) as f64 - 5.0 + if i == j { 0.5 } else { 0.0 }
                };
                dense[i][j] = v;
                a.add(i, j, v);
            }
        }
        let x: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
        let mut b: Vec<f64> = dense
            .iter()
            .map(|row| row.iter().zip(&x).map(|(a, x)| a * x).sum())
            .collect();
        a.factor().unwrap().solve_in_place(&mut b);
        for (u, v) in b.iter().zip(&x) {
            assert!((u - v).abs() < 1e-10, "{u} vs {v}");
        }
    }

    #[test]
    fn singular_matrix_is_reported() {
        let mut a = BandedMatrix::zeros(3, 1, 1);
        a.add(0, 0, 1.0);
        a.add(2, 2, 1.0);
        assert!(matches!(a.factor(), Err(Error::Singular(1))));
    }
}
