//! Dense-band linear algebra for the structured SPD systems the solver needs.
//!
//! The 1D mass/stiffness matrices are symmetric tridiagonal; the 2D
//! tensor-product matrices are symmetric banded with bandwidth `J`. One
//! banded Cholesky covers both (the tridiagonal case is bandwidth 1, i.e.
//! ordinary elimination without pivoting, which is stable for SPD systems).

use crate::error::{Error, Result};

/// Symmetric tridiagonal matrix stored as diagonal + off-diagonal bands.
#[derive(Debug, Clone)]
pub struct SymTridiag {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiag {
    pub fn n(&self) -> usize {
        self.diag.len()
    }

    /// out = A v
    pub fn matvec(&self, v: &[f64], out: &mut [f64]) {
        let n = self.n();
        assert_eq!(v.len(), n);
        assert_eq!(out.len(), n);
        for i in 0..n {
            let mut s = self.diag[i] * v[i];
            if i > 0 {
                s += self.off[i - 1] * v[i - 1];
            }
            if i + 1 < n {
                s += self.off[i] * v[i + 1];
            }
            out[i] = s;
        }
    }
}

/// Symmetric banded matrix; only the lower triangle within the band is stored.
///
/// Row `i` holds columns `i-bw ..= i` at `data[i*(bw+1) ..]`, left-padded with
/// zeros for the first rows.
#[derive(Debug, Clone)]
pub struct BandMatrix {
    n: usize,
    bw: usize,
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, bw: usize) -> Self {
        Self {
            n,
            bw,
            data: vec![0.0; n * (bw + 1)],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bw
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(j <= i && i - j <= self.bw);
        i * (self.bw + 1) + self.bw - (i - j)
    }

    /// Adds `v` to entry (i, j) of the lower triangle (j <= i).
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.data[k] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (r, c) = if j > i { (j, i) } else { (i, j) };
        if r - c > self.bw {
            0.0
        } else {
            self.data[self.idx(r, c)]
        }
    }

    /// out = A v using the implied symmetry.
    pub fn matvec(&self, v: &[f64], out: &mut [f64]) {
        assert_eq!(v.len(), self.n);
        out.fill(0.0);
        for i in 0..self.n {
            let lo = i.saturating_sub(self.bw);
            for j in lo..i {
                let a = self.data[self.idx(i, j)];
                out[i] += a * v[j];
                out[j] += a * v[i];
            }
            out[i] += self.data[self.idx(i, i)] * v[i];
        }
    }

    /// In-place banded Cholesky factorization A = L L^T.
    pub fn cholesky(mut self) -> Result<BandCholesky> {
        let (n, bw) = (self.n, self.bw);
        for i in 0..n {
            let lo_i = i.saturating_sub(bw);
            for j in lo_i..=i {
                let lo = lo_i.max(j.saturating_sub(bw));
                let mut s = self.data[self.idx(i, j)];
                for k in lo..j {
                    s -= self.data[self.idx(i, k)] * self.data[self.idx(j, k)];
                }
                if j < i {
                    let k = self.idx(i, j);
                    self.data[k] = s / self.data[self.idx(j, j)];
                } else {
                    if s <= 0.0 || !s.is_finite() {
                        return Err(Error::NotSpd { row: i, pivot: s });
                    }
                    let k = self.idx(i, i);
                    self.data[k] = s.sqrt();
                }
            }
        }
        Ok(BandCholesky {
            n,
            bw,
            data: self.data,
        })
    }
}

/// Cholesky factor of a banded SPD matrix, reused across many solves.
#[derive(Debug, Clone)]
pub struct BandCholesky {
    n: usize,
    bw: usize,
    data: Vec<f64>,
}

impl BandCholesky {
    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        i * (self.bw + 1) + self.bw - (i - j)
    }

    pub fn solve_in_place(&self, x: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        // L y = b
        for i in 0..self.n {
            let lo = i.saturating_sub(self.bw);
            let mut s = x[i];
            for j in lo..i {
                s -= self.data[self.idx(i, j)] * x[j];
            }
            x[i] = s / self.data[self.idx(i, i)];
        }
        // L^T x = y
        for i in (0..self.n).rev() {
            let hi = (i + self.bw).min(self.n - 1);
            let mut s = x[i];
            for j in i + 1..=hi {
                s -= self.data[self.idx(j, i)] * x[j];
            }
            x[i] = s / self.data[self.idx(i, i)];
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}

/// Direct solve of an SPD banded system, factoring once.
pub fn solve_spd(a: BandMatrix, b: &[f64]) -> Result<Vec<f64>> {
    if a.n() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.n(),
            got: b.len(),
        });
    }
    Ok(a.cholesky()?.solve(b))
}

#[cfg(test)]
mod tests {
    use super::*;

    // Small deterministic generator so the tests need no RNG dependency.
    struct XorShift(u64);
    impl XorShift {
        fn next_f64(&mut self) -> f64 {
            let mut x = self.0;
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            self.0 = x;
            (x >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        }
    }

    #[test]
    fn recovers_known_solution_on_random_spd() {
        // A = G^T G + I with a dense 5x5 G, stored as a band of width 4.
        let n = 5;
        let mut rng = XorShift(0x9e3779b97f4a7c15);
        let g: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..n).map(|_| rng.next_f64()).collect())
            .collect();
        let mut a = BandMatrix::zeros(n, n - 1);
        for i in 0..n {
            for j in 0..=i {
                let mut s = if i == j { 1.0 } else { 0.0 };
                for k in 0..n {
                    s += g[k][i] * g[k][j];
                }
                a.add(i, j, s);
            }
        }
        let x_true: Vec<f64> = (0..n).map(|i| (i as f64 + 1.0) / 3.0).collect();
        let mut b = vec![0.0; n];
        a.matvec(&x_true, &mut b);
        let x = solve_spd(a, &b).unwrap();
        for i in 0..n {
            assert!((x[i] - x_true[i]).abs() < 1e-10, "x[{i}] = {}", x[i]);
        }
    }

    #[test]
    fn tridiagonal_band_solve() {
        // -u'' = 2 on (0,1), u(0)=u(1)=0 has u = x(1-x); the P1 system with
        // load 2h reproduces the exact nodal values.
        let j = 8usize;
        let h = 1.0 / j as f64;
        let n = j - 1;
        let mut a = BandMatrix::zeros(n, 1);
        for i in 0..n {
            a.add(i, i, 2.0 / h);
            if i > 0 {
                a.add(i, i - 1, -1.0 / h);
            }
        }
        let b = vec![2.0 * h; n];
        let x = solve_spd(a, &b).unwrap();
        for i in 0..n {
            let xi = (i + 1) as f64 * h;
            assert!((x[i] - xi * (1.0 - xi)).abs() < 1e-13);
        }
    }

    #[test]
    fn rejects_indefinite_matrix() {
        let mut a = BandMatrix::zeros(2, 1);
        a.add(0, 0, 1.0);
        a.add(1, 0, 3.0);
        a.add(1, 1, 1.0); // pivot becomes 1 - 9 < 0
        assert!(matches!(a.cholesky(), Err(Error::NotSpd { .. })));
    }

    #[test]
    fn sym_tridiag_matvec_matches_band() {
        let t = SymTridiag {
            diag: vec![2.0, 2.0, 2.0, 2.0],
            off: vec![-1.0, -1.0, -1.0],
        };
        let mut band = BandMatrix::zeros(4, 1);
        for i in 0..4 {
            band.add(i, i, 2.0);
            if i > 0 {
                band.add(i, i - 1, -1.0);
            }
        }
        let v = vec![1.0, -2.0, 0.5, 3.0];
        let mut a = vec![0.0; 4];
        let mut b = vec![0.0; 4];
        t.matvec(&v, &mut a);
        band.matvec(&v, &mut b);
        for i in 0..4 {
            assert!((a[i] - b[i]).abs() < 1e-15);
        }
    }
}
