//! Dense complex linear algebra: storage, pivoted determinants, the
//! unpivoted upper-lower factorization whose diagonal carries the
//! characteristic-polynomial ratios, and a non-symmetric eigensolver.

mod eigen;
mod lu;

pub use eigen::{eigenvalues, EigenResult, MAX_EIGEN_DIM};
pub use lu::{lu_c_diagonal, LuResult};

use num_complex::Complex64;

/// Dense square complex matrix, row major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        CMatrix {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zeros(n);
        for i in 0..n {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        CMatrix { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.n + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [Complex64] {
        &mut self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Simultaneous row/column permutation: out[i][j] = self[perm[i]][perm[j]].
    /// A similarity transform, so the spectrum and all leading-minor ratios
    /// of the permuted matrix follow the new ordering.
    pub fn permuted(&self, perm: &[usize]) -> CMatrix {
        assert_eq!(perm.len(), self.n);
        CMatrix::from_fn(self.n, |i, j| self.get(perm[i], perm[j]))
    }

    /// Plain matrix product, O(n³); used in tests and residual checks.
    pub fn matmul(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for p in 0..n {
                let a = self.get(i, p);
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                let rrow = rhs.row(p);
                let orow = out.row_mut(i);
                for j in 0..n {
                    orow[j] += a * rrow[j];
                }
            }
        }
        out
    }
}

/// Brute-force determinant by Laplace cofactor expansion along the first
/// rows, O(n!). A test oracle independent of any elimination order; only
/// sensible for n ≤ 9.
#[doc(hidden)]
pub fn cofactor_det(m: &CMatrix) -> Complex64 {
    fn expand(m: &CMatrix, row: usize, mask: u32) -> Complex64 {
        let n = m.dim();
        if row == n {
            return Complex64::new(1.0, 0.0);
        }
        let mut acc = Complex64::new(0.0, 0.0);
        let mut sign = 1.0;
        for j in 0..n {
            if mask & (1 << j) != 0 {
                continue;
            }
            let a = m.get(row, j);
            if a.norm_sqr() != 0.0 {
                acc += sign * a * expand(m, row + 1, mask | (1 << j));
            }
            sign = -sign;
        }
        acc
    }
    assert!(m.dim() <= 9, "cofactor oracle is factorial-time");
    expand(m, 0, 0)
}

/// Determinant by Gaussian elimination with partial pivoting. Returns zero
/// for an exactly singular matrix. Independent of the unpivoted route in
/// [`lu_c_diagonal`], which it cross-checks.
pub fn determinant(m: &CMatrix) -> Complex64 {
    let n = m.dim();
    if n == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let mut a = m.clone();
    let mut det = Complex64::new(1.0, 0.0);
    for c in 0..n {
        let mut piv = c;
        let mut best = a.get(c, c).norm();
        for r in c + 1..n {
            let v = a.get(r, c).norm();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if best == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if piv != c {
            for j in 0..n {
                let t = a.get(c, j);
                a.set(c, j, a.get(piv, j));
                a.set(piv, j, t);
            }
            det = -det;
        }
        let pivot = a.get(c, c);
        det *= pivot;
        for r in c + 1..n {
            let factor = a.get(r, c) / pivot;
            if factor.norm_sqr() == 0.0 {
                continue;
            }
            for j in c + 1..n {
                let v = a.get(r, j) - factor * a.get(c, j);
                a.set(r, j, v);
            }
        }
    }
    det
}
