//! Unpivoted upper-lower triangular factorization M·B = C with B unit upper
//! triangular and C lower triangular.
//!
//! Equivalently M = C·B⁻¹ is a Crout factorization, so the diagonal of C is
//! the sequence of leading-principal-minor ratios C_jj = det M_{j+1}/det M_j.
//! Pivoting is deliberately absent: the row ordering encodes which nested
//! subsystem each diagonal entry refers to, and a vanishing pivot is a
//! signal (the shift sits on a leading submatrix's spectrum), not a defect
//! to repair.

use super::CMatrix;
use crate::{Error, Result};
use num_complex::Complex64;

/// Relative threshold under which a leading pivot counts as vanished.
pub const PIVOT_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct LuResult {
    /// Diagonal of the lower-triangular factor; its product is det M.
    pub c_diag: Vec<Complex64>,
}

/// Crout elimination without pivoting. Errors with [`Error::PivotFailure`]
/// when a pivot falls below `PIVOT_TOL` times the largest entry of M.
pub fn lu_c_diagonal(m: &CMatrix) -> Result<LuResult> {
    let n = m.dim();
    let scale = m.max_abs();
    let tol = PIVOT_TOL * scale;
    // Working copy holds L at and below the diagonal, U strictly above.
    let mut w = m.clone();
    let mut c_diag = Vec::with_capacity(n);
    for j in 0..n {
        for i in j..n {
            let mut acc = w.get(i, j);
            for p in 0..j {
                acc -= w.get(i, p) * w.get(p, j);
            }
            w.set(i, j, acc);
        }
        let pivot = w.get(j, j);
        if pivot.norm() <= tol {
            return Err(Error::PivotFailure {
                index: j,
                magnitude: pivot.norm(),
            });
        }
        c_diag.push(pivot);
        for col in j + 1..n {
            let mut acc = w.get(j, col);
            for p in 0..j {
                acc -= w.get(j, p) * w.get(p, col);
            }
            w.set(j, col, acc / pivot);
        }
    }
    Ok(LuResult { c_diag })
}
