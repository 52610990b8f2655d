//! Reduced covariance matrices over the two intervals: the plain Hermitian
//! matrix and its partial-transpose deformation.
//!
//! The deformation multiplies the negated kernel by block phases
//! {1 on A×A, −1 on B×B, i on the cross blocks}, which is the fermionic
//! analogue of transposing one subsystem. Rows and columns are ordered
//! B sites ascending, then A sites ascending.

use crate::lattice::{covariance_entry, FermiState, Geometry};
use crate::linalg::CMatrix;
use num_complex::Complex64;

/// A reduced covariance matrix tied to its geometry and state.
#[derive(Clone, Debug)]
pub struct CovMatrix {
    pub mat: CMatrix,
    pub geometry: Geometry,
    pub state: FermiState,
    pub deformed: bool,
}

impl CovMatrix {
    pub fn dim(&self) -> usize {
        self.geometry.dim()
    }
}

/// Kernel values f_d for every distance appearing in the geometry, computed
/// once so equal distances share bitwise-equal entries.
fn kernel_table(geom: &Geometry, state: &FermiState) -> Vec<f64> {
    let max_d = geom.ell(3, 0) as usize;
    (0..=max_d as i64)
        .map(|d| covariance_entry(d, state))
        .collect()
}

/// Plain (undeformed) reduced covariance matrix: entries f_{i−j} over A∪B.
/// Real symmetric; `deformed` is false.
pub fn build_plain(geom: &Geometry, state: &FermiState) -> CovMatrix {
    let f = kernel_table(geom, state);
    let n = geom.dim();
    let mat = CMatrix::from_fn(n, |r, c| {
        let d = (geom.site_of_row(r) - geom.site_of_row(c)).unsigned_abs() as usize;
        Complex64::new(f[d], 0.0)
    });
    CovMatrix {
        mat,
        geometry: *geom,
        state: *state,
        deformed: false,
    }
}

/// Partial-transpose deformation: entry (r, c) is −f_{d} times
/// 1 on A×A, −1 on B×B and i on the cross blocks.
pub fn build_deformed(geom: &Geometry, state: &FermiState) -> CovMatrix {
    let f = kernel_table(geom, state);
    let n = geom.dim();
    let mat = CMatrix::from_fn(n, |r, c| {
        let d = (geom.site_of_row(r) - geom.site_of_row(c)).unsigned_abs() as usize;
        let base = -f[d];
        match (geom.row_in_a(r), geom.row_in_a(c)) {
            (true, true) => Complex64::new(base, 0.0),
            (false, false) => Complex64::new(-base, 0.0),
            _ => Complex64::new(0.0, base),
        }
    });
    CovMatrix {
        mat,
        geometry: *geom,
        state: *state,
        deformed: true,
    }
}

/// Matrix λ·1 + f̃ whose determinant is the characteristic polynomial of the
/// deformed spectrum.
pub fn shifted_deformed(geom: &Geometry, state: &FermiState, lambda: Complex64) -> CMatrix {
    let cov = build_deformed(geom, state);
    let n = cov.mat.dim();
    CMatrix::from_fn(n, |r, c| {
        let v = cov.mat.get(r, c);
        if r == c {
            v + lambda
        } else {
            v
        }
    })
}
