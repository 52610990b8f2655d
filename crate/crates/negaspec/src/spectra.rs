//! Exact-side post-processing: eigenvalue classification, the entanglement
//! spectrum, logarithmic negativity, characteristic polynomials and the
//! determinant-ratio diagonal entries.

use crate::deform::{shifted_deformed, CovMatrix};
use crate::lattice::{FermiState, Geometry};
use crate::linalg::{determinant, eigenvalues, lu_c_diagonal, CMatrix};
use crate::{Error, Result};
use num_complex::Complex64;

/// Relative (to ‖M‖) imaginary-part threshold below which an eigenvalue is
/// classified as real. The asymptotic imaginary parts are O(1/log N), far
/// above this floor at any feasible size.
pub const REAL_IM_THRESHOLD: f64 = 1e-6;

/// Absolute tolerance for recognizing a conjugate partner.
pub const PAIR_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairClass {
    Real,
    /// Member of a conjugate pair; carries the partner's index.
    PairMember(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumSource {
    Exact,
    RhPrediction,
}

/// The eigenvalue multiset of one covariance matrix with provenance and
/// conjugate-pair classification.
#[derive(Debug, Clone)]
pub struct SpectrumResult {
    pub lambdas: Vec<Complex64>,
    pub classes: Vec<PairClass>,
    pub residual: f64,
    /// Absolute imaginary-part cut actually used (threshold × ‖M‖).
    pub im_cut: f64,
    pub source: SpectrumSource,
    pub geometry: Geometry,
    pub state: FermiState,
    /// Violations of expected structure (range bound, orphan pairs); these
    /// are surfaced rather than silently repaired.
    pub warnings: Vec<String>,
}

impl SpectrumResult {
    pub fn n_pairs(&self) -> usize {
        self.classes
            .iter()
            .filter(|c| matches!(c, PairClass::PairMember(_)))
            .count()
            / 2
    }

    pub fn has_complex_pairs(&self) -> bool {
        self.n_pairs() > 0
    }
}

/// Diagonalize an exact covariance matrix and classify its spectrum with
/// the default real/pair threshold.
pub fn exact_spectrum(cov: &CovMatrix) -> Result<SpectrumResult> {
    exact_spectrum_with_threshold(cov, REAL_IM_THRESHOLD)
}

/// As [`exact_spectrum`], with the relative imaginary-part threshold under
/// the caller's control; the absolute cut used is reported in the result.
pub fn exact_spectrum_with_threshold(
    cov: &CovMatrix,
    real_im_threshold: f64,
) -> Result<SpectrumResult> {
    let eig = eigenvalues(&cov.mat)?;
    let scale = cov.mat.frobenius_norm().max(f64::MIN_POSITIVE);
    let im_cut = real_im_threshold * scale;
    let lambdas = eig.values;
    let mut classes = vec![PairClass::Real; lambdas.len()];
    let mut warnings = Vec::new();

    // Pair complex eigenvalues with their nearest conjugates.
    let mut open: Vec<usize> = (0..lambdas.len())
        .filter(|&i| lambdas[i].im.abs() > im_cut)
        .collect();
    while let Some(i) = open.pop() {
        let target = lambdas[i].conj();
        let mut best = f64::INFINITY;
        let mut best_pos = None;
        for (pos, &j) in open.iter().enumerate() {
            let d = (lambdas[j] - target).norm();
            if d < best {
                best = d;
                best_pos = Some(pos);
            }
        }
        match best_pos {
            Some(pos) if best <= PAIR_TOL => {
                let j = open.remove(pos);
                classes[i] = PairClass::PairMember(j);
                classes[j] = PairClass::PairMember(i);
            }
            _ => {
                warnings.push(format!(
                    "eigenvalue {} has imaginary part above the cut but no conjugate partner",
                    lambdas[i]
                ));
            }
        }
    }

    for l in &lambdas {
        if l.re.abs() > 1.0 + 1e-6 {
            warnings.push(format!("eigenvalue {l} outside the closed unit interval"));
        }
    }

    Ok(SpectrumResult {
        lambdas,
        classes,
        residual: eig.residual,
        im_cut,
        source: SpectrumSource::Exact,
        geometry: cov.geometry,
        state: cov.state,
        warnings,
    })
}

/// Entanglement-spectrum map: each λ yields the pair (ν, 1−ν) with
/// ν = (1+λ)/2.
pub fn entanglement_spectrum(lambdas: &[Complex64]) -> Vec<(Complex64, Complex64)> {
    lambdas
        .iter()
        .map(|&l| {
            let nu = (Complex64::new(1.0, 0.0) + l) * 0.5;
            (nu, Complex64::new(1.0, 0.0) - nu)
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct NegativityValue {
    pub value: f64,
    pub per_eigenvalue_terms: Vec<f64>,
}

/// Logarithmic negativity E = Σ log(|1+λ|/2 + |1−λ|/2). Each term vanishes
/// identically for real λ in [−1, 1].
pub fn logarithmic_negativity(lambdas: &[Complex64]) -> NegativityValue {
    let one = Complex64::new(1.0, 0.0);
    let per_eigenvalue_terms: Vec<f64> = lambdas
        .iter()
        .map(|&l| (((one + l).norm() + (one - l).norm()) * 0.5).ln())
        .collect();
    NegativityValue {
        value: per_eigenvalue_terms.iter().sum(),
        per_eigenvalue_terms,
    }
}

/// Characteristic polynomial D(λ) = det(λ·1 + f̃) of the deformed matrix,
/// by pivoted elimination.
pub fn characteristic_poly(
    geom: &Geometry,
    state: &FermiState,
    lambda: Complex64,
) -> Complex64 {
    determinant(&shifted_deformed(geom, state, lambda))
}

/// The two determinant-ratio diagonal entries at shift λ.
#[derive(Debug, Clone, Copy)]
pub struct ChiRatios {
    /// D_{k,l}/D_{k−1,l}: trailing pivot when interval A's inner end comes last.
    pub chi_1plus: Complex64,
    /// D_{k,l}/D_{k,l−1}: trailing pivot when interval B's outer end comes last.
    pub chi_2plus: Complex64,
}

const CHI_CROSS_CHECK_TOL: f64 = 1e-6;

/// Row orderings under which the trailing unpivoted pivot equals each ratio.
/// Both descend within blocks so that the last row is the site whose removal
/// shrinks the corresponding interval while keeping all other distances.
fn chi_orderings(geom: &Geometry) -> (Vec<usize>, Vec<usize>) {
    let nb = geom.l + 1;
    let na = geom.k + 1;
    let b_desc = (0..nb).rev();
    let a_desc = (nb..nb + na).rev();
    // χ1+: B block then A block, last row = A's gap-side end.
    let order1: Vec<usize> = b_desc.clone().chain(a_desc.clone()).collect();
    // χ2+: A block then B block, last row = B's outer end (site 0).
    let order2: Vec<usize> = a_desc.chain(b_desc).collect();
    (order1, order2)
}

/// Compute both χ ratios two independent ways — trailing unpivoted pivot
/// and quotient of pivoted determinants — and insist they agree.
pub fn chi_ratios(geom: &Geometry, state: &FermiState, lambda: Complex64) -> Result<ChiRatios> {
    let shifted = shifted_deformed(geom, state, lambda);
    let n = shifted.dim();
    let (order1, order2) = chi_orderings(geom);

    let mut out = [Complex64::new(0.0, 0.0); 2];
    for (slot, order) in [(0usize, &order1), (1usize, &order2)] {
        let perm = shifted.permuted(order);
        let lu = lu_c_diagonal(&perm)?;
        let pivot = lu.c_diag[n - 1];

        let full = determinant(&perm);
        let minor = determinant(&CMatrix::from_fn(n - 1, |i, j| perm.get(i, j)));
        if minor.norm() == 0.0 {
            return Err(Error::PivotFailure {
                index: n - 1,
                magnitude: 0.0,
            });
        }
        let ratio = full / minor;
        if (pivot - ratio).norm() > CHI_CROSS_CHECK_TOL * ratio.norm().max(1e-300) {
            return Err(Error::Inconsistent(format!(
                "chi route mismatch at λ={lambda}: pivot {pivot} vs determinant ratio {ratio}"
            )));
        }
        out[slot] = pivot;
    }
    Ok(ChiRatios {
        chi_1plus: out[0],
        chi_2plus: out[1],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deform::{build_deformed, build_plain};
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn entanglement_spectrum_map() {
        let pairs = entanglement_spectrum(&[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 2.0 / PI)]);
        assert!((pairs[0].0 - c(0.5, 0.0)).norm() < 1e-16);
        assert!((pairs[0].1 - c(0.5, 0.0)).norm() < 1e-16);
        assert!((pairs[1].0 - c(1.0, 0.0)).norm() < 1e-16);
        assert!((pairs[1].1 - c(0.0, 0.0)).norm() < 1e-16);
        assert!((pairs[2].0 - c(0.5, 1.0 / PI)).norm() < 1e-16);
        assert!((pairs[2].1 - c(0.5, -1.0 / PI)).norm() < 1e-16);
    }

    #[test]
    fn negativity_vanishes_for_real_spectrum_in_range() {
        let lambdas: Vec<Complex64> = (-10..=10).map(|i| c(i as f64 / 10.0, 0.0)).collect();
        let neg = logarithmic_negativity(&lambdas);
        assert!(neg.value.abs() < 1e-14);
        for t in &neg.per_eigenvalue_terms {
            assert!(*t >= -1e-12);
        }
    }

    #[test]
    fn negativity_of_conjugate_pair() {
        let a = 2.0 / PI;
        let neg = logarithmic_negativity(&[c(0.0, a), c(0.0, -a)]);
        let expect = (1.0 + a * a).ln();
        assert!((neg.value - expect).abs() < 1e-14);
        assert!((expect - 0.340_239_940_309_816_8).abs() < 1e-15);
    }

    #[test]
    fn negativity_of_out_of_range_real_value() {
        let neg = logarithmic_negativity(&[c(1.5, 0.0)]);
        assert!((neg.value - 1.5f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn two_site_end_to_end() {
        let geom = Geometry::new(0, 0, 1).unwrap();
        let state = FermiState::half_filling();
        let spec = exact_spectrum(&build_deformed(&geom, &state)).unwrap();
        let expect = 2.0 / PI;
        let mut ims: Vec<f64> = spec.lambdas.iter().map(|l| l.im).collect();
        ims.sort_by(f64::total_cmp);
        assert!((ims[0] + expect).abs() < 1e-12);
        assert!((ims[1] - expect).abs() < 1e-12);
        assert!(spec.lambdas.iter().all(|l| l.re.abs() < 1e-12));
        assert_eq!(spec.n_pairs(), 1);
        let neg = logarithmic_negativity(&spec.lambdas);
        assert!((neg.value - (1.0 + 4.0 / (PI * PI)).ln()).abs() < 1e-10);
    }

    #[test]
    fn plain_spectrum_is_real_with_zero_negativity() {
        for (k, l, gap, p, q) in [(6, 4, 3, 1u64, 2u64), (5, 5, 1, 1, 3), (3, 7, 9, 2, 5)] {
            let geom = Geometry::new(k, l, gap).unwrap();
            let state = FermiState::new(p, q).unwrap();
            let spec = exact_spectrum(&build_plain(&geom, &state)).unwrap();
            assert_eq!(spec.n_pairs(), 0);
            for lam in &spec.lambdas {
                assert!(lam.im.abs() < 1e-10);
                assert!(lam.re.abs() <= 1.0 + 1e-10);
            }
            assert!(logarithmic_negativity(&spec.lambdas).value.abs() < 1e-10);
        }
    }

    #[test]
    fn nu_multiset_self_complementary() {
        // The full {ν} multiset (both members per λ) equals {1−ν}.
        let geom = Geometry::new(2, 3, 2).unwrap();
        let state = FermiState::new(1, 3).unwrap();
        let spec = exact_spectrum(&build_deformed(&geom, &state)).unwrap();
        let pairs = entanglement_spectrum(&spec.lambdas);
        let all: Vec<Complex64> = pairs.iter().flat_map(|p| [p.0, p.1]).collect();
        let complement: Vec<Complex64> = all.iter().map(|nu| c(1.0, 0.0) - nu).collect();
        let mut used = vec![false; complement.len()];
        for nu in &all {
            let (i, d) = complement
                .iter()
                .enumerate()
                .filter(|(i, _)| !used[*i])
                .map(|(i, x)| (i, (nu - x).norm()))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap();
            used[i] = true;
            assert!(d < 1e-9, "ν={nu} unmatched, nearest complement at {d}");
        }
    }

    #[test]
    fn characteristic_poly_two_site_values() {
        let geom = Geometry::new(0, 0, 1).unwrap();
        let state = FermiState::half_filling();
        // λ = 0: det f̃ = 4/π²
        let d0 = characteristic_poly(&geom, &state, c(0.0, 0.0));
        assert!((d0 - c(4.0 / (PI * PI), 0.0)).norm() < 1e-14);
        // large λ: D/λ^dim → 1
        let big = c(1e6, 0.0);
        let d = characteristic_poly(&geom, &state, big);
        assert!((d / (big * big) - c(1.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn characteristic_poly_matches_eigenvalue_product() {
        let geom = Geometry::new(4, 3, 2).unwrap();
        let state = FermiState::new(2, 5).unwrap();
        let spec = exact_spectrum(&build_deformed(&geom, &state)).unwrap();
        for probe in [c(0.3, 0.9), c(-1.2, 0.4), c(2.0, -0.1)] {
            let d = characteristic_poly(&geom, &state, probe);
            let prod: Complex64 = spec.lambdas.iter().map(|&l| probe + l).product();
            assert!(
                (d - prod).norm() <= 1e-6 * prod.norm(),
                "λ={probe}: det={d} prod={prod}"
            );
        }
    }

    #[test]
    fn chi_two_site_example() {
        let geom = Geometry::new(0, 0, 1).unwrap();
        let state = FermiState::half_filling();
        let chis = chi_ratios(&geom, &state, c(1.0, 0.0)).unwrap();
        let expect = c(1.0 + 4.0 / (PI * PI), 0.0);
        assert!((chis.chi_2plus - expect).norm() < 1e-13);
        // for k=l=0 the two orderings coincide up to the inert leading row
        assert!((chis.chi_1plus - expect).norm() < 1e-13);
    }

    #[test]
    fn chi_telescoping_against_smaller_geometry() {
        // χ1+ relates (k,l,gap) to (k−1, l, gap+1): trimming A's inner site.
        let state = FermiState::new(1, 3).unwrap();
        let geom = Geometry::new(3, 4, 2).unwrap();
        let sub = Geometry::new(2, 4, 3).unwrap();
        let lam = c(0.7, 1.1);
        let chis = chi_ratios(&geom, &state, lam).unwrap();
        let d_full = characteristic_poly(&geom, &state, lam);
        let d_sub = characteristic_poly(&sub, &state, lam);
        assert!(
            (chis.chi_1plus * d_sub - d_full).norm() <= 1e-8 * d_full.norm(),
            "telescoping failed: χ1+·D_sub = {} vs D = {}",
            chis.chi_1plus * d_sub,
            d_full
        );
        // χ2+ relates (k,l,gap) to (k, l−1, gap): trimming B's outer site.
        let sub2 = Geometry::new(3, 3, 2).unwrap();
        let d_sub2 = characteristic_poly(&sub2, &state, lam);
        assert!(
            (chis.chi_2plus * d_sub2 - d_full).norm() <= 1e-8 * d_full.norm(),
            "telescoping failed for χ2+"
        );
    }

    #[test]
    fn chi_single_site_system() {
        // one-site A and B, huge gap: pivots are just λ + diagonal entries
        let geom = Geometry::new(0, 0, 7).unwrap();
        let state = FermiState::new(1, 4).unwrap();
        let lam = c(2.0, 0.3);
        let chis = chi_ratios(&geom, &state, lam).unwrap();
        let cov = build_deformed(&geom, &state);
        // diagonal of the deformed matrix: −f_0 on A, +f_0 on B
        let da = lam + cov.mat.get(1, 1);
        let db = lam + cov.mat.get(0, 0);
        // gap 7 at quarter filling leaves a nonzero cross coupling; compare
        // against the 2x2 ratio instead of the bare diagonal
        let full = characteristic_poly(&geom, &state, lam);
        assert!((chis.chi_1plus - full / db).norm() < 1e-10 * chis.chi_1plus.norm());
        assert!((chis.chi_2plus - full / da).norm() < 1e-10 * chis.chi_2plus.norm());
    }
}
