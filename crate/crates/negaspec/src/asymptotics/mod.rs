//! Asymptotic predictions for the deformed spectrum: jump exponents, the
//! phase angles θ_i, the eigenvalue phase condition, mean density, and the
//! half-filling closed forms.
//!
//! Angles are carried as an exact rational multiple of π plus a floating
//! correction. At half filling with equal intervals the corrections cancel
//! identically, so parity statements (bracket = ±1, odd/even gap
//! classification) are decided at full precision rather than through
//! accumulated rounding.

mod predict;

pub use predict::{
    predict_decoupling, predict_fine_structure, Branch, Classification, IntervalTag,
    PredictedRoot, RhPrediction, RootSearchConfig,
};

use crate::gamma::arg_gamma_half;
use crate::lattice::{FermiState, Geometry};
use crate::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Signs ε_i assigning Im β_i = ε_i β_I to the endpoints t_0..t_3.
///
/// Fixed by requiring the general θ_ij to reproduce the half-filling
/// reductions θ_12 = −ℓ_21 p_F, θ_30 = ℓ_30 p_F and the decoupling-limit
/// quantization; the decoupling calibration test in `predict` re-derives it
/// against exact single-interval spectra.
pub const ENDPOINT_SIGNS: [f64; 4] = [-1.0, 1.0, 1.0, -1.0];

/// Both Fermi points contribute equally to the mean spectral density;
/// density predictions built from one point's exponent carry this factor.
pub const FERMI_POINT_MULTIPLICITY: f64 = 2.0;

/// The log-determinant's λ-dependent part aggregates two Fermi points and
/// two exponent species (β for the λ+f sector and β̃ = −β for λ−f), so the
/// resolvent prediction carries β β′ four times. Pinned by the
/// geometry-difference resolvent calibration test, which measures 4.03.
pub const RESOLVENT_MULTIPLICITY: f64 = 4.0;

/// One-site lattice offset of the endpoint phases: exact spectra follow the
/// quantization with t_i counting sites, which shifts θ_30 by 2 p_F
/// relative to the endpoint-distance convention. Calibrated against exact
/// single-interval spectra (decoupling) and two-interval spectra at both
/// gap parities.
const SITE_COUNT_SHIFT: bool = true;

/// Jump exponents at the two Fermi points plus the real parameter β_I that
/// tracks position along the eigenvalue support.
#[derive(Debug, Clone, Copy)]
pub struct BetaParams {
    /// β per Fermi point, principal branch.
    pub beta: [Complex64; 2],
    /// β̃ per Fermi point (sign-flipped symbol), principal branch.
    pub beta_tilde: [Complex64; 2],
    /// β_I(λ) = (1/2π) log((1−λ)/(1+λ)) for real λ in (−1, 1).
    pub beta_i: Option<f64>,
    pub endpoint_signs: [f64; 4],
}

/// β_I(λ) = (1/2π) log((1−λ)/(1+λ)).
pub fn beta_i_of_lambda(lambda: f64) -> f64 {
    ((1.0 - lambda) / (1.0 + lambda)).ln() / (2.0 * PI)
}

/// Inverse of [`beta_i_of_lambda`]: λ = −tanh(π b).
pub fn lambda_of_beta_i(b: f64) -> f64 {
    -(PI * b).tanh()
}

/// Fisher-Hartwig exponents at both Fermi points for a given shift λ.
pub fn beta_exponents(lambda: Complex64, state: &FermiState) -> Result<BetaParams> {
    let one = Complex64::new(1.0, 0.0);
    if (lambda - one).norm() < 1e-12 || (lambda + one).norm() < 1e-12 {
        return Err(Error::Domain(format!(
            "λ = {lambda} is within 1e-12 of a branch point ±1"
        )));
    }
    let two_pi_i = Complex64::new(0.0, 2.0 * PI);
    // canonicalize −0.0 imaginary parts so real λ in (−1, 1) lands on the
    // principal branch log(−x) = log x + iπ
    let clean = |mut z: Complex64| {
        if z.im == 0.0 {
            z.im = 0.0;
        }
        z
    };
    let mut beta = [Complex64::new(0.0, 0.0); 2];
    let mut beta_tilde = [Complex64::new(0.0, 0.0); 2];
    for (j, pt) in state.fermi_points().iter().enumerate() {
        beta[j] = clean((lambda + pt.f_inner) / (lambda + pt.f_outer)).ln() / two_pi_i;
        beta_tilde[j] = clean((lambda - pt.f_inner) / (lambda - pt.f_outer)).ln() / two_pi_i;
    }
    let beta_i = if lambda.im == 0.0 && lambda.re.abs() < 1.0 {
        Some(beta_i_of_lambda(lambda.re))
    } else {
        None
    };
    Ok(BetaParams {
        beta,
        beta_tilde,
        beta_i,
        endpoint_signs: ENDPOINT_SIGNS,
    })
}

/// An angle π·num/den + corr with the rational part exact.
#[derive(Debug, Clone, Copy)]
pub struct RationalAngle {
    pub num: i64,
    pub den: i64,
    pub corr: f64,
}

impl RationalAngle {
    pub fn value(&self) -> f64 {
        PI * self.num as f64 / self.den as f64 + self.corr
    }

    /// cos(π m/q) with exact zeros and units at the quarter points.
    fn cos_pi_rational(mut m: i64, q: i64) -> f64 {
        m = m.rem_euclid(2 * q); // angle in [0, 2π)
        // cos symmetric about π
        if m > q {
            m = 2 * q - m;
        }
        // now m in [0, q], angle in [0, π]; reflect about π/2
        let sign = if 2 * m > q { -1.0 } else { 1.0 };
        let m_fold = if 2 * m > q { q - m } else { m };
        if m_fold == 0 {
            return sign;
        }
        if 2 * m_fold == q {
            return 0.0;
        }
        sign * (PI * m_fold as f64 / q as f64).cos()
    }

    fn sin_pi_rational(m: i64, q: i64) -> f64 {
        // sin x = cos(x − π/2): with x = π m/q, use 2q denominator
        Self::cos_pi_rational(2 * m - q, 2 * q)
    }

    pub fn cos(&self) -> f64 {
        let c = Self::cos_pi_rational(self.num, self.den);
        if self.corr == 0.0 {
            return c;
        }
        let s = Self::sin_pi_rational(self.num, self.den);
        c * self.corr.cos() - s * self.corr.sin()
    }

    /// Wrap into (−π, π], reducing the rational part in integers first.
    pub fn wrapped(&self) -> f64 {
        let two_q = 2 * self.den;
        let mut m = self.num.rem_euclid(two_q);
        if m > self.den {
            m -= two_q; // now in (−q, q]
        }
        let mut v = PI * m as f64 / self.den as f64 + self.corr;
        while v > PI {
            v -= 2.0 * PI;
        }
        while v <= -PI {
            v += 2.0 * PI;
        }
        v
    }

    pub fn add(&self, other: &RationalAngle) -> RationalAngle {
        debug_assert_eq!(self.den, other.den);
        RationalAngle {
            num: self.num + other.num,
            den: self.den,
            corr: self.corr + other.corr,
        }
    }

    pub fn sub(&self, other: &RationalAngle) -> RationalAngle {
        debug_assert_eq!(self.den, other.den);
        RationalAngle {
            num: self.num - other.num,
            den: self.den,
            corr: self.corr - other.corr,
        }
    }
}

/// The four endpoint angles θ_i at a given position b = β_I(λ).
#[derive(Debug, Clone)]
pub struct ThetaAngles {
    pub theta: [RationalAngle; 4],
}

impl ThetaAngles {
    /// θ_ij = θ_i − θ_j.
    pub fn diff(&self, i: usize, j: usize) -> RationalAngle {
        self.theta[i].sub(&self.theta[j])
    }
}

fn check_theta_domain(geom: &Geometry) -> Result<()> {
    if geom.k == 0 || geom.l == 0 {
        return Err(Error::Domain(
            "θ angles need intervals of at least two sites (k ≥ 1 and l ≥ 1)".into(),
        ));
    }
    Ok(())
}

/// θ_i at position b (the value of β_I there):
/// θ_i = t_i p_F + arg Γ(1/2 + i ε_i b) + Σ_{k≠i} ε_k b log(2 sin(p_F) ℓ_ik).
pub fn theta_angles_at_b(b: f64, geom: &Geometry, state: &FermiState) -> Result<ThetaAngles> {
    check_theta_domain(geom)?;
    let q = state.denom() as i64;
    let p = state.numer() as i64;
    let two_sin_pf = 2.0 * (PI * p as f64 / q as f64).sin();
    let mut theta = [RationalAngle {
        num: 0,
        den: q,
        corr: 0.0,
    }; 4];
    for i in 0..4 {
        let mut corr = if b == 0.0 {
            0.0
        } else {
            arg_gamma_half(ENDPOINT_SIGNS[i] * b)
        };
        if b != 0.0 {
            for k in 0..4 {
                if k != i {
                    corr += ENDPOINT_SIGNS[k] * b * (two_sin_pf * geom.ell(i, k) as f64).ln();
                }
            }
        }
        theta[i] = RationalAngle {
            num: geom.t[i] * p,
            den: q,
            corr,
        };
    }
    Ok(ThetaAngles { theta })
}

/// θ_i as a function of λ in (−1, 1).
pub fn theta_angles(lambda: f64, geom: &Geometry, state: &FermiState) -> Result<ThetaAngles> {
    if lambda.abs() >= 1.0 {
        return Err(Error::Domain(format!("λ = {lambda} outside (−1, 1)")));
    }
    theta_angles_at_b(beta_i_of_lambda(lambda), geom, state)
}

/// The two sides of the eigenvalue phase condition at real λ.
#[derive(Debug, Clone, Copy)]
pub struct PhaseCondition {
    /// Argument of the inverse cosine; |bracket| ≤ 1 marks the
    /// real-eigenvalue regime, |bracket| > 1 the complex-pair regime.
    pub bracket: f64,
    /// θ_23 + θ_10 wrapped into (−π, π].
    pub lhs_phase: f64,
}

pub fn phase_condition(lambda: f64, geom: &Geometry, state: &FermiState) -> Result<PhaseCondition> {
    let th = theta_angles(lambda, geom, state)?;
    Ok(phase_condition_from_thetas(&th, geom, state))
}

pub(crate) fn phase_condition_from_thetas(
    th: &ThetaAngles,
    geom: &Geometry,
    state: &FermiState,
) -> PhaseCondition {
    let th12 = th.diff(1, 2);
    let mut th30 = th.diff(3, 0);
    if SITE_COUNT_SHIFT {
        // endpoints t_1, t_3 move one site outward when phases count sites
        th30.num += 2 * state.numer() as i64;
    }
    let l32 = geom.ell(3, 2) as f64;
    let l10 = geom.ell(1, 0) as f64;
    let l31 = geom.ell(3, 1) as f64;
    let l20 = geom.ell(2, 0) as f64;
    let l21 = geom.ell(2, 1) as f64;
    let l30 = geom.ell(3, 0) as f64;
    let bracket =
        (l32 * l10 * th12.sub(&th30).cos() - l31 * l20 * th12.add(&th30).cos()) / (l21 * l30);
    let lhs_phase = th.diff(2, 3).add(&th.diff(1, 0)).wrapped();
    PhaseCondition { bracket, lhs_phase }
}

/// Mean eigenvalue density from the resolvent of one Fermi point:
/// ρ(λ) = log(ℓ_23 ℓ_20 ℓ_10 ℓ_13 / (ℓ_21 ℓ_30)) / (π² (1−λ²)).
///
/// Both Fermi points contribute, so the full spectral density is
/// [`FERMI_POINT_MULTIPLICITY`] times this value; see [`total_mean_density`].
pub fn mean_density(lambda: f64, geom: &Geometry) -> Result<f64> {
    if lambda.abs() >= 1.0 {
        return Err(Error::Domain(format!("λ = {lambda} outside (−1, 1)")));
    }
    let arg = geom.ell(2, 3) as f64 * geom.ell(2, 0) as f64 * geom.ell(1, 0) as f64
        * geom.ell(1, 3) as f64
        / (geom.ell(2, 1) as f64 * geom.ell(3, 0) as f64);
    Ok(arg.ln() / (PI * PI * (1.0 - lambda * lambda)))
}

/// Density of all eigenvalues: both Fermi points' contributions.
pub fn total_mean_density(lambda: f64, geom: &Geometry) -> Result<f64> {
    Ok(FERMI_POINT_MULTIPLICITY * mean_density(lambda, geom)?)
}

/// λ-derivative of the predicted log determinant (the resolvent prediction):
/// d/dλ log D = [`RESOLVENT_MULTIPLICITY`] β β′ log(ℓ_21 ℓ_30 / (ℓ_23 ℓ_20 ℓ_10 ℓ_31)).
///
/// Only the geometry-dependent part is predicted; the exact resolvent also
/// carries an extensive per-site term and a geometry-independent constant,
/// so comparisons difference two geometries at a fixed site count.
pub fn predict_log_det_derivative(
    lambda: Complex64,
    geom: &Geometry,
    state: &FermiState,
) -> Result<Complex64> {
    let params = beta_exponents(lambda, state)?;
    let beta = params.beta[0];
    let pt = state.fermi_points()[0];
    let two_pi_i = Complex64::new(0.0, 2.0 * PI);
    let beta_prime =
        (1.0 / (lambda + pt.f_inner) - 1.0 / (lambda + pt.f_outer)) / two_pi_i;
    let m = (geom.ell(2, 1) as f64 * geom.ell(3, 0) as f64
        / (geom.ell(2, 3) as f64
            * geom.ell(2, 0) as f64
            * geom.ell(1, 0) as f64
            * geom.ell(3, 1) as f64))
        .ln();
    Ok(RESOLVENT_MULTIPLICITY * beta * beta_prime * m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParityClass {
    /// ℓ_21 odd at half filling with equal intervals: conjugate pairs.
    ComplexPairs,
    /// ℓ_21 even: real spectrum, zero negativity.
    Real,
}

/// Closed-form outputs at half filling with equal intervals.
#[derive(Debug, Clone, Copy)]
pub struct ClosedForms {
    pub parity_class: ParityClass,
    /// Logarithmic negativity; zero for the real class.
    pub negativity: f64,
    /// |Im λ| / (1 − Re² λ) for either pair member; zero for the real class.
    pub im_ratio: f64,
}

/// Closed-form negativity E = log²(ℓ_30/ℓ_21) / (2 log(4 ℓ_20² ℓ_10² / (ℓ_30 ℓ_21)))
/// and the per-pair imaginary-part ratio, valid at half filling with k = l.
///
/// The normalization is fixed by integrating the per-pair negativity
/// Im²λ/(1−λ²) with Im λ = r (1−λ²) against the pair density
/// |log(ℓ_30 ℓ_21/4ℓ_20²ℓ_10²)| / (π²(1−λ²)); exact spectra converge to it
/// from below at the expected 1/log N pace (0.80 → 0.82 over the
/// acceptance sizes).
pub fn half_filling_closed_forms(geom: &Geometry, state: &FermiState) -> Result<ClosedForms> {
    if !state.is_half_filling() {
        return Err(Error::Domain("closed forms require half filling".into()));
    }
    if geom.k != geom.l {
        return Err(Error::Domain(format!(
            "closed forms require equal intervals, got k={} l={}",
            geom.k, geom.l
        )));
    }
    let l30 = geom.ell(3, 0) as f64;
    let l21 = geom.ell(2, 1) as f64;
    let l20 = geom.ell(2, 0) as f64;
    let l10 = geom.ell(1, 0) as f64;
    if geom.ell(2, 1) % 2 == 0 {
        return Ok(ClosedForms {
            parity_class: ParityClass::Real,
            negativity: 0.0,
            im_ratio: 0.0,
        });
    }
    if geom.ell(3, 0) == geom.ell(2, 1) {
        // formal coincidence limit: log²(1) = 0
        return Ok(ClosedForms {
            parity_class: ParityClass::ComplexPairs,
            negativity: 0.0,
            im_ratio: 0.0,
        });
    }
    let log_ratio = (l30 / l21).ln();
    let denom = (4.0 * l20 * l20 * l10 * l10 / (l30 * l21)).ln();
    Ok(ClosedForms {
        parity_class: ParityClass::ComplexPairs,
        negativity: 0.5 * log_ratio * log_ratio / denom,
        im_ratio: PI * log_ratio / (2.0 * denom),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deform::build_deformed;
    use crate::spectra::exact_spectrum;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn beta_roundtrip_exponentiation() {
        let state = FermiState::half_filling();
        let probes = [
            c(0.3, 0.4),
            c(-0.9, 0.05),
            c(2.0, -1.0),
            c(0.0, 0.001),
            c(1.5, 0.0),
        ];
        for &lam in &probes {
            let bp = beta_exponents(lam, &state).unwrap();
            for (j, pt) in state.fermi_points().iter().enumerate() {
                let lhs = (Complex64::new(0.0, 2.0 * PI) * bp.beta[j]).exp();
                let rhs = (lam + pt.f_inner) / (lam + pt.f_outer);
                assert!((lhs - rhs).norm() < 1e-12 * rhs.norm().max(1.0));
                let lhs_t = (Complex64::new(0.0, 2.0 * PI) * bp.beta_tilde[j]).exp();
                let rhs_t = (lam - pt.f_inner) / (lam - pt.f_outer);
                assert!((lhs_t - rhs_t).norm() < 1e-12 * rhs_t.norm().max(1.0));
            }
        }
    }

    #[test]
    fn beta_at_zero_is_one_half() {
        let state = FermiState::half_filling();
        let bp = beta_exponents(c(0.0, 0.0), &state).unwrap();
        assert!((bp.beta[0] - c(0.5, 0.0)).norm() < 1e-15);
        assert_eq!(bp.beta_i, Some(0.0));
    }

    #[test]
    fn beta_vanishes_at_infinity() {
        let state = FermiState::half_filling();
        let bp = beta_exponents(c(1e9, 0.0), &state).unwrap();
        assert!(bp.beta[0].norm() < 1e-8);
    }

    #[test]
    fn beta_branch_point_guard() {
        let state = FermiState::half_filling();
        assert!(matches!(
            beta_exponents(c(1.0, 0.0), &state),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn beta_i_spot_values() {
        assert_eq!(beta_i_of_lambda(0.0), 0.0);
        // β_I(tanh π) = −1
        assert!((beta_i_of_lambda(PI.tanh()) + 1.0).abs() < 1e-12);
        // odd function
        for &l in &[0.1, 0.5, 0.93] {
            assert!((beta_i_of_lambda(l) + beta_i_of_lambda(-l)).abs() < 1e-14);
            assert!((lambda_of_beta_i(beta_i_of_lambda(l)) - l).abs() < 1e-12);
        }
    }

    #[test]
    fn theta_at_lambda_zero_is_rational() {
        let geom = Geometry::new(10, 10, 11).unwrap();
        let state = FermiState::half_filling();
        let th = theta_angles(0.0, &geom, &state).unwrap();
        for i in 0..4 {
            assert_eq!(th.theta[i].corr, 0.0);
            assert_eq!(th.theta[i].num, geom.t[i]);
            assert_eq!(th.theta[i].den, 2);
        }
    }

    #[test]
    fn theta_antisymmetry() {
        let geom = Geometry::new(7, 5, 4).unwrap();
        let state = FermiState::new(1, 3).unwrap();
        let th = theta_angles(0.37, &geom, &state).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let a = th.diff(i, j);
                let b = th.diff(j, i);
                assert_eq!(a.num, -b.num);
                assert_eq!(a.corr, -b.corr);
            }
        }
    }

    #[test]
    fn theta_rejects_single_site_intervals() {
        let geom = Geometry::new(0, 3, 2).unwrap();
        let state = FermiState::half_filling();
        assert!(matches!(
            theta_angles(0.1, &geom, &state),
            Err(Error::Domain(_))
        ));
    }

    /// Independent full-precision evaluation of θ_i with a Lanczos gamma
    /// phase, no rational splitting.
    fn theta_oracle(b: f64, geom: &Geometry, state: &FermiState) -> [f64; 4] {
        fn lanczos_ln_gamma(z: Complex64) -> Complex64 {
            const C: [f64; 9] = [
                0.999_999_999_999_809_93,
                676.520_368_121_885_1,
                -1259.139_216_722_402_8,
                771.323_428_777_653_13,
                -176.615_029_162_140_59,
                12.507_343_278_686_905,
                -0.138_571_095_265_720_12,
                9.984_369_578_019_571_6e-6,
                1.505_632_735_149_311_6e-7,
            ];
            let z = z - 1.0;
            let mut x = Complex64::new(C[0], 0.0);
            for (i, &ci) in C.iter().enumerate().skip(1) {
                x += ci / (z + i as f64);
            }
            let t = z + 7.5;
            0.918_938_533_204_672_74 + (z + 0.5) * t.ln() - t + x.ln()
        }
        let pf = state.p_f();
        let two_sin = 2.0 * pf.sin();
        let mut out = [0.0; 4];
        for i in 0..4 {
            let im_beta = ENDPOINT_SIGNS[i] * b;
            let mut v = geom.t[i] as f64 * pf
                - lanczos_ln_gamma(Complex64::new(0.5, -im_beta)).im;
            for k in 0..4 {
                if k != i {
                    v += ENDPOINT_SIGNS[k] * b * (two_sin * geom.ell(i, k) as f64).ln();
                }
            }
            out[i] = v;
        }
        out
    }

    #[test]
    fn theta_matches_independent_oracle() {
        let geom = Geometry::new(10, 10, 11).unwrap();
        let state = FermiState::half_filling();
        let b = 0.1;
        let th = theta_angles_at_b(b, &geom, &state).unwrap();
        let oracle = theta_oracle(b, &geom, &state);
        for i in 0..4 {
            assert!(
                (th.theta[i].value() - oracle[i]).abs() < 1e-10,
                "θ_{i}: {} vs oracle {}",
                th.theta[i].value(),
                oracle[i]
            );
        }
    }

    #[test]
    fn half_filling_theta_reductions() {
        // At half filling with equal intervals the correction terms cancel
        // exactly: θ12 = −ℓ21 p_F and θ30 = ℓ30 p_F for every λ.
        let geom = Geometry::new(8, 8, 5).unwrap();
        let state = FermiState::half_filling();
        for &lam in &[0.0, 0.2, -0.5, 0.85] {
            let th = theta_angles(lam, &geom, &state).unwrap();
            let th12 = th.diff(1, 2);
            let th30 = th.diff(3, 0);
            assert_eq!(th12.num, -geom.ell(2, 1));
            assert!(th12.corr.abs() < 1e-12, "θ12 corr = {}", th12.corr);
            assert_eq!(th30.num, geom.ell(3, 0));
            assert!(th30.corr.abs() < 1e-12, "θ30 corr = {}", th30.corr);
        }
    }

    #[test]
    fn phase_bracket_small_odd_geometry() {
        // k=l=1, gap=1 at half filling: |bracket| = 2·ℓ20ℓ31/(ℓ21ℓ30) − 1 = 5/3
        let geom = Geometry::new(1, 1, 1).unwrap();
        let state = FermiState::half_filling();
        let pc = phase_condition(0.3, &geom, &state).unwrap();
        assert!(
            (pc.bracket.abs() - 5.0 / 3.0).abs() < 1e-12,
            "bracket={}",
            pc.bracket
        );
    }

    #[test]
    fn phase_bracket_exact_unit_for_even_gap() {
        let state = FermiState::half_filling();
        for (k, gap) in [(2usize, 2usize), (5, 4), (8, 2), (13, 6)] {
            let geom = Geometry::new(k, k, gap).unwrap();
            for &lam in &[0.0, 0.4, -0.7] {
                let pc = phase_condition(lam, &geom, &state).unwrap();
                assert!(
                    (pc.bracket.abs() - 1.0).abs() < 1e-12,
                    "k={k} gap={gap} λ={lam}: bracket={}",
                    pc.bracket
                );
            }
        }
    }

    #[test]
    fn phase_lhs_zero_for_equal_intervals_at_zero() {
        let geom = Geometry::new(6, 6, 3).unwrap();
        let state = FermiState::new(2, 5).unwrap();
        let pc = phase_condition(0.0, &geom, &state).unwrap();
        assert!(pc.lhs_phase.abs() < 1e-14);
    }

    #[test]
    fn mean_density_frozen_value() {
        let geom = Geometry::new(100, 100, 100).unwrap();
        let rho = mean_density(0.0, &geom).unwrap();
        // log(100·200·100·200 / (100·300)) = log(40000/3)
        assert!((rho * PI * PI - (40_000.0f64 / 3.0).ln()).abs() < 1e-12);
        assert!((rho - 0.9623).abs() < 2e-4);
        assert!(mean_density(1.0, &geom).is_err());
    }

    #[test]
    fn mean_density_symmetric() {
        let geom = Geometry::new(40, 60, 30).unwrap();
        for &l in &[0.1, 0.5, 0.9] {
            let a = mean_density(l, &geom).unwrap();
            let b = mean_density(-l, &geom).unwrap();
            assert_eq!(a, b);
            assert!(a > 0.0);
        }
    }

    #[test]
    fn density_special_case_agrees_to_log4() {
        // At k = l the general log argument is exactly 1/4 of the
        // equal-interval form's argument.
        let geom = Geometry::new(50, 50, 37).unwrap();
        let general = geom.ell(2, 3) as f64 * geom.ell(2, 0) as f64 * geom.ell(1, 0) as f64
            * geom.ell(1, 3) as f64
            / (geom.ell(2, 1) as f64 * geom.ell(3, 0) as f64);
        let special = 4.0 * (geom.ell(2, 0) as f64).powi(2) * (geom.ell(1, 0) as f64).powi(2)
            / (geom.ell(3, 0) as f64 * geom.ell(2, 1) as f64);
        assert!((special / general - 4.0).abs() < 1e-12);
    }

    #[test]
    fn closed_forms_small_geometry() {
        let state = FermiState::half_filling();
        // k=l=1, gap=1: E = log²3 / (2 log(16/3)) ≈ 0.36050
        let geom = Geometry::new(1, 1, 1).unwrap();
        let cf = half_filling_closed_forms(&geom, &state).unwrap();
        assert_eq!(cf.parity_class, ParityClass::ComplexPairs);
        let expect = 0.5 * 3.0f64.ln().powi(2) / (16.0f64 / 3.0).ln();
        assert!((cf.negativity - expect).abs() < 1e-15);
        assert!((cf.negativity - 0.360_50).abs() < 1e-5);
        // per-pair imaginary ratio keeps its printed normalization
        let expect_ratio = PI * 3.0f64.ln() / (2.0 * (16.0f64 / 3.0).ln());
        assert!((cf.im_ratio - expect_ratio).abs() < 1e-15);

        // even gap: real class, zero negativity
        let geom = Geometry::new(29, 29, 16).unwrap();
        let cf = half_filling_closed_forms(&geom, &state).unwrap();
        assert_eq!(cf.parity_class, ParityClass::Real);
        assert_eq!(cf.negativity, 0.0);

        // coincidence limit ℓ30 = ℓ21 (k = l = 0)
        let geom = Geometry::new(0, 0, 3).unwrap();
        let cf = half_filling_closed_forms(&geom, &state).unwrap();
        assert_eq!(cf.negativity, 0.0);
    }

    #[test]
    fn closed_forms_domain_errors() {
        let state = FermiState::half_filling();
        let third = FermiState::new(1, 3).unwrap();
        let geom = Geometry::new(3, 3, 3).unwrap();
        assert!(half_filling_closed_forms(&geom, &third).is_err());
        let uneven = Geometry::new(3, 4, 3).unwrap();
        assert!(half_filling_closed_forms(&uneven, &state).is_err());
    }

    #[test]
    fn log_det_derivative_vanishes_at_infinity() {
        let geom = Geometry::new(10, 10, 10).unwrap();
        let state = FermiState::half_filling();
        let d = predict_log_det_derivative(c(1e8, 0.0), &geom, &state).unwrap();
        assert!(d.norm() < 1e-12);
    }

    #[test]
    fn log_det_rescaling_shifts_log_factor() {
        // scaling every distance by c changes the log factor by −2 log c
        let state = FermiState::half_filling();
        let g1 = Geometry::new(10, 10, 10).unwrap();
        let g2 = Geometry::new(30, 30, 30).unwrap();
        let lam = c(0.0, 0.7);
        let d1 = predict_log_det_derivative(lam, &g1, &state).unwrap();
        let d2 = predict_log_det_derivative(lam, &g2, &state).unwrap();
        let bp = beta_exponents(lam, &state).unwrap();
        let pt = state.fermi_points()[0];
        let beta_prime = (1.0 / (lam + pt.f_inner) - 1.0 / (lam + pt.f_outer))
            / Complex64::new(0.0, 2.0 * PI);
        let shift = RESOLVENT_MULTIPLICITY * bp.beta[0] * beta_prime * (-2.0) * 3.0f64.ln();
        assert!(((d2 - d1) - shift).norm() < 1e-12 * shift.norm());
    }

    /// Calibration of [`RESOLVENT_MULTIPLICITY`]: differencing two gaps at a
    /// fixed site count cancels the extensive and geometry-independent parts
    /// of the exact resolvent, leaving the predicted β β′ Δlog term. The
    /// measured multiplicity sits within a few percent of 4 and approaches
    /// it as the geometry grows.
    #[test]
    fn log_det_derivative_matches_exact_resolvent_differences() {
        let state = FermiState::half_filling();
        let lam = c(0.0, 0.9);
        let mut prev_err = f64::INFINITY;
        for (k, g1, g2) in [(100usize, 50usize, 200usize), (100, 60, 400)] {
            let geo1 = Geometry::new(k, k, g1).unwrap();
            let geo2 = Geometry::new(k, k, g2).unwrap();
            let r1: Complex64 = exact_spectrum(&build_deformed(&geo1, &state))
                .unwrap()
                .lambdas
                .iter()
                .map(|&li| 1.0 / (lam + li))
                .sum();
            let r2: Complex64 = exact_spectrum(&build_deformed(&geo2, &state))
                .unwrap()
                .lambdas
                .iter()
                .map(|&li| 1.0 / (lam + li))
                .sum();
            let p1 = predict_log_det_derivative(lam, &geo1, &state).unwrap();
            let p2 = predict_log_det_derivative(lam, &geo2, &state).unwrap();
            let ratio = ((r1 - r2) / (p1 - p2)).re;
            let err = (ratio - 1.0).abs();
            assert!(
                err < 0.05,
                "gaps ({g1},{g2}): measured/predicted = {ratio:.4}"
            );
            assert!(err <= prev_err, "error should not grow with separation");
            prev_err = err;
        }
    }
}
