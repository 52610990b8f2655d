//! Contour quadrature of the inner-region ray integrals
//! I_i(ζ) = ∫_0^∞ e^{−tζ} ∏_j (t + t_i − t_j)^{−γ_j−1} dt on the minus side
//! of the cut, and their large-ζ asymptote
//! Γ(−γ_i) ζ^{γ_i} ∏_{j≠i} (t_i−t_j)^{−γ_j−1} (1 − Σ_{j≠i} γ_i(γ_j+1)/((t_i−t_j)ζ) + …).
//!
//! The contour is a ray into the lower half-plane, which realizes the minus
//! determination of every factor (principal powers have arg ∈ (−π, 0) there)
//! and keeps the on-axis singular points off the path. The singular endpoint
//! is regularized by the substitution r = s^m.

use crate::asymptotics::BetaParams;
use crate::gamma::gamma;
use crate::lattice::Geometry;
use crate::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Row-to-shift assignment w = s_k for the four matrix rows.
pub const ROW_SHIFTS: [usize; 4] = [2, 0, 1, 3];

/// Exponents γ = (β̃−1+δ_{0w}, −β̃−1+δ_{1w}, β−1+δ_{2w}, −β−1+δ_{3w}).
pub fn gamma_exponents(beta: Complex64, beta_tilde: Complex64, w: usize) -> [Complex64; 4] {
    let one = Complex64::new(1.0, 0.0);
    let mut g = [
        beta_tilde - one,
        -beta_tilde - one,
        beta - one,
        -beta - one,
    ];
    g[w] += one;
    g
}

/// One ray integral: the singular index i, the endpoint coordinates, and
/// the four exponents.
#[derive(Debug, Clone, Copy)]
pub struct InnerIntegral {
    pub index: usize,
    pub t: [f64; 4],
    pub gammas: [Complex64; 4],
}

impl InnerIntegral {
    /// Build from a geometry and the jump exponents, using shift slot `w`.
    pub fn from_geometry(geom: &Geometry, betas: &BetaParams, index: usize, w: usize) -> Self {
        InnerIntegral {
            index,
            t: [
                geom.t[0] as f64,
                geom.t[1] as f64,
                geom.t[2] as f64,
                geom.t[3] as f64,
            ],
            gammas: gamma_exponents(betas.beta[0], betas.beta_tilde[0], w),
        }
    }

    fn check_admissible(&self) -> Result<()> {
        let gi = self.gammas[self.index];
        if gi.re >= -0.01 {
            return Err(Error::Domain(format!(
                "Re γ_i = {} must be negative for an integrable origin",
                gi.re
            )));
        }
        Ok(())
    }

    /// Integrand at a point z strictly inside the lower half-plane (or on
    /// the positive real axis), where principal powers realize the minus
    /// determination.
    fn integrand(&self, z: Complex64) -> Complex64 {
        let mut prod = Complex64::new(1.0, 0.0);
        for j in 0..4 {
            let base = z + (self.t[self.index] - self.t[j]);
            prod *= (-(self.gammas[j] + 1.0) * base.ln()).exp();
        }
        prod
    }
}

/// Ray angle into the lower half-plane along which e^{−ζz} still decays.
fn ray_angle(zeta: Complex64) -> Result<f64> {
    let theta = (-PI / 4.0 - 0.5 * zeta.arg()).clamp(-0.49 * PI, -0.02);
    let decay = (zeta * Complex64::from_polar(1.0, theta)).re;
    if decay <= 0.05 * zeta.norm() {
        return Err(Error::Quadrature(format!(
            "no decaying ray into the lower half-plane for ζ = {zeta}"
        )));
    }
    Ok(theta)
}

/// Gauss-Kronrod 7-15 nodes and weights.
const XGK: [f64; 8] = [
    0.991_455_371_120_813,
    0.949_107_912_342_759,
    0.864_864_423_359_769,
    0.741_531_185_599_394,
    0.586_087_235_467_691,
    0.405_845_151_377_397,
    0.207_784_955_007_898,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529,
    0.063_092_092_629_979,
    0.104_790_010_322_250,
    0.140_653_259_715_525,
    0.169_004_726_639_267,
    0.190_350_578_064_785,
    0.204_432_940_075_298,
    0.209_482_141_084_728,
];
const WG: [f64; 4] = [
    0.129_484_966_168_870,
    0.279_705_391_489_277,
    0.381_830_050_505_119,
    0.417_959_183_673_469,
];

fn gk15(f: &dyn Fn(f64) -> Complex64, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k15 = WGK[7] * fc;
    let mut g7 = WG[3] * fc;
    for j in 0..7 {
        let x = h * XGK[j];
        let fsum = f(c - x) + f(c + x);
        k15 += WGK[j] * fsum;
        if j % 2 == 1 {
            g7 += WG[j / 2] * fsum;
        }
    }
    (k15 * h, ((k15 - g7) * h).norm())
}

/// Adaptive bisection driver.
fn adaptive(f: &dyn Fn(f64) -> Complex64, a: f64, b: f64, rel_tol: f64) -> Result<Complex64> {
    let (whole, err0) = gk15(f, a, b);
    let mut stack = vec![(a, b, whole, err0)];
    let mut total = Complex64::new(0.0, 0.0);
    let mut scale = whole.norm().max(1e-300);
    let mut splits = 0usize;
    while let Some((a, b, val, err)) = stack.pop() {
        if err <= rel_tol * scale.max(val.norm()) || (b - a) < 1e-14 * (1.0 + a.abs()) {
            total += val;
            continue;
        }
        splits += 1;
        if splits > 200_000 {
            return Err(Error::Quadrature(format!(
                "refinement did not converge (residual {err:.3e})"
            )));
        }
        let m = 0.5 * (a + b);
        let (v1, e1) = gk15(f, a, m);
        let (v2, e2) = gk15(f, m, b);
        scale = scale.max((v1 + v2).norm());
        stack.push((a, m, v1, e1));
        stack.push((m, b, v2, e2));
    }
    Ok(total)
}

/// Numerical value of the integral on the minus side of the cut; requires
/// Re γ_i < 0 and a ζ with a decaying lower-half-plane ray.
pub fn inner_integral(spec: &InnerIntegral, zeta: Complex64) -> Result<Complex64> {
    inner_integral_on_ray(spec, zeta, ray_angle(zeta)?, 1e-11)
}

/// Same integral on an explicitly chosen ray; contour independence of the
/// result within the decay sector is exercised by the tests.
pub fn inner_integral_on_ray(
    spec: &InnerIntegral,
    zeta: Complex64,
    theta: f64,
    rel_tol: f64,
) -> Result<Complex64> {
    spec.check_admissible()?;
    let gi = spec.gammas[spec.index];
    let phase = Complex64::from_polar(1.0, theta);
    let decay = (zeta * phase).re;
    if decay <= 0.0 {
        return Err(Error::Quadrature("non-decaying ray".into()));
    }
    // power-law tail bound: keep integrating until the exponential wins
    let power: f64 = spec
        .gammas
        .iter()
        .map(|g| (-(g.re) - 1.0).max(0.0))
        .sum();
    let mut r_max = 45.0 / decay;
    for _ in 0..30 {
        r_max = (45.0 + power * (1.0 + r_max).ln()) / decay;
    }
    // endpoint substitution r = s^m tames the r^{−γ_i−1} singularity
    let m = (1.5 / (-gi.re)).ceil().max(1.0);
    let s_max = r_max.powf(1.0 / m);
    let f = |s: f64| -> Complex64 {
        if s <= 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let r = s.powf(m);
        let z = r * phase;
        let jac = m * s.powf(m - 1.0);
        (-(zeta * z)).exp() * spec.integrand(z) * jac * phase
    };
    adaptive(&f, 0.0, s_max, rel_tol)
}

/// Power with the minus-side branch on the negative real axis.
fn pow_minus_side(x: f64, expo: Complex64) -> Complex64 {
    if x > 0.0 {
        (expo * x.ln()).exp()
    } else {
        (expo * Complex64::new((-x).ln(), -PI)).exp()
    }
}

/// Leading asymptote (terms = 1) or the two-term expansion (terms = 2).
pub fn inner_integral_asymptote(
    spec: &InnerIntegral,
    zeta: Complex64,
    terms: usize,
) -> Complex64 {
    let gi = spec.gammas[spec.index];
    let mut out = gamma(-gi) * (gi * zeta.ln()).exp();
    for j in 0..4 {
        if j != spec.index {
            out *= pow_minus_side(
                spec.t[spec.index] - spec.t[j],
                -(spec.gammas[j] + 1.0),
            );
        }
    }
    if terms >= 2 {
        // expanding ∏(1 + t/(t_i−t_j))^{−γ_j−1} under ∫ e^{−tζ} t^{−γ_i−1}
        // turns each −(γ_j+1)/(t_i−t_j) moment into a +γ_i(γ_j+1) term via
        // Γ(1−γ_i) = −γ_i Γ(−γ_i); the quadrature oracle pins the sign
        let mut corr = Complex64::new(0.0, 0.0);
        for j in 0..4 {
            if j != spec.index {
                corr += gi * (spec.gammas[j] + 1.0)
                    / ((spec.t[spec.index] - spec.t[j]) * zeta);
            }
        }
        out *= Complex64::new(1.0, 0.0) + corr;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn gamma_exponent_shifts() {
        let beta = c(0.5, 0.2);
        let bt = c(0.5, -0.2);
        for w in 0..4 {
            let g = gamma_exponents(beta, bt, w);
            let base = [bt - 1.0, -bt - 1.0, beta - 1.0, -beta - 1.0];
            for j in 0..4 {
                let expect = if j == w { base[j] + 1.0 } else { base[j] };
                assert_eq!(g[j], expect, "w={w} j={j}");
            }
        }
        assert_eq!(ROW_SHIFTS, [2, 0, 1, 3]);
    }

    #[test]
    fn coincident_points_reduce_to_gamma_integral() {
        // all t_j equal: I = ∫ e^{−tζ} t^{−Σ(γ_j+1)} dt = Γ(s) ζ^{−s}
        // with s = 1 − Σ(γ_j + 1)
        let gammas = [c(-0.8, 0.0), c(-0.9, 0.0), c(-0.85, 0.0), c(-0.95, 0.0)];
        let spec = InnerIntegral {
            index: 0,
            t: [3.0; 4],
            gammas,
        };
        let s: Complex64 =
            c(1.0, 0.0) - gammas.iter().map(|g| g + 1.0).sum::<Complex64>();
        for &zre in &[0.7, 2.0, 11.0] {
            let zeta = c(zre, 0.0);
            let quad = inner_integral(&spec, zeta).unwrap();
            let exact = gamma(s) * (-(s * zeta.ln())).exp();
            assert!(
                (quad - exact).norm() <= 1e-8 * exact.norm(),
                "ζ={zre}: quad={quad} exact={exact}"
            );
        }
    }

    #[test]
    fn deviation_from_leading_asymptote_halves() {
        let spec = InnerIntegral {
            index: 2,
            t: [0.0, 5.0, 12.0, 17.0],
            gammas: [c(-0.6, 0.1), c(-0.4, -0.2), c(-0.5, 0.15), c(-0.7, -0.1)],
        };
        let dev = |zeta: Complex64| {
            let quad = inner_integral(&spec, zeta).unwrap();
            let asym = inner_integral_asymptote(&spec, zeta, 1);
            (quad / asym - 1.0).norm()
        };
        let d20 = dev(c(20.0, 0.0));
        let d40 = dev(c(40.0, 0.0));
        let ratio = d20 / d40;
        assert!(
            (1.5..2.6).contains(&ratio),
            "deviation ratio per doubling = {ratio:.3} (d20={d20:.3e}, d40={d40:.3e})"
        );
        // the two-term expansion is closer still
        let quad = inner_integral(&spec, c(40.0, 0.0)).unwrap();
        let two = inner_integral_asymptote(&spec, c(40.0, 0.0), 2);
        assert!((quad / two - 1.0).norm() < d40);
    }

    #[test]
    fn contour_independence_for_oscillatory_exponents() {
        // pure-imaginary spectator exponents, singular index kept integrable
        let spec = InnerIntegral {
            index: 1,
            t: [0.0, 4.0, 9.0, 13.0],
            gammas: [c(0.0, 0.35), c(-0.5, 0.2), c(0.0, -0.25), c(0.0, 0.4)],
        };
        let zeta = c(6.0, 0.0);
        let a = inner_integral_on_ray(&spec, zeta, -PI / 4.0, 1e-12).unwrap();
        let b = inner_integral_on_ray(&spec, zeta, -PI / 8.0, 1e-12).unwrap();
        let d = inner_integral_on_ray(&spec, zeta, -0.4 * PI, 1e-12).unwrap();
        assert!((a - b).norm() <= 1e-8 * a.norm(), "a={a} b={b}");
        assert!((a - d).norm() <= 1e-8 * a.norm(), "a={a} d={d}");
    }

    #[test]
    fn rejects_non_integrable_origin() {
        let spec = InnerIntegral {
            index: 0,
            t: [0.0, 1.0, 2.0, 3.0],
            gammas: [c(0.3, 0.0), c(-1.5, 0.0), c(-1.5, 0.0), c(-1.5, 0.0)],
        };
        assert!(matches!(
            inner_integral(&spec, c(5.0, 0.0)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn complex_zeta_sector() {
        let spec = InnerIntegral {
            index: 3,
            t: [0.0, 3.0, 7.0, 10.0],
            gammas: [c(-0.3, 0.1), c(-0.45, -0.1), c(-0.55, 0.2), c(-0.6, 0.05)],
        };
        for &zeta in &[c(15.0, 10.0), c(10.0, -12.0), c(2.0, 25.0)] {
            let quad = inner_integral(&spec, zeta).unwrap();
            let asym = inner_integral_asymptote(&spec, zeta, 2);
            assert!(
                (quad / asym - 1.0).norm() < 0.05,
                "ζ={zeta}: quad={quad} asym={asym}"
            );
        }
    }
}
