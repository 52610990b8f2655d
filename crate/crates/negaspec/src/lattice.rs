//! Two-interval lattice geometry, the Fermi-sea state, and the
//! translation-invariant covariance kernel.
//!
//! Interval B occupies sites {0..l}, interval A sites {l+gap .. l+gap+k};
//! the covariance kernel depends on site differences only, so this
//! canonical embedding loses no generality (translation invariance is
//! tested in `deform`).

use crate::{Error, Result};
use std::f64::consts::PI;

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = b;
        b = a % b;
        a = t;
    }
    a
}

/// Endpoint layout of the two intervals.
///
/// The four endpoint coordinates are t = (0, l, l+gap, l+gap+k); distances
/// are ell(i, j) = |t_i − t_j|. Interval sizes are l+1 (B) and k+1 (A).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Geometry {
    pub k: usize,
    pub l: usize,
    pub gap: usize,
    pub t: [i64; 4],
}

impl Geometry {
    pub fn new(k: usize, l: usize, gap: usize) -> Result<Self> {
        if gap < 1 {
            return Err(Error::InvalidInput(format!("gap must be >= 1, got {gap}")));
        }
        let (k_, l_, g_) = (k as i64, l as i64, gap as i64);
        Ok(Geometry {
            k,
            l,
            gap,
            t: [0, l_, l_ + g_, l_ + g_ + k_],
        })
    }

    /// Distance ℓ_ij = |t_i − t_j|.
    pub fn ell(&self, i: usize, j: usize) -> i64 {
        (self.t[i] - self.t[j]).abs()
    }

    /// Total matrix dimension k + l + 2.
    pub fn dim(&self) -> usize {
        self.k + self.l + 2
    }

    /// Lattice coordinate of matrix row `r` under the canonical ordering:
    /// B sites ascending, then A sites ascending.
    pub fn site_of_row(&self, r: usize) -> i64 {
        debug_assert!(r < self.dim());
        if r <= self.l {
            r as i64
        } else {
            (self.l + self.gap + (r - self.l - 1)) as i64
        }
    }

    /// True when row `r` belongs to interval A.
    pub fn row_in_a(&self, r: usize) -> bool {
        r > self.l
    }

    pub fn sites_b(&self) -> impl Iterator<Item = i64> {
        0..=(self.l as i64)
    }

    pub fn sites_a(&self) -> impl Iterator<Item = i64> {
        let start = (self.l + self.gap) as i64;
        start..=(start + self.k as i64)
    }
}

/// Zero-temperature Fermi sea with momentum p_F = π p/q held as an exact
/// rational, so commensurability and parity conditions are decided in
/// integer arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FermiState {
    pf_numer: u64,
    pf_denom: u64,
}

/// Limiting values of the symbol on the two sides of one Fermi point.
#[derive(Debug, Clone, Copy)]
pub struct FermiPoint {
    /// Momentum of the jump, as a signed multiple of π p/q.
    pub momentum: f64,
    /// Limit approaching from below the jump angle.
    pub f_inner: f64,
    /// Limit approaching from above the jump angle.
    pub f_outer: f64,
}

impl FermiState {
    pub fn new(numer: u64, denom: u64) -> Result<Self> {
        if denom == 0 || numer == 0 || numer >= denom {
            return Err(Error::InvalidInput(format!(
                "filling fraction {numer}/{denom} must lie strictly in (0, 1)"
            )));
        }
        let g = gcd(numer, denom);
        Ok(FermiState {
            pf_numer: numer / g,
            pf_denom: denom / g,
        })
    }

    pub fn half_filling() -> Self {
        FermiState {
            pf_numer: 1,
            pf_denom: 2,
        }
    }

    pub fn numer(&self) -> u64 {
        self.pf_numer
    }

    pub fn denom(&self) -> u64 {
        self.pf_denom
    }

    pub fn p_f(&self) -> f64 {
        PI * self.pf_numer as f64 / self.pf_denom as f64
    }

    pub fn is_half_filling(&self) -> bool {
        self.pf_numer == 1 && self.pf_denom == 2
    }

    /// The two Fermi points at ±p_F with their jump values. The state is a
    /// filled sea, so f = +1 inside (|p| < p_F) and −1 outside; at +p_F the
    /// inner side is the smaller angle, at −p_F it is the larger one.
    pub fn fermi_points(&self) -> [FermiPoint; 2] {
        [
            FermiPoint {
                momentum: self.p_f(),
                f_inner: 1.0,
                f_outer: -1.0,
            },
            FermiPoint {
                momentum: -self.p_f(),
                f_inner: -1.0,
                f_outer: 1.0,
            },
        ]
    }

    /// sin(π m / q) with the integer part of the angle reduced exactly, so
    /// lattice multiples of the Fermi momentum keep their exact zeros.
    pub(crate) fn sin_pi_rational(m: i64, q: i64) -> f64 {
        debug_assert!(q > 0);
        let two_q = 2 * q;
        let mut r = m.rem_euclid(two_q); // angle is π r / q, r in [0, 2q)
        let mut sign = 1.0;
        if r >= q {
            r -= q;
            sign = -1.0;
        }
        // r in [0, q): fold onto [0, q/2] where sin is well conditioned
        if 2 * r > q {
            r = q - r;
        }
        if r == 0 {
            return 0.0;
        }
        if 2 * r == q {
            return sign;
        }
        sign * (PI * r as f64 / q as f64).sin()
    }
}

/// Fourier coefficient f_d of the zero-temperature symbol: the covariance
/// of two sites a distance d apart, f_d = 2 sin(p_F d)/(π d), with
/// f_0 = 2 p_F/π − 1. Even in d.
pub fn covariance_entry(d: i64, state: &FermiState) -> f64 {
    if d == 0 {
        return 2.0 * state.pf_numer as f64 / state.pf_denom as f64 - 1.0;
    }
    let s = FermiState::sin_pi_rational(state.pf_numer as i64 * d, state.pf_denom as i64);
    2.0 * s / (PI * d as f64)
}

/// Occupation symbol f(p) = ±1 on/off the Fermi sea; 0 by convention at the
/// jump itself.
pub fn fermi_function(p: f64, state: &FermiState) -> f64 {
    let pf = state.p_f();
    if p.abs() < pf {
        1.0
    } else if p.abs() > pf {
        -1.0
    } else {
        0.0
    }
}
