//! Free-space dyadic Green's function projected on the transition dipole and
//! the complex excitation-transfer rate between the two atoms.
//!
//! With `x = k'R` and `theta` the angle between the dipole and the
//! interatomic axis, the projection of the Green's tensor reads
//!
//! ```text
//! mu.G.mu = -(k' e^{ix} / 4 pi) [ sin^2(theta)/x + i(1 - 3cos^2 theta)/x^2 - (1 - 3cos^2 theta)/x^3 ]
//! ```
//!
//! where `sin^2 theta = mu.P.mu` and `1 - 3cos^2 theta = mu.Q.mu` for the
//! transverse projector `P = I - RR/R^2` and `Q = I - 3RR/R^2`.
//!
//! Eliminating the dipole moment through `gamma0 = k0^3 mu^2 / (3 pi hbar eps0)`
//! gives the transfer rate `Omega = (3 gamma0 / 4) g = omega_shift - i gamma_coll`,
//! with `g` the distance-normalised projection below. Note that
//! `gamma_coll -> gamma0/2` (not `gamma0`) as the atoms merge for `theta = 0`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::{SystemParams, GAMMA0};

/// `mu.G.mu * 4 pi / k'`, split into real and imaginary parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GreenProjection {
    pub x: f64,
    pub theta: f64,
    pub g_re: f64,
    pub g_im: f64,
}

impl GreenProjection {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.g_re, self.g_im)
    }
}

/// Dispersive shift and collective decay coupling, in units of `gamma0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DipoleCoupling {
    /// Real part of the transfer rate.
    pub omega_shift: f64,
    /// Minus the imaginary part of the transfer rate.
    pub gamma_coll: f64,
}

impl DipoleCoupling {
    pub const DECOUPLED: Self = Self {
        omega_shift: 0.0,
        gamma_coll: 0.0,
    };

    /// `Omega = omega_shift - i gamma_coll`.
    pub fn complex(&self) -> Complex64 {
        Complex64::new(self.omega_shift, -self.gamma_coll)
    }

    pub fn from_complex(omega: Complex64) -> Self {
        Self {
            omega_shift: omega.re,
            gamma_coll: -omega.im,
        }
    }

    pub fn magnitude_sq(&self) -> f64 {
        self.omega_shift * self.omega_shift + self.gamma_coll * self.gamma_coll
    }
}

/// Projected Green's function at `x = k'R > 0`.
pub fn green_projected(x: f64, theta: f64) -> Result<GreenProjection> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::Domain(x));
    }
    let cos_t = theta.cos();
    let transverse = 1.0 - cos_t * cos_t; // mu.P.mu
    let quad = 1.0 - 3.0 * cos_t * cos_t; // mu.Q.mu
    let (sin_x, cos_x) = x.sin_cos();
    let x3 = x * x * x;
    // e^{ix}(ix - 1) = -(x sin x + cos x) + i(x cos x - sin x)
    let near = Complex64::new(-(x * sin_x + cos_x), x_cos_minus_sin(x));
    let g = -transverse * Complex64::new(cos_x, sin_x) / x - quad * near / x3;
    Ok(GreenProjection {
        x,
        theta,
        g_re: g.re,
        g_im: g.im,
    })
}

/// `x cos x - sin x`, without the cancellation near the origin where it
/// behaves as `-x^3/3`.
fn x_cos_minus_sin(x: f64) -> f64 {
    if x.abs() >= 0.5 {
        return x * x.cos() - x.sin();
    }
    // sum_{n>=1} (-1)^n 2n x^{2n+1} / (2n+1)!
    let x2 = x * x;
    let mut term = x;
    let mut sum = 0.0;
    for n in 1..=9 {
        let k = (2 * n) as f64;
        term *= -x2 / (k * (k + 1.0));
        sum += k * term;
    }
    sum
}

/// Transfer rate for a given separation and orientation.
pub fn coupling_at(x: f64, theta: f64) -> Result<DipoleCoupling> {
    let g = green_projected(x, theta)?;
    Ok(DipoleCoupling::from_complex(0.75 * GAMMA0 * g.value()))
}

/// Transfer rate at the transition frequency for the configured geometry.
pub fn coupling(p: &SystemParams) -> Result<DipoleCoupling> {
    coupling_at(p.k0r(), p.theta())
}

/// Transfer rate evaluated at the probe frequency, i.e. at `k R = k0R (1 + Delta/omega0)`.
pub fn coupling_at_probe(p: &SystemParams) -> Result<DipoleCoupling> {
    coupling_at(p.k0r() * (1.0 + p.detuning() / p.omega0()), p.theta())
}

/// Imaginary part of the self-field transfer rate, `Im Omega(r -> 0+) = -gamma0/2`.
///
/// The real part diverges at the origin and is absorbed into the transition
/// frequency; only the regular imaginary limit is physical.
pub const SELF_FIELD_IM: f64 = -0.5 * GAMMA0;
