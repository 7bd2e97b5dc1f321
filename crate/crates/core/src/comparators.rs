//! Independent reference computations used to cross-check the closed forms:
//! the classical linear-response cross-section of two ground-state atoms, the
//! full tensor contraction of the dyadic Green's function, and a direct
//! integrator of the population rate equations.

use num_complex::Complex64;

use crate::dipole_field::DipoleCoupling;
use crate::error::{Error, Result};
use crate::params::{Populations, SystemParams};
use crate::response::Split;

/// Ground-state polarizability normalised by `mu^2 / (hbar gamma0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Polarizability {
    pub value: Complex64,
}

impl Polarizability {
    /// Lorentzian response with the total linewidth `gamma`; the pole sits at
    /// `Delta = -i gamma/2`.
    pub fn lorentzian(p: &SystemParams) -> Self {
        let denom = Complex64::new(p.detuning(), 0.5 * p.gamma());
        Self {
            value: p.gamma0() / denom,
        }
    }

    pub fn pole(p: &SystemParams) -> Complex64 {
        Complex64::new(0.0, -0.5 * p.gamma())
    }
}

/// Classical scattering cross-section of the unpumped dimer.
///
/// The pump is ignored; a warning is logged if it is nonzero.
pub fn semiclassical_sigma_sc(p: &SystemParams, c: &DipoleCoupling) -> f64 {
    if p.pump() > 0.0 {
        log::warn!("semiclassical cross-section ignores the pump (P = {})", p.pump());
    }
    semiclassical_split(p, c).total()
}

/// [`semiclassical_sigma_sc`] split into the isolated-atom Lorentzian and the
/// coupling-dependent interference term. Ignores the pump without warning.
pub fn semiclassical_split(p: &SystemParams, c: &DipoleCoupling) -> Split {
    let (g0, g, d) = (p.gamma0(), p.gamma(), p.detuning());
    let l = d * d + 0.25 * g * g;
    let single = g * g0 / (2.0 * l);
    let collective = ((d * d - 0.25 * g * g) * c.gamma_coll * g0 + d * c.omega_shift * g * g0) / (l * l);
    Split {
        single: p.pol_overlap() * single,
        collective: p.pol_overlap() * collective,
    }
}

pub type Vec3 = [f64; 3];

fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn contract(m: &[[f64; 3]; 3], u: &Vec3) -> f64 {
    let mut s = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            s += u[i] * m[i][j] * u[j];
        }
    }
    s
}

/// Transfer rate from an explicit contraction `mu.G.mu` of the full
/// 3x3 Green's tensor, for unit vectors `mu` and `r_hat` and `x = k0R`.
pub fn coupling_from_tensor(x: f64, mu: &Vec3, r_hat: &Vec3) -> Result<DipoleCoupling> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::Domain(x));
    }
    let norm = dot(r_hat, r_hat).sqrt();
    let r = [r_hat[0] / norm, r_hat[1] / norm, r_hat[2] / norm];
    let mut proj_t = [[0.0; 3]; 3];
    let mut proj_q = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let id = if i == j { 1.0 } else { 0.0 };
            proj_t[i][j] = id - r[i] * r[j];
            proj_q[i][j] = id - 3.0 * r[i] * r[j];
        }
    }
    let mu_norm2 = dot(mu, mu);
    let pp = contract(&proj_t, mu) / mu_norm2;
    let qq = contract(&proj_q, mu) / mu_norm2;
    let ikr = Complex64::new(0.0, x).exp();
    let g = -ikr * (pp / x + Complex64::i() * qq / (x * x) - qq / (x * x * x));
    Ok(DipoleCoupling::from_complex(0.75 * g))
}

/// Sampled solution of the rate equations.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub populations: Vec<Populations>,
}

impl Trajectory {
    pub fn last(&self) -> Option<(f64, Populations)> {
        Some((*self.times.last()?, *self.populations.last()?))
    }
}

/// Right-hand side in the gain/loss form, `(rho_ee', rho_gg')`.
fn rhs(pump: f64, gamma: f64, y: [f64; 2]) -> [f64; 2] {
    let flow = pump * y[1] - gamma * y[0];
    [flow, -flow]
}

fn rk4_step(pump: f64, gamma: f64, y: [f64; 2], h: f64) -> [f64; 2] {
    let add = |a: [f64; 2], b: [f64; 2], s: f64| [a[0] + s * b[0], a[1] + s * b[1]];
    let k1 = rhs(pump, gamma, y);
    let k2 = rhs(pump, gamma, add(y, k1, 0.5 * h));
    let k3 = rhs(pump, gamma, add(y, k2, 0.5 * h));
    let k4 = rhs(pump, gamma, add(y, k3, h));
    [
        y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
    ]
}

/// Fixed-step integration from `y` over `[0, t_end]` without any step-size
/// guard. The final step is shortened to land on `t_end`.
fn propagate(pump: f64, gamma: f64, mut y: [f64; 2], t_end: f64, dt: f64, out: &mut Trajectory) {
    let n = (t_end / dt).ceil() as usize;
    let mut t = 0.0;
    for i in 0..n {
        let h = if i + 1 == n { t_end - t } else { dt };
        y = rk4_step(pump, gamma, y, h);
        t = if i + 1 == n { t_end } else { (i + 1) as f64 * dt };
        out.times.push(t);
        out.populations.push(Populations { rho_ee: y[0], rho_gg: y[1] });
    }
}

fn check_step(p: &SystemParams, t_end: f64, dt: f64) -> Result<()> {
    if !t_end.is_finite() || t_end <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "t_end",
            value: t_end,
            reason: "must be finite and > 0",
        });
    }
    let limit = 0.01 / p.big_gamma();
    if dt.is_nan() || dt <= 0.0 || dt > limit {
        return Err(Error::StepTooLarge { dt, limit });
    }
    Ok(())
}

/// Fourth-order Runge-Kutta solution of the population rate equations,
/// sampled at every step and starting from `Ne0` at `t = 0`.
pub fn rate_equation_integrate(p: &SystemParams, t_end: f64, dt: f64) -> Result<Trajectory> {
    check_step(p, t_end, dt)?;
    let y0 = [p.ne0(), 1.0 - p.ne0()];
    let mut out = Trajectory {
        times: vec![0.0],
        populations: vec![Populations { rho_ee: y0[0], rho_gg: y0[1] }],
    };
    propagate(p.pump(), p.gamma(), y0, t_end, dt, &mut out);
    Ok(out)
}

/// Integrates through the ascending sample `times`, landing exactly on each.
pub fn rate_equation_at(p: &SystemParams, times: &[f64], dt: f64) -> Result<Vec<Populations>> {
    let t_max = times.iter().copied().fold(0.0, f64::max);
    check_step(p, t_max, dt)?;
    if times.windows(2).any(|w| w[1] < w[0]) || times.first().is_some_and(|&t| t < 0.0) {
        return Err(Error::InvalidParameter {
            name: "times",
            value: t_max,
            reason: "must be non-negative and ascending",
        });
    }
    let mut y = [p.ne0(), 1.0 - p.ne0()];
    let mut t = 0.0;
    let mut scratch = Trajectory { times: Vec::new(), populations: Vec::new() };
    let mut out = Vec::with_capacity(times.len());
    for &target in times {
        if target > t {
            scratch.times.clear();
            scratch.populations.clear();
            propagate(p.pump(), p.gamma(), y, target - t, dt, &mut scratch);
            let last = scratch.populations.last().expect("at least one step");
            y = [last.rho_ee, last.rho_gg];
            t = target;
        }
        out.push(Populations { rho_ee: y[0], rho_gg: y[1] });
    }
    Ok(out)
}
