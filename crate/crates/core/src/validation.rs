//! Numerical check of four representative emitted powers of the pumped dimer.
//!
//! Each power has a closed form obtained by residues and an integral
//! representation over the photon frequency `omega'`. The integrals are
//! evaluated here by quadrature, with `v = omega' - omega`, and compared with
//! the closed forms.
//!
//! Powers are photon-number rates `W / (hbar omega)` in units of `gamma0`,
//! with the probe Rabi frequency `rabi0` in units of `gamma0`.
//!
//! Inside the integrals the Green's function enters through its imaginary
//! part `S(omega') = Im M(omega')`. `M` is a one-pole function analytic in the
//! upper half plane, `M(omega') = Omega_c i kappa / (omega' - omega_c + i kappa)`,
//! equal to the transfer rate `Omega_c` at its centre and smooth on the scale
//! `kappa >> Gamma`. The real part of the Green's function is therefore never
//! supplied; where it appears in a closed form it has to come out of the
//! quadrature.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dipole_field::{coupling, coupling_at_probe, SELF_FIELD_IM};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::params::SystemParams;
use crate::quadrature::{integrate_line, with_doubling_gate, LineIntegrand, LineRule, TailPieces};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PowerCase {
    /// Scattering of a photon exchanged between the two atoms.
    W2,
    /// Photon created and re-absorbed at the passive atom.
    W4,
    /// Transient excitation of the passive atom.
    W9,
    /// Collective stimulated emission.
    W12,
}

impl PowerCase {
    pub const ALL: [PowerCase; 4] = [PowerCase::W2, PowerCase::W4, PowerCase::W9, PowerCase::W12];

    pub fn name(self) -> &'static str {
        match self {
            PowerCase::W2 => "W2",
            PowerCase::W4 => "W4",
            PowerCase::W9 => "W9",
            PowerCase::W12 => "W12",
        }
    }
}

impl fmt::Display for PowerCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PowerCase {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        PowerCase::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownCase(s.to_string()))
    }
}

/// Closed-form power.
pub fn closed_form_power(case: PowerCase, p: &SystemParams) -> Result<f64> {
    let probe = coupling_at_probe(p)?;
    let transition = coupling(p)?;
    let (g0, g, big, d) = (p.gamma0(), p.gamma(), p.big_gamma(), p.detuning());
    let l_big = d * d + 0.25 * big * big;
    let l_small = d * d + 0.25 * g * g;
    let w_e = p.pump() / big;
    let rabi2 = p.rabi0() * p.rabi0();
    Ok(match case {
        PowerCase::W2 => -rabi2 * w_e * (d * d - 0.25 * g * big) * probe.gamma_coll / (l_big * l_small),
        PowerCase::W4 => -rabi2 * w_e * g0 * transition.gamma_coll / (l_small * (big + g)),
        PowerCase::W9 => {
            g * (g / big) * 0.25 * rabi2 * (2.0 * d * probe.omega_shift - big * probe.gamma_coll)
                / (l_big * l_small)
        }
        PowerCase::W12 => -p.pump() * rabi2 * transition.gamma_coll / (l_big * (big + g)),
    })
}

/// Resolution and tolerance of the quadrature check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OracleConfig {
    /// Observation time in units of `1/gamma`; `t_obs * gamma >= 10` is required.
    pub t_obs_gamma: f64,
    /// Gauss-Legendre nodes per panel of the coarse pass.
    pub nodes: usize,
    /// Samples averaged over one probe period.
    pub period_samples: usize,
    /// Relative tolerance between numeric and closed-form power.
    pub tolerance: f64,
    /// Width of the spectral model in units of `max(Gamma, gamma0)`.
    pub kappa_factor: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            t_obs_gamma: 50.0,
            nodes: 8,
            period_samples: 4,
            tolerance: 0.02,
            kappa_factor: 2000.0,
        }
    }
}

/// One-pole spectral model centred at `v = center`.
#[derive(Debug, Clone, Copy)]
struct Spectral {
    center: f64,
    value: Complex64,
    kappa: f64,
}

impl Spectral {
    /// `Im M` continued off the real axis: `(M(z) - conj(M(conj z))) / 2i`.
    fn s(&self, z: Complex64) -> Complex64 {
        let ik = Complex64::new(0.0, self.kappa);
        let m = self.value * ik / (z - self.center + ik);
        let m_bar = self.value.conj() * (-ik) / (z - self.center - ik);
        (m - m_bar) / Complex64::new(0.0, 2.0)
    }
}

/// `(e^z - 1) / z`.
fn phi(z: Complex64) -> Complex64 {
    if z.norm() < 1e-5 {
        1.0 + z * (0.5 + z / 6.0)
    } else {
        (z.exp() - 1.0) / z
    }
}

/// `-2 sin(vt)/v * S(v) * g(v)`.
struct SincWeighted<G: Fn(Complex64) -> Complex64> {
    t: f64,
    spec: Spectral,
    g: G,
}

impl<G: Fn(Complex64) -> Complex64> LineIntegrand for SincWeighted<G> {
    fn eval(&self, v: f64) -> Complex64 {
        let sinc = if (v * self.t).abs() < 1e-8 { self.t } else { (v * self.t).sin() / v };
        let z = Complex64::new(v, 0.0);
        -2.0 * sinc * self.spec.s(z) * (self.g)(z)
    }
    fn pieces(&self, z: Complex64) -> TailPieces {
        // -2 sin(vt)/v = (i/v)(e^{ivt} - e^{-ivt})
        let c = Complex64::i() * self.spec.s(z) * (self.g)(z) / z;
        TailPieces { plain: Complex64::new(0.0, 0.0), pos: c, neg: -c }
    }
}

/// `S(v) / (v + b)`, no oscillation.
struct PoleWeighted {
    spec: Spectral,
    b: Complex64,
}

impl LineIntegrand for PoleWeighted {
    fn eval(&self, v: f64) -> Complex64 {
        self.pieces(Complex64::new(v, 0.0)).plain
    }
    fn pieces(&self, z: Complex64) -> TailPieces {
        TailPieces {
            plain: self.spec.s(z) / (z + self.b),
            ..Default::default()
        }
    }
}

/// `S(v) [(v + a) - a e^{ivt}] / ((v + a) v)`.
struct Transient {
    t: f64,
    spec: Spectral,
    a: Complex64,
}

impl LineIntegrand for Transient {
    fn eval(&self, v: f64) -> Complex64 {
        let z = Complex64::new(v, 0.0);
        let it = Complex64::new(0.0, self.t);
        // (1 - e^{ivt})/v = -it phi(ivt)
        let bracket = 1.0 / (z + self.a) - self.a * it * phi(it * v) / (z + self.a);
        self.spec.s(z) * bracket
    }
    fn pieces(&self, z: Complex64) -> TailPieces {
        let s = self.spec.s(z);
        TailPieces {
            plain: s / z,
            pos: -self.a * s / ((z + self.a) * z),
            neg: Complex64::new(0.0, 0.0),
        }
    }
}

/// Integral representation evaluated at one observation time.
fn integral_power(case: PowerCase, p: &SystemParams, t: f64, nodes: usize, kappa: f64) -> Result<f64> {
    let probe = coupling_at_probe(p)?;
    let transition = coupling(p)?;
    let (g, big, d) = (p.gamma(), p.big_gamma(), p.detuning());
    let w_e = p.pump() / big;
    let quarter_rabi2 = 0.25 * p.rabi0() * p.rabi0();
    let i = Complex64::i();

    let rule = LineRule {
        t,
        half_width: d.abs() + 40.0 * big.max(1.0),
        panel: (PI / t).min(0.25 * g),
        nodes,
    };
    let at_probe = Spectral { center: 0.0, value: probe.complex(), kappa };
    // Centred on the transition frequency, omega' = omega0, i.e. v = -Delta.
    let at_transition = Spectral { center: -d, value: transition.complex(), kappa };
    let self_field = Spectral {
        center: 0.0,
        value: Complex64::new(0.0, SELF_FIELD_IM),
        kappa,
    };
    let lorentz_big = Complex64::new(d, 0.5 * big);

    let value = match case {
        PowerCase::W2 => {
            let f = SincWeighted { t, spec: at_probe, g: |z: Complex64| 1.0 / (z + lorentz_big) };
            let int = integrate_line(&f, &rule) / PI;
            w_e * (-quarter_rabi2) * 2.0 * (int / Complex64::new(d, 0.5 * g)).re
        }
        PowerCase::W4 => {
            let x = integrate_line(&PoleWeighted { spec: at_transition, b: lorentz_big }, &rule) / PI;
            let y = SincWeighted { t, spec: self_field, g: |_| Complex64::new(1.0, 0.0) };
            let y = integrate_line(&y, &rule) / PI;
            let denom = i * 0.5 * (big + g) * Complex64::new(d, -0.5 * g) * Complex64::new(d, 0.5 * g);
            w_e * (-quarter_rabi2) * 2.0 * (x * y / denom).re
        }
        PowerCase::W9 => {
            let a = Complex64::new(d, -0.5 * g);
            let j = integrate_line(&Transient { t, spec: at_probe, a }, &rule) / PI;
            let denom = Complex64::new(d, -0.5 * big) * Complex64::new(d, 0.5 * g) * Complex64::new(d, -0.5 * g);
            g * (g / big) * quarter_rabi2 * 2.0 * (j / denom).re
        }
        PowerCase::W12 => {
            let x = integrate_line(&PoleWeighted { spec: at_transition, b: lorentz_big }, &rule) / PI;
            let denom = lorentz_big * lorentz_big.conj() * i * 0.5 * (big + g);
            big * w_e * (-quarter_rabi2) * 2.0 * (x / denom).re
        }
    };
    Ok(value)
}

/// Numeric power together with the relative change seen under node doubling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NumericPower {
    pub value: f64,
    pub doubling_change: f64,
}

fn prefactor_vanishes(case: PowerCase, p: &SystemParams) -> bool {
    p.rabi0() == 0.0 || (case != PowerCase::W9 && p.pump() == 0.0)
}

/// Quadrature estimate of the power at `t_obs`, averaged over one probe period.
pub fn numeric_power(case: PowerCase, p: &SystemParams, cfg: &OracleConfig) -> Result<NumericPower> {
    if cfg.t_obs_gamma.is_nan() || cfg.t_obs_gamma < 10.0 {
        return Err(Error::ObservationTooShort(cfg.t_obs_gamma));
    }
    if prefactor_vanishes(case, p) {
        return Ok(NumericPower { value: 0.0, doubling_change: 0.0 });
    }
    let t_obs = cfg.t_obs_gamma / p.gamma();
    let kappa = cfg.kappa_factor * p.big_gamma().max(p.gamma0());
    let period = 2.0 * PI / (p.omega0() + p.detuning()).abs();
    let samples = cfg.period_samples.max(1);

    let mut failure = None;
    let (value, doubling_change) = with_doubling_gate(cfg.nodes, |nodes| {
        let mut sum = 0.0;
        for k in 0..samples {
            let t = t_obs + period * k as f64 / samples as f64;
            match integral_power(case, p, t, nodes, kappa) {
                Ok(v) => sum += v,
                Err(e) => failure = Some(e),
            }
        }
        sum / samples as f64
    })?;
    match failure {
        Some(e) => Err(e),
        None => Ok(NumericPower { value, doubling_change }),
    }
}

/// Outcome of one closed-form versus quadrature comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub case_id: PowerCase,
    pub params: SystemParams,
    pub closed_form: f64,
    pub numeric: f64,
    /// Relative error; absolute when the closed form vanishes.
    pub rel_err: f64,
    pub passed: bool,
    pub tolerance: f64,
    pub doubling_change: f64,
}

pub fn run_oracle(case: PowerCase, p: &SystemParams, cfg: &OracleConfig) -> Result<OracleReport> {
    let closed_form = closed_form_power(case, p)?;
    let numeric = numeric_power(case, p, cfg)?;
    let diff = (numeric.value - closed_form).abs();
    let rel_err = if closed_form == 0.0 { diff } else { diff / closed_form.abs() };
    Ok(OracleReport {
        case_id: case,
        params: *p,
        closed_form,
        numeric: numeric.value,
        rel_err,
        passed: rel_err <= cfg.tolerance,
        tolerance: cfg.tolerance,
        doubling_change: numeric.doubling_change,
    })
}

/// Parameter points of the standard check: `Delta in {0, +-1}`,
/// `P in {1.2, 7.5}`, `k0R = 2`, `gamma_nr = 0.2`, weak probe.
pub fn standard_points() -> Vec<SystemParams> {
    let mut out = Vec::new();
    for &pump in &[1.2, 7.5] {
        for &d in &[-1.0, 0.0, 1.0] {
            out.push(
                SystemParams::builder()
                    .gamma_nr(0.2)
                    .pump(pump)
                    .detuning(d)
                    .k0r(2.0)
                    .rabi0(0.1)
                    .build()
                    .expect("valid standard point"),
            );
        }
    }
    out
}

/// Runs every case at every point.
pub fn run_all(
    cases: &[PowerCase],
    points: &[SystemParams],
    cfg: &OracleConfig,
    exec: Execution,
) -> Result<Vec<OracleReport>> {
    let jobs: Vec<(PowerCase, SystemParams)> = cases
        .iter()
        .flat_map(|&c| points.iter().map(move |p| (c, *p)))
        .collect();
    exec.map(&jobs, |(c, p)| run_oracle(*c, p, cfg)).into_iter().collect()
}
