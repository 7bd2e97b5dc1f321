//! Physical parameters of the pumped dimer and the population dynamics of the
//! active atom.
//!
//! Units: every rate and frequency is expressed in units of the natural
//! linewidth `gamma0` (fixed to 1), distances as `k0R`, and cross-sections in
//! units of the single-atom resonant cross-section `sigma0`.

use serde::Serialize;

use crate::error::{Error, Result};

/// Natural radiative width of the e -> g transition; the unit of every rate.
pub const GAMMA0: f64 = 1.0;

/// Default transition frequency in units of `gamma0` (optical regime).
pub const DEFAULT_OMEGA0: f64 = 1.0e8;

/// Below this separation the leading-order treatment of the interatomic
/// coupling is no longer accurate.
pub const PERTURBATIVE_CUTOFF_K0R: f64 = 2.0;

/// The probe counts as weak while `rabi0 < WEAK_PROBE_FRACTION * Gamma`.
pub const WEAK_PROBE_FRACTION: f64 = 0.1;

/// Atomic, pump and probe parameters. Immutable once built.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SystemParams {
    gamma0: f64,
    gamma_nr: f64,
    pump: f64,
    omega0: f64,
    detuning: f64,
    rabi0: f64,
    k0r: f64,
    theta: f64,
    pol_overlap: f64,
    ne0: f64,
}

/// Builder for [`SystemParams`]; all validation happens in [`build`](Self::build).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParamsBuilder {
    gamma_nr: f64,
    pump: f64,
    omega0: f64,
    detuning: f64,
    rabi0: f64,
    k0r: f64,
    theta: f64,
    pol_overlap: f64,
    ne0: Option<f64>,
}

impl Default for SystemParamsBuilder {
    fn default() -> Self {
        Self {
            gamma_nr: 0.0,
            pump: 0.0,
            omega0: DEFAULT_OMEGA0,
            detuning: 0.0,
            rabi0: 0.0,
            k0r: PERTURBATIVE_CUTOFF_K0R,
            theta: 0.0,
            pol_overlap: 1.0,
            ne0: None,
        }
    }
}

impl SystemParamsBuilder {
    pub fn gamma_nr(mut self, v: f64) -> Self {
        self.gamma_nr = v;
        self
    }

    pub fn pump(mut self, v: f64) -> Self {
        self.pump = v;
        self
    }

    /// Sets the pump from the auxiliary-level drive: `P = Omega_p^2 / gamma_u`.
    pub fn pump_from_drive(mut self, rabi_pump: f64, gamma_u: f64) -> Self {
        self.pump = rabi_pump * rabi_pump / gamma_u;
        self
    }

    pub fn omega0(mut self, v: f64) -> Self {
        self.omega0 = v;
        self
    }

    pub fn detuning(mut self, v: f64) -> Self {
        self.detuning = v;
        self
    }

    pub fn rabi0(mut self, v: f64) -> Self {
        self.rabi0 = v;
        self
    }

    pub fn k0r(mut self, v: f64) -> Self {
        self.k0r = v;
        self
    }

    pub fn theta(mut self, v: f64) -> Self {
        self.theta = v;
        self
    }

    pub fn pol_overlap(mut self, v: f64) -> Self {
        self.pol_overlap = v;
        self
    }

    /// Initial excited population of the active atom. Defaults to `P/Gamma`.
    pub fn ne0(mut self, v: f64) -> Self {
        self.ne0 = Some(v);
        self
    }

    pub fn build(self) -> Result<SystemParams> {
        fn check(name: &'static str, value: f64, ok: bool, reason: &'static str) -> Result<()> {
            if value.is_finite() && ok {
                Ok(())
            } else {
                Err(Error::InvalidParameter { name, value, reason })
            }
        }
        check("gamma_nr", self.gamma_nr, self.gamma_nr >= 0.0, "must be >= 0")?;
        check("pump_P", self.pump, self.pump >= 0.0, "must be >= 0")?;
        check("omega0", self.omega0, self.omega0 > 0.0, "must be > 0")?;
        check("detuning", self.detuning, true, "must be finite")?;
        check("rabi0", self.rabi0, self.rabi0 >= 0.0, "must be >= 0")?;
        check("k0R", self.k0r, self.k0r > 0.0, "must be > 0")?;
        check("theta", self.theta, true, "must be finite")?;
        check(
            "pol_overlap",
            self.pol_overlap,
            (0.0..=1.0).contains(&self.pol_overlap),
            "must lie in [0, 1]",
        )?;
        let gamma = GAMMA0 + self.gamma_nr;
        let ne0 = self.ne0.unwrap_or(self.pump / (gamma + self.pump));
        check("Ne0", ne0, (0.0..=1.0).contains(&ne0), "must lie in [0, 1]")?;

        let p = SystemParams {
            gamma0: GAMMA0,
            gamma_nr: self.gamma_nr,
            pump: self.pump,
            omega0: self.omega0,
            detuning: self.detuning,
            rabi0: self.rabi0,
            k0r: self.k0r,
            theta: self.theta,
            pol_overlap: self.pol_overlap,
            ne0,
        };
        let flags = p.validity();
        if flags.below_cutoff {
            log::warn!("k0R = {} is below the perturbative cutoff {PERTURBATIVE_CUTOFF_K0R}", p.k0r);
        }
        if flags.strong_probe {
            log::warn!("rabi0 = {} is not small compared with Gamma = {}", p.rabi0, p.big_gamma());
        }
        Ok(p)
    }
}

impl SystemParams {
    pub fn builder() -> SystemParamsBuilder {
        SystemParamsBuilder::default()
    }

    /// A builder pre-filled with these parameters. `Ne0` is carried over only
    /// if it differs from the steady value, so changing the pump keeps the
    /// default "start in steady state" behaviour.
    pub fn to_builder(&self) -> SystemParamsBuilder {
        let ne0 = if self.ne0 == self.pump / self.big_gamma() {
            None
        } else {
            Some(self.ne0)
        };
        SystemParamsBuilder {
            gamma_nr: self.gamma_nr,
            pump: self.pump,
            omega0: self.omega0,
            detuning: self.detuning,
            rabi0: self.rabi0,
            k0r: self.k0r,
            theta: self.theta,
            pol_overlap: self.pol_overlap,
            ne0,
        }
    }

    pub fn gamma0(&self) -> f64 {
        self.gamma0
    }
    pub fn gamma_nr(&self) -> f64 {
        self.gamma_nr
    }
    pub fn pump(&self) -> f64 {
        self.pump
    }
    pub fn omega0(&self) -> f64 {
        self.omega0
    }
    pub fn detuning(&self) -> f64 {
        self.detuning
    }
    pub fn rabi0(&self) -> f64 {
        self.rabi0
    }
    pub fn k0r(&self) -> f64 {
        self.k0r
    }
    pub fn theta(&self) -> f64 {
        self.theta
    }
    pub fn pol_overlap(&self) -> f64 {
        self.pol_overlap
    }
    pub fn ne0(&self) -> f64 {
        self.ne0
    }

    /// Total decay rate of the passive transition, `gamma0 + gamma_nr`.
    pub fn gamma(&self) -> f64 {
        self.gamma0 + self.gamma_nr
    }

    /// Pumped decoherence rate of the active atom, `gamma + P`.
    pub fn big_gamma(&self) -> f64 {
        self.gamma() + self.pump
    }

    pub fn validity(&self) -> ValidityFlags {
        ValidityFlags {
            strong_probe: self.rabi0 >= WEAK_PROBE_FRACTION * self.big_gamma(),
            below_cutoff: self.k0r < PERTURBATIVE_CUTOFF_K0R,
        }
    }
}

/// Warnings attached to results computed outside the regime where the
/// leading-order expressions are accurate.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ValidityFlags {
    pub strong_probe: bool,
    pub below_cutoff: bool,
}

impl ValidityFlags {
    pub fn is_clean(&self) -> bool {
        !self.strong_probe && !self.below_cutoff
    }

    pub fn union(self, other: Self) -> Self {
        Self {
            strong_probe: self.strong_probe || other.strong_probe,
            below_cutoff: self.below_cutoff || other.below_cutoff,
        }
    }

    pub fn messages(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if self.strong_probe {
            out.push("strong-probe: rabi0 >= 0.1*Gamma");
        }
        if self.below_cutoff {
            out.push("below-cutoff: k0R < 2");
        }
        out
    }
}

/// Level populations of the active atom.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Populations {
    pub rho_ee: f64,
    pub rho_gg: f64,
}

/// Statistical weights of the two pure states making up the steady mixture.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SteadyWeights {
    /// `gamma / Gamma`, weight of the active atom in its ground state.
    pub w_g: f64,
    /// `P / Gamma`, weight of the active atom in its excited state.
    pub w_e: f64,
}

/// `(gamma, Gamma)`.
pub fn derived_rates(p: &SystemParams) -> (f64, f64) {
    (p.gamma(), p.big_gamma())
}

/// Closed-form solution of the effective two-level population dynamics.
pub fn populations_at(p: &SystemParams, t: f64) -> Result<Populations> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "t",
            value: t,
            reason: "must be finite and >= 0",
        });
    }
    let big_gamma = p.big_gamma();
    let decay = (-big_gamma * t).exp();
    let relaxed = 1.0 - decay;
    Ok(Populations {
        rho_ee: p.pump / big_gamma * relaxed + p.ne0 * decay,
        rho_gg: p.gamma() / big_gamma * relaxed + (1.0 - p.ne0) * decay,
    })
}

pub fn steady_weights(p: &SystemParams) -> SteadyWeights {
    let big_gamma = p.big_gamma();
    let w_e = p.pump / big_gamma;
    // w_g is taken as the complement so the pair sums to one exactly.
    SteadyWeights { w_g: 1.0 - w_e, w_e }
}
