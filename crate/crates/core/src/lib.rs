//! Optical response of a two-atom system with one incoherently pumped atom.
//!
//! All rates are in units of the free-space linewidth `gamma0`, distances as
//! `k0 R`, and cross-sections in units of the single-atom resonant scattering
//! cross-section `sigma0`.

pub mod comparators;
pub mod dipole_field;
pub mod error;
pub mod exec;
pub mod params;
pub mod quadrature;
pub mod response;
pub mod suite;
pub mod sweep;
pub mod validation;

pub use dipole_field::{coupling, coupling_at, DipoleCoupling};
pub use error::{Error, Result};
pub use params::{SystemParams, SystemParamsBuilder, ValidityFlags};
pub use response::{sigma_ext, ResponseBreakdown, Split};
