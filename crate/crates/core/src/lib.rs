//! Thermometry of a quasi-1D Bose-Einstein condensate with a single impurity
//! qubit.
//!
//! The qubit dephases at a temperature-dependent rate. This crate computes
//! the dephasing exponent Γ(t, T), the quantum Fisher information and QSNR it
//! implies, the encoding time that maximizes the QSNR, and a Monte Carlo
//! check that a σ_x measurement with maximum-likelihood inversion reaches the
//! Cramér-Rao bound. Everything is SI.
//!
//! ```
//! use bec_thermo::constants::NANOKELVIN;
//! use bec_thermo::dephasing::QuadratureSpec;
//! use bec_thermo::optimizer::{find_topt_numeric, GammaSource};
//! use bec_thermo::params::{derive, PhysicalConfig};
//!
//! let d = derive(&PhysicalConfig::baseline())?;
//! let best = find_topt_numeric(0.5 * NANOKELVIN, &d, GammaSource::Ohmic, &QuadratureSpec::default())?;
//! assert!(best.q_opt > 0.1 && best.q_opt < 0.16);
//! # Ok::<(), bec_thermo::Error>(())
//! ```

pub mod constants;
pub mod dephasing;
pub mod dispersion;
pub mod error;
pub mod metrology;
pub mod optimizer;
pub mod params;
mod quadrature;
pub mod ramsey_mc;
pub mod special;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/parameters.md")]
    mod parameters {}
    #[doc = include_str!("../../../book/src/dephasing.md")]
    mod dephasing {}
    #[doc = include_str!("../../../book/src/metrology.md")]
    mod metrology {}
    #[doc = include_str!("../../../book/src/optimal_time.md")]
    mod optimal_time {}
    #[doc = include_str!("../../../book/src/monte_carlo.md")]
    mod monte_carlo {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
