//! Bogoliubov excitations and their coupling to the impurity.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_non_negative, ensure_positive, Result};
use crate::params::DerivedParams;

/// One quasiparticle mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    /// Wavenumber, 1/m.
    pub k: f64,
    /// Free-particle kinetic energy, J.
    pub e_k: f64,
    /// Bogoliubov energy, J.
    pub eps_k: f64,
}

impl Mode {
    pub fn new(k: f64, d: &DerivedParams) -> Result<Self> {
        ensure_non_negative("k", k)?;
        let e_k = d.hbar2_over_2m() * k * k;
        Ok(Self {
            k,
            e_k,
            eps_k: bogoliubov(e_k, d.mean_field()),
        })
    }

    /// `E_k / ε_k`, in `[0, 1)` for `k > 0`. Evaluated as
    /// `√(E/(E + 2ng))` so it stays accurate on the phonon branch.
    pub fn energy_ratio(&self, d: &DerivedParams) -> f64 {
        if self.k == 0.0 {
            return 0.0;
        }
        (self.e_k / (self.e_k + 2.0 * d.mean_field())).sqrt()
    }
}

/// `√(E² + 2·mean_field·E)`, written as `√(E(E + 2 mean_field))`.
#[inline]
pub(crate) fn bogoliubov(e_k: f64, mean_field: f64) -> f64 {
    (e_k * (e_k + 2.0 * mean_field)).sqrt()
}

/// Bogoliubov excitation energy at wavenumber `k`, J.
pub fn epsilon(k: f64, d: &DerivedParams) -> Result<f64> {
    Ok(Mode::new(k, d)?.eps_k)
}

/// Impurity–mode coupling `g_k` for a condensate of length `length`, J.
///
/// Only defined for `k > 0`; the `k = 0` mode is the condensate itself and
/// its coupling is the `k → 0⁺` limit, zero.
pub fn coupling_gk(k: f64, length: f64, d: &DerivedParams) -> Result<f64> {
    ensure_positive("k", k)?;
    ensure_positive("L", length)?;
    let mode = Mode::new(k, d)?;
    let gauss = (-(d.ell_a * k).powi(2) / 4.0).exp();
    Ok(d.delta_e / (d.config.n * length).sqrt() * mode.energy_ratio(d).sqrt() * gauss)
}

/// High-frequency shape of the Ohmic spectral density.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Cutoff {
    /// `exp(-ω²/ω_c²)`, what the phonon approximation actually produces.
    #[default]
    Gaussian,
    /// `exp(-ω/ω_c)`, the standard Ohmic form behind the closed-form results.
    Exponential,
}

/// Ohmic spectral density `J(ω) = η ω f(ω/ω_c)`, rad/s.
pub fn spectral_density(omega: f64, d: &DerivedParams, cutoff: Cutoff) -> Result<f64> {
    ensure_non_negative("omega", omega)?;
    let u = omega / d.omega_c;
    let shape = match cutoff {
        Cutoff::Gaussian => (-u * u).exp(),
        Cutoff::Exponential => (-u).exp(),
    };
    Ok(d.eta * omega * shape)
}
