//! Experimental inputs and every derived quantity the model needs.
//!
//! All values are SI. The derived set follows directly from the quasi-1D
//! reduction of the condensate (transverse oscillator length `ell_B`), the
//! contact interaction `g_B = 2ħ²a_B/(m_B ℓ_B²)` and the impurity's Gaussian
//! ground state of width `ell_A = σ·ell_B`.

use std::f64::consts::{PI, SQRT_2};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::constants::{HBAR, K_B, NANOMETRE};
use crate::error::{ensure_non_negative, ensure_positive, Error, Result};

/// Experimental inputs in SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConfig {
    /// Impurity (qubit) mass, kg.
    pub m_a: f64,
    /// Condensate atom mass, kg.
    pub m_b: f64,
    /// Transverse trap angular frequency of the condensate, rad/s.
    pub omega_b: f64,
    /// Line density, 1/m.
    pub n: f64,
    /// Condensate s-wave scattering length, m.
    pub a_b: f64,
    /// Impurity–condensate scattering length in the excited state, m.
    pub a_ab: f64,
    /// Width ratio `ell_A / ell_B`.
    pub sigma: f64,
}

/// Keys of the plain-text config format, in file order.
pub const CONFIG_KEYS: [&str; 7] = [
    "m_A_kg",
    "m_B_kg",
    "omega_B_rad_s",
    "n_per_m",
    "a_B_m",
    "a_AB_m",
    "sigma",
];

impl PhysicalConfig {
    /// A ²³Na impurity in a ⁸⁷Rb condensate with a 1 kHz transverse trap,
    /// `n = 3.6×10⁷ m⁻¹`, `a_B = 5.3 nm`, `a_AB = 2.9 nm`, `σ = 0.5`.
    pub fn baseline() -> Self {
        Self {
            m_a: 3.82e-26,
            m_b: 14.45e-26,
            omega_b: 2.0 * PI * 1e3,
            n: 3.6e7,
            a_b: 5.3 * NANOMETRE,
            a_ab: 2.9 * NANOMETRE,
            sigma: 0.5,
        }
    }

    /// Check the field invariants: every field strictly positive and
    /// `n·a_B < 1`.
    pub fn validate(&self) -> Result<()> {
        ensure_positive("m_A", self.m_a)?;
        ensure_positive("m_B", self.m_b)?;
        ensure_positive("omega_B", self.omega_b)?;
        ensure_positive("n", self.n)?;
        ensure_positive("a_B", self.a_b)?;
        ensure_positive("a_AB", self.a_ab)?;
        ensure_positive("sigma", self.sigma)?;
        let na = self.n * self.a_b;
        if na >= 1.0 {
            return Err(Error::invalid(
                "n*a_B",
                na,
                "weak-interaction quasi-1D regime requires n*a_B < 1",
            ));
        }
        Ok(())
    }

    pub fn with_a_ab(mut self, a_ab: f64) -> Self {
        self.a_ab = a_ab;
        self
    }

    /// The same setup with `a_AB` rescaled so that the Ohmic coupling equals
    /// `eta`. Since `η ∝ a_AB²` every other input is untouched.
    pub fn with_eta(self, eta: f64) -> Result<Self> {
        ensure_positive("eta", eta)?;
        let current = derive(&self)?.eta;
        Ok(self.with_a_ab(self.a_ab * (eta / current).sqrt()))
    }

    /// Parse the `key = value` format (one entry per line, `#` comments).
    /// Every key in [`CONFIG_KEYS`] must appear exactly once.
    pub fn parse(text: &str) -> Result<Self> {
        Self::parse_with(text, |_, raw| raw.parse::<f64>().map_err(|e| e.to_string()))
    }

    /// Like [`parse`](Self::parse) but with a caller-supplied value parser,
    /// e.g. one that understands unit suffixes. It receives the key and the
    /// raw value text.
    pub fn parse_with<F>(text: &str, mut value: F) -> Result<Self>
    where
        F: FnMut(&str, &str) -> std::result::Result<f64, String>,
    {
        let mut slots: [Option<f64>; 7] = [None; 7];
        for (idx, raw_line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw_line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, raw) = line.split_once('=').ok_or_else(|| Error::Config {
                line: line_no,
                reason: format!("expected `key = value`, got `{line}`"),
            })?;
            let key = key.trim();
            let slot = CONFIG_KEYS
                .iter()
                .position(|k| *k == key)
                .ok_or_else(|| Error::Config {
                    line: line_no,
                    reason: format!("unknown key `{key}`"),
                })?;
            if slots[slot].is_some() {
                return Err(Error::Config {
                    line: line_no,
                    reason: format!("duplicate key `{key}`"),
                });
            }
            let v = value(key, raw.trim()).map_err(|reason| Error::Config {
                line: line_no,
                reason: format!("`{key}`: {reason}"),
            })?;
            slots[slot] = Some(v);
        }
        let get = |i: usize| {
            slots[i].ok_or_else(|| Error::Config {
                line: 0,
                reason: format!("missing key `{}`", CONFIG_KEYS[i]),
            })
        };
        let cfg = Self {
            m_a: get(0)?,
            m_b: get(1)?,
            omega_b: get(2)?,
            n: get(3)?,
            a_b: get(4)?,
            a_ab: get(5)?,
            sigma: get(6)?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Canonical text form; `parse(to_config_string())` reproduces `self`
    /// bit for bit.
    pub fn to_config_string(&self) -> String {
        let mut out = String::new();
        for (key, value) in CONFIG_KEYS.iter().zip(self.values()) {
            writeln!(out, "{key} = {value:e}").unwrap();
        }
        out
    }

    fn values(&self) -> [f64; 7] {
        [
            self.m_a,
            self.m_b,
            self.omega_b,
            self.n,
            self.a_b,
            self.a_ab,
            self.sigma,
        ]
    }
}

impl Default for PhysicalConfig {
    fn default() -> Self {
        Self::baseline()
    }
}

/// Everything derived from a [`PhysicalConfig`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedParams {
    pub config: PhysicalConfig,
    /// Transverse oscillator length of the condensate, m.
    pub ell_b: f64,
    /// Impurity ground-state width, m.
    pub ell_a: f64,
    /// Effective 1D interaction constant, J·m.
    pub g_b: f64,
    /// Reduced mass, kg.
    pub m_ab: f64,
    /// Collisional level shift of the excited state, J.
    pub delta_e: f64,
    /// Speed of sound, m/s.
    pub c_s: f64,
    /// Gaussian cutoff frequency `√2·c_s/ell_A`, rad/s.
    pub omega_c: f64,
    /// Healing length, m.
    pub xi: f64,
    /// Prefactor of the wavenumber integral for the dephasing exponent, J²·m.
    pub p: f64,
    /// Prefactor of the same integral in oscillator units.
    pub p_tilde: f64,
    /// `4·n·a_B`.
    pub alpha: f64,
    /// Ohmic coupling strength of the phonon bath.
    pub eta: f64,
}

impl DerivedParams {
    /// `ħ²/(2 m_B)`, so that `E_k = hbar2_over_2m · k²`.
    #[inline]
    pub fn hbar2_over_2m(&self) -> f64 {
        HBAR * HBAR / (2.0 * self.config.m_b)
    }

    /// Mean-field energy `n·g_B`, J.
    #[inline]
    pub fn mean_field(&self) -> f64 {
        self.config.n * self.g_b
    }

    /// Oscillator energy `ħ ω_B`, J.
    #[inline]
    pub fn hbar_omega_b(&self) -> f64 {
        HBAR * self.config.omega_b
    }

    /// Level shift as an angular frequency, rad/s.
    pub fn delta_e_rad_s(&self) -> f64 {
        self.delta_e / HBAR
    }
}

/// Compute all derived parameters. Pure and deterministic.
pub fn derive(config: &PhysicalConfig) -> Result<DerivedParams> {
    config.validate()?;
    let PhysicalConfig {
        m_a,
        m_b,
        omega_b,
        n,
        a_b,
        a_ab,
        sigma,
    } = *config;

    let ell_b = (HBAR / (m_b * omega_b)).sqrt();
    let ell_a = sigma * ell_b;
    let g_b = 2.0 * HBAR * HBAR * a_b / (m_b * ell_b * ell_b);
    let m_ab = m_a * m_b / (m_a + m_b);
    let width2 = ell_a * ell_a + ell_b * ell_b;
    let delta_e = 2.0 * HBAR * HBAR * n * a_ab / (m_ab * width2);
    let c_s = (n * g_b / m_b).sqrt();
    let omega_c = SQRT_2 * c_s / ell_a;
    let xi = HBAR / (m_b * n * g_b).sqrt();
    let p = 8.0 * n * HBAR.powi(4) * a_ab * a_ab / (PI * m_ab * m_ab * width2 * width2);
    let mass_ratio = (m_a + m_b) / m_a;
    let one_plus_s2 = 1.0 + sigma * sigma;
    let p_tilde =
        32.0 * n * a_ab * a_ab * mass_ratio * mass_ratio / (PI * ell_b * one_plus_s2 * one_plus_s2);
    let alpha = 4.0 * n * a_b;
    let eta = n * a_ab * a_ab * ell_b.powi(3) * mass_ratio * mass_ratio
        / (SQRT_2 * PI * width2 * width2)
        * (n * a_b).powf(-1.5);

    Ok(DerivedParams {
        config: *config,
        ell_b,
        ell_a,
        g_b,
        m_ab,
        delta_e,
        c_s,
        omega_c,
        xi,
        p,
        p_tilde,
        alpha,
        eta,
    })
}

/// Time and temperature in oscillator units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Dimensionless {
    /// `ω_T · t`.
    pub t_tilde: f64,
    /// `2 k_B T / (ħ ω_B)`.
    pub temp_tilde: f64,
    /// Thermal frequency `k_B T / ħ`, rad/s.
    pub omega_t: f64,
}

/// Thermal frequency `k_B T / ħ`, rad/s.
#[inline]
pub fn omega_t(temperature: f64) -> f64 {
    K_B * temperature / HBAR
}

pub fn dimensionless(t: f64, temperature: f64, d: &DerivedParams) -> Result<Dimensionless> {
    ensure_non_negative("t", t)?;
    ensure_positive("T", temperature)?;
    let omega_t = omega_t(temperature);
    Ok(Dimensionless {
        t_tilde: omega_t * t,
        temp_tilde: 2.0 * K_B * temperature / d.hbar_omega_b(),
        omega_t,
    })
}
