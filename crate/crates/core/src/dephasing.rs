//! The dephasing exponent Γ(t, T) of the probe qubit and its temperature
//! derivative.
//!
//! Two independent routes are provided:
//!
//! * **numeric**: the exact wavenumber integral
//!   `Γ = P ∫₀^∞ dk e^{-(ℓ_A k)²/2} / (ε_k (E_k + 2ng_B)) · sin²(ε_k t/2ħ) · coth(ε_k/2k_BT)`,
//!   integrated either in SI variables ([`Parameterization::Physical`]) or in
//!   oscillator units `k̃ = ℓ_B k` ([`Parameterization::Dimensionless`]);
//! * **Ohmic**: the closed form obtained for a linear spectral density with an
//!   exponential cutoff,
//!   `Γ̄ = (η/2) ln(1 + ω_c²t²) + η ln[sinh(πω_T t)/(πω_T t)]`.
//!
//! Temperature enters the physical integrand only through `coth`, so
//! `∂_TΓ` is computed by differentiating under the integral there.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::constants::{HBAR, K_B};
use crate::error::{ensure_non_negative, ensure_positive, Error, Result};
use crate::params::{dimensionless, omega_t, DerivedParams};
use crate::quadrature::{integrate_phase, PhaseIntegrand, Tolerances};
use crate::special::{coth_csch2, ln_sinhc, x_coth_x_minus_1};

/// Truncation, tolerances and panel budget for the Γ integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    /// Hard upper limit in `k̃ = ℓ_B k`; `None` means `12/σ`. The march
    /// usually stops earlier, once the tail bound drops below `abs_tol`.
    pub k_tilde_max: Option<f64>,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_panels: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            k_tilde_max: None,
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            max_panels: 20_000_000,
        }
    }
}

impl QuadratureSpec {
    /// The truncation actually used for a given `σ`, after checking that the
    /// Gaussian weight there is below `abs_tol`.
    pub fn resolved_k_tilde_max(&self, sigma: f64) -> Result<f64> {
        ensure_positive("rel_tol", self.rel_tol)?;
        ensure_positive("abs_tol", self.abs_tol)?;
        let k = self.k_tilde_max.unwrap_or(12.0 / sigma);
        ensure_positive("k_tilde_max", k)?;
        let weight = (-(sigma * k).powi(2) / 2.0).exp();
        if weight >= self.abs_tol {
            return Err(Error::invalid(
                "k_tilde_max",
                k,
                "Gaussian weight at the truncation must be below abs_tol",
            ));
        }
        Ok(k)
    }

    fn tolerances(&self) -> Tolerances {
        Tolerances {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            max_panels: self.max_panels,
        }
    }
}

/// Which variables the numeric integral is carried out in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parameterization {
    /// SI wavenumber `k`.
    Physical,
    /// `k̃ = ℓ_B k`, energies in units of `ħω_B/2`.
    Dimensionless,
}

/// Conditions under which a closed form is used outside its derivation's
/// assumptions. Results are still returned.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum RegimeWarning {
    /// `ω_c/ω_T ≤ 10`.
    CutoffNotFarAboveThermal(f64),
    /// `ω_c·t ≤ 10` at the optimum.
    CutoffTimeShort(f64),
    /// `π ω_T t ≤ 3` at the optimum.
    ThermalTimeShort(f64),
    /// `z ≥ 0.3`, outside the small-z series.
    SeriesParameterLarge(f64),
}

/// The qubit state after encoding, `ρ = ½(I + w·σ)`.
///
/// The coherence `ρ_eg = e^{-Γ}/2` is real, so `w = (e^{-Γ}, 0, 0)` and
/// `⟨σ_x⟩ = e^{-Γ}`. Writing `(e^{-Γ}, e^{-Γ}, 0)` instead would give
/// `|w| > 1` for `Γ < ln √2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeState {
    pub gamma: f64,
    pub bloch: [f64; 3],
    /// `|ρ_eg| = e^{-Γ}/2`.
    pub coherence: f64,
}

impl ProbeState {
    pub fn from_gamma(gamma: f64) -> Result<Self> {
        ensure_non_negative("gamma", gamma)?;
        let decay = (-gamma).exp();
        Ok(Self {
            gamma,
            bloch: [decay, 0.0, 0.0],
            coherence: 0.5 * decay,
        })
    }

    /// Eigen-decomposition-free 2×2 density matrix `[[ρ_gg, ρ_ge], [ρ_eg, ρ_ee]]`.
    pub fn density_matrix(&self) -> [[f64; 2]; 2] {
        [[0.5, self.coherence], [self.coherence, 0.5]]
    }
}

/// Integrand in oscillator units; one component (Γ).
struct OscillatorUnits {
    p_tilde: f64,
    alpha: f64,
    half_sigma2: f64,
    sigma2: f64,
    phase: f64,
    inv_2temp: f64,
    ceiling: f64,
}

impl OscillatorUnits {
    fn new(t: f64, temperature: f64, d: &DerivedParams, k_max: f64) -> Result<Self> {
        let dl = dimensionless(t, temperature, d)?;
        let sigma = d.config.sigma;
        Ok(Self {
            p_tilde: d.p_tilde,
            alpha: d.alpha,
            half_sigma2: 0.5 * sigma * sigma,
            sigma2: sigma * sigma,
            phase: dl.t_tilde / (2.0 * dl.temp_tilde),
            inv_2temp: 1.0 / (2.0 * dl.temp_tilde),
            ceiling: k_max,
        })
    }

    /// `k̃ → 0` limit `P̃ t̃² / (4 α T̃)`.
    fn at_origin(&self) -> f64 {
        self.p_tilde * self.phase * self.phase / (2.0 * self.alpha * self.inv_2temp)
    }
}

impl PhaseIntegrand<1> for OscillatorUnits {
    #[inline]
    fn eval(&self, k: f64) -> [f64; 1] {
        if k == 0.0 {
            return [self.at_origin()];
        }
        let k2 = k * k;
        let s = k2 + 2.0 * self.alpha;
        let eps = k * s.sqrt();
        let envelope = self.p_tilde * (-self.half_sigma2 * k2).exp() / (eps * s);
        let sn = (eps * self.phase).sin();
        let (coth, _) = coth_csch2(eps * self.inv_2temp);
        [envelope * sn * sn * coth]
    }

    fn abscissa_at_phase(&self, theta: f64) -> f64 {
        let eps = theta / self.phase;
        let k2 = eps * eps / (self.alpha + (self.alpha * self.alpha + eps * eps).sqrt());
        k2.sqrt()
    }

    fn tail_bound(&self, k: f64) -> [f64; 1] {
        if k == 0.0 {
            return [f64::INFINITY];
        }
        let eps = k * (k * k + 2.0 * self.alpha).sqrt();
        let (coth, _) = coth_csch2(eps * self.inv_2temp);
        [self.p_tilde * coth * (-self.half_sigma2 * k * k).exp() / (self.sigma2 * k.powi(5))]
    }

    fn scale(&self) -> [f64; 1] {
        [1.0]
    }

    fn ceiling(&self) -> f64 {
        self.ceiling
    }
}

/// Integrand in SI variables; components (Γ, ∂_TΓ).
struct SiUnits {
    p: f64,
    hbar2_over_2m: f64,
    mean_field: f64,
    half_ell_a2: f64,
    ell_a2: f64,
    phase: f64,
    inv_2kt: f64,
    temperature: f64,
    ceiling: f64,
}

impl SiUnits {
    fn new(t: f64, temperature: f64, d: &DerivedParams, k_tilde_max: f64) -> Self {
        Self {
            p: d.p,
            hbar2_over_2m: d.hbar2_over_2m(),
            mean_field: d.mean_field(),
            half_ell_a2: 0.5 * d.ell_a * d.ell_a,
            ell_a2: d.ell_a * d.ell_a,
            phase: t / (2.0 * HBAR),
            inv_2kt: 1.0 / (2.0 * K_B * temperature),
            temperature,
            ceiling: k_tilde_max / d.ell_b,
        }
    }
}

impl PhaseIntegrand<2> for SiUnits {
    #[inline]
    fn eval(&self, k: f64) -> [f64; 2] {
        if k == 0.0 {
            let g = self.p * self.phase * self.phase / (2.0 * self.mean_field * self.inv_2kt);
            return [g, g / self.temperature];
        }
        let e = self.hbar2_over_2m * k * k;
        let s = e + 2.0 * self.mean_field;
        let eps = (e * s).sqrt();
        let envelope = self.p * (-self.half_ell_a2 * k * k).exp() / (eps * s);
        let sn = (eps * self.phase).sin();
        let x = eps * self.inv_2kt;
        let (coth, csch2) = coth_csch2(x);
        let w = envelope * sn * sn;
        [w * coth, w * x * csch2 / self.temperature]
    }

    fn abscissa_at_phase(&self, theta: f64) -> f64 {
        let eps = theta / self.phase;
        let mf = self.mean_field;
        let e = eps * eps / (mf + (mf * mf + eps * eps).sqrt());
        (e / self.hbar2_over_2m).sqrt()
    }

    fn tail_bound(&self, k: f64) -> [f64; 2] {
        if k == 0.0 {
            return [f64::INFINITY; 2];
        }
        let e = self.hbar2_over_2m * k * k;
        let x = (e * (e + 2.0 * self.mean_field)).sqrt() * self.inv_2kt;
        let (coth, csch2) = coth_csch2(x);
        let c = self.p / (self.hbar2_over_2m * self.hbar2_over_2m)
            * (-self.half_ell_a2 * k * k).exp()
            / (self.ell_a2 * k.powi(5));
        [c * coth, c * x * csch2 / self.temperature]
    }

    fn scale(&self) -> [f64; 2] {
        [1.0, 1.0 / self.temperature]
    }

    fn ceiling(&self) -> f64 {
        self.ceiling
    }
}

fn check_time_temp(t: f64, temperature: f64) -> Result<()> {
    ensure_non_negative("t", t)?;
    ensure_positive("T", temperature)?;
    Ok(())
}

/// Γ(t, T) by quadrature in oscillator units.
pub fn gamma_numeric(
    t: f64,
    temperature: f64,
    d: &DerivedParams,
    q: &QuadratureSpec,
) -> Result<f64> {
    gamma_numeric_in(t, temperature, d, q, Parameterization::Dimensionless)
}

/// Γ(t, T) by quadrature in the chosen variables.
pub fn gamma_numeric_in(
    t: f64,
    temperature: f64,
    d: &DerivedParams,
    q: &QuadratureSpec,
    parameterization: Parameterization,
) -> Result<f64> {
    check_time_temp(t, temperature)?;
    let k_max = q.resolved_k_tilde_max(d.config.sigma)?;
    if t == 0.0 {
        return Ok(0.0);
    }
    match parameterization {
        Parameterization::Dimensionless => {
            let f = OscillatorUnits::new(t, temperature, d, k_max)?;
            Ok(integrate_phase(&f, q.tolerances())?.value[0])
        }
        Parameterization::Physical => {
            let f = SiUnits::new(t, temperature, d, k_max);
            Ok(integrate_phase(&f, q.tolerances())?.value[0])
        }
    }
}

/// `(Γ, ∂_TΓ)` from a single pass over the SI integrand. `∂_TΓ` is in 1/K.
pub fn gamma_with_derivative(
    t: f64,
    temperature: f64,
    d: &DerivedParams,
    q: &QuadratureSpec,
) -> Result<(f64, f64)> {
    check_time_temp(t, temperature)?;
    let k_max = q.resolved_k_tilde_max(d.config.sigma)?;
    if t == 0.0 {
        return Ok((0.0, 0.0));
    }
    let f = SiUnits::new(t, temperature, d, k_max);
    let out = integrate_phase(&f, q.tolerances())?;
    Ok((out.value[0], out.value[1]))
}

/// `∂Γ/∂T`, 1/K, using `∂_T coth(ε/2k_BT) = (ε/2k_BT²) csch²(ε/2k_BT)`.
pub fn dgamma_dt_numeric(
    t: f64,
    temperature: f64,
    d: &DerivedParams,
    q: &QuadratureSpec,
) -> Result<f64> {
    Ok(gamma_with_derivative(t, temperature, d, q)?.1)
}

/// `π ω_T t`, the thermal argument of the Ohmic closed form.
#[inline]
fn thermal_arg(t: f64, temperature: f64) -> f64 {
    PI * omega_t(temperature) * t
}

/// Warning when the Ohmic closed form is used without `ω_c ≫ ω_T`.
pub fn ohmic_regime_warning(temperature: f64, d: &DerivedParams) -> Option<RegimeWarning> {
    let ratio = d.omega_c / omega_t(temperature);
    (ratio <= 10.0).then_some(RegimeWarning::CutoffNotFarAboveThermal(ratio))
}

/// Closed-form Γ̄ for the exponential-cutoff Ohmic bath, evaluated in the log
/// domain so it stays finite for `π ω_T t` in the thousands.
pub fn gamma_ohmic(t: f64, temperature: f64, d: &DerivedParams) -> Result<f64> {
    check_time_temp(t, temperature)?;
    let wc_t = d.omega_c * t;
    Ok(0.5 * d.eta * (wc_t * wc_t).ln_1p() + d.eta * ln_sinhc(thermal_arg(t, temperature)))
}

/// `∂_TΓ̄ = (η/T)[x coth x − 1]`, `x = π ω_T t`.
pub fn dgamma_ohmic_dt(t: f64, temperature: f64, d: &DerivedParams) -> Result<f64> {
    check_time_temp(t, temperature)?;
    Ok(d.eta / temperature * x_coth_x_minus_1(thermal_arg(t, temperature)))
}
