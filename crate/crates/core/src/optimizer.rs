//! Optimal encoding time and the weak-coupling closed forms for it.
//!
//! Three routes to the optimum are available. [`find_topt_numeric`] maximizes
//! the QSNR directly, with Γ from quadrature or from the Ohmic closed form.
//! [`solve_topt_transcendental`] solves the stationarity condition of the
//! Ohmic QSNR in the large-`πω_T t` limit. [`series_optimum`] uses the
//! small-`z` expansion around a reference temperature.

use std::f64::consts::{E, PI};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::constants::NANOKELVIN;
use crate::dephasing::{
    dgamma_ohmic_dt, gamma_ohmic, gamma_with_derivative, ohmic_regime_warning, QuadratureSpec,
    RegimeWarning,
};
use crate::error::{ensure_positive, Error, Result};
use crate::metrology::{dephasing_qfi, qsnr};
use crate::params::{omega_t, DerivedParams};

/// Default expansion temperature for [`approx_r`].
pub const DEFAULT_T0: f64 = 0.5 * NANOKELVIN;

/// Largest `z` for which the cubic series is trusted.
pub const SERIES_Z_MAX: f64 = 0.3;

/// Where Γ and ∂_TΓ come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum GammaSource {
    /// Quadrature of the exact integral.
    #[default]
    Numeric,
    /// Exponential-cutoff Ohmic closed form.
    Ohmic,
}

impl fmt::Display for GammaSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GammaSource::Numeric => "numeric",
            GammaSource::Ohmic => "ohmic",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Direct maximization of the QSNR.
    Numeric(GammaSource),
    /// Fixed point of the Ohmic stationarity condition.
    Transcendental,
    /// Small-`z` expansion.
    Series,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Numeric(GammaSource::Numeric) => f.write_str("numeric"),
            Method::Numeric(GammaSource::Ohmic) => f.write_str("numeric_ohmic"),
            Method::Transcendental => f.write_str("transcendental"),
            Method::Series => f.write_str("series"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimalPoint {
    /// s.
    pub t_opt: f64,
    pub omega_t_t_opt: f64,
    pub q_opt: f64,
    pub method: Method,
    pub warnings: Vec<RegimeWarning>,
}

/// Γ, ∂_TΓ and the resulting QSNR at one `(t, T)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QsnrPoint {
    pub gamma: f64,
    /// 1/K.
    pub dgamma: f64,
    /// 1/K².
    pub qfi: f64,
    pub qsnr: f64,
}

pub fn evaluate(
    t: f64,
    temperature: f64,
    d: &DerivedParams,
    source: GammaSource,
    q: &QuadratureSpec,
) -> Result<QsnrPoint> {
    let (gamma, dgamma) = match source {
        GammaSource::Numeric => gamma_with_derivative(t, temperature, d, q)?,
        GammaSource::Ohmic => (
            gamma_ohmic(t, temperature, d)?,
            dgamma_ohmic_dt(t, temperature, d)?,
        ),
    };
    let qfi = dephasing_qfi(gamma, dgamma)?;
    Ok(QsnrPoint {
        gamma,
        dgamma,
        qfi,
        qsnr: qsnr(temperature, qfi),
    })
}

/// Bracketing and refinement settings for [`find_topt_with`], in units of
/// `ω_T t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeSearch {
    pub lo: f64,
    pub hi: f64,
    pub factor: f64,
    pub rel_tol: f64,
}

impl Default for TimeSearch {
    fn default() -> Self {
        Self {
            lo: 0.1,
            hi: 200.0,
            factor: 1.5,
            rel_tol: 1e-6,
        }
    }
}

impl TimeSearch {
    fn grid(&self) -> Vec<f64> {
        let mut xs = Vec::new();
        let mut x = self.lo;
        while x < self.hi {
            xs.push(x);
            x *= self.factor;
        }
        xs.push(self.hi);
        xs
    }
}

/// Maximize the QSNR over the encoding time with default search settings.
pub fn find_topt_numeric(
    temperature: f64,
    d: &DerivedParams,
    source: GammaSource,
    q: &QuadratureSpec,
) -> Result<OptimalPoint> {
    find_topt_with(temperature, d, source, q, &TimeSearch::default())
}

pub fn find_topt_with(
    temperature: f64,
    d: &DerivedParams,
    source: GammaSource,
    q: &QuadratureSpec,
    search: &TimeSearch,
) -> Result<OptimalPoint> {
    ensure_positive("T", temperature)?;
    ensure_positive("search.lo", search.lo)?;
    ensure_positive("search.rel_tol", search.rel_tol)?;
    if !(search.hi > search.lo && search.factor > 1.0) {
        return Err(Error::invalid(
            "search",
            search.hi,
            "need hi > lo and factor > 1",
        ));
    }
    let wt = omega_t(temperature);
    let objective =
        |x: f64| -> Result<f64> { Ok(evaluate(x / wt, temperature, d, source, q)?.qsnr) };

    let xs = search.grid();
    let mut qs = Vec::with_capacity(xs.len());
    for &x in &xs {
        qs.push(objective(x)?);
    }
    let best = (0..xs.len())
        .max_by(|&i, &j| qs[i].total_cmp(&qs[j]))
        .expect("grid is never empty");
    if best == xs.len() - 1 {
        return Err(Error::NonConvergence {
            what: "optimal time search",
            detail: format!("QSNR still increasing at omega_T t = {}", search.hi),
        });
    }
    let a = if best == 0 { 0.0 } else { xs[best - 1] };
    let b = xs[best + 1];
    let (x, q_opt) = golden_max(&objective, a, b, search.rel_tol)?;

    let mut warnings = Vec::new();
    if source == GammaSource::Ohmic {
        warnings.extend(ohmic_regime_warning(temperature, d));
    }
    Ok(OptimalPoint {
        t_opt: x / wt,
        omega_t_t_opt: x,
        q_opt,
        method: Method::Numeric(source),
        warnings,
    })
}

/// Golden-section maximization of a unimodal function on `[a, b]`, stopping
/// when the bracket is narrower than `rel_tol` times its midpoint.
pub(crate) fn golden_max<F>(f: &F, mut a: f64, mut b: f64, rel_tol: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut e = a + INV_PHI * (b - a);
    let mut fc = f(c)?;
    let mut fe = f(e)?;
    while b - a > rel_tol * 0.5 * (a + b) {
        if fc >= fe {
            b = e;
            e = c;
            fe = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = e;
            fc = fe;
            e = a + INV_PHI * (b - a);
            fe = f(e)?;
        }
    }
    Ok(if fc >= fe { (c, fc) } else { (e, fe) })
}

/// `ζ_T = ω_c/(2π ω_T)`.
pub fn zeta(temperature: f64, d: &DerivedParams) -> f64 {
    d.omega_c / (2.0 * PI * omega_t(temperature))
}

fn closed_form_warnings(x: f64, temperature: f64, d: &DerivedParams) -> Vec<RegimeWarning> {
    let wc_t = d.omega_c * x / omega_t(temperature);
    let mut out: Vec<_> = ohmic_regime_warning(temperature, d).into_iter().collect();
    if wc_t <= 10.0 {
        out.push(RegimeWarning::CutoffTimeShort(wc_t));
    }
    if PI * x <= 3.0 {
        out.push(RegimeWarning::ThermalTimeShort(PI * x));
    }
    out
}

/// Solve `x = (1/πη)(1 - ζ^{-2η} e^{-2πηx})` for `x = ω_T t̄_opt`.
///
/// The QSNR reported is the Ohmic closed form evaluated at the root.
pub fn solve_topt_transcendental(temperature: f64, d: &DerivedParams) -> Result<OptimalPoint> {
    ensure_positive("T", temperature)?;
    if d.eta >= 0.5 {
        return Err(Error::OutOfRegime(format!(
            "eta = {} must be below 0.5 for the transcendental optimum",
            d.eta
        )));
    }
    let pe = PI * d.eta;
    let c = zeta(temperature, d).powf(-2.0 * d.eta);
    let map = |x: f64| (1.0 - c * (-2.0 * pe * x).exp()) / pe;

    let mut x = 1.0 / pe;
    let mut last_step = 0.0;
    let mut damping = 1.0;
    let mut converged = false;
    for _ in 0..1000 {
        let step = map(x) - x;
        if step * last_step < 0.0 {
            damping = 0.5;
        }
        let next = x + damping * step;
        last_step = step;
        if (next - x).abs() <= 1e-10 * next.abs() {
            x = next;
            converged = true;
            break;
        }
        x = next;
    }
    if !converged || !(x.is_finite() && x > 0.0) {
        return Err(Error::NonConvergence {
            what: "transcendental optimum",
            detail: format!("fixed point iteration stopped at x = {x}"),
        });
    }
    let t_opt = x / omega_t(temperature);
    let q_opt = evaluate(
        t_opt,
        temperature,
        d,
        GammaSource::Ohmic,
        &QuadratureSpec::default(),
    )?
    .qsnr;
    Ok(OptimalPoint {
        t_opt,
        omega_t_t_opt: x,
        q_opt,
        method: Method::Transcendental,
        warnings: closed_form_warnings(x, temperature, d),
    })
}

/// `z(T) = e^{-2}(2π ω_T/ω_c)^{2η}`.
pub fn z_of_t(temperature: f64, d: &DerivedParams) -> Result<f64> {
    ensure_positive("T", temperature)?;
    let ratio = 1.0 / zeta(temperature, d);
    if ratio >= 1.0 {
        return Err(Error::OutOfRegime(format!(
            "2 pi k_B T / (hbar omega_c) = {ratio} is not below 1"
        )));
    }
    Ok((-2.0f64).exp() * ratio.powf(2.0 * d.eta))
}

/// `R̄ = (1 - z(T₀) - 2z(T₀)²)/(πη)`, the temperature-independent estimate of
/// `ω_T t_opt`.
pub fn approx_r(d: &DerivedParams, t0: f64) -> Result<f64> {
    let z = z_of_t(t0, d)?;
    Ok((1.0 - z - 2.0 * z * z) / (PI * d.eta))
}

/// `(1 - 2η)z + (1 - 4η)z² + 2(1 - 6η)z³`.
pub fn qopt_series(z: f64, eta: f64) -> f64 {
    (1.0 - 2.0 * eta) * z + (1.0 - 4.0 * eta) * z * z + 2.0 * (1.0 - 6.0 * eta) * z * z * z
}

/// Optimal QSNR from the small-`z` series at temperature `T`.
pub fn approx_qopt(temperature: f64, d: &DerivedParams) -> Result<f64> {
    Ok(qopt_series(z_of_t(temperature, d)?, d.eta))
}

/// Series estimate of the optimum: `ω_T t_opt = R̄(T₀)` and `Q_opt` from the
/// cubic in `z(T)`.
pub fn series_optimum(temperature: f64, d: &DerivedParams, t0: f64) -> Result<OptimalPoint> {
    let z = z_of_t(temperature, d)?;
    let x = approx_r(d, t0)?;
    let mut warnings = closed_form_warnings(x, temperature, d);
    if z >= SERIES_Z_MAX {
        warnings.push(RegimeWarning::SeriesParameterLarge(z));
    }
    Ok(OptimalPoint {
        t_opt: x / omega_t(temperature),
        omega_t_t_opt: x,
        q_opt: qopt_series(z, d.eta),
        method: Method::Series,
        warnings,
    })
}

/// `η → 0` limit of the series optimum: `e^{-2} + e^{-4} + 2e^{-6}`.
pub fn qsnr_upper_bound() -> f64 {
    let z = E.powi(-2);
    z + z * z + 2.0 * z * z * z
}
