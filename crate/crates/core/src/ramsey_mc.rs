//! Simulated σ_x measurements and maximum-likelihood thermometry.
//!
//! # Random numbers
//!
//! Every draw comes from ChaCha8 (`rand_chacha::ChaCha8Rng`). The 32-byte key
//! is `seed` (little-endian u64) followed by `ν` (little-endian u64) and 16
//! zero bytes; the stream number is the trial index. A shot is `+1` when
//! `(next_u64 >> 11)·2⁻⁵³ < p₊` with `p₊ = (1 + e^{-Γ})/2`. Any
//! implementation of ChaCha8 reproduces the same counts.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dephasing::{gamma_numeric, gamma_with_derivative, QuadratureSpec};
use crate::error::{ensure_non_negative, ensure_positive, Error, Result};
use crate::metrology::relative_error;
use crate::optimizer::{find_topt_numeric, GammaSource};
use crate::params::{omega_t, DerivedParams};

/// Outcome counts from `ν` σ_x measurements at encoding time `t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShotRecord {
    /// s, stored as raw bits so the record stays `Eq`.
    t_bits: u64,
    pub nu: u64,
    pub n_plus: u64,
    pub seed: u64,
}

impl ShotRecord {
    pub fn new(t: f64, nu: u64, n_plus: u64, seed: u64) -> Result<Self> {
        ensure_non_negative("t", t)?;
        if nu == 0 {
            return Err(Error::invalid("nu", 0.0, "need at least one shot"));
        }
        if n_plus > nu {
            return Err(Error::invalid("n_plus", n_plus as f64, "cannot exceed nu"));
        }
        Ok(Self {
            t_bits: t.to_bits(),
            nu,
            n_plus,
            seed,
        })
    }

    pub fn t(&self) -> f64 {
        f64::from_bits(self.t_bits)
    }

    pub fn p_hat(&self) -> f64 {
        self.n_plus as f64 / self.nu as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateStatus {
    Ok,
    /// `Γ̂` lies outside the Γ range of the bracket; `T̂` is the nearer end.
    Clipped,
    /// `p̂ ≤ 1/2`, or `t = 0`, so no temperature reproduces the data.
    Unidentifiable,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateRecord {
    /// K.
    pub t_hat: Option<f64>,
    pub gamma_hat: Option<f64>,
    pub status: EstimateStatus,
}

impl EstimateRecord {
    fn unidentifiable(gamma_hat: Option<f64>) -> Self {
        Self {
            t_hat: None,
            gamma_hat,
            status: EstimateStatus::Unidentifiable,
        }
    }
}

/// Temperature search interval for the likelihood inversion, K.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
}

impl Default for Bracket {
    fn default() -> Self {
        Self {
            lo: 1e-12,
            hi: 1e-7,
        }
    }
}

fn rng_for(seed: u64, nu: u64, stream: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&nu.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(stream);
    rng
}

/// Probability of the `+1` outcome of σ_x.
pub fn p_plus(gamma: f64) -> f64 {
    0.5 * (1.0 + (-gamma).exp())
}

/// Count `+1` outcomes in `nu` shots with dephasing `gamma`, using stream
/// `stream` of the generator keyed by `(seed, nu)`.
pub fn draw_counts(gamma: f64, nu: u64, seed: u64, stream: u64) -> u64 {
    let p = p_plus(gamma);
    let mut rng = rng_for(seed, nu, stream);
    const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
    (0..nu)
        .filter(|_| ((rng.next_u64() >> 11) as f64 * SCALE) < p)
        .count() as u64
}

/// Simulate `nu` measurements at `(t, T_true)` with Γ from quadrature.
pub fn simulate_shots(
    t: f64,
    t_true: f64,
    nu: u64,
    seed: u64,
    d: &DerivedParams,
) -> Result<ShotRecord> {
    let gamma = gamma_numeric(t, t_true, d, &QuadratureSpec::default())?;
    ShotRecord::new(t, nu, draw_counts(gamma, nu, seed, 0), seed)
}

/// `Γ̂ = -ln(2p̂ - 1)`, or `None` when `p̂ ≤ 1/2`.
pub fn gamma_hat(rec: &ShotRecord) -> Option<f64> {
    let p = rec.p_hat();
    (p > 0.5).then(|| -(2.0 * p - 1.0).ln())
}

/// Maximum-likelihood temperature for one shot record, default quadrature
/// and bracket.
pub fn mle_temperature(rec: &ShotRecord, d: &DerivedParams) -> Result<EstimateRecord> {
    TemperatureInverter::new(rec.t(), d, QuadratureSpec::default(), Bracket::default())?
        .estimate(rec)
}

/// Relative tolerance on Γ for the root of `Γ(t, T) = Γ̂`.
pub const ROOT_TOL: f64 = 1e-8;

/// Node spacing in `ln T` for [`TemperatureInverter::with_table`].
const TABLE_STEP: f64 = 0.04;

/// Inverts `T ↦ Γ(t, T)` at a fixed encoding time.
///
/// Each inversion is a safeguarded Newton iteration in `ln T` on the exact
/// quadrature. An optional cubic Hermite table in `ln T`, built from exact
/// values and derivatives, answers queries inside its range without further
/// quadrature; its accuracy is checked against the quadrature at interval
/// midpoints when it is built.
pub struct TemperatureInverter<'a> {
    t: f64,
    d: &'a DerivedParams,
    q: QuadratureSpec,
    bracket: Bracket,
    gamma_lo: f64,
    gamma_hi: f64,
    table: Option<Table>,
}

struct Table {
    u: Vec<f64>,
    g: Vec<f64>,
    /// `dΓ/d ln T`.
    dg: Vec<f64>,
}

impl Table {
    fn locate(&self, target: f64) -> Option<usize> {
        let n = self.g.len();
        if !(target >= self.g[0] && target <= self.g[n - 1]) {
            return None;
        }
        let i = self.g.partition_point(|&g| g <= target);
        Some(i.clamp(1, n - 1) - 1)
    }

    fn hermite(&self, i: usize, u: f64) -> (f64, f64) {
        let h = self.u[i + 1] - self.u[i];
        let s = (u - self.u[i]) / h;
        let (g0, g1) = (self.g[i], self.g[i + 1]);
        let (m0, m1) = (self.dg[i] * h, self.dg[i + 1] * h);
        let s2 = s * s;
        let s3 = s2 * s;
        let value = (2.0 * s3 - 3.0 * s2 + 1.0) * g0
            + (s3 - 2.0 * s2 + s) * m0
            + (-2.0 * s3 + 3.0 * s2) * g1
            + (s3 - s2) * m1;
        let slope = ((6.0 * s2 - 6.0 * s) * g0
            + (3.0 * s2 - 4.0 * s + 1.0) * m0
            + (-6.0 * s2 + 6.0 * s) * g1
            + (3.0 * s2 - 2.0 * s) * m1)
            / h;
        (value, slope)
    }

    fn invert(&self, target: f64) -> Option<f64> {
        let i = self.locate(target)?;
        let (mut a, mut b) = (self.u[i], self.u[i + 1]);
        let mut u = a + (b - a) * (target - self.g[i]) / (self.g[i + 1] - self.g[i]);
        for _ in 0..60 {
            let (v, slope) = self.hermite(i, u);
            let r = v - target;
            if r.abs() <= 1e-14 * target.abs() {
                break;
            }
            if r < 0.0 {
                a = u;
            } else {
                b = u;
            }
            let next = u - r / slope;
            u = if next > a && next < b {
                next
            } else {
                0.5 * (a + b)
            };
            if b - a < 1e-15 {
                break;
            }
        }
        Some(u.exp())
    }
}

impl<'a> TemperatureInverter<'a> {
    pub fn new(t: f64, d: &'a DerivedParams, q: QuadratureSpec, bracket: Bracket) -> Result<Self> {
        ensure_non_negative("t", t)?;
        ensure_positive("bracket.lo", bracket.lo)?;
        if !(bracket.hi.is_finite() && bracket.hi > bracket.lo) {
            return Err(Error::invalid(
                "bracket.hi",
                bracket.hi,
                "must exceed bracket.lo",
            ));
        }
        let gamma_lo = gamma_numeric(t, bracket.lo, d, &q)?;
        let gamma_hi = gamma_numeric(t, bracket.hi, d, &q)?;
        Ok(Self {
            t,
            d,
            q,
            bracket,
            gamma_lo,
            gamma_hi,
            table: None,
        })
    }

    /// Tabulate `Γ` on `[T_center/span, T_center·span]` (clipped to the
    /// bracket). Fails if the interpolant misses the quadrature by more than
    /// `ROOT_TOL` at any interval midpoint.
    pub fn with_table(mut self, t_center: f64, span: f64) -> Result<Self> {
        ensure_positive("t_center", t_center)?;
        if !(span.is_finite() && span > 1.0) {
            return Err(Error::invalid("span", span, "must exceed 1"));
        }
        if self.t == 0.0 {
            return Ok(self);
        }
        let u0 = (t_center / span).max(self.bracket.lo).ln();
        let u1 = (t_center * span).min(self.bracket.hi).ln();
        let n = ((u1 - u0) / TABLE_STEP).ceil().max(1.0) as usize;
        let nodes: Vec<f64> = (0..=n)
            .map(|i| u0 + (u1 - u0) * i as f64 / n as f64)
            .collect();
        let points = nodes
            .par_iter()
            .map(|&u| {
                let temp = u.exp();
                gamma_with_derivative(self.t, temp, self.d, &self.q).map(|(g, dg)| (g, dg * temp))
            })
            .collect::<Result<Vec<_>>>()?;
        let table = Table {
            u: nodes,
            g: points.iter().map(|p| p.0).collect(),
            dg: points.iter().map(|p| p.1).collect(),
        };
        let checks: Vec<usize> = [0, n / 3, 2 * n / 3, n - 1].into_iter().collect();
        for i in checks {
            let um = 0.5 * (table.u[i] + table.u[i + 1]);
            let exact = gamma_with_derivative(self.t, um.exp(), self.d, &self.q)?.0;
            let approx = table.hermite(i, um).0;
            if (approx - exact).abs() > ROOT_TOL * exact {
                return Err(Error::NonConvergence {
                    what: "temperature table",
                    detail: format!(
                        "interpolation error {} at T = {}",
                        (approx - exact).abs() / exact,
                        um.exp()
                    ),
                });
            }
        }
        self.table = Some(table);
        Ok(self)
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// `Γ` at the bracket ends.
    pub fn gamma_range(&self) -> (f64, f64) {
        (self.gamma_lo, self.gamma_hi)
    }

    pub fn estimate(&self, rec: &ShotRecord) -> Result<EstimateRecord> {
        if rec.t() != self.t {
            return Err(Error::InvalidState(format!(
                "record at t = {} given to an inverter built for t = {}",
                rec.t(),
                self.t
            )));
        }
        if self.t == 0.0 {
            return Ok(EstimateRecord::unidentifiable(gamma_hat(rec)));
        }
        let Some(g) = gamma_hat(rec) else {
            return Ok(EstimateRecord::unidentifiable(None));
        };
        self.invert(g).map(|(t_hat, status)| EstimateRecord {
            t_hat: Some(t_hat),
            gamma_hat: Some(g),
            status,
        })
    }

    /// Solve `Γ(t, T) = target`.
    pub fn invert(&self, target: f64) -> Result<(f64, EstimateStatus)> {
        if target <= self.gamma_lo {
            return Ok((self.bracket.lo, EstimateStatus::Clipped));
        }
        if target >= self.gamma_hi {
            return Ok((self.bracket.hi, EstimateStatus::Clipped));
        }
        if let Some(temp) = self.table.as_ref().and_then(|tab| tab.invert(target)) {
            return Ok((temp, EstimateStatus::Ok));
        }
        self.newton(target).map(|temp| (temp, EstimateStatus::Ok))
    }

    fn newton(&self, target: f64) -> Result<f64> {
        let (mut a, mut b) = (self.bracket.lo.ln(), self.bracket.hi.ln());
        let mut u = 0.5 * (a + b);
        for _ in 0..200 {
            let temp = u.exp();
            let (g, dg) = gamma_with_derivative(self.t, temp, self.d, &self.q)?;
            let r = g - target;
            if r.abs() <= ROOT_TOL * target {
                return Ok(temp);
            }
            if r < 0.0 {
                a = u;
            } else {
                b = u;
            }
            if b - a < 1e-13 {
                return Ok(temp);
            }
            let next = u - r / (dg * temp);
            u = if next > a && next < b {
                next
            } else {
                0.5 * (a + b)
            };
        }
        Err(Error::NonConvergence {
            what: "temperature inversion",
            detail: format!("no root for gamma = {target} after 200 steps"),
        })
    }
}

/// One row of [`crb_study`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrbRow {
    pub nu: u64,
    pub trials: u64,
    /// K, over identifiable trials.
    pub mean_t_hat: f64,
    /// K.
    pub median_t_hat: f64,
    /// `std(T̂)/T_true` over identifiable trials.
    pub rel_std: f64,
    /// `1/√(ν·Q_opt)`.
    pub crb_rel_error: f64,
    pub unidentifiable_frac: f64,
    pub clipped_frac: f64,
}

impl CrbRow {
    pub const COLUMNS: [&'static str; 8] = [
        "nu",
        "trials",
        "mean_T_hat",
        "rel_std",
        "crb_rel_error",
        "unidentifiable_frac",
        "median_T_hat",
        "clipped_frac",
    ];

    /// Values in [`CrbRow::COLUMNS`] order.
    pub fn values(&self) -> [f64; 8] {
        [
            self.nu as f64,
            self.trials as f64,
            self.mean_t_hat,
            self.rel_std,
            self.crb_rel_error,
            self.unidentifiable_frac,
            self.median_t_hat,
            self.clipped_frac,
        ]
    }

    /// `rel_std / crb_rel_error`; 1 means the bound is saturated.
    pub fn efficiency_ratio(&self) -> f64 {
        self.rel_std / self.crb_rel_error
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrbStudy {
    /// K.
    pub t_true: f64,
    /// s.
    pub t_opt: f64,
    pub omega_t_t_opt: f64,
    pub q_opt: f64,
    pub rows: Vec<CrbRow>,
}

/// Repeat the measure-and-estimate cycle `trials` times for every `ν` at the
/// numerically optimal encoding time for `T_true`.
pub fn crb_study(
    t_true: f64,
    nu_list: &[u64],
    trials: u64,
    seed: u64,
    d: &DerivedParams,
) -> Result<CrbStudy> {
    crb_study_with(t_true, nu_list, trials, seed, d, &QuadratureSpec::default())
}

pub fn crb_study_with(
    t_true: f64,
    nu_list: &[u64],
    trials: u64,
    seed: u64,
    d: &DerivedParams,
    q: &QuadratureSpec,
) -> Result<CrbStudy> {
    ensure_positive("T_true", t_true)?;
    if trials < 100 {
        return Err(Error::invalid(
            "trials",
            trials as f64,
            "need at least 100 trials",
        ));
    }
    if nu_list.is_empty() || nu_list.contains(&0) {
        return Err(Error::invalid(
            "nu",
            0.0,
            "need a non-empty list of positive counts",
        ));
    }
    let opt = find_topt_numeric(t_true, d, GammaSource::Numeric, q)?;
    let gamma_true = gamma_numeric(opt.t_opt, t_true, d, q)?;
    let inverter =
        TemperatureInverter::new(opt.t_opt, d, *q, Bracket::default())?.with_table(t_true, 3.0)?;

    let mut rows = Vec::with_capacity(nu_list.len());
    for &nu in nu_list {
        let estimates = (0..trials)
            .into_par_iter()
            .map(|trial| {
                let n_plus = draw_counts(gamma_true, nu, seed, trial);
                inverter.estimate(&ShotRecord::new(opt.t_opt, nu, n_plus, seed)?)
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(summarize(&estimates, nu, t_true, opt.q_opt));
    }
    Ok(CrbStudy {
        t_true,
        t_opt: opt.t_opt,
        omega_t_t_opt: opt.t_opt * omega_t(t_true),
        q_opt: opt.q_opt,
        rows,
    })
}

fn summarize(estimates: &[EstimateRecord], nu: u64, t_true: f64, q_opt: f64) -> CrbRow {
    let trials = estimates.len();
    let mut values: Vec<f64> = estimates.iter().filter_map(|e| e.t_hat).collect();
    let clipped = estimates
        .iter()
        .filter(|e| e.status == EstimateStatus::Clipped)
        .count();
    let k = values.len();
    let (mean, median, rel_std) = if k == 0 {
        (f64::NAN, f64::NAN, f64::NAN)
    } else {
        let mean = values.iter().sum::<f64>() / k as f64;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k.max(2) - 1) as f64;
        values.sort_by(f64::total_cmp);
        let median = if k % 2 == 1 {
            values[k / 2]
        } else {
            0.5 * (values[k / 2 - 1] + values[k / 2])
        };
        (mean, median, var.sqrt() / t_true)
    };
    CrbRow {
        nu,
        trials: trials as u64,
        mean_t_hat: mean,
        median_t_hat: median,
        rel_std,
        crb_rel_error: relative_error(q_opt, nu),
        unidentifiable_frac: (trials - k) as f64 / trials as f64,
        clipped_frac: clipped as f64 / trials as f64,
    }
}
