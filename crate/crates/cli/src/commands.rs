use std::collections::BTreeMap;

use bec_thermo::constants::{NANOKELVIN, NANOMETRE};
use bec_thermo::dephasing::{
    gamma_numeric, gamma_ohmic, ProbeState, QuadratureSpec, RegimeWarning,
};
use bec_thermo::metrology::relative_error;
use bec_thermo::optimizer::{
    evaluate, find_topt_numeric, series_optimum, solve_topt_transcendental, GammaSource, Method,
    OptimalPoint,
};
use bec_thermo::params::{derive, omega_t, DerivedParams, PhysicalConfig};
use bec_thermo::ramsey_mc::{crb_study_with, CrbRow};
use rayon::prelude::*;
use serde_json::json;

use crate::error::{CliError, Result};
use crate::output::{config_sha256, Cell, Meta, ScanResult};
use crate::{MethodArg, Sweep};

pub const DEFAULT_SEED: u64 = 20240611;

pub struct Context {
    config: PhysicalConfig,
    quadrature: QuadratureSpec,
    seed: Option<u64>,
    args: Vec<String>,
}

fn positive(name: &str, values: &[f64]) -> Result<()> {
    match values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
        Some(v) => Err(CliError::Usage(format!("{name} must be positive, got {v}"))),
        None => Ok(()),
    }
}

fn non_negative(name: &str, values: &[f64]) -> Result<()> {
    match values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
        Some(v) => Err(CliError::Usage(format!(
            "{name} must be non-negative, got {v}"
        ))),
        None => Ok(()),
    }
}

fn columns(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn warning_text(w: &RegimeWarning) -> String {
    let (kind, v) = match w {
        RegimeWarning::CutoffNotFarAboveThermal(v) => ("cutoff_not_far_above_thermal", v),
        RegimeWarning::CutoffTimeShort(v) => ("cutoff_time_short", v),
        RegimeWarning::ThermalTimeShort(v) => ("thermal_time_short", v),
        RegimeWarning::SeriesParameterLarge(v) => ("series_parameter_large", v),
    };
    format!("{kind}={v}")
}

fn status(p: &OptimalPoint) -> String {
    if p.warnings.is_empty() {
        "ok".into()
    } else {
        let w: Vec<String> = p.warnings.iter().map(warning_text).collect();
        format!("warning: {}", w.join("; "))
    }
}

impl Context {
    pub fn new(
        config: PhysicalConfig,
        quadrature: QuadratureSpec,
        seed: Option<u64>,
        args: Vec<String>,
    ) -> Self {
        Self {
            config,
            quadrature,
            seed,
            args,
        }
    }

    fn meta(
        &self,
        command: &str,
        config: &PhysicalConfig,
        d: &DerivedParams,
        seed: Option<u64>,
    ) -> Meta {
        let units = BTreeMap::from([
            ("config", "SI"),
            ("temperature", "nK"),
            ("a_AB", "nm"),
            ("omega_T_t", "dimensionless"),
            ("time", "s"),
            ("qfi", "1/K^2"),
        ]);
        Meta {
            tool: env!("CARGO_PKG_NAME"),
            tool_version: env!("CARGO_PKG_VERSION"),
            command: command.into(),
            config: *config,
            config_sha256: config_sha256(config),
            eta: d.eta,
            seed,
            quadrature: self.quadrature,
            units,
            args: self.args.clone(),
            extra: serde_json::Value::Null,
        }
    }

    pub fn qsnr_scan(
        &self,
        temps_nk: &[f64],
        times: &[f64],
        source: GammaSource,
    ) -> Result<ScanResult> {
        positive("temperature", temps_nk)?;
        non_negative("omega_T t", times)?;
        let d = derive(&self.config)?;
        let grid: Vec<(f64, f64)> = temps_nk
            .iter()
            .flat_map(|&tn| times.iter().map(move |&x| (tn, x)))
            .collect();
        let rows = grid
            .par_iter()
            .map(|&(tn, x)| {
                let temp = tn * NANOKELVIN;
                let t = x / omega_t(temp);
                let p = evaluate(t, temp, &d, source, &self.quadrature)?;
                Ok(vec![
                    Cell::Num(tn),
                    Cell::Num(x),
                    Cell::Num(t),
                    Cell::Num(p.gamma),
                    Cell::Num(p.qfi),
                    Cell::Num(p.qsnr),
                ])
            })
            .collect::<Result<Vec<_>>>()?;
        let mut meta = self.meta("qsnr-scan", &self.config, &d, self.seed);
        meta.extra = json!({ "source": source });
        Ok(ScanResult::new(
            meta,
            columns(&["T_nK", "omega_T_t", "t_s", "gamma", "qfi", "qsnr"]),
            rows,
        ))
    }

    pub fn topt_scan(
        &self,
        sweep: Sweep,
        values: &[f64],
        temp_nk: f64,
        method: MethodArg,
        source: GammaSource,
        t0_nk: f64,
    ) -> Result<ScanResult> {
        positive("sweep value", values)?;
        positive("--temp", &[temp_nk])?;
        positive("--t0", &[t0_nk])?;
        let methods: Vec<Method> = match method {
            MethodArg::Numeric => vec![Method::Numeric(source)],
            MethodArg::Transcendental => vec![Method::Transcendental],
            MethodArg::Series => vec![Method::Series],
            MethodArg::All => vec![
                Method::Numeric(source),
                Method::Transcendental,
                Method::Series,
            ],
        };
        let points = values
            .iter()
            .map(|&v| match sweep {
                Sweep::Temperature => Ok((v * NANOKELVIN, derive(&self.config)?)),
                Sweep::AAb => Ok((
                    temp_nk * NANOKELVIN,
                    derive(&self.config.with_a_ab(v * NANOMETRE))?,
                )),
            })
            .collect::<Result<Vec<_>>>()?;

        let solve = |m: Method, temp: f64, d: &DerivedParams| match m {
            Method::Numeric(s) => find_topt_numeric(temp, d, s, &self.quadrature),
            Method::Transcendental => solve_topt_transcendental(temp, d),
            Method::Series => series_optimum(temp, d, t0_nk * NANOKELVIN),
        };
        let outcomes: Vec<(Vec<Cell>, usize)> = values
            .par_iter()
            .zip(&points)
            .map(|(&v, (temp, d))| {
                let mut row = vec![Cell::Num(v), Cell::Num(d.eta)];
                let mut failures = 0;
                for &m in &methods {
                    match solve(m, *temp, d) {
                        Ok(p) => row.extend([
                            Cell::Num(p.omega_t_t_opt),
                            Cell::Num(p.q_opt),
                            Cell::Text(status(&p)),
                        ]),
                        Err(e) => {
                            failures += usize::from(e.is_numerical());
                            row.extend([
                                Cell::Missing,
                                Cell::Missing,
                                Cell::Text(format!("failed: {e}")),
                            ]);
                        }
                    }
                }
                (row, failures)
            })
            .collect();

        let mut cols = columns(&[
            match sweep {
                Sweep::Temperature => "T_nK",
                Sweep::AAb => "a_AB_nm",
            },
            "eta",
        ]);
        for m in &methods {
            cols.extend([
                format!("omega_T_t_opt_{m}"),
                format!("q_opt_{m}"),
                format!("status_{m}"),
            ]);
        }
        let base = derive(&self.config)?;
        let mut meta = self.meta("topt-scan", &self.config, &base, self.seed);
        meta.extra = json!({
            "sweep": match sweep { Sweep::Temperature => "temperature", Sweep::AAb => "a_AB" },
            "fixed_T_nK": matches!(sweep, Sweep::AAb).then_some(temp_nk),
            "series_t0_nK": t0_nk,
        });
        let failures = outcomes.iter().map(|o| o.1).sum();
        let mut result = ScanResult::new(meta, cols, outcomes.into_iter().map(|o| o.0).collect());
        result.numerical_failures = failures;
        Ok(result)
    }

    pub fn relerr(&self, nu: &[u64], temps_nk: &[f64], source: GammaSource) -> Result<ScanResult> {
        positive("temperature", temps_nk)?;
        let d = derive(&self.config)?;
        let optima = temps_nk
            .par_iter()
            .map(|&tn| find_topt_numeric(tn * NANOKELVIN, &d, source, &self.quadrature))
            .collect::<bec_thermo::Result<Vec<_>>>()?;
        let mut rows = Vec::with_capacity(temps_nk.len() * nu.len());
        for (&tn, p) in temps_nk.iter().zip(&optima) {
            for &n in nu {
                rows.push(vec![
                    Cell::Num(tn),
                    Cell::Int(n),
                    Cell::Num(p.omega_t_t_opt),
                    Cell::Num(p.q_opt),
                    Cell::Num(relative_error(p.q_opt, n)),
                ]);
            }
        }
        let mut meta = self.meta("relerr", &self.config, &d, self.seed);
        meta.extra = json!({ "source": source });
        Ok(ScanResult::new(
            meta,
            columns(&["T_nK", "nu", "omega_T_t_opt", "q_opt", "rel_error"]),
            rows,
        ))
    }

    pub fn coherence(
        &self,
        temps_nk: &[f64],
        times_s: &[f64],
        eta: Option<f64>,
        source: GammaSource,
    ) -> Result<ScanResult> {
        positive("temperature", temps_nk)?;
        non_negative("time", times_s)?;
        let config = match eta {
            Some(eta) => self.config.with_eta(eta)?,
            None => self.config,
        };
        let d = derive(&config)?;
        let grid: Vec<(f64, f64)> = temps_nk
            .iter()
            .flat_map(|&tn| times_s.iter().map(move |&t| (tn, t)))
            .collect();
        let rows = grid
            .par_iter()
            .map(|&(tn, t)| {
                let temp = tn * NANOKELVIN;
                let gamma = match source {
                    GammaSource::Numeric => gamma_numeric(t, temp, &d, &self.quadrature)?,
                    GammaSource::Ohmic => gamma_ohmic(t, temp, &d)?,
                };
                let state = ProbeState::from_gamma(gamma)?;
                Ok(vec![
                    Cell::Num(tn),
                    Cell::Num(t),
                    Cell::Num(t * omega_t(temp)),
                    Cell::Num(gamma),
                    Cell::Num(state.coherence),
                ])
            })
            .collect::<Result<Vec<_>>>()?;
        let mut meta = self.meta("coherence", &config, &d, self.seed);
        meta.extra = json!({ "source": source, "eta_override": eta });
        Ok(ScanResult::new(
            meta,
            columns(&["T_nK", "t_s", "omega_T_t", "gamma", "coherence"]),
            rows,
        ))
    }

    pub fn mc(&self, temp_nk: f64, nu: &[u64], trials: u64) -> Result<ScanResult> {
        positive("--temp", &[temp_nk])?;
        let seed = self.seed.unwrap_or(DEFAULT_SEED);
        let d = derive(&self.config)?;
        let study = crb_study_with(temp_nk * NANOKELVIN, nu, trials, seed, &d, &self.quadrature)?;
        let rows = study
            .rows
            .iter()
            .map(|r| {
                vec![
                    Cell::Int(r.nu),
                    Cell::Int(r.trials),
                    Cell::Num(r.mean_t_hat / NANOKELVIN),
                    Cell::Num(r.rel_std),
                    Cell::Num(r.crb_rel_error),
                    Cell::Num(r.unidentifiable_frac),
                    Cell::Num(r.median_t_hat / NANOKELVIN),
                    Cell::Num(r.clipped_frac),
                ]
            })
            .collect();
        let mut meta = self.meta("mc", &self.config, &d, Some(seed));
        meta.extra = json!({
            "T_true_nK": temp_nk,
            "t_opt_s": study.t_opt,
            "omega_T_t_opt": study.omega_t_t_opt,
            "q_opt": study.q_opt,
        });
        Ok(ScanResult::new(meta, columns(&CrbRow::COLUMNS), rows))
    }
}
