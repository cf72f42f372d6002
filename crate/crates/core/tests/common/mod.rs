//! Reference computations shared by the oracle and acceptance targets.

#![allow(dead_code)]

use bec_thermo::constants::{HBAR, K_B, NANOKELVIN};
use bec_thermo::params::{derive, DerivedParams, PhysicalConfig};

pub const TEMPS_NK: [f64; 5] = [0.1, 0.3, 0.5, 0.8, 1.0];
pub const TIMES: [f64; 5] = [0.5, 2.0, 5.0, 8.2, 15.0];

pub fn base() -> DerivedParams {
    derive(&PhysicalConfig::baseline()).unwrap()
}

pub fn grid() -> impl Iterator<Item = (f64, f64)> {
    TEMPS_NK
        .iter()
        .flat_map(|&tn| TIMES.iter().map(move |&x| (x, tn * NANOKELVIN)))
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Composite Simpson on `[0, 12/σ]` with `n` intervals, written directly from
/// the oscillator-unit integrand with plain `tanh`.
pub fn simpson_gamma(t_tilde: f64, temp: f64, d: &DerivedParams, n: usize) -> f64 {
    let sigma = d.config.sigma;
    let temp_tilde = 2.0 * K_B * temp / (HBAR * d.config.omega_b);
    let alpha = d.alpha;
    let f = |k: f64| -> f64 {
        if k == 0.0 {
            return d.p_tilde * t_tilde * t_tilde / (4.0 * alpha * temp_tilde);
        }
        let eps = (k.powi(4) + 2.0 * alpha * k * k).sqrt();
        let s = (eps * t_tilde / (2.0 * temp_tilde)).sin();
        d.p_tilde * (-(sigma * k).powi(2) / 2.0).exp() / (eps * (k * k + 2.0 * alpha)) * s * s
            / (eps / (2.0 * temp_tilde)).tanh()
    };
    let b = 12.0 / sigma;
    let h = b / n as f64;
    let mut acc = f(0.0) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(i as f64 * h);
    }
    acc * h / 3.0
}
