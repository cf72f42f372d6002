//! Quantum Fisher information, QSNR and Cramér-Rao limits for the dephasing
//! probe.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_non_negative, ensure_positive, Error, Result};

/// Below this value of `1 - |w|²` the state is treated as pure.
const PURITY_EPS: f64 = 1e-14;

/// A qubit state `ρ = ½(I + w·σ)` and its derivative with respect to the
/// estimated parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub w: [f64; 3],
    pub dw: [f64; 3],
}

impl BlochVector {
    /// The dephasing family `w = (e^{-Γ}, 0, 0)`, `∂w = -∂Γ·w`.
    pub fn dephasing(gamma: f64, dgamma: f64) -> Result<Self> {
        ensure_non_negative("gamma", gamma)?;
        let e = (-gamma).exp();
        Ok(Self {
            w: [e, 0.0, 0.0],
            dw: [-dgamma * e, 0.0, 0.0],
        })
    }
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// QFI of a qubit from its Bloch vector:
/// `|∂w|² + (w·∂w)²/(1 - |w|²)` for mixed states, `|∂w|²` for pure ones.
pub fn bloch_qfi(b: &BlochVector) -> Result<f64> {
    let w2 = dot(&b.w, &b.w);
    if !w2.is_finite() || w2 > 1.0 + PURITY_EPS {
        return Err(Error::InvalidState(format!("|w|^2 = {w2} exceeds 1")));
    }
    let dw2 = dot(&b.dw, &b.dw);
    let mixedness = 1.0 - w2;
    if mixedness < PURITY_EPS {
        return Ok(dw2);
    }
    let proj = dot(&b.w, &b.dw);
    Ok(dw2 + proj * proj / mixedness)
}

/// QFI of the dephasing channel, `(∂_TΓ)²/(e^{2Γ} - 1)`, 1/K².
///
/// `Γ = 0` is only consistent with `∂_TΓ = 0` (the `t = 0` limit), where the
/// QFI is 0.
pub fn dephasing_qfi(gamma: f64, dgamma: f64) -> Result<f64> {
    ensure_non_negative("gamma", gamma)?;
    if !dgamma.is_finite() {
        return Err(Error::invalid("dgamma", dgamma, "must be finite"));
    }
    if gamma == 0.0 {
        if dgamma == 0.0 {
            return Ok(0.0);
        }
        return Err(Error::invalid(
            "dgamma",
            dgamma,
            "must vanish when gamma = 0",
        ));
    }
    Ok(dgamma * dgamma / (2.0 * gamma).exp_m1())
}

/// `T²·F_T`.
pub fn qsnr(temperature: f64, qfi: f64) -> f64 {
    temperature * temperature * qfi
}

/// Classical Fisher information of an observable with the given mean and
/// variance, `(∂⟨X⟩/∂T)²/⟨ΔX²⟩`.
pub fn fisher_of_observable(mean: f64, var: f64, dmean_dt: f64) -> Result<f64> {
    if !mean.is_finite() {
        return Err(Error::invalid("mean", mean, "must be finite"));
    }
    ensure_positive("var", var)?;
    Ok(dmean_dt * dmean_dt / var)
}

/// Mean and variance of `σ_x` in the dephased state: `(e^{-Γ}, 1 - e^{-2Γ})`.
pub fn sigma_x_stats(gamma: f64) -> Result<(f64, f64)> {
    ensure_non_negative("gamma", gamma)?;
    Ok(((-gamma).exp(), -(-2.0 * gamma).exp_m1()))
}

/// `∂⟨σ_x⟩/∂T = -∂_TΓ·e^{-Γ}`.
pub fn sigma_x_mean_derivative(gamma: f64, dgamma: f64) -> f64 {
    -dgamma * (-gamma).exp()
}

/// Precision attainable from `ν` repetitions at one operating point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimationReport {
    /// 1/K².
    pub qfi: f64,
    pub qsnr: f64,
    /// `1/√(ν·Q)`.
    pub rel_error_min: f64,
    pub nu: u64,
}

impl EstimationReport {
    pub fn new(temperature: f64, gamma: f64, dgamma: f64, nu: u64) -> Result<Self> {
        ensure_positive("T", temperature)?;
        if nu == 0 {
            return Err(Error::invalid("nu", 0.0, "need at least one measurement"));
        }
        let qfi = dephasing_qfi(gamma, dgamma)?;
        let q = qsnr(temperature, qfi);
        Ok(Self {
            qfi,
            qsnr: q,
            rel_error_min: relative_error(q, nu),
            nu,
        })
    }
}

/// Cramér-Rao relative error `1/√(ν·Q)`; infinite when `Q = 0`.
pub fn relative_error(qsnr: f64, nu: u64) -> f64 {
    1.0 / (nu as f64 * qsnr).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn pure_branch() {
        let b = BlochVector {
            w: [1.0, 0.0, 0.0],
            dw: [0.0, 3.0, 0.0],
        };
        assert_eq!(bloch_qfi(&b).unwrap(), 9.0);
    }

    #[test]
    fn maximally_mixed_centre() {
        let b = BlochVector {
            w: [0.0; 3],
            dw: [1.0, 2.0, 2.0],
        };
        assert_eq!(bloch_qfi(&b).unwrap(), 9.0);
    }

    #[test]
    fn rejects_unphysical_vector() {
        let b = BlochVector {
            w: [1.0, 0.1, 0.0],
            dw: [0.0; 3],
        };
        assert!(matches!(bloch_qfi(&b), Err(Error::InvalidState(_))));
    }

    #[test]
    fn ln2_example() {
        let t = 0.7e-9;
        let qfi = dephasing_qfi(2f64.ln(), 1.0 / t).unwrap();
        assert_relative_eq!(qfi, 1.0 / (3.0 * t * t), max_relative = 1e-14);
        assert_relative_eq!(qsnr(t, qfi), 1.0 / 3.0, max_relative = 1e-14);
    }

    #[test]
    fn zero_gamma_limit() {
        assert_eq!(dephasing_qfi(0.0, 0.0).unwrap(), 0.0);
        assert!(dephasing_qfi(0.0, 1.0).is_err());
        assert!(dephasing_qfi(-1.0, 0.0).is_err());
    }

    #[test]
    fn small_gamma_is_stable() {
        let g = 1e-12;
        let qfi = dephasing_qfi(g, 1.0).unwrap();
        assert_relative_eq!(qfi, 1.0 / (2.0 * g), max_relative = 1e-10);
    }

    #[test]
    fn observable_fisher() {
        assert_eq!(fisher_of_observable(0.5, 0.75, 0.0).unwrap(), 0.0);
        assert_relative_eq!(
            fisher_of_observable(0.5, 0.75, -0.02).unwrap(),
            5.333_333e-4,
            max_relative = 1e-6
        );
        assert!(fisher_of_observable(1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn sigma_x_moments() {
        assert_eq!(sigma_x_stats(0.0).unwrap(), (1.0, 0.0));
        let (m, v) = sigma_x_stats(2f64.ln()).unwrap();
        assert_relative_eq!(m, 0.5, max_relative = 1e-15);
        assert_relative_eq!(v, 0.75, max_relative = 1e-15);
        let (m, v) = sigma_x_stats(800.0).unwrap();
        assert_eq!((m, v), (0.0, 1.0));
    }

    #[test]
    fn report_invariants() {
        let t = 0.5e-9;
        let r = EstimationReport::new(t, 1.0, 1.7e9, 400).unwrap();
        assert_eq!(r.qsnr, t * t * r.qfi);
        assert_relative_eq!(
            r.rel_error_min,
            1.0 / (400.0 * r.qsnr).sqrt(),
            max_relative = 1e-15
        );
        assert!(EstimationReport::new(t, 1.0, 1.0, 0).is_err());
    }
}
