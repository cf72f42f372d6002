use bec_thermo::constants::{NANOKELVIN, NANOMETRE};
use bec_thermo::dephasing::{
    dgamma_ohmic_dt, gamma_numeric, gamma_ohmic, ProbeState, QuadratureSpec,
};
use bec_thermo::dispersion::{epsilon, spectral_density, Cutoff, Mode};
use bec_thermo::metrology::{
    bloch_qfi, dephasing_qfi, fisher_of_observable, qsnr, sigma_x_mean_derivative, sigma_x_stats,
    BlochVector,
};
use bec_thermo::optimizer::{
    approx_qopt, approx_r, evaluate, find_topt_numeric, qopt_series, qsnr_upper_bound,
    solve_topt_transcendental, z_of_t, GammaSource,
};
use bec_thermo::params::{derive, omega_t, DerivedParams, PhysicalConfig};
use bec_thermo::ramsey_mc::{draw_counts, p_plus};
use proptest::prelude::*;

fn base() -> DerivedParams {
    derive(&PhysicalConfig::baseline()).unwrap()
}

fn config() -> impl Strategy<Value = PhysicalConfig> {
    (
        1e-26..1e-25f64,
        5e-26..3e-25f64,
        1e3..2e4f64,
        1e7..1e8f64,
        1e-9..8e-9f64,
        0.5e-9..6e-9f64,
        0.2..1.0f64,
    )
        .prop_map(|(m_a, m_b, omega_b, n, a_b, a_ab, sigma)| PhysicalConfig {
            m_a,
            m_b,
            omega_b,
            n,
            a_b,
            a_ab,
            sigma,
        })
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

proptest! {
    #[test]
    fn derive_is_pure(c in config()) {
        let a = derive(&c).unwrap();
        let b = derive(&c).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn doubling_a_ab_scales_only_coupling_terms(c in config()) {
        let a = derive(&c).unwrap();
        let b = derive(&c.with_a_ab(2.0 * c.a_ab)).unwrap();
        prop_assert!(rel(b.delta_e, 2.0 * a.delta_e) < 1e-14);
        prop_assert!(rel(b.p, 4.0 * a.p) < 1e-14);
        prop_assert!(rel(b.p_tilde, 4.0 * a.p_tilde) < 1e-14);
        prop_assert!(rel(b.eta, 4.0 * a.eta) < 1e-14);
        for (x, y) in [
            (a.ell_b, b.ell_b), (a.ell_a, b.ell_a), (a.g_b, b.g_b), (a.m_ab, b.m_ab),
            (a.c_s, b.c_s), (a.omega_c, b.omega_c), (a.xi, b.xi), (a.alpha, b.alpha),
        ] {
            prop_assert_eq!(x, y);
        }
    }

    #[test]
    fn derived_identities(c in config()) {
        let d = derive(&c).unwrap();
        prop_assert_eq!(d.alpha, 4.0 * c.n * c.a_b);
        prop_assert!(rel(d.omega_c, 2f64.sqrt() * d.c_s / d.ell_a) < 1e-15);
    }

    #[test]
    fn dispersion_is_monotone(k1 in 1e3..1e8f64, k2 in 1e3..1e8f64) {
        prop_assume!(k1 < k2);
        let d = base();
        prop_assert!(epsilon(k1, &d).unwrap() < epsilon(k2, &d).unwrap());
        let m1 = Mode::new(k1, &d).unwrap();
        let m2 = Mode::new(k2, &d).unwrap();
        prop_assert!(m1.eps_k >= m1.e_k);
        let (r1, r2) = (m1.energy_ratio(&d), m2.energy_ratio(&d));
        prop_assert!((0.0..1.0).contains(&r1) && r1 <= r2);
    }

    #[test]
    fn cutoff_shapes_agree_at_low_frequency(u in 1e-6..1e-3f64) {
        let d = base();
        let w = u * d.omega_c;
        let g = spectral_density(w, &d, Cutoff::Gaussian).unwrap();
        let e = spectral_density(w, &d, Cutoff::Exponential).unwrap();
        prop_assert!(rel(g, e) <= 1.01 * u);
    }

    #[test]
    fn ohmic_gamma_increases_in_t_and_temperature(x in 0.05..100.0f64, tn in 0.01..1.0f64, f in 1.01..2.0f64) {
        let d = base();
        let temp = tn * NANOKELVIN;
        let t = x / omega_t(temp);
        let g = gamma_ohmic(t, temp, &d).unwrap();
        prop_assert!(g > 0.0);
        prop_assert!(gamma_ohmic(f * t, temp, &d).unwrap() > g);
        prop_assert!(gamma_ohmic(t, f * temp, &d).unwrap() > g);
        prop_assert!(dgamma_ohmic_dt(t, temp, &d).unwrap() > 0.0);
        let c1 = ProbeState::from_gamma(g).unwrap().coherence;
        let c2 = ProbeState::from_gamma(gamma_ohmic(f * t, temp, &d).unwrap()).unwrap().coherence;
        prop_assert!(c2 < c1 && c1 < 0.5);
    }

    #[test]
    fn dephasing_bloch_family_matches_channel_qfi(g in 1e-6..20.0f64, dg in -1e10..1e10f64) {
        let b = BlochVector::dephasing(g, dg).unwrap();
        let w2: f64 = b.w.iter().map(|v| v * v).sum();
        prop_assert!(w2 <= 1.0);
        let lhs = bloch_qfi(&b).unwrap();
        let rhs = dephasing_qfi(g, dg).unwrap();
        if rhs == 0.0 {
            prop_assert_eq!(lhs, 0.0);
        } else {
            prop_assert!(rel(lhs, rhs) < 1e-9, "{} vs {}", lhs, rhs);
        }
    }

    #[test]
    fn sigma_x_is_optimal(g in 1e-8..30.0f64, dg in 1e3..1e11f64) {
        let (mean, var) = sigma_x_stats(g).unwrap();
        let f = fisher_of_observable(mean, var, sigma_x_mean_derivative(g, dg)).unwrap();
        prop_assert!(rel(f, dephasing_qfi(g, dg).unwrap()) < 1e-12);
    }

    #[test]
    fn qsnr_is_unit_free(g in 1e-3..10.0f64, dg in 1e6..1e11f64, temp in 1e-11..1e-8f64, scale in 1e-3..1e9f64) {
        // Re-express T in units `scale` times smaller: T' = scale·T, ∂Γ/∂T' = ∂Γ/∂T / scale.
        let a = qsnr(temp, dephasing_qfi(g, dg).unwrap());
        let b = qsnr(scale * temp, dephasing_qfi(g, dg / scale).unwrap());
        prop_assert!(rel(a, b) < 1e-12);
    }

    #[test]
    fn z_monotone_in_temperature_and_coupling(tn in 0.01..1.0f64, f in 1.01..3.0f64, a_nm in 1.0..5.0f64) {
        let d = derive(&PhysicalConfig::baseline().with_a_ab(a_nm * NANOMETRE)).unwrap();
        let temp = tn * NANOKELVIN;
        let z = z_of_t(temp, &d).unwrap();
        prop_assert!(z_of_t(f * temp, &d).unwrap() > z);
        let stronger = derive(&PhysicalConfig::baseline().with_a_ab(f * a_nm * NANOMETRE)).unwrap();
        prop_assert!(z_of_t(temp, &stronger).unwrap() < z);
        prop_assert!(approx_r(&stronger, temp).unwrap() < approx_r(&d, temp).unwrap());
    }

    #[test]
    fn counts_stay_in_range(g in 0.0..5.0f64, nu in 1u64..5000, seed: u64, stream in 0u64..1000) {
        let n = draw_counts(g, nu, seed, stream);
        prop_assert!(n <= nu);
        prop_assert_eq!(n, draw_counts(g, nu, seed, stream));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn ohmic_optima_respect_the_bound(eta in 0.004..0.1f64, tn in 0.05..1.0f64) {
        let d = derive(&PhysicalConfig::baseline().with_eta(eta).unwrap()).unwrap();
        let temp = tn * NANOKELVIN;
        let cap = qsnr_upper_bound() * (1.0 + 1e-3);
        let q = QuadratureSpec::default();
        let direct = find_topt_numeric(temp, &d, GammaSource::Ohmic, &q).unwrap();
        prop_assert!(direct.q_opt <= cap);
        prop_assert!(solve_topt_transcendental(temp, &d).unwrap().q_opt <= cap);
        prop_assert!(approx_qopt(temp, &d).unwrap() <= cap);
        // Local-maximum certificate.
        for f in [1.0 - 1e-3, 1.0 + 1e-3] {
            let nearby = evaluate(f * direct.t_opt, temp, &d, GammaSource::Ohmic, &q).unwrap().qsnr;
            prop_assert!(direct.q_opt >= nearby);
        }
        for f in [0.5, 2.0] {
            let off = evaluate(f * direct.t_opt, temp, &d, GammaSource::Ohmic, &q).unwrap().qsnr;
            prop_assert!(off < direct.q_opt);
        }
    }

    #[test]
    fn fixed_point_matches_series_to_third_order(a_nm in 0.3..2.0f64, tn in 0.05..1.0f64) {
        let d = derive(&PhysicalConfig::baseline().with_a_ab(a_nm * NANOMETRE)).unwrap();
        let temp = tn * NANOKELVIN;
        let z = z_of_t(temp, &d).unwrap();
        let x = solve_topt_transcendental(temp, &d).unwrap().omega_t_t_opt;
        let scaled = std::f64::consts::PI * d.eta * x;
        // With δ = 1 - πηx the fixed point reads δ = z e^{2δ}, whose series is
        // z + 2z² + 6z³ + 21.3z⁴ + …; for z ≤ e⁻² the tail past z² stays
        // between 6z³ and 20z³.
        let remainder = (1.0 - scaled) - z - 2.0 * z * z;
        prop_assert!(z <= (-2.0f64).exp());
        prop_assert!(remainder >= 6.0 * z.powi(3) && remainder <= 20.0 * z.powi(3), "z = {}, r/z^3 = {}", z, remainder / z.powi(3));
    }

    #[test]
    fn numeric_gamma_increases_in_temperature(x in 0.2..20.0f64, tn in 0.1..1.0f64, f in 1.05..2.0f64) {
        let d = base();
        let q = QuadratureSpec::default();
        let temp = tn * NANOKELVIN;
        let t = x / omega_t(temp);
        let g = gamma_numeric(t, temp, &d, &q).unwrap();
        prop_assert!(g > 0.0);
        prop_assert!(gamma_numeric(t, f * temp, &d, &q).unwrap() > g);
        prop_assert!(gamma_numeric(f * t, temp, &d, &q).unwrap() > g);
    }
}

#[test]
fn bernoulli_concentration_at_a_million_shots() {
    let d = base();
    let temp = 0.5 * NANOKELVIN;
    let t = 8.13 / omega_t(temp);
    let g = gamma_numeric(t, temp, &d, &QuadratureSpec::default()).unwrap();
    let p = p_plus(g);
    let nu = 1_000_000u64;
    for seed in [1, 2, 3] {
        let frac = draw_counts(g, nu, seed, 0) as f64 / nu as f64;
        assert!(
            (frac - p).abs() < 3.0 * (p * (1.0 - p) / nu as f64).sqrt(),
            "seed {seed}"
        );
    }
}

#[test]
fn series_coefficients_reduce_at_zero_coupling() {
    for z in [0.01, 0.1, 0.2] {
        assert_eq!(qopt_series(z, 0.0), z + z * z + 2.0 * z * z * z);
    }
}
