//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use bec_thermo::constants::{NANOKELVIN, NANOMETRE};
use bec_thermo::dephasing::{
    dgamma_dt_numeric, dgamma_ohmic_dt, gamma_numeric, gamma_numeric_in, gamma_ohmic,
    gamma_with_derivative, Parameterization, QuadratureSpec,
};
use bec_thermo::metrology::{
    dephasing_qfi, fisher_of_observable, relative_error, sigma_x_mean_derivative, sigma_x_stats,
};
use bec_thermo::optimizer::{
    evaluate, find_topt_numeric, qsnr_upper_bound, z_of_t, GammaSource, OptimalPoint,
};
use bec_thermo::params::{derive, omega_t, DerivedParams, PhysicalConfig};
use bec_thermo::ramsey_mc::crb_study;

mod common;

use common::{grid, rel, simpson_gamma};

type Check = std::result::Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Check + 'a>);

fn verdict(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn baseline() -> DerivedParams {
    derive(&PhysicalConfig::baseline()).unwrap()
}

fn with_a_ab(a_nm: f64) -> DerivedParams {
    derive(&PhysicalConfig::baseline().with_a_ab(a_nm * NANOMETRE)).unwrap()
}

const SWEEP_NK: [f64; 5] = [0.1, 0.3, 0.5, 0.8, 1.0];

fn derived_parameters() -> Check {
    let d = baseline();
    let ok = (d.p_tilde - 0.13).abs() <= 0.01 && (d.alpha - 0.77).abs() <= 0.02;
    verdict(ok, format!("P~ = {:.4}, alpha = {:.4}", d.p_tilde, d.alpha))
}

fn coupling_range() -> Check {
    let lo = with_a_ab(1.0).eta;
    let hi = with_a_ab(5.0).eta;
    let ok = (lo - 0.004).abs() <= 0.0005 && (hi - 0.10).abs() <= 0.01;
    verdict(ok, format!("eta(1 nm) = {lo:.5}, eta(5 nm) = {hi:.4}"))
}

fn cutoff_ratio() -> Check {
    let r = baseline().omega_c / omega_t(NANOKELVIN);
    verdict(
        (r - 84.0).abs() <= 2.0,
        format!("omega_c/omega_T(1 nK) = {r:.2}"),
    )
}

fn optimal_time(optima: &[OptimalPoint]) -> Check {
    let xs: Vec<String> = optima
        .iter()
        .map(|p| format!("{:.3}", p.omega_t_t_opt))
        .collect();
    let ok = optima.iter().all(|p| (p.omega_t_t_opt - 8.2).abs() <= 0.4);
    verdict(
        ok,
        format!("omega_T t_opt at {SWEEP_NK:?} nK = [{}]", xs.join(", ")),
    )
}

fn numeric_vs_analytic() -> Check {
    let d = baseline();
    let q = QuadratureSpec::default();
    let temp = 0.5 * NANOKELVIN;
    let wt = omega_t(temp);
    let mut worst: f64 = 0.0;
    let mut peak_ohmic: f64 = 0.0;
    for i in 0..=300 {
        let x = 0.1 * i as f64;
        let num = evaluate(x / wt, temp, &d, GammaSource::Numeric, &q)
            .unwrap()
            .qsnr;
        let ohm = evaluate(x / wt, temp, &d, GammaSource::Ohmic, &q)
            .unwrap()
            .qsnr;
        worst = worst.max((num - ohm).abs());
        peak_ohmic = peak_ohmic.max(ohm);
    }
    let a = find_topt_numeric(temp, &d, GammaSource::Numeric, &q)
        .unwrap()
        .q_opt;
    let b = find_topt_numeric(temp, &d, GammaSource::Ohmic, &q)
        .unwrap()
        .q_opt;
    let peak_gap = rel(a, b);
    let ok = worst <= 0.15 * peak_ohmic && peak_gap <= 0.10;
    verdict(
        ok,
        format!(
            "max |Q - Qbar| = {worst:.4} ({:.1}% of max Qbar), peaks {a:.4} vs {b:.4} ({:.1}%)",
            100.0 * worst / peak_ohmic,
            100.0 * peak_gap
        ),
    )
}

fn upper_bound() -> Check {
    let bound = qsnr_upper_bound();
    let d = with_a_ab(1.0);
    let q = QuadratureSpec::default();
    let qs: Vec<f64> = [0.2, 0.5, 0.8]
        .iter()
        .map(|&tn| {
            find_topt_numeric(tn * NANOKELVIN, &d, GammaSource::Numeric, &q)
                .unwrap()
                .q_opt
        })
        .collect();
    let mut pairwise: f64 = 0.0;
    for i in 0..qs.len() {
        for j in i + 1..qs.len() {
            pairwise = pairwise.max((qs[i] - qs[j]).abs() / (0.5 * (qs[i] + qs[j])));
        }
    }
    let ok = (bound - 0.1586).abs() <= 1e-4
        && (bound * 100.0).round() == 16.0
        && pairwise <= 0.03
        && qs.iter().all(|&x| x <= bound * 1.03);
    verdict(
        ok,
        format!(
            "bound = {bound:.6}; Q_opt(1 nm) at 0.2/0.5/0.8 nK = {:.4}/{:.4}/{:.4}, pairwise spread {:.2}%",
            qs[0],
            qs[1],
            qs[2],
            100.0 * pairwise
        ),
    )
}

fn z_values() -> Check {
    let d = derive(&PhysicalConfig::baseline().with_eta(0.004).unwrap()).unwrap();
    let hi = z_of_t(NANOKELVIN, &d).unwrap();
    let lo = z_of_t(0.1 * NANOKELVIN, &d).unwrap();
    let ok = (hi - 0.132).abs() <= 0.002 && (lo - 0.130).abs() <= 0.002;
    verdict(ok, format!("z(1 nK) = {hi:.4}, z(0.1 nK) = {lo:.4}"))
}

fn relative_error_lines(optima: &[OptimalPoint]) -> Check {
    let worst = |nu| {
        optima
            .iter()
            .map(|p| relative_error(p.q_opt, nu))
            .fold(0.0, f64::max)
    };
    let (a, b) = (worst(400), worst(1000));
    verdict(
        a <= 0.16 && b <= 0.10,
        format!("max over T of 1/sqrt(nu Q_opt): {a:.4} (nu = 400), {b:.4} (nu = 1000)"),
    )
}

fn monte_carlo() -> Check {
    let d = baseline();
    let s = crb_study(0.5 * NANOKELVIN, &[1000], 500, 20240611, &d).unwrap();
    let row = s.rows[0];
    let ratio = row.efficiency_ratio();
    let crb_sd = row.crb_rel_error * s.t_true;
    let bias = row.median_t_hat - s.t_true;
    let ok = (0.9..=1.3).contains(&ratio) && bias.abs() <= crb_sd;
    verdict(
        ok,
        format!(
            "rel_std = {:.4}, CRB = {:.4}, ratio = {ratio:.3}; median bias = {:.3} CRB sd, {:.2} CRB sd of the mean; unidentifiable {:.3}",
            row.rel_std,
            row.crb_rel_error,
            bias / crb_sd,
            bias / crb_sd * (row.trials as f64).sqrt(),
            row.unidentifiable_frac
        ),
    )
}

fn oracle_suites() -> Check {
    let d = baseline();
    let q = QuadratureSpec::default();
    let (mut simpson, mut finite_diff, mut ohmic_fd, mut param, mut fisher) =
        (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for (x, temp) in grid() {
        let t = x / omega_t(temp);
        let g = gamma_numeric(t, temp, &d, &q).unwrap();
        simpson = simpson.max(rel(g, simpson_gamma(x, temp, &d, 1_000_000)));

        let h = temp * 1e-4;
        let fd = (gamma_numeric(t, temp + h, &d, &q).unwrap()
            - gamma_numeric(t, temp - h, &d, &q).unwrap())
            / (2.0 * h);
        finite_diff = finite_diff.max(rel(dgamma_dt_numeric(t, temp, &d, &q).unwrap(), fd));
        let fd_ohm = (gamma_ohmic(t, temp + h, &d).unwrap()
            - gamma_ohmic(t, temp - h, &d).unwrap())
            / (2.0 * h);
        ohmic_fd = ohmic_fd.max(rel(dgamma_ohmic_dt(t, temp, &d).unwrap(), fd_ohm));

        let phys = gamma_numeric_in(t, temp, &d, &q, Parameterization::Physical).unwrap();
        param = param.max(rel(phys, g));

        let (g2, dg) = gamma_with_derivative(t, temp, &d, &q).unwrap();
        let (mean, var) = sigma_x_stats(g2).unwrap();
        let classical = fisher_of_observable(mean, var, sigma_x_mean_derivative(g2, dg)).unwrap();
        fisher = fisher.max(rel(classical, dephasing_qfi(g2, dg).unwrap()));
    }
    let ok = simpson < 1e-6 && finite_diff.max(ohmic_fd) < 1e-4 && param < 1e-8 && fisher < 1e-12;
    verdict(
        ok,
        format!(
            "(a) Simpson {simpson:.1e} (b) d/dT numeric {finite_diff:.1e}, ohmic {ohmic_fd:.1e} (c) parameterizations {param:.1e} (d) Fisher/QFI {fisher:.1e}"
        ),
    )
}

fn scaling_law() -> Check {
    let eta = 0.004;
    let d = derive(&PhysicalConfig::baseline().with_eta(eta).unwrap()).unwrap();
    let q = QuadratureSpec::default();
    let ratios: Vec<f64> = (0..10)
        .map(|i| {
            let temp = 0.01 * NANOKELVIN * 10f64.powf(i as f64 / 9.0);
            let p = find_topt_numeric(temp, &d, GammaSource::Ohmic, &q).unwrap();
            p.q_opt / (temp / NANOKELVIN).powf(2.0 * eta)
        })
        .collect();
    let (lo, hi) = ratios
        .iter()
        .fold((f64::MAX, f64::MIN), |(l, h), &r| (l.min(r), h.max(r)));
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let spread = (hi - lo) / mean;
    verdict(
        spread <= 0.02,
        format!(
            "Qbar_opt/T^(2 eta) spread over [0.01, 0.1] nK = {:.2}% (eta = {eta}, {} points)",
            100.0 * spread,
            ratios.len()
        ),
    )
}

fn main() -> ExitCode {
    let start = Instant::now();
    let d = baseline();
    let q = QuadratureSpec::default();
    let optima: Vec<OptimalPoint> = SWEEP_NK
        .iter()
        .map(|&tn| find_topt_numeric(tn * NANOKELVIN, &d, GammaSource::Numeric, &q).unwrap())
        .collect();

    let checks: Vec<Criterion> = vec![
        ("derived parameters", Box::new(derived_parameters)),
        ("coupling range", Box::new(coupling_range)),
        ("cutoff ratio", Box::new(cutoff_ratio)),
        ("optimal time", Box::new(|| optimal_time(&optima))),
        (
            "numeric-analytic QSNR agreement",
            Box::new(numeric_vs_analytic),
        ),
        ("upper bound", Box::new(upper_bound)),
        ("z values", Box::new(z_values)),
        (
            "relative-error theory lines",
            Box::new(|| relative_error_lines(&optima)),
        ),
        ("Monte Carlo saturation", Box::new(monte_carlo)),
        ("oracle suites", Box::new(oracle_suites)),
        ("scaling law", Box::new(scaling_law)),
    ];

    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let t = Instant::now();
        let (tag, detail) = match check() {
            Ok(s) => ("PASS", s),
            Err(s) => {
                failed += 1;
                ("FAIL", s)
            }
        };
        println!(
            "{tag} {:>2} {name}: {detail} [{:.1}s]",
            i + 1,
            t.elapsed().as_secs_f64()
        );
    }
    println!(
        "acceptance: {} of {} passed in {:.0}s",
        checks.len() - failed,
        checks.len(),
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
