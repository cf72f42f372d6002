//! Unit handling at the command-line boundary. The library only sees SI.

use std::f64::consts::PI;

use bec_thermo::constants::{BOHR_RADIUS, NANOMETRE};

const DALTON: f64 = 1.660_539_066_60e-27;

/// `(suffix, factor to SI)`, longest suffix first within each dimension.
fn units_for(key: &str) -> &'static [(&'static str, f64)] {
    match key {
        "m_A_kg" | "m_B_kg" => &[("amu", DALTON), ("Da", DALTON), ("kg", 1.0), ("u", DALTON)],
        "omega_B_rad_s" => &[("rad/s", 1.0), ("kHz", 2e3 * PI), ("Hz", 2.0 * PI)],
        "n_per_m" => &[
            ("um^-1", 1e6),
            ("cm^-1", 1e2),
            ("m^-1", 1.0),
            ("1/um", 1e6),
            ("1/cm", 1e2),
            ("1/m", 1.0),
        ],
        "a_B_m" | "a_AB_m" => &[
            ("nm", NANOMETRE),
            ("um", 1e-6),
            ("a0", BOHR_RADIUS),
            ("m", 1.0),
        ],
        _ => &[],
    }
}

/// Config value with an optional unit suffix, e.g. `2.9 nm`, `1 kHz`,
/// `87 u` or a bare SI number.
pub fn config_value(key: &str, raw: &str) -> Result<f64, String> {
    if let Ok(v) = raw.parse::<f64>() {
        return Ok(v);
    }
    for &(suffix, factor) in units_for(key) {
        if let Some(num) = raw.strip_suffix(suffix) {
            if let Ok(v) = num.trim().parse::<f64>() {
                return Ok(v * factor);
            }
        }
    }
    let known: Vec<&str> = units_for(key).iter().map(|u| u.0).collect();
    if known.is_empty() {
        Err(format!("`{raw}` is not a number"))
    } else {
        Err(format!(
            "`{raw}` is not a number with one of the units {}",
            known.join(", ")
        ))
    }
}

fn number(s: &str) -> Result<f64, String> {
    let v = s
        .trim()
        .parse::<f64>()
        .map_err(|_| format!("`{s}` is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

/// A list of values: `a:b:n` for `n` evenly spaced points from `a` to `b`,
/// `a:b:n:log` for geometric spacing, or a comma-separated list.
pub fn grid(s: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [one] => one.split(',').map(number).collect(),
        [a, b, n] | [a, b, n, _] => {
            let (a, b) = (number(a)?, number(b)?);
            let n: usize = n
                .trim()
                .parse()
                .map_err(|_| format!("`{n}` is not a point count"))?;
            let log = match parts.get(3).map(|s| s.trim()) {
                None | Some("lin") => false,
                Some("log") => true,
                Some(other) => {
                    return Err(format!("spacing must be `lin` or `log`, got `{other}`"))
                }
            };
            if n == 0 {
                return Err("a range needs at least one point".into());
            }
            if log && !(a > 0.0 && b > 0.0) {
                return Err("log spacing needs positive end points".into());
            }
            if n == 1 {
                return Ok(vec![a]);
            }
            let step = |i: usize| i as f64 / (n - 1) as f64;
            Ok((0..n)
                .map(|i| match (i, log) {
                    (0, _) => a,
                    (i, _) if i == n - 1 => b,
                    (i, false) => a + (b - a) * step(i),
                    (i, true) => a * (b / a).powf(step(i)),
                })
                .collect())
        }
        _ => Err(format!("`{s}` is neither `a:b:n[:log]` nor a comma list")),
    }
}

/// Comma list of positive shot counts.
pub fn counts(s: &str) -> Result<Vec<u64>, String> {
    s.split(',')
        .map(|p| match p.trim().parse::<u64>() {
            Ok(0) => Err("shot counts must be positive".to_string()),
            Ok(v) => Ok(v),
            Err(_) => Err(format!("`{p}` is not a shot count")),
        })
        .collect()
}
