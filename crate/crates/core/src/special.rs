//! Overflow-safe hyperbolic helpers for positive arguments.
//!
//! Everything here is built on `expm1(-2x)`, which stays in `(-1, 0)` for
//! `x > 0` and is accurate both as `x -> 0` and for large `x`.

/// `coth(x)` and `csch²(x)` for `x > 0` from a single `expm1`.
#[inline]
pub fn coth_csch2(x: f64) -> (f64, f64) {
    let em = (-2.0 * x).exp_m1();
    let coth = (2.0 + em) / -em;
    let csch2 = 4.0 * (1.0 + em) / (em * em);
    (coth, csch2)
}

#[inline]
pub fn coth(x: f64) -> f64 {
    coth_csch2(x).0
}

/// `ln(sinh x)` for `x > 0`, finite for arguments where `sinh` overflows.
pub fn ln_sinh(x: f64) -> f64 {
    x + (-(-2.0 * x).exp_m1()).ln() - std::f64::consts::LN_2
}

/// `ln(sinh(x) / x)` for `x >= 0`, with the `x -> 0` limit 0.
pub fn ln_sinhc(x: f64) -> f64 {
    if x < 0.1 {
        let x2 = x * x;
        // sinh(x)/x - 1 = x²/3! + x⁴/5! + x⁶/7! + x⁸/9!
        let s = x2 * (1.0 / 6.0 + x2 * (1.0 / 120.0 + x2 * (1.0 / 5040.0 + x2 / 362_880.0)));
        s.ln_1p()
    } else {
        ln_sinh(x) - x.ln()
    }
}

/// `x·coth(x) - 1` for `x >= 0`, accurate near zero.
pub fn x_coth_x_minus_1(x: f64) -> f64 {
    if x < 0.1 {
        let x2 = x * x;
        x2 * (1.0 / 3.0 - x2 * (1.0 / 45.0 - x2 * (2.0 / 945.0 - x2 / 4725.0)))
    } else {
        x * coth(x) - 1.0
    }
}
