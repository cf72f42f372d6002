//! Phase-locked panel quadrature for `∫₀^∞ A(y)·sin²(θ(y))·B(y) dy`.
//!
//! Breakpoints sit where the phase `θ(y)` crosses multiples of π/4, so no
//! panel spans more than a quarter period of `sin²θ` however fast the phase
//! grows. Each panel gets a 15-point Gauss–Kronrod rule; the march stops once a
//! rigorous bound on the remaining tail is below the absolute tolerance.
//! Panels with the largest error estimates are then bisected until the
//! global error meets `max(abs_tol·scale, rel_tol·|I|)` per component.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::FRAC_PI_4;

use crate::error::{Error, Result};

/// Abscissae of the 15-point Kronrod rule on `[-1, 1]` (non-negative half).
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// 7-point Gauss weights for `XGK[1]`, `XGK[3]`, `XGK[5]` and the centre.
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Retained refinement candidates. Panels with smaller error estimates are
/// still counted in the error total but can no longer be bisected.
const HEAP_CAPACITY: usize = 16_384;

/// An integrand with an oscillation phase `θ(y)` that is zero at `y = 0` and
/// increasing.
pub(crate) trait PhaseIntegrand<const N: usize> {
    fn eval(&self, y: f64) -> [f64; N];
    /// The `y` at which the phase equals `theta`.
    fn abscissa_at_phase(&self, theta: f64) -> f64;
    /// Upper bound on `∫_y^∞ |f_c|` for each component.
    fn tail_bound(&self, y: f64) -> [f64; N];
    /// Per-component magnitude used to scale the absolute tolerance.
    fn scale(&self) -> [f64; N];
    /// Hard truncation point.
    fn ceiling(&self) -> f64;
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Tolerances {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_panels: usize,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Outcome<const N: usize> {
    pub value: [f64; N],
    #[allow(dead_code)]
    pub abs_err: [f64; N],
    #[allow(dead_code)]
    pub panels: usize,
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
struct Sum {
    hi: f64,
    lo: f64,
}

impl Sum {
    #[inline]
    fn add(&mut self, x: f64) {
        let t = self.hi + x;
        if self.hi.abs() >= x.abs() {
            self.lo += (self.hi - t) + x;
        } else {
            self.lo += (x - t) + self.hi;
        }
        self.hi = t;
    }

    #[inline]
    fn get(&self) -> f64 {
        self.hi + self.lo
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel<const N: usize> {
    a: f64,
    b: f64,
    value: [f64; N],
    err: [f64; N],
    key: f64,
}

impl<const N: usize> PartialEq for Panel<N> {
    fn eq(&self, other: &Self) -> bool {
        self.key.total_cmp(&other.key) == Ordering::Equal
    }
}
impl<const N: usize> Eq for Panel<N> {}
impl<const N: usize> PartialOrd for Panel<N> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<const N: usize> Ord for Panel<N> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key.total_cmp(&other.key)
    }
}

/// QUADPACK's error rescaling for a single rule application.
fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut e = err.abs();
    if res_asc != 0.0 && e != 0.0 {
        e = res_asc * (200.0 * e / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        e = e.max(50.0 * f64::EPSILON * res_abs);
    }
    e
}

/// 15-point Gauss–Kronrod on `[a, b]` for every component at once.
pub(crate) fn gk15<const N: usize, F>(f: &F, a: f64, b: f64) -> ([f64; N], [f64; N])
where
    F: Fn(f64) -> [f64; N],
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);

    let mut fv1 = [[0.0; N]; 7];
    let mut fv2 = [[0.0; N]; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        fv1[j] = f(center - dx);
        fv2[j] = f(center + dx);
    }

    let mut value = [0.0; N];
    let mut err = [0.0; N];
    for c in 0..N {
        let mut kron = WGK[7] * fc[c];
        let mut gauss = WG[3] * fc[c];
        let mut res_abs = kron.abs();
        for j in 0..7 {
            let s = fv1[j][c] + fv2[j][c];
            kron += WGK[j] * s;
            res_abs += WGK[j] * (fv1[j][c].abs() + fv2[j][c].abs());
            if j % 2 == 1 {
                gauss += WG[j / 2] * s;
            }
        }
        let mean = 0.5 * kron;
        let mut res_asc = WGK[7] * (fc[c] - mean).abs();
        for j in 0..7 {
            res_asc += WGK[j] * ((fv1[j][c] - mean).abs() + (fv2[j][c] - mean).abs());
        }
        let h = half.abs();
        value[c] = kron * half;
        err[c] = rescale_error((kron - gauss) * half, res_abs * h, res_asc * h);
    }
    (value, err)
}

/// Integrate a [`PhaseIntegrand`] over `[0, ceiling]`.
pub(crate) fn integrate_phase<const N: usize, I>(f: &I, tol: Tolerances) -> Result<Outcome<N>>
where
    I: PhaseIntegrand<N>,
{
    let eval = |y: f64| f.eval(y);
    let scale = f.scale();
    let abs_tol: [f64; N] = std::array::from_fn(|c| tol.abs_tol * scale[c]);
    let ceiling = f.ceiling();

    let mut sums = [Sum::default(); N];
    let mut err_total = [0.0; N];
    let mut panels = 0usize;
    // Min-heap on the first pass so the smallest errors are evicted first.
    let mut candidates: BinaryHeap<std::cmp::Reverse<Panel<N>>> = BinaryHeap::new();

    let budget_error = |panels: usize| Error::NonConvergence {
        what: "dephasing quadrature",
        detail: format!(
            "panel budget {} exhausted after {panels} panels",
            tol.max_panels
        ),
    };

    let mut lo = 0.0;
    let mut crossing = 0u64;
    let tail = loop {
        crossing += 1;
        let hi = f
            .abscissa_at_phase(crossing as f64 * FRAC_PI_4)
            .min(ceiling);
        let (value, err) = gk15(&eval, lo, hi);
        panels += 1;
        if panels > tol.max_panels {
            return Err(budget_error(panels));
        }
        for c in 0..N {
            sums[c].add(value[c]);
            err_total[c] += err[c];
        }
        let key = (0..N).map(|c| err[c] / abs_tol[c]).fold(0.0, f64::max);
        candidates.push(std::cmp::Reverse(Panel {
            a: lo,
            b: hi,
            value,
            err,
            key,
        }));
        if candidates.len() > HEAP_CAPACITY {
            candidates.pop();
        }
        lo = hi;
        if lo >= ceiling {
            break f.tail_bound(ceiling);
        }
        let tail = f.tail_bound(lo);
        if (0..N).all(|c| tail[c] <= 0.25 * abs_tol[c]) {
            break tail;
        }
    };
    for c in 0..N {
        err_total[c] += tail[c];
    }

    let target = |sums: &[Sum; N]| -> [f64; N] {
        std::array::from_fn(|c| abs_tol[c].max(tol.rel_tol * sums[c].get().abs()))
    };
    let rekey = |p: &mut Panel<N>, goal: &[f64; N]| {
        p.key = (0..N).map(|c| p.err[c] / goal[c]).fold(0.0, f64::max);
    };

    let mut goal = target(&sums);
    let converged = |err: &[f64; N], goal: &[f64; N]| (0..N).all(|c| err[c] <= goal[c]);
    if !converged(&err_total, &goal) {
        let mut queue: BinaryHeap<Panel<N>> = candidates
            .into_iter()
            .map(|std::cmp::Reverse(mut p)| {
                rekey(&mut p, &goal);
                p
            })
            .collect();
        while !converged(&err_total, &goal) {
            let Some(parent) = queue.pop() else {
                return Err(Error::NonConvergence {
                    what: "dephasing quadrature",
                    detail: format!(
                        "no refinable panels left; error {:?} above target {:?}",
                        err_total, goal
                    ),
                });
            };
            panels += 2;
            if panels > tol.max_panels {
                return Err(budget_error(panels));
            }
            let mid = 0.5 * (parent.a + parent.b);
            let (lv, le) = gk15(&eval, parent.a, mid);
            let (rv, re) = gk15(&eval, mid, parent.b);
            for c in 0..N {
                sums[c].add(-parent.value[c]);
                sums[c].add(lv[c]);
                sums[c].add(rv[c]);
                err_total[c] += le[c] + re[c] - parent.err[c];
            }
            goal = target(&sums);
            for (a, b, value, err) in [(parent.a, mid, lv, le), (mid, parent.b, rv, re)] {
                let mut child = Panel {
                    a,
                    b,
                    value,
                    err,
                    key: 0.0,
                };
                rekey(&mut child, &goal);
                queue.push(child);
            }
        }
    }

    Ok(Outcome {
        value: std::array::from_fn(|c| sums[c].get()),
        abs_err: err_total,
        panels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// `∫₀^∞ e^{-y} sin²(ω y) dy = 2ω²/(1 + 4ω²)`.
    struct DampedSine {
        omega: f64,
    }

    impl PhaseIntegrand<1> for DampedSine {
        fn eval(&self, y: f64) -> [f64; 1] {
            [(-y).exp() * (self.omega * y).sin().powi(2)]
        }
        fn abscissa_at_phase(&self, theta: f64) -> f64 {
            theta / self.omega
        }
        fn tail_bound(&self, y: f64) -> [f64; 1] {
            [(-y).exp()]
        }
        fn scale(&self) -> [f64; 1] {
            [1.0]
        }
        fn ceiling(&self) -> f64 {
            100.0
        }
    }

    const TOL: Tolerances = Tolerances {
        rel_tol: 1e-10,
        abs_tol: 1e-13,
        max_panels: 10_000_000,
    };

    #[test]
    fn gk15_is_exact_for_polynomials() {
        let f = |x: f64| [x.powi(20), 3.0 * x * x];
        let (v, e) = gk15(&f, 0.0, 1.0);
        assert_relative_eq!(v[0], 1.0 / 21.0, max_relative = 1e-14);
        assert_relative_eq!(v[1], 1.0, max_relative = 1e-14);
        assert!(e[1] < 1e-13);
    }

    #[test]
    fn slow_and_fast_oscillation() {
        for omega in [0.3, 5.0, 400.0] {
            let out = integrate_phase(&DampedSine { omega }, TOL).unwrap();
            let exact = 2.0 * omega * omega / (1.0 + 4.0 * omega * omega);
            assert_relative_eq!(out.value[0], exact, max_relative = 1e-10);
            assert!(out.abs_err[0] <= 1e-10 * exact);
        }
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let tol = Tolerances {
            max_panels: 10,
            ..TOL
        };
        let err = integrate_phase(&DampedSine { omega: 400.0 }, tol).unwrap_err();
        assert!(err.is_numerical());
    }

    #[test]
    fn refinement_recovers_unresolved_feature() {
        // A narrow bump at the origin that one quarter-period panel under-resolves.
        struct Spike;
        impl PhaseIntegrand<1> for Spike {
            fn eval(&self, y: f64) -> [f64; 1] {
                [(-(y / 0.05)).exp() + (-y).exp() * (0.1 * y).sin().powi(2)]
            }
            fn abscissa_at_phase(&self, theta: f64) -> f64 {
                theta / 0.1
            }
            fn tail_bound(&self, y: f64) -> [f64; 1] {
                [(-y).exp() + 0.05 * (-(y / 0.05)).exp()]
            }
            fn scale(&self) -> [f64; 1] {
                [1.0]
            }
            fn ceiling(&self) -> f64 {
                200.0
            }
        }
        let out = integrate_phase(&Spike, TOL).unwrap();
        // The march alone is four panels.
        assert!(out.panels > 8, "{}", out.panels);
        let exact = 0.05 + 2.0 * 0.01 / (1.0 + 4.0 * 0.01);
        assert_relative_eq!(out.value[0], exact, max_relative = 1e-9);
    }
}
