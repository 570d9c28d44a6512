#![allow(clippy::excessive_precision)]
//! Globally adaptive 15-point Gauss-Kronrod quadrature, plus the iterated 2-D
//! rule used for the covariance kernel `min(x, y) / (x y)`.
//!
//! The Kronrod nodes never touch the interval endpoints, so integrable
//! endpoint singularities such as `ln x` at 0 are handled by bisection toward
//! the singular end.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

// Abscissae of the 15-point Kronrod rule (QUADPACK qk15); odd indices are the
// 7-point Gauss nodes.
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
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// Tolerances and subdivision budget.
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs: 1e-13,
            rel: 1e-12,
            max_intervals: 2000,
        }
    }
}

fn kronrod15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Integrates `f` over `[a, b]`, splitting first at the supplied `breakpoints`
/// (points inside `(a, b)` where `f` has a kink or singularity).
pub fn integrate_with_breaks<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    tol: Tolerance,
) -> Quadrature {
    if a == b {
        return Quadrature {
            value: 0.0,
            error_estimate: 0.0,
            evaluations: 0,
            converged: true,
        };
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut cuts: Vec<f64> = vec![lo];
    let mut inner: Vec<f64> = breakpoints.iter().copied().filter(|&p| p > lo && p < hi).collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    cuts.extend(inner);
    cuts.push(hi);

    let mut heap = BinaryHeap::new();
    let mut evaluations = 0;
    for w in cuts.windows(2) {
        let (value, error) = kronrod15(&mut f, w[0], w[1]);
        evaluations += 15;
        heap.push(Piece {
            a: w[0],
            b: w[1],
            value,
            error,
        });
    }

    let totals = |heap: &BinaryHeap<Piece>| heap.iter().fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error));
    let mut converged = false;
    loop {
        let (value, error) = totals(&heap);
        if error <= tol.abs.max(tol.rel * value.abs()) {
            converged = true;
            break;
        }
        if heap.len() >= tol.max_intervals {
            break;
        }
        let worst = heap.pop().expect("nonempty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval exhausted at machine precision
            heap.push(worst);
            break;
        }
        for (a, b) in [(worst.a, mid), (mid, worst.b)] {
            let (value, error) = kronrod15(&mut f, a, b);
            evaluations += 15;
            heap.push(Piece { a, b, value, error });
        }
    }
    let mut pieces = heap.into_vec();
    pieces.sort_by(|p, q| p.a.total_cmp(&q.a));
    let value: f64 = crate::summation::sum(&pieces.iter().map(|p| p.value).collect::<Vec<_>>());
    let error_estimate = pieces.iter().map(|p| p.error).sum();
    Quadrature {
        value: sign * value,
        error_estimate,
        evaluations,
        converged,
    }
}

/// Integrates `f` over `[a, b]`.
pub fn integrate<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Quadrature {
    integrate_with_breaks(f, a, b, &[], tol)
}

/// `int_0^s int_0^t min(x, y) / (x y) dy dx` by iterated adaptive quadrature,
/// with the inner rule split on the diagonal `y = x` where the kernel kinks.
pub fn min_kernel_double_integral(s: f64, t: f64, tol: Tolerance) -> Quadrature {
    let inner_tol = Tolerance {
        abs: tol.abs * 1e-2,
        rel: tol.rel * 1e-2,
        ..tol
    };
    let mut inner_evals = 0;
    let mut inner_ok = true;
    let outer = integrate(
        |x| {
            let q = integrate_with_breaks(|y| x.min(y) / (x * y), 0.0, t, &[x], inner_tol);
            inner_evals += q.evaluations;
            inner_ok &= q.converged;
            q.value
        },
        0.0,
        s,
        tol,
    );
    Quadrature {
        evaluations: outer.evaluations + inner_evals,
        converged: outer.converged && inner_ok,
        ..outer
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_polynomials_up_to_degree_22() {
        // single panel, no subdivision needed
        for deg in 0..=22 {
            let (v, _) = kronrod15(&mut |x: f64| x.powi(deg), 0.0, 1.0);
            let exact = 1.0 / (deg as f64 + 1.0);
            assert!((v - exact).abs() < 1e-14, "degree {deg}: {v} vs {exact}");
        }
    }

    #[test]
    fn weights_sum_to_interval_length() {
        let k: f64 = WGK[7] + 2.0 * WGK[..7].iter().sum::<f64>();
        let g: f64 = WG[3] + 2.0 * WG[..3].iter().sum::<f64>();
        assert!((k - 2.0).abs() < 1e-15);
        assert!((g - 2.0).abs() < 1e-15);
    }

    #[test]
    fn log_endpoint_singularity() {
        // int_0^1 ln(x) dx = -1, int_0^1 ln(x)^2 dx = 2
        let q = integrate(|x| x.ln(), 0.0, 1.0, Tolerance::default());
        assert!(q.converged);
        assert!((q.value + 1.0).abs() < 1e-11, "{q:?}");
        let q2 = integrate(|x| x.ln().powi(2), 0.0, 1.0, Tolerance::default());
        assert!((q2.value - 2.0).abs() < 1e-11, "{q2:?}");
    }

    #[test]
    fn reversed_bounds_flip_sign() {
        let q = integrate(|x| x * x, 1.0, 0.0, Tolerance::default());
        assert!((q.value + 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn breakpoint_on_kink() {
        let q = integrate_with_breaks(|x: f64| (x - 0.3).abs(), 0.0, 1.0, &[0.3], Tolerance::default());
        assert!((q.value - (0.045 + 0.245)).abs() < 1e-14);
        assert!(q.evaluations <= 30);
    }

    #[test]
    fn min_kernel_unit_square_is_two() {
        let q = min_kernel_double_integral(1.0, 1.0, Tolerance::default());
        assert!(q.converged);
        assert!((q.value - 2.0).abs() < 1e-9, "{q:?}");
    }
}
