//! Grid functions, Wiener paths, and the singular functional
//! `Y(t) = int_0^t w(x)/x dx` evaluated exactly on piecewise-linear
//! interpolants.
//!
//! On a segment where `w` is linear the integrand `(a + b x)/x` integrates in
//! closed form to `a ln(q/p) + b (q - p)`. On the first segment `w(0) = 0`
//! forces `a = 0`, so the `1/x` singularity is removable and contributes `b q`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{out_of_range, Error, Result};
use crate::mcengine::GaussianSource;
use crate::quadrature::{self, Quadrature, Tolerance};
use crate::summation::NeumaierSum;

/// Default grid resolution per unit horizon.
pub const DEFAULT_RESOLUTION: usize = 1 << 12;

/// How values between grid nodes are read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Interpretation {
    /// Right-continuous step: `f(t) = values[floor(t m / T)]`.
    CadlagStep,
    /// Linear interpolation between nodes.
    PiecewiseLinear,
}

/// A function on `[0, T]` sampled at `t_i = i T / m`, `i = 0..=m`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    horizon: f64,
    values: Vec<f64>,
    interpretation: Interpretation,
}

impl GridFunction {
    /// Wraps `m + 1` finite node values on `[0, horizon]`.
    pub fn new(values: Vec<f64>, horizon: f64, interpretation: Interpretation) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::Grid(format!(
                "need at least 2 nodes (m >= 1), got {}",
                values.len()
            )));
        }
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(out_of_range("horizon", format!("T > 0 required, got {horizon}")));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Grid(format!("non-finite value at node {i}")));
        }
        Ok(Self {
            horizon,
            values,
            interpretation,
        })
    }

    /// Samples `f` on the unit-horizon grid with `m` cells.
    pub fn from_fn<F: Fn(f64) -> f64>(m: usize, interpretation: Interpretation, f: F) -> Result<Self> {
        if m == 0 {
            return Err(out_of_range("m", "m >= 1 required"));
        }
        let values = (0..=m).map(|i| f(i as f64 / m as f64)).collect();
        Self::new(values, 1.0, interpretation)
    }

    pub fn zeros(m: usize, horizon: f64, interpretation: Interpretation) -> Result<Self> {
        Self::new(vec![0.0; m + 1], horizon, interpretation)
    }

    /// Number of cells.
    pub fn m(&self) -> usize {
        self.values.len() - 1
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn step(&self) -> f64 {
        self.horizon / self.m() as f64
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn interpretation(&self) -> Interpretation {
        self.interpretation
    }

    /// Time of node `i`.
    pub fn time(&self, i: usize) -> f64 {
        i as f64 * self.horizon / self.m() as f64
    }

    /// The same node values read as a piecewise-linear function.
    pub fn as_piecewise_linear(&self) -> Self {
        Self {
            interpretation: Interpretation::PiecewiseLinear,
            ..self.clone()
        }
    }

    /// Value at `t` in `[0, T]` under the function's interpretation.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(0.0..=self.horizon).contains(&t) {
            return Err(out_of_range(
                "t",
                format!("t in [0, {}] required, got {t}", self.horizon),
            ));
        }
        let m = self.m();
        let pos = t / self.step();
        let i = (pos.floor() as usize).min(m);
        Ok(match self.interpretation {
            Interpretation::CadlagStep => self.values[i],
            Interpretation::PiecewiseLinear => {
                if i == m {
                    self.values[m]
                } else {
                    let frac = pos - i as f64;
                    self.values[i] + frac * (self.values[i + 1] - self.values[i])
                }
            }
        })
    }

    /// Sup-norm over the nodes.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |acc: f64, v| acc.max(v.abs()))
    }

    /// CSV with columns `t,value`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["t", "value"])?;
        for (i, v) in self.values.iter().enumerate() {
            out.write_record([self.time(i).to_string(), v.to_string()])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Standard Wiener path on `[0, horizon]` with `m` cells: independent
/// centred Gaussian increments of variance `horizon / m`.
pub fn simulate_wiener<G: GaussianSource + ?Sized>(m: usize, horizon: f64, source: &mut G) -> Result<GridFunction> {
    if m == 0 {
        return Err(out_of_range("m", "m >= 1 required"));
    }
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(out_of_range("horizon", format!("T > 0 required, got {horizon}")));
    }
    let sd = (horizon / m as f64).sqrt();
    let mut values = Vec::with_capacity(m + 1);
    values.push(0.0);
    let mut w = 0.0;
    for _ in 0..m {
        w += sd * source.next_gaussian();
        values.push(w);
    }
    GridFunction::new(values, horizon, Interpretation::PiecewiseLinear)
}

/// `r - ln(1 + r)`, accurate for small `r`.
#[inline]
fn log1p_gap(r: f64) -> f64 {
    if r.abs() < 1e-2 {
        // alternating series, truncation below 1e-18 relative
        let mut term = r * r;
        let mut acc = 0.0;
        for k in 2..=9 {
            acc += term / k as f64 * if k % 2 == 0 { 1.0 } else { -1.0 };
            term *= r;
        }
        acc
    } else {
        r - r.ln_1p()
    }
}

/// `int_p^q w(x)/x dx` for `w` linear through `(p, wp)` with slope `b`, `0 < p <= q`.
#[inline]
fn anchored_segment(p: f64, wp: f64, slope: f64, q: f64) -> f64 {
    let r = (q - p) / p;
    wp * r.ln_1p() + slope * p * log1p_gap(r)
}

fn require_linear_through_origin(w: &GridFunction) -> Result<()> {
    if w.interpretation != Interpretation::PiecewiseLinear {
        return Err(Error::Grid(
            "singular functional needs a PiecewiseLinear path; convert step paths with as_piecewise_linear".into(),
        ));
    }
    if w.values[0] != 0.0 {
        return Err(Error::Grid(format!(
            "singular functional needs w(0) = 0, got {}",
            w.values[0]
        )));
    }
    Ok(())
}

/// `int_lo^hi w(x)/x dx` on the piecewise-linear interpolant, `0 <= lo <= hi <= T`.
fn integral_between(w: &GridFunction, lo: f64, hi: f64) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    let h = w.step();
    let m = w.m();
    let first = ((lo / h).floor() as usize).min(m - 1);
    let last = ((hi / h).ceil() as usize).clamp(first + 1, m);
    let mut acc = NeumaierSum::new();
    for i in first..last {
        let x0 = w.time(i);
        let x1 = w.time(i + 1);
        let p = lo.max(x0);
        let q = hi.min(x1);
        if q <= p {
            continue;
        }
        let slope = (w.values[i + 1] - w.values[i]) / (x1 - x0);
        if p == 0.0 {
            acc.add(slope * q);
        } else {
            let wp = w.values[i] + slope * (p - x0);
            acc.add(anchored_segment(p, wp, slope, q));
        }
    }
    acc.value()
}

/// `int_0^t w(x)/x dx` for a piecewise-linear `w` with `w(0) = 0`, `t in [0, T]`.
pub fn log_integral_functional(w: &GridFunction, t: f64) -> Result<f64> {
    require_linear_through_origin(w)?;
    if !(0.0..=w.horizon).contains(&t) {
        return Err(out_of_range("t", format!("t in [0, {}] required, got {t}", w.horizon)));
    }
    Ok(integral_between(w, 0.0, t))
}

/// The truncated functional `H_eps(w)(t)`: `int_eps^t w(x)/x dx` for
/// `t > eps`, and `0` for `t <= eps`.
pub fn truncated_functional(w: &GridFunction, eps: f64, t: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < w.horizon) {
        return Err(out_of_range(
            "eps",
            format!("eps in (0, {}) required, got {eps}", w.horizon),
        ));
    }
    if w.interpretation != Interpretation::PiecewiseLinear {
        return Err(Error::Grid("truncated functional needs a PiecewiseLinear path".into()));
    }
    if !(0.0..=w.horizon).contains(&t) {
        return Err(out_of_range("t", format!("t in [0, {}] required, got {t}", w.horizon)));
    }
    if t <= eps {
        return Ok(0.0);
    }
    Ok(integral_between(w, eps, t))
}

/// Precomputed per-segment weights for evaluating the functional at grid
/// nodes of many paths with the same `m`.
///
/// With `x_i = i h`, segment `i >= 1` contributes
/// `w_i ln(1 + 1/i) + i (w_{i+1} - w_i) g(1/i)` where `g(r) = r - ln(1 + r)`,
/// and segment 0 contributes `w_1`. The weights do not depend on the horizon.
#[derive(Debug, Clone)]
pub struct LogFunctional {
    log_ratio: Vec<f64>,
    slope_weight: Vec<f64>,
}

impl LogFunctional {
    pub fn new(m: usize) -> Self {
        let mut log_ratio = vec![0.0; m];
        let mut slope_weight = vec![0.0; m];
        for i in 1..m {
            let r = 1.0 / i as f64;
            log_ratio[i] = r.ln_1p();
            slope_weight[i] = i as f64 * log1p_gap(r);
        }
        Self {
            log_ratio,
            slope_weight,
        }
    }

    pub fn m(&self) -> usize {
        self.log_ratio.len()
    }

    /// Running values `Y(x_k)` for `k = 0..=m`, given node values with `values[0] = 0`.
    pub fn cumulative(&self, values: &[f64]) -> Vec<f64> {
        let m = self.m();
        assert_eq!(values.len(), m + 1, "grid size mismatch");
        let mut out = Vec::with_capacity(m + 1);
        out.push(0.0);
        let mut acc = NeumaierSum::new();
        acc.add(values[1]);
        out.push(acc.value());
        for i in 1..m {
            let w = values[i];
            acc.add(w * self.log_ratio[i] + (values[i + 1] - w) * self.slope_weight[i]);
            out.push(acc.value());
        }
        out
    }

    /// `Y(x_k)` at the requested node indices (ascending or not).
    pub fn at_nodes(&self, values: &[f64], nodes: &[usize]) -> Vec<f64> {
        let cum = self.cumulative(values);
        nodes.iter().map(|&k| cum[k]).collect()
    }
}

/// Covariance of the limit process, `Cov(Y(s), Y(t))`, equal to
/// `int_0^s int_0^t min(x, y)/(x y) dy dx = min(s,t) (2 + ln(max(s,t)/min(s,t)))`.
pub fn limit_covariance(s: f64, t: f64) -> Result<f64> {
    for (name, v) in [("s", s), ("t", t)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(out_of_range(name, format!("{name} in [0, 1] required, got {v}")));
        }
    }
    let lo = s.min(t);
    let hi = s.max(t);
    if lo == 0.0 {
        return Ok(0.0);
    }
    Ok(lo * (2.0 + (hi / lo).ln()))
}

/// The same covariance by iterated adaptive quadrature of the kernel.
pub fn limit_covariance_quadrature(s: f64, t: f64) -> Result<Quadrature> {
    for (name, v) in [("s", s), ("t", t)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(out_of_range(name, format!("{name} in [0, 1] required, got {v}")));
        }
    }
    Ok(quadrature::min_kernel_double_integral(s, t, Tolerance::default()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mcengine::derive_stream;
    use proptest::prelude::*;

    struct ZeroGaussians;
    impl GaussianSource for ZeroGaussians {
        fn next_gaussian(&mut self) -> f64 {
            0.0
        }
    }

    fn ramp(m: usize) -> GridFunction {
        GridFunction::from_fn(m, Interpretation::PiecewiseLinear, |x| x).unwrap()
    }

    #[test]
    fn zero_gaussians_give_zero_path() {
        let w = simulate_wiener(64, 1.0, &mut ZeroGaussians).unwrap();
        assert!(w.values().iter().all(|v| *v == 0.0));
        assert_eq!(w.interpretation(), Interpretation::PiecewiseLinear);
    }

    #[test]
    fn simulation_is_deterministic_and_starts_at_zero() {
        let a = simulate_wiener(1000, 2.0, &mut derive_stream(3, 4)).unwrap();
        let b = simulate_wiener(1000, 2.0, &mut derive_stream(3, 4)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.values()[0], 0.0);
        assert_eq!(a.m(), 1000);
        assert_eq!(a.horizon(), 2.0);
    }

    #[test]
    fn simulation_rejects_bad_arguments() {
        assert!(simulate_wiener(0, 1.0, &mut ZeroGaussians).is_err());
        assert!(simulate_wiener(4, 0.0, &mut ZeroGaussians).is_err());
    }

    #[test]
    fn terminal_variance_is_horizon() {
        // Var W(1) = 1; with R = 10^5 the sample variance has sd ~ sqrt(2/R) = 0.0045
        let r = 100_000u64;
        let m = 1000;
        let ends: Vec<f64> = (0..r)
            .map(|i| {
                *simulate_wiener(m, 1.0, &mut derive_stream(77, i))
                    .unwrap()
                    .values()
                    .last()
                    .unwrap()
            })
            .collect();
        let mean = ends.iter().sum::<f64>() / r as f64;
        let var = ends.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (r - 1) as f64;
        assert!((var - 1.0).abs() <= 0.02, "var {var}");
    }

    #[test]
    fn functional_of_zero_path_is_zero() {
        let w = GridFunction::zeros(16, 1.0, Interpretation::PiecewiseLinear).unwrap();
        for t in [0.0, 0.3, 1.0] {
            assert_eq!(log_integral_functional(&w, t).unwrap(), 0.0);
        }
    }

    #[test]
    fn functional_of_ramp_is_t() {
        let w = ramp(100);
        for t in [0.0, 0.005, 0.013, 0.5, 0.777, 1.0] {
            let v = log_integral_functional(&w, t).unwrap();
            assert!((v - t).abs() < 1e-14, "t={t}: {v}");
        }
    }

    #[test]
    fn functional_rejects_step_paths_and_bad_t() {
        let w = GridFunction::from_fn(8, Interpretation::CadlagStep, |x| x).unwrap();
        assert!(log_integral_functional(&w, 0.5).is_err());
        assert!(log_integral_functional(&w.as_piecewise_linear(), 0.5).is_ok());
        let l = ramp(8);
        assert!(log_integral_functional(&l, 1.5).is_err());
        assert!(log_integral_functional(&l, -0.1).is_err());
        let shifted = GridFunction::from_fn(8, Interpretation::PiecewiseLinear, |x| 1.0 + x).unwrap();
        assert!(log_integral_functional(&shifted, 0.5).is_err());
    }

    #[test]
    fn quadratic_path_converges_at_second_order() {
        // int_0^1 x^2/x dx = 1/2; the interpolation error is O(ln(m)/m^2)
        let err = |m: usize| {
            let w = GridFunction::from_fn(m, Interpretation::PiecewiseLinear, |x| x * x).unwrap();
            (log_integral_functional(&w, 1.0).unwrap() - 0.5).abs()
        };
        let (e1, e2, e3) = (err(64), err(128), err(256));
        assert!(e1 > 0.0);
        // the ln(m) factor pulls the halving ratio a little below 4
        for (a, b) in [(e1, e2), (e2, e3)] {
            let ratio = a / b;
            assert!(ratio > 3.3 && ratio < 4.0, "{a} {b}");
        }
    }

    #[test]
    fn functional_on_longer_horizon() {
        // w(x) = x on [0, 50]: int_0^t 1 dx = t
        let w = GridFunction::new(
            (0..=50).map(|i| i as f64).collect(),
            50.0,
            Interpretation::PiecewiseLinear,
        )
        .unwrap();
        assert!((log_integral_functional(&w, 50.0).unwrap() - 50.0).abs() < 1e-12);
        assert!((log_integral_functional(&w, 12.5).unwrap() - 12.5).abs() < 1e-12);
    }

    #[test]
    fn truncated_examples() {
        let w = ramp(64);
        assert_eq!(truncated_functional(&w, 0.2, 0.1).unwrap(), 0.0);
        assert_eq!(truncated_functional(&w, 0.2, 0.2).unwrap(), 0.0);
        assert!((truncated_functional(&w, 0.5, 1.0).unwrap() - 0.5).abs() < 1e-14);
        assert!(truncated_functional(&w, 0.0, 1.0).is_err());
        assert!(truncated_functional(&w, 1.0, 1.0).is_err());
    }

    #[test]
    fn truncation_gap_shrinks_with_eps() {
        // the gap is int_0^eps W(x)/x dx, whose variance is 2 eps
        let eval = LogFunctional::new(DEFAULT_RESOLUTION);
        let eps = [0.1, 0.01, 0.001];
        let mut sq = [0.0; 3];
        let paths = 2000;
        for r in 0..paths {
            let w = simulate_wiener(DEFAULT_RESOLUTION, 1.0, &mut derive_stream(5, r)).unwrap();
            let full = eval.cumulative(w.values())[DEFAULT_RESOLUTION];
            for (k, &e) in eps.iter().enumerate() {
                sq[k] += (full - truncated_functional(&w, e, 1.0).unwrap()).powi(2);
            }
        }
        let rms: Vec<f64> = sq.iter().map(|s| (s / paths as f64).sqrt()).collect();
        assert!(rms[0] > rms[1] && rms[1] > rms[2], "{rms:?}");
        for (r, e) in rms.iter().zip(eps) {
            assert!((r / (2.0 * e).sqrt() - 1.0).abs() < 0.1, "{rms:?}");
        }
    }

    #[test]
    fn cached_evaluator_matches_direct_evaluation() {
        let m = 512;
        let w = simulate_wiener(m, 1.0, &mut derive_stream(8, 1)).unwrap();
        let cached = LogFunctional::new(m).cumulative(w.values());
        for k in [0, 1, 2, 7, 128, 256, 511, 512] {
            let direct = log_integral_functional(&w, w.time(k)).unwrap();
            assert!(
                (cached[k] - direct).abs() < 1e-13,
                "node {k}: {} vs {direct}",
                cached[k]
            );
        }
    }

    #[test]
    fn covariance_examples() {
        assert_eq!(limit_covariance(1.0, 1.0).unwrap(), 2.0);
        assert_eq!(limit_covariance(0.0, 0.7).unwrap(), 0.0);
        assert!((limit_covariance(0.5, 1.0).unwrap() - 1.346_57).abs() < 1e-5);
        assert!(limit_covariance(1.1, 0.5).is_err());
        assert!(limit_covariance(0.5, -0.1).is_err());
    }

    #[test]
    fn covariance_diagonal_matches_quadrature() {
        for i in 1..=10 {
            let t = i as f64 / 10.0;
            let q = limit_covariance_quadrature(t, t).unwrap();
            assert!(q.converged);
            assert!((limit_covariance(t, t).unwrap() - q.value).abs() < 1e-6, "t={t}");
        }
    }

    #[test]
    fn covariance_off_diagonal_matches_quadrature() {
        let q = limit_covariance_quadrature(0.5, 1.0).unwrap();
        assert!((q.value - limit_covariance(0.5, 1.0).unwrap()).abs() < 1e-9);
        assert!((q.value - 1.346_57).abs() < 1e-5);
    }

    #[test]
    fn grid_eval_interpretations() {
        let step = GridFunction::new(vec![0.0, 1.0, 3.0], 1.0, Interpretation::CadlagStep).unwrap();
        assert_eq!(step.eval(0.49).unwrap(), 0.0);
        assert_eq!(step.eval(0.5).unwrap(), 1.0);
        assert_eq!(step.eval(1.0).unwrap(), 3.0);
        let lin = step.as_piecewise_linear();
        assert_eq!(lin.eval(0.75).unwrap(), 2.0);
        assert!(lin.eval(1.01).is_err());
    }

    #[test]
    fn grid_csv_layout() {
        let g = GridFunction::new(vec![0.0, 0.5, -1.0], 1.0, Interpretation::CadlagStep).unwrap();
        let mut buf = Vec::new();
        g.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "t,value\n0,0\n0.5,0.5\n1,-1\n");
    }

    proptest! {
        #[test]
        fn covariance_is_symmetric(s in 0.0f64..=1.0, t in 0.0f64..=1.0) {
            prop_assert_eq!(limit_covariance(s, t).unwrap(), limit_covariance(t, s).unwrap());
        }

        #[test]
        fn functional_is_linear_in_path(seed in 0u64..1000, c in -5.0f64..5.0) {
            let w = simulate_wiener(64, 1.0, &mut derive_stream(seed, 0)).unwrap();
            let scaled = GridFunction::new(w.values().iter().map(|v| c * v).collect(), 1.0,
                                           Interpretation::PiecewiseLinear).unwrap();
            let a = c * log_integral_functional(&w, 1.0).unwrap();
            let b = log_integral_functional(&scaled, 1.0).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
        }
    }
}
