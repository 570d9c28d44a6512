//! Analytic self-checks run by the `check` command.

use serde::Serialize;

use crate::extremal::maximize_functional;
use crate::quadrature::{min_kernel_double_integral, Tolerance};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub value: f64,
    pub target: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckOutcome {
    fn new(name: &'static str, value: f64, target: f64, tolerance: f64) -> Self {
        Self {
            name,
            value,
            target,
            tolerance,
            passed: (value - target).abs() <= tolerance,
        }
    }
}

/// - `int_0^1 int_0^1 min(x, y)/(x y) dx dy = 2`
/// - `sup_F int_0^1 f(u)/u du = sqrt(2)` on `2^14` cells
/// - the maximiser is `(u - u ln u)/sqrt(2)` in sup norm
pub fn run_checks() -> Vec<CheckOutcome> {
    let mut out = Vec::with_capacity(3);
    let q = min_kernel_double_integral(1.0, 1.0, Tolerance::default());
    out.push(CheckOutcome::new("limit_variance_quadrature", q.value, 2.0, 1e-6));
    match maximize_functional(1.0, 1 << 14) {
        Ok(max) => {
            out.push(CheckOutcome::new(
                "strassen_extremal_value",
                max.value,
                2f64.sqrt(),
                1e-3,
            ));
            let m = max.argmax.m() as f64;
            let dist = max
                .argmax
                .f_values()
                .iter()
                .enumerate()
                .map(|(i, f)| {
                    let u = i as f64 / m;
                    let exact = if u == 0.0 { 0.0 } else { (u - u * u.ln()) / 2f64.sqrt() };
                    (f - exact).abs()
                })
                .fold(0.0, f64::max);
            out.push(CheckOutcome::new("strassen_extremal_function", dist, 0.0, 1e-2));
        }
        Err(_) => {
            out.push(CheckOutcome::new(
                "strassen_extremal_value",
                f64::NAN,
                2f64.sqrt(),
                1e-3,
            ));
            out.push(CheckOutcome::new("strassen_extremal_function", f64::NAN, 0.0, 1e-2));
        }
    }
    out
}

/// True when every check passed.
pub fn all_passed(outcomes: &[CheckOutcome]) -> bool {
    outcomes.iter().all(|c| c.passed)
}
