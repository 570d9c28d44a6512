//! Optimisation over the Strassen ball
//! `F = { f : f(0) = 0, f absolutely continuous, int_0^1 f'(u)^2 du <= 1 }`.
//!
//! Exchanging the order of integration gives
//! `int_0^t f(u)/u du = int_0^t f'(v) ln(t/v) dv`, so maximising over `F` is
//! maximising a linear functional over the unit ball of `L2[0, 1]`. Its value
//! is the `L2` norm of the kernel `ln(t/v) 1{v < t}`, which is `sqrt(2t)`.
//!
//! Candidates are discretised with `m` cells of width `h = 1/m`; `f'` is
//! constant on each cell and stored at the midpoints `v_j = (j - 1/2) h`.

use std::io::Write;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use crate::error::{out_of_range, Error, Result};
use crate::summation::NeumaierSum;
use crate::wiener::{GridFunction, Interpretation};

/// Slack on `norm_sq <= 1` when testing membership in the ball.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

/// A discretised element of the Strassen ball (or a candidate for one).
#[derive(Debug, Clone, PartialEq)]
pub struct StrassenCandidate {
    fprime: Vec<f64>,
}

impl StrassenCandidate {
    pub fn new(fprime: Vec<f64>) -> Result<Self> {
        if fprime.is_empty() {
            return Err(out_of_range("m", "at least one cell required"));
        }
        if fprime.iter().any(|v| !v.is_finite()) {
            return Err(Error::Grid("non-finite derivative value".into()));
        }
        Ok(Self { fprime })
    }

    /// Samples `fprime` at the cell midpoints.
    pub fn from_fn<F: Fn(f64) -> f64>(m: usize, fprime: F) -> Result<Self> {
        Self::new((1..=m).map(|j| fprime((j as f64 - 0.5) / m as f64)).collect())
    }

    pub fn m(&self) -> usize {
        self.fprime.len()
    }

    pub fn h(&self) -> f64 {
        1.0 / self.m() as f64
    }

    pub fn fprime(&self) -> &[f64] {
        &self.fprime
    }

    pub fn midpoint(&self, j: usize) -> f64 {
        (j as f64 + 0.5) * self.h()
    }

    /// `h * sum f'_j^2`, the squared `L2` norm of the piecewise-constant derivative.
    pub fn norm_sq(&self) -> f64 {
        self.h() * self.fprime.iter().map(|v| v * v).collect::<NeumaierSum>().value()
    }

    pub fn is_member(&self, tol: f64) -> bool {
        self.norm_sq() <= 1.0 + tol
    }

    /// `f(i h)` for `i = 0..=m`, with `f(0) = 0`.
    pub fn f_values(&self) -> Vec<f64> {
        let h = self.h();
        let mut acc = NeumaierSum::new();
        std::iter::once(0.0)
            .chain(self.fprime.iter().map(|d| {
                acc.add(h * d);
                acc.value()
            }))
            .collect()
    }

    /// Scaled copy.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            fprime: self.fprime.iter().map(|v| v * c).collect(),
        }
    }

    /// CSV with columns `v,fprime`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["v", "fprime"])?;
        for (j, d) in self.fprime.iter().enumerate() {
            out.write_record([self.midpoint(j).to_string(), d.to_string()])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// `ln(t / v_j)` at midpoints below `t`, zero elsewhere.
fn kernel(t: f64, m: usize) -> Vec<f64> {
    (1..=m)
        .map(|j| {
            let v = (j as f64 - 0.5) / m as f64;
            if v < t {
                (t / v).ln()
            } else {
                0.0
            }
        })
        .collect()
}

fn h_norm(values: &[f64], h: f64) -> f64 {
    (h * values.iter().map(|v| v * v).collect::<NeumaierSum>().value()).sqrt()
}

/// Maximiser of `int_0^t f(u)/u du` over the discretised ball.
#[derive(Debug, Clone, PartialEq)]
pub struct Maximizer {
    pub value: f64,
    pub argmax: StrassenCandidate,
}

fn check_t(t: f64) -> Result<()> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(out_of_range("t", format!("0 < t <= 1 required, got {t}")));
    }
    Ok(())
}

/// Solves `max h <c, f'>` subject to `h |f'|^2 <= 1` in closed form: the
/// maximiser is `c / |c|_h` and the value is `|c|_h`, which tends to
/// `sqrt(2t)` as `m` grows.
pub fn maximize_functional(t: f64, m: usize) -> Result<Maximizer> {
    check_t(t)?;
    if m < 2 {
        return Err(out_of_range("m", format!("m >= 2 required, got {m}")));
    }
    let c = kernel(t, m);
    let norm = h_norm(&c, 1.0 / m as f64);
    let argmax = StrassenCandidate::new(c.iter().map(|v| v / norm).collect())?;
    Ok(Maximizer { value: norm, argmax })
}

/// Projected gradient ascent on the same discrete problem, started from
/// `f' = 1`. Used only to cross-check the closed form.
pub fn maximize_functional_iterative(t: f64, m: usize, step: f64, max_iter: usize) -> Result<Maximizer> {
    check_t(t)?;
    if m < 2 {
        return Err(out_of_range("m", format!("m >= 2 required, got {m}")));
    }
    if !(step > 0.0) {
        return Err(out_of_range("step", format!("step > 0 required, got {step}")));
    }
    let h = 1.0 / m as f64;
    let c = kernel(t, m);
    let objective = |f: &[f64]| h * f.iter().zip(&c).map(|(a, b)| a * b).collect::<NeumaierSum>().value();
    let mut f = vec![1.0; m];
    let mut value = objective(&f);
    for _ in 0..max_iter {
        // gradient of h <c, f> in the h-weighted inner product is c itself
        for (fi, ci) in f.iter_mut().zip(&c) {
            *fi += step * ci;
        }
        let norm = h_norm(&f, h);
        if norm > 1.0 {
            f.iter_mut().for_each(|v| *v /= norm);
        }
        let next = objective(&f);
        let done = (next - value).abs() <= 1e-15 * next.abs();
        value = next;
        if done {
            break;
        }
    }
    Ok(Maximizer {
        value,
        argmax: StrassenCandidate::new(f)?,
    })
}

/// `sqrt(2x)`, the pointwise supremum of `int_0^x f(u)/u du` over the ball.
pub fn envelope(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(out_of_range("x", format!("x in [0, 1] required, got {x}")));
    }
    Ok((2.0 * x).sqrt())
}

/// One row of the optimiser report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtremalRow {
    pub t: f64,
    pub m: usize,
    pub value: f64,
    pub closed_form: f64,
    /// `closed_form - value`.
    pub gap: f64,
}

pub fn extremal_table(t_grid: &[f64], m: usize) -> Result<Vec<ExtremalRow>> {
    t_grid
        .iter()
        .map(|&t| {
            let value = maximize_functional(t, m)?.value;
            let closed_form = envelope(t)?;
            Ok(ExtremalRow {
                t,
                m,
                value,
                closed_form,
                gap: closed_form - value,
            })
        })
        .collect()
}

/// `int_0^v ln(x/s) ds = v ln(x/v) + v`.
#[inline]
fn log_kernel_antiderivative(x: f64, v: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else {
        v * (x / v).ln() + v
    }
}

/// Forward map on the nodes `x`: entry `(i, j)` is
/// `int_{cell j, v < x_i} ln(x_i / v) dv`, the exact image of a derivative that
/// is constant on cell `j`.
fn forward_matrix(nodes: &[f64], m: usize) -> DMatrix<f64> {
    let h = 1.0 / m as f64;
    DMatrix::from_fn(nodes.len(), m, |i, j| {
        let x = nodes[i];
        let a = j as f64 * h;
        if a >= x {
            return 0.0;
        }
        let b = ((j + 1) as f64 * h).min(x);
        log_kernel_antiderivative(x, b) - log_kernel_antiderivative(x, a)
    })
}

/// `x -> int_0^x f(u)/u du` for the candidate, on a unit grid with `grid_m` cells.
pub fn forward_map(candidate: &StrassenCandidate, grid_m: usize) -> Result<GridFunction> {
    if grid_m == 0 {
        return Err(out_of_range("m", "m >= 1 required"));
    }
    let nodes: Vec<f64> = (1..=grid_m).map(|i| i as f64 / grid_m as f64).collect();
    let a = forward_matrix(&nodes, candidate.m());
    let g = &a * DVector::from_column_slice(candidate.fprime());
    let mut values = Vec::with_capacity(grid_m + 1);
    values.push(0.0);
    values.extend(g.iter().copied());
    GridFunction::new(values, 1.0, Interpretation::PiecewiseLinear)
}

/// Result of the regularised inversion.
#[derive(Debug, Clone, PartialEq)]
pub struct MinNormFit {
    pub candidate: StrassenCandidate,
    /// `max_i |(A f')(x_i) - g(x_i)|`.
    pub residual: f64,
    pub ridge: f64,
}

/// Relative ridge used when none is given: `ridge = DEFAULT_RIDGE_FACTOR * trace(A^T A) / m`.
pub const DEFAULT_RIDGE_FACTOR: f64 = 1e-12;

/// Least-squares design for fitting `g` (unit horizon, `g(0) = 0`) with `m` cells.
struct Design {
    a: DMatrix<f64>,
    target: DVector<f64>,
}

impl Design {
    fn new(g: &GridFunction, m: usize) -> Result<Self> {
        if m < 1 {
            return Err(out_of_range("m", "m >= 1 required"));
        }
        if g.horizon() != 1.0 {
            return Err(Error::Grid(format!(
                "expected a unit-horizon grid, got horizon {}",
                g.horizon()
            )));
        }
        if g.values()[0] != 0.0 {
            return Err(Error::Grid(format!("g(0) = 0 required, got {}", g.values()[0])));
        }
        let nodes: Vec<f64> = (1..=g.m()).map(|i| g.time(i)).collect();
        Ok(Self {
            a: forward_matrix(&nodes, m),
            target: DVector::from_column_slice(&g.values()[1..]),
        })
    }

    fn cells(&self) -> usize {
        self.a.ncols()
    }

    fn resolve_ridge(&self, ridge: Option<f64>) -> Result<f64> {
        // trace(A^T A) is the squared Frobenius norm of A
        let ridge = ridge.unwrap_or_else(|| DEFAULT_RIDGE_FACTOR * self.a.norm_squared() / self.cells() as f64);
        if !(ridge >= 0.0 && ridge.is_finite()) {
            return Err(out_of_range("ridge", format!("ridge >= 0 required, got {ridge}")));
        }
        Ok(ridge)
    }

    fn residual(&self, x: &DVector<f64>) -> f64 {
        (&self.a * x - &self.target).amax()
    }

    /// Minimises `|A x - g|^2 + ridge |x|^2` through a QR factorisation of
    /// `[A; sqrt(ridge) I]`, which avoids squaring the condition number.
    fn solve(&self, ridge: f64) -> Result<DVector<f64>> {
        let (rows, m) = self.a.shape();
        let mut aug = DMatrix::zeros(rows + m, m);
        aug.view_mut((0, 0), (rows, m)).copy_from(&self.a);
        let root = ridge.sqrt();
        for i in 0..m {
            aug[(rows + i, i)] = root;
        }
        let mut rhs = DVector::zeros(rows + m);
        rhs.rows_mut(0, rows).copy_from(&self.target);
        let qr = aug.qr();
        let r = qr.r();
        let (lo, hi) = r.diagonal().iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), d| {
            (lo.min(d.abs()), hi.max(d.abs()))
        });
        if !(hi > 0.0) || lo / hi < f64::EPSILON * (rows + m) as f64 {
            return Err(Error::SingularSystem(format!(
                "diagonal ratio {:.3e} at ridge {ridge}",
                if hi > 0.0 { lo / hi } else { 0.0 }
            )));
        }
        let qtb = qr.q().transpose() * rhs;
        r.solve_upper_triangular(&qtb)
            .ok_or_else(|| Error::SingularSystem(format!("triangular solve failed at ridge {ridge}")))
    }
}

/// Least-norm derivative whose forward map fits `g` in least squares, with
/// Tikhonov ridge `ridge` (default `1e-12 * trace(A^T A) / m`).
///
/// With `ridge = 0` a numerically rank-deficient system is an error.
pub fn min_norm_representation(g: &GridFunction, m: usize, ridge: Option<f64>) -> Result<MinNormFit> {
    let design = Design::new(g, m)?;
    let ridge = design.resolve_ridge(ridge)?;
    let x = design.solve(ridge)?;
    Ok(MinNormFit {
        residual: design.residual(&x),
        candidate: StrassenCandidate::new(x.iter().copied().collect())?,
        ridge,
    })
}

/// Breakdown of the limit-set membership score.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitSetScore {
    /// Sup-norm misfit of the best ball-constrained fit; 0 means inside.
    pub score: f64,
    /// `norm_sq` of the unconstrained min-norm fit.
    pub min_norm_sq: f64,
    /// `max(0, |f'| - 1)` for the unconstrained fit.
    pub excess_norm: f64,
    /// Sup-norm misfit of the unconstrained fit.
    pub residual: f64,
    /// Ridge at which the constrained fit lies on the unit sphere (equal to
    /// the base ridge when the unconstrained fit is already inside).
    pub constrained_ridge: f64,
}

/// Scores how far `g` is from the image of the ball under
/// `f -> int_0^x f(u)/u du`.
///
/// The min-norm fit is computed first. If it lies in the ball, its residual
/// is the score. Otherwise the ridge is raised until the fit reaches the unit
/// sphere (the ball-constrained least-squares solution), and the residual of
/// that fit is the score, so excess norm is converted into misfit.
pub fn limit_set_score(g: &GridFunction, m: usize, ridge: Option<f64>) -> Result<LimitSetScore> {
    let design = Design::new(g, m)?;
    let base = design.resolve_ridge(ridge)?;
    let h = 1.0 / m as f64;
    let fit = design.solve(base)?;
    let min_norm_sq = h_norm(fit.as_slice(), h).powi(2);
    let residual = design.residual(&fit);
    let excess_norm = (min_norm_sq.sqrt() - 1.0).max(0.0);
    if min_norm_sq <= 1.0 + MEMBERSHIP_TOL {
        return Ok(LimitSetScore {
            score: residual,
            min_norm_sq,
            excess_norm,
            residual,
            constrained_ridge: base,
        });
    }

    let normal = design.a.transpose() * &design.a;
    let eig = SymmetricEigen::new(normal);
    let proj = eig.eigenvectors.transpose() * (design.a.transpose() * &design.target);
    let values: Vec<f64> = eig.eigenvalues.iter().map(|e| e.max(0.0)).collect();
    let norm_sq_at = |lambda: f64| -> f64 {
        h * values
            .iter()
            .zip(proj.iter())
            .map(|(e, b)| {
                if e + lambda > 0.0 {
                    (b / (e + lambda)).powi(2)
                } else {
                    0.0
                }
            })
            .sum::<f64>()
    };
    // norm_sq_at is decreasing in lambda; bracket the unit sphere and bisect in log space
    let mut lo = base.max(f64::MIN_POSITIVE);
    let mut hi = lo.max(1e-16);
    while norm_sq_at(hi) > 1.0 {
        lo = hi;
        hi *= 4.0;
    }
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        if norm_sq_at(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi / lo < 1.0 + 1e-12 {
            break;
        }
    }
    let constrained = design.solve(hi)?;
    Ok(LimitSetScore {
        score: design.residual(&constrained),
        min_norm_sq,
        excess_norm,
        residual,
        constrained_ridge: hi,
    })
}

/// Scalar infeasibility score of [`limit_set_score`].
pub fn limit_set_distance(g: &GridFunction, m: usize, ridge: Option<f64>) -> Result<f64> {
    Ok(limit_set_score(g, m, ridge)?.score)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::SQRT_2;

    // Independent oracle for int_0^t ln(t/v)^2 dv = 2t.
    fn kernel_norm_sq_oracle(t: f64) -> f64 {
        crate::quadrature::integrate(|v| (t / v).ln().powi(2), 0.0, t, Default::default()).value
    }

    #[test]
    fn oracle_confirms_two_t() {
        for t in [0.1, 0.25, 0.5, 1.0] {
            assert!((kernel_norm_sq_oracle(t) - 2.0 * t).abs() < 1e-10);
        }
    }

    #[test]
    fn value_at_one_is_sqrt_two() {
        let max = maximize_functional(1.0, 1 << 14).unwrap();
        assert!((max.value - SQRT_2).abs() < 1e-3, "{}", max.value);
        assert!((max.argmax.norm_sq() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn argmax_reconstructs_extremal_function() {
        let max = maximize_functional(1.0, 1 << 14).unwrap();
        let f = max.argmax.f_values();
        let m = max.argmax.m();
        let worst = f
            .iter()
            .enumerate()
            .map(|(i, fi)| {
                let u = i as f64 / m as f64;
                let exact = if u == 0.0 { 0.0 } else { (u - u * u.ln()) / SQRT_2 };
                (fi - exact).abs()
            })
            .fold(0.0, f64::max);
        assert!(worst <= 1e-2, "{worst}");
    }

    #[test]
    fn value_at_quarter_and_half() {
        for t in [0.25, 0.5] {
            let v = maximize_functional(t, 1 << 14).unwrap().value;
            assert!((v - kernel_norm_sq_oracle(t).sqrt()).abs() < 1e-3, "t={t}: {v}");
        }
        assert!((maximize_functional(0.25, 1 << 14).unwrap().value - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-3);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(maximize_functional(0.0, 16).is_err());
        assert!(maximize_functional(-0.5, 16).is_err());
        assert!(maximize_functional(1.5, 16).is_err());
        assert!(maximize_functional(0.5, 1).is_err());
        assert!(envelope(-0.1).is_err());
        assert!(envelope(1.1).is_err());
    }

    #[test]
    fn envelope_examples() {
        assert_eq!(envelope(1.0).unwrap(), SQRT_2);
        assert_eq!(envelope(0.0).unwrap(), 0.0);
    }

    #[test]
    fn envelope_dominates_optimizer_and_gap_shrinks() {
        for i in 1..=20 {
            let x = i as f64 / 20.0;
            let env = envelope(x).unwrap();
            let gaps: Vec<f64> = [256, 1024, 4096]
                .iter()
                .map(|&m| env - maximize_functional(x, m).unwrap().value)
                .collect();
            assert!(gaps.iter().all(|g| *g >= 0.0), "x={x}: {gaps:?}");
            assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2], "x={x}: {gaps:?}");
        }
    }

    #[test]
    fn grid_convergence_when_m_doubles() {
        for t in [0.25, 0.5, 1.0] {
            let target = (2.0f64 * t).sqrt();
            let mut prev = f64::INFINITY;
            for k in 6..=14 {
                let err = (maximize_functional(t, 1 << k).unwrap().value - target).abs();
                assert!(err < prev, "t={t}, m=2^{k}");
                prev = err;
            }
        }
    }

    #[test]
    fn value_monotone_in_t_and_bounded() {
        let m = 512;
        let mut prev = 0.0;
        for i in 1..=200 {
            let t = i as f64 / 200.0;
            let v = maximize_functional(t, m).unwrap().value;
            assert!(v >= prev && v <= SQRT_2 + 1e-9);
            prev = v;
        }
    }

    #[test]
    fn iterative_mode_agrees_with_closed_form() {
        for t in [0.25, 1.0] {
            let exact = maximize_functional(t, 1024).unwrap();
            let iter = maximize_functional_iterative(t, 1024, 0.05, 10_000).unwrap();
            assert!((exact.value - iter.value).abs() < 1e-10, "t={t}");
            let diff = exact
                .argmax
                .fprime()
                .iter()
                .zip(iter.argmax.fprime())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(diff < 1e-5, "t={t}: {diff}");
        }
    }

    #[test]
    fn ramp_inverts_to_unit_derivative() {
        let m = 128;
        let g = GridFunction::from_fn(m, Interpretation::PiecewiseLinear, |x| x).unwrap();
        let fit = min_norm_representation(&g, m, None).unwrap();
        assert!(fit.residual <= 1e-6, "{}", fit.residual);
        assert!(
            (fit.candidate.norm_sq() - 1.0).abs() < 1e-4,
            "{}",
            fit.candidate.norm_sq()
        );
        let l2 = fit.candidate.fprime().iter().map(|d| (d - 1.0).powi(2)).sum::<f64>() / m as f64;
        assert!(l2.sqrt() < 5e-3, "{l2}");
    }

    #[test]
    fn zero_inverts_to_zero() {
        let g = GridFunction::zeros(64, 1.0, Interpretation::PiecewiseLinear).unwrap();
        let fit = min_norm_representation(&g, 64, None).unwrap();
        assert!(fit.candidate.fprime().iter().all(|d| *d == 0.0));
        assert_eq!(fit.candidate.norm_sq(), 0.0);
        assert_eq!(limit_set_distance(&g, 64, None).unwrap(), 0.0);
    }

    #[test]
    fn forward_map_of_unit_derivative_is_identity() {
        let one = StrassenCandidate::from_fn(50, |_| 1.0).unwrap();
        let g = forward_map(&one, 50).unwrap();
        for (i, v) in g.values().iter().enumerate() {
            assert!((v - i as f64 / 50.0).abs() < 1e-14);
        }
    }

    #[test]
    fn extremal_derivative_round_trips() {
        let m = 256;
        let f = maximize_functional(1.0, m).unwrap().argmax;
        let g = forward_map(&f, m).unwrap();
        // g(x) = (2x - x ln x)/sqrt(2) for the continuous extremal function
        let x = 0.5;
        assert!((g.eval(x).unwrap() - (2.0 * x - x * x.ln()) / SQRT_2).abs() < 1e-2);
        let fit = min_norm_representation(&g, m, None).unwrap();
        assert!(
            (fit.candidate.norm_sq() - 1.0).abs() < 1e-3,
            "{}",
            fit.candidate.norm_sq()
        );
    }

    #[test]
    fn singular_system_without_ridge_is_an_error() {
        // 4 data points cannot pin down 32 cells
        let g = GridFunction::from_fn(4, Interpretation::PiecewiseLinear, |x| x).unwrap();
        let err = min_norm_representation(&g, 32, Some(0.0)).unwrap_err();
        assert!(matches!(err, Error::SingularSystem(_)));
        assert!(err.to_string().contains("positive ridge"));
        assert!(min_norm_representation(&g, 32, None).is_ok());
    }

    #[test]
    fn inversion_needs_origin_anchored_unit_grid() {
        let g = GridFunction::from_fn(8, Interpretation::PiecewiseLinear, |x| 1.0 + x).unwrap();
        assert!(min_norm_representation(&g, 8, None).is_err());
        let g = GridFunction::zeros(8, 2.0, Interpretation::PiecewiseLinear).unwrap();
        assert!(min_norm_representation(&g, 8, None).is_err());
    }

    #[test]
    fn inflated_envelope_is_infeasible() {
        let m = 128;
        let g = GridFunction::from_fn(m, Interpretation::PiecewiseLinear, |x| 1.5 * (2.0 * x).sqrt()).unwrap();
        let score = limit_set_score(&g, m, None).unwrap();
        assert!(score.score > 0.05, "{score:?}");
        assert!(score.excess_norm > 0.0);
    }

    #[test]
    fn feasible_interior_point_scores_near_zero() {
        let m = 128;
        let half = StrassenCandidate::from_fn(m, |v| 0.5 * (1.0 + (3.0 * v).sin())).unwrap();
        assert!(half.is_member(MEMBERSHIP_TOL));
        let g = forward_map(&half, m).unwrap();
        assert!(limit_set_distance(&g, m, None).unwrap() < 1e-6);
    }

    #[test]
    fn candidate_basics_and_csv() {
        let c = StrassenCandidate::new(vec![1.0, -1.0]).unwrap();
        assert_eq!(c.norm_sq(), 1.0);
        assert_eq!(c.f_values(), vec![0.0, 0.5, 0.0]);
        assert!(c.is_member(0.0));
        assert!(!c.scaled(1.1).is_member(MEMBERSHIP_TOL));
        let mut buf = Vec::new();
        c.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "v,fprime\n0.25,1\n0.75,-1\n");
        assert!(StrassenCandidate::new(vec![]).is_err());
    }

    proptest! {
        #[test]
        fn argmax_direction_ignores_kernel_scale(t in 0.05f64..=1.0, c in 0.01f64..100.0) {
            // maximising h<c k, f'> over the ball picks the same f' for every c > 0
            let m = 64;
            let base = maximize_functional(t, m).unwrap();
            let k: Vec<f64> = kernel(t, m).iter().map(|v| c * v).collect();
            let norm = h_norm(&k, 1.0 / m as f64);
            for (a, b) in base.argmax.fprime().iter().zip(k.iter().map(|v| v / norm)) {
                prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
            }
        }
    }
}
