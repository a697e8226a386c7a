//! Gap densities `f(t) = ell log t + sum_k a_k (t - 1)^k` on `(0, 2]` and the
//! normalized parking iteration that drives them to the fixed density `f*`.
//!
//! This module works in plain `f64`. The certified constant lives in
//! [`crate::spectral`]; the iteration here is the diagnostic counterpart.

use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::Exec;
use crate::interval::Interval;
use crate::matrix::{MatrixError, TruncatedMatrix};
use crate::Check;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DensityError {
    #[error("t = {0} is outside (0, 2]")]
    DomainError(f64),
    #[error("normalizing integral {0} is not positive")]
    NonPositiveNormalization(f64),
    #[error("no convergence after {iterations} steps (last sup difference {last_diff:e})")]
    MaxIterExceeded { iterations: usize, last_diff: f64 },
    #[error("w.f0 = {0} contains zero")]
    OrthogonalStart(Interval),
    #[error("coefficient vector has length {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

pub const DEFAULT_ORDER: usize = 64;
pub const GRID_POINTS: usize = 512;
pub const GRID_LOWER: f64 = 0.05;
pub const GRID_ANCHORS: [f64; 5] = [0.05, 0.5, 1.0, 1.5, 2.0];

const TWO_LOG2_MINUS_1: f64 = 2.0 * LN_2 - 1.0;
const TWO_LOG2_MINUS_2: f64 = 2.0 * LN_2 - 2.0;

/// Chebyshev points on `[GRID_LOWER, 2]` plus the anchors, sorted.
pub fn default_grid() -> Vec<f64> {
    chebyshev_grid(GRID_LOWER, 2.0, GRID_POINTS)
}

pub fn chebyshev_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    let mut g: Vec<f64> = (0..n)
        .map(|j| {
            let theta = (2 * j + 1) as f64 * PI / (2 * n) as f64;
            (a + b) / 2.0 + (b - a) / 2.0 * theta.cos()
        })
        .chain(GRID_ANCHORS.iter().copied().filter(|x| (a..=b).contains(x)))
        .collect();
    g.sort_by(f64::total_cmp);
    g.dedup();
    g
}

/// `int_{-1}^{1} s^n ds`.
fn moment(n: usize) -> f64 {
    if n.is_multiple_of(2) {
        2.0 / (n + 1) as f64
    } else {
        0.0
    }
}

fn parity(k: usize) -> f64 {
    if k.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityCoeffs {
    pub ell: f64,
    pub a: Vec<f64>,
}

impl DensityCoeffs {
    pub fn new(ell: f64, a: Vec<f64>) -> Self {
        Self { ell, a }
    }

    /// The uniform density 1/2 with `m` polynomial slots.
    pub fn uniform(m: usize) -> Self {
        Self::polynomial(&[0.5], m)
    }

    /// Polynomial density `sum c_k (t - 1)^k` padded to `m` slots and scaled
    /// to unit mass.
    pub fn polynomial(c: &[f64], m: usize) -> Self {
        assert!(c.len() <= m, "too many coefficients for order {m}");
        let mut a = c.to_vec();
        a.resize(m, 0.0);
        let f = Self { ell: 0.0, a };
        let total = f.integral_total();
        f.scaled(1.0 / total)
    }

    pub fn from_vec(x: &[f64]) -> Self {
        Self {
            ell: x[0],
            a: x[1..].to_vec(),
        }
    }

    pub fn to_vec(&self) -> Vec<f64> {
        std::iter::once(self.ell)
            .chain(self.a.iter().copied())
            .collect()
    }

    /// Number of polynomial slots; the full vector has `m + 1` entries.
    pub fn m(&self) -> usize {
        self.a.len()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            ell: self.ell * s,
            a: self.a.iter().map(|x| x * s).collect(),
        }
    }

    pub fn l1_norm(&self) -> f64 {
        self.ell.abs() + self.a.iter().map(|x| x.abs()).sum::<f64>()
    }

    pub fn l1_distance(&self, other: &Self) -> f64 {
        self.to_vec()
            .iter()
            .zip(other.to_vec())
            .map(|(x, y)| (x - y).abs())
            .sum()
    }

    pub fn evaluate(&self, t: f64) -> Result<f64, DensityError> {
        check_domain(t)?;
        Ok(self.eval(t))
    }

    /// [`DensityCoeffs::evaluate`] without the domain check.
    pub fn eval(&self, t: f64) -> f64 {
        let s = t - 1.0;
        let poly = self.a.iter().rev().fold(0.0, |acc, c| acc * s + c);
        if self.ell == 0.0 {
            poly
        } else {
            self.ell * t.ln() + poly
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        let s = t - 1.0;
        let poly = self
            .a
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(0.0, |acc, (k, c)| acc * s + k as f64 * c);
        self.ell / t + poly
    }

    pub fn second_derivative(&self, t: f64) -> f64 {
        let s = t - 1.0;
        let poly = self
            .a
            .iter()
            .enumerate()
            .skip(2)
            .rev()
            .fold(0.0, |acc, (k, c)| acc * s + (k * (k - 1)) as f64 * c);
        -self.ell / (t * t) + poly
    }

    /// `F(t) = int_0^t f`.
    pub fn cdf(&self, t: f64) -> Result<f64, DensityError> {
        check_domain(t)?;
        let s = t - 1.0;
        let log_part = if self.ell == 0.0 {
            0.0
        } else {
            self.ell * (t * t.ln() - t)
        };
        let poly: f64 = self
            .a
            .iter()
            .enumerate()
            .map(|(k, c)| c * (s.powi(k as i32 + 1) - parity(k + 1)) / (k + 1) as f64)
            .sum();
        Ok(log_part + poly)
    }

    /// `int_0^2 f`.
    pub fn integral_total(&self) -> f64 {
        self.ell * TWO_LOG2_MINUS_2
            + self
                .a
                .iter()
                .enumerate()
                .map(|(k, c)| c * moment(k))
                .sum::<f64>()
    }

    /// `int_1^2 f`.
    pub fn integral_upper(&self) -> f64 {
        self.ell * TWO_LOG2_MINUS_1
            + self
                .a
                .iter()
                .enumerate()
                .map(|(k, c)| c / (k + 1) as f64)
                .sum::<f64>()
    }

    /// `int_0^2 t f(t) dt`.
    pub fn expected_value(&self) -> f64 {
        self.ell * TWO_LOG2_MINUS_1
            + self
                .a
                .iter()
                .enumerate()
                .map(|(k, c)| c * (moment(k + 1) + moment(k)))
                .sum::<f64>()
    }

    /// `int_0^2 F(t) dt`.
    pub fn cdf_integral(&self) -> f64 {
        self.ell * (2.0 * LN_2 - 3.0)
            + self
                .a
                .iter()
                .enumerate()
                .map(|(k, c)| c * (moment(k + 1) - 2.0 * parity(k + 1)) / (k + 1) as f64)
                .sum::<f64>()
    }

    /// `int_{1 + x/2}^2 f(y) / (y - 1) dy` in closed form.
    pub fn upper_tail_integral(&self, x: f64) -> f64 {
        let c = x / 2.0;
        let mut out = 0.0;
        if self.ell != 0.0 {
            out += self.ell * (PI * PI / 12.0 + dilog_neg(c));
        }
        if let Some(a0) = self.a.first() {
            out -= a0 * c.ln();
        }
        let mut ck = 1.0;
        for (k, ak) in self.a.iter().enumerate().skip(1) {
            ck *= c;
            out += ak * (1.0 - ck) / k as f64;
        }
        out
    }
}

fn check_domain(t: f64) -> Result<(), DensityError> {
    if t > 0.0 && t <= 2.0 {
        Ok(())
    } else {
        Err(DensityError::DomainError(t))
    }
}

/// `Li2(-u)` for `0 <= u <= 1`, via `Li2(-u) = -log^2(1+u)/2 - Li2(u/(1+u))`.
pub fn dilog_neg(u: f64) -> f64 {
    assert!((0.0..=1.0).contains(&u), "dilog_neg expects u in [0, 1]");
    let z = u / (1.0 + u);
    let l = u.ln_1p();
    -0.5 * l * l - dilog_series(z)
}

/// `Li2(z) = sum z^k / k^2` for `0 <= z <= 1/2`.
fn dilog_series(z: f64) -> f64 {
    let mut sum = 0.0;
    let mut p = 1.0;
    for k in 1..=80 {
        p *= z;
        let term = p / (k * k) as f64;
        sum += term;
        if term < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

/// Midpoint transfer matrix acting on coefficient vectors.
#[derive(Clone, Debug)]
pub struct DensityMap {
    dim: usize,
    a: Vec<f64>,
}

impl DensityMap {
    pub fn new(m: usize) -> Result<Self, DensityError> {
        Ok(Self::from_matrix(&TruncatedMatrix::build(m, 1.0)?))
    }

    pub fn from_matrix(m: &TruncatedMatrix) -> Self {
        Self {
            dim: m.dim(),
            a: m.midpoints(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn apply(&self, f: &DensityCoeffs) -> Result<DensityCoeffs, DensityError> {
        let x = f.to_vec();
        if x.len() != self.dim {
            return Err(DensityError::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        let y: Vec<f64> = self
            .a
            .chunks(self.dim)
            .map(|row| row.iter().zip(&x).map(|(a, b)| a * b).sum())
            .collect();
        Ok(DensityCoeffs::from_vec(&y))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityIterate {
    pub coeffs: DensityCoeffs,
    pub stage: usize,
    /// `int_1^2 f` of `coeffs`.
    pub c: f64,
    pub r_half_running: f64,
}

impl DensityIterate {
    pub fn new(coeffs: DensityCoeffs) -> Self {
        let c = coeffs.integral_upper();
        Self {
            coeffs,
            stage: 0,
            c,
            r_half_running: (1.0 + c) / 2.0,
        }
    }
}

/// One normalized parking step: `A f / (1 + C)`, rescaled to unit mass.
pub fn step(map: &DensityMap, it: &DensityIterate) -> Result<DensityIterate, DensityError> {
    let c_s = it.coeffs.integral_upper();
    let raw = map.apply(&it.coeffs)?.scaled(1.0 / (1.0 + c_s));
    let total = raw.integral_total();
    if total.is_nan() || total <= 0.0 {
        return Err(DensityError::NonPositiveNormalization(total));
    }
    let coeffs = raw.scaled(1.0 / total);
    let c = coeffs.integral_upper();
    Ok(DensityIterate {
        coeffs,
        stage: it.stage + 1,
        c,
        r_half_running: (1.0 + c) / 2.0,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub stage: usize,
    pub c: f64,
    pub r_half: f64,
    pub sup_diff: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FixedPoint {
    pub fstar: DensityCoeffs,
    pub c: f64,
    pub r_half: f64,
    pub history: Vec<TraceRow>,
}

impl FixedPoint {
    pub fn steps(&self) -> usize {
        self.history.len()
    }
}

/// Iterates [`step`] until successive iterates differ by less than `tol` in
/// sup norm on `grid`. When `w` is given the start is rejected if `w . f0`
/// contains zero.
pub fn iterate_to_fixed(
    map: &DensityMap,
    f0: &DensityCoeffs,
    tol: f64,
    max_iter: usize,
    grid: &[f64],
    w: Option<&[Interval]>,
) -> Result<FixedPoint, DensityError> {
    if let Some(w) = w {
        let x = f0.to_vec();
        if w.len() != x.len() {
            return Err(DensityError::DimensionMismatch {
                expected: x.len(),
                got: w.len(),
            });
        }
        let wu: Interval = w
            .iter()
            .zip(&x)
            .map(|(a, b)| *a * Interval::point(*b))
            .sum();
        if wu.contains(0.0) {
            return Err(DensityError::OrthogonalStart(wu));
        }
    }
    let mut it = DensityIterate::new(f0.clone());
    let mut prev: Vec<f64> = grid.iter().map(|&t| it.coeffs.eval(t)).collect();
    let mut history = Vec::new();
    let mut last_diff = f64::INFINITY;
    for _ in 0..max_iter {
        it = step(map, &it)?;
        let cur: Vec<f64> = grid.iter().map(|&t| it.coeffs.eval(t)).collect();
        last_diff = cur
            .iter()
            .zip(&prev)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        prev = cur;
        history.push(TraceRow {
            stage: it.stage,
            c: it.c,
            r_half: it.r_half_running,
            sup_diff: last_diff,
            residual: steady_residual(&it.coeffs, it.c, grid),
        });
        if last_diff < tol {
            return Ok(FixedPoint {
                c: it.c,
                r_half: it.r_half_running,
                fstar: it.coeffs,
                history,
            });
        }
    }
    Err(DensityError::MaxIterExceeded {
        iterations: max_iter,
        last_diff,
    })
}

/// `|(1 + C) f(x) - f(x/2)/2 - int_{1+x/2}^2 f(y)/(y-1) dy|` at `x`.
pub fn steady_residual_at(f: &DensityCoeffs, c: f64, x: f64) -> f64 {
    ((1.0 + c) * f.eval(x) - 0.5 * f.eval(x / 2.0) - f.upper_tail_integral(x)).abs()
}

pub fn steady_residual(f: &DensityCoeffs, c: f64, grid: &[f64]) -> f64 {
    steady_residual_with(f, c, grid, Exec::Sequential)
}

pub fn steady_residual_with(f: &DensityCoeffs, c: f64, grid: &[f64], exec: Exec) -> f64 {
    exec.map_chunks(grid, 64, |_, xs| {
        xs.iter()
            .map(|&x| steady_residual_at(f, c, x))
            .fold(0.0, f64::max)
    })
    .into_iter()
    .fold(0.0, f64::max)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShapeReport {
    pub checks: Vec<Check>,
}

impl ShapeReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Tolerance for the moment identities and the log-coefficient relation.
pub const SHAPE_TOL: f64 = 1e-8;

pub fn shape_report(f: &DensityCoeffs, c: f64, grid: &[f64]) -> ShapeReport {
    let min_by = |g: &dyn Fn(f64) -> f64| {
        grid.iter()
            .map(|&t| (t, g(t)))
            .fold(
                (f64::NAN, f64::INFINITY),
                |acc, p| if p.1 < acc.1 { p } else { acc },
            )
    };
    let (t_pos, min_f) = min_by(&|t| f.eval(t));
    let (t_dec, min_neg_d) = min_by(&|t| -f.derivative(t));
    let (t_cvx, min_d2) = min_by(&|t| f.second_derivative(t));
    let f1 = f.eval(1.0);
    let f2 = f.eval(2.0);
    let e = f.expected_value();
    let e_target = 2.0 * c / (1.0 - c);
    let e_cdf = 2.0 - f.cdf_integral();
    let l_target = -4.0 * f1 / (4.0 * c + 2.0);

    let checks = vec![
        Check::new(
            "positive",
            min_f > 0.0,
            format!("min f = {min_f:e} at {t_pos}"),
        ),
        Check::new(
            "decreasing",
            min_neg_d > 0.0,
            format!("max f' = {:e} at {t_dec}", -min_neg_d),
        ),
        Check::new(
            "convex",
            min_d2 > 0.0,
            format!("min f'' = {min_d2:e} at {t_cvx}"),
        ),
        Check::new(
            "endpoint_ratio",
            f1 <= 4.0 * f2 && 4.0 * f2 <= 2.0 * f1,
            format!("f(1) = {f1}, 4 f(2) = {}", 4.0 * f2),
        ),
        Check::new(
            "mean_identity",
            (e - e_target).abs() <= SHAPE_TOL,
            format!("E = {e}, 2C/(1-C) = {e_target}"),
        ),
        Check::new(
            "mean_cdf_identity",
            (e - e_cdf).abs() <= SHAPE_TOL,
            format!("E = {e}, 2 - int F = {e_cdf}"),
        ),
        Check::new(
            "log_coefficient_range",
            f.ell > -1.6 && f.ell < 0.0,
            format!("ell = {} in (-8/5, 0); the weaker range is (-2, 0)", f.ell),
        ),
        Check::new(
            "log_coefficient_relation",
            (f.ell - l_target).abs() <= SHAPE_TOL,
            format!("ell = {}, -4 f(1) / (4C + 2) = {l_target}", f.ell),
        ),
        Check::new("f1_bound", f1 <= 0.8, format!("f(1) = {f1} <= 4/5")),
    ];
    ShapeReport { checks }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_integrals() {
        let f = DensityCoeffs::uniform(8);
        assert!((f.integral_total() - 1.0).abs() < 1e-15);
        assert!((f.integral_upper() - 0.5).abs() < 1e-15);
        assert!((f.expected_value() - 1.0).abs() < 1e-15);
        assert_eq!(f.evaluate(1.7).unwrap(), 0.5);
        assert!(matches!(f.evaluate(0.0), Err(DensityError::DomainError(_))));
        assert!(matches!(f.evaluate(2.5), Err(DensityError::DomainError(_))));
    }

    #[test]
    fn log_term() {
        let f = DensityCoeffs::new(1.0, vec![0.0; 4]);
        assert!((f.integral_total() - (2.0 * LN_2 - 2.0)).abs() < 1e-15);
        assert_eq!(f.evaluate(1.0).unwrap(), 0.0);
    }

    #[test]
    fn dilog_values() {
        // Li2(-1) = -pi^2/12, Li2(-1/2) = -0.4484142069...
        assert!((dilog_neg(1.0) + PI * PI / 12.0).abs() < 1e-15);
        assert!((dilog_neg(0.5) + 0.448_414_206_923_646_2).abs() < 1e-15);
        assert_eq!(dilog_neg(0.0), 0.0);
    }

    #[test]
    fn first_step_row_zero() {
        let map = DensityMap::new(16).unwrap();
        let f0 = DensityCoeffs::uniform(16);
        let raw = map.apply(&f0).unwrap().scaled(1.0 / 1.5);
        assert!((raw.ell + 1.0 / 3.0).abs() < 1e-15);
        let next = step(&map, &DensityIterate::new(f0)).unwrap();
        assert!((next.coeffs.integral_total() - 1.0).abs() < 1e-14);
        assert_eq!(next.stage, 1);
    }

    #[test]
    fn uniform_is_not_steady() {
        let f = DensityCoeffs::uniform(8);
        let r = steady_residual_at(&f, 0.5, 1.0);
        assert!((r - (0.5 - 0.5 * LN_2)).abs() < 1e-14);
        assert!(steady_residual(&f, 0.5, &default_grid()) > 0.01);
    }

    #[test]
    fn grid_shape() {
        let g = default_grid();
        assert_eq!(g.len(), GRID_POINTS + GRID_ANCHORS.len());
        assert_eq!(g[0], 0.05);
        assert_eq!(*g.last().unwrap(), 2.0);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn uniform_fails_decreasing() {
        let f = DensityCoeffs::uniform(8);
        let r = shape_report(&f, 0.5, &default_grid());
        assert!(!r.get("decreasing").unwrap().pass);
        assert!(r.get("positive").unwrap().pass);
    }
}
