//! Interval enclosures of the transfer matrix `A` and its truncations.
//!
//! Index 0 is the coefficient of `log t`; index `i >= 1` is the coefficient
//! `a_{i-1}` of `(t - 1)^{i-1}`. One unnormalized parking step maps the
//! coefficient vector `x` of a density to `A x`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::Exec;
use crate::interval::{inverse_power_log_series, Constant, Interval};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MatrixError {
    #[error("rho must lie in [1, 3], got {0}")]
    InvalidRho(f64),
    #[error("truncation order must be at least 1, got {0}")]
    InvalidOrder(usize),
    #[error("entries do not form a square matrix of order {0}")]
    Shape(usize),
}

/// Terms kept past the first in the first-column series before the tail bound.
pub const COL0_EXTRA_TERMS: u32 = 40;

/// Enclosure of the entry of the infinite matrix at row `r`, column `k`.
pub fn entry(r: usize, k: usize) -> Interval {
    match (r, k) {
        (0, 0) => Interval::HALF,
        (0, 1) => Interval::point(-1.0),
        (0, _) => Interval::ZERO,
        (1, 0) => {
            Constant::PiSqOver12.enclosure() + Constant::DilogNegHalf.enclosure()
                - Constant::Log2.enclosure().scale_pow2(-1)
        }
        (1, 1) => Interval::HALF + Constant::Log2.enclosure(),
        (1, _) => {
            let k = k - 1;
            let kf = Interval::point(k as f64);
            Interval::ONE / kf + bracket_term(k.is_multiple_of(2), k)
        }
        (_, 0) => {
            let r = r - 1;
            let s = inverse_power_log_series(3, r as u32, COL0_EXTRA_TERMS);
            let v = s / Interval::point(r as f64);
            if r.is_multiple_of(2) {
                v
            } else {
                -v
            }
        }
        (_, 1) => Interval::ZERO,
        _ => {
            let (r, k) = (r - 1, k - 1);
            if k < r {
                return Interval::ZERO;
            }
            binomial(k as u64, r as u64) * bracket_term((k - r) % 2 == 0, k)
        }
    }
}

/// `(+-1) / 2^{k+1} - 1 / (k 2^k) = 2^{-(k+1)} (+-1 - 2/k)`.
fn bracket_term(positive: bool, k: usize) -> Interval {
    let sign = if positive { 1.0 } else { -1.0 };
    let inner = Interval::point(sign) - Interval::point(2.0) / Interval::point(k as f64);
    inner.scale_pow2(-(k as i32 + 1))
}

/// Enclosure of the binomial coefficient, exact whenever it fits in a u128.
pub fn binomial(n: u64, k: u64) -> Interval {
    if k > n {
        return Interval::ZERO;
    }
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        // c * (n - i) / (i + 1) is always an integer.
        match c.checked_mul((n - i) as u128) {
            Some(p) => c = p / (i as u128 + 1),
            None => return binomial_interval(n, k),
        }
    }
    Interval::from_u128(c)
}

fn binomial_interval(n: u64, k: u64) -> Interval {
    (0..k).fold(Interval::ONE, |acc, i| {
        acc * Interval::point((n - i) as f64) / Interval::point((i + 1) as f64)
    })
}

/// Upper bound for `sum_{r >= m} (1/r) sum_{j >= r} 1 / (j 3^j)`, the
/// first-column mass dropped by truncating at order `m`.
pub fn col0_tail_bound(m: usize) -> Interval {
    assert!(m >= 1, "order must be positive");
    let m2 = Interval::point(m as f64).sqr();
    Interval::point(9.0) / (Interval::point(4.0) * m2) * Interval::point(3.0).powi(-(m as i32))
}

/// The `(m+1) x (m+1)` leading block of `A`, conjugated by `diag(rho^i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedMatrix {
    m: usize,
    rho: f64,
    entries: Vec<Interval>,
}

impl TruncatedMatrix {
    pub fn build(m: usize, rho: f64) -> Result<Self, MatrixError> {
        Self::build_with(m, rho, Exec::default())
    }

    pub fn build_with(m: usize, rho: f64, exec: Exec) -> Result<Self, MatrixError> {
        if m < 1 {
            return Err(MatrixError::InvalidOrder(m));
        }
        if !(1.0..=3.0).contains(&rho) {
            return Err(MatrixError::InvalidRho(rho));
        }
        let n = m + 1;
        let rho_i = Interval::point(rho);
        // powers[d + m] = rho^d for d in -m..=m
        let powers: Vec<Interval> = (0..2 * n - 1)
            .map(|idx| rho_i.powi(idx as i32 - m as i32))
            .collect();
        let entries = exec.map_range(n * n, |idx| {
            let (i, j) = (idx / n, idx % n);
            let e = entry(i, j);
            if rho == 1.0 || i == j || e == Interval::ZERO {
                e
            } else {
                e * powers[i + m - j]
            }
        });
        Ok(Self { m, rho, entries })
    }

    /// Wraps precomputed entries (row-major, `(m+1)^2` of them).
    pub fn from_entries(m: usize, rho: f64, entries: Vec<Interval>) -> Result<Self, MatrixError> {
        if entries.len() != (m + 1) * (m + 1) {
            return Err(MatrixError::Shape(m));
        }
        Ok(Self { m, rho, entries })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.m + 1
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn get(&self, i: usize, j: usize) -> Interval {
        self.entries[i * self.dim() + j]
    }

    /// Zero-padded access: entries outside the block are exactly 0.
    pub fn get_padded(&self, i: usize, j: usize) -> Interval {
        if i < self.dim() && j < self.dim() {
            self.get(i, j)
        } else {
            Interval::ZERO
        }
    }

    pub fn row(&self, i: usize) -> &[Interval] {
        let n = self.dim();
        &self.entries[i * n..(i + 1) * n]
    }

    pub fn entries(&self) -> &[Interval] {
        &self.entries
    }

    /// Enclosure of `sum_i |M_ij|`, optionally skipping one row.
    pub fn column_abs_sum(&self, j: usize, exclude_row: Option<usize>) -> Interval {
        (0..self.dim())
            .filter(|&i| Some(i) != exclude_row)
            .map(|i| self.get(i, j).abs())
            .sum()
    }

    /// Absolute column sum of the core block (rows and columns from 1).
    pub fn core_column_abs_sum(&self, j: usize) -> Interval {
        assert!(j >= 1, "core block starts at column 1");
        self.column_abs_sum(j, Some(0))
    }

    /// Enclosure of the l1 operator norm of the block.
    pub fn max_column_abs_sum(&self) -> Interval {
        (0..self.dim())
            .map(|j| self.column_abs_sum(j, None))
            .reduce(|a, b| Interval::hull_of(a.lo().max(b.lo()), a.hi().max(b.hi())))
            .expect("non-empty")
    }

    pub fn mul_vec(&self, x: &[Interval]) -> Vec<Interval> {
        assert_eq!(x.len(), self.dim());
        (0..self.dim())
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| *a * *b).sum())
            .collect()
    }

    /// Row-major midpoints.
    pub fn midpoints(&self) -> Vec<f64> {
        self.entries.iter().map(Interval::mid).collect()
    }

    pub fn midpoint_rows(&self) -> Vec<Vec<f64>> {
        self.entries
            .chunks(self.dim())
            .map(|r| r.iter().map(Interval::mid).collect())
            .collect()
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    m: usize,
    rho: f64,
    entries: Vec<Vec<Interval>>,
}

impl Serialize for TruncatedMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        MatrixJson {
            m: self.m,
            rho: self.rho,
            entries: self.entries.chunks(self.dim()).map(<[_]>::to_vec).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for TruncatedMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = MatrixJson::deserialize(d)?;
        let n = raw.m + 1;
        if raw.entries.len() != n || raw.entries.iter().any(|r| r.len() != n) {
            return Err(serde::de::Error::custom(MatrixError::Shape(raw.m)));
        }
        Ok(Self {
            m: raw.m,
            rho: raw.rho,
            entries: raw.entries.into_iter().flatten().collect(),
        })
    }
}
