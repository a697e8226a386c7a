//! The parking transform on finite measures over `[0, 2]`.
//!
//! A [`GridMeasure`] is a piecewise-constant density on `B` uniform cells
//! plus a list of atoms. Two operators act on it:
//!
//! * `U` pushes the restriction to `[0, 1]` forward under `x -> 2x`;
//! * `V` replaces each point `x` in `(1, 2]` by Lebesgue measure on
//!   `[0, 2(x - 1)]` scaled by `1 / (x - 1)`, which has mass 2.
//!
//! `T = U + V`; `T^` divides by the image mass and `T~` by `1 + C*`.
//! Atoms stay exact until `V` spreads them into cells.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::density::DensityCoeffs;
use crate::exec::Exec;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeasureError {
    #[error("image measure has zero mass")]
    ZeroImageMass,
    #[error("point {0} is outside (0, 2]")]
    DomainError(f64),
    #[error("measure still has {0} atoms")]
    AtomsPresent(usize),
    #[error("bin count {0} must be even and positive")]
    InvalidBins(usize),
    #[error("bin counts differ: {0} vs {1}")]
    BinMismatch(usize, usize),
}

pub const DEFAULT_BINS: usize = 1 << 14;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridMeasure {
    /// Cell masses over `[0, 2]`.
    pub bins: Vec<f64>,
    /// `(location, mass)` pairs, sorted by location, locations distinct.
    pub atoms: Vec<(f64, f64)>,
}

impl GridMeasure {
    pub fn zero(b: usize) -> Result<Self, MeasureError> {
        if b == 0 || !b.is_multiple_of(2) {
            return Err(MeasureError::InvalidBins(b));
        }
        Ok(Self {
            bins: vec![0.0; b],
            atoms: Vec::new(),
        })
    }

    pub fn delta(x: f64, b: usize) -> Result<Self, MeasureError> {
        if !(0.0..=2.0).contains(&x) {
            return Err(MeasureError::DomainError(x));
        }
        let mut mu = Self::zero(b)?;
        mu.atoms.push((x, 1.0));
        Ok(mu)
    }

    /// Cell masses of `density` integrated exactly over each cell.
    pub fn from_density(f: &DensityCoeffs, b: usize) -> Result<Self, MeasureError> {
        let mut mu = Self::zero(b)?;
        let h = 2.0 / b as f64;
        let cdf: Vec<f64> = (0..=b).map(|i| cdf_at(f, i as f64 * h)).collect();
        for (j, m) in mu.bins.iter_mut().enumerate() {
            *m = cdf[j + 1] - cdf[j];
        }
        Ok(mu)
    }

    /// Constant density `c` on `[0, 2]`.
    pub fn constant(c: f64, b: usize) -> Result<Self, MeasureError> {
        let mut mu = Self::zero(b)?;
        let h = 2.0 / b as f64;
        mu.bins.iter_mut().for_each(|m| *m = c * h);
        Ok(mu)
    }

    pub fn bin_count(&self) -> usize {
        self.bins.len()
    }

    pub fn bin_width(&self) -> f64 {
        2.0 / self.bins.len() as f64
    }

    pub fn densities(&self) -> Vec<f64> {
        let h = self.bin_width();
        self.bins.iter().map(|m| m / h).collect()
    }

    pub fn total_mass(&self) -> f64 {
        self.bins.iter().sum::<f64>() + self.atoms.iter().map(|a| a.1).sum::<f64>()
    }

    /// `mu[0, 1]`; an atom at exactly 1 counts here.
    pub fn mass_lower(&self) -> f64 {
        self.bins[..self.bins.len() / 2].iter().sum::<f64>()
            + self
                .atoms
                .iter()
                .filter(|a| a.0 <= 1.0)
                .map(|a| a.1)
                .sum::<f64>()
    }

    /// `mu(1, 2]`.
    pub fn mass_upper(&self) -> f64 {
        self.bins[self.bins.len() / 2..].iter().sum::<f64>()
            + self
                .atoms
                .iter()
                .filter(|a| a.0 > 1.0)
                .map(|a| a.1)
                .sum::<f64>()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            bins: self.bins.iter().map(|m| m * s).collect(),
            atoms: self.atoms.iter().map(|&(x, m)| (x, m * s)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, MeasureError> {
        if self.bins.len() != other.bins.len() {
            return Err(MeasureError::BinMismatch(self.bins.len(), other.bins.len()));
        }
        Ok(Self {
            bins: self
                .bins
                .iter()
                .zip(&other.bins)
                .map(|(a, b)| a + b)
                .collect(),
            atoms: merge_atoms(self.atoms.iter().chain(&other.atoms).copied()),
        })
    }
}

fn merge_atoms(atoms: impl Iterator<Item = (f64, f64)>) -> Vec<(f64, f64)> {
    let mut v: Vec<(f64, f64)> = atoms.filter(|a| a.1 != 0.0).collect();
    v.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(v.len());
    for (x, m) in v {
        match out.last_mut() {
            Some(last) if last.0 == x => last.1 += m,
            _ => out.push((x, m)),
        }
    }
    out
}

fn cdf_at(f: &DensityCoeffs, t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        f.cdf(t.min(2.0)).expect("t in (0, 2]")
    }
}

pub fn apply_u(mu: &GridMeasure) -> GridMeasure {
    let b = mu.bins.len();
    let mut bins = vec![0.0; b];
    for (i, m) in mu.bins[..b / 2].iter().enumerate() {
        bins[2 * i] += m / 2.0;
        bins[2 * i + 1] += m / 2.0;
    }
    let atoms = merge_atoms(
        mu.atoms
            .iter()
            .filter(|a| a.0 <= 1.0)
            .map(|&(x, m)| (2.0 * x, m)),
    );
    GridMeasure { bins, atoms }
}

pub fn apply_v(mu: &GridMeasure) -> GridMeasure {
    apply_v_with(mu, Exec::Sequential)
}

/// `V` on cells in closed form. With `u = y / 2` and source cell `p` covering
/// `x - 1` in `[a_p, b_p]` at density `d_p`, the image mass below `2u` is
/// `2 H(u)` with `H(u) = P[p] + u S[p+1] + d_p (u log(b_p / u) + u - a_p)`
/// for `u` in cell `p`, where `P` is the prefix mass and
/// `S[k] = sum_{q >= k} d_q log((q + 1) / q)`.
pub fn apply_v_with(mu: &GridMeasure, exec: Exec) -> GridMeasure {
    let b = mu.bins.len();
    let half = b / 2;
    let h = mu.bin_width();
    let upper = &mu.bins[half..];
    let dens: Vec<f64> = upper.iter().map(|m| m / h).collect();
    let mut prefix = vec![0.0; half + 1];
    for p in 0..half {
        prefix[p + 1] = prefix[p] + upper[p];
    }
    let mut suffix = vec![0.0; half + 1];
    for p in (1..half).rev() {
        suffix[p] = suffix[p + 1] + dens[p] * ((p + 1) as f64 / p as f64).ln();
    }
    let big_h = |k: usize| -> f64 {
        // u = k h / 2 lies at the start of source cell p = k / 2 (or halfway).
        let u = k as f64 * h / 2.0;
        let p = k / 2;
        if p >= half {
            return prefix[half];
        }
        let (a, bb) = (p as f64 * h, (p + 1) as f64 * h);
        let local = if u > 0.0 {
            u * (bb / u).ln() + u - a
        } else {
            0.0
        };
        prefix[p] + u * suffix[p + 1] + dens[p] * local
    };
    let hs = exec.map_range(b + 1, big_h);
    let mut bins: Vec<f64> = (0..b).map(|j| 2.0 * (hs[j + 1] - hs[j]).max(0.0)).collect();

    for &(x, m) in mu.atoms.iter().filter(|a| a.0 > 1.0) {
        let s = x - 1.0;
        let top = 2.0 * s;
        let d = m / s;
        let last = ((top / h).ceil() as usize).min(b);
        for (j, slot) in bins.iter_mut().enumerate().take(last) {
            let lo = j as f64 * h;
            let hi = ((j + 1) as f64 * h).min(top);
            if hi > lo {
                *slot += d * (hi - lo);
            }
        }
    }
    GridMeasure {
        bins,
        atoms: Vec::new(),
    }
}

pub fn apply_t(mu: &GridMeasure) -> GridMeasure {
    apply_t_with(mu, Exec::Sequential)
}

pub fn apply_t_with(mu: &GridMeasure, exec: Exec) -> GridMeasure {
    apply_u(mu)
        .add(&apply_v_with(mu, exec))
        .expect("same bin count")
}

/// `T mu` divided by its mass.
pub fn apply_that(mu: &GridMeasure) -> Result<GridMeasure, MeasureError> {
    apply_that_with(mu, Exec::Sequential)
}

pub fn apply_that_with(mu: &GridMeasure, exec: Exec) -> Result<GridMeasure, MeasureError> {
    let t = apply_t_with(mu, exec);
    let total = t.total_mass();
    if total.is_nan() || total <= 0.0 {
        return Err(MeasureError::ZeroImageMass);
    }
    Ok(t.scaled(1.0 / total))
}

/// `T mu / (1 + C*)`.
pub fn apply_ttilde(mu: &GridMeasure, c_star: f64) -> GridMeasure {
    apply_t(mu).scaled(1.0 / (1.0 + c_star))
}

/// `mu_0 = delta_x` followed by `n` applications of `T^`.
pub fn delta_orbit(x: f64, n: usize, bins: usize) -> Result<Vec<GridMeasure>, MeasureError> {
    delta_orbit_with(x, n, bins, Exec::default())
}

pub fn delta_orbit_with(
    x: f64,
    n: usize,
    bins: usize,
    exec: Exec,
) -> Result<Vec<GridMeasure>, MeasureError> {
    if !(x > 0.0 && x <= 2.0) {
        return Err(MeasureError::DomainError(x));
    }
    let mut orbit = vec![GridMeasure::delta(x, bins)?];
    for _ in 0..n {
        let next = apply_that_with(orbit.last().expect("non-empty"), exec)?;
        orbit.push(next);
    }
    Ok(orbit)
}

/// Sup over cells meeting `[lower, 2]` of `|cell density - cell average of f*|`.
pub fn distance_to_fstar(
    mu: &GridMeasure,
    fstar: &DensityCoeffs,
    lower: f64,
) -> Result<f64, MeasureError> {
    if !mu.atoms.is_empty() {
        return Err(MeasureError::AtomsPresent(mu.atoms.len()));
    }
    let h = mu.bin_width();
    let first = ((lower / h).floor() as usize).min(mu.bins.len());
    Ok(mu.bins[first..]
        .iter()
        .enumerate()
        .map(|(off, m)| {
            let j = first + off;
            let avg = (cdf_at(fstar, (j + 1) as f64 * h) - cdf_at(fstar, j as f64 * h)) / h;
            (m / h - avg).abs()
        })
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    const B: usize = 64;

    #[test]
    fn u_moves_atoms() {
        let u = apply_u(&GridMeasure::delta(0.5, B).unwrap());
        assert_eq!(u.atoms, vec![(1.0, 1.0)]);
        let gone = apply_u(&GridMeasure::delta(1.5, B).unwrap());
        assert_eq!(gone.total_mass(), 0.0);
    }

    #[test]
    fn u_on_uniform() {
        let u = apply_u(&GridMeasure::constant(0.5, B).unwrap());
        assert!((u.total_mass() - 0.5).abs() < 1e-15);
        for d in u.densities() {
            assert!((d - 0.25).abs() < 1e-14);
        }
    }

    #[test]
    fn v_on_atoms() {
        let v = apply_v(&GridMeasure::delta(1.5, B).unwrap());
        assert!((v.total_mass() - 2.0).abs() < 1e-14);
        let d = v.densities();
        assert!(d[..B / 2].iter().all(|x| (x - 2.0).abs() < 1e-12));
        assert!(d[B / 2..].iter().all(|&x| x == 0.0));
        assert_eq!(
            apply_v(&GridMeasure::delta(1.0, B).unwrap()).total_mass(),
            0.0
        );
        assert_eq!(
            apply_v(&GridMeasure::delta(0.5, B).unwrap()).total_mass(),
            0.0
        );
    }

    #[test]
    fn t_on_special_atoms() {
        let t1 = apply_t(&GridMeasure::delta(1.0, B).unwrap());
        assert_eq!(t1.atoms, vec![(2.0, 1.0)]);
        assert_eq!(t1.bins.iter().sum::<f64>(), 0.0);
        let t0 = apply_t(&GridMeasure::delta(0.0, B).unwrap());
        assert_eq!(t0.atoms, vec![(0.0, 1.0)]);
        assert!(matches!(
            apply_that(&GridMeasure::zero(B).unwrap()),
            Err(MeasureError::ZeroImageMass)
        ));
    }

    #[test]
    fn v_on_cells_has_double_mass() {
        let mu = GridMeasure::constant(0.5, B).unwrap();
        let v = apply_v(&mu);
        assert!((v.total_mass() - 2.0 * mu.mass_upper()).abs() < 1e-13);
        // Uniform 1/2 on (1, 2]: image density at y is (1/2) log(2 / y).
        let h = mu.bin_width();
        for (j, m) in v.bins.iter().enumerate().skip(1) {
            let (y0, y1) = (j as f64 * h, (j + 1) as f64 * h);
            let anti = |y: f64| 0.5 * (y * (2.0 / y).ln() + y);
            assert!((m - (anti(y1) - anti(y0))).abs() < 1e-13, "bin {j}");
        }
    }

    #[test]
    fn orbit_first_steps() {
        let orbit = delta_orbit(1.5, 1, B).unwrap();
        let d = orbit[1].densities();
        assert!(d[..B / 2].iter().all(|x| (x - 1.0).abs() < 1e-12));
        let orbit = delta_orbit(0.5, 2, B).unwrap();
        assert_eq!(orbit[1].atoms, vec![(1.0, 1.0)]);
        assert_eq!(orbit[2].atoms, vec![(2.0, 1.0)]);
        assert!(matches!(
            delta_orbit(0.0, 3, B),
            Err(MeasureError::DomainError(_))
        ));
    }

    #[test]
    fn atoms_block_distance() {
        let f = DensityCoeffs::uniform(4);
        let mu = GridMeasure::delta(0.7, B).unwrap();
        assert!(matches!(
            distance_to_fstar(&mu, &f, 0.05),
            Err(MeasureError::AtomsPresent(1))
        ));
        let flat = GridMeasure::from_density(&f, B).unwrap();
        assert!(distance_to_fstar(&flat, &f, 0.05).unwrap() < 1e-12);
    }

    #[test]
    fn parallel_v_matches_sequential() {
        let mu = GridMeasure::from_density(&DensityCoeffs::polynomial(&[0.5, -0.3, 0.2], 4), 256)
            .unwrap();
        assert_eq!(
            apply_v_with(&mu, Exec::Sequential),
            apply_v_with(&mu, Exec::Parallel)
        );
    }
}
