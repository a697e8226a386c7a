//! Direct Monte Carlo simulation of iterated parking.
//!
//! Stage 1 jams the initial interval with cars of length 2, stage 2 jams
//! every remaining gap with cars of length 1, and so on. Each gap is jammed
//! by its own ChaCha8 stream, selected from `(stage, gap index)`, so results
//! do not depend on how gaps are scheduled across threads.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::density::DensityCoeffs;
use crate::exec::Exec;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("{got} samples available, need at least {need}")]
    InsufficientSamples { got: usize, need: usize },
    #[error("stage {0} is still transient; use stage 3 or later")]
    StageTooEarly(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Gaps per parallel work item.
const CHUNK: usize = 4096;
pub const MIN_HISTOGRAM_SAMPLES: usize = 100_000;
/// Two-sample Kolmogorov-Smirnov coefficient at the 1% level.
pub const KS_COEFF_1PCT: f64 = 1.628;

/// Car length used at `stage` (stage 1 uses 2).
pub fn car_length(stage: usize) -> f64 {
    assert!(stage >= 1);
    2.0 * 0.5f64.powi(stage as i32 - 1)
}

/// Generator for gap `index` at `stage`.
pub fn gap_rng(seed: u64, stage: usize, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((stage as u64) << 40) | index as u64);
    rng
}

/// Jams a segment of length `length` with cars of length `car`. Returns the
/// final gaps in left-to-right order (zero-length gaps dropped) and the
/// total car length placed.
pub fn jam<R: Rng + ?Sized>(length: f64, car: f64, rng: &mut R) -> (Vec<f64>, f64) {
    let mut gaps = Vec::new();
    let covered = jam_into(length, car, rng, &mut gaps);
    (gaps, covered)
}

fn jam_into<R: Rng + ?Sized>(length: f64, car: f64, rng: &mut R, gaps: &mut Vec<f64>) -> f64 {
    let mut covered = 0.0;
    let mut stack = vec![length];
    while let Some(len) = stack.pop() {
        if len < car {
            if len > 0.0 {
                gaps.push(len);
            }
            continue;
        }
        let free = len - car;
        let left = rng.random::<f64>() * free;
        covered += car;
        // Right side first so the left side is processed next.
        stack.push(free - left);
        stack.push(left);
    }
    covered
}

#[derive(Clone, Debug, PartialEq)]
pub struct GapSet {
    pub gaps: Vec<f64>,
    pub stage: usize,
    /// Car length of the jamming that produced these gaps.
    pub car_length: f64,
}

impl GapSet {
    pub fn initial(length: f64) -> Self {
        Self {
            gaps: vec![length],
            stage: 0,
            car_length: f64::INFINITY,
        }
    }

    pub fn uncovered(&self) -> f64 {
        self.gaps.iter().sum()
    }

    /// Jams every gap with the next stage's car length.
    pub fn advance(&self, seed: u64, exec: Exec) -> Self {
        let stage = self.stage + 1;
        let car = car_length(stage);
        let parts = exec.map_chunks(&self.gaps, CHUNK, |start, xs| {
            let mut out = Vec::with_capacity(xs.len());
            for (off, &g) in xs.iter().enumerate() {
                if g < car {
                    out.push(g);
                } else {
                    let mut rng = gap_rng(seed, stage, start + off);
                    jam_into(g, car, &mut rng, &mut out);
                }
            }
            out
        });
        Self {
            gaps: parts.concat(),
            stage,
            car_length: car,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageStats {
    pub stage: usize,
    pub car_length: f64,
    pub uncovered: f64,
    pub gap_count: usize,
    /// `L_stage / L_{stage-1}`, with `L_0` the initial length.
    pub ratio: f64,
}

pub fn run_stages(length: f64, n_stages: usize, seed: u64) -> Vec<StageStats> {
    run_stages_with(length, n_stages, seed, Exec::default())
}

pub fn run_stages_with(length: f64, n_stages: usize, seed: u64, exec: Exec) -> Vec<StageStats> {
    let mut stats = Vec::with_capacity(n_stages);
    simulate(length, n_stages, seed, exec, |gs, prev| {
        stats.push(StageStats {
            stage: gs.stage,
            car_length: gs.car_length,
            uncovered: gs.uncovered(),
            gap_count: gs.gaps.len(),
            ratio: gs.uncovered() / prev,
        });
    });
    stats
}

/// Runs `n_stages` stages, calling `visit(gaps, previous uncovered length)`
/// after each.
pub fn simulate(
    length: f64,
    n_stages: usize,
    seed: u64,
    exec: Exec,
    mut visit: impl FnMut(&GapSet, f64),
) -> GapSet {
    let mut gs = GapSet::initial(length);
    for _ in 0..n_stages {
        let prev = gs.uncovered();
        gs = gs.advance(seed, exec);
        visit(&gs, prev);
    }
    gs
}

/// Gaps remaining after `stage` stages.
pub fn gaps_at_stage(length: f64, stage: usize, seed: u64, exec: Exec) -> GapSet {
    simulate(length, stage, seed, exec, |_, _| {})
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
    pub n: usize,
}

impl MeanStd {
    pub fn of(xs: &[f64]) -> Self {
        let n = xs.len();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = if n > 1 {
            xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        Self {
            mean,
            std: var.sqrt(),
            n,
        }
    }

    /// Standard error of the mean.
    pub fn sem(&self) -> f64 {
        self.std / (self.n as f64).sqrt()
    }
}

/// Covered fraction of `[0, length]` under unit-car jamming, per trial.
pub fn renyi_coverage(length: f64, trials: usize, seed: u64, exec: Exec) -> Vec<f64> {
    exec.map_range(trials, |t| {
        let mut rng = gap_rng(seed, 0, t);
        let (_, covered) = jam(length, 1.0, &mut rng);
        covered / length
    })
}

/// Normalized histogram of stage-`s` gaps rescaled by `2^{s-1}` onto
/// `(0, 2)`, and its sup distance on `[0.1, 2]` to the cell averages of `f*`.
pub fn empirical_gap_density(
    gs: &GapSet,
    bins: usize,
    fstar: &DensityCoeffs,
) -> Result<(Vec<f64>, f64), SimError> {
    if gs.stage < 3 {
        return Err(SimError::StageTooEarly(gs.stage));
    }
    if gs.gaps.len() < MIN_HISTOGRAM_SAMPLES {
        return Err(SimError::InsufficientSamples {
            got: gs.gaps.len(),
            need: MIN_HISTOGRAM_SAMPLES,
        });
    }
    if bins == 0 {
        return Err(SimError::InvalidParameter("bins must be positive".into()));
    }
    let scale = 2f64.powi(gs.stage as i32 - 1);
    let h = 2.0 / bins as f64;
    let mut counts = vec![0usize; bins];
    for g in &gs.gaps {
        let x = g * scale;
        let j = ((x / h) as usize).min(bins - 1);
        counts[j] += 1;
    }
    let n = gs.gaps.len() as f64;
    let hist: Vec<f64> = counts.iter().map(|&c| c as f64 / (n * h)).collect();
    let first = (0.1 / h).floor() as usize;
    let cdf = |t: f64| {
        if t <= 0.0 {
            0.0
        } else {
            fstar.cdf(t.min(2.0)).expect("in range")
        }
    };
    let sup = hist
        .iter()
        .enumerate()
        .skip(first)
        .map(|(j, d)| {
            let avg = (cdf((j + 1) as f64 * h) - cdf(j as f64 * h)) / h;
            (d - avg).abs()
        })
        .fold(0.0, f64::max);
    Ok((hist, sup))
}

/// Fraction of stage-`s` gaps whose rescaled length exceeds 1.
pub fn fraction_above_one(gs: &GapSet) -> f64 {
    let scale = 2f64.powi(gs.stage as i32 - 1);
    let above = gs.gaps.iter().filter(|g| *g * scale > 1.0).count();
    above as f64 / gs.gaps.len() as f64
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    pub critical: f64,
    pub reject: bool,
}

/// Two-sample Kolmogorov-Smirnov test at the 1% level.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> KsResult {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    let (n, m) = (x.len() as f64, y.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < x.len() && j < y.len() {
        let t = x[i].min(y[j]);
        while i < x.len() && x[i] <= t {
            i += 1;
        }
        while j < y.len() && y[j] <= t {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    let critical = KS_COEFF_1PCT * ((n + m) / (n * m)).sqrt();
    KsResult {
        statistic: d,
        critical,
        reject: d > critical,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn short_segment_is_untouched() {
        let mut rng = gap_rng(1, 1, 0);
        assert_eq!(jam(1.5, 2.0, &mut rng), (vec![1.5], 0.0));
    }

    #[test]
    fn exact_fit_leaves_nothing() {
        let mut rng = gap_rng(1, 1, 0);
        let (gaps, covered) = jam(2.0, 2.0, &mut rng);
        assert!(gaps.is_empty());
        assert_eq!(covered, 2.0);
    }

    #[test]
    fn jam_conserves_length() {
        let mut rng = gap_rng(7, 1, 3);
        let (gaps, covered) = jam(1000.0, 1.0, &mut rng);
        assert!(gaps.iter().all(|&g| g > 0.0 && g < 1.0));
        let total = covered + gaps.iter().sum::<f64>();
        assert!((total - 1000.0).abs() < 1e-9 * 1000.0);
    }

    #[test]
    fn stages_are_deterministic_and_strategy_free() {
        let a = run_stages_with(5e4, 6, 11, Exec::Sequential);
        let b = run_stages_with(5e4, 6, 11, Exec::Parallel);
        assert_eq!(a, b);
        assert!(a.windows(2).all(|w| w[1].uncovered < w[0].uncovered));
        assert!(a.iter().all(|s| s.ratio > 0.0 && s.ratio < 1.0));
        assert_eq!(a[0].car_length, 2.0);
        assert_eq!(a[1].car_length, 1.0);
        assert_ne!(a, run_stages_with(5e4, 6, 12, Exec::Sequential));
    }

    #[test]
    fn histogram_preconditions() {
        let f = DensityCoeffs::uniform(4);
        let gs = gaps_at_stage(1e3, 2, 1, Exec::Sequential);
        assert!(matches!(
            empirical_gap_density(&gs, 64, &f),
            Err(SimError::StageTooEarly(2))
        ));
        let gs = gaps_at_stage(1e3, 3, 1, Exec::Sequential);
        assert!(matches!(
            empirical_gap_density(&gs, 64, &f),
            Err(SimError::InsufficientSamples { .. })
        ));
    }

    #[test]
    fn ks_detects_shift() {
        let a: Vec<f64> = (0..2000).map(|i| i as f64 / 2000.0).collect();
        let b: Vec<f64> = a.iter().map(|x| x + 0.2).collect();
        assert!(ks_two_sample(&a, &b).reject);
        assert!(!ks_two_sample(&a, &a).reject);
    }

    #[test]
    fn mean_std() {
        let s = MeanStd::of(&[1.0, 2.0, 3.0]);
        assert_eq!(s.mean, 2.0);
        assert!((s.std - 1.0).abs() < 1e-15);
    }
}
