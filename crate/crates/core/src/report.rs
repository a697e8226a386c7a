//! Consolidated report comparing the certified rate with the density
//! iteration and the Monte Carlo simulation.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::density::{DensityCoeffs, FixedPoint};
use crate::simulator::{MeanStd, StageStats};
use crate::spectral::EigenCertificate;
use crate::{Check, Interval};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReportError {
    #[error("missing input: {0}")]
    MissingInput(String),
    #[error("inconsistent results: {}", .0.join("; "))]
    InconsistentResults(Vec<String>),
}

/// Allowed distance between the simulated mean ratio and the certified rate,
/// and the largest acceptable 3-sigma half-width of the simulated ratios.
pub const SIM_TOLERANCE: f64 = 0.005;
/// Stages before this one are treated as transient when later ones exist.
pub const FIRST_STEADY_STAGE: usize = 3;

/// The fixed density as exchanged between commands.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FstarJson {
    pub ell: f64,
    pub a: Vec<f64>,
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "R_half")]
    pub r_half: f64,
}

impl From<&FixedPoint> for FstarJson {
    fn from(fp: &FixedPoint) -> Self {
        Self {
            ell: fp.fstar.ell,
            a: fp.fstar.a.clone(),
            c: fp.c,
            r_half: fp.r_half,
        }
    }
}

impl FstarJson {
    pub fn coeffs(&self) -> DensityCoeffs {
        DensityCoeffs::new(self.ell, self.a.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensitySection {
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "R_half")]
    pub r_half: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimSection {
    pub ratio: MeanStd,
    pub stages_used: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generated_unix: Option<u64>,
    pub m: usize,
    pub lambda: Interval,
    pub r_half: Interval,
    pub reference_r_half: String,
    pub density: Option<DensitySection>,
    pub simulation: Option<SimSection>,
    pub checks: Vec<Check>,
}

/// Ratio samples from `stats`; rows from several runs may be concatenated.
pub fn ratio_samples(stats: &[StageStats]) -> (Vec<f64>, Vec<usize>) {
    let steady = stats.iter().any(|s| s.stage >= FIRST_STEADY_STAGE);
    let rows: Vec<&StageStats> = stats
        .iter()
        .filter(|s| !steady || s.stage >= FIRST_STEADY_STAGE)
        .collect();
    let mut stages: Vec<usize> = rows.iter().map(|s| s.stage).collect();
    stages.sort_unstable();
    stages.dedup();
    (rows.iter().map(|s| s.ratio).collect(), stages)
}

pub fn build_report(
    cert: Option<&EigenCertificate>,
    density: Option<&FstarJson>,
    sim: Option<&[StageStats]>,
    generated_unix: Option<u64>,
) -> Result<Report, ReportError> {
    let cert = cert.ok_or_else(|| ReportError::MissingInput("certificate".into()))?;
    let mut checks: Vec<Check> = cert
        .checks
        .iter()
        .filter(|c| c.name != "r_half_within_reference_band")
        .map(|c| Check::new(format!("certificate.{}", c.name), c.pass, c.detail.clone()))
        .collect();

    let density_section = density.map(|d| {
        let one_plus_c = 1.0 + d.c;
        checks.push(Check::new(
            "density_lambda_consistent",
            cert.lambda.contains(one_plus_c),
            format!("1 + C = {one_plus_c} in {}", cert.lambda),
        ));
        checks.push(Check::new(
            "density_r_half_consistent",
            cert.r_half.contains(d.r_half),
            format!("{} in {}", d.r_half, cert.r_half),
        ));
        DensitySection {
            c: d.c,
            r_half: d.r_half,
        }
    });

    let sim_section = match sim {
        Some(stats) if !stats.is_empty() => {
            let (samples, stages_used) = ratio_samples(stats);
            let ms = MeanStd::of(&samples);
            let band = Interval::new(ms.mean - 3.0 * ms.std, ms.mean + 3.0 * ms.std)
                .unwrap_or(Interval::point(ms.mean));
            let near = (ms.mean - cert.r_half.mid()).abs() <= SIM_TOLERANCE + cert.r_half.rad();
            let sharp = 3.0 * ms.std <= SIM_TOLERANCE;
            checks.push(Check::new(
                "simulation_r_half_consistent",
                near && sharp && band.intersects(&cert.r_half),
                format!(
                    "ratio {:.6} +- {:.6} (3 sigma, {} samples, stages {stages_used:?}) vs {}",
                    ms.mean,
                    3.0 * ms.std,
                    ms.n,
                    cert.r_half
                ),
            ));
            Some(SimSection {
                ratio: ms,
                stages_used,
            })
        }
        Some(_) => return Err(ReportError::MissingInput("simulation has no rows".into())),
        None => None,
    };

    Ok(Report {
        generated_unix,
        m: cert.m,
        lambda: cert.lambda,
        r_half: cert.r_half,
        reference_r_half: "0.616445 +- 0.0035".into(),
        density: density_section,
        simulation: sim_section,
        checks,
    })
}

impl Report {
    /// `Ok` iff every check passes.
    pub fn verdict(&self) -> Result<(), ReportError> {
        let failed: Vec<String> = self
            .checks
            .iter()
            .filter(|c| !c.pass)
            .map(|c| format!("{}: {}", c.name, c.detail))
            .collect();
        if failed.is_empty() {
            Ok(())
        } else {
            Err(ReportError::InconsistentResults(failed))
        }
    }

    pub fn to_markdown(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# Iterated parking exhaustion rate\n");
        let _ = writeln!(s, "- truncation order: {}", self.m);
        let _ = writeln!(s, "- lambda: {}", self.lambda);
        let _ = writeln!(
            s,
            "- R_half = lambda / 2: {} (reference {})",
            self.r_half, self.reference_r_half
        );
        match &self.density {
            Some(d) => {
                let _ = writeln!(s, "- density iteration: C = {}, R_half = {}", d.c, d.r_half);
            }
            None => {
                let _ = writeln!(s, "- density iteration: absent");
            }
        }
        match &self.simulation {
            Some(sim) => {
                let _ = writeln!(
                    s,
                    "- simulation: ratio {:.6} +- {:.6} over {} samples",
                    sim.ratio.mean, sim.ratio.std, sim.ratio.n
                );
            }
            None => {
                let _ = writeln!(s, "- simulation: absent");
            }
        }
        let _ = writeln!(s, "\n| check | pass | detail |\n|---|---|---|");
        for c in &self.checks {
            let _ = writeln!(s, "| {} | {} | {} |", c.name, c.pass, c.detail);
        }
        s
    }
}
