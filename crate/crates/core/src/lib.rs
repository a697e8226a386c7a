//! Certified exhaustion rate of an interval under iterated Rényi parking.
//!
//! Cars of length 2 jam a long interval, then cars of length 1 jam the
//! remaining gaps, then cars of length 1/2, and so on. The uncovered length
//! shrinks by a factor `R_half = lambda / 2` per stage, where `lambda` is the
//! dominant eigenvalue of the transfer matrix acting on density coefficients
//! `(ell, a_0, a_1, ...)` of `f(t) = ell log t + sum a_k (t - 1)^k`.
//!
//! The crate is layered bottom-up:
//!
//! * [`interval`]: outward-rounded interval arithmetic and named constants.
//! * [`matrix`]: interval enclosures of the transfer matrix and its truncations.
//! * [`spectral`]: eigenvector solves, similarity deflation, Gershgorin
//!   isolation and the resulting [`spectral::EigenCertificate`].
//! * [`density`]: the nonlinear density iteration, its fixed point `f*` and
//!   structural checks.
//! * [`measure`]: the parking transform on binned measures with atoms.
//! * [`simulator`]: a direct Monte Carlo simulation of the parking process.
//! * [`report`]: cross-checks between the three routes.

pub mod density;
pub mod exec;
pub mod interval;
pub mod matrix;
pub mod measure;
pub mod report;
pub mod simulator;
pub mod spectral;

use serde::{Deserialize, Serialize};

pub use exec::Exec;
pub use interval::Interval;

/// Named pass/fail outcome attached to certificates and reports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            pass,
            detail: detail.into(),
        }
    }
}
