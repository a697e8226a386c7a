//! Certified enclosure of the dominant eigenvalue of the transfer matrix.
//!
//! The pipeline in [`certify`]:
//!
//! 1. locate the eigenvalue `lambda_h` of the small block `A_h` by bisection
//!    on the row-0 compatibility residual;
//! 2. solve for its right and left eigenvectors by triangular substitution;
//! 3. build the similarity pair `W`, `V` from them and deflate `A_h`;
//! 4. extend the transform to the full matrix with diagonal blocks 8 and 1/8
//!    and apply Gershgorin's theorem column-wise, adding explicit bounds for
//!    the rows and columns beyond the truncation.
//!
//! The isolated pivot disc then contains the dominant eigenvalue of every
//! truncation `A_n` with `n >= m` and of the infinite matrix.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::interval::{up_add, Constant, Interval, IntervalError};
use crate::matrix::{col0_tail_bound, MatrixError, TruncatedMatrix};
use crate::Check;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("lambda {0} does not exceed 1/2 + log 2")]
    LambdaTooSmall(Interval),
    #[error("residual does not change sign over {0}")]
    NoSignChange(Interval),
    #[error("bracket width {achieved:e} stalled above tolerance {tol:e}")]
    TolUnreachable { achieved: f64, tol: f64 },
    #[error("|w.v - 1| bound {0} is not below 1/2")]
    AlphaTooLarge(f64),
    #[error("pivot entry of v is {0}, expected exactly 1")]
    PivotNotUnit(Interval),
    #[error("w.v = {0} does not contain 1")]
    NotNormalized(Interval),
    #[error("vector length {got} does not match matrix dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("certification failed: {0}")]
    CertificationFailed(String),
    #[error("w.u = {0} contains zero; convergence direction is not certified")]
    OrthogonalStart(Interval),
    #[error("order m = {m} must exceed the extension pivot h = {h}")]
    InvalidOrder { m: usize, h: usize },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Interval(#[from] IntervalError),
}

pub type Result<T> = std::result::Result<T, SpectralError>;

pub const DEFAULT_H: usize = 7;
pub const DEFAULT_BRACKET: (f64, f64) = (1.20, 1.26);
/// Width target for the eigenvalue of the small block.
pub const LAMBDA_TOL: f64 = 1e-12;
const EXTENSION_SCALE: f64 = 8.0;

/// `1/2 + log 2`, the l1 norm of the core block.
pub fn core_norm() -> Interval {
    Interval::HALF + Constant::Log2.enclosure()
}

pub fn dot(a: &[Interval], b: &[Interval]) -> Interval {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| *x * *y).sum()
}

fn require_large(lambda: Interval) -> Result<()> {
    if lambda.lo() > core_norm().hi() {
        Ok(())
    } else {
        Err(SpectralError::LambdaTooSmall(lambda))
    }
}

fn pivot_div(num: Interval, lambda: Interval, diag: Interval) -> Result<Interval> {
    num.checked_div(lambda - diag)
        .map_err(|_| SpectralError::LambdaTooSmall(lambda))
}

/// Right eigenvector candidate: `v_0 = 1` and `(lambda - A_core) v_core = A_core,0`
/// by back substitution.
pub fn solve_right(m: &TruncatedMatrix, lambda: Interval) -> Result<Vec<Interval>> {
    require_large(lambda)?;
    let n = m.dim();
    let mut v = vec![Interval::ZERO; n];
    v[0] = Interval::ONE;
    for i in (1..n).rev() {
        let row = m.row(i);
        let acc = row[0] + (i + 1..n).map(|k| row[k] * v[k]).sum::<Interval>();
        v[i] = pivot_div(acc, lambda, row[i])?;
    }
    Ok(v)
}

/// Left eigenvector candidate: `w_0 = 1` and `w_core (lambda - A_core) = A_0,core`
/// by forward substitution.
pub fn solve_left(m: &TruncatedMatrix, lambda: Interval) -> Result<Vec<Interval>> {
    require_large(lambda)?;
    let n = m.dim();
    let mut w = vec![Interval::ZERO; n];
    w[0] = Interval::ONE;
    for k in 1..n {
        let acc = m.get(0, k) + (1..k).map(|i| w[i] * m.get(i, k)).sum::<Interval>();
        w[k] = pivot_div(acc, lambda, m.get(k, k))?;
    }
    Ok(w)
}

/// Row-0 residual `lambda - (A v(lambda))_0`; it vanishes exactly at eigenvalues.
pub fn residual(m: &TruncatedMatrix, lambda: Interval) -> Result<Interval> {
    let v = solve_right(m, lambda)?;
    Ok(lambda - dot(m.row(0), &v))
}

fn sign(x: Interval) -> Option<i8> {
    if x.certainly_positive() {
        Some(1)
    } else if x.certainly_negative() {
        Some(-1)
    } else {
        None
    }
}

pub fn find_lambda(m: usize, bracket: Interval, tol: f64) -> Result<Interval> {
    find_lambda_in(&TruncatedMatrix::build(m, 1.0)?, bracket, tol)
}

/// Bisection on rigorous residual signs. Returns `[lo, hi]` with certified
/// opposite residual signs at the endpoints.
pub fn find_lambda_in(m: &TruncatedMatrix, bracket: Interval, tol: f64) -> Result<Interval> {
    let g = |x: f64| residual(m, Interval::point(x)).map(sign);
    let (mut lo, mut hi) = (bracket.lo(), bracket.hi());
    let s_lo = match (g(lo)?, g(hi)?) {
        (Some(a), Some(b)) if a != b => a,
        _ => return Err(SpectralError::NoSignChange(bracket)),
    };
    while hi - lo > tol {
        let mid = lo + (hi - lo) / 2.0;
        if mid <= lo || mid >= hi {
            break;
        }
        match g(mid)? {
            Some(s) if s == s_lo => lo = mid,
            Some(_) => hi = mid,
            None => {
                let (p1, p2) = (lo + (hi - lo) / 3.0, lo + 2.0 * (hi - lo) / 3.0);
                let mut moved = false;
                match g(p1)? {
                    Some(s) if s == s_lo => {
                        lo = p1;
                        moved = true;
                    }
                    Some(_) => {
                        hi = p1;
                        moved = true;
                    }
                    None => {}
                }
                if p2 > lo && p2 < hi {
                    match g(p2)? {
                        Some(s) if s != s_lo => {
                            hi = p2;
                            moved = true;
                        }
                        Some(_) => {
                            lo = p2;
                            moved = true;
                        }
                        None => {}
                    }
                }
                if !moved {
                    break;
                }
            }
        }
    }
    if hi - lo > tol {
        return Err(SpectralError::TolUnreachable {
            achieved: hi - lo,
            tol,
        });
    }
    Ok(Interval::new(lo, hi)?)
}

/// Rescales `w` so that some exact `w*` inside the result satisfies
/// `w* . v = 1`. Returns the rescaled vector and `alpha / (1 - alpha)` where
/// `alpha` bounds `|w . v - 1|`.
pub fn renormalize_pair(v: &[Interval], w: &[Interval]) -> Result<(Vec<Interval>, Interval)> {
    let s = dot(w, v);
    let alpha = up_add(1.0, -s.lo()).max(up_add(s.hi(), -1.0)).max(0.0);
    if alpha >= 0.5 {
        return Err(SpectralError::AlphaTooLarge(alpha));
    }
    if alpha == 0.0 {
        return Ok((w.to_vec(), Interval::ZERO));
    }
    let a = Interval::point(alpha);
    let bound = a / (Interval::ONE - a);
    let b = Interval::point(bound.hi());
    let factor = (Interval::ONE - b).hull(Interval::ONE + b);
    Ok((w.iter().map(|x| *x * factor).collect(), bound))
}

/// `W M V` for the similarity pair built from `v` and `w` at pivot `j`,
/// computed entrywise.
pub fn deflate(
    m: &TruncatedMatrix,
    v: &[Interval],
    w: &[Interval],
    j: usize,
) -> Result<TruncatedMatrix> {
    let n = m.dim();
    check_pair(n, v, w, j)?;
    let mv = m.mul_vec(v);
    let wm: Vec<Interval> = (0..n)
        .map(|k| (0..n).map(|i| w[i] * m.get(i, k)).sum())
        .collect();
    let wmv = dot(w, &mv);
    let col_j: Vec<Interval> = (0..n)
        .map(|i| if i == j { wmv } else { mv[i] - v[i] * mv[j] })
        .collect();
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for k in 0..n {
            let e = if k == j {
                col_j[i]
            } else if i == j {
                wm[k] - wmv * w[k]
            } else {
                m.get(i, k) - v[i] * m.get(j, k) - col_j[i] * w[k]
            };
            out.push(e);
        }
    }
    Ok(TruncatedMatrix::from_entries(m.m(), m.rho(), out)?)
}

fn check_pair(n: usize, v: &[Interval], w: &[Interval], j: usize) -> Result<()> {
    for len in [v.len(), w.len()] {
        if len != n {
            return Err(SpectralError::DimensionMismatch {
                expected: n,
                got: len,
            });
        }
    }
    if v[j] != Interval::ONE {
        return Err(SpectralError::PivotNotUnit(v[j]));
    }
    let s = dot(w, v);
    if !s.contains(1.0) {
        return Err(SpectralError::NotNormalized(s));
    }
    Ok(())
}

/// Row-major square interval matrix product.
pub fn mat_mul(a: &[Interval], b: &[Interval], n: usize) -> Vec<Interval> {
    assert!(a.len() == n * n && b.len() == n * n);
    let mut out = vec![Interval::ZERO; n * n];
    for i in 0..n {
        for k in 0..n {
            out[i * n + k] = (0..n).map(|l| a[i * n + l] * b[l * n + k]).sum();
        }
    }
    out
}

fn max_col_abs_sum(a: &[Interval], n: usize) -> Interval {
    (0..n)
        .map(|k| (0..n).map(|i| a[i * n + k].abs()).sum::<Interval>())
        .fold(Interval::ZERO, |acc, s| {
            Interval::new(acc.lo().max(s.lo()), acc.hi().max(s.hi())).expect("ordered")
        })
}

/// The matrices `W` (rows) and `V` (columns) that conjugate away the pivot.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimilarityPair {
    pub n: usize,
    pub w: Vec<Interval>,
    pub v: Vec<Interval>,
    pub j: usize,
    pub norm_w: Interval,
    pub norm_v: Interval,
}

impl SimilarityPair {
    pub fn new(v: &[Interval], w: &[Interval], j: usize) -> Result<Self> {
        let n = v.len();
        check_pair(n, v, w, j)?;
        let mut wm = vec![Interval::ZERO; n * n];
        let mut vm = vec![Interval::ZERO; n * n];
        for i in 0..n {
            for k in 0..n {
                let delta = if i == k {
                    Interval::ONE
                } else {
                    Interval::ZERO
                };
                wm[i * n + k] = if i == j {
                    w[k]
                } else if k == j {
                    -v[i]
                } else {
                    delta
                };
                vm[i * n + k] = if k == j { v[i] } else { delta - v[i] * w[k] };
            }
        }
        Ok(Self {
            n,
            norm_w: max_col_abs_sum(&wm, n),
            norm_v: max_col_abs_sum(&vm, n),
            w: wm,
            v: vm,
            j,
        })
    }

    pub fn w_at(&self, i: usize, k: usize) -> Interval {
        self.w[i * self.n + k]
    }

    pub fn v_at(&self, i: usize, k: usize) -> Interval {
        self.v[i * self.n + k]
    }

    /// Block-diagonal extension to order `total`: `W~ = diag(W, s I)` and
    /// `V~ = diag(V, I / s)`.
    pub fn extend(&self, total: usize, scale: f64) -> (Vec<Interval>, Vec<Interval>) {
        assert!(total >= self.n);
        let mut wt = vec![Interval::ZERO; total * total];
        let mut vt = vec![Interval::ZERO; total * total];
        for i in 0..total {
            for k in 0..total {
                if i < self.n && k < self.n {
                    wt[i * total + k] = self.w_at(i, k);
                    vt[i * total + k] = self.v_at(i, k);
                } else if i == k {
                    wt[i * total + k] = Interval::point(scale);
                    vt[i * total + k] = Interval::ONE / Interval::point(scale);
                }
            }
        }
        (wt, vt)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Disc {
    pub center: Interval,
    /// Upper bound on the off-diagonal absolute column sum.
    pub radius: f64,
}

impl Disc {
    /// Upper bound on `|z|` over the disc.
    pub fn reach(&self) -> f64 {
        up_add(self.center.mag(), self.radius)
    }

    pub fn disjoint_from(&self, other: &Disc) -> bool {
        (self.center - other.center).mig() > up_add(self.radius, other.radius)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscReport {
    pub discs: Vec<Disc>,
    /// `isolated[j]`: disc `j` is disjoint from every other disc.
    pub isolated: Vec<bool>,
}

/// Column Gershgorin discs of `m`.
pub fn gershgorin(m: &TruncatedMatrix) -> DiscReport {
    let n = m.dim();
    let discs: Vec<Disc> = (0..n)
        .map(|j| Disc {
            center: m.get(j, j),
            radius: m.column_abs_sum(j, Some(j)).hi(),
        })
        .collect();
    let isolated = isolation(&discs);
    DiscReport { discs, isolated }
}

fn isolation(discs: &[Disc]) -> Vec<bool> {
    (0..discs.len())
        .map(|j| {
            discs
                .iter()
                .enumerate()
                .all(|(i, d)| i == j || d.disjoint_from(&discs[j]))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenCertificate {
    pub m: usize,
    pub h: usize,
    /// Encloses the dominant eigenvalue of `A` and of every `A_n`, `n >= m`.
    pub lambda: Interval,
    /// `lambda / 2`, the per-stage shrink factor of the uncovered length.
    pub r_half: Interval,
    /// Every other eigenvalue has modulus at most `gap_bound.hi`.
    pub gap_bound: Interval,
    /// Dominant eigenvalue of `A_m` itself.
    pub lambda_m: Interval,
    pub v: Vec<Interval>,
    pub w: Vec<Interval>,
    pub zeta: Interval,
    pub norm_w: Interval,
    pub norm_v: Interval,
    pub discs: Vec<Disc>,
    pub checks: Vec<Check>,
}

impl EigenCertificate {
    pub fn all_checks_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

pub fn certify(m: usize) -> Result<EigenCertificate> {
    certify_with(m, DEFAULT_H)
}

pub fn certify_with(m: usize, h: usize) -> Result<EigenCertificate> {
    if h < 1 || m <= h {
        return Err(SpectralError::InvalidOrder { m, h });
    }
    let a = TruncatedMatrix::build(m, 1.0)?;
    let ah = TruncatedMatrix::build(h, 1.0)?;
    let bracket = Interval::new(DEFAULT_BRACKET.0, DEFAULT_BRACKET.1)?;

    let lam_h = find_lambda_in(&ah, bracket, LAMBDA_TOL)?;
    let vh = solve_right(&ah, lam_h)?;
    let wh = solve_left(&ah, lam_h)?;
    let zeta_mid = dot(&wh, &vh).mid();
    let w_approx: Vec<Interval> = wh
        .iter()
        .map(|x| Interval::point(x.mid() / zeta_mid))
        .collect();
    let (w_hat, _) = renormalize_pair(&vh, &w_approx)?;
    let pair = SimilarityPair::new(&vh, &w_hat, 0)?;
    let deflated = deflate(&ah, &vh, &w_hat, 0)?;

    let e = extended_product(&a, &deflated, &pair, lam_h)?;
    let report = gershgorin(&e);

    // Rows beyond m only reach the first column of A, so within the
    // transformed matrix they only touch columns 0..=h.
    let tail = col0_tail_bound(m);
    let scale = Interval::point(EXTENSION_SCALE);
    let mut discs = report.discs.clone();
    for (k, d) in discs.iter_mut().enumerate().take(h + 1) {
        let extra = scale * pair.v_at(0, k).abs() * tail;
        d.radius = up_add(d.radius, extra.hi());
    }
    // Columns beyond m: absolute column sums of A are at most 1/2 + 2/(c-1)
    // at column c, and the transform scales rows 0..=h by at most |W| / 8.
    let w_factor = (pair.norm_w / scale).hi().max(1.0);
    let col_bound = Interval::HALF + Interval::point(2.0) / Interval::point(m as f64);
    let beyond = (Interval::point(w_factor) * col_bound).hi();

    let d0 = discs[0];
    let lambda = d0.center + Interval::symmetric(d0.radius);
    let gap = discs[1..].iter().map(Disc::reach).fold(beyond, f64::max);
    let gap_bound = Interval::new(0.0, gap)?;

    let isolated = isolation(&discs);
    let mut failures = Vec::new();
    if !isolated[0] {
        failures.push("pivot disc overlaps another disc".to_string());
    }
    if lambda.lo() <= gap {
        failures.push(format!(
            "pivot disc {lambda} reaches the bound {gap:e} on the remaining spectrum"
        ));
    }
    if !failures.is_empty() {
        return Err(SpectralError::CertificationFailed(failures.join("; ")));
    }

    let lambda_m = find_lambda_in(&a, lambda, LAMBDA_TOL)
        .or_else(|_| find_lambda_in(&a, bracket, LAMBDA_TOL))?;
    let v = solve_right(&a, lambda_m)?;
    let w = solve_left(&a, lambda_m)?;
    let zeta = dot(&w, &v);

    let mut checks = vec![
        Check::new(
            "pivot_disc_isolated",
            isolated[0],
            format!("center {}, radius {:e}", d0.center, d0.radius),
        ),
        Check::new(
            "pivot_disc_above_remaining_spectrum",
            lambda.lo() > gap,
            format!("lambda.lo {:?} > {:?}", lambda.lo(), gap),
        ),
        Check::new(
            "lambda_m_inside_lambda",
            lambda.contains_interval(&lambda_m),
            format!("{lambda_m} in {lambda}"),
        ),
        Check::new(
            "norm_w",
            pair.norm_w.hi() <= 2.35,
            format!("|W| <= {:.6}", pair.norm_w.hi()),
        ),
        Check::new(
            "norm_v",
            pair.norm_v.hi() <= 3.81,
            format!("|V| <= {:.6}", pair.norm_v.hi()),
        ),
    ];
    checks.push(sign_alternation_check(&v));
    checks.push(resolvent_check(&a, &v, lambda_m));
    let lhs = dot(&w, &a.mul_vec(&v));
    let rhs = lambda_m * zeta;
    checks.push(Check::new(
        "left_right_consistency",
        lhs.intersects(&rhs),
        format!("w.(A v) = {lhs}, lambda (w.v) = {rhs}"),
    ));
    let reference = Interval::new(0.616445 - 0.0035, 0.616445 + 0.0035)?;
    let r_half = lambda.scale_pow2(-1);
    checks.push(Check::new(
        "r_half_within_reference_band",
        reference.contains_interval(&r_half),
        format!(
            "{r_half} (width {:.2e}) inside the wider reference band 0.616445 +- 0.0035",
            r_half.width()
        ),
    ));

    Ok(EigenCertificate {
        m,
        h,
        lambda,
        r_half,
        gap_bound,
        lambda_m,
        v,
        w,
        zeta,
        norm_w: pair.norm_w,
        norm_v: pair.norm_v,
        discs,
        checks,
    })
}

/// `W~ A_m V~` assembled blockwise from the deflated `A_h`.
fn extended_product(
    a: &TruncatedMatrix,
    deflated: &TruncatedMatrix,
    pair: &SimilarityPair,
    lam_h: Interval,
) -> Result<TruncatedMatrix> {
    let n = a.dim();
    let hd = deflated.dim();
    let scale = Interval::point(EXTENSION_SCALE);
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for k in 0..n {
            let e = match (i < hd, k < hd) {
                (true, true) if i == 0 && k == 0 => {
                    // v solves the eigen-equation of A_h at lambda_h exactly.
                    deflated.get(0, 0).intersect(&lam_h).ok_or_else(|| {
                        SpectralError::CertificationFailed(
                            "deflated pivot misses the block eigenvalue".into(),
                        )
                    })?
                }
                (true, true) => deflated.get(i, k),
                (true, false) => {
                    (0..hd)
                        .map(|l| pair.w_at(i, l) * a.get(l, k))
                        .sum::<Interval>()
                        / scale
                }
                (false, true) => {
                    scale
                        * (0..hd)
                            .map(|l| a.get(i, l) * pair.v_at(l, k))
                            .sum::<Interval>()
                }
                (false, false) => a.get(i, k),
            };
            out.push(e);
        }
    }
    Ok(TruncatedMatrix::from_entries(a.m(), a.rho(), out)?)
}

/// Sign map `sigma_0 = 1`, `sigma_1 = 0`, `sigma_i = i`.
pub fn sigma(i: usize) -> usize {
    match i {
        0 => 1,
        1 => 0,
        _ => i,
    }
}

/// Whether `(-1)^(1 + sigma_i) v_i > 0` holds strictly for every entry.
pub fn sign_alternation_check(v: &[Interval]) -> Check {
    let bad: Vec<usize> = v
        .iter()
        .enumerate()
        .filter(|(i, x)| {
            if (1 + sigma(*i)).is_multiple_of(2) {
                !x.certainly_positive()
            } else {
                !x.certainly_negative()
            }
        })
        .map(|(i, _)| i)
        .collect();
    Check::new(
        "sign_alternation",
        bad.is_empty(),
        if bad.is_empty() {
            format!("all {} entries strictly signed", v.len())
        } else {
            format!("indeterminate or wrong sign at {bad:?}")
        },
    )
}

/// `sum_{i>=1} |v_i| <= sum_{i>=1} |A_i0| / (lambda - 1/2 - log 2)`.
pub fn resolvent_check(a: &TruncatedMatrix, v: &[Interval], lambda: Interval) -> Check {
    let lhs: Interval = v[1..].iter().map(Interval::abs).sum();
    let col: Interval = (1..a.dim()).map(|i| a.get(i, 0).abs()).sum();
    let pass = match col.checked_div(lambda - core_norm()) {
        Ok(rhs) => lhs.hi() <= rhs.lo(),
        Err(_) => false,
    };
    Check::new(
        "resolvent_bound",
        pass,
        format!("sum |v_i| = {lhs}, column mass {col}"),
    )
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerResult {
    /// `A^n u / |A^n u|_1`.
    pub direction: Vec<f64>,
    /// l1 distance from `direction` to `sign(w.u) v / |v|_1`.
    pub residual: f64,
    /// `|A^n u|_1 / |A^(n-1) u|_1`.
    pub ratio: f64,
}

/// Power iteration with the midpoint matrix of `m`.
pub fn power_converge(
    u: &[f64],
    n: usize,
    m: &TruncatedMatrix,
    cert: &EigenCertificate,
) -> Result<PowerResult> {
    let dim = m.dim();
    for len in [u.len(), cert.v.len()] {
        if len != dim {
            return Err(SpectralError::DimensionMismatch {
                expected: dim,
                got: len,
            });
        }
    }
    let wu: Interval = cert
        .w
        .iter()
        .zip(u)
        .map(|(w, x)| *w * Interval::point(*x))
        .sum();
    let Some(s) = sign(wu) else {
        return Err(SpectralError::OrthogonalStart(wu));
    };
    let a = m.midpoints();
    let l1 = |x: &[f64]| x.iter().map(|t| t.abs()).sum::<f64>();
    let mut x: Vec<f64> = u.to_vec();
    let norm0 = l1(&x);
    x.iter_mut().for_each(|t| *t /= norm0);
    let mut ratio = f64::NAN;
    for _ in 0..n {
        let y: Vec<f64> = (0..dim)
            .map(|i| (0..dim).map(|k| a[i * dim + k] * x[k]).sum())
            .collect();
        let norm = l1(&y);
        ratio = norm / l1(&x);
        x = y.into_iter().map(|t| t / norm).collect();
    }
    let vmid: Vec<f64> = cert.v.iter().map(Interval::mid).collect();
    let vn = l1(&vmid);
    let residual = x
        .iter()
        .zip(&vmid)
        .map(|(d, v)| (d - f64::from(s) * v / vn).abs())
        .sum();
    Ok(PowerResult {
        direction: x,
        residual,
        ratio,
    })
}
