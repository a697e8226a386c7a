//! Closed forms checked against independent computations.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use quadrature::double_exponential::integrate;

use renyi_core::density::{self, DensityCoeffs, DensityMap};
use renyi_core::matrix::{binomial, entry, TruncatedMatrix};
use renyi_core::measure::{self, GridMeasure};
use renyi_core::Interval;

fn quad(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    integrate(f, a, b, 1e-14).integral
}

fn samples() -> Vec<DensityCoeffs> {
    vec![
        DensityCoeffs::new(0.0, vec![0.5]),
        DensityCoeffs::new(-0.3, vec![0.6, -0.2, 0.05]),
        DensityCoeffs::new(-1.2, vec![0.1, 0.4, -0.3, 0.2, 0.01]),
        DensityCoeffs::new(0.7, vec![0.0, 0.0, 1.0]),
    ]
}

#[test]
fn integrals_match_quadrature() {
    for f in samples() {
        let tol = 1e-11;
        let total = quad(|t| f.eval(t), 0.0, 2.0);
        assert!((f.integral_total() - total).abs() < tol, "{f:?}");
        let upper = quad(|t| f.eval(t), 1.0, 2.0);
        assert!((f.integral_upper() - upper).abs() < tol);
        let mean = quad(|t| t * f.eval(t), 0.0, 2.0);
        assert!((f.expected_value() - mean).abs() < tol);
        for t in [0.1, 0.7, 1.0, 1.6, 2.0] {
            let cdf = quad(|s| f.eval(s), 0.0, t);
            assert!((f.cdf(t).unwrap() - cdf).abs() < tol, "cdf({t})");
        }
        let cdf_int = quad(|t| quad(|s| f.eval(s), 0.0, t), 0.0, 2.0);
        assert!((f.cdf_integral() - cdf_int).abs() < 1e-10);
    }
}

#[test]
fn tail_integral_matches_quadrature() {
    for f in samples() {
        for x in [0.01, 0.05, 0.3, 1.0, 1.7, 2.0] {
            let lo = 1.0 + x / 2.0;
            let q = quad(|y| f.eval(y) / (y - 1.0), lo, 2.0);
            assert!(
                (f.upper_tail_integral(x) - q).abs() < 1e-11,
                "x = {x}, {f:?}"
            );
        }
    }
}

#[test]
fn dilog_matches_integral_form() {
    for u in [0.0, 0.1, 0.25, 0.5, 0.8, 1.0] {
        let q = -quad(|t| (1.0 + t).ln() / t, 0.0, u);
        let d = (density::dilog_neg(u) - q).abs();
        assert!(d < 1e-13, "u = {u}: {d:e}");
    }
    let pi2_12 = std::f64::consts::PI.powi(2) / 12.0;
    assert!((density::dilog_neg(1.0) + pi2_12).abs() < 1e-15);
}

fn rat(x: f64) -> BigRational {
    BigRational::from_float(x).unwrap()
}

fn contains(iv: Interval, x: &BigRational) -> bool {
    rat(iv.lo()) <= *x && *x <= rat(iv.hi())
}

fn exact_binomial(n: u64, k: u64) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, i| {
        acc * BigInt::from(n - i) / BigInt::from(i + 1)
    })
}

/// Rational entries of the polynomial block, from the generating integrals.
fn exact_entry(r: usize, k: usize) -> BigRational {
    let pow2 = |e: usize| BigRational::new(BigInt::one(), BigInt::one() << e);
    let bracket = |positive: bool, k: usize| {
        let s = if positive {
            BigRational::one()
        } else {
            -BigRational::one()
        };
        (s - BigRational::new(BigInt::from(2), BigInt::from(k))) * pow2(k + 1)
    };
    match (r, k) {
        (1, _) => {
            let k = k - 1;
            BigRational::new(BigInt::one(), BigInt::from(k)) + bracket(k.is_multiple_of(2), k)
        }
        _ => {
            let (r, k) = (r - 1, k - 1);
            if k < r {
                return BigRational::zero();
            }
            BigRational::from(exact_binomial(k as u64, r as u64)) * bracket((k - r) % 2 == 0, k)
        }
    }
}

#[test]
fn polynomial_block_encloses_exact_rationals() {
    for r in 1..=40 {
        for k in 2..=40 {
            let e = entry(r, k);
            assert!(contains(e, &exact_entry(r, k)), "({r},{k}) {e}");
        }
    }
    for (n, k) in [(10, 3), (60, 30), (120, 60), (200, 100)] {
        assert!(contains(
            binomial(n, k),
            &BigRational::from(exact_binomial(n, k))
        ));
    }
}

#[test]
fn rho_scaling_is_a_diagonal_similarity() {
    let a = TruncatedMatrix::build(10, 1.0).unwrap();
    let b = TruncatedMatrix::build(10, 2.5).unwrap();
    for i in 0..a.dim() {
        for j in 0..a.dim() {
            let s = 2.5f64.powi(i as i32 - j as i32);
            let scaled = a.get(i, j) * Interval::point(s);
            assert!(scaled.intersects(&b.get(i, j)), "({i},{j})");
        }
    }
}

/// One step of the grid operator started from the fixed density stays within
/// the discretization error of it.
#[test]
fn grid_operator_fixes_the_density_fixed_point() {
    let map = DensityMap::new(density::DEFAULT_ORDER).unwrap();
    let fp = density::iterate_to_fixed(
        &map,
        &DensityCoeffs::uniform(density::DEFAULT_ORDER),
        1e-12,
        1000,
        &density::default_grid(),
        None,
    )
    .unwrap();
    let bins = 4096;
    let lower = 0.05;
    let mu = GridMeasure::from_density(&fp.fstar, bins).unwrap();
    let next = measure::apply_that(&mu).unwrap();
    let d = measure::distance_to_fstar(&next, &fp.fstar, lower).unwrap();
    // Cell oscillation of f* on [lower / 2, 2]: h sup |f'|, with f' largest
    // in modulus at the left end.
    let h = 2.0 / bins as f64;
    let osc = h * fp.fstar.derivative(lower / 2.0).abs();
    assert!(d <= 2.0 * osc, "distance {d:e}, oscillation {osc:e}");
    // The image mass is the growth factor 1 + C.
    let growth = measure::apply_t(&mu).total_mass();
    assert!((growth - (1.0 + fp.c)).abs() < 1e-6, "{growth}");
}
