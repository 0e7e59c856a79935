//! abc-triple quality over ℚ and Roth-type radical scans over ℚ and ℚ(t).

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{ln_biguint, ExactLog};
use crate::error::{Error, Result};
use crate::heights::{multi_height, HeightValue};
use crate::places_q::{coprime_basis, factor};
use crate::places_qt::{ff_height, rad_degree, FFElement};
use crate::poly::{from_int, zpoly_derivative, zpoly_gcd, zpoly_trim, Poly};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AbcTriple {
    pub a: String,
    pub b: String,
    pub c: String,
    pub height: f64,
    pub height_exact: ExactLog,
    /// Primes where the valuations of `a`, `b`, `c` are not all equal.
    #[serde(with = "crate::arith::vec_bigint_dec")]
    pub primes: Vec<BigInt>,
    pub rad_mass: f64,
    pub rad_mass_exact: ExactLog,
    /// `None` when no finite place separates the triple.
    pub quality: Option<f64>,
    pub rad_mass_lower_bound: bool,
    pub quality_upper_bound: bool,
}

pub fn abc_quality(a: &BigRational, b: &BigRational, budget: u64) -> Result<AbcTriple> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::invalid("a and b must be nonzero"));
    }
    let c = a + b;
    if c.is_zero() {
        return Err(Error::invalid("a + b must be nonzero"));
    }
    let triple = [a.clone(), b.clone(), c.clone()];
    let parts: Vec<BigInt> = triple
        .iter()
        .flat_map(|r| [r.numer().abs(), r.denom().clone()])
        .collect();
    let basis = coprime_basis(&parts)?;

    let mut primes = BTreeSet::new();
    let mut partial = false;
    for (j, elem) in basis.elements.iter().enumerate() {
        let v: Vec<i64> = (0..3)
            .map(|i| basis.exponents[2 * i][j] as i64 - basis.exponents[2 * i + 1][j] as i64)
            .collect();
        if v[0] == v[1] && v[1] == v[2] {
            continue;
        }
        // every prime of a basis element shares that element's valuation pattern
        let f = factor(elem, budget);
        partial |= !f.is_complete();
        primes.extend(f.primes().cloned());
    }

    let height = multi_height(&triple)?;
    let (height, height_exact) = match height {
        HeightValue::Rational { value, exact } => (value, exact),
        HeightValue::FunctionField { .. } => unreachable!(),
    };
    let prod: BigInt = primes.iter().product();
    let rad_mass = primes.iter().map(|p| ln_biguint(p.magnitude())).fold(0.0, |s, x| s + x);
    Ok(AbcTriple {
        a: a.to_string(),
        b: b.to_string(),
        c: c.to_string(),
        height,
        height_exact,
        primes: primes.into_iter().collect(),
        rad_mass,
        rad_mass_exact: ExactLog::of(prod.magnitude().clone()),
        quality: (rad_mass > 0.0).then(|| height / rad_mass),
        rad_mass_lower_bound: partial,
        quality_upper_bound: partial,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RothSample {
    pub z: String,
    pub radsum: f64,
    pub height: f64,
    pub margin: f64,
    pub lower_bound_only: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RothScanReport {
    pub field: String,
    pub polynomial: String,
    pub degree: usize,
    pub epsilon: f64,
    pub family: String,
    /// Number of candidate points enumerated, skipped roots included.
    pub enumerated: usize,
    pub samples: Vec<RothSample>,
    /// Roots of the polynomial met during enumeration.
    pub skipped: Vec<String>,
    /// `-min margin`; `None` when nothing was sampled.
    pub empirical_constant: Option<f64>,
    pub lower_bound_samples: usize,
}

fn check_roth_hypotheses(deg: usize, squarefree: bool) -> Result<()> {
    if deg < 3 {
        return Err(Error::invalid(format!("polynomial has degree {deg}; need at least 3")));
    }
    if !squarefree {
        return Err(Error::invalid("polynomial is not squarefree"));
    }
    Ok(())
}

fn empirical_constant(samples: &[RothSample]) -> Option<f64> {
    samples.iter().map(|s| 0.0 - s.margin).reduce(f64::max)
}

/// All reduced `p/q` with `1 ≤ q ≤ H` and `|p| ≤ H`, ordered by `q` then `p`.
pub fn rational_family(h: u64) -> Vec<BigRational> {
    let h = h as i64;
    let mut out = Vec::new();
    for q in 1..=h {
        for p in -h..=h {
            if p.gcd(&q) == 1 {
                out.push(BigRational::new(p.into(), q.into()));
            }
        }
    }
    out
}

fn eval_at(f: &[BigInt], z: &BigRational) -> BigRational {
    let deg = f.len() as u32 - 1;
    let (p, q) = (z.numer(), z.denom());
    let mut acc = BigInt::zero();
    let mut qpow = BigInt::one();
    for c in f.iter().rev() {
        acc = acc * p + c * &qpow;
        qpow *= q;
    }
    BigRational::new(acc, q.pow(deg))
}

pub fn roth_scan_q(f: &[BigInt], epsilon: f64, h: u64, budget: u64) -> Result<RothScanReport> {
    let f = zpoly_trim(f.to_vec());
    let deg = f.len().saturating_sub(1);
    let squarefree = deg > 0 && zpoly_gcd(&f, &zpoly_derivative(&f)).len() == 1;
    check_roth_hypotheses(deg, squarefree)?;
    if !(epsilon > 0.0) {
        return Err(Error::invalid("epsilon must be positive"));
    }
    let family = rational_family(h);
    let weight = deg as f64 - 2.0 - epsilon;
    let results: Vec<Option<RothSample>> = family
        .par_iter()
        .map(|z| {
            let v = eval_at(&f, z);
            if v.is_zero() {
                return None;
            }
            let fv = factor(&v.numer().abs(), budget);
            let radsum = fv.primes().map(|p| ln_biguint(p.magnitude())).fold(0.0, |s, x| s + x);
            let height = ln_biguint(z.numer().magnitude().max(z.denom().magnitude()));
            Some(RothSample {
                z: z.to_string(),
                radsum,
                height,
                margin: radsum - weight * height,
                lower_bound_only: !fv.is_complete(),
            })
        })
        .collect();
    let skipped = family
        .iter()
        .zip(&results)
        .filter(|(_, r)| r.is_none())
        .map(|(z, _)| z.to_string())
        .collect();
    let samples: Vec<RothSample> = results.into_iter().flatten().collect();
    Ok(RothScanReport {
        field: "q".into(),
        polynomial: from_int(&f).render("x"),
        degree: deg,
        epsilon,
        family: format!("reduced p/q with 1 <= q <= {h}, |p| <= {h}"),
        enumerated: family.len(),
        empirical_constant: empirical_constant(&samples),
        lower_bound_samples: samples.iter().filter(|s| s.lower_bound_only).count(),
        samples,
        skipped,
    })
}

/// Integer polynomials in `t` of degree at most `max_degree` with
/// coefficients in `[-bound, bound]`, in lexicographic coefficient order.
pub fn polynomial_family(max_degree: usize, bound: i64) -> Vec<FFElement> {
    let width = (2 * bound + 1) as usize;
    let total = width.pow(max_degree as u32 + 1);
    (0..total)
        .map(|mut idx| {
            let coeffs: Vec<BigRational> = (0..=max_degree)
                .map(|_| {
                    let c = (idx % width) as i64 - bound;
                    idx /= width;
                    BigRational::from_integer(c.into())
                })
                .collect();
            FFElement::from_poly(Poly::new(coeffs))
        })
        .collect()
}

pub fn roth_scan_ff(f: &Poly<FFElement>, epsilon: f64, max_degree: usize, bound: i64) -> Result<RothScanReport> {
    let deg = f.deg0();
    check_roth_hypotheses(deg, deg > 0 && f.is_squarefree())?;
    if !(epsilon > 0.0) {
        return Err(Error::invalid("epsilon must be positive"));
    }
    let family = polynomial_family(max_degree, bound);
    let weight = deg as f64 - 2.0 - epsilon;
    let results: Vec<Option<RothSample>> = family
        .par_iter()
        .map(|z| {
            let v = f.eval(z);
            if v.is_zero() {
                return None;
            }
            let at_infinity = v.numer().deg0() < v.denom().deg0();
            let radsum = rad_degree(v.numer()) + usize::from(at_infinity);
            let height = ff_height(z) as f64;
            Some(RothSample {
                z: z.render(),
                radsum: radsum as f64,
                height,
                margin: radsum as f64 - weight * height,
                lower_bound_only: false,
            })
        })
        .collect();
    let skipped = family
        .iter()
        .zip(&results)
        .filter(|(_, r)| r.is_none())
        .map(|(z, _)| z.render())
        .collect();
    let samples: Vec<RothSample> = results.into_iter().flatten().collect();
    Ok(RothScanReport {
        field: "qt".into(),
        polynomial: f.render("x"),
        degree: deg,
        epsilon,
        family: format!("integer polynomials in t of degree <= {max_degree} with coefficients in [-{bound}, {bound}]"),
        enumerated: family.len(),
        empirical_constant: empirical_constant(&samples),
        lower_bound_samples: 0,
        samples,
        skipped,
    })
}
