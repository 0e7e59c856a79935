//! Weil and canonical heights.
//!
//! Over ℚ, `h(p/q) = log max(|p|, |q|)` in natural logs and `h(∞) = 0`.
//! Over ℚ(t) heights are integer degrees.
//!
//! # The constant `C_φ`
//!
//! Write `φ = p/q` with integral forms of degree `d`, `R = Res(p, q)`,
//! `U = max(‖p‖₁, ‖q‖₁)`, and let `f_1, g_1, f_2, g_2` be the integral forms
//! of degree `d - 1` with
//!
//! ```text
//! f_1 p + g_1 q = R x^(2d-1),    f_2 p + g_2 q = R y^(2d-1)
//! ```
//!
//! (they exist by Cramer's rule on the Sylvester system). Put
//! `B = max(‖f_1‖₁ + ‖g_1‖₁, ‖f_2‖₁ + ‖g_2‖₁)`. For coprime `(x, y)` with
//! `H = max(|x|, |y|)`:
//!
//! * `max(|p(x,y)|, |q(x,y)|) ≤ U H^d`, so `h(φ(z)) ≤ d h(z) + log U`;
//! * `|R| H^(2d-1) ≤ B H^(d-1) max(|p(x,y)|, |q(x,y)|)`, and the gcd of
//!   `p(x,y)` and `q(x,y)` divides `R`, so `h(φ(z)) ≥ d h(z) - log B`.
//!
//! Hence `|h(φ(z)) - d h(z)| ≤ C_φ = max(log U, log B, 0)`. Summing the
//! geometric tail gives `|ĥ(z) - h(φ^N z)/d^N| ≤ C_φ / (d^N (d - 1))`.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{approx_digits, lcm_all, ln_biguint, Ext, ExactLog, ExtRational};
use crate::error::{Error, Result};
use crate::map::RationalMap;
use crate::places_qt::{ff_height, FFElement};
use crate::poly::det_bareiss;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "field", rename_all = "snake_case")]
pub enum HeightValue {
    Rational { value: f64, exact: ExactLog },
    FunctionField { value: u64 },
}

impl HeightValue {
    pub fn value(&self) -> f64 {
        match self {
            HeightValue::Rational { value, .. } => *value,
            HeightValue::FunctionField { value } => *value as f64,
        }
    }
}

/// `max(|p|, |q|)` for `z = p/q` in lowest terms; 1 at infinity.
pub fn height_arg(z: &ExtRational) -> BigInt {
    match z {
        Ext::Infinity => BigInt::one(),
        Ext::Finite(r) => {
            let a = r.numer().abs();
            let b = r.denom().clone();
            a.max(b)
        }
    }
}

pub fn log_height(z: &ExtRational) -> f64 {
    ln_biguint(height_arg(z).magnitude())
}

pub fn weil_height(z: &ExtRational) -> HeightValue {
    let arg = height_arg(z);
    HeightValue::Rational {
        value: ln_biguint(arg.magnitude()),
        exact: ExactLog::of(arg.magnitude().clone()),
    }
}

pub fn weil_height_ff(z: &Ext<FFElement>) -> HeightValue {
    HeightValue::FunctionField {
        value: match z {
            Ext::Infinity => 0,
            Ext::Finite(f) => ff_height(f),
        },
    }
}

/// `h(z_1, …, z_n)` after clearing to coprime integers.
pub fn multi_height(values: &[BigRational]) -> Result<HeightValue> {
    if values.iter().all(Zero::is_zero) {
        return Err(Error::invalid("multi-height of the zero tuple"));
    }
    let l = lcm_all(values.iter().map(|v| v.denom()));
    let ints: Vec<BigInt> = values
        .iter()
        .map(|v| (v * BigRational::from_integer(l.clone())).to_integer())
        .collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
    let max = ints.iter().map(|v| v.abs() / &g).max().unwrap();
    Ok(HeightValue::Rational {
        value: ln_biguint(max.magnitude()),
        exact: ExactLog::of(max.magnitude().clone()),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeightBound {
    pub c: f64,
    pub log_upper: f64,
    pub log_lower: f64,
    #[serde(with = "crate::arith::bigint_dec")]
    pub resultant: BigInt,
    #[serde(with = "crate::arith::bigint_dec")]
    pub upper_constant: BigInt,
    #[serde(with = "crate::arith::bigint_dec")]
    pub lower_constant: BigInt,
}

fn l1(v: &[BigInt]) -> BigInt {
    v.iter().map(|c| c.abs()).sum()
}

/// Solves `f p + g q = rhs` for forms `f`, `g` of degree `d - 1`, where
/// `rhs` is a form of degree `2d - 1` and the system is nonsingular.
fn bezout_forms(p: &[BigInt], q: &[BigInt], rhs: &[BigInt]) -> (Vec<BigRational>, Vec<BigRational>) {
    let d = p.len() - 1;
    let n = 2 * d;
    let mut m: Vec<Vec<BigRational>> = vec![vec![BigRational::zero(); n + 1]; n];
    for k in 0..n {
        for j in 0..d {
            if k >= j && k - j <= d {
                m[k][j] = BigRational::from_integer(p[k - j].clone());
                m[k][d + j] = BigRational::from_integer(q[k - j].clone());
            }
        }
        m[k][n] = BigRational::from_integer(rhs[k].clone());
    }
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero()).expect("nonsingular system");
        m.swap(col, piv);
        let inv = BigRational::one() / m[col][col].clone();
        for c in col..=n {
            m[col][c] = &m[col][c] * &inv;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in col..=n {
                    let v = &m[col][c] * &f;
                    m[r][c] -= v;
                }
            }
        }
    }
    let sol: Vec<BigRational> = m.into_iter().map(|row| row[n].clone()).collect();
    (sol[..d].to_vec(), sol[d..].to_vec())
}

pub fn phi_height_bound(map: &RationalMap) -> HeightBound {
    let (p, q) = map.forms();
    let d = map.degree();
    let n = 2 * d;
    let mut sys = vec![vec![BigInt::zero(); n]; n];
    for k in 0..n {
        for j in 0..d {
            if k >= j && k - j <= d {
                sys[k][j] = p[k - j].clone();
                sys[k][d + j] = q[k - j].clone();
            }
        }
    }
    let r = det_bareiss(sys);
    let mut lower = BigInt::zero();
    for target in [n - 1, 0] {
        let mut rhs = vec![BigInt::zero(); n];
        rhs[target] = r.clone();
        let (f, g) = bezout_forms(p, q, &rhs);
        let ints: Vec<BigInt> = f
            .iter()
            .chain(g.iter())
            .map(|c| {
                assert!(c.is_integer(), "adjugate entries are integral");
                c.to_integer()
            })
            .collect();
        lower = lower.max(l1(&ints));
    }
    let upper = l1(p).max(l1(q));
    let log_upper = ln_biguint(upper.magnitude());
    let log_lower = ln_biguint(lower.magnitude());
    HeightBound {
        c: log_upper.max(log_lower).max(0.0),
        log_upper,
        log_lower,
        resultant: r,
        upper_constant: upper,
        lower_constant: lower,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CanonicalHeightEstimate {
    pub estimate: f64,
    /// Rigorous: `|estimate - ĥ(α)| ≤ error_radius`, up to float rounding.
    pub error_radius: f64,
    pub iterations_used: u32,
    pub c_phi: f64,
    pub tolerance: f64,
    /// The value-size cap stopped iteration before `tolerance` was met.
    pub capped: bool,
}

fn digits(z: &ExtRational) -> u64 {
    approx_digits(&height_arg(z))
}

pub fn canonical_height(map: &RationalMap, alpha: &ExtRational, tol: f64) -> Result<CanonicalHeightEstimate> {
    canonical_height_with_bound(map, alpha, tol, &phi_height_bound(map), map.caps().max_digits.min(100_000))
}

pub fn canonical_height_with_bound(
    map: &RationalMap,
    alpha: &ExtRational,
    tol: f64,
    bound: &HeightBound,
    max_digits: u64,
) -> Result<CanonicalHeightEstimate> {
    if !(tol > 0.0) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    let d = map.degree() as f64;
    let radius = |n: u32| bound.c / (d.powi(n as i32) * (d - 1.0));
    let mut target = 0u32;
    while radius(target) > tol {
        target += 1;
    }
    let mut z = alpha.clone();
    let mut n = 0u32;
    let mut capped = false;
    while n < target {
        if digits(&z).saturating_mul(map.degree() as u64) > max_digits {
            capped = true;
            break;
        }
        z = map.evaluate(&z);
        n += 1;
    }
    Ok(CanonicalHeightEstimate {
        estimate: log_height(&z) / d.powi(n as i32),
        error_radius: radius(n),
        iterations_used: n,
        c_phi: bound.c,
        tolerance: tol,
        capped,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Classification {
    Preperiodic { tail: u32, period: u32 },
    /// `h(φ^k α)` exceeded `C_φ / (d - 1)`, which no preperiodic point can.
    Wandering { certified_at: u32, height: f64, ceiling: f64 },
    Inconclusive { reason: String },
}

/// Orbit walk counting `α` as index 0: a repeat gives the exact tail and
/// period, a height above the ceiling certifies a wandering point.
pub fn classify_point(map: &RationalMap, alpha: &ExtRational) -> Classification {
    classify_with_bound(map, alpha, &phi_height_bound(map), map.caps().max_digits.min(100_000), 10_000)
}

pub fn classify_with_bound(
    map: &RationalMap,
    alpha: &ExtRational,
    bound: &HeightBound,
    max_digits: u64,
    max_steps: u32,
) -> Classification {
    let ceiling = bound.c / (map.degree() as f64 - 1.0);
    let mut seen: HashMap<ExtRational, u32> = HashMap::new();
    let mut z = alpha.clone();
    for k in 0..=max_steps {
        if let Some(&first) = seen.get(&z) {
            return Classification::Preperiodic {
                tail: first,
                period: k - first,
            };
        }
        let h = log_height(&z);
        if h > ceiling + 1e-9 {
            return Classification::Wandering {
                certified_at: k,
                height: h,
                ceiling,
            };
        }
        if digits(&z) > max_digits {
            break;
        }
        seen.insert(z.clone(), k);
        z = map.evaluate(&z);
    }
    Classification::Inconclusive {
        reason: "orbit neither repeated nor left the height ceiling within the caps".into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::parse_ext_rational;
    use proptest::prelude::*;

    fn m(s: &str) -> RationalMap {
        RationalMap::parse(s).unwrap()
    }

    fn z(s: &str) -> ExtRational {
        parse_ext_rational(s).unwrap()
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn weil_examples() {
        assert!(close(weil_height(&z("26")).value(), 26f64.ln()));
        assert!(close(weil_height(&z("5/3")).value(), 5f64.ln()));
        assert_eq!(weil_height(&z("0")).value(), 0.0);
        assert_eq!(weil_height(&z("inf")).value(), 0.0);
    }

    #[test]
    fn multi_height_examples() {
        let q = |a: i64, b: i64| BigRational::new(a.into(), b.into());
        match multi_height(&[q(1, 1), q(8, 1), q(9, 1)]).unwrap() {
            HeightValue::Rational { exact, .. } => assert_eq!(exact.arg, 9u32.into()),
            _ => unreachable!(),
        }
        assert!(close(multi_height(&[q(5, 3), q(1, 1)]).unwrap().value(), 5f64.ln()));
        assert!(close(multi_height(&[q(2, 1), q(4, 1)]).unwrap().value(), 2f64.ln()));
        assert!(multi_height(&[q(0, 1), q(0, 1)]).is_err());
    }

    #[test]
    fn bound_examples() {
        assert_eq!(phi_height_bound(&m("x^2")).c, 0.0);
        let b = phi_height_bound(&m("x^2+1"));
        assert!(close(b.c, 2f64.ln()));
        assert_eq!(b.resultant.abs(), BigInt::from(1));
        let b = phi_height_bound(&m("x^2+1/2"));
        assert_eq!(b.resultant.abs(), BigInt::from(16));
        assert_eq!(b.lower_constant, BigInt::from(12));
    }

    #[test]
    fn canonical_examples() {
        let e = canonical_height(&m("x^2"), &z("2"), 1e-6).unwrap();
        assert!(close(e.estimate, 2f64.ln()));
        assert_eq!(e.error_radius, 0.0);
        let e = canonical_height(&m("x^2-1"), &z("0"), 1e-6).unwrap();
        assert_eq!(e.estimate, 0.0);
        let e = canonical_height(&m("x^2+1"), &z("1"), 1e-4).unwrap();
        assert!(!e.capped && e.error_radius <= 1e-4);
        assert!((e.estimate - 458330f64.ln() / 32.0).abs() < 0.01);
        assert!(canonical_height(&m("x^2+1"), &z("1"), 0.0).is_err());
    }

    #[test]
    fn canonical_height_respects_digit_cap() {
        let f = m("x^2+1");
        let b = phi_height_bound(&f);
        let e = canonical_height_with_bound(&f, &z("1"), 1e-12, &b, 50).unwrap();
        assert!(e.capped);
        assert!(e.error_radius > 1e-12);
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify_point(&m("x^2-1"), &z("0")), Classification::Preperiodic { tail: 0, period: 2 });
        assert!(matches!(classify_point(&m("x^2+1"), &z("1")), Classification::Wandering { .. }));
        assert_eq!(classify_point(&m("x^2"), &z("1")), Classification::Preperiodic { tail: 0, period: 1 });
        assert_eq!(classify_point(&m("x^2"), &z("-1")), Classification::Preperiodic { tail: 1, period: 1 });
        assert_eq!(classify_point(&m("x^2-2"), &z("inf")), Classification::Preperiodic { tail: 0, period: 1 });
    }

    fn point() -> impl Strategy<Value = ExtRational> {
        (-1000i64..=1000, 1i64..=1000).prop_map(|(a, b)| ExtRational::from_frac(a, b))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]

        #[test]
        fn one_step_bound_holds(z0 in point(), idx in 0usize..5) {
            let maps = ["x^2+1", "x^2+1/2", "(x^2+3)/(x+3)", "(2x^2-x)/(x^2+5)", "x^3-7/4*x"];
            let f = m(maps[idx]);
            let b = phi_height_bound(&f);
            let lhs = (log_height(&f.evaluate(&z0)) - f.degree() as f64 * log_height(&z0)).abs();
            prop_assert!(lhs <= b.c + 1e-9, "{} at {}: {} > {}", maps[idx], z0, lhs, b.c);
        }

        #[test]
        fn multi_height_with_one_is_weil(z0 in point()) {
            let r = z0.finite().unwrap().clone();
            prop_assert_eq!(multi_height(&[r, BigRational::one()]).unwrap(), weil_height(&z0));
        }
    }
}
