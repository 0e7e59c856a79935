//! Rational maps over ℚ and ℚ(t).
//!
//! A map over ℚ is stored through its integral homogeneous lift
//! `(p(x, y), q(x, y))`, forms of degree `d` with coprime coefficients.
//! Iterates are the forms `p_i = p(p_{i-1}, q_{i-1})`, `q_i = q(p_{i-1}, q_{i-1})`,
//! cached behind a lock so readers on several threads share the work.
//! A form of degree `D` is a coefficient vector of length `D + 1` whose
//! entry `k` multiplies `x^k y^(D-k)`; dropping trailing zeros gives the
//! dehomogenized polynomial.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{approx_digits, from_homogeneous, gcd_all, homogeneous, lcm_all, Ext, ExtRational};
use crate::error::{Error, Result};
use crate::expr::parse_ratfn;
use crate::places_q::{factor, is_probable_prime};
use crate::places_qt::FFElement;
use crate::poly::{from_int, sylvester_resultant, zpoly_gcd, zpoly_mul, zpoly_trim, Poly, QPoly};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    /// Largest admissible iterate degree `d^i`.
    pub max_iterate_degree: u64,
    /// Largest admissible coefficient or orbit value, in decimal digits.
    pub max_digits: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_iterate_degree: 4096,
            max_digits: 1_000_000,
        }
    }
}

/// Homogeneous iterate `(p_i, q_i)`, both forms of degree `d^i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IterateRep {
    pub index: u32,
    pub p: Vec<BigInt>,
    pub q: Vec<BigInt>,
}

impl IterateRep {
    pub fn form_degree(&self) -> usize {
        self.p.len() - 1
    }

    /// `P_i(x) = p_i(x, 1)` as an integer polynomial.
    pub fn numer_poly(&self) -> Vec<BigInt> {
        zpoly_trim(self.p.clone())
    }

    pub fn denom_poly(&self) -> Vec<BigInt> {
        zpoly_trim(self.q.clone())
    }
}

pub struct RationalMap {
    numer: Vec<BigInt>,
    denom: Vec<BigInt>,
    degree: usize,
    caps: Caps,
    iterates: RwLock<Vec<Arc<IterateRep>>>,
}

impl Clone for RationalMap {
    fn clone(&self) -> Self {
        RationalMap {
            numer: self.numer.clone(),
            denom: self.denom.clone(),
            degree: self.degree,
            caps: self.caps,
            iterates: RwLock::new(self.iterates.read().unwrap().clone()),
        }
    }
}

impl PartialEq for RationalMap {
    fn eq(&self, o: &Self) -> bool {
        self.numer == o.numer && self.denom == o.denom
    }
}

impl fmt::Debug for RationalMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalMap({})", self.render())
    }
}

impl fmt::Display for RationalMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

fn pad(v: &[BigInt], len: usize) -> Vec<BigInt> {
    let mut out = v.to_vec();
    out.resize(len, BigInt::zero());
    out
}

fn eval_form(form: &[BigInt], x: &BigInt, y: &BigInt) -> BigInt {
    let mut acc = BigInt::zero();
    let mut ypow = BigInt::one();
    for c in form.iter().rev() {
        acc = acc * x + c * &ypow;
        ypow *= y;
    }
    acc
}

fn form_compose(base: &[BigInt], p: &[BigInt], q: &[BigInt]) -> Vec<BigInt> {
    let d = base.len() - 1;
    let inner = p.len() - 1;
    let mut ppow = vec![vec![BigInt::one()]];
    let mut qpow = vec![vec![BigInt::one()]];
    for k in 1..=d {
        ppow.push(zpoly_mul(&ppow[k - 1], p));
        qpow.push(zpoly_mul(&qpow[k - 1], q));
    }
    let mut out = vec![BigInt::zero(); d * inner + 1];
    for (k, a) in base.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        let term = zpoly_mul(&ppow[k], &qpow[d - k]);
        for (o, t) in out.iter_mut().zip(term.iter()) {
            *o += a * t;
        }
    }
    out
}

// ---------------------------------------------------------------------------
// polynomials over F_p with a big prime p

fn fp_trim(v: Vec<BigInt>, p: &BigInt) -> Vec<BigInt> {
    zpoly_trim(v.into_iter().map(|c| c.mod_floor(p)).collect())
}

fn fp_inv(a: &BigInt, p: &BigInt) -> BigInt {
    a.modpow(&(p - 2u32), p)
}

fn fp_rem(a: &[BigInt], b: &[BigInt], p: &BigInt) -> Vec<BigInt> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let inv = fp_inv(&b[db], p);
    while r.len() > db && !r.is_empty() {
        let dr = r.len() - 1;
        let c = (&r[dr] * &inv).mod_floor(p);
        for (j, bc) in b.iter().enumerate() {
            r[dr - db + j] = (&r[dr - db + j] - &c * bc).mod_floor(p);
        }
        r = zpoly_trim(r);
    }
    r
}

/// Degree of `gcd(a, b)` over `F_p`; `None` when both reduce to zero.
fn fp_gcd_degree(a: &[BigInt], b: &[BigInt], p: &BigInt) -> Option<usize> {
    let mut a = fp_trim(a.to_vec(), p);
    let mut b = fp_trim(b.to_vec(), p);
    if a.is_empty() && b.is_empty() {
        return None;
    }
    while !b.is_empty() {
        let r = fp_rem(&a, &b, p);
        a = b;
        b = r;
    }
    Some(a.len() - 1)
}

// ---------------------------------------------------------------------------

pub type Residue = Ext<BigInt>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueCycle {
    #[serde(with = "crate::arith::bigint_dec")]
    pub prime: BigInt,
    pub start: String,
    pub tail_length: u64,
    pub period: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BadReduction {
    #[serde(with = "crate::arith::bigint_dec")]
    pub resultant: BigInt,
    #[serde(with = "crate::arith::vec_bigint_dec")]
    pub primes: Vec<BigInt>,
    /// Part of the resultant the factoring budget could not split.
    #[serde(with = "crate::arith::opt_bigint_dec")]
    pub unresolved_cofactor: Option<BigInt>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiplicityClass {
    pub multiplicity: usize,
    /// Number of distinct roots over ℚ̄ with this multiplicity.
    pub count: usize,
    /// Monic squarefree polynomial whose roots are exactly these points.
    pub factor: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RamificationProfile {
    pub level: u32,
    pub total_degree: u64,
    pub finite: Vec<MultiplicityClass>,
    pub infinity_multiplicity: usize,
    pub simple_root_count: usize,
}

impl RamificationProfile {
    pub fn multiplicity_sum(&self) -> u64 {
        self.finite
            .iter()
            .map(|c| (c.multiplicity * c.count) as u64)
            .sum::<u64>()
            + self.infinity_multiplicity as u64
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    NotDynamicallyRamified { witness: u32 },
    LikelyDynamicallyRamified,
    Inconclusive,
}

/// Heuristic three-valued verdict with the per-level simple-root counts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RamificationVerdict {
    #[serde(flatten)]
    pub verdict: Verdict,
    pub depth: u32,
    pub threshold: usize,
    pub simple_root_counts: Vec<usize>,
    pub heuristic: bool,
}

impl RationalMap {
    pub fn parse(expr: &str) -> Result<Self> {
        Self::parse_with_caps(expr, Caps::default())
    }

    pub fn parse_with_caps(expr: &str, caps: Caps) -> Result<Self> {
        let r = parse_ratfn::<BigRational>(expr, "x")?;
        let l = lcm_all(
            r.numer
                .coeffs()
                .iter()
                .chain(r.denom.coeffs())
                .map(|c| c.denom()),
        );
        let scale = |p: &QPoly| -> Vec<BigInt> {
            p.coeffs()
                .iter()
                .map(|c| (c * BigRational::from_integer(l.clone())).to_integer())
                .collect()
        };
        Self::from_coeffs_with_caps(scale(&r.numer), scale(&r.denom), caps)
    }

    pub fn from_coeffs(numer: Vec<BigInt>, denom: Vec<BigInt>) -> Result<Self> {
        Self::from_coeffs_with_caps(numer, denom, Caps::default())
    }

    /// Builds a map from ascending integer coefficient lists of `P` and `Q`.
    pub fn from_coeffs_with_caps(numer: Vec<BigInt>, denom: Vec<BigInt>, caps: Caps) -> Result<Self> {
        let mut numer = zpoly_trim(numer);
        let mut denom = zpoly_trim(denom);
        if denom.is_empty() {
            return Err(Error::Degenerate("denominator is zero".into()));
        }
        if numer.is_empty() {
            return Err(Error::Degenerate("the constant map 0".into()));
        }
        let g = zpoly_gcd(&numer, &denom);
        if g.len() > 1 {
            let reduced = (numer.len() - g.len()).max(denom.len() - g.len());
            return Err(Error::CommonFactor {
                common_degree: g.len() - 1,
                reduced_degree: reduced,
            });
        }
        let mut c = gcd_all(numer.iter().chain(denom.iter()));
        if denom.iter().find(|c| !c.is_zero()).unwrap().is_negative() {
            c = -c;
        }
        for v in numer.iter_mut().chain(denom.iter_mut()) {
            *v = &*v / &c;
        }
        let degree = (numer.len() - 1).max(denom.len() - 1);
        if degree <= 1 {
            return Err(Error::Degenerate(format!("degree {degree} is not greater than 1")));
        }
        numer = pad(&numer, degree + 1);
        denom = pad(&denom, degree + 1);
        Ok(RationalMap {
            numer,
            denom,
            degree,
            caps,
            iterates: RwLock::new(Vec::new()),
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn caps(&self) -> Caps {
        self.caps
    }

    /// Ascending integer coefficients of `P`.
    pub fn numer_coeffs(&self) -> Vec<BigInt> {
        zpoly_trim(self.numer.clone())
    }

    pub fn denom_coeffs(&self) -> Vec<BigInt> {
        zpoly_trim(self.denom.clone())
    }

    /// The homogeneous lift `(p, q)` as forms of degree `d`.
    pub fn forms(&self) -> (&[BigInt], &[BigInt]) {
        (&self.numer, &self.denom)
    }

    pub fn render(&self) -> String {
        let p = from_int(&self.numer_coeffs());
        let q = self.denom_coeffs();
        if q.len() == 1 {
            let c = BigRational::from_integer(q[0].clone());
            return p.scale(&(BigRational::one() / c)).render("x");
        }
        format!("({})/({})", p.render("x"), from_int(&q).render("x"))
    }

    /// `Res(p, q)` of the homogeneous lift.
    pub fn resultant(&self) -> BigInt {
        sylvester_resultant(&self.numer, &self.denom)
    }

    pub fn evaluate_homogeneous(&self, x: &BigInt, y: &BigInt) -> (BigInt, BigInt) {
        (eval_form(&self.numer, x, y), eval_form(&self.denom, x, y))
    }

    pub fn evaluate(&self, z: &ExtRational) -> ExtRational {
        let (x, y) = homogeneous(z);
        let (a, b) = self.evaluate_homogeneous(&x, &y);
        let g = a.gcd(&b);
        from_homogeneous(a / &g, b / g)
    }

    pub fn evaluate_n(&self, z: &ExtRational, n: u32) -> ExtRational {
        (0..n).fold(z.clone(), |acc, _| self.evaluate(&acc))
    }

    /// `(p_i, q_i)`, computed incrementally and cached.
    pub fn iterate(&self, i: u32) -> Result<Arc<IterateRep>> {
        if i == 0 {
            return Err(Error::invalid("iterate index must be at least 1"));
        }
        let deg = (self.degree as u64).checked_pow(i);
        if deg.is_none_or(|d| d > self.caps.max_iterate_degree) {
            return Err(Error::cap(format!(
                "iterate degree {}^{} exceeds {}",
                self.degree, i, self.caps.max_iterate_degree
            )));
        }
        if let Some(it) = self.iterates.read().unwrap().get(i as usize - 1) {
            return Ok(it.clone());
        }
        let mut cache = self.iterates.write().unwrap();
        while cache.len() < i as usize {
            let next = match cache.last() {
                None => IterateRep {
                    index: 1,
                    p: self.numer.clone(),
                    q: self.denom.clone(),
                },
                Some(prev) => IterateRep {
                    index: prev.index + 1,
                    p: form_compose(&self.numer, &prev.p, &prev.q),
                    q: form_compose(&self.denom, &prev.p, &prev.q),
                },
            };
            let digits = next.p.iter().chain(next.q.iter()).map(approx_digits).max().unwrap_or(0);
            if digits > self.caps.max_digits {
                return Err(Error::cap(format!(
                    "iterate {} has {} digit coefficients (limit {})",
                    next.index, digits, self.caps.max_digits
                )));
            }
            cache.push(Arc::new(next));
        }
        Ok(cache[i as usize - 1].clone())
    }

    /// Dehomogenized `(P_i, Q_i)` over ℚ.
    pub fn iterate_polys(&self, i: u32) -> Result<(QPoly, QPoly)> {
        let it = self.iterate(i)?;
        Ok((from_int(&it.numer_poly()), from_int(&it.denom_poly())))
    }

    /// Both good-reduction conditions at `p`: no common root of `P`, `Q`
    /// mod `p`, and none of `p(1, y)`, `q(1, y)` mod `p`.
    pub fn has_good_reduction(&self, p: &BigInt) -> bool {
        let affine = fp_gcd_degree(&self.numer, &self.denom, p);
        let rev_p: Vec<BigInt> = self.numer.iter().rev().cloned().collect();
        let rev_q: Vec<BigInt> = self.denom.iter().rev().cloned().collect();
        let at_inf = fp_gcd_degree(&rev_p, &rev_q, p);
        matches!(affine, Some(0)) && matches!(at_inf, Some(0))
    }

    pub fn bad_reduction_primes(&self, budget: u64) -> BadReduction {
        let r = self.resultant();
        let f = factor(&r, budget);
        let primes = f
            .primes()
            .filter(|p| !self.has_good_reduction(p))
            .cloned()
            .collect();
        BadReduction {
            resultant: r,
            primes,
            unresolved_cofactor: f.cofactor.clone(),
        }
    }

    fn check_good_prime(&self, p: &BigInt) -> Result<()> {
        if !is_probable_prime(p) {
            return Err(Error::NotPrime(p.to_string()));
        }
        if !self.has_good_reduction(p) {
            return Err(Error::BadReduction { prime: p.to_string() });
        }
        Ok(())
    }

    /// `r_p(z)`: the residue of `z` in `F_p ∪ {∞}`.
    pub fn reduce_point(z: &ExtRational, p: &BigInt) -> Residue {
        match z {
            Ext::Infinity => Ext::Infinity,
            Ext::Finite(r) => {
                if r.denom().is_multiple_of(p) {
                    Ext::Infinity
                } else {
                    Ext::Finite((r.numer() * fp_inv(r.denom(), p)).mod_floor(p))
                }
            }
        }
    }

    fn step_residue(&self, r: &Residue, p: &BigInt) -> Residue {
        let (x, y) = match r {
            Ext::Finite(a) => (a.clone(), BigInt::one()),
            Ext::Infinity => (BigInt::one(), BigInt::zero()),
        };
        let (a, b) = self.evaluate_homogeneous(&x, &y);
        let b = b.mod_floor(p);
        if b.is_zero() {
            debug_assert!(!a.mod_floor(p).is_zero());
            Ext::Infinity
        } else {
            Ext::Finite((a * fp_inv(&b, p)).mod_floor(p))
        }
    }

    /// `(φ(r_p(z)), r_p(φ(z)))`; equal whenever `p` is a good prime.
    pub fn reduce_and_step(&self, z: &ExtRational, p: &BigInt) -> Result<(Residue, Residue)> {
        self.check_good_prime(p)?;
        let left = self.step_residue(&Self::reduce_point(z, p), p);
        let right = Self::reduce_point(&self.evaluate(z), p);
        Ok((left, right))
    }

    pub fn residue_cycle(&self, z: &Residue, p: &BigInt) -> Result<ResidueCycle> {
        self.check_good_prime(p)?;
        if p.bits() > 40 {
            return Err(Error::cap(format!("residue orbits mod {p} are too long to walk")));
        }
        if let Ext::Finite(a) = z {
            if a.is_negative() || a >= p {
                return Err(Error::invalid(format!("{a} is not a residue mod {p}")));
            }
        }
        let mut seen: HashMap<Residue, u64> = HashMap::new();
        let mut cur = z.clone();
        let mut k = 0u64;
        loop {
            if let Some(&first) = seen.get(&cur) {
                return Ok(ResidueCycle {
                    prime: p.clone(),
                    start: z.to_string(),
                    tail_length: first,
                    period: k - first,
                });
            }
            seen.insert(cur.clone(), k);
            cur = self.step_residue(&cur, p);
            k += 1;
        }
    }

    /// True when `φ = c·x^d` or `φ = c·x^(-d)` literally.
    pub fn is_power_map(&self) -> bool {
        let monomial_at = |v: &[BigInt], k: usize| {
            v.iter().enumerate().all(|(i, c)| (i == k) != c.is_zero())
        };
        let d = self.degree;
        (monomial_at(&self.numer, d) && monomial_at(&self.denom, 0))
            || (monomial_at(&self.numer, 0) && monomial_at(&self.denom, d))
    }

    /// Number of distinct points of `φ^(-n)(β)` in `P^1(ℚ̄)`.
    pub fn preimage_count(&self, beta: &ExtRational, n: u32) -> Result<usize> {
        let it = self.iterate(n)?;
        let (a, b) = homogeneous(beta);
        let g: Vec<BigInt> = it
            .p
            .iter()
            .zip(it.q.iter())
            .map(|(pc, qc)| &b * pc - &a * qc)
            .collect();
        let total = g.len() - 1;
        let affine = zpoly_trim(g);
        let finite = from_int(&affine).squarefree_part().deg0();
        Ok(finite + usize::from(affine.len() - 1 < total))
    }

    /// `φ^(-2)(β) = {β}`.
    pub fn is_exceptional(&self, beta: &ExtRational) -> Result<bool> {
        Ok(self.preimage_count(beta, 2)? == 1 && &self.evaluate_n(beta, 2) == beta)
    }

    /// Multiplicities of the points of `φ^(-n)(0)`, by Yun decomposition of `P_n`.
    pub fn ramification_profile(&self, n: u32) -> Result<RamificationProfile> {
        let it = self.iterate(n)?;
        let total = it.form_degree();
        let pn = from_int(&it.numer_poly());
        let finite: Vec<MultiplicityClass> = pn
            .squarefree_decomposition()
            .into_iter()
            .enumerate()
            .filter(|(_, part)| !part.is_constant())
            .map(|(i, part)| MultiplicityClass {
                multiplicity: i + 1,
                count: part.deg0(),
                factor: part.render("x"),
            })
            .collect();
        let infinity_multiplicity = total - pn.deg0();
        let simple = finite
            .iter()
            .filter(|c| c.multiplicity == 1)
            .map(|c| c.count)
            .sum::<usize>()
            + usize::from(infinity_multiplicity == 1);
        Ok(RamificationProfile {
            level: n,
            total_degree: total as u64,
            finite,
            infinity_multiplicity,
            simple_root_count: simple,
        })
    }

    /// Compares each level's simple-root count with `threshold`
    /// (default `d + 2`). A level exceeding it is the witness.
    pub fn dynamical_ramification_verdict(&self, depth: u32, threshold: Option<usize>) -> Result<RamificationVerdict> {
        if depth == 0 {
            return Err(Error::invalid("depth must be at least 1"));
        }
        let threshold = threshold.unwrap_or(self.degree + 2);
        let mut counts = Vec::new();
        let mut verdict = None;
        for n in 1..=depth {
            let c = self.ramification_profile(n)?.simple_root_count;
            counts.push(c);
            if c > threshold && verdict.is_none() {
                verdict = Some(Verdict::NotDynamicallyRamified { witness: n });
            }
        }
        let verdict = verdict.unwrap_or(if counts.iter().all(|&c| c == 0) {
            Verdict::LikelyDynamicallyRamified
        } else {
            Verdict::Inconclusive
        });
        Ok(RamificationVerdict {
            verdict,
            depth,
            threshold,
            simple_root_counts: counts,
            heuristic: true,
        })
    }
}

// ---------------------------------------------------------------------------

/// A rational map with coefficients in ℚ(t), e.g. `x^2 + t`.
#[derive(Clone, PartialEq)]
pub struct FfMap {
    numer: Poly<FFElement>,
    denom: Poly<FFElement>,
    degree: usize,
}

impl fmt::Debug for FfMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FfMap({})", self.render())
    }
}

impl FfMap {
    pub fn parse(expr: &str) -> Result<Self> {
        let r = parse_ratfn::<FFElement>(expr, "x")?;
        let degree = r.degree();
        if degree <= 1 {
            return Err(Error::Degenerate(format!("degree {degree} is not greater than 1")));
        }
        let lc = r.denom.lc().unwrap().clone();
        let inv = FFElement::one() / lc;
        Ok(FfMap {
            numer: r.numer.scale(&inv),
            denom: r.denom.scale(&inv),
            degree,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn render(&self) -> String {
        if self.denom.is_constant() {
            self.numer.render("x")
        } else {
            format!("({})/({})", self.numer.render("x"), self.denom.render("x"))
        }
    }

    pub fn evaluate(&self, z: &Ext<FFElement>) -> Ext<FFElement> {
        match z {
            Ext::Finite(v) => {
                let b = self.denom.eval(v);
                if b.is_zero() {
                    Ext::Infinity
                } else {
                    Ext::Finite(self.numer.eval(v) / b)
                }
            }
            Ext::Infinity => {
                let (dp, dq) = (self.numer.deg0(), self.denom.deg0());
                match dp.cmp(&dq) {
                    std::cmp::Ordering::Greater => Ext::Infinity,
                    std::cmp::Ordering::Less => Ext::Finite(FFElement::zero()),
                    std::cmp::Ordering::Equal => Ext::Finite(
                        self.numer.lc().unwrap().clone() / self.denom.lc().unwrap().clone(),
                    ),
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::parse_ext_rational;
    use crate::poly::{int_poly, qpoly_from_ints};
    use proptest::prelude::*;

    fn m(s: &str) -> RationalMap {
        RationalMap::parse(s).unwrap()
    }

    fn z(s: &str) -> ExtRational {
        parse_ext_rational(s).unwrap()
    }

    fn big(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn parse_examples() {
        let f = m("x^2+1");
        assert_eq!((f.numer_coeffs(), f.denom_coeffs(), f.degree()), (int_poly(&[1, 0, 1]), int_poly(&[1]), 2));
        let f = m("1/x^2");
        assert_eq!((f.numer_coeffs(), f.denom_coeffs()), (int_poly(&[1]), int_poly(&[0, 0, 1])));
        assert!(matches!(
            RationalMap::parse("(x^2-1)/(x-1)"),
            Err(Error::CommonFactor { reduced_degree: 1, .. })
        ));
        assert!(matches!(RationalMap::parse("3x+1"), Err(Error::Degenerate(_))));
        assert!(matches!(RationalMap::parse("x^2/x"), Err(Error::CommonFactor { .. })));
        let f = m("x^2+1/2");
        assert_eq!((f.numer_coeffs(), f.denom_coeffs()), (int_poly(&[1, 0, 2]), int_poly(&[2])));
        let f = m("x^2/(-x-3)");
        assert_eq!(f.denom_coeffs(), int_poly(&[3, 1]));
        assert_eq!(f.numer_coeffs(), int_poly(&[0, 0, -1]));
    }

    #[test]
    fn render_round_trips() {
        for s in ["x^2+1", "1/x^2", "x^2+1/2", "(x^3-2*x)/(5*x^2+7)", "(x-1)^2", "-3x^2+x/4", "(x^2+1)/x"] {
            let f = m(s);
            assert_eq!(m(&f.render()), f, "{s} -> {}", f.render());
        }
        assert_eq!(m("x^2+1").render(), "x^2+1");
        assert_eq!(m("x^2/2").render(), "1/2*x^2");
    }

    #[test]
    fn iterate_examples() {
        let f = m("x^2+1");
        let (p2, q2) = f.iterate_polys(2).unwrap();
        assert_eq!((p2, q2), (qpoly_from_ints(&[2, 0, 2, 0, 1]), qpoly_from_ints(&[1])));
        let f = m("1/x^2");
        let (p2, q2) = f.iterate_polys(2).unwrap();
        assert_eq!((p2, q2), (qpoly_from_ints(&[0, 0, 0, 0, 1]), qpoly_from_ints(&[1])));
        let (p1, q1) = f.iterate_polys(1).unwrap();
        assert_eq!((p1, q1), (qpoly_from_ints(&[1]), qpoly_from_ints(&[0, 0, 1])));
        assert!(matches!(f.iterate(13), Err(Error::ResourceCap(_))));
        assert!(f.iterate(0).is_err());
    }

    #[test]
    fn evaluate_examples() {
        let f = m("x^2+1");
        assert_eq!(f.evaluate(&z("7")), z("50"));
        assert_eq!(f.evaluate(&z("inf")), z("inf"));
        assert_eq!(m("(x^2+1)/x").evaluate(&z("0")), z("inf"));
        assert_eq!(m("1/x^2").evaluate(&z("inf")), z("0"));
        assert_eq!(m("(2x^2+1)/(x^2+3)").evaluate(&z("inf")), z("2"));
        assert_eq!(f.evaluate(&z("3/5")), z("34/25"));
    }

    #[test]
    fn bad_reduction_examples() {
        let r = m("x^2+1").bad_reduction_primes(1000);
        assert_eq!(r.resultant.abs(), big(1));
        assert!(r.primes.is_empty());
        let r = m("x^2+1/2").bad_reduction_primes(1000);
        assert_eq!(r.resultant.abs(), big(16));
        assert_eq!(r.primes, vec![big(2)]);
        assert!(m("x^2").bad_reduction_primes(1000).primes.is_empty());
        // resultant divisors that are genuinely bad
        let r = m("(x^2+3)/(x+3)").bad_reduction_primes(1000);
        assert_eq!(r.resultant.abs(), big(12));
        assert_eq!(r.primes, vec![big(2), big(3)]);
    }

    #[test]
    fn reduce_and_step_examples() {
        let f = m("x^2+1");
        assert_eq!(f.reduce_and_step(&z("7"), &big(5)).unwrap(), (Ext::Finite(big(0)), Ext::Finite(big(0))));
        assert_eq!(f.reduce_and_step(&z("3/5"), &big(5)).unwrap(), (Ext::Infinity, Ext::Infinity));
        assert_eq!(m("x^2").reduce_and_step(&z("2"), &big(3)).unwrap(), (Ext::Finite(big(1)), Ext::Finite(big(1))));
        assert!(matches!(m("x^2+1/2").reduce_and_step(&z("1"), &big(2)), Err(Error::BadReduction { .. })));
        assert!(matches!(f.reduce_and_step(&z("1"), &big(9)), Err(Error::NotPrime(_))));
    }

    #[test]
    fn residue_cycle_examples() {
        let c = m("x^2+1").residue_cycle(&Ext::Finite(big(2)), &big(5)).unwrap();
        assert_eq!((c.tail_length, c.period), (0, 3));
        let c = m("x^2").residue_cycle(&Ext::Finite(big(3)), &big(7)).unwrap();
        assert_eq!((c.tail_length, c.period), (1, 2));
        let c = m("x^3-x+5").residue_cycle(&Ext::Infinity, &big(11)).unwrap();
        assert_eq!((c.tail_length, c.period), (0, 1));
    }

    #[test]
    fn power_maps() {
        assert!(m("3x^2").is_power_map());
        assert!(!m("x^2+1").is_power_map());
        assert!(m("5/x^3").is_power_map());
        assert!(!m("(x-1)^2").is_power_map());
        assert!(!m("x^3/(x+1)").is_power_map());
    }

    #[test]
    fn preimage_examples() {
        assert_eq!(m("x^2").preimage_count(&z("1"), 1).unwrap(), 2);
        assert_eq!(m("x^2").preimage_count(&z("0"), 3).unwrap(), 1);
        assert_eq!(m("x^2+1").preimage_count(&z("0"), 1).unwrap(), 2);
        // ∞ is the only preimage of 2 under (2x^2+1)/(x^2+3)
        assert_eq!(m("(2x^2+1)/(x^2+3)").preimage_count(&z("2"), 1).unwrap(), 1);
        assert!(m("x^2").is_exceptional(&z("0")).unwrap());
        assert!(m("x^2").is_exceptional(&z("inf")).unwrap());
        assert!(!m("x^2").is_exceptional(&z("1")).unwrap());
        assert!(!m("x^2+1").is_exceptional(&z("0")).unwrap());
    }

    #[test]
    fn ramification_examples() {
        let r = m("(x-1)^2").ramification_profile(1).unwrap();
        assert_eq!(r.finite.len(), 1);
        assert_eq!((r.finite[0].multiplicity, r.finite[0].count, r.simple_root_count), (2, 1, 0));
        assert_eq!(m("x^2+1").ramification_profile(2).unwrap().simple_root_count, 4);
        assert_eq!(m("x^2+1").ramification_profile(1).unwrap().simple_root_count, 2);
        let r = m("1/x^2").ramification_profile(1).unwrap();
        assert_eq!((r.infinity_multiplicity, r.simple_root_count), (2, 0));
        let r = m("x/(x^2+1)").ramification_profile(1).unwrap();
        assert_eq!((r.infinity_multiplicity, r.simple_root_count), (1, 2));
    }

    #[test]
    fn dynamical_ramification_examples() {
        let v = m("(x-1)^2").dynamical_ramification_verdict(3, None).unwrap();
        assert_eq!(v.verdict, Verdict::LikelyDynamicallyRamified);
        let v = m("x^2+1").dynamical_ramification_verdict(3, None).unwrap();
        assert_eq!(v.verdict, Verdict::NotDynamicallyRamified { witness: 3 });
        assert_eq!(v.simple_root_counts, vec![2, 4, 8]);
        let v = m("x^2").dynamical_ramification_verdict(2, None).unwrap();
        assert_eq!(v.verdict, Verdict::LikelyDynamicallyRamified);
        let v = m("x^2+1").dynamical_ramification_verdict(2, None).unwrap();
        assert_eq!(v.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn function_field_maps() {
        let f = FfMap::parse("x^2+t").unwrap();
        let t = Ext::Finite(FFElement::t());
        let v = f.evaluate(&t);
        assert_eq!(v, Ext::Finite(FFElement::from_poly(qpoly_from_ints(&[0, 1, 1]))));
        assert_eq!(f.evaluate(&Ext::Infinity), Ext::Infinity);
        assert!(FfMap::parse("t*x+1").is_err());
        let g = FfMap::parse("1/(x^2-t)").unwrap();
        assert_eq!(g.evaluate(&Ext::Infinity), Ext::Finite(FFElement::zero()));
    }

    fn small_map() -> impl Strategy<Value = RationalMap> {
        (2usize..=3, prop::collection::vec(-9i64..=9, 8))
            .prop_filter_map("degenerate", |(d, c)| {
                let p = int_poly(&c[..=d]);
                let q = int_poly(&c[4..4 + d + 1 - (c[7].unsigned_abs() as usize % d)]);
                RationalMap::from_coeffs(p, q).ok()
            })
    }

    fn small_point() -> impl Strategy<Value = ExtRational> {
        prop_oneof![
            1 => Just(Ext::Infinity),
            9 => (-20i64..=20, 1i64..=20).prop_map(|(a, b)| ExtRational::from_frac(a, b)),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]

        #[test]
        fn iterates_agree_with_repeated_evaluation(f in small_map(), z0 in small_point()) {
            prop_assert!(!f.resultant().is_zero());
            for n in 1..=4u32 {
                let it = f.iterate(n).unwrap();
                let (x, y) = homogeneous(&z0);
                let a = eval_form(&it.p, &x, &y);
                let b = eval_form(&it.q, &x, &y);
                let g = a.gcd(&b);
                prop_assert_eq!(from_homogeneous(a / &g, b / g), f.evaluate_n(&z0, n));
            }
        }

        #[test]
        fn multiplicities_sum_to_degree(f in small_map(), n in 1u32..=3) {
            let r = f.ramification_profile(n).unwrap();
            prop_assert_eq!(r.multiplicity_sum(), (f.degree() as u64).pow(n));
            let simple = r.finite.iter().filter(|c| c.multiplicity == 1).map(|c| c.count).sum::<usize>()
                + usize::from(r.infinity_multiplicity == 1);
            prop_assert_eq!(simple, r.simple_root_count);
        }

        #[test]
        fn preimage_bounds(f in small_map(), beta in small_point()) {
            let d = f.degree();
            let c3 = f.preimage_count(&beta, 3).unwrap();
            prop_assert!(c3 <= d.pow(3));
            if !f.is_exceptional(&beta).unwrap() {
                prop_assert!(c3 >= 2);
            }
        }
    }

    #[test]
    fn reduction_commutes_exhaustively() {
        let corpus = ["x^2+1", "x^2-1", "(x-1)^2", "x^2+1/2", "(x^2+3)/(x+3)", "x^3-x+5", "1/x^2", "(2x^2+1)/(x^2+3)"];
        let primes: Vec<BigInt> = (2..100).filter(|&n: &i64| (2..n).all(|d| n % d != 0)).map(big).collect();
        for s in corpus {
            let f = m(s);
            for p in &primes {
                if !f.has_good_reduction(p) {
                    continue;
                }
                let pi: i64 = p.try_into().unwrap();
                let mut points: Vec<ExtRational> = vec![Ext::Infinity, ExtRational::from_frac(1, pi)];
                for a in 0..pi {
                    points.push(ExtRational::from_int(a));
                    points.push(ExtRational::from_int(a + pi));
                    points.push(ExtRational::from_frac(a, pi + 1));
                }
                for z0 in &points {
                    let (l, r) = f.reduce_and_step(z0, p).unwrap();
                    assert_eq!(l, r, "{s} at {z0} mod {p}");
                }
            }
        }
    }
}
