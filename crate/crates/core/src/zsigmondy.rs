//! Orbits, primitive and square-free primitive prime divisors, empirical
//! Zsigmondy sets, and the non-primitive mass diagnostic.
//!
//! A prime `p` is primitive for `φ^n(α)` when `p` divides its numerator and
//! no earlier numerator; denominators never matter. Primitive parts come
//! from gcd stripping, so only the stripped part is ever factored.

use std::collections::{BTreeSet, HashMap};
use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{approx_digits, ln_biguint, Ext, ExactLog, ExtRational};
use crate::error::{Error, Result};
use crate::heights::{classify_point, height_arg, log_height, Classification};
use crate::map::{FfMap, RamificationVerdict, RationalMap, Verdict};
use crate::places_q::{factor, int_valuation, is_probable_prime, strip_shared, FactoredValue, GcdDomain, DEFAULT_FACTOR_BUDGET};
use crate::places_qt::FFElement;
use crate::poly::{from_int, QPoly};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Termination {
    ReachedN,
    /// `φ^m(α) = 0`; later numerators share every prime with it.
    HitZero { m: u32 },
    /// A repeat was found and the remaining levels were filled periodically.
    Preperiodic { tail: u32, period: u32 },
    /// The value at level `n` was not computed.
    ResourceCap { n: u32 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Orbit<K> {
    /// `values[k]` is `φ^(k+1)(α)`.
    pub values: Vec<Ext<K>>,
    pub termination: Termination,
}

/// Generic orbit walk. `step(n, z)` must return `φ^n(α)` given
/// `z = φ^(n-1)(α)`; `oversized` stops the walk before a value that
/// would be too large to handle.
pub fn orbit_with<K: Clone + Eq + Hash + Zero>(
    alpha: &Ext<K>,
    max_n: u32,
    mut step: impl FnMut(u32, &Ext<K>) -> Ext<K>,
    oversized: impl Fn(&Ext<K>) -> bool,
) -> Orbit<K> {
    let mut seen: HashMap<Ext<K>, u32> = HashMap::from([(alpha.clone(), 0)]);
    let mut values: Vec<Ext<K>> = Vec::new();
    let mut cur = alpha.clone();
    for n in 1..=max_n {
        if oversized(&cur) {
            return Orbit {
                values,
                termination: Termination::ResourceCap { n },
            };
        }
        let next = step(n, &cur);
        if let Some(&first) = seen.get(&next) {
            let period = n - first;
            values.push(next);
            for k in n + 1..=max_n {
                let level = first + (k - first) % period;
                let v = if level == 0 { alpha.clone() } else { values[level as usize - 1].clone() };
                values.push(v);
            }
            return Orbit {
                values,
                termination: Termination::Preperiodic { tail: first, period },
            };
        }
        if next.is_zero() {
            values.push(next);
            return Orbit {
                values,
                termination: Termination::HitZero { m: n },
            };
        }
        seen.insert(next.clone(), n);
        values.push(next.clone());
        cur = next;
    }
    Orbit {
        values,
        termination: Termination::ReachedN,
    }
}

/// Default size cap for orbit values over ℚ, in decimal digits.
pub const DEFAULT_ORBIT_DIGITS: u64 = 200_000;

pub fn orbit(map: &RationalMap, alpha: &ExtRational, max_n: u32) -> Orbit<BigRational> {
    orbit_resuming(map, alpha, max_n, &[])
}

/// Like [`orbit`], taking already known values `φ^1(α), …, φ^k(α)` verbatim.
pub fn orbit_resuming(map: &RationalMap, alpha: &ExtRational, max_n: u32, known: &[ExtRational]) -> Orbit<BigRational> {
    let cap = map.caps().max_digits.min(DEFAULT_ORBIT_DIGITS);
    let d = map.degree() as u64;
    orbit_with(
        alpha,
        max_n,
        |n, z| match known.get(n as usize - 1) {
            Some(v) => v.clone(),
            None => map.evaluate(z),
        },
        |z| approx_digits(&height_arg(z)).saturating_mul(d) > cap,
    )
}

/// Numerator of a value with the convention `numerator(∞) = 1`, which
/// carries no primes.
fn numerator(z: &ExtRational) -> BigInt {
    match z {
        Ext::Finite(r) => r.numer().abs(),
        Ext::Infinity => BigInt::one(),
    }
}

fn strip_with_zero<T: GcdDomain>(target: &T, earlier: &[T]) -> T {
    if earlier.iter().any(GcdDomain::is_null) {
        return target.checked_div(target).expect("nonzero target");
    }
    strip_shared(target, earlier)
}

fn level_value<'a, K>(values: &'a [Ext<K>], n: u32) -> Result<&'a Ext<K>> {
    if n == 0 || n as usize > values.len() {
        return Err(Error::invalid(format!("level {n} is outside the computed orbit")));
    }
    Ok(&values[n as usize - 1])
}

/// `|numerator φ^n(α)|` stripped of every prime shared with an earlier
/// numerator. `n` has a primitive prime iff the result exceeds 1.
pub fn primitive_part(values: &[ExtRational], n: u32) -> Result<BigInt> {
    let z = level_value(values, n)?;
    match z {
        Ext::Infinity => Err(Error::invalid(format!("value at level {n} is infinity"))),
        Ext::Finite(r) if r.is_zero() => Err(Error::invalid(format!("value at level {n} is zero"))),
        Ext::Finite(r) => {
            let earlier: Vec<BigInt> = values[..n as usize - 1].iter().map(numerator).collect();
            Ok(strip_with_zero(&r.numer().abs(), &earlier))
        }
    }
}

/// Definitional check: `v_p(φ^n) > 0` and `v_p(φ^m) ≤ 0` for all `m < n`.
pub fn is_primitive_prime(values: &[ExtRational], n: u32, p: &BigInt) -> bool {
    let positive = |z: &ExtRational| match z {
        Ext::Infinity => false,
        Ext::Finite(r) => r.is_zero() || int_valuation(r.numer(), p) > 0,
    };
    positive(&values[n as usize - 1]) && values[..n as usize - 1].iter().all(|z| !positive(z))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrimitivePrimes {
    #[serde(with = "crate::arith::vec_bigint_dec")]
    pub primes: Vec<BigInt>,
    pub factorization: FactoredValue,
    pub unresolved: bool,
}

fn primitive_primes_from(values: &[ExtRational], n: u32, pp: &BigInt, fact: FactoredValue) -> Result<PrimitivePrimes> {
    if &fact.reconstruct() != pp {
        return Err(Error::Invariant(format!("factorization of level {n} does not reconstruct")));
    }
    let primes: Vec<BigInt> = fact.primes().cloned().collect();
    for p in &primes {
        if !is_primitive_prime(values, n, p) {
            return Err(Error::Invariant(format!("{p} fails the primitivity check at level {n}")));
        }
    }
    Ok(PrimitivePrimes {
        primes,
        unresolved: !fact.is_complete(),
        factorization: fact,
    })
}

pub fn primitive_prime_factors(values: &[ExtRational], n: u32, budget: u64) -> Result<PrimitivePrimes> {
    let pp = primitive_part(values, n)?;
    primitive_primes_from(values, n, &pp, factor(&pp, budget))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SquarefreeVerdict {
    #[serde(with = "crate::arith::opt_bigint_dec")]
    pub prime: Option<BigInt>,
    pub unresolved: bool,
}

fn squarefree_from(pp: &PrimitivePrimes) -> SquarefreeVerdict {
    // the primitive part keeps full exponents of the primes it contains
    let prime = pp
        .factorization
        .prime_powers
        .iter()
        .find(|pe| pe.exponent == 1)
        .map(|pe| pe.prime.clone());
    SquarefreeVerdict {
        unresolved: prime.is_none() && pp.unresolved,
        prime,
    }
}

pub fn squarefree_primitive_prime(values: &[ExtRational], n: u32, budget: u64) -> Result<SquarefreeVerdict> {
    Ok(squarefree_from(&primitive_prime_factors(values, n, budget)?))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitRecord {
    pub n: u32,
    pub value: String,
    #[serde(with = "crate::arith::opt_bigint_dec")]
    pub numerator: Option<BigInt>,
    #[serde(with = "crate::arith::opt_bigint_dec")]
    pub primitive_part: Option<BigInt>,
    /// Factorization of the primitive part, when it was attempted.
    pub factorization: Option<FactoredValue>,
    #[serde(with = "crate::arith::vec_bigint_dec")]
    pub primitive_primes: Vec<BigInt>,
    #[serde(with = "crate::arith::opt_bigint_dec")]
    pub squarefree_primitive_prime: Option<BigInt>,
    pub has_primitive: bool,
    /// `None` when unresolved or beyond the square-free scan depth.
    pub has_squarefree_primitive: Option<bool>,
    pub unresolved: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hypotheses {
    pub power_map: bool,
    pub zero_in_orbit: Option<u32>,
    pub classification: Classification,
    pub dynamical_ramification: Option<RamificationVerdict>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZsigmondyReport {
    pub map: String,
    pub alpha: String,
    pub max_n: u32,
    pub squarefree_max_n: u32,
    pub records: Vec<OrbitRecord>,
    pub zsigmondy_set: Vec<u32>,
    pub squarefree_zsigmondy_set: Vec<u32>,
    pub squarefree_unresolved: Vec<u32>,
    pub termination: Termination,
    pub hypotheses: Hypotheses,
    pub warnings: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZsigmondyConfig {
    pub max_n: u32,
    pub squarefree_max_n: u32,
    pub budget: u64,
    pub ramification_depth: u32,
}

impl Default for ZsigmondyConfig {
    fn default() -> Self {
        ZsigmondyConfig {
            max_n: 12,
            squarefree_max_n: 7,
            budget: DEFAULT_FACTOR_BUDGET,
            ramification_depth: 3,
        }
    }
}

fn build_record(
    values: &[ExtRational],
    n: u32,
    cfg: &ZsigmondyConfig,
    known: Option<&FactoredValue>,
) -> Result<OrbitRecord> {
    let z = &values[n as usize - 1];
    let mut rec = OrbitRecord {
        n,
        value: z.to_string(),
        numerator: z.finite().map(|r| r.numer().abs()),
        primitive_part: None,
        factorization: None,
        primitive_primes: Vec::new(),
        squarefree_primitive_prime: None,
        has_primitive: false,
        has_squarefree_primitive: (n <= cfg.squarefree_max_n).then_some(false),
        unresolved: false,
    };
    if z.is_infinity() || z.is_zero() {
        return Ok(rec);
    }
    let pp = primitive_part(values, n)?;
    rec.has_primitive = !pp.is_one();
    if n <= cfg.squarefree_max_n {
        let fact = match known {
            Some(f) => f.clone(),
            None => factor(&pp, cfg.budget),
        };
        let prims = primitive_primes_from(values, n, &pp, fact)?;
        let sf = squarefree_from(&prims);
        rec.has_squarefree_primitive = if sf.unresolved { None } else { Some(sf.prime.is_some()) };
        rec.squarefree_primitive_prime = sf.prime;
        rec.unresolved = prims.unresolved;
        rec.primitive_primes = prims.primes;
        rec.factorization = Some(prims.factorization);
    }
    rec.primitive_part = Some(pp);
    Ok(rec)
}

pub fn zsigmondy_report(map: &RationalMap, alpha: &ExtRational, cfg: &ZsigmondyConfig) -> Result<ZsigmondyReport> {
    zsigmondy_report_resuming(map, alpha, cfg, &[], &HashMap::new())
}

/// Report computation reusing known orbit values and primitive-part
/// factorizations (from a validated cache).
pub fn zsigmondy_report_resuming(
    map: &RationalMap,
    alpha: &ExtRational,
    cfg: &ZsigmondyConfig,
    known_values: &[ExtRational],
    known_factors: &HashMap<u32, FactoredValue>,
) -> Result<ZsigmondyReport> {
    let orb = orbit_resuming(map, alpha, cfg.max_n, known_values);
    let values = &orb.values;
    let records: Vec<OrbitRecord> = (1..=values.len() as u32)
        .into_par_iter()
        .map(|n| build_record(values, n, cfg, known_factors.get(&n)))
        .collect::<Result<_>>()?;

    let zsigmondy_set = records.iter().filter(|r| !r.has_primitive).map(|r| r.n).collect();
    let squarefree_zsigmondy_set = records
        .iter()
        .filter(|r| r.has_squarefree_primitive == Some(false))
        .map(|r| r.n)
        .collect();
    let squarefree_unresolved = records
        .iter()
        .filter(|r| r.n <= cfg.squarefree_max_n && r.has_squarefree_primitive.is_none())
        .map(|r| r.n)
        .collect();

    let power_map = map.is_power_map();
    let zero_in_orbit = values.iter().position(|z| z.is_zero()).map(|i| i as u32 + 1);
    let classification = classify_point(map, alpha);
    let dynamical_ramification = map.dynamical_ramification_verdict(cfg.ramification_depth, None).ok();

    let mut warnings = Vec::new();
    if power_map {
        warnings.push("power map c*x^(+-d): primitive divisors are not expected; the Zsigmondy set may be infinite".to_string());
    }
    if let Some(m) = zero_in_orbit {
        warnings.push(format!("0 lies in the orbit (level {m}): no primitive primes can appear after it"));
    }
    if let Classification::Preperiodic { tail, period } = classification {
        warnings.push(format!("alpha is preperiodic (tail {tail}, period {period}): finitely many values"));
    }
    if let Some(v) = &dynamical_ramification {
        if v.verdict == Verdict::LikelyDynamicallyRamified {
            warnings.push(format!(
                "likely dynamically ramified (no unramified preimages of 0 up to depth {}): square-free primitive primes may not exist",
                v.depth
            ));
        }
    }
    if let Termination::ResourceCap { n } = orb.termination {
        warnings.push(format!("orbit values too large beyond level {}", n - 1));
    }

    Ok(ZsigmondyReport {
        map: map.render(),
        alpha: alpha.to_string(),
        max_n: cfg.max_n,
        squarefree_max_n: cfg.squarefree_max_n,
        records,
        zsigmondy_set,
        squarefree_zsigmondy_set,
        squarefree_unresolved,
        termination: orb.termination,
        hypotheses: Hypotheses {
            power_map,
            zero_in_orbit,
            classification,
            dynamical_ramification,
        },
        warnings,
    })
}

// ---------------------------------------------------------------------------
// non-primitive mass

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropOldRow {
    pub n: u32,
    /// Primes `p` with `v_p(φ^m α) > 0` and `v_p(F(φ^(n-i) α)) > 0` for some `m < n`.
    #[serde(with = "crate::arith::vec_bigint_dec")]
    pub z_primes: Vec<BigInt>,
    /// `Σ log p` over those primes; `None` when `F(φ^(n-i) α) = 0`.
    pub mass: Option<f64>,
    pub mass_exact: Option<ExactLog>,
    pub height: f64,
    pub ratio: Option<f64>,
    pub below_delta: Option<bool>,
    pub lower_bound_only: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropOldHypotheses {
    /// `gcd(F, P_l)` is constant for `0 ≤ l < i`, with `P_0 = x`.
    pub roots_avoid_zero_before_level: bool,
    /// `gcd(F, P_k - x Q_k)` is constant for `1 ≤ k ≤ periodic_screen_depth`.
    pub no_periodic_roots_detected: bool,
    pub periodic_screen_depth: u32,
    /// The screens are sound but incomplete.
    pub heuristic: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropOldReport {
    pub map: String,
    pub alpha: String,
    pub factor: String,
    pub level: u32,
    pub delta: f64,
    pub rows: Vec<PropOldRow>,
    /// `sup_n (mass - δ h(φ^n α))` over the rows with finite mass.
    pub empirical_constant: Option<f64>,
    pub hypotheses: PropOldHypotheses,
}

fn eval_rational(f: &[BigInt], z: &BigRational) -> BigRational {
    // F(a/b) = (Σ c_k a^k b^(D-k)) / b^D
    let deg = f.len().saturating_sub(1) as u32;
    let (a, b) = (z.numer(), z.denom());
    let mut acc = BigInt::zero();
    let mut bpow = BigInt::one();
    for c in f.iter().rev() {
        acc = acc * a + c * &bpow;
        bpow *= b;
    }
    BigRational::new(acc, b.pow(deg))
}

const PERIODIC_SCREEN_DEPTH: u32 = 4;

pub fn prop_old_diagnostic(
    map: &RationalMap,
    alpha: &ExtRational,
    f: &[BigInt],
    level: u32,
    max_n: u32,
    delta: f64,
    budget: u64,
) -> Result<PropOldReport> {
    if level == 0 {
        return Err(Error::invalid("level i must be at least 1"));
    }
    if !(delta > 0.0) {
        return Err(Error::invalid("delta must be positive"));
    }
    let fq = from_int(f);
    if fq.is_constant() {
        return Err(Error::invalid("F must be nonconstant"));
    }
    let (pi, _) = map.iterate_polys(level)?;
    if pi.checked_div(&fq).is_none() {
        return Err(Error::invalid(format!("F = {} does not divide P_{level}", fq.render("x"))));
    }

    let mut avoid_zero = fq.gcd(&QPoly::x()).is_constant();
    for l in 1..level {
        let (pl, _) = map.iterate_polys(l)?;
        avoid_zero &= fq.gcd(&pl).is_constant();
    }
    let mut screen_depth = 0;
    let mut no_periodic = true;
    for k in 1..=PERIODIC_SCREEN_DEPTH {
        let Ok((pk, qk)) = map.iterate_polys(k) else { break };
        screen_depth = k;
        let g = &pk - &(&qk * &QPoly::x());
        no_periodic &= g.is_zero() || fq.gcd(&g).is_constant();
    }

    let orb = orbit(map, alpha, max_n);
    let values = &orb.values;
    let at = |k: u32| -> ExtRational { if k == 0 { alpha.clone() } else { values[k as usize - 1].clone() } };

    let mut rows = Vec::new();
    for n in level.max(1)..=values.len() as u32 {
        let height = log_height(&at(n));
        let fz = match at(n - level) {
            Ext::Infinity => None,
            Ext::Finite(z) => Some(eval_rational(f, &z)),
        };
        let row = match fz {
            Some(v) if v.is_zero() => PropOldRow {
                n,
                z_primes: Vec::new(),
                mass: None,
                mass_exact: None,
                height,
                ratio: None,
                below_delta: None,
                lower_bound_only: false,
            },
            _ => {
                let a = fz.map(|v| v.numer().abs()).unwrap_or_else(BigInt::one);
                let mut primes = BTreeSet::new();
                let mut partial = false;
                for m in 1..n {
                    let g = match at(m) {
                        Ext::Infinity => BigInt::one(),
                        Ext::Finite(r) if r.is_zero() => a.clone(),
                        Ext::Finite(r) => a.gcd(r.numer()),
                    };
                    if g.is_one() {
                        continue;
                    }
                    let fv = factor(&g, budget);
                    partial |= !fv.is_complete();
                    primes.extend(fv.primes().cloned());
                }
                let prod: BigInt = primes.iter().product();
                let mass = primes.iter().map(|p| ln_biguint(p.magnitude())).fold(0.0, |s, x| s + x);
                let ratio = (height > 0.0).then(|| mass / height);
                PropOldRow {
                    n,
                    z_primes: primes.into_iter().collect(),
                    mass: Some(mass),
                    mass_exact: Some(ExactLog::of(prod.magnitude().clone())),
                    height,
                    ratio,
                    below_delta: ratio.map(|r| r < delta),
                    lower_bound_only: partial,
                }
            }
        };
        rows.push(row);
    }
    let empirical_constant = rows
        .iter()
        .filter_map(|r| r.mass.map(|m| m - delta * r.height))
        .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.max(v))));

    Ok(PropOldReport {
        map: map.render(),
        alpha: alpha.to_string(),
        factor: fq.render("x"),
        level,
        delta,
        rows,
        empirical_constant,
        hypotheses: PropOldHypotheses {
            roots_avoid_zero_before_level: avoid_zero,
            no_periodic_roots_detected: no_periodic,
            periodic_screen_depth: screen_depth,
            heuristic: true,
        },
    })
}

// ---------------------------------------------------------------------------
// ℚ(t)

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FfOrbitRecord {
    pub n: u32,
    pub value: String,
    pub numerator: Option<String>,
    pub primitive_part: Option<String>,
    pub primitive_degree: usize,
    /// The place at infinity is primitive at this level.
    pub infinite_place_primitive: bool,
    pub has_primitive: bool,
    pub has_squarefree_primitive: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FfZsigmondyReport {
    pub map: String,
    pub alpha: String,
    pub max_n: u32,
    pub records: Vec<FfOrbitRecord>,
    pub zsigmondy_set: Vec<u32>,
    pub squarefree_zsigmondy_set: Vec<u32>,
    pub termination: Termination,
}

/// Default degree cap for orbit values over ℚ(t).
pub const DEFAULT_FF_DEGREE_CAP: u64 = 4096;

pub fn ff_orbit(map: &FfMap, alpha: &Ext<FFElement>, max_n: u32) -> Orbit<FFElement> {
    let d = map.degree() as u64;
    orbit_with(
        alpha,
        max_n,
        |_, z| map.evaluate(z),
        |z| match z {
            Ext::Finite(f) => crate::places_qt::ff_height(f).saturating_mul(d) > DEFAULT_FF_DEGREE_CAP,
            Ext::Infinity => false,
        },
    )
}

fn v_inf(z: &Ext<FFElement>) -> Option<i64> {
    match z {
        Ext::Infinity => None,
        Ext::Finite(f) if f.is_zero() => None,
        Ext::Finite(f) => Some(f.denom().deg0() as i64 - f.numer().deg0() as i64),
    }
}

fn ff_numerator(z: &Ext<FFElement>) -> QPoly {
    match z {
        Ext::Finite(f) => f.numer().normalized(),
        Ext::Infinity => QPoly::one(),
    }
}

pub fn ff_zsigmondy_report(map: &FfMap, alpha: &Ext<FFElement>, max_n: u32) -> FfZsigmondyReport {
    let orb = ff_orbit(map, alpha, max_n);
    let values = &orb.values;
    let numers: Vec<QPoly> = values.iter().map(ff_numerator).collect();
    let records: Vec<FfOrbitRecord> = (1..=values.len())
        .into_par_iter()
        .map(|n| {
            let z = &values[n - 1];
            let mut rec = FfOrbitRecord {
                n: n as u32,
                value: match z {
                    Ext::Finite(f) => f.render(),
                    Ext::Infinity => "inf".into(),
                },
                numerator: None,
                primitive_part: None,
                primitive_degree: 0,
                infinite_place_primitive: false,
                has_primitive: false,
                has_squarefree_primitive: false,
            };
            if z.is_infinity() || z.is_zero() {
                return rec;
            }
            let numer = &numers[n - 1];
            let pp = strip_with_zero(numer, &numers[..n - 1]);
            let simple = numer.squarefree_decomposition().into_iter().next().unwrap_or_else(QPoly::one);
            let finite_sf = !pp.gcd(&simple).is_constant();
            let earlier_inf_ok = values[..n - 1].iter().all(|w| match w {
                Ext::Infinity => true,
                Ext::Finite(f) if f.is_zero() => false,
                w => v_inf(w).unwrap() <= 0,
            });
            let vi = v_inf(z).unwrap();
            rec.infinite_place_primitive = vi > 0 && earlier_inf_ok;
            rec.has_primitive = !pp.is_constant() || rec.infinite_place_primitive;
            rec.has_squarefree_primitive = finite_sf || (rec.infinite_place_primitive && vi == 1);
            rec.numerator = Some(numer.render("t"));
            rec.primitive_degree = pp.deg0();
            rec.primitive_part = Some(pp.render("t"));
            rec
        })
        .collect();
    FfZsigmondyReport {
        map: map.render(),
        alpha: match alpha {
            Ext::Finite(f) => f.render(),
            Ext::Infinity => "inf".into(),
        },
        max_n,
        zsigmondy_set: records.iter().filter(|r| !r.has_primitive).map(|r| r.n).collect(),
        squarefree_zsigmondy_set: records.iter().filter(|r| !r.has_squarefree_primitive).map(|r| r.n).collect(),
        records,
        termination: orb.termination,
    }
}

/// Primes listed as primitive must also be probable primes.
pub fn check_record_primes(rec: &OrbitRecord) -> bool {
    rec.primitive_primes.iter().all(is_probable_prime)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::parse_ext_rational;
    use crate::expr::parse_ff_element;
    use crate::poly::int_poly;

    fn m(s: &str) -> RationalMap {
        RationalMap::parse(s).unwrap()
    }

    fn z(s: &str) -> ExtRational {
        parse_ext_rational(s).unwrap()
    }

    fn ints(v: &[ExtRational]) -> Vec<String> {
        v.iter().map(|x| x.to_string()).collect()
    }

    fn big(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn orbit_examples() {
        let o = orbit(&m("x^2+1"), &z("1"), 5);
        assert_eq!(ints(&o.values), ["2", "5", "26", "677", "458330"]);
        assert_eq!(o.termination, Termination::ReachedN);
        let o = orbit(&m("x^2-1"), &z("0"), 4);
        assert_eq!(ints(&o.values), ["-1", "0", "-1", "0"]);
        assert_eq!(o.termination, Termination::Preperiodic { tail: 0, period: 2 });
        let o = orbit(&m("x^2"), &z("2"), 3);
        assert_eq!(ints(&o.values), ["4", "16", "256"]);
        let o = orbit(&m("x^2-2x"), &z("2"), 5);
        assert_eq!(o.termination, Termination::HitZero { m: 1 });
        let o = orbit(&m("x^2+1"), &z("inf"), 3);
        assert_eq!(o.termination, Termination::Preperiodic { tail: 0, period: 1 });
    }

    #[test]
    fn primitive_part_examples() {
        let v = orbit(&m("x^2+1"), &z("1"), 5).values;
        assert_eq!(primitive_part(&v, 3).unwrap(), big(13));
        assert_eq!(primitive_part(&v, 5).unwrap(), big(45833));
        let v2 = orbit(&m("x^2"), &z("2"), 3).values;
        assert_eq!(primitive_part(&v2, 2).unwrap(), big(1));
        let v3 = orbit(&m("x^2-1"), &z("0"), 4).values;
        assert!(primitive_part(&v3, 2).is_err());
        assert_eq!(primitive_part(&v3, 3).unwrap(), big(1));
    }

    #[test]
    fn primitive_prime_examples() {
        let v = orbit(&m("x^2+1"), &z("1"), 5).values;
        assert_eq!(primitive_prime_factors(&v, 3, 1000).unwrap().primes, vec![big(13)]);
        assert_eq!(primitive_prime_factors(&v, 4, 1000).unwrap().primes, vec![big(677)]);
        let v2 = orbit(&m("x^2"), &z("2"), 3).values;
        assert!(primitive_prime_factors(&v2, 3, 1000).unwrap().primes.is_empty());
    }

    #[test]
    fn squarefree_examples() {
        let v = orbit(&m("x^2+1"), &z("1"), 5).values;
        assert_eq!(squarefree_primitive_prime(&v, 3, 1000).unwrap().prime, Some(big(13)));
        assert_eq!(squarefree_primitive_prime(&v, 2, 1000).unwrap().prime, Some(big(5)));
        let v2 = orbit(&m("(x-1)^2"), &z("3"), 3).values;
        assert_eq!(ints(&v2), ["4", "9", "64"]);
        let s = squarefree_primitive_prime(&v2, 2, 1000).unwrap();
        assert_eq!((s.prime, s.unresolved), (None, false));
    }

    #[test]
    fn report_examples() {
        let cfg = ZsigmondyConfig {
            max_n: 6,
            squarefree_max_n: 6,
            ..Default::default()
        };
        let r = zsigmondy_report(&m("x^2"), &z("2"), &cfg).unwrap();
        assert_eq!(r.zsigmondy_set, vec![2, 3, 4, 5, 6]);
        assert!(r.hypotheses.power_map);
        assert!(r.warnings.iter().any(|w| w.contains("power map")));
        let r = zsigmondy_report(&m("(x-1)^2"), &z("3"), &cfg).unwrap();
        assert_eq!(r.squarefree_zsigmondy_set, vec![1, 2, 3, 4, 5, 6]);
        assert!(r.warnings.iter().any(|w| w.contains("dynamically ramified")));
        for rec in &r.records {
            assert!(rec.has_squarefree_primitive != Some(true) || rec.has_primitive);
        }
    }

    #[test]
    fn prop_old_examples() {
        let f = int_poly(&[1, 0, 1]);
        let r = prop_old_diagnostic(&m("x^2+1"), &z("1"), &f, 1, 5, 0.125, 10_000).unwrap();
        let row = |n: u32| r.rows.iter().find(|x| x.n == n).unwrap();
        assert_eq!(row(3).z_primes, vec![big(2)]);
        assert_eq!(row(3).mass_exact.as_ref().unwrap().arg, 2u32.into());
        assert!(row(2).z_primes.is_empty());
        assert_eq!(row(2).mass, Some(0.0));
        assert_eq!(row(1).mass, Some(0.0));
        assert_eq!(row(5).z_primes, vec![big(2), big(5)]);
        assert!(r.hypotheses.roots_avoid_zero_before_level);
        assert!(r.hypotheses.no_periodic_roots_detected);
        assert!(prop_old_diagnostic(&m("x^2+1"), &z("1"), &int_poly(&[1, 1]), 1, 5, 0.125, 10).is_err());
    }

    #[test]
    fn prop_old_z_set_matches_definition() {
        let f = int_poly(&[1, 0, 1]);
        let map = m("x^2+1");
        let r = prop_old_diagnostic(&map, &z("1"), &f, 1, 8, 0.125, 100_000).unwrap();
        let v = orbit(&map, &z("1"), 8).values;
        for row in &r.rows {
            let n = row.n as usize;
            let base = if n == 1 { BigRational::one() } else { v[n - 2].finite().unwrap().clone() };
            let fz = eval_rational(&f, &base).numer().abs();
            let mut expect = BTreeSet::new();
            for p in factor(&fz, 100_000).primes() {
                if (1..n).any(|k| int_valuation(v[k - 1].finite().unwrap().numer(), p) > 0) {
                    expect.insert(p.clone());
                }
            }
            assert_eq!(row.z_primes, expect.into_iter().collect::<Vec<_>>(), "n = {n}");
        }
    }

    #[test]
    fn function_field_detectors() {
        let f = FfMap::parse("x^2+t").unwrap();
        let alpha = Ext::Finite(parse_ff_element("t").unwrap());
        let r = ff_zsigmondy_report(&f, &alpha, 5);
        assert_eq!(r.records.len(), 5);
        assert_eq!(r.records[0].numerator.as_deref(), Some("t^2+t"));
        assert_eq!(r.records[1].primitive_part.as_deref(), Some("t^3+2*t^2+t+1"));
        assert!(r.zsigmondy_set.is_empty());
        // a power map over Q(t) has no primitive places after level 1
        let g = FfMap::parse("t*x^2").unwrap();
        let r = ff_zsigmondy_report(&g, &alpha, 4);
        assert_eq!(r.zsigmondy_set, vec![2, 3, 4]);
        // (x - t)^2: every value is a square, so nothing is square-free primitive
        let h = FfMap::parse("(x-t)^2").unwrap();
        let beta = Ext::Finite(parse_ff_element("t+1").unwrap());
        let r = ff_zsigmondy_report(&h, &beta, 4);
        assert_eq!(r.squarefree_zsigmondy_set, vec![1, 2, 3, 4]);
    }

    #[test]
    fn infinite_place_primitive() {
        // 1/x^2 + t sends t to 1/t^2 + t, then the orbit alternates degrees
        let f = FfMap::parse("1/x^2").unwrap();
        let alpha = Ext::Finite(parse_ff_element("t").unwrap());
        let r = ff_zsigmondy_report(&f, &alpha, 3);
        assert!(r.records[0].infinite_place_primitive);
        assert!(r.records[0].has_squarefree_primitive == false);
    }
}
