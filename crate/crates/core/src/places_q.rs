//! Place arithmetic for the rationals: budgeted factorization, p-adic
//! valuations, radical log-masses and gcd-free bases.
//!
//! Factorization is trial division up to [`TRIAL_BOUND`], then Miller–Rabin
//! and Brent's variant of Pollard rho. The witness set
//! `2, 3, …, 41` makes Miller–Rabin deterministic below 3.3·10²⁴; above that
//! eight more witnesses are drawn from a ChaCha stream seeded by the input,
//! so results are reproducible run to run. When the rho budget runs out the
//! remaining composite is returned as an unresolved cofactor instead of
//! failing.

use std::cmp::Ordering;
use std::sync::OnceLock;

use num_bigint::{BigInt, RandBigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::arith::{bigint_dec, is_perfect_square, opt_bigint_dec, ExactLog};
use crate::error::{Error, Result};

pub const TRIAL_BOUND: u32 = 10_000;

/// Rho iterations allowed per `factor` call unless overridden.
pub const DEFAULT_FACTOR_BUDGET: u64 = 2_000_000;

const MR_BASES: [u64; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];
const EXTRA_WITNESSES: usize = 8;

fn small_primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let n = TRIAL_BOUND as usize;
        let mut sieve = vec![true; n + 1];
        sieve[0] = false;
        sieve[1] = false;
        let mut i = 2;
        while i * i <= n {
            if sieve[i] {
                let mut j = i * i;
                while j <= n {
                    sieve[j] = false;
                    j += i;
                }
            }
            i += 1;
        }
        (2..=n).filter(|&k| sieve[k]).map(|k| k as u32).collect()
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimePower {
    #[serde(with = "bigint_dec")]
    pub prime: BigInt,
    pub exponent: u32,
}

/// `sign · Π pᵉ · cofactor`, with the cofactor present only when the
/// factoring budget ran out.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactoredValue {
    pub sign: i8,
    pub prime_powers: Vec<PrimePower>,
    #[serde(with = "opt_bigint_dec", default)]
    pub cofactor: Option<BigInt>,
}

impl FactoredValue {
    pub fn is_complete(&self) -> bool {
        self.cofactor.is_none()
    }

    pub fn reconstruct(&self) -> BigInt {
        let mut v = BigInt::from(self.sign);
        for pp in &self.prime_powers {
            v *= pp.prime.pow(pp.exponent);
        }
        if let Some(c) = &self.cofactor {
            v *= c;
        }
        v
    }

    pub fn primes(&self) -> impl Iterator<Item = &BigInt> {
        self.prime_powers.iter().map(|pp| &pp.prime)
    }

    pub fn exponent_of(&self, p: &BigInt) -> u32 {
        self.prime_powers
            .iter()
            .find(|pp| &pp.prime == p)
            .map_or(0, |pp| pp.exponent)
    }
}

// ---------------------------------------------------------------------------
// Primality

fn mulmod64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod64(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod64(r, b, m);
        }
        b = mulmod64(b, b, m);
        e >>= 1;
    }
    r
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &MR_BASES {
        let mut x = powmod64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mr_round(n: &BigInt, d: &BigInt, s: u32, a: &BigInt) -> bool {
    let n1 = n - 1u32;
    let mut x = a.modpow(d, n);
    if x.is_one() || x == n1 {
        return true;
    }
    for _ in 1..s {
        x = (&x * &x) % n;
        if x == n1 {
            return true;
        }
    }
    false
}

/// Miller–Rabin; deterministic below 3.3·10²⁴, probabilistic (with a
/// reproducible witness stream) above.
pub fn is_probable_prime(n: &BigInt) -> bool {
    if n.sign() != Sign::Plus {
        return false;
    }
    if let Some(v) = n.to_u64() {
        return is_prime_u64(v);
    }
    for &p in small_primes().iter().take(200) {
        if (n % p).is_zero() {
            return false;
        }
    }
    let n1: BigInt = n - 1u32;
    let s = n1.trailing_zeros().unwrap_or(0) as u32;
    let d = &n1 >> s;
    for &a in &MR_BASES {
        if !mr_round(n, &d, s, &BigInt::from(a)) {
            return false;
        }
    }
    let threshold: BigInt = "3317044064679887385961981".parse().unwrap();
    if n < &threshold {
        return true;
    }
    let mut rng = seeded_rng(n);
    let hi: BigInt = n - 2u32;
    for _ in 0..EXTRA_WITNESSES {
        let a = rng.gen_bigint_range(&BigInt::from(2), &hi);
        if !mr_round(n, &d, s, &a) {
            return false;
        }
    }
    true
}

fn seeded_rng(n: &BigInt) -> ChaCha8Rng {
    let digest = Sha256::digest(n.to_signed_bytes_le());
    let mut seed = [0u8; 32];
    seed.copy_from_slice(&digest[..32]);
    ChaCha8Rng::from_seed(seed)
}

// ---------------------------------------------------------------------------
// Pollard rho (Brent)

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn rho_u64(n: u64, budget: &mut u64) -> Option<u64> {
    if n % 2 == 0 {
        return Some(2);
    }
    for c in 1..u64::MAX {
        if *budget == 0 {
            return None;
        }
        let f = |x: u64| ((mulmod64(x, x, n) as u128 + c as u128) % n as u128) as u64;
        let (mut y, mut r, mut q, mut g) = (2u64, 1u64, 1u64, 1u64);
        let m = 128u64;
        let mut x = y;
        let mut ys = y;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                let steps = m.min(r - k);
                for _ in 0..steps {
                    y = f(y);
                    q = mulmod64(q, x.abs_diff(y), n);
                }
                *budget = budget.saturating_sub(steps);
                g = gcd_u64(q, n);
                k += m;
            }
            r *= 2;
            if *budget == 0 && g == 1 {
                return None;
            }
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd_u64(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return Some(g);
        }
    }
    None
}

fn rho_big(n: &BigInt, budget: &mut u64) -> Option<BigInt> {
    if n.is_even() {
        return Some(BigInt::from(2));
    }
    for c in 1u32.. {
        if *budget == 0 {
            return None;
        }
        let c = BigInt::from(c);
        let f = |x: &BigInt| (x * x + &c) % n;
        let mut y = BigInt::from(2);
        let mut r = 1u64;
        let mut q = BigInt::one();
        let mut g = BigInt::one();
        let m = 128u64;
        let mut x = y.clone();
        let mut ys = y.clone();
        while g.is_one() {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            while k < r && g.is_one() {
                ys = y.clone();
                let steps = m.min(r - k);
                for _ in 0..steps {
                    y = f(&y);
                    q = (q * (&x - &y).abs()) % n;
                }
                *budget = budget.saturating_sub(steps);
                g = q.gcd(n);
                k += m;
            }
            r *= 2;
            if *budget == 0 && g.is_one() {
                return None;
            }
        }
        if &g == n {
            loop {
                ys = f(&ys);
                g = (&x - &ys).abs().gcd(n);
                if !g.is_one() {
                    break;
                }
            }
        }
        if &g != n {
            return Some(g);
        }
    }
    None
}

fn split(n: &BigInt, budget: &mut u64) -> Option<BigInt> {
    match n.to_u64() {
        Some(v) => rho_u64(v, budget).map(BigInt::from),
        None => rho_big(n, budget),
    }
}

/// Factors a nonzero integer within `budget` rho iterations.
pub fn factor(n: &BigInt, budget: u64) -> FactoredValue {
    assert!(!n.is_zero(), "factor(0)");
    let sign = if n.is_negative() { -1 } else { 1 };
    let mut m = n.abs();
    let mut found: Vec<BigInt> = Vec::new();
    for &p in small_primes() {
        let pb = BigInt::from(p);
        if &pb * &pb > m {
            break;
        }
        while (&m % p).is_zero() {
            m /= p;
            found.push(pb.clone());
        }
    }
    let mut budget = budget;
    let mut unresolved = BigInt::one();
    let bound_sq = BigInt::from(TRIAL_BOUND) * BigInt::from(TRIAL_BOUND);
    let mut stack = vec![m];
    while let Some(c) = stack.pop() {
        if c.is_one() {
            continue;
        }
        if c < bound_sq || is_probable_prime(&c) {
            found.push(c);
            continue;
        }
        if is_perfect_square(&c) {
            let r = c.sqrt();
            stack.push(r.clone());
            stack.push(r);
            continue;
        }
        match split(&c, &mut budget) {
            Some(d) => {
                stack.push(&c / &d);
                stack.push(d);
            }
            None => unresolved *= c,
        }
    }
    found.sort();
    let mut prime_powers: Vec<PrimePower> = Vec::new();
    for p in found {
        match prime_powers.last_mut() {
            Some(pp) if pp.prime == p => pp.exponent += 1,
            _ => prime_powers.push(PrimePower { prime: p, exponent: 1 }),
        }
    }
    FactoredValue {
        sign,
        prime_powers,
        cofactor: (!unresolved.is_one()).then_some(unresolved),
    }
}

// ---------------------------------------------------------------------------
// Valuations and radicals

/// Exponent of `p` in a nonzero integer.
pub fn int_valuation(n: &BigInt, p: &BigInt) -> u64 {
    debug_assert!(!n.is_zero());
    let mut n = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// p-adic valuation of a nonzero rational.
pub fn valuation(r: &BigRational, p: &BigInt) -> Result<i64> {
    if r.is_zero() {
        return Err(Error::invalid("valuation of zero"));
    }
    if !is_probable_prime(p) {
        return Err(Error::NotPrime(p.to_string()));
    }
    Ok(int_valuation(r.numer(), p) as i64 - int_valuation(r.denom(), p) as i64)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadicalMass {
    pub value: f64,
    /// `log` of the product of the distinct resolved primes.
    pub exact: ExactLog,
    /// Set when an unresolved cofactor means the true mass is larger.
    pub lower_bound_only: bool,
}

/// Σ log p over the distinct resolved primes of a factorization.
pub fn radical_logmass(f: &FactoredValue) -> RadicalMass {
    let prod: BigInt = f.primes().fold(BigInt::one(), |acc, p| acc * p);
    let exact = ExactLog::of(prod.magnitude().clone());
    RadicalMass {
        value: f.primes().map(crate::arith::ln_bigint_abs).fold(0.0, |s, x| s + x),
        exact,
        lower_bound_only: !f.is_complete(),
    }
}

// ---------------------------------------------------------------------------
// gcd-free bases

/// Minimal interface a domain needs for gcd-stripping and coprime bases.
pub trait GcdDomain: Clone + PartialEq + std::fmt::Debug {
    fn gcd_with(&self, other: &Self) -> Self;
    fn is_unit(&self) -> bool;
    fn is_null(&self) -> bool;
    /// Canonical associate (absolute value, monic, ...).
    fn normalized(&self) -> Self;
    fn checked_div(&self, d: &Self) -> Option<Self>;
    fn canonical_cmp(&self, other: &Self) -> Ordering;
}

impl GcdDomain for BigInt {
    fn gcd_with(&self, other: &Self) -> Self {
        Integer::gcd(self, other)
    }
    fn is_unit(&self) -> bool {
        self.abs().is_one()
    }
    fn is_null(&self) -> bool {
        Zero::is_zero(self)
    }
    fn normalized(&self) -> Self {
        self.abs()
    }
    fn checked_div(&self, d: &Self) -> Option<Self> {
        let (q, r) = self.div_rem(d);
        r.is_zero().then_some(q)
    }
    fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.cmp(other)
    }
}

/// Removes from `target` every prime (or irreducible) it shares with any of
/// `earlier`, by repeated gcd division. No factorization is needed.
pub fn strip_shared<'a, T: GcdDomain + 'a>(
    target: &T,
    earlier: impl IntoIterator<Item = &'a T>,
) -> T {
    let mut x = target.normalized();
    for e in earlier {
        if e.is_null() {
            continue;
        }
        loop {
            let g = x.gcd_with(e);
            if g.is_unit() {
                break;
            }
            x = x.checked_div(&g).expect("gcd divides");
        }
    }
    x.normalized()
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoprimeBasis<T> {
    /// Pairwise coprime non-units in canonical order.
    pub elements: Vec<T>,
    /// `exponents[i][j]`: exponent of `elements[j]` in input `i`.
    pub exponents: Vec<Vec<u32>>,
    /// Unit left over in each input (the sign for integers).
    pub units: Vec<T>,
}

/// gcd-free basis of nonzero inputs by iterated gcd refinement.
pub fn coprime_basis<T: GcdDomain>(values: &[T]) -> Result<CoprimeBasis<T>> {
    if values.iter().any(GcdDomain::is_null) {
        return Err(Error::invalid("coprime basis of a list containing zero"));
    }
    let mut basis: Vec<T> = values
        .iter()
        .map(GcdDomain::normalized)
        .filter(|v| !v.is_unit())
        .collect();
    'refine: loop {
        for i in 0..basis.len() {
            for j in i + 1..basis.len() {
                if basis[i] == basis[j] {
                    basis.remove(j);
                    continue 'refine;
                }
                let g = basis[i].gcd_with(&basis[j]).normalized();
                if g.is_unit() {
                    continue;
                }
                let a = basis[i].checked_div(&g).unwrap().normalized();
                let b = basis[j].checked_div(&g).unwrap().normalized();
                basis.remove(j);
                basis.remove(i);
                basis.extend([a, b, g].into_iter().filter(|v| !v.is_unit()));
                continue 'refine;
            }
        }
        break;
    }
    basis.sort_by(|a, b| a.canonical_cmp(b));
    let mut exponents = Vec::with_capacity(values.len());
    let mut units = Vec::with_capacity(values.len());
    for v in values {
        let mut rest = v.clone();
        let mut row = Vec::with_capacity(basis.len());
        for b in &basis {
            let mut e = 0;
            while let Some(q) = rest.checked_div(b) {
                rest = q;
                e += 1;
            }
            row.push(e);
        }
        if !rest.is_unit() {
            return Err(Error::Invariant(format!(
                "coprime basis does not reconstruct {v:?}"
            )));
        }
        exponents.push(row);
        units.push(rest);
    }
    Ok(CoprimeBasis {
        elements: basis,
        exponents,
        units,
    })
}
