//! Discriminants of iterates of `f_a = x² + a` and certificates for a
//! maximal index `[Ω_{n+1,a} : Ω_{n,a}] = 2^{2^n}` in the iterated tower.
//!
//! A level-`n` prime certificate is an odd prime `p` with
//! `v_p(f^{n+1}(0)) = 1` and `p ∤ f^m(0)` for `1 ≤ m ≤ n`. Then `f^{n+1}(0)`
//! is not a square in `Ω_{n,a}`, which is unramified at `p`. Two sound base
//! cases are also accepted: at level 0, `-a` not a square; at level 1,
//! `f²(0)` outside `ℚ*² ∪ (-a)ℚ*²`, the rationals that are squares in `ℚ(√-a)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::is_perfect_square;
use crate::error::{Error, Result};
use crate::places_q::{factor, int_valuation, strip_shared};
use crate::poly::{sylvester_resultant, zpoly_derivative, zpoly_mul, zpoly_trim};

/// Largest iterate exponent `m` accepted by the discriminant check.
pub const MAX_DISC_LEVEL: u32 = 6;
/// Largest critical value the tower will hold in memory.
pub const MAX_TOWER_BITS: u64 = 1 << 20;
/// Larger stripped critical values are not handed to the factorer.
pub const MAX_CERTIFICATE_BITS: u64 = 4096;

/// `(-1)^{d(d-1)/2} Res(g, g') / lc(g)` for ascending integer coefficients.
pub fn discriminant(g: &[BigInt]) -> Result<BigRational> {
    let g = zpoly_trim(g.to_vec());
    let d = g.len().saturating_sub(1);
    if d == 0 {
        return Err(Error::invalid("discriminant of a constant"));
    }
    let res = sylvester_resultant(&g, &zpoly_derivative(&g));
    let sign = if (d * (d - 1) / 2) % 2 == 0 { 1 } else { -1 };
    Ok(BigRational::new(res * sign, g[d].clone()))
}

/// Ascending coefficients of `f_a^m`.
pub fn iterate_poly(a: &BigInt, m: u32) -> Vec<BigInt> {
    let mut g = vec![BigInt::zero(), BigInt::one()];
    for _ in 0..m {
        let mut sq = zpoly_mul(&g, &g);
        sq[0] += a;
        g = sq;
    }
    g
}

/// `f_a^k(0)` for `k = 0..=len-1`.
pub fn critical_orbit(a: &BigInt, len: u32) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero()];
    for _ in 1..=len {
        let last = out.last().unwrap();
        out.push(last * last + a);
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscRecursion {
    #[serde(with = "crate::arith::bigint_dec")]
    pub a: BigInt,
    pub m: u32,
    /// `Disc f^m`, computed from the expanded iterate.
    pub lhs: String,
    /// `2^{2^m} · Disc f^{m-1} · f^m(0)`; at `m = 1`, the direct `Disc f`.
    pub rhs: String,
    pub holds: bool,
    /// `2^{2^m} · (Disc f^{m-1})² · f^m(0)`.
    pub squared_rhs: String,
    pub squared_holds: bool,
    pub base_case: bool,
}

pub fn disc_recursion_check(a: &BigInt, m: u32) -> Result<DiscRecursion> {
    if m == 0 {
        return Err(Error::invalid("level m must be at least 1"));
    }
    if m > MAX_DISC_LEVEL {
        return Err(Error::cap(format!("level {m} exceeds the cap {MAX_DISC_LEVEL}")));
    }
    let lhs = discriminant(&iterate_poly(a, m))?;
    let (rhs, squared) = if m == 1 {
        let direct = discriminant(&[a.clone(), BigInt::zero(), BigInt::one()])?;
        (direct.clone(), direct)
    } else {
        let prev = discriminant(&iterate_poly(a, m - 1))?;
        let crit = BigRational::from_integer(critical_orbit(a, m)[m as usize].clone());
        let two = BigRational::from_integer(BigInt::one() << (1usize << m));
        (&two * &prev * &crit, &two * &prev * &prev * &crit)
    };
    Ok(DiscRecursion {
        a: a.clone(),
        m,
        lhs: lhs.to_string(),
        rhs: rhs.to_string(),
        holds: lhs == rhs,
        squared_rhs: squared.to_string(),
        squared_holds: lhs == squared,
        base_case: m == 1,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TowerStatus {
    Certified,
    NoCertificateFound,
    Unresolved,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateKind {
    /// Odd prime dividing `f^{n+1}(0)` exactly once and no earlier `f^m(0)`.
    Prime,
    /// Level 0: `-a` is not a square.
    NonSquare,
    /// Level 1: `f²(0) ∉ ℚ*² ∪ (-a)ℚ*²`.
    NonSquareClass,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaloisTowerRecord {
    #[serde(with = "crate::arith::bigint_dec")]
    pub a: BigInt,
    pub n: u32,
    /// `f^{n+1}(0)`.
    #[serde(with = "crate::arith::bigint_dec")]
    pub critical_value: BigInt,
    #[serde(with = "crate::arith::opt_bigint_dec")]
    pub certificate: Option<BigInt>,
    pub certificate_kind: Option<CertificateKind>,
    pub status: TowerStatus,
}

fn check_admissible(a: &BigInt, n: u32) -> Result<Vec<BigInt>> {
    if a.is_zero() {
        return Err(Error::invalid("a must be nonzero"));
    }
    // a repeat among f^k(0) shows up within three steps for every integer a
    let len = (n + 1).max(3);
    let mut orbit = vec![BigInt::zero()];
    for k in 1..=len {
        let last = orbit.last().unwrap();
        if 2 * last.bits() > MAX_TOWER_BITS {
            return Err(Error::cap(format!("f^{k}(0) would exceed {MAX_TOWER_BITS} bits")));
        }
        orbit.push(last * last + a);
    }
    for (k, v) in orbit.iter().enumerate().skip(1) {
        if orbit[..k].contains(v) {
            let sign = if a.is_negative() { '-' } else { '+' };
            return Err(Error::invalid(format!("0 is preperiodic under x^2 {sign} {}", a.abs())));
        }
    }
    Ok(orbit)
}

/// Literal check of the prime-certificate predicate at level `n`.
pub fn is_prime_certificate(orbit: &[BigInt], n: u32, p: &BigInt) -> bool {
    let two = BigInt::from(2);
    p != &two
        && int_valuation(&orbit[n as usize + 1], p) == 1
        && (1..=n as usize).all(|m| int_valuation(&orbit[m], p) == 0)
}

fn is_square_class(c: &BigInt, a: &BigInt) -> bool {
    // c ∈ ℚ*² ∪ (-a)ℚ*²  ⟺  c or -a·c is a nonzero square
    !c.is_zero() && (is_perfect_square(c) || is_perfect_square(&(-a * c)))
}

pub fn tower_certificate(a: &BigInt, n: u32, budget: u64) -> Result<GaloisTowerRecord> {
    let orbit = check_admissible(a, n)?;
    Ok(certificate_from_orbit(a, n, &orbit, budget))
}

fn certificate_from_orbit(a: &BigInt, n: u32, orbit: &[BigInt], budget: u64) -> GaloisTowerRecord {
    let target = &orbit[n as usize + 1];
    let mut rec = GaloisTowerRecord {
        a: a.clone(),
        n,
        critical_value: target.clone(),
        certificate: None,
        certificate_kind: None,
        status: TowerStatus::NoCertificateFound,
    };
    let earlier: Vec<BigInt> = orbit[1..=n as usize].iter().map(|v| v.abs()).collect();
    let fresh = strip_shared(&target.abs(), &earlier);
    let fact = (fresh.bits() <= MAX_CERTIFICATE_BITS).then(|| factor(&fresh, budget));
    let prime = fact
        .iter()
        .flat_map(|f| &f.prime_powers)
        .find(|pe| pe.exponent == 1 && pe.prime != BigInt::from(2))
        .map(|pe| pe.prime.clone());
    if let Some(p) = prime {
        debug_assert!(is_prime_certificate(orbit, n, &p));
        rec.certificate = Some(p);
        rec.certificate_kind = Some(CertificateKind::Prime);
        rec.status = TowerStatus::Certified;
        return rec;
    }
    let neg_a = -a;
    let base = match n {
        0 => (!is_perfect_square(&neg_a)).then_some(CertificateKind::NonSquare),
        1 if !is_perfect_square(&neg_a) && !is_square_class(target, a) => Some(CertificateKind::NonSquareClass),
        _ => None,
    };
    if let Some(kind) = base {
        rec.certificate_kind = Some(kind);
        rec.status = TowerStatus::Certified;
    } else if !fact.is_some_and(|f| f.is_complete()) {
        rec.status = TowerStatus::Unresolved;
    }
    rec
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TowerReport {
    #[serde(with = "crate::arith::bigint_dec")]
    pub a: BigInt,
    pub max_n: u32,
    pub records: Vec<GaloisTowerRecord>,
    /// `a > 0` with `a ≡ 1, 2 (mod 4)`: every level is known to be maximal.
    pub maximal_index_known: bool,
    pub notes: Vec<String>,
}

pub fn tower_report(a: &BigInt, max_n: u32, budget: u64) -> Result<TowerReport> {
    let orbit = check_admissible(a, max_n)?;
    let records: Vec<GaloisTowerRecord> = (0..=max_n)
        .into_par_iter()
        .map(|n| certificate_from_orbit(a, n, &orbit, budget))
        .collect();
    let r = a.mod_floor(&BigInt::from(4));
    let maximal_index_known = a.is_positive() && (r == BigInt::one() || r == BigInt::from(2));
    let mut notes = vec!["certificates are sufficient only: no_certificate_found does not bound the index".to_string()];
    if maximal_index_known {
        notes.push("a > 0 and a = 1, 2 mod 4: the index is maximal at every level".into());
    }
    Ok(TowerReport {
        a: a.clone(),
        max_n,
        records,
        maximal_index_known,
        notes,
    })
}
