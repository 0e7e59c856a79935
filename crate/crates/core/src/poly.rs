//! Dense univariate polynomials over an exact field, plus the integer
//! machinery (primitive remainder sequences, Sylvester resultants) that the
//! rest of the crate builds on.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::{gcd_all, lcm_all};

/// An exact field usable as a coefficient domain.
pub trait Field:
    Clone
    + PartialEq
    + fmt::Debug
    + Zero
    + One
    + Neg<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
    /// Monic gcd. The default is the plain Euclidean algorithm.
    fn poly_gcd(a: &Poly<Self>, b: &Poly<Self>) -> Poly<Self> {
        euclid_gcd(a, b)
    }

    /// Sign and magnitude text used when rendering polynomials; the
    /// magnitude is parenthesized whenever it is not atomic.
    fn render_coeff(&self) -> (bool, String);
}

impl Field for BigRational {
    fn poly_gcd(a: &Poly<Self>, b: &Poly<Self>) -> Poly<Self> {
        let za = to_primitive_int(a);
        let zb = to_primitive_int(b);
        let g = zpoly_gcd(&za, &zb);
        from_int(&g).monic()
    }

    fn render_coeff(&self) -> (bool, String) {
        (self.is_negative(), self.abs().to_string())
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly<K> {
    coeffs: Vec<K>,
}

pub type QPoly = Poly<BigRational>;

impl<K: Field> Poly<K> {
    /// Builds a polynomial from ascending coefficients, dropping trailing zeros.
    pub fn new(mut coeffs: Vec<K>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(K::one())
    }

    pub fn constant(c: K) -> Self {
        Self::new(vec![c])
    }

    pub fn x() -> Self {
        Self::monomial(K::one(), 1)
    }

    pub fn monomial(c: K, k: usize) -> Self {
        let mut v = vec![K::zero(); k + 1];
        v[k] = c;
        Self::new(v)
    }

    pub fn coeffs(&self) -> &[K] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> K {
        self.coeffs.get(i).cloned().unwrap_or_else(K::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial mapped to 0.
    pub fn deg0(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn lc(&self) -> Option<&K> {
        self.coeffs.last()
    }

    pub fn eval(&self, z: &K) -> K {
        self.coeffs
            .iter()
            .rev()
            .fold(K::zero(), |acc, c| acc * z.clone() + c.clone())
    }

    pub fn scale(&self, c: &K) -> Self {
        Self::new(self.coeffs.iter().map(|a| a.clone() * c.clone()).collect())
    }

    pub fn monic(&self) -> Self {
        match self.lc() {
            None => Self::zero(),
            Some(lc) => {
                let inv = K::one() / lc.clone();
                self.scale(&inv)
            }
        }
    }

    pub fn derivative(&self) -> Self {
        let mut out = Vec::with_capacity(self.coeffs.len().saturating_sub(1));
        let mut k = K::zero();
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                out.push(c.clone() * k.clone());
            }
            k = k + K::one();
        }
        Self::new(out)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by the zero polynomial");
        let lc_inv = K::one() / d.lc().unwrap().clone();
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut q = vec![K::zero(); r.len() - dd];
        for i in (0..q.len()).rev() {
            let c = r[i + dd].clone() * lc_inv.clone();
            if c.is_zero() {
                continue;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                r[i + j] = r[i + j].clone() - c.clone() * dc.clone();
            }
            q[i] = c;
        }
        r.truncate(dd);
        (Self::new(q), Self::new(r))
    }

    /// Quotient of an exact division; `None` if `d` does not divide `self`.
    pub fn checked_div(&self, d: &Self) -> Option<Self> {
        let (q, r) = self.div_rem(d);
        r.is_zero().then_some(q)
    }

    pub fn gcd(&self, other: &Self) -> Self {
        K::poly_gcd(self, other)
    }

    pub fn squarefree_part(&self) -> Self {
        let g = self.gcd(&self.derivative());
        self.checked_div(&g).expect("gcd divides").monic()
    }

    pub fn is_squarefree(&self) -> bool {
        self.gcd(&self.derivative()).is_constant()
    }

    /// Yun's decomposition: entry `i` is the monic product of the
    /// irreducible factors of multiplicity exactly `i + 1`.
    pub fn squarefree_decomposition(&self) -> Vec<Self> {
        let mut out = Vec::new();
        if self.is_constant() {
            return out;
        }
        let f = self.monic();
        let fp = f.derivative();
        let a0 = f.gcd(&fp);
        let mut b = f.checked_div(&a0).unwrap();
        let mut c = fp.checked_div(&a0).unwrap();
        let mut d = &c - &b.derivative();
        while !b.is_constant() {
            let a = b.gcd(&d);
            b = b.checked_div(&a).unwrap();
            c = d.checked_div(&a).unwrap();
            d = &c - &b.derivative();
            out.push(a.monic());
        }
        while out.last().is_some_and(|p| p.is_constant()) {
            out.pop();
        }
        out
    }

    pub fn map<L: Field>(&self, f: impl Fn(&K) -> L) -> Poly<L> {
        Poly::new(self.coeffs.iter().map(f).collect())
    }

    /// Canonical descending-degree text that the expression parser reads back.
    pub fn render(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let (neg, mag) = c.render_coeff();
            if s.is_empty() {
                if neg {
                    s.push('-');
                }
            } else {
                s.push(if neg { '-' } else { '+' });
            }
            let unit = mag == "1";
            match k {
                0 => s.push_str(&mag),
                _ => {
                    if !unit {
                        s.push_str(&mag);
                        s.push('*');
                    }
                    s.push_str(var);
                    if k > 1 {
                        s.push('^');
                        s.push_str(&k.to_string());
                    }
                }
            }
        }
        s
    }
}

impl<K: Field> fmt::Debug for Poly<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({})", self.render("x"))
    }
}

impl<'a, K: Field> Add for &'a Poly<K> {
    type Output = Poly<K>;
    fn add(self, o: Self) -> Poly<K> {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }
}

impl<'a, K: Field> Sub for &'a Poly<K> {
    type Output = Poly<K>;
    fn sub(self, o: Self) -> Poly<K> {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }
}

impl<'a, K: Field> Mul for &'a Poly<K> {
    type Output = Poly<K>;
    fn mul(self, o: Self) -> Poly<K> {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![K::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly::new(out)
    }
}

impl<K: Field> Neg for &Poly<K> {
    type Output = Poly<K>;
    fn neg(self) -> Poly<K> {
        Poly::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }
}

fn euclid_gcd<K: Field>(a: &Poly<K>, b: &Poly<K>) -> Poly<K> {
    let mut a = a.clone();
    let mut b = b.clone();
    while !b.is_zero() {
        let (_, r) = a.div_rem(&b);
        a = b;
        b = r;
    }
    a.monic()
}

// ---------------------------------------------------------------------------
// Integer polynomials (ascending coefficient vectors).

pub fn zpoly_trim(mut v: Vec<BigInt>) -> Vec<BigInt> {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    v
}

pub fn zpoly_content(v: &[BigInt]) -> BigInt {
    gcd_all(v)
}

/// Primitive part with positive leading coefficient.
pub fn zpoly_primitive(v: &[BigInt]) -> Vec<BigInt> {
    let v = zpoly_trim(v.to_vec());
    if v.is_empty() {
        return v;
    }
    let mut c = zpoly_content(&v);
    if v.last().unwrap().is_negative() {
        c = -c;
    }
    v.into_iter().map(|a| a / &c).collect()
}

/// Pseudo-remainder of `a` by `b` (both trimmed, `b` nonzero).
pub fn zpoly_prem(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let db = b.len() - 1;
    let lb = b[db].clone();
    let mut r = a.to_vec();
    while r.len() > db && !r.is_empty() {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        for c in r.iter_mut() {
            *c *= &lb;
        }
        for (j, bc) in b.iter().enumerate() {
            r[dr - db + j] -= &lr * bc;
        }
        r = zpoly_trim(r);
    }
    r
}

/// Primitive gcd of integer polynomials via the primitive PRS.
pub fn zpoly_gcd(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut a = zpoly_primitive(a);
    let mut b = zpoly_primitive(b);
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_empty() {
        let r = zpoly_prem(&a, &b);
        a = b;
        b = zpoly_primitive(&r);
    }
    a
}

pub fn to_primitive_int(p: &QPoly) -> Vec<BigInt> {
    let l = lcm_all(p.coeffs().iter().map(|c| c.denom()));
    let v: Vec<BigInt> = p
        .coeffs()
        .iter()
        .map(|c| (c * BigRational::from_integer(l.clone())).to_integer())
        .collect();
    zpoly_primitive(&v)
}

pub fn from_int(v: &[BigInt]) -> QPoly {
    Poly::new(
        v.iter()
            .map(|c| BigRational::from_integer(c.clone()))
            .collect(),
    )
}

pub fn zpoly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

pub fn zpoly_derivative(a: &[BigInt]) -> Vec<BigInt> {
    a.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigInt::from(i))
        .collect()
}

pub fn zpoly_eval(a: &[BigInt], z: &BigInt) -> BigInt {
    a.iter().rev().fold(BigInt::zero(), |acc, c| acc * z + c)
}

/// Bareiss fraction-free determinant.
pub fn det_bareiss(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// Sylvester resultant of `f` and `g` taken with formal degrees
/// `f.len() - 1` and `g.len() - 1` (leading zeros allowed, which gives the
/// resultant of the corresponding binary forms).
pub fn sylvester_resultant(f: &[BigInt], g: &[BigInt]) -> BigInt {
    assert!(!f.is_empty() && !g.is_empty());
    let m = f.len() - 1;
    let n = g.len() - 1;
    if m == 0 && n == 0 {
        return BigInt::one();
    }
    if m == 0 {
        return f[0].pow(n as u32);
    }
    if n == 0 {
        return g[0].pow(m as u32);
    }
    let size = m + n;
    let mut mat = vec![vec![BigInt::zero(); size]; size];
    // rows hold descending coefficients, shifted
    for i in 0..n {
        for (j, c) in f.iter().rev().enumerate() {
            mat[i][i + j] = c.clone();
        }
    }
    for i in 0..m {
        for (j, c) in g.iter().rev().enumerate() {
            mat[n + i][i + j] = c.clone();
        }
    }
    det_bareiss(mat)
}

pub fn int_poly(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&c| BigInt::from(c)).collect()
}

pub fn qpoly_from_ints(v: &[i64]) -> QPoly {
    from_int(&int_poly(v))
}

/// `(content, primitive)` of a rational polynomial: `p = content * primitive`
/// with `primitive` integral, primitive and positive-leading.
pub fn qpoly_integral_parts(p: &QPoly) -> (BigRational, Vec<BigInt>) {
    if p.is_zero() {
        return (BigRational::zero(), Vec::new());
    }
    let prim = to_primitive_int(p);
    let c = p.lc().unwrap() / BigRational::from_integer(prim.last().unwrap().clone());
    (c, prim)
}
