//! Place arithmetic for the rational function field ℚ(t).
//!
//! Places are monic irreducibles of ℚ[t] plus the place at infinity, with
//! `N_𝔭 = deg 𝔭` and `N_∞ = 1`. Nothing here factors polynomials into
//! irreducibles; radicals and place sums go through squarefree parts and
//! Yun decompositions, which carry the same degree information.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::places_q::GcdDomain;
use crate::poly::{Field, Poly, QPoly};

/// An element of ℚ(t) in lowest terms with monic denominator.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FFElement {
    numer: QPoly,
    denom: QPoly,
}

impl FFElement {
    pub fn new(numer: QPoly, denom: QPoly) -> Result<Self> {
        if denom.is_zero() {
            return Err(Error::invalid("zero denominator in Q(t)"));
        }
        Ok(Self::reduced(numer, denom))
    }

    fn reduced(numer: QPoly, denom: QPoly) -> Self {
        if numer.is_zero() {
            return FFElement {
                numer,
                denom: QPoly::one(),
            };
        }
        let g = numer.gcd(&denom);
        let n = numer.checked_div(&g).unwrap();
        let d = denom.checked_div(&g).unwrap();
        let lc = d.lc().unwrap().clone();
        FFElement {
            numer: n.scale(&(BigRational::one() / lc.clone())),
            denom: d.scale(&(BigRational::one() / lc)),
        }
    }

    pub fn from_poly(p: QPoly) -> Self {
        FFElement {
            numer: p,
            denom: QPoly::one(),
        }
    }

    pub fn from_rational(c: BigRational) -> Self {
        Self::from_poly(QPoly::constant(c))
    }

    pub fn t() -> Self {
        Self::from_poly(QPoly::x())
    }

    pub fn numer(&self) -> &QPoly {
        &self.numer
    }

    pub fn denom(&self) -> &QPoly {
        &self.denom
    }

    pub fn is_polynomial(&self) -> bool {
        self.denom.is_constant()
    }

    /// Constant in ℚ, if this element has degree zero.
    pub fn as_constant(&self) -> Option<BigRational> {
        (self.numer.is_constant() && self.denom.is_constant()).then(|| self.numer.coeff(0))
    }

    pub fn render(&self) -> String {
        if self.is_polynomial() {
            self.numer.render("t")
        } else {
            format!("({})/({})", self.numer.render("t"), self.denom.render("t"))
        }
    }
}

impl fmt::Debug for FFElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FF({})", self.render())
    }
}

impl fmt::Display for FFElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl Add for FFElement {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        if self.denom == o.denom {
            return Self::reduced(&self.numer + &o.numer, self.denom);
        }
        let n = &(&self.numer * &o.denom) + &(&o.numer * &self.denom);
        Self::reduced(n, &self.denom * &o.denom)
    }
}

impl Sub for FFElement {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Neg for FFElement {
    type Output = Self;
    fn neg(self) -> Self {
        FFElement {
            numer: -&self.numer,
            denom: self.denom,
        }
    }
}

impl Mul for FFElement {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Self::reduced(&self.numer * &o.numer, &self.denom * &o.denom)
    }
}

impl Div for FFElement {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        assert!(!o.numer.is_zero(), "division by zero in Q(t)");
        Self::reduced(&self.numer * &o.denom, &self.denom * &o.numer)
    }
}

impl Zero for FFElement {
    fn zero() -> Self {
        Self::from_poly(QPoly::zero())
    }
    fn is_zero(&self) -> bool {
        self.numer.is_zero()
    }
}

impl One for FFElement {
    fn one() -> Self {
        Self::from_poly(QPoly::one())
    }
}

impl Field for FFElement {
    fn render_coeff(&self) -> (bool, String) {
        if let Some(c) = self.as_constant() {
            return c.render_coeff();
        }
        (false, format!("({})", self.render()))
    }
}

impl GcdDomain for QPoly {
    fn gcd_with(&self, other: &Self) -> Self {
        Poly::gcd(self, other)
    }
    fn is_unit(&self) -> bool {
        self.degree() == Some(0)
    }
    fn is_null(&self) -> bool {
        Poly::is_zero(self)
    }
    fn normalized(&self) -> Self {
        self.monic()
    }
    fn checked_div(&self, d: &Self) -> Option<Self> {
        Poly::checked_div(self, d)
    }
    fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.render("t").cmp(&other.render("t")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FFPlace {
    /// A monic, nonconstant polynomial (irreducible when the caller says so).
    Finite(QPoly),
    Infinite,
}

impl FFPlace {
    pub fn finite(pi: QPoly) -> Result<Self> {
        if pi.is_constant() {
            return Err(Error::invalid("a place needs a nonconstant polynomial"));
        }
        if pi.lc() != Some(&BigRational::one()) {
            return Err(Error::invalid("place polynomial must be monic"));
        }
        Ok(FFPlace::Finite(pi))
    }

    /// `N_𝔭`: the degree of the residue field over ℚ.
    pub fn degree(&self) -> usize {
        match self {
            FFPlace::Finite(pi) => pi.deg0(),
            FFPlace::Infinite => 1,
        }
    }
}

fn poly_order(p: &QPoly, pi: &QPoly) -> i64 {
    let mut p = p.clone();
    let mut v = 0;
    while let Some(q) = p.checked_div(pi) {
        p = q;
        v += 1;
    }
    v
}

pub fn ff_valuation(f: &FFElement, place: &FFPlace) -> Result<i64> {
    if f.is_zero() {
        return Err(Error::invalid("valuation of zero"));
    }
    Ok(match place {
        FFPlace::Finite(pi) => poly_order(&f.numer, pi) - poly_order(&f.denom, pi),
        FFPlace::Infinite => f.denom.deg0() as i64 - f.numer.deg0() as i64,
    })
}

pub fn squarefree_part(g: &QPoly) -> Result<QPoly> {
    if g.is_zero() {
        return Err(Error::invalid("squarefree part of zero"));
    }
    Ok(g.squarefree_part())
}

/// Height of an element of ℚ(t): `max(deg numer, deg denom)`.
pub fn ff_height(f: &FFElement) -> u64 {
    if f.is_zero() {
        return 0;
    }
    f.numer.deg0().max(f.denom.deg0()) as u64
}

/// Σ over places of `mult · deg` for the zeros of a nonzero polynomial,
/// read off its Yun decomposition.
fn weighted_zero_degree(p: &QPoly) -> u64 {
    p.squarefree_decomposition()
        .iter()
        .enumerate()
        .map(|(i, part)| (i as u64 + 1) * part.deg0() as u64)
        .sum()
}

/// `-Σ min(v_𝔭(f), 0) N_𝔭` over all places including infinity.
pub fn ff_height_place_sum(f: &FFElement) -> u64 {
    if f.is_zero() {
        return 0;
    }
    let finite = weighted_zero_degree(&f.denom);
    let v_inf = f.denom.deg0() as i64 - f.numer.deg0() as i64;
    finite + (-v_inf).max(0) as u64
}

/// `Σ v_𝔭(f) N_𝔭` over all places; zero by the product formula.
pub fn ff_place_sum(f: &FFElement) -> i64 {
    assert!(!f.is_zero());
    let zeros = weighted_zero_degree(&f.numer) as i64;
    let poles = weighted_zero_degree(&f.denom) as i64;
    let v_inf = f.denom.deg0() as i64 - f.numer.deg0() as i64;
    zeros - poles + v_inf
}

/// Degree of the radical of a polynomial: number of distinct roots over ℚ̄.
pub fn rad_degree(g: &QPoly) -> usize {
    g.squarefree_part().deg0()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MasonReport {
    pub a: String,
    pub b: String,
    pub c: String,
    pub max_degree: usize,
    pub rad_degree: usize,
    /// `max_degree ≤ rad_degree − 1`.
    pub holds: bool,
    /// Equality in the inequality.
    pub tight: bool,
}

/// Checks `max(deg a, deg b, deg c) ≤ deg rad(abc) − 1` for `c = a + b`.
pub fn mason_check(a: &QPoly, b: &QPoly) -> Result<MasonReport> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::invalid("a and b must be nonzero"));
    }
    if !a.gcd(b).is_constant() {
        return Err(Error::invalid("a and b must be coprime"));
    }
    let c = a + b;
    if c.is_zero() {
        return Err(Error::invalid("c = a + b must be nonzero"));
    }
    if a.is_constant() && b.is_constant() && c.is_constant() {
        return Err(Error::invalid("a, b, c must not all be constant"));
    }
    let max_degree = a.deg0().max(b.deg0()).max(c.deg0());
    let rad = rad_degree(&(&(a * b) * &c));
    Ok(MasonReport {
        a: a.render("t"),
        b: b.render("t"),
        c: c.render("t"),
        max_degree,
        rad_degree: rad,
        holds: max_degree + 1 <= rad,
        tight: max_degree + 1 == rad,
    })
}
