//! Exact multivariate polynomials over ℚ and over the truncated rings
//! ℚ[ε]/(ε^m).
//!
//! A [`Poly`] knows its coefficient ring and its number of coordinates but not
//! the coordinate names; names are supplied when parsing or printing.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact rational number.
pub type Rational = BigRational;

/// Builds the rational `n/d`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Builds the integer `n` as a rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Order of a polynomial or ideal: a natural number or infinity (zero input).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Order {
    Finite(u32),
    Infinite,
}

impl Order {
    /// The finite value, if any.
    pub fn finite(self) -> Option<u32> {
        match self {
            Order::Finite(v) => Some(v),
            Order::Infinite => None,
        }
    }

    /// `self ≥ b` for a natural number `b`.
    pub fn at_least(self, b: u32) -> bool {
        match self {
            Order::Finite(v) => v >= b,
            Order::Infinite => true,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Order::Infinite)
    }

    /// Sum of orders, infinite if either is.
    pub fn plus(self, other: Order) -> Order {
        match (self, other) {
            (Order::Finite(a), Order::Finite(b)) => Order::Finite(a + b),
            _ => Order::Infinite,
        }
    }

    /// `k · self`.
    pub fn times(self, k: u32) -> Order {
        match self {
            Order::Finite(a) => Order::Finite(a * k),
            Order::Infinite if k == 0 => Order::Finite(0),
            Order::Infinite => Order::Infinite,
        }
    }

    /// `max(self − k, 0)`, the order after `k` applications of Δ.
    pub fn minus(self, k: u32) -> Order {
        match self {
            Order::Finite(a) => Order::Finite(a.saturating_sub(k)),
            Order::Infinite => Order::Infinite,
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(v) => write!(f, "{v}"),
            Order::Infinite => f.write_str("inf"),
        }
    }
}

/// Coefficient ring: ℚ (`parts = 1`) or ℚ[ε]/(ε^m) (`parts = m ≥ 2`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CoefRing {
    parts: usize,
}

impl CoefRing {
    pub const FIELD: CoefRing = CoefRing { parts: 1 };

    /// ℚ[ε]/(ε^m); `m` must be at least 2.
    pub fn artinian(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::Invalid(alloc::format!(
                "nilpotency index must be at least 2, got {m}"
            )));
        }
        Ok(CoefRing { parts: m })
    }

    pub fn is_field(self) -> bool {
        self.parts == 1
    }

    /// Number of ε-parts stored per coefficient.
    pub fn parts(self) -> usize {
        self.parts
    }

    /// `m` with ε^m = 0, or `None` in field mode.
    pub fn nilpotency_index(self) -> Option<usize> {
        if self.is_field() {
            None
        } else {
            Some(self.parts)
        }
    }
}

impl fmt::Display for CoefRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_field() {
            f.write_str("Q")
        } else {
            write!(f, "Q[eps]/(eps^{})", self.parts)
        }
    }
}

/// Element c₀ + c₁ε + … + c_{m−1}ε^{m−1} of a coefficient ring.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coef {
    parts: Vec<Rational>,
}

impl Coef {
    pub fn zero(ring: CoefRing) -> Self {
        Coef { parts: vec![Rational::zero(); ring.parts] }
    }

    pub fn one(ring: CoefRing) -> Self {
        Self::from_rational(ring, Rational::one())
    }

    pub fn from_rational(ring: CoefRing, r: Rational) -> Self {
        let mut c = Self::zero(ring);
        c.parts[0] = r;
        c
    }

    pub fn from_int(ring: CoefRing, n: i64) -> Self {
        Self::from_rational(ring, int(n))
    }

    /// ε^k (zero when k ≥ m).
    pub fn eps_pow(ring: CoefRing, k: usize) -> Self {
        let mut c = Self::zero(ring);
        if k < ring.parts {
            c.parts[k] = Rational::one();
        }
        c
    }

    /// Builds a coefficient from its ε-parts; missing parts are zero.
    pub fn from_parts(ring: CoefRing, parts: &[Rational]) -> Result<Self> {
        if parts.len() > ring.parts {
            return Err(Error::DimensionMismatch { expected: ring.parts, found: parts.len() });
        }
        let mut c = Self::zero(ring);
        for (k, p) in parts.iter().enumerate() {
            c.parts[k] = p.clone();
        }
        Ok(c)
    }

    pub fn parts(&self) -> &[Rational] {
        &self.parts
    }

    pub fn ring(&self) -> CoefRing {
        CoefRing { parts: self.parts.len() }
    }

    /// The residue c₀.
    pub fn constant_part(&self) -> &Rational {
        &self.parts[0]
    }

    pub fn is_zero(&self) -> bool {
        self.parts.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.parts[0].is_one() && self.parts[1..].iter().all(Zero::is_zero)
    }

    /// Units of ℚ[ε]/(ε^m) are the elements with c₀ ≠ 0.
    pub fn is_unit(&self) -> bool {
        !self.parts[0].is_zero()
    }

    /// ε-adic valuation: index of the first nonzero part.
    pub fn valuation(&self) -> Option<usize> {
        self.parts.iter().position(|p| !p.is_zero())
    }

    pub fn add(&self, other: &Coef) -> Coef {
        Coef { parts: self.parts.iter().zip(&other.parts).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &Coef) -> Coef {
        Coef { parts: self.parts.iter().zip(&other.parts).map(|(a, b)| a - b).collect() }
    }

    pub fn neg(&self) -> Coef {
        Coef { parts: self.parts.iter().map(|a| -a).collect() }
    }

    /// Product truncated at ε^m.
    pub fn mul(&self, other: &Coef) -> Coef {
        let m = self.parts.len();
        let mut out = vec![Rational::zero(); m];
        for (i, a) in self.parts.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.parts.iter().enumerate().take(m - i) {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        Coef { parts: out }
    }

    pub fn scale(&self, r: &Rational) -> Coef {
        Coef { parts: self.parts.iter().map(|a| a * r).collect() }
    }

    /// Inverse of a unit, by solving c·d = 1 part by part.
    pub fn inverse(&self) -> Option<Coef> {
        if !self.is_unit() {
            return None;
        }
        let m = self.parts.len();
        let inv0 = self.parts[0].recip();
        let mut d: Vec<Rational> = Vec::with_capacity(m);
        d.push(inv0.clone());
        for k in 1..m {
            let mut s = Rational::zero();
            for i in 1..=k {
                s += &self.parts[i] * &d[k - i];
            }
            d.push(-(s * &inv0));
        }
        Some(Coef { parts: d })
    }

    /// Keeps only the parts of ε-degree below `k`.
    pub fn truncated(&self, k: usize) -> Coef {
        Coef {
            parts: self
                .parts
                .iter()
                .enumerate()
                .map(|(i, p)| if i < k { p.clone() } else { Rational::zero() })
                .collect(),
        }
    }

    /// The residue c₀ as a field coefficient.
    pub fn fiber(&self) -> Coef {
        Coef { parts: vec![self.parts[0].clone()] }
    }
}

/// Exponent vector, one entry per chart coordinate, ordered graded
/// lexicographically (total degree first, then x₁ > x₂ > …).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Self {
        Monomial(exps)
    }

    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    /// x_i.
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Partial degree in the listed coordinates.
    pub fn degree_in(&self, coords: &[usize]) -> u32 {
        coords.iter().map(|&i| self.0[i]).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `other / self`, assuming divisibility.
    pub fn quotient_of(&self, other: &Monomial) -> Monomial {
        Monomial(other.0.iter().zip(&self.0).map(|(b, a)| b - a).collect())
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Multivariate polynomial with exact coefficients.
///
/// Zero coefficients are never stored, so structural equality is equality of
/// polynomials.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Poly {
    ring: CoefRing,
    nvars: usize,
    terms: BTreeMap<Monomial, Coef>,
}

impl Poly {
    pub fn zero(ring: CoefRing, nvars: usize) -> Self {
        Poly { ring, nvars, terms: BTreeMap::new() }
    }

    pub fn one(ring: CoefRing, nvars: usize) -> Self {
        Self::constant(ring, nvars, Coef::one(ring))
    }

    pub fn constant(ring: CoefRing, nvars: usize, c: Coef) -> Self {
        Self::term(ring, Monomial::one(nvars), c)
    }

    pub fn from_int(ring: CoefRing, nvars: usize, n: i64) -> Self {
        Self::constant(ring, nvars, Coef::from_int(ring, n))
    }

    /// The coordinate x_i.
    pub fn var(ring: CoefRing, nvars: usize, i: usize) -> Self {
        Self::term(ring, Monomial::var(nvars, i), Coef::one(ring))
    }

    /// A single term `c·m` (zero if `c = 0`).
    pub fn term(ring: CoefRing, m: Monomial, c: Coef) -> Self {
        let nvars = m.0.len();
        let mut p = Poly::zero(ring, nvars);
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    /// Monomial `x^exps` with coefficient one.
    pub fn monomial(ring: CoefRing, exps: &[u32]) -> Self {
        Self::term(ring, Monomial::new(exps.to_vec()), Coef::one(ring))
    }

    /// Builds a polynomial from (exponents, rational coefficient) pairs.
    pub fn from_rational_terms(ring: CoefRing, nvars: usize, terms: &[(Vec<u32>, Rational)]) -> Self {
        let mut p = Poly::zero(ring, nvars);
        for (e, c) in terms {
            p.add_term(Monomial::new(e.clone()), &Coef::from_rational(ring, c.clone()));
        }
        p
    }

    pub fn ring(&self) -> CoefRing {
        self.ring
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Coef)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Nonzero constant (possibly with nilpotent parts).
    pub fn is_constant(&self) -> bool {
        self.terms.len() == 1 && self.terms.keys().next().is_some_and(Monomial::is_one)
    }

    /// Constant with invertible value: generates the unit ideal.
    pub fn is_unit(&self) -> bool {
        self.is_constant() && self.terms.values().next().is_some_and(Coef::is_unit)
    }

    /// Total degree (`None` for zero).
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// Largest term in graded-lex order.
    pub fn leading_term(&self) -> Option<(&Monomial, &Coef)> {
        self.terms.iter().next_back()
    }

    /// Coefficient of a monomial (zero if absent).
    pub fn coefficient(&self, m: &Monomial) -> Coef {
        self.terms.get(m).cloned().unwrap_or_else(|| Coef::zero(self.ring))
    }

    /// Coordinates that occur with positive exponent.
    pub fn support_vars(&self) -> Vec<usize> {
        (0..self.nvars)
            .filter(|&i| self.terms.keys().any(|m| m.0[i] > 0))
            .collect()
    }

    fn add_term(&mut self, m: Monomial, c: &Coef) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                let s = existing.add(c);
                if s.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *existing = s;
                }
            }
            None => {
                self.terms.insert(m, c.clone());
            }
        }
    }

    fn check_compatible(&self, other: &Poly) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch);
        }
        if self.nvars != other.nvars {
            return Err(Error::DimensionMismatch { expected: self.nvars, found: other.nvars });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Poly) -> Result<Poly> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Poly) -> Result<Poly> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), &c.neg());
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Poly) -> Result<Poly> {
        self.check_compatible(other)?;
        let mut out = Poly::zero(self.ring, self.nvars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), &c1.mul(c2));
            }
        }
        Ok(out)
    }

    /// Sum; panics on ring or dimension mismatch (use `try_add` otherwise).
    pub fn add(&self, other: &Poly) -> Poly {
        self.try_add(other).expect("operands share ring and chart")
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.try_sub(other).expect("operands share ring and chart")
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        self.try_mul(other).expect("operands share ring and chart")
    }

    pub fn neg(&self) -> Poly {
        Poly {
            ring: self.ring,
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.neg())).collect(),
        }
    }

    /// Multiplication by a ring element.
    pub fn scale(&self, c: &Coef) -> Poly {
        let mut out = Poly::zero(self.ring, self.nvars);
        for (m, a) in &self.terms {
            out.add_term(m.clone(), &a.mul(c));
        }
        out
    }

    pub fn scale_rational(&self, r: &Rational) -> Poly {
        self.scale(&Coef::from_rational(self.ring, r.clone()))
    }

    /// Multiplication by the monomial `x^exps`.
    pub fn mul_monomial(&self, exps: &[u32]) -> Poly {
        let m = Monomial::new(exps.to_vec());
        Poly {
            ring: self.ring,
            nvars: self.nvars,
            terms: self.terms.iter().map(|(k, c)| (k.mul(&m), c.clone())).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut result = Poly::one(self.ring, self.nvars);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.nvars {
            return Err(Error::IndexOutOfRange { index: i, nvars: self.nvars });
        }
        Ok(())
    }

    fn check_point(&self, p: &[Rational]) -> Result<()> {
        if p.len() != self.nvars {
            return Err(Error::DimensionMismatch { expected: self.nvars, found: p.len() });
        }
        Ok(())
    }

    /// Formal partial derivative ∂/∂x_i.
    pub fn partial(&self, i: usize) -> Result<Poly> {
        self.check_index(i)?;
        let mut out = Poly::zero(self.ring, self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut exps = m.0.clone();
            exps[i] -= 1;
            out.add_term(Monomial(exps), &c.scale(&int(i64::from(e))));
        }
        Ok(out)
    }

    /// f(x + p), expanded exactly.
    pub fn translate(&self, p: &[Rational]) -> Result<Poly> {
        self.check_point(p)?;
        if p.iter().all(Zero::is_zero) {
            return Ok(self.clone());
        }
        let images: Vec<Poly> = (0..self.nvars)
            .map(|i| {
                Poly::var(self.ring, self.nvars, i)
                    .add(&Poly::constant(self.ring, self.nvars, Coef::from_rational(self.ring, p[i].clone())))
            })
            .collect();
        self.substitute(&images)
    }

    /// Lowest total degree of a term (`Infinite` for zero).
    pub fn order_at_origin(&self) -> Order {
        self.terms.keys().map(Monomial::degree).min().map_or(Order::Infinite, Order::Finite)
    }

    /// Order of vanishing at the rational point `p`.
    ///
    /// A coefficient with only nilpotent parts counts as nonzero.
    pub fn order_at_point(&self, p: &[Rational]) -> Result<Order> {
        Ok(self.translate(p)?.order_at_origin())
    }

    /// Minimum over terms of the partial degree in `coords`: the largest `m`
    /// with `f ∈ (x_c : c ∈ coords)^m`.
    pub fn order_along_coords(&self, coords: &[usize]) -> Order {
        self.terms
            .keys()
            .map(|m| m.degree_in(coords))
            .min()
            .map_or(Order::Infinite, Order::Finite)
    }

    /// Composition with per-coordinate images living in a common target chart.
    pub fn substitute(&self, images: &[Poly]) -> Result<Poly> {
        if images.len() != self.nvars {
            return Err(Error::DimensionMismatch { expected: self.nvars, found: images.len() });
        }
        let (ring, target_nvars) = match images.first() {
            Some(g) => (g.ring, g.nvars),
            None => (self.ring, 0),
        };
        if ring != self.ring {
            return Err(Error::RingMismatch);
        }
        for g in images {
            if g.ring != ring {
                return Err(Error::RingMismatch);
            }
            if g.nvars != target_nvars {
                return Err(Error::DimensionMismatch { expected: target_nvars, found: g.nvars });
            }
        }
        let mut powers: Vec<Vec<Poly>> = images
            .iter()
            .map(|g| vec![Poly::one(ring, target_nvars), g.clone()])
            .collect();
        let mut out = Poly::zero(ring, target_nvars);
        for (m, c) in &self.terms {
            let mut t = Poly::constant(ring, target_nvars, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let e = e as usize;
                while powers[i].len() <= e {
                    let next = powers[i].last().expect("nonempty").mul(&images[i]);
                    powers[i].push(next);
                }
                t = t.mul(&powers[i][e]);
                if t.is_zero() {
                    break;
                }
            }
            for (tm, tc) in t.terms {
                out.add_term(tm, &tc);
            }
        }
        Ok(out)
    }

    /// Drops every ε-part, returning a polynomial over the residue field.
    pub fn set_fiber(&self) -> Result<Poly> {
        if self.ring.is_field() {
            return Err(Error::NotArtinian);
        }
        let mut out = Poly::zero(CoefRing::FIELD, self.nvars);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), &c.fiber());
        }
        Ok(out)
    }

    /// Reads a field polynomial into the ring `ring` (ε-free lift).
    pub fn lift_to(&self, ring: CoefRing) -> Result<Poly> {
        if !self.ring.is_field() {
            return Err(Error::NotField);
        }
        let mut out = Poly::zero(ring, self.nvars);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), &Coef::from_rational(ring, c.parts[0].clone()));
        }
        Ok(out)
    }

    /// Sets x_i = 0, keeping the coordinate count.
    pub fn set_coord_zero(&self, i: usize) -> Result<Poly> {
        self.check_index(i)?;
        Ok(Poly {
            ring: self.ring,
            nvars: self.nvars,
            terms: self.terms.iter().filter(|(m, _)| m.0[i] == 0).map(|(m, c)| (m.clone(), c.clone())).collect(),
        })
    }

    /// Sets every listed coordinate to zero.
    pub fn set_coords_zero(&self, coords: &[usize]) -> Poly {
        Poly {
            ring: self.ring,
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| coords.iter().all(|&i| m.0[i] == 0))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Value at a rational point.
    pub fn eval(&self, p: &[Rational]) -> Result<Coef> {
        self.check_point(p)?;
        let mut acc = Coef::zero(self.ring);
        for (m, c) in &self.terms {
            let mut v = Rational::one();
            for (x, &e) in p.iter().zip(&m.0) {
                if e > 0 {
                    v *= num_traits::pow(x.clone(), e as usize);
                }
            }
            acc = acc.add(&c.scale(&v));
        }
        Ok(acc)
    }

    /// Exact division by x_i^k, `None` if some term is not divisible.
    pub fn div_var_pow(&self, i: usize, k: u32) -> Option<Poly> {
        if k == 0 {
            return Some(self.clone());
        }
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            if m.0[i] < k {
                return None;
            }
            let mut e = m.0.clone();
            e[i] -= k;
            terms.insert(Monomial(e), c.clone());
        }
        Some(Poly { ring: self.ring, nvars: self.nvars, terms })
    }

    /// Exact division by the monomial `x^exps`, `None` if not divisible.
    pub fn div_monomial(&self, exps: &[u32]) -> Option<Poly> {
        let d = Monomial::new(exps.to_vec());
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            if !d.divides(m) {
                return None;
            }
            terms.insert(d.quotient_of(m), c.clone());
        }
        Some(Poly { ring: self.ring, nvars: self.nvars, terms })
    }

    /// Largest power of x_i dividing every term.
    pub fn var_content(&self, i: usize) -> u32 {
        self.terms.keys().map(|m| m.0[i]).min().unwrap_or(0)
    }

    /// Exact division `self / g`. Requires the leading coefficient of `g` to
    /// be a unit; returns `None` when `g` does not divide `self`.
    pub fn div_exact(&self, g: &Poly) -> Result<Option<Poly>> {
        self.check_compatible(g)?;
        let (lm, lc) = match g.leading_term() {
            Some((m, c)) => (m.clone(), c.clone()),
            None => return Err(Error::Invalid("division by zero polynomial".to_string())),
        };
        let inv = lc.inverse().ok_or(Error::UndecidableMembership)?;
        let mut r = self.clone();
        let mut q = Poly::zero(self.ring, self.nvars);
        while let Some((m, c)) = r.leading_term() {
            if !lm.divides(m) {
                return Ok(None);
            }
            let t = Poly::term(self.ring, lm.quotient_of(m), c.mul(&inv));
            r = r.sub(&t.mul(g));
            q = q.add(&t);
        }
        Ok(Some(q))
    }

    /// Scales so the leading coefficient is one (field mode, or a unit leading
    /// coefficient); otherwise returns a clone.
    pub fn normalized(&self) -> Poly {
        match self.leading_term().and_then(|(_, c)| c.inverse()) {
            Some(inv) => self.scale(&inv),
            None => self.clone(),
        }
    }

    /// Same polynomial with coordinates re-indexed: coordinate `i` of `self`
    /// becomes coordinate `map[i]` of a chart with `nvars` coordinates.
    pub fn reindex(&self, map: &[usize], nvars: usize) -> Result<Poly> {
        if map.len() != self.nvars {
            return Err(Error::DimensionMismatch { expected: self.nvars, found: map.len() });
        }
        let mut out = Poly::zero(self.ring, nvars);
        for (m, c) in &self.terms {
            let mut e = vec![0u32; nvars];
            for (i, &x) in m.0.iter().enumerate() {
                if x > 0 {
                    if map[i] >= nvars {
                        return Err(Error::IndexOutOfRange { index: map[i], nvars });
                    }
                    e[map[i]] += x;
                }
            }
            out.add_term(Monomial(e), c);
        }
        Ok(out)
    }

    /// Dense coefficient vector in coordinate `v`, if no other coordinate
    /// occurs and the ring is a field.
    pub fn to_univariate(&self, v: usize) -> Option<Vec<Rational>> {
        if !self.ring.is_field() {
            return None;
        }
        let mut out: Vec<Rational> = Vec::new();
        for (m, c) in &self.terms {
            if m.0.iter().enumerate().any(|(i, &e)| i != v && e > 0) {
                return None;
            }
            let e = m.0[v] as usize;
            if out.len() <= e {
                out.resize(e + 1, Rational::zero());
            }
            out[e] = c.parts[0].clone();
        }
        Some(out)
    }

    /// Inverse of [`Poly::to_univariate`].
    pub fn from_univariate(coeffs: &[Rational], nvars: usize, v: usize) -> Poly {
        let mut out = Poly::zero(CoefRing::FIELD, nvars);
        for (e, c) in coeffs.iter().enumerate() {
            let mut exps = vec![0u32; nvars];
            exps[v] = e as u32;
            out.add_term(Monomial(exps), &Coef::from_rational(CoefRing::FIELD, c.clone()));
        }
        out
    }

    /// Renders with the given coordinate names.
    pub fn to_string_with(&self, names: &[String]) -> String {
        let mut out = String::new();
        if self.terms.is_empty() {
            return "0".to_string();
        }
        for (m, c) in self.terms.iter().rev() {
            for (k, part) in c.parts.iter().enumerate() {
                if part.is_zero() {
                    continue;
                }
                let negative = part.is_negative();
                let abs = part.abs();
                if out.is_empty() {
                    if negative {
                        out.push('-');
                    }
                } else {
                    out.push_str(if negative { " - " } else { " + " });
                }
                let mut factors: Vec<String> = Vec::new();
                if !abs.is_one() {
                    factors.push(abs.to_string());
                }
                if k == 1 {
                    factors.push("eps".to_string());
                } else if k > 1 {
                    factors.push(alloc::format!("eps^{k}"));
                }
                for (i, &e) in m.0.iter().enumerate() {
                    let name = names.get(i).cloned().unwrap_or_else(|| alloc::format!("x{}", i + 1));
                    match e {
                        0 => {}
                        1 => factors.push(name),
                        _ => factors.push(alloc::format!("{name}^{e}")),
                    }
                }
                if factors.is_empty() {
                    factors.push("1".to_string());
                }
                out.push_str(&factors.join("*"));
            }
        }
        out
    }

    /// Parses the ASCII grammar: sums of products of rationals `p/q`,
    /// coordinate names, `eps`, powers `^n` and parenthesized expressions.
    pub fn parse(src: &str, names: &[String], ring: CoefRing) -> Result<Poly> {
        let mut p = Parser { src: src.as_bytes(), pos: 0, names, ring };
        p.skip_ws();
        let out = p.expr()?;
        p.skip_ws();
        if p.pos < p.src.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(out)
    }
}

/// Default names `x1, …, xn`.
pub fn default_names(nvars: usize) -> Vec<String> {
    (1..=nvars).map(|i| alloc::format!("x{i}")).collect()
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_string_with(&default_names(self.nvars)))
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    names: &'a [String],
    ring: CoefRing,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> Error {
        let before = &self.src[..self.pos.min(self.src.len())];
        let line = before.iter().filter(|&&b| b == b'\n').count() + 1;
        let col = before.iter().rev().take_while(|&&b| b != b'\n').count() + 1;
        Error::Parse { line, col, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Poly> {
        let nvars = self.names.len();
        let mut acc = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                self.term()?.neg()
            }
            Some(b'+') => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => break,
            }
        }
        debug_assert_eq!(acc.nvars, nvars);
        Ok(acc)
    }

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.power()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            acc = acc.mul(&self.power()?);
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<Poly> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let e = self.natural()?;
            let e = u32::try_from(e).map_err(|_| self.error("exponent too large"))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn natural(&mut self) -> Result<BigInt> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected a number"));
        }
        let s = core::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        s.parse::<BigInt>().map_err(|_| self.error("bad number"))
    }

    fn atom(&mut self) -> Result<Poly> {
        let nvars = self.names.len();
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(b'-') => {
                self.pos += 1;
                Ok(self.power()?.neg())
            }
            Some(c) if c.is_ascii_digit() => {
                let num = self.natural()?;
                let mut value = Rational::from_integer(num);
                if self.src.get(self.pos) == Some(&b'/') {
                    self.pos += 1;
                    let den = self.natural()?;
                    if den.is_zero() {
                        return Err(self.error("zero denominator"));
                    }
                    value /= Rational::from_integer(den);
                }
                Ok(Poly::constant(self.ring, nvars, Coef::from_rational(self.ring, value)))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_' || self.src[self.pos] == b'\'')
                {
                    self.pos += 1;
                }
                let ident = core::str::from_utf8(&self.src[start..self.pos]).expect("ascii identifier");
                if let Some(i) = self.names.iter().position(|n| n == ident) {
                    return Ok(Poly::var(self.ring, nvars, i));
                }
                if ident == "eps" {
                    if self.ring.is_field() {
                        self.pos = start;
                        return Err(self.error("eps used over a field"));
                    }
                    return Ok(Poly::constant(self.ring, nvars, Coef::eps_pow(self.ring, 1)));
                }
                self.pos = start;
                Err(self.error("unknown coordinate name"))
            }
            _ => Err(self.error("expected a term")),
        }
    }
}

/// Dense univariate helpers over ℚ, used where a single free coordinate
/// remains (every ideal is then principal).
pub mod univariate {
    use super::Rational;
    use alloc::vec::Vec;
    use num_traits::Zero;

    pub fn trim(mut a: Vec<Rational>) -> Vec<Rational> {
        while a.last().is_some_and(Zero::is_zero) {
            a.pop();
        }
        a
    }

    /// Remainder of `a` modulo nonzero `b`.
    pub fn rem(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
        let b = trim(b.to_vec());
        let mut r = trim(a.to_vec());
        let db = b.len() - 1;
        let lead = b[db].clone();
        while r.len() > db {
            let dr = r.len() - 1;
            let q = &r[dr] / &lead;
            for i in 0..=db {
                let t = &q * &b[i];
                r[dr - db + i] -= t;
            }
            r = trim(r);
        }
        r
    }

    /// Monic greatest common divisor (empty vector for gcd(0,0)).
    pub fn gcd(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
        let mut x = trim(a.to_vec());
        let mut y = trim(b.to_vec());
        while !y.is_empty() {
            let r = rem(&x, &y);
            x = y;
            y = r;
        }
        if let Some(l) = x.last().cloned() {
            for c in &mut x {
                *c /= &l;
            }
        }
        x
    }

    pub fn derivative(a: &[Rational]) -> Vec<Rational> {
        a.iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * Rational::from_integer((i as i64).into()))
            .collect()
    }

    /// Multiplicity of the root 0 (`None` for the zero polynomial).
    pub fn order_at_zero(a: &[Rational]) -> Option<usize> {
        a.iter().position(|c| !c.is_zero())
    }
}
