//! Finitely generated ideals on a chart: orders, Δ operators, restriction to
//! coordinate hypersurfaces and membership on the decidable class.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;

use crate::charts::AlignedCenter;
use crate::error::{Error, Result};
use crate::poly::{Coef, CoefRing, Monomial, Order, Poly, Rational};

/// Largest generator list produced by products and powers before giving up.
pub const GENERATOR_BUDGET: usize = 20_000;

/// An ideal given by generators. The zero ideal has no stored generators.
///
/// Generators never involve the coordinates cutting out `W`; such
/// coordinates are set to zero before an ideal is built on `W`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IdealRep {
    ring: CoefRing,
    nvars: usize,
    gens: Vec<Poly>,
}

impl IdealRep {
    /// Ideal generated by `gens` (zero polynomials are dropped).
    pub fn new(ring: CoefRing, nvars: usize, gens: Vec<Poly>) -> Result<Self> {
        for g in &gens {
            if g.ring() != ring {
                return Err(Error::RingMismatch);
            }
            if g.nvars() != nvars {
                return Err(Error::DimensionMismatch { expected: nvars, found: g.nvars() });
            }
        }
        Ok(IdealRep { ring, nvars, gens: gens.into_iter().filter(|g| !g.is_zero()).collect() })
    }

    /// Ideal generated by a nonempty list.
    pub fn from_gens(gens: Vec<Poly>) -> Result<Self> {
        let first = gens.first().ok_or_else(|| Error::Invalid("empty generator list".to_string()))?;
        let (ring, nvars) = (first.ring(), first.nvars());
        Self::new(ring, nvars, gens)
    }

    pub fn principal(f: Poly) -> Self {
        let (ring, nvars) = (f.ring(), f.nvars());
        IdealRep { ring, nvars, gens: if f.is_zero() { Vec::new() } else { alloc::vec![f] } }
    }

    pub fn zero(ring: CoefRing, nvars: usize) -> Self {
        IdealRep { ring, nvars, gens: Vec::new() }
    }

    pub fn unit(ring: CoefRing, nvars: usize) -> Self {
        IdealRep { ring, nvars, gens: alloc::vec![Poly::one(ring, nvars)] }
    }

    pub fn gens(&self) -> &[Poly] {
        &self.gens
    }

    pub fn ring(&self) -> CoefRing {
        self.ring
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.gens.is_empty()
    }

    /// True when some generator is an invertible constant.
    pub fn is_unit(&self) -> bool {
        self.gens.iter().any(Poly::is_unit)
    }

    /// ν_p(I): minimum of the generator orders at `p`.
    pub fn order_at(&self, p: &[Rational]) -> Result<Order> {
        if p.len() != self.nvars {
            return Err(Error::DimensionMismatch { expected: self.nvars, found: p.len() });
        }
        let mut best = Order::Infinite;
        for g in &self.gens {
            best = best.min(g.order_at_point(p)?);
            if best == Order::Finite(0) {
                break;
            }
        }
        Ok(best)
    }

    /// ν at the chart origin.
    pub fn order_at_origin(&self) -> Order {
        self.gens.iter().map(Poly::order_at_origin).min().unwrap_or(Order::Infinite)
    }

    /// Order along `V(x_c : c ∈ coords)`: the value at its generic point.
    pub fn order_along(&self, coords: &[usize]) -> Order {
        self.gens.iter().map(|g| g.order_along_coords(coords)).min().unwrap_or(Order::Infinite)
    }

    /// ν(I, C) for an aligned center inside `W`.
    pub fn nu_along(&self, center: &AlignedCenter, w_coords: &[usize]) -> Result<Order> {
        if !w_coords.iter().all(|w| center.coords.contains(w)) {
            return Err(Error::Misaligned("center is not inside W".to_string()));
        }
        if let Some(&bad) = center.coords.iter().find(|&&c| c >= self.nvars) {
            return Err(Error::IndexOutOfRange { index: bad, nvars: self.nvars });
        }
        let along: Vec<usize> = center.coords.iter().copied().filter(|c| !w_coords.contains(c)).collect();
        if along.is_empty() {
            return Err(Error::Misaligned("center equals W".to_string()));
        }
        Ok(self.order_along(&along))
    }

    /// Δ(I): the generators together with all their first partials. The list
    /// is concatenated without minimalization.
    pub fn delta(&self) -> IdealRep {
        let mut gens = self.gens.clone();
        for g in &self.gens {
            for i in 0..self.nvars {
                let d = g.partial(i).expect("index in range");
                if !d.is_zero() {
                    gens.push(d);
                }
            }
        }
        IdealRep { ring: self.ring, nvars: self.nvars, gens }
    }

    /// Δ^(j)(I). Between rounds the generating set is interreduced by its
    /// monomial members, which keeps it small without changing the ideal.
    pub fn delta_iter(&self, j: u32) -> IdealRep {
        let mut cur = self.clone();
        for _ in 0..j {
            if cur.is_unit() || cur.is_zero() {
                break;
            }
            cur = cur.delta().simplified();
        }
        cur
    }

    /// I|_{z=0}; the coordinate count is kept.
    pub fn restrict_to(&self, z: usize) -> Result<IdealRep> {
        if z >= self.nvars {
            return Err(Error::IndexOutOfRange { index: z, nvars: self.nvars });
        }
        let gens = self.gens.iter().map(|g| g.set_coord_zero(z)).collect::<Result<Vec<_>>>()?;
        IdealRep::new(self.ring, self.nvars, gens)
    }

    pub fn sum(&self, other: &IdealRep) -> Result<IdealRep> {
        self.check_compatible(other)?;
        let mut gens = self.gens.clone();
        gens.extend(other.gens.iter().cloned());
        Ok(IdealRep { ring: self.ring, nvars: self.nvars, gens })
    }

    pub fn product(&self, other: &IdealRep) -> Result<IdealRep> {
        self.check_compatible(other)?;
        if self.gens.len().saturating_mul(other.gens.len()) > GENERATOR_BUDGET {
            return Err(Error::LimitExceeded(format!(
                "product of {} and {} generators",
                self.gens.len(),
                other.gens.len()
            )));
        }
        let mut set = BTreeSet::new();
        for a in &self.gens {
            for b in &other.gens {
                let p = a.mul(b);
                if !p.is_zero() {
                    set.insert(p);
                }
            }
        }
        Ok(IdealRep { ring: self.ring, nvars: self.nvars, gens: set.into_iter().collect() }.simplified())
    }

    /// I^q, generated by all q-fold products of generators.
    pub fn power(&self, q: u32) -> Result<IdealRep> {
        let mut out = IdealRep::unit(self.ring, self.nvars);
        for _ in 0..q {
            out = out.product(self)?;
        }
        Ok(out)
    }

    /// Pull-back along a chart map given by coordinate images.
    pub fn pull_back(&self, images: &[Poly]) -> Result<IdealRep> {
        let nvars = images.first().map_or(self.nvars, Poly::nvars);
        let gens = self.gens.iter().map(|g| g.substitute(images)).collect::<Result<Vec<_>>>()?;
        IdealRep::new(self.ring, nvars, gens)
    }

    /// Exact division of every generator by x_i^k.
    pub fn div_var_pow(&self, i: usize, k: u32) -> Option<IdealRep> {
        let gens = self.gens.iter().map(|g| g.div_var_pow(i, k)).collect::<Option<Vec<_>>>()?;
        Some(IdealRep { ring: self.ring, nvars: self.nvars, gens })
    }

    /// Exact division of every generator by a monomial.
    pub fn div_monomial(&self, exps: &[u32]) -> Option<IdealRep> {
        let gens = self.gens.iter().map(|g| g.div_monomial(exps)).collect::<Option<Vec<_>>>()?;
        Some(IdealRep { ring: self.ring, nvars: self.nvars, gens })
    }

    /// Multiplication of every generator by a monomial.
    pub fn mul_monomial(&self, exps: &[u32]) -> IdealRep {
        IdealRep { ring: self.ring, nvars: self.nvars, gens: self.gens.iter().map(|g| g.mul_monomial(exps)).collect() }
    }

    /// Largest power of x_i dividing every generator (`None` for zero).
    pub fn var_content(&self, i: usize) -> Option<u32> {
        self.gens.iter().map(|g| g.var_content(i)).min()
    }

    /// Fiber over the residue field.
    pub fn set_fiber(&self) -> Result<IdealRep> {
        let gens = self.gens.iter().map(Poly::set_fiber).collect::<Result<Vec<_>>>()?;
        IdealRep::new(CoefRing::FIELD, self.nvars, gens)
    }

    /// ε-free lift of a field ideal into `ring`.
    pub fn lift_to(&self, ring: CoefRing) -> Result<IdealRep> {
        let gens = self.gens.iter().map(|g| g.lift_to(ring)).collect::<Result<Vec<_>>>()?;
        IdealRep::new(ring, self.nvars, gens)
    }

    fn check_compatible(&self, other: &IdealRep) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch);
        }
        if self.nvars != other.nvars {
            return Err(Error::DimensionMismatch { expected: self.nvars, found: other.nvars });
        }
        Ok(())
    }

    /// The same ideal with a tidier generating set: generators are made monic
    /// where possible, reduced by the single-term generators, deduplicated and
    /// sorted.
    pub fn simplified(&self) -> IdealRep {
        if self.is_unit() {
            return IdealRep::unit(self.ring, self.nvars);
        }
        let mut monos: Vec<(Monomial, usize)> = Vec::new();
        let mut others: BTreeSet<Poly> = BTreeSet::new();
        for g in &self.gens {
            match single_term(g) {
                Some(mv) => monos.push(mv),
                None => {
                    others.insert(g.normalized());
                }
            }
        }
        loop {
            minimalize(&mut monos);
            if monos.iter().any(|(m, v)| m.is_one() && *v == 0) {
                return IdealRep::unit(self.ring, self.nvars);
            }
            let mut changed = false;
            let mut next = BTreeSet::new();
            for g in &others {
                let r = reduce_by_monomials(g, &monos);
                if r.is_zero() {
                    changed = true;
                    continue;
                }
                if let Some(mv) = single_term(&r) {
                    monos.push(mv);
                    changed = true;
                    continue;
                }
                if r != *g {
                    changed = true;
                }
                next.insert(r.normalized());
            }
            others = next;
            if !changed {
                break;
            }
        }
        let mut gens: Vec<Poly> = monos
            .iter()
            .map(|(m, v)| Poly::term(self.ring, m.clone(), Coef::eps_pow(self.ring, *v)))
            .collect();
        gens.sort();
        gens.extend(others);
        IdealRep { ring: self.ring, nvars: self.nvars, gens }
    }

    /// Decides `f ∈ I` when `I` is generated by single terms, is principal
    /// with an invertible leading coefficient, or `f` reduces to zero modulo
    /// the single-term generators. Otherwise `UndecidableMembership`.
    pub fn member(&self, f: &Poly) -> Result<bool> {
        if f.ring() != self.ring {
            return Err(Error::RingMismatch);
        }
        if f.nvars() != self.nvars {
            return Err(Error::DimensionMismatch { expected: self.nvars, found: f.nvars() });
        }
        if f.is_zero() {
            return Ok(true);
        }
        let s = self.simplified();
        if s.is_unit() {
            return Ok(true);
        }
        if s.is_zero() {
            return Ok(false);
        }
        let monos: Vec<(Monomial, usize)> = s.gens.iter().filter_map(single_term).collect();
        let r = reduce_by_monomials(f, &monos);
        if r.is_zero() {
            return Ok(true);
        }
        let non_monomial: Vec<&Poly> = s.gens.iter().filter(|g| single_term(g).is_none()).collect();
        if non_monomial.is_empty() {
            return Ok(false);
        }
        if s.gens.len() == 1 {
            return Ok(f.div_exact(&s.gens[0])?.is_some());
        }
        Err(Error::UndecidableMembership)
    }

    /// `other ⊆ self`, generator by generator.
    pub fn contains(&self, other: &IdealRep) -> Result<bool> {
        for g in &other.gens {
            if !self.member(g)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Mutual generator membership.
    pub fn same_ideal(&self, other: &IdealRep) -> Result<bool> {
        Ok(self.contains(other)? && other.contains(self)?)
    }
}

/// `(monomial, ε-valuation)` of a single-term polynomial.
fn single_term(g: &Poly) -> Option<(Monomial, usize)> {
    if g.num_terms() != 1 {
        return None;
    }
    let (m, c) = g.terms().next()?;
    // A coefficient ε^v·u with u a unit generates the same ideal as ε^v.
    let v = c.valuation()?;
    Some((m.clone(), v))
}

/// Drops single-term generators made redundant by another one.
fn minimalize(monos: &mut Vec<(Monomial, usize)>) {
    monos.sort();
    monos.dedup();
    let snapshot = monos.clone();
    monos.retain(|(m, v)| {
        !snapshot
            .iter()
            .any(|(m2, v2)| (m2, v2) != (m, v) && m2.divides(m) && v2 <= v)
    });
}

/// Removes from each term of `f` the part lying in the monomial ideal
/// generated by `monos`.
fn reduce_by_monomials(f: &Poly, monos: &[(Monomial, usize)]) -> Poly {
    if monos.is_empty() {
        return f.clone();
    }
    let ring = f.ring();
    let mut out = Poly::zero(ring, f.nvars());
    for (m, c) in f.terms() {
        let cut = monos.iter().filter(|(g, _)| g.divides(m)).map(|(_, v)| *v).min();
        let kept = match cut {
            Some(v) => c.truncated(v),
            None => c.clone(),
        };
        out = out.add(&Poly::term(ring, m.clone(), kept));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::int;
    use alloc::string::{String, ToString};
    use alloc::vec;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn ideal(gens: &[&str], v: &[&str], ring: CoefRing) -> IdealRep {
        IdealRep::from_gens(gens.iter().map(|g| Poly::parse(g, &names(v), ring).unwrap()).collect()).unwrap()
    }

    fn q(gens: &[&str], v: &[&str]) -> IdealRep {
        ideal(gens, v, CoefRing::FIELD)
    }

    fn a(gens: &[&str], v: &[&str]) -> IdealRep {
        ideal(gens, v, CoefRing::artinian(2).unwrap())
    }

    #[test]
    fn orders_from_omega_example() {
        let v = ["x", "y"];
        assert_eq!(q(&["x^2*y^4"], &v).order_at(&[int(0), int(0)]).unwrap(), Order::Finite(6));
        assert_eq!(q(&["x^4*y"], &v).order_at(&[int(0), int(1)]).unwrap(), Order::Finite(4));
        assert_eq!(IdealRep::unit(CoefRing::FIELD, 2).order_at(&[int(7), int(1)]).unwrap(), Order::Finite(0));
    }

    #[test]
    fn delta_examples() {
        let v = ["x", "y"];
        let i = q(&["y^2 - x^3"], &v);
        assert_eq!(i.delta_iter(0), i);
        let d = i.delta();
        assert_eq!(d.gens().len(), 3);
        assert!(d.same_ideal(&q(&["y", "x^2"], &v)).unwrap());
        assert!(q(&["5"], &v).delta().simplified().is_unit());
    }

    #[test]
    fn restriction_examples_over_dual_numbers() {
        let v = ["x", "z"];
        let i = a(&["z^2 + eps*x^2", "z^3 + x^3"], &v);
        assert!(i.restrict_to(1).unwrap().same_ideal(&a(&["eps*x^2", "x^3"], &v)).unwrap());
        let d1 = a(&["2*z", "2*eps*x", "3*z^2", "3*x^2", "z^2 + eps*x^2", "z^3 + x^3"], &v);
        assert!(d1.restrict_to(1).unwrap().same_ideal(&a(&["eps*x", "x^2"], &v)).unwrap());
        let free = a(&["x^2 + eps"], &v);
        assert_eq!(free.restrict_to(1).unwrap(), free);
    }

    #[test]
    fn order_along_centers() {
        let c = AlignedCenter::new(0, &[0]);
        assert_eq!(a(&["eps*x + x^3"], &["x"]).nu_along(&c, &[]).unwrap(), Order::Finite(1));
        let cz = AlignedCenter::new(0, &[0, 1]);
        assert_eq!(a(&["z^2 + eps*x^2", "z^3 + x^3"], &["x", "z"]).nu_along(&cz, &[]).unwrap(), Order::Finite(2));
        assert_eq!(IdealRep::unit(CoefRing::FIELD, 1).nu_along(&c, &[]).unwrap(), Order::Finite(0));
    }

    #[test]
    fn membership_examples() {
        let v = ["x", "y"];
        let x6y4 = Poly::parse("x^6*y^4", &names(&v), CoefRing::FIELD).unwrap();
        assert!(q(&["x^4"], &v).member(&x6y4).unwrap());
        let ring = CoefRing::artinian(2).unwrap();
        let ex = Poly::parse("eps*x", &names(&["x"]), ring).unwrap();
        assert!(!a(&["x^2"], &["x"]).member(&ex).unwrap());
        let f = Poly::parse("3*eps*x^7 + x^9", &names(&["x"]), ring).unwrap();
        assert!(a(&["x^6"], &["x"]).member(&f).unwrap());
    }

    #[test]
    fn membership_is_refused_outside_the_decidable_class() {
        let v = ["x", "y"];
        let i = q(&["x^2 + y^3", "x*y + y^2"], &v);
        let f = Poly::parse("x^3", &names(&v), CoefRing::FIELD).unwrap();
        assert_eq!(i.member(&f), Err(Error::UndecidableMembership));
    }

    #[test]
    fn principal_membership_by_division() {
        let v = ["x", "y"];
        let i = q(&["1 - x*y^3"], &v);
        let f = Poly::parse("x^2*(1 - x*y^3)*(y+2)", &names(&v), CoefRing::FIELD).unwrap();
        assert!(i.member(&f).unwrap());
        let g = Poly::parse("x^2", &names(&v), CoefRing::FIELD).unwrap();
        assert!(!i.member(&g).unwrap());
    }

    #[test]
    fn powers_and_products() {
        let v = ["x", "y"];
        let j = q(&["x^2*y^4"], &v).power(3).unwrap().sum(&q(&["x^4*y"], &v).power(2).unwrap()).unwrap();
        assert!(j.same_ideal(&q(&["x^6*y^12", "x^8*y^2"], &v)).unwrap());
        let l = q(&["x"], &v).product(&q(&["y"], &v)).unwrap();
        assert_eq!(l, q(&["x*y"], &v));
    }

    #[test]
    fn simplification_keeps_nilpotent_parts() {
        let v = ["x"];
        let s = a(&["eps*x", "x^2 + eps*x^2"], &v).simplified();
        assert!(s.same_ideal(&a(&["eps*x", "x^2"], &v)).unwrap());
        assert!(!s.member(&Poly::parse("x", &names(&v), CoefRing::artinian(2).unwrap()).unwrap()).unwrap());
    }

    #[test]
    fn restricted_order_vanishes() {
        let v = ["x", "z"];
        let d = q(&["z^2"], &v).delta_iter(1).restrict_to(1).unwrap();
        assert!(d.is_zero());
        let _ = vec![0];
    }
}
