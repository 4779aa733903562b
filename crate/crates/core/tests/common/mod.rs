//! Independent oracles and seeded instance generators shared by the
//! integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use multires_core::charts::{AlignedCenter, ChartTree};
use multires_core::ideals::IdealRep;
use multires_core::monomial::{GammaValue, MonomialForm, MonomialPair};
use multires_core::multiideal::MultiIdeal;
use multires_core::pairs::MarkedPair;
use multires_core::poly::{int, rat, Coef, CoefRing, Monomial, Poly, Rational};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Small helper around a seeded stream.
pub struct Gen(ChaCha8Rng);

impl Gen {
    pub fn new(seed: u64) -> Self {
        Gen(ChaCha8Rng::seed_from_u64(seed))
    }

    /// Uniform in `lo..=hi`.
    pub fn range(&mut self, lo: i64, hi: i64) -> i64 {
        lo + (self.0.next_u64() % (hi - lo + 1) as u64) as i64
    }

    pub fn coin(&mut self, num: u64, den: u64) -> bool {
        self.0.next_u64() % den < num
    }

    /// A nonzero rational with small numerator and denominator.
    pub fn nonzero_rat(&mut self) -> Rational {
        let mut n = self.range(-3, 3);
        if n == 0 {
            n = 1;
        }
        rat(n, self.range(1, 2))
    }

    /// A coordinate from `{-2, -1, -1/2, 0, 1/2, 1, 2}`.
    pub fn coord(&mut self) -> Rational {
        [rat(-2, 1), rat(-1, 1), rat(-1, 2), int(0), rat(1, 2), int(1), int(2)][self.range(0, 6) as usize].clone()
    }
}

pub fn names(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

// ---------------------------------------------------------------------------
// Γ by exhaustive enumeration of witness subsets.

/// Γ at the generic point of `stratum`, computed from all witnesses
/// `(q, U)` with `U ⊆ stratum` nonempty and `Σ_{k∈U} α_qk ≥ b_q`. `None`
/// when the stratum is not singular.
pub fn gamma_oracle(form: &MonomialForm, stratum: &[usize]) -> Option<GammaValue> {
    if !form.pairs.iter().all(|p| stratum.iter().map(|&k| p.exps[k]).sum::<u32>() >= p.mark) {
        return None;
    }
    let mut witnesses: Vec<(usize, Rational, Vec<usize>)> = Vec::new();
    for mask in 1u32..(1 << stratum.len()) {
        let subset: Vec<usize> = (0..stratum.len()).filter(|i| mask & (1 << i) != 0).map(|i| stratum[i]).collect();
        for p in &form.pairs {
            let s: u32 = subset.iter().map(|&k| p.exps[k]).sum();
            if s >= p.mark {
                let mut labels: Vec<usize> = subset.iter().map(|k| k + 1).collect();
                labels.sort_unstable();
                witnesses.push((subset.len(), rat(s as i64, p.mark as i64), labels));
            }
        }
    }
    let p = witnesses.iter().map(|w| w.0).min()?;
    let ratio = witnesses.iter().filter(|w| w.0 == p).map(|w| w.1.clone()).max()?;
    let pad = |v: &Vec<usize>| {
        let mut v = v.clone();
        v.resize(stratum.len(), 0);
        v
    };
    let seq = witnesses.iter().filter(|w| w.0 == p && w.1 == ratio).map(|w| pad(&w.2)).max()?;
    let seq: Vec<usize> = seq.into_iter().filter(|&l| l != 0).collect();
    Some(GammaValue { p: p as u32, ratio, seq })
}

/// `(−p, ratio, padded seq)` as a plain tuple, for an order comparison
/// independent of the library's `Ord`.
pub fn gamma_key(g: &GammaValue) -> (i64, Rational, Vec<usize>) {
    let mut seq = g.seq.clone();
    seq.resize(8, 0);
    (-(g.p as i64), g.ratio.clone(), seq)
}

/// A random monomial form: at most 4 hypersurfaces, exponents at most 6, at
/// most 3 pairs.
pub fn random_monomial_form(g: &mut Gen) -> MonomialForm {
    random_monomial_form_with(g, 3)
}

/// As [`random_monomial_form`] with at most `max_pairs` pairs.
pub fn random_monomial_form_with(g: &mut Gen, max_pairs: i64) -> MonomialForm {
    let m = g.range(1, 4) as usize;
    let npairs = g.range(1, max_pairs) as usize;
    let pairs = (0..npairs)
        .map(|_| MonomialPair { mark: g.range(1, 6) as u32, exps: (0..m).map(|_| g.range(0, 6) as u32).collect() })
        .collect();
    let dim = g.range(1, m as i64) as usize;
    MonomialForm::new(pairs, dim).expect("valid form")
}

// ---------------------------------------------------------------------------
// Orders by binomial expansion.

fn binomial(n: u32, k: u32) -> BigInt {
    let mut r = BigInt::one();
    for i in 0..k {
        r = r * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    r
}

/// Order at `p` of the polynomial with the given rational terms: every
/// `x^e` is rewritten as `∏ (u_i + p_i)^{e_i}` and the lowest total degree
/// with a nonzero coefficient in `u` is returned. `None` for zero.
pub fn order_oracle(terms: &[(Vec<u32>, Rational)], p: &[Rational]) -> Option<u32> {
    let mut acc: BTreeMap<Vec<u32>, Rational> = BTreeMap::new();
    for (exps, c) in terms {
        let mut partial: Vec<(Vec<u32>, Rational)> = vec![(Vec::new(), c.clone())];
        for (i, &e) in exps.iter().enumerate() {
            let mut next = Vec::new();
            for (mono, coef) in &partial {
                for k in 0..=e {
                    let mut mono = mono.clone();
                    mono.push(k);
                    let shift = num_traits::pow(p[i].clone(), (e - k) as usize);
                    next.push((mono, coef * Rational::from_integer(binomial(e, k)) * shift));
                }
            }
            partial = next;
        }
        for (mono, coef) in partial {
            *acc.entry(mono).or_insert_with(Rational::zero) += coef;
        }
    }
    acc.into_iter().filter(|(_, c)| !c.is_zero()).map(|(m, _)| m.iter().sum()).min()
}

/// Rational terms of a polynomial over the field.
pub fn rational_terms(f: &Poly) -> Vec<(Vec<u32>, Rational)> {
    f.terms().map(|(m, c)| (m.exps().to_vec(), c.constant_part().clone())).collect()
}

/// Minimum of [`order_oracle`] over generators; `None` for the zero ideal.
pub fn ideal_order_oracle(i: &IdealRep, p: &[Rational]) -> Option<u32> {
    i.gens().iter().filter_map(|g| order_oracle(&rational_terms(g), p)).min()
}

// ---------------------------------------------------------------------------
// Pairs with a planted singular point.

/// A pair `(J, c)` over `ℚ` in 2 or 3 variables, generators of degree at
/// most 5, together with 100 test points. The generators are expansions of
/// polynomials in `x − p₀` whose terms have degree at least a random bound,
/// so `p₀` is singular for some instances and not for others.
pub struct PlantedPair {
    pub names: Vec<String>,
    pub ideal: IdealRep,
    pub mark: u32,
    pub points: Vec<Vec<Rational>>,
}

pub fn planted_pair(g: &mut Gen) -> PlantedPair {
    let n = g.range(2, 3) as usize;
    let mark = g.range(1, 4) as u32;
    let low = (mark as i64 + g.range(-1, 1)).clamp(1, 5) as u32;
    let p0: Vec<Rational> = (0..n).map(|_| g.coord()).collect();
    let ngens = g.range(1, 2);
    let shifted: Vec<Poly> = (0..n)
        .map(|i| {
            Poly::var(CoefRing::FIELD, n, i)
                .sub(&Poly::constant(CoefRing::FIELD, n, Coef::from_rational(CoefRing::FIELD, p0[i].clone())))
        })
        .collect();
    let mut gens = Vec::new();
    for _ in 0..ngens {
        let mut f = Poly::zero(CoefRing::FIELD, n);
        let nterms = g.range(1, 4);
        for _ in 0..nterms {
            let deg = g.range(low as i64, 5) as u32;
            let mut exps = vec![0u32; n];
            for _ in 0..deg {
                exps[g.range(0, n as i64 - 1) as usize] += 1;
            }
            let mut t = Poly::constant(CoefRing::FIELD, n, Coef::from_rational(CoefRing::FIELD, g.nonzero_rat()));
            for (i, &e) in exps.iter().enumerate() {
                t = t.mul(&shifted[i].pow(e));
            }
            f = f.add(&t);
        }
        if f.is_zero() {
            f = shifted[0].pow(low);
        }
        gens.push(f);
    }
    let mut points = vec![p0.clone(), vec![int(0); n]];
    while points.len() < 100 {
        let mut q: Vec<Rational> = (0..n).map(|_| g.coord()).collect();
        if g.coin(1, 4) {
            let keep = g.range(0, n as i64 - 1) as usize;
            q[keep] = p0[keep].clone();
        }
        points.push(q);
    }
    PlantedPair { names: default_names(n), ideal: IdealRep::from_gens(gens).expect("nonempty"), mark, points }
}

fn default_names(n: usize) -> Vec<String> {
    names(&["x", "y", "z"][..n])
}

// ---------------------------------------------------------------------------
// Restriction to a hypersurface and blowing up.

/// `f = z^c + Σ_{i ≤ c−2} z^i m_i(x, y)` with `ν(m_i, C) ≥ c − i`, where `C`
/// is the origin or the line `V(x, z)`.
pub struct RestrictionInstance {
    pub names: Vec<String>,
    pub f: Poly,
    pub mark: u32,
    /// Coordinates cutting out `C`.
    pub center: Vec<usize>,
}

pub fn restriction_instance(g: &mut Gen) -> RestrictionInstance {
    let ring = CoefRing::FIELD;
    let c = g.range(2, 3) as u32;
    let line = g.coin(1, 2);
    let mut f = Poly::monomial(ring, &[0, 0, c]);
    for i in 0..c - 1 {
        let need = c - i;
        let mut m = Poly::zero(ring, 3);
        while m.is_zero() {
            for _ in 0..g.range(1, 3) {
                let extra = g.range(0, 2) as u32;
                let exps = if line {
                    let ydeg = g.range(0, 2) as u32;
                    [need + extra.min(1), ydeg, 0]
                } else {
                    let a = g.range(0, (need + extra) as i64) as u32;
                    [a, need + extra - a, 0]
                };
                m = m.add(&Poly::monomial(ring, &exps).scale_rational(&g.nonzero_rat()));
            }
        }
        f = f.add(&m.mul_monomial(&[0, 0, i]));
    }
    let center = if line { vec![0, 2] } else { vec![0, 1, 2] };
    RestrictionInstance { names: names(&["x", "y", "z"]), f, mark: c, center }
}

// ---------------------------------------------------------------------------
// Basic objects over `ℚ[ε]/(ε^m)`.

/// A basic object `(z^b + Σ_{q ≤ b−2} z^q a_q, b)` in `x, y, z` over `A`
/// with an aligned center inside `V(z)`. Most coefficients `a_q` have order
/// at least `b − q` along the center; some carry a lower order term times a
/// power of `ε`, so the hypotheses of the lifting statement fail for part
/// of the stream.
pub struct AObject {
    pub tree: ChartTree,
    pub object: MultiIdeal,
    pub z: usize,
    pub center: AlignedCenter,
}

pub fn a_object(g: &mut Gen) -> AObject {
    let m = g.range(2, 3) as usize;
    let ring = CoefRing::artinian(m).expect("ring");
    let nm = names(&["x", "y", "z"]);
    let (tree, root) = ChartTree::new(ring, nm, &[], &[]).expect("tree");
    let b = g.range(2, 3) as u32;
    let line = g.coin(1, 2);
    let mut f = Poly::monomial(ring, &[0, 0, b]);
    for q in 0..b - 1 {
        let need = (b - q) as i64;
        for _ in 0..g.range(0, 2) {
            let low = if g.coin(1, 6) { need - 1 } else { need };
            let exps = if line {
                [low.max(0) as u32, g.range(0, 2) as u32, q]
            } else {
                let d = low.max(0) + g.range(0, 1);
                let a = g.range(0, d);
                [a as u32, (d - a) as u32, q]
            };
            let mut parts: Vec<Rational> = (0..m).map(|_| if g.coin(1, 2) { g.nonzero_rat() } else { int(0) }).collect();
            if low < need {
                parts[0] = int(0);
            }
            let c = Coef::from_parts(ring, &parts).expect("parts");
            if !c.is_zero() {
                f = f.add(&Poly::term(ring, Monomial::new(exps.to_vec()), c));
            }
        }
    }
    let pair = MarkedPair::new(IdealRep::principal(f), b).expect("pair");
    let object = MultiIdeal::new(&tree, root, &[], vec![pair], vec![]).expect("object");
    let center = AlignedCenter::new(root, if line { &[0, 2] } else { &[0, 1, 2] });
    AObject { tree, object, z: 2, center }
}
