//! Multi-ideals on a chart: singular sets, permissible transforms, the
//! coefficient and inductive multi-ideals, adapted hypersurfaces and the
//! associated basic object.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_integer::Integer;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::charts::{center_normal_crossings, normal_crossings_check, AlignedCenter, Chart, ChartId, ChartTree, HypId};
use crate::error::{Error, Result};
use crate::ideals::IdealRep;
use crate::pairs::{controlled_transform, MarkedPair};
use crate::poly::{Order, Poly, Rational};

/// Pseudorandom points drawn per chart on top of the stratum centers.
pub const SAMPLE_POINTS: usize = 20;
/// Seed of the sampling generator.
pub const SAMPLE_SEED: u64 = 0x5eed_2007;
/// Coefficients tried in `g_i + c·g_j` when searching for an order-one element.
pub const COMBINATION_COEFFICIENTS: [i64; 4] = [1, -1, 2, -2];

/// A rational with numerator in `[-9, 9] \ {0}` and denominator in `[1, 4]`.
pub fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    let num = (rng.next_u64() % 9) as i64 + 1;
    let sign = if rng.next_u64().is_multiple_of(2) { 1 } else { -1 };
    let den = (rng.next_u64() % 4) as i64 + 1;
    crate::poly::rat(sign * num, den)
}

/// Sample of points of `W` on a chart: for every subset `S` of the free
/// coordinates (up to a cap) the point with `x_S = 0` and the other free
/// coordinates random, then `count` random points. `W` coordinates are zero.
pub fn sample_points(chart: &Chart, w: &[usize], seed: u64, count: usize) -> Vec<Vec<Rational>> {
    let n = chart.nvars();
    let free: Vec<usize> = (0..n).filter(|c| !w.contains(c)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (chart.id as u64).wrapping_mul(0x9e37_79b9));
    let mut out = Vec::new();
    let subsets = if free.len() <= 6 { 1usize << free.len() } else { 64 };
    for mask in 0..subsets {
        let mut p = alloc::vec![Rational::from_integer(0.into()); n];
        for (bit, &c) in free.iter().enumerate() {
            if bit >= 6 || mask & (1 << bit) == 0 {
                p[c] = random_rational(&mut rng);
            }
        }
        out.push(p);
    }
    for _ in 0..count {
        let mut p = alloc::vec![Rational::from_integer(0.into()); n];
        for &c in &free {
            p[c] = random_rational(&mut rng);
        }
        out.push(p);
    }
    out
}

/// `(M, W, (I₁,b₁), …, (Iₙ,bₙ), E)` restricted to one chart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiIdeal {
    pub chart: ChartId,
    /// Coordinates cutting out `W` on the chart.
    pub w: Vec<usize>,
    pub pairs: Vec<MarkedPair>,
    /// Ordered hypersurface list (global ids; some may miss the chart).
    pub e: Vec<HypId>,
}

impl MultiIdeal {
    /// Validates the data: matching rings, generators free of the `W`
    /// coordinates, `E` with normal crossings and transversal to `W`.
    pub fn new(tree: &ChartTree, chart: ChartId, w: &[usize], pairs: Vec<MarkedPair>, e: Vec<HypId>) -> Result<Self> {
        let c = tree.chart(chart);
        let mut w = w.to_vec();
        w.sort_unstable();
        w.dedup();
        if let Some(&bad) = w.iter().find(|&&k| k >= c.nvars()) {
            return Err(Error::IndexOutOfRange { index: bad, nvars: c.nvars() });
        }
        if pairs.is_empty() {
            return Err(Error::Invalid("a multi-ideal needs at least one pair".to_string()));
        }
        for p in &pairs {
            if p.ideal.ring() != tree.ring() {
                return Err(Error::RingMismatch);
            }
            if p.ideal.nvars() != c.nvars() {
                return Err(Error::DimensionMismatch { expected: c.nvars(), found: p.ideal.nvars() });
            }
            if p.ideal.gens().iter().any(|g| g.support_vars().iter().any(|v| w.contains(v))) {
                return Err(Error::Misaligned("generators must not involve the coordinates of W".to_string()));
            }
        }
        if !normal_crossings_check(&e, c) || e.iter().any(|h| c.hyp_coord(*h).is_some_and(|k| w.contains(&k))) {
            return Err(Error::Misaligned("E must have normal crossings and be transversal to W".to_string()));
        }
        Ok(MultiIdeal { chart, w, pairs, e })
    }

    pub fn nvars(&self) -> usize {
        self.pairs[0].ideal.nvars()
    }

    /// Dimension of `W`.
    pub fn dim(&self) -> usize {
        self.nvars() - self.w.len()
    }

    /// Membership in `Sing(ℐ)`: every pair is singular at `p`.
    pub fn sing_member(&self, p: &[Rational]) -> Result<bool> {
        for pair in &self.pairs {
            if !pair.sing_member(p)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Membership in the singular set of the fiber; equals
    /// [`MultiIdeal::sing_member`] over a field.
    pub fn fiber_sing_member(&self, p: &[Rational]) -> Result<bool> {
        if self.pairs[0].ideal.ring().is_field() {
            return self.sing_member(p);
        }
        for pair in &self.pairs {
            if !pair.ideal.set_fiber()?.order_at(p)?.at_least(pair.mark) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The deterministic sample used for sampled checks.
    pub fn sample(&self, tree: &ChartTree) -> Vec<Vec<Rational>> {
        sample_points(tree.chart(self.chart), &self.w, SAMPLE_SEED, SAMPLE_POINTS)
    }

    /// Some stalk is nonzero at every sampled point.
    pub fn is_nonzero(&self, tree: &ChartTree) -> Result<bool> {
        for p in self.sample(tree) {
            let mut some = false;
            for pair in &self.pairs {
                if !pair.ideal.order_at(&p)?.is_infinite() {
                    some = true;
                    break;
                }
            }
            if !some {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Hypersurfaces of `E` meeting the chart.
    pub fn present_hyps<'a>(&'a self, tree: &'a ChartTree) -> impl Iterator<Item = (HypId, usize)> + 'a {
        let c = tree.chart(self.chart);
        self.e.iter().filter_map(move |&h| c.hyp_coord(h).map(|k| (h, k)))
    }
}

/// Conjunction of the pairwise singular-set tests.
pub fn sing_member_multi(m: &MultiIdeal, p: &[Rational]) -> Result<bool> {
    m.sing_member(p)
}

/// `C` has normal crossings with `E` and `ν(I_i, C) ≥ b_i` for all `i`.
pub fn permissible_center_check(tree: &ChartTree, m: &MultiIdeal, center: &AlignedCenter) -> Result<bool> {
    if center.chart != m.chart || !m.w.iter().all(|k| center.coords.contains(k)) {
        return Err(Error::Misaligned(format!("center is not an aligned subvariety of W on chart {}", m.chart)));
    }
    if !center_normal_crossings(center, &m.e, tree.chart(m.chart)) {
        return Ok(false);
    }
    for pair in &m.pairs {
        if !pair.permissible_along(center, &m.w)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// First pair along which the center is not permissible.
fn first_violation(m: &MultiIdeal, center: &AlignedCenter) -> Result<Option<usize>> {
    for (i, pair) in m.pairs.iter().enumerate() {
        if !pair.permissible_along(center, &m.w)? {
            return Ok(Some(i));
        }
    }
    Ok(None)
}

/// Controlled transforms of every pair on the given blow-up charts, with `E`
/// extended by `exc`. Charts whose pivot cuts out `W` are skipped.
pub fn transform_on_charts(tree: &ChartTree, m: &MultiIdeal, charts: &[ChartId], exc: HypId) -> Result<Vec<MultiIdeal>> {
    let mut out = Vec::new();
    for &c in charts {
        let pivot = crate::pairs::exceptional_coord(tree, c)?;
        if m.w.contains(&pivot) {
            continue;
        }
        let pairs = m
            .pairs
            .iter()
            .enumerate()
            .map(|(i, p)| Ok(MarkedPair { ideal: controlled_transform(p, tree, c, i)?, mark: p.mark }))
            .collect::<Result<Vec<_>>>()?;
        let mut e = m.e.clone();
        e.push(exc);
        out.push(MultiIdeal { chart: c, w: m.w.clone(), pairs, e });
    }
    Ok(out)
}

/// `𝒯(ℐ, C)`: blows up `C = V(x_c : c ∈ coords)` and returns the transform
/// on each new chart.
pub fn transform_multiideal(tree: &mut ChartTree, m: &MultiIdeal, coords: &[usize], step: usize) -> Result<Vec<MultiIdeal>> {
    let center = AlignedCenter::new(m.chart, coords);
    if !permissible_center_check(tree, m, &center)? {
        return Err(match first_violation(m, &center)? {
            Some(pair) => Error::NotPermissible { pair },
            None => Error::Misaligned("center does not have normal crossings with E".to_string()),
        });
    }
    let (charts, exc) = tree.blowup(&center, step)?;
    transform_on_charts(tree, m, &charts, exc)
}

/// `𝒞(ℐ)`: each `(I, b)` becomes `(I, b), (Δ I, b−1), …, (Δ^{b−1} I, 1)`.
pub fn coefficient_multiideal(m: &MultiIdeal) -> MultiIdeal {
    let mut pairs = Vec::new();
    for p in &m.pairs {
        let mut cur = p.ideal.clone();
        for k in 0..p.mark {
            if k > 0 {
                cur = cur.delta_iter(1);
            }
            pairs.push(MarkedPair { ideal: cur.clone(), mark: p.mark - k });
        }
    }
    MultiIdeal { chart: m.chart, w: m.w.clone(), pairs, e: m.e.clone() }
}

/// Condition (ι) on `Z = V(x_z)`: some `Δ^{(b_i−1)}(I_i)|Z` is nonzero at
/// every sampled point of `Z`.
pub fn condition_iota(tree: &ChartTree, m: &MultiIdeal, z: usize) -> Result<bool> {
    let mut w = m.w.clone();
    w.push(z);
    let pts = sample_points(tree.chart(m.chart), &w, SAMPLE_SEED, SAMPLE_POINTS);
    let tops = m
        .pairs
        .iter()
        .map(|p| p.ideal.delta_iter(p.mark - 1).restrict_to(z))
        .collect::<Result<Vec<_>>>()?;
    for p in pts {
        let mut ok = false;
        for t in &tops {
            if !t.order_at(&p)?.is_infinite() {
                ok = true;
                break;
            }
        }
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `ℐ_Z`: the coefficient multi-ideal restricted to `Z = V(x_z)`.
pub fn inductive_multiideal(tree: &ChartTree, m: &MultiIdeal, z: usize) -> Result<MultiIdeal> {
    let chart = tree.chart(m.chart);
    if z >= chart.nvars() || m.w.contains(&z) {
        return Err(Error::Misaligned("Z must be cut out by a free coordinate".to_string()));
    }
    if chart.hyp_at(z).is_some_and(|h| m.e.contains(&h)) {
        return Err(Error::Misaligned("Z is not transversal to E".to_string()));
    }
    if !condition_iota(tree, m, z)? {
        return Err(Error::ConditionIotaFails(format!(
            "every top coefficient ideal vanishes on {}",
            chart.names[z]
        )));
    }
    let coeff = coefficient_multiideal(m);
    let pairs = coeff
        .pairs
        .iter()
        .map(|p| Ok(MarkedPair { ideal: p.ideal.restrict_to(z)?.simplified(), mark: p.mark }))
        .collect::<Result<Vec<_>>>()?;
    let mut w = m.w.clone();
    w.push(z);
    w.sort_unstable();
    Ok(MultiIdeal { chart: m.chart, w, pairs, e: m.e.clone() })
}

/// An adapted hypersurface `Z = V(x_z)` on `chart` after the triangular
/// change `x_z ↦ equation`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Adapted {
    pub chart: ChartId,
    pub z: usize,
    pub equation: Poly,
}

/// Elements of `Δ^{(b−1)}(I)` of order one at the chart origin that are
/// triangular in an admissible pivot, in search order: generators first,
/// then `g_i + c·g_j`.
pub fn adapted_candidates(tree: &ChartTree, chart: ChartId, pair: &MarkedPair, w: &[usize], e: &[HypId]) -> Vec<(usize, Poly)> {
    let c = tree.chart(chart);
    let d = pair.ideal.delta_iter(pair.mark - 1).simplified();
    let gens = d.gens();
    // A hypersurface outside `e` may serve as pivot, but only unchanged:
    // a triangular change would move it off its coordinate hyperplane.
    let admissible = |z: usize, f: &Poly| {
        !w.contains(&z)
            && match c.hyp_at(z) {
                None => true,
                Some(h) => !e.contains(&h) && f.num_terms() == 1,
            }
    };
    let mut out = Vec::new();
    let consider = |f: Poly, out: &mut Vec<(usize, Poly)>| {
        if f.order_at_origin() != Order::Finite(1) {
            return;
        }
        for z in 0..c.nvars() {
            if admissible(z, &f) && is_triangular(&f, z) {
                let f = if f.num_terms() == 1 { Poly::var(tree.ring(), c.nvars(), z) } else { f.clone() };
                if !out.iter().any(|(_, g)| *g == f) {
                    out.push((z, f));
                }
            }
        }
    };
    for g in gens {
        consider(g.clone(), &mut out);
    }
    for (i, gi) in gens.iter().enumerate() {
        for (j, gj) in gens.iter().enumerate() {
            if i == j {
                continue;
            }
            for k in COMBINATION_COEFFICIENTS {
                consider(gi.add(&gj.scale_rational(&Rational::from_integer(k.into()))), &mut out);
            }
        }
    }
    out
}

/// `f = c·x_z + h` with `c` a nonzero rational and `h` free of `x_z`.
pub fn is_triangular(f: &Poly, z: usize) -> bool {
    let n = f.nvars();
    let lin = crate::poly::Monomial::var(n, z);
    let c = f.coefficient(&lin);
    if c.is_zero() || c.parts()[1..].iter().any(|p| !num_traits::Zero::is_zero(p)) {
        return false;
    }
    !f.terms().any(|(m, _)| m.exps()[z] > 0 && *m != lin)
}

/// Finds an adapted hypersurface for the basic object `(I, b)` at the chart
/// origin and applies the triangular change making it a coordinate
/// hyperplane. `NotNice` when the search finds no order-one element.
pub fn adapted_hypersurface(tree: &mut ChartTree, chart: ChartId, pair: &MarkedPair, w: &[usize], e: &[HypId]) -> Result<Adapted> {
    let cands = adapted_candidates(tree, chart, pair, w, e);
    let (z, f) = cands.into_iter().next().ok_or_else(|| {
        Error::NotNice(format!("no order-one element of the top coefficient ideal at the origin of chart {chart}"))
    })?;
    adapt_with(tree, chart, z, &f)
}

/// Makes `V(f)` the coordinate hyperplane `x_z = 0`.
pub fn adapt_with(tree: &mut ChartTree, chart: ChartId, z: usize, f: &Poly) -> Result<Adapted> {
    let c = tree.triangular_change(chart, z, f)?;
    Ok(Adapted { chart: c, z, equation: f.clone() })
}

/// Pulls a multi-ideal back along the map of `chart` (a triangular change or
/// an extension of its chart).
pub fn move_to_chart(tree: &ChartTree, m: &MultiIdeal, chart: ChartId) -> Result<MultiIdeal> {
    if tree.chart(chart).parent() != Some(m.chart) {
        return Err(Error::Invalid(format!("chart {chart} is not a child of chart {}", m.chart)));
    }
    let images = tree.images(chart).expect("child chart");
    let pairs = m
        .pairs
        .iter()
        .map(|p| Ok(MarkedPair { ideal: p.ideal.pull_back(&images)?, mark: p.mark }))
        .collect::<Result<Vec<_>>>()?;
    Ok(MultiIdeal { chart, w: m.w.clone(), pairs, e: m.e.clone() })
}

/// Largest common mark [`associated_basic_object`] accepts.
pub const MARK_CAP: u32 = 5040;

/// `B_ℐ = (J, N)` with `N = lcm(b_i)` and `J = Σ I_i^{N/b_i}`.
pub fn associated_basic_object(m: &MultiIdeal) -> Result<MarkedPair> {
    let mut n = 1u32;
    for p in &m.pairs {
        n = n.lcm(&p.mark);
        if n > MARK_CAP {
            return Err(Error::LimitExceeded(format!("common mark above {MARK_CAP}")));
        }
    }
    let first = &m.pairs[0].ideal;
    let mut j = IdealRep::zero(first.ring(), first.nvars());
    for p in &m.pairs {
        j = j.sum(&p.ideal.power(n / p.mark)?)?;
    }
    Ok(MarkedPair { ideal: j.simplified(), mark: n })
}

/// An equivalent list of pairs: zero ideals are dropped (their singular set
/// is everything), a principal monomial pair `(x^a, b)` becomes
/// `(x^{a/d}, b/d)` with `d = gcd(a, b)`, and repeated pairs are removed.
pub fn reduced_pairs(pairs: &[MarkedPair]) -> Vec<MarkedPair> {
    let mut out: Vec<MarkedPair> = Vec::new();
    for p in pairs {
        if p.ideal.is_zero() {
            continue;
        }
        let q = reduce_monomial_pair(p).unwrap_or_else(|| p.clone());
        if !out.contains(&q) {
            out.push(q);
        }
    }
    if out.is_empty() {
        return pairs.to_vec();
    }
    out
}

fn reduce_monomial_pair(p: &MarkedPair) -> Option<MarkedPair> {
    let [g] = p.ideal.gens() else { return None };
    if g.num_terms() != 1 {
        return None;
    }
    let (m, c) = g.terms().next()?;
    if c.valuation()? != 0 {
        return None;
    }
    let d = m.exps().iter().fold(p.mark, |acc, &e| acc.gcd(&e));
    let exps = m.exps().iter().map(|&e| e / d).collect();
    let ring = p.ideal.ring();
    let f = Poly::term(ring, crate::poly::Monomial::new(exps), crate::poly::Coef::one(ring));
    Some(MarkedPair { ideal: IdealRep::principal(f), mark: p.mark / d })
}

/// One operation of an equivalence spot-check script.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScriptOp {
    /// Blow up `V(x_c : c ∈ coords)` on the `chart_index`-th current chart.
    Blowup { chart_index: usize, coords: Vec<usize> },
    /// Product with an affine line, on every current chart.
    Extend,
}

/// Result of [`equiv_spotcheck`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpotcheckOutcome {
    /// Sampled singular sets agree after every step.
    Agree,
    /// Disagreement at a sampled point after `step` operations.
    Disagree { step: usize, chart: ChartId, point: Vec<Rational> },
    /// The script is not valid for `side` (0 or 1) at `step`.
    ScriptInvalid { side: usize, step: usize, error: Error },
}

/// Finite spot-check of `ℐ ∼ 𝒥`: both are pushed through the script and
/// their singular sets are compared at the sampled points of every chart
/// after each step (over an artinian ring, the singular sets of the fibers).
/// This is evidence, not a decision procedure.
pub fn equiv_spotcheck(tree: &mut ChartTree, a: &MultiIdeal, b: &MultiIdeal, script: &[ScriptOp]) -> Result<SpotcheckOutcome> {
    if a.chart != b.chart || a.w != b.w {
        return Err(Error::Misaligned(String::from("both sides must share the chart and W")));
    }
    let mut sides: [Vec<MultiIdeal>; 2] = [alloc::vec![a.clone()], alloc::vec![b.clone()]];
    if let Some(out) = compare(tree, &sides, 0)? {
        return Ok(out);
    }
    for (step, op) in script.iter().enumerate() {
        let step = step + 1;
        match op {
            ScriptOp::Blowup { chart_index, coords } => {
                let idx = *chart_index;
                if idx >= sides[0].len() {
                    return Err(Error::Invalid(format!("script names chart index {idx}")));
                }
                let center = AlignedCenter::new(sides[0][idx].chart, coords);
                for (s, side) in sides.iter().enumerate() {
                    let m = &side[idx];
                    let ok = permissible_center_check(tree, m, &center);
                    match ok {
                        Ok(true) => {}
                        Ok(false) => {
                            let error = match first_violation(m, &center)? {
                                Some(pair) => Error::NotPermissible { pair },
                                None => Error::Misaligned(String::from("no normal crossings with E")),
                            };
                            return Ok(SpotcheckOutcome::ScriptInvalid { side: s, step, error });
                        }
                        Err(error) => return Ok(SpotcheckOutcome::ScriptInvalid { side: s, step, error }),
                    }
                }
                let (charts, exc) = tree.blowup(&center, step)?;
                for side in sides.iter_mut() {
                    let m = side.remove(idx);
                    let new = transform_on_charts(tree, &m, &charts, exc)?;
                    for (k, t) in new.into_iter().enumerate() {
                        side.insert(idx + k, t);
                    }
                }
            }
            ScriptOp::Extend => {
                let charts: Vec<ChartId> = sides[0].iter().map(|m| m.chart).collect();
                let mut new_charts = Vec::new();
                for c in charts {
                    let name = format!("t{}", tree.chart(c).nvars());
                    new_charts.push(tree.extend(c, name));
                }
                for side in sides.iter_mut() {
                    for (m, &c) in side.iter_mut().zip(&new_charts) {
                        *m = move_to_chart(tree, m, c)?;
                    }
                }
            }
        }
        if let Some(out) = compare(tree, &sides, step)? {
            return Ok(out);
        }
    }
    Ok(SpotcheckOutcome::Agree)
}

fn compare(tree: &ChartTree, sides: &[Vec<MultiIdeal>; 2], step: usize) -> Result<Option<SpotcheckOutcome>> {
    for (ma, mb) in sides[0].iter().zip(&sides[1]) {
        for p in ma.sample(tree) {
            if ma.fiber_sing_member(&p)? != mb.fiber_sing_member(&p)? {
                return Ok(Some(SpotcheckOutcome::Disagree { step, chart: ma.chart, point: p }));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{int, CoefRing};
    use alloc::string::ToString;
    use alloc::vec;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn ideal(g: &[&str], v: &[&str], ring: CoefRing) -> IdealRep {
        IdealRep::from_gens(g.iter().map(|s| Poly::parse(s, &names(v), ring).unwrap()).collect()).unwrap()
    }

    fn setup(v: &[&str], ring: CoefRing, pairs: &[(&[&str], u32)]) -> (ChartTree, MultiIdeal) {
        let (t, root) = ChartTree::new(ring, names(v), &[], &[]).unwrap();
        let pairs = pairs.iter().map(|(g, b)| MarkedPair::new(ideal(g, v, ring), *b).unwrap()).collect();
        let m = MultiIdeal::new(&t, root, &[], pairs, vec![]).unwrap();
        (t, m)
    }

    fn omega_example() -> (ChartTree, MultiIdeal) {
        setup(&["x", "y"], CoefRing::FIELD, &[(&["x^2*y^4"], 2), (&["x^4*y"], 3)])
    }

    #[test]
    fn singular_set_of_the_omega_example() {
        let (_, m) = omega_example();
        for t in [-3, 0, 1, 7] {
            assert!(sing_member_multi(&m, &[int(0), int(t)]).unwrap());
        }
        assert!(!sing_member_multi(&m, &[int(1), int(0)]).unwrap());
        let (_, r) = setup(&["x"], CoefRing::FIELD, &[(&["1"], 1)]);
        assert!(!r.sing_member(&[int(0)]).unwrap());
    }

    #[test]
    fn permissibility_examples() {
        let (t, m) = omega_example();
        assert!(permissible_center_check(&t, &m, &AlignedCenter::new(0, &[0])).unwrap());
        assert!(!permissible_center_check(&t, &m, &AlignedCenter::new(0, &[1])).unwrap());
        let (t2, cusp) = setup(&["x", "y"], CoefRing::FIELD, &[(&["y^2 - x^3"], 2)]);
        assert!(permissible_center_check(&t2, &cusp, &AlignedCenter::new(0, &[0, 1])).unwrap());
    }

    #[test]
    fn transforms() {
        let (mut t, cusp) = setup(&["x", "y"], CoefRing::FIELD, &[(&["y^2 - x^3"], 2)]);
        let out = transform_multiideal(&mut t, &cusp, &[0, 1], 1).unwrap();
        assert_eq!(out[0].pairs[0].ideal, ideal(&["y^2 - x"], &["x", "y"], CoefRing::FIELD));
        assert_eq!(out[0].e.len(), 1);
        let (mut t, m) = omega_example();
        let out = transform_multiideal(&mut t, &m, &[0], 1).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].pairs[0].ideal, ideal(&["y^4"], &["x", "y"], CoefRing::FIELD));
        assert_eq!(out[0].pairs[1].ideal, ideal(&["x*y"], &["x", "y"], CoefRing::FIELD));
        let (mut t, smooth) = setup(&["x", "y"], CoefRing::FIELD, &[(&["y - x^3"], 2)]);
        assert!(transform_multiideal(&mut t, &smooth, &[0, 1], 1).is_err());
    }

    #[test]
    fn coefficient_and_inductive_cusp() {
        let (t, cusp) = setup(&["x", "y"], CoefRing::FIELD, &[(&["y^2 - x^3"], 2)]);
        let c = coefficient_multiideal(&cusp);
        assert_eq!(c.pairs.len(), 2);
        assert!(c.pairs[1].ideal.same_ideal(&ideal(&["y", "x^2"], &["x", "y"], CoefRing::FIELD)).unwrap());
        let z = inductive_multiideal(&t, &cusp, 1).unwrap();
        assert_eq!(z.dim(), 1);
        assert!(z.pairs[0].ideal.same_ideal(&ideal(&["x^3"], &["x", "y"], CoefRing::FIELD)).unwrap());
        assert!(z.pairs[1].ideal.same_ideal(&ideal(&["x^2"], &["x", "y"], CoefRing::FIELD)).unwrap());
        let (_, b1) = setup(&["x"], CoefRing::FIELD, &[(&["x^3"], 1)]);
        assert_eq!(coefficient_multiideal(&b1).pairs.len(), 1);
    }

    #[test]
    fn condition_iota_failure() {
        let (t, m) = setup(&["x", "z"], CoefRing::FIELD, &[(&["z^2"], 2)]);
        assert!(matches!(inductive_multiideal(&t, &m, 1), Err(Error::ConditionIotaFails(_))));
    }

    #[test]
    fn adapted_hypersurfaces() {
        let (mut t, cusp) = setup(&["x", "y"], CoefRing::FIELD, &[(&["y^2 - x^3"], 2)]);
        let a = adapted_hypersurface(&mut t, 0, &cusp.pairs[0], &[], &[]).unwrap();
        assert_eq!((a.chart, a.z), (0, 1));
        let (mut t, m) = setup(&["x", "y"], CoefRing::FIELD, &[(&["x^2 - y^5"], 2)]);
        let a = adapted_hypersurface(&mut t, 0, &m.pairs[0], &[], &[]).unwrap();
        assert_eq!(a.z, 0);
        let (mut t, m) = setup(&["x"], CoefRing::FIELD, &[(&["x^3"], 2)]);
        assert!(matches!(adapted_hypersurface(&mut t, 0, &m.pairs[0], &[], &[]), Err(Error::NotNice(_))));
    }

    #[test]
    fn associated_basic_objects() {
        let ring = CoefRing::artinian(2).unwrap();
        let (_, m) = setup(&["x"], ring, &[(&["x^3"], 3), (&["eps*x + x^3"], 2)]);
        let b = associated_basic_object(&m).unwrap();
        assert_eq!(b.mark, 6);
        assert!(b.ideal.same_ideal(&ideal(&["x^6"], &["x"], ring)).unwrap());
        let (_, m) = omega_example();
        let b = associated_basic_object(&m).unwrap();
        assert!(b.ideal.same_ideal(&ideal(&["x^6*y^12", "x^8*y^2"], &["x", "y"], CoefRing::FIELD)).unwrap());
        let (_, single) = setup(&["x"], CoefRing::FIELD, &[(&["x^2"], 2)]);
        assert_eq!(associated_basic_object(&single).unwrap(), single.pairs[0]);
    }

    #[test]
    fn spotchecks() {
        let (mut t, m) = omega_example();
        let c = coefficient_multiideal(&m);
        assert_eq!(equiv_spotcheck(&mut t, &m, &c, &[]).unwrap(), SpotcheckOutcome::Agree);
        let b = MultiIdeal::new(&t, 0, &[], vec![associated_basic_object(&m).unwrap()], vec![]).unwrap();
        let script = [ScriptOp::Blowup { chart_index: 0, coords: vec![0] }, ScriptOp::Extend];
        assert_eq!(equiv_spotcheck(&mut t, &m, &b, &script).unwrap(), SpotcheckOutcome::Agree);

        let ring = CoefRing::artinian(2).unwrap();
        let (mut t, m) = setup(&["x"], ring, &[(&["x^3"], 3), (&["eps*x + x^3"], 2)]);
        let b = MultiIdeal::new(&t, 0, &[], vec![associated_basic_object(&m).unwrap()], vec![]).unwrap();
        let out = equiv_spotcheck(&mut t, &b, &m, &[ScriptOp::Blowup { chart_index: 0, coords: vec![0] }]).unwrap();
        assert_eq!(out, SpotcheckOutcome::ScriptInvalid { side: 1, step: 1, error: Error::NotPermissible { pair: 1 } });
    }

    #[test]
    fn reduced_pairs_normalizes_monomial_powers() {
        let v = ["x", "y"];
        let r = CoefRing::FIELD;
        let pairs = vec![
            MarkedPair::new(ideal(&["x^4"], &v, r), 4).unwrap(),
            MarkedPair::new(IdealRep::zero(r, 2), 3).unwrap(),
            MarkedPair::new(ideal(&["x^2"], &v, r), 2).unwrap(),
            MarkedPair::new(ideal(&["x^2*y^4"], &v, r), 6).unwrap(),
            MarkedPair::new(ideal(&["x + y^2"], &v, r), 2).unwrap(),
        ];
        let out = reduced_pairs(&pairs);
        assert_eq!(
            out,
            vec![
                MarkedPair::new(ideal(&["x"], &v, r), 1).unwrap(),
                MarkedPair::new(ideal(&["x*y^2"], &v, r), 3).unwrap(),
                MarkedPair::new(ideal(&["x + y^2"], &v, r), 2).unwrap(),
            ]
        );
        let zeros = vec![MarkedPair::new(IdealRep::zero(r, 2), 3).unwrap()];
        assert_eq!(reduced_pairs(&zeros), zeros);
    }
}
