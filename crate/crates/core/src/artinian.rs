//! Multi-ideals over `A = ℚ[ε]/(ε^m)`: fibers, orders along centers,
//! `v`-permissible centers and transforms, the relative `Δ`, inductive
//! objects over `A` and the lifting checks for centers of inductive objects.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::charts::{center_normal_crossings, AlignedCenter, ChartId, ChartMap, ChartTree, HypId, Origin};
use crate::error::{Error, Result};
use crate::ideals::IdealRep;
use crate::multiideal::{
    associated_basic_object, coefficient_multiideal, inductive_multiideal, transform_on_charts, MultiIdeal,
};
use crate::pairs::MarkedPair;
use crate::poly::{CoefRing, Order, Poly};
use crate::resolution::{CenterRecord, ResolveOptions, Resolver, TraceStep};

/// A multi-ideal over an artinian ring with its fiber.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AMultiIdeal {
    inner: MultiIdeal,
    fiber: MultiIdeal,
}

impl AMultiIdeal {
    pub fn new(tree: &ChartTree, m: MultiIdeal) -> Result<Self> {
        if tree.ring().is_field() {
            return Err(Error::NotArtinian);
        }
        let fiber = fiber(&m)?;
        Ok(AMultiIdeal { inner: m, fiber })
    }

    pub fn inner(&self) -> &MultiIdeal {
        &self.inner
    }

    pub fn fiber(&self) -> &MultiIdeal {
        &self.fiber
    }

    /// Nonzero means the fiber is nonzero.
    pub fn is_nonzero(&self, fiber_tree: &ChartTree) -> Result<bool> {
        self.fiber.is_nonzero(fiber_tree)
    }
}

fn ideal_fiber(i: &IdealRep) -> Result<IdealRep> {
    if i.ring().is_field() {
        Ok(i.clone())
    } else {
        i.set_fiber()
    }
}

/// `ℐ^(0)`: every generator reduced modulo `ε`. A multi-ideal over a field
/// is its own fiber.
pub fn fiber(m: &MultiIdeal) -> Result<MultiIdeal> {
    let pairs = m
        .pairs
        .iter()
        .map(|p| Ok(MarkedPair { ideal: ideal_fiber(&p.ideal)?, mark: p.mark }))
        .collect::<Result<Vec<_>>>()?;
    Ok(MultiIdeal { chart: m.chart, w: m.w.clone(), pairs, e: m.e.clone() })
}

/// `ν(I, C)` and `ν(I^(0), C^(0))` for one pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairOrders {
    pub nu: Order,
    pub fiber_nu: Order,
    pub mark: u32,
}

/// Data deciding `v`-permissibility of a center.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VPermissibility {
    pub normal_crossings: bool,
    pub pairs: Vec<PairOrders>,
}

impl VPermissibility {
    /// First pair (0-based) with `ν(I_i, C) < b_i`.
    pub fn first_failing_pair(&self) -> Option<usize> {
        self.pairs.iter().position(|p| !p.nu.at_least(p.mark))
    }

    /// Conditions (a), (b) and (c) for the index `v` (0-based).
    pub fn permissible_for(&self, v: usize) -> bool {
        self.normal_crossings
            && self.first_failing_pair().is_none()
            && self.pairs.get(v).is_some_and(|p| p.nu == p.fiber_nu)
    }

    /// The first `v` for which the center is `v`-permissible.
    pub fn permissible(&self) -> Option<usize> {
        (0..self.pairs.len()).find(|&v| self.permissible_for(v))
    }
}

/// Orders of every pair along `center`, over `A` and on the fiber.
pub fn v_orders(tree: &ChartTree, m: &MultiIdeal, center: &AlignedCenter) -> Result<VPermissibility> {
    if center.chart != m.chart {
        return Err(Error::Misaligned(format!("center lives on chart {}, not {}", center.chart, m.chart)));
    }
    let normal_crossings = center_normal_crossings(center, &m.e, tree.chart(m.chart));
    let pairs = m
        .pairs
        .iter()
        .map(|p| {
            Ok(PairOrders {
                nu: p.ideal.nu_along(center, &m.w)?,
                fiber_nu: ideal_fiber(&p.ideal)?.nu_along(center, &m.w)?,
                mark: p.mark,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(VPermissibility { normal_crossings, pairs })
}

/// `C` is a `v`-permissible center (`v` 0-based).
pub fn v_permissible_check(tree: &ChartTree, m: &MultiIdeal, center: &AlignedCenter, v: usize) -> Result<bool> {
    if v >= m.pairs.len() {
        return Err(Error::IndexOutOfRange { index: v, nvars: m.pairs.len() });
    }
    Ok(v_orders(tree, m, center)?.permissible_for(v))
}

/// `Δ(I/S)`: generators and their partials in the chart coordinates, which
/// are `A`-regular parameters.
pub fn delta_relative(i: &IdealRep) -> IdealRep {
    i.delta()
}

/// `Δ^(j)(I/S)`.
pub fn delta_relative_iter(i: &IdealRep, j: u32) -> IdealRep {
    i.delta_iter(j)
}

/// `𝒞(I/S)` with the relative `Δ`.
pub fn coefficient_multiideal_a(m: &MultiIdeal) -> MultiIdeal {
    coefficient_multiideal(m)
}

/// `V(x_z)` is adapted to the basic object `b`: `x_z ∈ Δ^(b−1)(I/S)`.
pub fn is_adapted(b: &MultiIdeal, z: usize) -> Result<bool> {
    let pair = single_pair(b)?;
    let n = pair.ideal.nvars();
    let top = delta_relative_iter(&pair.ideal, pair.mark - 1).simplified();
    top.member(&Poly::var(pair.ideal.ring(), n, z))
}

fn single_pair(b: &MultiIdeal) -> Result<&MarkedPair> {
    match b.pairs.as_slice() {
        [p] => Ok(p),
        _ => Err(Error::Invalid(format!("a basic object has exactly one pair, found {}", b.pairs.len()))),
    }
}

/// `ℐ_Z` for a nice basic object over `A`; `NotNice` unless `V(x_z)` is
/// adapted.
pub fn inductive_multiideal_a(tree: &ChartTree, b: &MultiIdeal, z: usize) -> Result<MultiIdeal> {
    match is_adapted(b, z) {
        Ok(true) => {}
        Ok(false) => return Err(Error::NotNice(format!("{} is not in the top coefficient ideal", tree.chart(b.chart).names[z]))),
        Err(Error::UndecidableMembership) => {
            return Err(Error::NotNice("membership of the adapted equation is undecidable here".to_string()))
        }
        Err(e) => return Err(e),
    }
    inductive_multiideal(tree, b, z)
}

/// Outcome of the lifting check for a center of an inductive object.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftReport {
    /// Normal crossings and `ν(Δ^(i)(I/S)|Z, C) ≥ b − i` for all `i < b`.
    pub hypotheses: bool,
    /// `ν(I, C)` over `A`.
    pub nu: Order,
    /// `ν(I^(0), C^(0))`.
    pub fiber_nu: Order,
    /// Direct check: normal crossings, `ν(I, C) ≥ b` and `ν(I^(0), C^(0)) = ν(I, C)`.
    pub permissible: bool,
}

impl LiftReport {
    /// The implication "hypotheses ⇒ permissible" holds on this instance.
    pub fn implication_holds(&self) -> bool {
        !self.hypotheses || self.permissible
    }
}

/// Checks the hypotheses on `C ⊆ Z = V(x_z)` and, independently, the
/// permissibility of `C` for the basic object `b` by direct order
/// computation.
pub fn lift_report(tree: &ChartTree, b: &MultiIdeal, z: usize, center: &AlignedCenter) -> Result<LiftReport> {
    let pair = single_pair(b)?;
    if center.chart != b.chart || !center.coords.contains(&z) || !b.w.iter().all(|w| center.coords.contains(w)) {
        return Err(Error::Misaligned("the center is not an aligned subvariety of Z".to_string()));
    }
    let nc = center_normal_crossings(center, &b.e, tree.chart(b.chart));
    let mut wz = b.w.clone();
    wz.push(z);
    let mut hypotheses = nc;
    let mut cur = pair.ideal.clone();
    for i in 0..pair.mark {
        if i > 0 {
            cur = delta_relative(&cur).simplified();
        }
        let restricted = cur.restrict_to(z)?;
        if !restricted.nu_along(center, &wz)?.at_least(pair.mark - i) {
            hypotheses = false;
            break;
        }
    }
    let nu = pair.ideal.nu_along(center, &b.w)?;
    let fiber_nu = ideal_fiber(&pair.ideal)?.nu_along(center, &b.w)?;
    let permissible = nc && nu.at_least(pair.mark) && nu == fiber_nu;
    Ok(LiftReport { hypotheses, nu, fiber_nu, permissible })
}

/// `true` when the hypotheses hold and the direct check confirms that `C`
/// is permissible for `b`.
pub fn inductive_center_lift(tree: &ChartTree, b: &MultiIdeal, z: usize, center: &AlignedCenter) -> Result<bool> {
    let r = lift_report(tree, b, z, center)?;
    Ok(r.hypotheses && r.permissible)
}

/// Orders of one restricted coefficient pair along `C`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RestrictedPair {
    pub ideal: IdealRep,
    pub mark: u32,
    pub nu: Order,
    pub fiber_nu: Order,
}

/// The converse failure: a center permissible for a basic object over `A`
/// but not for its inductive object.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectionWitness {
    pub names: Vec<String>,
    pub ideal: IdealRep,
    pub nu: Order,
    pub fiber_nu: Order,
    pub permissible: bool,
    pub restricted: Vec<RestrictedPair>,
    pub inductive_permissible: bool,
}

/// `((z² + εx², z³ + x³), 2)` over `ℚ[ε]/(ε²)` in the chart `A[x, z]`, with
/// `Z = V(z)` and `C = V(x, z)`.
pub fn direction_failure_instance() -> Result<(ChartTree, MultiIdeal, usize, AlignedCenter)> {
    let ring = CoefRing::artinian(2)?;
    let names = alloc::vec!["x".to_string(), "z".to_string()];
    let (tree, root) = ChartTree::new(ring, names.clone(), &[], &[])?;
    let gens = ["z^2+eps*x^2", "z^3+x^3"].iter().map(|s| Poly::parse(s, &names, ring)).collect::<Result<Vec<_>>>()?;
    let b = MultiIdeal::new(&tree, root, &[], alloc::vec![MarkedPair::new(IdealRep::from_gens(gens)?, 2)?], alloc::vec![])?;
    Ok((tree, b, 1, AlignedCenter::new(root, &[0, 1])))
}

/// Reproduces the converse failure on [`direction_failure_instance`].
pub fn direction_failure_witness() -> Result<DirectionWitness> {
    let (tree, b, z, center) = direction_failure_instance()?;
    let pair = single_pair(&b)?;
    let nu = pair.ideal.nu_along(&center, &b.w)?;
    let fiber_nu = ideal_fiber(&pair.ideal)?.nu_along(&center, &b.w)?;
    let permissible = v_orders(&tree, &b, &center)?.permissible_for(0);
    let bz = inductive_multiideal_a(&tree, &b, z)?;
    let report = v_orders(&tree, &bz, &center)?;
    let restricted = bz
        .pairs
        .iter()
        .zip(&report.pairs)
        .map(|(p, o)| RestrictedPair { ideal: p.ideal.clone(), mark: p.mark, nu: o.nu, fiber_nu: o.fiber_nu })
        .collect();
    Ok(DirectionWitness {
        names: tree.chart(b.chart).names.clone(),
        ideal: pair.ideal.clone(),
        nu,
        fiber_nu,
        permissible,
        restricted,
        inductive_permissible: report.permissible().is_some(),
    })
}

/// `𝒯(ℐ, C)` for a `v`-permissible center; `NotPermissible` names the first
/// pair violating (b), or `v` when only (c) fails.
pub fn transform_multiideal_a(
    tree: &mut ChartTree,
    m: &MultiIdeal,
    coords: &[usize],
    v: usize,
    step: usize,
) -> Result<Vec<MultiIdeal>> {
    let center = AlignedCenter::new(m.chart, coords);
    let report = v_orders(tree, m, &center)?;
    if !report.permissible_for(v) {
        if !report.normal_crossings {
            return Err(Error::Misaligned("center does not have normal crossings with E".to_string()));
        }
        return Err(Error::NotPermissible { pair: report.first_failing_pair().unwrap_or(v) });
    }
    let (charts, exc) = tree.blowup(&center, step)?;
    transform_on_charts(tree, m, &charts, exc)
}

/// Result of [`equiresolve_attempt`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EquiresolveOutcome {
    /// Every center lifted; `v` lists the index used at each step and the
    /// fibers are resolved at the end.
    Equiresolution { steps: Vec<TraceStep>, v: Vec<usize> },
    /// The center of step `step` is not permissible over `A`.
    LiftFails { step: usize, center: CenterRecord, report: VPermissibility, steps: Vec<TraceStep> },
}

/// Replays the algorithmic centers of the fiber over `A`, checking at each
/// step that the center is permissible for the `A`-multi-ideal.
pub fn equiresolve_attempt(tree: &ChartTree, m: &MultiIdeal, options: ResolveOptions) -> Result<EquiresolveOutcome> {
    let ftree = tree.fiber()?;
    let fm = fiber(m)?;
    let mut resolver = Resolver::new(ftree, &fm, options)?;
    let mut atree = tree.clone();
    let mut sides: BTreeMap<ChartId, MultiIdeal> = BTreeMap::new();
    sides.insert(m.chart, m.clone());
    let mut steps = Vec::new();
    let mut used = Vec::new();
    loop {
        if steps.len() >= options.step_cap {
            return Err(Error::NonTermination(options.step_cap));
        }
        let before = resolver.tree.charts().len();
        let step = match resolver.step()? {
            None => break,
            Some(s) => s,
        };
        resolver.tree.replay_from(&mut atree, before)?;
        for id in before..atree.charts().len() {
            if let ChartMap::Triangular { parent, .. } = &atree.chart(id).map {
                if let Some(side) = sides.remove(parent) {
                    let moved = crate::multiideal::move_to_chart(&atree, &side, id)?;
                    sides.insert(id, moved);
                }
            }
        }
        let mut v_here = None;
        for rec in &step.centers {
            let side = sides
                .get(&rec.chart)
                .ok_or_else(|| Error::Invalid(format!("no data over A on chart {}", rec.label)))?;
            let center = AlignedCenter::new(rec.chart, &rec.coord_ids);
            let report = v_orders(&atree, side, &center)?;
            match report.permissible() {
                Some(v) => {
                    v_here.get_or_insert(v);
                }
                None => {
                    return Ok(EquiresolveOutcome::LiftFails { step: step.index, center: rec.clone(), report, steps });
                }
            }
        }
        for rec in &step.centers {
            let side = sides.remove(&rec.chart).expect("checked above");
            let kids: Vec<ChartId> = (before..atree.charts().len())
                .filter(|&id| match &atree.chart(id).map {
                    ChartMap::Blowup { parent, .. } | ChartMap::Divisor { parent, .. } => *parent == rec.chart,
                    _ => false,
                })
                .collect();
            let exc = exceptional_of(&atree, &kids)?;
            for t in transform_on_charts(&atree, &side, &kids, exc)? {
                sides.insert(t.chart, t);
            }
        }
        used.push(v_here.unwrap_or(0));
        steps.push(step);
    }
    for side in sides.values() {
        let f = fiber(side)?;
        for p in f.sample(&resolver.tree) {
            if f.sing_member(&p)? {
                return Err(Error::UnsupportedLocus(format!(
                    "the fiber is still singular on chart {}",
                    atree.chart(side.chart).label
                )));
            }
        }
    }
    Ok(EquiresolveOutcome::Equiresolution { steps, v: used })
}

fn exceptional_of(tree: &ChartTree, kids: &[ChartId]) -> Result<HypId> {
    let first = kids.first().ok_or_else(|| Error::Invalid("the blow-up produced no charts".to_string()))?;
    let pivot = crate::pairs::exceptional_coord(tree, *first)?;
    let h = tree.chart(*first).hyp_at(pivot).ok_or_else(|| Error::Invalid("no exceptional hypersurface".to_string()))?;
    debug_assert!(matches!(tree.hypersurface(h).origin, Origin::Exceptional { .. }));
    Ok(h)
}

/// Associated basic object over `A`.
pub fn associated_basic_object_a(m: &MultiIdeal) -> Result<MarkedPair> {
    associated_basic_object(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn line_problem() -> (ChartTree, MultiIdeal) {
        let ring = CoefRing::artinian(2).unwrap();
        let names = vec!["x".to_string()];
        let (tree, root) = ChartTree::new(ring, names.clone(), &[], &[]).unwrap();
        let p = |s: &str| IdealRep::principal(Poly::parse(s, &names, ring).unwrap());
        let m = MultiIdeal::new(
            &tree,
            root,
            &[],
            vec![MarkedPair::new(p("x^3"), 3).unwrap(), MarkedPair::new(p("eps*x+x^3"), 2).unwrap()],
            vec![],
        )
        .unwrap();
        (tree, m)
    }

    #[test]
    fn basic_object_of_the_line_problem() {
        let (tree, m) = line_problem();
        let c = AlignedCenter::new(0, &[0]);
        let r = v_orders(&tree, &m, &c).unwrap();
        assert_eq!(r.pairs[1].nu, Order::Finite(1));
        assert_eq!(r.first_failing_pair(), Some(1));
        assert_eq!(r.permissible(), None);
        let b = associated_basic_object_a(&m).unwrap();
        assert_eq!(b.mark, 6);
        let x6 = IdealRep::principal(Poly::parse("x^6", &["x".to_string()], tree.ring()).unwrap());
        assert!(b.ideal.same_ideal(&x6).unwrap());
        let bm = MultiIdeal { chart: 0, w: vec![], pairs: vec![b], e: vec![] };
        assert_eq!(v_orders(&tree, &bm, &c).unwrap().permissible(), Some(0));
        let f = fiber(&m).unwrap();
        assert_eq!(f.pairs[1].ideal.gens()[0].to_string_with(&["x".to_string()]), "x^3");
    }

    #[test]
    fn direction_failure() {
        let w = direction_failure_witness().unwrap();
        assert_eq!((w.nu, w.fiber_nu), (Order::Finite(2), Order::Finite(2)));
        assert!(w.permissible);
        let got: Vec<(Order, Order)> = w.restricted.iter().map(|r| (r.nu, r.fiber_nu)).collect();
        assert_eq!(got, vec![(Order::Finite(2), Order::Finite(3)), (Order::Finite(1), Order::Finite(2))]);
        assert!(!w.inductive_permissible);
        let (tree, b, z, c) = direction_failure_instance().unwrap();
        let r = lift_report(&tree, &b, z, &c).unwrap();
        assert!(r.hypotheses && r.permissible);
    }

    #[test]
    fn equiresolution_and_lift_failure() {
        let (tree, m) = line_problem();
        match equiresolve_attempt(&tree, &m, ResolveOptions::default()).unwrap() {
            EquiresolveOutcome::LiftFails { step, report, .. } => {
                assert_eq!(step, 0);
                assert_eq!(report.first_failing_pair(), Some(1));
            }
            other => panic!("expected a lift failure, got {other:?}"),
        }
        let ring = CoefRing::artinian(2).unwrap();
        let names = vec!["x".to_string(), "z".to_string()];
        let (tree, root) = ChartTree::new(ring, names.clone(), &[], &[]).unwrap();
        let f = Poly::parse("z^2+eps*x^2+x^3", &names, ring).unwrap();
        let m = MultiIdeal::new(&tree, root, &[], vec![MarkedPair::new(IdealRep::principal(f), 2).unwrap()], vec![])
            .unwrap();
        match equiresolve_attempt(&tree, &m, ResolveOptions::default()).unwrap() {
            EquiresolveOutcome::Equiresolution { steps, .. } => assert_eq!(steps.len(), 1),
            other => panic!("expected an equiresolution, got {other:?}"),
        }
    }
}
