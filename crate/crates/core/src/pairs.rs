//! Marked pairs `(I, b)`: singular sets, permissibility along aligned
//! centers, the three blow-up transforms and the proper factorization ledger.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use crate::charts::{AlignedCenter, ChartId, ChartMap, ChartTree, HypId};
use crate::error::{Error, Result};
use crate::ideals::IdealRep;
use crate::poly::{Order, Rational};

/// A marked ideal `(I, b)` with `b ≥ 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkedPair {
    pub ideal: IdealRep,
    pub mark: u32,
}

impl MarkedPair {
    pub fn new(ideal: IdealRep, mark: u32) -> Result<Self> {
        if mark == 0 {
            return Err(Error::Invalid("mark must be positive".to_string()));
        }
        Ok(MarkedPair { ideal, mark })
    }

    /// `ν_p(I) ≥ b`.
    pub fn sing_member(&self, p: &[Rational]) -> Result<bool> {
        Ok(self.ideal.order_at(p)?.at_least(self.mark))
    }

    /// `ν(I, C) ≥ b` for an aligned center inside `W`.
    pub fn permissible_along(&self, center: &AlignedCenter, w: &[usize]) -> Result<bool> {
        Ok(self.ideal.nu_along(center, w)?.at_least(self.mark))
    }
}

/// Coordinate of the exceptional hypersurface in a chart produced by a
/// blow-up.
pub fn exceptional_coord(tree: &ChartTree, chart: ChartId) -> Result<usize> {
    match &tree.chart(chart).map {
        ChartMap::Blowup { pivot, .. } => Ok(*pivot),
        ChartMap::Divisor { coord, .. } => Ok(*coord),
        _ => Err(Error::Misaligned(format!("chart {chart} is not a blow-up chart"))),
    }
}

/// The center a blow-up chart came from, as a center of its parent chart.
pub fn blowup_center(tree: &ChartTree, chart: ChartId) -> Result<AlignedCenter> {
    match &tree.chart(chart).map {
        ChartMap::Blowup { parent, center, .. } => Ok(AlignedCenter::new(*parent, center)),
        ChartMap::Divisor { parent, coord } => Ok(AlignedCenter::new(*parent, &[*coord])),
        _ => Err(Error::Misaligned(format!("chart {chart} is not a blow-up chart"))),
    }
}

/// `I·𝒪_{W₁}` on a blow-up chart: the generators pulled back.
pub fn total_transform(ideal: &IdealRep, tree: &ChartTree, chart: ChartId) -> Result<IdealRep> {
    match tree.images(chart) {
        None => Ok(ideal.clone()),
        Some(images) => ideal.pull_back(&images),
    }
}

/// `ℰ^{-b}·I·𝒪_{W₁}`; `NotPermissible { pair: index }` when some generator
/// is not divisible by `ℰ^b`.
pub fn controlled_transform(pair: &MarkedPair, tree: &ChartTree, chart: ChartId, index: usize) -> Result<IdealRep> {
    let exc = exceptional_coord(tree, chart)?;
    let total = total_transform(&pair.ideal, tree, chart)?;
    total.div_var_pow(exc, pair.mark).ok_or(Error::NotPermissible { pair: index })
}

/// `ℰ^{-a}·I·𝒪_{W₁}` with `a = ν(I, C)`; returns the transform and `a`.
pub fn proper_transform(ideal: &IdealRep, tree: &ChartTree, chart: ChartId, w: &[usize]) -> Result<(IdealRep, u32)> {
    let exc = exceptional_coord(tree, chart)?;
    let center = blowup_center(tree, chart)?;
    let a = match ideal.nu_along(&center, w)? {
        Order::Finite(a) => a,
        Order::Infinite => 0,
    };
    let total = total_transform(ideal, tree, chart)?;
    let out = total
        .div_var_pow(exc, a)
        .ok_or_else(|| Error::Invalid("pull-back not divisible by the order along the center".to_string()))?;
    Ok((out, a))
}

/// One pair's proper factorization `I[j] = Ī[j]·∏ ℰ_q^{a_q}` on a chart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LedgerEntry {
    pub ibar: IdealRep,
    /// Hypersurface ↦ positive exponent.
    pub exps: BTreeMap<HypId, u32>,
}

/// Proper factorizations of all pairs of a multi-ideal on one chart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProperLedger {
    pub chart: ChartId,
    pub entries: Vec<LedgerEntry>,
}

impl ProperLedger {
    /// Step-zero ledger: `Ī[0] = I`, no exponents.
    pub fn trivial(chart: ChartId, ideals: &[IdealRep]) -> Self {
        ProperLedger {
            chart,
            entries: ideals.iter().map(|i| LedgerEntry { ibar: i.clone(), exps: BTreeMap::new() }).collect(),
        }
    }

    /// Step-zero ledger that factors out the largest powers of the listed
    /// hypersurfaces (declared exceptional in the input).
    pub fn factored(tree: &ChartTree, chart: ChartId, ideals: &[IdealRep], hyps: &[HypId]) -> Self {
        let c = tree.chart(chart);
        let entries = ideals
            .iter()
            .map(|i| {
                let mut ibar = i.clone();
                let mut exps = BTreeMap::new();
                for &h in hyps {
                    if let Some(k) = c.hyp_coord(h) {
                        let e = ibar.var_content(k).unwrap_or(0);
                        if e > 0 {
                            ibar = ibar.div_var_pow(k, e).expect("content divides");
                            exps.insert(h, e);
                        }
                    }
                }
                LedgerEntry { ibar, exps }
            })
            .collect();
        ProperLedger { chart, entries }
    }

    /// Monomial `∏ x_{coord(H)}^{a_H}` of entry `i` as an exponent vector.
    pub fn monomial(&self, tree: &ChartTree, i: usize) -> Result<Vec<u32>> {
        let c = tree.chart(self.chart);
        let mut e = alloc::vec![0u32; c.nvars()];
        for (&h, &a) in &self.entries[i].exps {
            let k = c
                .hyp_coord(h)
                .ok_or_else(|| Error::Invalid(format!("ledger names a hypersurface missing from chart {}", self.chart)))?;
            e[k] += a;
        }
        Ok(e)
    }

    /// `Ī[j]·∏ ℰ_q^{a_q}`, generator by generator.
    pub fn controlled(&self, tree: &ChartTree, i: usize) -> Result<IdealRep> {
        Ok(self.entries[i].ibar.mul_monomial(&self.monomial(tree, i)?))
    }

    /// The ledger identity against the controlled transforms, as an exact
    /// equality of generator lists.
    pub fn verify(&self, tree: &ChartTree, ideals: &[IdealRep]) -> Result<bool> {
        if ideals.len() != self.entries.len() {
            return Ok(false);
        }
        for (i, ideal) in ideals.iter().enumerate() {
            if self.controlled(tree, i)?.gens() != ideal.gens() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Ledger on the blow-up chart `chart` from the ledger on its parent.
///
/// The new exponent is `α = c − b + Σ_q a_q·c_q`, where `c = ν(Ī, C)` and
/// `c_q ∈ {0, 1}` records whether `C ⊆ H_q`; old exponents are kept on the
/// strict transforms that still meet the chart.
pub fn update_ledger(
    ledger: &ProperLedger,
    tree: &ChartTree,
    chart: ChartId,
    exc: HypId,
    marks: &[u32],
    w: &[usize],
) -> Result<ProperLedger> {
    let center = blowup_center(tree, chart)?;
    if center.chart != ledger.chart {
        return Err(Error::Invalid(format!("ledger chart {} is not the parent of chart {chart}", ledger.chart)));
    }
    if marks.len() != ledger.entries.len() {
        return Err(Error::DimensionMismatch { expected: ledger.entries.len(), found: marks.len() });
    }
    let parent = tree.chart(ledger.chart);
    let child = tree.chart(chart);
    let mut entries = Vec::with_capacity(ledger.entries.len());
    for (entry, &b) in ledger.entries.iter().zip(marks) {
        let (ibar, c) = proper_transform(&entry.ibar, tree, chart, w)?;
        let mut inherited: i64 = 0;
        let mut exps = BTreeMap::new();
        for (&h, &a) in &entry.exps {
            let k = parent
                .hyp_coord(h)
                .ok_or_else(|| Error::Invalid(format!("ledger names a hypersurface missing from chart {}", ledger.chart)))?;
            if center.coords.contains(&k) {
                inherited += i64::from(a);
            }
            if child.hyp_coord(h).is_some() {
                exps.insert(h, a);
            }
        }
        let alpha = i64::from(c) - i64::from(b) + inherited;
        if alpha < 0 {
            return Err(Error::Invalid(format!("negative exceptional exponent {alpha} in the ledger")));
        }
        if alpha > 0 {
            exps.insert(exc, alpha as u32);
        }
        entries.push(LedgerEntry { ibar, exps });
    }
    Ok(ProperLedger { chart, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charts::Origin;
    use crate::poly::{int, CoefRing, Poly};
    use alloc::string::{String, ToString};
    use alloc::vec;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn ideal(g: &[&str]) -> IdealRep {
        IdealRep::from_gens(g.iter().map(|s| Poly::parse(s, &names(&["x", "y"]), CoefRing::FIELD).unwrap()).collect())
            .unwrap()
    }

    fn plane() -> ChartTree {
        ChartTree::new(CoefRing::FIELD, names(&["x", "y"]), &[], &[]).unwrap().0
    }

    #[test]
    fn sing_membership() {
        let p = MarkedPair::new(ideal(&["x^2*y^4"]), 2).unwrap();
        assert!(p.sing_member(&[int(0), int(5)]).unwrap());
        let q = MarkedPair::new(ideal(&["x^4*y"]), 3).unwrap();
        assert!(!q.sing_member(&[int(1), int(0)]).unwrap());
        let u = MarkedPair::new(ideal(&["1"]), 1).unwrap();
        assert!(!u.sing_member(&[int(0), int(0)]).unwrap());
    }

    #[test]
    fn cusp_transforms_in_the_x_chart() {
        let mut t = plane();
        let (charts, _) = t.blowup(&AlignedCenter::new(0, &[0, 1]), 1).unwrap();
        let xc = charts[0];
        let p = MarkedPair::new(ideal(&["y^2 - x^3"]), 2).unwrap();
        assert_eq!(total_transform(&p.ideal, &t, xc).unwrap(), ideal(&["x^2*y^2 - x^3"]));
        assert_eq!(controlled_transform(&p, &t, xc, 0).unwrap(), ideal(&["y^2 - x"]));
        let (prop, a) = proper_transform(&p.ideal, &t, xc, &[]).unwrap();
        assert_eq!((prop, a), (ideal(&["y^2 - x"]), 2));
    }

    #[test]
    fn monomial_transforms_and_first_ledger() {
        let mut t = plane();
        let (charts, exc) = t.blowup(&AlignedCenter::new(0, &[0, 1]), 1).unwrap();
        let xc = charts[0];
        let p = MarkedPair::new(ideal(&["x^2*y^4"]), 2).unwrap();
        assert_eq!(total_transform(&p.ideal, &t, xc).unwrap(), ideal(&["x^6*y^4"]));
        let controlled = controlled_transform(&p, &t, xc, 0).unwrap();
        assert_eq!(controlled, ideal(&["x^4*y^4"]));
        let l0 = ProperLedger::trivial(0, std::slice::from_ref(&p.ideal));
        let l1 = update_ledger(&l0, &t, xc, exc, &[2], &[]).unwrap();
        assert_eq!(l1.entries[0].exps.get(&exc), Some(&4));
        assert_eq!(l1.entries[0].ibar, ideal(&["y^4"]));
        assert!(l1.verify(&t, &[controlled]).unwrap());
    }

    #[test]
    fn cusp_ledger_has_zero_exponent() {
        let mut t = plane();
        let (charts, exc) = t.blowup(&AlignedCenter::new(0, &[0, 1]), 1).unwrap();
        let l0 = ProperLedger::trivial(0, &[ideal(&["y^2 - x^3"])]);
        let l1 = update_ledger(&l0, &t, charts[0], exc, &[2], &[]).unwrap();
        assert!(l1.entries[0].exps.is_empty());
        let p = MarkedPair::new(ideal(&["y^2 - x^3"]), 2).unwrap();
        assert!(l1.verify(&t, &[controlled_transform(&p, &t, charts[0], 0).unwrap()]).unwrap());
    }

    #[test]
    fn non_permissible_center_is_refused() {
        let mut t = plane();
        let (charts, _) = t.blowup(&AlignedCenter::new(0, &[0, 1]), 1).unwrap();
        let p = MarkedPair::new(ideal(&["x + y^2"]), 2).unwrap();
        assert!(!p.permissible_along(&AlignedCenter::new(0, &[0, 1]), &[]).unwrap());
        assert_eq!(controlled_transform(&p, &t, charts[1], 3), Err(Error::NotPermissible { pair: 3 }));
    }

    #[test]
    fn center_off_the_support_adds_nothing() {
        let (mut t, _) = ChartTree::new(
            CoefRing::FIELD,
            names(&["x", "y"]),
            &[],
            &[("H".to_string(), 1, Origin::InputExceptional)],
        )
        .unwrap();
        let l0 = ProperLedger::factored(&t, 0, &[ideal(&["x*y^3"])], &[0]);
        assert_eq!(l0.entries[0].exps.get(&0), Some(&3));
        let (charts, exc) = t.blowup(&AlignedCenter::new(0, &[0]), 1).unwrap();
        let l1 = update_ledger(&l0, &t, charts[0], exc, &[1], &[]).unwrap();
        assert_eq!(l1.entries[0].exps.get(&exc), None);
        let _ = vec![0];
    }
}
