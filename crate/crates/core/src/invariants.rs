//! The functions `ω_i`, `ω`, `n` and `t` over a resolution state, and the
//! split of `E` into `E⁻` and `E⁺`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use crate::charts::{AlignedCenter, ChartId, ChartTree, HypId, Origin};
use crate::error::{Error, Result};
use crate::ideals::IdealRep;
use crate::multiideal::MultiIdeal;
use crate::pairs::{update_ledger, MarkedPair, ProperLedger};
use crate::poly::{Order, Rational};

/// `t = (ω, n)`, compared lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TValue {
    pub omega: Rational,
    pub n: u32,
}

impl fmt::Display for TValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.omega, self.n)
    }
}

/// An ω-sequence over a multi-ideal: the proper factorization on every live
/// chart plus the per-step history needed for `E⁻`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResolutionState {
    /// Number of blow-ups performed so far.
    pub step: usize,
    /// Coordinates cutting out `W` (the same on every chart).
    pub w: Vec<usize>,
    pub marks: Vec<u32>,
    /// Current `E`, in order.
    pub e: Vec<HypId>,
    pub ledgers: BTreeMap<ChartId, ProperLedger>,
    pub centers: Vec<Vec<AlignedCenter>>,
    /// `max(ω[j])` for every step `j` recorded so far.
    pub max_omega_history: Vec<Rational>,
    /// `E_j` for every recorded step.
    pub e_history: Vec<Vec<HypId>>,
}

impl ResolutionState {
    /// Step-zero state. Hypersurfaces declared as input exceptional divisors
    /// are factored out of the ledger; all others give `Ī[0] = I`.
    pub fn new(tree: &ChartTree, m: &MultiIdeal) -> Self {
        let ideals: Vec<IdealRep> = m.pairs.iter().map(|p| p.ideal.clone()).collect();
        let declared: Vec<HypId> =
            m.e.iter().copied().filter(|&h| tree.hypersurface(h).origin == Origin::InputExceptional).collect();
        let ledger = if declared.is_empty() {
            ProperLedger::trivial(m.chart, &ideals)
        } else {
            ProperLedger::factored(tree, m.chart, &ideals, &declared)
        };
        let mut ledgers = BTreeMap::new();
        ledgers.insert(m.chart, ledger);
        ResolutionState {
            step: 0,
            w: m.w.clone(),
            marks: m.pairs.iter().map(|p| p.mark).collect(),
            e: m.e.clone(),
            ledgers,
            centers: Vec::new(),
            max_omega_history: Vec::new(),
            e_history: Vec::new(),
        }
    }

    /// Dimension of `W` on a chart.
    pub fn dim(&self, tree: &ChartTree, chart: ChartId) -> usize {
        tree.chart(chart).nvars() - self.w.len()
    }

    fn ledger(&self, chart: ChartId) -> Result<&ProperLedger> {
        self.ledgers.get(&chart).ok_or_else(|| Error::Invalid(format!("the state does not live on chart {chart}")))
    }

    /// `I_i[j]` on `chart` (the controlled transform).
    pub fn controlled(&self, tree: &ChartTree, chart: ChartId, i: usize) -> Result<IdealRep> {
        self.ledger(chart)?.controlled(tree, i)
    }

    /// The multi-ideal `ℐ_j` on `chart`.
    pub fn multiideal(&self, tree: &ChartTree, chart: ChartId) -> Result<MultiIdeal> {
        let pairs = (0..self.marks.len())
            .map(|i| Ok(MarkedPair { ideal: self.controlled(tree, chart, i)?, mark: self.marks[i] }))
            .collect::<Result<Vec<_>>>()?;
        Ok(MultiIdeal { chart, w: self.w.clone(), pairs, e: self.e.clone() })
    }

    /// `p ∈ Sing(ℐ_j)`.
    pub fn sing_member(&self, tree: &ChartTree, chart: ChartId, p: &[Rational]) -> Result<bool> {
        let ledger = self.ledger(chart)?;
        let c = tree.chart(chart);
        for (i, entry) in ledger.entries.iter().enumerate() {
            let mut ord = entry.ibar.order_at(p)?;
            for (&h, &a) in &entry.exps {
                let k = c.hyp_coord(h).expect("ledger hypersurfaces meet the chart");
                if p[k] == Rational::from_integer(0.into()) {
                    ord = ord.plus(Order::Finite(a));
                }
            }
            if !ord.at_least(self.marks[i]) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The generic point of `V(x_c : c ∈ W ∪ stratum)` lies in `Sing(ℐ_j)`.
    pub fn sing_along(&self, tree: &ChartTree, chart: ChartId, stratum: &[usize]) -> Result<bool> {
        let ledger = self.ledger(chart)?;
        let c = tree.chart(chart);
        for (i, entry) in ledger.entries.iter().enumerate() {
            let mut ord = entry.ibar.order_along(stratum);
            for (&h, &a) in &entry.exps {
                if c.hyp_coord(h).is_some_and(|k| stratum.contains(&k)) {
                    ord = ord.plus(Order::Finite(a));
                }
            }
            if !ord.at_least(self.marks[i]) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Records `max(ω[j])` for the current step. `max(ω)` never increases
    /// along an ω-sequence; an increase is reported as an error.
    pub fn record_max_omega(&mut self, value: Rational) -> Result<()> {
        if self.max_omega_history.len() > self.step {
            return Err(Error::Invalid(format!("step {} already recorded", self.step)));
        }
        if let Some(prev) = self.max_omega_history.last() {
            if value > *prev {
                return Err(Error::Invalid(format!("max(ω) increased from {prev} to {value}")));
            }
        }
        self.max_omega_history.push(value);
        self.e_history.push(self.e.clone());
        Ok(())
    }

    /// `q`: the smallest recorded step whose `max(ω)` equals the latest one.
    pub fn marker_q(&self) -> Option<usize> {
        let last = self.max_omega_history.last()?;
        self.max_omega_history.iter().position(|v| v == last)
    }

    /// Replaces `chart` by `child` (a coordinate change of it), pulling the
    /// ledger back.
    pub fn move_chart(&mut self, tree: &ChartTree, chart: ChartId, child: ChartId) -> Result<()> {
        let ledger = self.ledgers.remove(&chart).ok_or_else(|| Error::Invalid(format!("no ledger on chart {chart}")))?;
        let images = tree.images(child).ok_or_else(|| Error::Invalid(format!("chart {child} has no parent")))?;
        let entries = ledger
            .entries
            .into_iter()
            .map(|mut e| {
                e.ibar = e.ibar.pull_back(&images)?.simplified();
                Ok(e)
            })
            .collect::<Result<Vec<_>>>()?;
        self.ledgers.insert(child, ProperLedger { chart: child, entries });
        Ok(())
    }

    /// Applies one blow-up: `blown` maps each blown-up chart to its new
    /// charts. Charts whose pivot cuts out `W` are dropped, as are the
    /// parents; untouched charts are kept.
    pub fn transform(
        &mut self,
        tree: &ChartTree,
        blown: &BTreeMap<ChartId, Vec<ChartId>>,
        exc: HypId,
        centers: Vec<AlignedCenter>,
    ) -> Result<()> {
        let mut ledgers = BTreeMap::new();
        for (&chart, ledger) in &self.ledgers {
            match blown.get(&chart) {
                None => {
                    ledgers.insert(chart, ledger.clone());
                }
                Some(children) => {
                    for &c in children {
                        let pivot = crate::pairs::exceptional_coord(tree, c)?;
                        if self.w.contains(&pivot) {
                            continue;
                        }
                        let mut next = update_ledger(ledger, tree, c, exc, &self.marks, &self.w)?;
                        for e in &mut next.entries {
                            e.ibar = e.ibar.simplified();
                        }
                        ledgers.insert(c, next);
                    }
                }
            }
        }
        self.ledgers = ledgers;
        self.e.push(exc);
        self.centers.push(centers);
        self.step += 1;
        Ok(())
    }
}

fn not_singular(state: &ResolutionState, tree: &ChartTree, chart: ChartId, p: &[Rational]) -> Result<()> {
    if state.sing_member(tree, chart, p)? {
        Ok(())
    } else {
        Err(Error::NotSingular)
    }
}

fn ratio(ord: Order, b: u32) -> Result<Rational> {
    match ord {
        Order::Finite(v) => Ok(Rational::new(v.into(), b.into())),
        Order::Infinite => Err(Error::Invalid("Ī vanishes identically".to_string())),
    }
}

/// `ω_i[j](p) = ν_p(Ī_i[j]) / b_i` (pairs indexed from 0).
pub fn omega_i(state: &ResolutionState, tree: &ChartTree, chart: ChartId, i: usize, p: &[Rational]) -> Result<Rational> {
    not_singular(state, tree, chart, p)?;
    let entry = state.ledger(chart)?.entries.get(i).ok_or(Error::IndexOutOfRange { index: i, nvars: state.marks.len() })?;
    ratio(entry.ibar.order_at(p)?, state.marks[i])
}

/// `ω[j](p)` together with the first pair attaining the minimum.
pub fn omega_with_index(state: &ResolutionState, tree: &ChartTree, chart: ChartId, p: &[Rational]) -> Result<(Rational, usize)> {
    let mut best: Option<(Rational, usize)> = None;
    for i in 0..state.marks.len() {
        let w = omega_i(state, tree, chart, i, p)?;
        if best.as_ref().is_none_or(|(b, _)| w < *b) {
            best = Some((w, i));
        }
    }
    best.ok_or_else(|| Error::Invalid("no pairs".to_string()))
}

/// `ω[j](p) = min_i ω_i[j](p)`.
pub fn omega(state: &ResolutionState, tree: &ChartTree, chart: ChartId, p: &[Rational]) -> Result<Rational> {
    Ok(omega_with_index(state, tree, chart, p)?.0)
}

/// `ω[j]` at the generic point of the stratum `V(x_c : c ∈ W ∪ stratum)`.
pub fn omega_along(state: &ResolutionState, tree: &ChartTree, chart: ChartId, stratum: &[usize]) -> Result<Rational> {
    if !state.sing_along(tree, chart, stratum)? {
        return Err(Error::NotSingular);
    }
    let ledger = state.ledger(chart)?;
    let mut best: Option<Rational> = None;
    for (entry, &b) in ledger.entries.iter().zip(&state.marks) {
        let w = ratio(entry.ibar.order_along(stratum), b)?;
        if best.as_ref().is_none_or(|cur| w < *cur) {
            best = Some(w);
        }
    }
    best.ok_or_else(|| Error::Invalid("no pairs".to_string()))
}

/// `(E⁻, E⁺)`: `E⁻` lists the members of `E` already present at the marker
/// step `q`, `E⁺` the later ones. Before any step is recorded `E⁻ = E`.
pub fn e_minus_split(state: &ResolutionState) -> (Vec<HypId>, Vec<HypId>) {
    match state.marker_q() {
        None => (state.e.clone(), Vec::new()),
        Some(q) => {
            let old = &state.e_history[q];
            state.e.iter().partition(|h| old.contains(h))
        }
    }
}

/// `t[j](p) = (ω[j](p), n(p))` with `n(p)` the number of `E⁻` members
/// through `p`.
pub fn t_value(state: &ResolutionState, tree: &ChartTree, chart: ChartId, p: &[Rational]) -> Result<TValue> {
    let omega = omega(state, tree, chart, p)?;
    let (minus, _) = e_minus_split(state);
    let c = tree.chart(chart);
    let zero = Rational::from_integer(0.into());
    let n = minus.iter().filter(|&&h| c.hyp_coord(h).is_some_and(|k| p[k] == zero)).count() as u32;
    Ok(TValue { omega, n })
}

/// `t[j]` at the generic point of a stratum.
pub fn t_along(state: &ResolutionState, tree: &ChartTree, chart: ChartId, stratum: &[usize]) -> Result<TValue> {
    let omega = omega_along(state, tree, chart, stratum)?;
    let (minus, _) = e_minus_split(state);
    let c = tree.chart(chart);
    let n = minus.iter().filter(|&&h| c.hyp_coord(h).is_some_and(|k| stratum.contains(&k))).count() as u32;
    Ok(TValue { omega, n })
}
