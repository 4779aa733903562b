//! The resolution driver: resolution functions with values in `Λ^(d)`, the
//! maximal-contact recursion through `ℐ′` and `ℐ◇`, codimension-one
//! components, the monomial stage and the reduction of multi-ideals to
//! basic objects.
//!
//! The driver keeps a stack of levels over one chart tree. Level 0 is the
//! basic object being resolved; level `k + 1` is the basic object associated
//! with the inductive multi-ideal of `ℐ◇` of level `k` on an adapted
//! hypersurface. All levels down to the one choosing the center are
//! transformed by the same blow-up.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_traits::Zero;

use crate::charts::{AlignedCenter, ChartId, ChartTree, HypId};
use crate::error::{Error, Result};
use crate::ideals::IdealRep;
use crate::invariants::{e_minus_split, omega, omega_along, t_along, t_value, ResolutionState, TValue};
use crate::monomial::{gamma_from_table, minimal_stratum, GammaValue, DEFAULT_STEP_CAP};
use crate::multiideal::{
    adapted_candidates, associated_basic_object, reduced_pairs, inductive_multiideal, sample_points, MultiIdeal, SAMPLE_POINTS,
    SAMPLE_SEED,
};
use crate::pairs::{MarkedPair, ProperLedger};
use crate::poly::{univariate, Poly, Rational};

/// Strata of a maximum locus, per chart.
type Locus = BTreeMap<ChartId, Vec<Vec<usize>>>;

/// Largest number of `n̄`-element subsets multiplied into `L[s]`.
pub const SUBSET_CAP: usize = 1 << 12;
/// Default bound on the number of charts in the tree.
pub const DEFAULT_CHART_LIMIT: usize = 4096;

/// A value of a resolution function.
///
/// The order is `Gamma < Tuple < Infinity`; within a branch values compare
/// componentwise.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum LambdaValue {
    Gamma(GammaValue),
    /// `(t, tail)`; the tail is absent in dimension one.
    Tuple(TValue, Option<Box<LambdaValue>>),
    /// `∞_d`. A point of the codimension-one part of `Max(t)` gets
    /// `(t, ∞_d)`, so `h` still drops when `t` does.
    Infinity(usize),
}

impl LambdaValue {
    fn rank(&self) -> u8 {
        match self {
            LambdaValue::Gamma(_) => 0,
            LambdaValue::Tuple(..) => 1,
            LambdaValue::Infinity(_) => 2,
        }
    }
}

impl Ord for LambdaValue {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (LambdaValue::Gamma(a), LambdaValue::Gamma(b)) => a.cmp(b),
            (LambdaValue::Tuple(a, x), LambdaValue::Tuple(b, y)) => a.cmp(b).then_with(|| x.cmp(y)),
            (LambdaValue::Infinity(a), LambdaValue::Infinity(b)) => a.cmp(b),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl PartialOrd for LambdaValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for LambdaValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LambdaValue::Gamma(g) => write!(f, "G{g}"),
            LambdaValue::Tuple(t, None) => write!(f, "[{t}]"),
            LambdaValue::Tuple(t, Some(tail)) => write!(f, "[{t}; {tail}]"),
            LambdaValue::Infinity(d) => write!(f, "inf_{d}"),
        }
    }
}

/// Which part of the resolution a step belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Phase {
    /// `ω > 0` on the top level.
    TSequence,
    /// The top level is monomial and centers are canonical monomial centers.
    Monomial,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::TSequence => "t-sequence",
            Phase::Monomial => "monomial",
        })
    }
}

/// A center on one chart, by chart label and coordinate names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CenterRecord {
    pub chart: ChartId,
    pub label: String,
    pub coords: Vec<String>,
    pub coord_ids: Vec<usize>,
}

/// One step of a resolution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub index: usize,
    pub phase: Phase,
    /// Depth of the level whose invariant chose the center.
    pub level: usize,
    /// `max(h)`, the value on the center.
    pub h: LambdaValue,
    pub centers: Vec<CenterRecord>,
    /// Positions (0-based) in the choosing level's `E` of the members
    /// containing the center.
    pub center_hyps: Vec<usize>,
    /// Coordinate changes made while looking for adapted hypersurfaces,
    /// as `label: x ↦ f`.
    pub changes: Vec<String>,
    /// Charts created by the blow-up.
    pub new_charts: Vec<String>,
}

/// A chart of the final top level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinalChart {
    pub label: String,
    pub names: Vec<String>,
    /// Generators of the controlled transform.
    pub ideal: Vec<String>,
    pub mark: u32,
}

/// The sequence of centers chosen by the driver.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub steps: Vec<TraceStep>,
    /// `Sing = ∅` at the end.
    pub resolved: bool,
    pub final_charts: Vec<FinalChart>,
}

impl Trace {
    /// `h` drops strictly at every step.
    pub fn h_strictly_decreasing(&self) -> bool {
        self.steps.windows(2).all(|w| w[1].h < w[0].h)
    }

    /// The phase switches at most once, from the t-sequence to the monomial
    /// stage.
    pub fn phases_well_formed(&self) -> bool {
        self.steps.windows(2).all(|w| w[0].phase <= w[1].phase)
    }
}

/// Driver options.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ResolveOptions {
    pub step_cap: usize,
    pub chart_limit: usize,
}

impl Default for ResolveOptions {
    fn default() -> Self {
        ResolveOptions { step_cap: DEFAULT_STEP_CAP, chart_limit: DEFAULT_CHART_LIMIT }
    }
}

/// One level of the recursion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Level {
    pub state: ResolutionState,
    /// `max(t)` of the parent level when this level was built.
    pub parent_max_t: Option<TValue>,
}

/// The center chosen at one step.
#[derive(Clone, Debug)]
struct Selection {
    level: usize,
    /// Chart ↦ coordinates cutting out the center.
    centers: BTreeMap<ChartId, Vec<usize>>,
    h: LambdaValue,
}

/// The resolution driver.
#[derive(Clone, Debug)]
pub struct Resolver {
    pub tree: ChartTree,
    pub levels: Vec<Level>,
    pub options: ResolveOptions,
    step: usize,
    changes: Vec<String>,
    /// Adapted hypersurface forced on the first child built (descent checks).
    forced: Option<(usize, Poly)>,
}

impl Resolver {
    /// A driver for `ℐ`; multi-ideals with several pairs are replaced by
    /// their associated basic object.
    pub fn new(tree: ChartTree, m: &MultiIdeal, options: ResolveOptions) -> Result<Self> {
        if !tree.ring().is_field() {
            return Err(Error::NotField);
        }
        let basic = if m.pairs.len() == 1 {
            m.clone()
        } else {
            let b = associated_basic_object(m)?;
            MultiIdeal { chart: m.chart, w: m.w.clone(), pairs: alloc::vec![b], e: m.e.clone() }
        };
        if basic.pairs[0].ideal.is_zero() {
            return Err(Error::Invalid("the ideal is zero".to_string()));
        }
        let state = ResolutionState::new(&tree, &basic);
        Ok(Resolver {
            tree,
            levels: alloc::vec![Level { state, parent_max_t: None }],
            options,
            step: 0,
            changes: Vec::new(),
            forced: None,
        })
    }

    /// Number of blow-ups performed.
    pub fn steps_done(&self) -> usize {
        self.step
    }

    fn free_coords(&self, k: usize, chart: ChartId) -> Vec<usize> {
        let w = &self.levels[k].state.w;
        (0..self.tree.chart(chart).nvars()).filter(|c| !w.contains(c)).collect()
    }

    /// Nonempty subsets of the free coordinates, smallest first.
    fn strata(&self, k: usize, chart: ChartId) -> Result<Vec<Vec<usize>>> {
        let free = self.free_coords(k, chart);
        if free.len() > 12 {
            return Err(Error::LimitExceeded(format!("{} free coordinates", free.len())));
        }
        let mut out: Vec<Vec<usize>> = (1u32..(1 << free.len()))
            .map(|mask| free.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, &c)| c).collect())
            .collect();
        out.sort_by(|a: &Vec<usize>, b: &Vec<usize>| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        Ok(out)
    }

    fn sing_strata(&self, k: usize) -> Result<Vec<(ChartId, Vec<usize>)>> {
        let st = &self.levels[k].state;
        let mut out = Vec::new();
        for &chart in st.ledgers.keys() {
            for s in self.strata(k, chart)? {
                if st.sing_along(&self.tree, chart, &s)? {
                    out.push((chart, s));
                }
            }
        }
        Ok(out)
    }

    fn full_center(&self, k: usize, stratum: &[usize]) -> Vec<usize> {
        let mut c: Vec<usize> = self.levels[k].state.w.iter().chain(stratum).copied().collect();
        c.sort_unstable();
        c
    }

    fn select(&mut self, k: usize) -> Result<Option<Selection>> {
        let sing = self.sing_strata(k)?;
        if sing.is_empty() {
            return Ok(None);
        }
        let mut max_omega: Option<Rational> = None;
        for (chart, s) in &sing {
            let w = omega_along(&self.levels[k].state, &self.tree, *chart, s)?;
            if max_omega.as_ref().is_none_or(|m| w > *m) {
                max_omega = Some(w);
            }
        }
        let max_omega = max_omega.expect("nonempty");
        self.levels[k].state.record_max_omega(max_omega.clone())?;
        if max_omega.is_zero() {
            self.levels.truncate(k + 1);
            self.detect(k, None)?;
            let (g, centers) = self.gamma_center(k, &sing)?;
            return Ok(Some(Selection { level: k, centers, h: LambdaValue::Gamma(g) }));
        }
        let mut max_t: Option<TValue> = None;
        let mut values = Vec::new();
        for (chart, s) in &sing {
            let t = t_along(&self.levels[k].state, &self.tree, *chart, s)?;
            if max_t.as_ref().is_none_or(|m| t > *m) {
                max_t = Some(t.clone());
            }
            values.push(t);
        }
        let max_t = max_t.expect("nonempty");
        let mut maxset: Locus = BTreeMap::new();
        for ((chart, s), t) in sing.iter().zip(&values) {
            if *t == max_t {
                maxset.entry(*chart).or_default().push(s.clone());
            }
        }
        self.detect(k, Some((&max_t, &maxset)))?;
        let dim = self.levels[k].state.dim(&self.tree, *maxset.keys().next().expect("nonempty"));
        if dim == 1 {
            self.levels.truncate(k + 1);
            let mut centers = BTreeMap::new();
            for (chart, strata) in &maxset {
                centers.insert(*chart, self.full_center(k, &minimal_stratum(strata)?));
            }
            return Ok(Some(Selection { level: k, centers, h: LambdaValue::Tuple(max_t, None) }));
        }
        let mut n1 = BTreeMap::new();
        for (chart, strata) in &maxset {
            let comps: Vec<&Vec<usize>> = strata.iter().filter(|s| s.len() == 1).collect();
            match comps.as_slice() {
                [] => {}
                [one] => {
                    n1.insert(*chart, self.full_center(k, one));
                }
                _ => {
                    return Err(Error::UnsupportedLocus(format!(
                        "{} codimension-one components of Max(t) meet on chart {}",
                        comps.len(),
                        self.tree.chart(*chart).label
                    )))
                }
            }
        }
        if !n1.is_empty() {
            self.levels.truncate(k + 1);
            let h = LambdaValue::Tuple(max_t, Some(Box::new(LambdaValue::Infinity(dim))));
            return Ok(Some(Selection { level: k, centers: n1, h }));
        }
        let reuse = self.levels.len() > k + 1
            && self.levels[k + 1].parent_max_t.as_ref() == Some(&max_t)
            && maxset.keys().all(|c| self.levels[k + 1].state.ledgers.contains_key(c));
        if !reuse {
            self.levels.truncate(k + 1);
            self.build_child(k, &max_t, &maxset)?;
        }
        let sel = self.select(k + 1)?.ok_or_else(|| {
            Error::Invalid(format!("the inductive object at level {} is resolved while max(t) = {max_t}", k + 1))
        })?;
        Ok(Some(Selection { level: sel.level, centers: sel.centers, h: LambdaValue::Tuple(max_t, Some(Box::new(sel.h))) }))
    }

    /// Canonical monomial center of level `k` (all of its singular points
    /// have `ω = 0`).
    fn gamma_center(
        &self,
        k: usize,
        sing: &[(ChartId, Vec<usize>)],
    ) -> Result<(GammaValue, BTreeMap<ChartId, Vec<usize>>)> {
        let st = &self.levels[k].state;
        let mut best: Option<GammaValue> = None;
        let mut values = Vec::new();
        for (chart, s) in sing {
            let c = self.tree.chart(*chart);
            let entry = &st.ledgers[chart].entries[0];
            let mut row = Vec::new();
            let mut labels = Vec::new();
            for (pos, h) in st.e.iter().enumerate() {
                if let Some(coord) = c.hyp_coord(*h) {
                    if s.contains(&coord) {
                        row.push(entry.exps.get(h).copied().unwrap_or(0));
                        labels.push(pos + 1);
                    }
                }
            }
            let g = gamma_from_table(&[row], &[st.marks[0]], &labels)?;
            if best.as_ref().is_none_or(|b| g > *b) {
                best = Some(g.clone());
            }
            values.push(g);
        }
        let best = best.ok_or(Error::NotSingular)?;
        let mut per_chart: Locus = BTreeMap::new();
        for ((chart, s), g) in sing.iter().zip(&values) {
            if *g == best {
                per_chart.entry(*chart).or_default().push(s.clone());
            }
        }
        let mut centers = BTreeMap::new();
        for (chart, strata) in per_chart {
            centers.insert(chart, self.full_center(k, &minimal_stratum(&strata)?));
        }
        Ok((best, centers))
    }

    /// Builds level `k + 1` on the charts carrying `Max(t)` of level `k`.
    fn build_child(&mut self, k: usize, max_t: &TValue, maxset: &Locus) -> Result<()> {
        let st = self.levels[k].state.clone();
        let c = st.marks[0];
        let bs = max_t.omega.clone() * Rational::from_integer(c.into());
        if !bs.is_integer() {
            return Err(Error::Invalid(format!("b[s] = {bs} is not an integer")));
        }
        let bs: u32 = u32::try_from(bs.to_integer()).map_err(|_| Error::LimitExceeded(format!("b[s] = {bs}")))?;
        let mut charts: Vec<ChartId> = maxset.keys().copied().collect();
        let (minus, plus) = e_minus_split(&st);
        let mut cands: Vec<Vec<(usize, Poly)>> = Vec::new();
        for &chart in &charts {
            let ibar = st.ledgers[&chart].entries[0].ibar.clone();
            let pair = MarkedPair::new(ibar, bs)?;
            let mut list = adapted_candidates(&self.tree, chart, &pair, &st.w, &plus);
            if let Some((z, f)) = self.forced.take() {
                if !pair.ideal.delta_iter(bs - 1).member(&f)? {
                    return Err(Error::NotNice("the forced hypersurface is not in the top coefficient ideal".to_string()));
                }
                list.insert(0, (z, f));
            }
            cands.push(list);
        }
        let z = match cands[0].iter().map(|(z, _)| *z).find(|z| cands.iter().all(|l| l.iter().any(|(y, _)| y == z))) {
            Some(z) => z,
            None => {
                // Align differing pivots by a coordinate swap on the charts
                // whose first candidate sits elsewhere.
                let z = cands[0].first().map(|(z, _)| *z).ok_or_else(|| {
                    Error::NotNice(format!("no adapted hypersurface on chart {}", self.tree.chart(charts[0]).label))
                })?;
                for (chart, list) in charts.iter_mut().zip(cands.iter_mut()) {
                    let (y, f) = list.first().cloned().ok_or_else(|| {
                        Error::NotNice(format!("no adapted hypersurface on chart {}", self.tree.chart(*chart).label))
                    })?;
                    if y == z {
                        continue;
                    }
                    let new = self.tree.swap(*chart, y, z)?;
                    let names = &self.tree.chart(*chart).names;
                    self.changes.push(format!("{}: {} <-> {}", self.tree.chart(new).label, names[y], names[z]));
                    for l in 0..=k {
                        self.levels[l].state.move_chart(&self.tree, *chart, new)?;
                    }
                    *list = alloc::vec![(z, self.tree.pull_back(new, &f)?)];
                    *chart = new;
                }
                z
            }
        };
        let mut ledgers = BTreeMap::new();
        let mut marks = None;
        for (&chart, list) in charts.iter().zip(&cands) {
            let f = list.iter().find(|(y, _)| *y == z).expect("common pivot").1.clone();
            let new = self.tree.triangular_change(chart, z, &f)?;
            if new != chart {
                let names = &self.tree.chart(chart).names;
                self.changes.push(format!(
                    "{}: {} -> {}",
                    self.tree.chart(new).label,
                    names[z],
                    f.to_string_with(names)
                ));
                for l in 0..=k {
                    self.levels[l].state.move_chart(&self.tree, chart, new)?;
                }
            }
            let diamond = build_i_diamond(&self.levels[k].state, &self.tree, new, bs, max_t.n, &minus, &plus)?;
            let inductive = inductive_multiideal(&self.tree, &diamond, z)?;
            let basic = associated_basic_object(&MultiIdeal { pairs: reduced_pairs(&inductive.pairs), ..inductive })?;
            if marks.is_some_and(|m| m != basic.mark) {
                return Err(Error::Invalid("inductive marks differ between charts".to_string()));
            }
            marks = Some(basic.mark);
            ledgers.insert(new, ProperLedger::trivial(new, &[basic.ideal]));
        }
        let mut w = st.w.clone();
        w.push(z);
        w.sort_unstable();
        let state = ResolutionState {
            step: 0,
            w,
            marks: alloc::vec![marks.expect("at least one chart")],
            e: plus,
            ledgers,
            centers: Vec::new(),
            max_omega_history: Vec::new(),
            e_history: Vec::new(),
        };
        self.levels.push(Level { state, parent_max_t: Some(max_t.clone()) });
        Ok(())
    }

    /// Sampled search for singular points the aligned candidate lattice
    /// misses: points with `t ≥ max(t)` off `Max(t)` (or `ω > 0` on a monomial
    /// level), and isolated singular points on coordinate lines.
    fn detect(&self, k: usize, max: Option<(&TValue, &Locus)>) -> Result<()> {
        let st = &self.levels[k].state;
        let zero = Rational::zero();
        for &chart in st.ledgers.keys() {
            let c = self.tree.chart(chart);
            for p in sample_points(c, &st.w, SAMPLE_SEED, SAMPLE_POINTS) {
                if !st.sing_member(&self.tree, chart, &p)? {
                    continue;
                }
                match max {
                    None => {
                        if omega(st, &self.tree, chart, &p)? > zero {
                            return Err(self.unsupported(chart, &p, "a singular point with ω > 0 on a monomial level"));
                        }
                    }
                    Some((max_t, maxset)) => {
                        let t = t_value(st, &self.tree, chart, &p)?;
                        let inside = maxset
                            .get(&chart)
                            .is_some_and(|list| list.iter().any(|s| s.iter().all(|&i| p[i] == zero)));
                        if t > *max_t || (t == *max_t && !inside) {
                            return Err(self.unsupported(chart, &p, "Max(t) leaves the candidate lattice"));
                        }
                    }
                }
            }
            self.line_check(k, chart)?;
        }
        Ok(())
    }

    fn unsupported(&self, chart: ChartId, p: &[Rational], what: &str) -> Error {
        let pt: Vec<String> = p.iter().map(|r| format!("{r}")).collect();
        Error::UnsupportedLocus(format!("{what}: chart {} point ({})", self.tree.chart(chart).label, pt.join(", ")))
    }

    /// On each coordinate line of `W` through the origin, `Sing` is either
    /// the whole line or contained in the origin.
    fn line_check(&self, k: usize, chart: ChartId) -> Result<()> {
        let st = &self.levels[k].state;
        let top = st.controlled(&self.tree, chart, 0)?.delta_iter(st.marks[0] - 1);
        let free = self.free_coords(k, chart);
        for &x in &free {
            let others: Vec<usize> = free.iter().copied().filter(|&c| c != x).collect();
            let mut g: Vec<Rational> = Vec::new();
            for gen in top.gens() {
                let u = gen
                    .set_coords_zero(&others)
                    .to_univariate(x)
                    .ok_or_else(|| Error::Invalid("restriction to a line is not univariate".to_string()))?;
                g = univariate::gcd(&g, &u);
            }
            let g = univariate::trim(g);
            if g.is_empty() {
                continue;
            }
            let low = univariate::order_at_zero(&g).unwrap_or(0);
            if g.len() - low > 1 {
                let c = self.tree.chart(chart);
                return Err(Error::UnsupportedLocus(format!(
                    "singular points off the origin on the {}-axis of chart {}",
                    c.names[x], c.label
                )));
            }
        }
        Ok(())
    }

    /// `max(h)` at the current step without blowing up.
    pub fn current_h(&mut self) -> Result<Option<LambdaValue>> {
        let mut probe = self.clone();
        Ok(probe.select(0)?.map(|s| s.h))
    }

    /// `max(h)` at the current step with the first inductive level built on
    /// the adapted hypersurface `V(f)`, `f` triangular in `z`.
    pub fn h_with_adapted(&self, z: usize, f: &Poly) -> Result<Option<LambdaValue>> {
        let mut probe = self.clone();
        probe.levels.truncate(1);
        probe.forced = Some((z, f.clone()));
        Ok(probe.select(0)?.map(|s| s.h))
    }

    /// Performs one step; `None` when the top level is resolved.
    pub fn step(&mut self) -> Result<Option<TraceStep>> {
        let sel = match self.select(0)? {
            None => return Ok(None),
            Some(s) => s,
        };
        let top_monomial = self.levels[0].state.max_omega_history.last().is_some_and(|v| v.is_zero());
        let phase = if top_monomial { Phase::Monomial } else { Phase::TSequence };
        let chooser = &self.levels[sel.level].state;
        let first = sel.centers.iter().next().expect("a center");
        let fc = self.tree.chart(*first.0);
        let center_hyps: Vec<usize> = chooser
            .e
            .iter()
            .enumerate()
            .filter(|(_, h)| fc.hyp_coord(**h).is_some_and(|k| first.1.contains(&k)))
            .map(|(i, _)| i)
            .collect();
        let centers: Vec<CenterRecord> = sel
            .centers
            .iter()
            .map(|(chart, coords)| {
                let c = self.tree.chart(*chart);
                CenterRecord {
                    chart: *chart,
                    label: c.label.clone(),
                    coords: coords.iter().map(|&i| c.names[i].clone()).collect(),
                    coord_ids: coords.clone(),
                }
            })
            .collect();
        let exc: HypId = self.tree.new_exceptional(self.step);
        let mut blown = BTreeMap::new();
        let mut new_charts = Vec::new();
        let mut aligned = Vec::new();
        for (chart, coords) in &sel.centers {
            let center = AlignedCenter::new(*chart, coords);
            let kids = self.tree.blowup_with(&center, exc)?;
            new_charts.extend(kids.iter().map(|&c| self.tree.chart(c).label.clone()));
            blown.insert(*chart, kids);
            aligned.push(center);
        }
        for l in 0..=sel.level {
            self.levels[l].state.transform(&self.tree, &blown, exc, aligned.clone())?;
        }
        if self.tree.charts().len() > self.options.chart_limit {
            return Err(Error::LimitExceeded(format!("more than {} charts", self.options.chart_limit)));
        }
        let step = TraceStep {
            index: self.step,
            phase,
            level: sel.level,
            h: sel.h,
            centers,
            center_hyps,
            changes: core::mem::take(&mut self.changes),
            new_charts,
        };
        self.step += 1;
        Ok(Some(step))
    }

    /// Sampled and line checks that the top level has no singular points
    /// left on any chart.
    fn final_check(&self) -> Result<()> {
        let st = &self.levels[0].state;
        for &chart in st.ledgers.keys() {
            for p in sample_points(self.tree.chart(chart), &st.w, SAMPLE_SEED, SAMPLE_POINTS) {
                if st.sing_member(&self.tree, chart, &p)? {
                    return Err(self.unsupported(chart, &p, "a singular point survives"));
                }
            }
            self.line_check(0, chart)?;
        }
        Ok(())
    }

    /// Runs the driver to the end.
    pub fn run(&mut self) -> Result<Trace> {
        let mut steps = Vec::new();
        loop {
            if steps.len() >= self.options.step_cap {
                if self.select_probe()? {
                    return Err(Error::NonTermination(self.options.step_cap));
                }
                break;
            }
            match self.step()? {
                Some(s) => steps.push(s),
                None => break,
            }
        }
        self.final_check()?;
        let st = &self.levels[0].state;
        let mut final_charts = Vec::new();
        for &chart in st.ledgers.keys() {
            let c = self.tree.chart(chart);
            let ideal = st.controlled(&self.tree, chart, 0)?;
            final_charts.push(FinalChart {
                label: c.label.clone(),
                names: c.names.clone(),
                ideal: ideal.gens().iter().map(|g| g.to_string_with(&c.names)).collect(),
                mark: st.marks[0],
            });
        }
        Ok(Trace { steps, resolved: true, final_charts })
    }

    fn select_probe(&self) -> Result<bool> {
        Ok(!self.sing_strata(0)?.is_empty())
    }
}

/// `resolve(ℐ)`.
pub fn resolve(tree: ChartTree, m: &MultiIdeal, options: ResolveOptions) -> Result<Trace> {
    Resolver::new(tree, m, options)?.run()
}

/// `ℐ′ = ((I[s], b), (Ī[s], b[s]))` on `chart`, with `b[s] = max(ω)·b`.
pub fn build_i_prime(state: &ResolutionState, tree: &ChartTree, chart: ChartId, max_omega: &Rational) -> Result<MultiIdeal> {
    let c = state.marks[0];
    let bs = max_omega.clone() * Rational::from_integer(c.into());
    if !bs.is_integer() || bs <= Rational::zero() {
        return Err(Error::Invalid(format!("max(ω) = {max_omega} does not give a positive integer b[s]")));
    }
    let bs = u32::try_from(bs.to_integer()).map_err(|_| Error::LimitExceeded(format!("b[s] = {bs}")))?;
    let j = state.controlled(tree, chart, 0)?;
    let ibar = state.ledgers[&chart].entries[0].ibar.clone();
    Ok(MultiIdeal {
        chart,
        w: state.w.clone(),
        pairs: alloc::vec![MarkedPair::new(j, c)?, MarkedPair::new(ibar, bs)?],
        e: state.e.clone(),
    })
}

/// `L[s]`: the product over all `n̄`-element subsets of the `E⁻` members on
/// the chart of the ideals `(x_{j₁}, …, x_{jₙ̄})`. It is the zero ideal for
/// `n̄ = 0` and the unit ideal when fewer than `n̄` members meet the chart.
pub fn l_ideal(tree: &ChartTree, chart: ChartId, minus: &[HypId], nbar: u32) -> Result<IdealRep> {
    let c = tree.chart(chart);
    let ring = tree.ring();
    let n = c.nvars();
    if nbar == 0 {
        return Ok(IdealRep::zero(ring, n));
    }
    let coords: Vec<usize> = minus.iter().filter_map(|h| c.hyp_coord(*h)).collect();
    let nbar = nbar as usize;
    if coords.len() < nbar {
        return Ok(IdealRep::unit(ring, n));
    }
    let mut idx: Vec<usize> = (0..nbar).collect();
    let mut out = IdealRep::unit(ring, n);
    let mut count = 0usize;
    loop {
        count += 1;
        if count > SUBSET_CAP {
            return Err(Error::LimitExceeded(format!("more than {SUBSET_CAP} subsets in L[s]")));
        }
        let factor = IdealRep::new(ring, n, idx.iter().map(|&i| Poly::var(ring, n, coords[i])).collect())?;
        out = out.product(&factor)?;
        let mut i = nbar;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            if idx[i] < coords.len() - nbar + i {
                idx[i] += 1;
                for j in i + 1..nbar {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// `ℐ◇ = ((I[s],b), (Ī[s],b[s]), (L[s],1), E⁺)` on `chart`.
pub fn build_i_diamond(
    state: &ResolutionState,
    tree: &ChartTree,
    chart: ChartId,
    bs: u32,
    nbar: u32,
    minus: &[HypId],
    plus: &[HypId],
) -> Result<MultiIdeal> {
    let c = state.marks[0];
    let j = state.controlled(tree, chart, 0)?;
    let ibar = state.ledgers[&chart].entries[0].ibar.clone();
    let l = l_ideal(tree, chart, minus, nbar)?;
    Ok(MultiIdeal {
        chart,
        w: state.w.clone(),
        pairs: alloc::vec![MarkedPair::new(j, c)?, MarkedPair::new(ibar, bs)?, MarkedPair::new(l, 1)?],
        e: plus.to_vec(),
    })
}

/// Codimension-one components of `Max(t)` of the top level among the
/// candidate strata, as centers; empty when there are none.
pub fn n1_components(resolver: &Resolver) -> Result<Vec<AlignedCenter>> {
    let mut probe = resolver.clone();
    probe.levels.truncate(1);
    let sing = probe.sing_strata(0)?;
    let st = &probe.levels[0].state;
    let mut best: Option<TValue> = None;
    let mut values = Vec::new();
    for (chart, s) in &sing {
        let t = t_along(st, &probe.tree, *chart, s)?;
        if best.as_ref().is_none_or(|b| t > *b) {
            best = Some(t.clone());
        }
        values.push(t);
    }
    let mut out = Vec::new();
    if let Some(best) = best {
        for ((chart, s), t) in sing.iter().zip(values) {
            if t == best && s.len() == 1 && st.dim(&probe.tree, *chart) > 1 {
                out.push(AlignedCenter::new(*chart, &probe.full_center(0, s)));
            }
        }
    }
    Ok(out)
}

/// Compares `max(h)` at the current step computed with two adapted
/// hypersurfaces `V(f)` and `V(g)` for the first inductive level.
pub fn descent_consistency(resolver: &Resolver, first: (usize, &Poly), second: (usize, &Poly)) -> Result<bool> {
    let a = resolver.h_with_adapted(first.0, first.1)?;
    let b = resolver.h_with_adapted(second.0, second.1)?;
    Ok(a == b)
}
