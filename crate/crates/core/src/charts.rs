//! Affine charts, aligned hypersurfaces, triangular coordinate changes and
//! blow-ups of aligned centers.
//!
//! Every chart is an affine space with named coordinates. Hypersurfaces,
//! the subvariety `W` and the centers are coordinate subvarieties of the
//! chart. Charts form a tree: each non-root chart stores the images of its
//! parent's coordinates, so points and polynomials can be moved along the
//! recorded maps.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::poly::{CoefRing, Coef, Monomial, Poly, Rational};

pub type ChartId = usize;
pub type HypId = usize;

/// Where a hypersurface of `E` came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Origin {
    Input,
    /// Declared in the input as the exceptional divisor of an earlier
    /// history; its exponents enter the initial proper factorization.
    InputExceptional,
    Exceptional { step: usize },
}

/// Global record of a hypersurface; its per-chart coordinate lives in
/// [`Chart::hyps`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HypersurfaceRecord {
    pub id: HypId,
    pub name: String,
    pub origin: Origin,
}

/// How a chart is obtained from its parent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ChartMap {
    Root,
    /// Standard chart `pivot` of the blow-up with center `V(x_c : c ∈ center)`:
    /// x_j ↦ x_pivot·x_j for j in the center other than the pivot.
    Blowup { parent: ChartId, center: Vec<usize>, pivot: usize },
    /// Codimension-one center: identity map, the hyperplane becomes exceptional.
    Divisor { parent: ChartId, coord: usize },
    /// New pivot coordinate `z' = equation`, where `equation = c·z + h`
    /// with `h` free of `z`.
    Triangular { parent: ChartId, pivot: usize, equation: Poly },
    /// Product with an affine line: one fresh last coordinate.
    Extension { parent: ChartId },
    /// Exchange of coordinates `a` and `b`.
    Swap { parent: ChartId, a: usize, b: usize },
}

/// An affine coordinate patch.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chart {
    pub id: ChartId,
    pub label: String,
    pub names: Vec<String>,
    pub map: ChartMap,
    /// Hypersurface id ↦ defining coordinate (absent when it misses the chart).
    pub hyps: BTreeMap<HypId, usize>,
    /// Coordinates cutting out `W`.
    pub w_coords: Vec<usize>,
}

impl Chart {
    pub fn nvars(&self) -> usize {
        self.names.len()
    }

    pub fn parent(&self) -> Option<ChartId> {
        match &self.map {
            ChartMap::Root => None,
            ChartMap::Blowup { parent, .. }
            | ChartMap::Divisor { parent, .. }
            | ChartMap::Triangular { parent, .. }
            | ChartMap::Extension { parent }
            | ChartMap::Swap { parent, .. } => Some(*parent),
        }
    }

    /// Coordinate of hypersurface `h`, if it meets the chart.
    pub fn hyp_coord(&self, h: HypId) -> Option<usize> {
        self.hyps.get(&h).copied()
    }

    /// Hypersurface defined by coordinate `c`, if any.
    pub fn hyp_at(&self, c: usize) -> Option<HypId> {
        self.hyps.iter().find(|(_, &v)| v == c).map(|(&h, _)| h)
    }

    /// Coordinates not cutting out `W`.
    pub fn free_coords(&self) -> Vec<usize> {
        (0..self.nvars()).filter(|c| !self.w_coords.contains(c)).collect()
    }
}

/// A coordinate subvariety `V(x_c : c ∈ coords)` of one chart.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AlignedCenter {
    pub chart: ChartId,
    pub coords: Vec<usize>,
}

impl AlignedCenter {
    pub fn new(chart: ChartId, coords: &[usize]) -> Self {
        let mut c = coords.to_vec();
        c.sort_unstable();
        c.dedup();
        AlignedCenter { chart, coords: c }
    }
}

/// All charts ever created plus the hypersurface records.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChartTree {
    ring: CoefRing,
    charts: Vec<Chart>,
    hyps: Vec<HypersurfaceRecord>,
}

impl ChartTree {
    /// A tree with a single root chart.
    ///
    /// `hyps` lists (name, defining coordinate, origin) of the input
    /// hypersurfaces.
    pub fn new(
        ring: CoefRing,
        names: Vec<String>,
        w_coords: &[usize],
        hyps: &[(String, usize, Origin)],
    ) -> Result<(ChartTree, ChartId)> {
        let n = names.len();
        let mut w: Vec<usize> = w_coords.to_vec();
        w.sort_unstable();
        w.dedup();
        if let Some(&bad) = w.iter().find(|&&c| c >= n) {
            return Err(Error::IndexOutOfRange { index: bad, nvars: n });
        }
        let mut tree = ChartTree { ring, charts: Vec::new(), hyps: Vec::new() };
        let mut table = BTreeMap::new();
        for (name, coord, origin) in hyps {
            if *coord >= n {
                return Err(Error::IndexOutOfRange { index: *coord, nvars: n });
            }
            if w.contains(coord) {
                return Err(Error::Misaligned(format!("hypersurface {name} is not transversal to W")));
            }
            if table.values().any(|c| c == coord) {
                return Err(Error::Misaligned(format!("hypersurface {name} repeats a coordinate")));
            }
            let id = tree.hyps.len();
            tree.hyps.push(HypersurfaceRecord { id, name: name.clone(), origin: *origin });
            table.insert(id, *coord);
        }
        tree.charts.push(Chart {
            id: 0,
            label: String::from("root"),
            names,
            map: ChartMap::Root,
            hyps: table,
            w_coords: w,
        });
        Ok((tree, 0))
    }

    pub fn ring(&self) -> CoefRing {
        self.ring
    }

    pub fn chart(&self, id: ChartId) -> &Chart {
        &self.charts[id]
    }

    pub fn charts(&self) -> &[Chart] {
        &self.charts
    }

    pub fn hypersurface(&self, id: HypId) -> &HypersurfaceRecord {
        &self.hyps[id]
    }

    pub fn hypersurfaces(&self) -> &[HypersurfaceRecord] {
        &self.hyps
    }

    /// Registers a new exceptional hypersurface created at `step`.
    pub fn new_exceptional(&mut self, step: usize) -> HypId {
        let id = self.hyps.len();
        let name = format!("E{}", id + 1);
        self.hyps.push(HypersurfaceRecord { id, name, origin: Origin::Exceptional { step } });
        id
    }

    fn check_center(&self, center: &AlignedCenter) -> Result<&Chart> {
        let chart = self
            .charts
            .get(center.chart)
            .ok_or_else(|| Error::Misaligned(format!("unknown chart {}", center.chart)))?;
        if center.coords.is_empty() {
            return Err(Error::Misaligned(String::from("empty center")));
        }
        if let Some(&bad) = center.coords.iter().find(|&&c| c >= chart.nvars()) {
            return Err(Error::IndexOutOfRange { index: bad, nvars: chart.nvars() });
        }
        if !chart.w_coords.iter().all(|w| center.coords.contains(w)) {
            return Err(Error::Misaligned(String::from("center is not inside W")));
        }
        Ok(chart)
    }

    /// Blows up `center` with a fresh exceptional hypersurface.
    pub fn blowup(&mut self, center: &AlignedCenter, step: usize) -> Result<(Vec<ChartId>, HypId)> {
        self.check_center(center)?;
        let exc = self.new_exceptional(step);
        let charts = self.blowup_with(center, exc)?;
        Ok((charts, exc))
    }

    /// Blows up `center` recording `exc` as the exceptional hypersurface.
    ///
    /// Returns one chart per center coordinate outside `W` (charts indexed by a
    /// `W` coordinate miss the strict transform of `W` and are omitted). A
    /// codimension-one center yields a single identity chart.
    pub fn blowup_with(&mut self, center: &AlignedCenter, exc: HypId) -> Result<Vec<ChartId>> {
        let parent = self.check_center(center)?.clone();
        let mut out = Vec::new();
        if center.coords.len() == 1 {
            let c = center.coords[0];
            let mut hyps: BTreeMap<HypId, usize> =
                parent.hyps.iter().filter(|(_, &v)| v != c).map(|(&h, &v)| (h, v)).collect();
            hyps.insert(exc, c);
            let id = self.charts.len();
            self.charts.push(Chart {
                id,
                label: format!("{}.{}", parent.label, parent.names[c]),
                names: parent.names.clone(),
                map: ChartMap::Divisor { parent: parent.id, coord: c },
                hyps,
                w_coords: parent.w_coords.clone(),
            });
            out.push(id);
            return Ok(out);
        }
        for &pivot in &center.coords {
            if parent.w_coords.contains(&pivot) {
                continue;
            }
            let mut hyps: BTreeMap<HypId, usize> =
                parent.hyps.iter().filter(|(_, &v)| v != pivot).map(|(&h, &v)| (h, v)).collect();
            hyps.insert(exc, pivot);
            let id = self.charts.len();
            self.charts.push(Chart {
                id,
                label: format!("{}.{}", parent.label, parent.names[pivot]),
                names: parent.names.clone(),
                map: ChartMap::Blowup { parent: parent.id, center: center.coords.clone(), pivot },
                hyps,
                w_coords: parent.w_coords.clone(),
            });
            out.push(id);
        }
        Ok(out)
    }

    /// Replaces the pivot coordinate by `equation`, which must read
    /// `c·x_pivot + h` with `c` a nonzero rational constant and `h` free of
    /// `x_pivot`. Returns the new chart (the same chart when the change is the
    /// identity).
    pub fn triangular_change(&mut self, chart: ChartId, pivot: usize, equation: &Poly) -> Result<ChartId> {
        let parent = self.charts[chart].clone();
        let n = parent.nvars();
        if pivot >= n {
            return Err(Error::IndexOutOfRange { index: pivot, nvars: n });
        }
        let lin = linear_pivot_coefficient(equation, pivot)?;
        let var = Poly::var(self.ring, n, pivot);
        if lin.is_one() && equation.sub(&var).is_zero() {
            return Ok(chart);
        }
        if parent.w_coords.contains(&pivot) {
            return Err(Error::Misaligned(String::from("pivot cuts out W")));
        }
        if let Some(h) = parent.hyp_at(pivot) {
            return Err(Error::Misaligned(format!(
                "change would break alignment of hypersurface {}",
                self.hyps[h].name
            )));
        }
        let id = self.charts.len();
        self.charts.push(Chart {
            id,
            label: format!("{}~{}", parent.label, parent.names[pivot]),
            names: parent.names.clone(),
            map: ChartMap::Triangular { parent: chart, pivot, equation: equation.clone() },
            hyps: parent.hyps.clone(),
            w_coords: parent.w_coords.clone(),
        });
        Ok(id)
    }

    /// Exchanges coordinates `a` and `b` of `chart`, names and hypersurface
    /// coordinates included. Neither may cut out `W`.
    pub fn swap(&mut self, chart: ChartId, a: usize, b: usize) -> Result<ChartId> {
        let parent = self.charts[chart].clone();
        let n = parent.nvars();
        if let Some(&bad) = [a, b].iter().find(|&&c| c >= n) {
            return Err(Error::IndexOutOfRange { index: bad, nvars: n });
        }
        if a == b {
            return Ok(chart);
        }
        if parent.w_coords.contains(&a) || parent.w_coords.contains(&b) {
            return Err(Error::Misaligned(String::from("swapped coordinate cuts out W")));
        }
        let mut names = parent.names.clone();
        names.swap(a, b);
        let hyps = parent
            .hyps
            .iter()
            .map(|(&h, &v)| (h, if v == a { b } else if v == b { a } else { v }))
            .collect();
        let id = self.charts.len();
        self.charts.push(Chart {
            id,
            label: format!("{}~({} {})", parent.label, parent.names[a], parent.names[b]),
            names,
            map: ChartMap::Swap { parent: chart, a, b },
            hyps,
            w_coords: parent.w_coords.clone(),
        });
        Ok(id)
    }

    /// The product of `chart` with an affine line whose coordinate is `name`.
    pub fn extend(&mut self, chart: ChartId, name: String) -> ChartId {
        let parent = self.charts[chart].clone();
        let mut names = parent.names.clone();
        names.push(name);
        let id = self.charts.len();
        self.charts.push(Chart {
            id,
            label: format!("{}+", parent.label),
            names,
            map: ChartMap::Extension { parent: chart },
            hyps: parent.hyps.clone(),
            w_coords: parent.w_coords.clone(),
        });
        id
    }

    /// The same tree over the residue field: triangular equations are
    /// reduced modulo `ε`.
    pub fn fiber(&self) -> Result<ChartTree> {
        let mut out = self.clone();
        if self.ring.is_field() {
            return Ok(out);
        }
        out.ring = CoefRing::FIELD;
        for c in &mut out.charts {
            if let ChartMap::Triangular { equation, .. } = &mut c.map {
                *equation = equation.set_fiber()?;
            }
        }
        Ok(out)
    }

    /// Repeats on `other` the chart operations of `self` from chart `start`
    /// on. Both trees must agree on the first `start` charts and on the
    /// hypersurfaces created before them; chart and hypersurface ids then
    /// coincide. Triangular equations are lifted to the ring of `other`.
    pub fn replay_from(&self, other: &mut ChartTree, start: ChartId) -> Result<()> {
        if other.charts.len() != start {
            return Err(Error::Invalid(format!("target tree has {} charts, expected {start}", other.charts.len())));
        }
        let mut id = start;
        while id < self.charts.len() {
            let chart = &self.charts[id];
            match &chart.map {
                ChartMap::Root => return Err(Error::Invalid(String::from("a second root"))),
                ChartMap::Triangular { parent, pivot, equation } => {
                    other.triangular_change(*parent, *pivot, &equation.lift_to(other.ring)?)?;
                    id += 1;
                }
                ChartMap::Swap { parent, a, b } => {
                    other.swap(*parent, *a, *b)?;
                    id += 1;
                }
                ChartMap::Extension { parent } => {
                    let name = chart.names.last().cloned().unwrap_or_default();
                    other.extend(*parent, name);
                    id += 1;
                }
                ChartMap::Blowup { parent, center, pivot } => {
                    let exc = chart.hyps.iter().find(|(_, &v)| v == *pivot).map(|(&h, _)| h).expect("exceptional");
                    other.sync_hyps(self, exc);
                    let made = other.blowup_with(&AlignedCenter::new(*parent, center), exc)?;
                    id += made.len();
                }
                ChartMap::Divisor { parent, coord } => {
                    let exc = chart.hyps.iter().find(|(_, &v)| v == *coord).map(|(&h, _)| h).expect("exceptional");
                    other.sync_hyps(self, exc);
                    other.blowup_with(&AlignedCenter::new(*parent, &[*coord]), exc)?;
                    id += 1;
                }
            }
        }
        if other.charts.len() != self.charts.len() {
            return Err(Error::Invalid(String::from("replay produced a different number of charts")));
        }
        Ok(())
    }

    fn sync_hyps(&mut self, from: &ChartTree, upto: HypId) {
        while self.hyps.len() <= upto {
            self.hyps.push(from.hyps[self.hyps.len()].clone());
        }
    }

    /// Images of the parent's coordinates as polynomials in this chart
    /// (`None` for a root).
    pub fn images(&self, chart: ChartId) -> Option<Vec<Poly>> {
        let c = &self.charts[chart];
        let n = c.nvars();
        let ring = self.ring;
        match &c.map {
            ChartMap::Root => None,
            ChartMap::Divisor { .. } => Some((0..n).map(|i| Poly::var(ring, n, i)).collect()),
            ChartMap::Extension { .. } => Some((0..n - 1).map(|i| Poly::var(ring, n, i)).collect()),
            ChartMap::Swap { a, b, .. } => Some(
                (0..n).map(|i| Poly::var(ring, n, if i == *a { *b } else if i == *b { *a } else { i })).collect(),
            ),
            ChartMap::Blowup { center, pivot, .. } => Some(
                (0..n)
                    .map(|j| {
                        if j != *pivot && center.contains(&j) {
                            let mut e = alloc::vec![0u32; n];
                            e[j] = 1;
                            e[*pivot] = 1;
                            Poly::term(ring, Monomial::new(e), Coef::one(ring))
                        } else {
                            Poly::var(ring, n, j)
                        }
                    })
                    .collect(),
            ),
            ChartMap::Triangular { pivot, equation, .. } => {
                let lin = linear_pivot_coefficient(equation, *pivot).expect("validated on construction");
                let var = Poly::var(ring, n, *pivot);
                let h = equation.sub(&var.scale(&lin));
                let inv = lin.inverse().expect("nonzero rational");
                Some(
                    (0..n)
                        .map(|j| if j == *pivot { var.sub(&h).scale(&inv) } else { Poly::var(ring, n, j) })
                        .collect(),
                )
            }
        }
    }

    /// Pulls a polynomial of the parent chart back to `chart`.
    pub fn pull_back(&self, chart: ChartId, f: &Poly) -> Result<Poly> {
        match self.images(chart) {
            None => Ok(f.clone()),
            Some(images) => f.substitute(&images),
        }
    }

    /// Pulls a polynomial written in chart `ancestor` down to `chart`.
    pub fn pull_back_from(&self, ancestor: ChartId, chart: ChartId, f: &Poly) -> Result<Poly> {
        let path = self.path_from(ancestor, chart)?;
        let mut g = f.clone();
        for c in path {
            g = self.pull_back(c, &g)?;
        }
        Ok(g)
    }

    /// Charts strictly below `ancestor` on the way to `chart`, top-down.
    fn path_from(&self, ancestor: ChartId, chart: ChartId) -> Result<Vec<ChartId>> {
        let mut path = Vec::new();
        let mut cur = chart;
        while cur != ancestor {
            path.push(cur);
            cur = self.charts[cur]
                .parent()
                .ok_or_else(|| Error::Invalid(format!("chart {ancestor} is not an ancestor of {chart}")))?;
        }
        path.reverse();
        Ok(path)
    }

    /// Image of a point of `chart` in its parent chart.
    pub fn point_to_parent(&self, chart: ChartId, p: &[Rational]) -> Result<Vec<Rational>> {
        match self.images(chart) {
            None => Ok(p.to_vec()),
            Some(images) => images.iter().map(|g| g.eval(p).map(|c| c.constant_part().clone())).collect(),
        }
    }

    /// Image of a point of `chart` in the root chart.
    pub fn point_to_root(&self, chart: ChartId, p: &[Rational]) -> Result<Vec<Rational>> {
        let mut cur = chart;
        let mut q = p.to_vec();
        while let Some(parent) = self.charts[cur].parent() {
            q = self.point_to_parent(cur, &q)?;
            cur = parent;
        }
        Ok(q)
    }

    /// Preimage in `chart` of a parent point, when the point lies in the chart
    /// and off the exceptional divisor.
    pub fn point_from_parent(&self, chart: ChartId, p: &[Rational]) -> Result<Option<Vec<Rational>>> {
        let c = &self.charts[chart];
        match &c.map {
            ChartMap::Root | ChartMap::Divisor { .. } => Ok(Some(p.to_vec())),
            ChartMap::Extension { .. } => {
                let mut q = p.to_vec();
                q.push(Rational::zero());
                Ok(Some(q))
            }
            ChartMap::Swap { a, b, .. } => {
                let mut q = p.to_vec();
                q.swap(*a, *b);
                Ok(Some(q))
            }
            ChartMap::Blowup { center, pivot, .. } => {
                if p[*pivot].is_zero() {
                    return Ok(None);
                }
                let mut q = p.to_vec();
                for &j in center {
                    if j != *pivot {
                        q[j] = &p[j] / &p[*pivot];
                    }
                }
                Ok(Some(q))
            }
            ChartMap::Triangular { pivot, equation, .. } => {
                let mut q = p.to_vec();
                q[*pivot] = equation.eval(p)?.constant_part().clone();
                Ok(Some(q))
            }
        }
    }

    /// Preimage in `chart` of a point of its ancestor `ancestor`.
    pub fn point_from_ancestor(&self, ancestor: ChartId, chart: ChartId, p: &[Rational]) -> Result<Option<Vec<Rational>>> {
        let mut q = p.to_vec();
        for c in self.path_from(ancestor, chart)? {
            match self.point_from_parent(c, &q)? {
                Some(next) => q = next,
                None => return Ok(None),
            }
        }
        Ok(Some(q))
    }

    /// Nearest common ancestor of two charts.
    pub fn common_ancestor(&self, a: ChartId, b: ChartId) -> ChartId {
        let mut seen = BTreeSet::new();
        let mut cur = Some(a);
        while let Some(c) = cur {
            seen.insert(c);
            cur = self.charts[c].parent();
        }
        let mut cur = Some(b);
        while let Some(c) = cur {
            if seen.contains(&c) {
                return c;
            }
            cur = self.charts[c].parent();
        }
        0
    }
}

/// The constant `c` in `equation = c·x_pivot + h(other coordinates)`.
fn linear_pivot_coefficient(equation: &Poly, pivot: usize) -> Result<Coef> {
    let n = equation.nvars();
    if pivot >= n {
        return Err(Error::IndexOutOfRange { index: pivot, nvars: n });
    }
    let lin = equation.coefficient(&Monomial::var(n, pivot));
    if lin.is_zero() || !lin.is_unit() || lin.parts()[1..].iter().any(|p| !p.is_zero()) {
        return Err(Error::Misaligned(String::from("equation has no invertible linear part on the pivot")));
    }
    let others = equation.terms().any(|(m, _)| m.exps()[pivot] > 0 && *m != Monomial::var(n, pivot));
    if others {
        return Err(Error::Misaligned(String::from("equation is not triangular in the pivot")));
    }
    Ok(lin)
}

/// True iff the listed hypersurfaces have normal crossings in `chart`: every
/// present one is a distinct coordinate outside `W`.
pub fn normal_crossings_check(e: &[HypId], chart: &Chart) -> bool {
    let mut seen = BTreeSet::new();
    for h in e {
        if let Some(c) = chart.hyp_coord(*h) {
            if chart.w_coords.contains(&c) || !seen.insert(c) {
                return false;
            }
        }
    }
    true
}

/// True iff the aligned center has normal crossings with `E`: with every
/// hypersurface a distinct coordinate, the chart coordinates are a regular
/// system of parameters in which the center and each `H` are coordinate
/// subvarieties.
pub fn center_normal_crossings(center: &AlignedCenter, e: &[HypId], chart: &Chart) -> bool {
    center.chart == chart.id
        && center.coords.iter().all(|&c| c < chart.nvars())
        && normal_crossings_check(e, chart)
}

/// True iff the center is transversal to `E`: no hypersurface coordinate is
/// among the center's defining coordinates.
pub fn transversal_check(center: &AlignedCenter, e: &[HypId], chart: &Chart) -> bool {
    center_normal_crossings(center, e, chart)
        && e.iter().all(|h| chart.hyp_coord(*h).is_none_or(|c| !center.coords.contains(&c)))
}
