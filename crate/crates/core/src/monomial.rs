//! Monomial multi-ideals as exponent matrices over `E`: the function Γ, the
//! canonical monomial center, the exponent transform law and the monomial
//! resolver.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::error::{Error, Result};
use crate::poly::Rational;

/// Default number of steps after which [`resolve_monomial`] gives up.
pub const DEFAULT_STEP_CAP: usize = 64;

/// `Γ = (−p, ratio, seq)`, ordered lexicographically with `seq` padded by
/// zeros. Indices in `seq` are 1-based positions in `E`, increasing.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GammaValue {
    pub p: u32,
    pub ratio: Rational,
    pub seq: Vec<usize>,
}

impl Ord for GammaValue {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .p
            .cmp(&self.p)
            .then_with(|| self.ratio.cmp(&other.ratio))
            .then_with(|| padded_cmp(&self.seq, &other.seq))
    }
}

impl PartialOrd for GammaValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn padded_cmp(a: &[usize], b: &[usize]) -> Ordering {
    let n = a.len().max(b.len());
    for i in 0..n {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        match x.cmp(&y) {
            Ordering::Equal => {}
            o => return o,
        }
    }
    Ordering::Equal
}

impl fmt::Display for GammaValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(-{}, {}, [", self.p, self.ratio)?;
        for (i, s) in self.seq.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, "])")
    }
}

/// One pair `(∏ I(H_k)^{α_k}, b)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MonomialPair {
    pub mark: u32,
    pub exps: Vec<u32>,
}

/// A monomial multi-ideal: exponent vectors over `E = (H_1, …, H_m)` and the
/// complex of nonempty intersections of members of `E` (0-based index sets).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialForm {
    pub pairs: Vec<MonomialPair>,
    pub strata: BTreeSet<Vec<usize>>,
}

impl MonomialForm {
    /// A form whose hypersurfaces are coordinate hyperplanes of a `dim`-
    /// dimensional chart: every set of at most `dim` of them meets.
    pub fn new(pairs: Vec<MonomialPair>, dim: usize) -> Result<Self> {
        let m = pairs.first().map_or(0, |p| p.exps.len());
        if pairs.is_empty() {
            return Err(Error::Invalid("a monomial form needs at least one pair".to_string()));
        }
        if pairs.iter().any(|p| p.exps.len() != m) {
            return Err(Error::Invalid("exponent vectors of different lengths".to_string()));
        }
        if pairs.iter().any(|p| p.mark == 0) {
            return Err(Error::Invalid("marks must be positive".to_string()));
        }
        if m > 20 {
            return Err(Error::LimitExceeded(format!("{m} hypersurfaces")));
        }
        let mut strata = BTreeSet::new();
        for mask in 1u32..(1u32 << m) {
            if mask.count_ones() as usize <= dim {
                strata.insert((0..m).filter(|i| mask & (1 << i) != 0).collect());
            }
        }
        Ok(MonomialForm { pairs, strata })
    }

    /// Number of hypersurfaces in `E`.
    pub fn nhyps(&self) -> usize {
        self.pairs[0].exps.len()
    }

    /// Every pair is singular at the generic point of the stratum.
    pub fn is_singular(&self, stratum: &[usize]) -> bool {
        self.pairs.iter().all(|p| stratum.iter().map(|&i| p.exps[i]).sum::<u32>() >= p.mark)
    }

    /// Strata inside `Sing`.
    pub fn singular_strata(&self) -> Vec<Vec<usize>> {
        self.strata.iter().filter(|s| self.is_singular(s)).cloned().collect()
    }

    /// Parses lines `pair b=4 exps=[2,3]`; an optional line `dim=d` sets
    /// the chart dimension (default: the number of hypersurfaces).
    pub fn parse(src: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        let mut dim = None;
        for (ln, line) in src.lines().enumerate() {
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let err = |msg: &str| Error::Parse { line: ln + 1, col: 1, msg: String::from(msg) };
            if let Some(d) = t.strip_prefix("dim=") {
                dim = Some(d.trim().parse::<usize>().map_err(|_| err("bad dimension"))?);
                continue;
            }
            let rest = t.strip_prefix("pair").ok_or_else(|| err("expected `pair`"))?.trim_start();
            let rest = rest.strip_prefix("b=").ok_or_else(|| err("expected `b=`"))?;
            let (b, rest) = rest.split_once(char::is_whitespace).ok_or_else(|| err("expected exponents"))?;
            let mark = b.parse::<u32>().map_err(|_| err("bad mark"))?;
            let list = rest
                .trim()
                .strip_prefix("exps=[")
                .and_then(|r| r.strip_suffix(']'))
                .ok_or_else(|| err("expected `exps=[...]`"))?;
            let exps = if list.trim().is_empty() {
                Vec::new()
            } else {
                list.split(',').map(|s| s.trim().parse::<u32>().map_err(|_| err("bad exponent"))).collect::<Result<Vec<_>>>()?
            };
            pairs.push(MonomialPair { mark, exps });
        }
        let m = pairs.first().map_or(0, |p| p.exps.len());
        MonomialForm::new(pairs, dim.unwrap_or(m))
    }
}

impl fmt::Display for MonomialForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.pairs.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "pair b={} exps=[", p.mark)?;
            for (k, e) in p.exps.iter().enumerate() {
                if k > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{e}")?;
            }
            write!(f, "]")?;
        }
        Ok(())
    }
}

/// Γ from an exponent table: `exps[q][k]` is the exponent of pair `q` along
/// the `k`-th hypersurface through the point, `labels[k]` its 1-based
/// position in `E`. `NotSingular` when no pair reaches its mark.
pub fn gamma_from_table(exps: &[Vec<u32>], marks: &[u32], labels: &[usize]) -> Result<GammaValue> {
    let mut p_min: Option<usize> = None;
    for (row, &b) in exps.iter().zip(marks) {
        let mut sorted = row.clone();
        sorted.sort_unstable_by(|a, b| b.cmp(a));
        let mut acc = 0u32;
        for (k, v) in sorted.iter().enumerate() {
            acc += v;
            if acc >= b {
                p_min = Some(p_min.map_or(k + 1, |p| p.min(k + 1)));
                break;
            }
        }
    }
    let p = p_min.ok_or(Error::NotSingular)?;
    let mut ratio: Option<Rational> = None;
    for (row, &b) in exps.iter().zip(marks) {
        let mut sorted = row.clone();
        sorted.sort_unstable_by(|a, b| b.cmp(a));
        let s: u32 = sorted.iter().take(p).sum();
        if s >= b {
            let r = Rational::new(s.into(), b.into());
            if ratio.as_ref().is_none_or(|best| r > *best) {
                ratio = Some(r);
            }
        }
    }
    let ratio = ratio.expect("a pair attains p");
    let mut best: Option<Vec<usize>> = None;
    let m = labels.len();
    let mut idx: Vec<usize> = (0..p).collect();
    loop {
        for (row, &b) in exps.iter().zip(marks) {
            let s: u32 = idx.iter().map(|&k| row[k]).sum();
            if Rational::new(s.into(), b.into()) == ratio {
                let mut seq: Vec<usize> = idx.iter().map(|&k| labels[k]).collect();
                seq.sort_unstable();
                if best.as_ref().is_none_or(|cur| padded_cmp(&seq, cur) == Ordering::Greater) {
                    best = Some(seq);
                }
            }
        }
        if !next_combination(&mut idx, m) {
            break;
        }
    }
    Ok(GammaValue { p: p as u32, ratio, seq: best.expect("the ratio is attained") })
}

/// Advances `idx` (strictly increasing, values below `n`) to the next
/// combination in lexicographic order.
fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    for i in (0..k).rev() {
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Γ at the generic point of a stratum.
pub fn gamma(form: &MonomialForm, stratum: &[usize]) -> Result<GammaValue> {
    if !form.is_singular(stratum) {
        return Err(Error::NotSingular);
    }
    let table: Vec<Vec<u32>> = form.pairs.iter().map(|p| stratum.iter().map(|&i| p.exps[i]).collect()).collect();
    let marks: Vec<u32> = form.pairs.iter().map(|p| p.mark).collect();
    let labels: Vec<usize> = stratum.iter().map(|&i| i + 1).collect();
    gamma_from_table(&table, &marks, &labels)
}

/// `max(Γ)` over the singular strata and the strata attaining it.
pub fn max_gamma(form: &MonomialForm) -> Result<Option<(GammaValue, Vec<Vec<usize>>)>> {
    let mut best: Option<(GammaValue, Vec<Vec<usize>>)> = None;
    for s in form.singular_strata() {
        let g = gamma(form, &s)?;
        match &mut best {
            None => best = Some((g, alloc::vec![s])),
            Some((b, list)) => match g.cmp(b) {
                Ordering::Greater => best = Some((g, alloc::vec![s])),
                Ordering::Equal => list.push(s),
                Ordering::Less => {}
            },
        }
    }
    Ok(best)
}

/// The unique inclusion-minimal index set among `strata` (the largest
/// subvariety of their union); an error when there are several.
pub fn minimal_stratum(strata: &[Vec<usize>]) -> Result<Vec<usize>> {
    let minimal: Vec<&Vec<usize>> =
        strata.iter().filter(|s| !strata.iter().any(|t| t != *s && t.iter().all(|i| s.contains(i)))).collect();
    match minimal.as_slice() {
        [one] => Ok((*one).clone()),
        _ => Err(Error::UnsupportedLocus(format!("the maximum locus has {} components", minimal.len()))),
    }
}

/// `Max(Γ)` as an intersection of members of `E` (0-based indices) together
/// with `max(Γ)`; `None` when `Sing` is empty.
pub fn canonical_monomial_center(form: &MonomialForm) -> Result<Option<(Vec<usize>, GammaValue)>> {
    match max_gamma(form)? {
        None => Ok(None),
        Some((g, strata)) => Ok(Some((minimal_stratum(&strata)?, g))),
    }
}

/// Blows up the intersection of the members of `E` indexed by `center`: the
/// new hypersurface gets exponent `Σ_{k ∈ center} α_k − b` for each pair and
/// the strata complex is subdivided.
pub fn monomial_transform(form: &MonomialForm, center: &[usize]) -> Result<MonomialForm> {
    let mut center = center.to_vec();
    center.sort_unstable();
    if center.is_empty() || !form.strata.contains(&center) {
        return Err(Error::Misaligned(format!("center {center:?} is not a stratum")));
    }
    let new = form.nhyps();
    let mut pairs = Vec::new();
    for (q, p) in form.pairs.iter().enumerate() {
        let s: u32 = center.iter().map(|&k| p.exps[k]).sum();
        if s < p.mark {
            return Err(Error::NotPermissible { pair: q });
        }
        let mut exps = p.exps.clone();
        exps.push(s - p.mark);
        pairs.push(MonomialPair { mark: p.mark, exps });
    }
    let contains_center = |t: &[usize]| center.iter().all(|c| t.contains(c));
    let mut strata: BTreeSet<Vec<usize>> = form.strata.iter().filter(|t| !contains_center(t)).cloned().collect();
    strata.insert(alloc::vec![new]);
    for t in &form.strata {
        if contains_center(t) {
            continue;
        }
        let mut union: Vec<usize> = t.iter().chain(center.iter()).copied().collect();
        union.sort_unstable();
        union.dedup();
        if form.strata.contains(&union) {
            let mut s = t.clone();
            s.push(new);
            strata.insert(s);
        }
    }
    Ok(MonomialForm { pairs, strata })
}

/// One step of the monomial resolver.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialStep {
    /// 0-based indices of the members of `E` cut out by the center.
    pub center: Vec<usize>,
    pub gamma: GammaValue,
}

/// Canonical-center resolution of a monomial form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialTrace {
    pub steps: Vec<MonomialStep>,
    pub result: MonomialForm,
}

/// Iterates canonical center and transform until no stratum is singular.
pub fn resolve_monomial(form: &MonomialForm, step_cap: usize) -> Result<MonomialTrace> {
    let mut cur = form.clone();
    let mut steps = Vec::new();
    while let Some((center, g)) = canonical_monomial_center(&cur)? {
        if steps.len() >= step_cap {
            return Err(Error::NonTermination(step_cap));
        }
        cur = monomial_transform(&cur, &center)?;
        steps.push(MonomialStep { center, gamma: g });
    }
    Ok(MonomialTrace { steps, result: cur })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;
    use alloc::string::ToString;
    use alloc::vec;

    fn single(b: u32, exps: &[u32]) -> MonomialForm {
        MonomialForm::new(vec![MonomialPair { mark: b, exps: exps.to_vec() }], exps.len()).unwrap()
    }

    #[test]
    fn gamma_examples() {
        let f = single(4, &[2, 3]);
        let g = gamma(&f, &[0, 1]).unwrap();
        assert_eq!(g, GammaValue { p: 2, ratio: rat(5, 4), seq: vec![1, 2] });
        assert_eq!(g.to_string(), "(-2, 5/4, [1,2])");
        let f = single(3, &[3]);
        assert_eq!(gamma(&f, &[0]).unwrap(), GammaValue { p: 1, ratio: rat(1, 1), seq: vec![1] });
        assert_eq!(gamma(&single(4, &[2, 3]), &[0]), Err(Error::NotSingular));
    }

    #[test]
    fn gamma_ratio_is_a_maximum_over_pairs() {
        let f = MonomialForm::new(
            vec![MonomialPair { mark: 2, exps: vec![2, 1] }, MonomialPair { mark: 1, exps: vec![1, 3] }],
            2,
        )
        .unwrap();
        let g = gamma(&f, &[0, 1]).unwrap();
        assert_eq!(g, GammaValue { p: 1, ratio: rat(3, 1), seq: vec![2] });
    }

    #[test]
    fn canonical_centers() {
        assert_eq!(canonical_monomial_center(&single(4, &[2, 3])).unwrap().unwrap().0, vec![0, 1]);
        assert_eq!(canonical_monomial_center(&single(4, &[5, 1])).unwrap().unwrap().0, vec![0]);
        let tie = single(2, &[2, 2]);
        let (c, g) = canonical_monomial_center(&tie).unwrap().unwrap();
        assert_eq!(g.seq, vec![2]);
        assert_eq!(c, vec![1]);
    }

    #[test]
    fn transform_law() {
        let t = monomial_transform(&single(4, &[2, 3]), &[0, 1]).unwrap();
        assert_eq!(t.pairs[0].exps, vec![2, 3, 1]);
        assert!(!t.strata.contains(&vec![0, 1]));
        let t = monomial_transform(&single(3, &[3, 0]), &[0]).unwrap();
        assert_eq!(t.pairs[0].exps, vec![3, 0, 0]);
        assert_eq!(monomial_transform(&single(4, &[1, 1]), &[0, 1]), Err(Error::NotPermissible { pair: 0 }));
    }

    #[test]
    fn two_step_resolution() {
        let tr = resolve_monomial(&single(4, &[2, 3]), DEFAULT_STEP_CAP).unwrap();
        assert_eq!(tr.steps.len(), 2);
        assert_eq!(tr.steps[0].center, vec![0, 1]);
        assert_eq!(tr.steps[1].center, vec![1, 2]);
        assert_eq!(tr.steps[0].gamma.to_string(), "(-2, 5/4, [1,2])");
        assert_eq!(tr.steps[1].gamma.to_string(), "(-2, 1, [2,3])");
        assert!(tr.result.singular_strata().is_empty());
        assert!(resolve_monomial(&single(4, &[1, 1]), DEFAULT_STEP_CAP).unwrap().steps.is_empty());
    }

    #[test]
    fn text_round_trip() {
        let f = MonomialForm::parse("pair b=4 exps=[2,3]").unwrap();
        assert_eq!(f, single(4, &[2, 3]));
        assert_eq!(f.to_string(), "pair b=4 exps=[2,3]");
        assert!(matches!(MonomialForm::parse("pair b=x exps=[1]"), Err(Error::Parse { line: 1, .. })));
    }
}
