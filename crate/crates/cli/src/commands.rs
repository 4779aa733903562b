//! Dispatch of the subcommands to the engine.

use std::fmt::Write as _;

use multires_core::artinian::{associated_basic_object_a, fiber, inductive_multiideal_a, lift_report, v_orders, VPermissibility};
use multires_core::charts::{AlignedCenter, ChartTree};
use multires_core::monomial::{gamma, max_gamma, resolve_monomial};
use multires_core::multiideal::{equiv_spotcheck, sample_points, transform_multiideal, MultiIdeal, SpotcheckOutcome};
use multires_core::pairs::MarkedPair;
use multires_core::poly::{Poly, Rational};
use multires_core::resolution::{ResolveOptions, Resolver, TraceStep};
use multires_core::Error;

use crate::problem::{PairSpec, Problem, ProblemFile};
use crate::trace::{CenterRecord, ChartRecord, StepRecord, TraceFile};
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Sing,
    Order,
    Delta,
    Blowup,
    Gamma,
    ResolveMonomial,
    Resolve,
    ArtinianCheck,
    EquivSpotcheck,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Sing => "sing",
            Command::Order => "order",
            Command::Delta => "delta",
            Command::Blowup => "blowup",
            Command::Gamma => "gamma",
            Command::ResolveMonomial => "resolve-monomial",
            Command::Resolve => "resolve",
            Command::ArtinianCheck => "artinian-check",
            Command::EquivSpotcheck => "equiv-spotcheck",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Options {
    pub step_cap: usize,
    pub chart_limit: usize,
    pub seed: u64,
}

impl Default for Options {
    fn default() -> Self {
        let r = ResolveOptions::default();
        Options { step_cap: r.step_cap, chart_limit: r.chart_limit, seed: multires_core::multiideal::SAMPLE_SEED }
    }
}

/// Result of a command: a human-readable report and a trace document. A
/// failed resolution still carries its partial trace, with the error kept
/// for the exit status.
#[derive(Debug)]
pub struct Output {
    pub report: String,
    pub trace: TraceFile,
    pub error: Option<CliError>,
}

pub fn run(command: Command, file: &ProblemFile, options: &Options) -> Result<Output, CliError> {
    match command {
        Command::Gamma => return gamma_cmd(file),
        Command::ResolveMonomial => return resolve_monomial_cmd(file, options),
        _ => {}
    }
    let problem = file.build()?;
    match command {
        Command::Sing => sing_cmd(&problem, options),
        Command::Order => order_cmd(&problem),
        Command::Delta => delta_cmd(&problem),
        Command::Blowup => blowup_cmd(problem),
        Command::Resolve => resolve_cmd(problem, options),
        Command::ArtinianCheck => artinian_cmd(&problem),
        Command::EquivSpotcheck => spotcheck_cmd(problem),
        Command::Gamma | Command::ResolveMonomial => unreachable!("handled above"),
    }
}

fn multi(p: &Problem) -> Result<&MultiIdeal, CliError> {
    p.multi.as_ref().ok_or_else(|| CliError::Input(String::from("the problem has no pairs")))
}

fn pair_specs(pairs: &[MarkedPair], names: &[String]) -> Vec<PairSpec> {
    pairs
        .iter()
        .map(|p| PairSpec { gens: p.ideal.gens().iter().map(|g| g.to_string_with(names)).collect(), mark: p.mark })
        .collect()
}

fn new_trace(command: Command, p: &Problem) -> TraceFile {
    let input = p.multi.as_ref().map(|m| pair_specs(&m.pairs, &p.file.vars)).unwrap_or_default();
    TraceFile::new(command.name(), p.ring.to_string(), p.file.vars.clone(), input)
}

fn point_string(p: &[Rational]) -> String {
    let parts: Vec<String> = p.iter().map(|r| r.to_string()).collect();
    format!("({})", parts.join(", "))
}

fn finish(mut trace: TraceFile, lines: Vec<String>) -> Output {
    let mut report = String::new();
    for l in &lines {
        report.push_str(l);
        report.push('\n');
    }
    trace.results = lines;
    Output { report, trace, error: None }
}

fn points_or_sample(p: &Problem, options: &Options) -> Result<Vec<Vec<Rational>>, CliError> {
    if p.file.points.is_empty() {
        let m = multi(p)?;
        Ok(sample_points(p.tree.chart(m.chart), &m.w, options.seed, 0))
    } else {
        p.file.points()
    }
}

fn sing_cmd(p: &Problem, options: &Options) -> Result<Output, CliError> {
    let m = multi(p)?;
    let mut lines = Vec::new();
    for pt in points_or_sample(p, options)? {
        let fiber_side = if p.ring.is_field() { None } else { Some(m.fiber_sing_member(&pt)?) };
        let mark = |b: bool| if b { "singular" } else { "not singular" };
        let mut line = format!("{}: {}", point_string(&pt), mark(m.sing_member(&pt)?));
        if let Some(f) = fiber_side {
            let _ = write!(line, " (fiber: {})", mark(f));
        }
        lines.push(line);
    }
    Ok(finish(new_trace(Command::Sing, p), lines))
}

fn order_cmd(p: &Problem) -> Result<Output, CliError> {
    let m = multi(p)?;
    let mut lines = Vec::new();
    if let Some(center) = &p.file.center {
        let c = AlignedCenter::new(m.chart, &p.file.coords(center)?);
        for (i, pair) in m.pairs.iter().enumerate() {
            lines.push(format!("pair {} along V({}): {}", i + 1, center.join(", "), pair.ideal.nu_along(&c, &m.w)?));
        }
    }
    for pt in p.file.points()? {
        for (i, pair) in m.pairs.iter().enumerate() {
            lines.push(format!("pair {} at {}: {}", i + 1, point_string(&pt), pair.ideal.order_at(&pt)?));
        }
    }
    Ok(finish(new_trace(Command::Order, p), lines))
}

fn delta_cmd(p: &Problem) -> Result<Output, CliError> {
    let m = multi(p)?;
    let names = &p.file.vars;
    let mut lines = Vec::new();
    for (i, pair) in m.pairs.iter().enumerate() {
        let j = p.file.delta.unwrap_or(pair.mark.saturating_sub(1));
        let d = pair.ideal.delta_iter(j).simplified();
        let mut d = d;
        if let Some(z) = &p.file.adapted {
            d = d.restrict_to(p.file.coord(z)?)?.simplified();
        }
        let gens: Vec<String> = d.gens().iter().map(|g| g.to_string_with(names)).collect();
        let at = p.file.adapted.as_ref().map(|z| format!(" restricted to {z}=0")).unwrap_or_default();
        lines.push(format!("delta^{j} of pair {}{at}: ({})", i + 1, gens.join(", ")));
    }
    Ok(finish(new_trace(Command::Delta, p), lines))
}

fn chart_record(tree: &ChartTree, m: &MultiIdeal) -> ChartRecord {
    let c = tree.chart(m.chart);
    ChartRecord { label: c.label.clone(), vars: c.names.clone(), pairs: pair_specs(&m.pairs, &c.names) }
}

fn blowup_cmd(p: Problem) -> Result<Output, CliError> {
    let mut trace = new_trace(Command::Blowup, &p);
    let m = multi(&p)?.clone();
    let center = p.file.center.clone().ok_or_else(|| CliError::Input(String::from("missing `center`")))?;
    let coords = p.file.coords(&center)?;
    let mut tree = p.tree;
    let kids = transform_multiideal(&mut tree, &m, &coords, 1)?;
    let root_label = tree.chart(m.chart).label.clone();
    trace.steps.push(StepRecord {
        index: 0,
        phase: String::from("explicit"),
        level: 0,
        h: String::new(),
        centers: vec![CenterRecord { chart: root_label, coords: center }],
        center_hyps: Vec::new(),
        changes: Vec::new(),
        new_charts: kids.iter().map(|k| tree.chart(k.chart).label.clone()).collect(),
    });
    let mut lines = Vec::new();
    for k in &kids {
        let rec = chart_record(&tree, k);
        for (i, pair) in rec.pairs.iter().enumerate() {
            lines.push(format!("chart {} [{}] pair {}: ({}), {}", rec.label, rec.vars.join(", "), i + 1, pair.gens.join(", "), pair.mark));
        }
        trace.status.charts.push(rec);
    }
    let mut out = finish(trace, lines);
    out.trace.results.clear();
    Ok(out)
}

fn gamma_cmd(file: &ProblemFile) -> Result<Output, CliError> {
    let form = file.monomial_form()?;
    let stratum = file.monomial.as_ref().and_then(|m| m.stratum.clone());
    let line = match stratum {
        Some(labels) => {
            let s: Vec<usize> = labels.iter().map(|l| l.checked_sub(1)).collect::<Option<_>>().ok_or_else(|| {
                CliError::Input(String::from("stratum labels are 1-based"))
            })?;
            gamma(&form, &s)?.to_string()
        }
        None => match max_gamma(&form)? {
            Some((g, _)) => g.to_string(),
            None => String::from("Sing is empty"),
        },
    };
    let trace = TraceFile::new("gamma", String::from("Q"), Vec::new(), Vec::new());
    Ok(finish(trace, vec![line]))
}

fn hyp_names(labels: &[usize]) -> Vec<String> {
    labels.iter().map(|l| format!("H{l}")).collect()
}

fn resolve_monomial_cmd(file: &ProblemFile, options: &Options) -> Result<Output, CliError> {
    let form = file.monomial_form()?;
    let mut trace = TraceFile::new("resolve-monomial", String::from("Q"), Vec::new(), Vec::new());
    let mono = resolve_monomial(&form, options.step_cap)?;
    let mut report = String::new();
    for (i, s) in mono.steps.iter().enumerate() {
        let labels: Vec<usize> = s.center.iter().map(|c| c + 1).collect();
        let _ = writeln!(report, "step {i}: center {} gamma {}", hyp_names(&labels).join(" "), s.gamma);
        trace.steps.push(StepRecord {
            index: i,
            phase: String::from("monomial"),
            level: 0,
            h: s.gamma.to_string(),
            centers: vec![CenterRecord { chart: String::from("monomial"), coords: hyp_names(&labels) }],
            center_hyps: labels,
            changes: Vec::new(),
            new_charts: Vec::new(),
        });
    }
    let _ = writeln!(report, "resolved after {} step{}", mono.steps.len(), if mono.steps.len() == 1 { "" } else { "s" });
    trace.status.outcome = String::from("resolved");
    trace.status.monomial = mono.result.to_string().lines().map(String::from).collect();
    Ok(Output { report, trace, error: None })
}

fn step_record(s: &TraceStep) -> StepRecord {
    StepRecord {
        index: s.index,
        phase: s.phase.to_string(),
        level: s.level,
        h: s.h.to_string(),
        centers: s.centers.iter().map(|c| CenterRecord { chart: c.label.clone(), coords: c.coords.clone() }).collect(),
        center_hyps: s.center_hyps.iter().map(|h| h + 1).collect(),
        changes: s.changes.clone(),
        new_charts: s.new_charts.clone(),
    }
}

fn resolve_cmd(p: Problem, options: &Options) -> Result<Output, CliError> {
    let mut trace = new_trace(Command::Resolve, &p);
    let m = multi(&p)?.clone();
    let opts = ResolveOptions { step_cap: options.step_cap, chart_limit: options.chart_limit };
    let mut resolver = Resolver::new(p.tree, &m, opts)?;
    let mut report = String::new();
    let mut error = None;
    loop {
        if trace.steps.len() >= options.step_cap {
            resolver.options.step_cap = 0;
            break;
        }
        match resolver.step() {
            Ok(Some(s)) => {
                let rec = step_record(&s);
                let centers: Vec<String> =
                    rec.centers.iter().map(|c| format!("{} V({})", c.chart, c.coords.join(", "))).collect();
                let _ = writeln!(report, "step {} [{}] level {}: h = {}; center {}", rec.index, rec.phase, rec.level, rec.h, centers.join("; "));
                trace.steps.push(rec);
            }
            Ok(None) => break,
            Err(e) => {
                error = Some(e);
                break;
            }
        }
    }
    if error.is_none() {
        match resolver.run() {
            Ok(done) => {
                for c in &done.final_charts {
                    trace.status.charts.push(ChartRecord {
                        label: c.label.clone(),
                        vars: c.names.clone(),
                        pairs: vec![PairSpec { gens: c.ideal.clone(), mark: c.mark }],
                    });
                }
            }
            Err(e) => error = Some(e),
        }
    }
    match &error {
        None => {
            trace.status.outcome = String::from("resolved");
            let n = trace.steps.len();
            let _ = writeln!(report, "resolved after {n} step{}", if n == 1 { "" } else { "s" });
        }
        Some(e) => {
            trace.status.outcome = String::from("failed");
            trace.status.error = Some(e.to_string());
            let _ = writeln!(report, "failed after {} steps: {e}", trace.steps.len());
        }
    }
    Ok(Output { report, trace, error: error.map(CliError::Core) })
}

fn orders_lines(label: &str, r: &VPermissibility, lines: &mut Vec<String>) {
    for (i, o) in r.pairs.iter().enumerate() {
        lines.push(format!("{label} pair {}: nu = {}, fiber nu = {}, mark = {}", i + 1, o.nu, o.fiber_nu, o.mark));
    }
}

fn verdict(r: &VPermissibility) -> String {
    match (r.permissible(), r.first_failing_pair()) {
        (Some(v), _) => format!("permissible (v = {})", v + 1),
        (None, Some(q)) => format!("not permissible: pair {} has nu = {} < {}", q + 1, r.pairs[q].nu, r.pairs[q].mark),
        (None, None) if !r.normal_crossings => String::from("not permissible: no normal crossings with E"),
        (None, None) => String::from("not permissible: no pair has nu equal to its fiber nu"),
    }
}

fn artinian_cmd(p: &Problem) -> Result<Output, CliError> {
    let m = multi(p)?;
    let names = &p.file.vars;
    let center = p.file.center.clone().ok_or_else(|| CliError::Input(String::from("missing `center`")))?;
    let c = AlignedCenter::new(m.chart, &p.file.coords(&center)?);
    let shown = format!("V({})", center.join(", "));
    let mut lines = Vec::new();
    let f = fiber(m)?;
    for (i, pair) in f.pairs.iter().enumerate() {
        let gens: Vec<String> = pair.ideal.gens().iter().map(|g| g.to_string_with(names)).collect();
        lines.push(format!("fiber pair {}: ({}), {}", i + 1, gens.join(", "), pair.mark));
    }
    let r = v_orders(&p.tree, m, &c)?;
    orders_lines("multi-ideal", &r, &mut lines);
    lines.push(format!("{shown} for the multi-ideal: {}", verdict(&r)));
    let b = associated_basic_object_a(m)?;
    let bgens: Vec<String> = b.ideal.gens().iter().map(|g| g.to_string_with(names)).collect();
    lines.push(format!("associated basic object: ({}), {}", bgens.join(", "), b.mark));
    let bm = MultiIdeal { chart: m.chart, w: m.w.clone(), pairs: vec![b], e: m.e.clone() };
    let rb = v_orders(&p.tree, &bm, &c)?;
    lines.push(format!("{shown} for the associated basic object: {}", verdict(&rb)));
    if let Some(z) = &p.file.adapted {
        if m.pairs.len() == 1 {
            let lr = lift_report(&p.tree, m, p.file.coord(z)?, &c)?;
            lines.push(format!(
                "lift along {z}=0: hypotheses {}, nu = {}, fiber nu = {}, permissible {}",
                lr.hypotheses, lr.nu, lr.fiber_nu, lr.permissible
            ));
            let bz = inductive_multiideal_a(&p.tree, m, p.file.coord(z)?)?;
            for (i, pair) in bz.pairs.iter().enumerate() {
                let gens: Vec<String> = pair.ideal.gens().iter().map(|g| g.to_string_with(names)).collect();
                lines.push(format!("inductive pair {}: ({}), {}", i + 1, gens.join(", "), pair.mark));
            }
            let rz = v_orders(&p.tree, &bz, &c)?;
            orders_lines("inductive", &rz, &mut lines);
            lines.push(format!("{shown} for the inductive object: {}", verdict(&rz)));
        }
    }
    Ok(finish(new_trace(Command::ArtinianCheck, p), lines))
}

fn spotcheck_cmd(p: Problem) -> Result<Output, CliError> {
    let trace = new_trace(Command::EquivSpotcheck, &p);
    let m = multi(&p)?.clone();
    let other = p.file.other.clone().ok_or_else(|| CliError::Input(String::from("missing `other`")))?;
    let pairs = p.file.marked_pairs(&other, p.ring, "other")?;
    let n = MultiIdeal::new(&p.tree, m.chart, &m.w, pairs, m.e.clone())?;
    let script = p.file.script_ops()?;
    let mut tree = p.tree;
    let line = match equiv_spotcheck(&mut tree, &m, &n, &script)? {
        SpotcheckOutcome::Agree => String::from("agree at every sampled point"),
        SpotcheckOutcome::Disagree { step, chart, point } => {
            format!("disagree after step {step} on chart {} at {}", tree.chart(chart).label, point_string(&point))
        }
        SpotcheckOutcome::ScriptInvalid { side, step, error } => {
            let error = match error {
                Error::NotPermissible { pair } => format!("center is not permissible for pair {}", pair + 1),
                e => e.to_string(),
            };
            format!("script step {step} is invalid for side {}: {error}", side + 1)
        }
    };
    Ok(finish(trace, vec![line]))
}

/// Parses a recorded polynomial back with the given names.
pub fn reparse(src: &str, names: &[String], ring: &str) -> Result<Poly, CliError> {
    Ok(Poly::parse(src, names, crate::problem::parse_ring(ring)?)?)
}
