//! Problem files: a JSON object describing the ring, coordinates, `W`, the
//! hypersurfaces of `E`, the marked pairs and per-command parameters.

use multires_core::charts::{ChartTree, Origin};
use multires_core::ideals::IdealRep;
use multires_core::monomial::{MonomialForm, MonomialPair};
use multires_core::multiideal::{MultiIdeal, ScriptOp};
use multires_core::pairs::MarkedPair;
use multires_core::poly::{CoefRing, Poly, Rational};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    /// `"Q"` or `"Q[eps]/(eps^m)"`.
    #[serde(default = "default_ring")]
    pub ring: String,
    #[serde(default)]
    pub vars: Vec<String>,
    /// Coordinates cutting out `W`.
    #[serde(default)]
    pub w: Vec<String>,
    /// Input hypersurfaces, each a coordinate hyperplane.
    #[serde(default)]
    pub hypersurfaces: Vec<HypSpec>,
    /// Names of the members of `E`, in order; all hypersurfaces by default.
    #[serde(default)]
    pub e: Option<Vec<String>>,
    #[serde(default)]
    pub pairs: Vec<PairSpec>,
    /// Points as lists of rationals `"p/q"`.
    #[serde(default)]
    pub points: Vec<Vec<String>>,
    /// Coordinates cutting out a center on the root chart.
    #[serde(default)]
    pub center: Option<Vec<String>>,
    /// Coordinate of an adapted hypersurface `V(z)`.
    #[serde(default)]
    pub adapted: Option<String>,
    /// Exponent `j` of `Δ^(j)`.
    #[serde(default)]
    pub delta: Option<u32>,
    /// Second list of pairs for `equiv-spotcheck`.
    #[serde(default)]
    pub other: Option<Vec<PairSpec>>,
    #[serde(default)]
    pub script: Vec<ScriptSpec>,
    #[serde(default)]
    pub monomial: Option<MonomialSpec>,
}

fn default_ring() -> String {
    String::from("Q")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HypSpec {
    pub name: String,
    pub coord: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairSpec {
    pub gens: Vec<String>,
    pub mark: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScriptSpec {
    /// Blow up the coordinates `center` on the `chart`-th current chart.
    Blowup { chart: usize, center: Vec<String> },
    Extend,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonomialSpec {
    /// Chart dimension; the number of hypersurfaces by default.
    #[serde(default)]
    pub dim: Option<usize>,
    pub pairs: Vec<MonomialPairSpec>,
    /// 1-based hypersurface labels of a stratum for `gamma`.
    #[serde(default)]
    pub stratum: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonomialPairSpec {
    pub mark: u32,
    pub exps: Vec<u32>,
}

/// A problem after validation.
#[derive(Clone, Debug)]
pub struct Problem {
    pub file: ProblemFile,
    pub ring: CoefRing,
    pub tree: ChartTree,
    pub multi: Option<MultiIdeal>,
}

impl ProblemFile {
    /// Parses a JSON problem file, or the line format `pair b=4 exps=[2,3]`
    /// of a monomial form when the text does not start with `{`.
    pub fn parse(src: &str) -> Result<Self, CliError> {
        if src.trim_start().starts_with('{') {
            return serde_json::from_str(src).map_err(|e| CliError::Json {
                line: e.line(),
                column: e.column(),
                msg: e.to_string(),
            });
        }
        let form = MonomialForm::parse(src)?;
        let dim = src.lines().find_map(|l| l.trim().strip_prefix("dim=").and_then(|d| d.trim().parse().ok()));
        Ok(ProblemFile {
            ring: default_ring(),
            monomial: Some(MonomialSpec {
                dim,
                pairs: form.pairs.iter().map(|p| MonomialPairSpec { mark: p.mark, exps: p.exps.clone() }).collect(),
                stratum: None,
            }),
            ..Default::default()
        })
    }

    pub fn ring(&self) -> Result<CoefRing, CliError> {
        parse_ring(&self.ring)
    }

    pub fn coord(&self, name: &str) -> Result<usize, CliError> {
        self.vars
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| CliError::Input(format!("unknown coordinate `{name}`")))
    }

    pub fn coords(&self, names: &[String]) -> Result<Vec<usize>, CliError> {
        names.iter().map(|n| self.coord(n)).collect()
    }

    pub fn points(&self) -> Result<Vec<Vec<Rational>>, CliError> {
        self.points
            .iter()
            .enumerate()
            .map(|(i, p)| {
                if p.len() != self.vars.len() {
                    return Err(CliError::Input(format!("points[{i}] has {} coordinates, expected {}", p.len(), self.vars.len())));
                }
                p.iter().map(|s| parse_rational(s)).collect()
            })
            .collect()
    }

    pub fn monomial_form(&self) -> Result<MonomialForm, CliError> {
        let spec = self.monomial.as_ref().ok_or_else(|| CliError::Input(String::from("missing `monomial`")))?;
        let pairs: Vec<MonomialPair> = spec.pairs.iter().map(|p| MonomialPair { mark: p.mark, exps: p.exps.clone() }).collect();
        let m = pairs.first().map_or(0, |p| p.exps.len());
        Ok(MonomialForm::new(pairs, spec.dim.unwrap_or(m))?)
    }

    /// Validates the file into a chart tree and, when pairs are given, a
    /// multi-ideal on the root chart.
    pub fn build(&self) -> Result<Problem, CliError> {
        let ring = self.ring()?;
        let w = self.coords(&self.w)?;
        let mut hyps = Vec::new();
        for h in &self.hypersurfaces {
            hyps.push((h.name.clone(), self.coord(&h.coord)?, Origin::InputExceptional));
        }
        let (tree, root) = ChartTree::new(ring, self.vars.clone(), &w, &hyps)?;
        let multi = if self.pairs.is_empty() {
            None
        } else {
            let e = match &self.e {
                None => (0..self.hypersurfaces.len()).collect(),
                Some(names) => names
                    .iter()
                    .map(|n| {
                        self.hypersurfaces
                            .iter()
                            .position(|h| &h.name == n)
                            .ok_or_else(|| CliError::Input(format!("unknown hypersurface `{n}`")))
                    })
                    .collect::<Result<Vec<_>, _>>()?,
            };
            let pairs = self.marked_pairs(&self.pairs, ring, "pairs")?;
            Some(MultiIdeal::new(&tree, root, &w, pairs, e)?)
        };
        Ok(Problem { file: self.clone(), ring, tree, multi })
    }

    pub fn marked_pairs(&self, specs: &[PairSpec], ring: CoefRing, field: &str) -> Result<Vec<MarkedPair>, CliError> {
        specs
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let gens = p
                    .gens
                    .iter()
                    .enumerate()
                    .map(|(k, g)| {
                        Poly::parse(g, &self.vars, ring).map_err(|e| CliError::Input(format!("{field}[{i}].gens[{k}]: {e}")))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                let ideal = IdealRep::new(ring, self.vars.len(), gens)?;
                Ok(MarkedPair::new(ideal, p.mark)?)
            })
            .collect()
    }

    pub fn script_ops(&self) -> Result<Vec<ScriptOp>, CliError> {
        self.script
            .iter()
            .map(|s| match s {
                ScriptSpec::Blowup { chart, center } => {
                    Ok(ScriptOp::Blowup { chart_index: *chart, coords: self.coords(center)? })
                }
                ScriptSpec::Extend => Ok(ScriptOp::Extend),
            })
            .collect()
    }
}

/// `"Q"` or `"Q[eps]/(eps^m)"`.
pub fn parse_ring(s: &str) -> Result<CoefRing, CliError> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t == "Q" || t == "QQ" {
        return Ok(CoefRing::FIELD);
    }
    let m = t
        .strip_prefix("Q[eps]/(eps^")
        .and_then(|r| r.strip_suffix(')'))
        .and_then(|m| m.parse::<usize>().ok())
        .ok_or_else(|| CliError::Input(format!("unknown ring `{s}`")))?;
    Ok(CoefRing::artinian(m)?)
}

/// `"p/q"` or an integer.
pub fn parse_rational(s: &str) -> Result<Rational, CliError> {
    s.trim().parse::<Rational>().map_err(|_| CliError::Input(format!("bad rational `{s}`")))
}
