//! Named constrained systems and one entry point per bound that picks the
//! single-state or multi-state procedure.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Serialize;

use crate::curve::Curve;
use crate::eigen::SolverConfig;
use crate::error::{Error, Result};
use crate::graphs::{build_rll, build_secc, build_swcc, load_graph, validate, LabelledGraph, Validation};
use crate::gv::{capacity, GvPoint, GvProblem};
use crate::mr::{MrCurve, MrPoint, MrProblem};
use crate::product::{default_marks, weight_marks};
use crate::singlestate::SingleState;

/// `swcc:L,w`, `rll:d,k`, `secc:L,w` or `file:<path>`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemSpec {
    Swcc { l: usize, w: usize },
    Rll { d: usize, k: usize },
    Secc { l: usize, w: usize },
    File(PathBuf),
}

impl FromStr for SystemSpec {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let (kind, args) = text.split_once(':').ok_or_else(|| {
            Error::InvalidParameters(format!(
                "system {text:?} is not of the form swcc:L,w | rll:d,k | secc:L,w | file:<path>"
            ))
        })?;
        if kind == "file" {
            if args.is_empty() {
                return Err(Error::InvalidParameters("file: needs a path".into()));
            }
            return Ok(SystemSpec::File(PathBuf::from(args)));
        }
        let nums: Vec<usize> = args
            .split(',')
            .map(|a| a.trim().parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::InvalidParameters(format!("system {text:?}: {e}")))?;
        let [a, b] = nums[..] else {
            return Err(Error::InvalidParameters(format!(
                "system {text:?} needs exactly two integer parameters"
            )));
        };
        match kind {
            "swcc" => Ok(SystemSpec::Swcc { l: a, w: b }),
            "rll" => Ok(SystemSpec::Rll { d: a, k: b }),
            "secc" => Ok(SystemSpec::Secc { l: a, w: b }),
            _ => Err(Error::InvalidParameters(format!("unknown system family {kind:?}"))),
        }
    }
}

impl fmt::Display for SystemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SystemSpec::Swcc { l, w } => write!(f, "swcc:{l},{w}"),
            SystemSpec::Rll { d, k } => write!(f, "rll:{d},{k}"),
            SystemSpec::Secc { l, w } => write!(f, "secc:{l},{w}"),
            SystemSpec::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

impl SystemSpec {
    pub fn build(&self) -> Result<LabelledGraph> {
        match self {
            SystemSpec::Swcc { l, w } => build_swcc(*l, *w),
            SystemSpec::Rll { d, k } => build_rll(*d, *k),
            SystemSpec::Secc { l, w } => build_secc(*l, *w),
            SystemSpec::File(p) => load_graph(p),
        }
    }
}

/// A graph together with its structural diagnostics.
pub struct System {
    pub spec: SystemSpec,
    pub graph: LabelledGraph,
    pub validation: Validation,
}

impl System {
    pub fn new(spec: SystemSpec) -> Result<Self> {
        let graph = spec.build()?;
        let validation = validate(&graph);
        Ok(System {
            spec,
            graph,
            validation,
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::new(text.parse()?)
    }

    pub fn warnings(&self) -> Vec<String> {
        self.validation.warnings.iter().map(|w| w.to_string()).collect()
    }

    pub fn is_single_state(&self) -> bool {
        self.graph.is_single_state()
    }

    /// Marked edges for the GV-MR bound: labels of Hamming weight `weight`
    /// when given, otherwise the edges labelled `1` for one-bit labels and
    /// the labels of least weight for longer ones.
    pub fn marks(&self, weight: Option<u32>) -> Vec<bool> {
        if let Some(w) = weight {
            return weight_marks(&self.graph, w);
        }
        if let Some(m) = default_marks(&self.graph) {
            return m;
        }
        let least = self.graph.edges().iter().map(|e| e.label.count_ones()).min().unwrap_or(0);
        weight_marks(&self.graph, least)
    }

    pub fn capacity(&self, cfg: &SolverConfig) -> Result<f64> {
        if self.is_single_state() {
            return Ok(SingleState::new(&self.graph, None, cfg)?.capacity());
        }
        capacity(&self.graph, cfg)
    }

    pub fn gv_fixed(&self, delta: f64, cfg: &SolverConfig) -> Result<GvPoint> {
        if self.is_single_state() {
            return SingleState::new(&self.graph, None, cfg)?.gv_fixed(delta);
        }
        GvProblem::new(&self.graph, cfg)?.fixed_delta(delta)
    }

    pub fn gv_curve(&self, n: usize, cfg: &SolverConfig) -> Result<Curve> {
        if self.is_single_state() {
            return SingleState::new(&self.graph, None, cfg)?.gv_curve(n);
        }
        GvProblem::new(&self.graph, cfg)?.curve(n)
    }

    pub fn mr_fixed(&self, delta: f64, weight: Option<u32>, cfg: &SolverConfig) -> Result<MrPoint> {
        let marks = self.marks(weight);
        if self.is_single_state() {
            return SingleState::new(&self.graph, Some(&marks), cfg)?.mr_fixed(delta);
        }
        MrProblem::with_marks(&self.graph, &marks, cfg)?.fixed_delta(delta)
    }

    pub fn mr_curve(&self, n: usize, weight: Option<u32>, cfg: &SolverConfig) -> Result<MrCurve> {
        let marks = self.marks(weight);
        if self.is_single_state() {
            return SingleState::new(&self.graph, Some(&marks), cfg)?.mr_curve(n);
        }
        MrProblem::with_marks(&self.graph, &marks, cfg)?.curve(n)
    }
}
