//! Seeded Monte Carlo sweeps with CSV/JSON output.
//!
//! Trial `i` of every point uses seed `seed_base + i`. Trials run on the
//! rayon pool but are collected in index order, so outputs are byte-stable
//! across runs and thread counts.

mod output;
mod runs;

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::Family;

pub use output::{
    group, load_and_verify, raw_csv_bytes, read_raw, summarize, summary_csv_bytes, write_all, RawRow, SummaryRow,
    Verdict, RAW_CSV, SUMMARY_CSV, VERDICTS_JSON,
};
pub use runs::{dichotomy, phase_lemmas, theorem2_scaling, theorem4_scaling, upper_bound_coverage};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    UpperBoundCoverage,
    Theorem2Scaling,
    Theorem4Scaling,
    Dichotomy,
    PhaseLemmas,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 5] = [
        ExperimentKind::UpperBoundCoverage,
        ExperimentKind::Theorem2Scaling,
        ExperimentKind::Theorem4Scaling,
        ExperimentKind::Dichotomy,
        ExperimentKind::PhaseLemmas,
    ];

    pub fn code(self) -> &'static str {
        match self {
            ExperimentKind::UpperBoundCoverage => "upper-bound-coverage",
            ExperimentKind::Theorem2Scaling => "theorem2-scaling",
            ExperimentKind::Theorem4Scaling => "theorem4-scaling",
            ExperimentKind::Dichotomy => "dichotomy",
            ExperimentKind::PhaseLemmas => "phase-lemmas",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.code() == s)
            .ok_or_else(|| Error::Config(format!("unknown experiment {s:?}")))
    }
}

/// Sweep dimensions. Empty lists fall back to the experiment's defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Sweep {
    /// Network sizes of the scaling arms.
    pub n: Vec<usize>,
    pub rho: Vec<f64>,
    /// Tail parameters `k` of the dichotomy and phase checks.
    pub k: Vec<usize>,
    /// Sizes for the exact synchronous dynamic-star check.
    pub exact_n: Vec<usize>,
    /// Size for the tail and phase checks.
    pub tail_n: Option<usize>,
    /// `(k, Δ)` pairs for the forward 2-push moment check.
    pub forward: Vec<(usize, usize)>,
    /// String length of `𝒢(n, ρ)`; `⌈ln n / ln ln n⌉` when absent.
    pub string_k: Option<usize>,
    /// Offset `c` of the leaf-contact count check.
    pub contact_offset: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default = "default_trials")]
    pub trials: u64,
    /// Trials per point of the scaling arms (defaults to `trials`).
    #[serde(default)]
    pub scaling_trials: Option<u64>,
    #[serde(default = "default_seed_base")]
    pub seed_base: u64,
    #[serde(default = "default_c")]
    pub c: f64,
    /// Async runs stop at `horizon_factor · n` time units.
    #[serde(default = "default_horizon_factor")]
    pub horizon_factor: f64,
    /// Enumeration cap for exact conductance and diligence.
    #[serde(default = "default_cap")]
    pub cap: usize,
    #[serde(default)]
    pub sweep: Sweep,
    /// Families for the coverage experiment.
    #[serde(default)]
    pub families: Vec<Family>,
}

fn default_trials() -> u64 {
    1000
}
fn default_seed_base() -> u64 {
    1
}
fn default_c() -> f64 {
    crate::bounds::DEFAULT_C
}
fn default_horizon_factor() -> f64 {
    50.0
}
fn default_cap() -> usize {
    crate::metrics::DEFAULT_CAP
}

impl ExperimentConfig {
    pub fn new(experiment: ExperimentKind) -> Self {
        ExperimentConfig {
            experiment,
            trials: default_trials(),
            scaling_trials: None,
            seed_base: default_seed_base(),
            c: default_c(),
            horizon_factor: default_horizon_factor(),
            cap: default_cap(),
            sweep: Sweep::default(),
            families: Vec::new(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Fills empty sweep dimensions with the experiment's defaults.
    pub fn effective(&self) -> ExperimentConfig {
        let mut c = self.clone();
        let s = &mut c.sweep;
        let fill_n = |v: &mut Vec<usize>, d: &[usize]| {
            if v.is_empty() {
                *v = d.to_vec();
            }
        };
        match self.experiment {
            ExperimentKind::UpperBoundCoverage => {
                if c.families.is_empty() {
                    c.families = vec![
                        Family::StaticStar { n: 16 },
                        Family::StaticExpander { n: 16, degree: 4 },
                        Family::GbarNRho { n: 20, rho: 0.5 },
                        Family::DynamicStar { n: 15 },
                    ];
                }
            }
            ExperimentKind::Theorem2Scaling => {
                fill_n(&mut s.n, &[64, 128, 256, 512]);
                if s.rho.is_empty() {
                    s.rho = vec![1.0, 0.5];
                }
                if s.forward.is_empty() {
                    s.forward = vec![(3, 4), (4, 4), (5, 8)];
                }
            }
            ExperimentKind::Theorem4Scaling => {
                fill_n(&mut s.n, &[40, 80, 160]);
                if s.rho.is_empty() {
                    s.rho = vec![1.0, 0.5, 0.25];
                }
            }
            ExperimentKind::Dichotomy => {
                fill_n(&mut s.n, &[16, 32, 64, 128, 256]);
                fill_n(&mut s.exact_n, &[16, 64, 256]);
                fill_n(&mut s.k, &[4, 6, 8]);
                s.tail_n.get_or_insert(1024);
            }
            ExperimentKind::PhaseLemmas => {
                fill_n(&mut s.k, &[4, 6, 8]);
                s.tail_n.get_or_insert(1024);
                s.contact_offset.get_or_insert(0.5);
            }
        }
        c
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 || self.scaling_trials == Some(0) {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if !(self.c > 1.0) {
            return Err(Error::Config(format!("c must exceed 1, got {}", self.c)));
        }
        if !(self.horizon_factor > 0.0) {
            return Err(Error::Config("horizon_factor must be positive".into()));
        }
        Ok(())
    }

    pub(crate) fn scaling_trials(&self) -> u64 {
        self.scaling_trials.unwrap_or(self.trials)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub raw: Vec<RawRow>,
    pub summary: Vec<SummaryRow>,
    pub verdicts: Vec<Verdict>,
}

impl ExperimentResult {
    pub(crate) fn new(raw: Vec<RawRow>, verdicts: Vec<Verdict>) -> Self {
        ExperimentResult { summary: summarize(&raw), raw, verdicts }
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        write_all(dir, &self.raw, &self.summary, &self.verdicts)
    }

    pub fn all_passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    pub fn verdict(&self, criterion: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.criterion == criterion)
    }
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let cfg = cfg.effective();
    match cfg.experiment {
        ExperimentKind::UpperBoundCoverage => upper_bound_coverage(&cfg),
        ExperimentKind::Theorem2Scaling => theorem2_scaling(&cfg),
        ExperimentKind::Theorem4Scaling => theorem4_scaling(&cfg),
        ExperimentKind::Dichotomy => dichotomy(&cfg),
        ExperimentKind::PhaseLemmas => phase_lemmas(&cfg),
    }
}
