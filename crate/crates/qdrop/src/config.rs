use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use qdrop_core::anneal::SaSchedule;
use qdrop_core::dropout::Scheme;
use qdrop_core::qaoa::{Method, OptimizerConfig};

use crate::digest::digest_json;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Sweep,
    Crosstest,
    DropoutCompare,
    Landscape,
    Assess,
}

impl Kind {
    pub fn name(&self) -> &'static str {
        match self {
            Kind::Sweep => "sweep",
            Kind::Crosstest => "crosstest",
            Kind::DropoutCompare => "dropout_compare",
            Kind::Landscape => "landscape",
            Kind::Assess => "assess",
        }
    }
}

/// Trials per depth.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trials {
    /// 100 up to p = 20, 50 up to p = 40, 30 beyond.
    Paper,
    Fixed(usize),
}

impl Trials {
    pub fn at(&self, p: usize) -> usize {
        match *self {
            Trials::Fixed(t) => t,
            Trials::Paper if p <= 20 => 100,
            Trials::Paper if p <= 40 => 50,
            Trials::Paper => 30,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerSettings {
    pub learning_rate: f64,
    pub lr_decay: f64,
    pub epochs: usize,
    pub record_every: usize,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        let d = OptimizerConfig::default();
        OptimizerSettings {
            learning_rate: d.learning_rate,
            lr_decay: d.lr_decay,
            epochs: d.epochs,
            record_every: d.record_every,
        }
    }
}

impl OptimizerSettings {
    pub fn config(&self) -> OptimizerConfig {
        OptimizerConfig {
            method: Method::default(),
            learning_rate: self.learning_rate,
            lr_decay: self.lr_decay,
            epochs: self.epochs,
            record_every: self.record_every,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SaSettings {
    pub trials: usize,
    pub t_start: f64,
    pub t_end: f64,
    pub sweeps: usize,
    /// Master seed of the assessment; the baseline is shared by every
    /// experiment on an instance.
    pub seed: u64,
}

impl Default for SaSettings {
    fn default() -> Self {
        let s = SaSchedule::default();
        SaSettings { trials: 1000, t_start: s.t_start, t_end: s.t_end, sweeps: s.n_sweeps, seed: 0 }
    }
}

impl SaSettings {
    pub fn schedule(&self) -> SaSchedule {
        SaSchedule { t_start: self.t_start, t_end: self.t_end, n_sweeps: self.sweeps, flips_per_sweep: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub kind: Kind,
    pub instances: Vec<PathBuf>,
    pub depths: Vec<usize>,
    pub trials: Trials,
    pub schemes: Vec<String>,
    pub keep_fraction: f64,
    pub optimizer: OptimizerSettings,
    pub sa: SaSettings,
    pub seed: u64,
    /// Output root; the experiment directory is created beneath it.
    pub out: PathBuf,
    /// Worker threads; 0 uses every core.
    pub threads: usize,
}

/// Everything that influences results, with instances identified by content.
#[derive(Serialize)]
struct DigestView<'a> {
    version: &'a str,
    kind: Kind,
    instances: &'a [String],
    depths: &'a [usize],
    trials: Trials,
    schemes: &'a [String],
    keep_fraction: f64,
    optimizer: OptimizerSettings,
    sa: SaSettings,
    seed: u64,
}

impl ExperimentConfig {
    pub fn new(kind: Kind, instances: Vec<PathBuf>, out: PathBuf) -> Self {
        ExperimentConfig {
            kind,
            instances,
            depths: (1..=10).map(|k| 5 * k).collect(),
            trials: Trials::Paper,
            schemes: vec![Scheme::None.name().to_string()],
            keep_fraction: 0.5,
            optimizer: OptimizerSettings::default(),
            sa: SaSettings::default(),
            seed: 0,
            out,
            threads: 0,
        }
    }

    /// Depths {4, 8, 16} at ten trials each.
    pub fn fast(mut self) -> Self {
        self.depths = vec![4, 8, 16];
        self.trials = Trials::Fixed(10);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.depths.is_empty() || self.depths.contains(&0) {
            return Err(Error::Config("depths must be a nonempty list of positive integers".into()));
        }
        if self.trials == Trials::Fixed(0) {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if !(self.keep_fraction > 0.0 && self.keep_fraction <= 1.0) {
            return Err(Error::Config("keep fraction must lie in (0, 1]".into()));
        }
        if self.schemes.is_empty() {
            return Err(Error::Config("at least one scheme is required".into()));
        }
        for s in &self.schemes {
            Scheme::from_name(s).ok_or_else(|| Error::Config(format!("unknown scheme {s:?}")))?;
        }
        if self.optimizer.epochs == 0 {
            return Err(Error::Config("epochs must be at least 1".into()));
        }
        if self.sa.trials == 0 {
            return Err(Error::Config("SA trials must be at least 1".into()));
        }
        self.optimizer.config().validate()?;
        self.sa.schedule().validate()?;
        for path in &self.instances {
            if !path.exists() {
                return Err(Error::Config(format!("{} does not exist", path.display())));
            }
        }
        Ok(())
    }

    pub fn schemes(&self) -> Vec<Scheme> {
        self.schemes.iter().filter_map(|s| Scheme::from_name(s)).collect()
    }

    /// Digest over result-relevant settings, given the instance digests.
    pub fn digest(&self, instance_digests: &[String]) -> String {
        digest_json(&DigestView {
            version: crate::format::VERSION,
            kind: self.kind,
            instances: instance_digests,
            depths: &self.depths,
            trials: self.trials,
            schemes: &self.schemes,
            keep_fraction: self.keep_fraction,
            optimizer: self.optimizer,
            sa: self.sa,
            seed: self.seed,
        })
    }
}
