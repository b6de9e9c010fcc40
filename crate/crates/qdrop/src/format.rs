//! On-disk formats. JSON documents carry a `meta` object and CSV files a
//! leading `# {meta}` comment line so that every artifact can be replayed.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use qdrop_core::anneal::{Distraction, SaReport};
use qdrop_core::dropout::{DropoutPlan, Scheme};
use qdrop_core::qaoa::{QaoaParams, Trajectory};
use qdrop_core::{Clause, Instance, Label, SpinConfig};

use crate::error::{io, Error, Result};

pub const VERSION: &str = concat!("qdrop ", env!("CARGO_PKG_VERSION"));

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Meta {
    pub version: String,
    pub config_digest: Option<String>,
    pub seed: Option<u64>,
    pub instance_digest: Option<String>,
}

impl Meta {
    pub fn new(config_digest: Option<String>, seed: Option<u64>, instance_digest: Option<String>) -> Self {
        Meta { version: VERSION.to_string(), config_digest, seed, instance_digest }
    }
}

fn spins_of(s: &SpinConfig) -> Vec<i8> {
    s.spins().collect()
}

fn config_of(path: &Path, spins: &[i8]) -> Result<SpinConfig> {
    if spins.iter().any(|&s| s != 1 && s != -1) {
        return Err(format_err(path, "spin values must be +1 or -1"));
    }
    Ok(SpinConfig::from_spins(spins)?)
}

pub(crate) fn format_err(path: &Path, msg: impl Into<String>) -> Error {
    Error::Format { path: path.to_path_buf(), msg: msg.into() }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub n: usize,
    pub clauses: Vec<[usize; 3]>,
    pub planted: Option<Vec<i8>>,
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<Meta>,
}

impl InstanceFile {
    pub fn from_instance(inst: &Instance, meta: Option<Meta>) -> Self {
        let label = match inst.label() {
            Label::Simple => Some("simple".to_string()),
            Label::Hard => Some("hard".to_string()),
            Label::Unclassified => None,
        };
        InstanceFile {
            n: inst.n(),
            clauses: inst.clauses().iter().map(|c| c.indices()).collect(),
            planted: inst.planted().as_ref().map(spins_of),
            label,
            meta,
        }
    }

    pub fn to_instance(&self, path: &Path) -> Result<Instance> {
        let mut clauses = Vec::with_capacity(self.clauses.len());
        for (k, &[a, b, c]) in self.clauses.iter().enumerate() {
            if a >= self.n || b >= self.n || c >= self.n {
                return Err(format_err(path, format!("clause {k} has an index outside 0..{}", self.n)));
            }
            let clause = Clause::new(a, b, c).map_err(|e| format_err(path, format!("clause {k}: {e}")))?;
            clauses.push(clause);
        }
        let planted = match &self.planted {
            Some(s) if s.len() != self.n => {
                return Err(format_err(path, format!("planted state has {} spins, expected {}", s.len(), self.n)))
            }
            Some(s) => Some(config_of(path, s)?),
            None => None,
        };
        let label = match self.label.as_deref() {
            None => Label::Unclassified,
            Some("simple") => Label::Simple,
            Some("hard") => Label::Hard,
            Some(other) => return Err(format_err(path, format!("unknown label {other:?}"))),
        };
        Ok(Instance::new(self.n, clauses, planted)?.with_label(label))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistractionEntry {
    pub config: Vec<i8>,
    pub energy: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SaReportFile {
    #[serde(rename = "R")]
    pub r: f64,
    pub trials: usize,
    pub distractions: Vec<DistractionEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<Meta>,
}

impl SaReportFile {
    pub fn from_report(report: &SaReport, meta: Option<Meta>) -> Self {
        SaReportFile {
            r: report.success_rate,
            trials: report.trials,
            distractions: report
                .distractions
                .iter()
                .map(|d| DistractionEntry { config: spins_of(&d.config), energy: d.energy })
                .collect(),
            meta,
        }
    }

    pub fn distractions(&self, path: &Path) -> Result<Vec<Distraction>> {
        self.distractions
            .iter()
            .map(|d| Ok(Distraction { config: config_of(path, &d.config)?, energy: d.energy }))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanFile {
    pub scheme: String,
    pub p: usize,
    pub keep_fraction: f64,
    pub eligible: Vec<usize>,
    pub layer_weights: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<Meta>,
}

impl PlanFile {
    pub fn from_plan(plan: &DropoutPlan, meta: Option<Meta>) -> Self {
        PlanFile {
            scheme: plan.scheme.name().to_string(),
            p: plan.p,
            keep_fraction: plan.keep_fraction,
            eligible: plan.eligible.clone(),
            layer_weights: plan.layer_weights.clone(),
            meta,
        }
    }

    pub fn to_plan(&self, path: &Path) -> Result<DropoutPlan> {
        let scheme = Scheme::from_name(&self.scheme)
            .ok_or_else(|| format_err(path, format!("unknown scheme {:?}", self.scheme)))?;
        Ok(DropoutPlan {
            scheme,
            p: self.p,
            keep_fraction: self.keep_fraction,
            eligible: self.eligible.clone(),
            layer_weights: self.layer_weights.clone(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamsEntry {
    pub gammas: Vec<f64>,
    pub betas: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryFile {
    pub final_cost: f64,
    pub final_success: f64,
    pub params: ParamsEntry,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<Meta>,
}

impl SummaryFile {
    pub fn from_trajectory(t: &Trajectory, meta: Option<Meta>) -> Self {
        let QaoaParams { gammas, betas } = t.final_params.clone();
        SummaryFile {
            final_cost: t.final_cost,
            final_success: t.final_success,
            params: ParamsEntry { gammas, betas },
            meta,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub distance: usize,
    pub energy: f64,
    pub normalized_energy: f64,
    pub retain_fraction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub epoch: usize,
    pub cost: f64,
    pub success_prob: f64,
}

impl TrajectoryRow {
    pub fn rows(t: &Trajectory) -> Vec<TrajectoryRow> {
        t.points.iter().map(|p| TrajectoryRow { epoch: p.epoch, cost: p.cost, success_prob: p.success }).collect()
    }
}

/// Writes through a temporary sibling and renames, so readers never see a
/// partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io(dir))?;
    }
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes).map_err(io(&tmp))?;
    fs::rename(&tmp, path).map_err(io(path))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|source| Error::Json { path: path.into(), source })?;
    bytes.push(b'\n');
    write_atomic(path, &bytes)
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let bytes = fs::read(path).map_err(io(path))?;
    serde_json::from_slice(&bytes).map_err(|source| Error::Json { path: path.into(), source })
}

pub fn read_instance(path: &Path) -> Result<Instance> {
    read_json::<InstanceFile>(path)?.to_instance(path)
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> Error + '_ {
    move |source| Error::Csv { path: path.to_path_buf(), source }
}

/// CSV body with a `# {meta}` first line.
pub fn csv_bytes<T: Serialize>(path: &Path, meta: &Meta, rows: &[T]) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    writeln!(out, "# {}", serde_json::to_string(meta).expect("meta serializes")).expect("in-memory write");
    let mut w = csv::WriterBuilder::new().has_headers(true).from_writer(&mut out);
    for row in rows {
        w.serialize(row).map_err(csv_err(path))?;
    }
    w.flush().map_err(io(path))?;
    drop(w);
    Ok(out)
}

pub fn write_csv<T: Serialize>(path: &Path, meta: &Meta, rows: &[T]) -> Result<()> {
    write_atomic(path, &csv_bytes(path, meta, rows)?)
}

pub fn read_csv<T: DeserializeOwned>(path: &Path) -> Result<(Option<Meta>, Vec<T>)> {
    let text = fs::read_to_string(path).map_err(io(path))?;
    let meta = match text.lines().next() {
        Some(first) if first.starts_with("# ") => {
            Some(serde_json::from_str(&first[2..]).map_err(|source| Error::Json { path: path.into(), source })?)
        }
        _ => None,
    };
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let rows = r.deserialize().collect::<std::result::Result<Vec<T>, _>>().map_err(csv_err(path))?;
    Ok((meta, rows))
}
