//! Experiment orchestration: trial fan-out, resumable persistence and
//! aggregation.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use qdrop_core::anneal::{sa_assess, Difficulty, Distraction, MAX_DISTRACTIONS};
use qdrop_core::dropout::{eligible_clauses, make_plan, DropoutPlan, EnergyTable, Scheme};
use qdrop_core::landscape::{instance_landscape, landscape_under_dropout, LandscapeCurve};
use qdrop_core::qaoa::{optimize, Circuit, QaoaParams, Trajectory};
use qdrop_core::seed::{rng, SeedPath};
use qdrop_core::{Instance, SpinConfig};

use crate::config::{ExperimentConfig, Kind, SaSettings};
use crate::digest::{digest_json, instance_digest, short};
use crate::error::{Error, Result};
use crate::format::{
    read_csv, read_instance, read_json, write_csv, write_json, CurveRow, InstanceFile, Meta, PlanFile, SaReportFile,
    SummaryFile, TrajectoryRow,
};
use crate::stats::summarize;

/// Environment variable naming the default output root.
pub const OUT_ENV: &str = "QDROP_OUT";

pub fn default_out_root() -> PathBuf {
    std::env::var_os(OUT_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("qdrop-out"))
}

/// Instance loaded from disk together with its content digest.
#[derive(Clone, Debug)]
pub struct Loaded {
    pub path: PathBuf,
    pub instance: Instance,
    pub digest: String,
}

impl Loaded {
    pub fn open(path: &Path) -> Result<Self> {
        let instance = read_instance(path)?;
        let digest = instance_digest(&instance);
        Ok(Loaded { path: path.to_path_buf(), instance, digest })
    }

    pub fn planted(&self) -> Result<SpinConfig> {
        self.instance.planted().ok_or_else(|| Error::Config(format!("{} has no planted state", self.path.display())))
    }
}

/// SA estimate used as baseline and as the source of distractions.
#[derive(Clone, Debug, PartialEq)]
pub struct Baseline {
    pub r: f64,
    pub trials: usize,
    pub distractions: Vec<Distraction>,
}

impl Baseline {
    pub fn difficulty(&self) -> Difficulty {
        Difficulty::from_rate(self.r)
    }

    pub fn distraction_configs(&self) -> Vec<SpinConfig> {
        self.distractions.iter().map(|d| d.config).collect()
    }
}

fn sa_cache_path(root: &Path, inst: &Loaded, sa: &SaSettings) -> PathBuf {
    root.join("sa-cache").join(format!("{}-{}.json", short(&inst.digest), short(&digest_json(sa))))
}

/// Sidecar written next to an instance by `assess`.
pub fn sidecar_path(instance_path: &Path) -> PathBuf {
    let stem = instance_path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    instance_path.with_file_name(format!("{stem}.sa.json"))
}

fn compute_baseline(inst: &Loaded, sa: &SaSettings) -> Result<(Baseline, SaReportFile)> {
    let report = sa_assess(&inst.instance, &sa.schedule(), sa.trials, sa.seed, MAX_DISTRACTIONS)?;
    let meta = Meta::new(Some(digest_json(sa)), Some(sa.seed), Some(inst.digest.clone()));
    let file = SaReportFile::from_report(&report, Some(meta));
    let b = Baseline { r: report.success_rate, trials: report.trials, distractions: report.distractions };
    Ok((b, file))
}

/// SA baseline for `inst`, estimated once per (instance, settings) and
/// cached beneath `root`.
pub fn sa_baseline(root: &Path, inst: &Loaded, sa: &SaSettings) -> Result<Baseline> {
    let path = sa_cache_path(root, inst, sa);
    if path.exists() {
        let file: SaReportFile = read_json(&path)?;
        let ok = file.meta.as_ref().and_then(|m| m.instance_digest.as_deref()) == Some(inst.digest.as_str());
        if ok {
            let distractions = file.distractions(&path)?;
            return Ok(Baseline { r: file.r, trials: file.trials, distractions });
        }
    }
    let (b, file) = compute_baseline(inst, sa)?;
    write_json(&path, &file)?;
    Ok(b)
}

#[derive(Clone, Debug)]
pub struct Assessment {
    pub baseline: Baseline,
    pub difficulty: Difficulty,
    pub sidecar: PathBuf,
}

impl Assessment {
    /// Whether a quantum solver is worth running on this instance.
    pub fn advice(&self) -> &'static str {
        match self.difficulty {
            Difficulty::Simple => "simple: classical annealing already succeeds; no point in a quantum solver",
            Difficulty::Hard => "hard: proceed to QAOA with dropout over the clauses the distractions satisfy",
            Difficulty::Intermediate => "intermediate: neither threshold met",
        }
    }
}

/// SA assessment; writes the report beside the instance, refreshes the
/// cache, and records the difficulty label in the instance file.
pub fn run_assess(instance_path: &Path, sa: &SaSettings, root: &Path) -> Result<Assessment> {
    let loaded = Loaded::open(instance_path)?;
    let (baseline, file) = compute_baseline(&loaded, sa)?;
    let sidecar = sidecar_path(instance_path);
    write_json(&sidecar, &file)?;
    write_json(&sa_cache_path(root, &loaded, sa), &file)?;

    let difficulty = baseline.difficulty();
    let label = match difficulty {
        Difficulty::Simple => qdrop_core::Label::Simple,
        Difficulty::Hard => qdrop_core::Label::Hard,
        Difficulty::Intermediate => qdrop_core::Label::Unclassified,
    };
    let mut doc: InstanceFile = read_json(instance_path)?;
    let relabeled = InstanceFile::from_instance(&loaded.instance.clone().with_label(label), doc.meta.take());
    write_json(instance_path, &relabeled)?;
    Ok(Assessment { baseline, difficulty, sidecar })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRow {
    pub depth: usize,
    pub scheme: String,
    pub trial: usize,
    pub init_seed: u64,
    pub plan_seed: u64,
    pub initial_cost: f64,
    pub final_cost: f64,
    pub final_success: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub depth: usize,
    pub scheme: String,
    pub best: f64,
    pub mean: f64,
    pub std: f64,
    pub count: usize,
    pub sa_r: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggregateResult {
    pub rows: Vec<AggregateRow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<Meta>,
}

impl AggregateResult {
    pub fn get(&self, depth: usize, scheme: Scheme) -> Option<&AggregateRow> {
        self.rows.iter().find(|r| r.depth == depth && r.scheme == scheme.name())
    }

    /// Aggregates over `rows`, grouped in the order of `depths` x `schemes`.
    pub fn from_rows(rows: &[TrialRow], depths: &[usize], schemes: &[Scheme], sa_r: f64, meta: Option<Meta>) -> Self {
        let mut out = Vec::new();
        for &depth in depths {
            for scheme in schemes {
                let xs: Vec<f64> = rows
                    .iter()
                    .filter(|r| r.depth == depth && r.scheme == scheme.name())
                    .map(|r| r.final_success)
                    .collect();
                let s = summarize(&xs);
                out.push(AggregateRow {
                    depth,
                    scheme: scheme.name().to_string(),
                    best: s.best,
                    mean: s.mean,
                    std: s.std,
                    count: s.count,
                    sa_r,
                });
            }
        }
        AggregateResult { rows: out, meta }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub config_digest: String,
    pub completed: usize,
    pub total: usize,
}

/// Seed of the initial parameters; shared by all schemes so that trials
/// pair across schemes.
pub fn init_seed(master: u64, kind: Kind, depth: usize, trial: usize) -> u64 {
    SeedPath::new(master).label(kind.name()).index(depth as u64).label("init").index(trial as u64).seed()
}

/// Seed of the dropout plan.
pub fn plan_seed(master: u64, kind: Kind, depth: usize, scheme: Scheme, trial: usize) -> u64 {
    SeedPath::new(master).label(kind.name()).index(depth as u64).label(scheme.name()).index(trial as u64).seed()
}

pub fn experiment_dir(root: &Path, kind: Kind, digest: &str) -> PathBuf {
    root.join(format!("{}-{}", kind.name(), short(digest)))
}

fn pool(threads: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(|e| Error::Config(format!("thread pool: {e}")))
}

/// Runs `jobs` in order, appending finished rows to `rows.csv` batch by
/// batch. Rows already persisted under the same config digest are reused.
fn run_jobs<J, R, F>(dir: &Path, meta: &Meta, threads: usize, jobs: &[J], f: F) -> Result<Vec<R>>
where
    J: Sync,
    R: Serialize + DeserializeOwned + Send,
    F: Fn(&J) -> Result<R> + Sync,
{
    let rows_path = dir.join("trials.csv");
    let manifest_path = dir.join("manifest.json");
    let digest = meta.config_digest.clone().unwrap_or_default();
    let mut rows: Vec<R> = Vec::new();
    if rows_path.exists() {
        let (old_meta, old) = read_csv::<R>(&rows_path)?;
        if old_meta.as_ref() == Some(meta) && old.len() <= jobs.len() {
            rows = old;
        }
    }
    let pool = pool(threads)?;
    let batch = pool.current_num_threads().max(1) * 2;
    while rows.len() < jobs.len() {
        let pending = &jobs[rows.len()..(rows.len() + batch).min(jobs.len())];
        let done: Vec<Result<R>> = pool.install(|| pending.par_iter().map(&f).collect());
        let mut failure = None;
        for r in done {
            match r {
                Ok(row) if failure.is_none() => rows.push(row),
                Ok(_) => {}
                Err(e) => {
                    failure.get_or_insert(e);
                }
            }
        }
        write_csv(&rows_path, meta, &rows)?;
        write_json(
            &manifest_path,
            &Manifest { config_digest: digest.clone(), completed: rows.len(), total: jobs.len() },
        )?;
        if let Some(e) = failure {
            return Err(e);
        }
    }
    if !manifest_path.exists() {
        write_json(&manifest_path, &Manifest { config_digest: digest, completed: rows.len(), total: jobs.len() })?;
    }
    Ok(rows)
}

struct SweepJob {
    depth: usize,
    scheme: Scheme,
    trial: usize,
}

/// Depth sweep on the first configured instance over the configured
/// schemes. Writes `config.json`, `trials.csv`, `manifest.json` and
/// `aggregate.json` into the experiment directory.
pub fn run_depth_sweep(config: &ExperimentConfig) -> Result<AggregateResult> {
    Ok(run_sweep_in(config)?.0)
}

/// As [`run_depth_sweep`], also returning the experiment directory.
pub fn run_sweep_in(config: &ExperimentConfig) -> Result<(AggregateResult, PathBuf)> {
    config.validate()?;
    let path = config.instances.first().ok_or_else(|| Error::Config("an instance is required".into()))?;
    let loaded = Loaded::open(path)?;
    let planted = loaded.planted()?;
    let digest = config.digest(std::slice::from_ref(&loaded.digest));
    let dir = experiment_dir(&config.out, config.kind, &digest);
    let meta = Meta::new(Some(digest.clone()), Some(config.seed), Some(loaded.digest.clone()));
    write_json(&dir.join("config.json"), config)?;

    let schemes = config.schemes();
    let baseline = sa_baseline(&config.out, &loaded, &config.sa)?;
    let needs_eligible = schemes.iter().any(|s| *s != Scheme::None);
    let eligible = eligible_clauses(&loaded.instance, &baseline.distraction_configs());
    if needs_eligible && eligible.is_empty() {
        return Err(qdrop_core::Error::EmptyEligible.into());
    }

    let inst = &loaded.instance;
    let full = Arc::new(EnergyTable::full(inst)?);
    let mut jobs = Vec::new();
    for &depth in &config.depths {
        for &scheme in &schemes {
            for trial in 0..config.trials.at(depth) {
                jobs.push(SweepJob { depth, scheme, trial });
            }
        }
    }
    let opt = config.optimizer.config();
    let kind = config.kind;
    run_jobs(&dir, &meta, config.threads, &jobs, |job| {
        let is = init_seed(config.seed, kind, job.depth, job.trial);
        let ps = plan_seed(config.seed, kind, job.depth, job.scheme, job.trial);
        let init = QaoaParams::random(job.depth, &mut rng(is));
        let circuit = if job.scheme == Scheme::None {
            Circuit::repeated(full.clone(), job.depth)?
        } else {
            let plan = make_plan(inst, &eligible, job.scheme, config.keep_fraction, job.depth, ps)?;
            Circuit::from_plan(inst, &plan)?
        };
        let t = optimize(&circuit, &full, &init, &opt, planted)?;
        Ok(TrialRow {
            depth: job.depth,
            scheme: job.scheme.name().to_string(),
            trial: job.trial,
            init_seed: is,
            plan_seed: ps,
            initial_cost: t.points[0].cost,
            final_cost: t.final_cost,
            final_success: t.final_success,
        })
    })?;
    // aggregate from the persisted rows so both always agree
    let (_, persisted) = read_csv::<TrialRow>(&dir.join("trials.csv"))?;
    let agg = AggregateResult::from_rows(&persisted, &config.depths, &schemes, baseline.r, Some(meta));
    write_json(&dir.join("aggregate.json"), &agg)?;
    Ok((agg, dir))
}

/// Depth sweep comparing regular QAOA with uniform and per-layer dropout.
pub fn run_dropout_compare(config: &ExperimentConfig) -> Result<AggregateResult> {
    let mut c = config.clone();
    c.kind = Kind::DropoutCompare;
    if c.schemes == [Scheme::None.name()] {
        c.schemes = [Scheme::None, Scheme::Uniform, Scheme::PerLayer].iter().map(|s| s.name().to_string()).collect();
    }
    run_depth_sweep(&c)
}

/// Replays one persisted sweep trial, returning its full trajectory and the
/// dropout plan it used.
pub fn replay_trial(config: &ExperimentConfig, row: &TrialRow) -> Result<(Trajectory, DropoutPlan)> {
    let loaded = Loaded::open(&config.instances[0])?;
    let planted = loaded.planted()?;
    let inst = &loaded.instance;
    let scheme =
        Scheme::from_name(&row.scheme).ok_or_else(|| Error::Config(format!("unknown scheme {}", row.scheme)))?;
    let baseline = sa_baseline(&config.out, &loaded, &config.sa)?;
    let eligible = eligible_clauses(inst, &baseline.distraction_configs());
    let plan = if scheme == Scheme::None {
        DropoutPlan::none(inst.clauses().len(), row.depth)
    } else {
        make_plan(inst, &eligible, scheme, config.keep_fraction, row.depth, row.plan_seed)?
    };
    let full = EnergyTable::full(inst)?;
    let circuit = Circuit::from_plan(inst, &plan)?;
    let init = QaoaParams::random(row.depth, &mut rng(row.init_seed));
    Ok((optimize(&circuit, &full, &init, &config.optimizer.config(), planted)?, plan))
}

/// Writes the plan, trajectory and summary of a replayed trial.
pub fn write_trial_details(dir: &Path, meta: &Meta, row: &TrialRow, t: &Trajectory, plan: &DropoutPlan) -> Result<()> {
    let stem = format!("p{}-{}-{}", row.depth, row.scheme, row.trial);
    write_json(&dir.join(format!("{stem}.plan.json")), &PlanFile::from_plan(plan, Some(meta.clone())))?;
    write_csv(&dir.join(format!("{stem}.trajectory.csv")), meta, &TrajectoryRow::rows(t))?;
    write_json(&dir.join(format!("{stem}.summary.json")), &SummaryFile::from_trajectory(t, Some(meta.clone())))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Role {
    E,
    H,
}

impl Role {
    fn name(&self) -> &'static str {
        match self {
            Role::E => "E",
            Role::H => "H",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossRow {
    pub circuit: Role,
    pub cost: Role,
    pub trial: usize,
    pub init_seed: u64,
    pub final_cost: f64,
    pub final_success: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossAggregate {
    pub label: String,
    pub mean_success: f64,
    pub std_success: f64,
    pub best_success: f64,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossResult {
    pub depth: usize,
    pub combos: Vec<CrossAggregate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<Meta>,
}

impl CrossResult {
    pub fn mean(&self, circuit: Role, cost: Role) -> f64 {
        let label = format!("{}-{}", circuit.name(), cost.name());
        self.combos.iter().find(|c| c.label == label).map(|c| c.mean_success).unwrap_or(f64::NAN)
    }
}

const COMBOS: [(Role, Role); 4] = [(Role::E, Role::E), (Role::E, Role::H), (Role::H, Role::E), (Role::H, Role::H)];

/// The four circuit/cost combinations over a paired easy/hard instance at
/// one depth (the first configured). Per-trial trajectories go to
/// `trajectories/`, epoch-wise means to `curves/`.
pub fn run_cross_test(config: &ExperimentConfig, depth: usize) -> Result<CrossResult> {
    config.validate()?;
    if config.instances.len() != 2 {
        return Err(Error::Config("cross test needs an easy and a hard instance".into()));
    }
    let easy = Loaded::open(&config.instances[0])?;
    let hard = Loaded::open(&config.instances[1])?;
    let planted = easy.planted()?;
    if !hard.planted()?.same_up_to_flip(&planted) || easy.instance.n() != hard.instance.n() {
        return Err(qdrop_core::Error::GroundPairMismatch.into());
    }
    let digest = config.digest(&[easy.digest.clone(), hard.digest.clone()]);
    let dir = experiment_dir(&config.out, Kind::Crosstest, &digest);
    let meta = Meta::new(Some(digest.clone()), Some(config.seed), Some(format!("{}+{}", easy.digest, hard.digest)));
    write_json(&dir.join("config.json"), config)?;

    let tables = [Arc::new(EnergyTable::full(&easy.instance)?), Arc::new(EnergyTable::full(&hard.instance)?)];
    let table = |r: Role| tables[(r == Role::H) as usize].clone();
    let trials = config.trials.at(depth);
    let jobs: Vec<(Role, Role, usize)> =
        COMBOS.iter().flat_map(|&(a, b)| (0..trials).map(move |t| (a, b, t))).collect();
    let opt = config.optimizer.config();
    let traj_dir = dir.join("trajectories");
    let rows = run_jobs(&dir, &meta, config.threads, &jobs, |&(circ, cost, trial)| {
        let is = init_seed(config.seed, Kind::Crosstest, depth, trial);
        let init = QaoaParams::random(depth, &mut rng(is));
        let circuit = Circuit::repeated(table(circ), depth)?;
        let t = optimize(&circuit, &table(cost), &init, &opt, planted)?;
        let name = format!("{}-{}-{}.csv", circ.name(), cost.name(), trial);
        write_csv(&traj_dir.join(name), &meta, &TrajectoryRow::rows(&t))?;
        Ok(CrossRow {
            circuit: circ,
            cost,
            trial,
            init_seed: is,
            final_cost: t.final_cost,
            final_success: t.final_success,
        })
    })?;

    let mut combos = Vec::new();
    for &(circ, cost) in &COMBOS {
        let label = format!("{}-{}", circ.name(), cost.name());
        let xs: Vec<f64> =
            rows.iter().filter(|r| r.circuit == circ && r.cost == cost).map(|r| r.final_success).collect();
        let s = summarize(&xs);
        combos.push(CrossAggregate {
            label: label.clone(),
            mean_success: s.mean,
            std_success: s.std,
            best_success: s.best,
            count: s.count,
        });

        // epoch-wise mean trajectory for plotting
        let mut acc: Vec<TrajectoryRow> = Vec::new();
        for trial in 0..trials {
            let (_, t) = read_csv::<TrajectoryRow>(&traj_dir.join(format!("{label}-{trial}.csv")))?;
            if acc.is_empty() {
                acc = t.iter().map(|r| TrajectoryRow { epoch: r.epoch, cost: 0.0, success_prob: 0.0 }).collect();
            }
            for (a, r) in acc.iter_mut().zip(&t) {
                a.cost += r.cost / trials as f64;
                a.success_prob += r.success_prob / trials as f64;
            }
        }
        write_csv(&dir.join("curves").join(format!("{label}.csv")), &meta, &acc)?;
    }
    let result = CrossResult { depth, combos, meta: Some(meta) };
    write_json(&dir.join("aggregate.json"), &result)?;
    Ok(result)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RuggednessRow {
    pub realization: usize,
    pub retain_fraction: f64,
    pub ruggedness: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LandscapeResult {
    pub rows: Vec<RuggednessRow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<Meta>,
}

impl LandscapeResult {
    /// Share of realizations whose ruggedness never increases along the
    /// configured (decreasing) fractions.
    pub fn non_increasing_share(&self) -> f64 {
        let reals: std::collections::BTreeSet<usize> = self.rows.iter().map(|r| r.realization).collect();
        if reals.is_empty() {
            return 0.0;
        }
        let ok = reals
            .iter()
            .filter(|&&k| {
                let seq: Vec<usize> = self.rows.iter().filter(|r| r.realization == k).map(|r| r.ruggedness).collect();
                seq.windows(2).all(|w| w[1] <= w[0])
            })
            .count();
        ok as f64 / reals.len() as f64
    }
}

/// Landscape settings beyond the experiment config.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LandscapeSpec {
    pub fractions: Vec<f64>,
    pub realizations: usize,
    /// Restrict dropout to clauses the SA distractions satisfy.
    pub use_distractions: bool,
}

/// Min-energy-by-distance curves of the first configured instance,
/// measured from its planted state. One CSV per realization, normalized
/// across that realization's curves.
pub fn run_landscape(config: &ExperimentConfig, spec: &LandscapeSpec) -> Result<LandscapeResult> {
    let path = config.instances.first().ok_or_else(|| Error::Config("an instance is required".into()))?;
    if spec.realizations == 0 || spec.fractions.is_empty() {
        return Err(Error::Config("need at least one realization and one fraction".into()));
    }
    let loaded = Loaded::open(path)?;
    let planted = loaded.planted()?;
    let inst = &loaded.instance;
    let digest = digest_json(&(config.digest(std::slice::from_ref(&loaded.digest)), spec));
    let dir = experiment_dir(&config.out, Kind::Landscape, &digest);
    let meta = Meta::new(Some(digest.clone()), Some(config.seed), Some(loaded.digest.clone()));
    write_json(&dir.join("config.json"), &(config, spec))?;

    let eligible: Vec<usize> = if spec.use_distractions {
        let b = sa_baseline(&config.out, &loaded, &config.sa)?;
        eligible_clauses(inst, &b.distraction_configs())
    } else {
        (0..inst.clauses().len()).collect()
    };
    let reference = instance_landscape(inst, planted)?;
    let p = pool(config.threads)?;
    let per: Vec<Vec<(f64, LandscapeCurve)>> = p.install(|| {
        (0..spec.realizations)
            .into_par_iter()
            .map(|k| {
                let seed = SeedPath::new(config.seed).label("landscape").index(k as u64).seed();
                landscape_under_dropout(inst, planted, &spec.fractions, &eligible, seed)
            })
            .collect::<qdrop_core::Result<_>>()
    })?;

    let mut rows = Vec::new();
    for (k, curves) in per.iter().enumerate() {
        let lo = curves.iter().map(|(_, c)| c.min()).fold(reference.min(), f64::min);
        let hi = curves.iter().map(|(_, c)| c.max()).fold(reference.max(), f64::max);
        let mut csv_rows = Vec::new();
        for (f, c) in curves {
            let norm = c.normalized_by(lo, hi);
            for d in 0..=c.n {
                csv_rows.push(CurveRow {
                    distance: d,
                    energy: c.values[d],
                    normalized_energy: norm.values[d],
                    retain_fraction: *f,
                });
            }
            rows.push(RuggednessRow { realization: k, retain_fraction: *f, ruggedness: c.ruggedness() });
        }
        write_csv(&dir.join(format!("curve-{k}.csv")), &meta, &csv_rows)?;
    }
    let result = LandscapeResult { rows, meta: Some(meta) };
    write_json(&dir.join("ruggedness.json"), &result)?;
    Ok(result)
}
