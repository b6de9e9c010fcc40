use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qdrop::config::{ExperimentConfig, Kind, Trials};
use qdrop::core::generate::{
    generate_filtered, generate_paired, generate_planted, random_planted, Accepted, DifficultyFilter, GenerationMode,
};
use qdrop::core::Label;
use qdrop::format::{write_json, InstanceFile, Meta, SaReportFile};
use qdrop::harness::{
    default_out_root, run_assess, run_cross_test, run_landscape, run_sweep_in, sidecar_path, AggregateResult,
    LandscapeSpec, OUT_ENV,
};
use qdrop::{Error, Result};

#[derive(Parser)]
#[command(name = "qdrop", version, about = "QAOA with quantum dropout on planted NAE3SAT")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Sporadic,
    Concentrated,
    /// Sporadic, regenerated until SA finds it simple.
    Simple,
    /// Concentrated, regenerated until SA finds it hard.
    Hard,
    /// A simple and a hard instance sharing one planted pair.
    Paired,
}

#[derive(Subcommand)]
enum Command {
    /// Create a planted instance.
    Generate {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, value_enum, default_value = "sporadic")]
        mode: Mode,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; `paired` writes `<stem>-easy.json` and `<stem>-hard.json`.
        #[arg(long, short)]
        output: PathBuf,
        #[arg(long, default_value_t = 50)]
        max_attempts: usize,
        /// N = 10 unless `--n` is given.
        #[arg(long)]
        fast: bool,
    },
    /// Simulated-annealing difficulty assessment and distraction harvest.
    Assess {
        instance: PathBuf,
        #[arg(long, default_value_t = 1000)]
        sa_trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, env = OUT_ENV)]
        out: Option<PathBuf>,
    },
    /// Minimum energy by Hamming distance, with and without dropout.
    Landscape {
        instance: PathBuf,
        #[arg(long, value_delimiter = ',', default_values_t = [1.0, 0.75, 0.5])]
        fractions: Vec<f64>,
        #[arg(long, default_value_t = 50)]
        realizations: usize,
        /// Drop from every clause rather than those the SA distractions satisfy.
        #[arg(long)]
        all_clauses: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Success probability against circuit depth.
    Sweep {
        instance: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Easy and hard circuits crossed with easy and hard costs.
    Crosstest {
        easy: PathBuf,
        hard: PathBuf,
        #[arg(long, default_value_t = 30)]
        depth: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Regular QAOA against uniform and per-layer dropout.
    Dropcompare {
        instance: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// A count, or `paper` for 100/50/30 by depth.
    #[arg(long)]
    trials: Option<String>,
    #[arg(long, value_delimiter = ',')]
    depths: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    scheme: Option<Vec<String>>,
    #[arg(long)]
    keep_fraction: Option<f64>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long, env = OUT_ENV)]
    out: Option<PathBuf>,
    /// Depths {4, 8, 16} with 10 trials.
    #[arg(long)]
    fast: bool,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

impl Common {
    fn config(&self, kind: Kind, instances: Vec<PathBuf>) -> Result<ExperimentConfig> {
        let out = self.out.clone().unwrap_or_else(default_out_root);
        let mut c = ExperimentConfig::new(kind, instances, out);
        if self.fast {
            c = c.fast();
        }
        c.seed = self.seed;
        c.threads = self.threads;
        if let Some(t) = &self.trials {
            c.trials = match t.as_str() {
                "paper" => Trials::Paper,
                s => Trials::Fixed(s.parse().map_err(|_| Error::Config(format!("bad trial count {s:?}")))?),
            };
        }
        if let Some(d) = &self.depths {
            c.depths = d.clone();
        }
        if let Some(s) = &self.scheme {
            c.schemes = s.clone();
        }
        if let Some(k) = self.keep_fraction {
            c.keep_fraction = k;
        }
        if let Some(e) = self.epochs {
            c.optimizer.epochs = e;
        }
        if let Some(lr) = self.lr {
            c.optimizer.learning_rate = lr;
        }
        c.validate()?;
        Ok(c)
    }
}

fn print_aggregate(agg: &AggregateResult, dir: &Path) {
    println!("{:>5} {:>10} {:>8} {:>8} {:>8} {:>6} {:>8}", "depth", "scheme", "best", "mean", "std", "trials", "SA R");
    for r in &agg.rows {
        println!(
            "{:>5} {:>10} {:>8.4} {:>8.4} {:>8.4} {:>6} {:>8.4}",
            r.depth, r.scheme, r.best, r.mean, r.std, r.count, r.sa_r
        );
    }
    println!("results in {}", dir.display());
}

fn write_accepted(path: &Path, acc: &Accepted, seed: u64) -> Result<()> {
    let meta = Meta::new(None, Some(seed), None);
    write_json(path, &InstanceFile::from_instance(&acc.instance, Some(meta.clone())))?;
    write_json(&sidecar_path(path), &SaReportFile::from_report(&acc.report, Some(meta)))?;
    println!(
        "{}: {} clauses, SA R = {:.3}, {} attempt(s)",
        path.display(),
        acc.instance.clauses().len(),
        acc.report.success_rate,
        acc.attempts
    );
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate { n, mode, seed, output, max_attempts, fast } => {
            let n = n.unwrap_or(if fast { 10 } else { 16 });
            let planted = random_planted(n, seed)?;
            let filter = DifficultyFilter { max_attempts, ..DifficultyFilter::default() };
            match mode {
                Mode::Sporadic | Mode::Concentrated => {
                    let gm = if matches!(mode, Mode::Sporadic) {
                        GenerationMode::Sporadic
                    } else {
                        GenerationMode::Concentrated
                    };
                    let inst = generate_planted(n, planted, gm, seed, None)?;
                    write_json(&output, &InstanceFile::from_instance(&inst, Some(Meta::new(None, Some(seed), None))))?;
                    println!("{}: {} clauses", output.display(), inst.clauses().len());
                }
                Mode::Simple | Mode::Hard => {
                    let label = if matches!(mode, Mode::Simple) { Label::Simple } else { Label::Hard };
                    write_accepted(&output, &generate_filtered(n, planted, label, &filter, seed)?, seed)?;
                }
                Mode::Paired => {
                    let (easy, hard) = generate_paired(n, planted, &filter, seed)?;
                    let stem = output.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
                    write_accepted(&output.with_file_name(format!("{stem}-easy.json")), &easy, seed)?;
                    write_accepted(&output.with_file_name(format!("{stem}-hard.json")), &hard, seed)?;
                }
            }
        }
        Command::Assess { instance, sa_trials, seed, out } => {
            let mut c = ExperimentConfig::new(Kind::Assess, vec![], out.unwrap_or_else(default_out_root));
            c.sa.trials = sa_trials;
            c.sa.seed = seed;
            let a = run_assess(&instance, &c.sa, &c.out)?;
            println!("R = {:.4} over {} trials", a.baseline.r, a.baseline.trials);
            println!("{} distinct distraction(s)", a.baseline.distractions.len());
            println!("{}", a.advice());
            println!("report in {}", a.sidecar.display());
        }
        Command::Landscape { instance, fractions, realizations, all_clauses, common } => {
            let c = common.config(Kind::Landscape, vec![instance])?;
            let spec = LandscapeSpec { fractions, realizations, use_distractions: !all_clauses };
            let r = run_landscape(&c, &spec)?;
            for f in &spec.fractions {
                let xs: Vec<f64> =
                    r.rows.iter().filter(|row| row.retain_fraction == *f).map(|row| row.ruggedness as f64).collect();
                println!("retain {f:.2}: mean interior minima {:.2}", xs.iter().sum::<f64>() / xs.len() as f64);
            }
            println!("non-increasing in {:.0}% of realizations", 100.0 * r.non_increasing_share());
        }
        Command::Sweep { instance, common } => {
            let c = common.config(Kind::Sweep, vec![instance])?;
            let (agg, dir) = run_sweep_in(&c)?;
            print_aggregate(&agg, &dir);
        }
        Command::Dropcompare { instance, common } => {
            let mut c = common.config(Kind::DropoutCompare, vec![instance])?;
            if common.scheme.is_none() {
                c.schemes = ["none", "uniform", "per_layer"].map(String::from).to_vec();
            }
            let (agg, dir) = run_sweep_in(&c)?;
            print_aggregate(&agg, &dir);
        }
        Command::Crosstest { easy, hard, depth, common } => {
            let c = common.config(Kind::Crosstest, vec![easy, hard])?;
            let r = run_cross_test(&c, depth)?;
            for combo in &r.combos {
                println!(
                    "{}: mean {:.4} std {:.4} best {:.4} over {}",
                    combo.label, combo.mean_success, combo.std_success, combo.best_success, combo.count
                );
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
