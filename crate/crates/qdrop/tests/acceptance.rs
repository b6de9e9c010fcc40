//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! `QDROP_ACCEPT_EPOCHS` sets the optimizer budget of the cross test and the
//! dropout comparison (default 100). `QDROP_ACCEPT_FULL=1` adds the N = 16
//! depth sweep. `QDROP_ACCEPT_STRICT=1` exits nonzero when anything fails.

#[path = "../../core/tests/support/dense.rs"]
mod dense;

use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qdrop::config::{ExperimentConfig, Kind, Trials};
use qdrop::core::dropout::{build_energy_table, make_plan, EnergyTable, Scheme};
use qdrop::core::generate::{
    generate_filtered, generate_paired, generate_planted, random_planted, Accepted, DifficultyFilter, GenerationMode,
};
use qdrop::core::landscape::{instance_landscape, landscape_under_dropout};
use qdrop::core::qaoa::{evolve, gradient, Circuit, QaoaParams};
use qdrop::core::{Clause, Instance, Label, SpinConfig};
use qdrop::format::{read_csv, write_json, InstanceFile};
use qdrop::harness::{run_cross_test, run_landscape, run_sweep_in, LandscapeSpec, Role, TrialRow};
use qdrop::stats::{summarize, wilcoxon_greater};

type Outcome = Result<(bool, String), String>;

fn env_flag(name: &str) -> bool {
    std::env::var(name).map(|v| v == "1").unwrap_or(false)
}

fn accept_epochs() -> usize {
    std::env::var("QDROP_ACCEPT_EPOCHS").ok().and_then(|v| v.parse().ok()).unwrap_or(100)
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

fn random_instance(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Instance {
    let mut clauses = Vec::with_capacity(m);
    while clauses.len() < m {
        if let Ok(c) = Clause::new(rng.random_range(0..n), rng.random_range(0..n), rng.random_range(0..n)) {
            clauses.push(c);
        }
    }
    Instance::new(n, clauses, None).unwrap()
}

fn save(dir: &Path, name: &str, inst: &Instance) -> PathBuf {
    let path = dir.join(name);
    write_json(&path, &InstanceFile::from_instance(inst, None)).unwrap();
    path
}

fn clause_energy_table() -> Outcome {
    let inst = Instance::new(3, vec![Clause::new(0, 1, 2).map_err(e)?], None).map_err(e)?;
    let mut energies: Vec<u32> = (0..8u64).map(|b| inst.energy_bits(b)).collect();
    energies.sort_unstable();
    Ok((energies == [0, 0, 0, 0, 0, 0, 4, 4], format!("{energies:?}")))
}

fn pairwise_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut bad = 0;
    for _ in 0..1000 {
        let n = rng.random_range(3..=40);
        let m = rng.random_range(1..=6 * n);
        let inst = random_instance(&mut rng, n, m);
        let s = SpinConfig::random(n, &mut rng).map_err(e)?;
        let direct = inst.energy(&s).map_err(e)? as i64;
        let pairwise = inst.coupling_matrix().pairwise_energy(&s) + m as i64;
        bad += (direct != pairwise) as usize;
    }
    Ok((bad == 0, format!("{bad} mismatches over 1000 pairs")))
}

fn norm_n16() -> Outcome {
    let planted = random_planted(16, 4).map_err(e)?;
    let inst = generate_planted(16, planted, GenerationMode::Sporadic, 4, None).map_err(e)?;
    let table = Arc::new(EnergyTable::full(&inst).map_err(e)?);
    let circuit = Circuit::repeated(table, 50).map_err(e)?;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let psi = evolve(&circuit, &QaoaParams::random(50, &mut rng)).map_err(e)?;
        worst = worst.max((psi.norm_sqr() - 1.0).abs());
    }
    Ok((worst < 1e-10, format!("max |norm - 1| = {worst:.2e}")))
}

fn dense_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let n = rng.random_range(3..=4);
        let m = rng.random_range(1..=6);
        let inst = random_instance(&mut rng, n, m);
        let p = rng.random_range(1..=4);
        let scheme = Scheme::ALL[rng.random_range(0..4)];
        let eligible: Vec<usize> = (0..m).filter(|_| rng.random_bool(0.7)).collect();
        let eligible = if eligible.is_empty() { vec![0] } else { eligible };
        let keep = rng.random_range(0.2..=1.0);
        let plan = make_plan(&inst, &eligible, scheme, keep, p, rng.random()).map_err(e)?;
        let circuit = Circuit::from_plan(&inst, &plan).map_err(e)?;
        let params = QaoaParams::random(p, &mut rng);
        let psi = evolve(&circuit, &params).map_err(e)?;
        let layers: Vec<Vec<f64>> = (0..p).map(|k| circuit.layer(k).energies().to_vec()).collect();
        let expect = dense::dense_evolve(n, &layers, &params.gammas, &params.betas);
        for (a, b) in psi.amplitudes().iter().zip(&expect) {
            worst = worst.max((a - b).norm());
        }
    }
    Ok((worst < 1e-10, format!("max amplitude deviation {worst:.2e}")))
}

fn gradient_check() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let planted = random_planted(8, 5).map_err(e)?;
    let inst = generate_planted(8, planted, GenerationMode::Sporadic, 5, None).map_err(e)?;
    let cost = EnergyTable::full(&inst).map_err(e)?;
    let all: Vec<usize> = (0..inst.clauses().len()).collect();
    let h = 1e-5;
    let (mut worst, mut worst_raw): (f64, f64) = (0.0, 0.0);
    for k in 0..50 {
        let scheme = Scheme::ALL[k % 4];
        let plan = make_plan(&inst, &all, scheme, 0.5, 5, k as u64).map_err(e)?;
        let circuit = Circuit::from_plan(&inst, &plan).map_err(e)?;
        let params = QaoaParams::random(5, &mut rng);
        let (dg, db) = gradient(&circuit, &params, &cost).map_err(e)?;
        let f = |q: &QaoaParams| evolve(&circuit, q).unwrap().cost(&cost).unwrap();
        for (i, g) in dg.iter().chain(&db).enumerate() {
            let (mut plus, mut minus) = (params.clone(), params.clone());
            if i < 5 {
                plus.gammas[i] += h;
                minus.gammas[i] -= h;
            } else {
                plus.betas[i - 5] += h;
                minus.betas[i - 5] -= h;
            }
            let fd = (f(&plus) - f(&minus)) / (2.0 * h);
            worst = worst.max((g - fd).abs() / fd.abs().max(1e-3));
            worst_raw = worst_raw.max((g - fd).abs() / fd.abs());
        }
    }
    Ok((worst < 1e-5, format!("max relative error {worst:.2e} (unfloored {worst_raw:.2e})")))
}

fn z2_symmetry() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for (k, n) in [6usize, 9, 12, 14].into_iter().enumerate() {
        let planted = random_planted(n, k as u64).map_err(e)?;
        for mode in [GenerationMode::Sporadic, GenerationMode::Concentrated] {
            let inst = generate_planted(n, planted, mode, k as u64, None).map_err(e)?;
            let all: Vec<usize> = (0..inst.clauses().len()).collect();
            for scheme in Scheme::ALL {
                let p = rng.random_range(1..=12);
                let plan = make_plan(&inst, &all, scheme, 0.5, p, rng.random()).map_err(e)?;
                let circuit = Circuit::from_plan(&inst, &plan).map_err(e)?;
                let psi = evolve(&circuit, &QaoaParams::random(p, &mut rng)).map_err(e)?;
                let a = psi.amplitudes();
                let mask = a.len() - 1;
                for (b, x) in a.iter().enumerate() {
                    worst = worst.max((x - a[b ^ mask]).norm());
                }
            }
        }
    }
    Ok((worst < 1e-10, format!("max |a[b] - a[flip b]| = {worst:.2e}")))
}

fn ground_preservation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut bad = 0;
    for k in 0..200u64 {
        let n = rng.random_range(6..=12);
        let planted = random_planted(n, k).map_err(e)?;
        let mode = if k % 2 == 0 { GenerationMode::Sporadic } else { GenerationMode::Concentrated };
        let inst = generate_planted(n, planted, mode, k, None).map_err(e)?;
        let m = inst.clauses().len();
        let eligible: Vec<usize> = (0..m).filter(|_| rng.random_bool(0.6)).collect();
        let eligible = if eligible.is_empty() { vec![0] } else { eligible };
        let scheme = Scheme::ALL[1 + (k as usize) % 3];
        let plan =
            make_plan(&inst, &eligible, scheme, rng.random_range(0.1..=1.0), rng.random_range(1..=6), k).map_err(e)?;
        for w in &plan.layer_weights {
            let t = build_energy_table(&inst, w).map_err(e)?;
            let ok =
                t.min() == 0.0 && t.energy(planted.index()) == 0.0 && t.energy(planted.global_flip().index()) == 0.0;
            bad += !ok as usize;
        }
    }
    Ok((bad == 0, format!("{bad} layer tables lost the planted minimum over 200 plans")))
}

fn landscape_symmetry() -> Outcome {
    let mut checked = 0;
    for (k, n) in [6usize, 10, 14, 18, 20].into_iter().enumerate() {
        let planted = random_planted(n, 10 + k as u64).map_err(e)?;
        for mode in [GenerationMode::Sporadic, GenerationMode::Concentrated] {
            let inst = generate_planted(n, planted, mode, k as u64, None).map_err(e)?;
            let mut curves = vec![instance_landscape(&inst, planted).map_err(e)?];
            let all: Vec<usize> = (0..inst.clauses().len()).collect();
            curves.extend(
                landscape_under_dropout(&inst, planted, &[0.5], &all, k as u64).map_err(e)?.into_iter().map(|(_, c)| c),
            );
            for c in &curves {
                let sym = (0..=n).all(|d| c.values[d] == c.values[n - d]);
                let total: u64 = c.shell_sizes.iter().sum();
                if !sym || total != 1u64 << n {
                    return Ok((false, format!("n={n} {}: symmetric {sym}, shells sum {total}", mode.name())));
                }
                checked += 1;
            }
        }
    }
    Ok((true, format!("{checked} curves up to N = 20")))
}

struct Dichotomy {
    easy: Accepted,
    hard: Accepted,
}

fn dichotomy(out: &mut Option<Dichotomy>) -> Outcome {
    let filter = DifficultyFilter::default();
    let planted = random_planted(16, 1).map_err(e)?;
    let easy = generate_filtered(16, planted, Label::Simple, &filter, 1).map_err(e)?;
    let hard = generate_filtered(16, planted, Label::Hard, &filter, 1).map_err(e)?;
    let (re, rh) = (easy.report.success_rate, hard.report.success_rate);
    let detail = format!(
        "sporadic R = {re:.3} after {} attempt(s), concentrated R = {rh:.3} after {} attempt(s)",
        easy.attempts, hard.attempts
    );
    let pass = re > 0.95 && rh < 0.10 && easy.report.trials == 1000 && hard.report.trials == 1000;
    *out = Some(Dichotomy { easy, hard });
    Ok((pass, detail))
}

fn config(kind: Kind, instances: Vec<PathBuf>, out: &Path) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(kind, instances, out.to_path_buf());
    c.seed = 2024;
    c
}

fn depth_sweep(instance: &Path, out: &Path) -> Outcome {
    let mut c = config(Kind::Sweep, vec![instance.to_path_buf()], out);
    c.depths = vec![10, 30, 50];
    c.trials = Trials::Fixed(20);
    let (agg, _) = run_sweep_in(&c).map_err(e)?;
    let best: Vec<f64> = c.depths.iter().map(|&d| agg.get(d, Scheme::None).unwrap().best).collect();
    let mean: Vec<f64> = c.depths.iter().map(|&d| agg.get(d, Scheme::None).unwrap().mean).collect();
    let monotone = best.windows(2).all(|w| w[1] >= w[0]);
    let pass = monotone && best[2] > 0.5;
    Ok((pass, format!("best {best:.4?}, mean {mean:.4?} at p = 10/30/50, 20 trials, {} epochs", c.optimizer.epochs)))
}

fn fig4_fast(dir: &Path) -> Outcome {
    let planted = random_planted(10, 3).map_err(e)?;
    let easy = generate_filtered(10, planted, Label::Simple, &DifficultyFilter::default(), 3).map_err(e)?;
    let path = save(dir, "easy10.json", &easy.instance);
    depth_sweep(&path, &dir.join("fig4-fast"))
}

fn fig4_full(dir: &Path, d: &Dichotomy) -> Outcome {
    let path = save(dir, "easy16.json", &d.easy.instance);
    depth_sweep(&path, &dir.join("fig4-full"))
}

fn fig5(dir: &Path) -> Outcome {
    let planted = random_planted(14, 1).map_err(e)?;
    let (easy, hard) = generate_paired(14, planted, &DifficultyFilter::default(), 1).map_err(e)?;
    let paths = vec![save(dir, "pair-easy.json", &easy.instance), save(dir, "pair-hard.json", &hard.instance)];
    let mut c = config(Kind::Crosstest, paths, &dir.join("fig5"));
    c.trials = Trials::Fixed(10);
    c.optimizer.epochs = accept_epochs();
    let r = run_cross_test(&c, 30).map_err(e)?;
    let (ee, eh, he, hh) =
        (r.mean(Role::E, Role::E), r.mean(Role::E, Role::H), r.mean(Role::H, Role::E), r.mean(Role::H, Role::H));
    let ratio = (ee + eh) / (he + hh);
    Ok((
        ratio >= 2.0,
        format!(
            "N = 14, p = 30, 10 inits, {} epochs: E-E {ee:.4} E-H {eh:.4} H-E {he:.4} H-H {hh:.4}, ratio {ratio:.2}",
            c.optimizer.epochs
        ),
    ))
}

fn fig6(dir: &Path, d: &Dichotomy) -> Outcome {
    let path = save(dir, "hard16.json", &d.hard.instance);
    let mut c = config(Kind::DropoutCompare, vec![path], &dir.join("fig6"));
    c.depths = vec![50];
    c.trials = Trials::Fixed(30);
    c.schemes = vec!["none".into(), "uniform".into()];
    c.optimizer.epochs = accept_epochs();
    let (agg, exp_dir) = run_sweep_in(&c).map_err(e)?;
    let (_, rows) = read_csv::<TrialRow>(&exp_dir.join("trials.csv")).map_err(e)?;
    let by = |s: &str| {
        let mut v: Vec<&TrialRow> = rows.iter().filter(|r| r.scheme == s).collect();
        v.sort_by_key(|r| r.trial);
        v.iter().map(|r| r.final_success).collect::<Vec<f64>>()
    };
    let (drop, regular) = (by("uniform"), by("none"));
    let w = wilcoxon_greater(&drop, &regular);
    let (sd, sr) = (summarize(&drop), summarize(&regular));
    let r = agg.rows[0].sa_r;
    let pass = sd.mean >= sr.mean && w.p_value < 0.05 && sd.best > r;
    Ok((
        pass,
        format!(
            "{} epochs: uniform mean {:.4} best {:.4}, regular mean {:.4} best {:.4}, Wilcoxon p = {:.3}, SA R = {r:.3}",
            c.optimizer.epochs, sd.mean, sd.best, sr.mean, sr.best, w.p_value
        ),
    ))
}

fn fig1d(dir: &Path) -> Outcome {
    let planted = random_planted(20, 1).map_err(e)?;
    let hard = generate_filtered(20, planted, Label::Hard, &DifficultyFilter::default(), 1).map_err(e)?;
    let path = save(dir, "hard20.json", &hard.instance);
    let c = config(Kind::Landscape, vec![path], &dir.join("fig1d"));
    let spec = LandscapeSpec { fractions: vec![1.0, 0.75, 0.5], realizations: 50, use_distractions: true };
    let r = run_landscape(&c, &spec).map_err(e)?;
    let share = r.non_increasing_share();
    let mean = |f: f64| {
        let xs: Vec<f64> = r.rows.iter().filter(|x| x.retain_fraction == f).map(|x| x.ruggedness as f64).collect();
        xs.iter().sum::<f64>() / xs.len() as f64
    };
    Ok((
        share >= 0.8,
        format!(
            "non-increasing in {:.0}% of 50 realizations; mean interior minima {:.2} / {:.2} / {:.2}",
            100.0 * share,
            mean(1.0),
            mean(0.75),
            mean(0.5)
        ),
    ))
}

fn determinism(dir: &Path) -> Outcome {
    let planted = random_planted(10, 8).map_err(e)?;
    let inst = generate_planted(10, planted, GenerationMode::Concentrated, 8, None).map_err(e)?;
    let path = save(dir, "det10.json", &inst);
    let mut bytes = Vec::new();
    for (k, threads) in [0usize, 1].into_iter().enumerate() {
        let mut c = config(Kind::DropoutCompare, vec![path.clone()], &dir.join(format!("det-{k}")));
        c.depths = vec![3, 6];
        c.trials = Trials::Fixed(4);
        c.schemes = vec!["none".into(), "uniform".into(), "per_layer".into(), "soft".into()];
        c.optimizer.epochs = 40;
        c.threads = threads;
        let (_, d) = run_sweep_in(&c).map_err(e)?;
        bytes.push(std::fs::read(d.join("trials.csv")).map_err(e)?);
    }
    Ok((bytes[0] == bytes[1], format!("{} bytes of per-trial rows compared", bytes[0].len())))
}

fn main() {
    let tmp = tempfile::tempdir().expect("temporary directory");
    let dir = tmp.path();
    let mut results: Vec<(&str, bool)> = Vec::new();
    let mut run = |name: &'static str, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let (pass, detail) = f().unwrap_or_else(|err| (false, format!("error: {err}")));
        let status = if pass { "PASS" } else { "FAIL" };
        println!("{status} {name}: {detail} ({:.1}s)", start.elapsed().as_secs_f64());
        results.push((name, pass));
    };

    run("clause energy table", &mut clause_energy_table);
    run("pairwise form identity", &mut pairwise_identity);
    run("statevector norm n=16 p=50", &mut norm_n16);
    run("dense oracle equivalence", &mut dense_oracle);
    run("gradient vs finite differences", &mut gradient_check);
    run("Z2 amplitude symmetry", &mut z2_symmetry);
    run("ground state preserved under dropout", &mut ground_preservation);
    run("landscape symmetry", &mut landscape_symmetry);
    let mut pair = None;
    run("difficulty dichotomy N=16", &mut || dichotomy(&mut pair));
    run("depth sweep on easy instance, fast N=10", &mut || fig4_fast(dir));
    if env_flag("QDROP_ACCEPT_FULL") {
        run("depth sweep on easy instance, N=16", &mut || match &pair {
            Some(d) => fig4_full(dir, d),
            None => Err("no easy N=16 instance".into()),
        });
    }
    run("cross test p=30", &mut || fig5(dir));
    run("dropout comparison N=16 p=50", &mut || match &pair {
        Some(d) => fig6(dir, d),
        None => Err("no hard N=16 instance".into()),
    });
    run("landscape smoothing N=20", &mut || fig1d(dir));
    run("determinism", &mut || determinism(dir));

    let failed: Vec<&str> = results.iter().filter(|(_, p)| !p).map(|(n, _)| *n).collect();
    println!("{} of {} criteria passed", results.len() - failed.len(), results.len());
    if !failed.is_empty() && env_flag("QDROP_ACCEPT_STRICT") {
        std::process::exit(1);
    }
}
