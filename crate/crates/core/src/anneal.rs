//! Metropolis simulated annealing, used to score instance difficulty and to
//! harvest low-lying excited states ("distractions") from failed runs.

use alloc::vec::Vec;

use rand::{Rng, RngCore};

use crate::enumerate::ground_state_set;
use crate::instance::{Instance, CLAUSE_PENALTY};
use crate::seed::SeedPath;
use crate::spin::{mask, SpinConfig};
use crate::{Error, Result};

/// Success-rate threshold above which an instance is simple.
pub const SIMPLE_RATE: f64 = 0.95;
/// Success-rate threshold below which an instance is hard.
pub const HARD_RATE: f64 = 0.10;
/// Default cap on harvested distractions.
pub const MAX_DISTRACTIONS: usize = 30;

/// Geometric cooling schedule.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SaSchedule {
    pub t_start: f64,
    pub t_end: f64,
    pub n_sweeps: usize,
    /// Proposals per temperature step; `None` means one per spin.
    pub flips_per_sweep: Option<usize>,
}

impl Default for SaSchedule {
    fn default() -> Self {
        // t_start is one clause violation, t_end far below the smallest gap
        SaSchedule { t_start: CLAUSE_PENALTY as f64, t_end: 0.05, n_sweeps: 300, flips_per_sweep: None }
    }
}

impl SaSchedule {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_end > 0.0 && self.t_start > self.t_end) {
            return Err(Error::InvalidParameter("schedule needs t_start > t_end > 0"));
        }
        if self.n_sweeps == 0 {
            return Err(Error::InvalidParameter("schedule needs at least one sweep"));
        }
        if self.flips_per_sweep == Some(0) {
            return Err(Error::InvalidParameter("flips_per_sweep must be positive"));
        }
        Ok(())
    }

    /// Temperature at step `k` of `n_sweeps`.
    pub fn temperature(&self, k: usize) -> f64 {
        if self.n_sweeps == 1 {
            return self.t_start;
        }
        let frac = k as f64 / (self.n_sweeps - 1) as f64;
        self.t_start * libm::pow(self.t_end / self.t_start, frac)
    }
}

/// Metropolis acceptance for an energy change `delta` at temperature `t`, given a uniform draw `u`.
#[inline]
pub fn metropolis_accept(delta: i32, t: f64, u: f64) -> bool {
    delta <= 0 || u < libm::exp(-(delta as f64) / t)
}

/// Precomputed clause incidence for fast single-flip energy deltas.
#[derive(Clone, Debug)]
pub struct Annealer<'a> {
    inst: &'a Instance,
    sched: SaSchedule,
    /// Per spin, the bit masks of the clauses containing it.
    touching: Vec<Vec<u64>>,
}

impl<'a> Annealer<'a> {
    pub fn new(inst: &'a Instance, sched: SaSchedule) -> Result<Self> {
        sched.validate()?;
        let touching = inst
            .incidence()
            .into_iter()
            .map(|cs| {
                cs.into_iter()
                    .map(|ci| {
                        let [i, j, k] = inst.clauses()[ci].indices();
                        (1u64 << i) | (1u64 << j) | (1u64 << k)
                    })
                    .collect()
            })
            .collect();
        Ok(Annealer { inst, sched, touching })
    }

    /// Energy change from flipping spin `b` of `bits`.
    #[inline]
    pub fn delta(&self, bits: u64, b: usize) -> i32 {
        let flipped = bits ^ (1 << b);
        let mut d = 0i32;
        for &m in &self.touching[b] {
            let before = bits & m;
            let after = flipped & m;
            d += (after == 0 || after == m) as i32 - (before == 0 || before == m) as i32;
        }
        d * CLAUSE_PENALTY as i32
    }

    /// One annealing run from a uniformly random start.
    pub fn run<R: RngCore + ?Sized>(&self, rng: &mut R) -> (SpinConfig, u32) {
        self.run_traced(rng, |_, _| {})
    }

    /// As [`Annealer::run`], reporting every accepted move as `(delta, energy_after)`.
    pub fn run_traced<R, F>(&self, rng: &mut R, mut on_accept: F) -> (SpinConfig, u32)
    where
        R: RngCore + ?Sized,
        F: FnMut(i32, u32),
    {
        let n = self.inst.n();
        let mut bits = rng.next_u64() & mask(n);
        let mut energy = self.inst.energy_bits(bits) as i64;
        let flips = self.sched.flips_per_sweep.unwrap_or(n);
        for k in 0..self.sched.n_sweeps {
            let t = self.sched.temperature(k);
            for _ in 0..flips {
                let b = rng.random_range(0..n);
                let d = self.delta(bits, b);
                let u: f64 = if d > 0 { rng.random() } else { 0.0 };
                if metropolis_accept(d, t, u) {
                    bits ^= 1 << b;
                    energy += d as i64;
                    on_accept(d, energy as u32);
                }
            }
        }
        (SpinConfig::from_raw(n, bits), energy as u32)
    }
}

/// A single annealing run seeded directly.
pub fn sa_run(inst: &Instance, sched: &SaSchedule, seed: u64) -> Result<(SpinConfig, u32)> {
    let annealer = Annealer::new(inst, *sched)?;
    Ok(annealer.run(&mut crate::seed::rng(seed)))
}

/// Seed of trial `index` in an assessment with master `seed`.
pub fn trial_seed(seed: u64, index: usize) -> u64 {
    SeedPath::new(seed).label("sa").index(index as u64).seed()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Distraction {
    pub config: SpinConfig,
    pub energy: u32,
}

/// Outcome of repeated annealing runs on one instance.
#[derive(Clone, Debug, PartialEq)]
pub struct SaReport {
    pub success_rate: f64,
    pub trials: usize,
    pub successes: usize,
    /// Distinct failed finals (canonical up to global flip), lowest energy first.
    pub distractions: Vec<Distraction>,
    pub per_trial_final: Vec<(SpinConfig, u32)>,
}

impl SaReport {
    /// Reduces per-trial finals, given in trial order.
    pub fn from_finals(inst: &Instance, finals: Vec<(SpinConfig, u32)>, max_distractions: usize) -> Result<SaReport> {
        let ground = GroundTest::for_instance(inst)?;
        let trials = finals.len();
        let successes = finals.iter().filter(|(s, e)| ground.is_ground(s, *e)).count();
        let mut distractions: Vec<Distraction> = finals
            .iter()
            .filter(|(s, e)| !ground.is_ground(s, *e))
            .map(|(s, e)| Distraction { config: s.canonical(), energy: *e })
            .collect();
        distractions.sort_by_key(|d| (d.energy, d.config.bits()));
        distractions.dedup_by_key(|d| d.config);
        distractions.truncate(max_distractions);
        let success_rate = if trials == 0 { 0.0 } else { successes as f64 / trials as f64 };
        Ok(SaReport { success_rate, trials, successes, distractions, per_trial_final: finals })
    }

    pub fn difficulty(&self) -> Difficulty {
        Difficulty::from_rate(self.success_rate)
    }

    pub fn distraction_configs(&self) -> Vec<SpinConfig> {
        self.distractions.iter().map(|d| d.config).collect()
    }
}

enum GroundTest {
    Planted(SpinConfig),
    Energy(u32),
}

impl GroundTest {
    fn for_instance(inst: &Instance) -> Result<Self> {
        match inst.planted() {
            Some(p) => Ok(GroundTest::Planted(p)),
            None => Ok(GroundTest::Energy(ground_state_set(inst)?.energy)),
        }
    }

    fn is_ground(&self, s: &SpinConfig, e: u32) -> bool {
        match self {
            GroundTest::Planted(p) => s.same_up_to_flip(p),
            GroundTest::Energy(min) => e == *min,
        }
    }
}

/// Runs `trials` seeded annealing runs and summarizes them.
pub fn sa_assess(
    inst: &Instance,
    sched: &SaSchedule,
    trials: usize,
    seed: u64,
    max_distractions: usize,
) -> Result<SaReport> {
    let annealer = Annealer::new(inst, *sched)?;
    // fail early when the ground state cannot be established
    GroundTest::for_instance(inst)?;
    let finals = (0..trials).map(|t| annealer.run(&mut crate::seed::rng(trial_seed(seed, t)))).collect();
    SaReport::from_finals(inst, finals, max_distractions)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Difficulty {
    Simple,
    Intermediate,
    Hard,
}

impl Difficulty {
    pub fn from_rate(r: f64) -> Self {
        if r > SIMPLE_RATE {
            Difficulty::Simple
        } else if r < HARD_RATE {
            Difficulty::Hard
        } else {
            Difficulty::Intermediate
        }
    }
}

pub fn classify_difficulty(inst: &Instance, sched: &SaSchedule, trials: usize, seed: u64) -> Result<Difficulty> {
    Ok(sa_assess(inst, sched, trials, seed, 0)?.difficulty())
}
