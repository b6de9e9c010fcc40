//! Planted instance generation.
//!
//! Clauses consistent with the planted state are accumulated until the
//! planted state and its global flip are the only zero-energy
//! configurations. Uniqueness is tracked exactly with a shrinking bitset of
//! still-satisfying configurations, so generation stops at the first clause
//! that makes the ground pair unique.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::anneal::{sa_assess, Difficulty, SaReport, SaSchedule, MAX_DISTRACTIONS};
use crate::enumerate::ConfigSet;
use crate::greedy::greedy_local_analysis;
use crate::instance::{Clause, Instance, Label};
use crate::seed::{SeedPath, TrialRng};
use crate::spin::{mask, SpinConfig};
use crate::{Error, Result, MAX_ENUM_SPINS};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GenerationMode {
    /// Uniformly random planted-consistent triples.
    Sporadic,
    /// Most clauses piled onto a few pairs that are aligned in the planted state.
    Concentrated,
}

impl GenerationMode {
    pub fn name(&self) -> &'static str {
        match self {
            GenerationMode::Sporadic => "sporadic",
            GenerationMode::Concentrated => "concentrated",
        }
    }
}

/// Tunables for concentrated generation.
///
/// A set of decoy states, each the planted state with a random half of its
/// spins flipped, shapes the clause stream. Pool pairs are aligned in the
/// planted state but anti-aligned in the first decoy, so every pool clause is
/// satisfied near that decoy no matter what its third spin does. Random fill
/// clauses that any decoy violates are only kept with a small probability,
/// which leaves the decoys as low-lying excited states.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConcentratedParams {
    pub pool_pairs: usize,
    /// Probability that the next clause is drawn on a pool pair.
    pub pool_fraction: f64,
    /// Probability of keeping a fill clause that violates some decoy.
    pub decoy_violation_accept: f64,
    pub decoys: usize,
}

impl ConcentratedParams {
    pub fn for_size(n: usize) -> Self {
        ConcentratedParams { pool_pairs: (n / 2).max(3), pool_fraction: 0.9, decoy_violation_accept: 0.1, decoys: 10 }
    }
}

pub fn default_max_clauses(n: usize) -> usize {
    20 * n
}

/// A random planted state with spin 0 up and at least two spins on each side.
///
/// With a single minority spin every satisfied clause must contain it, so
/// flipping any other spin stays satisfying and no unique ground pair exists.
pub fn random_planted(n: usize, seed: u64) -> Result<SpinConfig> {
    if !(4..=SpinConfig::MAX_SPINS).contains(&n) {
        return Err(Error::InvalidSpinCount { n, max: SpinConfig::MAX_SPINS });
    }
    let mut rng = SeedPath::new(seed).label("planted").rng();
    loop {
        let bits = rng.random::<u64>() & mask(n) & !1;
        let down = bits.count_ones() as usize;
        if down >= 2 && n - down >= 2 {
            return SpinConfig::new(n, bits);
        }
    }
}

pub fn generate_planted(
    n: usize,
    planted: SpinConfig,
    mode: GenerationMode,
    seed: u64,
    max_clauses: Option<usize>,
) -> Result<Instance> {
    generate_with(n, planted, mode, ConcentratedParams::for_size(n), seed, max_clauses)
}

pub fn generate_with(
    n: usize,
    planted: SpinConfig,
    mode: GenerationMode,
    params: ConcentratedParams,
    seed: u64,
    max_clauses: Option<usize>,
) -> Result<Instance> {
    if !(4..=MAX_ENUM_SPINS).contains(&n) {
        return Err(Error::InvalidSpinCount { n, max: MAX_ENUM_SPINS });
    }
    if planted.n() != n {
        return Err(Error::DimensionMismatch { expected: n, found: planted.n() });
    }
    if planted.bits() == 0 || planted.global_flip().bits() == 0 {
        return Err(Error::InvalidParameter("an all-equal planted state violates every clause"));
    }
    let max_clauses = max_clauses.unwrap_or_else(|| default_max_clauses(n));
    let mut rng = SeedPath::new(seed).label("generate").label(mode.name()).rng();
    let mut acc = Accumulator::new(n, planted, max_clauses)?;
    match mode {
        GenerationMode::Sporadic => {
            while !acc.unique() {
                acc.check_budget()?;
                let c = random_triple(n, &mut rng);
                acc.try_push(c);
            }
        }
        GenerationMode::Concentrated => concentrated(&mut acc, params, &mut rng)?,
    }
    Instance::new(n, acc.clauses, Some(planted))
}

fn concentrated(acc: &mut Accumulator, params: ConcentratedParams, rng: &mut TrialRng) -> Result<()> {
    let n = acc.planted.n();
    let planted = acc.planted;
    let decoys: Vec<SpinConfig> = (0..params.decoys.max(1)).map(|_| pick_decoy(planted, rng)).collect();
    let pool = pick_pool(planted, decoys[0], params.pool_pairs.max(1), rng);
    let opposite_of = |a: usize| -> Vec<usize> { (0..n).filter(|&x| planted.spin(x) != planted.spin(a)).collect() };
    // the leading pool pair always carries at least three clauses
    let &(a, b) = pool
        .iter()
        .find(|&&(a, _)| opposite_of(a).len() >= 3)
        .ok_or(Error::InvalidParameter("concentrated mode needs a pool pair with three opposite spins"))?;
    let mut opposite = opposite_of(a);
    opposite.shuffle(rng);
    for &x in &opposite[..3] {
        acc.try_push(Clause::new(a, b, x)?);
    }

    while !acc.unique() {
        acc.check_budget()?;
        let c = if rng.random::<f64>() < params.pool_fraction {
            let (a, b) = pool[rng.random_range(0..pool.len())];
            match Clause::new(a, b, rng.random_range(0..n)) {
                Ok(c) => c,
                Err(_) => continue,
            }
        } else {
            let c = random_triple(n, rng);
            if decoys.iter().any(|d| c.violated_by_bits(d.bits()))
                && rng.random::<f64>() >= params.decoy_violation_accept
            {
                continue;
            }
            c
        };
        acc.try_push(c);
    }
    Ok(())
}

fn random_triple(n: usize, rng: &mut TrialRng) -> Clause {
    loop {
        let (a, b, c) = (rng.random_range(0..n), rng.random_range(0..n), rng.random_range(0..n));
        if let Ok(cl) = Clause::new(a, b, c) {
            return cl;
        }
    }
}

/// The planted state with a random half of its spins flipped.
fn pick_decoy(planted: SpinConfig, rng: &mut TrialRng) -> SpinConfig {
    let n = planted.n();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    order[..n / 2].iter().fold(planted, |d, &b| d.flip_spin(b))
}

/// Up to `count` pairs aligned in `planted` and anti-aligned in `decoy`.
///
/// The first pair always has at least three spins of the opposite sign when
/// any aligned pair does, falling back to one the decoy does not split.
fn pick_pool(planted: SpinConfig, decoy: SpinConfig, count: usize, rng: &mut TrialRng) -> Vec<(usize, usize)> {
    let n = planted.n();
    let opposite = |a: usize| (0..n).filter(|&x| planted.spin(x) != planted.spin(a)).count();
    let mut candidates = Vec::new();
    let mut fallback = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if planted.spin(a) == planted.spin(b) {
                if decoy.spin(a) != decoy.spin(b) {
                    candidates.push((a, b));
                } else if opposite(a) >= 3 {
                    fallback.push((a, b));
                }
            }
        }
    }
    candidates.shuffle(rng);
    if let Some(pos) = candidates.iter().position(|&(a, _)| opposite(a) >= 3) {
        candidates.swap(0, pos);
    } else if !fallback.is_empty() {
        let lead = fallback[rng.random_range(0..fallback.len())];
        candidates.insert(0, lead);
    }
    candidates.truncate(count);
    candidates
}

struct Accumulator {
    planted: SpinConfig,
    alive: ConfigSet,
    clauses: Vec<Clause>,
    seen: BTreeSet<Clause>,
    max_clauses: usize,
    rejections: usize,
}

impl Accumulator {
    fn new(n: usize, planted: SpinConfig, max_clauses: usize) -> Result<Self> {
        Ok(Accumulator {
            planted,
            alive: ConfigSet::full(n)?,
            clauses: Vec::new(),
            seen: BTreeSet::new(),
            max_clauses,
            rejections: 0,
        })
    }

    fn unique(&self) -> bool {
        self.alive.len() == 2
    }

    fn check_budget(&self) -> Result<()> {
        // rejections bound the loop once every consistent triple is used
        if self.clauses.len() >= self.max_clauses || self.rejections > 200_000 {
            return Err(Error::GenerationFailed { n: self.planted.n(), clauses: self.clauses.len() });
        }
        Ok(())
    }

    fn try_push(&mut self, c: Clause) -> bool {
        if c.violated_by_bits(self.planted.bits()) || !self.seen.insert(c) {
            self.rejections += 1;
            return false;
        }
        self.clauses.push(c);
        self.alive.remove_violating(&c);
        true
    }
}

/// Annealing protocol used to accept generated instances.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DifficultyFilter {
    pub schedule: SaSchedule,
    pub trials: usize,
    pub max_attempts: usize,
}

impl Default for DifficultyFilter {
    fn default() -> Self {
        DifficultyFilter { schedule: SaSchedule::default(), trials: 1000, max_attempts: 50 }
    }
}

/// An instance that passed the filter, with its assessment.
#[derive(Clone, Debug)]
pub struct Accepted {
    pub instance: Instance,
    pub report: SaReport,
    pub attempts: usize,
}

/// Regenerates with fresh derived seeds until the instance is simple
/// (`R > 0.95`) or hard (`R < 0.10` and the greedy analysis lands more than
/// one spin away from the planted pair).
pub fn generate_filtered(
    n: usize,
    planted: SpinConfig,
    target: Label,
    filter: &DifficultyFilter,
    seed: u64,
) -> Result<Accepted> {
    let mode = match target {
        Label::Simple => GenerationMode::Sporadic,
        Label::Hard => GenerationMode::Concentrated,
        Label::Unclassified => return Err(Error::InvalidParameter("filter target must be simple or hard")),
    };
    for attempt in 0..filter.max_attempts {
        let s = SeedPath::new(seed).label("filtered").label(mode.name()).index(attempt as u64).seed();
        let inst = match generate_planted(n, planted, mode, s, None) {
            Ok(inst) => inst,
            Err(Error::GenerationFailed { .. }) => continue,
            Err(e) => return Err(e),
        };
        if target == Label::Hard && greedy_local_analysis(&inst).config.hamming_mod_flip(&planted) <= 1 {
            continue;
        }
        let report = sa_assess(&inst, &filter.schedule, filter.trials, s, MAX_DISTRACTIONS)?;
        let ok = match target {
            Label::Simple => report.difficulty() == Difficulty::Simple,
            _ => report.difficulty() == Difficulty::Hard,
        };
        if ok {
            return Ok(Accepted { instance: inst.with_label(target), report, attempts: attempt + 1 });
        }
    }
    Err(Error::FilterExhausted { attempts: filter.max_attempts })
}

/// A simple and a hard instance sharing one planted ground pair.
pub fn generate_paired(
    n: usize,
    planted: SpinConfig,
    filter: &DifficultyFilter,
    seed: u64,
) -> Result<(Accepted, Accepted)> {
    let easy = generate_filtered(n, planted, Label::Simple, filter, SeedPath::new(seed).label("easy").seed())?;
    let hard = generate_filtered(n, planted, Label::Hard, filter, SeedPath::new(seed).label("hard").seed())?;
    Ok((easy, hard))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::ground_state_set;

    fn cfg(s: &[i8]) -> SpinConfig {
        SpinConfig::from_spins(s).unwrap()
    }

    #[test]
    fn four_spin_balanced_plant_cannot_be_unique() {
        // every 2-up/2-down state satisfies all four triples, so three ground pairs remain
        let planted = cfg(&[1, 1, -1, -1]);
        let err = generate_planted(4, planted, GenerationMode::Sporadic, 0, None).unwrap_err();
        assert!(matches!(err, Error::GenerationFailed { n: 4, clauses: 4 }));
    }

    #[test]
    fn small_sporadic_is_unique_by_enumeration() {
        let planted = cfg(&[1, 1, -1, -1, 1, -1]);
        for seed in 0..20 {
            let inst = generate_planted(6, planted, GenerationMode::Sporadic, seed, None).unwrap();
            let zeros: Vec<u64> = (0..64u64).filter(|&b| inst.energy_bits(b) == 0).collect();
            let mut expect = [planted.bits(), planted.global_flip().bits()];
            expect.sort();
            assert_eq!(zeros, expect);
        }
    }

    #[test]
    fn concentrated_has_heavy_aligned_pair() {
        for seed in 0..10 {
            let planted = random_planted(8, seed).unwrap();
            if !(3..=5).contains(&planted.bits().count_ones()) {
                continue;
            }
            let inst = match generate_planted(8, planted, GenerationMode::Concentrated, seed, None) {
                Ok(i) => i,
                Err(Error::GenerationFailed { .. }) => continue,
                Err(e) => panic!("{e}"),
            };
            let j = inst.coupling_matrix();
            let heavy_aligned = j.ranked_pairs().iter().any(|&(a, b, w)| w >= 3 && planted.spin(a) == planted.spin(b));
            assert!(heavy_aligned, "seed {seed}");
            assert!(ground_state_set(&inst).unwrap().is_unique_pair());
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let planted = random_planted(16, 4).unwrap();
        for mode in [GenerationMode::Sporadic, GenerationMode::Concentrated] {
            let a = generate_planted(16, planted, mode, 77, None).unwrap();
            let b = generate_planted(16, planted, mode, 77, None).unwrap();
            assert_eq!(a, b);
            let c = generate_planted(16, planted, mode, 78, None).unwrap();
            assert_ne!(a, c);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(generate_planted(4, SpinConfig::new(4, 0).unwrap(), GenerationMode::Sporadic, 0, None).is_err());
        assert!(generate_planted(5, cfg(&[1, -1, 1, 1]), GenerationMode::Sporadic, 0, None).is_err());
        assert!(generate_planted(3, cfg(&[1, -1, 1]), GenerationMode::Sporadic, 0, None).is_err());
        let planted = random_planted(12, 0).unwrap();
        assert!(matches!(
            generate_planted(12, planted, GenerationMode::Sporadic, 0, Some(3)),
            Err(Error::GenerationFailed { .. })
        ));
    }

    #[test]
    fn random_planted_is_canonical() {
        for seed in 0..50 {
            let p = random_planted(10, seed).unwrap();
            assert_eq!(p.bits() & 1, 0);
            let down = p.bits().count_ones();
            assert!(down >= 2 && 10 - down >= 2);
        }
    }
}
