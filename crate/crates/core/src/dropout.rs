//! Quantum dropout: which clauses may leave the driving Hamiltonians, the
//! per-layer clause weights, and the diagonal energy tables built from them.
//!
//! Cost functions always use the full clause set; only driving layers see
//! a plan's weights.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::enumerate::add_clause;
use crate::instance::{Instance, CLAUSE_PENALTY};
use crate::seed::SeedPath;
use crate::spin::SpinConfig;
use crate::{Error, Result, MAX_STATE_QUBITS};

/// Diagonal of a (weighted) clause Hamiltonian over all basis indices.
#[derive(Clone, Debug, PartialEq)]
pub struct EnergyTable {
    n: usize,
    energies: Vec<f64>,
    full: bool,
    levels: Option<Levels>,
}

/// Distinct energies and a per-index level lookup, when there are few of them.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Levels {
    pub(crate) values: Vec<f64>,
    pub(crate) index: Vec<u16>,
}

const MAX_LEVELS: usize = 1 << 12;

impl EnergyTable {
    /// Table of the full instance, every clause at weight 1.
    pub fn full(inst: &Instance) -> Result<Self> {
        let weights = vec![1.0; inst.clauses().len()];
        build_energy_table(inst, &weights)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    #[inline]
    pub fn energy(&self, index: usize) -> f64 {
        self.energies[index]
    }

    /// True when built from every clause at weight 1, i.e. usable as a cost function.
    pub fn is_full(&self) -> bool {
        self.full
    }

    pub fn min(&self) -> f64 {
        self.energies.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.energies.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub(crate) fn levels(&self) -> Option<&Levels> {
        self.levels.as_ref()
    }
}

/// `energies[b] = Σ_c weights[c] · clause_energy(c, b)`.
pub fn build_energy_table(inst: &Instance, weights: &[f64]) -> Result<EnergyTable> {
    let n = inst.n();
    if n > MAX_STATE_QUBITS {
        return Err(Error::TooLargeToEnumerate { n, max: MAX_STATE_QUBITS });
    }
    if weights.len() != inst.clauses().len() {
        return Err(Error::DimensionMismatch { expected: inst.clauses().len(), found: weights.len() });
    }
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(Error::InvalidParameter("clause weights must be finite and nonnegative"));
    }
    let mut energies = vec![0.0f64; 1 << n];
    for (c, &w) in inst.clauses().iter().zip(weights) {
        if w != 0.0 {
            add_clause(&mut energies, c, w * CLAUSE_PENALTY as f64);
        }
    }
    let full = weights.iter().all(|&w| w == 1.0);
    let levels = levels_of(&energies);
    Ok(EnergyTable { n, energies, full, levels })
}

fn levels_of(energies: &[f64]) -> Option<Levels> {
    let mut values: Vec<f64> = Vec::new();
    // cheap bail-out: soft weights give nearly one level per index
    for &e in energies.iter().take(4 * MAX_LEVELS) {
        if let Err(pos) = values.binary_search_by(|v| v.total_cmp(&e)) {
            values.insert(pos, e);
            if values.len() > MAX_LEVELS {
                return None;
            }
        }
    }
    let mut index = Vec::with_capacity(energies.len());
    for &e in energies {
        let pos = match values.binary_search_by(|v| v.total_cmp(&e)) {
            Ok(p) => p,
            Err(p) => {
                values.insert(p, e);
                if values.len() > MAX_LEVELS {
                    return None;
                }
                // earlier indices shift; rebuild below
                return levels_of_slow(energies);
            }
        };
        index.push(pos as u16);
    }
    Some(Levels { values, index })
}

fn levels_of_slow(energies: &[f64]) -> Option<Levels> {
    let mut values: Vec<f64> = energies.to_vec();
    values.sort_by(|a, b| a.total_cmp(b));
    values.dedup();
    if values.len() > MAX_LEVELS {
        return None;
    }
    let index = energies.iter().map(|e| values.binary_search_by(|v| v.total_cmp(e)).unwrap_or(0) as u16).collect();
    Some(Levels { values, index })
}

/// Clauses satisfied by every distraction. The rest stay in every driving layer.
pub fn eligible_clauses(inst: &Instance, distractions: &[SpinConfig]) -> Vec<usize> {
    inst.clauses()
        .iter()
        .enumerate()
        .filter(|(_, c)| distractions.iter().all(|d| !c.violated_by_bits(d.bits())))
        .map(|(i, _)| i)
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    /// Regular QAOA: every clause in every layer.
    None,
    /// One random subset of eligible clauses shared by all layers.
    Uniform,
    /// An independent random subset per layer.
    PerLayer,
    /// Per-layer weights in `[0, 1]` for eligible clauses.
    Soft,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::None, Scheme::Uniform, Scheme::PerLayer, Scheme::Soft];

    pub fn name(&self) -> &'static str {
        match self {
            Scheme::None => "none",
            Scheme::Uniform => "uniform",
            Scheme::PerLayer => "per_layer",
            Scheme::Soft => "soft",
        }
    }

    pub fn from_name(s: &str) -> Option<Scheme> {
        Scheme::ALL.into_iter().find(|x| x.name() == s)
    }

    pub fn is_binary(&self) -> bool {
        !matches!(self, Scheme::Soft)
    }
}

/// Per-layer clause weights defining the driving Hamiltonians.
#[derive(Clone, Debug, PartialEq)]
pub struct DropoutPlan {
    pub scheme: Scheme,
    pub p: usize,
    pub keep_fraction: f64,
    pub eligible: Vec<usize>,
    pub layer_weights: Vec<Vec<f64>>,
}

/// Eligible clauses kept per layer: `round_half_up(fraction · |eligible|)`, at least one.
pub fn retained_count(eligible: usize, keep_fraction: f64) -> usize {
    if eligible == 0 {
        return 0;
    }
    let k = libm::floor(keep_fraction * eligible as f64 + 0.5) as usize;
    k.clamp(1, eligible)
}

pub fn make_plan(
    inst: &Instance,
    eligible: &[usize],
    scheme: Scheme,
    keep_fraction: f64,
    p: usize,
    seed: u64,
) -> Result<DropoutPlan> {
    if p == 0 {
        return Err(Error::InvalidParameter("circuit depth must be at least 1"));
    }
    if !(keep_fraction > 0.0 && keep_fraction <= 1.0) {
        return Err(Error::InvalidParameter("keep_fraction must be in (0, 1]"));
    }
    let m = inst.clauses().len();
    let mut eligible = eligible.to_vec();
    eligible.sort_unstable();
    eligible.dedup();
    if let Some(&bad) = eligible.iter().find(|&&i| i >= m) {
        return Err(Error::IndexOutOfRange { index: bad, n: m });
    }
    let dropping = match scheme {
        Scheme::None => false,
        Scheme::Soft => true,
        Scheme::Uniform | Scheme::PerLayer => keep_fraction < 1.0,
    };
    if dropping && eligible.is_empty() {
        return Err(Error::EmptyEligible);
    }

    let mut rng = SeedPath::new(seed).label("dropout").label(scheme.name()).rng();
    let k = retained_count(eligible.len(), keep_fraction);
    let ones = vec![1.0; m];
    let subset = |rng: &mut crate::seed::TrialRng| {
        let mut w = ones.clone();
        let mut order = eligible.clone();
        order.shuffle(rng);
        for &i in &order[k..] {
            w[i] = 0.0;
        }
        w
    };
    let layer_weights = match scheme {
        Scheme::None => vec![ones.clone(); p],
        Scheme::Uniform => vec![subset(&mut rng); p],
        Scheme::PerLayer => (0..p).map(|_| subset(&mut rng)).collect(),
        Scheme::Soft => (0..p)
            .map(|_| {
                let mut w = ones.clone();
                for &i in &eligible {
                    w[i] = rng.random::<f64>();
                }
                w
            })
            .collect(),
    };
    Ok(DropoutPlan { scheme, p, keep_fraction, eligible, layer_weights })
}

impl DropoutPlan {
    /// Regular QAOA over `m` clauses.
    pub fn none(m: usize, p: usize) -> Self {
        DropoutPlan {
            scheme: Scheme::None,
            p,
            keep_fraction: 1.0,
            eligible: Vec::new(),
            layer_weights: vec![vec![1.0; m]; p],
        }
    }

    /// Checks the structural invariants against an instance.
    pub fn validate(&self, inst: &Instance) -> Result<()> {
        let m = inst.clauses().len();
        if self.layer_weights.len() != self.p || self.p == 0 {
            return Err(Error::InvalidParameter("plan must hold one weight vector per layer"));
        }
        for w in &self.layer_weights {
            if w.len() != m {
                return Err(Error::DimensionMismatch { expected: m, found: w.len() });
            }
            if w.iter().any(|x| !(0.0..=1.0).contains(x)) {
                return Err(Error::InvalidParameter("plan weights must lie in [0, 1]"));
            }
            for (i, &x) in w.iter().enumerate() {
                if x != 1.0 && self.eligible.binary_search(&i).is_err() {
                    return Err(Error::InvalidParameter("protected clause not at full weight"));
                }
            }
        }
        Ok(())
    }

    /// One energy table per layer; identical weight vectors share a table.
    pub fn tables(&self, inst: &Instance) -> Result<Vec<Arc<EnergyTable>>> {
        let mut cache = TableCache::default();
        self.layer_weights.iter().map(|w| cache.get(inst, w)).collect()
    }
}

/// Energy tables keyed by the exact bit pattern of their weight vector.
#[derive(Default)]
pub struct TableCache {
    tables: BTreeMap<Vec<u64>, Arc<EnergyTable>>,
}

impl TableCache {
    pub fn get(&mut self, inst: &Instance, weights: &[f64]) -> Result<Arc<EnergyTable>> {
        let key: Vec<u64> = weights.iter().map(|w| w.to_bits()).collect();
        if let Some(t) = self.tables.get(&key) {
            return Ok(t.clone());
        }
        let t = Arc::new(build_energy_table(inst, weights)?);
        self.tables.insert(key, t.clone());
        Ok(t)
    }

    pub fn len(&self) -> usize {
        self.tables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tables.is_empty()
    }
}
