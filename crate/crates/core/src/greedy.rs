//! Step-by-step local analysis: anti-align the most frequently co-occurring
//! spin pairs first, then the next, and so on.
//!
//! Ties in pair weight are broken lexicographically. A fresh cluster puts its
//! lower-indexed spin up. When a pair joins two clusters, the cluster holding
//! the lower spin index keeps its orientation and the other one is flipped if
//! needed to anti-align the pair. Here "holding the lower spin index" means
//! the cluster whose smallest member is smaller, so spin 0 (when constrained)
//! always ends up `+1`.

use alloc::vec;
use alloc::vec::Vec;

use crate::instance::Instance;
use crate::spin::SpinConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepAction {
    /// Both spins were free; started a new cluster.
    Seeded,
    /// One spin was free and was set opposite to the other.
    Extended,
    /// Two clusters were joined; `flipped` tells whether the second was reoriented.
    Merged { flipped: bool },
    /// Both spins already in one cluster; `consistent` tells whether they are anti-aligned.
    Checked { consistent: bool },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GreedyStep {
    pub pair: (usize, usize),
    pub weight: u32,
    pub action: StepAction,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GreedyResult {
    pub config: SpinConfig,
    pub steps: Vec<GreedyStep>,
    /// Spins that appeared in no clause, set last one at a time.
    pub free_spins: Vec<usize>,
}

impl GreedyResult {
    /// Number of processed pairs found aligned inside an existing cluster.
    pub fn conflicts(&self) -> usize {
        self.steps.iter().filter(|s| s.action == StepAction::Checked { consistent: false }).count()
    }
}

pub fn greedy_local_analysis(inst: &Instance) -> GreedyResult {
    let n = inst.n();
    let j = inst.coupling_matrix();
    // spin -> (cluster, value)
    let mut cluster: Vec<Option<usize>> = vec![None; n];
    let mut value = vec![1i8; n];
    let mut members: Vec<Vec<usize>> = Vec::new();
    let mut steps = Vec::new();

    for (a, b, w) in j.ranked_pairs() {
        let action = match (cluster[a], cluster[b]) {
            (None, None) => {
                let id = members.len();
                members.push(vec![a, b]);
                cluster[a] = Some(id);
                cluster[b] = Some(id);
                value[a] = 1;
                value[b] = -1;
                StepAction::Seeded
            }
            (Some(ca), None) => {
                cluster[b] = Some(ca);
                value[b] = -value[a];
                members[ca].push(b);
                StepAction::Extended
            }
            (None, Some(cb)) => {
                cluster[a] = Some(cb);
                value[a] = -value[b];
                members[cb].push(a);
                StepAction::Extended
            }
            (Some(ca), Some(cb)) if ca == cb => StepAction::Checked { consistent: value[a] != value[b] },
            (Some(ca), Some(cb)) => {
                let low = |c: usize| members[c].iter().copied().min().unwrap_or(usize::MAX);
                let (keep, gone) = if low(ca) < low(cb) { (ca, cb) } else { (cb, ca) };
                let flipped = value[a] == value[b];
                let moved = core::mem::take(&mut members[gone]);
                for &m in &moved {
                    if flipped {
                        value[m] = -value[m];
                    }
                    cluster[m] = Some(keep);
                }
                members[keep].extend(moved);
                StepAction::Merged { flipped }
            }
        };
        steps.push(GreedyStep { pair: (a, b), weight: w, action });
    }

    let mut bits = 0u64;
    for (b, &v) in value.iter().enumerate() {
        if cluster[b].is_some() && v < 0 {
            bits |= 1 << b;
        }
    }
    let mut free_spins = Vec::new();
    for b in 0..n {
        if cluster[b].is_none() {
            // spin is in no clause; pick the lower energy side, up on ties
            let up = inst.energy_bits(bits);
            let down = inst.energy_bits(bits | (1 << b));
            if down < up {
                bits |= 1 << b;
            }
            free_spins.push(b);
        }
    }
    GreedyResult { config: SpinConfig::from_raw(n, bits), steps, free_spins }
}
