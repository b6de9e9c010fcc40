//! Exhaustive enumeration over all `2^n` configurations.

use alloc::vec;
use alloc::vec::Vec;

use crate::instance::{Clause, Instance};
use crate::spin::SpinConfig;
use crate::{Error, Result, MAX_ENUM_SPINS};

/// Bit patterns of spins 0..6 across the 64 positions of one word.
const LOW_SPIN_PATTERNS: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

/// A set of configurations of `n` spins held as a bitset over basis indices.
#[derive(Clone, Debug)]
pub struct ConfigSet {
    n: usize,
    words: Vec<u64>,
    len: u64,
}

impl ConfigSet {
    /// Every configuration of `n` spins.
    pub fn full(n: usize) -> Result<Self> {
        check_enumerable(n)?;
        let total = 1u64 << n;
        let nwords = total.div_ceil(64) as usize;
        let mut words = vec![u64::MAX; nwords];
        if n < 6 {
            words[0] = (1u64 << total) - 1;
        }
        Ok(ConfigSet { n, words, len: total })
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn contains(&self, s: &SpinConfig) -> bool {
        let b = s.index();
        s.n() == self.n && (self.words[b / 64] >> (b % 64)) & 1 == 1
    }

    /// Removes every configuration that violates `clause`; returns how many were removed.
    pub fn remove_violating(&mut self, clause: &Clause) -> u64 {
        let [i, j, k] = clause.indices();
        let before = self.len;
        let mut len = 0u64;
        for (w, word) in self.words.iter_mut().enumerate() {
            if *word == 0 {
                continue;
            }
            let (pi, pj, pk) = (pattern(i, w), pattern(j, w), pattern(k, w));
            let violated = (pi & pj & pk) | (!pi & !pj & !pk);
            *word &= !violated;
            len += word.count_ones() as u64;
        }
        self.len = len;
        before - len
    }

    /// Number of members that `clause` would remove, without removing them.
    pub fn count_violating(&self, clause: &Clause) -> u64 {
        let [i, j, k] = clause.indices();
        self.words
            .iter()
            .enumerate()
            .filter(|(_, w)| **w != 0)
            .map(|(w, word)| {
                let (pi, pj, pk) = (pattern(i, w), pattern(j, w), pattern(k, w));
                (word & ((pi & pj & pk) | (!pi & !pj & !pk))).count_ones() as u64
            })
            .sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = SpinConfig> + '_ {
        let n = self.n;
        self.words.iter().enumerate().flat_map(move |(w, &word)| {
            let mut rest = word;
            core::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let bit = rest.trailing_zeros() as u64;
                rest &= rest - 1;
                Some(SpinConfig::from_raw(n, (w as u64) * 64 + bit))
            })
        })
    }
}

#[inline]
fn pattern(spin: usize, word: usize) -> u64 {
    if spin < 6 {
        LOW_SPIN_PATTERNS[spin]
    } else if (word >> (spin - 6)) & 1 == 1 {
        u64::MAX
    } else {
        0
    }
}

fn check_enumerable(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidSpinCount { n, max: MAX_ENUM_SPINS });
    }
    if n > MAX_ENUM_SPINS {
        return Err(Error::TooLargeToEnumerate { n, max: MAX_ENUM_SPINS });
    }
    Ok(())
}

/// Configurations satisfying every clause.
pub fn satisfying_set(inst: &Instance) -> Result<ConfigSet> {
    let mut set = ConfigSet::full(inst.n())?;
    for c in inst.clauses() {
        if set.is_empty() {
            break;
        }
        set.remove_violating(c);
    }
    Ok(set)
}

/// Exact minimum energy and every configuration attaining it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundStates {
    pub energy: u32,
    pub configs: Vec<SpinConfig>,
}

impl GroundStates {
    /// True when the minimizers are exactly one configuration and its global flip.
    pub fn is_unique_pair(&self) -> bool {
        self.configs.len() == 2 && self.configs[0].same_up_to_flip(&self.configs[1])
    }
}

pub fn ground_state_set(inst: &Instance) -> Result<GroundStates> {
    let sat = satisfying_set(inst)?;
    if !sat.is_empty() {
        return Ok(GroundStates { energy: 0, configs: sat.iter().collect() });
    }
    let n = inst.n();
    let mut best = u32::MAX;
    let mut configs = Vec::new();
    for bits in 0..(1u64 << n) {
        let e = inst.energy_bits(bits);
        if e < best {
            best = e;
            configs.clear();
        }
        if e == best {
            configs.push(SpinConfig::from_raw(n, bits));
        }
    }
    Ok(GroundStates { energy: best, configs })
}

/// Integer energy of every basis index, weight 1 per clause.
pub fn energy_table(inst: &Instance) -> Result<Vec<u32>> {
    check_enumerable(inst.n())?;
    let size = 1usize << inst.n();
    let mut table = vec![0u32; size];
    for c in inst.clauses() {
        add_clause(&mut table, c, 4);
    }
    Ok(table)
}

/// Adds `penalty` to every entry whose index violates `clause`.
pub(crate) fn add_clause<T: Copy + core::ops::AddAssign>(table: &mut [T], clause: &Clause, penalty: T) {
    let m = clause_bits(clause);
    // only the two violating sub-lattices: all three bits clear or all set
    let free_mask = !m & (table.len() as u64 - 1);
    let mut sub = 0u64;
    loop {
        table[sub as usize] += penalty;
        table[(sub | m) as usize] += penalty;
        sub = (sub.wrapping_sub(free_mask)) & free_mask;
        if sub == 0 {
            break;
        }
    }
}

#[inline]
fn clause_bits(c: &Clause) -> u64 {
    let [i, j, k] = c.indices();
    (1 << i) | (1 << j) | (1 << k)
}
