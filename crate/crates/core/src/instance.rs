use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::spin::SpinConfig;
use crate::{Error, Result};

/// Energy contributed by one violated clause.
pub const CLAUSE_PENALTY: u32 = 4;

/// A not-all-equal constraint on three distinct spins, stored sorted.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Clause {
    idx: [u8; 3],
}

impl Clause {
    /// Builds a clause from any ordering of three distinct indices.
    pub fn new(a: usize, b: usize, c: usize) -> Result<Self> {
        let mut idx = [a, b, c];
        idx.sort_unstable();
        if idx[0] == idx[1] || idx[1] == idx[2] {
            return Err(Error::DegenerateClause([a, b, c]));
        }
        if idx[2] >= SpinConfig::MAX_SPINS {
            return Err(Error::IndexOutOfRange { index: idx[2], n: SpinConfig::MAX_SPINS });
        }
        Ok(Clause { idx: [idx[0] as u8, idx[1] as u8, idx[2] as u8] })
    }

    #[inline]
    pub fn indices(&self) -> [usize; 3] {
        [self.idx[0] as usize, self.idx[1] as usize, self.idx[2] as usize]
    }

    /// Largest index, which must stay below the spin count.
    #[inline]
    pub fn max_index(&self) -> usize {
        self.idx[2] as usize
    }

    #[inline]
    pub fn contains(&self, b: usize) -> bool {
        self.idx.iter().any(|&i| i as usize == b)
    }

    /// The three unordered pairs `(a, b)` with `a < b`.
    pub fn pairs(&self) -> [(usize, usize); 3] {
        let [i, j, k] = self.indices();
        [(i, j), (i, k), (j, k)]
    }

    #[inline]
    pub(crate) fn bit_mask(&self) -> u64 {
        (1u64 << self.idx[0]) | (1u64 << self.idx[1]) | (1u64 << self.idx[2])
    }

    /// True when the three spins of `bits` are all equal.
    #[inline]
    pub fn violated_by_bits(&self, bits: u64) -> bool {
        let m = self.bit_mask();
        let v = bits & m;
        v == 0 || v == m
    }

    /// `[(s_i + s_j + s_k)^2 - 1] / 2`, which is 0 or 4.
    pub fn energy(&self, s: &SpinConfig) -> Result<u32> {
        if self.max_index() >= s.n() {
            return Err(Error::IndexOutOfRange { index: self.max_index(), n: s.n() });
        }
        Ok(self.energy_bits(s.bits()))
    }

    #[inline]
    pub(crate) fn energy_bits(&self, bits: u64) -> u32 {
        if self.violated_by_bits(bits) {
            CLAUSE_PENALTY
        } else {
            0
        }
    }
}

impl fmt::Debug for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}, {}]", self.idx[0], self.idx[1], self.idx[2])
    }
}

/// Difficulty tag attached to an instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Label {
    Simple,
    Hard,
    #[default]
    Unclassified,
}

/// A set of NAE3SAT clauses over `n` spins, optionally with its planted solution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    n: usize,
    clauses: Vec<Clause>,
    planted: Option<SpinConfig>,
    label: Label,
}

impl Instance {
    /// Validates indices against `n` and, if given, that `planted` satisfies every clause.
    pub fn new(n: usize, clauses: Vec<Clause>, planted: Option<SpinConfig>) -> Result<Self> {
        if n < 3 && !clauses.is_empty() || n == 0 || n > SpinConfig::MAX_SPINS {
            return Err(Error::InvalidSpinCount { n, max: SpinConfig::MAX_SPINS });
        }
        if let Some(c) = clauses.iter().find(|c| c.max_index() >= n) {
            return Err(Error::IndexOutOfRange { index: c.max_index(), n });
        }
        if let Some(p) = planted {
            if p.n() != n {
                return Err(Error::DimensionMismatch { expected: n, found: p.n() });
            }
            if let Some(pos) = clauses.iter().position(|c| c.violated_by_bits(p.bits())) {
                return Err(Error::PlantedViolated { clause: pos });
            }
        }
        Ok(Instance { n, clauses, planted, label: Label::Unclassified })
    }

    pub fn with_label(mut self, label: Label) -> Self {
        self.label = label;
        self
    }

    pub fn set_label(&mut self, label: Label) {
        self.label = label;
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    #[inline]
    pub fn planted(&self) -> Option<SpinConfig> {
        self.planted
    }

    #[inline]
    pub fn label(&self) -> Label {
        self.label
    }

    /// Sub-instance keeping the clauses at the given positions, in order.
    pub fn select(&self, keep: &[usize]) -> Result<Instance> {
        let mut clauses = Vec::with_capacity(keep.len());
        for &i in keep {
            let c = self.clauses.get(i).ok_or(Error::IndexOutOfRange { index: i, n: self.clauses.len() })?;
            clauses.push(*c);
        }
        Ok(Instance { n: self.n, clauses, planted: self.planted, label: Label::Unclassified })
    }

    /// Sum of clause energies.
    pub fn energy(&self, s: &SpinConfig) -> Result<u32> {
        if s.n() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: s.n() });
        }
        Ok(self.energy_bits(s.bits()))
    }

    #[inline]
    pub fn energy_bits(&self, bits: u64) -> u32 {
        self.clauses.iter().map(|c| c.energy_bits(bits)).sum()
    }

    /// Number of clauses violated by `bits`.
    #[inline]
    pub fn violations(&self, bits: u64) -> usize {
        self.clauses.iter().filter(|c| c.violated_by_bits(bits)).count()
    }

    pub fn coupling_matrix(&self) -> CouplingMatrix {
        let mut j = CouplingMatrix::zeros(self.n);
        for c in &self.clauses {
            for (a, b) in c.pairs() {
                j.bump(a, b);
            }
        }
        j
    }

    /// For each spin, the positions of the clauses containing it.
    pub fn incidence(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.n];
        for (ci, c) in self.clauses.iter().enumerate() {
            for i in c.indices() {
                inc[i].push(ci);
            }
        }
        inc
    }
}

/// Pair-occurrence counts `J[a][b]`: how many clauses contain both `a` and `b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CouplingMatrix {
    n: usize,
    data: Vec<u32>,
}

impl CouplingMatrix {
    pub fn zeros(n: usize) -> Self {
        CouplingMatrix { n, data: vec![0; n * n] }
    }

    fn bump(&mut self, a: usize, b: usize) {
        self.data[a * self.n + b] += 1;
        self.data[b * self.n + a] += 1;
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize) -> u32 {
        self.data[a * self.n + b]
    }

    pub fn row(&self, a: usize) -> &[u32] {
        &self.data[a * self.n..(a + 1) * self.n]
    }

    /// Sum over `a < b`; three per clause.
    pub fn upper_sum(&self) -> u64 {
        let mut total = 0u64;
        for a in 0..self.n {
            for b in a + 1..self.n {
                total += self.get(a, b) as u64;
            }
        }
        total
    }

    /// `Σ_{a<b} J[a][b] s_a s_b`.
    pub fn pairwise_energy(&self, s: &SpinConfig) -> i64 {
        let mut e = 0i64;
        for a in 0..self.n {
            for b in a + 1..self.n {
                let j = self.get(a, b) as i64;
                if j != 0 {
                    e += j * (s.spin(a) as i64) * (s.spin(b) as i64);
                }
            }
        }
        e
    }

    /// Pairs with nonzero count sorted by descending count, ties in lexicographic order.
    pub fn ranked_pairs(&self) -> Vec<(usize, usize, u32)> {
        let mut pairs = Vec::new();
        for a in 0..self.n {
            for b in a + 1..self.n {
                let j = self.get(a, b);
                if j > 0 {
                    pairs.push((a, b, j));
                }
            }
        }
        pairs.sort_by(|x, y| y.2.cmp(&x.2).then((x.0, x.1).cmp(&(y.0, y.1))));
        pairs
    }
}
