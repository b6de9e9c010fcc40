//! Minimum energy per Hamming shell around a reference state.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;

use crate::dropout::{retained_count, EnergyTable};
use crate::enumerate::energy_table;
use crate::instance::Instance;
use crate::seed::SeedPath;
use crate::spin::SpinConfig;
use crate::{Error, Result, MAX_STATE_QUBITS};

#[derive(Clone, Debug, PartialEq)]
pub struct LandscapeCurve {
    pub n: usize,
    /// `values[d]` is the minimum energy over states at Hamming distance `d`.
    pub values: Vec<f64>,
    /// Number of states in each shell; `binomial(n, d)`.
    pub shell_sizes: Vec<u64>,
}

impl LandscapeCurve {
    /// Count of interior `d` with `values[d]` strictly below both neighbours.
    pub fn ruggedness(&self) -> usize {
        self.values.windows(3).filter(|w| w[1] < w[0] && w[1] < w[2]).count()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Affine rescale onto `[0, 1]`; a constant curve maps to zeros.
    pub fn normalized(&self) -> LandscapeCurve {
        self.normalized_by(self.min(), self.max())
    }

    /// Rescale with an external range, so a family of curves shares one scale.
    pub fn normalized_by(&self, lo: f64, hi: f64) -> LandscapeCurve {
        let span = hi - lo;
        let values = self.values.iter().map(|&v| if span > 0.0 { (v - lo) / span } else { 0.0 }).collect();
        LandscapeCurve { n: self.n, values, shell_sizes: self.shell_sizes.clone() }
    }
}

pub fn min_energy_by_distance<T: Copy + Into<f64>>(energies: &[T], reference: SpinConfig) -> Result<LandscapeCurve> {
    let n = reference.n();
    if n > MAX_STATE_QUBITS {
        return Err(Error::TooLargeToEnumerate { n, max: MAX_STATE_QUBITS });
    }
    if energies.len() != 1 << n {
        return Err(Error::DimensionMismatch { expected: 1 << n, found: energies.len() });
    }
    let mut values = vec![f64::INFINITY; n + 1];
    let mut shell_sizes = vec![0u64; n + 1];
    let r = reference.bits() as usize;
    for (b, &e) in energies.iter().enumerate() {
        let d = (b ^ r).count_ones() as usize;
        let e: f64 = e.into();
        if e < values[d] {
            values[d] = e;
        }
        shell_sizes[d] += 1;
    }
    Ok(LandscapeCurve { n, values, shell_sizes })
}

pub fn instance_landscape(inst: &Instance, reference: SpinConfig) -> Result<LandscapeCurve> {
    if reference.n() != inst.n() {
        return Err(Error::DimensionMismatch { expected: inst.n(), found: reference.n() });
    }
    if inst.n() > MAX_STATE_QUBITS {
        return Err(Error::TooLargeToEnumerate { n: inst.n(), max: MAX_STATE_QUBITS });
    }
    min_energy_by_distance(&energy_table(inst)?, reference)
}

pub fn table_landscape(table: &EnergyTable, reference: SpinConfig) -> Result<LandscapeCurve> {
    min_energy_by_distance(table.energies(), reference)
}

/// Landscapes of sub-instances that keep every protected clause and a
/// growing share of eligible ones.
///
/// One random order of the eligible clauses is drawn per seed; fraction `f`
/// keeps its first `round(f · |eligible|)` entries, so smaller fractions
/// drop a superset of what larger ones drop.
pub fn landscape_under_dropout(
    inst: &Instance,
    reference: SpinConfig,
    retain_fractions: &[f64],
    eligible: &[usize],
    seed: u64,
) -> Result<Vec<(f64, LandscapeCurve)>> {
    let m = inst.clauses().len();
    if let Some(&bad) = eligible.iter().find(|&&i| i >= m) {
        return Err(Error::IndexOutOfRange { index: bad, n: m });
    }
    if retain_fractions.iter().any(|f| !(*f > 0.0 && *f <= 1.0)) {
        return Err(Error::InvalidParameter("retain fractions must be in (0, 1]"));
    }
    let mut order = eligible.to_vec();
    order.sort_unstable();
    order.dedup();
    let protected: Vec<usize> = (0..m).filter(|i| order.binary_search(i).is_err()).collect();
    order.shuffle(&mut SeedPath::new(seed).label("landscape").rng());

    retain_fractions
        .iter()
        .map(|&f| {
            let k = retained_count(order.len(), f);
            let mut keep: Vec<usize> = protected.iter().chain(&order[..k]).copied().collect();
            keep.sort_unstable();
            let sub = inst.select(&keep)?;
            Ok((f, instance_landscape(&sub, reference)?))
        })
        .collect()
}
