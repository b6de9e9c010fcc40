use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::dropout::EnergyTable;
use crate::spin::SpinConfig;
use crate::{Error, Result, MAX_STATE_QUBITS};

/// `2^n` complex amplitudes; basis index bits follow the spin encoding.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|+⟩^{⊗n}`, the ground state of the mixing Hamiltonian.
    pub fn init_plus(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_STATE_QUBITS {
            return Err(Error::InvalidSpinCount { n, max: MAX_STATE_QUBITS });
        }
        let dim = 1usize << n;
        let a = 1.0 / libm::sqrt(dim as f64);
        Ok(StateVector { n, amps: vec![Complex64::new(a, 0.0); dim] })
    }

    /// The computational basis state of `s`.
    pub fn basis(s: SpinConfig) -> Result<Self> {
        let n = s.n();
        if n > MAX_STATE_QUBITS {
            return Err(Error::InvalidSpinCount { n, max: MAX_STATE_QUBITS });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[s.index()] = Complex64::new(1.0, 0.0);
        Ok(StateVector { n, amps })
    }

    /// Wraps raw amplitudes; the length must be a power of two.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let dim = amps.len();
        if dim < 2 || !dim.is_power_of_two() || dim > 1 << MAX_STATE_QUBITS {
            return Err(Error::InvalidParameter("amplitude count must be 2^n with 1 <= n <= 26"));
        }
        Ok(StateVector { n: dim.trailing_zeros() as usize, amps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn check(&self, table: &EnergyTable) -> Result<()> {
        if table.n() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: table.n() });
        }
        Ok(())
    }

    /// `|ψ⟩ ← exp(-iγ H_C) |ψ⟩` for the diagonal `table`.
    pub fn apply_driving(&mut self, table: &EnergyTable, gamma: f64) -> Result<()> {
        self.check(table)?;
        super::kernel::drive(&mut self.amps, table, gamma);
        Ok(())
    }

    /// `|ψ⟩ ← exp(-iβ H_B) |ψ⟩` with `H_B = -Σ σ^x`, one rotation
    /// `cos β · I + i sin β · σ^x` per qubit.
    pub fn apply_mixing(&mut self, beta: f64) {
        super::kernel::mix(&mut self.amps, self.n, beta);
    }

    /// Expectation of the diagonal `cost_table`.
    pub fn cost(&self, cost_table: &EnergyTable) -> Result<f64> {
        self.check(cost_table)?;
        Ok(expectation(&self.amps, cost_table.energies()))
    }

    /// Weight on `ground` plus weight on its global flip.
    pub fn success_probability(&self, ground: SpinConfig) -> Result<f64> {
        if ground.n() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: ground.n() });
        }
        Ok(self.amps[ground.index()].norm_sqr() + self.amps[ground.global_flip().index()].norm_sqr())
    }

    /// `|⟨s|ψ⟩|²` for every basis state.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }
}

pub(crate) fn expectation(amps: &[Complex64], energies: &[f64]) -> f64 {
    amps.iter().zip(energies).map(|(a, &e)| a.norm_sqr() * e).sum()
}
