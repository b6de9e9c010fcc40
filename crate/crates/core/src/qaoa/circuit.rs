use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand::Rng;

use super::kernel::{backward_layer, forward_layer, mix_mirror, unmix_mirror};
use super::state::{expectation, StateVector};
use crate::dropout::{DropoutPlan, EnergyTable};
use crate::instance::Instance;
use crate::spin::SpinConfig;
use crate::{Error, Result};

/// Driving and mixing angles, one pair per layer.
#[derive(Clone, Debug, PartialEq)]
pub struct QaoaParams {
    pub gammas: Vec<f64>,
    pub betas: Vec<f64>,
}

impl QaoaParams {
    pub fn new(gammas: Vec<f64>, betas: Vec<f64>) -> Result<Self> {
        let p = QaoaParams { gammas, betas };
        p.validate()?;
        Ok(p)
    }

    pub fn zeros(p: usize) -> Self {
        QaoaParams { gammas: vec![0.0; p], betas: vec![0.0; p] }
    }

    /// Every angle i.i.d. uniform on `(-π, π)`.
    pub fn random<R: Rng + ?Sized>(p: usize, rng: &mut R) -> Self {
        let pi = core::f64::consts::PI;
        let mut draw = || loop {
            let x = rng.random_range(-pi..pi);
            if x != -pi {
                return x;
            }
        };
        let gammas = (0..p).map(|_| draw()).collect();
        let betas = (0..p).map(|_| draw()).collect();
        QaoaParams { gammas, betas }
    }

    pub fn p(&self) -> usize {
        self.gammas.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.gammas.len() != self.betas.len() {
            return Err(Error::InvalidParameter("gamma and beta counts differ"));
        }
        if self.gammas.iter().chain(&self.betas).any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("angles must be finite"));
        }
        Ok(())
    }
}

/// The driving tables of a depth-`p` circuit, one per layer.
#[derive(Clone, Debug)]
pub struct Circuit {
    n: usize,
    layers: Vec<Arc<EnergyTable>>,
}

impl Circuit {
    pub fn new(layers: Vec<Arc<EnergyTable>>) -> Result<Self> {
        let n = layers.first().ok_or(Error::InvalidParameter("circuit needs at least one layer"))?.n();
        if let Some(t) = layers.iter().find(|t| t.n() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: t.n() });
        }
        Ok(Circuit { n, layers })
    }

    /// The same table in every layer.
    pub fn repeated(table: Arc<EnergyTable>, p: usize) -> Result<Self> {
        Circuit::new(vec![table; p])
    }

    pub fn from_plan(inst: &Instance, plan: &DropoutPlan) -> Result<Self> {
        plan.validate(inst)?;
        Circuit::new(plan.tables(inst)?)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.layers.len()
    }

    pub fn layer(&self, m: usize) -> &EnergyTable {
        &self.layers[m]
    }

    fn check(&self, params: &QaoaParams) -> Result<()> {
        params.validate()?;
        if params.p() != self.p() {
            return Err(Error::DimensionMismatch { expected: self.p(), found: params.p() });
        }
        Ok(())
    }

    fn check_cost(&self, cost: &EnergyTable) -> Result<()> {
        if cost.n() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: cost.n() });
        }
        if !cost.is_full() {
            return Err(Error::DroppedCostTable);
        }
        Ok(())
    }
}

/// `|+⟩^{⊗n}` followed by driving then mixing for each layer in order.
pub fn evolve(circuit: &Circuit, params: &QaoaParams) -> Result<StateVector> {
    circuit.check(params)?;
    let mut state = StateVector::init_plus(circuit.n)?;
    let amps = state.amplitudes_mut();
    for (m, table) in circuit.layers.iter().enumerate() {
        forward_layer(amps, circuit.n, table, params.gammas[m], params.betas[m]);
    }
    Ok(state)
}

/// Cost, optional success probability, and the exact gradient of the cost.
#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation {
    pub cost: f64,
    pub success: Option<f64>,
    pub d_gammas: Vec<f64>,
    pub d_betas: Vec<f64>,
}

impl Evaluation {
    pub fn gradient_norm(&self) -> f64 {
        libm::sqrt(self.d_gammas.iter().chain(&self.d_betas).map(|g| g * g).sum())
    }
}

/// `(∂C/∂γ, ∂C/∂β)` of `C = ⟨ψ|H_cost|ψ⟩`.
pub fn gradient(circuit: &Circuit, params: &QaoaParams, cost: &EnergyTable) -> Result<(Vec<f64>, Vec<f64>)> {
    let e = value_and_gradient(circuit, params, cost, None)?;
    Ok((e.d_gammas, e.d_betas))
}

/// Reverse-mode sweep.
///
/// With `|ψ_k⟩` the state after gate `k = exp(-iθ_k G_k)` and
/// `⟨λ_k| = ⟨ψ|H U_L ⋯ U_{k+1}`, each derivative is
/// `∂C/∂θ_k = 2 Im ⟨λ_k|G_k|ψ_k⟩`. Both vectors are walked back through the
/// inverse gates, so only two statevectors are held at a time.
pub fn value_and_gradient(
    circuit: &Circuit,
    params: &QaoaParams,
    cost: &EnergyTable,
    ground: Option<SpinConfig>,
) -> Result<Evaluation> {
    circuit.check_cost(cost)?;
    circuit.check(params)?;
    if circuit.n < 2 {
        return full_space_gradient(circuit, params, cost, ground);
    }
    // Every table and the initial state are invariant under the global flip,
    // so the sweep runs on the lower half of the index space. The top qubit
    // couples `b` with its mirror `mask - b`; full-space sums are twice the
    // half-space ones.
    let n = circuit.n - 1;
    let len = 1usize << n;
    let amp = 1.0 / libm::sqrt((2 * len) as f64);
    let mut psi = vec![Complex64::new(amp, 0.0); len];
    for (m, table) in circuit.layers.iter().enumerate() {
        forward_layer(&mut psi, n, table, params.gammas[m], params.betas[m]);
        mix_mirror(&mut psi, params.betas[m]);
    }
    let success = ground.map(|g| half_success(&psi, circuit.n, g)).transpose()?;
    let energies = &cost.energies()[..len];
    let value = 2.0 * expectation(&psi, energies);
    let mut lambda: Vec<Complex64> = psi.iter().zip(energies).map(|(a, &e)| a * e).collect();

    let p = circuit.p();
    let mut d_gammas = vec![0.0; p];
    let mut d_betas = vec![0.0; p];
    for m in (0..p).rev() {
        let top = unmix_mirror(&mut psi, &mut lambda, params.betas[m]);
        let o = backward_layer(&mut psi, &mut lambda, n, &circuit.layers[m], params.gammas[m], params.betas[m], m > 0);
        d_betas[m] = -4.0 * (o.x.im + top.im);
        d_gammas[m] = 4.0 * o.e.im;
    }
    Ok(Evaluation { cost: value, success, d_gammas, d_betas })
}

fn half_success(half: &[Complex64], n: usize, ground: SpinConfig) -> Result<f64> {
    if ground.n() != n {
        return Err(Error::DimensionMismatch { expected: n, found: ground.n() });
    }
    let g = ground.index();
    let g = if g < half.len() { g } else { g ^ ((1 << n) - 1) };
    Ok(2.0 * half[g].norm_sqr())
}

fn full_space_gradient(
    circuit: &Circuit,
    params: &QaoaParams,
    cost: &EnergyTable,
    ground: Option<SpinConfig>,
) -> Result<Evaluation> {
    let state = evolve(circuit, params)?;
    let success = ground.map(|g| state.success_probability(g)).transpose()?;
    let mut psi: Vec<Complex64> = state.amplitudes().to_vec();
    let energies = cost.energies();
    let value = expectation(&psi, energies);
    let mut lambda: Vec<Complex64> = psi.iter().zip(energies).map(|(a, &e)| a * e).collect();

    let p = circuit.p();
    let mut d_gammas = vec![0.0; p];
    let mut d_betas = vec![0.0; p];
    for m in (0..p).rev() {
        // generators: H_B = -Σ σ^x for mixing, diag(E_m) for driving
        let o = backward_layer(
            &mut psi,
            &mut lambda,
            circuit.n,
            &circuit.layers[m],
            params.gammas[m],
            params.betas[m],
            m > 0,
        );
        d_betas[m] = -2.0 * o.x.im;
        d_gammas[m] = 2.0 * o.e.im;
    }
    Ok(Evaluation { cost: value, success, d_gammas, d_betas })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate_planted, random_planted, GenerationMode};
    use crate::seed::rng;

    #[test]
    fn half_space_sweep_matches_full_space() {
        for n in [2, 5, 12] {
            let planted = random_planted(n.max(4), 3).unwrap();
            let planted = SpinConfig::new(n, planted.bits() & crate::spin::mask(n)).unwrap();
            let inst = if n >= 4 {
                generate_planted(n, planted, GenerationMode::Sporadic, 3, None).unwrap()
            } else {
                Instance::new(n, vec![], Some(planted)).unwrap()
            };
            let table = Arc::new(EnergyTable::full(&inst).unwrap());
            let circuit = Circuit::repeated(table.clone(), 4).unwrap();
            let params = QaoaParams::random(4, &mut rng(n as u64));
            let a = value_and_gradient(&circuit, &params, &table, Some(planted)).unwrap();
            let b = full_space_gradient(&circuit, &params, &table, Some(planted)).unwrap();
            assert!((a.cost - b.cost).abs() < 1e-10);
            assert!((a.success.unwrap() - b.success.unwrap()).abs() < 1e-12);
            for (x, y) in a.d_gammas.iter().chain(&a.d_betas).zip(b.d_gammas.iter().chain(&b.d_betas)) {
                assert!((x - y).abs() < 1e-9 * (1.0 + y.abs()), "n={n}: {x} vs {y}");
            }
        }
    }
}
