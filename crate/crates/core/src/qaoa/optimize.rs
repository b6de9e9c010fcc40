use alloc::vec;
use alloc::vec::Vec;

use super::circuit::{value_and_gradient, Circuit, QaoaParams};
use crate::dropout::EnergyTable;
use crate::spin::SpinConfig;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Method {
    /// Adam: bias-corrected first and second moment estimates.
    Adam { beta1: f64, beta2: f64, eps: f64 },
    /// Heavy-ball momentum.
    Momentum { momentum: f64 },
}

impl Default for Method {
    fn default() -> Self {
        Method::Adam { beta1: 0.9, beta2: 0.999, eps: 1e-8 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OptimizerConfig {
    pub method: Method,
    pub learning_rate: f64,
    /// Ratio of the final to the initial learning rate; the rate decays
    /// geometrically across the epoch budget. `1.0` keeps it constant.
    pub lr_decay: f64,
    /// Parameter updates to perform; the budget is always spent in full.
    pub epochs: usize,
    pub record_every: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            method: Method::default(),
            learning_rate: 0.05,
            lr_decay: 0.01,
            epochs: 1000,
            record_every: 10,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidParameter("learning rate must be positive"));
        }
        if !(self.lr_decay > 0.0 && self.lr_decay <= 1.0) {
            return Err(Error::InvalidParameter("lr_decay must lie in (0, 1]"));
        }
        if self.record_every == 0 {
            return Err(Error::InvalidParameter("record_every must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrajectoryPoint {
    /// Updates applied before this measurement.
    pub epoch: usize,
    pub cost: f64,
    pub success: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub points: Vec<TrajectoryPoint>,
    pub final_params: QaoaParams,
    pub final_cost: f64,
    pub final_success: f64,
}

/// Minimizes `⟨ψ(γ, β)|H_cost|ψ(γ, β)⟩` by first-order updates.
///
/// Records at epoch 0, every `record_every` updates, and after the last one.
/// `cost` must be a full-instance table; a dropped-out cost is rejected.
pub fn optimize(
    circuit: &Circuit,
    cost: &EnergyTable,
    init: &QaoaParams,
    config: &OptimizerConfig,
    ground: SpinConfig,
) -> Result<Trajectory> {
    config.validate()?;
    if !cost.is_full() {
        return Err(Error::DroppedCostTable);
    }
    let p = init.p();
    let mut theta: Vec<f64> = init.gammas.iter().chain(&init.betas).copied().collect();
    let mut m1 = vec![0.0; 2 * p];
    let mut m2 = vec![0.0; 2 * p];
    let mut points = Vec::new();

    let split = |theta: &[f64]| QaoaParams { gammas: theta[..p].to_vec(), betas: theta[p..].to_vec() };

    for epoch in 0..config.epochs {
        let eval = value_and_gradient(circuit, &split(&theta), cost, Some(ground))?;
        let grad: Vec<f64> = eval.d_gammas.iter().chain(&eval.d_betas).copied().collect();
        if !eval.cost.is_finite() || grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::NonFinite { epoch });
        }
        if epoch % config.record_every == 0 {
            points.push(TrajectoryPoint { epoch, cost: eval.cost, success: eval.success.unwrap_or(0.0) });
        }
        let t = (epoch + 1) as i32;
        let lr = config.learning_rate * libm::pow(config.lr_decay, epoch as f64 / config.epochs as f64);
        match config.method {
            Method::Adam { beta1, beta2, eps } => {
                let c1 = 1.0 - libm::pow(beta1, t as f64);
                let c2 = 1.0 - libm::pow(beta2, t as f64);
                for i in 0..2 * p {
                    m1[i] = beta1 * m1[i] + (1.0 - beta1) * grad[i];
                    m2[i] = beta2 * m2[i] + (1.0 - beta2) * grad[i] * grad[i];
                    theta[i] -= lr * (m1[i] / c1) / (libm::sqrt(m2[i] / c2) + eps);
                }
            }
            Method::Momentum { momentum } => {
                for i in 0..2 * p {
                    m1[i] = momentum * m1[i] + grad[i];
                    theta[i] -= lr * m1[i];
                }
            }
        }
    }

    let final_params = split(&theta);
    let state = super::evolve(circuit, &final_params)?;
    let final_cost = state.cost(cost)?;
    let final_success = state.success_probability(ground)?;
    if !final_cost.is_finite() {
        return Err(Error::NonFinite { epoch: config.epochs });
    }
    points.push(TrajectoryPoint { epoch: config.epochs, cost: final_cost, success: final_success });
    Ok(Trajectory { points, final_params, final_cost, final_success })
}
