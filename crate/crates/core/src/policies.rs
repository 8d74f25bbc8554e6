//! Per-period scheduling controllers.
//!
//! Every policy follows the same contract within a period: turn the rate
//! matrix of each candidate RU pattern into a weight matrix, solve the
//! max-weight assignment, keep the pattern with the largest objective, then
//! update the controller state with the realized per-station rates.
//!
//! * WMM: drift-plus-penalty for weighted max-min fairness. One virtual queue
//!   per station tracks the gap between the auxiliary target and the
//!   normalized service `r_k / r_min_k`.
//! * PF: rate over an exponential moving average of delivered throughput.
//! * ESRM: drift-plus-penalty for sum rate with one deficit queue per
//!   minimum-throughput constraint.

use serde::{Deserialize, Serialize};

use crate::assignment::{max_weight_assignment, WeightMatrix};
use crate::channel::{rate_matrix, NetworkRealization};
use crate::domain::{station_rate, ChannelState, Matrix, RateMatrix, ScheduleMatrix, SimParams};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolicyKind {
    Wmm,
    Pf,
    Esrm,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 3] = [PolicyKind::Wmm, PolicyKind::Pf, PolicyKind::Esrm];

    pub fn name(&self) -> &'static str {
        match self {
            PolicyKind::Wmm => "wmm",
            PolicyKind::Pf => "pf",
            PolicyKind::Esrm => "esrm",
        }
    }
}

impl std::str::FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "wmm" => Ok(PolicyKind::Wmm),
            "pf" => Ok(PolicyKind::Pf),
            "esrm" => Ok(PolicyKind::Esrm),
            other => Err(Error::config("policy", format!("unknown policy `{other}` (expected wmm, pf or esrm)"))),
        }
    }
}

impl std::fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// How the WMM auxiliary variable enters the virtual queue.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaUnits {
    /// `gamma` lives in bits per period, `{0, R_max}`, and is divided by
    /// `r_min_k` inside the queue recursion.
    #[default]
    RateNormalized,
    /// `gamma` is already a throughput ratio, `{0, R_max / min_k r_min_k}`.
    Dimensionless,
}

/// Controller knobs shared by the three policies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolicyParams {
    pub v_wmm: f64,
    pub v_esr: f64,
    pub beta: f64,
    pub ema_floor: f64,
    pub gamma_units: GammaUnits,
}

impl Default for PolicyParams {
    fn default() -> Self {
        PolicyParams {
            v_wmm: 900.0,
            v_esr: 10.0,
            beta: 0.01,
            ema_floor: 1.0,
            gamma_units: GammaUnits::RateNormalized,
        }
    }
}

fn check_dims(rates: &RateMatrix, r_min: &[f64], k: usize) -> Result<()> {
    if rates.dims().0 != k || r_min.len() != k {
        return Err(Error::Dimension {
            expected: (k, rates.dims().1),
            actual: (rates.dims().0, r_min.len()),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct WmmState {
    pub q: Vec<f64>,
    pub v: f64,
    pub r_max: f64,
    pub gamma_units: GammaUnits,
    gamma_high: f64,
}

impl WmmState {
    pub fn new(k: usize, v: f64, r_max: f64, gamma_units: GammaUnits, r_min: &[f64]) -> Self {
        let gamma_high = match gamma_units {
            GammaUnits::RateNormalized => r_max,
            GammaUnits::Dimensionless => {
                r_max / r_min.iter().copied().fold(f64::INFINITY, f64::min)
            }
        };
        WmmState {
            q: vec![0.0; k],
            v,
            r_max,
            gamma_units,
            gamma_high,
        }
    }

    /// Closed-form maximizer of `V min_k gamma_k - sum_k Q_k gamma_k` over
    /// the box: every entry at the upper bound when `V > sum Q`, else zero.
    pub fn aux_step(&self) -> Vec<f64> {
        let backlog: f64 = self.q.iter().sum();
        let value = if self.v > backlog { self.gamma_high } else { 0.0 };
        vec![value; self.q.len()]
    }

    /// `phi[k][n] = Q_k r[k][n] / r_min_k`.
    pub fn weights(&self, rates: &RateMatrix, r_min: &[f64]) -> Result<WeightMatrix> {
        check_dims(rates, r_min, self.q.len())?;
        if let Some(k) = r_min.iter().position(|&r| !(r > 0.0)) {
            return Err(Error::Input(format!("r_min of station {k} must be positive")));
        }
        let (k, n) = rates.dims();
        Ok(Matrix::from_fn(k, n, |s, r| self.q[s] * rates.bits.at(s, r) / r_min[s]))
    }

    /// `Q_k <- max(Q_k - r_k / r_min_k + gamma_k', 0)` where `gamma_k'` is
    /// `gamma_k` expressed as a throughput ratio.
    pub fn queue_update(&mut self, realized: &[f64], gamma: &[f64], r_min: &[f64]) {
        for (k, q) in self.q.iter_mut().enumerate() {
            let arrival = match self.gamma_units {
                GammaUnits::RateNormalized => gamma[k] / r_min[k],
                GammaUnits::Dimensionless => gamma[k],
            };
            *q = (*q - realized[k] / r_min[k] + arrival).max(0.0);
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PfState {
    pub ema: Vec<f64>,
    pub beta: f64,
    pub epsilon_init: f64,
}

impl PfState {
    pub fn new(k: usize, beta: f64, epsilon_init: f64) -> Self {
        PfState {
            ema: vec![epsilon_init; k],
            beta,
            epsilon_init,
        }
    }

    /// `phi[k][n] = r[k][n] / ema_k`.
    pub fn weights(&self, rates: &RateMatrix) -> Result<WeightMatrix> {
        let (k, n) = rates.dims();
        if k != self.ema.len() {
            return Err(Error::Dimension {
                expected: (self.ema.len(), n),
                actual: (k, n),
            });
        }
        Ok(Matrix::from_fn(k, n, |s, r| rates.bits.at(s, r) / self.ema[s]))
    }

    /// Updates every station, scheduled or not.
    pub fn update(&mut self, realized: &[f64]) {
        let beta = self.beta;
        for (e, &r) in self.ema.iter_mut().zip(realized) {
            *e = ((1.0 - beta) * *e + beta * r).max(self.epsilon_init);
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EsrmState {
    pub z: Vec<f64>,
    pub v_esr: f64,
}

impl EsrmState {
    pub fn new(k: usize, v_esr: f64) -> Self {
        EsrmState { z: vec![0.0; k], v_esr }
    }

    /// `phi[k][n] = V r[k][n] + Z_k (r[k][n] - r_min_k)`; may be negative.
    pub fn weights(&self, rates: &RateMatrix, r_min: &[f64]) -> Result<WeightMatrix> {
        check_dims(rates, r_min, self.z.len())?;
        let (k, n) = rates.dims();
        Ok(Matrix::from_fn(k, n, |s, r| {
            let rate = rates.bits.at(s, r);
            self.v_esr * rate + self.z[s] * (rate - r_min[s])
        }))
    }

    /// `Z_k <- max(Z_k - r_k + r_min_k, 0)`.
    pub fn queue_update(&mut self, realized: &[f64], r_min: &[f64]) {
        for ((z, &r), &rmin) in self.z.iter_mut().zip(realized).zip(r_min) {
            *z = (*z - r + rmin).max(0.0);
        }
    }
}

/// Mutable controller state of one simulation run.
#[derive(Debug, Clone, PartialEq)]
pub enum PolicyState {
    Wmm(WmmState),
    Pf(PfState),
    Esrm(EsrmState),
}

/// One period's scheduling outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct Decision {
    /// Index into `SimParams::patterns`.
    pub pattern_index: usize,
    pub schedule: ScheduleMatrix,
    pub rates: RateMatrix,
    /// Assignment objective under the policy's own weights.
    pub objective: f64,
    /// Bits delivered to each station.
    pub realized: Vec<f64>,
}

impl PolicyState {
    pub fn new(kind: PolicyKind, params: &PolicyParams, r_min: &[f64], r_max: f64) -> Self {
        let k = r_min.len();
        match kind {
            PolicyKind::Wmm => PolicyState::Wmm(WmmState::new(k, params.v_wmm, r_max, params.gamma_units, r_min)),
            PolicyKind::Pf => PolicyState::Pf(PfState::new(k, params.beta, params.ema_floor)),
            PolicyKind::Esrm => PolicyState::Esrm(EsrmState::new(k, params.v_esr)),
        }
    }

    pub fn kind(&self) -> PolicyKind {
        match self {
            PolicyState::Wmm(_) => PolicyKind::Wmm,
            PolicyState::Pf(_) => PolicyKind::Pf,
            PolicyState::Esrm(_) => PolicyKind::Esrm,
        }
    }

    pub fn weights(&self, rates: &RateMatrix, r_min: &[f64]) -> Result<WeightMatrix> {
        match self {
            PolicyState::Wmm(s) => s.weights(rates, r_min),
            PolicyState::Pf(s) => s.weights(rates),
            PolicyState::Esrm(s) => s.weights(rates, r_min),
        }
    }

    /// Queue (or moving-average) values exposed in drop results.
    pub fn queues(&self) -> &[f64] {
        match self {
            PolicyState::Wmm(s) => &s.q,
            PolicyState::Pf(s) => &s.ema,
            PolicyState::Esrm(s) => &s.z,
        }
    }

    /// Solves the assignment for every configured pattern and keeps the one
    /// with the largest objective (earliest pattern on ties).
    pub fn decide(
        &self,
        params: &SimParams,
        net: &NetworkRealization,
        channels: &[ChannelState],
    ) -> Result<Decision> {
        if channels.len() != params.patterns.len() {
            return Err(Error::Input(format!(
                "{} channel states for {} patterns",
                channels.len(),
                params.patterns.len()
            )));
        }
        let r_min = net.r_min();
        let mut best: Option<(usize, ScheduleMatrix, RateMatrix, f64)> = None;
        for (i, (pattern, ch)) in params.patterns.iter().zip(channels).enumerate() {
            let rates = rate_matrix(params, net, ch, *pattern)?;
            let weights = self.weights(&rates, &r_min)?;
            let a = max_weight_assignment(&weights)?;
            if best.as_ref().is_none_or(|b| a.value > b.3) {
                best = Some((i, a.schedule, rates, a.value));
            }
        }
        let (pattern_index, schedule, rates, objective) = best.expect("at least one pattern");
        let realized = (0..net.len()).map(|k| station_rate(&schedule, &rates, k)).collect();
        Ok(Decision {
            pattern_index,
            schedule,
            rates,
            objective,
            realized,
        })
    }

    /// One full period: auxiliary step, schedule step, state update.
    pub fn step(
        &mut self,
        params: &SimParams,
        net: &NetworkRealization,
        channels: &[ChannelState],
    ) -> Result<Decision> {
        let gamma = match self {
            PolicyState::Wmm(s) => Some(s.aux_step()),
            _ => None,
        };
        let decision = self.decide(params, net, channels)?;
        let r_min = net.r_min();
        match self {
            PolicyState::Wmm(s) => s.queue_update(&decision.realized, gamma.as_deref().unwrap_or_default(), &r_min),
            PolicyState::Pf(s) => s.update(&decision.realized),
            PolicyState::Esrm(s) => s.queue_update(&decision.realized, &r_min),
        }
        Ok(decision)
    }
}
