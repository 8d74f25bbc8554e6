//! Monte-Carlo campaigns.
//!
//! A drop fixes station positions and runs the policy for `periods`
//! block-fading periods. Drops are independent and run in parallel; each one
//! draws from its own ChaCha stream keyed by `(master_seed, network_id,
//! purpose)`, so results do not depend on the worker count or on the policy
//! being simulated (all policies see the same placements and fading).

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{draw_fading, max_ru_rate, place_stations, NetworkRealization};
use crate::domain::{default_multi_patterns, validate_schedule, DropResult, RuPattern, SimParams};
use crate::error::{Error, Result};
use crate::policies::{PolicyKind, PolicyParams, PolicyState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PatternMode {
    Single,
    Multi,
}

impl PatternMode {
    pub fn name(&self) -> &'static str {
        match self {
            PatternMode::Single => "single",
            PatternMode::Multi => "multi",
        }
    }
}

impl std::str::FromStr for PatternMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "single" => Ok(PatternMode::Single),
            "multi" | "multiple" => Ok(PatternMode::Multi),
            other => Err(Error::config("pattern_mode", format!("unknown mode `{other}` (expected single or multi)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignConfig {
    pub policy: PolicyKind,
    pub pattern_mode: PatternMode,
    /// Station counts; more than one entry makes a scaling sweep.
    pub stations: Vec<usize>,
    pub periods: u64,
    pub networks: u64,
    /// Minimum throughput requirement in bits per period, common to all stations.
    pub r_min: f64,
    pub policy_params: PolicyParams,
    /// `sim.patterns` holds the patterns active under `pattern_mode`.
    pub sim: SimParams,
    /// Rayon worker threads; `None` uses the global pool.
    #[serde(skip)]
    pub workers: Option<usize>,
    /// Validate every period's schedule and fail the drop on a violation.
    #[serde(skip)]
    pub check_schedules: bool,
}

impl CampaignConfig {
    /// Table I / evaluation defaults: K = 12, r_min = 20 kbit per period,
    /// 100 networks x 1000 periods.
    pub fn defaults(policy: PolicyKind, mode: PatternMode) -> Self {
        CampaignConfig {
            policy,
            pattern_mode: mode,
            stations: vec![12],
            periods: 1000,
            networks: 100,
            r_min: 20000.0,
            policy_params: PolicyParams::default(),
            sim: SimParams {
                patterns: default_patterns(mode),
                ..SimParams::default()
            },
            workers: None,
            check_schedules: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.sim.validate()?;
        if self.stations.is_empty() || self.stations.contains(&0) {
            return Err(Error::config("stations", "station counts must be positive"));
        }
        if self.periods == 0 {
            return Err(Error::config("periods", "must be positive"));
        }
        if self.networks == 0 {
            return Err(Error::config("networks", "must be positive"));
        }
        if !(self.r_min > 0.0 && self.r_min.is_finite()) {
            return Err(Error::config("r_min", "must be positive"));
        }
        let p = &self.policy_params;
        if !(p.v_wmm > 0.0) {
            return Err(Error::config("v", "must be positive"));
        }
        if !(p.v_esr >= 0.0) {
            return Err(Error::config("v_esr", "must be non-negative"));
        }
        if !(p.beta > 0.0 && p.beta <= 1.0) {
            return Err(Error::config("beta", "must lie in (0, 1]"));
        }
        if !(p.ema_floor > 0.0) {
            return Err(Error::config("ema_floor", "must be positive"));
        }
        if self.workers == Some(0) {
            return Err(Error::config("workers", "must be positive"));
        }
        Ok(())
    }
}

pub fn default_patterns(mode: PatternMode) -> Vec<RuPattern> {
    match mode {
        PatternMode::Single => vec![RuPattern::RU26],
        PatternMode::Multi => default_multi_patterns(),
    }
}

/// What a random stream is used for within one network drop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    Placement = 0,
    Fading = 1,
}

pub fn substream(master_seed: u64, network_id: u64, purpose: Purpose) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(network_id.wrapping_mul(2).wrapping_add(purpose as u64));
    rng
}

/// Simulates one network realization with `k_count` stations.
pub fn run_drop(cfg: &CampaignConfig, k_count: usize, network_id: u64) -> Result<DropResult> {
    let params = &cfg.sim;
    let net = place_stations(
        &mut substream(params.master_seed, network_id, Purpose::Placement),
        k_count,
        params.d_min_m,
        params.d_max_m,
        cfg.r_min,
        params.carrier_freq_ghz,
    )?;
    run_network(cfg, &net, network_id)
}

/// Simulates a given placement for `cfg.periods` periods, drawing fading
/// from the stream of `network_id`.
pub fn run_network(cfg: &CampaignConfig, net: &NetworkRealization, network_id: u64) -> Result<DropResult> {
    let params = &cfg.sim;
    let k_count = net.len();
    let mut fading = substream(params.master_seed, network_id, Purpose::Fading);
    let mut state = PolicyState::new(cfg.policy, &cfg.policy_params, &net.r_min(), max_ru_rate(params)?);

    let mut delivered = vec![0.0f64; k_count];
    let mut usage = vec![0u64; params.patterns.len()];
    for _ in 0..cfg.periods {
        let channels: Vec<_> = params
            .patterns
            .iter()
            .map(|p| draw_fading(&mut fading, k_count, p.n_rus))
            .collect();
        let decision = state.step(params, &net, &channels)?;
        if cfg.check_schedules {
            if let Some(v) = validate_schedule(&decision.schedule)? {
                return Err(Error::Input(format!("network {network_id}: invalid schedule {v:?}")));
            }
        }
        usage[decision.pattern_index] += 1;
        for (acc, r) in delivered.iter_mut().zip(&decision.realized) {
            *acc += r;
        }
    }

    let t = cfg.periods as f64;
    let per_station_throughput: Vec<f64> = delivered.iter().map(|d| d / t).collect();
    let min_throughput = per_station_throughput.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(DropResult {
        network_id,
        per_station_throughput,
        min_throughput,
        final_queues: state.queues().to_vec(),
        pattern_usage: usage,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignResult {
    pub k_count: usize,
    pub config: CampaignConfig,
    /// Ordered by network id.
    pub drops: Vec<DropResult>,
    /// Wall-clock seconds per drop.
    pub drop_seconds: Vec<f64>,
}

impl CampaignResult {
    pub fn min_throughputs(&self) -> Vec<f64> {
        self.drops.iter().map(|d| d.min_throughput).collect()
    }
}

fn with_pool<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::config("workers", e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

/// Runs `cfg.networks` independent drops with `k_count` stations.
pub fn run_campaign(cfg: &CampaignConfig, k_count: usize) -> Result<CampaignResult> {
    cfg.validate()?;
    let outcomes: Vec<Result<(DropResult, f64)>> = with_pool(cfg.workers, || {
        (0..cfg.networks)
            .into_par_iter()
            .map(|id| {
                let start = Instant::now();
                run_drop(cfg, k_count, id).map(|d| (d, start.elapsed().as_secs_f64()))
            })
            .collect()
    })?;
    let mut drops = Vec::with_capacity(outcomes.len());
    let mut drop_seconds = Vec::with_capacity(outcomes.len());
    for outcome in outcomes {
        let (d, s) = outcome?;
        drops.push(d);
        drop_seconds.push(s);
    }
    Ok(CampaignResult {
        k_count,
        config: cfg.clone(),
        drops,
        drop_seconds,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub k_count: usize,
    pub mean_min_throughput: f64,
    pub result: CampaignResult,
}

/// One campaign per entry of `cfg.stations`, reporting the mean over drops
/// of the per-drop minimum throughput.
pub fn scaling_sweep(cfg: &CampaignConfig) -> Result<Vec<SweepPoint>> {
    cfg.validate()?;
    cfg.stations
        .iter()
        .map(|&k| {
            let result = run_campaign(cfg, k)?;
            Ok(SweepPoint {
                k_count: k,
                mean_min_throughput: mean(&result.min_throughputs()),
                result,
            })
        })
        .collect()
}

/// Step points `(x, F(x))` of the empirical CDF, one per distinct value.
pub fn empirical_cdf(values: &[f64]) -> Result<Vec<(f64, f64)>> {
    if values.is_empty() {
        return Err(Error::Input("empirical CDF of an empty sample".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let m = sorted.len() as f64;
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (i, &x) in sorted.iter().enumerate() {
        let f = (i + 1) as f64 / m;
        match out.last_mut() {
            Some(last) if last.0 == x => last.1 = f,
            _ => out.push((x, f)),
        }
    }
    Ok(out)
}

/// Share of values strictly below `threshold`.
pub fn fraction_below(values: &[f64], threshold: f64) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.iter().filter(|&&v| v < threshold).count() as f64 / values.len() as f64
}

pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    if sorted.len() % 2 == 0 {
        0.5 * (sorted[mid - 1] + sorted[mid])
    } else {
        sorted[mid]
    }
}
