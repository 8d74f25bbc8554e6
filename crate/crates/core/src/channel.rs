//! Network placement, block fading and the link-budget chain that turns a
//! fading realization into achievable bits per RU.
//!
//! The chain is: residential path loss -> per-subcarrier received power ->
//! highest MCS whose sensitivity threshold is met -> `S * rho * T_DL/T_OFDM`.

use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::domain::{
    ChannelState, Matrix, McsEntry, RateMatrix, RuPattern, SimParams, StationConfig,
};
use crate::error::{Error, Result};

/// Station placement for one network realization.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkRealization {
    pub stations: Vec<StationConfig>,
}

impl NetworkRealization {
    pub fn len(&self) -> usize {
        self.stations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stations.is_empty()
    }

    pub fn r_min(&self) -> Vec<f64> {
        self.stations.iter().map(|s| s.r_min).collect()
    }

    /// Builds a realization from explicit distances.
    pub fn from_distances(distances: &[f64], r_min: f64, fc_ghz: f64) -> Result<Self> {
        let stations = distances
            .iter()
            .enumerate()
            .map(|(id, &d)| {
                Ok(StationConfig {
                    id,
                    distance_m: d,
                    r_min,
                    path_loss_db: path_loss(d, fc_ghz)?,
                })
            })
            .collect::<Result<_>>()?;
        Ok(NetworkRealization { stations })
    }
}

/// Indoor residential path loss in dB, with a breakpoint at 5 m.
pub fn path_loss(d_m: f64, fc_ghz: f64) -> Result<f64> {
    if !(d_m > 0.0) || !d_m.is_finite() {
        return Err(Error::Input(format!("distance must be positive, got {d_m}")));
    }
    if !(fc_ghz > 0.0) {
        return Err(Error::Input(format!("carrier frequency must be positive, got {fc_ghz}")));
    }
    let mut pl = 40.05 + 20.0 * (fc_ghz / 2.4).log10() + 20.0 * d_m.min(5.0).log10();
    if d_m > 5.0 {
        pl += 35.0 * (d_m / 5.0).log10();
    }
    Ok(pl)
}

/// Drops `k_count` stations uniformly over the annulus `[d_min, d_max]`
/// around the AP.
pub fn place_stations<R: Rng + ?Sized>(
    rng: &mut R,
    k_count: usize,
    d_min_m: f64,
    d_max_m: f64,
    r_min: f64,
    fc_ghz: f64,
) -> Result<NetworkRealization> {
    if k_count == 0 {
        return Err(Error::Input("at least one station is required".into()));
    }
    if !(d_min_m > 0.0 && d_min_m <= d_max_m) {
        return Err(Error::Input(format!(
            "invalid placement annulus [{d_min_m}, {d_max_m}]"
        )));
    }
    let lo = d_min_m * d_min_m;
    let hi = d_max_m * d_max_m;
    let distances: Vec<f64> = (0..k_count)
        .map(|_| {
            // Area-uniform: d^2 is uniform on [d_min^2, d_max^2].
            let u: f64 = rng.random();
            (lo + u * (hi - lo)).sqrt().clamp(d_min_m, d_max_m)
        })
        .collect();
    NetworkRealization::from_distances(&distances, r_min, fc_ghz)
}

/// I.i.d. unit-mean exponential power gains (Rayleigh amplitude).
pub fn draw_fading<R: Rng + ?Sized>(rng: &mut R, k_count: usize, n_rus: usize) -> ChannelState {
    let gains = Matrix::from_fn(k_count, n_rus, |_, _| {
        let g: f64 = Exp1.sample(rng);
        g.max(f64::MIN_POSITIVE)
    });
    ChannelState { gains }
}

/// Per-subcarrier received power in dBm: `10 log10(p_ru / S) - PL + 10 log10(g)`.
///
/// A zero gain yields negative infinity, which no MCS accepts.
pub fn received_power_dbm(p_ru_mw: f64, subcarriers: usize, pl_db: f64, g: f64) -> f64 {
    if g <= 0.0 {
        return f64::NEG_INFINITY;
    }
    10.0 * (p_ru_mw / subcarriers as f64).log10() - pl_db + 10.0 * g.log10()
}

/// Highest MCS whose sensitivity threshold does not exceed `rx_dbm`.
pub fn select_mcs(rx_dbm: f64, table: &[McsEntry]) -> Result<Option<&McsEntry>> {
    if table.is_empty() {
        return Err(Error::config("mcs_table", "empty MCS table"));
    }
    Ok(table.iter().rev().find(|e| e.min_rx_power_dbm <= rx_dbm))
}

/// Bits carried by one RU of `subcarriers` data tones over `symbol_count`
/// OFDM symbols at the given MCS. Exact for the integral products used by
/// the HE tables.
pub fn bits_per_period(subcarriers: usize, mcs: &McsEntry, symbol_count: u64) -> f64 {
    let numer = subcarriers as u64 * mcs.bits_per_symbol as u64 * mcs.code_rate.num as u64 * symbol_count;
    numer as f64 / mcs.code_rate.den as f64
}

/// Largest achievable per-RU rate over the given patterns, in bits per period.
pub fn max_ru_rate(params: &SimParams) -> Result<f64> {
    let symbols = params.symbol_count()?;
    let top = params
        .mcs_table
        .last()
        .ok_or_else(|| Error::config("mcs_table", "empty MCS table"))?;
    Ok(params
        .patterns
        .iter()
        .map(|p| bits_per_period(p.data_subcarriers, top, symbols))
        .fold(0.0, f64::max))
}

/// Achievable bits per period for every (station, RU) pair under `pattern`.
pub fn rate_matrix(
    params: &SimParams,
    net: &NetworkRealization,
    ch: &ChannelState,
    pattern: RuPattern,
) -> Result<RateMatrix> {
    let expected = (net.len(), pattern.n_rus);
    if ch.gains.dims() != expected {
        return Err(Error::Dimension {
            expected,
            actual: ch.gains.dims(),
        });
    }
    let symbols = params.symbol_count()?;
    let p_ru = pattern.per_ru_power_mw(params.p_total_dbm);
    let s = pattern.data_subcarriers;

    let mut bits = Matrix::filled(expected.0, expected.1, 0.0);
    let mut mcs_idx = Matrix::filled(expected.0, expected.1, None);
    for (k, station) in net.stations.iter().enumerate() {
        for n in 0..pattern.n_rus {
            let rx = received_power_dbm(p_ru, s, station.path_loss_db, ch.gains.at(k, n));
            if let Some(mcs) = select_mcs(rx, &params.mcs_table)? {
                bits.set(k, n, bits_per_period(s, mcs, symbols));
                mcs_idx.set(k, n, Some(mcs.index));
            }
        }
    }
    Ok(RateMatrix { bits, mcs_idx })
}
