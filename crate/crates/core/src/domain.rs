//! Value types shared by the channel model, the assignment solver, the
//! scheduling policies and the campaign engine.
//!
//! All matrices are dense, row-major, indexed `(station, ru)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense row-major matrix. Rows are stations, columns are resource units.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Clone> Matrix<T> {
    pub fn filled(rows: usize, cols: usize, value: T) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }
}

impl<T> Matrix<T> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Builds a matrix from nested rows. All rows must have the same length.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(n_rows * n_cols);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n_cols {
                return Err(Error::Input(format!(
                    "row {i} has {} entries, expected {n_cols}",
                    row.len()
                )));
            }
            data.extend(row);
        }
        Ok(Matrix {
            rows: n_rows,
            cols: n_cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, r: usize, c: usize) -> &T {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: T) {
        self.data[r * self.cols + c] = value;
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn map<U>(&self, mut f: impl FnMut(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(&mut f).collect(),
        }
    }
}

impl<T: Copy> Matrix<T> {
    pub fn at(&self, r: usize, c: usize) -> T {
        self.data[r * self.cols + c]
    }
}

/// A partition of the channel into `n_rus` equal resource units of
/// `data_subcarriers` data tones each.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RuPattern {
    pub n_rus: usize,
    pub data_subcarriers: usize,
}

impl RuPattern {
    pub const fn new(n_rus: usize, data_subcarriers: usize) -> Self {
        RuPattern {
            n_rus,
            data_subcarriers,
        }
    }

    /// 26-tone RUs on a 20 MHz channel.
    pub const RU26: RuPattern = RuPattern::new(9, 24);
    /// 52-tone RUs on a 20 MHz channel.
    pub const RU52: RuPattern = RuPattern::new(4, 48);
    /// 106-tone RUs on a 20 MHz channel.
    pub const RU106: RuPattern = RuPattern::new(2, 102);

    /// Equal split of the AP power budget over the RUs, in mW.
    pub fn per_ru_power_mw(&self, p_total_dbm: f64) -> f64 {
        dbm_to_mw(p_total_dbm) / self.n_rus as f64
    }
}

pub fn default_multi_patterns() -> Vec<RuPattern> {
    vec![RuPattern::RU26, RuPattern::RU52, RuPattern::RU106]
}

pub fn dbm_to_mw(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0)
}

/// Convolutional code rate as an exact fraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeRate {
    pub num: u32,
    pub den: u32,
}

impl CodeRate {
    pub const fn new(num: u32, den: u32) -> Self {
        CodeRate { num, den }
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

/// One row of the MCS table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McsEntry {
    /// 1-based MCS index.
    pub index: u8,
    /// log2 of the constellation size.
    pub bits_per_symbol: u32,
    pub code_rate: CodeRate,
    /// Minimum per-subcarrier received power (dBm) at which this MCS is usable.
    pub min_rx_power_dbm: f64,
}

impl McsEntry {
    const fn new(index: u8, bits_per_symbol: u32, code_rate: CodeRate, min_rx: f64) -> Self {
        McsEntry {
            index,
            bits_per_symbol,
            code_rate,
            min_rx_power_dbm: min_rx,
        }
    }

    /// Information bits per data subcarrier per OFDM symbol.
    pub fn spectral_efficiency(&self) -> f64 {
        self.bits_per_symbol as f64 * self.code_rate.value()
    }
}

/// MCS 0..9 of the 20 MHz HE table, renumbered 1..10, capped at 256-QAM 5/6.
pub fn default_mcs_table() -> Vec<McsEntry> {
    use CodeRate as R;
    vec![
        McsEntry::new(1, 1, R::new(1, 2), -82.0),
        McsEntry::new(2, 2, R::new(1, 2), -79.0),
        McsEntry::new(3, 2, R::new(3, 4), -77.0),
        McsEntry::new(4, 4, R::new(1, 2), -74.0),
        McsEntry::new(5, 4, R::new(3, 4), -70.0),
        McsEntry::new(6, 6, R::new(2, 3), -66.0),
        McsEntry::new(7, 6, R::new(3, 4), -65.0),
        McsEntry::new(8, 6, R::new(5, 6), -64.0),
        McsEntry::new(9, 8, R::new(3, 4), -59.0),
        McsEntry::new(10, 8, R::new(5, 6), -57.0),
    ]
}

/// Physical and protocol constants of a simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimParams {
    pub carrier_freq_ghz: f64,
    pub d_max_m: f64,
    pub d_min_m: f64,
    pub p_total_dbm: f64,
    pub t_ofdm_us: f64,
    pub t_dl_ms: f64,
    /// RU patterns the scheduler may choose from in every period.
    pub patterns: Vec<RuPattern>,
    pub mcs_table: Vec<McsEntry>,
    pub master_seed: u64,
}

impl Default for SimParams {
    fn default() -> Self {
        SimParams {
            carrier_freq_ghz: 5.0,
            d_max_m: 15.0,
            d_min_m: 1.0,
            p_total_dbm: 20.0,
            t_ofdm_us: 16.0,
            t_dl_ms: 3.2,
            patterns: vec![RuPattern::RU26],
            mcs_table: default_mcs_table(),
            master_seed: 1,
        }
    }
}

impl SimParams {
    /// Number of OFDM symbols in one DL transmission, T_DL / T_OFDM.
    pub fn symbol_count(&self) -> Result<u64> {
        if !(self.t_ofdm_us > 0.0) || !(self.t_dl_ms > 0.0) {
            return Err(Error::config("t_ofdm_us", "symbol and transmission durations must be positive"));
        }
        let ratio = self.t_dl_ms * 1000.0 / self.t_ofdm_us;
        let rounded = ratio.round();
        if (ratio - rounded).abs() > 1e-9 * ratio.max(1.0) || rounded < 1.0 {
            return Err(Error::config(
                "t_dl_ms",
                format!("T_DL/T_OFDM = {ratio} is not a positive integer"),
            ));
        }
        Ok(rounded as u64)
    }

    pub fn validate(&self) -> Result<()> {
        self.symbol_count()?;
        if !(self.carrier_freq_ghz > 0.0) {
            return Err(Error::config("carrier_freq_ghz", "must be positive"));
        }
        if !(self.d_min_m >= 1.0) {
            return Err(Error::config("d_min_m", "must be at least 1 m"));
        }
        if !(self.d_min_m < self.d_max_m) {
            return Err(Error::config("d_max_m", "must exceed d_min_m"));
        }
        if !self.p_total_dbm.is_finite() {
            return Err(Error::config("p_total_dbm", "must be finite"));
        }
        if self.patterns.is_empty() {
            return Err(Error::config("patterns", "at least one RU pattern is required"));
        }
        for p in &self.patterns {
            if p.n_rus == 0 || p.data_subcarriers == 0 {
                return Err(Error::config("patterns", format!("degenerate pattern {p:?}")));
            }
        }
        if self.mcs_table.is_empty() {
            return Err(Error::config("mcs_table", "empty MCS table"));
        }
        for w in self.mcs_table.windows(2) {
            if !(w[0].index < w[1].index
                && w[0].min_rx_power_dbm < w[1].min_rx_power_dbm
                && w[0].spectral_efficiency() < w[1].spectral_efficiency())
            {
                return Err(Error::config(
                    "mcs_table",
                    format!("entries {} and {} are not strictly increasing", w[0].index, w[1].index),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationConfig {
    pub id: usize,
    pub distance_m: f64,
    /// Minimum throughput requirement in bits per scheduling period.
    pub r_min: f64,
    pub path_loss_db: f64,
}

/// Small-scale power gains `g[k][n]` for one scheduling period and one RU pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelState {
    pub gains: Matrix<f64>,
}

/// Achievable bits per scheduling period for every (station, RU) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct RateMatrix {
    pub bits: Matrix<f64>,
    /// Selected MCS index per entry, `None` when the link is below sensitivity.
    pub mcs_idx: Matrix<Option<u8>>,
}

impl RateMatrix {
    pub fn dims(&self) -> (usize, usize) {
        self.bits.dims()
    }

    pub fn from_bits(bits: Matrix<f64>) -> Self {
        let mcs_idx = bits.map(|&b| if b > 0.0 { Some(0) } else { None });
        RateMatrix { bits, mcs_idx }
    }
}

/// Binary station-to-RU assignment for one period.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScheduleMatrix {
    pub assign: Matrix<u8>,
}

impl ScheduleMatrix {
    pub fn empty(k: usize, n: usize) -> Self {
        ScheduleMatrix {
            assign: Matrix::filled(k, n, 0),
        }
    }

    pub fn from_pairs(k: usize, n: usize, pairs: &[(usize, usize)]) -> Self {
        let mut m = Self::empty(k, n);
        for &(s, r) in pairs {
            m.assign.set(s, r, 1);
        }
        m
    }

    pub fn dims(&self) -> (usize, usize) {
        self.assign.dims()
    }

    /// `(station, ru)` pairs in station order.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let (k, n) = self.dims();
        let mut out = Vec::new();
        for s in 0..k {
            for r in 0..n {
                if self.assign.at(s, r) != 0 {
                    out.push((s, r));
                }
            }
        }
        out
    }

    /// Objective `sum s[k][n] * w[k][n]`.
    pub fn value(&self, w: &Matrix<f64>) -> f64 {
        self.pairs().iter().map(|&(s, r)| w.at(s, r)).sum()
    }
}

/// Why a schedule breaks the RU allocation rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Violation {
    /// Two or more stations share this RU.
    SharedRu { column: usize },
    /// This station holds more than one RU.
    MultipleRus { row: usize },
}

/// Checks that every RU carries at most one station and every station holds
/// at most one RU. Columns are checked before rows.
pub fn validate_schedule(m: &ScheduleMatrix) -> Result<Option<Violation>> {
    let (k, n) = m.dims();
    if let Some(pos) = m.assign.as_slice().iter().position(|&v| v > 1) {
        return Err(Error::Input(format!(
            "non-binary schedule entry at ({}, {})",
            pos / n,
            pos % n
        )));
    }
    for c in 0..n {
        let sum: u32 = (0..k).map(|r| m.assign.at(r, c) as u32).sum();
        if sum > 1 {
            return Ok(Some(Violation::SharedRu { column: c }));
        }
    }
    for r in 0..k {
        let sum: u32 = m.assign.row(r).iter().map(|&v| v as u32).sum();
        if sum > 1 {
            return Ok(Some(Violation::MultipleRus { row: r }));
        }
    }
    Ok(None)
}

/// Bits delivered to station `k` this period: `sum_n s[k][n] * r[k][n]`.
pub fn station_rate(m: &ScheduleMatrix, r: &RateMatrix, k: usize) -> f64 {
    m.assign
        .row(k)
        .iter()
        .zip(r.bits.row(k))
        .filter(|(&s, _)| s != 0)
        .map(|(_, &b)| b)
        .sum()
}

/// Outcome of one network realization simulated for T periods.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DropResult {
    pub network_id: u64,
    /// Empirical mean of delivered bits per period, indexed by station id.
    pub per_station_throughput: Vec<f64>,
    pub min_throughput: f64,
    pub final_queues: Vec<f64>,
    /// How often each configured RU pattern was chosen.
    pub pattern_usage: Vec<u64>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sched(rows: Vec<Vec<u8>>) -> ScheduleMatrix {
        ScheduleMatrix {
            assign: Matrix::from_rows(rows).unwrap(),
        }
    }

    #[test]
    fn identity_is_valid() {
        assert_eq!(validate_schedule(&sched(vec![vec![1, 0], vec![0, 1]])).unwrap(), None);
    }

    #[test]
    fn shared_ru_reports_column() {
        assert_eq!(
            validate_schedule(&sched(vec![vec![1, 0], vec![1, 0]])).unwrap(),
            Some(Violation::SharedRu { column: 0 })
        );
    }

    #[test]
    fn station_on_two_rus_reports_row() {
        assert_eq!(
            validate_schedule(&sched(vec![vec![1, 1]])).unwrap(),
            Some(Violation::MultipleRus { row: 0 })
        );
    }

    #[test]
    fn non_binary_is_input_error() {
        assert!(matches!(
            validate_schedule(&sched(vec![vec![2, 0]])),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn station_rate_examples() {
        let bits = Matrix::from_rows(vec![vec![5.0, 7.0], vec![11.0, 13.0]]).unwrap();
        let r = RateMatrix::from_bits(bits);
        let m = sched(vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(station_rate(&m, &r, 0), 7.0);
        assert_eq!(station_rate(&m, &r, 1), 11.0);

        let single = RateMatrix::from_bits(Matrix::from_rows(vec![vec![32000.0, 1.0]]).unwrap());
        assert_eq!(station_rate(&ScheduleMatrix::from_pairs(1, 2, &[(0, 0)]), &single, 0), 32000.0);
        assert_eq!(station_rate(&ScheduleMatrix::empty(1, 2), &single, 0), 0.0);
    }

    #[test]
    fn default_params_are_valid() {
        let p = SimParams::default();
        p.validate().unwrap();
        assert_eq!(p.symbol_count().unwrap(), 200);
        let table = default_mcs_table();
        assert_eq!(table[0].spectral_efficiency(), 0.5);
        assert!((table[9].spectral_efficiency() - 20.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn invalid_params_are_rejected() {
        let mut p = SimParams::default();
        p.t_dl_ms = 3.21;
        assert!(p.validate().is_err());
        let mut p = SimParams::default();
        p.d_min_m = 0.5;
        assert!(p.validate().is_err());
        let mut p = SimParams::default();
        p.patterns.clear();
        assert!(p.validate().is_err());
    }

    #[test]
    fn from_rows_rejects_ragged() {
        assert!(Matrix::from_rows(vec![vec![1.0], vec![1.0, 2.0]]).is_err());
    }
}
