//! Downlink OFDMA scheduling for 802.11ax with minimum-throughput targets.
//!
//! The crate contains the link model (path loss, Rayleigh block fading, MCS
//! selection), a Hungarian max-weight assignment solver, three schedulers
//! (weighted max-min drift-plus-penalty, proportional fairness and
//! throughput-constrained sum-rate drift-plus-penalty) and a Monte-Carlo
//! campaign engine that evaluates them over random network drops.

pub mod assignment;
pub mod channel;
pub mod config;
pub mod domain;
pub mod error;
pub mod output;
pub mod policies;
pub mod sim;

pub use assignment::{brute_force_assignment, max_weight_assignment, Assignment, WeightMatrix};
pub use channel::{
    bits_per_period, draw_fading, path_loss, place_stations, rate_matrix, received_power_dbm,
    select_mcs, NetworkRealization,
};
pub use config::{parse_config, ConfigOverrides, StationCounts};
pub use domain::{
    station_rate, validate_schedule, ChannelState, DropResult, Matrix, McsEntry, RateMatrix,
    RuPattern, ScheduleMatrix, SimParams, StationConfig, Violation,
};
pub use error::{Error, Result};
pub use output::{write_results, write_sweep, OutputBundle, Summary};
pub use policies::{Decision, GammaUnits, PolicyKind, PolicyParams, PolicyState};
pub use sim::{
    empirical_cdf, fraction_below, run_campaign, run_drop, run_network, scaling_sweep, CampaignConfig,
    CampaignResult, PatternMode, SweepPoint,
};
