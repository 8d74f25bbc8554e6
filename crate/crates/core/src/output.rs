//! Result files written by the command-line tool.
//!
//! Per campaign directory:
//! * `drops.csv`: `network_id,station_id,throughput_bits_per_period`
//! * `cdf.csv`: `x_bits_per_period,cdf`, empirical CDF of per-drop minima
//! * `summary.json`: config echo and min-throughput statistics
//!
//! A sweep additionally writes `sweep.csv` and `sweep.json` at the top level
//! and one campaign directory `k<K>/` per station count.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::{empirical_cdf, fraction_below, mean, median, CampaignConfig, CampaignResult, SweepPoint};

pub const SUMMARY_SCHEMA: &str = "heofdma.summary.v1";
pub const SWEEP_SCHEMA: &str = "heofdma.sweep.v1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub schema: String,
    pub unit: String,
    pub policy: String,
    pub pattern_mode: String,
    pub k_count: usize,
    pub r_min: f64,
    pub min_throughputs: Vec<f64>,
    pub mean_min_throughput: f64,
    pub median_min_throughput: f64,
    pub fraction_below_r_min: f64,
    /// Times each configured pattern was chosen, summed over drops.
    pub pattern_usage: Vec<u64>,
    pub config: CampaignConfig,
}

impl Summary {
    pub fn from_result(result: &CampaignResult) -> Self {
        let mins = result.min_throughputs();
        let cfg = &result.config;
        let mut usage = vec![0u64; cfg.sim.patterns.len()];
        for d in &result.drops {
            for (u, x) in usage.iter_mut().zip(&d.pattern_usage) {
                *u += x;
            }
        }
        Summary {
            schema: SUMMARY_SCHEMA.into(),
            unit: "bits_per_period".into(),
            policy: cfg.policy.name().into(),
            pattern_mode: cfg.pattern_mode.name().into(),
            k_count: result.k_count,
            r_min: cfg.r_min,
            mean_min_throughput: mean(&mins),
            median_min_throughput: median(&mins),
            fraction_below_r_min: fraction_below(&mins, cfg.r_min),
            min_throughputs: mins,
            pattern_usage: usage,
            config: cfg.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub stations: usize,
    pub mean_min_throughput: f64,
    pub dir: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub schema: String,
    pub unit: String,
    pub policy: String,
    pub pattern_mode: String,
    pub points: Vec<SweepEntry>,
}

/// Paths of the files produced for one campaign.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputBundle {
    pub drops_csv: PathBuf,
    pub summary_json: PathBuf,
    pub cdf_csv: PathBuf,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_writer(path: &Path) -> Result<csv::Writer<File>> {
    csv::Writer::from_path(path).map_err(|source| Error::Csv {
        path: path.to_path_buf(),
        source,
    })
}

fn write_csv<I, R>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let wrap = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv_writer(path)?;
    w.write_record(header).map_err(wrap)?;
    for row in rows {
        w.write_record(row).map_err(wrap)?;
    }
    w.flush().map_err(io_err(path))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut out = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut out, value).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })?;
    out.write_all(b"\n").map_err(io_err(path))?;
    out.flush().map_err(io_err(path))
}

/// Writes `drops.csv`, `summary.json` and `cdf.csv` into `dir`, creating it
/// if needed.
pub fn write_results(result: &CampaignResult, dir: &Path) -> Result<OutputBundle> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let bundle = OutputBundle {
        drops_csv: dir.join("drops.csv"),
        summary_json: dir.join("summary.json"),
        cdf_csv: dir.join("cdf.csv"),
    };

    write_csv(
        &bundle.drops_csv,
        &["network_id", "station_id", "throughput_bits_per_period"],
        result.drops.iter().flat_map(|d| {
            d.per_station_throughput
                .iter()
                .enumerate()
                .map(move |(k, x)| vec![d.network_id.to_string(), k.to_string(), x.to_string()])
        }),
    )?;

    let summary = Summary::from_result(result);
    let cdf = empirical_cdf(&summary.min_throughputs)?;
    write_csv(
        &bundle.cdf_csv,
        &["x_bits_per_period", "cdf"],
        cdf.iter().map(|(x, f)| vec![x.to_string(), f.to_string()]),
    )?;
    write_json(&bundle.summary_json, &summary)?;
    Ok(bundle)
}

/// Writes one campaign directory per station count plus `sweep.csv` and
/// `sweep.json` in `dir`.
pub fn write_sweep(points: &[SweepPoint], dir: &Path) -> Result<SweepSummary> {
    let first = points
        .first()
        .ok_or_else(|| Error::Input("empty sweep".into()))?;
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut entries = Vec::with_capacity(points.len());
    for p in points {
        let sub = format!("k{}", p.k_count);
        write_results(&p.result, &dir.join(&sub))?;
        entries.push(SweepEntry {
            stations: p.k_count,
            mean_min_throughput: p.mean_min_throughput,
            dir: sub,
        });
    }
    write_csv(
        &dir.join("sweep.csv"),
        &["stations", "mean_min_throughput_bits_per_period"],
        entries
            .iter()
            .map(|e| vec![e.stations.to_string(), e.mean_min_throughput.to_string()]),
    )?;
    let cfg = &first.result.config;
    let summary = SweepSummary {
        schema: SWEEP_SCHEMA.into(),
        unit: "bits_per_period".into(),
        policy: cfg.policy.name().into(),
        pattern_mode: cfg.pattern_mode.name().into(),
        points: entries,
    };
    write_json(&dir.join("sweep.json"), &summary)?;
    Ok(summary)
}
