use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;

use heofdma::{parse_config, run_campaign, scaling_sweep, write_results, write_sweep, ConfigOverrides, StationCounts};

/// Monte-Carlo simulator for 802.11ax downlink OFDMA schedulers.
///
/// Flags override values from --config, which override built-in defaults.
/// With one --stations value the campaign is written to --out; with several,
/// a scaling sweep is written with one sub-directory per station count.
#[derive(Debug, Parser)]
#[command(name = "heofdma", version)]
struct Cli {
    /// TOML config file with flat campaign keys.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Scheduler: wmm, pf or esrm.
    #[arg(long)]
    policy: Option<String>,

    /// RU patterns: single (9x24) or multi (9x24, 4x48, 2x102).
    #[arg(long = "pattern-mode")]
    pattern_mode: Option<String>,

    /// Number of stations; repeat for a scaling sweep.
    #[arg(long = "stations")]
    stations: Vec<usize>,

    /// Minimum throughput per station, bits per scheduling period.
    #[arg(long = "rmin", allow_hyphen_values = true)]
    r_min: Option<f64>,

    /// Scheduling periods per network drop.
    #[arg(long, allow_hyphen_values = true)]
    periods: Option<i64>,

    /// Number of network drops.
    #[arg(long, allow_hyphen_values = true)]
    networks: Option<i64>,

    /// Master RNG seed.
    #[arg(long)]
    seed: Option<u64>,

    /// WMM control parameter V.
    #[arg(long, allow_hyphen_values = true)]
    v: Option<f64>,

    /// ESRM control parameter.
    #[arg(long = "v-esr", allow_hyphen_values = true)]
    v_esr: Option<f64>,

    /// PF moving-average smoothing factor.
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<f64>,

    /// Worker threads (defaults to all cores).
    #[arg(long)]
    workers: Option<usize>,

    /// Output directory.
    #[arg(long, default_value = "results")]
    out: PathBuf,
}

impl Cli {
    fn overrides(&self) -> ConfigOverrides {
        ConfigOverrides {
            policy: self.policy.clone(),
            pattern_mode: self.pattern_mode.clone(),
            stations: (!self.stations.is_empty()).then(|| StationCounts::Many(self.stations.clone())),
            r_min: self.r_min,
            periods: self.periods,
            networks: self.networks,
            seed: self.seed,
            v: self.v,
            v_esr: self.v_esr,
            beta: self.beta,
            workers: self.workers,
            ..ConfigOverrides::default()
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let cfg = parse_config(cli.config.as_deref(), &cli.overrides())?;
    if let [k] = cfg.stations[..] {
        let result = run_campaign(&cfg, k).context("campaign failed")?;
        let bundle = write_results(&result, &cli.out)?;
        let summary = heofdma::Summary::from_result(&result);
        println!(
            "{} {} K={k}: mean min throughput {:.1} bits/period, median {:.1}, below r_min {:.3}",
            cfg.policy,
            cfg.pattern_mode.name(),
            summary.mean_min_throughput,
            summary.median_min_throughput,
            summary.fraction_below_r_min
        );
        println!("wrote {}", bundle.summary_json.display());
    } else {
        let points = scaling_sweep(&cfg).context("sweep failed")?;
        write_sweep(&points, &cli.out)?;
        for p in &points {
            println!(
                "{} {} K={}: mean min throughput {:.1} bits/period",
                cfg.policy,
                cfg.pattern_mode.name(),
                p.k_count,
                p.mean_min_throughput
            );
        }
        println!("wrote {}", cli.out.join("sweep.json").display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
