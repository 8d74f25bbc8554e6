//! Acceptance criteria. Each test prints one `[PASS]`/`[FAIL]` line; run with
//! `cargo test -p heofdma-core --test acceptance -- --nocapture`.

use std::collections::HashMap;
use std::sync::OnceLock;
use std::time::Instant;

use heofdma::channel::max_ru_rate;
use heofdma::policies::{EsrmState, GammaUnits, WmmState};
use heofdma::sim::{median, PatternMode};
use heofdma::{
    brute_force_assignment, max_weight_assignment, path_loss, rate_matrix, received_power_dbm,
    run_campaign, run_drop, run_network, scaling_sweep, select_mcs, validate_schedule,
    write_results, CampaignConfig, ChannelState, Matrix, NetworkRealization, PolicyKind, RuPattern,
    SimParams, SweepPoint,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SWEEP_K: [usize; 5] = [4, 8, 12, 16, 20];

fn report(name: &str, ok: bool, detail: impl AsRef<str>) {
    println!("[{}] {name}: {}", if ok { "PASS" } else { "FAIL" }, detail.as_ref());
}

type SweepKey = (PolicyKind, PatternMode);

/// Default-parameter sweeps for every policy and pattern mode, computed once.
fn sweeps() -> &'static HashMap<SweepKey, Vec<SweepPoint>> {
    static CELL: OnceLock<HashMap<SweepKey, Vec<SweepPoint>>> = OnceLock::new();
    CELL.get_or_init(|| {
        let mut out = HashMap::new();
        for mode in [PatternMode::Single, PatternMode::Multi] {
            for policy in PolicyKind::ALL {
                let mut cfg = CampaignConfig::defaults(policy, mode);
                cfg.stations = SWEEP_K.to_vec();
                out.insert((policy, mode), scaling_sweep(&cfg).expect("sweep"));
            }
        }
        out
    })
}

fn at_k(points: &[SweepPoint], k: usize) -> &SweepPoint {
    points.iter().find(|p| p.k_count == k).expect("K in sweep")
}

#[test]
fn assignment_solver_matches_brute_force() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut mismatches = 0;
    let mut invalid = 0;
    let instances = 1000;
    for _ in 0..instances {
        let k = rng.random_range(1..=6);
        let n = rng.random_range(1..=6);
        let w = Matrix::from_fn(k, n, |_, _| rng.random_range(-10i32..=10) as f64);
        let fast = max_weight_assignment(&w).unwrap();
        let slow = brute_force_assignment(&w).unwrap();
        if fast.value != slow.value {
            mismatches += 1;
        }
        if validate_schedule(&fast.schedule).unwrap().is_some() {
            invalid += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let ok = mismatches == 0 && invalid == 0 && secs < 10.0;
    report(
        "assignment oracle equivalence",
        ok,
        format!("{instances} instances, {mismatches} value mismatches, {invalid} invalid schedules, {secs:.2}s"),
    );
    assert!(ok);
}

#[test]
fn mcs_boundaries_match_table() {
    let table = SimParams::default().mcs_table;
    let thresholds = [-82.0, -79.0, -77.0, -74.0, -70.0, -66.0, -65.0, -64.0, -59.0, -57.0];
    let mut failures = Vec::new();
    for (i, &thr) in thresholds.iter().enumerate() {
        let at = select_mcs(thr, &table).unwrap().map(|e| e.index);
        let below = select_mcs(thr.next_down(), &table).unwrap().map(|e| e.index);
        let expect_below = if i == 0 { None } else { Some(i as u8) };
        if at != Some(i as u8 + 1) {
            failures.push(format!("at {thr}: {at:?}"));
        }
        if below != expect_below {
            failures.push(format!("below {thr}: {below:?}"));
        }
    }
    let ok = failures.is_empty();
    report("MCS boundary table", ok, format!("20 assertions, failures: {failures:?}"));
    assert!(ok);
}

#[test]
fn channel_chain_spot_checks() {
    let pl1 = path_loss(1.0, 5.0).unwrap();
    let pl5 = path_loss(5.0, 5.0).unwrap();
    let pl15 = path_loss(15.0, 5.0).unwrap();
    let rx = received_power_dbm(RuPattern::RU26.per_ru_power_mw(20.0), 24, 60.404, 1.0);
    let mcs = select_mcs(rx, &SimParams::default().mcs_table).unwrap().map(|e| e.index);

    let params = SimParams::default();
    let net = NetworkRealization::from_distances(&[5.0], 20000.0, 5.0).unwrap();
    let ch = ChannelState {
        gains: Matrix::filled(1, 9, 1.0),
    };
    let bits = rate_matrix(&params, &net, &ch, RuPattern::RU26).unwrap().bits.at(0, 0);

    let ok = (pl1 - 46.425).abs() <= 1e-3
        && (pl5 - 60.404).abs() <= 1e-3
        && (pl15 - 77.104).abs() <= 1e-3
        && (rx + 63.749).abs() <= 5e-3
        && mcs == Some(8)
        && bits == 24000.0;
    report(
        "channel chain spot checks",
        ok,
        format!("PL(1,5,15) = {pl1:.4}, {pl5:.4}, {pl15:.4} dB; rx = {rx:.4} dBm -> MCS {mcs:?} -> {bits} bits"),
    );
    assert!(ok);
}

#[test]
fn queue_projection_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let k = 8;
    let r_min: Vec<f64> = (0..k).map(|_| rng.random_range(1.0..50000.0)).collect();
    let mut wmm = WmmState::new(k, 900.0, 136000.0, GammaUnits::RateNormalized, &r_min);
    let mut alt = WmmState::new(k, 900.0, 136000.0, GammaUnits::Dimensionless, &r_min);
    let mut esrm = EsrmState::new(k, 10.0);
    let mut violations = 0u64;
    for _ in 0..100_000 {
        let realized: Vec<f64> = (0..k)
            .map(|_| if rng.random_bool(0.3) { 0.0 } else { rng.random_range(0.0..136000.0) })
            .collect();
        let g = wmm.aux_step();
        wmm.queue_update(&realized, &g, &r_min);
        let g = alt.aux_step();
        alt.queue_update(&realized, &g, &r_min);
        esrm.queue_update(&realized, &r_min);
        violations += [&wmm.q, &alt.q, &esrm.z]
            .iter()
            .map(|q| q.iter().filter(|&&x| !(x >= 0.0)).count() as u64)
            .sum::<u64>();
    }
    let ok = violations == 0;
    report("queue non-negativity", ok, format!("10^5 updates, {violations} negative entries"));
    assert!(ok);
}

#[test]
fn wmm_queues_rate_stable_when_feasible() {
    let mut cfg = CampaignConfig::defaults(PolicyKind::Wmm, PatternMode::Single);
    cfg.sim.patterns = vec![RuPattern::RU106];
    cfg.r_min = 1.0;
    cfg.periods = 5000;
    let t = cfg.periods as f64;
    let networks = 10;
    let mut worst: f64 = 0.0;
    let mut lines = Vec::new();
    for id in 0..networks {
        let d = run_drop(&cfg, 2, id).unwrap();
        let ratios: Vec<f64> = d.final_queues.iter().map(|q| q / t).collect();
        worst = ratios.iter().copied().fold(worst, f64::max);
        lines.push(format!("{:?}", ratios.iter().map(|r| (r * 1e4).round() / 1e4).collect::<Vec<_>>()));
    }
    let ok = worst < 0.01;
    report(
        "WMM queue stability (K=N=2, r_min=1, T=5000)",
        ok,
        format!("max Q_k[T]/T over {networks} drops = {worst:.4}; per drop {}", lines.join(" ")),
    );
    assert!(ok);
}

#[test]
fn min_throughput_cdf_percentiles() {
    let s = sweeps();
    let single = at_k(&s[&(PolicyKind::Wmm, PatternMode::Single)], 12);
    let multi = at_k(&s[&(PolicyKind::Wmm, PatternMode::Multi)], 12);
    let fb_single = heofdma::fraction_below(&single.result.min_throughputs(), 20000.0);
    let fb_multi = heofdma::fraction_below(&multi.result.min_throughputs(), 20000.0);
    let single_ok = (0.85..=1.0).contains(&fb_single);
    let multi_ok = (0.0..=0.15).contains(&fb_multi);
    report(
        "Min-throughput CDF, single pattern (K=12): WMM fraction below r_min in [0.85, 1]",
        single_ok,
        format!("{fb_single:.3} (median min throughput {:.0} bits/period)", median(&single.result.min_throughputs())),
    );
    report(
        "Min-throughput CDF, multi pattern (K=12): WMM fraction below r_min in [0, 0.15]",
        multi_ok,
        format!("{fb_multi:.3} (median min throughput {:.0} bits/period)", median(&multi.result.min_throughputs())),
    );
    assert!(single_ok && multi_ok);
}

#[test]
fn wmm_beats_benchmarks() {
    let s = sweeps();
    let mut all_ok = true;
    for mode in [PatternMode::Single, PatternMode::Multi] {
        let med = |p: PolicyKind| median(&at_k(&s[&(p, mode)], 12).result.min_throughputs());
        let (w, pf, es) = (med(PolicyKind::Wmm), med(PolicyKind::Pf), med(PolicyKind::Esrm));
        let ok = w > pf && w > es;
        all_ok &= ok;
        report(
            &format!("policy ordering, median min throughput K=12 ({})", mode.name()),
            ok,
            format!("WMM {w:.0} PF {pf:.0} ESRM {es:.0}"),
        );

        let mean_at = |p: PolicyKind, k| at_k(&s[&(p, mode)], k).mean_min_throughput;
        let mut rows = Vec::new();
        let mut ok = true;
        for k in SWEEP_K {
            let (w, pf, es) = (mean_at(PolicyKind::Wmm, k), mean_at(PolicyKind::Pf, k), mean_at(PolicyKind::Esrm, k));
            ok &= w >= pf && w >= es;
            rows.push(format!("K={k}: {w:.0}/{pf:.0}/{es:.0}"));
        }
        all_ok &= ok;
        report(
            &format!("policy ordering, sweep mean min throughput WMM/PF/ESRM ({})", mode.name()),
            ok,
            rows.join(", "),
        );
    }
    assert!(all_ok);
}

#[test]
fn campaign_output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let mut bytes = Vec::new();
    for workers in [1, 4] {
        let mut cfg = CampaignConfig::defaults(PolicyKind::Wmm, PatternMode::Single);
        cfg.workers = Some(workers);
        let res = run_campaign(&cfg, 12).unwrap();
        let out = dir.path().join(format!("w{workers}"));
        let bundle = write_results(&res, &out).unwrap();
        bytes.push(std::fs::read(bundle.drops_csv).unwrap());
    }
    let ok = bytes[0] == bytes[1] && !bytes[0].is_empty();
    report(
        "determinism of drops.csv across worker counts",
        ok,
        format!("{} bytes, identical = {}", bytes[0].len(), bytes[0] == bytes[1]),
    );
    assert!(ok);
}

#[test]
fn symmetric_stations_get_equal_throughput() {
    let mut cfg = CampaignConfig::defaults(PolicyKind::Wmm, PatternMode::Single);
    cfg.sim.patterns = vec![RuPattern::RU106];
    cfg.periods = 10_000;
    let net = NetworkRealization::from_distances(&[8.0, 8.0], cfg.r_min, cfg.sim.carrier_freq_ghz).unwrap();
    let d = run_network(&cfg, &net, 0).unwrap();
    let (a, b) = (d.per_station_throughput[0], d.per_station_throughput[1]);
    let rel = (a - b).abs() / a.max(b);
    let ok = rel < 0.05 && a > 0.0;
    report(
        "symmetric fairness (K=N=2, 10^4 periods)",
        ok,
        format!("throughputs {a:.1} / {b:.1} bits/period, relative gap {rel:.4}"),
    );
    assert!(ok);
}

// Not an exit criterion: average minimum throughput should not grow with K
// (one inversion of at most 2% tolerated).
#[test]
fn min_throughput_non_increasing_in_k() {
    let s = sweeps();
    for ((policy, mode), points) in s {
        let means: Vec<f64> = SWEEP_K.iter().map(|&k| at_k(points, k).mean_min_throughput).collect();
        let inversions: Vec<f64> = means
            .windows(2)
            .filter(|w| w[1] > w[0])
            .map(|w| (w[1] - w[0]) / w[0].max(f64::MIN_POSITIVE))
            .collect();
        let ok = inversions.len() <= 1 && inversions.iter().all(|&r| r <= 0.02);
        assert!(ok, "{policy} {}: means {means:?}", mode.name());
    }
}

#[test]
fn max_rate_covers_all_patterns() {
    let mut params = SimParams::default();
    params.patterns = heofdma::domain::default_multi_patterns();
    assert_eq!(max_ru_rate(&params).unwrap(), 136000.0);
}
