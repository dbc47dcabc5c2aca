//! Curve tables and summaries for each figure preset.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use mimo_duel::analytic::{self, InterferencePmf};
use mimo_duel::beamform::Scheme;
use mimo_duel::metrics::{ks_one_sample, ks_statistic, SampleSet};
use mimo_duel::montecarlo::{
    beam_law_interference_samples, run_probe_experiment, run_rate_experiment, ProbeGeometry, ProbeResult,
    RateResult, SimulationConfig,
};
use mimo_duel::topology::Point;
use mimo_duel::SystemKind;

use crate::config::{Figure, NEAR_BS_PROBE, NEAR_CENTER_PROBE};
use crate::table::{linear_grid, log_grid, pooled_range, scheme_series, series_name, CurveTable};
use crate::{CliError, Result};

pub const DOF_PRESETS: [usize; 3] = [1, 5, 9];
const GRID_POINTS: usize = 200;
const PMF_BINS: usize = 4096;

/// Files written for one figure.
#[derive(Debug, Clone)]
pub struct FigureOutput {
    pub table: CurveTable,
    pub summary: Value,
    pub csv: PathBuf,
    pub json: PathBuf,
}

fn base_meta(config: &SimulationConfig, figure: &str) -> BTreeMap<String, String> {
    let mut m = BTreeMap::new();
    m.insert("figure".into(), figure.into());
    m.insert("config_hash".into(), format!("{:016x}", config.config_hash()));
    m.insert("seed".into(), config.seed.to_string());
    m.insert("trials".into(), config.trials.to_string());
    m.insert("version".into(), concat!("mimo-duel ", env!("CARGO_PKG_VERSION")).into());
    m
}

fn dof_of(config: &SimulationConfig) -> Result<usize> {
    config
        .dof()
        .ok_or_else(|| CliError::config("K", "K exceeds M so no spatial degrees of freedom remain"))
}

/// Signal-power CCDFs at a probe for `ζ ∈ {1, 5, 9}`.
pub fn signal_figure(config: &SimulationConfig, probe: Point, name: &str) -> Result<(CurveTable, Value)> {
    let mut runs = Vec::new();
    for zeta in DOF_PRESETS {
        let cfg = config.clone().with_dof(zeta)?;
        runs.push((zeta, cfg.clone(), run_probe_experiment(&cfg, probe)?));
    }
    let sets: Vec<&SampleSet> = runs.iter().flat_map(|(_, _, r)| r.kinds.values().map(|k| &k.signal)).collect();
    let (lo, hi) = pooled_range(&sets, 1e-3)?;
    let x = log_grid(lo, hi, GRID_POINTS);
    let mut table = CurveTable::new("signal_power_w", x.clone())?;
    table.meta = base_meta(config, name);
    table.meta.insert("probe".into(), format!("({}, {})", probe.x, probe.y));
    let mut summary = BTreeMap::new();
    for (zeta, cfg, r) in &runs {
        let laws = signal_laws(cfg, r)?;
        for kind in SystemKind::ALL {
            let s = &r.kinds[&kind].signal;
            let series = scheme_series(kind, cfg.scheme, *zeta);
            table.push(series.clone(), x.iter().map(|&v| s.ccdf_at(v)).collect());
            let law = laws[&kind];
            summary.insert(
                series,
                json!({
                    "median": s.quantile(0.5)?,
                    "mean": s.mean()?,
                    "law_shape": law.shape,
                    "law_scale": law.scale,
                    "ks_to_law": ks_one_sample(s.values(), |v| law.cdf(v))?,
                }),
            );
        }
        let lsm = laws[&SystemKind::LsMimo];
        let nm = laws[&SystemKind::NetworkMimo];
        summary.insert(format!("dominance_dof{zeta}"), json!(analytic::dominance_predicate(&lsm, &nm)));
        summary.insert(format!("max_zf_leakage_dof{zeta}"), json!(r.max_zf_leakage));
    }
    Ok((table, json!(summary)))
}

/// Signal laws at the probe: LS-MIMO against the serving BS, network MIMO
/// from the composite channel.
pub fn signal_laws(config: &SimulationConfig, r: &ProbeResult) -> Result<BTreeMap<SystemKind, analytic::GammaParams>> {
    let topo = config.topology()?;
    let g = ProbeGeometry::new(config, r.position)?;
    let (b, m) = (config.bs_per_cluster, config.antennas_per_bs);
    let kc = b * config.users_per_bs;
    let mut out = BTreeMap::new();
    out.insert(SystemKind::LsMimo, analytic::signal_dist_lsm(b, m, kc, g.serving_beta(&topo))?);
    out.insert(SystemKind::NetworkMimo, analytic::signal_dist_nm(b, m, kc, g.own.betas())?);
    Ok(out)
}

/// Interference CDFs: simulated, sampled from single-beam laws, and the
/// per-cluster Gamma laws convolved.
pub fn interference_figure(config: &SimulationConfig, probe: Point) -> Result<(CurveTable, Value)> {
    let zeta = dof_of(config)?;
    let r = run_probe_experiment(config, probe)?;
    let g = ProbeGeometry::new(config, r.position)?;
    let k = config.users_per_bs;
    let mut beam_law = BTreeMap::new();
    for kind in SystemKind::ALL {
        beam_law.insert(kind, beam_law_interference_samples(kind, &g, k, config.trials, config.seed)?);
    }
    let mut sets: Vec<&SampleSet> = r.kinds.values().map(|s| &s.interference).collect();
    sets.extend(beam_law.values());
    let (lo, hi) = pooled_range(&sets, 1e-3)?;
    let x = log_grid(lo, hi, GRID_POINTS);
    let mut table = CurveTable::new("interference_power_w", x.clone())?;
    table.meta = base_meta(config, "fig5");
    table.meta.insert("probe".into(), format!("({}, {})", probe.x, probe.y));

    let mut summary = BTreeMap::new();
    for kind in SystemKind::ALL {
        let s = &r.kinds[&kind].interference;
        table.push(scheme_series(kind, config.scheme, zeta), x.iter().map(|&v| s.cdf_at(v)).collect());
    }
    for kind in SystemKind::ALL {
        let s = &beam_law[&kind];
        table.push(series_name(kind, "beamlaw", zeta), x.iter().map(|&v| s.cdf_at(v)).collect());
    }
    let mut laws = BTreeMap::new();
    for kind in SystemKind::ALL {
        let l = g.interference_laws(kind, k)?;
        let pmf = InterferencePmf::new(&l, PMF_BINS)?;
        table.push(series_name(kind, "approx", zeta), x.iter().map(|&v| pmf.cdf(v)).collect());
        laws.insert(kind, l);
    }
    let lsm = &r.kinds[&SystemKind::LsMimo].interference;
    let nm = &r.kinds[&SystemKind::NetworkMimo].interference;
    summary.insert("ks_lsm_vs_nm".to_string(), json!(ks_statistic(lsm, nm)?));
    summary.insert(
        "ks_beamlaw_lsm_vs_nm".to_string(),
        json!(ks_statistic(&beam_law[&SystemKind::LsMimo], &beam_law[&SystemKind::NetworkMimo])?),
    );
    summary.insert("laws_identical".to_string(), json!(laws[&SystemKind::LsMimo] == laws[&SystemKind::NetworkMimo]));
    for kind in SystemKind::ALL {
        summary.insert(format!("{}_mean", kind.tag()), json!(r.kinds[&kind].interference.mean()?));
    }
    summary.insert(
        "law_mean".to_string(),
        json!(laws[&SystemKind::LsMimo].iter().map(|p| p.mean()).sum::<f64>()),
    );
    Ok((table, json!(summary)))
}

fn percentile_summary(s: &SampleSet, weight: f64) -> Result<Value> {
    Ok(json!({
        "p10": s.quantile(0.1)?,
        "p50": s.quantile(0.5)?,
        "p90": s.quantile(0.9)?,
        "mean": s.mean()?,
        "weighted_p10": weight * s.quantile(0.1)?,
        "samples": s.len(),
    }))
}

/// Relative improvement of LS-MIMO over network MIMO in 10th-percentile
/// user ergodic rate, in percent.
pub fn p10_gain(r: &RateResult, scheme: Scheme) -> Result<f64> {
    gain_of(&r.user_rates, scheme)
}

/// Same as [`p10_gain`] on instantaneous per-slot rates.
pub fn p10_gain_instantaneous(r: &RateResult, scheme: Scheme) -> Result<f64> {
    gain_of(&r.rates, scheme)
}

fn gain_of(sets: &BTreeMap<(SystemKind, Scheme), SampleSet>, scheme: Scheme) -> Result<f64> {
    let get = |kind| {
        sets.get(&(kind, scheme))
            .ok_or_else(|| CliError::Core(mimo_duel::Error::Usage(format!("no {scheme} samples"))))
    };
    Ok(100.0 * (get(SystemKind::LsMimo)?.quantile(0.1)? / get(SystemKind::NetworkMimo)?.quantile(0.1)? - 1.0))
}

/// Rate CDFs over the given `(ζ, result)` pairs.
pub fn rate_table(config: &SimulationConfig, runs: &[(usize, RateResult)], name: &str) -> Result<(CurveTable, Value)> {
    let sets: Vec<&SampleSet> = runs.iter().flat_map(|(_, r)| r.user_rates.values()).collect();
    let (_, hi) = pooled_range(&sets, 1e-3)?;
    let x = linear_grid(0.0, hi, GRID_POINTS + 1);
    let mut table = CurveTable::new("user_rate_bps_hz", x.clone())?;
    table.meta = base_meta(config, name);
    table.meta.insert("weight".into(), format!("{}/{}", config.users_per_bs, config.users_per_cell));
    let weight = config.users_per_bs as f64 / config.users_per_cell as f64;
    let mut summary = BTreeMap::new();
    for (zeta, r) in runs {
        for (&(kind, scheme), s) in &r.user_rates {
            let series = scheme_series(kind, scheme, *zeta);
            table.push(series.clone(), x.iter().map(|&v| s.cdf_at(v)).collect());
            summary.insert(series.clone(), percentile_summary(s, weight)?);
            summary.insert(format!("{series}_instantaneous"), percentile_summary(&r.rates[&(kind, scheme)], weight)?);
        }
        for scheme in r.rates.keys().map(|k| k.1).collect::<std::collections::BTreeSet<_>>() {
            summary.insert(format!("p10_gain_pct_{}_dof{zeta}", scheme.tag()), json!(p10_gain(r, scheme)?));
            summary.insert(
                format!("p10_gain_pct_{}_dof{zeta}_instantaneous", scheme.tag()),
                json!(p10_gain_instantaneous(r, scheme)?),
            );
        }
        summary.insert(format!("max_zf_leakage_dof{zeta}"), json!(r.max_zf_leakage));
        summary.insert(format!("max_power_error_dof{zeta}"), json!(r.max_power_error));
    }
    Ok((table, json!(summary)))
}

pub fn rate_figure(config: &SimulationConfig, figure: Figure) -> Result<(CurveTable, Value)> {
    let mut runs = Vec::new();
    match figure {
        Figure::Fig6 => {
            for zeta in DOF_PRESETS {
                let cfg = config.clone().with_dof(zeta)?;
                runs.push((zeta, run_rate_experiment(&cfg, &[Scheme::Zf])?));
            }
        }
        _ => {
            let cfg = config.clone().with_dof(9)?;
            runs.push((9, run_rate_experiment(&cfg, &[Scheme::Zf, Scheme::Rzf])?));
        }
    }
    rate_table(config, &runs, figure.name())
}

/// Produces the table and summary of `figure` in `out_dir`.
pub fn run_figure(figure: Figure, config: &SimulationConfig, out_dir: &Path) -> Result<FigureOutput> {
    config.validate()?;
    std::fs::create_dir_all(out_dir).map_err(|e| CliError::Io(format!("{}: {e}", out_dir.display())))?;
    let (table, summary) = match figure {
        Figure::Fig3 => signal_figure(config, config.probe.unwrap_or(NEAR_CENTER_PROBE), "fig3")?,
        Figure::Fig4 => signal_figure(config, config.probe.unwrap_or(NEAR_BS_PROBE), "fig4")?,
        Figure::Fig5 => interference_figure(config, config.probe.unwrap_or(NEAR_CENTER_PROBE))?,
        Figure::Fig6 | Figure::Fig7 => rate_figure(config, figure)?,
    };
    let csv = out_dir.join(format!("{}.csv", figure.name()));
    let json_path = out_dir.join(format!("{}_summary.json", figure.name()));
    table.write_csv(&csv)?;
    let summary = json!({ "figure": figure.name(), "meta": table.meta, "summary": summary });
    std::fs::write(&json_path, serde_json::to_string_pretty(&summary)?)
        .map_err(|e| CliError::Io(format!("{}: {e}", json_path.display())))?;
    Ok(FigureOutput { table, summary, csv, json: json_path })
}

/// Signal and interference CCDFs of one probe run with `config` as given.
pub fn simulate_probe(config: &SimulationConfig, out_dir: &Path) -> Result<FigureOutput> {
    config.validate()?;
    let zeta = dof_of(config)?;
    let probe = config.probe.unwrap_or(NEAR_CENTER_PROBE);
    let r = run_probe_experiment(config, probe)?;
    let laws = signal_laws(config, &r)?;
    let sets: Vec<&SampleSet> = r.kinds.values().flat_map(|k| [&k.signal, &k.interference]).collect();
    let (lo, hi) = pooled_range(&sets, 1e-3)?;
    let x = log_grid(lo, hi, GRID_POINTS);
    let mut table = CurveTable::new("power_w", x.clone())?;
    table.meta = base_meta(config, "simulate");
    table.meta.insert("probe".into(), format!("({}, {})", probe.x, probe.y));
    let mut summary = BTreeMap::new();
    for kind in SystemKind::ALL {
        let s = &r.kinds[&kind];
        let name = scheme_series(kind, config.scheme, zeta);
        table.push(format!("{name}_signal_ccdf"), x.iter().map(|&v| s.signal.ccdf_at(v)).collect());
        table.push(format!("{name}_interference_ccdf"), x.iter().map(|&v| s.interference.ccdf_at(v)).collect());
        let law = laws[&kind];
        summary.insert(
            name,
            json!({
                "signal_mean": s.signal.mean()?,
                "interference_mean": s.interference.mean()?,
                "signal_ks_to_law": ks_one_sample(s.signal.values(), |v| law.cdf(v))?,
            }),
        );
    }
    summary.insert("max_zf_leakage".into(), json!(r.max_zf_leakage));
    std::fs::create_dir_all(out_dir).map_err(|e| CliError::Io(format!("{}: {e}", out_dir.display())))?;
    let csv = out_dir.join("simulate.csv");
    let json_path = out_dir.join("simulate_summary.json");
    table.write_csv(&csv)?;
    let summary = json!({ "meta": table.meta, "summary": summary });
    std::fs::write(&json_path, serde_json::to_string_pretty(&summary)?)
        .map_err(|e| CliError::Io(format!("{}: {e}", json_path.display())))?;
    Ok(FigureOutput { table, summary, csv, json: json_path })
}
