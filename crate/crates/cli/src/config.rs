//! Flat `key = value` configuration files and named presets.
//!
//! Power and noise are given in dBm and dBm/Hz and converted to watts here;
//! everything downstream works in linear units.

use std::path::Path;

use mimo_duel::beamform::{dbm_to_watts, Scheme};
use mimo_duel::montecarlo::SimulationConfig;
use mimo_duel::topology::Point;

use crate::{CliError, Result};

/// Figures the `figure` command can produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    /// Signal CCDFs at the near-centre probe.
    Fig3,
    /// Signal CCDFs at the probe close to one BS.
    Fig4,
    /// Aggregate interference CDFs with the Gamma-law curves.
    Fig5,
    /// Rate CDFs with ZF.
    Fig6,
    /// Rate CDFs with ZF and RZF at `ζ = 9`.
    Fig7,
}

impl Figure {
    pub const ALL: [Figure; 5] = [Figure::Fig3, Figure::Fig4, Figure::Fig5, Figure::Fig6, Figure::Fig7];

    pub fn name(self) -> &'static str {
        match self {
            Figure::Fig3 => "fig3",
            Figure::Fig4 => "fig4",
            Figure::Fig5 => "fig5",
            Figure::Fig6 => "fig6",
            Figure::Fig7 => "fig7",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        Figure::ALL
            .into_iter()
            .find(|f| f.name() == name)
            .ok_or_else(|| CliError::config("figure", format!("unknown figure `{name}`")))
    }
}

pub const NEAR_CENTER_PROBE: Point = Point::new(15.0, 15.0);
pub const NEAR_BS_PROBE: Point = Point::new(235.0, 235.0);

/// A named starting point for a run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentPreset {
    pub name: String,
    pub config: SimulationConfig,
    pub figure: Option<Figure>,
}

pub fn preset(name: &str) -> Result<ExperimentPreset> {
    let base = SimulationConfig::table1();
    let (config, figure) = match name {
        "table1" | "custom" => (base, None),
        "fig3" => (SimulationConfig { probe: Some(NEAR_CENTER_PROBE), ..base }, Some(Figure::Fig3)),
        "fig4" => (SimulationConfig { probe: Some(NEAR_BS_PROBE), ..base }, Some(Figure::Fig4)),
        "fig5" => (SimulationConfig { probe: Some(NEAR_CENTER_PROBE), ..base }, Some(Figure::Fig5)),
        "fig6" => (SimulationConfig { trials: 200, ..base }, Some(Figure::Fig6)),
        "fig7" => (SimulationConfig { trials: 200, ..base }, Some(Figure::Fig7)),
        other => return Err(CliError::config("preset", format!("unknown preset `{other}`"))),
    };
    Ok(ExperimentPreset { name: name.to_string(), config, figure })
}

fn number<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| CliError::config(key, format!("`{value}` is not a valid number")))
}

/// Applies one `key = value` setting.
pub fn apply(config: &mut SimulationConfig, key: &str, value: &str) -> Result<()> {
    match key {
        "C" => config.num_clusters = number(key, value)?,
        "B" => config.bs_per_cluster = number(key, value)?,
        "L" => config.cluster_side = number(key, value)?,
        "M" => config.antennas_per_bs = number(key, value)?,
        "K" => config.users_per_bs = number(key, value)?,
        "K_T" => config.users_per_cell = number(key, value)?,
        "alpha" => config.alpha = number(key, value)?,
        "exclusion_radius" => config.exclusion_radius = number(key, value)?,
        "P_T_dBm" => config.tx_power_w = dbm_to_watts(number(key, value)?),
        "N0_dBm_Hz" => config.noise_density = dbm_to_watts(number(key, value)?),
        "W" => config.bandwidth_hz = number(key, value)?,
        "trials" => config.trials = number(key, value)?,
        "seed" => config.seed = number(key, value)?,
        "slots" => config.slots_per_placement = number(key, value)?,
        "scheme" => {
            config.scheme = match value.to_ascii_lowercase().as_str() {
                "zf" => Scheme::Zf,
                "rzf" => Scheme::Rzf,
                _ => return Err(CliError::config(key, format!("`{value}` is not zf or rzf"))),
            }
        }
        "probe_x" | "probe_y" => {
            let v: f64 = number(key, value)?;
            let mut p = config.probe.unwrap_or(Point::new(0.0, 0.0));
            if key == "probe_x" {
                p.x = v;
            } else {
                p.y = v;
            }
            config.probe = Some(p);
        }
        "dof" => {
            let zeta: usize = number(key, value)?;
            *config = config.clone().with_dof(zeta)?;
        }
        other => return Err(CliError::config(other, "unknown key")),
    }
    Ok(())
}

/// Parses `key = value` lines over `base`. `#` starts a comment. The
/// result is validated.
pub fn parse_config(text: &str, base: SimulationConfig) -> Result<SimulationConfig> {
    let mut config = base;
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::config(line, format!("line {} is not `key = value`", n + 1)))?;
        apply(&mut config, key.trim(), value.trim())?;
    }
    config.validate()?;
    Ok(config)
}

pub fn load_config(path: &Path, base: SimulationConfig) -> Result<SimulationConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_config(&text, base)
}

/// Applies `key=value` overrides given on the command line.
pub fn apply_overrides(mut config: SimulationConfig, overrides: &[String]) -> Result<SimulationConfig> {
    for o in overrides {
        let (k, v) = o
            .split_once('=')
            .ok_or_else(|| CliError::config(o.as_str(), "override is not `key=value`"))?;
        apply(&mut config, k.trim(), v.trim())?;
    }
    config.validate()?;
    Ok(config)
}
