//! One-parameter sweeps: each value runs in its own subdirectory with a
//! derived seed, and the primary tables are stacked into `sweep.csv`.

use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;

use secinvest_core::seed::derive_seed;

use crate::config::{ExperimentConfig, MAX_SEED};
use crate::error::AppError;
use crate::experiments::{self, RunOutput};
use crate::output::write_run;
use crate::records::{num, read_table, write_atomic, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    Lambda,
    C0,
    RTarget,
    Resolution,
}

impl SweepParam {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepParam::Lambda => "lambda",
            SweepParam::C0 => "c0",
            SweepParam::RTarget => "r_target",
            SweepParam::Resolution => "resolution",
        }
    }

    fn apply(self, cfg: &mut ExperimentConfig, value: f64) -> Result<(), AppError> {
        let missing = |section: &str| AppError::Validation(format!("sweep over {}: config has no [{section}] section", self.as_str()));
        match self {
            SweepParam::Lambda => cfg.payoff.as_mut().ok_or_else(|| missing("payoff"))?.lambda = Some(value),
            SweepParam::C0 => cfg.payoff.as_mut().ok_or_else(|| missing("payoff"))?.c0 = value,
            SweepParam::RTarget => cfg.graph.as_mut().ok_or_else(|| missing("graph"))?.r_target = value,
            SweepParam::Resolution => {
                if value.fract() != 0.0 || value < 2.0 {
                    return Err(AppError::Validation(format!("sweep over resolution: {value} is not an integer >= 2")));
                }
                cfg.grid.resolution = value as usize;
            }
        }
        Ok(())
    }
}

impl FromStr for SweepParam {
    type Err = AppError;

    fn from_str(s: &str) -> Result<Self, AppError> {
        match s {
            "lambda" => Ok(SweepParam::Lambda),
            "c0" => Ok(SweepParam::C0),
            "r_target" | "r-target" => Ok(SweepParam::RTarget),
            "resolution" => Ok(SweepParam::Resolution),
            _ => Err(AppError::Validation(format!(
                "sweep parameter {s:?} is not one of lambda, c0, r_target, resolution"
            ))),
        }
    }
}

/// The config for each sweep point, validated up front.
pub fn sweep_configs(
    base: &ExperimentConfig,
    param: SweepParam,
    values: &[f64],
) -> Result<Vec<(String, ExperimentConfig)>, AppError> {
    if values.is_empty() {
        return Err(AppError::Validation("sweep needs at least one value".into()));
    }
    values
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let mut cfg = base.clone();
            param.apply(&mut cfg, v)?;
            cfg.seed = derive_seed(base.seed, "sweep", i as u64) & MAX_SEED;
            cfg.output_dir = None;
            cfg.validate()?;
            Ok((format!("{}={}", param.as_str(), num(v)), cfg))
        })
        .collect()
}

/// Runs all points, then writes every subdirectory and `sweep.csv`.
pub fn run_sweep(base: &ExperimentConfig, param: SweepParam, values: &[f64], dir: &Path) -> Result<Vec<RunOutput>, AppError> {
    let configs = sweep_configs(base, param, values)?;
    let outputs = configs
        .par_iter()
        .map(|(_, cfg)| experiments::run(cfg))
        .collect::<Result<Vec<_>, AppError>>()?;

    let mut combined: Option<Table> = None;
    for ((label, _), out) in configs.iter().zip(&outputs) {
        let (header, rows) = read_table(&out.primary().bytes)?;
        let table = combined.get_or_insert_with(|| {
            let mut h = vec![param.as_str()];
            h.extend(header.iter().map(String::as_str));
            Table::new(&h)
        });
        let value = label.split_once('=').map(|(_, v)| v).unwrap_or_default();
        for row in rows {
            table.row(std::iter::once(value.to_string()).chain(row));
        }
    }
    std::fs::create_dir_all(dir).map_err(|e| AppError::Io(format!("cannot create {}: {e}", dir.display())))?;
    for ((label, cfg), out) in configs.iter().zip(&outputs) {
        write_run(&dir.join(label), cfg, out)?;
    }
    let table = combined.expect("at least one value").finish("sweep.csv");
    write_atomic(dir, &table.name, &table.bytes)?;
    Ok(outputs)
}

/// Parses a comma-separated value list.
pub fn parse_values(text: &str) -> Result<Vec<f64>, AppError> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|_| AppError::Validation(format!("sweep value {s:?} is not a number"))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_parse_and_empty_lists_fail() {
        assert_eq!(parse_values("0.1, 0.2,").unwrap(), [0.1, 0.2]);
        assert!(parse_values("a").is_err());
        let cfg = ExperimentConfig::from_toml("experiment = \"lemma-suite\"").unwrap();
        assert!(sweep_configs(&cfg, SweepParam::Resolution, &[]).is_err());
        assert!(sweep_configs(&cfg, SweepParam::C0, &[0.5]).is_err());
        assert!(sweep_configs(&cfg, SweepParam::Resolution, &[2.5]).is_err());
        let pts = sweep_configs(&cfg, SweepParam::Resolution, &[11.0, 21.0]).unwrap();
        assert_eq!(pts[1].0, "resolution=21");
        assert_ne!(pts[0].1.seed, pts[1].1.seed);
    }
}
