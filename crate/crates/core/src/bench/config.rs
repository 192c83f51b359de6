//! Flat `key = value` experiment configuration.

use std::fmt::Write as _;
use std::path::Path;

use crate::bench::scenario::ScenarioId;
use crate::error::{config_error, io_error, Result};

/// How an estimator averages over a subgroup.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Averaging {
    Grid,
    MonteCarlo,
}

impl Averaging {
    fn parse(field: &str, v: &str) -> Result<Self> {
        match v {
            "grid" => Ok(Averaging::Grid),
            "mc" => Ok(Averaging::MonteCarlo),
            _ => Err(config_error(field, format!("expected `grid` or `mc`, got `{v}`"))),
        }
    }

    fn name(self) -> &'static str {
        match self {
            Averaging::Grid => "grid",
            Averaging::MonteCarlo => "mc",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: ScenarioId,
    pub noise_sd: f64,
    pub n_grid: Vec<usize>,
    pub trials: usize,
    pub eval_points: usize,
    pub beta: f64,
    /// Bandwidth constant `a`.
    pub a: f64,
    /// Lipschitz constant `L` of the regression class; also the fallback error.
    pub lipschitz: f64,
    pub group_lipschitz: f64,
    /// Fixed cover resolution; `None` uses the `δ_n` schedule.
    pub delta: Option<f64>,
    pub seed: u64,
    /// Fit and select on independent datasets of size `n` each.
    pub split: bool,
    pub selection_averaging: Averaging,
    pub final_averaging: Averaging,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            scenario: ScenarioId::So3F1,
            noise_sd: 0.5,
            n_grid: vec![30, 50, 75, 100, 150, 200, 300],
            trials: 30,
            eval_points: 200,
            beta: 1.0,
            a: 1.0,
            lipschitz: 1.0,
            group_lipschitz: 1.0,
            delta: None,
            seed: 0,
            split: true,
            selection_averaging: Averaging::MonteCarlo,
            final_averaging: Averaging::MonteCarlo,
        }
    }
}

fn parse_num<T: std::str::FromStr>(field: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| config_error(field, format!("cannot parse `{v}`")))
}

fn parse_bool(field: &str, v: &str) -> Result<bool> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(config_error(field, format!("expected true/false, got `{v}`"))),
    }
}

impl ScenarioConfig {
    /// Parses `key = value` lines; `#` starts a comment. Unset keys keep
    /// their defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = ScenarioConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(config_error(
                    format!("line {}", lineno + 1),
                    format!("expected `key = value`, got `{line}`"),
                ));
            };
            cfg.set(k.trim(), v.trim())?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, v: &str) -> Result<()> {
        match key {
            "scenario" => self.scenario = v.parse()?,
            "noise_sd" => self.noise_sd = parse_num(key, v)?,
            "n_grid" => self.n_grid = v.split(',').map(|s| parse_num(key, s.trim())).collect::<Result<_>>()?,
            "trials" => self.trials = parse_num(key, v)?,
            "eval_points" => self.eval_points = parse_num(key, v)?,
            "beta" => self.beta = parse_num(key, v)?,
            "a" => self.a = parse_num(key, v)?,
            "lipschitz" => self.lipschitz = parse_num(key, v)?,
            "group_lipschitz" => self.group_lipschitz = parse_num(key, v)?,
            "delta" => {
                self.delta = match v {
                    "auto" => None,
                    _ => Some(parse_num(key, v)?),
                }
            }
            "seed" => self.seed = parse_num(key, v)?,
            "split" => self.split = parse_bool(key, v)?,
            "selection_averaging" => self.selection_averaging = Averaging::parse(key, v)?,
            "final_averaging" => self.final_averaging = Averaging::parse(key, v)?,
            _ => return Err(config_error(key, "unknown key")),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.noise_sd >= 0.0 && self.noise_sd.is_finite()) {
            return Err(config_error("noise_sd", "must be finite and ≥ 0"));
        }
        if self.n_grid.is_empty() {
            return Err(config_error("n_grid", "must list at least one sample size"));
        }
        if self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(config_error("n_grid", "must be strictly ascending"));
        }
        if self.n_grid[0] < 2 {
            return Err(config_error("n_grid", "sample sizes must be at least 2"));
        }
        if self.trials == 0 {
            return Err(config_error("trials", "must be at least 1"));
        }
        if self.eval_points == 0 {
            return Err(config_error("eval_points", "must be at least 1"));
        }
        if !(self.beta > 0.0 && self.beta <= 1.0) {
            return Err(config_error("beta", "must lie in (0, 1]"));
        }
        for (field, v) in [
            ("a", self.a),
            ("lipschitz", self.lipschitz),
            ("group_lipschitz", self.group_lipschitz),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(config_error(field, "must be positive and finite"));
            }
        }
        if let Some(d) = self.delta {
            if !(d > 0.0 && d.is_finite()) {
                return Err(config_error("delta", "must be positive and finite"));
            }
        }
        Ok(())
    }

    /// Serialises back to the text format; `parse(to_text())` round-trips.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let n_grid: Vec<String> = self.n_grid.iter().map(|n| n.to_string()).collect();
        let _ = writeln!(out, "scenario = {}", self.scenario);
        let _ = writeln!(out, "noise_sd = {}", self.noise_sd);
        let _ = writeln!(out, "n_grid = {}", n_grid.join(","));
        let _ = writeln!(out, "trials = {}", self.trials);
        let _ = writeln!(out, "eval_points = {}", self.eval_points);
        let _ = writeln!(out, "beta = {}", self.beta);
        let _ = writeln!(out, "a = {}", self.a);
        let _ = writeln!(out, "lipschitz = {}", self.lipschitz);
        let _ = writeln!(out, "group_lipschitz = {}", self.group_lipschitz);
        match self.delta {
            Some(d) => writeln!(out, "delta = {d}"),
            None => writeln!(out, "delta = auto"),
        }
        .ok();
        let _ = writeln!(out, "seed = {}", self.seed);
        let _ = writeln!(out, "split = {}", self.split);
        let _ = writeln!(out, "selection_averaging = {}", self.selection_averaging.name());
        let _ = writeln!(out, "final_averaging = {}", self.final_averaging.name());
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::SymError;

    #[test]
    fn defaults_round_trip() {
        let cfg = ScenarioConfig::default();
        assert_eq!(ScenarioConfig::parse(&cfg.to_text()).unwrap(), cfg);
    }

    #[test]
    fn parses_overrides_and_comments() {
        let cfg = ScenarioConfig::parse(
            "# torus run\nscenario = t2_g3\nn_grid = 30, 60\ntrials=5 # few\ndelta = 0.5\nsplit = false\n",
        )
        .unwrap();
        assert_eq!(cfg.scenario, ScenarioId::T2G3);
        assert_eq!(cfg.n_grid, vec![30, 60]);
        assert_eq!(cfg.trials, 5);
        assert_eq!(cfg.delta, Some(0.5));
        assert!(!cfg.split);
    }

    #[test]
    fn field_level_errors() {
        let err = ScenarioConfig::parse("trials = many").unwrap_err();
        assert!(matches!(err, SymError::Config { ref field, .. } if field == "trials"));
        let err = ScenarioConfig::parse("n_grid = 50, 30").unwrap_err();
        assert!(matches!(err, SymError::Config { ref field, .. } if field == "n_grid"));
        let err = ScenarioConfig::parse("colour = blue").unwrap_err();
        assert!(matches!(err, SymError::Config { ref field, .. } if field == "colour"));
        let err = ScenarioConfig::parse("noise_sd = -1").unwrap_err();
        assert!(matches!(err, SymError::Config { ref field, .. } if field == "noise_sd"));
        assert!(ScenarioConfig::parse("just words").is_err());
    }
}
