//! Flat `key=value` experiment configuration.
//!
//! Blank lines and lines starting with `#` are ignored. Every key is
//! optional; unspecified parameters keep their reference defaults. Unknown
//! keys are rejected.
//!
//! ```text
//! sizes=100x100,200x200,300x300
//! strategies=central,external,mobile-lwb
//! seed_count=20
//! e_mp=1.3e-15
//! ```

use std::collections::HashMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use wsn_core::{
    LwbNormalization, RadioParams, RunConfig, StrategyKind, StrategySpec, TopologyConfig,
};

/// Parameters shared by every run of a plan.
#[derive(Clone, Debug, PartialEq)]
pub struct RunParams {
    pub node_count: usize,
    pub initial_energy: f64,
    pub cluster_radius: f64,
    pub c_prob: f64,
    pub p_min: f64,
    pub radio: RadioParams,
    pub data_bits: u64,
    pub control_bits: u64,
    pub overhead: bool,
    pub lwb_mode: LwbNormalization,
    pub max_rounds: u64,
}

impl Default for RunParams {
    fn default() -> Self {
        let reference = RunConfig::table1(100.0, 100.0, StrategyKind::StaticCentral, 0);
        Self {
            node_count: reference.topology.node_count,
            initial_energy: reference.topology.initial_energy,
            cluster_radius: reference.topology.cluster_radius,
            c_prob: reference.topology.c_prob,
            p_min: reference.p_min,
            radio: reference.radio,
            data_bits: reference.data_bits,
            control_bits: reference.control_bits,
            overhead: reference.overhead_enabled,
            lwb_mode: LwbNormalization::default(),
            max_rounds: reference.max_rounds,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentPlan {
    pub sizes: Vec<(f64, f64)>,
    pub strategies: Vec<StrategyKind>,
    pub seed_base: u64,
    pub seed_count: u64,
    pub params: RunParams,
    pub output_dir: Option<PathBuf>,
}

impl Default for ExperimentPlan {
    fn default() -> Self {
        Self {
            sizes: vec![(100.0, 100.0), (200.0, 200.0), (300.0, 300.0)],
            strategies: StrategyKind::ALL.to_vec(),
            seed_base: 1,
            seed_count: 20,
            params: RunParams::default(),
            output_dir: None,
        }
    }
}

impl ExperimentPlan {
    /// The run for one grid cell. Placement and election share `seed`, so
    /// every strategy sees the same deployment for a given (size, seed).
    pub fn run_config(
        &self,
        (width, height): (f64, f64),
        kind: StrategyKind,
        seed: u64,
    ) -> RunConfig {
        let p = &self.params;
        RunConfig {
            topology: TopologyConfig {
                width,
                height,
                node_count: p.node_count,
                initial_energy: p.initial_energy,
                cluster_radius: p.cluster_radius,
                c_prob: p.c_prob,
                placement_seed: seed,
            },
            radio: p.radio,
            strategy: StrategySpec::for_area(kind, width, height, p.lwb_mode),
            p_min: p.p_min,
            data_bits: p.data_bits,
            control_bits: p.control_bits,
            overhead_enabled: p.overhead,
            max_rounds: p.max_rounds,
            seed,
        }
    }

    pub fn seeds(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.seed_count).map(|j| self.seed_base.wrapping_add(j))
    }

    /// Applies one `key=value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let p = &mut self.params;
        match key {
            "sizes" => self.sizes = parse_list(value, parse_size)?,
            "strategies" => self.strategies = parse_list(value, |s| s.parse())?,
            "seed_base" => self.seed_base = parse_num(value)?,
            "seed_count" => self.seed_count = at_least(parse_num(value)?, 1)?,
            "node_count" => p.node_count = at_least(parse_num(value)?, 1)?,
            "initial_energy" => p.initial_energy = non_negative(parse_num(value)?)?,
            "cluster_radius" => p.cluster_radius = positive(parse_num(value)?)?,
            "c_prob" => p.c_prob = probability(parse_num(value)?)?,
            "p_min" => p.p_min = probability(parse_num(value)?)?,
            "e_elec" => p.radio.e_elec = positive(parse_num(value)?)?,
            "e_fs" => p.radio.e_fs = positive(parse_num(value)?)?,
            "e_mp" => p.radio.e_mp = positive(parse_num(value)?)?,
            "e_da" => p.radio.e_da = positive(parse_num(value)?)?,
            "d_threshold" => p.radio.d_threshold = positive(parse_num(value)?)?,
            "data_bits" => p.data_bits = at_least(parse_num(value)?, 1)?,
            "control_bits" => p.control_bits = parse_num(value)?,
            "overhead" => p.overhead = parse_switch(value)?,
            "lwb_mode" => p.lwb_mode = value.parse()?,
            "max_rounds" => p.max_rounds = at_least(parse_num(value)?, 1)?,
            "output_dir" => {
                if value.is_empty() {
                    return Err("must not be empty".into());
                }
                self.output_dir = Some(PathBuf::from(value));
            }
            _ => return Err("unknown key".into()),
        }
        Ok(())
    }

    /// Cross-field checks, delegated to the core validation of each cell.
    pub fn validate(&self) -> Result<(), wsn_core::Error> {
        for &size in &self.sizes {
            for &kind in &self.strategies {
                self.run_config(size, kind, self.seed_base).validate()?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigError {
    /// 1-based; 0 for problems not tied to a single line.
    pub line: usize,
    pub key: Option<String>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.key, self.line) {
            (Some(key), 0) => write!(f, "`{key}`: {}", self.message),
            (Some(key), line) => write!(f, "line {line}: `{key}`: {}", self.message),
            (None, 0) => write!(f, "{}", self.message),
            (None, line) => write!(f, "line {line}: {}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

pub fn parse_config(text: &str) -> Result<ExperimentPlan, ConfigError> {
    let mut plan = ExperimentPlan::default();
    let mut seen: HashMap<String, usize> = HashMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let Some((key, value)) = trimmed.split_once('=') else {
            return Err(ConfigError {
                line,
                key: None,
                message: format!("expected key=value, got `{trimmed}`"),
            });
        };
        let (key, value) = (key.trim(), value.trim());
        if let Some(first) = seen.insert(key.to_string(), line) {
            return Err(ConfigError {
                line,
                key: Some(key.to_string()),
                message: format!("duplicate key (first set on line {first})"),
            });
        }
        plan.set(key, value).map_err(|message| ConfigError {
            line,
            key: Some(key.to_string()),
            message,
        })?;
    }
    plan.validate().map_err(|e| {
        let key = match &e {
            wsn_core::Error::Config { field, .. } => Some(field.to_string()),
            _ => None,
        };
        let line = key.as_ref().and_then(|k| seen.get(k).copied()).unwrap_or(0);
        ConfigError {
            line,
            key,
            message: e.to_string(),
        }
    })?;
    Ok(plan)
}

pub fn parse_size(s: &str) -> Result<(f64, f64), String> {
    let (w, h) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("size `{s}` is not of the form WxH"))?;
    Ok((
        positive(parse_num(w.trim())?)?,
        positive(parse_num(h.trim())?)?,
    ))
}

pub fn parse_switch(s: &str) -> Result<bool, String> {
    match s {
        "on" | "true" | "1" => Ok(true),
        "off" | "false" | "0" => Ok(false),
        _ => Err(format!("expected on or off, got `{s}`")),
    }
}

fn parse_list<T>(value: &str, item: impl Fn(&str) -> Result<T, String>) -> Result<Vec<T>, String> {
    let items = value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(item)
        .collect::<Result<Vec<T>, String>>()?;
    if items.is_empty() {
        return Err("list must not be empty".into());
    }
    Ok(items)
}

fn parse_num<T: FromStr>(s: &str) -> Result<T, String> {
    s.parse()
        .map_err(|_| format!("`{s}` is not a valid number"))
}

fn positive(v: f64) -> Result<f64, String> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(format!("must be > 0 (got {v})"))
    }
}

fn non_negative(v: f64) -> Result<f64, String> {
    if v.is_finite() && v >= 0.0 {
        Ok(v)
    } else {
        Err(format!("must be >= 0 (got {v})"))
    }
}

fn probability(v: f64) -> Result<f64, String> {
    if v > 0.0 && v <= 1.0 {
        Ok(v)
    } else {
        Err(format!("must lie in (0, 1] (got {v})"))
    }
}

fn at_least<T: PartialOrd + fmt::Display>(v: T, min: T) -> Result<T, String> {
    if v >= min {
        Ok(v)
    } else {
        Err(format!("must be >= {min} (got {v})"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_gives_reference_plan() {
        let plan = parse_config("").unwrap();
        assert_eq!(plan, ExperimentPlan::default());
        assert_eq!(plan.sizes.len(), 3);
        assert_eq!(plan.strategies.len(), 3);
        assert_eq!(plan.params.node_count, 100);
        assert_eq!(plan.params.initial_energy, 0.25);
        assert_eq!(plan.params.radio.e_elec, 50e-9);
        assert_eq!(plan.params.radio.d_threshold, 75.0);
        assert_eq!(plan.params.data_bits, 4000);
        assert_eq!(plan.params.control_bits, 200);
        assert_eq!(plan.params.cluster_radius, 25.0);
        assert_eq!(plan.params.c_prob, 0.05);
    }

    #[test]
    fn single_override() {
        let plan = parse_config("seed_count=20\n").unwrap();
        assert_eq!(
            plan,
            ExperimentPlan {
                seed_count: 20,
                ..Default::default()
            }
        );
        let plan = parse_config("# comment\n\n  seed_count = 5  \n").unwrap();
        assert_eq!(plan.seed_count, 5);
    }

    #[test]
    fn negative_energy_constant_is_rejected() {
        let err = parse_config("seed_count=3\ne_elec=-1\n").unwrap_err();
        assert_eq!(err.line, 2);
        assert_eq!(err.key.as_deref(), Some("e_elec"));
        assert!(err.to_string().contains("e_elec"));
    }

    #[test]
    fn malformed_and_unknown_lines() {
        let err = parse_config("sizes=100x100\nwhat is this\n").unwrap_err();
        assert_eq!(err.line, 2);
        let err = parse_config("seed_cuont=3").unwrap_err();
        assert_eq!((err.line, err.key.as_deref()), (1, Some("seed_cuont")));
        assert!(err.message.contains("unknown key"));
        assert!(parse_config("sizes=100by100").is_err());
        assert!(parse_config("strategies=central,nowhere").is_err());
        assert!(parse_config("seed_count=0").is_err());
        assert!(parse_config("overhead=maybe").is_err());
        assert!(parse_config("seed_count=2\nseed_count=3").is_err());
    }

    #[test]
    fn cross_field_errors_point_at_the_line() {
        let err = parse_config("seed_count=2\np_min=0.5\n").unwrap_err();
        assert_eq!(err.line, 2);
        assert_eq!(err.key.as_deref(), Some("p_min"));
    }

    #[test]
    fn full_override_set() {
        let text = "\
sizes=50x80
strategies=mobile-lwb
seed_base=7
seed_count=2
node_count=10
initial_energy=0.5
cluster_radius=30
c_prob=0.1
p_min=0.001
e_elec=1e-8
e_fs=2e-11
e_mp=1e-15
e_da=1e-9
d_threshold=80
data_bits=1000
control_bits=100
overhead=off
lwb_mode=total-initial
max_rounds=99
output_dir=out/here
";
        let plan = parse_config(text).unwrap();
        assert_eq!(plan.sizes, vec![(50.0, 80.0)]);
        assert_eq!(plan.strategies, vec![StrategyKind::MobileLwb]);
        assert_eq!(plan.seeds().collect::<Vec<_>>(), vec![7, 8]);
        let cfg = plan.run_config((50.0, 80.0), StrategyKind::MobileLwb, 7);
        assert_eq!(cfg.topology.node_count, 10);
        assert!(!cfg.overhead_enabled);
        assert_eq!(
            cfg.strategy.lwb_normalization,
            LwbNormalization::TotalInitial
        );
        assert_eq!(cfg.max_rounds, 99);
        assert_eq!(cfg.radio.d_threshold, 80.0);
        assert_eq!(plan.output_dir, Some(PathBuf::from("out/here")));
    }
}
