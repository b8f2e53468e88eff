//! Flags, optional TOML config file and defaults, resolved in that order.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StopKind {
    Threshold,
    Budget,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum Format {
    Csv,
}

/// Budget as given: an absolute count, or a fraction of edges (`0.1m`) or
/// nodes (`0.1n`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Budget {
    Count(usize),
    OfEdges(f64),
    OfNodes(f64),
}

impl std::str::FromStr for Budget {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        let frac = |body: &str| -> Result<f64, String> {
            let f: f64 = body.parse().map_err(|_| format!("bad budget `{s}`"))?;
            if f.is_finite() && f >= 0.0 {
                Ok(f)
            } else {
                Err(format!("bad budget `{s}`"))
            }
        };
        if let Some(body) = s.strip_suffix('m') {
            Ok(Budget::OfEdges(frac(body)?))
        } else if let Some(body) = s.strip_suffix('n') {
            Ok(Budget::OfNodes(frac(body)?))
        } else {
            s.parse().map(Budget::Count).map_err(|_| format!("bad budget `{s}` (use 25, 0.1m or 0.1n)"))
        }
    }
}

impl TryFrom<String> for Budget {
    type Error = String;
    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

impl From<Budget> for String {
    fn from(b: Budget) -> String {
        match b {
            Budget::Count(c) => c.to_string(),
            Budget::OfEdges(f) => format!("{f}m"),
            Budget::OfNodes(f) => format!("{f}n"),
        }
    }
}

impl Budget {
    pub fn resolve(self, n: usize, m: usize) -> usize {
        match self {
            Budget::Count(c) => c,
            Budget::OfEdges(f) => (f * m as f64).round() as usize,
            Budget::OfNodes(f) => (f * n as f64).round() as usize,
        }
    }
}

/// Flags shared by `run` and `compare`. Every field is optional so a config
/// file can fill the gaps.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    /// Epidemic threshold T = δ/β.
    #[arg(long = "T", value_name = "T")]
    #[serde(rename = "T")]
    pub threshold: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Fixed walk length (even); default picks it from n and ε.
    #[arg(long)]
    pub k: Option<usize>,
    /// Upper limit for the automatic walk length.
    #[arg(long)]
    pub k_cap: Option<usize>,
    /// Removal budget: a count, or `0.1m` / `0.1n` for a fraction of edges / nodes.
    #[arg(long)]
    pub budget: Option<Budget>,
    #[arg(long, value_enum)]
    pub stop: Option<StopKind>,
    /// Seed for the power-iteration start vector.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Recovery rate δ for the non-uniform variant.
    #[arg(long)]
    pub delta: Option<f64>,
}

impl Settings {
    fn or(self, other: Settings) -> Settings {
        Settings {
            threshold: self.threshold.or(other.threshold),
            epsilon: self.epsilon.or(other.epsilon),
            k: self.k.or(other.k),
            k_cap: self.k_cap.or(other.k_cap),
            budget: self.budget.or(other.budget),
            stop: self.stop.or(other.stop),
            seed: self.seed.or(other.seed),
            delta: self.delta.or(other.delta),
        }
    }
}

/// Settings after precedence; recorded verbatim in the manifest.
#[derive(Debug, Clone, Serialize)]
pub struct Resolved {
    #[serde(rename = "T")]
    pub threshold: Option<f64>,
    pub epsilon: f64,
    pub k: Option<usize>,
    pub k_cap: usize,
    pub budget: Option<Budget>,
    pub stop: StopKind,
    pub seed: u64,
    pub delta: f64,
    pub config_file: Option<PathBuf>,
}

pub fn resolve(flags: Settings, file: Option<&Path>) -> Result<Resolved, Failure> {
    let from_file = match file {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Failure::usage(format!("{}: {e}", p.display())))?;
            toml::from_str::<Settings>(&text).map_err(|e| Failure::usage(format!("{}: {e}", p.display())))?
        }
        None => Settings::default(),
    };
    let s = flags.or(from_file);
    let stop = s.stop.unwrap_or(if s.threshold.is_none() && s.budget.is_some() {
        StopKind::Budget
    } else {
        StopKind::Threshold
    });
    if stop == StopKind::Budget && s.budget.is_none() {
        return Err(Failure::usage("--stop budget needs --budget"));
    }
    Ok(Resolved {
        threshold: s.threshold,
        epsilon: s.epsilon.unwrap_or(0.05),
        k: s.k,
        k_cap: s.k_cap.unwrap_or(64),
        budget: s.budget,
        stop,
        seed: s.seed.unwrap_or(0),
        delta: s.delta.unwrap_or(1.0),
        config_file: file.map(Path::to_path_buf),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn budgets_parse() {
        assert_eq!("25".parse::<Budget>().unwrap(), Budget::Count(25));
        assert_eq!("0.1m".parse::<Budget>().unwrap(), Budget::OfEdges(0.1));
        assert_eq!("0.5n".parse::<Budget>().unwrap().resolve(10, 40), 5);
        assert!("x".parse::<Budget>().is_err());
        assert!("-1m".parse::<Budget>().is_err());
    }

    #[test]
    fn flags_override_file() {
        let dir = std::env::temp_dir().join(format!("immunet-cfg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let p = dir.join("c.toml");
        std::fs::write(&p, "T = 2.0\nepsilon = 0.1\nbudget = \"0.2m\"\n").unwrap();
        let flags = Settings {
            threshold: Some(3.0),
            ..Settings::default()
        };
        let r = resolve(flags, Some(&p)).unwrap();
        assert_eq!(r.threshold, Some(3.0));
        assert_eq!(r.epsilon, 0.1);
        assert_eq!(r.budget, Some(Budget::OfEdges(0.2)));
        assert_eq!(r.stop, StopKind::Threshold);
        std::fs::remove_dir_all(dir).unwrap();
    }
}
