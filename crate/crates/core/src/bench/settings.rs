//! Flat key-value settings shared by the config file and the CLI.
//!
//! A config file holds one `key = value` per line; `#` starts a comment.
//! Keys are the long CLI flag names without the leading dashes, and `_` is
//! accepted in place of `-`. Values set later (e.g. from flags) override
//! earlier ones.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use super::{Backend, ExperimentConfig, Mode};
use crate::error::{Error, Result};
use crate::noise::NoiseRates;

pub const KEYS: &[&str] = &[
    "n",
    "target",
    "mode",
    "modes",
    "backend",
    "backends",
    "optimizer",
    "profile",
    "trials",
    "trial",
    "shots-eval",
    "shots-final",
    "p1",
    "p2",
    "p-ro",
    "seed",
    "iterations",
    "exact",
    "checkpoints",
    "out",
    "format",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Config(format!("unknown format {other:?}; expected csv or json"))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

fn normalize(key: &str) -> String {
    key.trim().trim_start_matches("--").replace('_', "-")
}

fn parse_value<T: FromStr>(key: &str, raw: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    raw.parse()
        .map_err(|e| Error::Config(format!("bad value {raw:?} for {key}: {e}")))
}

impl Settings {
    pub fn parse(text: &str) -> Result<Self> {
        let mut s = Settings::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected key = value, got {line:?}", lineno + 1))
            })?;
            s.set(k, v.trim())?;
        }
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) -> Result<()> {
        let key = normalize(key);
        if !KEYS.contains(&key.as_str()) {
            return Err(Error::Config(format!("unknown setting {key:?}")));
        }
        self.values.insert(key, value.into());
        Ok(())
    }

    /// Entries of `other` replace entries of `self`.
    pub fn merge(&mut self, other: &Settings) {
        for (k, v) in &other.values {
            self.values.insert(k.clone(), v.clone());
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(&normalize(key)).map(String::as_str)
    }

    fn typed<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: fmt::Display,
    {
        self.get(key).map(|raw| parse_value(key, raw)).transpose()
    }

    fn list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>>
    where
        T::Err: fmt::Display,
    {
        self.get(key)
            .map(|raw| {
                raw.split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| parse_value(key, s))
                    .collect()
            })
            .transpose()
    }

    /// `n` as a list: `5`, `3,5,7` or the inclusive range `2-12`.
    pub fn n_list(&self) -> Result<Vec<usize>> {
        let raw = self
            .get("n")
            .ok_or_else(|| Error::Config("missing n".into()))?;
        let mut out = Vec::new();
        for part in raw.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            match part.split_once('-') {
                Some((lo, hi)) => {
                    let lo: usize = parse_value("n", lo.trim())?;
                    let hi: usize = parse_value("n", hi.trim())?;
                    if lo > hi {
                        return Err(Error::Config(format!("empty n range {part:?}")));
                    }
                    out.extend(lo..=hi);
                }
                None => out.push(parse_value("n", part)?),
            }
        }
        if out.is_empty() {
            return Err(Error::Config("empty n".into()));
        }
        Ok(out)
    }

    pub fn modes(&self) -> Result<Vec<Mode>> {
        Ok(self.list("modes")?.unwrap_or_else(|| vec![Mode::Vqe, Mode::Grover]))
    }

    pub fn backends(&self) -> Result<Vec<Backend>> {
        Ok(self
            .list("backends")?
            .unwrap_or_else(|| vec![Backend::Ideal, Backend::Noisy]))
    }

    pub fn checkpoints(&self) -> Result<Option<Vec<f64>>> {
        self.list("checkpoints")
    }

    pub fn format(&self) -> Result<Format> {
        Ok(self.typed("format")?.unwrap_or(Format::Csv))
    }

    pub fn out(&self) -> Option<&str> {
        self.get("out")
    }

    pub fn trial(&self) -> Result<usize> {
        Ok(self.typed("trial")?.unwrap_or(0))
    }

    /// Builds an experiment config. `n` may be omitted when `target` is set.
    pub fn experiment(&self, mode: Mode, default_trials: usize) -> Result<ExperimentConfig> {
        let defaults = ExperimentConfig::default();
        let target: Option<crate::bitstring::BitString> = self.typed("target")?;
        let n = match (self.get("n"), &target) {
            (Some(_), _) => {
                let ns = self.n_list()?;
                if ns.len() != 1 {
                    return Err(Error::Config("this command takes a single n".into()));
                }
                ns[0]
            }
            (None, Some(t)) => t.len(),
            (None, None) => return Err(Error::Config("need n or target".into())),
        };
        let noise = NoiseRates {
            p1: self.typed("p1")?.unwrap_or(defaults.noise.p1),
            p2: self.typed("p2")?.unwrap_or(defaults.noise.p2),
            p_ro: self.typed("p-ro")?.unwrap_or(defaults.noise.p_ro),
        };
        let config = ExperimentConfig {
            mode: self.typed("mode")?.unwrap_or(mode),
            backend: self.typed("backend")?.unwrap_or(defaults.backend),
            n,
            target,
            trials: self.typed("trials")?.unwrap_or(default_trials),
            seed: self.typed("seed")?.unwrap_or(defaults.seed),
            shots_eval: self.typed("shots-eval")?.unwrap_or(defaults.shots_eval),
            shots_final: self.typed("shots-final")?.unwrap_or(defaults.shots_final),
            optimizer: self.typed("optimizer")?,
            profile: self.typed("profile")?.unwrap_or(defaults.profile),
            noise,
            exact_objective: self.typed("exact")?.unwrap_or(false),
            iterations: self.typed("iterations")?,
            ..defaults
        };
        Ok(config)
    }
}
