//! Flat `key = value` experiment manifests. Lists are comma separated, `#`
//! starts a comment, and command-line `--key value` flags override file values.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};

use costcast::allocation::Policy;
use costcast::analysis::XminMode;
use costcast::dataset::{load_entry, load_manifest};
use costcast::forecast::{ForecastConfig, GrowthRule, PriorSpec};
use costcast::sim::{SimConfig, WorkerMode};

pub const KEYS: &[&str] = &[
    "name",
    "mode",
    "prior",
    "budget",
    "seed_tasks",
    "delta",
    "n_max",
    "rule",
    "policy",
    "replications",
    "seed",
    "checkpoint_stride",
    "s",
    "dataset",
    "dataset_name",
    "out_dir",
    "sweep_delta",
    "sweep_nmax",
    "sweep_n0",
    "sweep_s",
    "include_proposal_cost",
    "proposal_cost",
    "response_cost",
    "xmin",
];

/// Raw key/value pairs after merging file and flags.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawManifest {
    values: BTreeMap<String, String>,
}

impl RawManifest {
    pub fn parse(text: &str) -> Result<Self> {
        let mut out = RawManifest::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("manifest line {}: expected `key = value`", i + 1))?;
            out.set(k.trim(), v.trim())
                .with_context(|| format!("manifest line {}", i + 1))?;
        }
        Ok(out)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading manifest {}", path.display()))?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if !KEYS.contains(&key) {
            bail!("unknown key `{key}`");
        }
        self.values.insert(key.to_string(), value.to_string());
        Ok(())
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.values
            .get(key)
            .map(String::as_str)
            .filter(|v| !v.is_empty())
    }

    fn parse_or<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|e| anyhow!("key `{key}`: {e}")),
        }
    }

    fn list<T: std::str::FromStr>(&self, key: &str) -> Result<Vec<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.get(key) {
            None => Ok(Vec::new()),
            Some(v) => v
                .split(',')
                .map(|x| x.trim().parse().map_err(|e| anyhow!("key `{key}`: {e}")))
                .collect(),
        }
    }

    /// Canonical dump, one `key = value` per line in key order. `out_dir` is
    /// left out so the same experiment renders identically wherever it lands.
    pub fn render(&self) -> String {
        let mut s = String::new();
        for (k, v) in self.values.iter().filter(|(k, _)| *k != "out_dir") {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModeKind {
    Synthetic,
    IncreasingCost,
    Replay,
}

#[derive(Debug, Clone)]
pub struct Experiment {
    pub name: String,
    pub mode: ModeKind,
    pub prior: PriorSpec,
    pub budget: u64,
    pub seed_tasks: u32,
    /// One `(rule, delta)` per growth rule to run.
    pub rules: Vec<(GrowthRule, f64)>,
    pub n_max: f64,
    pub policy: Policy,
    pub replications: u32,
    pub seed: u64,
    pub checkpoint_stride: u64,
    pub s: f64,
    pub dataset: Option<PathBuf>,
    pub dataset_name: Option<String>,
    pub out_dir: PathBuf,
    pub sweep_delta: Vec<f64>,
    pub sweep_nmax: Vec<f64>,
    pub sweep_n0: Vec<u32>,
    pub sweep_s: Vec<f64>,
    pub include_proposal_cost: bool,
    pub proposal_cost: f64,
    pub response_cost: f64,
    pub xmin: XminMode,
}

fn default_delta(rule: GrowthRule) -> f64 {
    match rule {
        GrowthRule::Min => 0.9,
        GrowthRule::Median => 0.5,
    }
}

fn parse_prior(s: &str) -> Result<PriorSpec> {
    let parts: Vec<&str> = s.split(':').map(str::trim).collect();
    let prior = match parts.as_slice() {
        ["uniform"] => PriorSpec::Uniform,
        ["beta", a, b] => PriorSpec::Beta {
            alpha: a.parse()?,
            beta: b.parse()?,
        },
        ["point", t] => PriorSpec::PointMass(t.parse()?),
        _ => bail!("prior must be `uniform`, `beta:<a>:<b>` or `point:<theta>`"),
    };
    prior.validate()?;
    Ok(prior)
}

fn parse_bool(s: &str) -> Result<bool> {
    match s.to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" | "on" => Ok(true),
        "0" | "false" | "no" | "off" => Ok(false),
        other => bail!("expected a boolean, found `{other}`"),
    }
}

impl Experiment {
    pub fn from_raw(raw: &RawManifest) -> Result<Self> {
        let mode = match raw.get("mode").unwrap_or("synthetic") {
            "synthetic" => ModeKind::Synthetic,
            "increasing" | "increasing_cost" => ModeKind::IncreasingCost,
            "replay" => ModeKind::Replay,
            other => bail!("unknown mode `{other}` (synthetic|increasing|replay)"),
        };
        let rules: Vec<GrowthRule> = match raw.get("rule") {
            None => vec![GrowthRule::Min, GrowthRule::Median],
            Some(v) => v
                .split(',')
                .map(|r| {
                    GrowthRule::parse(r)
                        .ok_or_else(|| anyhow!("unknown rule `{}` (gr1|gr2)", r.trim()))
                })
                .collect::<Result<_>>()?,
        };
        let deltas: Vec<f64> = raw.list("delta")?;
        let rules = match deltas.len() {
            0 => rules.iter().map(|&r| (r, default_delta(r))).collect(),
            1 => rules.iter().map(|&r| (r, deltas[0])).collect(),
            n if n == rules.len() => rules.iter().copied().zip(deltas).collect(),
            n => bail!("{n} delta values for {} rules", rules.len()),
        };
        let policy = match raw.get("policy") {
            None => Policy::OptKg,
            Some(p) => {
                Policy::parse(p).ok_or_else(|| anyhow!("unknown policy `{p}` (optkg|random)"))?
            }
        };
        let xmin = match raw.get("xmin") {
            None | Some("scan") => XminMode::default(),
            Some(v) => XminMode::Fixed(v.parse().map_err(|e| anyhow!("key `xmin`: {e}"))?),
        };
        let exp = Experiment {
            name: raw.get("name").unwrap_or("experiment").to_string(),
            mode,
            prior: parse_prior(raw.get("prior").unwrap_or("uniform"))?,
            budget: raw.parse_or("budget", 3000)?,
            seed_tasks: raw.parse_or("seed_tasks", 100)?,
            rules,
            n_max: raw.parse_or("n_max", 10.0)?,
            policy,
            replications: raw.parse_or("replications", 50)?,
            seed: raw.parse_or("seed", 0)?,
            checkpoint_stride: raw.parse_or("checkpoint_stride", 10)?,
            s: raw.parse_or("s", 0.0)?,
            dataset: raw.get("dataset").map(PathBuf::from),
            dataset_name: raw.get("dataset_name").map(str::to_string),
            out_dir: PathBuf::from(raw.get("out_dir").unwrap_or("out")),
            sweep_delta: raw.list("sweep_delta")?,
            sweep_nmax: raw.list("sweep_nmax")?,
            sweep_n0: raw.list("sweep_n0")?,
            sweep_s: raw.list("sweep_s")?,
            include_proposal_cost: raw
                .get("include_proposal_cost")
                .map(parse_bool)
                .transpose()?
                .unwrap_or(false),
            proposal_cost: raw.parse_or("proposal_cost", 1.0)?,
            response_cost: raw.parse_or("response_cost", 1.0)?,
            xmin,
        };
        if exp.mode == ModeKind::Replay && exp.dataset.is_none() {
            bail!("replay mode needs `dataset` (path to a dataset manifest)");
        }
        Ok(exp)
    }

    /// Worker mode for the current settings; replay datasets are loaded here.
    pub fn worker_mode(&self, s: f64) -> Result<WorkerMode> {
        Ok(match self.mode {
            ModeKind::Synthetic => WorkerMode::Synthetic(self.prior),
            ModeKind::IncreasingCost => WorkerMode::IncreasingCost(s),
            ModeKind::Replay => {
                let path = self.dataset.as_ref().expect("checked in from_raw");
                let entries = load_manifest(path)?;
                let entry = match &self.dataset_name {
                    Some(name) => entries.iter().find(|e| &e.name == name).ok_or_else(|| {
                        anyhow!("dataset `{name}` not listed in {}", path.display())
                    })?,
                    None => entries
                        .first()
                        .ok_or_else(|| anyhow!("dataset manifest {} is empty", path.display()))?,
                };
                WorkerMode::Replay(Arc::new(load_entry(entry)?))
            }
        })
    }

    pub fn sim_config(
        &self,
        rule: GrowthRule,
        delta: f64,
        n_max: f64,
        seed_tasks: u32,
        mode: WorkerMode,
    ) -> Result<SimConfig> {
        let mut forecast = ForecastConfig::new(delta, n_max, rule)?;
        forecast.include_proposal_cost = self.include_proposal_cost;
        forecast.proposal_cost = self.proposal_cost;
        forecast.response_cost = self.response_cost;
        forecast.validate()?;
        let config = SimConfig {
            total_budget: self.budget,
            seed_tasks,
            forecast,
            policy: self.policy,
            mode,
            rng_seed: self.seed,
            replications: self.replications,
            checkpoint_stride: self.checkpoint_stride,
        };
        config.validate()?;
        Ok(config)
    }
}
