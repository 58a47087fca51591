use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};

use costcast::analysis::{
    aggregate_runs, analyze_tail, budget_grid, growth_rate, interevent_times, mean_and_std,
    resample_locf, IntereventSample, TailAnalysis, TailFit, XminMode,
};
use costcast::forecast::GrowthRule;
use costcast::sim::{run_matched, MatchedRun, RunTrace, SimConfig, WorkerMode};

use crate::manifest::{Experiment, ModeKind};
use crate::output::{num, OutputSet};

pub const CURVES_HEADER: &[&str] = &["variant", "rule", "replication", "t", "n_tasks", "accuracy"];
pub const GROWTH_HEADER: &[&str] = &["rule", "replication", "t"];
pub const RATES_HEADER: &[&str] = &["axis_name", "axis_value", "rule", "mean_rate", "std_rate"];
pub const TAILFITS_HEADER: &[&str] = &[
    "rule",
    "n_samples",
    "pl_alpha",
    "x_min",
    "geom_p",
    "exp_lambda",
    "lr_r",
    "lr_p",
];

const SUMMARY_HEADER: &[&str] = &[
    "rule",
    "delta",
    "replication",
    "n_final",
    "grow_count",
    "spent",
    "growth_rate",
    "final_accuracy",
    "baseline_final_accuracy",
];
const CURVE_SUMMARY_COLUMNS: &[&str] = &[
    "t",
    "forecast_mean",
    "forecast_std",
    "baseline_mean",
    "baseline_std",
    "improvement_mean",
    "n_tasks_mean",
];

fn curve_rows(
    variant: &str,
    rule: GrowthRule,
    rep: u32,
    trace: &RunTrace,
    grid: &[u64],
) -> Vec<Vec<String>> {
    resample_locf(&trace.checkpoints, grid)
        .into_iter()
        .map(|c| {
            vec![
                variant.to_string(),
                rule.as_str().to_string(),
                rep.to_string(),
                c.t.to_string(),
                c.n_tasks.to_string(),
                num(c.accuracy),
            ]
        })
        .collect()
}

fn aggregate(matched: &[MatchedRun], grid: &[u64]) -> Result<Vec<Vec<String>>> {
    let fc: Vec<&RunTrace> = matched.iter().map(|m| &m.forecast).collect();
    let bl: Vec<&RunTrace> = matched.iter().map(|m| &m.baseline).collect();
    Ok(aggregate_runs(&fc, &bl, grid)?
        .into_iter()
        .map(|p| {
            vec![
                p.t.to_string(),
                num(p.forecast_mean),
                num(p.forecast_std),
                num(p.baseline_mean),
                num(p.baseline_std),
                num(p.improvement_mean),
                num(p.n_tasks_mean),
            ]
        })
        .collect())
}

fn rates(matched: &[MatchedRun]) -> Result<Vec<f64>> {
    matched
        .iter()
        .map(|m| growth_rate(&m.forecast).map_err(Into::into))
        .collect()
}

/// Forecasting runs with matched baselines, one block per configured rule.
pub fn run(exp: &Experiment, manifest_text: &str) -> Result<OutputSet> {
    let mode = exp.worker_mode(exp.s)?;
    let grid = budget_grid(exp.budget, exp.checkpoint_stride);
    let mut curves = Vec::new();
    let mut growth = Vec::new();
    let mut summary = Vec::new();
    let mut curve_summary = Vec::new();
    for &(rule, delta) in &exp.rules {
        let config = exp.sim_config(rule, delta, exp.n_max, exp.seed_tasks, mode.clone())?;
        let matched = run_matched(&config)?;
        for m in &matched {
            let rep = m.replication;
            curves.extend(curve_rows("forecast", rule, rep, &m.forecast, &grid));
            curves.extend(curve_rows("baseline", rule, rep, &m.baseline, &grid));
            growth.extend(
                m.forecast
                    .growth_times
                    .iter()
                    .map(|t| vec![rule.as_str().to_string(), rep.to_string(), t.to_string()]),
            );
            summary.push(vec![
                rule.as_str().to_string(),
                num(delta),
                rep.to_string(),
                m.forecast.n_final().to_string(),
                m.forecast.grow_count().to_string(),
                m.forecast.spent().to_string(),
                num(growth_rate(&m.forecast)?),
                num(m.forecast.final_accuracy().unwrap_or(f64::NAN)),
                num(m.baseline.final_accuracy().unwrap_or(f64::NAN)),
            ]);
        }
        for mut row in aggregate(&matched, &grid)? {
            row.insert(0, rule.as_str().to_string());
            curve_summary.push(row);
        }
    }
    let mut out = OutputSet::default();
    out.add_csv("curves.csv", CURVES_HEADER, curves)?;
    out.add_csv("growth_events.csv", GROWTH_HEADER, growth)?;
    out.add_csv("summary.csv", SUMMARY_HEADER, summary)?;
    let mut header = vec!["rule"];
    header.extend_from_slice(CURVE_SUMMARY_COLUMNS);
    out.add_csv("curve_summary.csv", &header, curve_summary)?;
    out.add("manifest.resolved", manifest_text.as_bytes().to_vec());
    Ok(out)
}

#[derive(Debug, Clone, Copy, Default)]
struct Cell {
    delta: Option<f64>,
    n_max: Option<f64>,
    n0: Option<u32>,
    s: Option<f64>,
}

fn sweep_cells(exp: &Experiment) -> Result<(String, Vec<(String, Cell)>)> {
    let mut names = Vec::new();
    let mut cells = vec![(Vec::<String>::new(), Cell::default())];
    macro_rules! axis {
        ($values:expr, $name:literal, $field:ident) => {
            if !$values.is_empty() {
                names.push($name);
                cells = cells
                    .into_iter()
                    .flat_map(|(labels, cell)| {
                        $values.iter().map(move |&v| {
                            let mut labels = labels.clone();
                            labels.push(v.to_string());
                            (
                                labels,
                                Cell {
                                    $field: Some(v),
                                    ..cell
                                },
                            )
                        })
                    })
                    .collect();
            }
        };
    }
    axis!(exp.sweep_delta, "delta", delta);
    axis!(exp.sweep_nmax, "n_max", n_max);
    axis!(exp.sweep_n0, "n0", n0);
    axis!(exp.sweep_s, "s", s);
    if names.is_empty() {
        bail!("sweep needs at least one of sweep_delta, sweep_nmax, sweep_n0, sweep_s");
    }
    if !exp.sweep_s.is_empty() && exp.mode != ModeKind::IncreasingCost {
        bail!("sweep_s only applies to mode = increasing");
    }
    Ok((
        names.join(";"),
        cells.into_iter().map(|(l, c)| (l.join(";"), c)).collect(),
    ))
}

/// Cross-product sweep: growth-rate table plus accuracy curves per cell.
pub fn sweep(exp: &Experiment, manifest_text: &str) -> Result<OutputSet> {
    let (axis_name, cells) = sweep_cells(exp)?;
    let base_mode = exp.worker_mode(exp.s)?;
    let grid = budget_grid(exp.budget, exp.checkpoint_stride);

    // Validate every cell before spending time on any of them.
    let mut plans: Vec<(String, GrowthRule, SimConfig)> = Vec::new();
    for (label, cell) in &cells {
        let mode = match (cell.s, &base_mode) {
            (Some(s), _) => WorkerMode::IncreasingCost(s),
            (None, m) => m.clone(),
        };
        for &(rule, delta) in &exp.rules {
            let config = exp
                .sim_config(
                    rule,
                    cell.delta.unwrap_or(delta),
                    cell.n_max.unwrap_or(exp.n_max),
                    cell.n0.unwrap_or(exp.seed_tasks),
                    mode.clone(),
                )
                .with_context(|| format!("sweep cell {axis_name} = {label}"))?;
            plans.push((label.clone(), rule, config));
        }
    }

    let mut rate_rows = Vec::new();
    let mut curve_rows = Vec::new();
    for (label, rule, config) in &plans {
        let matched = run_matched(config)?;
        let (mean, std) = mean_and_std(&rates(&matched)?);
        rate_rows.push(vec![
            axis_name.clone(),
            label.clone(),
            rule.as_str().to_string(),
            num(mean),
            num(std),
        ]);
        for mut row in aggregate(&matched, &grid)? {
            row.splice(
                0..0,
                [axis_name.clone(), label.clone(), rule.as_str().to_string()],
            );
            curve_rows.push(row);
        }
    }
    let mut out = OutputSet::default();
    out.add_csv("rates.csv", RATES_HEADER, rate_rows)?;
    let mut header = vec!["axis_name", "axis_value", "rule"];
    header.extend_from_slice(CURVE_SUMMARY_COLUMNS);
    out.add_csv("sweep_curves.csv", &header, curve_rows)?;
    out.add("manifest.resolved", manifest_text.as_bytes().to_vec());
    Ok(out)
}

/// Growth times keyed by rule, then by (input file, replication).
type GrowthLog = BTreeMap<String, BTreeMap<(usize, u64), Vec<u64>>>;

pub fn read_growth_events(paths: &[PathBuf]) -> Result<GrowthLog> {
    let mut log = GrowthLog::new();
    for (file, path) in paths.iter().enumerate() {
        let mut rdr =
            csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
        let header = rdr
            .headers()
            .with_context(|| format!("reading {}", path.display()))?
            .clone();
        if header.iter().collect::<Vec<_>>() != GROWTH_HEADER {
            bail!("{}: expected header `rule,replication,t`", path.display());
        }
        for (i, rec) in rdr.records().enumerate() {
            let line = i + 2;
            let rec = rec.with_context(|| format!("{}:{line}", path.display()))?;
            let bad = |what: &str| anyhow!("{}:{line}: invalid {what}", path.display());
            let rule = rec
                .get(0)
                .filter(|r| !r.is_empty())
                .ok_or_else(|| bad("rule"))?;
            let rep: u64 = rec
                .get(1)
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| bad("replication"))?;
            let t: u64 = rec
                .get(2)
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| bad("t"))?;
            log.entry(rule.to_string())
                .or_default()
                .entry((file, rep))
                .or_default()
                .push(t);
        }
    }
    Ok(log)
}

fn fit_params(fit: &TailFit) -> (f64, u64) {
    match *fit {
        TailFit::PowerLaw { alpha, x_min } => (alpha, x_min),
        TailFit::Geometric { p, x_min } => (p, x_min),
        TailFit::Exponential { lambda, x_min } => (lambda, x_min),
    }
}

/// Result of `analyze`, with warnings for rules that had too little data.
pub struct Analysis {
    pub outputs: OutputSet,
    pub warnings: Vec<String>,
}

pub fn analyze(paths: &[PathBuf], xmin: XminMode) -> Result<Analysis> {
    if paths.is_empty() {
        bail!("analyze needs at least one growth_events.csv");
    }
    let log = read_growth_events(paths)?;
    let mut warnings = Vec::new();
    let mut samples = Vec::new();
    let mut fits = Vec::new();
    for (rule, runs) in &log {
        let mut pooled = IntereventSample::default();
        for ((_, rep), times) in runs {
            let mut times = times.clone();
            times.sort_unstable();
            times.dedup();
            let sample = interevent_times(&times)?;
            samples.extend(
                sample
                    .values
                    .iter()
                    .map(|dt| vec![rule.clone(), rep.to_string(), dt.to_string()]),
            );
            pooled.extend(&sample);
        }
        match fit_rule(&pooled, xmin, rule, &mut warnings) {
            Some(a) => {
                let (alpha, x_min) = fit_params(&a.powerlaw);
                fits.push(vec![
                    rule.clone(),
                    a.n_samples.to_string(),
                    num(alpha),
                    x_min.to_string(),
                    num(fit_params(&a.geometric).0),
                    num(fit_params(&a.exponential).0),
                    num(a.lr_exponential.r),
                    num(a.lr_exponential.p_value),
                ]);
            }
            None => {
                let mut row = vec![rule.clone(), pooled.len().to_string()];
                row.extend(std::iter::repeat_n("NA".to_string(), 6));
                fits.push(row);
            }
        }
    }
    if log.is_empty() {
        warnings.push("no growth events in input; nothing to fit".to_string());
    }
    let mut outputs = OutputSet::default();
    outputs.add_csv("tailfits.csv", TAILFITS_HEADER, fits)?;
    outputs.add_csv("interevent.csv", &["rule", "replication", "dt"], samples)?;
    Ok(Analysis { outputs, warnings })
}

fn fit_rule(
    sample: &IntereventSample,
    xmin: XminMode,
    rule: &str,
    warnings: &mut Vec<String>,
) -> Option<TailAnalysis> {
    if sample.len() < 2 {
        warnings.push(format!(
            "rule {rule}: {} interevent times, need at least 2",
            sample.len()
        ));
        return None;
    }
    match analyze_tail(sample, xmin) {
        Ok(a) => Some(a),
        Err(_) if matches!(xmin, XminMode::Scan { .. }) => {
            warnings.push(format!(
                "rule {rule}: sample too small for an x_min scan, using x_min = 1"
            ));
            analyze_tail(sample, XminMode::Fixed(1))
                .map_err(|e| warnings.push(format!("rule {rule}: {e}")))
                .ok()
        }
        Err(e) => {
            warnings.push(format!("rule {rule}: {e}"));
            None
        }
    }
}
