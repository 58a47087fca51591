//! Post-run statistics: growth rates, accuracy curves against the baseline,
//! and the burstiness of growth (interevent-time fits and the likelihood-ratio
//! comparison between a power law and a memoryless alternative).

use statrs::distribution::{ContinuousCDF, StudentsT};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::sim::{Checkpoint, RunTrace};

/// Gaps between consecutive growth events, each `>= 1`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IntereventSample {
    pub values: Vec<u64>,
}

impl IntereventSample {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn extend(&mut self, other: &IntereventSample) {
        self.values.extend_from_slice(&other.values);
    }

    /// Samples pooled across runs.
    pub fn pooled<'a>(samples: impl IntoIterator<Item = &'a IntereventSample>) -> Self {
        let mut out = IntereventSample::default();
        for s in samples {
            out.extend(s);
        }
        out
    }

    fn mean(&self) -> f64 {
        self.values.iter().sum::<u64>() as f64 / self.values.len() as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailFit {
    /// `P(x) ∝ x^-alpha` for `x >= x_min`, discretized on unit bins around each integer.
    PowerLaw { alpha: f64, x_min: u64 },
    /// `P(x) = p (1 - p)^(x - x_min)` on `x >= x_min` (`x_min = 1` for a plain fit).
    Geometric { p: f64, x_min: u64 },
    /// Continuous analog of the geometric: density `lambda exp(-lambda (x - x_min + 1))`.
    Exponential { lambda: f64, x_min: u64 },
}

impl TailFit {
    /// Log probability (mass or density) of one observation.
    pub fn log_prob(&self, x: u64) -> f64 {
        let xf = x as f64;
        match *self {
            TailFit::PowerLaw { alpha, x_min } => {
                if x < x_min {
                    return f64::NEG_INFINITY;
                }
                let lo = x_min as f64 - 0.5;
                let mass =
                    ((xf - 0.5) / lo).powf(1.0 - alpha) - ((xf + 0.5) / lo).powf(1.0 - alpha);
                mass.ln()
            }
            TailFit::Geometric { p, x_min } => {
                if x < x_min {
                    return f64::NEG_INFINITY;
                }
                if p >= 1.0 {
                    return if x == x_min { 0.0 } else { f64::NEG_INFINITY };
                }
                p.ln() + (xf - x_min as f64) * (1.0 - p).ln()
            }
            TailFit::Exponential { lambda, x_min } => {
                if x < x_min {
                    return f64::NEG_INFINITY;
                }
                lambda.ln() - lambda * (xf - x_min as f64 + 1.0)
            }
        }
    }

    /// Upper-tail CDF `P(X >= x)` (used for KS scans and figure overlays).
    pub fn survival(&self, x: u64) -> f64 {
        let xf = x as f64;
        match *self {
            TailFit::PowerLaw { alpha, x_min } => {
                if x <= x_min {
                    return 1.0;
                }
                ((xf - 0.5) / (x_min as f64 - 0.5)).powf(1.0 - alpha)
            }
            TailFit::Geometric { p, x_min } => {
                if x <= x_min {
                    1.0
                } else {
                    (1.0 - p).powf((x - x_min) as f64)
                }
            }
            TailFit::Exponential { lambda, x_min } => {
                if x <= x_min {
                    1.0
                } else {
                    (-lambda * (xf - x_min as f64)).exp()
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LrResult {
    /// Log-likelihood ratio; positive favors the first model.
    pub r: f64,
    pub p_value: f64,
}

pub fn interevent_times(growth_times: &[u64]) -> Result<IntereventSample> {
    if growth_times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::domain("growth times must be strictly increasing"));
    }
    Ok(IntereventSample {
        values: growth_times.windows(2).map(|w| w[1] - w[0]).collect(),
    })
}

/// MLE `p = 1 / mean` for a geometric law on `{1, 2, ...}`.
pub fn fit_geometric(sample: &IntereventSample) -> Result<TailFit> {
    if sample.is_empty() {
        return Err(Error::Empty("interevent sample"));
    }
    Ok(TailFit::Geometric {
        p: 1.0 / sample.mean(),
        x_min: 1,
    })
}

/// Geometric law shifted to start at `x_min`, fitted to values `>= x_min`.
pub fn fit_geometric_tail(sample: &IntereventSample, x_min: u64) -> Result<TailFit> {
    let tail = tail_of(sample, x_min);
    if tail.is_empty() || x_min == 0 {
        return Err(Error::Empty("interevent tail"));
    }
    let mean = tail.iter().sum::<u64>() as f64 / tail.len() as f64;
    Ok(TailFit::Geometric {
        p: 1.0 / (mean - x_min as f64 + 1.0),
        x_min,
    })
}

/// MLE rate of the continuous analog on values `>= x_min`.
pub fn fit_exponential(sample: &IntereventSample, x_min: u64) -> Result<TailFit> {
    let tail = tail_of(sample, x_min);
    if tail.is_empty() {
        return Err(Error::Empty("interevent sample"));
    }
    let mean = tail.iter().sum::<u64>() as f64 / tail.len() as f64;
    Ok(TailFit::Exponential {
        lambda: 1.0 / (mean - x_min as f64 + 1.0),
        x_min,
    })
}

fn tail_of(sample: &IntereventSample, x_min: u64) -> Vec<u64> {
    sample
        .values
        .iter()
        .copied()
        .filter(|&x| x >= x_min)
        .collect()
}

/// Power-law exponent by the continuous approximation
/// `alpha = 1 + n / sum ln(x / (x_min - 1/2))` over values `>= x_min`.
pub fn fit_powerlaw(sample: &IntereventSample, x_min: u64) -> Result<TailFit> {
    if x_min == 0 {
        return Err(Error::domain("x_min must be >= 1"));
    }
    let tail = tail_of(sample, x_min);
    if tail.len() < 2 {
        return Err(Error::domain(format!(
            "need at least 2 values >= x_min = {x_min}, have {}",
            tail.len()
        )));
    }
    let lo = x_min as f64 - 0.5;
    let sum: f64 = tail.iter().map(|&x| (x as f64 / lo).ln()).sum();
    Ok(TailFit::PowerLaw {
        alpha: 1.0 + tail.len() as f64 / sum,
        x_min,
    })
}

/// Kolmogorov-Smirnov distance between the sample tail and a fit.
pub fn ks_distance(sample: &IntereventSample, fit: &TailFit, x_min: u64) -> f64 {
    let mut tail = tail_of(sample, x_min);
    tail.sort_unstable();
    let n = tail.len() as f64;
    let mut worst: f64 = 0.0;
    let mut i = 0;
    while i < tail.len() {
        let x = tail[i];
        // empirical P(X >= x) vs model
        let emp = (tail.len() - i) as f64 / n;
        worst = worst.max((emp - fit.survival(x)).abs());
        while i < tail.len() && tail[i] == x {
            i += 1;
        }
        let emp_next = (tail.len() - i) as f64 / n;
        worst = worst.max((emp_next - fit.survival(x + 1)).abs());
    }
    worst
}

/// Power-law fit with `x_min` chosen from `candidates` by minimum KS distance.
pub fn fit_powerlaw_scan(sample: &IntereventSample, candidates: &[u64]) -> Result<TailFit> {
    candidates
        .iter()
        .filter_map(|&x_min| {
            let fit = fit_powerlaw(sample, x_min).ok()?;
            Some((ks_distance(sample, &fit, x_min), fit))
        })
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, fit)| fit)
        .ok_or_else(|| Error::domain("no candidate x_min has enough data"))
}

/// Distinct sample values that leave at least `min_tail` observations at or above them.
pub fn xmin_candidates(sample: &IntereventSample, min_tail: usize) -> Vec<u64> {
    let mut sorted = sample.values.clone();
    sorted.sort_unstable();
    let mut out = Vec::new();
    for (i, &x) in sorted.iter().enumerate() {
        if sorted.len() - i < min_tail.max(2) {
            break;
        }
        if out.last() != Some(&x) {
            out.push(x);
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XminMode {
    Fixed(u64),
    /// KS-minimizing scan over distinct values leaving at least this many points.
    Scan {
        min_tail: usize,
    },
}

impl Default for XminMode {
    fn default() -> Self {
        XminMode::Scan { min_tail: 100 }
    }
}

/// Power-law, geometric and exponential fits on a common tail, with the
/// likelihood-ratio test of the power law against the exponential and against
/// the geometric.
#[derive(Debug, Clone, PartialEq)]
pub struct TailAnalysis {
    pub n_samples: usize,
    pub n_tail: usize,
    pub powerlaw: TailFit,
    pub geometric: TailFit,
    pub exponential: TailFit,
    pub lr_exponential: LrResult,
    pub lr_geometric: LrResult,
}

pub fn analyze_tail(sample: &IntereventSample, mode: XminMode) -> Result<TailAnalysis> {
    let powerlaw = match mode {
        XminMode::Fixed(x_min) => fit_powerlaw(sample, x_min)?,
        XminMode::Scan { min_tail } => {
            fit_powerlaw_scan(sample, &xmin_candidates(sample, min_tail))?
        }
    };
    let TailFit::PowerLaw { x_min, .. } = powerlaw else {
        unreachable!("power-law fit")
    };
    let tail = IntereventSample {
        values: tail_of(sample, x_min),
    };
    let geometric = fit_geometric_tail(&tail, x_min)?;
    let exponential = fit_exponential(&tail, x_min)?;
    Ok(TailAnalysis {
        n_samples: sample.len(),
        n_tail: tail.len(),
        powerlaw,
        geometric,
        exponential,
        lr_exponential: likelihood_ratio(&tail, &powerlaw, &exponential)?,
        lr_geometric: likelihood_ratio(&tail, &powerlaw, &geometric)?,
    })
}

/// Normalized log-likelihood ratio test between two fits on the same sample.
pub fn likelihood_ratio(
    sample: &IntereventSample,
    fit_a: &TailFit,
    fit_b: &TailFit,
) -> Result<LrResult> {
    let n = sample.len();
    if n < 2 {
        return Err(Error::domain(
            "likelihood ratio needs at least 2 observations",
        ));
    }
    let diffs: Vec<f64> = sample
        .values
        .iter()
        .map(|&x| fit_a.log_prob(x) - fit_b.log_prob(x))
        .collect();
    if diffs.iter().any(|d| !d.is_finite()) {
        return Err(Error::domain(
            "a fit assigns zero probability to an observation",
        ));
    }
    let r: f64 = diffs.iter().sum();
    let mean = r / n as f64;
    let var = diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / n as f64;
    if var == 0.0 {
        return Ok(LrResult {
            r: 0.0,
            p_value: 1.0,
        });
    }
    let p_value = erfc(r.abs() / (2.0 * n as f64 * var).sqrt()).clamp(0.0, 1.0);
    Ok(LrResult { r, p_value })
}

/// `(N_final - N_0) / spent`.
pub fn growth_rate(trace: &RunTrace) -> Result<f64> {
    if trace.spent() == 0 {
        return Err(Error::domain(
            "growth rate undefined for a run with no spending",
        ));
    }
    Ok(trace.grow_count() as f64 / trace.spent() as f64)
}

/// Last checkpoint at or before each grid point. Grid points before the first
/// checkpoint take the first checkpoint.
pub fn resample_locf(checkpoints: &[Checkpoint], grid: &[u64]) -> Vec<Checkpoint> {
    let mut out = Vec::with_capacity(grid.len());
    let mut k = 0;
    for &t in grid {
        while k + 1 < checkpoints.len() && checkpoints[k + 1].t <= t {
            k += 1;
        }
        let mut c = checkpoints[k];
        c.t = t;
        out.push(c);
    }
    out
}

/// Budget grid `0, stride, 2 stride, ..., budget` (the last point is always `budget`).
pub fn budget_grid(budget: u64, stride: u64) -> Vec<u64> {
    let mut grid: Vec<u64> = (0..=budget).step_by(stride.max(1) as usize).collect();
    if grid.last() != Some(&budget) {
        grid.push(budget);
    }
    grid
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub t: u64,
    pub forecast_mean: f64,
    pub forecast_std: f64,
    pub baseline_mean: f64,
    pub baseline_std: f64,
    pub improvement_mean: f64,
    pub n_tasks_mean: f64,
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

pub fn mean_and_std(xs: &[f64]) -> (f64, f64) {
    mean_std(xs)
}

/// Per-gridpoint accuracy (mean, sample std) for forecasting runs and
/// their baselines, plus mean improvement and mean task count.
pub fn aggregate_runs(
    traces: &[&RunTrace],
    baselines: &[&RunTrace],
    grid: &[u64],
) -> Result<Vec<CurvePoint>> {
    if traces.len() != baselines.len() {
        return Err(Error::Mismatch(traces.len(), baselines.len()));
    }
    if traces.is_empty() {
        return Err(Error::Empty("trace list"));
    }
    let fc: Vec<Vec<Checkpoint>> = traces
        .iter()
        .map(|t| resample_locf(&t.checkpoints, grid))
        .collect();
    let bl: Vec<Vec<Checkpoint>> = baselines
        .iter()
        .map(|t| resample_locf(&t.checkpoints, grid))
        .collect();
    Ok(grid
        .iter()
        .enumerate()
        .map(|(g, &t)| {
            let f: Vec<f64> = fc.iter().map(|c| c[g].accuracy).collect();
            let b: Vec<f64> = bl.iter().map(|c| c[g].accuracy).collect();
            let d: Vec<f64> = f.iter().zip(&b).map(|(x, y)| x - y).collect();
            let n: Vec<f64> = fc.iter().map(|c| c[g].n_tasks as f64).collect();
            let (forecast_mean, forecast_std) = mean_std(&f);
            let (baseline_mean, baseline_std) = mean_std(&b);
            CurvePoint {
                t,
                forecast_mean,
                forecast_std,
                baseline_mean,
                baseline_std,
                improvement_mean: mean_std(&d).0,
                n_tasks_mean: mean_std(&n).0,
            }
        })
        .collect())
}

/// One-sided paired t-test of `mean(diffs) > 0`. Returns the p-value.
pub fn paired_t_test_greater(diffs: &[f64]) -> Result<f64> {
    if diffs.len() < 2 {
        return Err(Error::domain("paired test needs at least 2 pairs"));
    }
    let (mean, std) = mean_std(diffs);
    if std == 0.0 {
        return Ok(if mean > 0.0 { 0.0 } else { 1.0 });
    }
    let t = mean / (std / (diffs.len() as f64).sqrt());
    let dist = StudentsT::new(0.0, 1.0, (diffs.len() - 1) as f64)
        .map_err(|e| Error::domain(e.to_string()))?;
    Ok(1.0 - dist.cdf(t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{TaskId, TaskState, TruthSource};
    use crate::sim::stream_rng;
    use proptest::prelude::*;
    use rand::Rng;

    fn sample(values: &[u64]) -> IntereventSample {
        IntereventSample {
            values: values.to_vec(),
        }
    }

    /// Inverse-CDF draw from the unit-bin discretized power law on `x >= x_min`.
    fn draw_powerlaw_from<R: Rng>(alpha: f64, x_min: u64, rng: &mut R) -> u64 {
        let u: f64 = rng.random::<f64>();
        let x = (x_min as f64 - 0.5) * (1.0 - u).powf(-1.0 / (alpha - 1.0));
        (x + 0.5).floor() as u64
    }

    fn draw_powerlaw<R: Rng>(alpha: f64, rng: &mut R) -> u64 {
        draw_powerlaw_from(alpha, 1, rng)
    }

    fn draw_geometric<R: Rng>(p: f64, rng: &mut R) -> u64 {
        let u: f64 = rng.random::<f64>();
        1 + ((1.0 - u).ln() / (1.0 - p).ln()).floor() as u64
    }

    fn trace(seed_tasks: usize, n_final: usize, spent: usize) -> RunTrace {
        let t = TaskState::new(
            TaskId(0),
            TruthSource::Synthetic {
                theta: 0.9,
                true_label: 1,
            },
        );
        let grown = n_final - seed_tasks;
        RunTrace {
            seed_tasks,
            total_budget: spent as u64,
            t_offset: 0,
            events: vec![
                crate::sim::Event {
                    t: 0,
                    kind: crate::sim::EventKind::Respond(TaskId(0), 1)
                };
                spent
            ],
            checkpoints: vec![Checkpoint {
                t: 0,
                n_tasks: seed_tasks,
                accuracy: 0.5,
            }],
            final_tasks: vec![t; n_final],
            growth_times: (0..grown as u64).collect(),
        }
    }

    #[test]
    fn interevent_examples() {
        assert_eq!(interevent_times(&[5, 6, 10]).unwrap().values, vec![1, 4]);
        assert!(interevent_times(&[7]).unwrap().is_empty());
        assert_eq!(
            interevent_times(&[1, 2, 3, 4]).unwrap().values,
            vec![1, 1, 1]
        );
        assert!(interevent_times(&[3, 3]).is_err());
        assert!(interevent_times(&[4, 2]).is_err());
    }

    #[test]
    fn geometric_fit_examples() {
        assert_eq!(
            fit_geometric(&sample(&[2, 6, 4, 4])).unwrap(),
            TailFit::Geometric { p: 0.25, x_min: 1 }
        );
        assert_eq!(
            fit_geometric(&sample(&[1, 1, 1])).unwrap(),
            TailFit::Geometric { p: 1.0, x_min: 1 }
        );
        assert_eq!(
            fit_geometric_tail(&sample(&[1, 3, 5]), 3).unwrap(),
            TailFit::Geometric { p: 0.5, x_min: 3 }
        );
        assert!(fit_geometric(&sample(&[])).is_err());

        let mut rng = stream_rng(10, 0, 0);
        let s = IntereventSample {
            values: (0..100_000)
                .map(|_| draw_geometric(0.2, &mut rng))
                .collect(),
        };
        let TailFit::Geometric { p, .. } = fit_geometric(&s).unwrap() else {
            unreachable!()
        };
        assert!((p - 0.2).abs() < 0.01, "{p}");
    }

    #[test]
    fn geometric_refit_is_self_consistent() {
        let mut rng = stream_rng(12, 0, 0);
        let s = IntereventSample {
            values: (0..5000).map(|_| draw_geometric(0.35, &mut rng)).collect(),
        };
        let TailFit::Geometric { p, .. } = fit_geometric(&s).unwrap() else {
            unreachable!()
        };
        let s2 = IntereventSample {
            values: (0..5000).map(|_| draw_geometric(p, &mut rng)).collect(),
        };
        let TailFit::Geometric { p: p2, .. } = fit_geometric(&s2).unwrap() else {
            unreachable!()
        };
        // standard error of p-hat: p sqrt((1 - p) / n)
        let se = p * ((1.0 - p) / 5000.0).sqrt();
        assert!((p2 - p).abs() < 3.0 * se, "{p} vs {p2}");
    }

    #[test]
    fn powerlaw_fit_examples() {
        let TailFit::PowerLaw { alpha, .. } = fit_powerlaw(&sample(&[1, 1, 1, 1]), 1).unwrap()
        else {
            unreachable!()
        };
        assert!((alpha - (1.0 + 1.0 / 2f64.ln())).abs() < 1e-12);
        assert!(fit_powerlaw(&sample(&[2, 2]), 3).is_err());

        // At x_min = 1 the continuous approximation is biased: for a true exponent
        // of 2.5 it converges to 1 + 1 / E[ln(2x)] = 2.10182 (series over the binned pmf).
        let mut rng = stream_rng(11, 0, 0);
        let s = IntereventSample {
            values: (0..100_000).map(|_| draw_powerlaw(2.5, &mut rng)).collect(),
        };
        let TailFit::PowerLaw { alpha, .. } = fit_powerlaw(&s, 1).unwrap() else {
            unreachable!()
        };
        assert!((alpha - 2.10182).abs() < 0.02, "{alpha}");

        // well above the cutoff it recovers the exponent
        let s = IntereventSample {
            values: (0..200_000)
                .map(|_| draw_powerlaw_from(2.5, 10, &mut rng))
                .collect(),
        };
        let TailFit::PowerLaw { alpha, .. } = fit_powerlaw(&s, 10).unwrap() else {
            unreachable!()
        };
        assert!((alpha - 2.5).abs() < 0.05, "{alpha}");
    }

    #[test]
    fn powerlaw_pmf_normalizes() {
        let fit = TailFit::PowerLaw {
            alpha: 2.2,
            x_min: 2,
        };
        let total: f64 = (2..2_000_000u64).map(|x| fit.log_prob(x).exp()).sum();
        assert!((total + fit.survival(2_000_000) - 1.0).abs() < 1e-9);
        let geo = TailFit::Geometric { p: 0.3, x_min: 1 };
        let total: f64 = (1..500u64).map(|x| geo.log_prob(x).exp()).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ks_scan_picks_a_candidate() {
        let mut rng = stream_rng(13, 0, 0);
        let s = IntereventSample {
            values: (0..20_000).map(|_| draw_powerlaw(2.3, &mut rng)).collect(),
        };
        let TailFit::PowerLaw { alpha, x_min } = fit_powerlaw_scan(&s, &[1, 2, 3, 5]).unwrap()
        else {
            unreachable!()
        };
        assert!([1, 2, 3, 5].contains(&x_min));
        assert!((alpha - 2.3).abs() < 0.15);
    }

    #[test]
    fn likelihood_ratio_examples() {
        let s = sample(&[1, 2, 3, 5, 8]);
        let fit = fit_geometric(&s).unwrap();
        let lr = likelihood_ratio(&s, &fit, &fit).unwrap();
        assert_eq!(
            lr,
            LrResult {
                r: 0.0,
                p_value: 1.0
            }
        );

        let mut rng = stream_rng(14, 0, 0);
        let pl = IntereventSample {
            values: (0..10_000).map(|_| draw_powerlaw(2.5, &mut rng)).collect(),
        };
        let lr = likelihood_ratio(
            &pl,
            &fit_powerlaw(&pl, 1).unwrap(),
            &fit_geometric(&pl).unwrap(),
        )
        .unwrap();
        assert!(lr.r > 0.0 && lr.p_value < 0.05, "{lr:?}");

        let geo = IntereventSample {
            values: (0..10_000).map(|_| draw_geometric(0.3, &mut rng)).collect(),
        };
        let lr = likelihood_ratio(
            &geo,
            &fit_powerlaw(&geo, 1).unwrap(),
            &fit_geometric(&geo).unwrap(),
        )
        .unwrap();
        assert!(lr.r < 0.0, "{lr:?}");
        let lr = likelihood_ratio(
            &geo,
            &fit_powerlaw(&geo, 1).unwrap(),
            &fit_exponential(&geo, 1).unwrap(),
        )
        .unwrap();
        assert!(lr.r < 0.0, "{lr:?}");

        assert!(likelihood_ratio(&sample(&[3]), &fit, &fit).is_err());
    }

    #[test]
    fn growth_rate_examples() {
        assert!((growth_rate(&trace(100, 160, 3000)).unwrap() - 0.02).abs() < 1e-15);
        assert_eq!(growth_rate(&trace(100, 100, 3000)).unwrap(), 0.0);
        assert_eq!(growth_rate(&trace(1, 11, 10)).unwrap(), 1.0);
        assert!(growth_rate(&trace(10, 10, 0)).is_err());
    }

    #[test]
    fn locf_resampling() {
        let cps = vec![
            Checkpoint {
                t: 5,
                n_tasks: 1,
                accuracy: 0.1,
            },
            Checkpoint {
                t: 10,
                n_tasks: 2,
                accuracy: 0.2,
            },
            Checkpoint {
                t: 30,
                n_tasks: 3,
                accuracy: 0.3,
            },
        ];
        let out = resample_locf(&cps, &[0, 10, 20, 30]);
        let acc: Vec<f64> = out.iter().map(|c| c.accuracy).collect();
        assert_eq!(acc, vec![0.1, 0.2, 0.2, 0.3]);
        assert_eq!(budget_grid(25, 10), vec![0, 10, 20, 25]);
        assert_eq!(budget_grid(0, 10), vec![0]);
    }

    #[test]
    fn aggregate_examples() {
        let mut a = trace(10, 10, 5);
        a.checkpoints = vec![Checkpoint {
            t: 0,
            n_tasks: 10,
            accuracy: 0.6,
        }];
        let mut b = trace(10, 10, 5);
        b.checkpoints = vec![Checkpoint {
            t: 0,
            n_tasks: 10,
            accuracy: 0.5,
        }];
        let grid = [0, 10];
        let one = aggregate_runs(&[&a], &[&b], &grid).unwrap();
        assert!((one[0].improvement_mean - 0.1).abs() < 1e-12);

        let many = aggregate_runs(&[&a, &a, &a], &[&b, &b, &b], &grid).unwrap();
        assert_eq!(many[1].forecast_std, 0.0);
        assert_eq!(many[1].baseline_std, 0.0);
        assert!(matches!(
            aggregate_runs(&[&a, &a], &[&b], &grid),
            Err(Error::Mismatch(2, 1))
        ));
    }

    #[test]
    fn tail_analysis_on_shifted_power_law() {
        let mut rng = stream_rng(15, 0, 0);
        let s = IntereventSample {
            values: (0..20_000)
                .map(|_| draw_powerlaw_from(2.0, 3, &mut rng))
                .collect(),
        };
        assert_eq!(xmin_candidates(&sample(&[1, 1, 2, 3, 9]), 2), vec![1, 2, 3]);
        let a = analyze_tail(&s, XminMode::Scan { min_tail: 100 }).unwrap();
        assert!(
            a.lr_exponential.r > 0.0 && a.lr_exponential.p_value < 0.05,
            "{a:?}"
        );
        assert!(a.lr_geometric.r > 0.0);
        let fixed = analyze_tail(&s, XminMode::Fixed(3)).unwrap();
        assert_eq!(fixed.n_tail, 20_000);
    }

    #[test]
    fn paired_t_test_direction() {
        let up = [0.02, 0.03, 0.01, 0.025, 0.015, 0.02];
        assert!(paired_t_test_greater(&up).unwrap() < 0.01);
        let down: Vec<f64> = up.iter().map(|x| -x).collect();
        assert!(paired_t_test_greater(&down).unwrap() > 0.99);
    }

    proptest! {
        #[test]
        fn interevent_sum_telescopes(mut times in proptest::collection::btree_set(0u64..10_000, 2..60)) {
            let times: Vec<u64> = std::mem::take(&mut times).into_iter().collect();
            let s = interevent_times(&times).unwrap();
            prop_assert_eq!(s.values.iter().sum::<u64>(), times[times.len() - 1] - times[0]);
            prop_assert!(s.values.iter().all(|&v| v >= 1));
        }

        #[test]
        fn likelihood_ratio_antisymmetric(values in proptest::collection::vec(1u64..200, 3..80)) {
            let s = IntereventSample { values };
            let pl = fit_powerlaw(&s, 1).unwrap();
            let geo = fit_geometric(&s).unwrap();
            let ab = likelihood_ratio(&s, &pl, &geo).unwrap();
            let ba = likelihood_ratio(&s, &geo, &pl).unwrap();
            prop_assert!((ab.r + ba.r).abs() < 1e-9 * ab.r.abs().max(1.0));
            prop_assert!((ab.p_value - ba.p_value).abs() < 1e-12);
        }

        #[test]
        fn powerlaw_alpha_falls_as_log_mean_rises(values in proptest::collection::vec(1u64..500, 2..50), bump in 1u64..50) {
            let s = IntereventSample { values: values.clone() };
            let bigger = IntereventSample { values: values.iter().map(|v| v + bump).collect() };
            let TailFit::PowerLaw { alpha: a, .. } = fit_powerlaw(&s, 1).unwrap() else { unreachable!() };
            let TailFit::PowerLaw { alpha: b, .. } = fit_powerlaw(&bigger, 1).unwrap() else { unreachable!() };
            prop_assert!(b < a);
        }
    }
}
