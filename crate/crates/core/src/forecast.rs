//! Completion-cost forecasting.
//!
//! A task with tallies `(a, n)` is complete once the Hoeffding interval around
//! `a / n` excludes 1/2. [`remaining_cost`] estimates how many more responses
//! that takes, [`expected_unseen_cost`] estimates the cost of a brand new task
//! under a uniform prior, and [`should_grow`] compares the two to decide whether
//! to request a new task.

use rand::Rng;
use rand_distr::{Beta, Distribution};

use crate::error::{Error, Result};
use crate::model::{TaskId, TaskState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GrowthRule {
    /// Grow when the unseen cost is below the minimum available remaining cost.
    Min,
    /// Grow when the unseen cost is below the median available remaining cost.
    Median,
}

impl GrowthRule {
    pub fn as_str(&self) -> &'static str {
        match self {
            GrowthRule::Min => "gr1",
            GrowthRule::Median => "gr2",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "gr1" | "i" | "1" => Some(GrowthRule::Min),
            "gr2" | "ii" | "2" => Some(GrowthRule::Median),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForecastConfig {
    pub delta: f64,
    pub n_max: f64,
    pub rule: GrowthRule,
    pub proposal_cost: f64,
    pub response_cost: f64,
    /// Add the proposal cost to the unseen-task side of the growth comparison.
    pub include_proposal_cost: bool,
}

impl ForecastConfig {
    pub fn new(delta: f64, n_max: f64, rule: GrowthRule) -> Result<Self> {
        let cfg = ForecastConfig {
            delta,
            n_max,
            rule,
            proposal_cost: 1.0,
            response_cost: 1.0,
            include_proposal_cost: false,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let floor = n_min(self.delta)?;
        if !(self.n_max >= floor) {
            return Err(Error::domain(format!(
                "n_max {} below n_min {floor} for delta {}",
                self.n_max, self.delta
            )));
        }
        if !(self.proposal_cost >= 0.0) || !(self.response_cost > 0.0) {
            return Err(Error::domain(
                "proposal cost must be >= 0 and response cost > 0",
            ));
        }
        Ok(())
    }

    pub fn expected_unseen(&self) -> f64 {
        expected_unseen_cost(self.delta, self.n_max).expect("validated config")
    }

    /// Applies the configured growth rule to the remaining costs of the available set.
    /// `costs` is reordered in place.
    pub fn decide(&self, expected_unseen: f64, costs: &mut [f64]) -> bool {
        if self.include_proposal_cost {
            let unseen = self.proposal_cost + self.response_cost * expected_unseen;
            for c in costs.iter_mut() {
                *c *= self.response_cost;
            }
            should_grow_in_place(unseen, costs, self.rule)
        } else {
            should_grow_in_place(expected_unseen, costs, self.rule)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostEstimate {
    pub task_id: TaskId,
    /// Additional responses needed; `<= 0` means complete.
    pub remaining: f64,
}

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("delta {delta} outside (0, 1)")))
    }
}

/// Smallest sample count for which `|theta_hat - theta| < epsilon` holds with
/// probability at least `1 - delta`.
pub fn hoeffding_sample_size(delta: f64, epsilon: f64) -> Result<u64> {
    check_delta(delta)?;
    if !(epsilon > 0.0) {
        return Err(Error::domain(format!("epsilon {epsilon} must be positive")));
    }
    let n = (2.0 / delta).ln() / (2.0 * epsilon * epsilon);
    // 1 - 1e-12 absorbs rounding when n lands on an integer
    Ok((n * (1.0 - 1e-12)).ceil().max(0.0) as u64)
}

/// Cost of an ideal task (theta = 0 or 1): `2 ln(2 / delta)`.
pub fn n_min(delta: f64) -> Result<f64> {
    check_delta(delta)?;
    Ok(2.0 * (2.0 / delta).ln())
}

/// Raw (unclamped) number of additional responses needed for a task with `pos`
/// ones among `n` responses. An exact tie assumes one more response arrives.
pub fn remaining_cost(pos: u32, n: u32, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    if n == 0 || pos > n {
        return Err(Error::domain(format!("invalid tallies pos={pos} n={n}")));
    }
    let log_term = (2.0 / delta).ln();
    let n = f64::from(n);
    let pos = f64::from(pos);
    if 2.0 * pos == n {
        let gap = pos / (n + 1.0) - 0.5;
        Ok(log_term / (2.0 * gap * gap) - n - 1.0)
    } else {
        let gap = pos / n - 0.5;
        Ok(log_term / (2.0 * gap * gap) - n)
    }
}

/// Remaining cost of one task; unanswered tasks carry `unseen_cost`.
pub fn task_cost(task: &TaskState, delta: f64, unseen_cost: f64) -> f64 {
    match task.n() {
        0 => unseen_cost,
        n => remaining_cost(task.pos, n, delta).expect("tallies are consistent"),
    }
}

/// Ids of tasks that still need responses. Unanswered tasks always qualify.
pub fn available_set(tasks: &[TaskState], delta: f64) -> Result<Vec<TaskId>> {
    check_delta(delta)?;
    Ok(tasks
        .iter()
        .filter(|t| t.n() == 0 || task_cost(t, delta, f64::INFINITY) > 0.0)
        .map(|t| t.id)
        .collect())
}

/// Remaining costs of the available set, with unanswered tasks valued at `unseen_cost`.
pub fn available_costs(tasks: &[TaskState], delta: f64, unseen_cost: f64) -> Vec<CostEstimate> {
    tasks
        .iter()
        .map(|t| CostEstimate {
            task_id: t.id,
            remaining: task_cost(t, delta, unseen_cost),
        })
        .filter(|c| c.remaining > 0.0)
        .collect()
}

/// Expected cost of completing an unseen task under a uniform prior, with
/// per-task cost capped at `n_max`:
/// `sqrt(n_min n_max) (2 - eta) - n_min (1 - eta)`, `eta = sqrt(n_min / n_max)`.
pub fn expected_unseen_cost(delta: f64, n_max: f64) -> Result<f64> {
    let lo = n_min(delta)?;
    if !(n_max >= lo) {
        return Err(Error::domain(format!("n_max {n_max} below n_min {lo}")));
    }
    let eta = (lo / n_max).sqrt();
    Ok((lo * n_max).sqrt() * (2.0 - eta) - lo * (1.0 - eta))
}

/// Prior over the task parameter of newly proposed tasks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PriorSpec {
    Uniform,
    Beta { alpha: f64, beta: f64 },
    PointMass(f64),
}

impl PriorSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            PriorSpec::Uniform => Ok(()),
            PriorSpec::Beta { alpha, beta } if alpha > 0.0 && beta > 0.0 => Ok(()),
            PriorSpec::PointMass(theta) if (0.0..=1.0).contains(&theta) => Ok(()),
            other => Err(Error::domain(format!("invalid prior {other:?}"))),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            PriorSpec::Uniform => rng.random::<f64>(),
            PriorSpec::Beta { alpha, beta } => Beta::new(alpha, beta)
                .expect("validated beta prior")
                .sample(rng),
            PriorSpec::PointMass(theta) => theta,
        }
    }
}

/// Cost to complete a task with known parameter `theta`, capped at `n_max`.
pub fn capped_cost(theta: f64, delta: f64, n_max: f64) -> f64 {
    let gap = theta - 0.5;
    if gap == 0.0 {
        return n_max;
    }
    ((2.0 / delta).ln() / (2.0 * gap * gap)).min(n_max)
}

/// Monte Carlo estimate of the expected capped completion cost of a task drawn
/// from `prior`. Under a uniform prior this converges to
/// `2 sqrt(n_min n_max) - n_min`, which is not the closed form of
/// [`expected_unseen_cost`].
pub fn expected_unseen_cost_mc<R: Rng + ?Sized>(
    prior: &PriorSpec,
    delta: f64,
    n_max: f64,
    samples: u64,
    rng: &mut R,
) -> Result<f64> {
    check_delta(delta)?;
    prior.validate()?;
    if samples == 0 {
        return Err(Error::domain("need at least one sample"));
    }
    let total: f64 = (0..samples)
        .map(|_| capped_cost(prior.sample(rng), delta, n_max))
        .sum();
    Ok(total / samples as f64)
}

/// Growth decision. An empty cost list always grows.
pub fn should_grow(expected_unseen: f64, costs: &[f64], rule: GrowthRule) -> bool {
    let mut owned = costs.to_vec();
    should_grow_in_place(expected_unseen, &mut owned, rule)
}

pub(crate) fn should_grow_in_place(
    expected_unseen: f64,
    costs: &mut [f64],
    rule: GrowthRule,
) -> bool {
    if costs.is_empty() {
        return true;
    }
    let threshold = match rule {
        GrowthRule::Min => costs.iter().copied().fold(f64::INFINITY, f64::min),
        GrowthRule::Median => median_in_place(costs),
    };
    expected_unseen < threshold
}

/// Median of a nonempty slice; even lengths average the two middle values.
pub(crate) fn median_in_place(xs: &mut [f64]) -> f64 {
    let len = xs.len();
    let mid = len / 2;
    let (lower, upper, _) = xs.select_nth_unstable_by(mid, f64::total_cmp);
    let upper = *upper;
    if len % 2 == 1 {
        upper
    } else {
        let below = lower.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        0.5 * (below + upper)
    }
}
