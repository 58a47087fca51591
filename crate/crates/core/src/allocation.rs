//! Task selection: the optimistic knowledge-gradient policy and a uniform-random control.
//!
//! Each task carries a Beta(1 + a, 1 + b) posterior over its parameter. The
//! stage value `h` is the posterior probability that the majority label is
//! correct, and the optimistic score is the best one-step gain in `h` over the
//! two possible next responses.

use rand::Rng;

use crate::error::{Error, Result};
use crate::model::{TaskId, TaskState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Policy {
    OptKg,
    UniformRandom,
}

impl Policy {
    pub fn as_str(&self) -> &'static str {
        match self {
            Policy::OptKg => "optkg",
            Policy::UniformRandom => "random",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "optkg" | "opt-kg" => Some(Policy::OptKg),
            "random" | "uniform" => Some(Policy::UniformRandom),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BetaPosterior {
    pub alpha: u32,
    pub beta: u32,
}

impl BetaPosterior {
    pub fn new(alpha: u32, beta: u32) -> Result<Self> {
        if alpha == 0 || beta == 0 {
            return Err(Error::domain("posterior parameters must be >= 1"));
        }
        Ok(BetaPosterior { alpha, beta })
    }

    /// Posterior under the uniform prior.
    pub fn from_task(task: &TaskState) -> Self {
        BetaPosterior {
            alpha: 1 + task.pos,
            beta: 1 + task.neg,
        }
    }
}

const EXACT_LIMIT: u32 = 64;

/// `2^-n * sum_{j=k}^{n} C(n, j)`: probability that a fair Binomial(n) is at least `k`.
fn upper_binomial_tail(n: u32, k: u32) -> f64 {
    if k == 0 {
        return 1.0;
    }
    if k > n {
        return 0.0;
    }
    if n <= EXACT_LIMIT {
        let mut c: u128 = 1;
        let mut sum: u128 = 0;
        for j in 0..=n {
            if j >= k {
                sum += c;
            }
            c = c * u128::from(n - j) / u128::from(j + 1);
        }
        return sum as f64 / 2f64.powi(n as i32);
    }
    // log-space: ln C(n, j) built by recurrence starting from j = k
    let n_f = f64::from(n);
    let mut log_c = ln_choose(n, k);
    let mut max = f64::NEG_INFINITY;
    let mut terms = Vec::with_capacity((n - k + 1) as usize);
    for j in k..=n {
        terms.push(log_c);
        max = max.max(log_c);
        if j < n {
            log_c += (n_f - f64::from(j)).ln() - f64::from(j + 1).ln();
        }
    }
    let sum: f64 = terms.iter().map(|t| (t - max).exp()).sum();
    (max + sum.ln() - n_f * std::f64::consts::LN_2).exp()
}

fn ln_choose(n: u32, k: u32) -> f64 {
    let k = k.min(n - k);
    (0..k)
        .map(|i| f64::from(n - i).ln() - f64::from(i + 1).ln())
        .sum()
}

/// `Pr(theta > 1/2)` under `Beta(alpha, beta)`.
pub fn prob_theta_gt_half(post: BetaPosterior) -> f64 {
    upper_binomial_tail(post.alpha + post.beta - 1, post.beta)
}

/// Posterior probability that the majority decision is wrong: `min(P, 1 - P)`.
fn stage_loss(alpha: u32, beta: u32) -> f64 {
    let n = alpha + beta - 1;
    upper_binomial_tail(n, beta).min(upper_binomial_tail(n, alpha))
}

/// Stage value `max(P, 1 - P)`.
pub fn h_value(post: BetaPosterior) -> f64 {
    1.0 - stage_loss(post.alpha, post.beta)
}

/// Optimistic one-step gain `max(h(a+1, b), h(a, b+1)) - h(a, b)`.
///
/// Evaluated as a difference of losses so that tiny gains for well-sampled tasks
/// keep their relative precision.
pub fn optkg_score(post: BetaPosterior) -> f64 {
    let BetaPosterior { alpha, beta } = post;
    let now = stage_loss(alpha, beta);
    let best_next = stage_loss(alpha + 1, beta).min(stage_loss(alpha, beta + 1));
    now - best_next
}

pub fn task_score(task: &TaskState) -> f64 {
    optkg_score(BetaPosterior::from_task(task))
}

/// Index of the largest score, ties broken uniformly at random.
pub fn argmax_random_tie<R, I>(scores: I, rng: &mut R) -> Option<usize>
where
    R: Rng + ?Sized,
    I: IntoIterator<Item = f64>,
{
    let mut best: Option<(usize, f64)> = None;
    let mut ties = 0u32;
    for (i, s) in scores.into_iter().enumerate() {
        match best {
            Some((_, b)) if s < b => {}
            Some((_, b)) if s == b => {
                ties += 1;
                if rng.random_range(0..ties) == 0 {
                    best = Some((i, s));
                }
            }
            _ => {
                best = Some((i, s));
                ties = 1;
            }
        }
    }
    best.map(|(i, _)| i)
}

#[cfg(feature = "parallel")]
fn scores(tasks: &[TaskState]) -> Vec<f64> {
    use rayon::prelude::*;
    tasks.par_iter().map(task_score).collect()
}

#[cfg(not(feature = "parallel"))]
fn scores(tasks: &[TaskState]) -> Vec<f64> {
    tasks.iter().map(task_score).collect()
}

/// Picks the next task to receive a response.
pub fn select_task<R: Rng + ?Sized>(
    tasks: &[TaskState],
    policy: Policy,
    rng: &mut R,
) -> Result<TaskId> {
    if tasks.is_empty() {
        return Err(Error::Empty("task set"));
    }
    let idx = match policy {
        Policy::UniformRandom => rng.random_range(0..tasks.len()),
        Policy::OptKg => argmax_random_tie(scores(tasks), rng).expect("nonempty"),
    };
    Ok(tasks[idx].id)
}
