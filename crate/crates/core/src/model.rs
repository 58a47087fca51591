//! Binary labeling task model: response tallies, the hidden task parameter,
//! majority-vote label inference and accuracy over a task set.

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};

/// A binary label or worker response.
pub type Bit = u8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TaskId(pub u32);

impl fmt::Display for TaskId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Where a task's responses come from and what its correct label is.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TruthSource {
    /// Simulated task with response rate `theta`; `true_label` is 1 iff theta > 1/2.
    Synthetic { theta: f64, true_label: Bit },
    /// Task replayed from a recorded dataset. `source_index` points into that dataset.
    Replay {
        response_prob: f64,
        gold_label: Bit,
        source_index: u32,
    },
}

impl TruthSource {
    /// Synthetic truth for `theta`. At exactly 1/2 the label is a fair coin from `rng`.
    pub fn synthetic<R: Rng + ?Sized>(theta: f64, rng: &mut R) -> Result<Self> {
        if !(0.0..=1.0).contains(&theta) {
            return Err(Error::domain(format!("theta {theta} outside [0, 1]")));
        }
        let true_label = if theta > 0.5 {
            1
        } else if theta < 0.5 {
            0
        } else {
            rng.random_bool(0.5) as Bit
        };
        Ok(TruthSource::Synthetic { theta, true_label })
    }

    /// Probability that a simulated response is 1.
    pub fn response_prob(&self) -> f64 {
        match *self {
            TruthSource::Synthetic { theta, .. } => theta,
            TruthSource::Replay { response_prob, .. } => response_prob,
        }
    }

    pub fn label(&self) -> Bit {
        match *self {
            TruthSource::Synthetic { true_label, .. } => true_label,
            TruthSource::Replay { gold_label, .. } => gold_label,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaskState {
    pub id: TaskId,
    /// Number of 1 responses.
    pub pos: u32,
    /// Number of 0 responses.
    pub neg: u32,
    pub truth: TruthSource,
}

impl TaskState {
    pub fn new(id: TaskId, truth: TruthSource) -> Self {
        TaskState {
            id,
            pos: 0,
            neg: 0,
            truth,
        }
    }

    pub fn n(&self) -> u32 {
        self.pos + self.neg
    }

    pub fn record_response(&mut self, response: Bit) -> Result<()> {
        match response {
            1 => self.pos += 1,
            0 => self.neg += 1,
            other => return Err(Error::domain(format!("response {other} is not binary"))),
        }
        Ok(())
    }

    /// Point estimate of the task parameter, `pos / n`.
    pub fn theta_hat(&self) -> Result<f64> {
        match self.n() {
            0 => Err(Error::UndefinedEstimate),
            n => Ok(f64::from(self.pos) / f64::from(n)),
        }
    }

    /// Majority label; ties (including no responses) are a fair coin.
    pub fn infer_label<R: Rng + ?Sized>(&self, rng: &mut R) -> Bit {
        use std::cmp::Ordering::*;
        match self.pos.cmp(&self.neg) {
            Greater => 1,
            Less => 0,
            Equal => rng.random_bool(0.5) as Bit,
        }
    }

    pub fn is_correct<R: Rng + ?Sized>(&self, rng: &mut R) -> bool {
        self.infer_label(rng) == self.truth.label()
    }
}

/// Fraction of `tasks` whose inferred label matches the truth.
///
/// Every listed task counts in the denominator, including unanswered ones.
pub fn accuracy<R: Rng + ?Sized>(tasks: &[TaskState], rng: &mut R) -> Result<f64> {
    if tasks.is_empty() {
        return Err(Error::Empty("task set"));
    }
    let correct = tasks.iter().filter(|t| t.is_correct(rng)).count();
    Ok(correct as f64 / tasks.len() as f64)
}

/// Request budget. The clock advances by one per spent unit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BudgetLedger {
    pub total: u64,
    pub spent: u64,
}

impl BudgetLedger {
    pub fn new(total: u64) -> Self {
        BudgetLedger { total, spent: 0 }
    }

    pub fn clock(&self) -> u64 {
        self.spent
    }

    pub fn remaining(&self) -> u64 {
        self.total - self.spent
    }

    pub fn is_exhausted(&self) -> bool {
        self.spent >= self.total
    }

    /// Spends one unit and returns the timestep it was spent at.
    pub fn spend(&mut self) -> Result<u64> {
        if self.is_exhausted() {
            return Err(Error::BudgetExhausted(self.spent));
        }
        let t = self.spent;
        self.spent += 1;
        Ok(t)
    }
}
