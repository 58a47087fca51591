//! Canonical response tables for replaying recorded crowdsourcing data.
//!
//! A dataset is a pair of UTF-8 CSV files:
//!
//! ```text
//! responses: task_id,worker_id,response     (response in {0,1})
//! gold:      task_id,gold                   (gold in {0,1})
//! ```
//!
//! and a manifest lists datasets as `name,responses_path,gold_path` rows.
//! Relative paths in a manifest resolve against the manifest's directory.

use std::collections::HashMap;
use std::fs::File;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::model::{Bit, TaskId, TaskState, TruthSource};

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetTask {
    pub task_id: String,
    pub gold: Bit,
    pub responses: Vec<Bit>,
}

impl DatasetTask {
    /// Fraction of recorded responses equal to 1.
    pub fn replay_prob(&self) -> f64 {
        let ones = self.responses.iter().filter(|&&r| r == 1).count();
        ones as f64 / self.responses.len() as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalDataset {
    pub name: String,
    pub tasks: Vec<DatasetTask>,
}

impl CanonicalDataset {
    pub fn len(&self) -> usize {
        self.tasks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tasks.is_empty()
    }

    pub fn response_count(&self) -> usize {
        self.tasks.iter().map(|t| t.responses.len()).sum()
    }

    /// Builds a dataset in memory, applying the same checks as the loader.
    pub fn from_tasks(name: impl Into<String>, tasks: Vec<DatasetTask>) -> Result<Self> {
        let name = name.into();
        let mut seen = HashMap::new();
        for t in &tasks {
            let invalid = |msg: &str| Error::Validation {
                dataset: name.clone(),
                task: t.task_id.clone(),
                msg: msg.to_string(),
            };
            if seen.insert(t.task_id.as_str(), ()).is_some() {
                return Err(invalid("duplicate task id"));
            }
            if t.gold > 1 {
                return Err(invalid("gold label is not binary"));
            }
            if t.responses.is_empty() {
                return Err(invalid("task has no responses"));
            }
            if t.responses.iter().any(|&r| r > 1) {
                return Err(invalid("non-binary response"));
            }
        }
        Ok(CanonicalDataset { name, tasks })
    }

    fn truth(&self, index: usize) -> TruthSource {
        let t = &self.tasks[index];
        TruthSource::Replay {
            response_prob: t.replay_prob(),
            gold_label: t.gold,
            source_index: index as u32,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetEntry {
    pub name: String,
    pub responses_path: PathBuf,
    pub gold_path: PathBuf,
}

fn open(path: &Path) -> Result<csv::Reader<File>> {
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(file))
}

fn parse_err(path: &Path, line: u64, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        msg: msg.into(),
    }
}

fn check_header(reader: &mut csv::Reader<File>, path: &Path, expected: &[&str]) -> Result<()> {
    let header = reader
        .headers()
        .map_err(|e| parse_err(path, 1, e.to_string()))?;
    let got: Vec<&str> = header.iter().collect();
    if got != expected {
        return Err(parse_err(
            path,
            1,
            format!(
                "expected header {:?}, found {:?}",
                expected.join(","),
                got.join(",")
            ),
        ));
    }
    Ok(())
}

/// Reads `(line, fields)` rows with a fixed column count.
fn rows(path: &Path, expected: &[&str]) -> Result<Vec<(u64, Vec<String>)>> {
    let mut reader = open(path)?;
    check_header(&mut reader, path, expected)?;
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            parse_err(path, line, e.to_string())
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.len() != expected.len() {
            return Err(parse_err(path, line, "wrong number of fields"));
        }
        out.push((line, record.iter().map(str::to_owned).collect()));
    }
    Ok(out)
}

fn parse_bit(path: &Path, line: u64, field: &str, what: &str) -> Result<Bit> {
    match field {
        "0" => Ok(0),
        "1" => Ok(1),
        other => Err(parse_err(
            path,
            line,
            format!("{what} {other:?} is not 0 or 1"),
        )),
    }
}

/// Loads and validates a dataset from its responses and gold files.
pub fn load_canonical(
    name: &str,
    responses_path: &Path,
    gold_path: &Path,
) -> Result<CanonicalDataset> {
    let mut tasks = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    for (line, fields) in rows(gold_path, &["task_id", "gold"])? {
        let gold = parse_bit(gold_path, line, &fields[1], "gold label")?;
        if index.insert(fields[0].clone(), tasks.len()).is_some() {
            return Err(Error::Validation {
                dataset: name.to_string(),
                task: fields[0].clone(),
                msg: format!("duplicate task id in gold file (line {line})"),
            });
        }
        tasks.push(DatasetTask {
            task_id: fields[0].clone(),
            gold,
            responses: Vec::new(),
        });
    }

    for (line, fields) in rows(responses_path, &["task_id", "worker_id", "response"])? {
        let response = parse_bit(responses_path, line, &fields[2], "response")?;
        let Some(&i) = index.get(&fields[0]) else {
            return Err(Error::Validation {
                dataset: name.to_string(),
                task: fields[0].clone(),
                msg: format!("response on line {line} has no gold label"),
            });
        };
        tasks[i].responses.push(response);
    }

    CanonicalDataset::from_tasks(name, tasks)
}

pub fn load_entry(entry: &DatasetEntry) -> Result<CanonicalDataset> {
    load_canonical(&entry.name, &entry.responses_path, &entry.gold_path)
}

/// Parses a dataset manifest (`name,responses_path,gold_path`).
pub fn load_manifest(path: &Path) -> Result<Vec<DatasetEntry>> {
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let resolve = |p: &str| {
        let p = PathBuf::from(p);
        if p.is_absolute() {
            p
        } else {
            base.join(p)
        }
    };
    rows(path, &["name", "responses_path", "gold_path"])?
        .into_iter()
        .map(|(_, f)| {
            Ok(DatasetEntry {
                name: f[0].clone(),
                responses_path: resolve(&f[1]),
                gold_path: resolve(&f[2]),
            })
        })
        .collect()
}

/// Dataset tasks that have not been requested yet.
#[derive(Debug, Clone)]
pub struct ReplayPool {
    remaining: Vec<usize>,
}

impl ReplayPool {
    pub fn len(&self) -> usize {
        self.remaining.len()
    }

    pub fn is_empty(&self) -> bool {
        self.remaining.is_empty()
    }

    /// Removes a uniformly chosen task from the pool.
    pub fn draw<R: Rng + ?Sized>(
        &mut self,
        dataset: &CanonicalDataset,
        id: TaskId,
        rng: &mut R,
    ) -> Result<TaskState> {
        if self.remaining.is_empty() {
            return Err(Error::PoolExhausted);
        }
        let k = rng.random_range(0..self.remaining.len());
        let index = self.remaining.swap_remove(k);
        Ok(TaskState::new(id, dataset.truth(index)))
    }
}

/// Splits a dataset into `n0` seed tasks (ids `0..n0`) and a hidden pool.
pub fn build_replay_pool<R: Rng + ?Sized>(
    dataset: &CanonicalDataset,
    n0: usize,
    rng: &mut R,
) -> Result<(Vec<TaskState>, ReplayPool)> {
    if n0 == 0 || n0 > dataset.len() {
        return Err(Error::Config(format!(
            "seed size {n0} outside 1..={} for dataset {}",
            dataset.len(),
            dataset.name
        )));
    }
    let mut order: Vec<usize> = (0..dataset.len()).collect();
    order.shuffle(rng);
    let remaining = order.split_off(n0);
    let seeds = order
        .iter()
        .enumerate()
        .map(|(i, &idx)| TaskState::new(TaskId(i as u32), dataset.truth(idx)))
        .collect();
    Ok((seeds, ReplayPool { remaining }))
}
