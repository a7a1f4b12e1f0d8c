//! Churn workloads: fill a table to a target load factor, then alternate one
//! deletion with one fresh insertion while recording exact probe costs.

use std::collections::VecDeque;
use std::fmt;
use std::io;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::baselines::Variant;
use crate::hash::TabulatedHash;
use crate::oracle::exact_probe_costs;
use crate::table::{Table, TableError};

/// Which element a churn round deletes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum DeletionPolicy {
    /// The least recently inserted surviving element.
    #[default]
    Fifo,
    /// A uniformly random surviving element.
    Random,
}

impl fmt::Display for DeletionPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DeletionPolicy::Fifo => "fifo",
            DeletionPolicy::Random => "random",
        })
    }
}

impl FromStr for DeletionPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "fifo" => Ok(DeletionPolicy::Fifo),
            "random" => Ok(DeletionPolicy::Random),
            _ => Err(format!("unknown policy `{s}` (expected fifo or random)")),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("load factor {0} must lie strictly between 0 and 1")]
    LoadFactor(f64),
    #[error("load factor {alpha} on {capacity} slots gives {elements} elements; need 1..={max}")]
    ElementCount {
        alpha: f64,
        capacity: usize,
        elements: usize,
        max: usize,
    },
    #[error("measurement interval must be at least 1")]
    MeasureEvery,
    #[error(transparent)]
    Table(#[from] TableError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorkloadConfig {
    pub capacity: usize,
    pub load_factor: f64,
    pub policy: DeletionPolicy,
    /// Delete-then-insert rounds after the initial fill.
    pub rounds: u64,
    pub measure_every: u64,
    pub seed: u64,
    pub variant: Variant,
}

impl WorkloadConfig {
    /// FIFO churn with the minimal variant, `10 * n` rounds and ten
    /// measurements per `n` rounds.
    pub fn new(capacity: usize, load_factor: f64) -> Self {
        let mut config = WorkloadConfig {
            capacity,
            load_factor,
            policy: DeletionPolicy::Fifo,
            rounds: 0,
            measure_every: 1,
            seed: 0,
            variant: Variant::Minimal,
        };
        let n = config.elements() as u64;
        config.rounds = 10 * n;
        config.measure_every = (n / 10).max(1);
        config
    }

    /// Resident element count, `round(load_factor * capacity)`.
    pub fn elements(&self) -> usize {
        (self.load_factor * self.capacity as f64).round() as usize
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.load_factor > 0.0 && self.load_factor < 1.0) {
            return Err(ConfigError::LoadFactor(self.load_factor));
        }
        if self.capacity < 2 {
            return Err(TableError::InvalidCapacity(self.capacity).into());
        }
        let elements = self.elements();
        let max = self.capacity - 1;
        if elements < 1 || elements > max {
            return Err(ConfigError::ElementCount {
                alpha: self.load_factor,
                capacity: self.capacity,
                elements,
                max,
            });
        }
        if self.measure_every == 0 {
            return Err(ConfigError::MeasureEvery);
        }
        Ok(())
    }
}

/// Snapshot of a table during a churn run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub deletions: u64,
    pub avg_successful: f64,
    pub avg_unsuccessful: f64,
    pub tombstones: u64,
    pub elements: u64,
    /// Set on the last record when an insertion hit a full table and the run
    /// stopped early. Not part of the CSV output.
    #[serde(skip)]
    pub saturated: bool,
}

/// The hash seed is derived from the workload seed so that the random
/// deletion choices and the hash values come from unrelated streams.
pub fn workload_hash(config: &WorkloadConfig) -> TabulatedHash {
    TabulatedHash::new(
        config.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ 0xa076_1d64_78bd_642f,
        config.capacity,
    )
}

/// Surviving keys in the order the policy needs them.
enum Residents {
    Fifo(VecDeque<u64>),
    Random(Vec<u64>, Box<ChaCha8Rng>),
}

impl Residents {
    fn new(policy: DeletionPolicy, seed: u64, n: usize) -> Self {
        match policy {
            DeletionPolicy::Fifo => Residents::Fifo(VecDeque::with_capacity(n + 1)),
            DeletionPolicy::Random => Residents::Random(
                Vec::with_capacity(n + 1),
                Box::new(ChaCha8Rng::seed_from_u64(seed)),
            ),
        }
    }

    fn push(&mut self, key: u64) {
        match self {
            Residents::Fifo(q) => q.push_back(key),
            Residents::Random(v, _) => v.push(key),
        }
    }

    fn take_victim(&mut self) -> Option<u64> {
        match self {
            Residents::Fifo(q) => q.pop_front(),
            Residents::Random(v, rng) => {
                if v.is_empty() {
                    return None;
                }
                let at = rng.random_range(0..v.len());
                Some(v.swap_remove(at))
            }
        }
    }
}

fn measure<V>(table: &Table<u64, V, TabulatedHash>, deletions: u64) -> MetricsRecord {
    let costs = exact_probe_costs(table);
    MetricsRecord {
        deletions,
        avg_successful: costs.successful().unwrap_or(f64::NAN),
        avg_unsuccessful: costs.unsuccessful().unwrap_or(f64::NAN),
        tombstones: table.tombstone_count() as u64,
        elements: table.len() as u64,
        saturated: false,
    }
}

/// Runs the churn workload described by `config`.
///
/// Keys are consecutive integers, so every insertion is of a new element.
/// A record is taken after the fill, after every `measure_every` rounds, and
/// after the last round. If an insertion fails because the table is full
/// (only the naive variant can run out of empty slots) the run stops and the
/// final record is marked `saturated`.
pub fn run_workload(config: &WorkloadConfig) -> Result<Vec<MetricsRecord>, ConfigError> {
    config.validate()?;
    let n = config.elements();
    let mut table: Table<u64, (), _> = Table::new(config.capacity, workload_hash(config))?;
    let mut residents = Residents::new(config.policy, config.seed, n);
    let mut next_key = 0u64;
    for _ in 0..n {
        table.insert(next_key, ())?;
        residents.push(next_key);
        next_key += 1;
    }

    let mut records = vec![measure(&table, 0)];
    for round in 1..=config.rounds {
        let victim = residents
            .take_victim()
            .expect("table holds n >= 1 elements");
        let removed = table.remove_with(config.variant, &victim);
        debug_assert!(removed);
        match table.insert(next_key, ()) {
            Ok(_) => {}
            Err(TableError::TableFull) => {
                let mut last = measure(&table, round);
                last.saturated = true;
                records.push(last);
                return Ok(records);
            }
            Err(e) => return Err(e.into()),
        }
        residents.push(next_key);
        next_key += 1;
        if round % config.measure_every == 0 || round == config.rounds {
            records.push(measure(&table, round));
        }
    }
    Ok(records)
}

pub const CSV_HEADER: [&str; 5] = [
    "deletions",
    "avg_successful",
    "avg_unsuccessful",
    "tombstones",
    "elements",
];

/// Writes `records` as CSV with a header line, one row per record.
pub fn emit_csv<W: io::Write>(records: &[MetricsRecord], destination: W) -> io::Result<()> {
    let mut writer = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(destination);
    writer.write_record(CSV_HEADER)?;
    for record in records {
        writer.serialize(record)?;
    }
    writer.flush()?;
    Ok(())
}

/// Reads CSV produced by [`emit_csv`].
pub fn parse_csv<R: io::Read>(source: R) -> csv::Result<Vec<MetricsRecord>> {
    csv::Reader::from_reader(source).deserialize().collect()
}
