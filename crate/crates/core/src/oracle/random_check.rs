use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{check_invariants, Violation};
use crate::baselines::Variant;
use crate::hash::TabulatedHash;
use crate::table::{InsertOutcome, SlotRef, Table, TableError};

/// Parameters of a randomized differential run against a plain map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckConfig {
    pub seed: u64,
    pub ops: usize,
    pub capacity: usize,
    pub variant: Variant,
}

impl CheckConfig {
    pub fn new(seed: u64, ops: usize, capacity: usize) -> Self {
        CheckConfig {
            seed,
            ops,
            capacity,
            variant: Variant::Minimal,
        }
    }

    pub fn with_variant(self, variant: Variant) -> Self {
        CheckConfig { variant, ..self }
    }
}

/// What a randomized run observed. Operation numbers are 0-based.
#[derive(Debug, Clone, Default)]
pub struct CheckReport {
    pub ops: usize,
    pub inserts: usize,
    pub removes: usize,
    pub finds: usize,
    pub table_full: usize,
    pub max_tombstones: usize,
    /// Total invariant violations summed over all post-operation checks.
    pub violations: usize,
    pub first_violation: Option<(usize, Violation)>,
    pub model_mismatches: usize,
    pub first_mismatch: Option<(usize, String)>,
    /// Times a live key was found somewhere other than its recorded slot.
    pub moved_handles: usize,
}

impl CheckReport {
    pub fn is_clean(&self) -> bool {
        self.violations == 0 && self.model_mismatches == 0 && self.moved_handles == 0
    }

    fn mismatch(&mut self, op: usize, detail: String) {
        self.model_mismatches += 1;
        self.first_mismatch.get_or_insert((op, detail));
    }
}

/// Keys with O(1) random pick and removal.
#[derive(Default)]
struct KeyPool {
    keys: Vec<u64>,
    index: HashMap<u64, usize>,
}

impl KeyPool {
    fn add(&mut self, key: u64) {
        self.index.insert(key, self.keys.len());
        self.keys.push(key);
    }

    fn remove(&mut self, key: u64) {
        if let Some(at) = self.index.remove(&key) {
            self.keys.swap_remove(at);
            if let Some(&moved) = self.keys.get(at) {
                self.index.insert(moved, at);
            }
        }
    }

    fn pick(&self, rng: &mut impl Rng) -> Option<u64> {
        (!self.keys.is_empty()).then(|| self.keys[rng.random_range(0..self.keys.len())])
    }
}

/// Runs `ops` random operations (45% fresh inserts, 35% removes, 20% finds)
/// on a table driven by `config.variant`, comparing every result with a
/// `HashMap` and running [`check_invariants`] after every operation.
///
/// Handles recorded at insertion are re-read after every operation; any key
/// that no longer sits at its recorded slot counts as a moved handle.
pub fn run_random_check(config: &CheckConfig) -> Result<CheckReport, TableError> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let hash = TabulatedHash::new(config.seed ^ 0x5bd1_e995_9e37_79b9, config.capacity);
    let mut table: Table<u64, u64, _> = Table::new(config.capacity, hash)?;
    let mut model: HashMap<u64, u64> = HashMap::new();
    let mut handles: HashMap<u64, SlotRef> = HashMap::new();
    let mut live = KeyPool::default();
    let mut removed: Vec<u64> = Vec::new();
    let mut next_key = 0u64;
    let mut report = CheckReport {
        ops: config.ops,
        ..CheckReport::default()
    };

    let absent_key = |rng: &mut ChaCha8Rng, removed: &[u64], next_key: u64| {
        if !removed.is_empty() && rng.random_bool(0.5) {
            removed[rng.random_range(0..removed.len())]
        } else {
            next_key + 1_000_000 + rng.random_range(0..1_000_000)
        }
    };

    for op in 0..config.ops {
        let roll = rng.random_range(0..100);
        if roll < 45 {
            report.inserts += 1;
            let key = next_key;
            next_key += 1;
            let value = rng.random::<u64>();
            match table.insert(key, value) {
                Ok((handle, InsertOutcome::Inserted)) => {
                    model.insert(key, value);
                    handles.insert(key, handle);
                    live.add(key);
                }
                Ok((_, InsertOutcome::Updated)) => {
                    report.mismatch(op, format!("fresh key {key} reported as update"));
                }
                Err(TableError::TableFull) => {
                    report.table_full += 1;
                    if table.contains_key(&key) {
                        report.mismatch(op, format!("rejected key {key} is present"));
                    }
                }
                Err(e) => return Err(e),
            }
        } else if roll < 80 {
            report.removes += 1;
            let present = rng.random_bool(0.8);
            let key = match live.pick(&mut rng) {
                Some(k) if present => k,
                _ => absent_key(&mut rng, &removed, next_key),
            };
            let expected = model.remove(&key).is_some();
            let before = (!expected).then(|| table.slots().to_vec());
            let got = table.remove_with(config.variant, &key);
            if got != expected {
                report.mismatch(
                    op,
                    format!("remove({key}) returned {got}, model says {expected}"),
                );
            }
            if let Some(before) = before {
                if table.slots() != &before[..] {
                    report.mismatch(op, format!("remove of absent key {key} changed the table"));
                }
            }
            if expected {
                live.remove(key);
                handles.remove(&key);
                removed.push(key);
            }
        } else {
            report.finds += 1;
            let key = match live.pick(&mut rng) {
                Some(k) if rng.random_bool(0.5) => k,
                _ => absent_key(&mut rng, &removed, next_key),
            };
            let (found, probes) = table.find(&key);
            if probes.get() > table.capacity() {
                report.mismatch(op, format!("find({key}) took {} probes", probes.get()));
            }
            match (found, model.get(&key)) {
                (None, None) => {}
                (Some(r), Some(&v)) => {
                    if table.read(r).map(|(_, val)| *val) != Ok(v) {
                        report.mismatch(op, format!("find({key}) returned a wrong value"));
                    }
                    if handles.get(&key) != Some(&r) {
                        report.moved_handles += 1;
                        handles.insert(key, r);
                    }
                }
                (f, m) => report.mismatch(
                    op,
                    format!(
                        "find({key}) found={} but model present={}",
                        f.is_some(),
                        m.is_some()
                    ),
                ),
            }
        }

        let violations = check_invariants(&table);
        if !violations.is_empty() {
            report.violations += violations.len();
            report
                .first_violation
                .get_or_insert_with(|| (op, violations[0].clone()));
        }
        if table.len() != model.len() {
            report.mismatch(
                op,
                format!(
                    "table holds {} elements, model {}",
                    table.len(),
                    model.len()
                ),
            );
        }
        report.max_tombstones = report.max_tombstones.max(table.tombstone_count());

        for (key, handle) in handles.iter_mut() {
            if table.read(*handle).map(|(k, _)| k) != Ok(key) {
                report.moved_handles += 1;
                match table.find(key).0 {
                    Some(r) => *handle = r,
                    None => report.mismatch(op, format!("live key {key} not found")),
                }
            }
        }
    }

    for (key, value) in &model {
        if table.get(key) != Some(value) {
            report.mismatch(
                config.ops,
                format!("final sweep: key {key} missing or wrong"),
            );
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::ViolationKind;

    #[test]
    fn minimal_is_clean() {
        let report = run_random_check(&CheckConfig::new(3, 5_000, 64)).unwrap();
        assert!(report.is_clean(), "{report:?}");
        assert!(report.inserts > 0 && report.removes > 0 && report.finds > 0);
    }

    #[test]
    fn naive_accumulates_unjustified_tombstones() {
        let report =
            run_random_check(&CheckConfig::new(3, 2_000, 64).with_variant(Variant::Naive)).unwrap();
        assert_eq!(report.model_mismatches, 0, "{report:?}");
        assert_eq!(report.moved_handles, 0);
        let (_, first) = report
            .first_violation
            .expect("naive deletion must leave stale tombstones");
        assert_eq!(first.kind, ViolationKind::UnjustifiedTombstone);
    }

    #[test]
    fn shift_moves_handles_but_stays_consistent() {
        let report =
            run_random_check(&CheckConfig::new(3, 2_000, 64).with_variant(Variant::Shift)).unwrap();
        assert_eq!(report.violations, 0);
        assert_eq!(report.model_mismatches, 0);
        assert_eq!(report.max_tombstones, 0);
        assert!(report.moved_handles > 0);
    }

    #[test]
    fn key_pool_tracks_membership() {
        let mut pool = KeyPool::default();
        for k in 0..5 {
            pool.add(k);
        }
        pool.remove(1);
        pool.remove(4);
        pool.remove(42);
        let mut keys = pool.keys.clone();
        keys.sort_unstable();
        assert_eq!(keys, vec![0, 2, 3]);
        assert!(pool
            .keys
            .iter()
            .enumerate()
            .all(|(i, k)| pool.index[k] == i));
    }
}
