//! Brute-force ground truth for [`Table`]: invariant checks, exact probe
//! costs, a randomized differential driver, and a reference LRU.
//!
//! Nothing here calls the table's deletion code. Homes are recomputed from
//! the table's hasher rather than read from the cached values in the slots,
//! except in [`exact_probe_costs`] which has to stay linear for the
//! benchmark harness.

mod random_check;
mod reference_lru;

use std::fmt;

use thiserror::Error;

use crate::table::{cyclic_distance, Slot, SlotHasher, Table};

pub use random_check::{run_random_check, CheckConfig, CheckReport};
pub use reference_lru::ReferenceLru;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ViolationKind {
    UnjustifiedTombstone,
    SearchInvariantBreach,
    CounterMismatch,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ViolationKind::UnjustifiedTombstone => "UnjustifiedTombstone",
            ViolationKind::SearchInvariantBreach => "SearchInvariantBreach",
            ViolationKind::CounterMismatch => "CounterMismatch",
        })
    }
}

/// One broken invariant. Renders as `kind<TAB>index<TAB>detail`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub index: usize,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}\t{}\t{}", self.kind, self.index, self.detail)
    }
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum OracleError {
    #[error("slot {0} is not a tombstone")]
    NotATombstone(usize),
    #[error("slot {0} is out of range")]
    OutOfRange(usize),
}

/// Whether the tombstone at `k` is still needed: some element stored later
/// in the same run has its home at or before `k`.
///
/// Computed directly from the definition by walking out to both ends of the
/// run.
pub fn tombstone_justified<K, V, S>(table: &Table<K, V, S>, k: usize) -> Result<bool, OracleError>
where
    K: Eq,
    S: SlotHasher<K>,
{
    let slots = table.slots();
    let m = slots.len();
    match slots.get(k) {
        None => return Err(OracleError::OutOfRange(k)),
        Some(Slot::Tombstone) => {}
        Some(_) => return Err(OracleError::NotATombstone(k)),
    }
    let mut run_start = k;
    for _ in 0..m {
        let before = (run_start + m - 1) % m;
        if slots[before].is_empty() {
            break;
        }
        run_start = before;
    }
    let offset = |p: usize| cyclic_distance(run_start, p, m);
    let mut p = (k + 1) % m;
    while !slots[p].is_empty() && p != k {
        if let Slot::Occupied(b) = &slots[p] {
            let home = table.home_of(b.key());
            // A home outside the run cannot justify anything.
            if offset(home) <= offset(p) && offset(home) <= offset(k) {
                return Ok(true);
            }
        }
        p = (p + 1) % m;
    }
    Ok(false)
}

/// Scans the whole table and reports every counter mismatch, search
/// invariant breach and unjustified tombstone. An empty result means the
/// table is searchable and carries no superfluous tombstones.
pub fn check_invariants<K, V, S>(table: &Table<K, V, S>) -> Vec<Violation>
where
    K: Eq,
    S: SlotHasher<K>,
{
    let slots = table.slots();
    let m = slots.len();
    let mut violations = Vec::new();

    let (mut elements, mut tombstones, mut empties) = (0, 0, 0);
    for slot in slots {
        match slot {
            Slot::Empty => empties += 1,
            Slot::Tombstone => tombstones += 1,
            Slot::Occupied(_) => elements += 1,
        }
    }
    for (name, stored, actual) in [
        ("elements", table.len(), elements),
        ("tombstones", table.tombstone_count(), tombstones),
        ("empties", table.empty_count(), empties),
    ] {
        if stored != actual {
            violations.push(Violation {
                kind: ViolationKind::CounterMismatch,
                index: 0,
                detail: format!("{name}: counter says {stored}, slots hold {actual}"),
            });
        }
    }
    let Some(anchor) = slots.iter().position(Slot::is_empty) else {
        violations.push(Violation {
            kind: ViolationKind::CounterMismatch,
            index: 0,
            detail: "no empty slot".into(),
        });
        return violations;
    };

    // depth[p]: steps from the closest empty slot at or before p.
    let mut depth = vec![0usize; m];
    let mut homes = vec![0usize; m];
    for step in 1..=m {
        let p = (anchor + step) % m;
        depth[p] = if slots[p].is_empty() {
            0
        } else {
            depth[(p + m - 1) % m] + 1
        };
        if let Slot::Occupied(b) = &slots[p] {
            let home = table.home_of(b.key());
            homes[p] = home;
            let displacement = cyclic_distance(home, p, m);
            if displacement >= depth[p] {
                violations.push(Violation {
                    kind: ViolationKind::SearchInvariantBreach,
                    index: p,
                    detail: format!(
                        "element with home {home} is {displacement} slots away, past an empty slot"
                    ),
                });
            }
        }
    }

    // Walk right to left, tracking the smallest home depth among elements to
    // the right within the current run.
    let mut reach: Option<usize> = None;
    for step in 0..m {
        let p = (anchor + m - step) % m;
        match &slots[p] {
            Slot::Empty => reach = None,
            Slot::Occupied(_) => {
                let displacement = cyclic_distance(homes[p], p, m);
                // An element whose home lies outside the run justifies nothing.
                if displacement < depth[p] {
                    let home_depth = depth[p] - displacement;
                    reach = Some(reach.map_or(home_depth, |r| r.min(home_depth)));
                }
            }
            Slot::Tombstone => {
                if !reach.is_some_and(|r| r <= depth[p]) {
                    violations.push(Violation {
                        kind: ViolationKind::UnjustifiedTombstone,
                        index: p,
                        detail: "no later element in the run probes across this slot".into(),
                    });
                }
            }
        }
    }
    violations.sort_by_key(|v| (v.index, v.kind as u8));
    violations
}

/// Exact average probe counts over a table snapshot, kept as integer sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ProbeCosts {
    /// Sum over stored elements of `displacement + 1`.
    pub successful_total: u64,
    pub elements: u64,
    /// Sum over all start slots of `distance to first empty + 1`.
    pub unsuccessful_total: u64,
    pub starts: u64,
}

impl ProbeCosts {
    /// Mean successful search cost; `None` for a table without elements.
    pub fn successful(&self) -> Option<f64> {
        (self.elements > 0).then(|| self.successful_total as f64 / self.elements as f64)
    }

    /// Mean unsuccessful search cost over uniformly distributed start slots.
    pub fn unsuccessful(&self) -> Option<f64> {
        (self.starts > 0).then(|| self.unsuccessful_total as f64 / self.starts as f64)
    }
}

/// Average successful and unsuccessful search cost, counting the terminating
/// slot, computed in one pass without sampling.
pub fn exact_probe_costs<K, V, S>(table: &Table<K, V, S>) -> ProbeCosts {
    let slots = table.slots();
    let m = slots.len();
    let mut costs = ProbeCosts::default();
    for (i, slot) in slots.iter().enumerate() {
        if let Slot::Occupied(b) = slot {
            costs.successful_total += cyclic_distance(b.home(), i, m) as u64 + 1;
            costs.elements += 1;
        }
    }
    let Some(anchor) = slots.iter().position(Slot::is_empty) else {
        return costs;
    };
    let mut to_empty = 0u64;
    for step in 0..m {
        let p = (anchor + m - step) % m;
        to_empty = if slots[p].is_empty() { 0 } else { to_empty + 1 };
        costs.unsuccessful_total += to_empty + 1;
    }
    costs.starts = m as u64;
    costs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table::fixtures::*;

    fn h_d4(k: &char) -> usize {
        match k {
            'a' | 'b' => 2,
            'c' => 3,
            _ => 4,
        }
    }

    #[test]
    fn justified_tombstones() {
        let mut t = abc_fixture();
        t.remove(&'b');
        assert_eq!(layout(&t), "..a+c...");
        assert_eq!(tombstone_justified(&t, 3), Ok(true));

        let mut t = abc_fixture();
        t.remove(&'a');
        assert_eq!(layout(&t), "..+bc...");
        assert_eq!(tombstone_justified(&t, 2), Ok(true));
    }

    #[test]
    fn unjustified_fixture() {
        let t = parse_layout("..a+d...", h_d4);
        assert_eq!(tombstone_justified(&t, 3), Ok(false));
        let v = check_invariants(&t);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].kind, ViolationKind::UnjustifiedTombstone);
        assert_eq!(v[0].index, 3);
        assert!(v[0].to_string().starts_with("UnjustifiedTombstone\t3\t"));
    }

    #[test]
    fn justified_requires_tombstone() {
        let t = abc_fixture();
        assert_eq!(
            tombstone_justified(&t, 2),
            Err(OracleError::NotATombstone(2))
        );
        assert_eq!(tombstone_justified(&t, 9), Err(OracleError::OutOfRange(9)));
    }

    #[test]
    fn empty_table_is_valid() {
        let t: CharTable = Table::new(8, abc_hash as fn(&char) -> usize).unwrap();
        assert!(check_invariants(&t).is_empty());
        let c = exact_probe_costs(&t);
        assert_eq!(c.successful(), None);
        assert_eq!(c.unsuccessful(), Some(1.0));
    }

    #[test]
    fn search_breach_detected() {
        // c hashes to 3 but sits at 5 behind an empty slot at 4.
        let mut slots: Vec<Slot<char, u32>> = (0..8).map(|_| Slot::Empty).collect();
        slots[3] = Slot::occupied('a', 0);
        slots[5] = Slot::occupied('c', 0);
        let t = Table::from_slots(slots, h_d4 as fn(&char) -> usize).unwrap();
        let v = check_invariants(&t);
        assert!(v
            .iter()
            .any(|v| v.kind == ViolationKind::SearchInvariantBreach && v.index == 5));
    }

    #[test]
    fn counter_mismatch_detected() {
        let mut t = abc_fixture();
        t.elements += 1;
        let v = check_invariants(&t);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].kind, ViolationKind::CounterMismatch);
    }

    #[test]
    fn abc_fixture_costs_are_exact() {
        let t = abc_fixture();
        let c = exact_probe_costs(&t);
        assert_eq!((c.successful_total, c.elements), (5, 3));
        assert_eq!((c.unsuccessful_total, c.starts), (14, 8));
        assert_eq!(c.unsuccessful(), Some(1.75));

        let mut t = abc_fixture();
        t.remove(&'b');
        let c = exact_probe_costs(&t);
        assert_eq!(c.successful(), Some(1.5));
        assert_eq!(c.unsuccessful(), Some(1.75));
    }

    #[test]
    fn costs_match_simulated_finds() {
        // Every start position simulated by an actual failed find.
        let mut t: CharTable = Table::new(8, alpha_hash as fn(&char) -> usize).unwrap();
        let keys = ['a', 'i', 'c', 'k', 'd', 'h'];
        for k in keys {
            t.insert(k, 0).unwrap();
        }
        assert_eq!(layout(&t), "aickd..h");
        let probe_from = |start: usize| {
            (0..8)
                .map(|d| (start + d) % 8)
                .position(|p| t.slots()[p].is_empty())
                .unwrap()
                + 1
        };
        let total: usize = (0..8).map(probe_from).sum();
        let c = exact_probe_costs(&t);
        assert_eq!(c.unsuccessful_total as usize, total);
        let succ: usize = keys.iter().map(|k| t.find(k).1.get()).sum();
        assert_eq!(c.successful_total as usize, succ);
    }
}
