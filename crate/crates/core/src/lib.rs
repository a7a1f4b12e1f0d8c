//! Linear probing with referential integrity.
//!
//! [`Table`] is a fixed-capacity open-addressing table that never moves a
//! stored element, so a [`SlotRef`] stays valid for as long as its key is
//! present. Deletion uses tombstones but removes every tombstone that no
//! remaining element needs, which keeps search costs bounded under
//! indefinite insert/delete churn.
//!
//! Alongside the table the crate provides:
//!
//! * two comparison deletion strategies, see [`Variant`];
//! * brute-force invariant checks and exact probe-cost computation in
//!   [`oracle`];
//! * churn workloads that reproduce probe-cost curves in [`workload`];
//! * an LRU cache that threads its recency list through slot indices in
//!   [`cache`].
//!
//! ```
//! use stableprobe::{Table, TabulatedHash};
//!
//! let mut table = Table::new(16, TabulatedHash::new(1, 16)).unwrap();
//! let (handle, _) = table.insert(42u64, "answer").unwrap();
//! table.insert(7, "seven").unwrap();
//! table.remove(&7);
//! assert_eq!(table.read(handle).unwrap(), (&42, &"answer"));
//! ```

mod baselines;
pub mod cache;
mod hash;
pub mod oracle;
mod table;
pub mod workload;

pub use baselines::Variant;
pub use cache::{LruCache, LruTraceReport};
pub use hash::TabulatedHash;
pub use oracle::{
    check_invariants, exact_probe_costs, tombstone_justified, ProbeCosts, Violation, ViolationKind,
};
pub use table::{
    Bucket, BuildSlotHasher, InsertOutcome, ProbeCount, Slot, SlotHasher, SlotRef, SlotState,
    Table, TableError,
};
pub use workload::{run_workload, DeletionPolicy, MetricsRecord, WorkloadConfig};
