//! Comparison deletion strategies on the same slot array.
//!
//! [`Table::remove_naive`] only ever writes tombstones, so slots stay put but
//! tombstones pile up under churn. [`Table::remove_shift`] is classic
//! backward-shift deletion: it never leaves a tombstone but relocates later
//! elements of the run, which invalidates their [`SlotRef`](crate::SlotRef)s.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::table::{cyclic_distance, Slot, SlotHasher, Table};

/// Which deletion routine a table is driven with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Tombstone, then clear every tombstone no longer needed.
    #[default]
    Minimal,
    /// Tombstone only; nothing is ever cleaned up.
    Naive,
    /// Backward shift; moves elements.
    Shift,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::Minimal, Variant::Naive, Variant::Shift];

    /// Whether slot handles survive deletions under this variant.
    pub fn keeps_slots_stable(self) -> bool {
        !matches!(self, Variant::Shift)
    }

    pub fn name(self) -> &'static str {
        match self {
            Variant::Minimal => "minimal",
            Variant::Naive => "naive",
            Variant::Shift => "shift",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown variant `{s}` (expected minimal, naive or shift)"))
    }
}

impl<K, V, S> Table<K, V, S>
where
    K: Eq,
    S: SlotHasher<K>,
{
    /// Removes `key` with the given strategy.
    pub fn remove_with(&mut self, variant: Variant, key: &K) -> bool {
        match variant {
            Variant::Minimal => self.remove(key),
            Variant::Naive => self.remove_naive(key),
            Variant::Shift => self.remove_shift(key),
        }
    }

    /// Replaces the element with a tombstone and stops there.
    pub fn remove_naive(&mut self, key: &K) -> bool {
        let Some((at, _)) = self.position_of(key) else {
            return false;
        };
        self.slots[at] = Slot::Tombstone;
        self.elements -= 1;
        self.tombstones += 1;
        true
    }

    /// Empties the element's slot and pulls later run members back into the
    /// hole whenever their home lies at or before it.
    ///
    /// Expects a table without tombstones; any that are present are stepped
    /// over. Elements behind the hole may change slots.
    pub fn remove_shift(&mut self, key: &K) -> bool {
        let Some((mut hole, _)) = self.position_of(key) else {
            return false;
        };
        let m = self.slots.len();
        self.slots[hole] = Slot::Empty;
        self.elements -= 1;
        self.empties += 1;

        let mut j = self.next(hole);
        loop {
            match &self.slots[j] {
                Slot::Empty => break,
                Slot::Tombstone => {}
                Slot::Occupied(b) => {
                    // Movable iff its home is not in (hole, j].
                    if cyclic_distance(b.home, j, m) >= cyclic_distance(hole, j, m) {
                        self.slots.swap(hole, j);
                        hole = j;
                    }
                }
            }
            j = self.next(j);
        }
        true
    }
}
