//! Fixed-capacity linear probing with stable slots.
//!
//! Elements are written once and never relocated by [`Table::remove`]: a
//! deleted element leaves a tombstone behind, and the deletion then clears
//! every tombstone in the affected probe range that no remaining element
//! still needs to be found. A [`SlotRef`] obtained from [`Table::insert`] or
//! [`Table::find`] therefore stays valid until its key is removed.
//!
//! The table never resizes and always keeps at least one empty slot, so every
//! probe sequence terminates within `capacity` steps.

use std::fmt::{self, Write as _};
use std::hash::{BuildHasher, BuildHasherDefault, DefaultHasher, Hash};

use thiserror::Error;

/// Maps a key to its home slot. The table reduces the result modulo its
/// capacity, so implementations may return any `usize`.
pub trait SlotHasher<K: ?Sized> {
    fn slot_of(&self, key: &K) -> usize;
}

impl<K: ?Sized, F> SlotHasher<K> for F
where
    F: Fn(&K) -> usize,
{
    fn slot_of(&self, key: &K) -> usize {
        self(key)
    }
}

/// Adapts any [`BuildHasher`] to a [`SlotHasher`].
///
/// The default uses `std`'s SipHash with fixed keys, so placement is
/// reproducible between runs.
#[derive(Debug, Clone, Default)]
pub struct BuildSlotHasher<B = BuildHasherDefault<DefaultHasher>>(pub B);

impl<K: Hash + ?Sized, B: BuildHasher> SlotHasher<K> for BuildSlotHasher<B> {
    fn slot_of(&self, key: &K) -> usize {
        self.0.hash_one(key) as usize
    }
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum TableError {
    #[error("capacity {0} is too small, a table needs at least 2 slots")]
    InvalidCapacity(usize),
    #[error("table is full: the insert would consume the last empty slot")]
    TableFull,
    #[error("slot {0} does not hold an element")]
    StaleHandle(usize),
    #[error("slot layout has no empty slot")]
    NoEmptySlot,
}

/// A stored element together with its cached home position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bucket<K, V> {
    pub(crate) home: usize,
    pub(crate) key: K,
    pub(crate) value: V,
}

impl<K, V> Bucket<K, V> {
    pub fn key(&self) -> &K {
        &self.key
    }

    pub fn value(&self) -> &V {
        &self.value
    }

    /// Home slot recorded when the element was placed.
    pub fn home(&self) -> usize {
        self.home
    }
}

/// One cell of the table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Slot<K, V> {
    Empty,
    Tombstone,
    Occupied(Bucket<K, V>),
}

impl<K, V> Slot<K, V> {
    /// Builds an occupied slot for [`Table::from_slots`]. The home position is
    /// filled in by the table.
    pub fn occupied(key: K, value: V) -> Self {
        Slot::Occupied(Bucket {
            home: 0,
            key,
            value,
        })
    }

    pub fn state(&self) -> SlotState {
        match self {
            Slot::Empty => SlotState::Empty,
            Slot::Tombstone => SlotState::Tombstone,
            Slot::Occupied(_) => SlotState::Occupied,
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, Slot::Empty)
    }

    pub fn bucket(&self) -> Option<&Bucket<K, V>> {
        match self {
            Slot::Occupied(b) => Some(b),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SlotState {
    Empty,
    Tombstone,
    Occupied,
}

impl fmt::Display for SlotState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SlotState::Empty => "empty",
            SlotState::Tombstone => "tombstone",
            SlotState::Occupied => "occupied",
        })
    }
}

/// Stable handle to an occupied slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SlotRef(pub(crate) usize);

impl SlotRef {
    pub fn index(self) -> usize {
        self.0
    }
}

/// Number of slots inspected by a scan, including the slot that ended it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct ProbeCount(pub(crate) usize);

impl ProbeCount {
    pub fn get(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InsertOutcome {
    Inserted,
    /// The key was already present; its value was replaced in place.
    Updated,
}

/// `(to - from) mod m` for positions in `0..m`.
#[inline]
pub(crate) fn cyclic_distance(from: usize, to: usize, m: usize) -> usize {
    if to >= from {
        to - from
    } else {
        to + m - from
    }
}

/// Result of scanning a probe sequence for a key.
enum Probe {
    Found {
        at: usize,
        probes: usize,
    },
    Vacant {
        /// First tombstone or empty slot on the path.
        free: usize,
        probes: usize,
    },
}

/// Linear-probing table over a fixed array of slots.
#[derive(Clone)]
pub struct Table<K, V, S> {
    pub(crate) slots: Box<[Slot<K, V>]>,
    pub(crate) hasher: S,
    pub(crate) elements: usize,
    pub(crate) tombstones: usize,
    pub(crate) empties: usize,
}

impl<K: fmt::Debug, V: fmt::Debug, S> fmt::Debug for Table<K, V, S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Table")
            .field("elements", &self.elements)
            .field("tombstones", &self.tombstones)
            .field("empties", &self.empties)
            .field("slots", &self.slots)
            .finish_non_exhaustive()
    }
}

impl<K, V, S> Table<K, V, S> {
    pub fn capacity(&self) -> usize {
        self.slots.len()
    }

    /// Number of stored elements.
    pub fn len(&self) -> usize {
        self.elements
    }

    pub fn is_empty(&self) -> bool {
        self.elements == 0
    }

    pub fn tombstone_count(&self) -> usize {
        self.tombstones
    }

    pub fn empty_count(&self) -> usize {
        self.empties
    }

    pub fn slots(&self) -> &[Slot<K, V>] {
        &self.slots
    }

    pub fn hasher(&self) -> &S {
        &self.hasher
    }

    /// Returns the element behind `handle` without probing.
    pub fn read(&self, handle: SlotRef) -> Result<(&K, &V), TableError> {
        match self.slots.get(handle.0) {
            Some(Slot::Occupied(b)) => Ok((&b.key, &b.value)),
            _ => Err(TableError::StaleHandle(handle.0)),
        }
    }

    pub fn read_mut(&mut self, handle: SlotRef) -> Result<(&K, &mut V), TableError> {
        match self.slots.get_mut(handle.0) {
            Some(Slot::Occupied(b)) => Ok((&b.key, &mut b.value)),
            _ => Err(TableError::StaleHandle(handle.0)),
        }
    }

    /// Iterates over stored elements in slot order.
    pub fn iter(&self) -> impl Iterator<Item = (SlotRef, &K, &V)> {
        self.slots.iter().enumerate().filter_map(|(i, s)| match s {
            Slot::Occupied(b) => Some((SlotRef(i), &b.key, &b.value)),
            _ => None,
        })
    }

    #[inline]
    pub(crate) fn next(&self, i: usize) -> usize {
        if i + 1 == self.slots.len() {
            0
        } else {
            i + 1
        }
    }

    #[inline]
    pub(crate) fn prev(&self, i: usize) -> usize {
        if i == 0 {
            self.slots.len() - 1
        } else {
            i - 1
        }
    }

    /// One line per slot: `index<TAB>state<TAB>key-or-dash<TAB>home-or-dash`.
    pub fn dump(&self) -> String
    where
        K: fmt::Display,
    {
        let mut out = String::new();
        for (i, slot) in self.slots.iter().enumerate() {
            match slot {
                Slot::Occupied(b) => writeln!(out, "{i}\t{}\t{}\t{}", slot.state(), b.key, b.home),
                _ => writeln!(out, "{i}\t{}\t-\t-", slot.state()),
            }
            .expect("writing to a String cannot fail");
        }
        out
    }
}

impl<K, V, S> Table<K, V, S>
where
    K: Eq,
    S: SlotHasher<K>,
{
    /// Creates a table of `capacity` empty slots.
    pub fn new(capacity: usize, hasher: S) -> Result<Self, TableError> {
        if capacity < 2 {
            return Err(TableError::InvalidCapacity(capacity));
        }
        let slots = std::iter::repeat_with(|| Slot::Empty)
            .take(capacity)
            .collect();
        Ok(Table {
            slots,
            hasher,
            elements: 0,
            tombstones: 0,
            empties: capacity,
        })
    }

    /// Adopts an explicit slot layout, recomputing home positions and
    /// counters. The layout is not checked against the table invariants,
    /// which makes this the way to build fixtures for the invariant checker.
    pub fn from_slots(slots: Vec<Slot<K, V>>, hasher: S) -> Result<Self, TableError> {
        let m = slots.len();
        if m < 2 {
            return Err(TableError::InvalidCapacity(m));
        }
        let mut table = Table {
            slots: slots.into_boxed_slice(),
            hasher,
            elements: 0,
            tombstones: 0,
            empties: 0,
        };
        for i in 0..m {
            match &table.slots[i] {
                Slot::Empty => table.empties += 1,
                Slot::Tombstone => table.tombstones += 1,
                Slot::Occupied(b) => {
                    let home = table.hasher.slot_of(&b.key) % m;
                    if let Slot::Occupied(b) = &mut table.slots[i] {
                        b.home = home;
                    }
                    table.elements += 1;
                }
            }
        }
        if table.empties == 0 {
            return Err(TableError::NoEmptySlot);
        }
        Ok(table)
    }

    /// Home position of `key` in this table.
    pub fn home_of(&self, key: &K) -> usize {
        self.hasher.slot_of(key) % self.slots.len()
    }

    fn probe(&self, key: &K, home: usize) -> Probe {
        let mut free = None;
        let mut i = home;
        for probes in 1..=self.slots.len() {
            match &self.slots[i] {
                Slot::Empty => {
                    return Probe::Vacant {
                        free: free.unwrap_or(i),
                        probes,
                    }
                }
                Slot::Tombstone => {
                    free.get_or_insert(i);
                }
                Slot::Occupied(b) => {
                    if b.key == *key {
                        return Probe::Found { at: i, probes };
                    }
                }
            }
            i = self.next(i);
        }
        unreachable!("table without an empty slot")
    }

    pub(crate) fn position_of(&self, key: &K) -> Option<(usize, usize)> {
        match self.probe(key, self.home_of(key)) {
            Probe::Found { at, .. } => Some((at, self.home_of(key))),
            Probe::Vacant { .. } => None,
        }
    }

    /// Scans from the key's home until the key or an empty slot is found.
    pub fn find(&self, key: &K) -> (Option<SlotRef>, ProbeCount) {
        match self.probe(key, self.home_of(key)) {
            Probe::Found { at, probes } => (Some(SlotRef(at)), ProbeCount(probes)),
            Probe::Vacant { probes, .. } => (None, ProbeCount(probes)),
        }
    }

    pub fn get(&self, key: &K) -> Option<&V> {
        let (found, _) = self.find(key);
        found.map(|r| match &self.slots[r.0] {
            Slot::Occupied(b) => &b.value,
            _ => unreachable!(),
        })
    }

    pub fn contains_key(&self, key: &K) -> bool {
        self.find(key).0.is_some()
    }

    /// Inserts or updates `key`.
    ///
    /// A new element goes into the first tombstone or empty slot on its probe
    /// path, but only after the scan has reached an empty slot without seeing
    /// the key. An existing key keeps its slot and only has its value
    /// replaced. Fails with [`TableError::TableFull`], leaving the table
    /// untouched, if the element would take the last empty slot.
    pub fn insert(&mut self, key: K, value: V) -> Result<(SlotRef, InsertOutcome), TableError> {
        let home = self.home_of(&key);
        match self.probe(&key, home) {
            Probe::Found { at, .. } => {
                if let Slot::Occupied(b) = &mut self.slots[at] {
                    b.value = value;
                }
                Ok((SlotRef(at), InsertOutcome::Updated))
            }
            Probe::Vacant { free, .. } => {
                match self.slots[free] {
                    Slot::Empty if self.empties == 1 => return Err(TableError::TableFull),
                    Slot::Empty => self.empties -= 1,
                    Slot::Tombstone => self.tombstones -= 1,
                    Slot::Occupied(_) => unreachable!(),
                }
                self.slots[free] = Slot::Occupied(Bucket { home, key, value });
                self.elements += 1;
                Ok((SlotRef(free), InsertOutcome::Inserted))
            }
        }
    }

    /// Removes `key`, leaving a tombstone only where some other element's
    /// probe path still crosses the vacated range.
    ///
    /// The element's slot becomes a tombstone. A scan to the right of it, up
    /// to the end of the run, finds the leftmost home among the elements
    /// there. A second scan walks back from the vacated slot to the key's
    /// home, folding in the homes of elements it passes, and clears each
    /// tombstone that no element to its right probes across. No element
    /// changes slot.
    pub fn remove(&mut self, key: &K) -> bool {
        let Some((hole, home)) = self.position_of(key) else {
            return false;
        };
        let m = self.slots.len();
        self.slots[hole] = Slot::Tombstone;
        self.elements -= 1;
        self.tombstones += 1;

        // Positions are signed offsets from `hole`; the run containing `hole`
        // is shorter than `m`, so every home folded below is unambiguous.
        let mut leftmost: Option<isize> = None;
        let mut j = self.next(hole);
        let mut reach = 1;
        loop {
            match &self.slots[j] {
                Slot::Empty => break,
                Slot::Tombstone => {}
                Slot::Occupied(b) => {
                    let ahead = cyclic_distance(hole, b.home, m);
                    let offset = if ahead <= reach {
                        ahead as isize
                    } else {
                        ahead as isize - m as isize
                    };
                    leftmost = Some(leftmost.map_or(offset, |h| h.min(offset)));
                }
            }
            j = self.next(j);
            reach += 1;
        }

        let span = cyclic_distance(home, hole, m);
        let mut k = hole;
        for back in 0..=span {
            let here = -(back as isize);
            match &self.slots[k] {
                Slot::Tombstone => {
                    if leftmost.is_none_or(|h| h > here) {
                        self.slots[k] = Slot::Empty;
                        self.tombstones -= 1;
                        self.empties += 1;
                    }
                }
                Slot::Occupied(b) => {
                    let offset = here - cyclic_distance(b.home, k, m) as isize;
                    leftmost = Some(leftmost.map_or(offset, |h| h.min(offset)));
                }
                Slot::Empty => debug_assert!(false, "empty slot inside a probe path"),
            }
            k = self.prev(k);
        }
        true
    }
}
