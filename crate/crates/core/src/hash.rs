use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::table::SlotHasher;

/// Hashes integer keys to uniform positions in `0..range` by drawing from a
/// seeded ChaCha stream selected by the key.
///
/// Equivalent to looking the key up in a table of pre-generated random
/// values, without storing the table: the same `(seed, key, range)` always
/// yields the same position.
#[derive(Debug, Clone)]
pub struct TabulatedHash {
    base: ChaCha8Rng,
    range: usize,
}

impl TabulatedHash {
    /// # Panics
    /// If `range` is zero.
    pub fn new(seed: u64, range: usize) -> Self {
        assert!(range > 0, "hash range must be non-empty");
        TabulatedHash {
            base: ChaCha8Rng::seed_from_u64(seed),
            range,
        }
    }

    pub fn range(&self) -> usize {
        self.range
    }

    pub fn hash(&self, key: u64) -> usize {
        let mut rng = self.base.clone();
        rng.set_stream(key);
        rng.random_range(0..self.range)
    }
}

impl SlotHasher<u64> for TabulatedHash {
    fn slot_of(&self, key: &u64) -> usize {
        self.hash(*key)
    }
}
