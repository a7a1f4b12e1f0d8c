use std::collections::{HashMap, VecDeque};
use std::hash::Hash;

/// Textbook LRU: a map plus an explicit recency sequence, most recent first.
/// Linear-time recency updates; meant for small capacities in tests.
#[derive(Debug, Clone)]
pub struct ReferenceLru<K, V> {
    capacity: usize,
    values: HashMap<K, V>,
    recency: VecDeque<K>,
}

impl<K: Hash + Eq + Clone, V> ReferenceLru<K, V> {
    pub fn new(capacity: usize) -> Self {
        ReferenceLru {
            capacity,
            values: HashMap::new(),
            recency: VecDeque::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn touch(&mut self, key: &K) {
        let at = self
            .recency
            .iter()
            .position(|k| k == key)
            .expect("key tracked");
        let k = self.recency.remove(at).expect("index in range");
        self.recency.push_front(k);
    }

    pub fn get(&mut self, key: &K) -> Option<&V> {
        if self.values.contains_key(key) {
            self.touch(key);
        }
        self.values.get(key)
    }

    /// Inserts or updates `key`; returns the evicted key, if any.
    pub fn put(&mut self, key: K, value: V) -> Option<K> {
        if let Some(slot) = self.values.get_mut(&key) {
            *slot = value;
            self.touch(&key);
            return None;
        }
        let evicted = if self.values.len() >= self.capacity {
            let old = self.recency.pop_back();
            if let Some(old) = &old {
                self.values.remove(old);
            }
            old
        } else {
            None
        };
        self.recency.push_front(key.clone());
        self.values.insert(key, value);
        evicted
    }

    /// Keys from most to least recently used.
    pub fn keys_by_recency(&self) -> impl Iterator<Item = &K> {
        self.recency.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evicts_least_recent() {
        let mut lru = ReferenceLru::new(2);
        assert_eq!(lru.put(1, 'a'), None);
        assert_eq!(lru.put(2, 'b'), None);
        assert_eq!(lru.get(&1), Some(&'a'));
        assert_eq!(lru.put(3, 'c'), Some(2));
        assert_eq!(
            lru.keys_by_recency().copied().collect::<Vec<_>>(),
            vec![3, 1]
        );
        assert_eq!(lru.get(&2), None);
    }
}
