//! Exact key set sharded on a 64-bit hash prefix.
//!
//! Each shard maps the hash to the full keys carrying it, so prefix
//! collisions are resolved by comparing the keys themselves.

use std::collections::HashMap;
use std::hash::{BuildHasherDefault, Hasher};

/// Identity hasher: the map keys are already well-mixed 64-bit hashes.
#[derive(Default)]
struct PrefixHasher(u64);

impl Hasher for PrefixHasher {
    fn finish(&self) -> u64 {
        self.0
    }

    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 = self.0.rotate_left(8) ^ b as u64;
        }
    }

    fn write_u64(&mut self, v: u64) {
        self.0 = v;
    }
}

type Shard<V> = HashMap<u64, Vec<(Box<str>, V)>, BuildHasherDefault<PrefixHasher>>;

/// 64-bit FNV-1a followed by a final avalanche, stable across platforms.
pub fn key_hash(key: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in key.as_bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h ^= h >> 33;
    h = h.wrapping_mul(0xff51_afd7_ed55_8ccd);
    h ^ (h >> 33)
}

/// Map from key to a small value (for example the index of the source that
/// first claimed it).
pub struct ShardedKeyMap<V> {
    shards: Vec<Shard<V>>,
    bits: u32,
    len: usize,
    hash: fn(&str) -> u64,
}

impl<V: Copy> ShardedKeyMap<V> {
    /// `2^bits` shards.
    pub fn new(bits: u32) -> ShardedKeyMap<V> {
        ShardedKeyMap::with_hash(bits, key_hash)
    }

    /// Custom prefix hash; exactness holds for any function.
    pub fn with_hash(bits: u32, hash: fn(&str) -> u64) -> ShardedKeyMap<V> {
        assert!(bits <= 16);
        ShardedKeyMap { shards: (0..1usize << bits).map(|_| Shard::default()).collect(), bits, len: 0, hash }
    }

    fn shard(&self, h: u64) -> usize {
        if self.bits == 0 {
            0
        } else {
            (h >> (64 - self.bits)) as usize
        }
    }

    pub fn get(&self, key: &str) -> Option<V> {
        let h = (self.hash)(key);
        self.shards[self.shard(h)].get(&h)?.iter().find(|(k, _)| &**k == key).map(|&(_, v)| v)
    }

    pub fn contains(&self, key: &str) -> bool {
        self.get(key).is_some()
    }

    /// Insert unless present. Returns the value already stored, if any.
    pub fn insert(&mut self, key: &str, value: V) -> Option<V> {
        let h = (self.hash)(key);
        let s = self.shard(h);
        let bucket = self.shards[s].entry(h).or_default();
        if let Some(&(_, v)) = bucket.iter().find(|(k, _)| &**k == key) {
            return Some(v);
        }
        bucket.push((key.into(), value));
        self.len += 1;
        None
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }
}

/// Set of keys.
pub struct ShardedKeySet(ShardedKeyMap<()>);

impl ShardedKeySet {
    pub fn new(bits: u32) -> ShardedKeySet {
        ShardedKeySet(ShardedKeyMap::new(bits))
    }

    /// True when the key was not present before.
    pub fn insert(&mut self, key: &str) -> bool {
        self.0.insert(key, ()).is_none()
    }

    pub fn contains(&self, key: &str) -> bool {
        self.0.contains(key)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl Default for ShardedKeySet {
    fn default() -> ShardedKeySet {
        ShardedKeySet::new(6)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn insert_and_lookup() {
        let mut s = ShardedKeySet::default();
        assert!(s.insert("CCO"));
        assert!(!s.insert("CCO"));
        assert!(s.insert("COC"));
        assert!(s.contains("CCO") && !s.contains("C"));
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn map_keeps_first_value() {
        let mut m: ShardedKeyMap<u16> = ShardedKeyMap::new(0);
        assert_eq!(m.insert("a", 1), None);
        assert_eq!(m.insert("a", 2), Some(1));
        assert_eq!(m.get("a"), Some(1));
    }

    #[test]
    fn colliding_prefixes_stay_exact() {
        let mut m: ShardedKeyMap<u8> = ShardedKeyMap::with_hash(2, |_| 42);
        assert_eq!(m.insert("x", 1), None);
        assert_eq!(m.insert("y", 2), None);
        assert_eq!(m.insert("x", 3), Some(1));
        assert_eq!((m.get("y"), m.get("z"), m.len()), (Some(2), None, 2));
        let mut s = ShardedKeySet::new(4);
        for i in 0..10_000 {
            assert!(s.insert(&format!("k{i}")));
        }
        for i in 0..10_000 {
            assert!(!s.insert(&format!("k{i}")));
        }
        assert_eq!(s.len(), 10_000);
    }

    #[test]
    fn hash_is_stable() {
        assert_eq!(key_hash("CCO"), key_hash("CCO"));
        assert_ne!(key_hash("CCO"), key_hash("OCC"));
    }
}
