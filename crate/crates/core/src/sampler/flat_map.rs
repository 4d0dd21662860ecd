//! Open-addressing `u32 -> u32` map with linear probing and power-of-two
//! capacity. Keys must not equal `u32::MAX`, which marks empty slots.

const EMPTY: u32 = u32::MAX;
const MIN_CAPACITY: usize = 16;

#[derive(Debug, Clone)]
pub struct FlatMap {
    keys: Vec<u32>,
    vals: Vec<u32>,
    shift: u32,
    len: usize,
}

impl Default for FlatMap {
    fn default() -> Self {
        Self::with_capacity(0)
    }
}

#[inline]
fn slots_for(entries: usize) -> usize {
    // Max load factor 3/4.
    (entries.saturating_mul(4) / 3 + 1)
        .next_power_of_two()
        .max(MIN_CAPACITY)
}

impl FlatMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Room for `entries` keys before the first rehash.
    pub fn with_capacity(entries: usize) -> Self {
        let cap = slots_for(entries);
        FlatMap {
            keys: vec![EMPTY; cap],
            vals: vec![0; cap],
            shift: 64 - cap.trailing_zeros(),
            len: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn capacity(&self) -> usize {
        self.keys.len()
    }

    #[inline]
    fn home(&self, key: u32) -> usize {
        (u64::from(key).wrapping_mul(0x9e37_79b9_7f4a_7c15) >> self.shift) as usize
    }

    #[inline]
    pub fn get(&self, key: u32) -> Option<u32> {
        debug_assert_ne!(key, EMPTY);
        let mask = self.keys.len() - 1;
        let mut i = self.home(key);
        loop {
            let k = self.keys[i];
            if k == key {
                return Some(self.vals[i]);
            }
            if k == EMPTY {
                return None;
            }
            i = (i + 1) & mask;
        }
    }

    /// Returns the value stored for `key`, inserting `val` first if the key
    /// is absent. The flag is true when an insertion happened.
    #[inline]
    pub fn get_or_insert(&mut self, key: u32, val: u32) -> (u32, bool) {
        debug_assert_ne!(key, EMPTY);
        if (self.len + 1) * 4 > self.keys.len() * 3 {
            self.grow_to(slots_for(self.len + 1).max(self.keys.len() * 2));
        }
        let mask = self.keys.len() - 1;
        let mut i = self.home(key);
        loop {
            let k = self.keys[i];
            if k == key {
                return (self.vals[i], false);
            }
            if k == EMPTY {
                self.keys[i] = key;
                self.vals[i] = val;
                self.len += 1;
                return (val, true);
            }
            i = (i + 1) & mask;
        }
    }

    pub fn reserve(&mut self, additional: usize) {
        let want = slots_for(self.len + additional);
        if want > self.keys.len() {
            self.grow_to(want);
        }
    }

    fn grow_to(&mut self, cap: usize) {
        let old_keys = std::mem::replace(&mut self.keys, vec![EMPTY; cap]);
        let old_vals = std::mem::replace(&mut self.vals, vec![0; cap]);
        self.shift = 64 - cap.trailing_zeros();
        let mask = cap - 1;
        for (k, v) in old_keys.into_iter().zip(old_vals) {
            if k == EMPTY {
                continue;
            }
            let mut i = self.home(k);
            while self.keys[i] != EMPTY {
                i = (i + 1) & mask;
            }
            self.keys[i] = k;
            self.vals[i] = v;
        }
    }
}
