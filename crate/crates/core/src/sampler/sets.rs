//! Set structures used to reject repeated slot draws.

use std::collections::HashSet;

/// Set of slot offsets within one node's adjacency.
pub(crate) trait SlotSet: Default {
    /// Empties the set before sampling a node with `degree` slots.
    fn reset(&mut self, degree: usize);
    /// Inserts `offset`; false when it was already present.
    fn insert(&mut self, offset: u32) -> bool;
}

#[derive(Default)]
pub(crate) struct HashSlotSet(HashSet<u32>);

impl SlotSet for HashSlotSet {
    #[inline]
    fn reset(&mut self, _degree: usize) {
        self.0.clear();
    }

    #[inline]
    fn insert(&mut self, offset: u32) -> bool {
        self.0.insert(offset)
    }
}

/// Unsorted array with linear membership scans; fanouts are small, so the
/// scan stays in cache.
#[derive(Default)]
pub(crate) struct VecSlotSet(Vec<u32>);

impl SlotSet for VecSlotSet {
    #[inline]
    fn reset(&mut self, _degree: usize) {
        self.0.clear();
    }

    #[inline]
    fn insert(&mut self, offset: u32) -> bool {
        if self.0.contains(&offset) {
            false
        } else {
            self.0.push(offset);
            true
        }
    }
}

/// One bit per slot, freshly zeroed for every node.
#[derive(Default)]
pub(crate) struct BitSlotSet(Vec<u64>);

impl SlotSet for BitSlotSet {
    #[inline]
    fn reset(&mut self, degree: usize) {
        self.0 = vec![0; degree.div_ceil(64)];
    }

    #[inline]
    fn insert(&mut self, offset: u32) -> bool {
        let word = &mut self.0[(offset / 64) as usize];
        let bit = 1u64 << (offset % 64);
        let fresh = *word & bit == 0;
        *word |= bit;
        fresh
    }
}
