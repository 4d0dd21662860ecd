use std::collections::hash_map::Entry;
use std::collections::{HashMap, HashSet};

use super::flat_map::FlatMap;
use super::variant::MapImpl;
use crate::error::{Error, Result};

/// Global-to-local lookup behind an [`IdMap`].
pub(crate) trait LocalIndex {
    fn get_or_insert(&mut self, global: u32, next_local: u32) -> (u32, bool);
    fn get(&self, global: u32) -> Option<u32>;
}

impl LocalIndex for HashMap<u32, u32> {
    #[inline]
    fn get_or_insert(&mut self, global: u32, next_local: u32) -> (u32, bool) {
        match self.entry(global) {
            Entry::Occupied(e) => (*e.get(), false),
            Entry::Vacant(e) => (*e.insert(next_local), true),
        }
    }

    #[inline]
    fn get(&self, global: u32) -> Option<u32> {
        HashMap::get(self, &global).copied()
    }
}

impl LocalIndex for FlatMap {
    #[inline]
    fn get_or_insert(&mut self, global: u32, next_local: u32) -> (u32, bool) {
        FlatMap::get_or_insert(self, global, next_local)
    }

    #[inline]
    fn get(&self, global: u32) -> Option<u32> {
        FlatMap::get(self, global)
    }
}

#[derive(Debug, Clone)]
pub(crate) enum IndexImpl {
    Std(HashMap<u32, u32>),
    Flat(FlatMap),
}

/// Insertion-ordered bijection between global node IDs and compact local
/// IDs `0..len()`.
///
/// Two maps are equal when they hold the same globals in the same order,
/// whatever lookup structure backs them.
#[derive(Debug, Clone)]
pub struct IdMap {
    pub(crate) globals: Vec<u32>,
    pub(crate) index: IndexImpl,
    map_impl: MapImpl,
}

impl PartialEq for IdMap {
    fn eq(&self, other: &Self) -> bool {
        self.globals == other.globals
    }
}

impl Eq for IdMap {}

impl IdMap {
    pub fn new(map_impl: MapImpl) -> Self {
        Self::with_size_hint(map_impl, 0)
    }

    /// The hint is only honoured by [`MapImpl::FlatProbingWithSizeHint`].
    pub fn with_size_hint(map_impl: MapImpl, hint: usize) -> Self {
        let index = match map_impl {
            MapImpl::StdHash => IndexImpl::Std(HashMap::new()),
            MapImpl::FlatProbing => IndexImpl::Flat(FlatMap::new()),
            MapImpl::FlatProbingWithSizeHint => IndexImpl::Flat(FlatMap::with_capacity(hint)),
        };
        IdMap {
            globals: Vec::with_capacity(if map_impl == MapImpl::FlatProbingWithSizeHint {
                hint
            } else {
                0
            }),
            index,
            map_impl,
        }
    }

    /// Map whose first locals are `destinations`, in order. Fails on a
    /// repeated ID or on `u32::MAX`.
    pub fn with_destinations(map_impl: MapImpl, destinations: &[u32], hint: usize) -> Result<Self> {
        let mut m = Self::with_size_hint(map_impl, hint.max(destinations.len()));
        for &g in destinations {
            if g == u32::MAX {
                return Err(Error::invalid("node ID u32::MAX is reserved"));
            }
            let (_, fresh) = m.insert(g);
            if !fresh {
                return Err(Error::invalid(format!("destination {g} listed twice")));
            }
        }
        Ok(m)
    }

    pub fn map_impl(&self) -> MapImpl {
        self.map_impl
    }

    pub fn len(&self) -> usize {
        self.globals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.globals.is_empty()
    }

    /// Local ID of `global`, assigning the next one on first sight.
    pub fn insert(&mut self, global: u32) -> (u32, bool) {
        let next = self.globals.len() as u32;
        let out = match &mut self.index {
            IndexImpl::Std(m) => LocalIndex::get_or_insert(m, global, next),
            IndexImpl::Flat(m) => LocalIndex::get_or_insert(m, global, next),
        };
        if out.1 {
            self.globals.push(global);
        }
        out
    }

    pub fn local(&self, global: u32) -> Option<u32> {
        match &self.index {
            IndexImpl::Std(m) => LocalIndex::get(m, global),
            IndexImpl::Flat(m) => LocalIndex::get(m, global),
        }
    }

    pub fn global(&self, local: u32) -> u32 {
        self.globals[local as usize]
    }

    /// Globals indexed by local ID.
    pub fn globals(&self) -> &[u32] {
        &self.globals
    }

    pub fn reserve(&mut self, additional: usize) {
        if self.map_impl == MapImpl::FlatProbingWithSizeHint {
            self.globals.reserve(additional);
            if let IndexImpl::Flat(m) = &mut self.index {
                m.reserve(additional);
            }
        }
    }
}

pub(crate) fn check_distinct(ids: &[u32]) -> Result<()> {
    let mut seen = HashSet::with_capacity(ids.len());
    for &v in ids {
        if !seen.insert(v) {
            return Err(Error::invalid(format!(
                "node {v} appears twice in a seed batch"
            )));
        }
    }
    Ok(())
}
