use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Global-to-local ID map implementation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MapImpl {
    StdHash,
    FlatProbing,
    FlatProbingWithSizeHint,
}

/// Set used for without-replacement rejection sampling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SetImpl {
    HashSet,
    VectorSet,
    BitSet,
}

impl MapImpl {
    pub const ALL: [MapImpl; 3] = [
        MapImpl::StdHash,
        MapImpl::FlatProbing,
        MapImpl::FlatProbingWithSizeHint,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MapImpl::StdHash => "std_hash",
            MapImpl::FlatProbing => "flat_probing",
            MapImpl::FlatProbingWithSizeHint => "flat_probing_with_size_hint",
        }
    }
}

impl SetImpl {
    pub const ALL: [SetImpl; 3] = [SetImpl::HashSet, SetImpl::VectorSet, SetImpl::BitSet];

    pub fn name(self) -> &'static str {
        match self {
            SetImpl::HashSet => "hash_set",
            SetImpl::VectorSet => "vector_set",
            SetImpl::BitSet => "bit_set",
        }
    }
}

/// One point of the sampler design space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SamplerVariant {
    pub map_impl: MapImpl,
    pub set_impl: SetImpl,
    /// Sample and emit MFG edges in one pass instead of two.
    pub fuse: bool,
}

impl SamplerVariant {
    pub const fn new(map_impl: MapImpl, set_impl: SetImpl, fuse: bool) -> Self {
        SamplerVariant {
            map_impl,
            set_impl,
            fuse,
        }
    }

    /// Standard-library containers, separate sampling and MFG passes.
    pub const fn baseline() -> Self {
        Self::new(MapImpl::StdHash, SetImpl::HashSet, false)
    }

    pub const fn fast() -> Self {
        Self::new(MapImpl::FlatProbingWithSizeHint, SetImpl::VectorSet, true)
    }

    pub fn descriptor(&self) -> String {
        self.to_string()
    }
}

impl Default for SamplerVariant {
    fn default() -> Self {
        Self::fast()
    }
}

impl fmt::Display for SamplerVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}/{}/{}",
            self.map_impl.name(),
            self.set_impl.name(),
            if self.fuse { "fused" } else { "twopass" }
        )
    }
}

impl FromStr for SamplerVariant {
    type Err = Error;

    /// Parses `<map>/<set>/<fused|twopass>`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split('/').collect();
        let [map, set, fuse] = parts[..] else {
            return Err(Error::invalid(format!(
                "variant {s:?} is not of the form <map>/<set>/<fused|twopass>"
            )));
        };
        let map_impl = MapImpl::ALL
            .into_iter()
            .find(|m| m.name() == map)
            .ok_or_else(|| Error::invalid(format!("unknown map implementation {map:?}")))?;
        let set_impl = SetImpl::ALL
            .into_iter()
            .find(|m| m.name() == set)
            .ok_or_else(|| Error::invalid(format!("unknown set implementation {set:?}")))?;
        let fuse = match fuse {
            "fused" => true,
            "twopass" => false,
            other => return Err(Error::invalid(format!("unknown fusion mode {other:?}"))),
        };
        Ok(SamplerVariant::new(map_impl, set_impl, fuse))
    }
}

/// Every variant, in a fixed order (map, then set, then two-pass before
/// fused).
pub fn list_variants() -> Vec<SamplerVariant> {
    let mut out = Vec::with_capacity(18);
    for map in MapImpl::ALL {
        for set in SetImpl::ALL {
            for fuse in [false, true] {
                out.push(SamplerVariant::new(map, set, fuse));
            }
        }
    }
    out
}

/// Parses a comma-separated list of descriptors, or `all`.
pub fn parse_variant_list(s: &str) -> Result<Vec<SamplerVariant>> {
    if s.trim() == "all" {
        return Ok(list_variants());
    }
    s.split(',').map(|d| d.trim().parse()).collect()
}
