use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::sampler::{check_distinct, SeedBatch};

/// The seed batches of one epoch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EpochPlan {
    pub batches: Vec<SeedBatch>,
    pub batch_size: usize,
    pub shuffle_seed: u64,
}

impl EpochPlan {
    pub fn len(&self) -> usize {
        self.batches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.batches.is_empty()
    }

    pub fn num_seeds(&self) -> usize {
        self.batches.iter().map(SeedBatch::len).sum()
    }
}

/// Shuffles `train_ids` with `shuffle_seed` and cuts the result into
/// consecutive batches of `batch_size` (the last may be shorter). Batch IDs
/// are `0..B`.
pub fn make_epoch_plan(
    train_ids: &[u32],
    batch_size: usize,
    shuffle_seed: u64,
) -> Result<EpochPlan> {
    if batch_size == 0 {
        return Err(Error::invalid("batch_size must be at least 1"));
    }
    check_distinct(train_ids)?;
    let mut ids = train_ids.to_vec();
    ids.shuffle(&mut ChaCha8Rng::seed_from_u64(shuffle_seed));
    let batches = ids
        .chunks(batch_size)
        .enumerate()
        .map(|(i, c)| SeedBatch::new_unchecked(i as u64, c.to_vec()))
        .collect();
    Ok(EpochPlan {
        batches,
        batch_size,
        shuffle_seed,
    })
}
