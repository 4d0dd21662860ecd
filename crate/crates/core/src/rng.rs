//! Counter-based random streams.
//!
//! Every destination node sampled during MFG construction gets its own
//! stream keyed by `(global_seed, batch_id, hop, dst_position)`. The n-th
//! draw of a stream is a pure function of the key and `n`, so the samples
//! a batch receives do not depend on which worker thread prepares it or in
//! which order batches are scheduled.

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Identifies one sampling stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamKey {
    pub seed: u64,
    pub batch_id: u64,
    pub hop: u32,
    pub position: u64,
}

impl StreamKey {
    pub fn new(seed: u64, batch_id: u64, hop: u32, position: u64) -> Self {
        StreamKey {
            seed,
            batch_id,
            hop,
            position,
        }
    }

    fn fold(&self) -> u64 {
        let mut k = mix64(self.seed ^ GOLDEN);
        k = mix64(k ^ self.batch_id.wrapping_mul(GOLDEN));
        k = mix64(k ^ u64::from(self.hop).wrapping_add(0x632b_e59b_d9b4_e019));
        mix64(k ^ self.position.wrapping_mul(0xd1b5_4a32_d192_ed03))
    }

    pub fn stream(&self) -> CounterRng {
        CounterRng {
            key: self.fold(),
            counter: 0,
        }
    }
}

/// Key for all streams of one hop of one batch; `stream(position)` derives
/// the per-destination stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HopStreams {
    pub seed: u64,
    pub batch_id: u64,
    pub hop: u32,
}

impl HopStreams {
    pub fn new(seed: u64, batch_id: u64, hop: u32) -> Self {
        HopStreams {
            seed,
            batch_id,
            hop,
        }
    }

    #[inline]
    pub fn stream(&self, position: u64) -> CounterRng {
        StreamKey::new(self.seed, self.batch_id, self.hop, position).stream()
    }
}

#[derive(Debug, Clone)]
pub struct CounterRng {
    key: u64,
    counter: u64,
}

impl CounterRng {
    /// Number of 64-bit words consumed so far.
    pub fn consumed(&self) -> u64 {
        self.counter
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let x = self
            .key
            .wrapping_add(self.counter.wrapping_add(1).wrapping_mul(GOLDEN));
        self.counter += 1;
        mix64(x)
    }

    /// Uniform integer in `[0, n)` by Lemire's multiply-and-reject method.
    /// `n` must be nonzero.
    #[inline]
    pub fn below(&mut self, n: u64) -> u64 {
        debug_assert!(n > 0);
        let mut m = u128::from(self.next_u64()) * u128::from(n);
        let mut low = m as u64;
        if low < n {
            let threshold = n.wrapping_neg() % n;
            while low < threshold {
                m = u128::from(self.next_u64()) * u128::from(n);
                low = m as u64;
            }
        }
        (m >> 64) as u64
    }
}
