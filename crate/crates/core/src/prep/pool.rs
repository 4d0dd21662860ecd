//! Fixed pool of reusable feature buffers, standing in for page-locked
//! host memory that prep workers fill and the training loop hands to the
//! device without another copy.

use std::ops::{Deref, DerefMut};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::Duration;

use crossbeam::channel::{bounded, Receiver, RecvTimeoutError, Sender};

struct PoolShared {
    free_tx: Sender<Vec<f32>>,
    free_rx: Receiver<Vec<f32>>,
    outstanding: AtomicUsize,
    peak: AtomicUsize,
    size: usize,
}

#[derive(Clone)]
pub struct BufferPool {
    shared: Arc<PoolShared>,
}

impl BufferPool {
    pub fn new(size: usize) -> Self {
        let (free_tx, free_rx) = bounded(size);
        for _ in 0..size {
            free_tx.send(Vec::new()).expect("pool channel has room");
        }
        BufferPool {
            shared: Arc::new(PoolShared {
                free_tx,
                free_rx,
                outstanding: AtomicUsize::new(0),
                peak: AtomicUsize::new(0),
                size,
            }),
        }
    }

    pub fn size(&self) -> usize {
        self.shared.size
    }

    /// Buffers currently checked out.
    pub fn outstanding(&self) -> usize {
        self.shared.outstanding.load(Ordering::SeqCst)
    }

    /// Most buffers ever checked out at once.
    pub fn peak(&self) -> usize {
        self.shared.peak.load(Ordering::SeqCst)
    }

    /// Waits for a free buffer, giving up once `stop` is raised.
    pub fn acquire(&self, stop: &AtomicBool) -> Option<PinnedBuffer> {
        loop {
            if stop.load(Ordering::Acquire) {
                return None;
            }
            match self.shared.free_rx.recv_timeout(Duration::from_millis(2)) {
                Ok(data) => {
                    let now = self.shared.outstanding.fetch_add(1, Ordering::SeqCst) + 1;
                    self.shared.peak.fetch_max(now, Ordering::SeqCst);
                    return Some(PinnedBuffer {
                        data,
                        home: Some(self.shared.clone()),
                    });
                }
                Err(RecvTimeoutError::Timeout) => continue,
                Err(RecvTimeoutError::Disconnected) => return None,
            }
        }
    }
}

/// A feature buffer, returned to its pool when dropped.
pub struct PinnedBuffer {
    data: Vec<f32>,
    home: Option<Arc<PoolShared>>,
}

impl PinnedBuffer {
    /// A buffer that belongs to no pool.
    pub fn unpooled(data: Vec<f32>) -> Self {
        PinnedBuffer { data, home: None }
    }

    /// Resizes to exactly `len` values, reusing the allocation.
    pub(crate) fn set_len(&mut self, len: usize) {
        if self.data.len() < len {
            self.data.resize(len, 0.0);
        } else {
            self.data.truncate(len);
        }
    }

    /// Takes the values out; the pool slot is released with a fresh
    /// allocation.
    pub fn into_vec(mut self) -> Vec<f32> {
        std::mem::take(&mut self.data)
    }
}

impl Deref for PinnedBuffer {
    type Target = [f32];

    fn deref(&self) -> &[f32] {
        &self.data
    }
}

impl DerefMut for PinnedBuffer {
    fn deref_mut(&mut self) -> &mut [f32] {
        &mut self.data
    }
}

impl std::fmt::Debug for PinnedBuffer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PinnedBuffer")
            .field("len", &self.data.len())
            .field("pooled", &self.home.is_some())
            .finish()
    }
}

impl Drop for PinnedBuffer {
    fn drop(&mut self) {
        if let Some(home) = self.home.take() {
            home.outstanding.fetch_sub(1, Ordering::SeqCst);
            let _ = home.free_tx.try_send(std::mem::take(&mut self.data));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn buffers_cycle_through_pool() {
        let pool = BufferPool::new(2);
        let stop = AtomicBool::new(false);
        let mut a = pool.acquire(&stop).unwrap();
        a.set_len(100);
        let b = pool.acquire(&stop).unwrap();
        assert_eq!(pool.outstanding(), 2);
        drop(a);
        let c = pool.acquire(&stop).unwrap();
        // The returned allocation is handed out again.
        assert!(c.len() == 100 || b.len() == 100);
        drop((b, c));
        assert_eq!(pool.outstanding(), 0);
        assert_eq!(pool.peak(), 2);
    }

    #[test]
    fn acquire_honours_stop() {
        let pool = BufferPool::new(1);
        let stop = AtomicBool::new(false);
        let _held = pool.acquire(&stop).unwrap();
        stop.store(true, Ordering::Release);
        assert!(pool.acquire(&stop).is_none());
    }

    #[test]
    fn into_vec_releases_slot() {
        let pool = BufferPool::new(1);
        let stop = AtomicBool::new(false);
        let mut a = pool.acquire(&stop).unwrap();
        a.set_len(3);
        assert_eq!(a.into_vec().len(), 3);
        assert_eq!(pool.outstanding(), 0);
        assert!(pool.acquire(&stop).is_some());
    }
}
