//! Bounded channels with high-water-mark instrumentation.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use crossbeam_channel::{Receiver, SendError, Sender};

/// Records the deepest a bounded buffer has ever been.
#[derive(Debug)]
pub struct BufferGauge {
    name: &'static str,
    capacity: usize,
    high_water: AtomicUsize,
}

impl BufferGauge {
    pub fn new(name: &'static str, capacity: usize) -> Arc<Self> {
        Arc::new(Self { name, capacity, high_water: AtomicUsize::new(0) })
    }

    pub fn observe(&self, depth: usize) {
        self.high_water.fetch_max(depth, Ordering::Relaxed);
    }

    pub fn snapshot(&self) -> BufferStats {
        BufferStats {
            name: self.name.to_string(),
            capacity: self.capacity,
            high_water: self.high_water.load(Ordering::Relaxed),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct BufferStats {
    pub name: String,
    pub capacity: usize,
    pub high_water: usize,
}

impl BufferStats {
    pub fn within_bounds(&self) -> bool {
        self.high_water <= self.capacity
    }
}

/// Sending half of a bounded channel that reports its depth to a gauge.
pub struct GaugedSender<T> {
    inner: Sender<T>,
    gauge: Arc<BufferGauge>,
}

impl<T> Clone for GaugedSender<T> {
    fn clone(&self) -> Self {
        Self { inner: self.inner.clone(), gauge: Arc::clone(&self.gauge) }
    }
}

impl<T> GaugedSender<T> {
    pub fn send(&self, value: T) -> Result<(), SendError<T>> {
        self.inner.send(value)?;
        self.gauge.observe(self.inner.len());
        Ok(())
    }
}

/// A bounded channel of `gauge.capacity` slots (at least one).
pub fn gauged_channel<T>(gauge: &Arc<BufferGauge>) -> (GaugedSender<T>, Receiver<T>) {
    let (tx, rx) = crossbeam_channel::bounded(gauge.capacity.max(1));
    (GaugedSender { inner: tx, gauge: Arc::clone(gauge) }, rx)
}
