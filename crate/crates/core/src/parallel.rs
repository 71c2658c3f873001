//! Deterministic work distribution.
//!
//! Trials are split into fixed-size chunks whose boundaries depend only on
//! the item count, never on the worker count. Workers claim chunks through an
//! atomic cursor, write results into per-chunk slots, and the caller reduces
//! the slots in chunk order. Aggregates are therefore bit-identical for any
//! number of threads.

use std::ops::Range;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

/// Trials per chunk. Fixed: chunk boundaries are part of the determinism
/// contract, so this must not depend on the thread count.
pub const CHUNK: usize = 8192;

static THREADS: AtomicUsize = AtomicUsize::new(0);

/// Sets the process-wide worker count (0 restores the default).
pub fn set_threads(n: usize) {
    THREADS.store(n, Ordering::SeqCst);
}

/// Current worker count: the configured value, else available parallelism.
pub fn threads() -> usize {
    match THREADS.load(Ordering::SeqCst) {
        0 => std::thread::available_parallelism().map_or(1, |n| n.get()),
        n => n,
    }
}

/// Applies `work` to fixed chunks of `0..n` and returns the per-chunk results
/// in chunk order.
pub fn map_chunks<T, F>(n: usize, work: F) -> Vec<T>
where
    T: Send,
    F: Fn(Range<usize>) -> T + Sync,
{
    map_chunks_with(n, CHUNK, work)
}

/// [`map_chunks`] with an explicit chunk size (1 for heavyweight items such
/// as sweep cells).
pub fn map_chunks_with<T, F>(n: usize, chunk: usize, work: F) -> Vec<T>
where
    T: Send,
    F: Fn(Range<usize>) -> T + Sync,
{
    let n_chunks = n.div_ceil(chunk);
    let workers = threads().clamp(1, n_chunks.max(1));
    if workers <= 1 || n_chunks <= 1 {
        return (0..n_chunks)
            .map(|c| work(c * chunk..((c + 1) * chunk).min(n)))
            .collect();
    }

    let cursor = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<T>>> = (0..n_chunks).map(|_| Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let c = cursor.fetch_add(1, Ordering::Relaxed);
                if c >= n_chunks {
                    break;
                }
                let out = work(c * chunk..((c + 1) * chunk).min(n));
                *slots[c].lock().unwrap() = Some(out);
            });
        }
    });
    slots
        .into_iter()
        .map(|s| s.into_inner().unwrap().expect("chunk completed"))
        .collect()
}

/// Streaming mean and standard error with deterministic chunked reduction.
#[derive(Debug, Clone, Copy, Default)]
pub struct Accumulator {
    pub n: u64,
    pub sum: f64,
    pub sum_sq: f64,
}

impl Accumulator {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    pub fn merge(&mut self, other: &Accumulator) {
        self.n += other.n;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
    }

    pub fn mean(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.sum / self.n as f64
        }
    }

    /// Sample standard error of the mean: stdev / sqrt(n).
    pub fn std_error(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let n = self.n as f64;
        let var = (self.sum_sq - self.sum * self.sum / n) / (n - 1.0);
        (var.max(0.0) / n).sqrt()
    }
}
