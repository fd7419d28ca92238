use std::sync::atomic::{AtomicU64, Ordering};

/// Thread-safe operation counters shared by a preconditioner and everything
/// built on top of it.
#[derive(Debug, Default)]
pub struct Counters {
    local_solves: AtomicU64,
    spmv: AtomicU64,
    svd: AtomicU64,
}

impl Counters {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_local_solves(&self, n: u64) {
        self.local_solves.fetch_add(n, Ordering::Relaxed);
    }

    pub fn add_spmv(&self, n: u64) {
        self.spmv.fetch_add(n, Ordering::Relaxed);
    }

    pub fn add_svd(&self, n: u64) {
        self.svd.fetch_add(n, Ordering::Relaxed);
    }

    pub fn snapshot(&self) -> CounterSnapshot {
        CounterSnapshot {
            local_solves: self.local_solves.load(Ordering::Relaxed),
            spmv: self.spmv.load(Ordering::Relaxed),
            svd: self.svd.load(Ordering::Relaxed),
        }
    }

    pub fn reset(&self) {
        self.local_solves.store(0, Ordering::Relaxed);
        self.spmv.store(0, Ordering::Relaxed);
        self.svd.store(0, Ordering::Relaxed);
    }
}

/// Point-in-time copy of [`Counters`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CounterSnapshot {
    pub local_solves: u64,
    pub spmv: u64,
    pub svd: u64,
}

impl std::ops::Sub for CounterSnapshot {
    type Output = CounterSnapshot;
    fn sub(self, rhs: Self) -> Self {
        CounterSnapshot {
            local_solves: self.local_solves - rhs.local_solves,
            spmv: self.spmv - rhs.spmv,
            svd: self.svd - rhs.svd,
        }
    }
}
