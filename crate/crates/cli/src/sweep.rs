use std::sync::{Condvar, Mutex};

use anyhow::Result;
use rayon::prelude::*;

/// Memory budget shared by concurrent exact solves. A request larger than
/// the whole budget is clamped so it can still run alone.
pub struct MemBudget {
    limit: u64,
    used: Mutex<u64>,
    freed: Condvar,
}

pub struct MemGuard<'a> {
    budget: &'a MemBudget,
    bytes: u64,
}

impl MemBudget {
    pub fn new(limit_bytes: u64) -> Self {
        Self {
            limit: limit_bytes.max(1),
            used: Mutex::new(0),
            freed: Condvar::new(),
        }
    }

    pub fn acquire(&self, bytes: u64) -> MemGuard<'_> {
        let bytes = bytes.min(self.limit);
        let mut used = self.used.lock().expect("budget lock");
        while *used + bytes > self.limit {
            used = self.freed.wait(used).expect("budget lock");
        }
        *used += bytes;
        MemGuard { budget: self, bytes }
    }

    pub fn in_use(&self) -> u64 {
        *self.used.lock().expect("budget lock")
    }
}

impl Drop for MemGuard<'_> {
    fn drop(&mut self) {
        let mut used = self.budget.used.lock().expect("budget lock");
        *used -= self.bytes;
        self.budget.freed.notify_all();
    }
}

/// Rough peak memory of one steady-state factorization at Fock cutoff `n_max`,
/// scaled from a measured 5.4 GB at `n_max = 340` on the full space.
pub fn exact_solve_bytes(n_max: usize) -> u64 {
    let s = (n_max as f64 + 1.0) / 341.0;
    (5.4e9 * s.powi(3) + 5.0e7) as u64
}

/// Parallel map on a dedicated pool of `workers` threads; results keep input order.
pub fn parallel_map<T, R, F>(items: &[T], workers: usize, f: F) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build()?;
    Ok(pool.install(|| items.par_iter().map(&f).collect()))
}
