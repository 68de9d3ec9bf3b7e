use hypercurv_core::caseverify::scan::{best_in_range, merge_best};
use hypercurv_core::caseverify::{Cell, GridExecutor};
use rayon::prelude::*;

use crate::error::{CliError, CliResult};

/// Grid evaluation on a rayon pool. The index range is cut into fixed chunks
/// whose best cells are merged by `(penalty, index)`, so the result equals the
/// sequential one for any number of threads.
pub struct Parallel {
    pool: rayon::ThreadPool,
}

impl Parallel {
    pub fn new(jobs: usize) -> CliResult<Self> {
        if jobs == 0 {
            return Err(CliError::usage("--jobs must be at least 1"));
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| CliError::usage(format!("cannot start {jobs} worker threads: {e}")))?;
        Ok(Parallel { pool })
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl GridExecutor for Parallel {
    fn best_cells(&self, total: u64, keep: usize, eval: &(dyn Fn(u64) -> f64 + Sync)) -> Vec<Cell> {
        let chunks = (self.threads() as u64 * 8).clamp(1, total.max(1));
        let size = total.div_ceil(chunks).max(1);
        let parts: Vec<Vec<Cell>> = self.pool.install(|| {
            (0..chunks)
                .into_par_iter()
                .map(|c| {
                    let start = c * size;
                    let end = (start + size).min(total);
                    if start >= end {
                        Vec::new()
                    } else {
                        best_in_range(start..end, keep, eval)
                    }
                })
                .collect()
        });
        merge_best(parts, keep)
    }
}
