//! Parallel suite runner.

use rayon::prelude::*;
use stripex_core::bench::{assemble, cell_keys, prepare, run_cell, SuiteConfig, SuiteResult};
use stripex_core::dgp::build_dgp;

use crate::error::{CliError, Result};

pub const THREADS_ENV: &str = "STRIPE_BENCH_THREADS";

/// Thread cap from the environment; 0 or unset means automatic.
pub fn threads_from_env() -> Result<usize> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(0),
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::usage(format!("{THREADS_ENV} must be a non-negative integer, got {v:?}"))),
    }
}

/// Runs every cell on a pool of `threads` workers (0 = automatic). Results
/// are assembled in cell order, so the output does not depend on scheduling.
pub fn run_suite(cfg: &SuiteConfig, threads: usize) -> Result<SuiteResult> {
    cfg.validate()?;
    let dgp = build_dgp(&cfg.dgp)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::usage(format!("cannot start worker pool: {e}")))?;
    pool.install(|| {
        let slots: Vec<_> = cfg.backends.iter().flat_map(|&b| cfg.seeds.iter().map(move |&s| (b, s))).collect();
        let contexts = slots
            .par_iter()
            .map(|&(b, s)| prepare(cfg, &dgp, b, s))
            .collect::<stripex_core::Result<Vec<_>>>()?;
        let ns = cfg.seeds.len();
        let cells = cell_keys(cfg)
            .par_iter()
            .map(|&(b, e, s)| {
                let bi = cfg.backends.iter().position(|&x| x == b).expect("backend from config");
                run_cell(cfg, &dgp, &contexts[bi * ns + s], e)
            })
            .collect::<stripex_core::Result<Vec<_>>>()?;
        Ok(assemble(cfg, &dgp, cells)?)
    })
}
