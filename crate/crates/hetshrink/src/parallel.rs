//! Rayon-backed [`Runner`]. Chunks are evaluated in parallel and merged in
//! chunk order, so results match [`Sequential`](hetshrink_core::risk::Sequential) bit for bit.

use hetshrink_core::risk::{
    chunk_ranges, merge_in_order, run_chunk, Accumulator, Replicate, Runner,
};
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, Default)]
pub struct Parallel;

impl Runner for Parallel {
    fn run(&self, exp: &dyn Replicate, n_rep: usize, seed: u64) -> Accumulator {
        let chunks: Vec<Accumulator> = chunk_ranges(n_rep)
            .into_par_iter()
            .map(|range| run_chunk(exp, seed, range))
            .collect();
        merge_in_order(&chunks)
    }
}
