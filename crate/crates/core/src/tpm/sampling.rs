//! Seeded Monte Carlo draws of TPM trajectories.
//!
//! Generator: ChaCha8. Samples are produced in chunks of [`SAMPLING_CHUNK`];
//! chunk `k` uses `ChaCha8Rng::seed_from_u64(seed)` on stream `k`, so the
//! counts depend only on `(seed, count)` and not on how chunks are scheduled
//! across threads. Each sample consumes two 64-bit outputs: the first picks the
//! initial level from the cold Gibbs state, the second the thermalized level
//! from the hot Gibbs state.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::TrajectoryDistribution;
use crate::cycle::EngineParams;
use crate::error::{Error, Result};
use crate::spectrum::{Level, LEVEL_COUNT};

pub const SAMPLING_CHUNK: u64 = 1 << 16;

type Counts = [[u64; LEVEL_COUNT]; LEVEL_COUNT];

/// Uniform in `[0, 1)` from the top 53 bits.
fn unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Inverse-CDF draw. Rounding can leave the cumulative sum a hair below one;
/// such draws go to the last level with nonzero probability.
fn draw(cumulative: &[f64; LEVEL_COUNT], last_nonzero: usize, u: f64) -> usize {
    cumulative.iter().position(|&c| u < c).unwrap_or(last_nonzero)
}

struct LevelSampler {
    cumulative: [f64; LEVEL_COUNT],
    last_nonzero: usize,
}

impl LevelSampler {
    fn new(populations: &[f64; LEVEL_COUNT]) -> Self {
        let mut cumulative = [0.0; LEVEL_COUNT];
        let mut acc = 0.0;
        for (c, p) in cumulative.iter_mut().zip(populations) {
            acc += p;
            *c = acc;
        }
        let last_nonzero = populations.iter().rposition(|&p| p > 0.0).unwrap_or(LEVEL_COUNT - 1);
        LevelSampler {
            cumulative,
            last_nonzero,
        }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> usize {
        draw(&self.cumulative, self.last_nonzero, unit(rng))
    }
}

fn sample_chunk(cold: &LevelSampler, hot: &LevelSampler, seed: u64, chunk: u64, len: u64) -> Counts {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    let mut counts = [[0u64; LEVEL_COUNT]; LEVEL_COUNT];
    for _ in 0..len {
        let n = cold.sample(&mut rng);
        let l = hot.sample(&mut rng);
        counts[n][l] += 1;
    }
    counts
}

fn add_counts(mut a: Counts, b: Counts) -> Counts {
    for (ra, rb) in a.iter_mut().zip(b) {
        for (x, y) in ra.iter_mut().zip(rb) {
            *x += y;
        }
    }
    a
}

/// Observed trajectory counts from [`sample_trajectories`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalTrajectories {
    params: EngineParams,
    seed: u64,
    count: u64,
    counts: Counts,
}

impl EmpiricalTrajectories {
    pub fn params(&self) -> &EngineParams {
        &self.params
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    /// Counts indexed `[initial][thermalized]` in level order.
    pub fn counts(&self) -> &Counts {
        &self.counts
    }

    pub fn count_of(&self, initial: Level, thermalized: Level) -> u64 {
        self.counts[initial.index()][thermalized.index()]
    }

    /// Empirical frequencies as a sixteen-atom trajectory distribution.
    pub fn to_distribution(&self) -> TrajectoryDistribution {
        let n = self.count as f64;
        TrajectoryDistribution::from_table(self.params, self.counts.map(|row| row.map(|c| c as f64 / n)))
    }

    pub fn mean_work(&self) -> f64 {
        self.to_distribution().mean_work()
    }

    /// Pearson chi-squared statistic of the counts against `exact`.
    ///
    /// Cells with expected count below 5 are pooled into one bin; cells with
    /// zero probability are skipped.
    pub fn goodness_of_fit(&self, exact: &TrajectoryDistribution) -> GoodnessOfFit {
        let n = self.count as f64;
        let mut bins: Vec<(f64, f64)> = Vec::new();
        let (mut pooled_observed, mut pooled_expected) = (0.0, 0.0);
        let mut pooled_cells = 0;
        for atom in exact.atoms() {
            let expected = atom.prob * n;
            let observed = self.count_of(atom.initial, atom.thermalized) as f64;
            if atom.prob <= 0.0 {
                continue;
            }
            if expected < 5.0 {
                pooled_observed += observed;
                pooled_expected += expected;
                pooled_cells += 1;
            } else {
                bins.push((observed, expected));
            }
        }
        if pooled_expected > 0.0 {
            bins.push((pooled_observed, pooled_expected));
        }
        let statistic = bins.iter().map(|(o, e)| (o - e).powi(2) / e).sum();
        GoodnessOfFit {
            statistic,
            degrees_of_freedom: bins.len().saturating_sub(1),
            pooled_cells,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GoodnessOfFit {
    pub statistic: f64,
    pub degrees_of_freedom: usize,
    /// Cells merged into the low-expectation bin.
    pub pooled_cells: usize,
}

/// Draws `count` independent trajectories. Deterministic in `(seed, count)`.
pub fn sample_trajectories(p: &EngineParams, count: u64, seed: u64) -> Result<EmpiricalTrajectories> {
    if count == 0 {
        return Err(Error::invalid("count", "must be at least 1"));
    }
    let cold = LevelSampler::new(p.cold_point().populations());
    let hot = LevelSampler::new(p.hot_point().populations());
    let chunks = count.div_ceil(SAMPLING_CHUNK);
    let chunk_len = |k: u64| SAMPLING_CHUNK.min(count - k * SAMPLING_CHUNK);

    #[cfg(feature = "parallel")]
    let counts = {
        use rayon::prelude::*;
        (0..chunks)
            .into_par_iter()
            .map(|k| sample_chunk(&cold, &hot, seed, k, chunk_len(k)))
            .reduce(|| [[0; LEVEL_COUNT]; LEVEL_COUNT], add_counts)
    };
    #[cfg(not(feature = "parallel"))]
    let counts = (0..chunks)
        .map(|k| sample_chunk(&cold, &hot, seed, k, chunk_len(k)))
        .fold([[0; LEVEL_COUNT]; LEVEL_COUNT], add_counts);

    Ok(EmpiricalTrajectories {
        params: *p,
        seed,
        count,
        counts,
    })
}
