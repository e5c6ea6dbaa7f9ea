//! Deterministic, splittable randomness for trial execution.
//!
//! Each trial owns an independent stream derived from `(master_seed,
//! trial_index)` by a fixed 64-bit mix, so batches are reproducible
//! regardless of execution order or concurrency. The derivation is:
//!
//! ```text
//! key(seed, i) = mix64(seed ^ mix64(i ^ 0x9E3779B97F4A7C15))
//! ```
//!
//! where `mix64` is the SplitMix64 finalizer. The stream itself is
//! SplitMix64 started from `key`. This mapping is part of the on-disk /
//! cross-run contract and must stay stable.

const GOLDEN: u64 = 0x9E3779B97F4A7C15;

/// SplitMix64 finalizer (Vigna): strong 64-bit bit diffusion.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Identifies one trial's stream within a seeded batch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub trial_index: u64,
}

impl SeedSpec {
    pub fn new(master_seed: u64, trial_index: u64) -> Self {
        SeedSpec {
            master_seed,
            trial_index,
        }
    }

    pub fn stream(&self) -> TrialRng {
        TrialRng::for_trial(self.master_seed, self.trial_index)
    }
}

/// SplitMix64 stream. Non-cryptographic; adequate independence at the trial
/// counts used here.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialRng {
    state: u64,
}

impl TrialRng {
    /// Stream keyed directly by `seed`.
    pub fn new(seed: u64) -> Self {
        TrialRng { state: mix64(seed) }
    }

    /// Stream for trial `trial_index` of a batch keyed by `master_seed`.
    pub fn for_trial(master_seed: u64, trial_index: u64) -> Self {
        TrialRng {
            state: mix64(master_seed ^ mix64(trial_index ^ GOLDEN)),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix64(self.state)
    }

    /// Uniform draw in `[0, 1)` with 53 significant bits.
    pub fn next_f64(&mut self) -> f64 {
        const DEN: f64 = (1u64 << 53) as f64;
        ((self.next_u64() >> 11) as f64) / DEN
    }

    /// Uniform draw in `[-1, 1]`.
    pub fn next_symmetric(&mut self) -> f64 {
        2.0 * self.next_f64() - 1.0
    }
}
