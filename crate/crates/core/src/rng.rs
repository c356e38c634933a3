//! Seed derivation and a minimal deterministic RNG.
//!
//! The evaluation protocol must be reproducible from a single master seed
//! in any implementation language, so the generator and every consumer
//! algorithm are pinned here rather than borrowed from a library whose
//! stream might change between versions:
//!
//! * [`derive_seed`] — splitmix64 finalizer over `master ^ (index+1)·φ64`
//! * [`SplitMix64`] — each `next_u64` is one splitmix64 step
//! * `next_below(n)` — `next_u64() % n`
//! * [`SplitMix64::shuffle`] — Fisher–Yates, descending, `j = next_below(i+1)`
//! * [`SplitMix64::sample_indices`] — partial Fisher–Yates prefix

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the sub-seed for stream `index` from a master seed.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    mix64(master ^ index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA))
}

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Uniform draw in `[0, n)`. Modulo bias is irrelevant here; the pinned
    /// stream is what matters.
    pub fn next_below(&mut self, n: usize) -> usize {
        assert!(n > 0, "next_below(0)");
        (self.next_u64() % n as u64) as usize
    }

    /// Uniform f64 in [0, 1) from the top 53 bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal draw (Box–Muller, one of the pair discarded).
    pub fn next_gaussian(&mut self) -> f64 {
        let u1 = (1.0 - self.next_f64()).max(f64::MIN_POSITIVE);
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.next_below(i + 1);
            items.swap(i, j);
        }
    }

    /// Draws `k` distinct values from `pool` without replacement
    /// (first `k` elements of a Fisher–Yates pass).
    pub fn sample_indices(&mut self, pool: &[usize], k: usize) -> Vec<usize> {
        assert!(k <= pool.len());
        let mut work = pool.to_vec();
        for i in 0..k {
            let j = i + self.next_below(work.len() - i);
            work.swap(i, j);
        }
        work.truncate(k);
        work
    }
}
