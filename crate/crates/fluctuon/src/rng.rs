//! Minimal deterministic RNG (splitmix64). Randomized checks must
//! produce byte-identical output for a given seed across platforms and
//! crate versions, which rules out external RNG crates.

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in {0, 1, ..., n-1}.
    pub fn next_below(&mut self, n: u64) -> u64 {
        // modulo bias is irrelevant at the sizes used here
        self.next_u64() % n
    }
}
