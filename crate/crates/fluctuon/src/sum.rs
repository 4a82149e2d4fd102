//! Compensated accumulation (Kahan, with Neumaier's correction) for
//! long sums of near-cancelling terms.

#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    s: f64,
    c: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.s + x;
        if self.s.abs() >= x.abs() {
            self.c += (self.s - t) + x;
        } else {
            self.c += (x - t) + self.s;
        }
        self.s = t;
    }

    pub fn value(&self) -> f64 {
        self.s + self.c
    }
}

/// Compensated sum of an iterator.
pub fn kahan_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut acc = NeumaierSum::new();
    for v in values {
        acc.add(v);
    }
    acc.value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_cancellation() {
        // 1 + 2^-60 repeated, then -1: naive f64 loses the tail
        let mut acc = NeumaierSum::new();
        acc.add(1.0);
        for _ in 0..1000 {
            acc.add(2f64.powi(-60));
        }
        acc.add(-1.0);
        let expect = 1000.0 * 2f64.powi(-60);
        assert!((acc.value() - expect).abs() < 1e-25);
    }

    #[test]
    fn matches_naive_on_benign_input() {
        let xs: Vec<f64> = (1..=100).map(|k| 1.0 / k as f64).collect();
        let naive: f64 = xs.iter().sum();
        assert!((kahan_sum(xs) - naive).abs() < 1e-13);
    }
}
