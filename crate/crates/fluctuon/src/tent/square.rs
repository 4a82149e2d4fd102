//! The square map `φ×φ` with the coordinate-swap involution.
//!
//! With potentials `v(x,y) = κ₁v₁(x) + κ₂v₂(y)` and `v̂ = v∘swap`, the
//! pressure is additive over the two coordinates and the entropic
//! pressure of the periodic orbit ensemble reduces to four
//! one-dimensional pressures:
//!
//! ```text
//! e(α) = 𝔭((1-α)κ₁v₁ + ακ₂v₂) + 𝔭((1-α)κ₂v₂ + ακ₁v₁) - 𝔭(κ₁v₁) - 𝔭(κ₂v₂),
//! ```
//!
//! each estimated by `max(w(0), w(2/3), p_t(w))` over the prime-period
//! orbit table. At critical couplings the branch switches of the `max`
//! produce kinks in `e`, and flat (unexposed) segments in the rate.

use rayon::prelude::*;

use crate::convex;
use crate::error::Result;
use crate::grid::GridFunction;
use crate::tent::{OrbitTable, TentPotential};

#[derive(Debug, Clone)]
pub struct SquareModel {
    pot1: TentPotential,
    pot2: TentPotential,
    kappa1: f64,
    kappa2: f64,
    period: u32,
    sums1: Vec<f64>,
    sums2: Vec<f64>,
}

impl SquareModel {
    pub fn new(
        pot1: TentPotential,
        pot2: TentPotential,
        kappa1: f64,
        kappa2: f64,
        period: u32,
    ) -> Result<Self> {
        let table = OrbitTable::primitive_orbits(period)?;
        let sums1 = table.potential_sums(&pot1);
        let sums2 = table.potential_sums(&pot2);
        Ok(Self { pot1, pot2, kappa1, kappa2, period, sums1, sums2 })
    }

    pub fn period(&self) -> u32 {
        self.period
    }

    /// Pressure estimate of the combination `c₁v₁ + c₂v₂`:
    /// `max(w(0), w(2/3), p_t(w))` with `w(0) = 0`.
    fn mixed_pressure(&self, c1: f64, c2: f64) -> f64 {
        let t = self.period as f64;
        let m = self
            .sums1
            .iter()
            .zip(&self.sums2)
            .map(|(&a, &b)| c1 * a + c2 * b)
            .fold(f64::NEG_INFINITY, f64::max);
        let total: f64 = self
            .sums1
            .iter()
            .zip(&self.sums2)
            .map(|(&a, &b)| (c1 * a + c2 * b - m).exp())
            .sum();
        let p_t = (m + total.ln() + t.ln()) / t;
        let at_two_thirds = c1 * self.pot1.at_two_thirds() + c2 * self.pot2.at_two_thirds();
        p_t.max(at_two_thirds).max(0.0)
    }

    /// Entropic pressure of the square map; `e(α) = e(1-α)` by
    /// construction and `e(0) = e(1) = 0` exactly.
    pub fn entropic_pressure(&self, alpha: f64) -> f64 {
        let (k1, k2) = (self.kappa1, self.kappa2);
        self.mixed_pressure((1.0 - alpha) * k1, alpha * k2)
            + self.mixed_pressure(alpha * k1, (1.0 - alpha) * k2)
            - self.mixed_pressure(k1, 0.0)
            - self.mixed_pressure(0.0, k2)
    }

    pub fn pressure_curve(&self, lo: f64, hi: f64, n: usize) -> Result<GridFunction> {
        let spacing = (hi - lo) / (n - 1) as f64;
        let values: Vec<f64> = (0..n)
            .into_par_iter()
            .map(|i| self.entropic_pressure(lo + i as f64 * spacing))
            .collect();
        GridFunction::new(lo, hi, values)
    }

    /// Rate function on the s-grid: Legendre transform of `α -> e(-α)`
    /// sampled on `[-alpha_span, 1 + alpha_span]`.
    pub fn rate(
        &self,
        alpha_span: f64,
        alpha_n: usize,
        s_lo: f64,
        s_hi: f64,
        s_n: usize,
    ) -> Result<GridFunction> {
        let e = self.pressure_curve(-alpha_span, 1.0 + alpha_span, alpha_n)?;
        let flipped_values: Vec<f64> = e.values().iter().rev().copied().collect();
        let flipped = GridFunction::new(-e.hi(), -e.lo(), flipped_values)?;
        convex::legendre(&flipped, s_lo, s_hi, s_n)
    }
}

/// Indices where consecutive secant slopes of `f` jump by more than
/// `threshold`; the detector for first-derivative discontinuities.
pub fn slope_jumps(f: &GridFunction, threshold: f64) -> Vec<(usize, f64)> {
    let h = f.spacing();
    let v = f.values();
    let mut jumps = Vec::new();
    for i in 1..v.len() - 1 {
        if v[i - 1].is_finite() && v[i].is_finite() && v[i + 1].is_finite() {
            let gap = ((v[i + 1] - v[i]) - (v[i] - v[i - 1])) / h;
            if gap.abs() > threshold {
                jumps.push((i, gap));
            }
        }
    }
    jumps
}
