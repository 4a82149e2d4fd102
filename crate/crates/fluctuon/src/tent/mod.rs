//! Tent-map thermodynamics from periodic orbits.
//!
//! The tent map `φ(x) = 1 - |1 - 2x|` has `2^t` fixed points of `φ^t`,
//! all with odd denominators `2^t ± 1`, so its orbit structure is exact
//! in integer arithmetic. For prime `t` the non-fixed points split into
//! `(2^t - 2)/t` orbits of primitive period `t`, giving the rapidly
//! converging pressure approximants
//!
//! ```text
//! p_t(κ) = (1/t) log( t Σ_{o} e^{κ v(o)} ),   v(o) = Σ_{x in o} v(x),
//! ```
//!
//! with the full estimate `max(κ v(0), κ v(2/3), p_t(κ))`. The
//! potential family here is `v(x) = -(1 - log₂ x)^{-p}` with `v(0) = 0`
//! by continuity.

pub mod coding;
pub mod square;
pub mod zeta;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::sum::NeumaierSum;

/// Enumeration cap: `2^29` points is the largest orbit table that
/// still fits comfortably in memory.
pub const PERIOD_CAP: u32 = 29;

/// A point of `[0, 1]` with exact odd-denominator representation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rational {
    pub num: u64,
    pub den: u64,
}

impl Rational {
    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Exact tent-map step: `φ(n/d) = (d - |d - 2n|)/d`.
    pub fn tent_step(&self) -> Rational {
        let two_n = 2 * self.num;
        let diff = self.den.abs_diff(two_n);
        Rational { num: self.den - diff, den: self.den }
    }

    pub fn tent_iter(&self, t: u32) -> Rational {
        let mut x = *self;
        for _ in 0..t {
            x = x.tent_step();
        }
        x
    }
}

/// `φ(x) = 1 - |1 - 2x|`.
pub fn tent(x: f64) -> f64 {
    1.0 - (1.0 - 2.0 * x).abs()
}

/// `φ^t(x)`.
pub fn tent_iter(x: f64, t: u32) -> f64 {
    let mut y = x;
    for _ in 0..t {
        y = tent(y);
    }
    y
}

/// The `2^t` fixed points of `φ^t` in exact rationals:
/// `{2(j-1)/(2^t-1)} ∪ {2j/(2^t+1)}` for `j = 1..2^{t-1}`, each
/// verified under exact `t`-fold iteration.
pub fn fixed_points(t: u32) -> Result<Vec<Rational>> {
    if t == 0 || t > PERIOD_CAP {
        return Err(Error::PeriodCap(t, PERIOD_CAP));
    }
    let half = 1u64 << (t - 1);
    let dm = (1u64 << t) - 1;
    let dp = (1u64 << t) + 1;
    let mut points = Vec::with_capacity(1 << t);
    for j in 1..=half {
        points.push(Rational { num: 2 * (j - 1), den: dm });
    }
    for j in 1..=half {
        points.push(Rational { num: 2 * j, den: dp });
    }
    for pt in &points {
        let back = pt.tent_iter(t);
        if back != *pt {
            return Err(Error::InvalidParameter(format!(
                "fixed point formula failed at {}/{}",
                pt.num, pt.den
            )));
        }
    }
    Ok(points)
}

/// The potential `v(x) = -(1 - log₂ x)^{-p}`, `p in ]0, 1[`, with
/// `v(0) = 0` by continuity.
#[derive(Debug, Clone, Copy)]
pub struct TentPotential {
    exponent: f64,
}

impl TentPotential {
    pub fn new(exponent: f64) -> Result<Self> {
        if !(exponent > 0.0 && exponent < 1.0) {
            return Err(Error::InvalidParameter(format!("potential exponent must lie in ]0,1[, got {exponent}")));
        }
        Ok(Self { exponent })
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        -(1.0 - x.log2()).powf(-self.exponent)
    }

    /// `v(2/3)`, the second fixed-point contribution to the pressure.
    pub fn at_two_thirds(&self) -> f64 {
        self.eval(2.0 / 3.0)
    }
}

/// Periodic orbits of primitive period `t` (prime), one exact
/// representative each.
#[derive(Debug, Clone)]
pub struct OrbitTable {
    period: u32,
    reps: Vec<Rational>,
}

impl OrbitTable {
    /// Streams both denominator families, grouping fixed points of
    /// `φ^t` into orbits by exact iteration. For prime `t` every
    /// non-fixed orbit has length exactly `t`.
    pub fn primitive_orbits(t: u32) -> Result<Self> {
        if t > PERIOD_CAP {
            return Err(Error::PeriodCap(t, PERIOD_CAP));
        }
        if !is_prime(t) {
            return Err(Error::CompositePeriod(t));
        }
        let expected = ((1u64 << t) - 2) / t as u64;
        let mut reps = Vec::with_capacity(expected as usize);
        for family in [(1u64 << t) - 1, (1u64 << t) + 1] {
            // even numerators 2k/den, k = 0..2^{t-1}; a bitset over k
            // marks visited points
            let half = 1u64 << (t - 1);
            let mut seen = vec![0u64; (half as usize).div_ceil(64)];
            let offset = if family == (1u64 << t) - 1 { 0 } else { 2 };
            for k in 0..half {
                if seen[(k / 64) as usize] >> (k % 64) & 1 == 1 {
                    continue;
                }
                let start = Rational { num: 2 * k + offset, den: family };
                // skip the two fixed points of the map itself
                if start.tent_step() == start {
                    continue;
                }
                let mut x = start;
                let mut len = 0u32;
                loop {
                    debug_assert_eq!(x.num % 2, 0);
                    let idx = (x.num - offset) / 2;
                    seen[(idx / 64) as usize] |= 1 << (idx % 64);
                    x = x.tent_step();
                    len += 1;
                    if x == start {
                        break;
                    }
                }
                debug_assert_eq!(len, t, "prime period forces full-length orbits");
                reps.push(start);
            }
        }
        if reps.len() as u64 != expected {
            return Err(Error::InvalidParameter(format!(
                "orbit count {} does not match (2^t - 2)/t = {expected}",
                reps.len()
            )));
        }
        Ok(Self { period: t, reps })
    }

    pub fn period(&self) -> u32 {
        self.period
    }

    pub fn orbit_count(&self) -> usize {
        self.reps.len()
    }

    pub fn representatives(&self) -> &[Rational] {
        &self.reps
    }

    /// Per-orbit potential sums `v(o) = Σ_{x in o} v(x)`, compensated.
    pub fn potential_sums(&self, pot: &TentPotential) -> Vec<f64> {
        let t = self.period;
        self.reps
            .par_iter()
            .map(|&rep| {
                let mut acc = NeumaierSum::new();
                let mut x = rep;
                for _ in 0..t {
                    acc.add(pot.eval(x.value()));
                    x = x.tent_step();
                }
                acc.value()
            })
            .collect()
    }
}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// `p_t(κ) = (1/t) log(t Σ_o e^{κ v(o)})` from precomputed orbit sums.
pub fn pressure_approx_from_sums(period: u32, sums: &[f64], kappa: f64) -> f64 {
    let t = period as f64;
    (log_sum_exp_scaled(sums, kappa) + t.ln()) / t
}

fn log_sum_exp_scaled(sums: &[f64], kappa: f64) -> f64 {
    let m = sums.iter().map(|&s| kappa * s).fold(f64::NEG_INFINITY, f64::max);
    let total: f64 = sums.iter().map(|&s| (kappa * s - m).exp()).sum();
    m + total.ln()
}

/// Prime-period pressure approximant `p_t(κ)`.
pub fn pressure_approx(pot: &TentPotential, kappa: f64, t: u32) -> Result<f64> {
    let table = OrbitTable::primitive_orbits(t)?;
    let sums = table.potential_sums(pot);
    Ok(pressure_approx_from_sums(t, &sums, kappa))
}

/// Full pressure estimate `max(κ v(0), κ v(2/3), p_t(κ))`; `v(0) = 0`.
pub fn pressure_estimate(pot: &TentPotential, kappa: f64, t: u32) -> Result<f64> {
    let p_t = pressure_approx(pot, kappa, t)?;
    Ok((kappa * 0.0).max(kappa * pot.at_two_thirds()).max(p_t))
}

/// Smallest `κ` at which `p_t(κ)` crosses `κ v(0) = 0`, located by
/// bisection; `None` when no transition is detected below `kappa_max`.
pub fn kappa_critical_estimate(
    pot: &TentPotential,
    t: u32,
    kappa_max: f64,
) -> Result<Option<f64>> {
    let table = OrbitTable::primitive_orbits(t)?;
    let sums = table.potential_sums(pot);
    kappa_critical_from_sums(t, &sums, kappa_max)
}

/// Same bisection from precomputed sums.
pub fn kappa_critical_from_sums(t: u32, sums: &[f64], kappa_max: f64) -> Result<Option<f64>> {
    let p_at = |k: f64| pressure_approx_from_sums(t, sums, k);
    if p_at(kappa_max) > 0.0 {
        return Ok(None);
    }
    let (mut lo, mut hi) = (0.0, kappa_max);
    while hi - lo > 1e-12 * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if p_at(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}
