//! Mean-field lattice gas under the particle-hole involution.
//!
//! The variational free energy per site is
//!
//! ```text
//! F(β, μ, r) = β r (2r + μ) - r log r - (1-r) log(1-r),
//! ```
//!
//! the thermodynamic pressure is `p(β, μ) = (1/β) sup_r F`, and the
//! entropy production observable is `σ = 2|λ|β(μ+2)(ρ - 1/2)`. The
//! model has `β_c = 1`: above it the critical set of `F` can hold three
//! points, the pressure develops a kink in `μ` at `μ = -2`, and the
//! rate function acquires a concave window.

use crate::error::{Error, Result};
use crate::sum::{kahan_sum, NeumaierSum};

/// Critical inverse temperature.
pub const BETA_C: f64 = 1.0;

/// Volume cap for exact finite-volume sums (log-binomial accuracy).
pub const VOLUME_CAP: u64 = 1_000_000;

/// Parameters of the gas; `volume` only matters for finite-volume ops.
#[derive(Debug, Clone, Copy)]
pub struct GasParams {
    pub beta: f64,
    pub mu: f64,
    pub volume: u64,
}

impl GasParams {
    pub fn new(beta: f64, mu: f64, volume: u64) -> Result<Self> {
        if !(beta > 0.0) {
            return Err(Error::InvalidParameter(format!("beta must be positive, got {beta}")));
        }
        if volume < 2 {
            return Err(Error::InvalidParameter(format!("volume must be >= 2, got {volume}")));
        }
        Ok(Self { beta, mu, volume })
    }
}

fn xlogx(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// Variational free energy `F(β, μ, r)`; endpoints use `0 log 0 = 0`.
pub fn free_energy(beta: f64, mu: f64, r: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&r));
    beta * r * (2.0 * r + mu) - xlogx(r) - xlogx(1.0 - r)
}

/// `∂_r F = β(4r + μ) - log(r/(1-r))`, defined on `]0, 1[`.
fn free_energy_slope(beta: f64, mu: f64, r: f64) -> f64 {
    beta * (4.0 * r + mu) - (r / (1.0 - r)).ln()
}

/// All roots of `∂_r F` in `]0, 1[`, ascending. The count is 1 or 3:
/// 3 exactly when `β > β_c` and `|1 + μ/2| < g(β)`.
pub fn critical_set(beta: f64, mu: f64) -> Vec<f64> {
    // sign-change scan on 4096 cells, then bisection; the slope goes
    // from +inf at 0 to -inf at 1
    const CELLS: usize = 4096;
    let mut roots = Vec::with_capacity(3);
    let mut prev_r = 0.0;
    let mut prev_sign = 1.0; // slope -> +inf as r -> 0+
    for i in 1..=CELLS {
        let r = i as f64 / CELLS as f64;
        let sign = if i == CELLS { -1.0 } else { free_energy_slope(beta, mu, r).signum() };
        if sign != prev_sign {
            let (mut lo, mut hi) = (prev_r, r);
            while hi - lo > 1e-14 {
                let mid = 0.5 * (lo + hi);
                if free_energy_slope(beta, mu, mid).signum() == prev_sign {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
            prev_sign = sign;
        }
        prev_r = r;
    }
    roots
}

/// Boundary of the three-phase region: for `β >= β_c` the critical set
/// has three points exactly when `|1 + μ/2| < g(β)`.
pub fn coexistence_g(beta: f64) -> Result<f64> {
    if beta < BETA_C {
        return Err(Error::InvalidParameter(format!("g(beta) needs beta >= {BETA_C}, got {beta}")));
    }
    let m = (1.0 / BETA_C - 1.0 / beta).sqrt();
    Ok(m - m.atanh() / beta)
}

/// Thermodynamic pressure `p(β, μ) = (1/β) sup_{r in [0,1]} F(β, μ, r)`.
pub fn pressure(beta: f64, mu: f64) -> f64 {
    let mut best = free_energy(beta, mu, 0.0).max(free_energy(beta, mu, 1.0));
    for r in critical_set(beta, mu) {
        best = best.max(free_energy(beta, mu, r));
    }
    best / beta
}

/// The maximizer `ϱ(β, μ)` of `F`: the largest critical point for
/// `μ > -2`, the smallest for `μ < -2`, and `1/2` by convention at
/// `μ = -2`.
pub fn rho(beta: f64, mu: f64) -> f64 {
    if mu == -2.0 {
        return 0.5;
    }
    let roots = critical_set(beta, mu);
    if mu > -2.0 {
        *roots.last().expect("critical set is never empty")
    } else {
        roots[0]
    }
}

/// `log C(volume, N)` for `N = 0..=volume`, from compensated prefix
/// sums of `log k`.
fn log_binomials(volume: u64) -> Vec<f64> {
    let v = volume as usize;
    let mut logfact = Vec::with_capacity(v + 1);
    let mut acc = NeumaierSum::new();
    logfact.push(0.0);
    for k in 1..=v {
        acc.add((k as f64).ln());
        logfact.push(acc.value());
    }
    (0..=v).map(|n| logfact[v] - logfact[n] - logfact[v - n]).collect()
}

/// Exact finite-volume pressure
/// `p_λ(β, μ) = (1/(|λ|β)) log Σ_N C(|λ|, N) e^{β(2N(N-1)/(|λ|-1) + μN)}`,
/// computed by log-sum-exp over the particle number.
pub fn pressure_finite(params: GasParams) -> Result<f64> {
    let GasParams { beta, mu, volume } = params;
    if volume > VOLUME_CAP {
        return Err(Error::VolumeCap(volume, VOLUME_CAP));
    }
    let logbin = log_binomials(volume);
    let vm1 = (volume - 1) as f64;
    let terms: Vec<f64> = (0..=volume)
        .map(|n| {
            let nf = n as f64;
            logbin[n as usize] + beta * (2.0 * nf * (nf - 1.0) / vm1 + mu * nf)
        })
        .collect();
    let m = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lse = m + kahan_sum(terms.iter().map(|&t| (t - m).exp())).ln();
    Ok(lse / (volume as f64 * beta))
}

/// Finite-volume Rényi entropy
/// `e_λ(α) = |λ|β(p_λ(β, (1-2α)(μ+2)-2) - p_λ(β, μ) + α(μ+2))`.
pub fn finite_volume_renyi(params: GasParams, alpha: f64) -> Result<f64> {
    let GasParams { beta, mu, volume } = params;
    let tilted = GasParams { beta, mu: (1.0 - 2.0 * alpha) * (mu + 2.0) - 2.0, volume };
    let p_tilt = pressure_finite(tilted)?;
    let p = pressure_finite(params)?;
    Ok(volume as f64 * beta * (p_tilt - p + alpha * (mu + 2.0)))
}

/// Entropic pressure
/// `e(α) = β(p(β, (1-2α)(μ+2)-2) - p(β, μ) + α(μ+2))`; symmetric under
/// `α -> 1-α`, kinked at `α = 1/2` iff `β > β_c` and `μ != -2`.
pub fn entropic_pressure(beta: f64, mu: f64, alpha: f64) -> f64 {
    beta * (pressure(beta, (1.0 - 2.0 * alpha) * (mu + 2.0) - 2.0) - pressure(beta, mu)
        + alpha * (mu + 2.0))
}

/// Explicit rate function `I(s) = β p(β, μ) - F(β, μ, r)` at
/// `r = (1 + s/(β(μ+2)))/2`; `+∞` when `r` leaves `[0, 1]`.
pub fn rate_function(beta: f64, mu: f64, s: f64) -> Result<f64> {
    if mu == -2.0 {
        return Err(Error::DegenerateDirection);
    }
    let r = 0.5 * (1.0 + s / (beta * (mu + 2.0)));
    if !(0.0..=1.0).contains(&r) {
        return Ok(f64::INFINITY);
    }
    Ok(beta * pressure(beta, mu) - free_energy(beta, mu, r))
}

/// Exact finite-volume law of the sample density: `(N/|λ|, prob)` pairs.
pub fn density_law(params: GasParams) -> Result<Vec<(f64, f64)>> {
    let GasParams { beta, mu, volume } = params;
    if volume > VOLUME_CAP {
        return Err(Error::VolumeCap(volume, VOLUME_CAP));
    }
    let logbin = log_binomials(volume);
    let vm1 = (volume - 1) as f64;
    let logw: Vec<f64> = (0..=volume)
        .map(|n| {
            let nf = n as f64;
            logbin[n as usize] + beta * (2.0 * nf * (nf - 1.0) / vm1 + mu * nf)
        })
        .collect();
    let m = logw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let z = kahan_sum(logw.iter().map(|&t| (t - m).exp()));
    Ok(logw
        .iter()
        .enumerate()
        .map(|(n, &t)| (n as f64 / volume as f64, (t - m).exp() / z))
        .collect())
}
