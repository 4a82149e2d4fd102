//! One-dimensional ferromagnetic Ising chain under spin flip.
//!
//! Free boundary conditions throughout: the finite-volume pressure is
//! the exact 2x2 transfer-matrix product
//!
//! ```text
//! p_N(β, h) = (1/(Nβ)) log Σ_s exp(βJ Σ s_i s_{i+1} + βh Σ s_i),
//! ```
//!
//! and the thermodynamic limit has the closed form
//! `p = J + (1/β) log(cosh βh + sqrt(sinh² βh + e^{-4βJ}))`. Spin flip
//! maps `h` to `-h`, so the entropy production observable is
//! `σ = 2Nβh m_N` and the entropic pressure is a ratio of the two
//! closed-form expressions.

use crate::convex;
use crate::error::{Error, Result};
use crate::grid::GridFunction;

/// Volume cap for the transfer-matrix product.
pub const VOLUME_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, Copy)]
pub struct IsingParams {
    pub beta: f64,
    pub coupling: f64,
    pub field: f64,
    pub volume: u64,
}

impl IsingParams {
    pub fn new(beta: f64, coupling: f64, field: f64, volume: u64) -> Result<Self> {
        if !(beta > 0.0) || !(coupling > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "beta and J must be positive, got beta={beta}, J={coupling}"
            )));
        }
        if volume < 2 {
            return Err(Error::InvalidParameter(format!("volume must be >= 2, got {volume}")));
        }
        Ok(Self { beta, coupling, field, volume })
    }
}

/// Closed-form thermodynamic pressure
/// `p(β, h) = J + (1/β) log(cosh βh + sqrt(sinh² βh + e^{-4βJ}))`.
pub fn pressure_closed(beta: f64, coupling: f64, field: f64) -> f64 {
    let bh = beta * field;
    let root = (bh.sinh().powi(2) + (-4.0 * beta * coupling).exp()).sqrt();
    coupling + (bh.cosh() + root).ln() / beta
}

/// Exact finite-volume pressure with free boundary conditions, by a
/// log-domain 2x2 transfer-matrix product.
pub fn pressure_finite(params: IsingParams) -> Result<f64> {
    let IsingParams { beta, coupling, field, volume } = params;
    if volume > VOLUME_CAP {
        return Err(Error::VolumeCap(volume, VOLUME_CAP));
    }
    // T(s, s') = exp(beta (J s s' + h (s+s')/2)), boundary u(s) = exp(beta h s / 2)
    let t = |s: f64, sp: f64| (beta * (coupling * s * sp + field * (s + sp) / 2.0)).exp();
    let (tpp, tpm, tmp, tmm) = (t(1.0, 1.0), t(1.0, -1.0), t(-1.0, 1.0), t(-1.0, -1.0));
    let (up, um) = ((beta * field / 2.0).exp(), (-beta * field / 2.0).exp());

    let (mut a, mut b) = (up, um);
    let mut logscale = 0.0;
    for _ in 1..volume {
        let na = tpp * a + tpm * b;
        let nb = tmp * a + tmm * b;
        let shift = na.max(nb);
        a = na / shift;
        b = nb / shift;
        logscale += shift.ln();
    }
    let logz = logscale + (up * a + um * b).ln();
    Ok(logz / (volume as f64 * beta))
}

/// Finite-volume Rényi entropy `e_N(α) = Nβ(p_N(β, (1-2α)h) - p_N(β, h))`.
pub fn finite_volume_renyi(params: IsingParams, alpha: f64) -> Result<f64> {
    let tilted = IsingParams { field: (1.0 - 2.0 * alpha) * params.field, ..params };
    Ok(params.volume as f64 * params.beta * (pressure_finite(tilted)? - pressure_finite(params)?))
}

/// Entropic pressure `e(α) = β(p(β, (1-2α)h) - p(β, h))` in closed
/// form; real analytic in `α` and strictly convex for `h != 0`.
pub fn entropic_pressure(beta: f64, coupling: f64, field: f64, alpha: f64) -> f64 {
    let num = pressure_closed(beta, coupling, (1.0 - 2.0 * alpha) * field);
    let den = pressure_closed(beta, coupling, field);
    beta * (num - den)
}

/// Rate function on the requested s-grid, as the Legendre transform of
/// `α -> e(-α)`.
pub fn rate_function(
    beta: f64,
    coupling: f64,
    field: f64,
    s_lo: f64,
    s_hi: f64,
    s_n: usize,
) -> Result<GridFunction> {
    if field == 0.0 {
        return Err(Error::InvalidParameter("rate function needs h != 0".into()));
    }
    // slopes of e saturate at ±2βh; a wide alpha window covers any
    // s-grid inside the open slope interval
    let flipped = GridFunction::sample(-60.0, 60.0, 24_001, |x| {
        entropic_pressure(beta, coupling, field, -x)
    })?;
    convex::legendre(&flipped, s_lo, s_hi, s_n)
}

/// Magnetization `m(β, h) = ∂_h p(β, h)` by central secant.
pub fn magnetization(beta: f64, coupling: f64, field: f64) -> f64 {
    let d = 1e-6;
    (pressure_closed(beta, coupling, field + d) - pressure_closed(beta, coupling, field - d))
        / (2.0 * d)
}

/// Exact law of the magnetization by full spin enumeration:
/// `(m, prob)` pairs, volume capped at 24 spins.
pub fn magnetization_law(params: IsingParams) -> Result<Vec<(f64, f64)>> {
    let IsingParams { beta, coupling, field, volume } = params;
    if volume > 24 {
        return Err(Error::VolumeCap(volume, 24));
    }
    let n = volume as usize;
    let mut law = std::collections::BTreeMap::<i64, f64>::new();
    let mut z = 0.0;
    for bits in 0u64..(1 << n) {
        let spin = |i: usize| if bits >> i & 1 == 1 { 1.0 } else { -1.0 };
        let mut bond = 0.0;
        for i in 0..n - 1 {
            bond += spin(i) * spin(i + 1);
        }
        let total: f64 = (0..n).map(spin).sum();
        let w = (beta * (coupling * bond + field * total)).exp();
        z += w;
        *law.entry(total as i64).or_insert(0.0) += w;
    }
    Ok(law.into_iter().map(|(m, w)| (m as f64 / volume as f64, w / z)).collect())
}
