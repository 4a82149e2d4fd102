//! Rigorous brackets for the critical coupling and the pressure.
//!
//! The induced potential of `v(x) = -(1 - log₂ x)^{-p}` is enveloped on
//! each inducing block by partial sums of `Σ k^{-p}` (finite
//! Hurwitz-zeta differences; no analytic continuation is ever needed):
//!
//! ```text
//! v̲(t) = -Σ_{k=1}^{t+1} k^{-p},     v̄(t) = 1 - Σ_{k=1}^{t+2} k^{-p}.
//! ```
//!
//! The two series
//!
//! ```text
//! D∓(κ, μ) = Σ_{n≥0} e^{-μ(n+1) + κ v̲/v̄(n)} - 1
//! ```
//!
//! are strictly decreasing in `κ` and `μ`; their zeros bracket the
//! critical coupling, `κ_-(p) <= κ_c(p) <= κ_+(p)`, and for
//! `κ < κ_-(p)` the `μ`-zeros bracket the pressure,
//! `μ_-(p, κ) <= 𝔭(κv) <= μ_+(p, κ)`.

use crate::error::{Error, Result};
use crate::sum::NeumaierSum;

const TERM_CAP: usize = 2_000_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Envelope {
    Lower,
    Upper,
}

/// One envelope series `Σ_{n>=0} e^{-μ(n+1) + κ w(n)} - 1` with
/// `w = v̲` (Lower) or `w = v̄` (Upper). The optional `stop_above`
/// short-circuits sign queries: once the partial sum of the positive
/// terms exceeds it, the sign of `D` is settled.
fn envelope_series(
    env: Envelope,
    p: f64,
    kappa: f64,
    mu: f64,
    stop_above: Option<f64>,
) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameter(format!("exponent must lie in ]0,1[, got {p}")));
    }
    if kappa < 0.0 || (kappa == 0.0 && mu <= 0.0) {
        return Err(Error::SeriesDiverges(format!("needs kappa > 0 (or kappa = 0 with mu > 0), got kappa={kappa}, mu={mu}")));
    }
    let mut zeta_partial = NeumaierSum::new(); // Σ_{k=1}^{m} k^{-p}
    zeta_partial.add(1.0);
    if env == Envelope::Upper {
        zeta_partial.add(2f64.powf(-p));
    }
    let mut total = NeumaierSum::new();
    let offset = if env == Envelope::Upper { 1.0 } else { 0.0 };
    for n in 0..TERM_CAP {
        let nf = n as f64;
        let term = (-mu * (nf + 1.0) + kappa * (offset - zeta_partial.value())).exp();
        total.add(term);
        if let Some(limit) = stop_above {
            if total.value() > limit {
                return Ok(total.value() - 1.0);
            }
        }
        // next partial sum of k^{-p}
        let next_k = nf + if env == Envelope::Upper { 3.0 } else { 2.0 };
        zeta_partial.add(next_k.powf(-p));
        // geometric tail for mu > 0; plain decay cutoff at mu = 0
        if mu > 0.0 {
            let ratio = (-mu).exp();
            if term * ratio / (1.0 - ratio) < 1e-15 * total.value() {
                break;
            }
        } else if term < 1e-17 * total.value() {
            break;
        }
        if n + 1 == TERM_CAP {
            return Err(Error::SeriesDiverges(format!(
                "term cap reached at p={p}, kappa={kappa}, mu={mu}"
            )));
        }
    }
    Ok(total.value() - 1.0)
}

/// `(D_-(κ, 0), D_+(κ, 0))`: the two envelope series at `μ = 0`.
pub fn zeta_bounds(p: f64, kappa: f64) -> Result<(f64, f64)> {
    if kappa <= 0.0 {
        return Err(Error::SeriesDiverges("D(κ, 0) needs κ > 0".into()));
    }
    let lower = envelope_series(Envelope::Lower, p, kappa, 0.0, None)?;
    let upper = envelope_series(Envelope::Upper, p, kappa, 0.0, None)?;
    Ok((lower, upper))
}

/// `D_-(κ, μ)` and `D_+(κ, μ)` individually.
pub fn d_minus(p: f64, kappa: f64, mu: f64) -> Result<f64> {
    envelope_series(Envelope::Lower, p, kappa, mu, None)
}

pub fn d_plus(p: f64, kappa: f64, mu: f64) -> Result<f64> {
    envelope_series(Envelope::Upper, p, kappa, mu, None)
}

/// Sign of `D` with early exit once the partial sums pass 1.
fn d_is_positive(env: Envelope, p: f64, kappa: f64, mu: f64) -> Result<bool> {
    Ok(envelope_series(env, p, kappa, mu, Some(1.0))? > 0.0)
}

fn bisect_kappa(env: Envelope, p: f64) -> Result<f64> {
    // D(κ, 0) is strictly decreasing from +inf to -1; bracket the zero
    let mut hi = 1.0;
    while !d_is_positive(env, p, hi, 0.0)? {
        hi *= 0.5;
        if hi < 1e-8 {
            return Err(Error::SeriesDiverges(format!("no positive D at any kappa, p={p}")));
        }
    }
    let mut lo = hi;
    hi *= 2.0;
    while d_is_positive(env, p, hi, 0.0)? {
        lo = hi;
        hi *= 2.0;
        if hi > 1e8 {
            return Err(Error::SeriesDiverges(format!("D stays positive up to kappa={hi}, p={p}")));
        }
    }
    for _ in 0..200 {
        if hi - lo <= 1e-12 * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if d_is_positive(env, p, mid, 0.0)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `(κ_-(p), κ_+(p))`: zeros of the two envelope series at `μ = 0`;
/// they bracket the critical coupling.
pub fn critical_brackets(p: f64) -> Result<(f64, f64)> {
    Ok((bisect_kappa(Envelope::Lower, p)?, bisect_kappa(Envelope::Upper, p)?))
}

fn bisect_mu(env: Envelope, p: f64, kappa: f64) -> Result<f64> {
    if !d_is_positive(env, p, kappa, 0.0)? {
        return Err(Error::SeriesDiverges(format!(
            "D(κ, 0) <= 0 at κ={kappa}: pressure bracket needs κ below the critical zero"
        )));
    }
    let mut hi = 1.0;
    while d_is_positive(env, p, kappa, hi)? {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::SeriesDiverges("D stays positive in mu".into()));
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        if hi - lo <= 1e-13 * hi.max(1e-3) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if d_is_positive(env, p, kappa, mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `(μ_-(p, κ), μ_+(p, κ))`: pressure brackets, valid for κ below
/// `κ_-(p)`.
pub fn pressure_brackets(p: f64, kappa: f64) -> Result<(f64, f64)> {
    Ok((bisect_mu(Envelope::Lower, p, kappa)?, bisect_mu(Envelope::Upper, p, kappa)?))
}

/// `ζ(q, 2) = Σ_{n>=2} n^{-q}` for `q > 1`, by a head sum and an
/// Euler-Maclaurin tail; feeds the Hölder variation bound of the
/// induced potential.
pub fn hurwitz_zeta_two(q: f64) -> f64 {
    const HEAD: usize = 20_000;
    let mut head = NeumaierSum::new();
    for n in 2..HEAD {
        head.add((n as f64).powf(-q));
    }
    let n = HEAD as f64;
    // ∫_N^∞ x^-q dx + N^-q/2 + q N^{-q-1}/12 - q(q+1)(q+2) N^{-q-3}/720
    let tail = n.powf(1.0 - q) / (q - 1.0) + 0.5 * n.powf(-q) + q * n.powf(-q - 1.0) / 12.0
        - q * (q + 1.0) * (q + 2.0) * n.powf(-q - 3.0) / 720.0;
    head.value() + tail
}

/// Variation bound `Var_k(v#) <= (2p / log 2) ζ(p+1, 2) 2^{-k}`.
pub fn variation_bound(p: f64, k: u32) -> f64 {
    2.0 * p / std::f64::consts::LN_2 * hurwitz_zeta_two(p + 1.0) * 2f64.powi(-(k as i32))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hurwitz_zeta_values() {
        // zeta(2, 2) = pi^2/6 - 1
        let expect = std::f64::consts::PI.powi(2) / 6.0 - 1.0;
        assert!((hurwitz_zeta_two(2.0) - expect).abs() < 1e-12);
        // zeta(1.5) = 2.612375348685488...
        assert!((hurwitz_zeta_two(1.5) - (2.612375348685488 - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn series_decreasing_in_mu_with_minus_one_limit() {
        let p = 0.5;
        let kappa = 0.7;
        let mut prev = f64::INFINITY;
        for k in 0..=10 {
            let mu = k as f64 * 0.5;
            let dm = d_minus(p, kappa, mu).unwrap();
            let dp = d_plus(p, kappa, mu).unwrap();
            assert!(dm < prev);
            assert!(dm <= dp + 1e-12, "lower envelope exceeds upper at mu={mu}");
            prev = dm;
        }
        assert!((d_minus(p, kappa, 40.0).unwrap() + 1.0).abs() < 1e-9);
        assert!((d_plus(p, kappa, 40.0).unwrap() + 1.0).abs() < 1e-9);
    }

    #[test]
    fn kappa_brackets_ordered_and_are_zeros() {
        for k in 1..=9 {
            let p = k as f64 * 0.1;
            let (k_lo, k_hi) = critical_brackets(p).unwrap();
            assert!(k_lo <= k_hi, "p={p}: {k_lo} > {k_hi}");
            assert!(k_lo > 0.0);
            // the brackets really are the zeros of their series
            assert!(d_minus(p, k_lo * (1.0 - 1e-6), 0.0).unwrap() > 0.0, "p={p}");
            assert!(d_minus(p, k_lo * (1.0 + 1e-6), 0.0).unwrap() < 0.0, "p={p}");
            assert!(d_plus(p, k_hi * (1.0 - 1e-6), 0.0).unwrap() > 0.0, "p={p}");
            assert!(d_plus(p, k_hi * (1.0 + 1e-6), 0.0).unwrap() < 0.0, "p={p}");
        }
    }

    #[test]
    fn mu_brackets_ordered() {
        for &p in &[0.2, 0.5, 0.8] {
            let (k_lo, _) = critical_brackets(p).unwrap();
            let kappa = 0.8 * k_lo;
            let (mu_lo, mu_hi) = pressure_brackets(p, kappa).unwrap();
            assert!(0.0 < mu_lo && mu_lo <= mu_hi, "p={p}: [{mu_lo}, {mu_hi}]");
            // zeros of the respective series
            assert!(d_minus(p, kappa, mu_lo * (1.0 - 1e-6)).unwrap() > 0.0);
            assert!(d_minus(p, kappa, mu_lo * (1.0 + 1e-6)).unwrap() < 0.0);
            assert!(d_plus(p, kappa, mu_hi * (1.0 - 1e-6)).unwrap() > 0.0);
            assert!(d_plus(p, kappa, mu_hi * (1.0 + 1e-6)).unwrap() < 0.0);
        }
    }

    #[test]
    fn pressure_brackets_reject_supercritical_coupling() {
        let p = 0.5;
        let (_, k_hi) = critical_brackets(p).unwrap();
        assert!(pressure_brackets(p, 4.0 * k_hi).is_err());
    }

    #[test]
    fn invalid_parameters() {
        assert!(d_minus(1.5, 1.0, 0.1).is_err());
        assert!(zeta_bounds(0.5, 0.0).is_err());
        assert!(d_minus(0.5, -1.0, 1.0).is_err());
    }
}
