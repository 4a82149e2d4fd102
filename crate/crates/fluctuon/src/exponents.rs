//! Hypothesis testing between a path measure and its reference.
//!
//! Deciding whether a sample came from `ℙ_t` or `P̂_t` has optimal
//! total error `D = E_ℙ[min(1, e^{-σ_t})]`, attained by the test
//! `{σ_t >= 0}` (a Neyman–Pearson argument), and `D = 1 - |ℙ - P̂|_var`.
//! The asymptotics of one-sided errors are the Stein, Chernoff, and
//! Hoeffding exponents, all expressible through the entropic pressure
//! and its structure constants. Everything here is verified against
//! exhaustive searches over test sets on small path spaces.

use crate::convex;
use crate::error::Result;
use crate::grid::GridFunction;
use crate::markov::{MarkovPair, PathLaw};

/// Optimal total error `D(ℙ, P̂) = ℙ{σ < 0} + E_ℙ[e^{-σ} 1{σ >= 0}]`.
pub fn optimal_test(law: &PathLaw) -> f64 {
    law.atoms()
        .iter()
        .map(|&(v, p)| if v < 0.0 { p } else { p * (-v).exp() })
        .sum()
}

/// Total variation distance `|ℙ - P̂|_var = (1/2) Σ p |1 - e^{-σ}|`.
pub fn total_variation(law: &PathLaw) -> f64 {
    0.5 * law.atoms().iter().map(|&(v, p)| p * (1.0 - (-v).exp()).abs()).sum::<f64>()
}

/// `ℙ(Γ^c) + e^{st} P̂(Γ)` for the threshold test `Γ = {σ >= st}`; the
/// generalized Neyman–Pearson optimum over all tests.
pub fn np_threshold_value(law: &PathLaw, st: f64) -> f64 {
    law.prob_lt(st) + st.exp() * law.phat_prob_ge(st)
}

/// Exhaustive minimum of `ℙ(Γ^c) + e^{st} P̂(Γ)` over all `2^atoms`
/// unions of atoms; the brute-force oracle for the NP identity.
pub fn np_exhaustive(law: &PathLaw, st: f64) -> f64 {
    let atoms = law.atoms();
    assert!(atoms.len() <= 20, "exhaustive search needs <= 20 atoms");
    let scale = st.exp();
    let mut best = f64::INFINITY;
    for mask in 0u64..(1 << atoms.len()) {
        let mut value = 0.0;
        for (i, &(v, p)) in atoms.iter().enumerate() {
            if mask >> i & 1 == 1 {
                value += scale * p * (-v).exp(); // P̂(Γ) piece
            } else {
                value += p; // ℙ(Γ^c) piece
            }
        }
        if value < best {
            best = value;
        }
    }
    best
}

/// Exhaustive minimum of the total error over threshold (monotone)
/// tests: `Γ` ranges over upper sets `{σ >= v_k}` plus the empty set.
pub fn monotone_exhaustive(law: &PathLaw) -> f64 {
    let atoms = law.atoms();
    let mut best = 1.0; // empty test: P(Γ^c) = 1
    for k in 0..atoms.len() {
        let threshold = atoms[k].0;
        let value: f64 = atoms
            .iter()
            .map(|&(v, p)| if v >= threshold { p * (-v).exp() } else { p })
            .sum();
        if value < best {
            best = value;
        }
    }
    best
}

/// Least-squares slope of `y_t` against `t`.
fn lsq_slope(ts: &[f64], ys: &[f64]) -> f64 {
    let n = ts.len() as f64;
    let tm = ts.iter().sum::<f64>() / n;
    let ym = ys.iter().sum::<f64>() / n;
    ts.iter().zip(ys).map(|(t, y)| (t - tm) * (y - ym)).sum::<f64>()
        / ts.iter().map(|t| (t - tm) * (t - tm)).sum::<f64>()
}

/// Stein error exponent estimate for the threshold family
/// `Γ_t = {σ_t >= s t}` at a slope `s` slightly below the mean entropy
/// production rate.
///
/// Exponents are limits, so no single-`t` number is reported: the
/// estimate is the trend slope of `log P̂(Γ_t)` over the horizon list,
/// with the sharp large-deviation prefactor `t^{-1/2}` included in the
/// fit. The slope is snapped to the nearest σ-atom reachable at the
/// largest horizon, since threshold tests only change at atoms.
#[derive(Debug, Clone)]
pub struct SteinReport {
    /// The asymptotic exponent `-epr`.
    pub target: f64,
    /// Raw `(t, (1/t) log P̂(Γ_t))` pairs along the horizon list.
    pub estimates: Vec<(usize, f64)>,
    /// Trend estimate of the exponent over the horizon list.
    pub trend: f64,
}

pub fn stein_exponent(pair: &MarkovPair, t_list: &[usize], frac: f64) -> Result<SteinReport> {
    assert!(t_list.len() >= 2, "trend extrapolation needs at least two horizons");
    let epr = pair.mean_ep_rate();
    let want = frac * epr;
    let t_max = *t_list.iter().max().unwrap();
    let law_max = pair.sigma_law(t_max, None)?;
    // nearest reachable threshold slope not exceeding epr
    let mut anchor = f64::NEG_INFINITY;
    for &(v, _) in law_max.atoms() {
        let s = (v - 1e-9) / t_max as f64;
        if s <= epr && (s - want).abs() < (anchor - want).abs() {
            anchor = s;
        }
    }
    if !anchor.is_finite() {
        anchor = want;
    }
    let mut estimates = Vec::with_capacity(t_list.len());
    let mut logs = Vec::with_capacity(t_list.len());
    let mut ts = Vec::with_capacity(t_list.len());
    for &t in t_list {
        let law = pair.sigma_law(t, None)?;
        let log_tail = law.phat_prob_ge(anchor * t as f64).ln();
        estimates.push((t, log_tail / t as f64));
        logs.push(log_tail);
        ts.push(t as f64);
    }
    // the t^{-1/2} prefactor only applies to genuinely decaying tails
    let plain = lsq_slope(&ts, &logs);
    let trend = if plain < -1e-9 {
        let corrected: Vec<f64> =
            logs.iter().zip(&ts).map(|(l, t)| l + 0.5 * t.ln()).collect();
        lsq_slope(&ts, &corrected)
    } else {
        plain
    };
    Ok(SteinReport { target: -epr, estimates, trend })
}

/// Chernoff exponent estimates `(1/t) log(1 - |ℙ_t - P̂_t|_var)` with
/// the spectral targets `-I(0) = inf_{[0,1]} e(α)` (equal to `e(1/2)`
/// for involution pairs).
#[derive(Debug, Clone)]
pub struct ChernoffReport {
    pub target: f64,
    pub estimates: Vec<(usize, f64)>,
}

pub fn chernoff_exponent(pair: &MarkovPair, t_list: &[usize]) -> Result<ChernoffReport> {
    // inf over [0,1] of the spectral pressure
    let mut target = f64::INFINITY;
    for k in 0..=200 {
        let alpha = k as f64 / 200.0;
        target = target.min(pair.entropic_pressure(alpha)?);
    }
    let mut estimates = Vec::with_capacity(t_list.len());
    for &t in t_list {
        let law = pair.sigma_law(t, None)?;
        estimates.push((t, optimal_test(&law).ln() / t as f64));
    }
    Ok(ChernoffReport { target, estimates })
}

/// One Hoeffding sample: the best empirical type-II exponent among
/// threshold tests whose type-I exponent exceeds `u`, against the
/// target `-f(u)` from the entropic pressure. `raw` is the single-`t`
/// tail exponent (exactly non-decreasing and non-positive in `u`);
/// `empirical` is its trend extrapolation over the shorter horizons.
#[derive(Debug, Clone, Copy)]
pub struct HoeffdingSample {
    pub u: f64,
    pub raw: f64,
    pub empirical: f64,
    pub target: f64,
}

/// The type-I exponent of a threshold family `{σ_t >= s t}` is the
/// rate `I(s)`; a family is admissible at level `u` when `I(s) > u`.
/// The empirical type-II exponent of the best admissible family is the
/// trend slope of `log P̂{σ_t >= s* t}` over the horizons
/// `{t/2, 3t/4, t}`, with the threshold anchored at the largest
/// admissible atom slope reachable at horizon `t`. Finite-`t` gaps to
/// the limit `-f(u)` are reported, not asserted to vanish.
pub fn hoeffding_curve(
    pair: &MarkovPair,
    t: usize,
    u_grid: &[f64],
    pressure: &GridFunction,
) -> Result<Vec<HoeffdingSample>> {
    let epr = pair.mean_ep_rate();
    let rate = |s: f64| -> f64 {
        pressure.nodes().map(|(a, v)| -a * s - v).fold(f64::NEG_INFINITY, f64::max)
    };
    let mut horizons: Vec<usize> = vec![t / 2, 3 * t / 4, t];
    horizons.dedup();
    horizons.retain(|&h| h >= 2);
    let laws: Vec<PathLaw> =
        horizons.iter().map(|&h| pair.sigma_law(h, None)).collect::<Result<_>>()?;
    let law_max = laws.last().expect("at least one horizon");
    let ts: Vec<f64> = horizons.iter().map(|&h| h as f64).collect();

    let mut samples = Vec::with_capacity(u_grid.len());
    for &u in u_grid {
        if u < 0.0 {
            samples.push(HoeffdingSample {
                u,
                raw: f64::NEG_INFINITY,
                empirical: f64::NEG_INFINITY,
                target: f64::NEG_INFINITY,
            });
            continue;
        }
        // best admissible threshold slope among the reachable atoms
        let mut anchor = f64::NEG_INFINITY;
        for &(v, _) in law_max.atoms() {
            let s = (v - 1e-9) / t as f64;
            if s <= epr && rate(s) > u && s > anchor {
                anchor = s;
            }
        }
        let (raw, empirical) = if anchor.is_finite() {
            let logs: Vec<f64> = horizons
                .iter()
                .zip(&laws)
                .map(|(&h, law)| law.phat_prob_ge(anchor * h as f64).ln())
                .collect();
            (logs.last().unwrap() / t as f64, lsq_slope(&ts, &logs))
        } else {
            (f64::NEG_INFINITY, f64::NEG_INFINITY)
        };
        samples.push(HoeffdingSample { u, raw, empirical, target: -convex::hoeffding_f(pressure, u) });
    }
    Ok(samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markov::MarkovModel;

    fn biased_cycle_pair() -> MarkovPair {
        let m = MarkovModel::from_transitions(&[
            vec![0.1, 0.7, 0.2],
            vec![0.2, 0.1, 0.7],
            vec![0.7, 0.2, 0.1],
        ])
        .unwrap();
        MarkovPair::time_reversal(m).unwrap()
    }

    #[test]
    fn trivial_law_has_unit_error() {
        let law = PathLaw::from_atoms(vec![(0.0, 1.0)]).unwrap();
        assert_eq!(optimal_test(&law), 1.0);
        assert_eq!(total_variation(&law), 0.0);
    }

    #[test]
    fn optimal_error_and_tv_are_complementary() {
        let pair = biased_cycle_pair();
        for t in [1, 3, 5, 7] {
            let law = pair.sigma_law(t, None).unwrap();
            let d = optimal_test(&law);
            let tv = total_variation(&law);
            assert!((0.0..=1.0).contains(&d));
            assert!((d + tv - 1.0).abs() < 1e-14, "t={t}");
        }
    }

    #[test]
    fn optimal_test_beats_every_subset() {
        // exact equality with the exhaustive minimum over all 2^atoms
        // tests, laws up to 12 atoms
        let pair = biased_cycle_pair();
        for t in [2, 3] {
            let law = pair.sigma_law(t, None).unwrap();
            assert!(law.atoms().len() <= 12);
            let exhaustive = np_exhaustive(&law, 0.0);
            assert!((optimal_test(&law) - exhaustive).abs() < 1e-14, "t={t}");
            assert!((monotone_exhaustive(&law) - exhaustive).abs() < 1e-14, "t={t}");
        }
    }

    #[test]
    fn np_identity_on_threshold_grid() {
        // inf over all tests of P(Γ^c) + e^{st} P̂(Γ) equals the
        // {σ < st} split, for s on an 11-point grid
        let pair = biased_cycle_pair();
        let law = pair.sigma_law(3, None).unwrap();
        for k in 0..11 {
            let s = -1.0 + k as f64 * 0.2;
            let st = s * 3.0;
            let split = np_threshold_value(&law, st);
            let exhaustive = np_exhaustive(&law, st);
            assert!((split - exhaustive).abs() < 1e-12, "s={s}: {split} vs {exhaustive}");
        }
    }

    #[test]
    fn full_path_space_search_agrees() {
        // meta-check on a 2-state chain at t <= 4: tests over all
        // subsets of the path space itself, not only σ-measurable ones
        let m = MarkovModel::from_transitions(&[vec![0.8, 0.2], vec![0.4, 0.6]]).unwrap();
        let pair = MarkovPair::time_reversal(m).unwrap();
        for t in 2..=4usize {
            let n_paths = 1u64 << t; // 2^t path count for a full-support 2-state chain
            let mut paths = Vec::new();
            for mut idx in 0..n_paths {
                let mut path = Vec::with_capacity(t);
                for _ in 0..t {
                    path.push((idx % 2) as usize);
                    idx /= 2;
                }
                let mut logw = pair.forward().stationary()[path[0]].ln();
                let mut logw_hat = pair.reversed().stationary()[path[0]].ln();
                for w in path.windows(2) {
                    logw += pair.forward().prob(w[0], w[1]).ln();
                    logw_hat += pair.reversed().prob(w[0], w[1]).ln();
                }
                paths.push((logw.exp(), logw_hat.exp()));
            }
            let mut best = f64::INFINITY;
            for mask in 0u64..(1 << n_paths) {
                let mut value = 0.0;
                for (i, &(p, ph)) in paths.iter().enumerate() {
                    value += if mask >> i & 1 == 1 { ph } else { p };
                }
                best = best.min(value);
            }
            let law = pair.sigma_law(t, None).unwrap();
            assert!((optimal_test(&law) - best).abs() < 1e-13, "t={t}");
        }
    }

    #[test]
    fn stein_estimate_converges_to_minus_epr() {
        let pair = biased_cycle_pair();
        let report = stein_exponent(&pair, &[4, 8, 12], 0.95).unwrap();
        let epr = -report.target;
        assert!((epr - 0.5 * 3.5f64.ln()).abs() < 1e-12);
        // raw estimates increase toward the target with a 1/t trend
        for w in report.estimates.windows(2) {
            assert!(w[1].1 > w[0].1, "{:?}", report.estimates);
        }
        assert!((report.trend - report.target).abs() < 0.05, "trend {} target {}", report.trend, report.target);
        // the atom-wise bound P̂{σ >= st} <= e^{-st} caps every raw
        // estimate by the (snapped) threshold slope
        for &(_, est) in &report.estimates {
            assert!(est <= -0.9 * epr + 1e-12);
        }
    }

    #[test]
    fn reversible_chain_has_zero_exponents() {
        let m = MarkovModel::from_transitions(&[vec![0.7, 0.3], vec![0.3, 0.7]]).unwrap();
        let pair = MarkovPair::time_reversal(m).unwrap();
        let stein = stein_exponent(&pair, &[4, 8], 0.95).unwrap();
        assert!(stein.target.abs() < 1e-14);
        assert!(stein.estimates[0].1.abs() < 1e-12);
        assert!(stein.trend.abs() < 1e-12);
        let chernoff = chernoff_exponent(&pair, &[4]).unwrap();
        assert!(chernoff.target.abs() < 1e-12);
        assert!(chernoff.estimates[0].1.abs() < 1e-12);
    }

    #[test]
    fn chernoff_estimates_approach_spectral_target() {
        let pair = biased_cycle_pair();
        let report = chernoff_exponent(&pair, &[4, 8, 12]).unwrap();
        // involution pair: the target is e(1/2)
        let at_half = pair.entropic_pressure(0.5).unwrap();
        assert!((report.target - at_half).abs() < 1e-10);
        let mut gaps: Vec<f64> =
            report.estimates.iter().map(|&(_, est)| (est - report.target).abs()).collect();
        let last = gaps.pop().unwrap();
        assert!(gaps.iter().all(|&g| last < g), "gaps {gaps:?} then {last}");
        // sandwich: estimates relate to the target from above within a
        // vanishing correction; at t = 12 the gap is already small
        assert!(last < 0.1, "gap {last}");
    }

    #[test]
    fn hoeffding_curve_matches_structure() {
        let pair = biased_cycle_pair();
        let pressure = pair.pressure_curve(-1.0, 2.0, 601).unwrap();
        let s = convex::structure_data(&pressure).unwrap();
        let s_star = s.s_star;
        let s1 = s.s1_lower;

        let u_grid: Vec<f64> = (1..=9).map(|k| k as f64 * 0.1 * s1).collect();
        let samples = hoeffding_curve(&pair, 12, &u_grid, &pressure).unwrap();

        // non-decreasing, non-positive raw curve; trend meets the
        // finite-horizon tolerance against -f(u)
        for w in samples.windows(2) {
            assert!(w[1].raw >= w[0].raw - 1e-12);
        }
        for sample in &samples {
            assert!(sample.raw <= 1e-12);
            assert!((sample.empirical - sample.target).abs() < 0.08, "u={}: {} vs {}", sample.u, sample.empirical, sample.target);
        }

        // f(u) targets at the anchor points
        let at_star = -convex::hoeffding_f(&pressure, s_star);
        assert!((at_star + s_star).abs() < 2.0 * pressure.spacing());
        assert!(convex::hoeffding_f(&pressure, s1).abs() < 1e-12);

        // u < 0 is reported as the -inf sentinel
        let below = hoeffding_curve(&pair, 4, &[-0.1], &pressure).unwrap();
        assert_eq!(below[0].empirical, f64::NEG_INFINITY);
    }
}
