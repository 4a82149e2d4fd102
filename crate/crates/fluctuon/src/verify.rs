//! The crate's verification suite: every headline identity and bound,
//! each checked at a pinned tolerance against an independent oracle
//! (exact enumeration, closed forms, dense scans, or bracketing
//! series). The CLI `verify` subcommand and the acceptance test target
//! both run exactly this code.
//!
//! Orbit-table checks default to period 19 so the suite stays fast on
//! one core; set `FLUCTUON_ACCEPT_FULL=1` (or pass `full = true`) for
//! the period-23 tables.

use crate::convex;
use crate::error::Result;
use crate::exponents;
use crate::grid::GridFunction;
use crate::ising::{self, IsingParams};
use crate::markov::{MarkovModel, MarkovPair};
use crate::meanfield;
use crate::rng::SplitMix64;
use crate::tent::{self, coding, square::SquareModel, zeta, OrbitTable, TentPotential};

/// Outcome of one verification criterion.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn pass(name: &'static str, detail: String) -> Self {
        Check { name, passed: true, detail }
    }

    fn fail(name: &'static str, detail: String) -> Self {
        Check { name, passed: false, detail }
    }

    fn from_bound(name: &'static str, worst: f64, tol: f64) -> Self {
        Check { name, passed: worst <= tol, detail: format!("worst {worst:.3e} vs tolerance {tol:.1e}") }
    }
}

/// Criterion names, in suite order.
pub const CRITERIA: [&str; 12] = [
    "jarzynski-random-chains",
    "transient-fluctuation-relation",
    "markov-ft-pipeline",
    "meanfield-phase-structure",
    "meanfield-rate-nonconvexity",
    "ising-1d",
    "tent-basics",
    "inducing-roundtrips",
    "zeta-bracketing",
    "prime-period-convergence",
    "square-map-ft",
    "hypothesis-testing",
];

/// Runs one criterion by name. `full` switches the orbit tables to
/// period 23; `seed` drives the randomized chain draws.
pub fn run_one(name: &str, full: bool, seed: u64) -> Option<Check> {
    let period = if full { 23 } else { 19 };
    Some(match name {
        "jarzynski-random-chains" => jarzynski_random_chains(seed),
        "transient-fluctuation-relation" => transient_fluctuation_relation(seed),
        "markov-ft-pipeline" => markov_ft_pipeline(),
        "meanfield-phase-structure" => meanfield_phase_structure(),
        "meanfield-rate-nonconvexity" => meanfield_rate_nonconvexity(),
        "ising-1d" => ising_chain(),
        "tent-basics" => tent_basics(period),
        "inducing-roundtrips" => inducing_roundtrips(seed),
        "zeta-bracketing" => zeta_bracketing(period),
        "prime-period-convergence" => prime_period_convergence(),
        "square-map-ft" => square_map_ft(period),
        "hypothesis-testing" => hypothesis_testing(),
        _ => return None,
    })
}

/// Runs the full suite in order.
pub fn run_all(full: bool, seed: u64) -> Vec<Check> {
    CRITERIA
        .iter()
        .filter_map(|name| run_one(name, full, seed))
        .collect()
}

fn random_chain(rng: &mut SplitMix64, n: usize) -> MarkovModel {
    loop {
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                let raw: Vec<f64> = (0..n).map(|_| 0.05 + rng.next_f64()).collect();
                let sum: f64 = raw.iter().sum();
                raw.iter().map(|v| v / sum).collect()
            })
            .collect();
        // rows sum to 1 only within float error; renormalize the last entry
        let rows: Vec<Vec<f64>> = rows
            .into_iter()
            .map(|mut row| {
                let head: f64 = row[..n - 1].iter().sum();
                row[n - 1] = 1.0 - head;
                row
            })
            .collect();
        if let Ok(m) = MarkovModel::from_transitions(&rows) {
            return m;
        }
    }
}

/// Criterion 1: Jarzynski identity by exact path enumeration on random
/// irreducible chains.
pub fn jarzynski_random_chains(seed: u64) -> Check {
    let name = "jarzynski-random-chains";
    let mut rng = SplitMix64::new(seed);
    let mut worst = 0.0f64;
    for k in 0..20 {
        let n = 2 + (k % 3);
        let m = random_chain(&mut rng, n);
        let pair = match MarkovPair::time_reversal(m) {
            Ok(p) => p,
            Err(e) => return Check::fail(name, format!("chain {k}: {e}")),
        };
        for t in [1usize, 4, 8] {
            match pair.sigma_law(t, None) {
                Ok(law) => worst = worst.max(law.jarzynski_defect().abs()),
                Err(e) => return Check::fail(name, format!("chain {k} t={t}: {e}")),
            }
        }
    }
    Check::from_bound(name, worst, 1e-12)
}

/// Criterion 2: transient fluctuation relation, atom-exact.
pub fn transient_fluctuation_relation(seed: u64) -> Check {
    let name = "transient-fluctuation-relation";
    let mut rng = SplitMix64::new(seed.wrapping_add(1));
    let mut worst = 0.0f64;
    for k in 0..20 {
        let n = 2 + (k % 3);
        let pair = MarkovPair::time_reversal(random_chain(&mut rng, n)).expect("full support");
        let swapped = pair.swap();
        for t in [2usize, 5, 8] {
            // hat-e_t(alpha) = e_t(1 - alpha)
            for j in 0..=10 {
                let alpha = -1.0 + 0.3 * j as f64;
                let gap = (swapped.renyi_entropy(t, alpha) - pair.renyi_entropy(t, 1.0 - alpha)).abs();
                worst = worst.max(gap);
            }
            // law of sigma under the reference is the reflected law
            let (law, law_hat) = pair.sigma_laws(t, None).expect("enumeration fits the cap");
            worst = worst.max(law_hat.distance(&law.reflected()));
        }
    }
    Check::from_bound(name, worst, 1e-12)
}

/// Criterion 3: spectral pressure against finite-time Rényi entropy and
/// the rate-function symmetry for the biased 3-cycle.
pub fn markov_ft_pipeline() -> Check {
    let name = "markov-ft-pipeline";
    let run = || -> Result<(f64, f64)> {
        let m = MarkovModel::from_transitions(&[
            vec![0.1, 0.7, 0.2],
            vec![0.2, 0.1, 0.7],
            vec![0.7, 0.2, 0.1],
        ])?;
        let pair = MarkovPair::time_reversal(m)?;
        let mut pressure_gap = 0.0f64;
        for j in 0..=30 {
            let alpha = -1.0 + 0.1 * j as f64;
            let gap = (pair.renyi_entropy(200, alpha) / 200.0 - pair.entropic_pressure(alpha)?).abs();
            pressure_gap = pressure_gap.max(gap);
        }
        let (rate, rate_hat) = pair.rate_functions((-3.0, 4.0, 2801), (-1.2, 1.2, 241))?;
        let residual = convex::check_fr_rates(&rate, &rate_hat)?;
        Ok((pressure_gap, residual))
    };
    match run() {
        Ok((gap, residual)) => Check {
            name,
            passed: gap <= 0.01 && residual <= 1e-6,
            detail: format!("finite-t gap {gap:.3e} (tol 1e-2), FR residual {residual:.3e} (tol 1e-6)"),
        },
        Err(e) => Check::fail(name, e.to_string()),
    }
}

/// Criterion 4: mean-field critical-set counts across the coexistence
/// curve and the pressure identity.
pub fn meanfield_phase_structure() -> Check {
    let name = "meanfield-phase-structure";
    let margin = 1e-4;
    let mut misclassified = 0usize;
    let mut probed = 0usize;
    for i in 0..250 {
        let beta = 1.02 + 1.98 * i as f64 / 249.0;
        let g = meanfield::coexistence_g(beta).expect("beta above critical");
        for (offset, want3) in [(-margin, true), (margin, false)] {
            for sign in [-1.0, 1.0] {
                let mu = -2.0 + sign * 2.0 * (g + offset);
                if g + offset <= 0.0 {
                    continue;
                }
                probed += 1;
                let count = meanfield::critical_set(beta, mu).len();
                if (count == 3) != want3 {
                    misclassified += 1;
                }
            }
        }
    }
    // subcritical side: always a singleton
    for i in 0..100 {
        let beta = 0.2 + 0.75 * i as f64 / 99.0;
        let mu = -3.0 + 2.0 * (i % 10) as f64 / 10.0;
        probed += 1;
        if meanfield::critical_set(beta, mu).len() != 1 {
            misclassified += 1;
        }
    }
    let mut identity_worst = 0.0f64;
    for k in 1..=100 {
        let nu = 0.03 * k as f64;
        let beta = if k % 2 == 0 { 1.8 } else { 0.7 };
        let gap = meanfield::pressure(beta, -2.0 + nu) - meanfield::pressure(beta, -2.0 - nu) - nu;
        identity_worst = identity_worst.max(gap.abs());
    }
    Check {
        name,
        passed: misclassified == 0 && identity_worst <= 1e-10 && probed >= 1000,
        detail: format!(
            "{misclassified}/{probed} misclassified; pressure identity worst {identity_worst:.3e} (tol 1e-10)"
        ),
    }
}

/// Criterion 5: concave window of the mean-field rate at
/// `(β, μ) = (1.8, -1.8)` and the exact fluctuation relation.
pub fn meanfield_rate_nonconvexity() -> Check {
    let name = "meanfield-rate-nonconvexity";
    let (beta, mu) = (1.8, -1.8);
    let edge = (mu + 2.0f64).abs() * (beta * (beta - 1.0f64)).sqrt();
    let h = 1e-4;
    let second = |s: f64| -> f64 {
        let f = |x: f64| meanfield::rate_function(beta, mu, x).expect("mu != -2");
        f(s - h) - 2.0 * f(s) + f(s + h)
    };
    let mut ok = true;
    let mut detail = String::new();
    // strictly concave inside, strictly convex outside, 5% band excluded
    for k in 0..=40 {
        let s = -0.95 * edge + 1.9 * edge * k as f64 / 40.0;
        if second(s) >= 0.0 {
            ok = false;
            detail = format!("not concave at s={s}");
        }
    }
    let outer_limit = beta * (mu + 2.0f64).abs() * 0.999; // rate is finite for |s| <= beta|mu+2|
    for k in 0..=20 {
        let s = 1.05 * edge + (outer_limit - 1.05 * edge - h) * k as f64 / 20.0;
        if second(s) <= 0.0 || second(-s) <= 0.0 {
            ok = false;
            detail = format!("not convex at |s|={s}");
        }
    }
    let mut fr_worst = 0.0f64;
    for k in 0..=100 {
        let s = -0.3 + 0.6 * k as f64 / 100.0;
        let a = meanfield::rate_function(beta, mu, -s).expect("finite window");
        let b = meanfield::rate_function(beta, mu, s).expect("finite window");
        fr_worst = fr_worst.max((a - b - s).abs());
    }
    if fr_worst > 1e-12 {
        ok = false;
        detail = format!("FR residual {fr_worst:.3e}");
    }
    if detail.is_empty() {
        detail = format!("window |s| < {edge:.4}; FR residual {fr_worst:.3e} (tol 1e-12)");
    }
    Check { name, passed: ok, detail }
}

/// Criterion 6: Ising chain closed form vs transfer matrix, finite-N
/// Jarzynski, and strict convexity of the entropic pressure.
pub fn ising_chain() -> Check {
    let name = "ising-1d";
    let run = || -> Result<(f64, f64, bool)> {
        let (beta, coupling, field) = (1.0, 1.0, 0.5);
        let closed = ising::pressure_closed(beta, coupling, field);
        let finite = ising::pressure_finite(IsingParams::new(beta, coupling, field, 100_000)?)?;
        let pressure_gap = (closed - finite).abs();

        let mut jarzynski = 0.0f64;
        for volume in [2u64, 10, 18] {
            let params = IsingParams::new(beta, coupling, field, volume)?;
            let mean: f64 = ising::magnetization_law(params)?
                .iter()
                .map(|&(m, p)| p * (-2.0 * volume as f64 * beta * field * m).exp())
                .sum();
            jarzynski = jarzynski.max((mean - 1.0).abs());
        }
        for volume in [100u64, 10_000] {
            let params = IsingParams::new(beta, coupling, field, volume)?;
            jarzynski = jarzynski.max(ising::finite_volume_renyi(params, 1.0)?.abs());
        }

        let e = GridFunction::sample(-2.0, 3.0, 501, |a| {
            ising::entropic_pressure(beta, coupling, field, a)
        })?;
        let strictly_convex = e.values().windows(3).all(|w| w[0] - 2.0 * w[1] + w[2] > 0.0);
        Ok((pressure_gap, jarzynski, strictly_convex))
    };
    match run() {
        Ok((gap, jarzynski, convex)) => Check {
            name,
            passed: gap <= 1e-4 && jarzynski <= 1e-12 && convex,
            detail: format!(
                "N=1e5 pressure gap {gap:.3e} (tol 1e-4); Jarzynski defect {jarzynski:.3e} (tol 1e-12); strictly convex: {convex}"
            ),
        },
        Err(e) => Check::fail(name, e.to_string()),
    }
}

/// Criterion 7: exact fixed-point counts and the zero-coupling pressure
/// approximant.
pub fn tent_basics(period: u32) -> Check {
    let name = "tent-basics";
    for t in 1..=20 {
        match tent::fixed_points(t) {
            Ok(points) => {
                if points.len() != 1 << t {
                    return Check::fail(name, format!("|Fix(phi^{t})| = {} != 2^{t}", points.len()));
                }
            }
            Err(e) => return Check::fail(name, format!("t={t}: {e}")),
        }
    }
    let x = tent::Rational { num: 2, den: 7 };
    if x.tent_iter(3) != x {
        return Check::fail(name, "2/7 is not 3-periodic".into());
    }
    let pot = TentPotential::new(0.7).expect("valid exponent");
    match tent::pressure_approx(&pot, 0.0, period) {
        Ok(p0) => {
            let gap = (p0 - 2f64.ln()).abs();
            Check {
                name,
                passed: gap < 0.04,
                detail: format!("|p_{period}(0) - log 2| = {gap:.3e} (tol 4e-2)"),
            }
        }
        Err(e) => Check::fail(name, e.to_string()),
    }
}

/// Criterion 8: inducing round-trips and the closed forms of the
/// periodic-code evaluation.
pub fn inducing_roundtrips(seed: u64) -> Check {
    let name = "inducing-roundtrips";
    let mut rng = SplitMix64::new(seed.wrapping_add(2));
    let mut worst_rt = 0.0f64;
    for _ in 0..1000 {
        let x = rng.next_f64();
        if x == 0.0 {
            continue;
        }
        let prefix = match coding::induce_itinerary(x, 40) {
            Ok(p) => p,
            Err(e) => return Check::fail(name, e.to_string()),
        };
        let code = coding::CodeWord::preperiodic(prefix, vec![1]).expect("admissible");
        let back = coding::induce_point(&code).expect("evaluable");
        worst_rt = worst_rt.max((back - x).abs());
    }
    if worst_rt > 2f64.powi(-38) {
        return Check::fail(name, format!("X(T(x)) round-trip off by {worst_rt:.3e}"));
    }
    let mut worst_fp = 0.0f64;
    for _ in 0..50 {
        let period = 1 + rng.next_below(5) as usize;
        let word: Vec<u32> = (0..period).map(|_| rng.next_below(6) as u32).collect();
        let closed = coding::induce_point(&coding::CodeWord::periodic(word.clone()).expect("admissible"))
            .expect("evaluable");
        let mut y = 0.5;
        for _ in 0..400 {
            for &t in word.iter().rev() {
                y = (2.0 - y) * 2f64.powi(-(t as i32) - 1);
            }
        }
        worst_fp = worst_fp.max((closed - y).abs());
    }
    Check {
        name,
        passed: worst_fp <= 1e-12,
        detail: format!(
            "round-trip worst {worst_rt:.3e} (tol 2^-38); closed form vs fixed-point iteration worst {worst_fp:.3e} (tol 1e-12)"
        ),
    }
}

/// Criterion 9: zeta-function brackets contain the orbit-table critical
/// coupling, and the pressure approximant sits inside the mu-brackets.
pub fn zeta_bracketing(period: u32) -> Check {
    let name = "zeta-bracketing";
    let slack = 0.02;
    let mut detail = String::new();
    for &p in &[0.2, 0.4, 0.6, 0.8] {
        let pot = TentPotential::new(p).expect("valid exponent");
        let (k_lo, k_hi) = match zeta::critical_brackets(p) {
            Ok(pair) => pair,
            Err(e) => return Check::fail(name, format!("p={p}: {e}")),
        };
        let table = OrbitTable::primitive_orbits(period).expect("period within cap");
        let sums = table.potential_sums(&pot);
        let kc = match tent::kappa_critical_from_sums(period, &sums, 4.0 * k_hi) {
            Ok(Some(k)) => k,
            Ok(None) => return Check::fail(name, format!("p={p}: no transition below {}", 4.0 * k_hi)),
            Err(e) => return Check::fail(name, format!("p={p}: {e}")),
        };
        if !(k_lo <= kc && kc <= k_hi) {
            return Check::fail(name, format!("p={p}: kc estimate {kc} outside [{k_lo}, {k_hi}]"));
        }
        for frac in [0.3, 0.6, 0.9] {
            let kappa = frac * k_lo;
            let (mu_lo, mu_hi) = match zeta::pressure_brackets(p, kappa) {
                Ok(pair) => pair,
                Err(e) => return Check::fail(name, format!("p={p} kappa={kappa}: {e}")),
            };
            let approx = tent::pressure_approx_from_sums(period, &sums, kappa).max(0.0);
            if approx < mu_lo - slack || approx > mu_hi + slack {
                return Check::fail(
                    name,
                    format!("p={p} kappa={kappa:.4}: p_{period} = {approx:.5} outside [{mu_lo:.5}, {mu_hi:.5}] + {slack}"),
                );
            }
        }
        detail = format!("{detail}p={p}: kc={kc:.4} in [{k_lo:.4}, {k_hi:.4}]; ");
    }
    Check::pass(name, detail)
}

/// Criterion 10: nearby prime-period approximants agree for small
/// coupling.
pub fn prime_period_convergence() -> Check {
    let name = "prime-period-convergence";
    let pot = TentPotential::new(0.7).expect("valid exponent");
    let t11 = OrbitTable::primitive_orbits(11).expect("small period");
    let t13 = OrbitTable::primitive_orbits(13).expect("small period");
    let sums11 = t11.potential_sums(&pot);
    let sums13 = t13.potential_sums(&pot);
    let mut worst = 0.0f64;
    for k in 0..=100 {
        let kappa = 0.5 * k as f64 / 100.0;
        let gap = (tent::pressure_approx_from_sums(11, &sums11, kappa)
            - tent::pressure_approx_from_sums(13, &sums13, kappa))
        .abs();
        worst = worst.max(gap);
    }
    Check::from_bound(name, worst, 5e-3)
}

/// Criterion 11: square-map fluctuation theorem at critical couplings:
/// symmetry, sign, slope jumps, the rate's flat segment, and the
/// rate-level FR.
pub fn square_map_ft(period: u32) -> Check {
    let name = "square-map-ft";
    let run = || -> Result<(f64, f64, f64, usize, f64)> {
        let pot1 = TentPotential::new(0.9)?;
        let pot2 = TentPotential::new(0.1)?;
        let table = OrbitTable::primitive_orbits(period)?;
        let k1 = tent::kappa_critical_from_sums(period, &table.potential_sums(&pot1), 50.0)?
            .expect("transition exists for p = 0.9");
        let k2 = tent::kappa_critical_from_sums(period, &table.potential_sums(&pot2), 50.0)?
            .expect("transition exists for p = 0.1");
        let model = SquareModel::new(pot1, pot2, k1, k2, period)?;

        let e = model.pressure_curve(-0.5, 1.5, 401)?;
        let mut symmetry = 0.0f64;
        let mut positive_inside = 0.0f64;
        for (a, v) in e.nodes() {
            let mirrored = model.entropic_pressure(1.0 - a);
            symmetry = symmetry.max((v - mirrored).abs());
            if (0.0..=1.0).contains(&a) {
                positive_inside = positive_inside.max(v);
            }
        }

        let jumps = tent::square::slope_jumps(&e, 0.02);
        let interior =
            jumps.iter().filter(|&&(i, _)| e.x(i) > -0.45 && e.x(i) < 1.45).count();

        // rate: flat at zero between the one-sided slopes of e at its
        // kink, and I(s) = max(0, -s) inside the segment pair
        let rate = model.rate(1.0, 801, -0.4, 0.4, 801)?;
        let i0 = e.node_at(0.0).expect("grid holds 0");
        let left_slope = (e.value(i0) - e.value(i0 - 1)) / e.spacing();
        let mut flat_gap = 0.0f64;
        for (s, v) in rate.nodes() {
            if s > 0.002 && s < -left_slope - 0.002 {
                flat_gap = flat_gap.max(v.abs());
            }
            if s < -0.002 && s > left_slope + 0.002 {
                flat_gap = flat_gap.max((v + s).abs());
            }
        }

        let n = rate.len();
        let mut fr = 0.0f64;
        for i in 0..n {
            let v = rate.value(i);
            let refl = rate.value(n - 1 - i);
            if v.is_finite() && refl.is_finite() {
                fr = fr.max((refl - v - rate.x(i)).abs());
            }
        }
        Ok((symmetry, positive_inside, fr, interior, flat_gap))
    };
    match run() {
        Ok((symmetry, positive, fr, jumps, flat_gap)) => Check {
            name,
            passed: symmetry <= 1e-10 && positive <= 1e-12 && fr <= 1e-4 && jumps >= 1 && flat_gap <= 2e-3,
            detail: format!(
                "symmetry {symmetry:.2e} (tol 1e-10); max e on [0,1] {positive:.2e}; FR residual {fr:.2e} (tol 1e-4); {jumps} interior slope jumps; flat-segment gap {flat_gap:.2e}"
            ),
        },
        Err(e) => Check::fail(name, e.to_string()),
    }
}

/// Criterion 12: hypothesis-testing exponents on exact laws.
pub fn hypothesis_testing() -> Check {
    let name = "hypothesis-testing";
    let run = || -> Result<(f64, f64, bool, f64)> {
        let m = MarkovModel::from_transitions(&[
            vec![0.1, 0.7, 0.2],
            vec![0.2, 0.1, 0.7],
            vec![0.7, 0.2, 0.1],
        ])?;
        let pair = MarkovPair::time_reversal(m)?;

        // optimal test equals the exhaustive monotone search exactly
        let mut test_gap = 0.0f64;
        for t in [2usize, 3, 5] {
            let law = pair.sigma_law(t, None)?;
            assert!(law.atoms().len() <= 12);
            let gap = (exponents::optimal_test(&law) - exponents::monotone_exhaustive(&law)).abs();
            test_gap = test_gap.max(gap);
        }

        let stein = exponents::stein_exponent(&pair, &[4, 8, 12], 0.95)?;
        let stein_gap = (stein.trend - stein.target).abs();
        let monotone = stein.estimates.windows(2).all(|w| w[1].1 > w[0].1);

        let e = pair.pressure_curve(-1.0, 2.0, 3001)?;
        let sd = convex::structure_data(&e)?;
        let u_grid: Vec<f64> = (0..=8)
            .map(|k| {
                let lo = 0.1 * sd.s_star;
                let hi = 0.9 * sd.s1_lower;
                lo + (hi - lo) * k as f64 / 8.0
            })
            .collect();
        let samples = exponents::hoeffding_curve(&pair, 12, &u_grid, &e)?;
        let hoeffding_gap = samples
            .iter()
            .map(|s| (s.empirical - s.target).abs())
            .fold(0.0, f64::max);
        Ok((test_gap, stein_gap, monotone, hoeffding_gap))
    };
    match run() {
        Ok((test_gap, stein_gap, monotone, hoeffding_gap)) => Check {
            name,
            passed: test_gap <= 1e-14 && stein_gap <= 0.05 && monotone && hoeffding_gap <= 0.08,
            detail: format!(
                "optimal-test gap {test_gap:.1e} (exact); Stein trend gap {stein_gap:.3} (tol 0.05), monotone: {monotone}; Hoeffding worst gap {hoeffding_gap:.3} (tol 0.08)"
            ),
        },
        Err(e) => Check::fail(name, e.to_string()),
    }
}
