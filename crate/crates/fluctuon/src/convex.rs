//! Grid-based convex analysis.
//!
//! Legendre–Fenchel transforms, lower convex envelopes, one-sided
//! slopes of entropic pressures, and the Hoeffding function
//!
//! ```text
//! f(u) = sup_{a in (0,1]} (-(1-a)u - e(a)) / a
//! ```
//!
//! Everything operates on [`GridFunction`] samples. Suprema are taken
//! over grid nodes only, so the results carry an `O(h)` discretization
//! error (`O(h^2)` at points where the transform is smooth). Infinite
//! samples are skipped exactly. Ties in suprema resolve to the first
//! maximal node, which keeps outputs deterministic.

use crate::error::{Error, Result};
use crate::grid::GridFunction;

/// Structure constants of an entropic pressure `e` with `e(0) = e(1) = 0`:
/// the depth `s_* = -inf e` and the one-sided slopes of `e` at 0 and 1.
///
/// `∂e(0) = [-s0_upper, -s0_lower]` and `∂e(1) = [s1_lower, s1_upper]`;
/// upper slopes are `+∞` when `e` is `+∞` beyond the adjacent node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StructureData {
    pub s_star: f64,
    pub s0_lower: f64,
    pub s0_upper: f64,
    pub s1_lower: f64,
    pub s1_upper: f64,
}

/// Legendre–Fenchel transform `g(y) = sup_x (x y - f(x))`, the sup
/// running over the finite nodes of `f`, evaluated on the requested
/// output grid.
pub fn legendre(f: &GridFunction, out_lo: f64, out_hi: f64, out_n: usize) -> Result<GridFunction> {
    let pts: Vec<(f64, f64)> = f.nodes().filter(|(_, v)| v.is_finite()).collect();
    if pts.len() < 2 {
        return Err(Error::EmptyDomain);
    }
    GridFunction::sample(out_lo, out_hi, out_n, |y| {
        let mut best = f64::NEG_INFINITY;
        for &(x, v) in &pts {
            let cand = x * y - v;
            if cand > best {
                best = cand;
            }
        }
        best
    })
}

/// Lower convex envelope (largest convex minorant) on the same grid.
///
/// Nodes outside the effective domain stay `+∞`; interior `+∞` nodes
/// are bridged by the chord between their finite neighbours.
pub fn convex_hull(f: &GridFunction) -> Result<GridFunction> {
    let pts: Vec<(f64, f64)> = f.nodes().filter(|(_, v)| v.is_finite()).collect();
    if pts.len() < 2 {
        return Err(Error::EmptyDomain);
    }

    // Andrew's monotone chain, lower hull only. Points arrive sorted by x.
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(pts.len());
    for &p in &pts {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }

    let first = pts[0].0;
    let last = pts[pts.len() - 1].0;
    let mut seg = 0usize;
    let values = f
        .nodes()
        .map(|(x, _)| {
            if x < first || x > last {
                return f64::INFINITY;
            }
            while seg + 2 < hull.len() && hull[seg + 1].0 < x {
                seg += 1;
            }
            let (x0, y0) = hull[seg];
            let (x1, y1) = hull[(seg + 1).min(hull.len() - 1)];
            if x1 == x0 {
                y0
            } else {
                let t = (x - x0) / (x1 - x0);
                y0 + t * (y1 - y0)
            }
        })
        .collect();
    GridFunction::new(f.lo(), f.hi(), values)
}

/// Extracts `s_*` and the one-sided boundary slopes of `e` at 0 and 1.
///
/// Requires the grid to contain 0 and 1 as nodes and `e(0), e(1)` to
/// vanish within `1e-8`; looser values signal a bug in the model module
/// that produced `e`. Slopes use single-interval secants, matching the
/// subdifferential semantics of kinked pressures.
pub fn structure_data(e: &GridFunction) -> Result<StructureData> {
    let i0 = e.node_at(0.0).ok_or(Error::MissingNode(0.0))?;
    let i1 = e.node_at(1.0).ok_or(Error::MissingNode(1.0))?;
    let e0 = e.value(i0);
    let e1 = e.value(i1);
    if !e0.is_finite() || e0.abs() > 1e-8 {
        return Err(Error::BoundaryGate("e(0)", e0));
    }
    if !e1.is_finite() || e1.abs() > 1e-8 {
        return Err(Error::BoundaryGate("e(1)", e1));
    }
    let h = e.spacing();
    let n = e.len();

    // Right/left secant slopes; +-inf when the neighbouring node is +inf
    // or missing.
    let slope_right = |i: usize| -> f64 {
        if i + 1 >= n {
            return f64::INFINITY;
        }
        let v = e.value(i + 1);
        if v.is_finite() {
            (v - e.value(i)) / h
        } else {
            f64::INFINITY
        }
    };
    let slope_left = |i: usize| -> f64 {
        if i == 0 {
            return f64::NEG_INFINITY;
        }
        let v = e.value(i - 1);
        if v.is_finite() {
            (e.value(i) - v) / h
        } else {
            f64::NEG_INFINITY
        }
    };

    Ok(StructureData {
        s_star: -e.min_finite(),
        s0_lower: -slope_right(i0),
        s0_upper: -slope_left(i0),
        s1_lower: slope_left(i1),
        s1_upper: slope_right(i1),
    })
}

/// Hoeffding function `f(u) = sup_{a in (0,1]} (-(1-a)u - e(a)) / a`,
/// the sup over the grid restriction to `(0, 1]`; `+∞` for `u < 0`.
pub fn hoeffding_f(e: &GridFunction, u: f64) -> f64 {
    if u < 0.0 {
        return f64::INFINITY;
    }
    let h = e.spacing();
    let mut best = f64::NEG_INFINITY;
    for (a, v) in e.nodes() {
        if a <= 0.5 * h || a > 1.0 + 0.5 * h || !v.is_finite() {
            continue;
        }
        let cand = (-(1.0 - a) * u - v) / a;
        if cand > best {
            best = cand;
        }
    }
    best
}

/// Sup over shared finite nodes of `|I_hat(s) - I(s) - s|`, the
/// residual of the rate-function symmetry.
pub fn check_fr_rates(rate: &GridFunction, rate_hat: &GridFunction) -> Result<f64> {
    if !rate.same_grid(rate_hat) {
        return Err(Error::GridMismatch("rate functions must share a grid".into()));
    }
    Ok(rate
        .nodes()
        .zip(rate_hat.values())
        .filter(|((_, a), b)| a.is_finite() && b.is_finite())
        .map(|((s, a), b)| (b - a - s).abs())
        .fold(0.0, f64::max))
}

/// Rate functions of a differentiable entropic pressure, per the
/// Gärtner–Ellis construction:
///
/// ```text
/// I(-s)    = sup_{a in J_d} (a s - e(a)),      I_hat(s) = s + I(s),
/// J  = ] max(a-, -a+), min(-a-, a+) [,
/// ```
///
/// where `J_d` is the maximal grid interval around `[0, 1]` on which
/// `e` is finite, and `a-`/`a+` are the extreme secant slopes of `e`
/// over `J_d`. When `J_d` reaches the sampling boundary the true slope
/// range is unknown, so the rates are set to `+∞` beyond the observed
/// slopes; when `J_d` stops at an interior `+∞` node the linear
/// extension is the exact transform and is kept.
pub fn gartner_ellis_rate(
    e: &GridFunction,
    s_lo: f64,
    s_hi: f64,
    s_n: usize,
) -> Result<(GridFunction, GridFunction, (f64, f64))> {
    let i0 = e.node_at(0.0).ok_or(Error::MissingNode(0.0))?;
    let i1 = e.node_at(1.0).ok_or(Error::MissingNode(1.0))?;
    if (i0..=i1).any(|i| !e.value(i).is_finite()) || i0 == 0 || i1 + 1 == e.len() {
        return Err(Error::NotFiniteAroundUnit);
    }

    // Maximal finite run containing [0, 1].
    let mut left = i0;
    while left > 0 && e.value(left - 1).is_finite() {
        left -= 1;
    }
    let mut right = i1;
    while right + 1 < e.len() && e.value(right + 1).is_finite() {
        right += 1;
    }
    if (left..right).any(|i| !e.value(i).is_finite()) {
        return Err(Error::NotFiniteAroundUnit);
    }
    let open_left = left == 0;
    let open_right = right + 1 == e.len();

    let h = e.spacing();
    let a_minus = (e.value(left + 1) - e.value(left)) / h;
    let a_plus = (e.value(right) - e.value(right - 1)) / h;

    let nodes: Vec<(f64, f64)> = (left..=right).map(|i| (e.x(i), e.value(i))).collect();
    let transform = |s: f64| -> f64 {
        // sup_a (a s - e(a)); slope s is reachable only inside [a-, a+].
        if (s < a_minus - 1e-12 && open_left) || (s > a_plus + 1e-12 && open_right) {
            return f64::INFINITY;
        }
        let mut best = f64::NEG_INFINITY;
        for &(a, v) in &nodes {
            let cand = a * s - v;
            if cand > best {
                best = cand;
            }
        }
        best
    };

    let rate = GridFunction::sample(s_lo, s_hi, s_n, |s| transform(-s))?;
    let rate_hat = GridFunction::sample(s_lo, s_hi, s_n, |s| {
        let v = transform(-s);
        if v.is_finite() {
            s + v
        } else {
            v
        }
    })?;
    let local = (a_minus.max(-a_plus), (-a_minus).min(a_plus));
    Ok((rate, rate_hat, local))
}

/// Discrete convexity test: all second differences of the finite
/// samples are at least `-tol`.
pub fn is_convex(f: &GridFunction, tol: f64) -> bool {
    let v = f.values();
    for w in v.windows(3) {
        if w.iter().all(|x| x.is_finite()) && w[0] - 2.0 * w[1] + w[2] < -tol {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quadratic() -> GridFunction {
        GridFunction::sample(-5.0, 5.0, 2001, |x| 0.5 * x * x).unwrap()
    }

    #[test]
    fn legendre_of_quadratic_is_self_dual() {
        // g(y) = y^2/2 within 5e-3 sup-norm on [-3, 3]
        let g = legendre(&quadratic(), -3.0, 3.0, 601).unwrap();
        let err = g
            .nodes()
            .map(|(y, v)| (v - 0.5 * y * y).abs())
            .fold(0.0, f64::max);
        assert!(err < 5e-3, "sup error {err}");
        assert!(is_convex(&g, 1e-9));
    }

    #[test]
    fn legendre_of_zero_is_support_function() {
        let f = GridFunction::sample(-1.0, 1.0, 401, |_| 0.0).unwrap();
        let g = legendre(&f, -2.0, 2.0, 401).unwrap();
        for (y, v) in g.nodes() {
            assert!((v - y.abs()).abs() < 1e-12, "at {y}: {v}");
        }
    }

    #[test]
    fn legendre_rejects_thin_domain() {
        let mut vals = vec![f64::INFINITY; 11];
        vals[5] = 1.0;
        let f = GridFunction::new(0.0, 1.0, vals).unwrap();
        assert!(matches!(legendre(&f, 0.0, 1.0, 11), Err(Error::EmptyDomain)));
    }

    #[test]
    fn hull_of_convex_function_is_identity() {
        let f = quadratic();
        let hull = convex_hull(&f).unwrap();
        assert!(f.sup_distance(&hull).unwrap() < 1e-12);
    }

    #[test]
    fn hull_of_double_well_bridges_at_zero() {
        // w(x) = (x^2-1)^2 on [-2,2]: the envelope is 0 on [-1,1].
        let f = GridFunction::sample(-2.0, 2.0, 2001, |x| {
            let w = x * x - 1.0;
            w * w
        })
        .unwrap();
        let hull = convex_hull(&f).unwrap();
        for (x, v) in hull.nodes() {
            let fx = {
                let w = x * x - 1.0;
                w * w
            };
            assert!(v <= fx + 1e-12);
            if x.abs() <= 1.0 {
                assert!(v.abs() < 1e-9, "at {x}: {v}");
            } else {
                assert!((v - fx).abs() < 1e-9, "at {x}: {v}");
            }
        }
        assert!(is_convex(&hull, 1e-9));
    }

    #[test]
    fn biconjugation_equals_hull() {
        let f = GridFunction::sample(-2.0, 2.0, 801, |x| {
            let w = x * x - 1.0;
            w * w
        })
        .unwrap();
        // slopes of the double-well on [-2,2] stay within +-24
        let conj = legendre(&f, -30.0, 30.0, 4001).unwrap();
        let biconj = legendre(&conj, f.lo(), f.hi(), f.len()).unwrap();
        let hull = convex_hull(&f).unwrap();
        let lip = 24.0;
        let tol = 2.0 * f.spacing() * lip;
        assert!(biconj.sup_distance(&hull).unwrap() <= tol);
    }

    #[test]
    fn structure_data_of_zero_pressure() {
        let e = GridFunction::sample(-1.0, 2.0, 301, |_| 0.0).unwrap();
        let s = structure_data(&e).unwrap();
        assert_eq!(s.s_star, 0.0);
        assert_eq!(s.s0_lower, 0.0);
        assert_eq!(s.s1_lower, 0.0);
    }

    #[test]
    fn structure_data_gate_rejects_loose_boundary() {
        let e = GridFunction::sample(-1.0, 2.0, 301, |x| x * (x - 1.0) + 1e-6).unwrap();
        assert!(matches!(structure_data(&e), Err(Error::BoundaryGate(..))));
    }

    #[test]
    fn structure_data_swaps_under_reflection() {
        // e(a) = a(a-1)(a - 1/4) has different slopes at 0 and 1;
        // reflecting a -> 1-a must swap the (s0, s1) pairs.
        let e = GridFunction::sample(-1.0, 2.0, 601, |a| a * (a - 1.0) * (a - 0.25)).unwrap();
        let er = GridFunction::sample(-1.0, 2.0, 601, |a| {
            let b = 1.0 - a;
            b * (b - 1.0) * (b - 0.25)
        })
        .unwrap();
        let s = structure_data(&e).unwrap();
        let sr = structure_data(&er).unwrap();
        let tol = 1e-9;
        assert!((s.s0_lower - sr.s1_lower).abs() < tol);
        assert!((s.s1_lower - sr.s0_lower).abs() < tol);
        assert!((s.s0_upper - sr.s1_upper).abs() < tol);
        assert!((s.s1_upper - sr.s0_upper).abs() < tol);
        assert!((s.s_star - sr.s_star).abs() < tol);
    }

    #[test]
    fn hoeffding_f_fixed_point_and_tail() {
        // involutive parabola e(a) = a(a-1): s* = 1/4, s0_lower = s1_lower = 1 - h.
        let e = GridFunction::sample(-1.0, 2.0, 3001, |a| a * (a - 1.0)).unwrap();
        let s = structure_data(&e).unwrap();
        assert!((s.s_star - 0.25).abs() < 1e-12);

        // f(u) = s* at u = s*
        let f_at_star = hoeffding_f(&e, s.s_star);
        assert!((f_at_star - s.s_star).abs() < 2.0 * e.spacing(), "{f_at_star}");

        // f(u) = 0 for u >= s1_lower
        assert!(hoeffding_f(&e, s.s1_lower).abs() < 1e-12);
        assert!(hoeffding_f(&e, s.s1_lower + 0.5).abs() < 1e-12);

        // +inf left of zero, non-increasing and non-negative on u >= 0
        assert_eq!(hoeffding_f(&e, -1e-9), f64::INFINITY);
        let mut prev = f64::INFINITY;
        for k in 0..50 {
            let u = k as f64 * 0.02;
            let fu = hoeffding_f(&e, u);
            assert!(fu >= -1e-12);
            assert!(fu <= prev + 1e-12);
            prev = fu;
        }

        // involution: f(f(u)) = u on [0, s0_lower[
        for k in 1..9 {
            let u = k as f64 * 0.1 * s.s0_lower;
            let ffu = hoeffding_f(&e, hoeffding_f(&e, u));
            assert!((ffu - u).abs() < 5.0 * e.spacing(), "u={u} ffu={ffu}");
        }
    }

    #[test]
    fn check_fr_rates_constructed() {
        let rate = GridFunction::sample(-1.0, 1.0, 201, |s| (1.0 - s) * (1.0 - s) / 4.0).unwrap();
        let hat = GridFunction::sample(-1.0, 1.0, 201, |s| (1.0 - s) * (1.0 - s) / 4.0 + s).unwrap();
        assert!(check_fr_rates(&rate, &hat).unwrap() < 1e-15);
        let other = GridFunction::sample(-1.0, 1.0, 200, |s| s).unwrap();
        assert!(check_fr_rates(&rate, &other).is_err());
    }

    #[test]
    fn gartner_ellis_of_parabola() {
        // e(a) = a(a-1): I(s) = (1-s)^2/4, I(-s) = (1+s)^2/4, FR exact.
        let e = GridFunction::sample(-2.0, 3.0, 5001, |a| a * (a - 1.0)).unwrap();
        let (rate, rate_hat, local) = gartner_ellis_rate(&e, -2.0, 2.0, 401).unwrap();
        for (s, v) in rate.nodes() {
            let expect = (1.0 - s) * (1.0 - s) / 4.0;
            assert!((v - expect).abs() < 1e-3, "I({s}) = {v}, want {expect}");
        }
        assert!(check_fr_rates(&rate, &rate_hat).unwrap() < 1e-12);
        // slopes of e over [-2,3] are [2a-1] in [-5, 5]: J = ]-5, 5[
        assert!((local.0 + 5.0).abs() < 2e-3);
        assert!((local.1 - 5.0).abs() < 2e-3);
    }

    #[test]
    fn gartner_ellis_degenerate_pressure() {
        let e = GridFunction::sample(-1.0, 2.0, 301, |_| 0.0).unwrap();
        let (rate, _, _) = gartner_ellis_rate(&e, -1.0, 1.0, 201).unwrap();
        for (s, v) in rate.nodes() {
            if s == 0.0 {
                assert_eq!(v, 0.0);
            } else if s.abs() > 1e-9 {
                assert_eq!(v, f64::INFINITY, "I({s}) = {v}");
            }
        }
    }

    #[test]
    fn gartner_ellis_requires_finite_band() {
        let mut vals: Vec<f64> = (0..301)
            .map(|i| {
                let a = -1.0 + 3.0 * i as f64 / 300.0;
                a * (a - 1.0)
            })
            .collect();
        vals[150] = f64::INFINITY; // a = 0.5
        let e = GridFunction::new(-1.0, 2.0, vals).unwrap();
        assert!(gartner_ellis_rate(&e, -1.0, 1.0, 11).is_err());
    }
}
