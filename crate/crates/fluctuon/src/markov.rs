//! Finite-state stationary Markov chains and their time reversal.
//!
//! A chain `(p, P)` paired with a reference chain `(p̂, P̂)` carries the
//! entropy production observable
//!
//! ```text
//! σ_t(x) = log(p_{x1}/p̂_{x1}) + Σ_s log(P_{x_s x_{s+1}} / P̂_{x_s x_{s+1}}),
//! ```
//!
//! whose exact finite-time law (by full path enumeration) is the
//! brute-force oracle for everything else in this module: Rényi
//! entropies via the tilted matrix `Q(α)`, the entropic pressure as
//! `log` of the Perron root of `Q(α)`, and the level-3 relative-entropy
//! identity.

use crate::convex;
use crate::error::{Error, Result};
use crate::grid::GridFunction;

const ROW_SUM_TOL: f64 = 1e-12;
const STATIONARY_TOL: f64 = 1e-10;
const ATOM_MERGE_REL: f64 = 1e-12;

/// Default cap on the number of enumerated paths.
pub const ENUMERATION_CAP: f64 = 2e7;

/// An irreducible stationary Markov chain: row-stochastic `P` and its
/// stationary vector `p`, always recomputed from `P` rather than
/// trusted from input.
#[derive(Debug, Clone)]
pub struct MarkovModel {
    n: usize,
    trans: Vec<f64>, // row-major n x n
    stat: Vec<f64>,
}

impl MarkovModel {
    pub fn from_transitions(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n < 2 {
            return Err(Error::NotStochastic(format!("alphabet size {n} < 2")));
        }
        let mut trans = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::NotStochastic(format!("row {i} has {} entries, want {n}", row.len())));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::NotStochastic(format!("row {i} sums to {sum}")));
            }
            if row.iter().any(|&v| v < 0.0 || !v.is_finite()) {
                return Err(Error::NotStochastic(format!("row {i} has a negative or non-finite entry")));
            }
            trans.extend_from_slice(row);
        }
        if !is_irreducible(&trans, n) {
            return Err(Error::NotIrreducible);
        }
        let stat = stationary_of(&trans, n)?;
        Ok(Self { n, trans, stat })
    }

    /// Parses `{"P": [[...]], ...}`; any `labels` field is ignored by
    /// the numerics and the stationary vector is recomputed.
    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(serde::Deserialize)]
        struct Input {
            #[serde(rename = "P")]
            p: Vec<Vec<f64>>,
            #[allow(dead_code)]
            labels: Option<Vec<String>>,
        }
        let input: Input = serde_json::from_str(text)
            .map_err(|e| Error::InvalidParameter(format!("model json: {e}")))?;
        Self::from_transitions(&input.p)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn prob(&self, x: usize, y: usize) -> f64 {
        self.trans[x * self.n + y]
    }

    pub fn stationary(&self) -> &[f64] {
        &self.stat
    }

    /// Time-reversed chain `P̂_xy = p_y P_yx / p_x`, sharing the
    /// stationary vector. Requires `P_xy = 0 ⇔ P_yx = 0`.
    pub fn time_reverse(&self) -> Result<MarkovModel> {
        let n = self.n;
        for x in 0..n {
            for y in 0..n {
                if (self.prob(x, y) == 0.0) != (self.prob(y, x) == 0.0) {
                    return Err(Error::SupportAsymmetry(x, y));
                }
            }
        }
        let mut trans = vec![0.0; n * n];
        for x in 0..n {
            for y in 0..n {
                trans[x * n + y] = self.stat[y] * self.prob(y, x) / self.stat[x];
            }
        }
        Ok(MarkovModel { n, trans, stat: self.stat.clone() })
    }

    /// Detailed balance `p_x P_xy = p_y P_yx` within `tol`.
    pub fn is_detailed_balance(&self, tol: f64) -> bool {
        (0..self.n).all(|x| {
            (0..self.n)
                .all(|y| (self.stat[x] * self.prob(x, y) - self.stat[y] * self.prob(y, x)).abs() <= tol)
        })
    }
}

/// Solves `p = pP` for an irreducible row-stochastic matrix.
pub fn stationary(rows: &[Vec<f64>]) -> Result<Vec<f64>> {
    let model = MarkovModel::from_transitions(rows)?;
    Ok(model.stat)
}

fn is_irreducible(trans: &[f64], n: usize) -> bool {
    // boolean reachability closure to depth n
    let mut reach: Vec<bool> = trans.iter().map(|&v| v > 0.0).collect();
    for _ in 0..n {
        let prev = reach.clone();
        for x in 0..n {
            for z in 0..n {
                if prev[x * n + z] {
                    for y in 0..n {
                        if prev[z * n + y] {
                            reach[x * n + y] = true;
                        }
                    }
                }
            }
        }
    }
    (0..n).all(|x| (0..n).all(|y| reach[x * n + y]))
}

/// Left eigenvector for eigenvalue 1 via a dense solve of
/// `(P^T - I) q = 0` with the normalization `Σ q = 1` replacing the
/// last equation.
fn stationary_of(trans: &[f64], n: usize) -> Result<Vec<f64>> {
    let mut a = vec![0.0; n * n];
    let mut b = vec![0.0; n];
    for i in 0..n {
        for j in 0..n {
            a[i * n + j] = trans[j * n + i] - if i == j { 1.0 } else { 0.0 };
        }
    }
    for j in 0..n {
        a[(n - 1) * n + j] = 1.0;
    }
    b[n - 1] = 1.0;

    // Gaussian elimination with partial pivoting
    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if a[r * n + col].abs() > a[piv * n + col].abs() {
                piv = r;
            }
        }
        if a[piv * n + col].abs() < 1e-14 {
            return Err(Error::NotIrreducible);
        }
        if piv != col {
            for j in 0..n {
                a.swap(col * n + j, piv * n + j);
            }
            b.swap(col, piv);
        }
        for r in col + 1..n {
            let f = a[r * n + col] / a[col * n + col];
            if f == 0.0 {
                continue;
            }
            for j in col..n {
                a[r * n + j] -= f * a[col * n + j];
            }
            b[r] -= f * b[col];
        }
    }
    let mut q = vec![0.0; n];
    for i in (0..n).rev() {
        let mut acc = b[i];
        for j in i + 1..n {
            acc -= a[i * n + j] * q[j];
        }
        q[i] = acc / a[i * n + i];
    }

    let sum: f64 = q.iter().sum();
    for v in &mut q {
        *v /= sum;
    }
    if q.iter().any(|&v| v <= 0.0) {
        return Err(Error::NotIrreducible);
    }
    for y in 0..n {
        let py: f64 = (0..n).map(|x| q[x] * trans[x * n + y]).sum();
        if (py - q[y]).abs() > STATIONARY_TOL {
            return Err(Error::NotStochastic(format!(
                "stationary residual {:e} at state {y}",
                (py - q[y]).abs()
            )));
        }
    }
    Ok(q)
}

/// A chain together with its reference (time-reversed by default); the
/// `(ℙ_t, P̂_t)` generator.
#[derive(Debug, Clone)]
pub struct MarkovPair {
    fwd: MarkovModel,
    rev: MarkovModel,
    involution: bool,
}

impl MarkovPair {
    pub fn time_reversal(m: MarkovModel) -> Result<Self> {
        let rev = m.time_reverse()?;
        Ok(Self { fwd: m, rev, involution: true })
    }

    /// User-supplied `(P, P̂)` pair; the chains must share the support.
    /// Involution-specific symmetries are not assumed for such pairs.
    pub fn with_reference(fwd: MarkovModel, rev: MarkovModel) -> Result<Self> {
        if fwd.n != rev.n {
            return Err(Error::NotStochastic("pair size mismatch".into()));
        }
        for x in 0..fwd.n {
            for y in 0..fwd.n {
                if (fwd.prob(x, y) == 0.0) != (rev.prob(x, y) == 0.0) {
                    return Err(Error::SupportAsymmetry(x, y));
                }
            }
        }
        Ok(Self { fwd, rev, involution: false })
    }

    pub fn forward(&self) -> &MarkovModel {
        &self.fwd
    }

    pub fn reversed(&self) -> &MarkovModel {
        &self.rev
    }

    pub fn is_involution(&self) -> bool {
        self.involution
    }

    /// The swapped pair `(P̂, P)`, whose entropy production is `-σ`.
    pub fn swap(&self) -> Self {
        Self { fwd: self.rev.clone(), rev: self.fwd.clone(), involution: self.involution }
    }

    fn n(&self) -> usize {
        self.fwd.n
    }

    /// Exact law of `σ_t` under `ℙ_t` by full path enumeration. This is
    /// the module's brute-force oracle; `n^t` must stay below `cap`
    /// (default [`ENUMERATION_CAP`]).
    pub fn sigma_law(&self, t: usize, cap: Option<f64>) -> Result<PathLaw> {
        Ok(self.sigma_laws(t, cap)?.0)
    }

    /// Exact laws of the same observable `σ_t` under `ℙ_t` and under
    /// the reference `P̂_t`.
    pub fn sigma_laws(&self, t: usize, cap: Option<f64>) -> Result<(PathLaw, PathLaw)> {
        assert!(t >= 1, "need t >= 1");
        let cap = cap.unwrap_or(ENUMERATION_CAP);
        let n = self.n();
        let paths = (n as f64).powi(t as i32);
        if paths > cap {
            let max_t = (cap.ln() / (n as f64).ln()).floor() as usize;
            return Err(Error::EnumerationCap { paths, cap, max_t });
        }

        let logp: Vec<f64> = self.fwd.trans.iter().map(|&v| v.ln()).collect();
        let logph: Vec<f64> = self.rev.trans.iter().map(|&v| v.ln()).collect();
        let mut atoms: Vec<(f64, f64)> = Vec::new();
        let mut atoms_hat: Vec<(f64, f64)> = Vec::new();

        // depth-first walk in lexicographic order; sigma is the running
        // log-weight difference, so only the forward weight and sigma
        // are carried
        let mut state = vec![0usize; t];
        let mut logw = vec![0.0f64; t];
        let mut sig = vec![0.0f64; t];
        let mut depth = 0usize;
        'walk: loop {
            let x = state[depth];
            let mut dead = false;
            if depth == 0 {
                logw[0] = self.fwd.stat[x].ln();
                sig[0] = self.fwd.stat[x].ln() - self.rev.stat[x].ln();
            } else {
                let ix = state[depth - 1] * n + x;
                if self.fwd.trans[ix] == 0.0 {
                    dead = true; // zero-probability step, prune the subtree
                } else {
                    logw[depth] = logw[depth - 1] + logp[ix];
                    sig[depth] = sig[depth - 1] + logp[ix] - logph[ix];
                }
            }
            if !dead && depth + 1 < t {
                depth += 1;
                state[depth] = 0;
                continue;
            }
            if !dead {
                atoms.push((sig[depth], logw[depth].exp()));
                atoms_hat.push((sig[depth], (logw[depth] - sig[depth]).exp()));
            }
            // advance to the next path
            loop {
                if state[depth] + 1 < n {
                    state[depth] += 1;
                    break;
                }
                if depth == 0 {
                    break 'walk;
                }
                depth -= 1;
            }
        }
        Ok((PathLaw::from_atoms(atoms)?, PathLaw::from_atoms(atoms_hat)?))
    }

    /// Tilted row vector `q(α)_x = p_x^{1-α} p̂_x^α` and matrix
    /// `Q(α)_xy = P_xy^{1-α} P̂_xy^α` in log-domain.
    fn tilted_log(&self, alpha: f64) -> (Vec<f64>, Vec<f64>) {
        let n = self.n();
        let lq = (0..n)
            .map(|x| (1.0 - alpha) * self.fwd.stat[x].ln() + alpha * self.rev.stat[x].ln())
            .collect();
        let lmat = (0..n * n)
            .map(|i| {
                if self.fwd.trans[i] == 0.0 {
                    f64::NEG_INFINITY
                } else {
                    (1.0 - alpha) * self.fwd.trans[i].ln() + alpha * self.rev.trans[i].ln()
                }
            })
            .collect();
        (lq, lmat)
    }

    /// Finite-time Rényi entropy `e_t(α) = log(q(α) Q(α)^{t-1} 1)`,
    /// computed in log-domain.
    pub fn renyi_entropy(&self, t: usize, alpha: f64) -> f64 {
        assert!(t >= 1, "need t >= 1");
        let n = self.n();
        let (mut lv, lmat) = self.tilted_log(alpha);
        let mut next = vec![0.0f64; n];
        for _ in 1..t {
            for (y, slot) in next.iter_mut().enumerate() {
                let mut m = f64::NEG_INFINITY;
                for x in 0..n {
                    let c = lv[x] + lmat[x * n + y];
                    if c > m {
                        m = c;
                    }
                }
                *slot = if m == f64::NEG_INFINITY {
                    m
                } else {
                    m + (0..n).map(|x| (lv[x] + lmat[x * n + y] - m).exp()).sum::<f64>().ln()
                };
            }
            std::mem::swap(&mut lv, &mut next);
        }
        let m = lv.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        m + lv.iter().map(|v| (v - m).exp()).sum::<f64>().ln()
    }

    /// Entropic pressure `e(α) = log r(α)`, `r(α)` the Perron root of
    /// `Q(α)`, by power iteration with a Collatz–Wielandt enclosure at
    /// relative tolerance `1e-13`, starting from the uniform vector.
    pub fn entropic_pressure(&self, alpha: f64) -> Result<f64> {
        let n = self.n();
        let (_, lmat) = self.tilted_log(alpha);
        let q: Vec<f64> =
            lmat.iter().map(|&v| if v == f64::NEG_INFINITY { 0.0 } else { v.exp() }).collect();
        // shift by c*I: keeps the iteration convergent for periodic chains,
        // Perron root of Q + cI is r + c
        let c = q.iter().copied().fold(0.0, f64::max);
        let mut v = vec![1.0f64; n];
        let mut w = vec![0.0f64; n];
        let cap = 200_000;
        for _ in 0..cap {
            for (y, slot) in w.iter_mut().enumerate() {
                *slot = c * v[y] + (0..n).map(|x| v[x] * q[x * n + y]).sum::<f64>();
            }
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for y in 0..n {
                let ratio = w[y] / v[y];
                lo = lo.min(ratio);
                hi = hi.max(ratio);
            }
            if hi - lo <= 1e-13 * hi {
                return Ok((0.5 * (hi + lo) - c).ln());
            }
            for y in 0..n {
                v[y] = w[y] / hi;
            }
        }
        Err(Error::NoConvergence(cap))
    }

    /// Mean entropy production rate
    /// `(1/2) Σ p_x (P_xy - P̂_xy) log(P_xy/P̂_xy)`.
    pub fn mean_ep_rate(&self) -> f64 {
        let n = self.n();
        let mut acc = 0.0;
        for x in 0..n {
            for y in 0..n {
                let a = self.fwd.prob(x, y);
                let b = self.rev.prob(x, y);
                if a > 0.0 && b > 0.0 {
                    acc += 0.5 * self.fwd.stat[x] * (a - b) * (a / b).ln();
                }
            }
        }
        acc
    }

    /// Level-3 identity `Î(Q) = I(Q) + ς(Q)` for the Markov measure of
    /// an irreducible chain `R` supported inside the support of `P`.
    pub fn level3_fr_check(&self, r: &MarkovModel) -> Result<Level3Report> {
        let n = self.n();
        if r.n != n {
            return Err(Error::NotStochastic("R size mismatch".into()));
        }
        for x in 0..n {
            for y in 0..n {
                if r.prob(x, y) > 0.0 && self.fwd.prob(x, y) == 0.0 {
                    return Err(Error::SupportViolation(x, y));
                }
            }
        }
        let q = &r.stat;
        let mut rate = 0.0;
        let mut rate_hat = 0.0;
        let mut varsigma = 0.0;
        for (x, &qx) in q.iter().enumerate() {
            for y in 0..n {
                let rxy = r.prob(x, y);
                if rxy > 0.0 {
                    let w = qx * rxy;
                    rate += w * (rxy / self.fwd.prob(x, y)).ln();
                    rate_hat += w * (rxy / self.rev.prob(x, y)).ln();
                    varsigma += w * (self.fwd.prob(x, y) / self.rev.prob(x, y)).ln();
                }
            }
        }
        Ok(Level3Report { rate, rate_hat, varsigma, residual: (rate_hat - rate - varsigma).abs() })
    }

    /// `e(α)` sampled on a grid.
    pub fn pressure_curve(&self, lo: f64, hi: f64, n: usize) -> Result<GridFunction> {
        let mut failed = None;
        let g = GridFunction::sample(lo, hi, n, |a| match self.entropic_pressure(a) {
            Ok(v) => v,
            Err(e) => {
                failed = Some(e);
                0.0
            }
        })?;
        match failed {
            Some(e) => Err(e),
            None => Ok(g),
        }
    }

    /// Rate pair `(I, Î)` on the s-grid: `I` from the spectral pressure
    /// by the restricted Legendre transform, `Î` independently from the
    /// swapped pair's pressure `ê`, so that the symmetry
    /// `Î(s) = I(s) + s` is a genuine check rather than a construction.
    pub fn rate_functions(
        &self,
        alpha: (f64, f64, usize),
        s: (f64, f64, usize),
    ) -> Result<(GridFunction, GridFunction)> {
        let e = self.pressure_curve(alpha.0, alpha.1, alpha.2)?;
        let e_hat = self.swap().pressure_curve(alpha.0, alpha.1, alpha.2)?;
        let (rate, _, _) = convex::gartner_ellis_rate(&e, s.0, s.1, s.2)?;
        let (rate_hat_refl, _, _) = convex::gartner_ellis_rate(&e_hat, s.0, s.1, s.2)?;
        // ê has entropy production -σ, so its rate at s is Î(-s);
        // reflect onto the requested grid (grids here are symmetric).
        let m = s.2 - 1;
        let values = (0..s.2).map(|i| rate_hat_refl.value(m - i)).collect();
        let rate_hat = GridFunction::new(s.0, s.1, values)?;
        Ok((rate, rate_hat))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Level3Report {
    pub rate: f64,
    pub rate_hat: f64,
    pub varsigma: f64,
    pub residual: f64,
}

/// Exact finite-time law of `σ_t`: sorted `(value, probability)` atoms
/// with nearby values merged.
#[derive(Debug, Clone)]
pub struct PathLaw {
    atoms: Vec<(f64, f64)>,
}

impl PathLaw {
    pub fn from_atoms(mut atoms: Vec<(f64, f64)>) -> Result<Self> {
        atoms.retain(|&(_, p)| p > 0.0);
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
        for (v, p) in atoms {
            match merged.last_mut() {
                Some((u, q)) if (v - *u).abs() <= ATOM_MERGE_REL * v.abs().max(u.abs()).max(1.0) => {
                    *q += p;
                }
                _ => merged.push((v, p)),
            }
        }
        let total: f64 = merged.iter().map(|&(_, p)| p).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::NotStochastic(format!("law mass {total}")));
        }
        Ok(Self { atoms: merged })
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    /// `Σ p e^{-v} - 1`, the Jarzynski defect.
    pub fn jarzynski_defect(&self) -> f64 {
        let sum: f64 = self.atoms.iter().map(|&(v, p)| p * (-v).exp()).sum();
        sum - 1.0
    }

    /// `log Σ p e^{-α v}`, the finite-time Rényi entropy from the law.
    pub fn log_moment(&self, alpha: f64) -> f64 {
        let m = self.atoms.iter().map(|&(v, _)| -alpha * v).fold(f64::NEG_INFINITY, f64::max);
        m + self.atoms.iter().map(|&(v, p)| p * (-alpha * v - m).exp()).sum::<f64>().ln()
    }

    pub fn mean(&self) -> f64 {
        self.atoms.iter().map(|&(v, p)| v * p).sum()
    }

    /// `ℙ{σ <= threshold}`.
    pub fn prob_le(&self, threshold: f64) -> f64 {
        self.atoms.iter().take_while(|&&(v, _)| v <= threshold).map(|&(_, p)| p).sum()
    }

    /// `ℙ{σ < s}`.
    pub fn prob_lt(&self, s: f64) -> f64 {
        self.atoms.iter().filter(|&&(v, _)| v < s).map(|&(_, p)| p).sum()
    }

    /// `P̂{σ >= s} = Σ_{v >= s} p e^{-v}` via the transient relation
    /// `dP̂ = e^{-σ} dℙ` at the level of laws.
    pub fn phat_prob_ge(&self, s: f64) -> f64 {
        self.atoms.iter().filter(|&&(v, _)| v >= s).map(|&(v, p)| p * (-v).exp()).sum()
    }

    /// Law of `-σ`, atom by atom.
    pub fn reflected(&self) -> PathLaw {
        let mut atoms: Vec<(f64, f64)> = self.atoms.iter().map(|&(v, p)| (-v, p)).collect();
        atoms.reverse();
        PathLaw { atoms }
    }

    /// Atom-by-atom distance to `other`: max over matched atoms of the
    /// value and probability discrepancies; `+∞` if the counts differ.
    pub fn distance(&self, other: &PathLaw) -> f64 {
        if self.atoms.len() != other.atoms.len() {
            return f64::INFINITY;
        }
        self.atoms
            .iter()
            .zip(&other.atoms)
            .map(|(&(v, p), &(u, q))| (v - u).abs().max((p - q).abs()))
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_state(a: f64) -> MarkovModel {
        MarkovModel::from_transitions(&[vec![1.0 - a, a], vec![a, 1.0 - a]]).unwrap()
    }

    /// Biased 3-cycle: 0.7 forward, 0.2 back, 0.1 stay.
    fn biased_cycle() -> MarkovModel {
        MarkovModel::from_transitions(&[
            vec![0.1, 0.7, 0.2],
            vec![0.2, 0.1, 0.7],
            vec![0.7, 0.2, 0.1],
        ])
        .unwrap()
    }

    #[test]
    fn stationary_of_symmetric_chain_is_uniform() {
        let m = two_state(0.3);
        assert!((m.stationary()[0] - 0.5).abs() < 1e-14);
        let c = biased_cycle();
        for &v in c.stationary() {
            assert!((v - 1.0 / 3.0).abs() < 1e-14);
        }
    }

    #[test]
    fn stationary_solves_balance() {
        // p0 * 0.1 = p1 * 0.5  =>  p = (5/6, 1/6)
        let m = MarkovModel::from_transitions(&[vec![0.9, 0.1], vec![0.5, 0.5]]).unwrap();
        assert!((m.stationary()[0] - 5.0 / 6.0).abs() < 1e-14);
        assert!((m.stationary()[1] - 1.0 / 6.0).abs() < 1e-14);
    }

    #[test]
    fn reducible_matrix_is_rejected() {
        let r = MarkovModel::from_transitions(&[vec![1.0, 0.0], vec![0.0, 1.0]]);
        assert!(matches!(r, Err(Error::NotIrreducible)));
    }

    #[test]
    fn two_state_reversal_is_detailed_balance() {
        // any irreducible 2-state chain satisfies detailed balance
        let m = MarkovModel::from_transitions(&[vec![0.9, 0.1], vec![0.5, 0.5]]).unwrap();
        let rev = m.time_reverse().unwrap();
        for x in 0..2 {
            for y in 0..2 {
                assert!((rev.prob(x, y) - m.prob(x, y)).abs() < 1e-14);
            }
        }
        assert!(m.is_detailed_balance(1e-14));
    }

    #[test]
    fn cycle_reversal_is_transpose_for_uniform_stationary() {
        let m = biased_cycle();
        let rev = m.time_reverse().unwrap();
        for x in 0..3 {
            for y in 0..3 {
                assert!((rev.prob(x, y) - m.prob(y, x)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn reversal_is_involutive() {
        let m = MarkovModel::from_transitions(&[
            vec![0.5, 0.25, 0.25],
            vec![0.1, 0.6, 0.3],
            vec![0.3, 0.3, 0.4],
        ])
        .unwrap();
        let back = m.time_reverse().unwrap().time_reverse().unwrap();
        for x in 0..3 {
            for y in 0..3 {
                assert!((back.prob(x, y) - m.prob(x, y)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn support_asymmetry_is_rejected() {
        let m = MarkovModel::from_transitions(&[
            vec![0.5, 0.5, 0.0],
            vec![0.0, 0.5, 0.5],
            vec![0.5, 0.0, 0.5],
        ])
        .unwrap();
        assert!(matches!(m.time_reverse(), Err(Error::SupportAsymmetry(..))));
    }

    #[test]
    fn sigma_law_of_reversible_chain_is_dirac() {
        let pair = MarkovPair::time_reversal(two_state(0.3)).unwrap();
        for t in 1..=6 {
            let law = pair.sigma_law(t, None).unwrap();
            assert_eq!(law.atoms().len(), 1);
            assert!(law.atoms()[0].0.abs() < 1e-13);
            assert!((law.atoms()[0].1 - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn sigma_law_of_biased_cycle_t2() {
        // 9 paths; increments live on {0, ±log(0.7/0.2)}
        let pair = MarkovPair::time_reversal(biased_cycle()).unwrap();
        let law = pair.sigma_law(2, None).unwrap();
        let delta = (0.7f64 / 0.2).ln();
        assert_eq!(law.atoms().len(), 3);
        assert!((law.atoms()[0].0 + delta).abs() < 1e-13);
        assert!(law.atoms()[1].0.abs() < 1e-13);
        assert!((law.atoms()[2].0 - delta).abs() < 1e-13);
        // weights: forward 0.7, back 0.2, stay 0.1 from cyclic symmetry
        assert!((law.atoms()[2].1 - 0.7).abs() < 1e-13);
        assert!((law.atoms()[0].1 - 0.2).abs() < 1e-13);
        assert!((law.atoms()[1].1 - 0.1).abs() < 1e-13);
    }

    #[test]
    fn jarzynski_identity_holds() {
        let pair = MarkovPair::time_reversal(biased_cycle()).unwrap();
        for t in 1..=7 {
            let law = pair.sigma_law(t, None).unwrap();
            assert!(law.jarzynski_defect().abs() < 1e-12, "t={t}");
        }
    }

    #[test]
    fn markov_tail_bound() {
        let pair = MarkovPair::time_reversal(biased_cycle()).unwrap();
        let law = pair.sigma_law(6, None).unwrap();
        for &(v, _) in law.atoms() {
            // P{sigma <= -s} <= e^{-s} at every atom threshold
            assert!(law.prob_le(v) <= v.exp() + 1e-15);
        }
    }

    #[test]
    fn enumeration_cap_reports_max_t() {
        let pair = MarkovPair::time_reversal(biased_cycle()).unwrap();
        match pair.sigma_law(20, Some(1e4)) {
            Err(Error::EnumerationCap { max_t, .. }) => assert_eq!(max_t, 8),
            other => panic!("expected cap error, got {other:?}"),
        }
    }

    #[test]
    fn renyi_vanishes_at_zero_and_one() {
        let pair = MarkovPair::time_reversal(biased_cycle()).unwrap();
        for t in [1, 3, 8, 50] {
            assert!(pair.renyi_entropy(t, 0.0).abs() < 1e-12);
            assert!(pair.renyi_entropy(t, 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn renyi_matches_law_moments() {
        let pair = MarkovPair::time_reversal(biased_cycle()).unwrap();
        for t in [1, 2, 5, 8] {
            let law = pair.sigma_law(t, None).unwrap();
            for k in 0..21 {
                let alpha = -1.0 + 3.0 * k as f64 / 20.0;
                let a = pair.renyi_entropy(t, alpha);
                let b = law.log_moment(alpha);
                assert!((a - b).abs() < 1e-10, "t={t} alpha={alpha}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn renyi_convex_and_nonpositive_on_unit() {
        let pair = MarkovPair::time_reversal(biased_cycle()).unwrap();
        for t in [2, 5, 8] {
            let vals: Vec<f64> =
                (0..21).map(|k| pair.renyi_entropy(t, -1.0 + 3.0 * k as f64 / 20.0)).collect();
            for w in vals.windows(3) {
                assert!(w[0] - 2.0 * w[1] + w[2] > -1e-9);
            }
            for (k, v) in vals.iter().enumerate() {
                let alpha = -1.0 + 3.0 * k as f64 / 20.0;
                if (0.0..=1.0).contains(&alpha) {
                    assert!(*v <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn pressure_vanishes_at_zero_and_one() {
        let pair = MarkovPair::time_reversal(biased_cycle()).unwrap();
        assert!(pair.entropic_pressure(0.0).unwrap().abs() < 1e-12);
        assert!(pair.entropic_pressure(1.0).unwrap().abs() < 1e-12);
    }

    #[test]
    fn pressure_symmetric_under_reversal_pair() {
        let pair = MarkovPair::time_reversal(biased_cycle()).unwrap();
        for k in 0..13 {
            let alpha = -1.0 + 3.0 * k as f64 / 12.0;
            let e = pair.entropic_pressure(alpha).unwrap();
            let e_sym = pair.entropic_pressure(1.0 - alpha).unwrap();
            assert!((e - e_sym).abs() < 1e-12, "alpha={alpha}");
        }
    }

    #[test]
    fn pressure_is_renyi_limit() {
        // |e(α) - e_t(α)/t| <= C/t, checked by ratio halving over t = 50, 100, 200
        let pair = MarkovPair::time_reversal(biased_cycle()).unwrap();
        for &alpha in &[-0.5, 0.3, 0.5, 1.7] {
            let e = pair.entropic_pressure(alpha).unwrap();
            let gaps: Vec<f64> = [50, 100, 200]
                .iter()
                .map(|&t| (pair.renyi_entropy(t, alpha) / t as f64 - e).abs())
                .collect();
            assert!(gaps[1] < 0.6 * gaps[0] + 1e-12, "alpha={alpha}: {gaps:?}");
            assert!(gaps[2] < 0.6 * gaps[1] + 1e-12, "alpha={alpha}: {gaps:?}");
        }
    }

    #[test]
    fn mean_ep_rate_of_biased_cycle() {
        let pair = MarkovPair::time_reversal(biased_cycle()).unwrap();
        let expect = 0.5 * (3.5f64).ln();
        assert!((pair.mean_ep_rate() - expect).abs() < 1e-14);
    }

    #[test]
    fn mean_ep_rate_vanishes_iff_detailed_balance() {
        let pair = MarkovPair::time_reversal(two_state(0.2)).unwrap();
        assert!(pair.mean_ep_rate().abs() < 1e-15);
        let biased = MarkovPair::time_reversal(biased_cycle()).unwrap();
        assert!(biased.mean_ep_rate() > 0.1);
    }

    #[test]
    fn mean_ep_rate_is_ep_increment() {
        // ep_t - ep_{t-1} equals the rate exactly for stationary chains
        let pair = MarkovPair::time_reversal(biased_cycle()).unwrap();
        let rate = pair.mean_ep_rate();
        for t in 2..=6 {
            let inc =
                pair.sigma_law(t, None).unwrap().mean() - pair.sigma_law(t - 1, None).unwrap().mean();
            assert!((inc - rate).abs() < 1e-11, "t={t}");
        }
    }

    #[test]
    fn mean_ep_rate_is_minus_pressure_slope_at_zero() {
        let pair = MarkovPair::time_reversal(biased_cycle()).unwrap();
        let h = 1e-6;
        let secant = (pair.entropic_pressure(h).unwrap() - pair.entropic_pressure(0.0).unwrap()) / h;
        assert!((pair.mean_ep_rate() + secant).abs() < 1e-5);
    }

    #[test]
    fn level3_self_and_reversed() {
        let pair = MarkovPair::time_reversal(biased_cycle()).unwrap();
        let self_report = pair.level3_fr_check(pair.forward()).unwrap();
        assert!(self_report.rate.abs() < 1e-14);
        assert!((self_report.rate_hat - pair.mean_ep_rate()).abs() < 1e-12);
        assert!((self_report.varsigma - pair.mean_ep_rate()).abs() < 1e-12);
        assert!(self_report.residual < 1e-13);

        let rev_report = pair.level3_fr_check(pair.reversed()).unwrap();
        assert!(rev_report.rate_hat.abs() < 1e-14);
        assert!((rev_report.rate + rev_report.varsigma).abs() < 1e-13);
        assert!(rev_report.rate >= 0.0);
        assert!(rev_report.residual < 1e-13);
    }

    #[test]
    fn level3_random_chain() {
        let pair = MarkovPair::time_reversal(biased_cycle()).unwrap();
        let r = MarkovModel::from_transitions(&[
            vec![0.3, 0.45, 0.25],
            vec![0.15, 0.35, 0.5],
            vec![0.6, 0.15, 0.25],
        ])
        .unwrap();
        let report = pair.level3_fr_check(&r).unwrap();
        assert!(report.residual < 1e-13);
        assert!(report.rate > 0.0);
    }

    #[test]
    fn level3_rejects_support_violation() {
        let m = MarkovModel::from_transitions(&[
            vec![0.5, 0.5, 0.0],
            vec![0.25, 0.5, 0.25],
            vec![0.0, 0.5, 0.5],
        ])
        .unwrap();
        let pair = MarkovPair::time_reversal(m).unwrap();
        let r = biased_cycle(); // has mass on the missing corner entries
        assert!(matches!(pair.level3_fr_check(&r), Err(Error::SupportViolation(..))));
    }

    #[test]
    fn law_reflection_under_reference_measure() {
        // involution: the law of sigma under the reversed measure is the
        // reflection of its law under the forward one
        let pair = MarkovPair::time_reversal(biased_cycle()).unwrap();
        for t in [2, 4, 6] {
            let (law, law_hat) = pair.sigma_laws(t, None).unwrap();
            assert!(law_hat.distance(&law.reflected()) < 1e-12, "t={t}");
            // and the density relation dP = e^sigma dP_hat holds atom-wise
            for (&(v, p), &(u, q)) in law.atoms().iter().zip(law_hat.atoms()) {
                assert!((v - u).abs() < 1e-12);
                assert!((p - q * v.exp()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rate_functions_of_reversible_chain_vanish_at_zero() {
        let pair = MarkovPair::time_reversal(two_state(0.3)).unwrap();
        let (rate, _) = pair.rate_functions((-3.0, 4.0, 1401), (-1.0, 1.0, 201)).unwrap();
        let at0 = rate.value(rate.node_at(0.0).unwrap());
        assert!(at0.abs() < 1e-6);
    }

    #[test]
    fn rate_functions_fr_and_argmin() {
        let pair = MarkovPair::time_reversal(biased_cycle()).unwrap();
        let (rate, rate_hat) = pair.rate_functions((-3.0, 4.0, 2801), (-1.5, 1.5, 301)).unwrap();
        assert!(convex::check_fr_rates(&rate, &rate_hat).unwrap() < 1e-6);
        assert!(convex::is_convex(&rate, 1e-9));
        assert!(rate.min_finite() > -1e-12);
        // argmin within one grid cell of the mean ep rate
        let (mut best_s, mut best_v) = (f64::NAN, f64::INFINITY);
        for (s, v) in rate.nodes() {
            if v < best_v {
                best_v = v;
                best_s = s;
            }
        }
        assert!((best_s - pair.mean_ep_rate()).abs() <= rate.spacing() + 1e-12);
    }

    #[test]
    fn json_input_recomputes_stationary() {
        let m =
            MarkovModel::from_json(r#"{"P": [[0.9, 0.1], [0.5, 0.5]], "labels": ["a", "b"]}"#).unwrap();
        assert!((m.stationary()[0] - 5.0 / 6.0).abs() < 1e-14);
        assert!(MarkovModel::from_json(r#"{"P": [[1.0]]}"#).is_err());
    }
}
