//! Symbolic codings of the tent map.
//!
//! Two codings are used. The Gray coding `ℓ` semiconjugates the full
//! binary shift to the tent map, `φ∘ℓ = ℓ∘σ`. The inducing coding
//! accelerates `φ` through the intervals `I_t = ]2^{-t-1}, 2^{-t}]`:
//! the first-return map `ψ(x) = 2 - 2^{t+1} x` on `I_t` is conjugate,
//! via the itinerary map `T` and its inverse `X`, to the left shift on
//! a countable Markov shift. `X` has a closed form on periodic codes,
//!
//! ```text
//! X(overline{t_0..t_{s-1}}) = Σ_r 2^{-(t_0+..+t_r)}(-2)^{-r}
//!                             / (1 - 2^{-(t_0+..+t_{s-1})}(-2)^{-s}),
//! ```
//!
//! and the prefix rule `X(u·w) = 2^{-u}(1 - X(w)/2)`.

use crate::error::{Error, Result};
use crate::sum::NeumaierSum;
use crate::tent::{tent, TentPotential};

/// Gray-decode a binary word prefix to a point of `[0, 1]`:
/// `b_0 = s_0`, `b_k = s_k ⊕ b_{k-1}`, `x = Σ b_k 2^{-k-1}`.
pub fn gray_decode(symbols: &[u8]) -> f64 {
    let mut acc = 0.0;
    let mut b = 0u8;
    let mut scale = 0.5;
    for (k, &s) in symbols.iter().enumerate() {
        b = if k == 0 { s & 1 } else { (s & 1) ^ b };
        if b == 1 {
            acc += scale;
        }
        scale *= 0.5;
    }
    acc
}

/// Gray-encode: `s_k = 1 iff φ^k(x) > 1/2`. Errors on preimages of the
/// critical point, where the symbol is undefined.
pub fn gray_encode(x: f64, len: usize) -> Result<Vec<u8>> {
    let mut symbols = Vec::with_capacity(len);
    let mut y = x;
    for _ in 0..len {
        if y == 0.5 {
            return Err(Error::CriticalPreimage);
        }
        symbols.push(u8::from(y > 0.5));
        y = tent(y);
    }
    Ok(symbols)
}

/// An eventually periodic inducing code. An empty cycle stands for the
/// tail `∞∞∞…`, i.e. an orbit that lands on `0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeWord {
    prefix: Vec<u32>,
    cycle: Vec<u32>,
}

impl CodeWord {
    pub fn periodic(cycle: Vec<u32>) -> Result<Self> {
        Self::new(Vec::new(), cycle)
    }

    pub fn preperiodic(prefix: Vec<u32>, cycle: Vec<u32>) -> Result<Self> {
        Self::new(prefix, cycle)
    }

    /// A finite word followed by the `∞` tail (the point falls on 0).
    pub fn terminating(prefix: Vec<u32>) -> Result<Self> {
        Self::new(prefix, Vec::new())
    }

    fn new(prefix: Vec<u32>, cycle: Vec<u32>) -> Result<Self> {
        // admissibility: the symbol 0 may not be followed by ∞
        if cycle.is_empty() {
            match prefix.last() {
                None => {}
                Some(0) => {
                    return Err(Error::InadmissibleCode("0 may not be followed by the ∞ tail".into()))
                }
                Some(_) => {}
            }
        }
        Ok(Self { prefix, cycle })
    }

    pub fn prefix(&self) -> &[u32] {
        &self.prefix
    }

    pub fn cycle(&self) -> &[u32] {
        &self.cycle
    }

    /// First symbol, `None` for the bare `∞` tail.
    pub fn head(&self) -> Option<u32> {
        self.prefix.first().or_else(|| self.cycle.first()).copied()
    }

    /// Code shifted one symbol to the left.
    pub fn shift(&self) -> CodeWord {
        if !self.prefix.is_empty() {
            CodeWord { prefix: self.prefix[1..].to_vec(), cycle: self.cycle.clone() }
        } else if self.cycle.is_empty() {
            self.clone()
        } else {
            let mut cycle = self.cycle.clone();
            cycle.rotate_left(1);
            CodeWord { prefix: Vec::new(), cycle }
        }
    }

    pub fn symbol(&self, k: usize) -> Option<u32> {
        if k < self.prefix.len() {
            Some(self.prefix[k])
        } else if self.cycle.is_empty() {
            None
        } else {
            Some(self.cycle[(k - self.prefix.len()) % self.cycle.len()])
        }
    }
}

/// First-return itinerary of `x` through the intervals `I_t`, up to
/// `k_max` symbols (fewer if the orbit lands exactly on 0).
pub fn induce_itinerary(x: f64, k_max: usize) -> Result<Vec<u32>> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::InvalidParameter(format!("inducing needs x in ]0,1[, got {x}")));
    }
    let mut symbols = Vec::with_capacity(k_max);
    let mut y = x;
    for _ in 0..k_max {
        if y == 0.0 {
            break; // the code continues with the ∞ tail
        }
        let t = interval_index(y);
        symbols.push(t);
        // first-return map on I_t; 2^{t+1} y lands in ]1, 2] so the
        // subtraction is exact
        y = 2.0 - (y * 2f64.powi(t as i32 + 1));
    }
    Ok(symbols)
}

/// Index `t` with `x in I_t = ]2^{-t-1}, 2^{-t}]`.
fn interval_index(x: f64) -> u32 {
    debug_assert!(x > 0.0 && x < 1.0);
    let mut t = (-x.log2()).floor() as i32;
    // guard the boundary cases of the float log
    while x <= 2f64.powi(-t - 1) {
        t += 1;
    }
    while x > 2f64.powi(-t) {
        t -= 1;
    }
    t as u32
}

/// Closed-form evaluation of `X` on an eventually periodic code.
pub fn induce_point(code: &CodeWord) -> Result<f64> {
    let mut x = if code.cycle().is_empty() {
        0.0 // X(∞̄) = 0
    } else {
        periodic_point(code.cycle())
    };
    // prefix rule X(u·w) = 2^{-u} (1 - X(w)/2), right to left
    for &u in code.prefix().iter().rev() {
        x = 2f64.powi(-(u as i32)) * (1.0 - 0.5 * x);
    }
    Ok(x)
}

fn periodic_point(word: &[u32]) -> f64 {
    let mut num = NeumaierSum::new();
    let mut exp_sum: i64 = 0;
    for (r, &t) in word.iter().enumerate() {
        exp_sum += t as i64;
        let mag = pow2_neg(exp_sum + r as i64);
        num.add(if r % 2 == 0 { mag } else { -mag });
    }
    let s = word.len() as i64;
    let tail = pow2_neg(exp_sum + s);
    let den = if s % 2 == 0 { 1.0 - tail } else { 1.0 + tail };
    num.value() / den
}

fn pow2_neg(e: i64) -> f64 {
    if e > 1070 {
        0.0
    } else {
        2f64.powi(-(e as i32))
    }
}

/// Induced potential `v#(t̄) = Σ_{r=0}^{t_0} v(φ^r(X(t̄)))`; errors on
/// the bare `∞` tail where `t_0 = ∞`.
pub fn induced_potential(pot: &TentPotential, code: &CodeWord) -> Result<f64> {
    let head = code.head().ok_or_else(|| Error::InadmissibleCode("t_0 = ∞ has no induced value".into()))?;
    let mut x = induce_point(code)?;
    let mut acc = NeumaierSum::new();
    for _ in 0..=head {
        acc.add(pot.eval(x));
        x = tent(x);
    }
    Ok(acc.value())
}

/// Partial sums of the grand-canonical series
/// `Ξ_s(κv, e^{-μ}) = Σ_{t_0..t_{s-1}} e^{-μ Σ t_j + κ S^s v#}`,
/// truncated at `t_j < t_cap`. A diagnostic cross-check of the
/// zeta-function brackets, not a production summation.
pub fn grand_canonical_xi(
    pot: &TentPotential,
    kappa: f64,
    mu: f64,
    s: usize,
    t_cap: u32,
) -> Result<f64> {
    if s == 0 || s > 3 {
        return Err(Error::InvalidParameter(format!("tuple length s must be 1..=3, got {s}")));
    }
    if t_cap > 40 {
        return Err(Error::InvalidParameter(format!("per-symbol cap {t_cap} exceeds 40")));
    }
    let mut word = vec![0u32; s];
    let mut total = NeumaierSum::new();
    loop {
        // S^s v# over the rotations of the periodic word
        let mut action = NeumaierSum::new();
        let mut sum_t = 0u64;
        for r in 0..s {
            let mut rotated = word.clone();
            rotated.rotate_left(r);
            action.add(induced_potential(pot, &CodeWord::periodic(rotated)?)?);
            sum_t += word[r] as u64;
        }
        total.add((-mu * sum_t as f64 + kappa * action.value()).exp());

        // odometer over the s-tuple
        let mut pos = 0;
        loop {
            if pos == s {
                return Ok(total.value());
            }
            word[pos] += 1;
            if word[pos] < t_cap {
                break;
            }
            word[pos] = 0;
            pos += 1;
        }
    }
}
