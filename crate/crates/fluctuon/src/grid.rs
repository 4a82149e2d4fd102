//! Real functions sampled on a uniform 1D grid.
//!
//! `GridFunction` is the carrier for entropic pressures `e(α)`, rate
//! functions `I(s)`, and Hoeffding curves `f(u)`. Samples may be `+∞`,
//! which marks a point outside the effective domain; transforms skip
//! such nodes exactly instead of approximating them by large floats.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// A real function sampled at `values.len()` equally spaced points of
/// `[lo, hi]`, endpoints included. `+∞` samples are allowed, `-∞` and
/// `NaN` are not.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    lo: f64,
    hi: f64,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(lo: f64, hi: f64, values: Vec<f64>) -> Result<Self> {
        if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidGrid(format!("need finite hi > lo, got [{lo}, {hi}]")));
        }
        if values.len() < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 samples, got {}", values.len())));
        }
        if values.iter().any(|v| v.is_nan() || *v == f64::NEG_INFINITY) {
            return Err(Error::InvalidGrid("samples must be real or +inf".into()));
        }
        if !values.iter().any(|v| v.is_finite()) {
            return Err(Error::EmptyDomain);
        }
        Ok(Self { lo, hi, values })
    }

    /// Sample `f` at `n` equally spaced points of `[lo, hi]`.
    pub fn sample(lo: f64, hi: f64, n: usize, mut f: impl FnMut(f64) -> f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 samples, got {n}")));
        }
        let spacing = (hi - lo) / (n - 1) as f64;
        let values = (0..n).map(|i| f(lo + i as f64 * spacing)).collect();
        Self::new(lo, hi, values)
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false // invariant: at least 2 samples
    }

    pub fn spacing(&self) -> f64 {
        (self.hi - self.lo) / (self.values.len() - 1) as f64
    }

    /// Abscissa of the `i`-th node.
    pub fn x(&self, i: usize) -> f64 {
        self.lo + i as f64 * self.spacing()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, i: usize) -> f64 {
        self.values[i]
    }

    /// Iterator over `(x_i, f_i)` pairs.
    pub fn nodes(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        (0..self.len()).map(move |i| (self.x(i), self.values[i]))
    }

    /// Index of the node closest to `x`, if `x` lies within half a
    /// spacing of the grid.
    pub fn node_at(&self, x: f64) -> Option<usize> {
        let h = self.spacing();
        let i = ((x - self.lo) / h).round();
        if i < 0.0 || i >= self.len() as f64 {
            return None;
        }
        let i = i as usize;
        if (self.x(i) - x).abs() <= 0.5 * h {
            Some(i)
        } else {
            None
        }
    }

    /// Smallest finite sample.
    pub fn min_finite(&self) -> f64 {
        self.values.iter().copied().filter(|v| v.is_finite()).fold(f64::INFINITY, f64::min)
    }

    /// True when the grids have identical bounds and sample counts.
    pub fn same_grid(&self, other: &Self) -> bool {
        self.lo == other.lo && self.hi == other.hi && self.len() == other.len()
    }

    /// Sup over nodes where both functions are finite of `|self - other|`.
    pub fn sup_distance(&self, other: &Self) -> Result<f64> {
        if !self.same_grid(other) {
            return Err(Error::GridMismatch(format!(
                "[{}, {}] x {} vs [{}, {}] x {}",
                self.lo,
                self.hi,
                self.len(),
                other.lo,
                other.hi,
                other.len()
            )));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .filter(|(a, b)| a.is_finite() && b.is_finite())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// Writes `x,value,is_finite` rows; finite doubles round-trip bit-exactly.
    pub fn write_csv(&self, w: &mut impl Write) -> Result<()> {
        writeln!(w, "x,value,is_finite")?;
        for (x, v) in self.nodes() {
            if v.is_finite() {
                writeln!(w, "{},{},1", fmt_f64(x), fmt_f64(v))?;
            } else {
                writeln!(w, "{},inf,0", fmt_f64(x))?;
            }
        }
        Ok(())
    }

    pub fn read_csv(r: &mut impl BufRead) -> Result<Self> {
        let mut xs: Vec<f64> = Vec::new();
        let mut values = Vec::new();
        for (lineno, line) in r.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || (lineno == 0 && line.starts_with('x')) {
                continue;
            }
            let mut fields = line.split(',');
            let bad = || Error::InvalidGrid(format!("bad csv line {}: {line}", lineno + 1));
            let x: f64 = fields.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
            let v = fields.next().ok_or_else(bad)?;
            let finite = fields.next().ok_or_else(bad)? == "1";
            xs.push(x);
            values.push(if finite { v.parse().map_err(|_| bad())? } else { f64::INFINITY });
        }
        if xs.len() < 2 {
            return Err(Error::InvalidGrid("csv holds fewer than 2 samples".into()));
        }
        Self::new(xs[0], *xs.last().unwrap(), values)
    }
}

/// 17 significant digits: enough for f64 round-trips.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}
