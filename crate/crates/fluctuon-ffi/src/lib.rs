//! C ABI for the fluctuon library.
//!
//! Handles are opaque pointers created and freed by this library;
//! every fallible call returns a [`FluctuonStatus`] and writes results
//! through out-pointers. The last error message is kept per thread and
//! can be read with [`fluctuon_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::slice;

use fluctuon::convex;
use fluctuon::grid::GridFunction;
use fluctuon::markov::{MarkovModel, MarkovPair};
use fluctuon::{ising, meanfield, tent};

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FluctuonStatus {
    /// The call succeeded.
    Ok = 0,
    /// A pointer argument was null or a parameter was out of range.
    InvalidArgument = 1,
    /// The computation failed (non-convergence, cap exceeded, ...).
    NumericalError = 2,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(message: &str) {
    let sanitized = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = sanitized);
}

fn fail(status: FluctuonStatus, message: &str) -> FluctuonStatus {
    set_error(message);
    status
}

/// Message describing the most recent error on this thread. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn fluctuon_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Library version as a static C string.
#[no_mangle]
pub extern "C" fn fluctuon_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// A Markov chain paired with its time reversal.
pub struct FluctuonMarkov {
    pair: MarkovPair,
}

/// A real function sampled on a uniform grid.
pub struct FluctuonGrid {
    grid: GridFunction,
}

/// Builds a chain from a row-major `n x n` transition matrix and pairs
/// it with its time reversal. Returns null on failure; see
/// [`fluctuon_last_error`].
///
/// # Safety
/// `transitions` must point to `n * n` readable doubles.
#[no_mangle]
pub unsafe extern "C" fn fluctuon_markov_new(
    transitions: *const f64,
    n: usize,
) -> *mut FluctuonMarkov {
    if transitions.is_null() || n < 2 {
        set_error("transitions must be non-null and n >= 2");
        return std::ptr::null_mut();
    }
    let flat = slice::from_raw_parts(transitions, n * n);
    let rows: Vec<Vec<f64>> = flat.chunks(n).map(<[f64]>::to_vec).collect();
    match MarkovModel::from_transitions(&rows).and_then(MarkovPair::time_reversal) {
        Ok(pair) => Box::into_raw(Box::new(FluctuonMarkov { pair })),
        Err(e) => {
            set_error(&e.to_string());
            std::ptr::null_mut()
        }
    }
}

/// Frees a handle returned by [`fluctuon_markov_new`].
///
/// # Safety
/// `handle` must be a pointer from [`fluctuon_markov_new`] that has
/// not been freed, or null.
#[no_mangle]
pub unsafe extern "C" fn fluctuon_markov_free(handle: *mut FluctuonMarkov) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

unsafe fn markov_ref<'a>(handle: *const FluctuonMarkov) -> Option<&'a FluctuonMarkov> {
    handle.as_ref()
}

/// Entropic pressure `e(alpha) = log r(alpha)` of the tilted matrix.
///
/// # Safety
/// `handle` must be a live handle and `out` a writable double.
#[no_mangle]
pub unsafe extern "C" fn fluctuon_markov_entropic_pressure(
    handle: *const FluctuonMarkov,
    alpha: f64,
    out: *mut f64,
) -> FluctuonStatus {
    let Some(model) = markov_ref(handle) else {
        return fail(FluctuonStatus::InvalidArgument, "null handle");
    };
    if out.is_null() {
        return fail(FluctuonStatus::InvalidArgument, "null out pointer");
    }
    match model.pair.entropic_pressure(alpha) {
        Ok(v) => {
            *out = v;
            FluctuonStatus::Ok
        }
        Err(e) => fail(FluctuonStatus::NumericalError, &e.to_string()),
    }
}

/// Mean entropy production rate of the chain against its reversal.
///
/// # Safety
/// `handle` must be a live handle and `out` a writable double.
#[no_mangle]
pub unsafe extern "C" fn fluctuon_markov_mean_ep_rate(
    handle: *const FluctuonMarkov,
    out: *mut f64,
) -> FluctuonStatus {
    let Some(model) = markov_ref(handle) else {
        return fail(FluctuonStatus::InvalidArgument, "null handle");
    };
    if out.is_null() {
        return fail(FluctuonStatus::InvalidArgument, "null out pointer");
    }
    *out = model.pair.mean_ep_rate();
    FluctuonStatus::Ok
}

/// Finite-time Rényi entropy `e_t(alpha)`.
///
/// # Safety
/// `handle` must be a live handle and `out` a writable double.
#[no_mangle]
pub unsafe extern "C" fn fluctuon_markov_renyi_entropy(
    handle: *const FluctuonMarkov,
    t: usize,
    alpha: f64,
    out: *mut f64,
) -> FluctuonStatus {
    let Some(model) = markov_ref(handle) else {
        return fail(FluctuonStatus::InvalidArgument, "null handle");
    };
    if out.is_null() || t == 0 {
        return fail(FluctuonStatus::InvalidArgument, "need t >= 1 and a writable out pointer");
    }
    *out = model.pair.renyi_entropy(t, alpha);
    FluctuonStatus::Ok
}

/// Defect of the Jarzynski identity `E[e^{-sigma_t}] - 1` from exact
/// path enumeration.
///
/// # Safety
/// `handle` must be a live handle and `out` a writable double.
#[no_mangle]
pub unsafe extern "C" fn fluctuon_markov_jarzynski_defect(
    handle: *const FluctuonMarkov,
    t: usize,
    out: *mut f64,
) -> FluctuonStatus {
    let Some(model) = markov_ref(handle) else {
        return fail(FluctuonStatus::InvalidArgument, "null handle");
    };
    if out.is_null() || t == 0 {
        return fail(FluctuonStatus::InvalidArgument, "need t >= 1 and a writable out pointer");
    }
    match model.pair.sigma_law(t, None) {
        Ok(law) => {
            *out = law.jarzynski_defect();
            FluctuonStatus::Ok
        }
        Err(e) => fail(FluctuonStatus::NumericalError, &e.to_string()),
    }
}

/// Rate functions `(I, I_hat)` on `steps` points of `[s_lo, s_hi]`,
/// returned as two new grid handles.
///
/// # Safety
/// `handle` must be a live handle; `out_rate` and `out_rate_hat` must
/// be writable pointer slots.
#[no_mangle]
pub unsafe extern "C" fn fluctuon_markov_rate_functions(
    handle: *const FluctuonMarkov,
    s_lo: f64,
    s_hi: f64,
    steps: usize,
    out_rate: *mut *mut FluctuonGrid,
    out_rate_hat: *mut *mut FluctuonGrid,
) -> FluctuonStatus {
    let Some(model) = markov_ref(handle) else {
        return fail(FluctuonStatus::InvalidArgument, "null handle");
    };
    if out_rate.is_null() || out_rate_hat.is_null() {
        return fail(FluctuonStatus::InvalidArgument, "null out pointer");
    }
    match model.pair.rate_functions((-3.0, 4.0, 2801), (s_lo, s_hi, steps)) {
        Ok((rate, rate_hat)) => {
            *out_rate = Box::into_raw(Box::new(FluctuonGrid { grid: rate }));
            *out_rate_hat = Box::into_raw(Box::new(FluctuonGrid { grid: rate_hat }));
            FluctuonStatus::Ok
        }
        Err(e) => fail(FluctuonStatus::NumericalError, &e.to_string()),
    }
}

/// Number of samples in a grid handle.
///
/// # Safety
/// `handle` must be a live grid handle.
#[no_mangle]
pub unsafe extern "C" fn fluctuon_grid_len(handle: *const FluctuonGrid) -> usize {
    handle.as_ref().map_or(0, |g| g.grid.len())
}

/// Abscissa of sample `index`.
///
/// # Safety
/// `handle` must be a live grid handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fluctuon_grid_x(
    handle: *const FluctuonGrid,
    index: usize,
    out: *mut f64,
) -> FluctuonStatus {
    let Some(g) = handle.as_ref() else {
        return fail(FluctuonStatus::InvalidArgument, "null handle");
    };
    if out.is_null() || index >= g.grid.len() {
        return fail(FluctuonStatus::InvalidArgument, "index out of range");
    }
    *out = g.grid.x(index);
    FluctuonStatus::Ok
}

/// Sample value at `index`; `+inf` marks a point outside the effective
/// domain.
///
/// # Safety
/// `handle` must be a live grid handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fluctuon_grid_value(
    handle: *const FluctuonGrid,
    index: usize,
    out: *mut f64,
) -> FluctuonStatus {
    let Some(g) = handle.as_ref() else {
        return fail(FluctuonStatus::InvalidArgument, "null handle");
    };
    if out.is_null() || index >= g.grid.len() {
        return fail(FluctuonStatus::InvalidArgument, "index out of range");
    }
    *out = g.grid.value(index);
    FluctuonStatus::Ok
}

/// Legendre-Fenchel transform of a grid passed as parallel arrays.
///
/// # Safety
/// `xs_values` must hold `n` doubles; the output handle is written to
/// `out` on success.
#[no_mangle]
pub unsafe extern "C" fn fluctuon_legendre(
    lo: f64,
    hi: f64,
    values: *const f64,
    n: usize,
    out_lo: f64,
    out_hi: f64,
    out_n: usize,
    out: *mut *mut FluctuonGrid,
) -> FluctuonStatus {
    if values.is_null() || out.is_null() {
        return fail(FluctuonStatus::InvalidArgument, "null pointer");
    }
    let vals = slice::from_raw_parts(values, n).to_vec();
    let result = GridFunction::new(lo, hi, vals)
        .and_then(|f| convex::legendre(&f, out_lo, out_hi, out_n));
    match result {
        Ok(g) => {
            *out = Box::into_raw(Box::new(FluctuonGrid { grid: g }));
            FluctuonStatus::Ok
        }
        Err(e) => fail(FluctuonStatus::NumericalError, &e.to_string()),
    }
}

/// Frees a grid handle.
///
/// # Safety
/// `handle` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn fluctuon_grid_free(handle: *mut FluctuonGrid) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Closed-form 1D Ising pressure.
#[no_mangle]
pub extern "C" fn fluctuon_ising_pressure(beta: f64, coupling: f64, field: f64) -> f64 {
    ising::pressure_closed(beta, coupling, field)
}

/// 1D Ising entropic pressure under spin flip.
#[no_mangle]
pub extern "C" fn fluctuon_ising_entropic_pressure(
    beta: f64,
    coupling: f64,
    field: f64,
    alpha: f64,
) -> f64 {
    ising::entropic_pressure(beta, coupling, field, alpha)
}

/// Mean-field lattice-gas pressure.
#[no_mangle]
pub extern "C" fn fluctuon_gas_pressure(beta: f64, mu: f64) -> f64 {
    meanfield::pressure(beta, mu)
}

/// Mean-field entropic pressure under particle-hole involution.
#[no_mangle]
pub extern "C" fn fluctuon_gas_entropic_pressure(beta: f64, mu: f64, alpha: f64) -> f64 {
    meanfield::entropic_pressure(beta, mu, alpha)
}

/// Mean-field rate function; `+inf` outside the admissible window.
///
/// # Safety
/// `out` must be a writable double.
#[no_mangle]
pub unsafe extern "C" fn fluctuon_gas_rate(
    beta: f64,
    mu: f64,
    s: f64,
    out: *mut f64,
) -> FluctuonStatus {
    if out.is_null() {
        return fail(FluctuonStatus::InvalidArgument, "null out pointer");
    }
    match meanfield::rate_function(beta, mu, s) {
        Ok(v) => {
            *out = v;
            FluctuonStatus::Ok
        }
        Err(e) => fail(FluctuonStatus::InvalidArgument, &e.to_string()),
    }
}

/// Prime-period tent-map pressure approximant `p_t(kappa)` for the
/// potential `v(x) = -(1 - log2 x)^{-p}`.
///
/// # Safety
/// `out` must be a writable double.
#[no_mangle]
pub unsafe extern "C" fn fluctuon_tent_pressure_approx(
    exponent: f64,
    kappa: f64,
    period: u32,
    out: *mut f64,
) -> FluctuonStatus {
    if out.is_null() {
        return fail(FluctuonStatus::InvalidArgument, "null out pointer");
    }
    let result = tent::TentPotential::new(exponent)
        .and_then(|pot| tent::pressure_approx(&pot, kappa, period));
    match result {
        Ok(v) => {
            *out = v;
            FluctuonStatus::Ok
        }
        Err(e) => fail(FluctuonStatus::NumericalError, &e.to_string()),
    }
}

/// Zeta-function brackets `kappa_-(p) <= kappa_c(p) <= kappa_+(p)` for
/// the critical coupling.
///
/// # Safety
/// `out_lo` and `out_hi` must be writable doubles.
#[no_mangle]
pub unsafe extern "C" fn fluctuon_tent_critical_brackets(
    exponent: f64,
    out_lo: *mut f64,
    out_hi: *mut f64,
) -> FluctuonStatus {
    if out_lo.is_null() || out_hi.is_null() {
        return fail(FluctuonStatus::InvalidArgument, "null out pointer");
    }
    match tent::zeta::critical_brackets(exponent) {
        Ok((lo, hi)) => {
            *out_lo = lo;
            *out_hi = hi;
            FluctuonStatus::Ok
        }
        Err(e) => fail(FluctuonStatus::NumericalError, &e.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn markov_round_trip_through_the_abi() {
        let p = [0.1, 0.7, 0.2, 0.2, 0.1, 0.7, 0.7, 0.2, 0.1];
        unsafe {
            let handle = fluctuon_markov_new(p.as_ptr(), 3);
            assert!(!handle.is_null());
            let mut out = f64::NAN;
            assert_eq!(fluctuon_markov_entropic_pressure(handle, 0.0, &mut out), FluctuonStatus::Ok);
            assert!(out.abs() < 1e-12);
            assert_eq!(fluctuon_markov_mean_ep_rate(handle, &mut out), FluctuonStatus::Ok);
            assert!((out - 0.5 * 3.5f64.ln()).abs() < 1e-13);
            assert_eq!(fluctuon_markov_jarzynski_defect(handle, 6, &mut out), FluctuonStatus::Ok);
            assert!(out.abs() < 1e-12);

            let mut rate: *mut FluctuonGrid = std::ptr::null_mut();
            let mut rate_hat: *mut FluctuonGrid = std::ptr::null_mut();
            assert_eq!(
                fluctuon_markov_rate_functions(handle, -1.0, 1.0, 201, &mut rate, &mut rate_hat),
                FluctuonStatus::Ok
            );
            assert_eq!(fluctuon_grid_len(rate), 201);
            let mut x = f64::NAN;
            let mut v = f64::NAN;
            assert_eq!(fluctuon_grid_x(rate, 100, &mut x), FluctuonStatus::Ok);
            assert_eq!(x, 0.0);
            assert_eq!(fluctuon_grid_value(rate, 100, &mut v), FluctuonStatus::Ok);
            assert!(v.is_finite());
            fluctuon_grid_free(rate);
            fluctuon_grid_free(rate_hat);
            fluctuon_markov_free(handle);
        }
    }

    #[test]
    fn invalid_inputs_report_errors() {
        unsafe {
            // not a stochastic matrix
            let bad = [0.5, 0.4, 0.5, 0.5];
            let handle = fluctuon_markov_new(bad.as_ptr(), 2);
            assert!(handle.is_null());
            let message = std::ffi::CStr::from_ptr(fluctuon_last_error());
            assert!(message.to_str().unwrap().contains("sums"));

            let mut out = f64::NAN;
            assert_eq!(
                fluctuon_markov_entropic_pressure(std::ptr::null(), 0.5, &mut out),
                FluctuonStatus::InvalidArgument
            );
        }
    }

    #[test]
    fn scalar_models_through_the_abi() {
        unsafe {
            let p = fluctuon_ising_pressure(1.0, 1.0, 0.0);
            let expect = 1.0 + (1.0 + (-2.0f64).exp()).ln();
            assert!((p - expect).abs() < 1e-14);
            assert!((fluctuon_gas_pressure(1.0, -2.0) - fluctuon_gas_pressure(1.0, -2.0)).abs() == 0.0);

            let mut out = f64::NAN;
            assert_eq!(fluctuon_gas_rate(1.8, -1.8, 0.1, &mut out), FluctuonStatus::Ok);
            assert!(out >= 0.0);
            assert_eq!(fluctuon_gas_rate(1.8, -2.0, 0.1, &mut out), FluctuonStatus::InvalidArgument);

            let mut lo = f64::NAN;
            let mut hi = f64::NAN;
            assert_eq!(fluctuon_tent_critical_brackets(0.5, &mut lo, &mut hi), FluctuonStatus::Ok);
            assert!(0.0 < lo && lo <= hi);

            assert_eq!(fluctuon_tent_pressure_approx(0.7, 0.0, 7, &mut out), FluctuonStatus::Ok);
            assert!((out - (126f64).ln() / 7.0).abs() < 1e-12);
        }
    }
}
