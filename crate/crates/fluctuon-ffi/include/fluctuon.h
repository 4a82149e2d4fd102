#ifndef FLUCTUON_H
#define FLUCTUON_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible call.
 */
typedef enum FluctuonStatus {
  /**
   * The call succeeded.
   */
  FluctuonStatus_Ok = 0,
  /**
   * A pointer argument was null or a parameter was out of range.
   */
  FluctuonStatus_InvalidArgument = 1,
  /**
   * The computation failed (non-convergence, cap exceeded, ...).
   */
  FluctuonStatus_NumericalError = 2,
} FluctuonStatus;

/**
 * A real function sampled on a uniform grid.
 */
typedef struct FluctuonGrid FluctuonGrid;

/**
 * A Markov chain paired with its time reversal.
 */
typedef struct FluctuonMarkov FluctuonMarkov;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the most recent error on this thread. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *fluctuon_last_error(void);

/**
 * Library version as a static C string.
 */
const char *fluctuon_version(void);

/**
 * Builds a chain from a row-major `n x n` transition matrix and pairs
 * it with its time reversal. Returns null on failure; see
 * [`fluctuon_last_error`].
 *
 * # Safety
 * `transitions` must point to `n * n` readable doubles.
 */
struct FluctuonMarkov *fluctuon_markov_new(const double *transitions, uintptr_t n);

/**
 * Frees a handle returned by [`fluctuon_markov_new`].
 *
 * # Safety
 * `handle` must be a pointer from [`fluctuon_markov_new`] that has
 * not been freed, or null.
 */
void fluctuon_markov_free(struct FluctuonMarkov *handle);

/**
 * Entropic pressure `e(alpha) = log r(alpha)` of the tilted matrix.
 *
 * # Safety
 * `handle` must be a live handle and `out` a writable double.
 */
enum FluctuonStatus fluctuon_markov_entropic_pressure(const struct FluctuonMarkov *handle,
                                                      double alpha,
                                                      double *out);

/**
 * Mean entropy production rate of the chain against its reversal.
 *
 * # Safety
 * `handle` must be a live handle and `out` a writable double.
 */
enum FluctuonStatus fluctuon_markov_mean_ep_rate(const struct FluctuonMarkov *handle, double *out);

/**
 * Finite-time Rényi entropy `e_t(alpha)`.
 *
 * # Safety
 * `handle` must be a live handle and `out` a writable double.
 */
enum FluctuonStatus fluctuon_markov_renyi_entropy(const struct FluctuonMarkov *handle,
                                                  uintptr_t t,
                                                  double alpha,
                                                  double *out);

/**
 * Defect of the Jarzynski identity `E[e^{-sigma_t}] - 1` from exact
 * path enumeration.
 *
 * # Safety
 * `handle` must be a live handle and `out` a writable double.
 */
enum FluctuonStatus fluctuon_markov_jarzynski_defect(const struct FluctuonMarkov *handle,
                                                     uintptr_t t,
                                                     double *out);

/**
 * Rate functions `(I, I_hat)` on `steps` points of `[s_lo, s_hi]`,
 * returned as two new grid handles.
 *
 * # Safety
 * `handle` must be a live handle; `out_rate` and `out_rate_hat` must
 * be writable pointer slots.
 */
enum FluctuonStatus fluctuon_markov_rate_functions(const struct FluctuonMarkov *handle,
                                                   double s_lo,
                                                   double s_hi,
                                                   uintptr_t steps,
                                                   struct FluctuonGrid **out_rate,
                                                   struct FluctuonGrid **out_rate_hat);

/**
 * Number of samples in a grid handle.
 *
 * # Safety
 * `handle` must be a live grid handle.
 */
uintptr_t fluctuon_grid_len(const struct FluctuonGrid *handle);

/**
 * Abscissa of sample `index`.
 *
 * # Safety
 * `handle` must be a live grid handle and `out` writable.
 */
enum FluctuonStatus fluctuon_grid_x(const struct FluctuonGrid *handle,
                                    uintptr_t index,
                                    double *out);

/**
 * Sample value at `index`; `+inf` marks a point outside the effective
 * domain.
 *
 * # Safety
 * `handle` must be a live grid handle and `out` writable.
 */
enum FluctuonStatus fluctuon_grid_value(const struct FluctuonGrid *handle,
                                        uintptr_t index,
                                        double *out);

/**
 * Legendre-Fenchel transform of a grid passed as parallel arrays.
 *
 * # Safety
 * `xs_values` must hold `n` doubles; the output handle is written to
 * `out` on success.
 */
enum FluctuonStatus fluctuon_legendre(double lo,
                                      double hi,
                                      const double *values,
                                      uintptr_t n,
                                      double out_lo,
                                      double out_hi,
                                      uintptr_t out_n,
                                      struct FluctuonGrid **out);

/**
 * Frees a grid handle.
 *
 * # Safety
 * `handle` must come from this library and not be freed twice.
 */
void fluctuon_grid_free(struct FluctuonGrid *handle);

/**
 * Closed-form 1D Ising pressure.
 */
double fluctuon_ising_pressure(double beta, double coupling, double field);

/**
 * 1D Ising entropic pressure under spin flip.
 */
double fluctuon_ising_entropic_pressure(double beta, double coupling, double field, double alpha);

/**
 * Mean-field lattice-gas pressure.
 */
double fluctuon_gas_pressure(double beta, double mu);

/**
 * Mean-field entropic pressure under particle-hole involution.
 */
double fluctuon_gas_entropic_pressure(double beta, double mu, double alpha);

/**
 * Mean-field rate function; `+inf` outside the admissible window.
 *
 * # Safety
 * `out` must be a writable double.
 */
enum FluctuonStatus fluctuon_gas_rate(double beta, double mu, double s, double *out);

/**
 * Prime-period tent-map pressure approximant `p_t(kappa)` for the
 * potential `v(x) = -(1 - log2 x)^{-p}`.
 *
 * # Safety
 * `out` must be a writable double.
 */
enum FluctuonStatus fluctuon_tent_pressure_approx(double exponent,
                                                  double kappa,
                                                  uint32_t period,
                                                  double *out);

/**
 * Zeta-function brackets `kappa_-(p) <= kappa_c(p) <= kappa_+(p)` for
 * the critical coupling.
 *
 * # Safety
 * `out_lo` and `out_hi` must be writable doubles.
 */
enum FluctuonStatus fluctuon_tent_critical_brackets(double exponent,
                                                    double *out_lo,
                                                    double *out_hi);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* FLUCTUON_H */
