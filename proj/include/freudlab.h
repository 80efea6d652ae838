/*
 * freudlab C API: recurrence coefficients, Freud equations, and level
 * densities for even polynomial weights exp(-N V(x)).
 *
 * All functions return fl_status; results come back through out-parameters.
 * Objects are opaque handles released with their matching _free function.
 * Strings returned through char** are heap-allocated; release them with
 * fl_string_free. On failure fl_last_error() describes the most recent
 * error in the calling thread.
 */
#ifndef FREUDLAB_H
#define FREUDLAB_H

#include <stddef.h>

#if defined(_WIN32)
#define FL_API
#elif defined(FL_BUILD)
#define FL_API __attribute__((visibility("default")))
#else
#define FL_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fl_status {
  FL_OK = 0,
  FL_EINVAL = 1,     /* bad argument / malformed input */
  FL_EDOMAIN = 2,    /* formula outside its real domain */
  FL_EPRECISION = 3, /* precision exhausted or insufficient */
  FL_ERANGE = 4,     /* index or order out of range */
  FL_EFIT = 5,       /* pattern fit failed */
  FL_EAMBIGUOUS = 6, /* several admissible roots */
  FL_EUNSUPPORTED = 7,
  FL_EPARSE = 8,
  FL_ESINGULAR = 9,
  FL_EINTERNAL = 10
} fl_status;

typedef struct fl_potential fl_potential;
typedef struct fl_ladder fl_ladder;
typedef struct fl_rtable fl_rtable;
typedef struct fl_density fl_density;

FL_API const char* fl_version(void);
FL_API const char* fl_last_error(void);
FL_API void fl_string_free(char* s);

/* ---- potential ------------------------------------------------------- */

/* coeffs[i] = a_{2(i+1)}; fewer than d entries are zero-filled. */
FL_API fl_status fl_potential_new(int d, long N, const double* coeffs, int ncoeffs,
                                  fl_potential** out);
FL_API void fl_potential_free(fl_potential* p);
FL_API fl_status fl_potential_eval(const fl_potential* p, double x, double* out);
FL_API fl_status fl_potential_eval_derivative(const fl_potential* p, double x, double* out);

FL_API fl_status fl_critical_a4(double a2, double a6, double* out);

enum { FL_REGIME_TWO_BAND = 0, FL_REGIME_ONE_BAND = 1, FL_REGIME_CRITICAL = 2 };
FL_API fl_status fl_classify_regime(const fl_potential* p, double* a4c, int* classification,
                                    char** detail);

/* FL_EAMBIGUOUS when several nonnegative roots exist (see ..._roots). */
FL_API fl_status fl_single_band_value(const fl_potential* p, double lambda, double* out);
FL_API fl_status fl_single_band_roots(const fl_potential* p, double lambda, double* roots,
                                      int cap, int* count);
FL_API fl_status fl_two_band_sum(const fl_potential* p, double* out);

/* ---- ladder sums ------------------------------------------------------ */

FL_API fl_status fl_ladder_transfer(int length, int from_offset, int to_offset, fl_ladder** out);
/* k-th term (order 2k) of the generalized Freud equation for half-degree d. */
FL_API fl_status fl_ladder_freud_term(int d, int k, fl_ladder** out);
FL_API fl_status fl_ladder_moment_summand(int k, fl_ladder** out);
FL_API void fl_ladder_free(fl_ladder* l);

/* format: "latex" or "json". */
FL_API fl_status fl_ladder_render(const fl_ladder* l, const char* format, char** out);
FL_API fl_status fl_ladder_parse_json(const char* text, fl_ladder** out);
FL_API fl_status fl_ladder_term_count(const fl_ladder* l, long* out);
FL_API fl_status fl_ladder_total_multiplicity(const fl_ladder* l, unsigned long long* out);

/* ---- recurrence tables ------------------------------------------------ */

/* Moment-oracle table R_0..R_count; precision_bits 0 selects the automatic
 * schedule max(256, 8*count) with doubling until stability. */
FL_API fl_status fl_rtable_compute(const fl_potential* p, long count, long precision_bits,
                                   fl_rtable** out);
FL_API void fl_rtable_free(fl_rtable* t);
FL_API fl_status fl_rtable_len(const fl_rtable* t, long* out);
FL_API fl_status fl_rtable_precision_bits(const fl_rtable* t, long* out);
FL_API fl_status fl_rtable_r(const fl_rtable* t, long mu, double* out);
FL_API fl_status fl_rtable_log_h(const fl_rtable* t, long mu, double* out);
/* Decimal strings with 20 significant digits. */
FL_API fl_status fl_rtable_r_str(const fl_rtable* t, long mu, char** out);
FL_API fl_status fl_rtable_log_h_str(const fl_rtable* t, long mu, char** out);

FL_API fl_status fl_freud_residual(const fl_rtable* t, long mu, double* out);

/* Forward Freud iteration from the first max(1, 2d-2) seed values; divergence
 * is the first index drifting from the seed table by relative 1e-6. */
FL_API fl_status fl_freud_forward(const fl_potential* p, const fl_rtable* seeds, long count,
                                  fl_rtable** out, long* divergence_index);

/* ---- spectra ----------------------------------------------------------- */

FL_API fl_status fl_global_moment(const fl_rtable* t, int k, long N, double* out);

FL_API fl_status fl_density_finite(const fl_rtable* t, const fl_potential* p, double lo,
                                   double hi, int n, fl_density** out);
/* Moments M_2..M_{2d-2} taken from the table at the potential's N. */
FL_API fl_status fl_density_asymptotic(const fl_potential* p, const fl_rtable* t, double lo,
                                       double hi, int n, fl_density** out);
/* Moments supplied directly: ks[i] (even) with values ms[i]. */
FL_API fl_status fl_density_asymptotic_moments(const fl_potential* p, const int* ks,
                                               const double* ms, int nm, double lo, double hi,
                                               int n, fl_density** out);
FL_API void fl_density_free(fl_density* c);
FL_API fl_status fl_density_len(const fl_density* c, long* out);
FL_API fl_status fl_density_point(const fl_density* c, long i, double* x, double* rho);
FL_API fl_status fl_density_norm(const fl_density* c, double* out);
FL_API fl_status fl_density_moment(const fl_density* c, int k, double* out);
/* Support bands as flat [lo0, hi0, lo1, hi1, ...]; count = interval count. */
FL_API fl_status fl_density_bands(const fl_density* c, double* flat, int cap, int* count);

/* Default plotting half-range for a potential (weight cutoff). */
FL_API fl_status fl_default_range(const fl_potential* p, double* out);

/* Canonical text of the resolvent bracket S(x) for half-degree d. */
FL_API fl_status fl_resolvent_text(int d, char** out);

/* ---- band structure ---------------------------------------------------- */

enum {
  FL_SEGMENT_ONE_BAND = 0,
  FL_SEGMENT_TWO_BAND = 1,
  FL_SEGMENT_TRANSIENT = 2,
  FL_SEGMENT_CONVERGED = 3
};

typedef struct fl_segment {
  long start; /* inclusive */
  long end;   /* inclusive */
  int label;
} fl_segment;

FL_API const char* fl_segment_label_name(int label);
FL_API fl_status fl_detect_structure(const fl_rtable* t, int m, long window, fl_segment* buf,
                                     int cap, int* count);
FL_API fl_status fl_two_band_fit(const fl_rtable* t, long lo, long hi, double* A0, double* A1);
FL_API fl_status fl_scaling_probe_a1(const fl_potential* p, const long* n_list, int n_count,
                                     const double* a4_list, int a4_count, double* exponent_N,
                                     double* exponent_a4);

typedef struct fl_transient_report {
  int has_transient;
  long start;
  long end;
  double fraction_above;
  double epsilon;
  double reference_sum;
  int pseudo_two_band;
} fl_transient_report;

FL_API fl_status fl_transient_check(const fl_rtable* t, const fl_potential* p, long window,
                                    fl_transient_report* out);

#ifdef __cplusplus
}
#endif

#endif /* FREUDLAB_H */
