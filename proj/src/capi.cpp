#include "freudlab.h"

#include <cstring>
#include <new>
#include <string>
#include <vector>

#include "freudlab/bands.hpp"
#include "freudlab/error.hpp"
#include "freudlab/ladder.hpp"
#include "freudlab/potential.hpp"
#include "freudlab/recurrence.hpp"
#include "freudlab/spectra.hpp"

using namespace freudlab;

struct fl_potential {
  Potential value;
};
struct fl_ladder {
  LadderSum value;
};
struct fl_rtable {
  RecurrenceTable value;
};
struct fl_density {
  DensityCurve value;
};

namespace {

thread_local std::string g_last_error;

fl_status status_of(Errc c) {
  switch (c) {
    case Errc::invalid_argument: return FL_EINVAL;
    case Errc::domain: return FL_EDOMAIN;
    case Errc::precision: return FL_EPRECISION;
    case Errc::range: return FL_ERANGE;
    case Errc::fit: return FL_EFIT;
    case Errc::ambiguous: return FL_EAMBIGUOUS;
    case Errc::unsupported: return FL_EUNSUPPORTED;
    case Errc::parse: return FL_EPARSE;
    case Errc::singular: return FL_ESINGULAR;
    case Errc::internal: return FL_EINTERNAL;
  }
  return FL_EINTERNAL;
}

fl_status fail(fl_status s, const char* msg) {
  g_last_error = msg;
  return s;
}

template <class F>
fl_status guarded(F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return FL_EINTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return FL_EINTERNAL;
  }
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* fl_version(void) { return "freudlab 1.0.0"; }

const char* fl_last_error(void) { return g_last_error.c_str(); }

void fl_string_free(char* s) { delete[] s; }

/* ---- potential ------------------------------------------------------- */

fl_status fl_potential_new(int d, long N, const double* coeffs, int ncoeffs, fl_potential** out) {
  if (!out || (!coeffs && ncoeffs > 0)) return fail(FL_EINVAL, "null argument");
  return guarded([&] {
    std::vector<double> c(coeffs, coeffs + ncoeffs);
    *out = new fl_potential{Potential::create(d, N, std::move(c))};
    return FL_OK;
  });
}

void fl_potential_free(fl_potential* p) { delete p; }

fl_status fl_potential_eval(const fl_potential* p, double x, double* out) {
  if (!p || !out) return fail(FL_EINVAL, "null argument");
  return guarded([&] {
    *out = eval_potential(p->value, x);
    return FL_OK;
  });
}

fl_status fl_potential_eval_derivative(const fl_potential* p, double x, double* out) {
  if (!p || !out) return fail(FL_EINVAL, "null argument");
  return guarded([&] {
    *out = eval_potential_derivative(p->value, x);
    return FL_OK;
  });
}

fl_status fl_critical_a4(double a2, double a6, double* out) {
  if (!out) return fail(FL_EINVAL, "null argument");
  return guarded([&] {
    *out = critical_a4(a2, a6);
    return FL_OK;
  });
}

fl_status fl_classify_regime(const fl_potential* p, double* a4c, int* classification,
                             char** detail) {
  if (!p || !a4c || !classification) return fail(FL_EINVAL, "null argument");
  return guarded([&] {
    RegimeReport r = classify_regime(p->value);
    *a4c = r.a4c;
    switch (r.classification) {
      case Regime::two_band_transient: *classification = FL_REGIME_TWO_BAND; break;
      case Regime::one_band_transient: *classification = FL_REGIME_ONE_BAND; break;
      case Regime::critical: *classification = FL_REGIME_CRITICAL; break;
    }
    if (detail) *detail = dup_string(r.detail);
    return FL_OK;
  });
}

fl_status fl_single_band_value(const fl_potential* p, double lambda, double* out) {
  if (!p || !out) return fail(FL_EINVAL, "null argument");
  return guarded([&] {
    *out = single_band_value(p->value, lambda);
    return FL_OK;
  });
}

fl_status fl_single_band_roots(const fl_potential* p, double lambda, double* roots, int cap,
                               int* count) {
  if (!p || !count || (!roots && cap > 0)) return fail(FL_EINVAL, "null argument");
  return guarded([&] {
    std::vector<double> rs = single_band_roots(p->value, lambda);
    *count = static_cast<int>(rs.size());
    for (int i = 0; i < cap && i < *count; ++i) roots[i] = rs[static_cast<size_t>(i)];
    return FL_OK;
  });
}

fl_status fl_two_band_sum(const fl_potential* p, double* out) {
  if (!p || !out) return fail(FL_EINVAL, "null argument");
  return guarded([&] {
    *out = two_band_sum(p->value);
    return FL_OK;
  });
}

/* ---- ladder sums ------------------------------------------------------ */

fl_status fl_ladder_transfer(int length, int from_offset, int to_offset, fl_ladder** out) {
  if (!out) return fail(FL_EINVAL, "null argument");
  return guarded([&] {
    *out = new fl_ladder{transfer_weights(length, from_offset, to_offset)};
    return FL_OK;
  });
}

fl_status fl_ladder_freud_term(int d, int k, fl_ladder** out) {
  if (!out) return fail(FL_EINVAL, "null argument");
  return guarded([&] {
    if (k < 1 || k > d) throw Error(Errc::invalid_argument, "freud term: need 1 <= k <= d");
    *out = new fl_ladder{transfer_weights(2 * k - 1, +1, 0)};
    return FL_OK;
  });
}

fl_status fl_ladder_moment_summand(int k, fl_ladder** out) {
  if (!out) return fail(FL_EINVAL, "null argument");
  return guarded([&] {
    *out = new fl_ladder{moment_summand(k)};
    return FL_OK;
  });
}

void fl_ladder_free(fl_ladder* l) { delete l; }

fl_status fl_ladder_render(const fl_ladder* l, const char* format, char** out) {
  if (!l || !format || !out) return fail(FL_EINVAL, "null argument");
  return guarded([&] {
    std::string fmt(format);
    RenderFormat rf;
    if (fmt == "latex") {
      rf = RenderFormat::latex;
    } else if (fmt == "json") {
      rf = RenderFormat::json;
    } else {
      throw Error(Errc::invalid_argument, "render format must be 'latex' or 'json'");
    }
    *out = dup_string(render(l->value, rf));
    return FL_OK;
  });
}

fl_status fl_ladder_parse_json(const char* text, fl_ladder** out) {
  if (!text || !out) return fail(FL_EINVAL, "null argument");
  return guarded([&] {
    *out = new fl_ladder{parse_json(text)};
    return FL_OK;
  });
}

fl_status fl_ladder_term_count(const fl_ladder* l, long* out) {
  if (!l || !out) return fail(FL_EINVAL, "null argument");
  *out = static_cast<long>(l->value.monomials.size());
  return FL_OK;
}

fl_status fl_ladder_total_multiplicity(const fl_ladder* l, unsigned long long* out) {
  if (!l || !out) return fail(FL_EINVAL, "null argument");
  return guarded([&] {
    *out = total_multiplicity(l->value);
    return FL_OK;
  });
}

/* ---- recurrence tables ------------------------------------------------ */

fl_status fl_rtable_compute(const fl_potential* p, long count, long precision_bits,
                            fl_rtable** out) {
  if (!p || !out) return fail(FL_EINVAL, "null argument");
  return guarded([&] {
    *out = new fl_rtable{compute_recurrence(p->value, count, precision_bits)};
    return FL_OK;
  });
}

void fl_rtable_free(fl_rtable* t) { delete t; }

fl_status fl_rtable_len(const fl_rtable* t, long* out) {
  if (!t || !out) return fail(FL_EINVAL, "null argument");
  *out = t->value.size();
  return FL_OK;
}

fl_status fl_rtable_precision_bits(const fl_rtable* t, long* out) {
  if (!t || !out) return fail(FL_EINVAL, "null argument");
  *out = t->value.precision_bits;
  return FL_OK;
}

fl_status fl_rtable_r(const fl_rtable* t, long mu, double* out) {
  if (!t || !out) return fail(FL_EINVAL, "null argument");
  return guarded([&] {
    *out = t->value.r(mu);
    return FL_OK;
  });
}

fl_status fl_rtable_log_h(const fl_rtable* t, long mu, double* out) {
  if (!t || !out) return fail(FL_EINVAL, "null argument");
  return guarded([&] {
    *out = t->value.logh(mu);
    return FL_OK;
  });
}

fl_status fl_rtable_r_str(const fl_rtable* t, long mu, char** out) {
  if (!t || !out) return fail(FL_EINVAL, "null argument");
  return guarded([&] {
    if (mu < 0 || mu > t->value.size()) throw Error(Errc::range, "index out of range");
    *out = dup_string(t->value.R[static_cast<size_t>(mu)].str(20));
    return FL_OK;
  });
}

fl_status fl_rtable_log_h_str(const fl_rtable* t, long mu, char** out) {
  if (!t || !out) return fail(FL_EINVAL, "null argument");
  return guarded([&] {
    if (mu < 0 || mu > t->value.size()) throw Error(Errc::range, "index out of range");
    *out = dup_string(t->value.log_h[static_cast<size_t>(mu)].str(20));
    return FL_OK;
  });
}

fl_status fl_freud_residual(const fl_rtable* t, long mu, double* out) {
  if (!t || !out) return fail(FL_EINVAL, "null argument");
  return guarded([&] {
    *out = freud_residual(t->value, mu);
    return FL_OK;
  });
}

fl_status fl_freud_forward(const fl_potential* p, const fl_rtable* seeds, long count,
                           fl_rtable** out, long* divergence_index) {
  if (!p || !seeds || !out) return fail(FL_EINVAL, "null argument");
  return guarded([&] {
    ForwardResult r = freud_forward(p->value, seeds->value, count);
    *out = new fl_rtable{std::move(r.table)};
    if (divergence_index) *divergence_index = r.divergence_index;
    return FL_OK;
  });
}

/* ---- spectra ----------------------------------------------------------- */

fl_status fl_global_moment(const fl_rtable* t, int k, long N, double* out) {
  if (!t || !out) return fail(FL_EINVAL, "null argument");
  return guarded([&] {
    *out = global_moment(t->value, k, N);
    return FL_OK;
  });
}

fl_status fl_density_finite(const fl_rtable* t, const fl_potential* p, double lo, double hi,
                            int n, fl_density** out) {
  if (!t || !p || !out) return fail(FL_EINVAL, "null argument");
  return guarded([&] {
    *out = new fl_density{sample_finite_density(t->value, p->value, lo, hi, n)};
    return FL_OK;
  });
}

fl_status fl_density_asymptotic(const fl_potential* p, const fl_rtable* t, double lo, double hi,
                                int n, fl_density** out) {
  if (!t || !p || !out) return fail(FL_EINVAL, "null argument");
  return guarded([&] {
    MomentSet m = compute_moment_set(t->value, p->value.N(), 2 * p->value.d() - 2);
    *out = new fl_density{sample_asymptotic_density(p->value, m, lo, hi, n)};
    return FL_OK;
  });
}

fl_status fl_density_asymptotic_moments(const fl_potential* p, const int* ks, const double* ms,
                                        int nm, double lo, double hi, int n, fl_density** out) {
  if (!p || !out || (nm > 0 && (!ks || !ms))) return fail(FL_EINVAL, "null argument");
  return guarded([&] {
    MomentSet m;
    m.N = p->value.N();
    for (int i = 0; i < nm; ++i) m.values[ks[i]] = ms[i];
    *out = new fl_density{sample_asymptotic_density(p->value, m, lo, hi, n)};
    return FL_OK;
  });
}

void fl_density_free(fl_density* c) { delete c; }

fl_status fl_density_len(const fl_density* c, long* out) {
  if (!c || !out) return fail(FL_EINVAL, "null argument");
  *out = static_cast<long>(c->value.samples.size());
  return FL_OK;
}

fl_status fl_density_point(const fl_density* c, long i, double* x, double* rho) {
  if (!c || !x || !rho) return fail(FL_EINVAL, "null argument");
  if (i < 0 || i >= static_cast<long>(c->value.samples.size()))
    return fail(FL_ERANGE, "sample index out of range");
  *x = c->value.samples[static_cast<size_t>(i)].first;
  *rho = c->value.samples[static_cast<size_t>(i)].second;
  return FL_OK;
}

fl_status fl_density_norm(const fl_density* c, double* out) {
  if (!c || !out) return fail(FL_EINVAL, "null argument");
  return guarded([&] {
    *out = density_norm(c->value);
    return FL_OK;
  });
}

fl_status fl_density_moment(const fl_density* c, int k, double* out) {
  if (!c || !out) return fail(FL_EINVAL, "null argument");
  return guarded([&] {
    *out = curve_moment(c->value, k);
    return FL_OK;
  });
}

fl_status fl_density_bands(const fl_density* c, double* flat, int cap, int* count) {
  if (!c || !count || (!flat && cap > 0)) return fail(FL_EINVAL, "null argument");
  return guarded([&] {
    auto bands = support_bands(c->value);
    *count = static_cast<int>(bands.size());
    for (int i = 0; i < *count && 2 * i + 1 < cap; ++i) {
      flat[2 * i] = bands[static_cast<size_t>(i)].first;
      flat[2 * i + 1] = bands[static_cast<size_t>(i)].second;
    }
    return FL_OK;
  });
}

fl_status fl_default_range(const fl_potential* p, double* out) {
  if (!p || !out) return fail(FL_EINVAL, "null argument");
  return guarded([&] {
    *out = weight_cutoff(p->value, 64, 0);
    return FL_OK;
  });
}

fl_status fl_resolvent_text(int d, char** out) {
  if (!out) return fail(FL_EINVAL, "null argument");
  return guarded([&] {
    *out = dup_string(render_resolvent(d));
    return FL_OK;
  });
}

/* ---- band structure ---------------------------------------------------- */

const char* fl_segment_label_name(int label) {
  switch (label) {
    case FL_SEGMENT_ONE_BAND: return "OneBand";
    case FL_SEGMENT_TWO_BAND: return "TwoBand";
    case FL_SEGMENT_TRANSIENT: return "Transient";
    case FL_SEGMENT_CONVERGED: return "Converged";
  }
  return "?";
}

fl_status fl_detect_structure(const fl_rtable* t, int m, long window, fl_segment* buf, int cap,
                              int* count) {
  if (!t || !count || (!buf && cap > 0)) return fail(FL_EINVAL, "null argument");
  return guarded([&] {
    auto segs = detect_structure(t->value, m, window);
    *count = static_cast<int>(segs.size());
    for (int i = 0; i < *count && i < cap; ++i) {
      buf[i].start = segs[static_cast<size_t>(i)].start;
      buf[i].end = segs[static_cast<size_t>(i)].end;
      buf[i].label = static_cast<int>(segs[static_cast<size_t>(i)].label);
    }
    return FL_OK;
  });
}

fl_status fl_two_band_fit(const fl_rtable* t, long lo, long hi, double* A0, double* A1) {
  if (!t || !A0 || !A1) return fail(FL_EINVAL, "null argument");
  return guarded([&] {
    TwoBandFit f = two_band_fit(t->value, lo, hi);
    *A0 = f.A0;
    *A1 = f.A1;
    return FL_OK;
  });
}

fl_status fl_scaling_probe_a1(const fl_potential* p, const long* n_list, int n_count,
                              const double* a4_list, int a4_count, double* exponent_N,
                              double* exponent_a4) {
  if (!p || !exponent_N || !exponent_a4 || (n_count > 0 && !n_list) ||
      (a4_count > 0 && !a4_list))
    return fail(FL_EINVAL, "null argument");
  return guarded([&] {
    std::vector<long> ns(n_list, n_list + n_count);
    std::vector<double> a4s(a4_list, a4_list + a4_count);
    ScalingExponents e = scaling_probe_a1(p->value, ns, a4s);
    *exponent_N = e.exponent_N;
    *exponent_a4 = e.exponent_a4;
    return FL_OK;
  });
}

fl_status fl_transient_check(const fl_rtable* t, const fl_potential* p, long window,
                             fl_transient_report* out) {
  if (!t || !p || !out) return fail(FL_EINVAL, "null argument");
  return guarded([&] {
    TransientReport r = transient_sum_check(t->value, p->value, window);
    out->has_transient = r.has_transient ? 1 : 0;
    out->start = r.start;
    out->end = r.end;
    out->fraction_above = r.fraction_above;
    out->epsilon = r.epsilon;
    out->reference_sum = r.reference_sum;
    out->pseudo_two_band = r.pseudo_two_band ? 1 : 0;
    return FL_OK;
  });
}

}  // extern "C"
