#include "freudlab/bands.hpp"

#include <algorithm>
#include <cmath>

#include "freudlab/error.hpp"

namespace freudlab {

const char* segment_label_name(SegmentLabel l) {
  switch (l) {
    case SegmentLabel::one_band: return "OneBand";
    case SegmentLabel::two_band: return "TwoBand";
    case SegmentLabel::transient: return "Transient";
    case SegmentLabel::converged: return "Converged";
  }
  return "?";
}

ResidueBands residue_split(const RecurrenceTable& t, int m) {
  if (m < 1) throw Error(Errc::invalid_argument, "residue_split: modulus must be >= 1");
  ResidueBands rb;
  rb.modulus = m;
  rb.bands.assign(static_cast<size_t>(m), {});
  for (long mu = 0; mu <= t.size(); ++mu)
    rb.bands[static_cast<size_t>(mu % m)].emplace_back(mu, t.r(mu));
  return rb;
}

namespace {

struct LinFit {
  double mean = 0.0;
  double rms_residual = 0.0;
};

LinFit linear_fit(const std::vector<std::pair<long, double>>& pts) {
  LinFit f;
  const double n = static_cast<double>(pts.size());
  if (pts.empty()) return f;
  double sx = 0, sy = 0;
  for (auto& [x, y] : pts) {
    sx += static_cast<double>(x);
    sy += y;
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (auto& [x, y] : pts) {
    const double dx = static_cast<double>(x) - mx;
    sxx += dx * dx;
    sxy += dx * (y - my);
  }
  const double slope = sxx > 0 ? sxy / sxx : 0.0;
  double ss = 0;
  for (auto& [x, y] : pts) {
    const double r = y - (my + slope * (static_cast<double>(x) - mx));
    ss += r * r;
  }
  f.mean = my;
  f.rms_residual = std::sqrt(ss / n);
  return f;
}

enum class WindowClass { uniform, two_band, transient };

WindowClass classify_window(const std::vector<std::pair<long, double>>& pts,
                            const StructureOptions& opts) {
  const LinFit whole = linear_fit(pts);
  const double scale = std::max(std::fabs(whole.mean), 1e-300);
  if (whole.rms_residual < opts.uniform_tol * scale) return WindowClass::uniform;

  std::vector<std::pair<long, double>> even, odd;
  for (auto& pr : pts) ((pr.first % 2 == 0) ? even : odd).push_back(pr);
  if (even.size() >= 2 && odd.size() >= 2) {
    const LinFit fe = linear_fit(even);
    const LinFit fo = linear_fit(odd);
    const double sep = std::fabs(fe.mean - fo.mean);
    const double spread = std::max({fe.rms_residual, fo.rms_residual, 1e-9 * scale});
    if (sep > opts.separation_ratio * spread) return WindowClass::two_band;
  }
  return WindowClass::transient;
}

}  // namespace

std::vector<Segment> detect_structure(const RecurrenceTable& t, int m, long window,
                                      const StructureOptions& opts) {
  if (m < 1) throw Error(Errc::invalid_argument, "detect_structure: modulus must be >= 1");
  if (window < 2 * m)
    throw Error(Errc::invalid_argument, "detect_structure: window must be >= 2m");
  if (t.size() < window)
    throw Error(Errc::invalid_argument, "detect_structure: table shorter than window");

  std::vector<std::pair<long, WindowClass>> windows;  // (start mu, class)
  for (long start = 1; start + window - 1 <= t.size(); start += window) {
    std::vector<std::pair<long, double>> pts;
    pts.reserve(static_cast<size_t>(window));
    for (long mu = start; mu < start + window; ++mu) pts.emplace_back(mu, t.r(mu));
    windows.emplace_back(start, classify_window(pts, opts));
  }

  std::vector<Segment> segs;
  bool oscillation_seen = false;
  for (auto& [start, cls] : windows) {
    SegmentLabel label;
    switch (cls) {
      case WindowClass::two_band:
        label = SegmentLabel::two_band;
        oscillation_seen = true;
        break;
      case WindowClass::transient:
        label = SegmentLabel::transient;
        oscillation_seen = true;
        break;
      case WindowClass::uniform:
      default:
        label = oscillation_seen ? SegmentLabel::converged : SegmentLabel::one_band;
        break;
    }
    const long end = start + window - 1;
    if (!segs.empty() && segs.back().label == label && segs.back().end + 1 == start) {
      segs.back().end = end;
    } else {
      segs.push_back(Segment{start, end, label});
    }
  }
  return segs;
}

TwoBandFit two_band_fit(const RecurrenceTable& t, long lo, long hi, const FitOptions& opts) {
  if (lo < 1 || hi > t.size() || hi - lo < 3)
    throw Error(Errc::invalid_argument, "two_band_fit: bad index range");
  std::vector<std::pair<long, double>> even, odd;
  for (long mu = lo; mu <= hi; ++mu)
    ((mu % 2 == 0) ? even : odd).emplace_back(mu, t.r(mu));
  const LinFit fe = linear_fit(even);
  const LinFit fo = linear_fit(odd);
  const double sep = std::fabs(fe.mean - fo.mean);
  const double spread = std::max(fe.rms_residual, fo.rms_residual);
  if (!(sep > 0.0) || spread > opts.max_spread_ratio * sep)
    throw Error(Errc::fit, "two_band_fit: range is not a clean alternating two-band pattern");
  TwoBandFit fit;
  fit.A0 = std::max(fe.mean, fo.mean);
  fit.A1 = std::min(fe.mean, fo.mean);
  return fit;
}

namespace {

double regression_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0)) throw Error(Errc::invalid_argument, "regression: degenerate abscissae");
  return sxy / sxx;
}

}  // namespace

ScalingExponents scaling_probe_a1(const Potential& base, const std::vector<long>& n_list,
                                  const std::vector<double>& a4_list,
                                  const ScalingProbeOptions& opts) {
  if (base.d() != 3)
    throw Error(Errc::unsupported, "scaling_probe_a1: defined for d = 3 only");
  if (n_list.size() < 2 || a4_list.size() < 2)
    throw Error(Errc::invalid_argument,
                "scaling_probe_a1: need at least two points per sweep (regression undefined)");

  const long lo = 2 * base.d() + 1;  // skip the R_0 = 0 boundary influence
  const long hi = lo + opts.fit_length - 1;
  const long count = hi + 3;

  auto fitted_a1 = [&](const Potential& p) {
    RecurrenceTable t = compute_recurrence(p, count, opts.precision_bits);
    return two_band_fit(t, lo, hi).A1;
  };

  std::vector<double> lx, ly;
  for (long n : n_list) {
    lx.push_back(std::log(static_cast<double>(n)));
    ly.push_back(std::log(fitted_a1(base.with_N(n))));
  }
  ScalingExponents out;
  out.exponent_N = regression_slope(lx, ly);

  lx.clear();
  ly.clear();
  for (double a4 : a4_list) {
    lx.push_back(std::log(std::fabs(a4)));
    ly.push_back(std::log(fitted_a1(base.with_coeff(2, a4))));
  }
  out.exponent_a4 = regression_slope(lx, ly);
  return out;
}

TransientReport transient_sum_check(const RecurrenceTable& t, const Potential& p, long window,
                                    const StructureOptions& opts) {
  if (p.d() != 3)
    throw Error(Errc::unsupported, "transient_sum_check: defined for d = 3 only");
  TransientReport rep;
  const std::vector<Segment> segs = detect_structure(t, 3, window, opts);
  const Segment* tr = nullptr;
  for (const auto& s : segs)
    if (s.label == SegmentLabel::transient) {
      tr = &s;
      break;
    }
  if (!tr) return rep;  // empty report

  rep.has_transient = true;
  rep.start = tr->start;
  rep.end = tr->end;
  rep.reference_sum = two_band_sum(p);
  rep.epsilon = 0.02 * rep.reference_sum;

  long above = 0, total = 0;
  for (long mu = tr->start; mu + 2 <= tr->end; ++mu) {
    const double s = t.r(mu) + t.r(mu + 1) + t.r(mu + 2);
    ++total;
    if (s >= rep.reference_sum - rep.epsilon) ++above;
  }
  rep.fraction_above = total > 0 ? static_cast<double>(above) / static_cast<double>(total) : 0.0;

  // Residue-band means over the transient window; at the critical coupling
  // two of the three coincide.
  double mean[3] = {0, 0, 0};
  long cnt[3] = {0, 0, 0};
  for (long mu = tr->start; mu <= tr->end; ++mu) {
    mean[mu % 3] += t.r(mu);
    ++cnt[mu % 3];
  }
  for (int r = 0; r < 3; ++r)
    if (cnt[r]) mean[r] /= static_cast<double>(cnt[r]);
  std::sort(mean, mean + 3);
  const double range = mean[2] - mean[0];
  if (range > 0) {
    const double gap_hi = mean[2] - mean[1];
    const double gap_lo = mean[1] - mean[0];
    if (std::min(gap_hi, gap_lo) < 0.15 * range) {
      rep.pseudo_two_band = true;
      rep.note = "two residue bands coincide (pseudo two-band pattern)";
    }
  }
  return rep;
}

}  // namespace freudlab
