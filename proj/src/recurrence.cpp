#include "freudlab/recurrence.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <ostream>

#include "freudlab/error.hpp"
#include "freudlab/ladder.hpp"
#include "freudlab/quadrature.hpp"

namespace freudlab {

const Real& WeightMoments::m(long even_order) const {
  static const Real zero(static_cast<mpfr_prec_t>(64));
  if (even_order < 0 || even_order > max_order())
    throw Error(Errc::range, "weight_moments: order out of range");
  if (even_order % 2 != 0) return zero;
  return even[static_cast<size_t>(even_order / 2)];
}

double RecurrenceTable::r(long mu) const {
  if (mu <= 0) return 0.0;
  if (mu > size()) throw Error(Errc::range, "recurrence table: index out of range");
  return R[static_cast<size_t>(mu)].to_double();
}

double RecurrenceTable::logh(long mu) const {
  if (mu < 0 || mu > size()) throw Error(Errc::range, "recurrence table: index out of range");
  return log_h[static_cast<size_t>(mu)].to_double();
}

namespace {

double second_derivative(const Potential& p, double x) {
  const double u = x * x;
  double acc = 0.0;
  for (int k = p.d(); k >= 1; --k) acc = acc * u + p.coeff(k) * (2.0 * k - 1.0);
  return acc;
}

}  // namespace

std::vector<double> stationary_points(const Potential& p) {
  // V'(x) = x * q(x^2) with q(s) = sum_k a_{2k} s^{k-1}; scan q for sign
  // changes on (0, s_bound] and bisect.
  std::vector<double> pts{0.0};
  const int dq = p.d() - 1;
  auto q = [&](double s) {
    double acc = 0.0;
    for (int k = p.d(); k >= 1; --k) acc = acc * s + p.coeff(k);
    return acc;  // evaluated as sum a_{2k} s^{k-1} via Horner over k
  };
  if (dq >= 1) {
    double maxr = 0.0;
    for (int k = 1; k < p.d(); ++k)
      maxr = std::max(maxr, std::fabs(p.coeff(k) / p.coeff(p.d())));
    const double s_bound = 1.0 + maxr;
    const int grid = 4096;
    double prev_s = 0.0, prev_q = q(0.0);
    for (int i = 1; i <= grid; ++i) {
      const double s = s_bound * i / grid;
      const double qs = q(s);
      if (prev_q == 0.0) {
        pts.push_back(std::sqrt(prev_s));
      } else if (prev_q * qs < 0.0) {
        double lo = prev_s, hi = s, flo = prev_q;
        for (int it = 0; it < 200 && hi - lo > 1e-16 * (1.0 + hi); ++it) {
          const double mid = 0.5 * (lo + hi);
          const double fm = q(mid);
          if (flo * fm <= 0.0) {
            hi = mid;
          } else {
            lo = mid;
            flo = fm;
          }
        }
        pts.push_back(std::sqrt(0.5 * (lo + hi)));
      }
      prev_s = s;
      prev_q = qs;
    }
  }
  std::sort(pts.begin(), pts.end());
  std::vector<double> out;
  for (double x : pts)
    if (out.empty() || x - out.back() > 1e-12 * (1.0 + x)) out.push_back(x);
  return out;
}

double weight_cutoff(const Potential& p, long tol_bits, long max_order) {
  const std::vector<double> st = stationary_points(p);
  double vmin = 0.0;
  for (double x : st) vmin = std::min(vmin, eval_potential(p, x));
  const double N = static_cast<double>(p.N());
  auto deficit = [&](double X) {
    const double rhs =
        M_LN2 * (static_cast<double>(tol_bits) +
                 static_cast<double>(max_order) * std::log2(std::max(X, 1.0)) + 64.0);
    return N * (eval_potential(p, X) - vmin) - rhs;
  };
  double X = std::max(1.0, st.back() + 1.0);
  int guard = 0;
  while (deficit(X) < 0.0 && guard++ < 200) X *= 1.5;
  double lo = st.back(), hi = X;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= st.back() || deficit(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi * 1.02;
}

namespace {

// Panel break points: stationary points, +-12 sigma windows around each well
// (sigma from the local curvature of N V), and the cutoff.
std::vector<double> panel_breaks(const Potential& p, double cutoff) {
  const std::vector<double> st = stationary_points(p);
  const double N = static_cast<double>(p.N());
  std::vector<double> brk{0.0, cutoff};
  for (size_t i = 0; i < st.size(); ++i) {
    const double x = st[i];
    if (x >= cutoff) continue;
    brk.push_back(x);
    const double curv = std::fabs(second_derivative(p, x));
    double sigma = 1.0 / std::sqrt(N * curv + 1.0);
    double lo_lim = (i == 0) ? 0.0 : 0.5 * (st[i - 1] + x);
    double hi_lim = (i + 1 < st.size()) ? 0.5 * (x + st[i + 1]) : cutoff;
    brk.push_back(std::clamp(x - 12.0 * sigma, lo_lim, x));
    brk.push_back(std::clamp(x + 12.0 * sigma, x, hi_lim));
  }
  std::sort(brk.begin(), brk.end());
  std::vector<double> out;
  for (double x : brk) {
    x = std::clamp(x, 0.0, cutoff);
    if (out.empty() || x - out.back() > 1e-9 * (1.0 + cutoff)) out.push_back(x);
  }
  return out;
}

// log2 of a crude upper-ballpark for m_{2i}, from a coarse scan of the
// integrand in log space. Only needs to be right to a few bits.
std::vector<double> moment_log2_estimates(const Potential& p, double cutoff, int ncomp) {
  const double N = static_cast<double>(p.N());
  const int grid = 512;
  std::vector<double> best(static_cast<size_t>(ncomp), -1e300);
  for (int i = 1; i <= grid; ++i) {
    const double x = cutoff * i / grid;
    const double base = -N * eval_potential(p, x) / M_LN2;
    const double lx = std::log2(x);
    for (int c = 0; c < ncomp; ++c) {
      const double v = base + 2.0 * c * lx;
      if (v > best[static_cast<size_t>(c)]) best[static_cast<size_t>(c)] = v;
    }
  }
  const double width_log2 = std::log2(cutoff / grid);
  for (auto& v : best) v += width_log2;
  return best;
}

}  // namespace

WeightMoments weight_moments(const Potential& p, long max_order, long precision_bits) {
  if (max_order < 0 || max_order % 2 != 0)
    throw Error(Errc::invalid_argument, "weight_moments: max_order must be even and >= 0");
  if (precision_bits < 16)
    throw Error(Errc::invalid_argument, "weight_moments: precision_bits must be >= 16");

  // Dynamic-range check: the wells span a weight ratio of exp(N (V_hi-V_lo));
  // below that precision the well structure is invisible to the moments.
  {
    const std::vector<double> st = stationary_points(p);
    double vlo = 0.0, vhi = 0.0;
    for (double x : st) {
      const double v = eval_potential(p, x);
      vlo = std::min(vlo, v);
      vhi = std::max(vhi, v);
    }
    const long min_bits =
        64 + static_cast<long>(std::ceil(static_cast<double>(p.N()) * (vhi - vlo) / M_LN2));
    if (precision_bits < min_bits)
      throw PrecisionError("weight_moments: precision too small for the weight's dynamic range",
                           min_bits);
  }

  // Working precision carries a margin for the upward moment recurrence.
  // For weights whose deepest well is outermost (every configuration here)
  // the wanted moment solution dominates and the recurrence sheds almost no
  // accuracy; the max_order/8 term is headroom for less friendly inputs.
  const long margin = 96 + max_order / 8;
  const long p_work = precision_bits + margin;
  const long tol_bits = p_work - 16;
  const int d = p.d();
  const int ncomp = static_cast<int>(std::min<long>(d, max_order / 2 + 1));
  const long seed_order = 2 * (ncomp - 1);

  const double cutoff = weight_cutoff(p, tol_bits, seed_order);
  const std::vector<double> brk = panel_breaks(p, cutoff);
  const std::vector<double> est = moment_log2_estimates(p, cutoff, ncomp);
  std::vector<long> floors(static_cast<size_t>(ncomp));
  for (int c = 0; c < ncomp; ++c)
    floors[static_cast<size_t>(c)] =
        static_cast<long>(std::floor(est[static_cast<size_t>(c)])) - (tol_bits + 24);

  const mpfr_prec_t wp = static_cast<mpfr_prec_t>(p_work);
  PotentialEvaluator pe(p, wp);

  // Cheap skip test threshold: a node with -N V(x) below this cannot move any
  // component at the requested tolerance, so its exp is never taken.
  double skip_below = 1e300;
  for (int c = 0; c < ncomp; ++c)
    skip_below = std::min(skip_below, est[static_cast<size_t>(c)] -
                                          2.0 * c * std::log2(cutoff + 2.0));
  skip_below -= static_cast<double>(tol_bits) + 96.0;

  Real u(wp), e(wp);
  TanhSinh rule(wp, tol_bits);
  auto integrand = [&](std::span<Real> out, const Real& x) {
    u.set_mul(x, x);
    pe.neg_n_value_from_x2(e, u);
    // exp is the expensive step; skip nodes that cannot contribute.
    if (mpfr_get_d(e.raw(), MPFR_RNDN) / M_LN2 < skip_below) {
      for (auto& o : out) o.set_zero();
      return;
    }
    out[0].set_exp(e);
    for (size_t c = 1; c < out.size(); ++c) out[c].set_mul(out[c - 1], u);
  };

  std::vector<Real> seeds(static_cast<size_t>(ncomp), Real(wp));
  for (size_t i = 0; i + 1 < brk.size(); ++i) {
    Real a(brk[i], wp), b(brk[i + 1], wp);
    std::vector<Real> part = rule.integrate(a, b, ncomp, integrand, &floors);
    for (int c = 0; c < ncomp; ++c) seeds[static_cast<size_t>(c)].add(part[static_cast<size_t>(c)]);
  }
  for (auto& s : seeds) s.mul_2exp(1);  // even integrand: double the half-line

  // Upward closure: (j+1) m_j = N sum_k a_{2k} m_{j+2k} solved for m_{j+2d}.
  WeightMoments out(p, precision_bits);
  const long top = max_order / 2;
  std::vector<Real> even(static_cast<size_t>(top) + 1, Real(wp));
  for (int c = 0; c < ncomp; ++c) even[static_cast<size_t>(c)] = seeds[static_cast<size_t>(c)];
  std::vector<Real> coeff;
  for (int k = 1; k <= d; ++k) coeff.emplace_back(p.coeff(k), wp);
  Real acc(wp), tmp(wp);
  for (long i = d; i <= top; ++i) {
    const long j = 2 * (i - d);
    acc.set(even[static_cast<size_t>(i - d)]);
    acc.mul(j + 1);
    acc.div(p.N());
    for (int k = 1; k < d; ++k) {
      tmp.set_mul(coeff[static_cast<size_t>(k - 1)], even[static_cast<size_t>(i - d + k)]);
      acc.sub(tmp);
    }
    acc.div(coeff[static_cast<size_t>(d - 1)]);
    if (!(acc.sign() > 0))
      throw PrecisionError("weight_moments: moment recurrence lost positivity",
                           2 * precision_bits);
    even[static_cast<size_t>(i)] = acc;
  }

  out.even.reserve(even.size());
  for (auto& v : even) out.even.push_back(v.rounded(static_cast<mpfr_prec_t>(precision_bits)));
  return out;
}

namespace {

// Chebyshev algorithm specialized to an even weight (zero diagonal):
// sigma_{k,l} = sigma_{k-1,l+1} - beta_{k-1} sigma_{k-2,l}, beta_k =
// sigma_{k,k}/sigma_{k-1,k-1}. Rows are stored compressed over the parity
// lattice: row_k[i] = sigma_{k, k+2i}.
std::vector<Real> chebyshev_even(const std::vector<Real>& even, long n, mpfr_prec_t prec,
                                 long* certified) {
  std::vector<Real> beta;  // beta[mu-1] = R_mu
  beta.reserve(static_cast<size_t>(n));
  std::vector<Real> prev2, prev1, cur;
  prev1.reserve(static_cast<size_t>(n) + 1);
  for (long i = 0; i <= n; ++i) prev1.push_back(even[static_cast<size_t>(i)].rounded(prec));
  prev2.assign(prev1.size(), Real(prec));  // row_{-1} = 0

  Real b(prec), tmp(prec);
  for (long k = 1; k <= n; ++k) {
    const long len = n - k + 1;
    cur.assign(static_cast<size_t>(len), Real(prec));
    for (long i = 0; i < len; ++i) {
      if (k == 1) {
        cur[static_cast<size_t>(i)].set(prev1[static_cast<size_t>(i + 1)]);
      } else {
        tmp.set_mul(b, prev2[static_cast<size_t>(i + 1)]);
        cur[static_cast<size_t>(i)].set_sub(prev1[static_cast<size_t>(i + 1)], tmp);
      }
    }
    if (!(cur[0].sign() > 0)) {
      if (certified) *certified = k - 1;
      return beta;
    }
    b.set_div(cur[0], prev1[0]);
    beta.push_back(b);
    prev2 = std::move(prev1);
    prev1 = std::move(cur);
  }
  if (certified) *certified = n;
  return beta;
}

}  // namespace

RecurrenceTable moments_to_recurrence(const WeightMoments& m, long count) {
  if (count < 1) throw Error(Errc::invalid_argument, "moments_to_recurrence: count must be >= 1");
  if (m.max_order() < 2 * count)
    throw Error(Errc::range, "moments_to_recurrence: need moments up to order 2*count");

  const long p_full = m.precision_bits;
  const long p_half = std::max<long>(64, p_full / 2);

  long cert_half = 0, cert_full = 0;
  std::vector<Real> r_half =
      chebyshev_even(m.even, count, static_cast<mpfr_prec_t>(p_half), &cert_half);
  std::vector<Real> r_full =
      chebyshev_even(m.even, count, static_cast<mpfr_prec_t>(p_full), &cert_full);

  long certified = std::min(cert_half, cert_full);
  const double stability = 1e-10;
  for (long mu = 1; mu <= certified; ++mu) {
    if (rel_diff(r_half[static_cast<size_t>(mu - 1)], r_full[static_cast<size_t>(mu - 1)]) >
        stability) {
      certified = mu - 1;
      break;
    }
  }
  if (certified < count)
    throw PrecisionError("moments_to_recurrence: stability fails at index " +
                             std::to_string(certified + 1),
                         2 * p_full, certified);

  RecurrenceTable t(m.potential);
  t.precision_bits = p_full;
  t.method = RecurrenceTable::Method::moment_oracle;
  const mpfr_prec_t prec = static_cast<mpfr_prec_t>(p_full);
  t.R.reserve(static_cast<size_t>(count) + 1);
  t.R.emplace_back(prec);  // R_0 = 0
  for (long mu = 1; mu <= count; ++mu) t.R.push_back(r_full[static_cast<size_t>(mu - 1)]);

  t.log_h.reserve(static_cast<size_t>(count) + 1);
  Real lh(prec);
  lh.set_log(m.even[0]);
  t.log_h.push_back(lh);
  Real lr(prec);
  for (long mu = 1; mu <= count; ++mu) {
    lr.set_log(t.R[static_cast<size_t>(mu)]);
    lh.add(lr);
    t.log_h.push_back(lh);
  }
  return t;
}

RecurrenceTable compute_recurrence(const Potential& p, long count, long precision_bits) {
  long bits = precision_bits > 0 ? precision_bits : std::max<long>(256, 8 * count);
  const long bits_cap = 1L << 22;
  std::string last;
  while (bits <= bits_cap) {
    try {
      WeightMoments m = weight_moments(p, 2 * count, bits);
      return moments_to_recurrence(m, count);
    } catch (const PrecisionError& e) {
      last = e.what();
      bits = std::max(2 * bits, e.suggested_bits());
    }
  }
  throw PrecisionError("compute_recurrence: precision schedule exhausted (" + last + ")",
                       bits_cap);
}

namespace {

const std::vector<std::pair<int, LadderSum>>& freud_terms_for(int d) {
  static std::mutex mu;
  static std::map<int, std::vector<std::pair<int, LadderSum>>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(d);
  if (it == cache.end()) it = cache.emplace(d, freud_equation(d)).first;
  return it->second;
}

}  // namespace

double freud_residual(const RecurrenceTable& t, long mu) {
  const int d = t.potential.d();
  if (mu < 0) throw Error(Errc::invalid_argument, "freud_residual: mu must be >= 0");
  if (mu + d > t.size())
    throw Error(Errc::range, "freud_residual: mu + d exceeds table length");
  const mpfr_prec_t prec = static_cast<mpfr_prec_t>(t.precision_bits);
  const auto& terms = freud_terms_for(d);
  Real acc(prec), a(prec), tmp(prec);
  for (const auto& [order, sum] : terms) {
    Real v = eval_ladder_sum(sum, std::span<const Real>(t.R), mu, prec);
    a.set(t.potential.coeff(order / 2));
    tmp.set_fma(a, v, tmp);
  }
  tmp.mul(t.potential.N());
  acc.set(mu + 1);
  acc.sub(tmp);
  return acc.to_double();
}

ForwardResult freud_forward(const Potential& p, const RecurrenceTable& seeds, long count) {
  const int d = p.d();
  const long n_seed = std::max<long>(1, 2 * d - 2);
  if (seeds.size() < n_seed)
    throw Error(Errc::invalid_argument,
                "freud_forward: seeds must provide R_1..R_" + std::to_string(n_seed));
  if (count < n_seed) throw Error(Errc::invalid_argument, "freud_forward: count below seed range");

  const mpfr_prec_t wp = static_cast<mpfr_prec_t>(std::max<long>(256, seeds.precision_bits));
  RecurrenceTable t(p);
  t.precision_bits = static_cast<long>(wp);
  t.method = RecurrenceTable::Method::freud_forward;
  t.R.assign(static_cast<size_t>(count) + 1, Real(wp));
  for (long i = 1; i <= n_seed; ++i) {
    t.R[static_cast<size_t>(i)] = seeds.R[static_cast<size_t>(i)].rounded(wp);
    if (!(t.R[static_cast<size_t>(i)].sign() > 0))
      throw Error(Errc::singular, "freud_forward: nonpositive seed value");
  }

  const auto& terms = freud_terms_for(d);
  long divergence = count;
  bool diverged = false;
  long extent = count;

  Real known(wp), lin(wp), a(wp), v(wp), prod(wp), c(wp), rhs(wp);
  for (long idx = n_seed + 1; idx <= count; ++idx) {
    const long mu = idx - d;
    known.set_zero();
    lin.set_zero();
    std::span<const Real> rs(t.R);
    for (const auto& [order, sum] : terms) {
      const int k = order / 2;
      a.set(p.coeff(k));
      if (k < d) {
        v = eval_ladder_sum(sum, rs, mu, wp);
        known.set_fma(a, v, known);
        continue;
      }
      for (const auto& mono : sum.monomials) {
        prod.set(1L);
        bool zero = false;
        bool has_top = false;
        for (int off : mono.offsets) {
          if (off == d && !has_top) {
            has_top = true;  // strip the single R_{mu+d} factor
            continue;
          }
          const long j = mu + off;
          if (j <= 0) {
            zero = true;
            break;
          }
          prod.mul(t.R[static_cast<size_t>(j)]);
        }
        if (zero) continue;
        c.set_u64(mono.coeff);
        prod.mul(c);
        prod.mul(a);
        if (has_top) {
          lin.add(prod);
        } else {
          known.add(prod);
        }
      }
    }
    if (lin.is_zero())
      throw Error(Errc::singular, "freud_forward: vanishing linear coefficient at index " +
                                      std::to_string(idx));
    rhs.set(mu + 1);
    rhs.div(p.N());
    rhs.sub(known);
    rhs.div(lin);
    t.R[static_cast<size_t>(idx)] = rhs;

    if (!diverged && idx <= seeds.size()) {
      if (rel_diff(rhs, seeds.R[static_cast<size_t>(idx)]) > 1e-6) {
        divergence = idx;
        diverged = true;
      }
    }
    if (!(rhs.sign() > 0)) {
      if (!diverged) {
        divergence = idx;
        diverged = true;
      }
      extent = idx - 1;
      break;
    }
  }

  if (extent < count) t.R.resize(static_cast<size_t>(extent) + 1);
  t.log_h.reserve(t.R.size());
  Real lh = seeds.log_h.empty() ? Real(wp) : seeds.log_h[0].rounded(wp);
  t.log_h.push_back(lh);
  Real lr(wp);
  for (long i = 1; i <= t.size(); ++i) {
    lr.set_log(t.R[static_cast<size_t>(i)]);
    lh.add(lr);
    t.log_h.push_back(lh);
  }
  return ForwardResult{std::move(t), divergence};
}

RecurrenceTable rounded_copy(const RecurrenceTable& t, long bits) {
  RecurrenceTable out(t.potential);
  out.precision_bits = bits;
  out.method = t.method;
  out.R.reserve(t.R.size());
  out.log_h.reserve(t.log_h.size());
  const mpfr_prec_t prec = static_cast<mpfr_prec_t>(bits);
  for (const auto& v : t.R) out.R.push_back(v.rounded(prec));
  for (const auto& v : t.log_h) out.log_h.push_back(v.rounded(prec));
  return out;
}

void export_csv(const RecurrenceTable& t, std::ostream& os) {
  os << "mu,R,log_h\n";
  for (long mu = 0; mu <= t.size(); ++mu) {
    os << mu << ',' << t.R[static_cast<size_t>(mu)].str(20) << ','
       << t.log_h[static_cast<size_t>(mu)].str(20) << '\n';
  }
}

}  // namespace freudlab
