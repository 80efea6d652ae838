#include "freudlab/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

#include "freudlab/error.hpp"
#include "freudlab/ladder.hpp"

namespace freudlab {

double MomentSet::m(int k) const {
  if (k == 0) return static_cast<double>(N);
  if (k % 2 != 0) return 0.0;
  auto it = values.find(k);
  if (it == values.end())
    throw Error(Errc::invalid_argument, "moment set: missing M_" + std::to_string(k));
  return it->second;
}

namespace {

const LadderSum& summand_for(int k) {
  static std::mutex mu;
  static std::map<int, LadderSum> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(k);
  if (it == cache.end()) it = cache.emplace(k, moment_summand(k)).first;
  return it->second;
}

}  // namespace

double ladder_moment_sum(const RecurrenceTable& t, int k, long mu_lo, long mu_hi) {
  const LadderSum& sum = summand_for(k);
  if (mu_hi + k / 2 > t.size())
    throw Error(Errc::range, "global_moment: table too short for requested range");
  const mpfr_prec_t prec = static_cast<mpfr_prec_t>(t.precision_bits);
  Real acc(prec);
  for (long mu = mu_lo; mu <= mu_hi; ++mu)
    acc.add(eval_ladder_sum(sum, std::span<const Real>(t.R), mu, prec));
  return acc.to_double();
}

double global_moment(const RecurrenceTable& t, int k, long N) {
  if (N < 1) throw Error(Errc::invalid_argument, "global_moment: N must be >= 1");
  return ladder_moment_sum(t, k, 0, N - 1);
}

MomentSet compute_moment_set(const RecurrenceTable& t, long N, int k_max) {
  MomentSet m;
  m.N = N;
  for (int k = 2; k <= k_max; k += 2) m.values[k] = global_moment(t, k, N);
  return m;
}

namespace {

constexpr mpfr_prec_t kDensityPrec = 192;

// Shared state for evaluating the weighted orthonormal sum on many abscissae.
class FiniteDensityEval {
public:
  FiniteDensityEval(const RecurrenceTable& t, const Potential& p)
      : pe_(p, kDensityPrec),
        n_states_(p.N()),
        u_(kDensityPrec),
        e_(kDensityPrec),
        q0_(kDensityPrec),
        q1_(kDensityPrec),
        q2_(kDensityPrec),
        acc_(kDensityPrec),
        tmp_(kDensityPrec) {
    if (t.size() < n_states_ - 1)
      throw Error(Errc::range, "finite_density: table must cover 0..N-1");
    half_log_h0_ = t.log_h[0].rounded(kDensityPrec);
    half_log_h0_.mul_2exp(-1);
    sqrt_r_.reserve(static_cast<size_t>(n_states_));
    for (long mu = 0; mu < n_states_; ++mu) {
      Real s(kDensityPrec);
      if (mu > 0) s.set_sqrt(t.R[static_cast<size_t>(mu)]);
      sqrt_r_.push_back(std::move(s));
    }
  }

  double operator()(double x) {
    Real xr(x, kDensityPrec);
    u_.set_mul(xr, xr);
    pe_.neg_n_value_from_x2(e_, u_);
    e_.mul_2exp(-1);
    e_.sub(half_log_h0_);
    q0_.set_exp(e_);  // q_0 = exp(-N V / 2 - log h_0 / 2)
    q1_.set_zero();   // q_{-1}
    acc_.set_mul(q0_, q0_);
    for (long mu = 0; mu + 1 < n_states_; ++mu) {
      // q_{mu+1} = (x q_mu - sqrt(R_mu) q_{mu-1}) / sqrt(R_{mu+1})
      tmp_.set_mul(sqrt_r_[static_cast<size_t>(mu)], q1_);
      q2_.set_mul(xr, q0_);
      q2_.sub(tmp_);
      q2_.div(sqrt_r_[static_cast<size_t>(mu + 1)]);
      q1_ = q0_;
      q0_ = q2_;
      acc_.set_fma(q0_, q0_, acc_);
    }
    return acc_.to_double();
  }

private:
  PotentialEvaluator pe_;
  long n_states_;
  Real half_log_h0_;
  std::vector<Real> sqrt_r_;
  Real u_, e_, q0_, q1_, q2_, acc_, tmp_;
};

}  // namespace

double finite_density(const RecurrenceTable& t, const Potential& p, double x) {
  FiniteDensityEval eval(t, p);
  return eval(x);
}

DensityCurve sample_finite_density(const RecurrenceTable& t, const Potential& p, double lo,
                                   double hi, int n) {
  if (n < 2 || !(hi > lo))
    throw Error(Errc::invalid_argument, "sample_finite_density: bad grid");
  FiniteDensityEval eval(t, p);
  DensityCurve c;
  c.kind = DensityCurve::Kind::finite_n;
  c.N = p.N();
  c.samples.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double x = lo + (hi - lo) * i / (n - 1);
    c.samples.emplace_back(x, eval(x));
  }
  return c;
}

namespace {

double resolvent_bracket(const Potential& p, const MomentSet& m, double x) {
  const double u = x * x;
  const double N = static_cast<double>(m.N);
  std::vector<double> upow(static_cast<size_t>(p.d()), 1.0);
  for (size_t j = 1; j < upow.size(); ++j) upow[j] = upow[j - 1] * u;
  double s = 0.0;
  for (int k = 1; k <= p.d(); ++k) {
    double inner = 0.0;
    for (int i = 0; i <= 2 * k - 2; i += 2) {
      inner += upow[static_cast<size_t>(k - 1 - i / 2)] * m.m(i);
    }
    s += p.coeff(k) * inner;
  }
  s /= N;
  const double vp = eval_potential_derivative(p, x);
  return s - 0.25 * vp * vp;
}

}  // namespace

double asymptotic_density(const Potential& p, const MomentSet& m, double x) {
  for (int i = 2; i <= 2 * p.d() - 2; i += 2) m.m(i);  // validate presence
  const double s = resolvent_bracket(p, m, x);
  if (s <= 0.0) return 0.0;
  return static_cast<double>(m.N) / M_PI * std::sqrt(s);
}

DensityCurve sample_asymptotic_density(const Potential& p, const MomentSet& m, double lo,
                                       double hi, int n) {
  if (n < 2 || !(hi > lo))
    throw Error(Errc::invalid_argument, "sample_asymptotic_density: bad grid");
  DensityCurve c;
  c.kind = DensityCurve::Kind::asymptotic;
  c.N = m.N;
  c.samples.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double x = lo + (hi - lo) * i / (n - 1);
    c.samples.emplace_back(x, asymptotic_density(p, m, x));
  }
  return c;
}

std::vector<std::pair<double, double>> support_bands(const DensityCurve& curve) {
  double peak = 0.0;
  for (const auto& [x, rho] : curve.samples) peak = std::max(peak, rho);
  std::vector<std::pair<double, double>> bands;
  if (peak <= 0.0) return bands;
  const double thr = 1e-6 * peak;
  bool in_band = false;
  double start = 0.0, last = 0.0;
  for (const auto& [x, rho] : curve.samples) {
    if (rho > thr) {
      if (!in_band) {
        in_band = true;
        start = x;
      }
      last = x;
    } else if (in_band) {
      bands.emplace_back(start, last);
      in_band = false;
    }
  }
  if (in_band) bands.emplace_back(start, last);
  return bands;
}

namespace {

template <class F>
double simpson(const DensityCurve& curve, F&& value) {
  const auto& s = curve.samples;
  const size_t n = s.size();
  if (n < 3) throw Error(Errc::invalid_argument, "density integral: need at least 3 samples");
  const double h = (s.back().first - s.front().first) / static_cast<double>(n - 1);
  const size_t n_odd = (n % 2 == 1) ? n : n - 1;
  double acc = value(s[0]) + value(s[n_odd - 1]);
  for (size_t i = 1; i + 1 < n_odd; ++i) acc += value(s[i]) * ((i % 2 == 1) ? 4.0 : 2.0);
  acc *= h / 3.0;
  if (n_odd != n) acc += 0.5 * h * (value(s[n - 2]) + value(s[n - 1]));
  return acc;
}

}  // namespace

double density_norm(const DensityCurve& curve) {
  return simpson(curve, [](const std::pair<double, double>& s) { return s.second; });
}

double curve_moment(const DensityCurve& curve, int k) {
  return simpson(curve, [k](const std::pair<double, double>& s) {
    return std::pow(s.first, static_cast<double>(k)) * s.second;
  });
}

std::vector<ResolventTerm> resolvent_structure(int d) {
  if (d < 1) throw Error(Errc::invalid_argument, "resolvent_structure: d must be >= 1");
  std::vector<ResolventTerm> terms;
  for (int k = 1; k <= d; ++k) {
    for (int i = 0; i <= 2 * k - 2; i += 2) {
      terms.push_back(ResolventTerm{2 * k - 2 - i, i, 2 * k});
    }
  }
  std::sort(terms.begin(), terms.end());
  return terms;
}

std::string render_resolvent(int d) {
  const auto terms = resolvent_structure(d);
  // Group by x power, ascending; M_0/N prints as a bare coefficient.
  std::ostringstream os;
  os << "S(x) =";
  int last_p = -1;
  bool first_group = true;
  for (size_t i = 0; i < terms.size();) {
    const int p = terms[i].x_power;
    if (!first_group) os << " +";
    first_group = false;
    os << ' ';
    if (p > 0) os << "x^" << p << "*";
    os << '(';
    bool first = true;
    size_t j = i;
    for (; j < terms.size() && terms[j].x_power == p; ++j) {
      if (!first) os << " + ";
      first = false;
      os << 'a' << terms[j].coeff_order;
      if (terms[j].moment_index > 0) os << "*M" << terms[j].moment_index << "/N";
    }
    os << ')';
    i = j;
    last_p = p;
  }
  (void)last_p;
  os << " - (V'(x))^2/4, V'(x) = x*(";
  for (int k = 1; k <= d; ++k) {
    if (k > 1) os << " + ";
    os << 'a' << 2 * k;
    if (k > 1) os << "*x^" << 2 * (k - 1);
  }
  os << ")";
  return os.str();
}

}  // namespace freudlab
