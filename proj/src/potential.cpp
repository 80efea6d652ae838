#include "freudlab/potential.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "freudlab/error.hpp"

namespace freudlab {

Potential Potential::create(int d, long N, std::vector<double> coeffs) {
  if (d < 1) throw Error(Errc::invalid_argument, "potential: d must be >= 1");
  if (N < 1) throw Error(Errc::invalid_argument, "potential: N must be >= 1");
  if (static_cast<int>(coeffs.size()) > d)
    throw Error(Errc::invalid_argument, "potential: coefficient list longer than d");
  coeffs.resize(static_cast<size_t>(d), 0.0);
  if (!(coeffs.back() > 0.0))
    throw Error(Errc::invalid_argument, "potential: leading coefficient a_{2d} must be > 0");
  for (double c : coeffs)
    if (!std::isfinite(c)) throw Error(Errc::invalid_argument, "potential: non-finite coefficient");
  Potential p;
  p.d_ = d;
  p.N_ = N;
  p.a_ = std::move(coeffs);
  return p;
}

double Potential::coeff(int k) const {
  if (k < 1 || k > d_) throw Error(Errc::invalid_argument, "potential: coefficient order out of range");
  return a_[static_cast<size_t>(k - 1)];
}

Potential Potential::with_coeff(int k, double value) const {
  std::vector<double> c = a_;
  if (k < 1 || k > d_) throw Error(Errc::invalid_argument, "potential: coefficient order out of range");
  c[static_cast<size_t>(k - 1)] = value;
  return create(d_, N_, std::move(c));
}

Potential Potential::with_N(long N) const { return create(d_, N, a_); }

double eval_potential(const Potential& p, double x) {
  // Horner in u = x^2 over a_{2k}/(2k).
  const double u = x * x;
  double acc = 0.0;
  for (int k = p.d(); k >= 1; --k) acc = acc * u + p.coeff(k) / (2.0 * k);
  return acc * u;
}

double eval_potential_derivative(const Potential& p, double x) {
  const double u = x * x;
  double acc = 0.0;
  for (int k = p.d(); k >= 1; --k) acc = acc * u + p.coeff(k);
  return acc * x;
}

double critical_a4(double a2, double a6) {
  const double prod = a2 * a6;
  if (!(prod > 0.0))
    throw Error(Errc::domain, "critical_a4: a2*a6 must be positive for a real threshold");
  return -std::sqrt(48.0 / 9.0 * prod);
}

RegimeReport classify_regime(const Potential& p) {
  if (p.d() != 3)
    throw Error(Errc::unsupported, "classify_regime: taxonomy is defined for d = 3 only");
  const double a2 = p.coeff(1), a4 = p.coeff(2), a6 = p.coeff(3);
  const double a4c = critical_a4(a2, a6);
  const double tau = 1e-9 * std::max(1.0, std::fabs(a4c));
  RegimeReport r;
  r.a4c = a4c;
  std::ostringstream os;
  if (a4 < a4c - tau) {
    r.classification = Regime::two_band_transient;
    os << "a4 = " << a4 << " < a4c = " << a4c << ": two-band, then transient, then single band";
  } else if (a4 > a4c + tau) {
    r.classification = Regime::one_band_transient;
    os << "a4 = " << a4 << " > a4c = " << a4c << ": one band, then transient, then single band";
  } else {
    r.classification = Regime::critical;
    os << "a4 = " << a4 << " within tolerance of a4c = " << a4c << ": pseudo two-band structure";
  }
  r.detail = os.str();
  return r;
}

namespace {

// Real roots of c3 r^3 + c2 r^2 + c1 r + c0 via extremum bracketing + bisection.
std::vector<double> cubic_real_roots(double c3, double c2, double c1, double c0) {
  auto f = [&](double r) { return ((c3 * r + c2) * r + c1) * r + c0; };

  // Bracket endpoints from the Cauchy bound.
  const double bound =
      1.0 + std::max({std::fabs(c2), std::fabs(c1), std::fabs(c0)}) / std::fabs(c3);
  std::vector<double> pts{-bound};
  // Stationary points of the cubic split the axis into monotone pieces.
  const double qa = 3.0 * c3, qb = 2.0 * c2, qc = c1;
  const double disc = qb * qb - 4.0 * qa * qc;
  if (disc > 0.0) {
    const double sq = std::sqrt(disc);
    double e1 = (-qb - sq) / (2.0 * qa);
    double e2 = (-qb + sq) / (2.0 * qa);
    if (e1 > e2) std::swap(e1, e2);
    if (e1 > -bound && e1 < bound) pts.push_back(e1);
    if (e2 > -bound && e2 < bound) pts.push_back(e2);
  }
  pts.push_back(bound);

  std::vector<double> roots;
  for (size_t i = 0; i + 1 < pts.size(); ++i) {
    double lo = pts[i], hi = pts[i + 1];
    double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) roots.push_back(lo);
    if (!(flo * fhi < 0.0)) continue;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double fm = f(mid);
      if (fm == 0.0 || hi - lo < 1e-16 * (1.0 + std::fabs(mid))) {
        lo = hi = mid;
        break;
      }
      if (flo * fm < 0.0) {
        hi = mid;
      } else {
        lo = mid;
        flo = fm;
      }
    }
    roots.push_back(0.5 * (lo + hi));
  }
  if (f(bound) == 0.0) roots.push_back(bound);
  std::sort(roots.begin(), roots.end());
  // Merge near-duplicates (double roots found from both sides).
  std::vector<double> out;
  for (double r : roots)
    if (out.empty() || r - out.back() > 1e-12 * (1.0 + std::fabs(r))) out.push_back(r);
  return out;
}

}  // namespace

std::vector<double> single_band_roots(const Potential& p, double lambda) {
  if (p.d() != 3)
    throw Error(Errc::unsupported, "single_band_value: defined for d = 3 only");
  if (lambda < 0.0) throw Error(Errc::invalid_argument, "single_band_value: lambda must be >= 0");
  const double a2 = p.coeff(1), a4 = p.coeff(2), a6 = p.coeff(3);
  std::vector<double> all = cubic_real_roots(10.0 * a6, 3.0 * a4, a2, -lambda);
  std::vector<double> admissible;
  for (double r : all) {
    if (r >= -1e-14) admissible.push_back(std::max(r, 0.0));
  }
  return admissible;
}

double single_band_value(const Potential& p, double lambda) {
  std::vector<double> roots = single_band_roots(p, lambda);
  if (roots.empty())
    throw Error(Errc::domain, "single_band_value: no nonnegative real root");
  if (roots.size() > 1)
    throw AmbiguousRootError("single_band_value: several admissible roots", roots);
  return roots.front();
}

double two_band_sum(const Potential& p) {
  if (p.d() != 3) throw Error(Errc::unsupported, "two_band_sum: defined for d = 3 only");
  const double a2 = p.coeff(1), a4 = p.coeff(2), a6 = p.coeff(3);
  const double disc = a4 * a4 - 4.0 * a2 * a6;
  if (disc < 0.0)
    throw Error(Errc::domain, "two_band_sum: negative discriminant, no two-band solution");
  return (-a4 + std::sqrt(disc)) / (2.0 * a6);
}

PotentialEvaluator::PotentialEvaluator(const Potential& p, mpfr_prec_t prec)
    : prec_(prec), N_(p.N()), acc_(prec) {
  c_.reserve(static_cast<size_t>(p.d()));
  for (int k = 1; k <= p.d(); ++k) {
    Real c(p.coeff(k), prec);
    c.div(2L * k);
    c_.push_back(std::move(c));
  }
}

void PotentialEvaluator::value_from_x2(Real& out, const Real& u) const {
  acc_.set_zero();
  for (size_t k = c_.size(); k-- > 0;) {
    acc_.set_fma(acc_, u, c_[k]);
  }
  out.set_mul(acc_, u);
}

void PotentialEvaluator::neg_n_value_from_x2(Real& out, const Real& u) const {
  value_from_x2(out, u);
  out.mul(-N_);
}

}  // namespace freudlab
