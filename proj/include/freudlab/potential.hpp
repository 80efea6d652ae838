#pragma once

#include <string>
#include <vector>

#include "freudlab/real.hpp"

namespace freudlab {

// Even polynomial potential V(x) = sum_{k=1..d} a_{2k} x^{2k} / (2k) with
// weight scale N. a_{2d} must be positive so exp(-N V) is integrable.
class Potential {
public:
  // coeffs[k-1] = a_{2k}; fewer than d entries are zero-filled.
  static Potential create(int d, long N, std::vector<double> coeffs);

  int d() const noexcept { return d_; }
  long N() const noexcept { return N_; }
  double coeff(int k) const;  // a_{2k}, k = 1..d
  const std::vector<double>& coeffs() const noexcept { return a_; }

  Potential with_coeff(int k, double value) const;  // modified copy
  Potential with_N(long N) const;

private:
  Potential() = default;
  int d_ = 0;
  long N_ = 0;
  std::vector<double> a_;  // a_[k-1] = a_{2k}
};

double eval_potential(const Potential& p, double x);
double eval_potential_derivative(const Potential& p, double x);

// a4c = -sqrt((48/9) a2 a6); requires a2*a6 > 0.
double critical_a4(double a2, double a6);

enum class Regime { two_band_transient, one_band_transient, critical };

struct RegimeReport {
  double a4c;
  Regime classification;
  std::string detail;
};

// Sextic-only taxonomy from the sign of a4 - a4c; tolerance 1e-9*max(1,|a4c|).
RegimeReport classify_regime(const Potential& p);

// Unique nonnegative real root of 10 a6 r^3 + 3 a4 r^2 + a2 r - lambda = 0.
// Throws AmbiguousRootError with all admissible roots when several exist.
double single_band_value(const Potential& p, double lambda);
std::vector<double> single_band_roots(const Potential& p, double lambda);

// (-a4 + sqrt(a4^2 - 4 a2 a6)) / (2 a6); larger root of a6 s^2 + a4 s + a2.
double two_band_sum(const Potential& p);

// Extended-precision evaluation helpers used by the quadrature path. The
// evaluator keeps a_{2k}/(2k) pre-rounded at the working precision.
class PotentialEvaluator {
public:
  PotentialEvaluator(const Potential& p, mpfr_prec_t prec);
  // out = V(x), given u = x^2.
  void value_from_x2(Real& out, const Real& u) const;
  // out = -N * V(x), given u = x^2.
  void neg_n_value_from_x2(Real& out, const Real& u) const;
  mpfr_prec_t prec() const noexcept { return prec_; }

private:
  mpfr_prec_t prec_;
  long N_;
  std::vector<Real> c_;  // c_[k-1] = a_{2k} / (2k)
  mutable Real acc_;
};

}  // namespace freudlab
