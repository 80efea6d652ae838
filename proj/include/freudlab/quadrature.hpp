#pragma once

#include <functional>
#include <span>
#include <vector>

#include "freudlab/real.hpp"

namespace freudlab {

// Tanh-sinh (double-exponential) rule over finite panels at a fixed working
// precision. Node data is computed lazily per level and reused across panels,
// so repeated integrations of different integrands share the transform cost.
//
// The integrand callback fills `out` (ncomp accumul-ready values) for a given
// abscissa x; all components are integrated simultaneously and convergence is
// required for each of them.
class TanhSinh {
public:
  using Integrand = std::function<void(std::span<Real> out, const Real& x)>;

  TanhSinh(mpfr_prec_t prec, long tol_bits);

  // Integrates f over [a, b]. abs_floor_log2, when given, supplies a
  // per-component absolute convergence floor 2^floor (protects panels whose
  // true value is negligible relative to an external scale).
  std::vector<Real> integrate(const Real& a, const Real& b, int ncomp, const Integrand& f,
                              const std::vector<long>* abs_floor_log2 = nullptr) const;

  mpfr_prec_t prec() const noexcept { return prec_; }
  long nodes_used() const noexcept { return nodes_used_; }

private:
  struct Node {
    Real q;  // 1 - tanh((pi/2) sinh t); offset factor from the panel ends
    Real w;  // (pi/2) cosh t * sech^2((pi/2) sinh t)
  };

  void ensure_level(int level) const;

  mpfr_prec_t prec_;
  long tol_bits_;
  double t_max_;
  int hard_max_level_;
  mutable std::vector<std::vector<Node>> levels_;
  mutable long nodes_used_ = 0;
};

}  // namespace freudlab
