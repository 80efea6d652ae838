#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "freudlab/potential.hpp"
#include "freudlab/recurrence.hpp"

namespace freudlab {

// Even global moments M_k of the level density at a given N; M_0 = N.
struct MomentSet {
  long N = 0;
  std::map<int, double> values;  // key k (even, >= 2) -> M_k

  double m(int k) const;  // M_0 = N handled here
};

struct DensityCurve {
  enum class Kind { finite_n, asymptotic };
  Kind kind = Kind::finite_n;
  long N = 0;
  std::vector<std::pair<double, double>> samples;  // (x, rho), x ascending
};

// M_k = sum_{mu=0}^{N-1} eval(moment_summand(k), t, mu).
double global_moment(const RecurrenceTable& t, int k, long N);

// Same ladder sum over an arbitrary index range [mu_lo, mu_hi] inclusive.
double ladder_moment_sum(const RecurrenceTable& t, int k, long mu_lo, long mu_hi);

MomentSet compute_moment_set(const RecurrenceTable& t, long N, int k_max);

// Level density sum_{mu<N} q_mu(x)^2 with the weighted orthonormal recursion
// q_{mu+1} = (x q_mu - sqrt(R_mu) q_{mu-1}) / sqrt(R_{mu+1}).
double finite_density(const RecurrenceTable& t, const Potential& p, double x);
DensityCurve sample_finite_density(const RecurrenceTable& t, const Potential& p, double lo,
                                   double hi, int n);

// Large-N resolvent density: rho(x) = (N/pi) sqrt(max(S(x), 0)) with
// S(x) = (1/N) sum_k a_{2k} sum_{i=0,2,..,2k-2} x^{2k-2-i} M_i - (V'(x))^2/4.
double asymptotic_density(const Potential& p, const MomentSet& m, double x);
DensityCurve sample_asymptotic_density(const Potential& p, const MomentSet& m, double lo,
                                       double hi, int n);

// Maximal intervals where rho exceeds 1e-6 * max(rho).
std::vector<std::pair<double, double>> support_bands(const DensityCurve& curve);

// Composite Simpson integral of the sampled curve (>= 3 samples).
double density_norm(const DensityCurve& curve);

// Simpson integral of x^k * rho over the sampled curve.
double curve_moment(const DensityCurve& curve, int k);

// Symbolic structure of the moment bracket of S(x): each term is
// a_{2k} x^p M_i / N with 2k = p + i + 2. Canonically ordered.
struct ResolventTerm {
  int x_power;       // p
  int moment_index;  // i
  int coeff_order;   // 2k = p + i + 2

  friend bool operator==(const ResolventTerm&, const ResolventTerm&) = default;
  friend auto operator<=>(const ResolventTerm&, const ResolventTerm&) = default;
};
std::vector<ResolventTerm> resolvent_structure(int d);

// Canonical text of S(x), e.g. "(a4 M2 + a6 M4)/N + ... - (V'(x))^2/4".
std::string render_resolvent(int d);

}  // namespace freudlab
