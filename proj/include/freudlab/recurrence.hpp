#pragma once

#include <iosfwd>
#include <vector>

#include "freudlab/potential.hpp"
#include "freudlab/real.hpp"

namespace freudlab {

// Raw weight moments m_j = integral of x^j exp(-N V(x)) over the real line.
// Odd moments vanish by symmetry and are never computed; `even[i]` is m_{2i}.
struct WeightMoments {
  WeightMoments(Potential p, long bits) : potential(std::move(p)), precision_bits(bits) {}
  Potential potential;
  long precision_bits;
  std::vector<Real> even;

  long max_order() const { return 2 * (static_cast<long>(even.size()) - 1); }
  const Real& m(long even_order) const;
};

WeightMoments weight_moments(const Potential& p, long max_order, long precision_bits);

struct RecurrenceTable {
  enum class Method { moment_oracle, freud_forward };

  explicit RecurrenceTable(Potential p) : potential(std::move(p)) {}

  Potential potential;
  std::vector<Real> R;      // indices 0..M, R[0] = 0
  std::vector<Real> log_h;  // indices 0..M, log_h[0] = log m_0
  long precision_bits = 0;
  Method method = Method::moment_oracle;

  long size() const { return static_cast<long>(R.size()) - 1; }
  double r(long mu) const;
  double logh(long mu) const;
};

// Quotient-difference / Chebyshev mapping from moments to R_1..R_count with a
// half-versus-full precision stability check; throws PrecisionError with the
// largest certified index when the check fails before `count`.
RecurrenceTable moments_to_recurrence(const WeightMoments& m, long count);

// Production oracle: moment pipeline with the doubling schedule
// (start at max(256, 8*count) bits unless overridden, double until stable).
RecurrenceTable compute_recurrence(const Potential& p, long count, long precision_bits = 0);

// (mu+1) - N * sum_k a_{2k} * eval(transfer_weights(2k-1,+1,0)); ~0 for a
// valid table.
double freud_residual(const RecurrenceTable& t, long mu);

struct ForwardResult {
  RecurrenceTable table;
  long divergence_index;
};

// Extends the table by solving each Freud equation for its top index, which
// enters linearly with coefficient N a_{2d} R_{mu+1}..R_{mu+d-1}. Divergence
// is the first index whose value drifts from the seed table by more than
// relative 1e-6 (count when it never does).
ForwardResult freud_forward(const Potential& p, const RecurrenceTable& seeds, long count);

RecurrenceTable rounded_copy(const RecurrenceTable& t, long bits);

// CSV with header "mu,R,log_h", 20 significant digits.
void export_csv(const RecurrenceTable& t, std::ostream& os);

// Nonnegative stationary points of V (x = 0 included), ascending.
std::vector<double> stationary_points(const Potential& p);

// Cutoff X* with N (V(X*) - V_min) >= ln2 (tol_bits + max_order log2 X* + 64).
double weight_cutoff(const Potential& p, long tol_bits, long max_order);

}  // namespace freudlab
