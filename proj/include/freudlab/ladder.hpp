#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "freudlab/real.hpp"

namespace freudlab {

// Product of recurrence coefficients R_{mu+j}: `offsets` lists the j's,
// sorted ascending with repetition; `coeff` is the path multiplicity.
struct PathMonomial {
  std::uint64_t coeff = 1;
  std::vector<int> offsets;

  friend bool operator==(const PathMonomial&, const PathMonomial&) = default;
};

enum class LadderKind { off_diagonal, diagonal };

// Sum over up/down step sequences on the index ladder. An up step carries
// factor 1, a down step taken from level mu+j carries factor R_{mu+j}.
struct LadderSum {
  LadderKind kind = LadderKind::diagonal;
  int length = 0;
  std::vector<PathMonomial> monomials;

  friend bool operator==(const LadderSum&, const LadderSum&) = default;
};

// All weighted paths of `length` steps from level mu+from_offset to
// mu+to_offset, canonicalized. Parity mismatch yields an empty sum.
LadderSum transfer_weights(int length, int from_offset, int to_offset);

// Terms of the generalized Freud equation
//   mu + 1 = N * sum_k a_{2k} * eval(term_k)
// as pairs (2k, transfer_weights(2k-1, +1, 0)) for k = 1..d.
std::vector<std::pair<int, LadderSum>> freud_equation(int d);

// Summand C_mu of the global moment M_k = sum_{mu} C_mu; k even, >= 2.
LadderSum moment_summand(int k);

LadderSum canonicalize(LadderSum s);

enum class RenderFormat { latex, json };
std::string render(const LadderSum& s, RenderFormat format);
LadderSum parse_json(const std::string& text);

std::uint64_t total_multiplicity(const LadderSum& s);

// Numeric evaluation with the boundary convention R_j = 0 for j <= 0.
// R spans indices 0..M of a recurrence table; throws on mu+j > M.
Real eval_ladder_sum(const LadderSum& s, std::span<const Real> R, long mu, mpfr_prec_t prec);

}  // namespace freudlab
