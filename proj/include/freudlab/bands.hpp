#pragma once

#include <string>
#include <utility>
#include <vector>

#include "freudlab/potential.hpp"
#include "freudlab/recurrence.hpp"

namespace freudlab {

// (mu, R_mu) pairs partitioned by mu mod m; band r holds mu == r (mod m).
struct ResidueBands {
  int modulus = 1;
  std::vector<std::vector<std::pair<long, double>>> bands;
};

ResidueBands residue_split(const RecurrenceTable& t, int m);

enum class SegmentLabel { one_band, two_band, transient, converged };
const char* segment_label_name(SegmentLabel l);

struct Segment {
  long start = 0;  // inclusive
  long end = 0;    // inclusive
  SegmentLabel label = SegmentLabel::one_band;
};

struct StructureOptions {
  // A window is uniform when the rms residual of a linear fit stays below
  // uniform_tol * |window mean|; two-band when the parity means separate by
  // more than separation_ratio times the detrended in-parity spread.
  double uniform_tol = 0.01;
  double separation_ratio = 10.0;
};

// Labels consecutive windows of `window` indices by the dispersion pattern of
// the residue bands; uniform windows count as OneBand before the first
// oscillatory window and Converged after it.
std::vector<Segment> detect_structure(const RecurrenceTable& t, int m, long window,
                                      const StructureOptions& opts = {});

struct TwoBandFit {
  double A0 = 0.0;  // upper alternating mean
  double A1 = 0.0;  // lower alternating mean
};

struct FitOptions {
  // Largest tolerated ratio of detrended in-parity spread to band separation.
  double max_spread_ratio = 0.2;
};

TwoBandFit two_band_fit(const RecurrenceTable& t, long lo, long hi,
                        const FitOptions& opts = {});

struct ScalingExponents {
  double exponent_N = 0.0;
  double exponent_a4 = 0.0;
};

struct ScalingProbeOptions {
  long fit_length = 40;  // indices fitted after the first 2d are skipped
  long precision_bits = 0;
};

// log-log regression of the fitted A1 against N (at the base a4) and against
// |a4| (at the base N). Needs at least two entries per list.
ScalingExponents scaling_probe_a1(const Potential& base, const std::vector<long>& n_list,
                                  const std::vector<double>& a4_list,
                                  const ScalingProbeOptions& opts = {});

struct TransientReport {
  bool has_transient = false;
  long start = 0;
  long end = 0;
  double fraction_above = 0.0;  // share of s(mu) >= two_band_sum - epsilon
  double epsilon = 0.0;
  double reference_sum = 0.0;  // two_band_sum(p)
  bool pseudo_two_band = false;
  std::string note;
};

// Residue-triplet sums s(mu) = R_mu + R_{mu+1} + R_{mu+2} over the transient
// window, compared against the two-band closed form (d = 3 only).
TransientReport transient_sum_check(const RecurrenceTable& t, const Potential& p,
                                    long window = 30, const StructureOptions& opts = {});

}  // namespace freudlab
