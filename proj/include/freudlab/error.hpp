#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace freudlab {

enum class Errc {
  invalid_argument = 1,
  domain = 2,
  precision = 3,
  range = 4,
  fit = 5,
  ambiguous = 6,
  unsupported = 7,
  parse = 8,
  singular = 9,
  internal = 10,
};

class Error : public std::runtime_error {
public:
  Error(Errc code, std::string msg) : std::runtime_error(std::move(msg)), code_(code) {}
  Errc code() const noexcept { return code_; }

private:
  Errc code_;
};

// Requested precision cannot resolve the computation; carries a workable minimum.
class PrecisionError : public Error {
public:
  PrecisionError(std::string msg, long suggested_bits, long certified_index = -1)
      : Error(Errc::precision, std::move(msg)),
        suggested_bits_(suggested_bits),
        certified_index_(certified_index) {}
  long suggested_bits() const noexcept { return suggested_bits_; }
  long certified_index() const noexcept { return certified_index_; }

private:
  long suggested_bits_;
  long certified_index_;
};

// A root query had several admissible answers; carries all of them, ascending.
class AmbiguousRootError : public Error {
public:
  AmbiguousRootError(std::string msg, std::vector<double> roots)
      : Error(Errc::ambiguous, std::move(msg)), roots_(std::move(roots)) {}
  const std::vector<double>& roots() const noexcept { return roots_; }

private:
  std::vector<double> roots_;
};

}  // namespace freudlab
