#include "freudlab/real.hpp"

#include <cmath>
#include <cstdio>
#include <vector>

namespace freudlab {

std::string Real::str(int digits) const {
  if (digits < 1) digits = 1;
  int n = mpfr_snprintf(nullptr, 0, "%.*Rg", digits, v_);
  std::vector<char> buf(static_cast<size_t>(n) + 1);
  mpfr_snprintf(buf.data(), buf.size(), "%.*Rg", digits, v_);
  return std::string(buf.data());
}

double rel_diff(const Real& a, const Real& b) {
  Real d(a.prec() > b.prec() ? a.prec() : b.prec());
  d.set_sub(a, b);
  d.set_abs(d);
  Real s(b.prec());
  s.set_abs(b);
  if (s.is_zero()) return d.is_zero() ? 0.0 : HUGE_VAL;
  d.div(s);
  return d.to_double();
}

}  // namespace freudlab
