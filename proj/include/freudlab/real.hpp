#pragma once

#include <mpfr.h>

#include <cstdint>

#include <string>
#include <utility>

namespace freudlab {

// Thin RAII wrapper over mpfr_t. Every value carries its own precision;
// binary operators round to the wider operand, in-place set_* methods round
// to the destination. Rounding mode is to-nearest throughout.
class Real {
public:
  explicit Real(mpfr_prec_t prec = 64) {
    mpfr_init2(v_, prec);
    mpfr_set_zero(v_, 1);
  }
  Real(double d, mpfr_prec_t prec) {
    mpfr_init2(v_, prec);
    mpfr_set_d(v_, d, MPFR_RNDN);
  }
  Real(long n, mpfr_prec_t prec) {
    mpfr_init2(v_, prec);
    mpfr_set_si(v_, n, MPFR_RNDN);
  }
  Real(const Real& o) {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_set(v_, o.v_, MPFR_RNDN);
  }
  Real(Real&& o) noexcept {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_swap(v_, o.v_);
  }
  Real& operator=(const Real& o) {
    if (this != &o) {
      mpfr_set_prec(v_, mpfr_get_prec(o.v_));
      mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    return *this;
  }
  Real& operator=(Real&& o) noexcept {
    if (this != &o) mpfr_swap(v_, o.v_);
    return *this;
  }
  ~Real() { mpfr_clear(v_); }

  mpfr_ptr raw() noexcept { return v_; }
  mpfr_srcptr raw() const noexcept { return v_; }

  mpfr_prec_t prec() const noexcept { return mpfr_get_prec(v_); }

  // Returns a copy rounded to `prec` bits.
  Real rounded(mpfr_prec_t prec) const {
    Real r(prec);
    mpfr_set(r.v_, v_, MPFR_RNDN);
    return r;
  }

  double to_double() const noexcept { return mpfr_get_d(v_, MPFR_RNDN); }
  bool is_zero() const noexcept { return mpfr_zero_p(v_) != 0; }
  int sign() const noexcept { return mpfr_sgn(v_); }

  // Decimal string with `digits` significant digits (printf %.*Rg format).
  std::string str(int digits) const;

  void set(double d) { mpfr_set_d(v_, d, MPFR_RNDN); }
  void set(long n) { mpfr_set_si(v_, n, MPFR_RNDN); }
  void set_u64(std::uint64_t n) { mpfr_set_ui(v_, static_cast<unsigned long>(n), MPFR_RNDN); }
  void set(const Real& o) { mpfr_set(v_, o.v_, MPFR_RNDN); }
  void set_zero() { mpfr_set_zero(v_, 1); }
  // 2^e, exact
  void set_pow2(long e) { mpfr_set_ui_2exp(v_, 1u, e, MPFR_RNDN); }

  // In-place arithmetic; destination precision governs rounding.
  void set_add(const Real& a, const Real& b) { mpfr_add(v_, a.v_, b.v_, MPFR_RNDN); }
  void set_sub(const Real& a, const Real& b) { mpfr_sub(v_, a.v_, b.v_, MPFR_RNDN); }
  void set_mul(const Real& a, const Real& b) { mpfr_mul(v_, a.v_, b.v_, MPFR_RNDN); }
  void set_div(const Real& a, const Real& b) { mpfr_div(v_, a.v_, b.v_, MPFR_RNDN); }
  void set_fma(const Real& a, const Real& b, const Real& c) {
    mpfr_fma(v_, a.raw(), b.raw(), c.raw(), MPFR_RNDN);  // a*b + c
  }
  void set_neg(const Real& a) { mpfr_neg(v_, a.v_, MPFR_RNDN); }
  void set_sqrt(const Real& a) { mpfr_sqrt(v_, a.v_, MPFR_RNDN); }
  void set_exp(const Real& a) { mpfr_exp(v_, a.v_, MPFR_RNDN); }
  void set_log(const Real& a) { mpfr_log(v_, a.v_, MPFR_RNDN); }
  void set_abs(const Real& a) { mpfr_abs(v_, a.v_, MPFR_RNDN); }

  void add(const Real& a) { mpfr_add(v_, v_, a.v_, MPFR_RNDN); }
  void sub(const Real& a) { mpfr_sub(v_, v_, a.v_, MPFR_RNDN); }
  void mul(const Real& a) { mpfr_mul(v_, v_, a.v_, MPFR_RNDN); }
  void mul(long n) { mpfr_mul_si(v_, v_, n, MPFR_RNDN); }
  void mul(double d) { mpfr_mul_d(v_, v_, d, MPFR_RNDN); }
  void div(const Real& a) { mpfr_div(v_, v_, a.v_, MPFR_RNDN); }
  void div(long n) { mpfr_div_si(v_, v_, n, MPFR_RNDN); }
  void mul_2exp(long e) { mpfr_mul_2si(v_, v_, e, MPFR_RNDN); }

  friend Real operator+(const Real& a, const Real& b) {
    Real r(wider(a, b));
    r.set_add(a, b);
    return r;
  }
  friend Real operator-(const Real& a, const Real& b) {
    Real r(wider(a, b));
    r.set_sub(a, b);
    return r;
  }
  friend Real operator*(const Real& a, const Real& b) {
    Real r(wider(a, b));
    r.set_mul(a, b);
    return r;
  }
  friend Real operator/(const Real& a, const Real& b) {
    Real r(wider(a, b));
    r.set_div(a, b);
    return r;
  }
  friend Real operator-(const Real& a) {
    Real r(a.prec());
    r.set_neg(a);
    return r;
  }

  friend bool operator<(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_) < 0; }
  friend bool operator>(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_) > 0; }
  friend bool operator<=(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_) <= 0; }
  friend bool operator>=(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_) >= 0; }
  friend bool operator==(const Real& a, const Real& b) { return mpfr_cmp(a.v_, b.v_) == 0; }
  bool less_than(double d) const { return mpfr_cmp_d(v_, d) < 0; }
  bool greater_than(double d) const { return mpfr_cmp_d(v_, d) > 0; }

  static Real pi(mpfr_prec_t prec) {
    Real r(prec);
    mpfr_const_pi(r.v_, MPFR_RNDN);
    return r;
  }
  static Real exp_of(const Real& a, mpfr_prec_t prec) {
    Real r(prec);
    r.set_exp(a);
    return r;
  }
  static Real sqrt_of(const Real& a, mpfr_prec_t prec) {
    Real r(prec);
    r.set_sqrt(a);
    return r;
  }
  static Real log_of(const Real& a, mpfr_prec_t prec) {
    Real r(prec);
    r.set_log(a);
    return r;
  }

private:
  static mpfr_prec_t wider(const Real& a, const Real& b) {
    return a.prec() > b.prec() ? a.prec() : b.prec();
  }
  mpfr_t v_;
};

// |a - b| / max(|b|, tiny) as double; for stability comparisons.
double rel_diff(const Real& a, const Real& b);

}  // namespace freudlab
