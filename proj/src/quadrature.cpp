#include "freudlab/quadrature.hpp"

#include <cmath>

#include "freudlab/error.hpp"

namespace freudlab {

TanhSinh::TanhSinh(mpfr_prec_t prec, long tol_bits) : prec_(prec), tol_bits_(tol_bits) {
  // Truncate where the end-point offset q drops below the tolerance floor.
  const double pad = 32.0;
  t_max_ = std::asinh(((static_cast<double>(tol_bits) + pad) * M_LN2 + 2.0) / M_PI);
  hard_max_level_ = 13;
  levels_.reserve(8);
}

void TanhSinh::ensure_level(int level) const {
  while (static_cast<int>(levels_.size()) <= level) {
    const int l = static_cast<int>(levels_.size());
    std::vector<Node> nodes;
    const double h = std::ldexp(1.0, -l);
    // Level 0 holds t = 0, 1, 2, ...; level l > 0 holds odd multiples of h.
    std::vector<double> ts;
    if (l == 0) {
      for (double t = 0.0; t <= t_max_; t += 1.0) ts.push_back(t);
    } else {
      for (double t = h; t <= t_max_; t += 2.0 * h) ts.push_back(t);
    }
    Real u(prec_), g(prec_), sh(prec_), ch(prec_), one_plus_g(prec_), tmp(prec_);
    const Real half_pi = [&] {
      Real r = Real::pi(prec_);
      r.mul_2exp(-1);
      return r;
    }();
    nodes.reserve(ts.size());
    for (double t : ts) {
      Node n{Real(prec_), Real(prec_)};
      if (t == 0.0) {
        n.q.set(1L);
        n.w.set(half_pi);
      } else {
        Real tr(t, prec_);
        mpfr_sinh_cosh(sh.raw(), ch.raw(), tr.raw(), MPFR_RNDN);
        u.set_mul(half_pi, sh);
        u.mul_2exp(1);
        u.set_neg(u);
        g.set_exp(u);  // g = exp(-2u) = exp(-pi sinh t)
        one_plus_g.set(1L);
        one_plus_g.add(g);
        // q = 2 g / (1 + g)
        n.q.set_div(g, one_plus_g);
        n.q.mul_2exp(1);
        // w = (pi/2) cosh t * 4 g / (1+g)^2
        tmp.set_mul(one_plus_g, one_plus_g);
        n.w.set_div(g, tmp);
        n.w.mul_2exp(2);
        n.w.mul(ch);
        n.w.mul(half_pi);
      }
      nodes.push_back(std::move(n));
    }
    levels_.push_back(std::move(nodes));
  }
}

std::vector<Real> TanhSinh::integrate(const Real& a, const Real& b, int ncomp, const Integrand& f,
                                      const std::vector<long>* abs_floor_log2) const {
  std::vector<Real> total(static_cast<size_t>(ncomp), Real(prec_));
  if (mpfr_cmp(a.raw(), b.raw()) >= 0) return total;

  Real half_width(prec_), x(prec_), off(prec_);
  half_width.set_sub(b, a);
  half_width.mul_2exp(-1);

  std::vector<Real> fx(static_cast<size_t>(ncomp), Real(prec_));
  std::vector<Real> level_sum(static_cast<size_t>(ncomp), Real(prec_));
  std::vector<Real> prev(static_cast<size_t>(ncomp), Real(prec_));
  Real diff(prec_), bound(prec_);

  // Floors refer to the final integral; the level sums lack the half-width
  // factor, so scale the floors accordingly.
  std::vector<Real> floor_scaled;
  if (abs_floor_log2) {
    floor_scaled.reserve(static_cast<size_t>(ncomp));
    for (int c = 0; c < ncomp; ++c) {
      Real fv(prec_);
      fv.set_pow2((*abs_floor_log2)[static_cast<size_t>(c)]);
      fv.div(half_width);
      floor_scaled.push_back(std::move(fv));
    }
  }

  auto accumulate_node = [&](const Node& n, bool both_sides) {
    off.set_mul(half_width, n.q);
    // x+ = b - off
    x.set_sub(b, off);
    f(std::span<Real>(fx), x);
    for (int c = 0; c < ncomp; ++c) level_sum[c].set_fma(n.w, fx[c], level_sum[c]);
    if (both_sides) {
      // x- = a + off
      x.set_add(a, off);
      f(std::span<Real>(fx), x);
      for (int c = 0; c < ncomp; ++c) level_sum[c].set_fma(n.w, fx[c], level_sum[c]);
    }
    ++nodes_used_;
  };

  bool converged = false;
  for (int level = 0; level <= hard_max_level_ && !converged; ++level) {
    ensure_level(level);
    for (auto& s : level_sum) s.set_zero();
    const auto& nodes = levels_[static_cast<size_t>(level)];
    for (size_t i = 0; i < nodes.size(); ++i) {
      // t = 0 maps both sides onto the midpoint; count it once.
      accumulate_node(nodes[i], !(level == 0 && i == 0));
    }
    const long hexp = -level;
    if (level == 0) {
      for (int c = 0; c < ncomp; ++c) total[c].set(level_sum[c]);
    } else {
      for (int c = 0; c < ncomp; ++c) {
        prev[c].set(total[c]);
        total[c].mul_2exp(-1);
        level_sum[c].mul_2exp(hexp);
        total[c].add(level_sum[c]);
      }
      if (level >= 3) {
        converged = true;
        for (int c = 0; c < ncomp && converged; ++c) {
          diff.set_sub(total[c], prev[c]);
          diff.set_abs(diff);
          bound.set_abs(total[c]);
          bound.mul_2exp(-tol_bits_);
          if (abs_floor_log2 && bound < floor_scaled[static_cast<size_t>(c)])
            bound.set(floor_scaled[static_cast<size_t>(c)]);
          if (diff > bound) converged = false;
        }
      }
    }
  }
  if (!converged)
    throw PrecisionError("tanh-sinh: no convergence within level budget",
                         2 * tol_bits_);
  // Scale by half-width (the h factors were applied per level).
  for (auto& c : total) c.mul(half_width);
  return total;
}

}  // namespace freudlab
