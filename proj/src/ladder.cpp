#include "freudlab/ladder.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>

#include <nlohmann/json.hpp>

#include "freudlab/error.hpp"

namespace freudlab {

namespace {

std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
  if (a > UINT64_MAX - b)
    throw Error(Errc::range, "ladder: path multiplicity exceeds 64-bit range");
  return a + b;
}

LadderKind kind_for_length(int length) {
  return (length % 2 != 0) ? LadderKind::off_diagonal : LadderKind::diagonal;
}

}  // namespace

LadderSum canonicalize(LadderSum s) {
  for (auto& m : s.monomials) std::sort(m.offsets.begin(), m.offsets.end());
  std::sort(s.monomials.begin(), s.monomials.end(),
            [](const PathMonomial& a, const PathMonomial& b) { return a.offsets < b.offsets; });
  std::vector<PathMonomial> merged;
  for (auto& m : s.monomials) {
    if (m.coeff == 0) continue;
    if (!merged.empty() && merged.back().offsets == m.offsets) {
      merged.back().coeff = checked_add(merged.back().coeff, m.coeff);
    } else {
      merged.push_back(std::move(m));
    }
  }
  s.monomials = std::move(merged);
  return s;
}

LadderSum transfer_weights(int length, int from_offset, int to_offset) {
  if (length < 1) throw Error(Errc::invalid_argument, "transfer_weights: length must be >= 1");
  LadderSum out;
  out.length = length;
  out.kind = kind_for_length(length);

  const int gap = std::abs(from_offset - to_offset);
  if (gap > length || (length - gap) % 2 != 0) return out;  // unreachable target

  // DP over (current level, multiset of down-step levels).
  using State = std::map<std::vector<int>, std::uint64_t>;
  std::map<int, State> cur;
  cur[from_offset][{}] = 1;
  for (int step = 0; step < length; ++step) {
    const int remaining = length - step - 1;
    std::map<int, State> next;
    for (auto& [lvl, states] : cur) {
      for (auto& [offs, coeff] : states) {
        // up
        if (std::abs(lvl + 1 - to_offset) <= remaining) {
          auto& c = next[lvl + 1][offs];
          c = checked_add(c, coeff);
        }
        // down, contributing factor R_{mu+lvl}
        if (std::abs(lvl - 1 - to_offset) <= remaining) {
          std::vector<int> o = offs;
          o.insert(std::upper_bound(o.begin(), o.end(), lvl), lvl);
          auto& c = next[lvl - 1][std::move(o)];
          c = checked_add(c, coeff);
        }
      }
    }
    cur = std::move(next);
  }
  auto it = cur.find(to_offset);
  if (it != cur.end()) {
    for (auto& [offs, coeff] : it->second) out.monomials.push_back({coeff, offs});
  }
  return canonicalize(std::move(out));
}

std::vector<std::pair<int, LadderSum>> freud_equation(int d) {
  if (d < 1) throw Error(Errc::invalid_argument, "freud_equation: d must be >= 1");
  std::vector<std::pair<int, LadderSum>> terms;
  terms.reserve(static_cast<size_t>(d));
  for (int k = 1; k <= d; ++k) terms.emplace_back(2 * k, transfer_weights(2 * k - 1, +1, 0));
  return terms;
}

LadderSum moment_summand(int k) {
  if (k < 2 || k % 2 != 0)
    throw Error(Errc::domain, "moment_summand: k must be even and >= 2 (odd moments vanish)");
  return transfer_weights(k, 0, 0);
}

namespace {

std::string latex_factor(int offset, int power) {
  std::string s = "R_{\\mu";
  if (offset > 0) s += "+" + std::to_string(offset);
  if (offset < 0) s += std::to_string(offset);
  s += "}";
  if (power > 1) s += "^" + std::to_string(power);
  return s;
}

std::string render_latex(const LadderSum& s) {
  if (s.monomials.empty()) return "0";
  std::string out;
  bool first_term = true;
  for (const auto& m : s.monomials) {
    if (!first_term) out += "+";
    first_term = false;
    if (m.coeff != 1) out += std::to_string(m.coeff);
    for (size_t i = 0; i < m.offsets.size();) {
      size_t j = i;
      while (j < m.offsets.size() && m.offsets[j] == m.offsets[i]) ++j;
      out += latex_factor(m.offsets[i], static_cast<int>(j - i));
      i = j;
    }
    if (m.offsets.empty()) out += "1";
  }
  return out;
}

std::string render_json(const LadderSum& s) {
  nlohmann::ordered_json j;
  j["kind"] = (s.kind == LadderKind::off_diagonal) ? "offdiag" : "diag";
  j["length"] = s.length;
  j["terms"] = nlohmann::ordered_json::array();
  for (const auto& m : s.monomials) {
    nlohmann::ordered_json t;
    t["coeff"] = m.coeff;
    t["offsets"] = m.offsets;
    j["terms"].push_back(std::move(t));
  }
  return j.dump();
}

}  // namespace

std::string render(const LadderSum& s, RenderFormat format) {
  return format == RenderFormat::latex ? render_latex(s) : render_json(s);
}

LadderSum parse_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::parse, std::string("ladder: bad json: ") + e.what());
  }
  LadderSum s;
  try {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "offdiag") {
      s.kind = LadderKind::off_diagonal;
    } else if (kind == "diag") {
      s.kind = LadderKind::diagonal;
    } else {
      throw Error(Errc::parse, "ladder: kind must be 'offdiag' or 'diag'");
    }
    s.length = j.at("length").get<int>();
    for (const auto& t : j.at("terms")) {
      PathMonomial m;
      m.coeff = t.at("coeff").get<std::uint64_t>();
      m.offsets = t.at("offsets").get<std::vector<int>>();
      s.monomials.push_back(std::move(m));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::parse, std::string("ladder: bad json schema: ") + e.what());
  }
  if (s.length < 1 || kind_for_length(s.length) != s.kind)
    throw Error(Errc::parse, "ladder: kind/length parity mismatch");
  return canonicalize(std::move(s));
}

std::uint64_t total_multiplicity(const LadderSum& s) {
  std::uint64_t total = 0;
  for (const auto& m : s.monomials) total = checked_add(total, m.coeff);
  return total;
}

Real eval_ladder_sum(const LadderSum& s, std::span<const Real> R, long mu, mpfr_prec_t prec) {
  const long top = static_cast<long>(R.size()) - 1;
  Real sum(prec);
  Real term(prec);
  Real c(prec);
  for (const auto& m : s.monomials) {
    bool zero = false;
    term.set(static_cast<long>(1));
    for (int off : m.offsets) {
      const long idx = mu + off;
      if (idx <= 0) {
        zero = true;  // R_j = 0 for j <= 0
        break;
      }
      if (idx > top)
        throw Error(Errc::range, "eval_ladder_sum: index " + std::to_string(idx) +
                                     " beyond table length " + std::to_string(top));
      term.mul(R[static_cast<size_t>(idx)]);
    }
    if (zero) continue;
    c.set_u64(m.coeff);
    sum.set_fma(c, term, sum);
  }
  return sum;
}

}  // namespace freudlab
