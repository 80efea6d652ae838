#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "freudlab.h"
#include "svg.hpp"

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

struct CliError {
  int exit_code;
  std::string message;
};

int exit_code_for(fl_status s) {
  switch (s) {
    case FL_OK: return 0;
    case FL_EINVAL:
    case FL_EPARSE: return 2;
    case FL_EPRECISION: return 3;
    default: return 4;
  }
}

void check(fl_status s) {
  if (s != FL_OK) throw CliError{exit_code_for(s), fl_last_error()};
}

std::string take_string(char* s) {
  std::string out(s ? s : "");
  fl_string_free(s);
  return out;
}

struct PotentialDeleter {
  void operator()(fl_potential* p) const { fl_potential_free(p); }
};
struct TableDeleter {
  void operator()(fl_rtable* t) const { fl_rtable_free(t); }
};
struct DensityDeleter {
  void operator()(fl_density* c) const { fl_density_free(c); }
};
struct LadderDeleter {
  void operator()(fl_ladder* l) const { fl_ladder_free(l); }
};
using PotentialPtr = std::unique_ptr<fl_potential, PotentialDeleter>;
using TablePtr = std::unique_ptr<fl_rtable, TableDeleter>;
using DensityPtr = std::unique_ptr<fl_density, DensityDeleter>;
using LadderPtr = std::unique_ptr<fl_ladder, LadderDeleter>;

struct Config {
  int d = 0;
  long N = 0;
  std::vector<double> coeffs;  // coeffs[k-1] = a_{2k}
};

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CliError{2, "config: cannot open " + path};
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw CliError{2, std::string("config: parse failure: ") + e.what()};
  }
  if (!j.is_object()) throw CliError{2, "config: top level must be an object"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    if (k != "d" && k != "coeffs" && k != "N")
      throw CliError{2, "config: unknown key '" + k + "'"};
  }
  if (!j.contains("d") || !j["d"].is_number_integer())
    throw CliError{2, "config: 'd' must be an integer"};
  if (!j.contains("N") || !j["N"].is_number_integer())
    throw CliError{2, "config: 'N' must be an integer"};
  Config cfg;
  cfg.d = j["d"].get<int>();
  cfg.N = j["N"].get<long>();
  if (cfg.d < 1) throw CliError{2, "config: d must be >= 1"};
  if (cfg.N < 1) throw CliError{2, "config: N must be >= 1"};
  if (!j.contains("coeffs") || !j["coeffs"].is_object())
    throw CliError{2, "config: 'coeffs' must be an object"};
  cfg.coeffs.assign(static_cast<size_t>(cfg.d), 0.0);
  for (auto it = j["coeffs"].begin(); it != j["coeffs"].end(); ++it) {
    const std::string& key = it.key();
    if (key.size() < 2 || key[0] != 'a')
      throw CliError{2, "config: unknown coefficient key '" + key + "'"};
    int order = 0;
    try {
      size_t pos = 0;
      order = std::stoi(key.substr(1), &pos);
      if (pos != key.size() - 1) throw std::invalid_argument(key);
    } catch (const std::exception&) {
      throw CliError{2, "config: unknown coefficient key '" + key + "'"};
    }
    if (order < 2 || order > 2 * cfg.d || order % 2 != 0)
      throw CliError{2, "config: coefficient '" + key + "' outside even orders 2..2d"};
    if (!it.value().is_number())
      throw CliError{2, "config: coefficient '" + key + "' must be a number"};
    cfg.coeffs[static_cast<size_t>(order / 2 - 1)] = it.value().get<double>();
  }
  const std::string lead = "a" + std::to_string(2 * cfg.d);
  if (!j["coeffs"].contains(lead))
    throw CliError{2, "config: missing leading coefficient " + lead};
  if (!(cfg.coeffs.back() > 0.0))
    throw CliError{2, "config: leading coefficient " + lead + " must be > 0"};
  return cfg;
}

PotentialPtr make_potential(const Config& cfg) {
  fl_potential* p = nullptr;
  check(fl_potential_new(cfg.d, cfg.N, cfg.coeffs.data(), static_cast<int>(cfg.coeffs.size()),
                         &p));
  return PotentialPtr(p);
}

long resolve_precision(long flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("FREUDLAB_PRECISION_BITS")) {
    const long v = std::atol(env);
    if (v > 0) return v;
  }
  return 0;
}

TablePtr compute_table(const fl_potential* p, long count, long precision_bits) {
  fl_rtable* t = nullptr;
  check(fl_rtable_compute(p, count, precision_bits, &t));
  return TablePtr(t);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw CliError{2, "cannot open output file " + path};
  return os;
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct GridSpec {
  double lo = 0.0, hi = 0.0;
  int n = 1201;
  bool automatic = true;
};

GridSpec parse_grid(const std::string& text) {
  GridSpec g;
  if (text.empty()) return g;
  g.automatic = false;
  std::istringstream is(text);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(is, part, ':')) parts.push_back(part);
  if (parts.size() != 3) throw CliError{2, "grid: expected lo:hi:points"};
  try {
    g.lo = std::stod(parts[0]);
    g.hi = std::stod(parts[1]);
    g.n = std::stoi(parts[2]);
  } catch (const std::exception&) {
    throw CliError{2, "grid: expected numeric lo:hi:points"};
  }
  if (!(g.hi > g.lo) || g.n < 2) throw CliError{2, "grid: need hi > lo and points >= 2"};
  return g;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> vals;
  std::istringstream is(text);
  std::string part;
  while (std::getline(is, part, ',')) {
    try {
      vals.push_back(std::stod(part));
    } catch (const std::exception&) {
      throw CliError{2, "expected a comma-separated numeric list, got '" + part + "'"};
    }
  }
  if (vals.empty()) throw CliError{2, "empty list"};
  return vals;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> vals;
  for (double v : parse_double_list(text)) vals.push_back(static_cast<int>(v));
  return vals;
}

json segments_to_json(const fl_rtable* t, int mod, long window) {
  std::vector<fl_segment> segs(256);
  int count = 0;
  check(fl_detect_structure(t, mod, window, segs.data(), static_cast<int>(segs.size()), &count));
  json arr = json::array();
  for (int i = 0; i < count; ++i) {
    arr.push_back({{"start", segs[static_cast<size_t>(i)].start},
                   {"end", segs[static_cast<size_t>(i)].end},
                   {"label", fl_segment_label_name(segs[static_cast<size_t>(i)].label)}});
  }
  return arr;
}

/* ---- subcommand bodies ------------------------------------------------ */

struct RmuArgs {
  std::string config, out_csv = "rmu.csv", out_svg, bands_csv, segments_json;
  long count = 200;
  int mod = 0;
  long window = 40;
  long precision = 0;
};

void run_rmu(const RmuArgs& a) {
  Config cfg = load_config(a.config);
  PotentialPtr p = make_potential(cfg);
  TablePtr t = compute_table(p.get(), a.count, resolve_precision(a.precision));

  long len = 0;
  check(fl_rtable_len(t.get(), &len));
  {
    auto os = open_out(a.out_csv);
    os << "mu,R,log_h\n";
    for (long mu = 0; mu <= len; ++mu) {
      char *rs = nullptr, *hs = nullptr;
      check(fl_rtable_r_str(t.get(), mu, &rs));
      check(fl_rtable_log_h_str(t.get(), mu, &hs));
      os << mu << ',' << take_string(rs) << ',' << take_string(hs) << '\n';
    }
  }
  std::printf("wrote %s (%ld rows)\n", a.out_csv.c_str(), len + 1);

  if (!a.bands_csv.empty()) {
    const int m = a.mod > 0 ? a.mod : 1;
    auto os = open_out(a.bands_csv);
    os << "mu,residue,R\n";
    for (long mu = 0; mu <= len; ++mu) {
      char* rs = nullptr;
      check(fl_rtable_r_str(t.get(), mu, &rs));
      os << mu << ',' << (mu % m) << ',' << take_string(rs) << '\n';
    }
    std::printf("wrote %s\n", a.bands_csv.c_str());
  }

  if (!a.segments_json.empty()) {
    const int m = a.mod > 0 ? a.mod : 1;
    auto os = open_out(a.segments_json);
    os << segments_to_json(t.get(), m, a.window).dump(2) << '\n';
    std::printf("wrote %s\n", a.segments_json.c_str());
  }

  if (!a.out_svg.empty()) {
    const int m = a.mod > 0 ? a.mod : 1;
    std::vector<flcli::SvgSeries> series(static_cast<size_t>(m));
    for (int r = 0; r < m; ++r)
      series[static_cast<size_t>(r)].label =
          (m > 1) ? ("mu mod " + std::to_string(m) + " = " + std::to_string(r)) : "R_mu";
    for (long mu = 1; mu <= len; ++mu) {
      double r = 0;
      check(fl_rtable_r(t.get(), mu, &r));
      series[static_cast<size_t>(mu % m)].points.emplace_back(static_cast<double>(mu), r);
    }
    auto os = open_out(a.out_svg);
    std::ostringstream title;
    title << "recurrence coefficients R_mu  (d=" << cfg.d << ", N=" << cfg.N << ")";
    flcli::write_svg_plot(os, title.str(), "mu", "R_mu", series);
    std::printf("wrote %s\n", a.out_svg.c_str());
  }
}

struct DensityArgs {
  std::string config, grid, kind = "both", out_csv = "density.csv", out_svg;
  long precision = 0;
};

void run_density(const DensityArgs& a) {
  Config cfg = load_config(a.config);
  PotentialPtr p = make_potential(cfg);
  if (a.kind != "both" && a.kind != "finite" && a.kind != "asymptotic")
    throw CliError{2, "density: --kind must be finite, asymptotic or both"};

  GridSpec g = parse_grid(a.grid);
  if (g.automatic) {
    double r = 0;
    check(fl_default_range(p.get(), &r));
    g.lo = -r;
    g.hi = r;
  }

  TablePtr t = compute_table(p.get(), cfg.N + cfg.d, resolve_precision(a.precision));

  DensityPtr finite, asym;
  if (a.kind != "asymptotic") {
    fl_density* c = nullptr;
    check(fl_density_finite(t.get(), p.get(), g.lo, g.hi, g.n, &c));
    finite.reset(c);
  }
  if (a.kind != "finite") {
    fl_density* c = nullptr;
    check(fl_density_asymptotic(p.get(), t.get(), g.lo, g.hi, g.n, &c));
    asym.reset(c);
  }

  auto os = open_out(a.out_csv);
  os << "x,rho,kind,N\n";
  auto dump = [&](const fl_density* c, const char* kind) {
    long n = 0;
    check(fl_density_len(c, &n));
    for (long i = 0; i < n; ++i) {
      double x = 0, rho = 0;
      check(fl_density_point(c, i, &x, &rho));
      os << fmt_double(x) << ',' << fmt_double(rho) << ',' << kind << ',' << cfg.N << '\n';
    }
  };
  if (finite) dump(finite.get(), "finite");
  if (asym) dump(asym.get(), "asymptotic");
  std::printf("wrote %s\n", a.out_csv.c_str());

  if (!a.out_svg.empty()) {
    std::vector<flcli::SvgSeries> series;
    auto to_series = [&](const fl_density* c, const char* label) {
      flcli::SvgSeries s;
      s.label = label;
      s.lines = true;
      long n = 0;
      check(fl_density_len(c, &n));
      for (long i = 0; i < n; ++i) {
        double x = 0, rho = 0;
        check(fl_density_point(c, i, &x, &rho));
        s.points.emplace_back(x, rho);
      }
      series.push_back(std::move(s));
    };
    if (finite) to_series(finite.get(), "finite N");
    if (asym) to_series(asym.get(), "asymptotic");
    auto svgos = open_out(a.out_svg);
    std::ostringstream title;
    title << "level density  (d=" << cfg.d << ", N=" << cfg.N << ")";
    flcli::write_svg_plot(svgos, title.str(), "x", "rho", series);
    std::printf("wrote %s\n", a.out_svg.c_str());
  }
}

struct MomentsArgs {
  std::string config, orders = "2,4", out_json;
  long precision = 0;
};

void run_moments(const MomentsArgs& a) {
  Config cfg = load_config(a.config);
  PotentialPtr p = make_potential(cfg);
  std::vector<int> orders = parse_int_list(a.orders);
  int kmax = 0;
  for (int k : orders) {
    if (k < 2 || k % 2 != 0) throw CliError{2, "moments: orders must be even and >= 2"};
    kmax = std::max(kmax, k);
  }
  TablePtr t = compute_table(p.get(), cfg.N + kmax / 2, resolve_precision(a.precision));

  ordered_json out;
  out["N"] = cfg.N;
  out["M"] = ordered_json::object();
  std::sort(orders.begin(), orders.end());
  for (int k : orders) {
    double v = 0;
    check(fl_global_moment(t.get(), k, cfg.N, &v));
    out["M"][std::to_string(k)] = v;
  }
  const std::string text = out.dump(2);
  std::printf("%s\n", text.c_str());
  if (!a.out_json.empty()) {
    auto os = open_out(a.out_json);
    os << text << '\n';
    std::printf("wrote %s\n", a.out_json.c_str());
  }
}

struct FreudCheckArgs {
  std::string config, out_csv;
  long count = 100;
  long precision = 0;
  bool forward = false;
};

void run_freud_check(const FreudCheckArgs& a) {
  Config cfg = load_config(a.config);
  PotentialPtr p = make_potential(cfg);
  TablePtr t = compute_table(p.get(), a.count, resolve_precision(a.precision));

  double max_scaled = 0.0;
  long arg_max = 0;
  std::unique_ptr<std::ofstream> os;
  if (!a.out_csv.empty()) {
    os = std::make_unique<std::ofstream>(open_out(a.out_csv));
    *os << "mu,residual,scaled\n";
  }
  for (long mu = 0; mu + cfg.d <= a.count; ++mu) {
    double res = 0;
    check(fl_freud_residual(t.get(), mu, &res));
    const double scaled = std::fabs(res) / static_cast<double>(mu + 1);
    if (scaled > max_scaled) {
      max_scaled = scaled;
      arg_max = mu;
    }
    if (os) *os << mu << ',' << fmt_double(res) << ',' << fmt_double(scaled) << '\n';
  }
  std::printf("max |residual|/(mu+1) = %.6g at mu = %ld\n", max_scaled, arg_max);
  if (os) std::printf("wrote %s\n", a.out_csv.c_str());

  if (a.forward) {
    fl_rtable* fwd = nullptr;
    long div = 0;
    check(fl_freud_forward(p.get(), t.get(), a.count, &fwd, &div));
    fl_rtable_free(fwd);
    std::printf("forward divergence index: %ld (of %ld)\n", div, a.count);
  }
}

struct EquationArgs {
  int d = 0;
  int moment = 0;
  std::string format = "latex", out;
};

void run_equation(const EquationArgs& a) {
  if (a.format != "latex" && a.format != "json")
    throw CliError{2, "equation: --format must be latex or json"};
  std::string text;
  if (a.moment > 0) {
    fl_ladder* l = nullptr;
    check(fl_ladder_moment_summand(a.moment, &l));
    LadderPtr lp(l);
    char* s = nullptr;
    check(fl_ladder_render(lp.get(), a.format.c_str(), &s));
    text = take_string(s);
    if (a.format == "latex")
      text = "M_" + std::to_string(a.moment) + " = \\sum_{\\mu=0}^{N-1}\\left(" + text +
             "\\right)";
  } else {
    if (a.d < 1) throw CliError{2, "equation: need --d or --moment"};
    if (a.format == "latex") {
      std::ostringstream os;
      os << "\\mu+1 = N\\left[";
      for (int k = a.d; k >= 1; --k) {
        fl_ladder* l = nullptr;
        check(fl_ladder_freud_term(a.d, k, &l));
        LadderPtr lp(l);
        char* s = nullptr;
        check(fl_ladder_render(lp.get(), "latex", &s));
        os << "a_{" << 2 * k << "}\\left(" << take_string(s) << "\\right)";
        if (k > 1) os << "+";
      }
      os << "\\right]";
      text = os.str();
    } else {
      ordered_json out;
      out["d"] = a.d;
      out["terms"] = ordered_json::array();
      for (int k = 1; k <= a.d; ++k) {
        fl_ladder* l = nullptr;
        check(fl_ladder_freud_term(a.d, k, &l));
        LadderPtr lp(l);
        char* s = nullptr;
        check(fl_ladder_render(lp.get(), "json", &s));
        ordered_json term;
        term["order"] = 2 * k;
        term["sum"] = json::parse(take_string(s));
        out["terms"].push_back(std::move(term));
      }
      text = out.dump(2);
    }
  }
  std::printf("%s\n", text.c_str());
  if (!a.out.empty()) {
    auto os = open_out(a.out);
    os << text << '\n';
    std::printf("wrote %s\n", a.out.c_str());
  }
}

struct ScanArgs {
  std::string config, a4_list, out_json = "scan.json", svg_prefix;
  long count = 160;
  long window = 40;
  int mod = 3;
  long precision = 0;
};

void run_scan_a4(const ScanArgs& a) {
  Config cfg = load_config(a.config);
  if (cfg.d != 3) throw CliError{2, "scan-a4: requires a d=3 configuration"};
  std::vector<double> a4s = parse_double_list(a.a4_list);

  double a4c = 0;
  check(fl_critical_a4(cfg.coeffs[0], cfg.coeffs[2], &a4c));

  ordered_json out;
  out["a4c"] = a4c;
  out["scan"] = ordered_json::array();
  int index = 0;
  for (double a4 : a4s) {
    Config c = cfg;
    c.coeffs[1] = a4;
    PotentialPtr p = make_potential(c);
    TablePtr t = compute_table(p.get(), a.count, resolve_precision(a.precision));
    ordered_json entry;
    entry["a4"] = a4;
    entry["segments"] = segments_to_json(t.get(), a.mod, a.window);
    out["scan"].push_back(std::move(entry));

    if (!a.svg_prefix.empty()) {
      long len = 0;
      check(fl_rtable_len(t.get(), &len));
      std::vector<flcli::SvgSeries> series(static_cast<size_t>(a.mod));
      for (int r = 0; r < a.mod; ++r)
        series[static_cast<size_t>(r)].label = "mu mod " + std::to_string(a.mod) + " = " +
                                               std::to_string(r);
      for (long mu = 1; mu <= len; ++mu) {
        double rv = 0;
        check(fl_rtable_r(t.get(), mu, &rv));
        series[static_cast<size_t>(mu % a.mod)].points.emplace_back(static_cast<double>(mu), rv);
      }
      const std::string path = a.svg_prefix + std::to_string(index) + ".svg";
      auto os = open_out(path);
      std::ostringstream title;
      title << "R_mu for a4 = " << a4 << " (a4c = " << a4c << ")";
      flcli::write_svg_plot(os, title.str(), "mu", "R_mu", series);
      std::printf("wrote %s\n", path.c_str());
    }
    ++index;
  }
  auto os = open_out(a.out_json);
  os << out.dump(2) << '\n';
  std::printf("wrote %s\n", a.out_json.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"orthogonal polynomials with even polynomial weights exp(-N V(x)): "
               "recurrence coefficients, Freud equations, moments and level densities"};
  app.require_subcommand(1);

  RmuArgs rmu;
  auto* c_rmu = app.add_subcommand("rmu", "compute recurrence coefficients R_mu");
  c_rmu->add_option("--config", rmu.config, "JSON potential configuration")->required();
  c_rmu->add_option("--count", rmu.count, "number of coefficients");
  c_rmu->add_option("--mod", rmu.mod, "residue modulus for bands/plot");
  c_rmu->add_option("--window", rmu.window, "structure-detection window");
  c_rmu->add_option("--precision-bits", rmu.precision, "precision override");
  c_rmu->add_option("--out-csv", rmu.out_csv, "R-table CSV path");
  c_rmu->add_option("--out-svg", rmu.out_svg, "plot path");
  c_rmu->add_option("--bands-csv", rmu.bands_csv, "residue-band CSV path");
  c_rmu->add_option("--segments-json", rmu.segments_json, "structure segments JSON path");

  DensityArgs den;
  auto* c_den = app.add_subcommand("density", "finite-N and asymptotic level densities");
  c_den->add_option("--config", den.config)->required();
  c_den->add_option("--grid", den.grid, "grid as lo:hi:points (default: automatic)");
  c_den->add_option("--kind", den.kind, "finite | asymptotic | both");
  c_den->add_option("--precision-bits", den.precision);
  c_den->add_option("--out-csv", den.out_csv);
  c_den->add_option("--out-svg", den.out_svg);

  MomentsArgs mom;
  auto* c_mom = app.add_subcommand("moments", "global moments M_k of the level density");
  c_mom->add_option("--config", mom.config)->required();
  c_mom->add_option("--orders", mom.orders, "comma-separated even orders");
  c_mom->add_option("--precision-bits", mom.precision);
  c_mom->add_option("--out-json", mom.out_json);

  FreudCheckArgs fc;
  auto* c_fc = app.add_subcommand("freud-check", "Freud-equation residuals of the oracle table");
  c_fc->add_option("--config", fc.config)->required();
  c_fc->add_option("--count", fc.count);
  c_fc->add_option("--precision-bits", fc.precision);
  c_fc->add_option("--out-csv", fc.out_csv);
  c_fc->add_flag("--forward", fc.forward, "also run the forward iteration and report divergence");

  EquationArgs eq;
  auto* c_eq = app.add_subcommand("equation", "render Freud equations and moment summands");
  c_eq->add_option("--d", eq.d, "half-degree of the potential");
  c_eq->add_option("--moment", eq.moment, "render the moment summand of this order instead");
  c_eq->add_option("--format", eq.format, "latex | json");
  c_eq->add_option("--out", eq.out, "write to file as well");

  ScanArgs scan;
  auto* c_scan = app.add_subcommand("scan-a4", "structure scan across a4 values (d=3)");
  c_scan->add_option("--config", scan.config)->required();
  c_scan->add_option("--a4", scan.a4_list, "comma-separated a4 values")->required();
  c_scan->add_option("--count", scan.count);
  c_scan->add_option("--window", scan.window);
  c_scan->add_option("--mod", scan.mod);
  c_scan->add_option("--precision-bits", scan.precision);
  c_scan->add_option("--out-json", scan.out_json);
  c_scan->add_option("--svg-prefix", scan.svg_prefix, "write one R_mu plot per a4 value");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp")
      return app.exit(e);
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }

  try {
    if (c_rmu->parsed()) run_rmu(rmu);
    if (c_den->parsed()) run_density(den);
    if (c_mom->parsed()) run_moments(mom);
    if (c_fc->parsed()) run_freud_check(fc);
    if (c_eq->parsed()) run_equation(eq);
    if (c_scan->parsed()) run_scan_a4(scan);
  } catch (const CliError& e) {
    std::fprintf(stderr, "error: %s\n", e.message.c_str());
    return e.exit_code;
  }
  return 0;
}
