// Command-line driver: construct folded polynomial lattice rules, emit their
// points, analyze error criteria, run convergence studies, and integrate the
// built-in test family.
//
// Exit codes: 0 success, 2 usage or validation error, 3 scale guard.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qmcfold/qmcfold.hpp"

namespace {

using qmcfold::CbcConfig;
using qmcfold::CbcMode;
using qmcfold::CbcResult;
using qmcfold::GFPoly;
using qmcfold::Modulus;
using qmcfold::PointSet;
using qmcfold::PrimeBase;
using qmcfold::Rational;
using qmcfold::Rule;
using qmcfold::RuleFile;
using qmcfold::SpaceParams;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitScaleGuard = 3;

constexpr std::uint64_t kErrorSumPointLimit = std::uint64_t{1} << 12;

/// Weight specs: either a comma list "1,0.25,..." or the generator form
/// "j^-E" producing gamma_j = j^{-E}.
std::vector<double> parse_weights(const std::string& spec, int s) {
  std::vector<double> gamma;
  if (spec.rfind("j^", 0) == 0) {
    const double expo = std::stod(spec.substr(2));
    for (int j = 1; j <= s; ++j) gamma.push_back(std::pow(static_cast<double>(j), expo));
    return gamma;
  }
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) gamma.push_back(std::stod(item));
  }
  if (static_cast<int>(gamma.size()) != s) {
    throw std::invalid_argument("weight list must have exactly s entries");
  }
  for (double g : gamma) {
    if (!(g >= 0.0)) throw std::invalid_argument("weights must be >= 0");
  }
  return gamma;
}

GFPoly parse_poly(const std::string& spec, PrimeBase base) {
  std::vector<std::uint8_t> coeffs;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const int v = std::stoi(item);
    if (v < 0 || v >= base.value()) throw std::invalid_argument("polynomial digit out of range");
    coeffs.push_back(static_cast<std::uint8_t>(v));
  }
  return GFPoly(base, std::move(coeffs));
}

double trailing_slope(const std::vector<double>& ms, const std::vector<double>& logs) {
  const std::size_t count = ms.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < count; ++i) {
    sx += ms[i];
    sy += logs[i];
    sxx += ms[i] * ms[i];
    sxy += ms[i] * logs[i];
  }
  const double denom = count * sxx - sx * sx;
  return (count * sxy - sx * sy) / denom;
}

struct ConstructArgs {
  int base = 2;
  int m = 1;
  std::optional<int> n;
  int s = 1;
  int alpha = 2;
  std::string weights = "j^-2";
  double d_const = 1.0;
  std::string mode = "fast";
  std::string modulus;
  std::string out = "rule.json";
  std::string trace_out = "trace.json";
};

int run_construct(const ConstructArgs& a) {
  const PrimeBase base(a.base);
  SpaceParams params(a.alpha, parse_weights(a.weights, a.s), a.d_const);
  std::optional<Modulus> modulus;
  if (!a.modulus.empty()) {
    // The degree check against n happens inside CbcConfig.
    modulus = Modulus(parse_poly(a.modulus, base));
  }
  const CbcMode mode = a.mode == "naive" ? CbcMode::naive : CbcMode::fast;
  if (a.mode != "naive" && a.mode != "fast") throw std::invalid_argument("mode must be naive or fast");

  CbcConfig cfg(base, a.m, a.n, params, mode, modulus);
  const CbcResult result = qmcfold::cbc_construct(cfg);
  const double bound = qmcfold::cbc_error_bound(a.base, cfg.m, cfg.n, params, 1.0).value;

  qmcfold::write_rule_file(a.out, result.rule, params);
  {
    std::ofstream out(a.trace_out);
    if (!out) throw std::runtime_error("cannot open " + a.trace_out + " for writing");
    out << qmcfold::trace_to_json(result.trace, bound).dump(2) << "\n";
  }
  std::cout << "B = " << qmcfold::format_double(result.trace.criterion.back()) << "\n";
  std::cout << "bound(lambda=1) = " << qmcfold::format_double(bound) << "\n";
  std::cout << "rule -> " << a.out << "\n";
  std::cout << "trace -> " << a.trace_out << "\n";
  return kExitOk;
}

struct PointsArgs {
  std::string rule_file;
  bool folded = false;
  bool exact = false;
  std::string out;
};

int run_points(const PointsArgs& a) {
  const RuleFile rf = qmcfold::read_rule_file(a.rule_file);
  PointSet pts = qmcfold::lattice_points(rf.rule);
  if (a.folded) pts = qmcfold::fold_points(pts);
  if (a.out.empty()) {
    qmcfold::write_points_csv(std::cout, pts, a.exact);
  } else {
    std::ofstream out(a.out);
    if (!out) throw std::runtime_error("cannot open " + a.out + " for writing");
    qmcfold::write_points_csv(out, pts, a.exact);
  }
  return kExitOk;
}

struct AnalyzeArgs {
  std::string rule_file;
  int brute = 0;
  double lambda = 1.0;
  bool json = false;
  bool force = false;
};

int run_analyze(const AnalyzeArgs& a) {
  const RuleFile rf = qmcfold::read_rule_file(a.rule_file);
  const Rule& rule = rf.rule;
  const SpaceParams& params = rf.params;

  if (!a.force && rule.point_count() > kErrorSumPointLimit) {
    throw qmcfold::ScaleGuardError("analyze: b^m exceeds the O(N^2) error-sum guard (use --force)");
  }

  const double criterion = qmcfold::fold_criterion(rule, params);
  const PointSet folded = qmcfold::fold_points(qmcfold::lattice_points(rule));
  const double err_sq = qmcfold::worst_case_error_sq(qmcfold::project_points(folded), params);
  const double err = std::sqrt(std::max(err_sq, 0.0));
  const double bound = qmcfold::cbc_error_bound(rule.base.value(), rule.m, rule.n, params, a.lambda).value;

  std::optional<qmcfold::BruteCriterion> brute;
  if (a.brute > 0) brute = qmcfold::fold_criterion_brute(rule, params, a.brute);

  if (a.json) {
    nlohmann::json j;
    j["B"] = criterion;
    j["e_sq"] = err_sq;
    j["e"] = err;
    j["bound"] = {{"lambda", a.lambda}, {"value", bound}};
    if (brute) {
      j["brute"] = {{"value", brute->value}, {"truncation_bound", brute->truncation_bound}};
    }
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "B = " << qmcfold::format_double(criterion) << "\n";
    if (brute) {
      std::cout << "B_brute = " << qmcfold::format_double(brute->value)
                << " (truncation bound " << qmcfold::format_double(brute->truncation_bound) << ")\n";
    }
    std::cout << "e = " << qmcfold::format_double(err) << "\n";
    std::cout << "bound(lambda=" << a.lambda << ") = " << qmcfold::format_double(bound) << "\n";
    std::cout << "e <= B: " << (err <= criterion + 1e-12 ? "yes" : "NO") << "\n";
  }
  return kExitOk;
}

struct ConvergenceArgs {
  std::string m_range = "4:8";
  int base = 2;
  int alpha = 2;
  int s = 2;
  std::string weights = "j^-2";
  double d_const = 1.0;
  std::string out;
};

int run_convergence(const ConvergenceArgs& a) {
  const auto colon = a.m_range.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("--m-range must be a:b");
  const int m_lo = std::stoi(a.m_range.substr(0, colon));
  const int m_hi = std::stoi(a.m_range.substr(colon + 1));
  if (m_lo < 1 || m_hi < m_lo) throw std::invalid_argument("--m-range must be a:b with 1 <= a <= b");

  const PrimeBase base(a.base);
  SpaceParams params(a.alpha, parse_weights(a.weights, a.s), a.d_const);
  if (qmcfold::pow_u64(static_cast<std::uint64_t>(a.base), static_cast<unsigned>(m_hi)) >
      kErrorSumPointLimit) {
    throw qmcfold::ScaleGuardError("convergence: b^m exceeds the O(N^2) error-sum guard");
  }

  std::ostream* outp = &std::cout;
  std::ofstream file;
  if (!a.out.empty()) {
    file.open(a.out);
    if (!file) throw std::runtime_error("cannot open " + a.out + " for writing");
    outp = &file;
  }
  std::ostream& out = *outp;

  const bool with_slope = m_hi > m_lo;
  out << "m,N,B,e,bound" << (with_slope ? ",slope" : "") << "\n";
  std::vector<double> ms;
  std::vector<double> logs;
  for (int m = m_lo; m <= m_hi; ++m) {
    CbcConfig cfg(base, m, std::nullopt, params, CbcMode::fast);
    const CbcResult result = qmcfold::cbc_construct(cfg);
    const double criterion = result.trace.criterion.back();
    const PointSet folded = qmcfold::fold_points(qmcfold::lattice_points(result.rule));
    const double err = std::sqrt(std::max(
        qmcfold::worst_case_error_sq(qmcfold::project_points(folded), params), 0.0));
    const double bound = qmcfold::cbc_error_bound(a.base, cfg.m, cfg.n, params, 1.0).value;

    ms.push_back(static_cast<double>(m));
    logs.push_back(std::log(err) / std::log(static_cast<double>(a.base)));
    out << m << "," << result.rule.point_count() << "," << qmcfold::format_double(criterion) << ","
        << qmcfold::format_double(err) << "," << qmcfold::format_double(bound);
    if (with_slope) {
      out << ",";
      if (ms.size() >= 2) {
        // Slope of log_b(e) against m over the trailing window (up to 5 rows).
        const std::size_t window = std::min<std::size_t>(ms.size(), 5);
        std::vector<double> wm(ms.end() - static_cast<std::ptrdiff_t>(window), ms.end());
        std::vector<double> wl(logs.end() - static_cast<std::ptrdiff_t>(window), logs.end());
        out << qmcfold::format_double(trailing_slope(wm, wl), 6);
      }
    }
    out << "\n";
  }
  return kExitOk;
}

struct IntegrateArgs {
  std::string rule_file;
  std::string function = "prodpoly";
  std::string c_list;
};

int run_integrate(const IntegrateArgs& a) {
  const RuleFile rf = qmcfold::read_rule_file(a.rule_file);
  if (a.function != "prodpoly") {
    throw std::invalid_argument("unknown integrand '" + a.function + "' (built-in: prodpoly)");
  }
  const int s = rf.rule.s();
  std::vector<double> c(static_cast<std::size_t>(s), 1.0);
  if (!a.c_list.empty()) {
    std::stringstream ss(a.c_list);
    std::string item;
    std::vector<double> parsed;
    while (std::getline(ss, item, ',')) parsed.push_back(std::stod(item));
    if (static_cast<int>(parsed.size()) != s) {
      throw std::invalid_argument("--c must list exactly s coefficients");
    }
    c = std::move(parsed);
  }
  const int alpha = rf.params.alpha;

  const PointSet folded = qmcfold::fold_points(qmcfold::lattice_points(rf.rule));
  const auto coords = qmcfold::project_points(folded);
  // f(x) = prod_j (1 + c_j (x_j^alpha - 1/(alpha+1))); each factor integrates
  // to 1, so I(f) = 1 exactly and the reported error needs no oracle.
  qmcfold::KahanAccumulator acc;
  for (const auto& pt : coords) {
    double prod = 1.0;
    for (int j = 0; j < s; ++j) {
      const double x = pt[static_cast<std::size_t>(j)].to_double();
      prod *= 1.0 + c[static_cast<std::size_t>(j)] *
                        (std::pow(x, alpha) - 1.0 / (alpha + 1.0));
    }
    acc.add(prod);
  }
  const double estimate = acc.value() / static_cast<double>(coords.size());
  std::cout << "Q = " << qmcfold::format_double(estimate) << "\n";
  std::cout << "I = 1\n";
  std::cout << "error = " << qmcfold::format_double(std::fabs(estimate - 1.0)) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Folded higher-order polynomial lattice rules for QMC integration"};
  app.require_subcommand(1);

  ConstructArgs construct_args;
  auto* construct = app.add_subcommand("construct", "Run the component-by-component search");
  construct->add_option("--base", construct_args.base, "prime digit base b")->capture_default_str();
  construct->add_option("--m", construct_args.m, "log_b of the point count")->required();
  construct->add_option("--n", construct_args.n, "digits per coordinate (default ceil(alpha*m/2))");
  construct->add_option("--s", construct_args.s, "dimension")->required();
  construct->add_option("--alpha", construct_args.alpha, "smoothness order (>= 2)")->capture_default_str();
  construct->add_option("--weights", construct_args.weights, "comma list or generator j^-E")->capture_default_str();
  construct->add_option("--D", construct_args.d_const, "Walsh-coefficient constant")->capture_default_str();
  construct->add_option("--mode", construct_args.mode, "naive | fast")->capture_default_str();
  construct->add_option("--modulus", construct_args.modulus,
                        "modulus override, ascending coefficient digits (e.g. 1,1,1 for 1+x+x^2)");
  construct->add_option("-o,--out", construct_args.out, "rule output path")->capture_default_str();
  construct->add_option("--trace", construct_args.trace_out, "trace output path")->capture_default_str();

  PointsArgs points_args;
  auto* points = app.add_subcommand("points", "Emit the rule's points as CSV");
  points->add_option("rule", points_args.rule_file, "rule JSON file")->required();
  points->add_flag("--folded", points_args.folded, "apply the tent fold before projecting");
  points->add_flag("--exact", points_args.exact, "emit numerator/denominator strings");
  points->add_option("-o,--out", points_args.out, "output path (default stdout)");

  AnalyzeArgs analyze_args;
  auto* analyze = app.add_subcommand("analyze", "Report criterion, worst-case error, and bound");
  analyze->add_option("rule", analyze_args.rule_file, "rule JSON file")->required();
  analyze->add_option("--brute", analyze_args.brute, "cutoff power for the brute-force criterion");
  analyze->add_option("--lambda", analyze_args.lambda, "bound parameter in (1/alpha, 1]")->capture_default_str();
  analyze->add_flag("--json", analyze_args.json, "machine-readable output");
  analyze->add_flag("--force", analyze_args.force, "override the O(N^2) scale guard");

  ConvergenceArgs convergence_args;
  auto* convergence = app.add_subcommand("convergence", "Error decay across a range of m");
  convergence->add_option("--m-range", convergence_args.m_range, "a:b inclusive")->required();
  convergence->add_option("--base", convergence_args.base, "prime digit base b")->capture_default_str();
  convergence->add_option("--alpha", convergence_args.alpha, "smoothness order")->capture_default_str();
  convergence->add_option("--s", convergence_args.s, "dimension")->capture_default_str();
  convergence->add_option("--weights", convergence_args.weights, "comma list or generator j^-E")->capture_default_str();
  convergence->add_option("--D", convergence_args.d_const, "Walsh-coefficient constant")->capture_default_str();
  convergence->add_option("-o,--out", convergence_args.out, "CSV output path (default stdout)");

  IntegrateArgs integrate_args;
  auto* integrate = app.add_subcommand("integrate", "Integrate the built-in smooth product family");
  integrate->add_option("rule", integrate_args.rule_file, "rule JSON file")->required();
  integrate->add_option("--function", integrate_args.function, "integrand name")->capture_default_str();
  integrate->add_option("--c", integrate_args.c_list, "comma list of coefficients (default all 1)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (construct->parsed()) return run_construct(construct_args);
    if (points->parsed()) return run_points(points_args);
    if (analyze->parsed()) return run_analyze(analyze_args);
    if (convergence->parsed()) return run_convergence(convergence_args);
    if (integrate->parsed()) return run_integrate(integrate_args);
  } catch (const qmcfold::ScaleGuardError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitScaleGuard;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
