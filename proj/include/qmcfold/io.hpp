#pragma once

#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qmcfold/cbc.hpp"
#include "qmcfold/digitspace.hpp"
#include "qmcfold/kernel.hpp"

namespace qmcfold {

struct RuleFile {
  Rule rule;
  SpaceParams params;
};

inline nlohmann::json poly_to_json(const GFPoly& p) {
  nlohmann::json arr = nlohmann::json::array();
  for (auto c : p.coeffs()) arr.push_back(static_cast<int>(c));
  return arr;
}

inline GFPoly poly_from_json(const nlohmann::json& arr, PrimeBase base) {
  if (!arr.is_array()) throw std::invalid_argument("polynomial must be a coefficient array");
  std::vector<std::uint8_t> coeffs;
  for (const auto& c : arr) {
    const int v = c.get<int>();
    if (v < 0 || v >= base.value()) throw std::invalid_argument("polynomial coefficient out of range");
    coeffs.push_back(static_cast<std::uint8_t>(v));
  }
  return GFPoly(base, std::move(coeffs));
}

/// Rule files carry the lattice data and the space parameters together:
/// {"b":2,"m":4,"n":4,"s":2,"p":[...],"q":[[...],...],"alpha":2,"gamma":[...],"D":1.0}
/// with polynomials as ascending-degree coefficient arrays.
inline nlohmann::json rule_to_json(const Rule& rule, const SpaceParams& params) {
  nlohmann::json j;
  j["b"] = rule.base.value();
  j["m"] = rule.m;
  j["n"] = rule.n;
  j["s"] = rule.s();
  j["p"] = poly_to_json(rule.p.poly());
  nlohmann::json q = nlohmann::json::array();
  for (const auto& qj : rule.q) q.push_back(poly_to_json(qj));
  j["q"] = q;
  j["alpha"] = params.alpha;
  j["gamma"] = params.gamma;
  j["D"] = params.D;
  return j;
}

inline RuleFile rule_from_json(const nlohmann::json& j) {
  const PrimeBase base(j.at("b").get<int>());
  const int m = j.at("m").get<int>();
  const int n = j.at("n").get<int>();
  Modulus p(poly_from_json(j.at("p"), base));
  std::vector<GFPoly> q;
  for (const auto& qj : j.at("q")) q.push_back(poly_from_json(qj, base));
  if (j.contains("s") && j.at("s").get<int>() != static_cast<int>(q.size())) {
    throw std::invalid_argument("rule file: s does not match the generating vector");
  }
  SpaceParams params(j.at("alpha").get<int>(), j.at("gamma").get<std::vector<double>>(),
                     j.value("D", 1.0));
  if (params.s() != static_cast<int>(q.size())) {
    throw std::invalid_argument("rule file: weight count does not match the generating vector");
  }
  return RuleFile{Rule(base, m, n, std::move(p), std::move(q)), std::move(params)};
}

inline void write_rule_file(const std::string& path, const Rule& rule, const SpaceParams& params) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << rule_to_json(rule, params).dump(2) << "\n";
}

inline RuleFile read_rule_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  nlohmann::json j;
  in >> j;
  return rule_from_json(j);
}

inline nlohmann::json trace_to_json(const CbcTrace& trace, double bound_lambda1) {
  nlohmann::json j;
  j["selected"] = trace.selected;
  j["B"] = trace.criterion;
  j["bound_lambda1"] = bound_lambda1;
  return j;
}

/// Decimal with 17 significant digits: round-trips binary64 exactly.
inline std::string format_double(double v, int precision = 17) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
  return buf;
}

/// CSV with header x1..xs, one row per point in index order, LF endings.
/// Exact mode writes numerator/denominator strings instead of decimals.
inline void write_points_csv(std::ostream& out, const PointSet& pts, bool exact,
                             int precision = 17) {
  const int s = pts.dimension();
  for (int j = 1; j <= s; ++j) out << (j > 1 ? "," : "") << "x" << j;
  out << "\n";
  for (const auto& pt : pts.points) {
    for (int j = 0; j < s; ++j) {
      const Rational x = project(pt[static_cast<std::size_t>(j)]);
      if (j > 0) out << ",";
      if (exact) {
        out << x.to_string();
      } else {
        out << format_double(x.to_double(), precision);
      }
    }
    out << "\n";
  }
}

}  // namespace qmcfold
