#pragma once

#include <cmath>
#include <cstdint>
#include <mutex>
#include <set>
#include <stdexcept>
#include <vector>

#include "qmcfold/digitspace.hpp"
#include "qmcfold/rational.hpp"
#include "qmcfold/spectral.hpp"
#include "qmcfold/util.hpp"

namespace qmcfold {

/// Parameters of the weighted Sobolev space: smoothness alpha >= 2, product
/// weights gamma_j >= 0, and the Walsh-coefficient constant D > 0. D enters
/// only through the effective weights sqrt(gamma_j * D), so it is held as a
/// plain configuration value with default 1.
struct SpaceParams {
  SpaceParams(int alpha_in, std::vector<double> gamma_in, double d_in = 1.0)
      : alpha(alpha_in), gamma(std::move(gamma_in)), D(d_in) {
    if (alpha < 2) throw std::invalid_argument("smoothness must be >= 2");
    if (gamma.empty()) throw std::invalid_argument("need at least one weight");
    for (double g : gamma) {
      if (!(g >= 0.0)) throw std::invalid_argument("weights must be >= 0");
    }
    if (!(D > 0.0)) throw std::invalid_argument("D must be > 0");
  }

  int s() const { return static_cast<int>(gamma.size()); }
  double effective_weight(int j) const { return std::sqrt(gamma[static_cast<std::size_t>(j)] * D); }

  int alpha;
  std::vector<double> gamma;
  double D;
};

namespace detail {

inline constexpr int kMaxBernoulliDegree = 64;

/// Coefficient tables B_n(x) = sum_j C(n,j) B_j(0) x^{n-j}, built once from
/// the defining recurrence sum_{j<=n} C(n+1,j) B_j(0) = 0.
inline const std::vector<std::vector<double>>& bernoulli_coeff_tables() {
  static const std::vector<std::vector<double>> tables = [] {
    const int max_n = kMaxBernoulliDegree;
    std::vector<std::vector<double>> binom(static_cast<std::size_t>(max_n) + 2);
    for (std::size_t n = 0; n < binom.size(); ++n) {
      binom[n].resize(n + 1);
      binom[n][0] = binom[n][n] = 1.0;
      for (std::size_t k = 1; k < n; ++k) binom[n][k] = binom[n - 1][k - 1] + binom[n - 1][k];
    }
    std::vector<double> b0(static_cast<std::size_t>(max_n) + 1);
    b0[0] = 1.0;
    for (int n = 1; n <= max_n; ++n) {
      double acc = 0.0;
      for (int j = 0; j < n; ++j) acc += binom[static_cast<std::size_t>(n) + 1][static_cast<std::size_t>(j)] * b0[static_cast<std::size_t>(j)];
      b0[static_cast<std::size_t>(n)] = -acc / binom[static_cast<std::size_t>(n) + 1][static_cast<std::size_t>(n)];
    }
    std::vector<std::vector<double>> out(static_cast<std::size_t>(max_n) + 1);
    for (int n = 0; n <= max_n; ++n) {
      out[static_cast<std::size_t>(n)].resize(static_cast<std::size_t>(n) + 1);
      for (int j = 0; j <= n; ++j) {
        out[static_cast<std::size_t>(n)][static_cast<std::size_t>(j)] =
            binom[static_cast<std::size_t>(n)][static_cast<std::size_t>(j)] * b0[static_cast<std::size_t>(j)];
      }
    }
    return out;
  }();
  return tables;
}

inline double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace detail

/// Bernoulli polynomial B_tau at x.
inline double bernoulli_poly(int tau, double x) {
  if (tau < 0) throw std::invalid_argument("Bernoulli degree must be >= 0");
  if (tau > detail::kMaxBernoulliDegree) throw std::invalid_argument("Bernoulli degree too large");
  const auto& coeff = detail::bernoulli_coeff_tables()[static_cast<std::size_t>(tau)];
  // Horner over B_tau(x) = sum_j coeff[j] x^{tau-j}.
  double acc = 0.0;
  for (std::size_t j = 0; j < coeff.size(); ++j) acc = acc * x + coeff[j];
  return acc;
}

/// One-dimensional Sobolev kernel
/// K(x,y) = sum_{tau=1..alpha} B_tau(x) B_tau(y) / (tau!)^2
///          + (-1)^{alpha+1} B_{2 alpha}(|x-y|) / (2 alpha)!.
inline double kernel_k1(int alpha, double x, double y) {
  if (alpha < 2) throw std::invalid_argument("smoothness must be >= 2");
  if (!(x >= 0.0 && x <= 1.0 && y >= 0.0 && y <= 1.0)) {
    throw std::invalid_argument("kernel arguments must lie in [0,1]");
  }
  double acc = 0.0;
  for (int tau = 1; tau <= alpha; ++tau) {
    const double f = detail::factorial(tau);
    acc += bernoulli_poly(tau, x) * bernoulli_poly(tau, y) / (f * f);
  }
  const double sign = alpha % 2 == 0 ? -1.0 : 1.0;
  acc += sign * bernoulli_poly(2 * alpha, std::fabs(x - y)) / detail::factorial(2 * alpha);
  return acc;
}

namespace detail {

/// Composite 16-node Gauss-Legendre quadrature of f over [lo, hi].
template <typename F>
double gauss_integrate(F&& f, double lo, double hi) {
  static const double nodes[8] = {0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
                                  0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
                                  0.9445750230732326, 0.9894009349916499};
  static const double weights[8] = {0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
                                    0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
                                    0.0622535239386479, 0.0271524594117541};
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  double acc = 0.0;
  for (int i = 0; i < 8; ++i) {
    acc += weights[i] * (f(mid + half * nodes[i]) + f(mid - half * nodes[i]));
  }
  return acc * half;
}

/// The product-kernel simplification of the squared worst-case error relies
/// on int_0^1 K(x, y) dy = 0. Verified by quadrature once per smoothness
/// before first use rather than assumed; the kernel is piecewise polynomial,
/// so split at the |x-y| kink.
inline void verify_kernel_mean_zero(int alpha) {
  static std::mutex mu;
  static std::set<int> verified;
  {
    std::lock_guard<std::mutex> lock(mu);
    if (verified.count(alpha)) return;
  }
  for (double x : {0.0, 0.17, 0.5, 0.83, 1.0}) {
    double integral = 0.0;
    auto f = [&](double y) { return kernel_k1(alpha, x, y); };
    if (x > 0.0) integral += gauss_integrate(f, 0.0, x);
    if (x < 1.0) integral += gauss_integrate(f, x, 1.0);
    if (std::fabs(integral) > 1e-10) {
      throw std::logic_error("kernel mean-zero identity failed quadrature check");
    }
  }
  std::lock_guard<std::mutex> lock(mu);
  verified.insert(alpha);
}

}  // namespace detail

/// Squared worst-case error of the QMC rule using the points, over the
/// weighted Sobolev space:  -1 + (1/N^2) sum_{x,y} prod_j (1 + gamma_j K(x_j, y_j)).
inline double worst_case_error_sq(const std::vector<std::vector<Rational>>& points,
                                  const SpaceParams& params) {
  if (points.empty()) throw std::invalid_argument("empty point set");
  detail::verify_kernel_mean_zero(params.alpha);
  const std::size_t n = points.size();
  const std::size_t s = points.front().size();
  if (s != params.gamma.size()) throw std::invalid_argument("weight dimension mismatch");

  std::vector<std::vector<double>> coords(n, std::vector<double>(s));
  for (std::size_t i = 0; i < n; ++i) {
    if (points[i].size() != s) throw std::invalid_argument("ragged point set");
    for (std::size_t j = 0; j < s; ++j) {
      const double v = points[i][j].to_double();
      if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("coordinates must lie in [0,1]");
      coords[i][j] = v;
    }
  }

  KahanAccumulator acc;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      double prod = 1.0;
      for (std::size_t j = 0; j < s; ++j) {
        if (params.gamma[j] == 0.0) continue;
        prod *= 1.0 + params.gamma[j] * kernel_k1(params.alpha, coords[i][j], coords[k][j]);
      }
      acc.add(prod);
    }
  }
  return -1.0 + acc.value() / (static_cast<double>(n) * static_cast<double>(n));
}

/// Workspace vectors of the O(alpha*n) evaluator of the folded weight sum:
/// tail_terms[t] covers digit positions at or beyond the prefix end,
/// tail_term_sums accumulates them, prefix_terms[t] are the nested in-range
/// sums, and prefix_terms_flagged[t] carry the leading-zeros indicator.
struct WeightSumTables {
  std::vector<double> tail_terms;             // U_0 .. U_{alpha-1}
  std::vector<double> tail_term_sums;         // length alpha
  std::vector<double> prefix_terms;           // length alpha-1, index t-1 holds term t
  std::vector<double> prefix_terms_flagged;   // length alpha, index t-1 holds term t
};

/// Value of the folded weight sum at the zero element:
/// sum_{v=1}^{alpha-1} prod_{i<=v} (b-1)/(b^i-1)
///   + (b^alpha - 1)/(b^alpha - b) * prod_{i<=alpha} (b-1)/(b^i-1).
inline double folded_weight_sum_at_zero(int base, int alpha) {
  if (alpha < 2) throw std::invalid_argument("smoothness must be >= 2");
  const double b = base;
  double acc = 0.0;
  double prod = 1.0;
  for (int v = 1; v <= alpha - 1; ++v) {
    prod *= (b - 1.0) / (std::pow(b, v) - 1.0);
    acc += prod;
  }
  prod *= (b - 1.0) / (std::pow(b, alpha) - 1.0);
  const double ba = std::pow(b, alpha);
  acc += (ba - 1.0) / (ba - b) * prod;
  return acc;
}

namespace detail {

inline WeightSumTables weight_sum_tables_normalized(const std::vector<std::uint8_t>& digits,
                                                    int base, int alpha) {
  const int n = static_cast<int>(digits.size());
  const double b = base;
  const double rho = digits[0] == 0 ? b - 1.0 : -1.0;

  WeightSumTables t;
  t.tail_terms.assign(static_cast<std::size_t>(alpha), 0.0);
  t.tail_terms[0] = 1.0;
  for (int v = 1; v < alpha; ++v) {
    t.tail_terms[static_cast<std::size_t>(v)] = t.tail_terms[static_cast<std::size_t>(v - 1)] * rho /
                                                ((std::pow(b, v) - 1.0) * std::pow(b, n - 1));
  }
  t.tail_term_sums.assign(static_cast<std::size_t>(alpha), 0.0);
  for (int idx = 0; idx < alpha; ++idx) {
    double acc = 0.0;
    for (int v = idx; v < alpha; ++v) acc += t.tail_terms[static_cast<std::size_t>(v - idx)];
    t.tail_term_sums[static_cast<std::size_t>(idx)] = acc;
  }

  // match[a] holds L(z, a+1): b-1 when digit a+1 equals the leading digit,
  // else -1 (digit a+1 sits at prefix index a). all_equal[a] flags
  // z_1 = ... = z_a, which is the fold-lands-in-H_{a-1} indicator.
  std::vector<double> match(static_cast<std::size_t>(n), 0.0);
  std::vector<bool> all_equal(static_cast<std::size_t>(n) + 1, true);
  for (int a = 1; a < n; ++a) {
    match[static_cast<std::size_t>(a)] = digits[static_cast<std::size_t>(a)] == digits[0] ? b - 1.0 : -1.0;
  }
  for (int a = 1; a <= n; ++a) {
    all_equal[static_cast<std::size_t>(a)] =
        all_equal[static_cast<std::size_t>(a - 1)] && digits[static_cast<std::size_t>(a - 1)] == digits[0];
  }

  // Nested-sum dynamic program, innermost sum first. level[a] holds the sum
  // over strictly increasing position chains ending below a.
  const int depth = alpha;  // flagged tables need depth alpha, plain ones alpha-1
  std::vector<double> plain_prev(static_cast<std::size_t>(n) + 1, 1.0);
  t.prefix_terms.assign(static_cast<std::size_t>(alpha - 1), 0.0);
  for (int j = 1; j <= alpha - 1; ++j) {
    std::vector<double> cur(static_cast<std::size_t>(n) + 1, 0.0);
    for (int a = j; a <= n; ++a) {
      const int ap = a - 1;  // last summand position
      double add = 0.0;
      if (ap >= j - 1 && ap >= 1 && ap <= n - 1) {
        add = std::pow(b, -ap) * match[static_cast<std::size_t>(ap)] * plain_prev[static_cast<std::size_t>(ap)];
      }
      cur[static_cast<std::size_t>(a)] = cur[static_cast<std::size_t>(a - 1)] + add;
    }
    t.prefix_terms[static_cast<std::size_t>(j - 1)] = cur[static_cast<std::size_t>(n)];
    plain_prev = std::move(cur);
  }

  std::vector<double> flag_prev(static_cast<std::size_t>(n) + 1, 0.0);
  t.prefix_terms_flagged.assign(static_cast<std::size_t>(alpha), 0.0);
  for (int j = 1; j <= depth; ++j) {
    std::vector<double> cur(static_cast<std::size_t>(n) + 1, 0.0);
    for (int a = (j == 1 ? 1 : j); a <= n; ++a) {
      const int ap = a - 1;
      double add = 0.0;
      if (ap >= 1 && ap <= n - 1) {
        if (j == 1) {
          // Innermost: b^{a_t-1} [fold in H_{a_t-1}] b^{-a_t} L = b^{-1} [all equal] L.
          if (all_equal[static_cast<std::size_t>(ap)]) {
            add = match[static_cast<std::size_t>(ap)] / b;
          }
        } else if (ap >= j - 1) {
          add = std::pow(b, -ap) * match[static_cast<std::size_t>(ap)] * flag_prev[static_cast<std::size_t>(ap)];
        }
      }
      cur[static_cast<std::size_t>(a)] = cur[static_cast<std::size_t>(a - 1)] + add;
    }
    t.prefix_terms_flagged[static_cast<std::size_t>(j - 1)] = cur[static_cast<std::size_t>(n)];
    flag_prev = std::move(cur);
  }
  return t;
}

}  // namespace detail

/// Workspace tables for a nonzero finite-expansion element; digits are the
/// canonical prefix, zero-padded once when all digits agree (see
/// folded_weight_sum).
inline WeightSumTables weight_sum_tables(const GElem& z, int alpha) {
  if (z.tail() != 0) throw std::invalid_argument("weight tables need a tail-0 element");
  if (alpha < 2) throw std::invalid_argument("smoothness must be >= 2");
  if (z.prefix().empty()) throw std::invalid_argument("weight tables need a nonzero element");
  std::vector<std::uint8_t> digits = z.prefix();
  bool all_same = true;
  for (auto d : digits) all_same = all_same && d == digits.front();
  if (all_same) digits.push_back(0);
  return detail::weight_sum_tables_normalized(digits, z.base(), alpha);
}

/// The per-coordinate factor of the fold criterion:
/// sum_{k>=1} b^{-mu_alpha(k)} W_k(tent(z)), evaluated in O(alpha*n).
///
/// The dot-product formula misses one boundary term when every prefix digit
/// equals the (nonzero) leading digit, because then the folded element still
/// has its first n-1 digits zero; appending one explicit zero digit restores
/// the identity and never changes the element. The all-zero element takes
/// the closed form instead.
inline double folded_weight_sum(const GElem& z, int alpha) {
  if (z.tail() != 0) throw std::invalid_argument("folded weight sum needs a tail-0 element");
  if (alpha < 2) throw std::invalid_argument("smoothness must be >= 2");
  if (z.prefix().empty()) return folded_weight_sum_at_zero(z.base(), alpha);

  const WeightSumTables t = weight_sum_tables(z, alpha);
  double acc = t.tail_term_sums[0] - 1.0;
  for (int idx = 1; idx <= alpha - 1; ++idx) {
    acc += t.tail_term_sums[static_cast<std::size_t>(idx)] * t.prefix_terms[static_cast<std::size_t>(idx - 1)];
  }
  for (int idx = 1; idx <= alpha; ++idx) {
    acc += t.tail_terms[static_cast<std::size_t>(alpha - idx)] *
           t.prefix_terms_flagged[static_cast<std::size_t>(idx - 1)];
  }
  return acc;
}

/// Quality criterion of the folded rule, product form:
/// -1 + (1/b^m) sum_{z in P} prod_j [1 + sqrt(gamma_j D) * folded_weight_sum(z_j)].
inline double fold_criterion(const Rule& rule, const SpaceParams& params) {
  if (params.s() != rule.s()) throw std::invalid_argument("weight dimension mismatch");
  const PointSet pts = lattice_points(rule);
  KahanAccumulator acc;
  for (const auto& pt : pts.points) {
    double prod = 1.0;
    for (int j = 0; j < rule.s(); ++j) {
      const double w = params.effective_weight(j);
      if (w == 0.0) continue;
      prod *= 1.0 + w * folded_weight_sum(pt[static_cast<std::size_t>(j)], params.alpha);
    }
    acc.add(prod);
  }
  return -1.0 + acc.value() / static_cast<double>(pts.size());
}

struct BruteCriterion {
  double value = 0.0;
  double truncation_bound = 0.0;  // difference between the cutoff and cutoff-2 runs
};

/// Brute-force route to the criterion, straight from its definition:
/// sum over nonempty coordinate sets u of gamma_u^{1/2} D^{|u|/2} times
/// sum over k_u with digit sums divisible by b, (k_u, 0) in the dual
/// lattice, of b^{-mu_alpha(floor(k_u / b))} -- truncated to k_j < b^cutoff.
inline BruteCriterion fold_criterion_brute(const Rule& rule, const SpaceParams& params,
                                           int cutoff_power) {
  if (params.s() != rule.s()) throw std::invalid_argument("weight dimension mismatch");
  if (cutoff_power < 1) throw std::invalid_argument("cutoff power must be >= 1");
  const int s = rule.s();
  const int b = rule.base.value();
  if (s > 3) throw ScaleGuardError("brute criterion supports s <= 3");
  const double scale = std::pow(static_cast<double>(b), static_cast<double>(cutoff_power) * s);
  if (scale > static_cast<double>(std::uint64_t{1} << 24)) {
    throw ScaleGuardError("brute criterion enumeration too large");
  }

  const std::uint64_t cutoff = pow_u64(static_cast<std::uint64_t>(b), static_cast<unsigned>(cutoff_power));
  const std::uint64_t inner_cutoff =
      cutoff_power > 2 ? pow_u64(static_cast<std::uint64_t>(b), static_cast<unsigned>(cutoff_power - 2)) : 1;

  // Per-coordinate tables over the frequencies with vanishing digit sum.
  struct Freq {
    std::uint64_t k;
    double weight;  // b^{-mu_alpha(floor(k/b))}
  };
  std::vector<Freq> freqs;
  for (std::uint64_t k = 1; k < cutoff; ++k) {
    if (!digit_sum_vanishes(k, b)) continue;
    const double w = std::pow(static_cast<double>(b),
                              -static_cast<double>(dick_weight(k / static_cast<std::uint64_t>(b), b, params.alpha)));
    freqs.push_back({k, w});
  }
  std::vector<std::vector<std::uint64_t>> residue(static_cast<std::size_t>(s));
  for (int j = 0; j < s; ++j) {
    residue[static_cast<std::size_t>(j)].resize(freqs.size());
    for (std::size_t i = 0; i < freqs.size(); ++i) {
      const GFPoly tr = truncated_index_poly(freqs[i].k, rule.base, rule.n);
      residue[static_cast<std::size_t>(j)][i] = poly_mul_mod(tr, rule.q[static_cast<std::size_t>(j)], rule.p).to_integer();
    }
  }
  // deg < n - m by residue encoding: encodings below b^{n-m}.
  const std::uint64_t small_bound =
      rule.n - rule.m > 0 ? pow_u64(static_cast<std::uint64_t>(b), static_cast<unsigned>(rule.n - rule.m)) : 1;
  auto small_degree = [&](std::uint64_t enc) { return enc < small_bound; };

  KahanAccumulator total;
  KahanAccumulator total_inner;
  // Enumerate nonempty coordinate subsets via bitmask.
  for (int mask = 1; mask < (1 << s); ++mask) {
    double coeff = 1.0;
    int card = 0;
    for (int j = 0; j < s; ++j) {
      if (mask & (1 << j)) {
        coeff *= params.gamma[static_cast<std::size_t>(j)];
        ++card;
      }
    }
    if (coeff == 0.0) continue;
    coeff = std::sqrt(coeff) * std::pow(params.D, card / 2.0);

    std::vector<int> coords;
    for (int j = 0; j < s; ++j) {
      if (mask & (1 << j)) coords.push_back(j);
    }
    KahanAccumulator subset_sum;
    KahanAccumulator subset_sum_inner;
    std::vector<std::size_t> idx(coords.size(), 0);
    if (freqs.empty()) continue;
    while (true) {
      std::uint64_t res = 0;
      double w = 1.0;
      bool inner = true;
      for (std::size_t a = 0; a < coords.size(); ++a) {
        const std::size_t i = idx[a];
        res = encoding_add(res, residue[static_cast<std::size_t>(coords[a])][i], b);
        w *= freqs[i].weight;
        inner = inner && freqs[i].k < inner_cutoff;
      }
      if (small_degree(res)) {
        subset_sum.add(w);
        if (inner) subset_sum_inner.add(w);
      }
      // Advance the odometer.
      std::size_t pos = 0;
      while (pos < idx.size()) {
        if (++idx[pos] < freqs.size()) break;
        idx[pos] = 0;
        ++pos;
      }
      if (pos == idx.size()) break;
    }
    total.add(coeff * subset_sum.value());
    total_inner.add(coeff * subset_sum_inner.value());
  }

  BruteCriterion out;
  out.value = total.value();
  out.truncation_bound = total.value() - total_inner.value();
  return out;
}

struct ErrorBound {
  double a1 = 0.0;     // head-frequency constant
  double a2 = 0.0;     // wraparound (b^n | k) constant
  double value = 0.0;  // the criterion bound at the requested lambda
};

/// Bound on the criterion of CBC-constructed rules:
/// b^{-min(m/lambda, 2n)} * [-1 + prod_j (1 + gamma_j^{lambda/2} D^{lambda/2} A)]^{1/lambda},
/// with A = A1 + A2 from the two closed-form tail sums.
inline ErrorBound cbc_error_bound(int base, int m, int n, const SpaceParams& params, double lambda) {
  if (!(lambda > 1.0 / params.alpha && lambda <= 1.0)) {
    throw std::invalid_argument("lambda must satisfy 1/alpha < lambda <= 1");
  }
  const double b = base;
  const int alpha = params.alpha;

  double a1 = 0.0;
  {
    double prod = 1.0;
    for (int v = 1; v <= alpha - 1; ++v) {
      prod *= (b - 1.0) / (std::pow(b, lambda * v) - 1.0);
      a1 += prod;
    }
    prod *= (b - 1.0) / (std::pow(b, lambda * alpha) - 1.0);
    const double bla = std::pow(b, lambda * alpha);
    a1 += (bla - 1.0) / (bla - b) * prod;
    a1 *= b / (b - 1.0);
  }

  double a2 = 0.0;
  {
    double prod = 1.0;
    double sum = 0.0;
    for (int v = 1; v <= alpha - 1; ++v) {
      prod *= std::pow(b, lambda) * (b - 1.0) / (std::pow(b, lambda * v) - 1.0);
      if (v >= 2) sum += prod;
    }
    a2 = sum / (b - 1.0);
    // prod now runs to alpha-1; the closing term reuses it.
    a2 += std::pow(b, lambda) / (std::pow(b, lambda * alpha) - b) * prod;
  }

  double bracket = 1.0;
  for (double g : params.gamma) {
    bracket *= 1.0 + std::pow(g, lambda / 2.0) * std::pow(params.D, lambda / 2.0) * (a1 + a2);
  }
  bracket -= 1.0;
  const double value =
      std::pow(b, -std::min(static_cast<double>(m) / lambda, 2.0 * n)) * std::pow(bracket, 1.0 / lambda);

  ErrorBound out;
  out.a1 = a1;
  out.a2 = a2;
  out.value = value;
  return out;
}

}  // namespace qmcfold
