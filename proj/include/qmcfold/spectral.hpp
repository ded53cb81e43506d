#pragma once

#include <algorithm>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "qmcfold/digitspace.hpp"
#include "qmcfold/gfpoly.hpp"

namespace qmcfold {

/// Base-b digits of k, least significant first (empty for k = 0).
inline std::vector<std::uint8_t> base_digits(std::uint64_t k, int base) {
  std::vector<std::uint8_t> d;
  const auto b = static_cast<std::uint64_t>(base);
  while (k != 0) {
    d.push_back(static_cast<std::uint8_t>(k % b));
    k /= b;
  }
  return d;
}

/// Sum of the alpha largest nonzero-digit positions of k (1-indexed from the
/// least significant digit); 0 for k = 0 by the empty-sum convention, which
/// is what the bound's summand b^{-mu(floor(k/b))} needs for 1 <= k < b.
inline std::uint64_t dick_weight(std::uint64_t k, int base, int alpha) {
  if (alpha < 1) throw std::invalid_argument("weight order must be >= 1");
  const auto b = static_cast<std::uint64_t>(base);
  std::uint64_t total = 0;
  int taken = 0;
  std::uint64_t pos = 0;
  // Positions visited most-significant-last; collect from the top instead.
  std::vector<std::uint64_t> positions;
  while (k != 0) {
    ++pos;
    if (k % b != 0) positions.push_back(pos);
    k /= b;
  }
  for (auto it = positions.rbegin(); it != positions.rend() && taken < alpha; ++it, ++taken) {
    total += *it;
  }
  return total;
}

/// b-adic sum of digits of k.
inline std::uint64_t digit_sum(std::uint64_t k, int base) {
  const auto b = static_cast<std::uint64_t>(base);
  std::uint64_t s = 0;
  while (k != 0) {
    s += k % b;
    k /= b;
  }
  return s;
}

/// k >= 1 whose digit sum is divisible by b: the frequencies that survive
/// the tent fold (their floor(k/b) indexes the folded dual).
inline bool digit_sum_vanishes(std::uint64_t k, int base) {
  return k >= 1 && digit_sum(k, base) % static_cast<std::uint64_t>(base) == 0;
}

inline bool digit_sum_vanishes_or_zero(std::uint64_t k, int base) {
  return k == 0 || digit_sum_vanishes(k, base);
}

/// Exponent e of the k-th character at z: W_k(z) = omega^e with
/// omega = exp(2*pi*i/b) and e = sum_i kappa_i * z_{i+1} mod b. Only the
/// first (number of digits of k) digits of z matter, so tails are fine.
inline int character_exponent(std::uint64_t k, const GElem& z) {
  const int b = z.base();
  const auto bb = static_cast<std::uint64_t>(b);
  int e = 0;
  std::size_t i = 1;
  while (k != 0) {
    e = static_cast<int>((e + (k % bb) * z.digit(i)) % bb);
    k /= bb;
    ++i;
  }
  return e;
}

inline std::complex<double> unit_root(int base, int exponent) {
  if (exponent == 0) return {1.0, 0.0};
  const double angle = 2.0 * 3.14159265358979323846 * exponent / base;
  return {std::cos(angle), std::sin(angle)};
}

inline std::complex<double> character_value(std::uint64_t k, const GElem& z) {
  return unit_root(z.base(), character_exponent(k, z));
}

/// Walsh function via the section map: wal_k(x) = W_k(section(x)).
inline std::complex<double> walsh_value(std::uint64_t k, const Rational& x, int base) {
  return character_value(k, section(x, base));
}

/// tr_n(k): the lowest n digits of k as a polynomial.
inline GFPoly truncated_index_poly(std::uint64_t k, PrimeBase base, int n) {
  auto digits = base_digits(k, base.value());
  if (static_cast<int>(digits.size()) > n) digits.resize(static_cast<std::size_t>(n));
  return GFPoly(base, std::move(digits));
}

/// Membership of k in the dual polynomial lattice:
/// tr_n(k_1) q_1 + ... + tr_n(k_s) q_s = a (mod p) with deg(a) < n - m.
/// The zero residue passes via the degree sentinel of the zero polynomial.
inline bool in_dual_lattice(const std::vector<std::uint64_t>& kvec, const Rule& rule) {
  if (static_cast<int>(kvec.size()) != rule.s()) {
    throw std::invalid_argument("frequency vector dimension mismatch");
  }
  GFPoly acc = GFPoly::zero(rule.base);
  for (std::size_t j = 0; j < kvec.size(); ++j) {
    const GFPoly tr = truncated_index_poly(kvec[j], rule.base, rule.n);
    acc = poly_add(acc, poly_mul_mod(tr, rule.q[j], rule.p));
  }
  acc = poly_mod(acc, rule.p.poly());
  return acc.degree() < rule.n - rule.m;
}

/// Character sum over a point set, held exactly as integer counts per
/// root-of-unity exponent. For prime base the sum vanishes iff all counts
/// are equal, so the duality identities become integer assertions.
struct ExactCharSum {
  int base = 2;
  std::vector<std::int64_t> counts;

  std::int64_t total() const {
    std::int64_t t = 0;
    for (auto c : counts) t += c;
    return t;
  }

  bool is_zero() const {
    for (auto c : counts) {
      if (c != counts.front()) return false;
    }
    return true;
  }

  /// True iff the sum equals the plain integer n. For prime base the only
  /// integer relations among the roots of unity are multiples of their sum,
  /// so this reduces to counts[0] - n == counts[e] for every e >= 1.
  bool equals_integer(std::int64_t n) const {
    const std::int64_t shift = counts[0] - n;
    for (std::size_t e = 1; e < counts.size(); ++e) {
      if (counts[e] != shift) return false;
    }
    return true;
  }

  std::complex<double> value() const {
    std::complex<double> v{0.0, 0.0};
    for (std::size_t e = 0; e < counts.size(); ++e) {
      v += static_cast<double>(counts[e]) * unit_root(base, static_cast<int>(e));
    }
    return v;
  }
};

inline ExactCharSum character_sum(const std::vector<std::uint64_t>& kvec, const PointSet& pts) {
  if (pts.points.empty()) throw std::invalid_argument("character sum over empty point set");
  if (kvec.size() != pts.points.front().size()) {
    throw std::invalid_argument("frequency vector dimension mismatch");
  }
  const int b = pts.points.front().front().base();
  ExactCharSum out;
  out.base = b;
  out.counts.assign(static_cast<std::size_t>(b), 0);
  for (const auto& pt : pts.points) {
    int e = 0;
    for (std::size_t j = 0; j < kvec.size(); ++j) {
      e = (e + character_exponent(kvec[j], pt[j])) % b;
    }
    ++out.counts[static_cast<std::size_t>(e)];
  }
  return out;
}

}  // namespace qmcfold
