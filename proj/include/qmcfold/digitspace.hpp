#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qmcfold/gfpoly.hpp"
#include "qmcfold/rational.hpp"
#include "qmcfold/util.hpp"

namespace qmcfold {

/// Element of the infinite digit group Z_b^N with an eventually-constant
/// tail: digits (z_1, ..., z_L) followed by the tail digit repeated forever.
/// The pair represents folded points exactly; classical finite expansions
/// have tail 0. Canonical form drops prefix digits equal to the tail, so
/// equality of values is equality of representations.
class GElem {
 public:
  explicit GElem(int base) : GElem(base, {}, 0) {}

  GElem(int base, std::vector<std::uint8_t> prefix, std::uint8_t tail = 0)
      : base_(base), prefix_(std::move(prefix)), tail_(tail) {
    if (base < 2) throw std::invalid_argument("digit base must be >= 2");
    if (tail_ >= base_) throw std::invalid_argument("tail digit out of range");
    for (auto d : prefix_) {
      if (d >= base_) throw std::invalid_argument("digit out of range");
    }
    while (!prefix_.empty() && prefix_.back() == tail_) prefix_.pop_back();
  }

  /// The element whose every digit equals `digit`.
  static GElem constant(int base, std::uint8_t digit) { return GElem(base, {}, digit); }

  int base() const { return base_; }
  const std::vector<std::uint8_t>& prefix() const { return prefix_; }
  std::uint8_t tail() const { return tail_; }
  bool is_zero() const { return prefix_.empty() && tail_ == 0; }

  /// Digit z_i, 1-indexed; positions past the prefix read the tail.
  std::uint8_t digit(std::size_t i) const {
    if (i == 0) throw std::invalid_argument("digit positions are 1-indexed");
    return i <= prefix_.size() ? prefix_[i - 1] : tail_;
  }

  friend bool operator==(const GElem& a, const GElem& b) {
    return a.base_ == b.base_ && a.tail_ == b.tail_ && a.prefix_ == b.prefix_;
  }
  friend bool operator!=(const GElem& a, const GElem& b) { return !(a == b); }
  friend bool operator<(const GElem& a, const GElem& b) {
    if (a.base_ != b.base_) return a.base_ < b.base_;
    if (a.prefix_ != b.prefix_) return a.prefix_ < b.prefix_;
    return a.tail_ < b.tail_;
  }

 private:
  int base_;
  std::vector<std::uint8_t> prefix_;
  std::uint8_t tail_;
};

namespace detail {
inline void require_same_base(const GElem& a, const GElem& b) {
  if (a.base() != b.base()) throw std::invalid_argument("digit base mismatch");
}
}  // namespace detail

/// Digitwise addition; eventually-constant tails are closed under it.
inline GElem operator+(const GElem& z, const GElem& w) {
  detail::require_same_base(z, w);
  const int b = z.base();
  std::vector<std::uint8_t> prefix(std::max(z.prefix().size(), w.prefix().size()));
  for (std::size_t i = 1; i <= prefix.size(); ++i) {
    prefix[i - 1] = static_cast<std::uint8_t>((z.digit(i) + w.digit(i)) % b);
  }
  return GElem(b, std::move(prefix), static_cast<std::uint8_t>((z.tail() + w.tail()) % b));
}

inline GElem operator-(const GElem& z, const GElem& w) {
  detail::require_same_base(z, w);
  const int b = z.base();
  std::vector<std::uint8_t> prefix(std::max(z.prefix().size(), w.prefix().size()));
  for (std::size_t i = 1; i <= prefix.size(); ++i) {
    prefix[i - 1] = static_cast<std::uint8_t>((z.digit(i) - w.digit(i) + b) % b);
  }
  return GElem(b, std::move(prefix), static_cast<std::uint8_t>((z.tail() - w.tail() + b) % b));
}

/// b-adic tent transformation: digit i of the image is z_{i+1} - z_1 mod b.
/// Dropping the leading digit shortens the prefix by one; the tail becomes
/// tail - z_1, so folded points of finite-expansion inputs stay exact.
inline GElem tent(const GElem& z) {
  const int b = z.base();
  const int lead = z.digit(1);
  std::vector<std::uint8_t> prefix;
  if (!z.prefix().empty()) {
    prefix.resize(z.prefix().size() - 1);
    for (std::size_t i = 1; i <= prefix.size(); ++i) {
      prefix[i - 1] = static_cast<std::uint8_t>((z.digit(i + 1) - lead + b) % b);
    }
  }
  return GElem(b, std::move(prefix), static_cast<std::uint8_t>((z.tail() - lead + b) % b));
}

/// The projection z -> sum_i z_i b^{-i} as an exact rational:
/// (A*(b-1) + c) / ((b-1) * b^L) with A the prefix read as a base-b integer.
inline Rational project(const GElem& z) {
  const int b = z.base();
  std::int64_t a = 0;
  for (auto d : z.prefix()) a = a * b + d;
  std::int64_t den_pow = 1;
  for (std::size_t i = 0; i < z.prefix().size(); ++i) {
    if (den_pow > std::numeric_limits<std::int64_t>::max() / b) {
      throw std::overflow_error("projection denominator overflow");
    }
    den_pow *= b;
  }
  return Rational(a * (b - 1) + z.tail(), static_cast<std::int64_t>(b - 1) * den_pow);
}

/// The section map: digit expansion of x in [0,1], choosing the expansion in
/// which infinitely many digits differ from b-1 (x = 1 maps to all b-1).
/// Only rationals with an eventually-constant expansion are representable,
/// i.e. denominators dividing (b-1)*b^L; anything else is rejected.
inline GElem section(const Rational& x, int base) {
  if (base < 2) throw std::invalid_argument("digit base must be >= 2");
  if (x < Rational(0) || x > Rational(1)) throw std::invalid_argument("section domain is [0,1]");
  if (x == Rational(1)) return GElem::constant(base, static_cast<std::uint8_t>(base - 1));

  // Number of leading digits before the remainder goes constant: the least L
  // with den | (b-1)*b^L. No such L means the expansion is not eventually
  // constant and cannot be held in a GElem.
  std::int64_t t = x.den() / std::gcd(x.den(), static_cast<std::int64_t>(base - 1));
  int steps = 0;
  while (t > 1) {
    const std::int64_t g = std::gcd(t, static_cast<std::int64_t>(base));
    if (g == 1) {
      throw std::invalid_argument(
          "section: denominator " + std::to_string(x.den()) + " not of the form d*b^L with d | b-1");
    }
    t /= g;
    ++steps;
  }

  std::vector<std::uint8_t> prefix;
  Rational rem = x;
  for (int i = 0; i < steps; ++i) {
    const Rational scaled = rem * Rational(base);
    const std::int64_t digit = scaled.num() / scaled.den();  // floor: operands nonnegative
    prefix.push_back(static_cast<std::uint8_t>(digit));
    rem = scaled - Rational(digit);
  }
  const Rational tail_val = rem * Rational(base - 1);
  if (tail_val.den() != 1) throw std::logic_error("section: remainder did not become constant");
  return GElem(base, std::move(prefix), static_cast<std::uint8_t>(tail_val.num()));
}

/// Truncated section for arbitrary reals: the first `digits` digits of x,
/// remainder discarded. For exact work use section() on a Rational.
inline GElem section_truncated(double x, int base, int digits) {
  if (base < 2) throw std::invalid_argument("digit base must be >= 2");
  if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("section domain is [0,1]");
  if (digits < 0) throw std::invalid_argument("digit count must be >= 0");
  if (x == 1.0) return GElem::constant(base, static_cast<std::uint8_t>(base - 1));
  std::vector<std::uint8_t> prefix;
  double rem = x;
  for (int i = 0; i < digits; ++i) {
    rem *= base;
    int d = static_cast<int>(std::floor(rem));
    if (d > base - 1) d = base - 1;
    if (d < 0) d = 0;
    prefix.push_back(static_cast<std::uint8_t>(d));
    rem -= d;
  }
  return GElem(base, std::move(prefix), 0);
}

/// A higher order polynomial lattice rule: modulus p of degree n, generating
/// vector q over Z_b[x] with deg(q_j) < n, and b^m points of n digits each.
struct Rule {
  Rule(PrimeBase base_in, int m_in, int n_in, Modulus p_in, std::vector<GFPoly> q_in)
      : base(base_in), m(m_in), n(n_in), p(std::move(p_in)), q(std::move(q_in)) {
    if (m < 1 || m > n) throw std::invalid_argument("rule needs 1 <= m <= n");
    if (p.degree() != n) throw std::invalid_argument("modulus degree must equal n");
    if (p.base() != base) throw std::invalid_argument("modulus base mismatch");
    if (q.empty()) throw std::invalid_argument("rule needs at least one coordinate");
    for (const auto& qj : q) {
      if (qj.base() != base) throw std::invalid_argument("generating vector base mismatch");
      if (qj.degree() >= n) throw std::invalid_argument("generating polynomial degree must be < n");
    }
  }

  int s() const { return static_cast<int>(q.size()); }
  std::uint64_t point_count() const { return pow_u64(static_cast<std::uint64_t>(base.value()), static_cast<unsigned>(m)); }

  PrimeBase base;
  int m;
  int n;
  Modulus p;
  std::vector<GFPoly> q;
};

/// Finite-row slice of a generating matrix over Z_b: n_rows x m digits.
/// Rows past n_rows are implicitly zero (tails are handled separately by
/// FoldedGeneratingMatrix).
struct GeneratingMatrix {
  GeneratingMatrix(int base_in, std::vector<std::vector<std::uint8_t>> rows_in)
      : base(base_in), rows(std::move(rows_in)) {
    if (base < 2) throw std::invalid_argument("digit base must be >= 2");
    if (rows.empty()) throw std::invalid_argument("matrix needs at least one row");
    for (const auto& r : rows) {
      if (r.size() != rows.front().size()) throw std::invalid_argument("ragged matrix");
      for (auto e : r) {
        if (e >= base) throw std::invalid_argument("matrix entry out of range");
      }
    }
  }

  int n_rows() const { return static_cast<int>(rows.size()); }
  int n_cols() const { return static_cast<int>(rows.front().size()); }

  int base;
  std::vector<std::vector<std::uint8_t>> rows;
};

/// Image of a generating matrix under the tent fold: explicit rows plus the
/// row that generates the constant tail digits (all rows below the explicit
/// block coincide with it).
struct FoldedGeneratingMatrix {
  GeneratingMatrix mat;
  std::vector<std::uint8_t> tail_row;
};

enum class Provenance { lattice, matrix, folded };

struct PointSet {
  std::vector<std::vector<GElem>> points;
  Provenance provenance = Provenance::matrix;

  std::size_t size() const { return points.size(); }
  int dimension() const { return points.empty() ? 0 : static_cast<int>(points.front().size()); }
};

namespace detail {
inline std::vector<std::uint8_t> index_digits(std::uint64_t h, int base, int m) {
  std::vector<std::uint8_t> d(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    d[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(h % static_cast<std::uint64_t>(base));
    h /= static_cast<std::uint64_t>(base);
  }
  return d;
}

inline std::uint8_t row_dot(const std::vector<std::uint8_t>& row,
                            const std::vector<std::uint8_t>& digits, int base) {
  int acc = 0;
  for (std::size_t i = 0; i < row.size(); ++i) acc += row[i] * digits[i];
  return static_cast<std::uint8_t>(acc % base);
}
}  // namespace detail

/// Points of a higher order polynomial lattice rule, in increasing h.
/// Coordinate j of point h is v_n(h(x) q_j(x) / p(x)): the product is reduced
/// mod p first, since the polynomial part only feeds nonpositive Laurent
/// exponents.
inline PointSet lattice_points(const Rule& rule) {
  PointSet out;
  out.provenance = Provenance::lattice;
  const std::uint64_t count = rule.point_count();
  out.points.reserve(count);
  for (std::uint64_t h = 0; h < count; ++h) {
    const GFPoly hp = GFPoly::from_integer(rule.base, h);
    std::vector<GElem> pt;
    pt.reserve(rule.q.size());
    for (const auto& qj : rule.q) {
      const GFPoly num = poly_mul_mod(hp, qj, rule.p);
      pt.emplace_back(rule.base.value(), laurent_digits(num, rule.p, rule.n));
    }
    out.points.push_back(std::move(pt));
  }
  return out;
}

/// Digital net from finite-row generating matrices: the digit vector of
/// coordinate j of point h is C_j times the base-b digit column of h.
inline PointSet digital_net_points(const std::vector<GeneratingMatrix>& mats, int m) {
  if (mats.empty()) throw std::invalid_argument("need at least one generating matrix");
  const int base = mats.front().base;
  for (const auto& c : mats) {
    if (c.base != base) throw std::invalid_argument("matrix base mismatch");
    if (c.n_cols() != m) throw std::invalid_argument("matrix column count must equal m");
  }
  PointSet out;
  out.provenance = Provenance::matrix;
  const std::uint64_t count = pow_u64(static_cast<std::uint64_t>(base), static_cast<unsigned>(m));
  out.points.reserve(count);
  for (std::uint64_t h = 0; h < count; ++h) {
    const auto digits = detail::index_digits(h, base, m);
    std::vector<GElem> pt;
    pt.reserve(mats.size());
    for (const auto& c : mats) {
      std::vector<std::uint8_t> coord(static_cast<std::size_t>(c.n_rows()));
      for (int r = 0; r < c.n_rows(); ++r) {
        coord[static_cast<std::size_t>(r)] = detail::row_dot(c.rows[static_cast<std::size_t>(r)], digits, base);
      }
      pt.emplace_back(base, std::move(coord));
    }
    out.points.push_back(std::move(pt));
  }
  return out;
}

/// Digital net from folded matrices; the tail row generates the constant
/// digit that continues below the explicit rows.
inline PointSet digital_net_points(const std::vector<FoldedGeneratingMatrix>& mats, int m) {
  if (mats.empty()) throw std::invalid_argument("need at least one generating matrix");
  const int base = mats.front().mat.base;
  for (const auto& c : mats) {
    if (c.mat.base != base) throw std::invalid_argument("matrix base mismatch");
    if (c.mat.n_cols() != m) throw std::invalid_argument("matrix column count must equal m");
    if (static_cast<int>(c.tail_row.size()) != m) throw std::invalid_argument("tail row width must equal m");
  }
  PointSet out;
  out.provenance = Provenance::folded;
  const std::uint64_t count = pow_u64(static_cast<std::uint64_t>(base), static_cast<unsigned>(m));
  out.points.reserve(count);
  for (std::uint64_t h = 0; h < count; ++h) {
    const auto digits = detail::index_digits(h, base, m);
    std::vector<GElem> pt;
    pt.reserve(mats.size());
    for (const auto& c : mats) {
      std::vector<std::uint8_t> coord(static_cast<std::size_t>(c.mat.n_rows()));
      for (int r = 0; r < c.mat.n_rows(); ++r) {
        coord[static_cast<std::size_t>(r)] =
            detail::row_dot(c.mat.rows[static_cast<std::size_t>(r)], digits, base);
      }
      pt.emplace_back(base, std::move(coord), detail::row_dot(c.tail_row, digits, base));
    }
    out.points.push_back(std::move(pt));
  }
  return out;
}

/// Matrix form of the tent fold: new row i = (b-1)*row_1 + row_{i+1} mod b
/// (rows past the stored block read as zero), and the tail row (b-1)*row_1
/// generates the constant continuation.
inline FoldedGeneratingMatrix fold_generating_matrix(const GeneratingMatrix& c) {
  const int b = c.base;
  const auto& first = c.rows.front();
  std::vector<std::uint8_t> tail_row(first.size());
  for (std::size_t j = 0; j < first.size(); ++j) {
    tail_row[j] = static_cast<std::uint8_t>((b - 1) * first[j] % b);
  }
  std::vector<std::vector<std::uint8_t>> rows(c.rows.size());
  for (int i = 0; i < c.n_rows(); ++i) {
    std::vector<std::uint8_t> row(first.size());
    for (std::size_t j = 0; j < first.size(); ++j) {
      const int next = i + 1 < c.n_rows() ? c.rows[static_cast<std::size_t>(i + 1)][j] : 0;
      row[j] = static_cast<std::uint8_t>((tail_row[j] + next) % b);
    }
    rows[static_cast<std::size_t>(i)] = std::move(row);
  }
  return FoldedGeneratingMatrix{GeneratingMatrix(b, std::move(rows)), std::move(tail_row)};
}

/// Tent-fold every coordinate of every point.
inline PointSet fold_points(const PointSet& in) {
  PointSet out;
  out.provenance = Provenance::folded;
  out.points.reserve(in.points.size());
  for (const auto& pt : in.points) {
    std::vector<GElem> folded;
    folded.reserve(pt.size());
    for (const auto& z : pt) folded.push_back(tent(z));
    out.points.push_back(std::move(folded));
  }
  return out;
}

inline std::vector<std::vector<Rational>> project_points(const PointSet& in) {
  std::vector<std::vector<Rational>> out;
  out.reserve(in.points.size());
  for (const auto& pt : in.points) {
    std::vector<Rational> row;
    row.reserve(pt.size());
    for (const auto& z : pt) row.push_back(project(z));
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace qmcfold
