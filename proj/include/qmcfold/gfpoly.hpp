#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qmcfold/util.hpp"

namespace qmcfold {

/// Degree assigned to the zero polynomial. Compares below every attainable
/// degree, so tests like deg(a) < n - m hold uniformly for a = 0.
inline constexpr int kDegreeOfZero = std::numeric_limits<int>::min();

/// A prime modulus for digit arithmetic, checked by trial division.
class PrimeBase {
 public:
  explicit PrimeBase(int b) : b_(b) {
    if (b < 2) throw std::invalid_argument("base must be >= 2");
    for (int d = 2; d * d <= b; ++d) {
      if (b % d == 0) throw std::invalid_argument("base must be prime");
    }
  }

  int value() const { return b_; }

  friend bool operator==(PrimeBase a, PrimeBase b) { return a.b_ == b.b_; }
  friend bool operator!=(PrimeBase a, PrimeBase b) { return a.b_ != b.b_; }

 private:
  int b_;
};

/// Polynomial over Z_b, coefficients ascending by degree, canonical form
/// (no stored trailing zero coefficients; the zero polynomial stores none).
/// Integers are identified with polynomials through the base-b digit string:
/// n = sum n_i b^i  <->  n(x) = sum n_i x^i.
class GFPoly {
 public:
  GFPoly(PrimeBase base, std::vector<std::uint8_t> coeffs)
      : base_(base), coeffs_(std::move(coeffs)) {
    for (auto c : coeffs_) {
      if (c >= base_.value()) throw std::invalid_argument("coefficient out of range");
    }
    trim();
  }

  static GFPoly zero(PrimeBase base) { return GFPoly(base, {}); }
  static GFPoly one(PrimeBase base) { return GFPoly(base, {1}); }

  /// x^d with unit leading coefficient.
  static GFPoly monomial(PrimeBase base, int d) {
    std::vector<std::uint8_t> c(static_cast<std::size_t>(d) + 1, 0);
    c.back() = 1;
    return GFPoly(base, std::move(c));
  }

  static GFPoly from_integer(PrimeBase base, std::uint64_t enc) {
    std::vector<std::uint8_t> c;
    const auto b = static_cast<std::uint64_t>(base.value());
    while (enc != 0) {
      c.push_back(static_cast<std::uint8_t>(enc % b));
      enc /= b;
    }
    return GFPoly(base, std::move(c));
  }

  std::uint64_t to_integer() const {
    std::uint64_t enc = 0;
    const auto b = static_cast<std::uint64_t>(base_.value());
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) enc = enc * b + *it;
    return enc;
  }

  PrimeBase base() const { return base_; }
  const std::vector<std::uint8_t>& coeffs() const { return coeffs_; }

  int degree() const {
    return coeffs_.empty() ? kDegreeOfZero : static_cast<int>(coeffs_.size()) - 1;
  }

  bool is_zero() const { return coeffs_.empty(); }
  bool is_monic() const { return !coeffs_.empty() && coeffs_.back() == 1; }

  /// Coefficient of x^i; zero outside the stored range (including i < 0).
  int coeff(int i) const {
    if (i < 0 || i >= static_cast<int>(coeffs_.size())) return 0;
    return coeffs_[static_cast<std::size_t>(i)];
  }

  friend bool operator==(const GFPoly& a, const GFPoly& b) {
    return a.base_ == b.base_ && a.coeffs_ == b.coeffs_;
  }
  friend bool operator!=(const GFPoly& a, const GFPoly& b) { return !(a == b); }

 private:
  void trim() {
    while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
  }

  PrimeBase base_;
  std::vector<std::uint8_t> coeffs_;
};

namespace detail {
inline void require_same_base(const GFPoly& a, const GFPoly& b) {
  if (a.base() != b.base()) throw std::invalid_argument("polynomial base mismatch");
}
}  // namespace detail

inline GFPoly poly_add(const GFPoly& a, const GFPoly& c) {
  detail::require_same_base(a, c);
  const int b = a.base().value();
  std::vector<std::uint8_t> out(std::max(a.coeffs().size(), c.coeffs().size()), 0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<std::uint8_t>((a.coeff(static_cast<int>(i)) + c.coeff(static_cast<int>(i))) % b);
  }
  return GFPoly(a.base(), std::move(out));
}

inline GFPoly poly_sub(const GFPoly& a, const GFPoly& c) {
  detail::require_same_base(a, c);
  const int b = a.base().value();
  std::vector<std::uint8_t> out(std::max(a.coeffs().size(), c.coeffs().size()), 0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<std::uint8_t>((a.coeff(static_cast<int>(i)) - c.coeff(static_cast<int>(i)) + b) % b);
  }
  return GFPoly(a.base(), std::move(out));
}

inline GFPoly poly_mul(const GFPoly& a, const GFPoly& c) {
  detail::require_same_base(a, c);
  if (a.is_zero() || c.is_zero()) return GFPoly::zero(a.base());
  const int b = a.base().value();
  std::vector<int> acc(a.coeffs().size() + c.coeffs().size() - 1, 0);
  for (std::size_t i = 0; i < a.coeffs().size(); ++i) {
    for (std::size_t j = 0; j < c.coeffs().size(); ++j) {
      acc[i + j] = (acc[i + j] + a.coeffs()[i] * c.coeffs()[j]) % b;
    }
  }
  std::vector<std::uint8_t> out(acc.begin(), acc.end());
  return GFPoly(a.base(), std::move(out));
}

/// Long division: a = q*d + r with deg(r) < deg(d). Exact over Z_b.
inline std::pair<GFPoly, GFPoly> poly_divmod(const GFPoly& a, const GFPoly& d) {
  detail::require_same_base(a, d);
  if (d.is_zero()) throw std::invalid_argument("polynomial division by zero");
  const int b = a.base().value();
  if (a.degree() < d.degree()) return {GFPoly::zero(a.base()), a};

  // Inverse of the leading coefficient of d in Z_b.
  int lead_inv = 1;
  for (int t = 1; t < b; ++t) {
    if (d.coeffs().back() * t % b == 1) {
      lead_inv = t;
      break;
    }
  }

  std::vector<int> rem(a.coeffs().begin(), a.coeffs().end());
  const int dd = d.degree();
  std::vector<std::uint8_t> quo(static_cast<std::size_t>(a.degree() - dd) + 1, 0);
  for (int i = a.degree(); i >= dd; --i) {
    const int cur = rem[static_cast<std::size_t>(i)] % b;
    if (cur == 0) continue;
    const int factor = cur * lead_inv % b;
    quo[static_cast<std::size_t>(i - dd)] = static_cast<std::uint8_t>(factor);
    for (int j = 0; j <= dd; ++j) {
      auto& slot = rem[static_cast<std::size_t>(i - dd + j)];
      slot = ((slot - factor * d.coeff(j)) % b + b) % b;
    }
  }
  std::vector<std::uint8_t> rv(rem.begin(), rem.end());
  return {GFPoly(a.base(), std::move(quo)), GFPoly(a.base(), std::move(rv))};
}

inline GFPoly poly_mod(const GFPoly& a, const GFPoly& d) { return poly_divmod(a, d).second; }

/// True iff p has no nontrivial factor over Z_b. Trial division against all
/// monic polynomials of degree <= deg(p)/2; affordable at desk-scale degrees.
inline bool is_irreducible(const GFPoly& p) {
  if (p.degree() < 1) throw std::invalid_argument("irreducibility needs degree >= 1");
  const PrimeBase base = p.base();
  const auto b = static_cast<std::uint64_t>(base.value());
  for (int d = 1; 2 * d <= p.degree(); ++d) {
    const std::uint64_t lead = pow_u64(b, static_cast<unsigned>(d));
    for (std::uint64_t low = 0; low < lead; ++low) {
      const GFPoly divisor = GFPoly::from_integer(base, lead + low);
      if (poly_mod(p, divisor).is_zero()) return false;
    }
  }
  return true;
}

/// Monic irreducible modulus of degree n >= 1.
class Modulus {
 public:
  explicit Modulus(GFPoly p) : p_(std::move(p)) {
    if (p_.degree() < 1) throw std::invalid_argument("modulus must have degree >= 1");
    if (!p_.is_monic()) throw std::invalid_argument("modulus must be monic");
    if (!is_irreducible(p_)) throw std::invalid_argument("modulus must be irreducible");
  }

  const GFPoly& poly() const { return p_; }
  int degree() const { return p_.degree(); }
  PrimeBase base() const { return p_.base(); }

  friend bool operator==(const Modulus& a, const Modulus& b) { return a.p_ == b.p_; }
  friend bool operator!=(const Modulus& a, const Modulus& b) { return !(a == b); }

 private:
  GFPoly p_;
};

inline GFPoly poly_mul_mod(const GFPoly& a, const GFPoly& c, const Modulus& p) {
  if (a.base() != p.base() || c.base() != p.base()) {
    throw std::invalid_argument("polynomial base mismatch");
  }
  return poly_mod(poly_mul(a, c), p.poly());
}

inline GFPoly poly_pow_mod(const GFPoly& g, std::uint64_t e, const Modulus& p) {
  GFPoly result = GFPoly::one(p.base());
  GFPoly acc = poly_mod(g, p.poly());
  while (e != 0) {
    if (e & 1) result = poly_mul_mod(result, acc, p);
    acc = poly_mul_mod(acc, acc, p);
    e >>= 1;
  }
  return result;
}

/// The monic irreducible of degree n with the smallest integer encoding.
/// Deterministic, so constructions are reproducible across runs.
inline Modulus find_irreducible(PrimeBase base, int n) {
  if (n < 1) throw std::invalid_argument("degree must be >= 1");
  const std::uint64_t lead = pow_u64(static_cast<std::uint64_t>(base.value()), static_cast<unsigned>(n));
  for (std::uint64_t low = 0; low < lead; ++low) {
    GFPoly cand = GFPoly::from_integer(base, lead + low);
    if (is_irreducible(cand)) return Modulus(std::move(cand));
  }
  throw std::logic_error("no irreducible polynomial found");  // unreachable
}

namespace detail {
inline std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
  std::vector<std::uint64_t> factors;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) {
      factors.push_back(d);
      while (n % d == 0) n /= d;
    }
  }
  if (n > 1) factors.push_back(n);
  return factors;
}
}  // namespace detail

/// Generator of the multiplicative group of residues mod p, chosen as the
/// nonzero residue of smallest integer encoding with full order b^n - 1.
/// The order test checks g^((b^n-1)/r) != 1 for every prime r | b^n - 1;
/// b^n - 1 is factored by trial division, which is instant at desk scale.
inline GFPoly primitive_element(const Modulus& p) {
  const auto b = static_cast<std::uint64_t>(p.base().value());
  const std::uint64_t group_order = pow_u64(b, static_cast<unsigned>(p.degree())) - 1;
  if (group_order > (std::uint64_t{1} << 32)) {
    throw ScaleGuardError("primitive_element: residue group too large");
  }
  const auto factors = detail::prime_factors(group_order);
  const GFPoly one = GFPoly::one(p.base());
  for (std::uint64_t enc = 1; enc <= group_order; ++enc) {
    GFPoly g = GFPoly::from_integer(p.base(), enc);
    bool full_order = true;
    for (std::uint64_t r : factors) {
      if (poly_pow_mod(g, group_order / r, p) == one) {
        full_order = false;
        break;
      }
    }
    if (full_order) return g;
  }
  throw std::logic_error("no primitive element found");  // unreachable
}

/// First w digits (t_1, ..., t_w) of the formal Laurent expansion
/// a(x)/p(x) = sum_{l>=1} t_l x^{-l}, for deg(a) < deg(p) and p monic.
/// Long-division recurrence: t_l = a_{n-l} - sum_{i<l} t_i p_{n-l+i} (mod b).
inline std::vector<std::uint8_t> laurent_digits(const GFPoly& a, const Modulus& p, int w) {
  if (a.base() != p.base()) throw std::invalid_argument("polynomial base mismatch");
  if (w < 1) throw std::invalid_argument("digit count must be >= 1");
  const int n = p.degree();
  if (a.degree() >= n) throw std::invalid_argument("numerator degree must be below modulus degree");
  const int b = p.base().value();

  std::vector<std::uint8_t> t(static_cast<std::size_t>(w), 0);
  for (int l = 1; l <= w; ++l) {
    int acc = a.coeff(n - l) % b;
    for (int i = 1; i < l; ++i) {
      acc -= t[static_cast<std::size_t>(i - 1)] * p.poly().coeff(n - l + i);
    }
    t[static_cast<std::size_t>(l - 1)] = static_cast<std::uint8_t>(((acc % b) + b) % b);
  }
  return t;
}

/// Digitwise mod-b addition of two integer encodings (carry-free).
inline std::uint64_t encoding_add(std::uint64_t x, std::uint64_t y, int base) {
  const auto b = static_cast<std::uint64_t>(base);
  std::uint64_t out = 0;
  std::uint64_t place = 1;
  while (x != 0 || y != 0) {
    out += (x % b + y % b) % b * place;
    x /= b;
    y /= b;
    place *= b;
  }
  return out;
}

}  // namespace qmcfold
