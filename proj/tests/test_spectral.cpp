#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>

#include "oracles.hpp"
#include "qmcfold/spectral.hpp"

using namespace qmcfold;

TEST_CASE("dick weight examples") {
  CHECK(dick_weight(0, 2, 2) == 0);
  CHECK(dick_weight(6, 2, 2) == 5);    // 110_2: positions 3,2
  CHECK(dick_weight(13, 2, 2) == 7);   // 1101_2: top two of {4,3,1}
  CHECK(dick_weight(13, 2, 3) == 8);
  CHECK(dick_weight(5, 3, 2) == 3);    // 12_3: positions 2,1
  CHECK(dick_weight(1, 2, 4) == 1);
  CHECK_THROWS_AS(dick_weight(5, 2, 0), std::invalid_argument);
}

TEST_CASE("digit sum and the fold-frequency classes") {
  CHECK(digit_sum(0, 2) == 0);
  CHECK_FALSE(digit_sum_vanishes(0, 2));
  CHECK(digit_sum_vanishes_or_zero(0, 2));
  CHECK(digit_sum(3, 2) == 2);
  CHECK(digit_sum_vanishes(3, 2));
  CHECK(digit_sum(5, 3) == 3);
  CHECK(digit_sum_vanishes(5, 3));
  CHECK_FALSE(digit_sum_vanishes(4, 3));  // digits (1,1): sum 2
}

TEST_CASE("character examples") {
  const GElem z2(2, {1, 1});
  CHECK(character_exponent(0, z2) == 0);
  CHECK(character_value(0, z2) == std::complex<double>{1.0, 0.0});
  CHECK(character_exponent(1, z2) == 1);  // (-1)^{z_1}
  CHECK(character_value(1, z2).real() == Catch::Approx(-1.0));
  const GElem z3(3, {1});
  CHECK(character_exponent(2, z3) == 2);
  CHECK(character_value(2, z3).real() == Catch::Approx(std::cos(4.0 * 3.14159265358979323846 / 3)));
}

TEST_CASE("characters read tails past the prefix") {
  const GElem z(2, {0}, 1);  // digits 0,1,1,1,...
  CHECK(character_exponent(2, z) == 1);   // k=2 reads digit 2
  CHECK(character_exponent(4, z) == 1);   // k=4 reads digit 3
  CHECK(character_exponent(1, z) == 0);
}

TEST_CASE("walsh examples") {
  CHECK(walsh_value(0, Rational(1, 3), 4).real() == Catch::Approx(1.0));
  CHECK(walsh_value(1, Rational(1, 2), 2).real() == Catch::Approx(-1.0));
  CHECK(walsh_value(2, Rational(1, 2), 2).real() == Catch::Approx(1.0));
}

TEST_CASE("character orthogonality over three digits") {
  // Exact integer statement: the sum over the full 3-digit space of
  // W_k * conj(W_l) has equal exponent counts iff k != l.
  for (int b : {2, 3}) {
    const std::uint64_t kmax = pow_u64(static_cast<std::uint64_t>(b), 3);
    const auto elems = oracles::all_prefixes(b, 3);
    for (std::uint64_t k = 0; k < kmax; ++k) {
      for (std::uint64_t l = 0; l < kmax; ++l) {
        std::vector<std::int64_t> counts(static_cast<std::size_t>(b), 0);
        for (const auto& z : elems) {
          const int e = (character_exponent(k, z) - character_exponent(l, z) + b) % b;
          ++counts[static_cast<std::size_t>(e)];
        }
        ExactCharSum sum{b, counts};
        if (k == l) {
          CHECK(sum.equals_integer(static_cast<std::int64_t>(elems.size())));
        } else {
          CHECK(sum.is_zero());
        }
      }
    }
  }
}

TEST_CASE("character multiplicativity") {
  std::mt19937 rng(31);
  for (int b : {2, 3, 5}) {
    std::uniform_int_distribution<int> digit(0, b - 1);
    std::uniform_int_distribution<std::uint64_t> freq(0, 3000);
    for (int i = 0; i < 200; ++i) {
      std::vector<std::uint8_t> dz(6), dw(6);
      for (auto& d : dz) d = static_cast<std::uint8_t>(digit(rng));
      for (auto& d : dw) d = static_cast<std::uint8_t>(digit(rng));
      const GElem z(b, dz, static_cast<std::uint8_t>(digit(rng)));
      const GElem w(b, dw, static_cast<std::uint8_t>(digit(rng)));
      const std::uint64_t k = freq(rng);
      CHECK(character_exponent(k, z + w) ==
            (character_exponent(k, z) + character_exponent(k, w)) % b);
    }
  }
}

TEST_CASE("truncated index polynomial") {
  const PrimeBase b2(2);
  CHECK(truncated_index_poly(3, b2, 2) == GFPoly(b2, {1, 1}));
  CHECK(truncated_index_poly(4, b2, 2).is_zero());
  CHECK(truncated_index_poly(0, b2, 3).is_zero());
  CHECK(truncated_index_poly(11, b2, 2) == GFPoly(b2, {1, 1}));
}

TEST_CASE("dual lattice membership examples") {
  const PrimeBase b2(2);
  const Rule rule(b2, 2, 2, Modulus(GFPoly(b2, {1, 1, 1})), {GFPoly::one(b2)});
  CHECK(in_dual_lattice({0}, rule));
  CHECK_FALSE(in_dual_lattice({3}, rule));  // tr_2(3) = 1+x, deg 1 >= 0
  CHECK(in_dual_lattice({4}, rule));        // tr_2 kills the third digit
  CHECK_THROWS_AS(in_dual_lattice({1, 2}, rule), std::invalid_argument);
}

TEST_CASE("character sum examples") {
  const PrimeBase b2(2);
  const Rule rule(b2, 1, 1, Modulus(GFPoly(b2, {0, 1})), {GFPoly::one(b2)});
  const PointSet pts = lattice_points(rule);
  CHECK(character_sum({0}, pts).equals_integer(2));
  CHECK(character_sum({2}, pts).equals_integer(2));  // second digits are both zero
  CHECK(character_sum({1}, pts).is_zero());          // 1 + (-1)
}

TEST_CASE("character sums match dual membership") {
  // Dual-lattice duality on a grid of small rules, exact in integers.
  for (int b : {2, 3}) {
    const PrimeBase base(b);
    for (int m = 1; m <= 2; ++m) {
      for (int n = m; n <= 3; ++n) {
        const Modulus p = find_irreducible(base, n);
        const std::uint64_t qcount = pow_u64(static_cast<std::uint64_t>(b), static_cast<unsigned>(n));
        const std::uint64_t kmax = qcount * static_cast<std::uint64_t>(b);
        for (std::uint64_t q1 = 0; q1 < qcount; q1 += (b == 2 ? 1 : 2)) {
          const Rule rule(base, m, n, p, {GFPoly::from_integer(base, q1)});
          const PointSet pts = lattice_points(rule);
          const auto count = static_cast<std::int64_t>(pts.size());
          for (std::uint64_t k = 0; k < kmax; ++k) {
            const ExactCharSum sum = character_sum({k}, pts);
            if (in_dual_lattice({k}, rule)) {
              CHECK(sum.equals_integer(count));
            } else {
              CHECK(sum.is_zero());
            }
          }
        }
      }
    }
  }
}

TEST_CASE("paley partial sums over short blocks") {
  // sum_{k < b^n} W_k(z) is b^n when the first n digits vanish, else 0.
  for (int b : {2, 3}) {
    for (int n = 1; n <= 2; ++n) {
      const std::uint64_t kmax = pow_u64(static_cast<std::uint64_t>(b), static_cast<unsigned>(n));
      for (const auto& z : oracles::all_prefixes(b, n + 1)) {
        std::vector<std::int64_t> counts(static_cast<std::size_t>(b), 0);
        for (std::uint64_t k = 0; k < kmax; ++k) {
          ++counts[static_cast<std::size_t>(character_exponent(k, z))];
        }
        ExactCharSum sum{b, counts};
        bool leading_zero = true;
        for (int i = 1; i <= n; ++i) leading_zero = leading_zero && z.digit(static_cast<std::size_t>(i)) == 0;
        if (leading_zero) {
          CHECK(sum.equals_integer(static_cast<std::int64_t>(kmax)));
        } else {
          CHECK(sum.is_zero());
        }
      }
    }
  }
}

TEST_CASE("folded dual equals the floor image of the surviving frequencies") {
  // For small rules: k' lies in the dual of the folded net iff k' = floor(k/b)
  // for some k in the dual with vanishing digit sum (or k = 0).
  for (int b : {2, 3}) {
    const PrimeBase base(b);
    const int m = 1, n = 2;
    const Modulus p = find_irreducible(base, n);
    for (std::uint64_t q1 = 0; q1 < pow_u64(static_cast<std::uint64_t>(b), n); ++q1) {
      const Rule rule(base, m, n, p, {GFPoly::from_integer(base, q1)});
      const PointSet folded = fold_points(lattice_points(rule));
      const auto count = static_cast<std::int64_t>(folded.size());

      const std::uint64_t k_cut = pow_u64(static_cast<std::uint64_t>(b), n + 2);
      std::set<std::uint64_t> floor_image;
      for (std::uint64_t k = 0; k < k_cut; ++k) {
        if (!digit_sum_vanishes_or_zero(k, b)) continue;
        if (!in_dual_lattice({k}, rule)) continue;
        floor_image.insert(k / static_cast<std::uint64_t>(b));
      }
      const std::uint64_t kp_cut = pow_u64(static_cast<std::uint64_t>(b), n + 1);
      for (std::uint64_t kp = 0; kp < kp_cut; ++kp) {
        const bool in_folded_dual = character_sum({kp}, folded).equals_integer(count);
        CHECK(in_folded_dual == (floor_image.count(kp) == 1));
      }
    }
  }
}
