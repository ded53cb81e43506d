#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>
#include <set>

#include "oracles.hpp"
#include "qmcfold/digitspace.hpp"

using namespace qmcfold;

namespace {
GElem random_elem(int b, std::mt19937& rng) {
  std::uniform_int_distribution<int> len(0, 6);
  std::uniform_int_distribution<int> digit(0, b - 1);
  std::vector<std::uint8_t> prefix(static_cast<std::size_t>(len(rng)));
  for (auto& d : prefix) d = static_cast<std::uint8_t>(digit(rng));
  return GElem(b, std::move(prefix), static_cast<std::uint8_t>(digit(rng)));
}
}  // namespace

TEST_CASE("canonical form drops prefix digits equal to the tail") {
  CHECK(GElem(2, {1, 0, 0}) == GElem(2, {1}));
  CHECK(GElem(3, {2, 1, 1}, 1) == GElem(3, {2}, 1));
  CHECK(GElem(2, {1, 1}, 1) == GElem::constant(2, 1));
  CHECK(GElem(2).is_zero());
  CHECK_THROWS_AS(GElem(2, {2}), std::invalid_argument);
  CHECK_THROWS_AS(GElem(1), std::invalid_argument);
}

TEST_CASE("group operation examples") {
  std::mt19937 rng(3);
  const GElem zero(2);
  for (int i = 0; i < 20; ++i) {
    const GElem z = random_elem(2, rng);
    CHECK(z + GElem(2) == z);
  }
  CHECK(GElem(2, {1}) + GElem(2, {1}) == zero);
  // digitwise mod-3: (2,1,0,0,...) + (2,1,1,1,...) = (1,2,1,1,...)
  CHECK(GElem(3, {2, 1}) + GElem(3, {2}, 1) == GElem(3, {1, 2}, 1));
  CHECK_THROWS_AS(GElem(2) + GElem(3), std::invalid_argument);
}

TEST_CASE("subtraction inverts addition") {
  std::mt19937 rng(5);
  for (int b : {2, 3, 5}) {
    for (int i = 0; i < 50; ++i) {
      const GElem z = random_elem(b, rng);
      const GElem w = random_elem(b, rng);
      CHECK((z + w) - w == z);
    }
  }
}

TEST_CASE("tent examples") {
  CHECK(tent(GElem(2)).is_zero());
  // (1,0,1,0,...) -> (0-1, 1-1, 0-1, ...) = (1,0,1,1,1,...)
  CHECK(tent(GElem(2, {1, 0, 1})) == GElem(2, {1, 0}, 1));
  // b=3: (2,1,0,...) -> (1-2, 0-2, ...) = (2,1,1,...)
  CHECK(tent(GElem(3, {2, 1})) == GElem(3, {2}, 1));
}

TEST_CASE("tent matches its digit formula on random inputs") {
  std::mt19937 rng(9);
  for (int b : {2, 3, 5}) {
    for (int i = 0; i < 100; ++i) {
      const GElem z = random_elem(b, rng);
      const GElem f = tent(z);
      for (std::size_t pos = 1; pos <= 10; ++pos) {
        CHECK(f.digit(pos) == (z.digit(pos + 1) - z.digit(1) + b) % b);
      }
    }
  }
}

TEST_CASE("tent is a homomorphism") {
  std::mt19937 rng(13);
  for (int b : {2, 3, 5}) {
    for (int i = 0; i < 100; ++i) {
      const GElem z = random_elem(b, rng);
      const GElem w = random_elem(b, rng);
      CHECK(tent(z + w) == tent(z) + tent(w));
    }
  }
}

TEST_CASE("projection examples") {
  CHECK(project(GElem(2)) == Rational(0));
  CHECK(project(GElem::constant(2, 1)) == Rational(1));
  CHECK(project(GElem::constant(5, 4)) == Rational(1));
  CHECK(project(GElem(2, {1, 0}, 1)) == Rational(3, 4));
  CHECK(project(GElem(3, {2}, 1)) == Rational(5, 6));
}

TEST_CASE("section examples") {
  CHECK(section(Rational(0), 2).is_zero());
  CHECK(section(Rational(3, 4), 2) == GElem(2, {1, 1}));
  CHECK(section(Rational(1), 2) == GElem::constant(2, 1));
  CHECK(section(Rational(5, 6), 3) == GElem(3, {2}, 1));
  // finite expansion preferred over the all-(b-1) tail
  CHECK(section(Rational(1, 2), 2) == GElem(2, {1}));
  CHECK_THROWS_AS(section(Rational(1, 3), 2), std::invalid_argument);
  CHECK_THROWS_AS(section(Rational(1, 4), 3), std::invalid_argument);
  CHECK_THROWS_AS(section(Rational(3, 2), 2), std::invalid_argument);
}

TEST_CASE("section then projection is the identity") {
  for (int b : {2, 3, 5}) {
    for (int L = 0; L <= 3; ++L) {
      const std::int64_t den = static_cast<std::int64_t>(b - 1) *
                               static_cast<std::int64_t>(pow_u64(static_cast<std::uint64_t>(b),
                                                                 static_cast<unsigned>(L)));
      for (std::int64_t num = 0; num <= den; ++num) {
        const Rational x(num, den);
        CHECK(project(section(x, b)) == x);
      }
    }
  }
}

TEST_CASE("section never emits an all-(b-1) tail below 1") {
  for (int b : {2, 3}) {
    const std::int64_t den = static_cast<std::int64_t>(b - 1) * b * b;
    for (std::int64_t num = 0; num < den; ++num) {
      CHECK(section(Rational(num, den), b).tail() != b - 1);
    }
  }
}

TEST_CASE("section_truncated keeps leading digits") {
  const GElem z = section_truncated(1.0 / 3.0, 2, 6);
  CHECK(z.prefix() == std::vector<std::uint8_t>{0, 1, 0, 1, 0, 1});
  CHECK(section_truncated(1.0, 3, 4) == GElem::constant(3, 2));
}

TEST_CASE("dyadic tent matches 1 - |2x - 1| exactly") {
  const int b = 2;
  const std::int64_t den = 1 << 10;
  for (std::int64_t u = 0; u <= den; ++u) {
    const Rational x(u, den);
    const Rational image = project(tent(section(x, b)));
    const Rational linear = Rational(1) - abs(Rational(2) * x - Rational(1));
    CHECK(image == linear);
  }
}

TEST_CASE("rule validation") {
  const PrimeBase b2(2);
  const Modulus p(GFPoly(b2, {1, 1, 1}));
  CHECK_NOTHROW(Rule(b2, 1, 2, p, {GFPoly::one(b2)}));
  CHECK_THROWS_AS(Rule(b2, 3, 2, p, {GFPoly::one(b2)}), std::invalid_argument);   // m > n
  CHECK_THROWS_AS(Rule(b2, 1, 2, p, {}), std::invalid_argument);                  // s = 0
  CHECK_THROWS_AS(Rule(b2, 1, 2, p, {GFPoly(b2, {1, 1, 1})}), std::invalid_argument);  // deg q >= n
}

TEST_CASE("lattice point examples") {
  const PrimeBase b2(2);
  {
    const Rule rule(b2, 1, 1, Modulus(GFPoly(b2, {0, 1})), {GFPoly::one(b2)});
    const PointSet pts = lattice_points(rule);
    REQUIRE(pts.size() == 2);
    CHECK(pts.points[0][0].is_zero());
    CHECK(pts.points[1][0] == GElem(2, {1}));
    CHECK(project(pts.points[0][0]) == Rational(0));
    CHECK(project(pts.points[1][0]) == Rational(1, 2));
  }
  {
    // zero generating polynomial pins the coordinate at zero
    const Rule rule(b2, 2, 2, Modulus(GFPoly(b2, {1, 1, 1})), {GFPoly::zero(b2)});
    for (const auto& pt : lattice_points(rule).points) CHECK(pt[0].is_zero());
  }
  {
    const Rule rule(b2, 2, 2, Modulus(GFPoly(b2, {1, 1, 1})), {GFPoly::one(b2)});
    const PointSet pts = lattice_points(rule);
    REQUIRE(pts.size() == 4);
    CHECK(pts.points[1][0] == GElem(2, {0, 1}));
    CHECK(pts.points[2][0] == GElem(2, {1, 1}));
    CHECK(pts.points[3][0] == GElem(2, {1, 0}));
  }
}

TEST_CASE("every lattice point set is a group under digitwise addition") {
  const PrimeBase b2(2);
  const PrimeBase b3(3);
  const std::vector<Rule> rules = {
      Rule(b2, 2, 3, find_irreducible(b2, 3), {GFPoly::one(b2), GFPoly(b2, {1, 1})}),
      Rule(b3, 1, 2, find_irreducible(b3, 2), {GFPoly(b3, {2, 1})}),
      Rule(b2, 3, 3, find_irreducible(b2, 3), {GFPoly(b2, {0, 1}), GFPoly(b2, {1, 0, 1})}),
  };
  for (const auto& rule : rules) {
    const PointSet pts = lattice_points(rule);
    std::set<std::vector<GElem>> members(pts.points.begin(), pts.points.end());
    for (const auto& a : pts.points) {
      for (const auto& b : pts.points) {
        std::vector<GElem> sum;
        for (std::size_t j = 0; j < a.size(); ++j) sum.push_back(a[j] + b[j]);
        CHECK(members.count(sum) == 1);
      }
    }
  }
}

TEST_CASE("matrix net examples") {
  // identity matrix: point h carries the digits of h
  {
    GeneratingMatrix eye(2, {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
    const PointSet pts = digital_net_points({eye}, 3);
    REQUIRE(pts.size() == 8);
    CHECK(pts.points[5][0] == GElem(2, {1, 0, 1}));
    CHECK(pts.points[3][0] == GElem(2, {1, 1}));
  }
  {
    GeneratingMatrix zero(2, {{0, 0}, {0, 0}});
    for (const auto& pt : digital_net_points({zero}, 2).points) CHECK(pt[0].is_zero());
  }
  {
    GeneratingMatrix copy(2, {{1}, {1}});
    const PointSet pts = digital_net_points({copy}, 1);
    CHECK(pts.points[1][0] == GElem(2, {1, 1}));
  }
  GeneratingMatrix narrow(2, {{1}});
  CHECK_THROWS_AS(digital_net_points({narrow}, 2), std::invalid_argument);
}

TEST_CASE("fold_generating_matrix examples") {
  {
    GeneratingMatrix zero(2, {{0}, {0}});
    const auto folded = fold_generating_matrix(zero);
    CHECK(folded.mat.rows == std::vector<std::vector<std::uint8_t>>{{0}, {0}});
    CHECK(folded.tail_row == std::vector<std::uint8_t>{0});
  }
  {
    GeneratingMatrix c(2, {{1}, {0}});
    const auto folded = fold_generating_matrix(c);
    CHECK(folded.mat.rows == std::vector<std::vector<std::uint8_t>>{{1}, {1}});
    CHECK(folded.tail_row == std::vector<std::uint8_t>{1});
  }
  {
    GeneratingMatrix c(3, {{1}});
    const auto folded = fold_generating_matrix(c);
    CHECK(folded.mat.rows == std::vector<std::vector<std::uint8_t>>{{2}});
    CHECK(folded.tail_row == std::vector<std::uint8_t>{2});
  }
}

TEST_CASE("folded matrices generate the tent image of the net") {
  std::mt19937 rng(21);
  for (int b : {2, 3}) {
    for (int m = 1; m <= 3; ++m) {
      for (int n_rows = 1; n_rows <= 4; ++n_rows) {
        for (int trial = 0; trial < 8; ++trial) {
          std::uniform_int_distribution<int> digit(0, b - 1);
          std::vector<std::vector<std::uint8_t>> rows(static_cast<std::size_t>(n_rows));
          for (auto& row : rows) {
            row.resize(static_cast<std::size_t>(m));
            for (auto& e : row) e = static_cast<std::uint8_t>(digit(rng));
          }
          const GeneratingMatrix c(b, rows);
          const PointSet plain = digital_net_points({c}, m);
          const PointSet folded = digital_net_points({fold_generating_matrix(c)}, m);
          REQUIRE(plain.size() == folded.size());
          for (std::size_t h = 0; h < plain.size(); ++h) {
            CHECK(folded.points[h][0] == tent(plain.points[h][0]));
          }
        }
      }
    }
  }
}
