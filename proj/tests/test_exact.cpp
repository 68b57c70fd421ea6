#include "doctest.h"
#include "phlab/error.hpp"
#include "phlab/exact.hpp"

using namespace phlab;

TEST_CASE("determinant and powers") {
  auto a = IntMatrix::from_rows({{2, 1}, {1, 1}});
  CHECK(a.det() == 1);
  CHECK(a.pow(3) == IntMatrix::from_rows({{13, 8}, {8, 5}}));
  auto b = IntMatrix::from_rows({{0, 2, 1}, {3, 1, 4}, {1, 5, 9}});
  // cofactor expansion by hand: 0*(9-20) - 2*(27-4) + 1*(15-1) = -32
  CHECK(b.det() == -32);
}

TEST_CASE("smith normal form reproduces the matrix") {
  std::vector<IntMatrix> cases = {IntMatrix::from_rows({{2, 4}, {6, 8}}),
                                  IntMatrix::from_rows({{12, 8}, {8, 4}}),
                                  IntMatrix::from_rows({{4, 0, 0}, {0, 6, 0}, {0, 0, 10}}),
                                  IntMatrix::from_rows({{1, 2, 3}, {4, 5, 6}, {7, 8, 10}})};
  for (const auto& m : cases) {
    auto s = smith_normal_form(m);
    CHECK(s.U * m * s.V == s.D);
    CHECK(abs(s.U.det()) == 1);
    CHECK(abs(s.V.det()) == 1);
    auto d = s.diagonal();
    for (std::size_t i = 0; i + 1 < d.size(); ++i) {
      CHECK(d[i] >= 0);
      if (d[i] != 0) CHECK(d[i + 1] % d[i] == 0);
    }
    for (std::size_t i = 0; i < s.D.rows(); ++i)
      for (std::size_t j = 0; j < s.D.cols(); ++j)
        if (i != j) CHECK(s.D(i, j) == 0);
  }
  auto s = smith_normal_form(IntMatrix::from_rows({{4, 0, 0}, {0, 6, 0}, {0, 0, 10}}));
  // invariant factors of diag(4,6,10): gcds give 2, 2*... = (2, 2, 60)
  CHECK(s.diagonal() == IntVec{2, 2, 60});
}

TEST_CASE("rational helpers") {
  CHECK(frac(Rational(-1, 3)) == Rational(2, 3));
  CHECK(frac(Rational(7, 2)) == Rational(1, 2));
  CHECK(to_string(Rational(3, 5)) == "3/5");
  CHECK(rational_from_double(0.5) == Rational(1, 2));
  auto x = solve_rational(IntMatrix::from_rows({{2, 1}, {1, 1}}), {Rational(1), Rational(0)});
  CHECK(x == RatVec{Rational(1), Rational(-1)});
  CHECK_THROWS_AS(solve_rational(IntMatrix::from_rows({{1, 2}, {2, 4}}), {1, 1}), Error);
}
