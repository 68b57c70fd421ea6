#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <string>
#include <vector>

namespace phlab {

using Integer = mpz_class;
using Rational = mpq_class;
using RatVec = std::vector<Rational>;
using IntVec = std::vector<Integer>;

// Dense integer matrix with arbitrary precision entries.
class IntMatrix {
 public:
  IntMatrix() = default;
  IntMatrix(std::size_t rows, std::size_t cols);
  static IntMatrix identity(std::size_t n);
  static IntMatrix from_rows(const std::vector<std::vector<long long>>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  Integer& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const Integer& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  IntMatrix operator*(const IntMatrix& o) const;
  IntMatrix operator-(const IntMatrix& o) const;
  bool operator==(const IntMatrix& o) const;

  IntVec apply(const IntVec& v) const;
  RatVec apply(const RatVec& v) const;

  IntMatrix pow(unsigned n) const;
  // Bareiss fraction-free elimination.
  Integer det() const;
  // Exact inverse; only valid when det = ±1.
  IntMatrix unimodular_inverse() const;
  Integer trace() const;

  std::vector<std::vector<long long>> to_rows() const;

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<Integer> a_;
};

// U * M * V = D with D diagonal, d_i | d_{i+1}, d_i >= 0, U and V unimodular.
struct SmithForm {
  IntMatrix U, D, V;
  IntVec diagonal() const;
};
SmithForm smith_normal_form(const IntMatrix& m);

// Solves M x = b exactly over Q. M must be square and nonsingular.
RatVec solve_rational(const IntMatrix& m, const RatVec& b);

// Fractional part in [0,1).
Rational frac(const Rational& q);
Integer floor_q(const Rational& q);
std::string to_string(const Rational& q);
// Exact conversion of a finite double.
Rational rational_from_double(double x);

}  // namespace phlab
