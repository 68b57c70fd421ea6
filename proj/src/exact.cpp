#include "phlab/exact.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "phlab/error.hpp"

namespace phlab {

IntMatrix::IntMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols, 0) {}

IntMatrix IntMatrix::identity(std::size_t n) {
  IntMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

IntMatrix IntMatrix::from_rows(const std::vector<std::vector<long long>>& rows) {
  if (rows.empty()) return {};
  IntMatrix m(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    require(rows[i].size() == m.cols_, ErrorCode::PreconditionViolated, "ragged matrix rows");
    for (std::size_t j = 0; j < m.cols_; ++j) m(i, j) = static_cast<long>(rows[i][j]);
  }
  return m;
}

IntMatrix IntMatrix::operator*(const IntMatrix& o) const {
  IntMatrix r(rows_, o.cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = 0; k < cols_; ++k) {
      if ((*this)(i, k) == 0) continue;
      for (std::size_t j = 0; j < o.cols_; ++j) r(i, j) += (*this)(i, k) * o(k, j);
    }
  return r;
}

IntMatrix IntMatrix::operator-(const IntMatrix& o) const {
  IntMatrix r(rows_, cols_);
  for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] - o.a_[i];
  return r;
}

bool IntMatrix::operator==(const IntMatrix& o) const {
  return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
}

IntVec IntMatrix::apply(const IntVec& v) const {
  IntVec r(rows_, 0);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) r[i] += (*this)(i, j) * v[j];
  return r;
}

RatVec IntMatrix::apply(const RatVec& v) const {
  RatVec r(rows_, 0);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) r[i] += Rational((*this)(i, j)) * v[j];
  for (auto& x : r) x.canonicalize();
  return r;
}

IntMatrix IntMatrix::pow(unsigned n) const {
  IntMatrix result = identity(rows_), base = *this;
  while (n) {
    if (n & 1u) result = result * base;
    n >>= 1u;
    if (n) base = base * base;
  }
  return result;
}

Integer IntMatrix::det() const {
  const std::size_t n = rows_;
  if (n == 0) return 1;
  std::vector<Integer> m = a_;
  auto at = [&](std::size_t i, std::size_t j) -> Integer& { return m[i * n + j]; };
  Integer prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (at(k, k) == 0) {
      std::size_t p = k + 1;
      while (p < n && at(p, k) == 0) ++p;
      if (p == n) return 0;
      for (std::size_t j = 0; j < n; ++j) std::swap(at(k, j), at(p, j));
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) {
        at(i, j) = (at(i, j) * at(k, k) - at(i, k) * at(k, j));
        mpz_divexact(at(i, j).get_mpz_t(), at(i, j).get_mpz_t(), prev.get_mpz_t());
      }
    prev = at(k, k);
  }
  return sign * at(n - 1, n - 1);
}

Integer IntMatrix::trace() const {
  Integer t = 0;
  for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
  return t;
}

IntMatrix IntMatrix::unimodular_inverse() const {
  const Integer d = det();
  require(abs(d) == 1, ErrorCode::NotUnimodular, "inverse of non-unimodular matrix");
  IntMatrix inv(rows_, cols_);
  for (std::size_t j = 0; j < cols_; ++j) {
    RatVec e(rows_, 0);
    e[j] = 1;
    RatVec x = solve_rational(*this, e);
    for (std::size_t i = 0; i < rows_; ++i) inv(i, j) = x[i].get_num();
  }
  return inv;
}

std::vector<std::vector<long long>> IntMatrix::to_rows() const {
  std::vector<std::vector<long long>> r(rows_, std::vector<long long>(cols_));
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) r[i][j] = (*this)(i, j).get_si();
  return r;
}

IntVec SmithForm::diagonal() const {
  IntVec d;
  for (std::size_t i = 0; i < std::min(D.rows(), D.cols()); ++i) d.push_back(D(i, i));
  return d;
}

namespace {

void swap_rows(IntMatrix& m, std::size_t a, std::size_t b) {
  for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(a, j), m(b, j));
}
void swap_cols(IntMatrix& m, std::size_t a, std::size_t b) {
  for (std::size_t i = 0; i < m.rows(); ++i) std::swap(m(i, a), m(i, b));
}
// row a -= q * row b
void add_row(IntMatrix& m, std::size_t a, std::size_t b, const Integer& q) {
  for (std::size_t j = 0; j < m.cols(); ++j) m(a, j) -= q * m(b, j);
}
void add_col(IntMatrix& m, std::size_t a, std::size_t b, const Integer& q) {
  for (std::size_t i = 0; i < m.rows(); ++i) m(i, a) -= q * m(i, b);
}
void negate_row(IntMatrix& m, std::size_t a) {
  for (std::size_t j = 0; j < m.cols(); ++j) m(a, j) = -m(a, j);
}

Integer fdiv(const Integer& a, const Integer& b) {
  Integer q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

}  // namespace

SmithForm smith_normal_form(const IntMatrix& m) {
  SmithForm s{IntMatrix::identity(m.rows()), m, IntMatrix::identity(m.cols())};
  IntMatrix& D = s.D;
  const std::size_t r = m.rows(), c = m.cols();
  for (std::size_t t = 0; t < std::min(r, c); ++t) {
    for (;;) {
      // pivot: smallest nonzero |entry| in the trailing block
      std::size_t pi = r, pj = c;
      for (std::size_t i = t; i < r; ++i)
        for (std::size_t j = t; j < c; ++j)
          if (D(i, j) != 0 && (pi == r || abs(D(i, j)) < abs(D(pi, pj)))) pi = i, pj = j;
      if (pi == r) return s;
      swap_rows(D, t, pi);
      swap_rows(s.U, t, pi);
      swap_cols(D, t, pj);
      swap_cols(s.V, t, pj);
      bool clean = true;
      for (std::size_t i = t + 1; i < r; ++i) {
        Integer q = fdiv(D(i, t), D(t, t));
        add_row(D, i, t, q);
        add_row(s.U, i, t, q);
        if (D(i, t) != 0) clean = false;
      }
      for (std::size_t j = t + 1; j < c; ++j) {
        Integer q = fdiv(D(t, j), D(t, t));
        add_col(D, j, t, q);
        add_col(s.V, j, t, q);
        if (D(t, j) != 0) clean = false;
      }
      if (!clean) continue;
      // divisibility of the trailing block
      std::size_t bad = r;
      for (std::size_t i = t + 1; i < r && bad == r; ++i)
        for (std::size_t j = t + 1; j < c; ++j)
          if (D(i, j) % D(t, t) != 0) {
            bad = i;
            break;
          }
      if (bad == r) break;
      add_row(D, t, bad, -1);
      add_row(s.U, t, bad, -1);
    }
    if (D(t, t) < 0) {
      negate_row(D, t);
      negate_row(s.U, t);
    }
  }
  return s;
}

RatVec solve_rational(const IntMatrix& m, const RatVec& b) {
  const std::size_t n = m.rows();
  require(m.square() && b.size() == n, ErrorCode::PreconditionViolated, "solve_rational shape");
  std::vector<RatVec> a(n, RatVec(n + 1));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a[i][j] = m(i, j);
    a[i][n] = b[i];
  }
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    while (p < n && a[p][k] == 0) ++p;
    require(p < n, ErrorCode::PreconditionViolated, "singular system");
    std::swap(a[k], a[p]);
    for (std::size_t i = 0; i < n; ++i) {
      if (i == k || a[i][k] == 0) continue;
      Rational f = a[i][k] / a[k][k];
      for (std::size_t j = k; j <= n; ++j) a[i][j] -= f * a[k][j];
    }
  }
  RatVec x(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = a[i][n] / a[i][i];
    x[i].canonicalize();
  }
  return x;
}

Integer floor_q(const Rational& q) {
  Integer f;
  mpz_fdiv_q(f.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return f;
}

Rational frac(const Rational& q) {
  Rational r = q - Rational(floor_q(q));
  r.canonicalize();
  return r;
}

std::string to_string(const Rational& q) {
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

Rational rational_from_double(double x) {
  require(std::isfinite(x), ErrorCode::PreconditionViolated, "non-finite double");
  Rational r(x);
  r.canonicalize();
  return r;
}

}  // namespace phlab
