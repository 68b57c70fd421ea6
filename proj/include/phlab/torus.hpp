#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "phlab/exact.hpp"

namespace phlab::torus {

inline constexpr double kHyperbolicTol = 1e-9;

// Real Jordan block of the eigen decomposition (size 1 or 2, no defective blocks).
struct EigenBlock {
  int start = 0;
  int size = 1;
  double modulus = 0;
  double lambda = 0;  // real eigenvalue when size == 1
  double angle = 0;   // argument when size == 2
  bool stable = false;
};

struct HyperbolicSplitting {
  std::vector<Eigen::VectorXd> stable_basis;
  std::vector<Eigen::VectorXd> unstable_basis;
  double rate_s = 0;  // ln of the largest stable modulus
  double rate_u = 0;  // ln of the smallest unstable modulus
  int dim_s = 0, dim_u = 0;
  // A V = V Lambda; columns of V: stable blocks first, then unstable.
  Eigen::MatrixXd V, V_inv, Lambda;
  std::vector<EigenBlock> blocks;
  double kappa = 1;  // condition number of V

  // Lambda^k xi for integer k (negative allowed).
  Eigen::VectorXd power_eigen(const Eigen::VectorXd& xi, long k) const;
  Eigen::VectorXd to_eigen(const Eigen::VectorXd& v) const { return V_inv * v; }
  Eigen::VectorXd from_eigen(const Eigen::VectorXd& xi) const { return V * xi; }
  double norm_s() const;  // ||A|_{L^s}||
  double conorm_u() const;  // m(A|_{L^u})
};

class ToralAutomorphism {
 public:
  ToralAutomorphism(IntMatrix m, HyperbolicSplitting split);

  std::size_t dimension() const { return m_.rows(); }
  const IntMatrix& matrix() const { return m_; }
  const IntMatrix& inverse() const { return inv_; }
  const Eigen::MatrixXd& matrix_d() const { return md_; }
  const Eigen::MatrixXd& inverse_d() const { return invd_; }
  const HyperbolicSplitting& splitting() const { return split_; }
  int det() const { return det_; }

 private:
  IntMatrix m_, inv_;
  Eigen::MatrixXd md_, invd_;
  HyperbolicSplitting split_;
  int det_ = 1;
};

// Throws NotUnimodular / NotHyperbolic.
ToralAutomorphism validate_automorphism(const IntMatrix& m);
ToralAutomorphism validate_automorphism(const std::vector<std::vector<long long>>& rows);

class TorusPoint {
 public:
  static TorusPoint exact(RatVec coords);
  static TorusPoint numeric(std::vector<double> coords);
  static TorusPoint numeric(const Eigen::VectorXd& coords);

  bool is_exact() const { return exact_; }
  std::size_t dimension() const { return exact_ ? q_.size() : x_.size(); }
  const RatVec& rational() const;
  std::vector<double> coords() const;
  Eigen::VectorXd vec() const;
  std::string to_string() const;

  bool operator==(const TorusPoint& o) const;
  // Lexicographic; exact points only compare exactly.
  bool operator<(const TorusPoint& o) const;

  static inline std::size_t max_denominator_bits = 1u << 16;

 private:
  bool exact_ = false;
  RatVec q_;
  std::vector<double> x_;
};

// Euclidean distance on T^d.
double torus_distance(const TorusPoint& a, const TorusPoint& b);
double torus_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b);
Eigen::VectorXd reduce_mod1(Eigen::VectorXd v);

TorusPoint iterate(const ToralAutomorphism& A, const TorusPoint& x, long n);
// Lift tracking: no reduction mod 1.
RatVec iterate_lift(const ToralAutomorphism& A, RatVec lift, long n);
Eigen::VectorXd iterate_lift(const ToralAutomorphism& A, Eigen::VectorXd lift, long n);

struct PeriodicOrbit {
  std::vector<TorusPoint> points;
  std::size_t period() const { return points.size(); }
  const TorusPoint& base() const { return points.front(); }
  const TorusPoint& at(long i) const;
  bool operator==(const PeriodicOrbit& o) const { return points == o.points; }
};

// The orbit of an exact periodic point, starting at x (x itself is the base).
PeriodicOrbit orbit_of(const ToralAutomorphism& A, const TorusPoint& x, std::size_t max_period = 1u << 20);
// Same orbit rotated so that the base is the lexicographically smallest point.
PeriodicOrbit canonical(PeriodicOrbit o);

Integer periodic_point_count(const ToralAutomorphism& A, unsigned n);

inline constexpr std::uint64_t kDefaultEnumerationCap = 10'000'000;
// All solutions of A^n x = x grouped into orbits, sorted by (period, base).
std::vector<PeriodicOrbit> periodic_points(const ToralAutomorphism& A, unsigned n,
                                           std::uint64_t cap = kDefaultEnumerationCap);
// All orbits whose minimal period is at most period_cap.
std::vector<PeriodicOrbit> periodic_orbits_up_to(const ToralAutomorphism& A, unsigned period_cap,
                                                 std::uint64_t cap = kDefaultEnumerationCap);

struct HeteroclinicPoint {
  TorusPoint point = TorusPoint::numeric(std::vector<double>{});
  Eigen::VectorXd lift;           // p base + V_u s
  Eigen::VectorXd eigen_u;        // eigen coordinates of z - p (unstable part only)
  Eigen::VectorXd eigen_s;        // eigen coordinates of z - (q + k) (stable part only)
  std::vector<long> translate;    // k
  double lift_norm = 0;
  PeriodicOrbit p, q;

  // Coordinates mod 1 of A^n z; forward uses the q anchor, backward the p anchor.
  Eigen::VectorXd orbit_point(const ToralAutomorphism& A, long n) const;
};

HeteroclinicPoint heteroclinic_point(const ToralAutomorphism& A, const PeriodicOrbit& p,
                                     const PeriodicOrbit& q, double norm_bound,
                                     bool exclude_trivial = false);

class PseudoOrbit {
 public:
  PseudoOrbit(const ToralAutomorphism& A, std::vector<TorusPoint> points, bool periodic);

  const std::vector<TorusPoint>& points() const { return points_; }
  const std::vector<Eigen::VectorXd>& jumps() const { return jumps_; }
  const std::vector<IntVec>& carries() const { return carries_; }
  bool periodic() const { return periodic_; }
  std::size_t size() const { return points_.size(); }
  double delta() const;

 private:
  std::vector<TorusPoint> points_;
  std::vector<Eigen::VectorXd> jumps_;
  std::vector<IntVec> carries_;
  bool periodic_;
};

struct ShadowConstants {
  double kappa = 1;
  double mu_s = 0, mu_u = 0;
  double mu0 = 0;
  double C0 = 1;
  double delta0 = 0;
  // C0 * mu0^min(i, n-i) * delta
  double geometric_bound(std::size_t i, std::size_t n, double delta) const;
};
ShadowConstants shadow_constants(const ToralAutomorphism& A);

struct ShadowResult {
  std::vector<TorusPoint> orbit;
  std::vector<double> distances;
  std::vector<double> bounds;  // per-point bound from all jumps
  double max_error = 0;
  ShadowConstants constants;
};

ShadowResult shadow_pseudo_orbit(const ToralAutomorphism& A, const PseudoOrbit& po);

}  // namespace phlab::torus
