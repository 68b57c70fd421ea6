#include <algorithm>
#include <cmath>
#include <sstream>

#include "phlab/error.hpp"
#include "phlab/skew.hpp"

namespace phlab::skew {

namespace {

constexpr double kSignTol = 1e-12;

class ForwardOrbit {
 public:
  ForwardOrbit(const ToralAutomorphism& A, const torus::HeteroclinicPoint& z) : A_(A), z_(z) {}
  const Eigen::VectorXd& at(long n) {
    while (long(pts_.size()) <= n) pts_.push_back(z_.orbit_point(A_, long(pts_.size())));
    return pts_[n];
  }

 private:
  const ToralAutomorphism& A_;
  const torus::HeteroclinicPoint& z_;
  std::vector<Eigen::VectorXd> pts_;
};

Point span_of(const Eigen::VectorXd& v) { return {v.data(), std::size_t(v.size())}; }

// Forward orbit enters the enter-neighbourhood of the boundary and stays in the stay-neighbourhood.
bool converges_to(const SkewProduct& F, ForwardOrbit& orbit, double t, int boundary,
                  const InterconnectionOptions& opt) {
  long stay = -1;
  for (long n = 0; n <= opt.max_forward; ++n) {
    const double dist = std::abs(t - boundary);
    if (stay < 0) {
      if (dist <= opt.enter_threshold) stay = 0;
    } else if (dist > opt.stay_threshold) {
      stay = -1;
    } else if (++stay >= opt.stay_steps) {
      return true;
    }
    t = F.fiber()(span_of(orbit.at(n)), t);
  }
  return false;
}

}  // namespace

FiberOverlap fiber_overlap(const SkewProduct& F, const BoundaryExponent& contracting,
                           const BoundaryExponent& expanding, const InterconnectionOptions& opt) {
  const auto& A = F.base();
  FiberOverlap ov;
  ov.contracting = contracting;
  ov.expanding = expanding;
  ov.z = torus::heteroclinic_point(A, expanding.orbit, contracting.orbit, opt.heteroclinic_bound);

  // stable trace: points whose forward fiber orbit over z tends to the contracting boundary
  ForwardOrbit fwd(A, ov.z);
  const int bc = contracting.boundary;
  double in = bc, out = 1 - bc;
  if (converges_to(F, fwd, out, bc, opt)) {
    in = out;
  } else {
    while (std::abs(out - in) > opt.bisection_tol) {
      const double mid = 0.5 * (in + out);
      (converges_to(F, fwd, mid, bc, opt) ? in : out) = mid;
    }
  }
  ov.stable_trace = bc == 0 ? fiber::ClosedInterval{0, in} : fiber::ClosedInterval{in, 1};

  // unstable trace: a boundary collar over A^-N z pushed forward to z
  const int be = expanding.boundary;
  const double ratio = F.margins().sup_dt / A.splitting().conorm_u();
  const double w = opt.unstable_width;
  long N = long(std::ceil(std::log(opt.tail_tol / w) / std::log(ratio)));
  N = std::clamp<long>(std::max(N, opt.min_backward), 1, opt.max_backward);
  ov.backward_steps = N;
  ov.tail_bound = std::pow(ratio, double(N)) * w;
  double t = be == 0 ? w : 1 - w;
  for (long k = N; k >= 1; --k) {
    const Eigen::VectorXd x = ov.z.orbit_point(A, -k);
    t = F.fiber()(span_of(x), t);
  }
  ov.unstable_trace = be == 0 ? fiber::ClosedInterval{0, t} : fiber::ClosedInterval{t, 1};

  if (auto I = fiber::intersect(ov.stable_trace, ov.unstable_trace))
    ov.overlap = *I;
  else
    ov.overlap = {0, 0};
  ov.thin = ov.overlap.length() > 0 && ov.overlap.length() <= opt.min_overlap;
  return ov;
}

InterconnectionResult boundary_interconnection(const SkewProduct& F, const InterconnectionOptions& opt) {
  InterconnectionResult res;
  const auto m0 = periodic_exponents(F, 0, opt.period_cap);
  const auto m1 = periodic_exponents(F, 1, opt.period_cap);
  auto select = [](const std::vector<BoundaryExponent>& v, int sign) {
    std::vector<BoundaryExponent> out;
    for (const auto& e : v)
      if (sign * e.sum.lambda_c > kSignTol) out.push_back(e);
    return out;
  };
  const auto p0s = select(m0, -1), q0s = select(m0, 1), p1s = select(m1, 1), q1s = select(m1, -1);

  auto absent = [&](const std::string& why) {
    std::ostringstream os;
    os << why << " (period cap " << opt.period_cap << ")";
    res.absent_reason = os.str();
    return res;
  };
  if (p0s.empty()) return absent("no periodic orbit on M_0 with negative central exponent");
  if (q0s.empty()) return absent("no periodic orbit on M_0 with positive central exponent");
  if (p1s.empty()) return absent("no periodic orbit on M_1 with positive central exponent");
  if (q1s.empty()) return absent("no periodic orbit on M_1 with negative central exponent");

  auto search = [&](const std::vector<BoundaryExponent>& contracting,
                    const std::vector<BoundaryExponent>& expanding) -> std::optional<FiberOverlap> {
    for (const auto& c : contracting)
      for (const auto& e : expanding) {
        ++res.candidates_tried;
        try {
          auto ov = fiber_overlap(F, c, e, opt);
          if (ov.thin) res.thin_overlap_seen = true;
          if (ov.overlap.length() > opt.min_overlap) return ov;
        } catch (const Error& err) {
          if (err.code() != ErrorCode::NoSolutionInBound) throw;
        }
      }
    return std::nullopt;
  };
  auto p = search(p0s, p1s);
  if (!p) return absent("no overlap between W^s(p0) and W^u(p1) traces");
  auto q = search(q1s, q0s);
  if (!q) return absent("no overlap between W^s(q1) and W^u(q0) traces");
  res.witness = InterconnectionWitness{std::move(*p), std::move(*q)};
  return res;
}

}  // namespace phlab::skew
