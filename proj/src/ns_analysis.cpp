#include <cmath>

#include "phlab/error.hpp"
#include "phlab/fiber.hpp"

namespace phlab::fiber {

NSMapModel ns_analyze(const IntervalMap& f) {
  NSMapModel m;
  m.alpha = f.derivative(0.0);
  if (!(m.alpha < 1.0)) throw Error(ErrorCode::NotContracting, "f'(0) >= 1");
  require(m.alpha > 0.0, ErrorCode::PreconditionViolated, "f'(0) <= 0");

  constexpr int kGrid = 1 << 10;
  auto residual = [&](double t) {
    const double r = f(t) - t;
    if (!std::isfinite(r)) throw Error(ErrorCode::RootFindFail, "non-finite residual");
    return r;
  };
  double prev_t = 0.0;
  double s = 1.0;
  bool found = false;
  for (int j = 1; j <= kGrid; ++j) {
    const double t = static_cast<double>(j) / kGrid;
    const double r = residual(t);
    if (r >= -1e-14) {
      if (r <= 0.0 || j == kGrid) {
        s = t;
      } else {
        double lo = prev_t, hi = t;
        int it = 0;
        while (hi - lo > 1e-12 && it++ < 200) {
          const double mid = 0.5 * (lo + hi);
          if (residual(mid) < 0)
            lo = mid;
          else
            hi = mid;
        }
        if (hi - lo > 1e-12) throw Error(ErrorCode::RootFindFail, "bisection did not converge");
        s = 0.5 * (lo + hi);
      }
      found = true;
      break;
    }
    prev_t = t;
  }
  m.pinned = !found;
  m.smallest_fixed = s;
  m.contracting_interval = {0.0, s};
  m.rescaled = IntervalMap::rescaled(f, s);
  return m;
}

}  // namespace phlab::fiber
