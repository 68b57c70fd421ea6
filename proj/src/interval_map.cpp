#include <algorithm>
#include <cmath>
#include <sstream>

#include "phlab/error.hpp"
#include "phlab/fiber.hpp"

namespace phlab::fiber {

std::optional<ClosedInterval> intersect(const ClosedInterval& a, const ClosedInterval& b) {
  ClosedInterval r{std::max(a.lo, b.lo), std::min(a.hi, b.hi)};
  if (r.lo > r.hi) return std::nullopt;
  return r;
}

double overlap_length(const ClosedInterval& a, const ClosedInterval& b) {
  return std::max(0.0, std::min(a.hi, b.hi) - std::max(a.lo, b.lo));
}

IntervalMap::IntervalMap(std::string name, Fn f, Fn df, Fn inv, bool boundary_preserving)
    : name_(std::move(name)), f_(std::move(f)), df_(std::move(df)), inv_(std::move(inv)),
      boundary_preserving_(boundary_preserving) {}

double IntervalMap::inverse(double y) const {
  if (inv_) return inv_(y);
  double lo = 0, hi = 1;
  if (y <= f_(lo)) return lo;
  if (y >= f_(hi)) return hi;
  const double d0 = df_(0.0);
  double t = std::clamp(d0 > 0 ? y / d0 : 0.5, lo, hi);
  for (int i = 0; i < 200; ++i) {
    const double r = f_(t) - y;
    if (r == 0) return t;
    if (r < 0)
      lo = t;
    else
      hi = t;
    double nt = t - r / df_(t);
    if (!(nt > lo && nt < hi)) nt = 0.5 * (lo + hi);
    if (std::abs(nt - t) <= 1e-16 * std::abs(t) || nt == lo || nt == hi) return nt;
    t = nt;
  }
  return t;
}

double IntervalMap::iterate(double t, long n) const {
  if (n >= 0)
    for (long i = 0; i < n; ++i) t = f_(t);
  else
    for (long i = 0; i < -n; ++i) t = inverse(t);
  return t;
}

ClosedInterval IntervalMap::image(const ClosedInterval& I, long n) const {
  return {iterate(I.lo, n), iterate(I.hi, n)};
}

IntervalMap IntervalMap::with_holder(HolderData h) const {
  IntervalMap m = *this;
  h.supplied = true;
  m.holder_ = h;
  return m;
}

void IntervalMap::check(int grid) const {
  if (boundary_preserving_) {
    require(std::abs(f_(0.0)) <= 1e-14, ErrorCode::PreconditionViolated, name_ + ": f(0) != 0");
    require(std::abs(f_(1.0) - 1.0) <= 1e-12, ErrorCode::PreconditionViolated, name_ + ": f(1) != 1");
  }
  for (int i = 0; i <= grid; ++i) {
    const double t = static_cast<double>(i) / grid;
    if (!(df_(t) > 0)) {
      std::ostringstream os;
      os << name_ << ": f' <= 0 at t = " << t;
      throw Error(ErrorCode::PreconditionViolated, os.str());
    }
  }
}

IntervalMap IntervalMap::identity() {
  return IntervalMap("identity", [](double t) { return t; }, [](double) { return 1.0; }, [](double y) { return y; });
}

IntervalMap IntervalMap::linear(double slope) {
  return IntervalMap(
      "linear", [slope](double t) { return slope * t; }, [slope](double) { return slope; },
      [slope](double y) { return y / slope; }, slope == 1.0);
}

IntervalMap IntervalMap::polynomial(std::vector<double> c) {
  std::vector<double> dc;
  for (std::size_t i = 1; i < c.size(); ++i) dc.push_back(c[i] * static_cast<double>(i));
  auto horner = [](const std::vector<double>& p, double t) {
    double r = 0;
    for (auto it = p.rbegin(); it != p.rend(); ++it) r = r * t + *it;
    return r;
  };
  double s = 0;
  for (double x : c) s += x;
  const bool bp = !c.empty() && c[0] == 0.0 && std::abs(s - 1.0) <= 1e-12;
  return IntervalMap(
      "polynomial", [c, horner](double t) { return horner(c, t); },
      [dc, horner](double t) { return horner(dc, t); }, {}, bp);
}

IntervalMap IntervalMap::mobius(double alpha) {
  const double b = 1.0 - alpha;
  return IntervalMap(
      "mobius", [alpha, b](double t) { return alpha * t / (1.0 - b * t); },
      [alpha, b](double t) { return alpha / ((1.0 - b * t) * (1.0 - b * t)); },
      [alpha, b](double y) { return y / (alpha + b * y); });
}

IntervalMap IntervalMap::power(double alpha, int m) {
  const double b = 1.0 - alpha;
  return IntervalMap(
      "power", [alpha, b, m](double t) { return t * (alpha + b * std::pow(t, m)); },
      [alpha, b, m](double t) { return alpha + b * (m + 1) * std::pow(t, m); });
}

IntervalMap IntervalMap::compose(const IntervalMap& outer, const IntervalMap& inner) {
  return IntervalMap(
      outer.name() + "*" + inner.name(), [outer, inner](double t) { return outer(inner(t)); },
      [outer, inner](double t) { return outer.derivative(inner(t)) * inner.derivative(t); },
      [outer, inner](double y) { return inner.inverse(outer.inverse(y)); },
      outer.boundary_preserving() && inner.boundary_preserving());
}

IntervalMap IntervalMap::rescaled(const IntervalMap& f, double s) {
  return IntervalMap(
      f.name() + "-rescaled", [f, s](double u) { return f(s * u) / s; },
      [f, s](double u) { return f.derivative(s * u); }, [f, s](double y) { return f.inverse(s * y) / s; }, true);
}

HolderData estimate_holder(const IntervalMap& f, double lo, double hi, double theta, int samples) {
  std::vector<double> t(static_cast<std::size_t>(samples)), lg(t.size());
  for (int i = 0; i < samples; ++i) {
    t[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (samples - 1);
    lg[static_cast<std::size_t>(i)] = std::log(f.derivative(t[static_cast<std::size_t>(i)]));
  }
  double C = 0;
  for (std::size_t i = 0; i < t.size(); ++i)
    for (std::size_t j = i + 1; j < t.size(); ++j) {
      const double dx = std::pow(t[j] - t[i], theta);
      if (dx > 0) C = std::max(C, std::abs(lg[j] - lg[i]) / dx);
    }
  return {C, theta, false};
}

}  // namespace phlab::fiber
