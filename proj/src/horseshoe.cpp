#include <algorithm>
#include <cmath>
#include <sstream>

#include "phlab/experiments.hpp"

namespace phlab::experiments {

namespace {

bool open_overlap(const fiber::ClosedInterval& a, const fiber::ClosedInterval& b) {
  return std::max(a.lo, b.lo) < std::min(a.hi, b.hi);
}

double gap(const fiber::ClosedInterval& a, const fiber::ClosedInterval& b) {
  return std::max(a.lo, b.lo) - std::min(a.hi, b.hi);
}

bool inside(const fiber::ClosedInterval& I, double t) { return I.lo < t && t < I.hi; }

}  // namespace

HorseshoeReport horseshoe_counterexample_demo(const fiber::IntervalMap& Phi, const fiber::ClosedInterval& U,
                                              const fiber::ClosedInterval& V, long range, long iterations,
                                              std::uint64_t seed, int word_length) {
  require(Phi(0) == 0 && Phi(1) == 1, ErrorCode::PreconditionViolated, "Phi must fix 0 and 1");
  require(Phi.derivative(0) < 1 && Phi.derivative(1) > 1, ErrorCode::PreconditionViolated,
          "Phi needs a sink at 0 and a source at 1");
  require(U.lo > 0 && U.hi < 1 && U.lo < U.hi && V.lo > 0 && V.hi < 1 && V.lo < V.hi,
          ErrorCode::PreconditionViolated, "U and V must be nonempty subintervals of (0,1)");
  require(range >= 0 && iterations > 0 && word_length > 0, ErrorCode::PreconditionViolated, "budget");

  HorseshoeReport r;
  r.U = U;
  r.V = V;
  r.separation_range = range;
  r.word_length = word_length;

  // p = 000..., q = 111...; the fiber map over q is Phi^-1
  r.lambda_p0 = std::log(Phi.derivative(0));
  r.lambda_p1 = std::log(Phi.derivative(1));
  r.lambda_q0 = -std::log(Phi.derivative(Phi.inverse(0)));
  r.lambda_q1 = -std::log(Phi.derivative(Phi.inverse(1)));
  r.sign_pattern = r.lambda_p0 < 0 && r.lambda_p1 > 0 && r.lambda_q0 > 0 && r.lambda_q1 < 0;

  r.min_separation = INFINITY;
  for (long n = -range; n <= range; ++n) {
    const auto img = Phi.image(U, n);
    if (open_overlap(img, V)) {
      std::ostringstream os;
      os << "Phi^" << n << "(U) = [" << img.lo << ", " << img.hi << "] meets V";
      throw Error(ErrorCode::IntervalsNotSeparated, os.str());
    }
    r.min_separation = std::min(r.min_separation, gap(img, V));
  }

  const long steps = 2L * word_length;
  r.orbits = std::max(1L, iterations / steps);
  std::uint64_t state = seed;
  std::vector<int> word(std::size_t(word_length), 0);
  for (long k = 0; k < r.orbits; ++k) {
    for (auto& s : word) s = int(skew::splitmix64(state) >> 63);
    const bool fromU = k % 2 == 0;
    const auto& S = fromU ? U : V;
    const auto& T = fromU ? V : U;
    double t = S.lo + (S.hi - S.lo) * skew::uniform01(state);
    long n = 0;
    for (long i = 0; i < steps; ++i) {
      if (word[std::size_t(i % word_length)] == 0) {
        t = Phi(t);
        ++n;
      } else {
        t = Phi.inverse(t);
        --n;
      }
      r.max_excursion = std::max(r.max_excursion, std::abs(n));
      ++r.iterations;
      if (inside(T, t)) ++r.violations;
    }
  }
  return r;
}

}  // namespace phlab::experiments
