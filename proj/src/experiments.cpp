#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <thread>

#include "phlab/experiments.hpp"

namespace phlab::experiments {

using skew::splitmix64;
using skew::uniform01;

namespace {

constexpr std::uint64_t kMask = (std::uint64_t(1) << 62) - 1;
constexpr double kScale = 0x1.0p-62;
constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr std::size_t kMaxDim = 8;

// Exact base orbit on the 2^-62 lattice with the fiber coordinate kept as (t, 1 - t),
// so both boundaries keep full relative precision. Subnormal coordinates are flushed to the boundary.
class Walker {
 public:
  explicit Walker(const SkewProduct& F) : F_(F), d_(F.dimension()) {
    require(d_ <= kMaxDim, ErrorCode::PreconditionViolated, "dimension above 8");
    const auto rows = F.base().matrix().to_rows();
    for (std::size_t i = 0; i < d_; ++i)
      for (std::size_t j = 0; j < d_; ++j) a_[i * d_ + j] = std::uint64_t(rows[i][j]);
    const auto& f = F.fiber();
    kan_ = f.is_kan();
    if (kan_) {
      eps_ = f.kan_params().epsilon;
      a_flow_ = std::exp(-f.flow_tau());
      flow_ = f.flow_tau() != 0;
      for (const auto& t : f.kan_params().psi) {
        Term tm;
        for (std::size_t i = 0; i < d_; ++i) tm.k[i] = std::uint64_t(std::int64_t(t.k[i]));
        tm.c = t.c;
        tm.s = t.s;
        terms_.push_back(tm);
      }
    }
  }

  void reset(std::span<const double> x, double t) {
    for (std::size_t i = 0; i < d_; ++i) {
      const double f = x[i] - std::floor(x[i]);
      x_[i] = std::uint64_t(std::llround(std::ldexp(f, 62))) & kMask;
    }
    lo = t;
    hi = 1 - t;
  }

  // (x, t) -> (A x, phi(x, t))
  void step() {
    if (kan_)
      kan_fiber();
    else
      generic_fiber();
    std::uint64_t y[kMaxDim];
    for (std::size_t i = 0; i < d_; ++i) {
      std::uint64_t s = 0;
      for (std::size_t j = 0; j < d_; ++j) s += a_[i * d_ + j] * x_[j];
      y[i] = s & kMask;
    }
    std::copy(y, y + d_, x_);
  }

  double coord(std::size_t i) const { return double(x_[i]) * kScale; }
  std::span<const double> coords() {
    for (std::size_t i = 0; i < d_; ++i) xd_[i] = coord(i);
    return {xd_, d_};
  }
  bool absorbed() const { return lo == 0 || hi == 0; }

  double lo = 0, hi = 1;

 private:
  struct Term {
    std::uint64_t k[kMaxDim] = {};
    double c = 0, s = 0;
  };
  static constexpr double kTiny = std::numeric_limits<double>::min();
  const SkewProduct& F_;
  std::size_t d_;
  std::uint64_t a_[kMaxDim * kMaxDim] = {};
  std::uint64_t x_[kMaxDim] = {};
  double xd_[kMaxDim] = {};
  bool kan_ = false, flow_ = false;
  double eps_ = 0, a_flow_ = 1;
  std::vector<Term> terms_;

  double psi() const {
    double v = 0;
    for (const auto& t : terms_) {
      std::uint64_t ph = 0;
      for (std::size_t i = 0; i < d_; ++i) ph += t.k[i] * x_[i];
      const double arg = kTwoPi * (double(ph & kMask) * kScale);
      if (t.c != 0) v += t.c * std::cos(arg);
      if (t.s != 0) v += t.s * std::sin(arg);
    }
    return v;
  }

  void kan_fiber() {
    const double c = eps_ * psi();
    double l = lo * (1 + c * hi), h = hi * (1 - c * lo);
    if (flow_) {
      const double den = h + a_flow_ * l;
      l = l * a_flow_ / den;
      h = h / den;
    }
    if (l <= h) {
      lo = l < kTiny ? 0 : l;
      hi = 1 - lo;
    } else {
      hi = h < kTiny ? 0 : h;
      lo = 1 - hi;
    }
  }

  void generic_fiber() {
    lo = F_.fiber()(coords(), lo);
    if (lo < kTiny) lo = 0;
    hi = 1 - lo;
  }
};

std::size_t ipow(std::size_t b, std::size_t e) {
  std::size_t r = 1;
  while (e--) r *= b;
  return r;
}

std::uint64_t sample_state(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t s = seed ^ (0x9e3779b97f4a7c15ULL * (index + 1));
  splitmix64(s);
  return s;
}

// Tarjan over the subgraph of marked vertices.
std::size_t scc_count(const std::vector<std::vector<std::size_t>>& adj, const std::vector<char>& mark) {
  const std::size_t n = adj.size();
  std::vector<long> index(n, -1), low(n, 0);
  std::vector<char> on(n, 0);
  std::vector<std::size_t> stack;
  long counter = 0;
  std::size_t comps = 0;
  struct Frame {
    std::size_t v, next;
  };
  for (std::size_t s = 0; s < n; ++s) {
    if (!mark[s] || index[s] >= 0) continue;
    std::vector<Frame> call{{s, 0}};
    index[s] = low[s] = counter++;
    stack.push_back(s);
    on[s] = 1;
    while (!call.empty()) {
      Frame& fr = call.back();
      if (fr.next < adj[fr.v].size()) {
        const std::size_t w = adj[fr.v][fr.next++];
        if (!mark[w]) continue;
        if (index[w] < 0) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on[w] = 1;
          call.push_back({w, 0});
        } else if (on[w]) {
          low[fr.v] = std::min(low[fr.v], index[w]);
        }
        continue;
      }
      const std::size_t v = fr.v;
      call.pop_back();
      if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
      if (low[v] == index[v]) {
        ++comps;
        for (;;) {
          const std::size_t w = stack.back();
          stack.pop_back();
          on[w] = 0;
          if (w == v) break;
        }
      }
    }
  }
  return comps;
}

}  // namespace

void GridSpec::validate() const {
  auto need = [](bool ok, const char* field) {
    if (!ok) throw Error(ErrorCode::ConfigInvalid, std::string("grid.") + field + " must be positive");
  };
  need(base_subdivisions > 0, "base_subdivisions");
  need(fiber_subdivisions > 0, "fiber_subdivisions");
  need(iterations > 0, "iterations");
  need(seed > 0, "seed");
  need(theta0 > 0 && theta0 < 0.5, "theta0");
  need(trailing_fraction > 0 && trailing_fraction <= 1, "trailing_fraction");
  need(samples_per_cell > 0, "samples_per_cell");
  need(cloud_size > 0, "cloud_size");
  need(reach_samples > 0, "reach_samples");
  need(threads > 0, "threads");
}

std::size_t cell_count(const GridSpec& g, std::size_t d) {
  return ipow(std::size_t(g.base_subdivisions), d) * std::size_t(g.fiber_subdivisions);
}

std::size_t cell_of(const GridSpec& g, std::span<const double> x, double t) {
  const int b = g.base_subdivisions, f = g.fiber_subdivisions;
  std::size_t idx = 0;
  for (double xi : x) {
    const double u = xi - std::floor(xi);
    idx = idx * b + std::size_t(std::min(b - 1, int(u * b)));
  }
  const int layer = std::clamp(int(t * f), 0, f - 1);
  return idx * f + layer;
}

CoverageReport transitivity_probe(const SkewProduct& F, const GridSpec& grid) {
  grid.validate();
  const std::size_t d = F.dimension();
  Walker w(F);
  CoverageReport r;
  r.grid = grid;
  r.cells = cell_count(grid, d);
  r.note = "cell coverage and one-step reachability; a numerical surrogate for transitivity, not a proof";
  const int b = grid.base_subdivisions, f = grid.fiber_subdivisions;

  std::uint64_t state = grid.seed;
  r.box_center.resize(d);
  for (auto& c : r.box_center) c = uniform01(state);
  r.box_t = (std::ceil(f / 2.0) - 0.5) / f;
  r.box_half_width = std::min(1.0 / b, 1.0 / f) / 8;
  const double h = r.box_half_width;

  r.first_hit.assign(r.cells, -1);
  r.steps_per_point = std::max(1L, grid.iterations / grid.cloud_size);
  Eigen::VectorXd x(d);
  for (int k = 0; k < grid.cloud_size; ++k) {
    for (std::size_t i = 0; i < d; ++i) x[i] = r.box_center[i] + h * (2 * uniform01(state) - 1);
    w.reset({x.data(), d}, r.box_t + h * (2 * uniform01(state) - 1));
    for (long n = 1; n <= r.steps_per_point; ++n) {
      w.step();
      long& fh = r.first_hit[cell_of(grid, w.coords(), w.lo)];
      if (fh < 0 || n < fh) fh = n;
    }
  }
  std::vector<long> hits;
  for (long v : r.first_hit)
    if (v >= 0) hits.push_back(v);
  r.visited = hits.size();
  r.visited_fraction = double(r.visited) / double(r.cells);
  if (!hits.empty()) {
    std::sort(hits.begin(), hits.end());
    r.first_hit_max = hits.back();
    const std::size_t m = hits.size();
    r.first_hit_median = m % 2 ? double(hits[m / 2]) : 0.5 * double(hits[m / 2 - 1] + hits[m / 2]);
  }

  {
    std::vector<char> seen(r.cells, 0);
    for (std::size_t i = 0; i < d; ++i) x[i] = r.box_center[i];
    w.reset({x.data(), d}, r.box_t);
    std::size_t cnt = 0;
    for (long n = 1; n <= grid.iterations; ++n) {
      w.step();
      char& s = seen[cell_of(grid, w.coords(), w.lo)];
      if (!s) s = 1, ++cnt;
    }
    r.single_orbit_fraction = double(cnt) / double(r.cells);
  }

  std::vector<std::vector<std::size_t>> adj(r.cells);
  std::vector<char> mark(r.cells, 0);
  std::vector<double> pt(d);
  for (std::size_t c = 0; c < r.cells; ++c) {
    mark[c] = r.first_hit[c] >= 0;
    const std::size_t layer = c % f;
    std::size_t rest = c / f;
    std::vector<std::size_t> ix(d);
    for (std::size_t i = d; i-- > 0;) ix[i] = rest % b, rest /= b;
    for (int s = 0; s < grid.reach_samples; ++s) {
      for (std::size_t i = 0; i < d; ++i) pt[i] = (double(ix[i]) + uniform01(state)) / b;
      w.reset(pt, (double(layer) + uniform01(state)) / f);
      w.step();
      adj[c].push_back(cell_of(grid, w.coords(), w.lo));
    }
    std::sort(adj[c].begin(), adj[c].end());
    adj[c].erase(std::unique(adj[c].begin(), adj[c].end()), adj[c].end());
    r.reach_edges += adj[c].size();
  }
  r.visited_components = scc_count(adj, mark);
  r.strongly_connected = r.visited > 0 && r.visited_components == 1;
  return r;
}

BasinReport intermingled_basins_scan(const SkewProduct& F, const GridSpec& grid, bool require_mostly_contracting) {
  grid.validate();
  if (require_mostly_contracting) {
    for (int bnd : {0, 1}) {
      const auto q = skew::boundary_exponent_integral(F, bnd);
      if (q.sign >= 0 || q.value + q.error >= 0) {
        std::ostringstream os;
        os << "boundary " << bnd << " integral " << q.value << " +- " << q.error << " is not negative";
        throw Error(ErrorCode::NotMostlyContracting, os.str());
      }
    }
  }
  const std::size_t d = F.dimension();
  const int b = grid.base_subdivisions, f = grid.fiber_subdivisions;
  const std::size_t cells = cell_count(grid, d);
  const long N = grid.iterations;
  const long window = std::max(1L, long(std::ceil(grid.trailing_fraction * double(N))));
  const long start = N - window;

  BasinReport r;
  r.grid = grid;
  r.cells.resize(cells);
  struct Extra {
    long ib0 = 0, ib1 = 0, iun = 0, in = 0, early = 0;
  };
  std::vector<Extra> extra(cells);

  auto run_cell = [&](std::size_t c) {
    const std::size_t layer = c % f;
    std::size_t rest = c / f;
    std::vector<std::size_t> ix(d);
    for (std::size_t i = d; i-- > 0;) ix[i] = rest % b, rest /= b;
    Walker w(F);
    std::vector<double> x(d);
    CellCounts cc;
    Extra ex;
    for (int s = 0; s < grid.samples_per_cell; ++s) {
      std::uint64_t st = sample_state(grid.seed, std::uint64_t(c) * grid.samples_per_cell + s);
      for (std::size_t i = 0; i < d; ++i) x[i] = (double(ix[i]) + uniform01(st)) / b;
      const double t0 = (double(layer) + uniform01(st)) / f;
      w.reset(x, t0);
      double sum = 0;
      for (long n = 0; n < N; ++n) {
        if (w.absorbed()) {
          const long remaining = N - std::max(n, start);
          if (w.hi == 0) sum += double(remaining);
          ++ex.early;
          break;
        }
        if (n >= start) sum += w.lo;
        w.step();
      }
      const double mean = sum / double(window);
      const bool interior = t0 >= grid.theta0 && t0 <= 1 - grid.theta0;
      if (interior) ++ex.in;
      if (mean < grid.theta0) {
        ++cc.b0;
        if (interior) ++ex.ib0;
      } else if (mean > 1 - grid.theta0) {
        ++cc.b1;
        if (interior) ++ex.ib1;
      } else {
        ++cc.unresolved;
        if (interior) ++ex.iun;
      }
    }
    r.cells[c] = cc;
    extra[c] = ex;
  };

  const int T = std::max(1, grid.threads);
  if (T == 1) {
    for (std::size_t c = 0; c < cells; ++c) run_cell(c);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < T; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t c = std::size_t(w); c < cells; c += std::size_t(T)) run_cell(c);
      });
    for (auto& th : pool) th.join();
  }

  r.min_b0_fraction = r.min_b1_fraction = 1;
  for (std::size_t c = 0; c < cells; ++c) {
    const auto& cc = r.cells[c];
    r.b0 += cc.b0, r.b1 += cc.b1, r.unresolved += cc.unresolved;
    r.min_b0_fraction = std::min(r.min_b0_fraction, double(cc.b0) / double(cc.total()));
    r.min_b1_fraction = std::min(r.min_b1_fraction, double(cc.b1) / double(cc.total()));
    r.interior_samples += extra[c].in;
    r.interior_b0 += extra[c].ib0;
    r.interior_b1 += extra[c].ib1;
    r.interior_unresolved += extra[c].iun;
    r.early_stops += extra[c].early;
  }
  r.samples = r.b0 + r.b1 + r.unresolved;
  const double n = double(r.samples);
  r.union_fraction = double(r.b0 + r.b1) / n;
  r.b0_fraction = double(r.b0) / n;
  r.b1_fraction = double(r.b1) / n;
  r.b0_stderr = std::sqrt(r.b0_fraction * (1 - r.b0_fraction) / n);
  r.b1_stderr = std::sqrt(r.b1_fraction * (1 - r.b1_fraction) / n);
  return r;
}

std::string basin_pgm(const BasinReport& r, int layer, int basin) {
  const int b = r.grid.base_subdivisions, f = r.grid.fiber_subdivisions;
  require(layer >= 0 && layer < f, ErrorCode::PreconditionViolated, "layer out of range");
  require(basin == 0 || basin == 1, ErrorCode::PreconditionViolated, "basin is 0 or 1");
  const std::size_t columns = std::size_t(b);
  const std::size_t rows = r.cells.size() / std::size_t(f) / columns;
  std::ostringstream os;
  os << "P5\n" << columns << ' ' << rows << "\n255\n";
  for (std::size_t row = 0; row < rows; ++row)
    for (std::size_t col = 0; col < columns; ++col) {
      const auto& cc = r.cells[(row * columns + col) * std::size_t(f) + std::size_t(layer)];
      const double frac = double(basin == 0 ? cc.b0 : cc.b1) / double(std::max(1L, cc.total()));
      os.put(char(std::lround(255 * frac)));
    }
  return os.str();
}

DensityReport birkhoff_density_scan(const SkewProduct& F, int boundary, unsigned period_cap, double R, double eps,
                                    int bins) {
  require(boundary == 0 || boundary == 1, ErrorCode::PreconditionViolated, "boundary is 0 or 1");
  require(R > 0 && eps > 0 && bins > 0 && period_cap > 0, ErrorCode::PreconditionViolated, "window parameters");
  DensityReport r;
  r.boundary = boundary;
  r.period_cap = period_cap;
  r.R = R;
  r.eps = eps;
  r.pool = skew::periodic_exponents(F, boundary, period_cap);
  r.orbits = r.pool.size();
  constexpr double tol = 1e-12;
  std::vector<double> vals;
  r.min_S = std::numeric_limits<double>::infinity();
  r.max_S = -r.min_S;
  for (const auto& e : r.pool) {
    const double S = e.sum.S;
    r.min_S = std::min(r.min_S, S);
    r.max_S = std::max(r.max_S, S);
    if (S < -tol) ++r.negative;
    if (S > tol) ++r.positive;
    if (S >= -R && S <= R) vals.push_back(S);
  }
  if (r.negative == 0 || r.positive == 0) {
    std::ostringstream os;
    os << r.negative << " negative and " << r.positive << " positive sums up to period " << period_cap;
    throw Error(ErrorCode::HypothesisUnmet, os.str());
  }
  std::sort(vals.begin(), vals.end());
  r.in_window = vals.size();
  if (vals.empty()) {
    r.covering_radius = R;
  } else {
    r.covering_radius = std::max(vals.front() + R, R - vals.back());
    for (std::size_t i = 1; i < vals.size(); ++i)
      r.covering_radius = std::max(r.covering_radius, 0.5 * (vals[i] - vals[i - 1]));
  }
  r.dense = r.covering_radius <= eps;
  r.histogram.assign(std::size_t(bins), 0);
  for (int i = 0; i <= bins; ++i) r.bin_edges.push_back(-R + 2 * R * i / bins);
  for (double v : vals) ++r.histogram[std::min(std::size_t(bins) - 1, std::size_t((v + R) / (2 * R) * bins))];
  return r;
}

PlissResult pliss_reindex(const SkewProduct& F, const PeriodicOrbit& orbit, double target_rate) {
  const auto& fib = F.fiber();
  const std::size_t n = orbit.period();
  const auto bs = skew::birkhoff_sum(F, orbit, 0);
  PlissResult r;
  r.lambda_c = bs.lambda_c;
  r.target = std::isnan(target_rate) ? bs.lambda_c / 3 : target_rate;
  require(r.lambda_c < r.target && r.target < 0, ErrorCode::PreconditionViolated,
          "need lambda^c < target < 0");

  std::vector<std::vector<double>> pts(n);
  std::vector<double> phi(n);
  for (std::size_t i = 0; i < n; ++i) {
    pts[i] = orbit.points[i].coords();
    phi[i] = fib.log_dt(pts[i], 0);
  }
  double P = 0, best = 0;
  for (std::size_t j = 1; j < n; ++j) {
    P += phi[j - 1] - r.target;
    if (P > best) best = P, r.shift = j;
  }
  double s = 0;
  for (std::size_t k = 1; k <= n; ++k) {
    s += phi[(r.shift + k - 1) % n];
    r.partial_averages.push_back(s / double(k));
  }
  for (double a : r.partial_averages)
    if (a > r.target + 1e-12 * std::abs(r.target)) {
      std::ostringstream os;
      os << "partial average " << a << " above target " << r.target << " from index " << r.shift;
      throw Error(ErrorCode::NoPlissTime, os.str());
    }
  for (std::size_t i = 0; i < n; ++i) r.rotated.points.push_back(orbit.points[(r.shift + i) % n]);

  const double half = r.target / 2;
  const std::size_t horizon = 4 * n;
  auto within = [&](double t0) {
    double lo = t0, sum = 0;
    for (std::size_t k = 1; k <= horizon; ++k) {
      const auto& x = pts[(r.shift + k - 1) % n];
      sum += fib.log_dt(x, lo);
      if (sum / double(k) > half) return false;
      lo = fib(x, lo);
    }
    return true;
  };
  constexpr int grid = 1024;
  double good = 0, bad = -1;
  for (int j = 1; j <= grid; ++j) {
    const double t = double(j) / grid;
    if (!within(t)) {
      bad = t;
      break;
    }
    good = t;
  }
  if (bad > 0)
    for (int it = 0; it < 40; ++it) {
      const double mid = 0.5 * (good + bad);
      (within(mid) ? good : bad) = mid;
    }
  r.center_size = good;
  const auto h = skew::holder_estimate(fib, F.dimension());
  r.center_bound = std::pow(-half * -std::expm1(half * h.theta) / h.C_phi, 1 / h.theta);
  r.bound_holds = r.center_size >= r.center_bound;
  return r;
}

}  // namespace phlab::experiments
