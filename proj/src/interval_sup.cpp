#include "interval_sup.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <thread>

#include "errors.hpp"
#include "local_law.hpp"

namespace llt {
namespace {

struct Placement {
  double lo;
  double hi;
  bool lo_inclusive;
  bool hi_inclusive;

  bool operator==(const Placement&) const = default;
};

// One contiguous run of grid points (or an empty gap) along an axis.
struct AxisRun {
  Placement widest;
  std::vector<Placement> narrowest;
};

// Per-box reference measure and optional density bounds on that box.
struct Reference {
  std::function<double(const Box&)> measure;
  std::function<std::optional<std::pair<double, double>>(const Box&)> local_bounds;
  double global_min = 0.0;
  double global_max = std::numeric_limits<double>::infinity();
};

struct ChunkBest {
  double value = -1.0;
  Box witness;
  double ratio = 1.0;
  std::int64_t evaluated = 0;
};

std::vector<AxisRun> axis_runs(const GridSpec& grid, std::size_t axis, double a, double b,
                               double m, int slide_offsets) {
  const double w = grid.step[axis];
  const double len_tol = 1e-12 * w;
  const std::int64_t k_a = snapped_ceil(grid.index_position(axis, a));
  const std::int64_t k_b = snapped_floor(grid.index_position(axis, b));
  auto y = [&](std::int64_t k) { return grid.coordinate(axis, k); };

  std::vector<AxisRun> runs;
  auto add_gap = [&](Placement p) { runs.push_back({p, {p}}); };
  if (k_a > k_b) {
    if (b - a >= m - len_tol) add_gap({a, b, true, true});
    return runs;
  }
  if (y(k_a) > a && y(k_a) - a >= m - len_tol) add_gap({a, y(k_a), true, false});
  if (w >= m - len_tol)
    for (std::int64_t k = k_a; k < k_b; ++k) add_gap({y(k), y(k + 1), false, false});
  if (b > y(k_b) && b - y(k_b) >= m - len_tol) add_gap({y(k_b), b, false, true});

  for (std::int64_t i = k_a; i <= k_b; ++i) {
    const bool lo_open = i - 1 >= k_a;
    const double l_min = lo_open ? y(i - 1) : a;
    for (std::int64_t j = i; j <= k_b; ++j) {
      const bool hi_open = j + 1 <= k_b;
      const double u_max = hi_open ? y(j + 1) : b;
      if (u_max - l_min < m - len_tol) continue;

      AxisRun run;
      run.widest = {l_min, u_max, !lo_open, !hi_open};
      if (y(j) - y(i) >= m - len_tol) {
        run.narrowest.push_back({y(i), y(j), true, true});
        runs.push_back(std::move(run));
        continue;
      }
      const double s_lo = std::max(l_min, y(j) - m);
      const double s_hi = std::max(s_lo, std::min(y(i), u_max - m));
      std::vector<double> starts{s_lo};
      for (int q = 1; q <= slide_offsets; ++q)
        starts.push_back(s_lo + (s_hi - s_lo) * q / (slide_offsets + 1));
      starts.push_back(std::clamp(0.5 * (y(i) + y(j)) - 0.5 * m, s_lo, s_hi));
      starts.push_back(s_hi);
      for (double start : starts) {
        Placement p{start, start + m, true, true};
        if (p.lo <= l_min + len_tol) {
          p.lo = l_min;
          p.lo_inclusive = !lo_open;
        }
        if (p.hi >= u_max - len_tol) {
          p.hi = u_max;
          p.hi_inclusive = !hi_open;
        }
        if (std::find(run.narrowest.begin(), run.narrowest.end(), p) == run.narrowest.end())
          run.narrowest.push_back(p);
      }
      runs.push_back(std::move(run));
    }
  }
  return runs;
}

void set_axis(Box& box, std::size_t axis, const Placement& p) {
  box.lower[axis] = p.lo;
  box.upper[axis] = p.hi;
  box.lower_inclusive[axis] = p.lo_inclusive;
  box.upper_inclusive[axis] = p.hi_inclusive;
}

void consider(const LatticePmf& pmf, const Reference& ref, const Box& box, ChunkBest& best) {
  const double mass = pmf.box_mass(box);
  const double vol = box.volume();
  auto bound = [&](double f_lo, double f_hi) {
    const double high = f_lo > 0.0 ? mass / (f_lo * vol) - 1.0 : std::numeric_limits<double>::infinity();
    const double low = 1.0 - mass / (f_hi * vol);
    return std::max(high, low);
  };
  if (bound(ref.global_min, ref.global_max) <= best.value) return;
  if (ref.local_bounds) {
    if (auto lb = ref.local_bounds(box); lb && bound(lb->first, lb->second) <= best.value) return;
  }
  const double mu = ref.measure(box);
  ++best.evaluated;
  if (!(mu > 0.0)) return;
  const double ratio = mass / mu;
  const double value = std::fabs(ratio - 1.0);
  if (value > best.value) {
    best.value = value;
    best.witness = box;
    best.ratio = ratio;
  }
}

// Every box built from the chunk's axis-0 run and all runs along later axes.
void scan_chunk(const LatticePmf& pmf, const Reference& ref,
                const std::vector<std::vector<AxisRun>>& runs, std::size_t first_run,
                ChunkBest& best) {
  const std::size_t d = runs.size();
  Box box = Box::closed(Vec(d), Vec(d));
  std::vector<std::size_t> pick(d, 0);
  pick[0] = first_run;
  for (;;) {
    for (std::size_t a = 0; a < d; ++a) set_axis(box, a, runs[a][pick[a]].widest);
    consider(pmf, ref, box, best);

    std::vector<std::size_t> slide(d, 0);
    for (;;) {
      bool all_widest = true;
      for (std::size_t a = 0; a < d; ++a) {
        const Placement& p = runs[a][pick[a]].narrowest[slide[a]];
        set_axis(box, a, p);
        all_widest = all_widest && p == runs[a][pick[a]].widest;
      }
      if (!all_widest) consider(pmf, ref, box, best);
      std::size_t a = d;
      while (a-- > 0) {
        if (++slide[a] < runs[a][pick[a]].narrowest.size()) break;
        slide[a] = 0;
      }
      if (a == static_cast<std::size_t>(-1)) break;
    }

    std::size_t a = d;
    while (a-- > 1) {
      if (++pick[a] < runs[a].size()) break;
      pick[a] = 0;
    }
    if (a == 0 || a == static_cast<std::size_t>(-1)) break;
  }
}

SupResult run_engine(const LatticePmf& pmf, const Box& ab, const MinLength& m,
                     const SupOptions& options, const Reference& ref) {
  const std::size_t d = pmf.dim();
  SupResult result;
  std::vector<std::vector<AxisRun>> runs(d);
  for (std::size_t a = 0; a < d; ++a) {
    if (m.m[a] < pmf.grid().step[a]) {
      std::ostringstream os;
      os << "axis " << a << ": m=" << m.m[a] << " is below the grid step " << pmf.grid().step[a]
         << "; the interval statistic is not expected to converge";
      result.warnings.push_back(os.str());
    }
    runs[a] = axis_runs(pmf.grid(), a, ab.lower[a], ab.upper[a], m.m[a], options.slide_offsets);
    if (runs[a].empty()) return result;
  }

  const std::size_t chunks = runs[0].size();
  std::vector<ChunkBest> bests(chunks);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (;;) {
      const std::size_t c = next.fetch_add(1);
      if (c >= chunks || failed.load()) return;
      try {
        scan_chunk(pmf, ref, runs, c, bests[c]);
      } catch (...) {
        if (!failed.exchange(true)) error = std::current_exception();
        return;
      }
    }
  };
  const unsigned threads = std::max(1U, std::min<unsigned>(options.threads, static_cast<unsigned>(chunks)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);

  ChunkBest overall;
  for (const ChunkBest& b : bests) {
    overall.evaluated += b.evaluated;
    if (b.value > overall.value) {
      overall.value = b.value;
      overall.witness = b.witness;
      overall.ratio = b.ratio;
    }
  }
  result.value = std::max(0.0, overall.value);
  result.witness = overall.witness;
  result.ratio_at_witness = overall.ratio;
  result.candidate_count = overall.evaluated;
  return result;
}

void check_inputs(const LatticePmf& pmf, const ContinuousDensity& density, const Box& ab,
                  const MinLength& m) {
  const std::size_t d = pmf.dim();
  ab.validate();
  if (ab.dim() != d || density.dim() != d || m.m.size() != d)
    fail(ErrorCode::kInvalidArgument, "dimension mismatch");
  if (!ab.non_degenerate()) fail(ErrorCode::kInvalidArgument, "[a,b] must be non-degenerate");
  for (std::size_t a = 0; a < d; ++a) {
    if (!(m.m[a] > 0.0)) fail(ErrorCode::kInvalidArgument, "minimal lengths must be positive");
    const double len = ab.upper[a] - ab.lower[a];
    if (m.m[a] > len + 1e-12 * pmf.grid().step[a]) {
      std::ostringstream os;
      os << "m[" << a << "]=" << m.m[a] << " exceeds |[a,b]|=" << len;
      fail(ErrorCode::kMinLengthExceedsBox, os.str());
    }
  }
}

DensityBounds bounded_below(const ContinuousDensity& density, const Box& ab) {
  try {
    DensityBounds b = density.density_extremes(ab);
    if (!(b.f_min > 0.0)) fail(ErrorCode::kDensityNotBoundedBelow, "density vanishes on [a,b]");
    return b;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kZeroDensityOnBox)
      fail(ErrorCode::kDensityNotBoundedBelow, "density vanishes on [a,b]");
    throw;
  }
}

// Index of the first of `count` consecutive grid points in [lo_index, hi_index]
// whose centre is nearest `target` (ties towards lower indices).
std::int64_t nearest_window(double target_index, std::int64_t count, std::int64_t lo_index,
                            std::int64_t hi_index) {
  const std::int64_t last_start = hi_index - count + 1;
  const double ideal = target_index - 0.5 * static_cast<double>(count - 1);
  const auto base = static_cast<std::int64_t>(std::floor(ideal));
  std::int64_t best = std::clamp(base, lo_index, last_start);
  double best_dist = std::fabs(static_cast<double>(best) - ideal);
  const std::int64_t other = std::clamp(base + 1, lo_index, last_start);
  if (std::fabs(static_cast<double>(other) - ideal) < best_dist) best = other;
  return best;
}

}  // namespace

SupResult sup_ratio_deviation(const LatticePmf& pmf, const ContinuousDensity& density,
                              const Box& ab, const MinLength& m, const SupOptions& options) {
  check_inputs(pmf, density, ab, m);
  const DensityBounds global = bounded_below(density, ab);
  Reference ref;
  ref.measure = [&](const Box& box) { return density.box_prob(box, options.box_tolerance); };
  ref.local_bounds = [&](const Box& box) -> std::optional<std::pair<double, double>> {
    const DensityBounds b = density.density_extremes(box);
    return std::make_pair(b.f_min, b.f_max);
  };
  ref.global_min = global.f_min;
  ref.global_max = global.f_max;
  return run_engine(pmf, ab, m, options, ref);
}

SupResult mu_vs_histogram_stat(const LatticePmf& pmf, const ContinuousDensity& density,
                               const Box& ab, const MinLength& m, const SupOptions& options) {
  check_inputs(pmf, density, ab, m);
  bounded_below(density, ab);
  const std::size_t d = pmf.dim();

  // Histogram height range over the cells meeting [a,b].
  IndexRange cells{IndexVec(d), IndexVec(d)};
  for (std::size_t a = 0; a < d; ++a) {
    cells.lo[a] = cell_index(pmf.grid(), a, ab.lower[a]);
    cells.hi[a] = cell_index(pmf.grid(), a, ab.upper[a]);
  }
  double h_min = std::numeric_limits<double>::infinity();
  double h_max = 0.0;
  IndexVec k = cells.lo;
  for (;;) {
    const double h = pmf.mass_at_index(k) / pmf.cell_volume();
    h_min = std::min(h_min, h);
    h_max = std::max(h_max, h);
    std::size_t a = d;
    while (a-- > 0) {
      if (++k[a] <= cells.hi[a]) break;
      k[a] = cells.lo[a];
    }
    if (a == static_cast<std::size_t>(-1)) break;
  }

  Reference ref;
  ref.measure = [&](const Box& box) { return histogram_measure(pmf, box); };
  ref.global_min = h_min;
  ref.global_max = h_max > 0.0 ? h_max : std::numeric_limits<double>::infinity();
  return run_engine(pmf, ab, m, options, ref);
}

Counterexample counterexample_interval(const LatticePmf& pmf, const ContinuousDensity& density,
                                       const Box& ab, int l, std::size_t dim_star,
                                       const std::optional<MinLength>& m, double box_tolerance) {
  const std::size_t d = pmf.dim();
  ab.validate();
  if (ab.dim() != d || density.dim() != d) fail(ErrorCode::kInvalidArgument, "dimension mismatch");
  if (l < 2) fail(ErrorCode::kInvalidArgument, "l must be >= 2");
  if (dim_star >= d) fail(ErrorCode::kInvalidArgument, "dim_star out of range");
  if (m && m->m.size() != d) fail(ErrorCode::kInvalidArgument, "m dimension mismatch");
  const DensityBounds bounds = bounded_below(density, ab);
  const GridSpec& grid = pmf.grid();

  Box interval = Box::closed(Vec(d), Vec(d));
  for (std::size_t a = 0; a < d; ++a) {
    const double target = grid.index_position(a, bounds.argmax[a]);
    if (a == dim_star) {
      const std::int64_t k_a = snapped_ceil(grid.index_position(a, ab.lower[a]));
      const std::int64_t k_b = snapped_floor(grid.index_position(a, ab.upper[a]));
      if (k_b - k_a < l)
        fail(ErrorCode::kNotEnoughGridPoints, "fewer than l+1 grid points in [a,b] along dim_star");
      const std::int64_t s = nearest_window(target, l + 1, k_a, k_b);
      interval.lower[a] = grid.coordinate(a, s);
      interval.upper[a] = grid.coordinate(a, s + l);
      interval.lower_inclusive[a] = false;
      interval.upper_inclusive[a] = false;
      continue;
    }
    // Whole cells (y - w/2, y + w/2] inside [a_d, b_d].
    std::int64_t cells = 1;
    if (m) cells = std::max<std::int64_t>(1, snapped_ceil(m->m[a] / grid.step[a]));
    const std::int64_t first = snapped_ceil(grid.index_position(a, ab.lower[a]) + 0.5);
    const std::int64_t last = snapped_floor(grid.index_position(a, ab.upper[a]) - 0.5);
    if (last - first + 1 < cells)
      fail(ErrorCode::kNotEnoughGridPoints, "not enough whole cells in [a,b] along a side axis");
    const std::int64_t s = nearest_window(target, cells, first, last);
    interval.lower[a] = grid.coordinate(a, s) - 0.5 * grid.step[a];
    interval.upper[a] = grid.coordinate(a, s + cells - 1) + 0.5 * grid.step[a];
    interval.lower_inclusive[a] = false;
    interval.upper_inclusive[a] = true;
  }
  Counterexample out;
  out.ratio = pmf.box_mass(interval) / density.box_prob(interval, box_tolerance);
  out.interval = std::move(interval);
  return out;
}

double theoretical_step3_bound(const DensityBounds& bounds, const MinLength& m, const Vec& w,
                               std::size_t d) {
  if (m.m.size() != d || w.size() != d) fail(ErrorCode::kInvalidArgument, "dimension mismatch");
  if (!(bounds.f_min > 0.0) || !(bounds.f_max >= bounds.f_min))
    fail(ErrorCode::kInvalidArgument, "density bounds must satisfy 0 < f_min <= f_max");
  const double side = std::pow(4.0, static_cast<double>(d) - 1.0);
  double total = 0.0;
  for (std::size_t a = 0; a < d; ++a) {
    const std::int64_t cells = snapped_floor(m.m[a] / w[a]);
    if (cells <= 2) {
      std::ostringstream os;
      os << "floor(m/w)=" << cells << " along axis " << a << " (needs >= 3)";
      fail(ErrorCode::kBoundDegenerate, os.str());
    }
    total += 4.0 * bounds.f_max * side / (bounds.f_min * static_cast<double>(cells - 2));
  }
  return total;
}

namespace {

double golden_extreme(const std::function<double(double)>& r, double lo, double hi, bool maximize) {
  constexpr double kInvPhi = 0.6180339887498949;
  auto g = [&](double x) { return maximize ? -r(x) : r(x); };
  double a = lo, b = hi;
  double c = b - kInvPhi * (b - a), e = a + kInvPhi * (b - a);
  double gc = g(c), ge = g(e);
  while (b - a > 1e-11 * std::max(1.0, std::fabs(a) + std::fabs(b))) {
    if (gc < ge) {
      b = e;
      e = c;
      ge = gc;
      c = b - kInvPhi * (b - a);
      gc = g(c);
    } else {
      a = c;
      c = e;
      gc = ge;
      e = a + kInvPhi * (b - a);
      ge = g(e);
    }
  }
  return r(0.5 * (a + b));
}

void knots_of(const ContinuousDensity& f, std::vector<double>& out) {
  if (f.kind() != ContinuousDensity::Kind::kIrwinHallStandardized) return;
  const int n = f.irwin_hall_order();
  const double scale = std::sqrt(n / 12.0);
  for (int k = 0; k <= n; ++k) out.push_back((k - 0.5 * n) / scale);
}

std::pair<double, double> ratio_range_1d(const std::function<double(double)>& r, double a, double b,
                                         std::vector<double> breaks) {
  breaks.push_back(a);
  breaks.push_back(b);
  breaks.push_back(0.0);
  std::erase_if(breaks, [&](double x) { return x < a || x > b; });
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  constexpr int kSamples = 128;
  double hi = -std::numeric_limits<double>::infinity();
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p + 1 < breaks.size() || (breaks.size() == 1 && p == 0); ++p) {
    const double x0 = breaks[p];
    const double x1 = breaks.size() == 1 ? x0 : breaks[p + 1];
    std::vector<double> xs(kSamples + 1), vs(kSamples + 1);
    for (int i = 0; i <= kSamples; ++i) {
      xs[static_cast<std::size_t>(i)] = i == kSamples ? x1 : x0 + (x1 - x0) * i / kSamples;
      vs[static_cast<std::size_t>(i)] = r(xs[static_cast<std::size_t>(i)]);
    }
    for (int i = 0; i <= kSamples; ++i) {
      const auto u = static_cast<std::size_t>(i);
      hi = std::max(hi, vs[u]);
      lo = std::min(lo, vs[u]);
      if (i == 0 || i == kSamples) continue;
      if (vs[u] >= vs[u - 1] && vs[u] >= vs[u + 1])
        hi = std::max(hi, golden_extreme(r, xs[u - 1], xs[u + 1], true));
      if (vs[u] <= vs[u - 1] && vs[u] <= vs[u + 1])
        lo = std::min(lo, golden_extreme(r, xs[u - 1], xs[u + 1], false));
    }
  }
  return {lo, hi};
}

// Zooming grid search for d >= 2: keep the best sample, shrink around it.
double zoom_extreme(const std::function<double(const Vec&)>& r, const Box& ab, bool maximize) {
  const std::size_t d = ab.dim();
  constexpr int kPoints = 17;
  Vec lo = ab.lower, hi = ab.upper;
  double best = maximize ? -std::numeric_limits<double>::infinity()
                         : std::numeric_limits<double>::infinity();
  Vec best_x = lo;
  for (int round = 0; round < 60; ++round) {
    std::size_t total = 1;
    for (std::size_t a = 0; a < d; ++a) total *= kPoints;
    for (std::size_t s = 0; s < total; ++s) {
      Vec x(d);
      std::size_t code = s;
      for (std::size_t a = 0; a < d; ++a) {
        const auto i = static_cast<double>(code % kPoints);
        code /= kPoints;
        x[a] = lo[a] + (hi[a] - lo[a]) * i / (kPoints - 1);
      }
      const double v = r(x);
      if (maximize ? v > best : v < best) {
        best = v;
        best_x = x;
      }
    }
    double width = 0.0;
    for (std::size_t a = 0; a < d; ++a) {
      const double cell = 2.0 * (hi[a] - lo[a]) / (kPoints - 1);
      lo[a] = std::max(ab.lower[a], best_x[a] - cell);
      hi[a] = std::min(ab.upper[a], best_x[a] + cell);
      width = std::max(width, hi[a] - lo[a]);
    }
    if (width < 1e-11) break;
  }
  return best;
}

}  // namespace

double continuous_sup_ratio(const ContinuousDensity& density_n, const ContinuousDensity& density_limit,
                            const Box& ab, double tol) {
  ab.validate();
  const std::size_t d = ab.dim();
  if (density_n.dim() != d || density_limit.dim() != d)
    fail(ErrorCode::kInvalidArgument, "dimension mismatch");
  if (!ab.non_degenerate()) fail(ErrorCode::kInvalidArgument, "[a,b] must be non-degenerate");
  if (!(density_limit.density_extremes(ab).f_min > 0.0))
    fail(ErrorCode::kZeroDensityOnBox, "limit density vanishes on [a,b]");
  (void)tol;  // the refinement below resolves extrema to ~1e-11 in x

  double lo = 0.0, hi = 0.0;
  if (d == 1) {
    auto r = [&](double x) {
      const double p[1] = {x};
      return density_n.density_at(p) / density_limit.density_at(p);
    };
    std::vector<double> breaks;
    knots_of(density_n, breaks);
    knots_of(density_limit, breaks);
    std::tie(lo, hi) = ratio_range_1d(r, ab.lower[0], ab.upper[0], std::move(breaks));
  } else {
    auto r = [&](const Vec& x) { return density_n.density_at(x) / density_limit.density_at(x); };
    hi = zoom_extreme(r, ab, true);
    lo = zoom_extreme(r, ab, false);
  }
  return std::max({hi - 1.0, 1.0 - lo, 0.0});
}

}  // namespace llt
