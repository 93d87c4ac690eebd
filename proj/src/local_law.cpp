#include "local_law.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"

namespace llt {
namespace {

constexpr double kWindowSds = 6.0;

// Per-axis cell overlap pieces of [u_lo, u_hi] in cell-edge units, where
// cell k covers (k, k + 1].
struct AxisSegment {
  std::int64_t k_lo;
  std::int64_t k_hi;
  double fraction;
};

double snap_to_integer(double u) {
  const double r = std::round(u);
  return std::fabs(u - r) <= kSnapTolerance ? r : u;
}

std::vector<AxisSegment> axis_segments(double u_lo, double u_hi) {
  u_lo = snap_to_integer(u_lo);
  u_hi = snap_to_integer(u_hi);
  std::vector<AxisSegment> out;
  if (!(u_hi > u_lo)) return out;
  const auto first = static_cast<std::int64_t>(std::floor(u_lo));
  const auto last = static_cast<std::int64_t>(std::ceil(u_hi)) - 1;
  if (first == last) {
    out.push_back({first, first, u_hi - u_lo});
    return out;
  }
  const double head = static_cast<double>(first + 1) - u_lo;
  const double tail = u_hi - static_cast<double>(last);
  if (head > 0.0) out.push_back({first, first, head});
  if (last - first >= 2) out.push_back({first + 1, last - 1, 1.0});
  if (tail > 0.0) out.push_back({last, last, tail});
  return out;
}

void require_finite(const Box& box) {
  box.validate();
  for (std::size_t a = 0; a < box.dim(); ++a)
    if (!std::isfinite(box.lower[a]) || !std::isfinite(box.upper[a]))
      fail(ErrorCode::kInvalidArgument, "box must be bounded");
}

// Visits every index vector of the inclusive range in lexicographic order.
template <class Fn>
void for_each_index(const IndexRange& range, Fn&& fn) {
  if (range.empty()) return;
  IndexVec k = range.lo;
  const std::size_t d = k.size();
  for (;;) {
    fn(static_cast<const IndexVec&>(k));
    std::size_t a = d;
    while (a-- > 0) {
      if (++k[a] <= range.hi[a]) break;
      k[a] = range.lo[a];
    }
    if (a == static_cast<std::size_t>(-1)) return;
  }
}

}  // namespace

std::int64_t cell_index(const GridSpec& grid, std::size_t axis, double x) {
  const double u = grid.index_position(axis, x) - 0.5;
  const double r = std::round(u);
  if (std::fabs(u - r) <= kSnapTolerance) return static_cast<std::int64_t>(r);
  return static_cast<std::int64_t>(std::ceil(u));
}

PointwiseResult pointwise_llt_stat(const LatticePmf& pmf, const ContinuousDensity& density,
                                   const std::optional<Box>& region) {
  const std::size_t d = pmf.dim();
  if (density.dim() != d) fail(ErrorCode::kInvalidArgument, "density dimension mismatch");
  const GridSpec& grid = pmf.grid();
  IndexRange range;
  if (region) {
    range = pmf.box_index_range(*region);
    const IndexVec hi = pmf.index_hi();
    for (std::size_t a = 0; a < d; ++a) {
      if (range.lo[a] > range.hi[a] || range.hi[a] < pmf.index_lo()[a] || range.lo[a] > hi[a])
        fail(ErrorCode::kEmptyRegion, "region contains no grid point of the support");
    }
  } else {
    range.lo = pmf.index_lo();
    range.hi = pmf.index_hi();
    for (std::size_t a = 0; a < d; ++a) {
      const double reach = kWindowSds * density.marginal_sd(a);
      range.lo[a] = std::min(range.lo[a], snapped_ceil(grid.index_position(a, -reach)));
      range.hi[a] = std::max(range.hi[a], snapped_floor(grid.index_position(a, reach)));
    }
  }

  const double wbar = pmf.cell_volume();
  PointwiseResult best{-1.0, {}};
  Vec x(d);
  for_each_index(range, [&](const IndexVec& k) {
    for (std::size_t a = 0; a < d; ++a) x[a] = grid.coordinate(a, k[a]);
    const double value = std::fabs(pmf.mass_at_index(k) / wbar - density.density_at(x));
    if (value > best.value) {
      best.value = value;
      best.argmax = x;
    }
  });
  return best;
}

double histogram_at(const LatticePmf& pmf, std::span<const double> x) {
  if (x.size() != pmf.dim()) fail(ErrorCode::kInvalidArgument, "point dimension mismatch");
  IndexVec k(pmf.dim());
  for (std::size_t a = 0; a < pmf.dim(); ++a) k[a] = cell_index(pmf.grid(), a, x[a]);
  return pmf.mass_at_index(k) / pmf.cell_volume();
}

double histogram_measure(const LatticePmf& pmf, const Box& box) {
  require_finite(box);
  const std::size_t d = pmf.dim();
  if (box.dim() != d) fail(ErrorCode::kInvalidArgument, "box dimension mismatch");
  std::vector<std::vector<AxisSegment>> segments(d);
  for (std::size_t a = 0; a < d; ++a) {
    segments[a] = axis_segments(pmf.grid().index_position(a, box.lower[a]) + 0.5,
                                pmf.grid().index_position(a, box.upper[a]) + 0.5);
    if (segments[a].empty()) return 0.0;
  }
  // Combine per-axis segments: at most 3^d sub-rectangles of constant weight.
  long double total = 0.0L;
  std::vector<std::size_t> pick(d, 0);
  IndexRange r{IndexVec(d), IndexVec(d)};
  for (;;) {
    double weight = 1.0;
    for (std::size_t a = 0; a < d; ++a) {
      const AxisSegment& s = segments[a][pick[a]];
      r.lo[a] = s.k_lo;
      r.hi[a] = s.k_hi;
      weight *= s.fraction;
    }
    total += static_cast<long double>(weight) * pmf.range_mass(r);
    std::size_t a = d;
    while (a-- > 0) {
      if (++pick[a] < segments[a].size()) break;
      pick[a] = 0;
    }
    if (a == static_cast<std::size_t>(-1)) break;
  }
  return static_cast<double>(total);
}

Step1Result step1_stat(const LatticePmf& pmf, const ContinuousDensity& density, const Box& box) {
  require_finite(box);
  const std::size_t d = pmf.dim();
  if (box.dim() != d || density.dim() != d)
    fail(ErrorCode::kInvalidArgument, "dimension mismatch");
  if (!(density.density_extremes(box).f_min > 0.0))
    fail(ErrorCode::kZeroDensityOnBox, "density vanishes on the box");

  const GridSpec& grid = pmf.grid();
  IndexRange cells{IndexVec(d), IndexVec(d)};
  for (std::size_t a = 0; a < d; ++a) {
    cells.lo[a] = cell_index(grid, a, box.lower[a]);
    cells.hi[a] = cell_index(grid, a, box.upper[a]);
  }
  const double wbar = pmf.cell_volume();
  Step1Result best{-1.0, {}};
  Box piece = box;
  for_each_index(cells, [&](const IndexVec& k) {
    for (std::size_t a = 0; a < d; ++a) {
      const double y = grid.coordinate(a, k[a]);
      piece.lower[a] = std::max(box.lower[a], y - 0.5 * grid.step[a]);
      piece.upper[a] = std::min(box.upper[a], y + 0.5 * grid.step[a]);
      if (piece.upper[a] < piece.lower[a]) piece.upper[a] = piece.lower[a];
    }
    const double h = pmf.mass_at_index(k) / wbar;
    const DensityBounds fb = density.density_extremes(piece);
    const double at_min = std::fabs(h / fb.f_min - 1.0);
    const double at_max = std::fabs(h / fb.f_max - 1.0);
    const double value = std::max(at_min, at_max);
    if (value > best.value) {
      best.value = value;
      best.argmax = at_min >= at_max ? fb.argmin : fb.argmax;
    }
  });
  return best;
}

Vec default_margin(const GridSpec& grid) {
  Vec m(grid.dim());
  for (std::size_t a = 0; a < grid.dim(); ++a) m[a] = 1.5 * grid.step[a];
  return m;
}

Box enlarge_box(const Box& box, const Vec& margin) {
  Box out = box;
  for (std::size_t a = 0; a < box.dim(); ++a) {
    out.lower[a] -= margin[a];
    out.upper[a] += margin[a];
  }
  return out;
}

}  // namespace llt
