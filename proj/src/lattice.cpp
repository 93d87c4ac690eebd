#include "lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "errors.hpp"

namespace llt {
namespace {

constexpr double kIndexLimit = 4.0e18;
constexpr double kBuildTolerance = 1e-9;

std::int64_t clamp_to_index(double t) {
  if (std::isnan(t)) fail(ErrorCode::kInvalidArgument, "NaN coordinate");
  return static_cast<std::int64_t>(std::clamp(t, -kIndexLimit, kIndexLimit));
}

}  // namespace

std::int64_t snapped_floor(double t) { return clamp_to_index(std::floor(t + kSnapTolerance)); }
std::int64_t snapped_ceil(double t) { return clamp_to_index(std::ceil(t - kSnapTolerance)); }

void axis_index_range(double t_lo, bool lo_inclusive, double t_hi, bool hi_inclusive,
                      std::int64_t& k_lo, std::int64_t& k_hi) {
  k_lo = lo_inclusive ? snapped_ceil(t_lo) : snapped_floor(t_lo) + 1;
  k_hi = hi_inclusive ? snapped_floor(t_hi) : snapped_ceil(t_hi) - 1;
}

double GridSpec::cell_volume() const {
  double v = 1.0;
  for (double w : step) v *= w;
  return v;
}

void GridSpec::validate() const {
  if (step.empty()) fail(ErrorCode::kInvalidArgument, "grid dimension must be positive");
  if (offset.size() != step.size())
    fail(ErrorCode::kInvalidArgument, "grid offset and step differ in length");
  for (std::size_t i = 0; i < step.size(); ++i) {
    if (!(step[i] > 0.0) || !std::isfinite(step[i]))
      fail(ErrorCode::kInvalidArgument, "grid step must be finite and positive");
    if (!std::isfinite(offset[i])) fail(ErrorCode::kInvalidArgument, "grid offset must be finite");
  }
}

Box Box::closed(Vec lower, Vec upper) {
  Box b;
  const std::size_t d = lower.size();
  b.lower = std::move(lower);
  b.upper = std::move(upper);
  b.lower_inclusive.assign(d, true);
  b.upper_inclusive.assign(d, true);
  return b;
}

Vec Box::lengths() const {
  Vec out(dim());
  for (std::size_t i = 0; i < dim(); ++i) out[i] = upper[i] - lower[i];
  return out;
}

double Box::volume() const {
  double v = 1.0;
  for (std::size_t i = 0; i < dim(); ++i) v *= upper[i] - lower[i];
  return v;
}

bool Box::non_degenerate() const {
  for (std::size_t i = 0; i < dim(); ++i)
    if (!(upper[i] > lower[i])) return false;
  return true;
}

void Box::validate() const {
  const std::size_t d = lower.size();
  if (d == 0) fail(ErrorCode::kInvalidArgument, "box dimension must be positive");
  if (upper.size() != d || lower_inclusive.size() != d || upper_inclusive.size() != d)
    fail(ErrorCode::kInvalidArgument, "box fields differ in length");
  for (std::size_t i = 0; i < d; ++i) {
    if (std::isnan(lower[i]) || std::isnan(upper[i]))
      fail(ErrorCode::kInvalidArgument, "box bound is NaN");
    if (lower[i] > upper[i]) fail(ErrorCode::kInvalidArgument, "box lower bound exceeds upper");
  }
}

bool IndexRange::empty() const {
  for (std::size_t i = 0; i < lo.size(); ++i)
    if (lo[i] > hi[i]) return true;
  return false;
}

LatticePmf LatticePmf::build(GridSpec grid, IndexVec index_lo, std::vector<std::size_t> extents,
                             std::vector<double> masses) {
  return make(std::move(grid), std::move(index_lo), std::move(extents), std::move(masses), true);
}

LatticePmf LatticePmf::adopt(GridSpec grid, IndexVec index_lo, std::vector<std::size_t> extents,
                             std::vector<double> masses) {
  return make(std::move(grid), std::move(index_lo), std::move(extents), std::move(masses), false);
}

LatticePmf LatticePmf::make(GridSpec grid, IndexVec index_lo, std::vector<std::size_t> extents,
                            std::vector<double> masses, bool renormalize) {
  grid.validate();
  const std::size_t d = grid.dim();
  if (index_lo.size() != d || extents.size() != d)
    fail(ErrorCode::kInvalidArgument, "index_lo/extents must match the grid dimension");
  if (masses.empty()) fail(ErrorCode::kEmptySupport, "mass table is empty");
  std::size_t expected = 1;
  for (std::size_t e : extents) {
    if (e == 0) fail(ErrorCode::kEmptySupport, "zero extent");
    expected *= e;
  }
  if (expected != masses.size())
    fail(ErrorCode::kInvalidArgument, "mass table size does not match extents");

  long double total = 0.0L;
  for (double m : masses) {
    if (!(m >= 0.0) || !std::isfinite(m)) fail(ErrorCode::kNegativeMass, "masses must be finite and >= 0");
    total += m;
  }
  if (std::fabs(static_cast<double>(total) - 1.0) > kBuildTolerance) {
    std::ostringstream os;
    os.precision(17);
    os << "masses sum to " << static_cast<double>(total);
    fail(ErrorCode::kNotNormalized, os.str());
  }
  if (renormalize) {
    for (double& m : masses) m = static_cast<double>(m / total);
  }

  LatticePmf pmf;
  pmf.grid_ = std::move(grid);
  pmf.index_lo_ = std::move(index_lo);
  pmf.extents_ = std::move(extents);
  pmf.masses_ = std::move(masses);
  pmf.strides_.assign(d, 1);
  for (std::size_t i = d - 1; i > 0; --i) pmf.strides_[i - 1] = pmf.strides_[i] * pmf.extents_[i];
  pmf.build_prefix();
  return pmf;
}

void LatticePmf::build_prefix() {
  const std::size_t d = dim();
  prefix_strides_.assign(d, 1);
  std::size_t total = 1;
  for (std::size_t i = d; i-- > 0;) {
    prefix_strides_[i] = total;
    total *= extents_[i] + 1;
  }
  prefix_.assign(total, 0.0L);

  // Scatter masses into the padded table at (k + 1).
  for (std::size_t lin = 0; lin < masses_.size(); ++lin) {
    std::size_t rem = lin;
    std::size_t padded = 0;
    for (std::size_t a = 0; a < d; ++a) {
      const std::size_t k = rem / strides_[a];
      rem %= strides_[a];
      padded += (k + 1) * prefix_strides_[a];
    }
    prefix_[padded] = masses_[lin];
  }
  // Running sums along each axis in turn.
  for (std::size_t a = 0; a < d; ++a) {
    const std::size_t stride = prefix_strides_[a];
    const std::size_t len = extents_[a] + 1;
    for (std::size_t lin = 0; lin < total; ++lin) {
      const std::size_t k = (lin / stride) % len;
      if (k > 0) prefix_[lin] += prefix_[lin - stride];
    }
  }
}

IndexVec LatticePmf::index_hi() const {
  IndexVec hi(dim());
  for (std::size_t i = 0; i < dim(); ++i)
    hi[i] = index_lo_[i] + static_cast<std::int64_t>(extents_[i]) - 1;
  return hi;
}

double LatticePmf::mass_at_index(std::span<const std::int64_t> k) const {
  std::size_t lin = 0;
  for (std::size_t a = 0; a < dim(); ++a) {
    const std::int64_t rel = k[a] - index_lo_[a];
    if (rel < 0 || rel >= static_cast<std::int64_t>(extents_[a])) return 0.0;
    lin += static_cast<std::size_t>(rel) * strides_[a];
  }
  return masses_[lin];
}

Vec LatticePmf::point(std::span<const std::int64_t> k) const {
  Vec x(dim());
  for (std::size_t a = 0; a < dim(); ++a) x[a] = grid_.coordinate(a, k[a]);
  return x;
}

IndexVec LatticePmf::index_of(std::size_t linear) const {
  IndexVec k(dim());
  for (std::size_t a = 0; a < dim(); ++a) {
    k[a] = index_lo_[a] + static_cast<std::int64_t>(linear / strides_[a]);
    linear %= strides_[a];
  }
  return k;
}

double LatticePmf::point_mass(std::span<const double> x) const {
  if (x.size() != dim()) fail(ErrorCode::kInvalidArgument, "point dimension mismatch");
  IndexVec k(dim());
  for (std::size_t a = 0; a < dim(); ++a) {
    const double t = grid_.index_position(a, x[a]);
    const double r = std::round(t);
    if (!(std::fabs(t - r) <= kSnapTolerance)) return 0.0;
    k[a] = clamp_to_index(r);
  }
  return mass_at_index(k);
}

IndexRange LatticePmf::box_index_range(const Box& box) const {
  if (box.dim() != dim()) fail(ErrorCode::kInvalidArgument, "box dimension mismatch");
  IndexRange r{IndexVec(dim()), IndexVec(dim())};
  for (std::size_t a = 0; a < dim(); ++a) {
    axis_index_range(grid_.index_position(a, box.lower[a]), box.lower_inclusive[a],
                     grid_.index_position(a, box.upper[a]), box.upper_inclusive[a], r.lo[a],
                     r.hi[a]);
  }
  return r;
}

double LatticePmf::range_mass(const IndexRange& range) const {
  const std::size_t d = dim();
  // Clip to the table, in padded prefix coordinates: [lo, hi + 1).
  std::vector<std::size_t> lo(d), hi(d);
  for (std::size_t a = 0; a < d; ++a) {
    const std::int64_t ext = static_cast<std::int64_t>(extents_[a]);
    const std::int64_t l = std::clamp<std::int64_t>(range.lo[a] - index_lo_[a], 0, ext);
    const std::int64_t h = std::clamp<std::int64_t>(range.hi[a] - index_lo_[a] + 1, 0, ext);
    if (h <= l) return 0.0;
    lo[a] = static_cast<std::size_t>(l);
    hi[a] = static_cast<std::size_t>(h);
  }
  long double sum = 0.0L;
  const std::size_t corners = std::size_t{1} << d;
  for (std::size_t c = 0; c < corners; ++c) {
    std::size_t idx = 0;
    int lows = 0;
    for (std::size_t a = 0; a < d; ++a) {
      const bool take_hi = (c >> a) & 1U;
      idx += (take_hi ? hi[a] : lo[a]) * prefix_strides_[a];
      if (!take_hi) ++lows;
    }
    sum += (lows % 2 == 0) ? prefix_[idx] : -prefix_[idx];
  }
  return std::max(0.0, static_cast<double>(sum));
}

double LatticePmf::box_mass(const Box& box) const {
  box.validate();
  return range_mass(box_index_range(box));
}

LatticePmf LatticePmf::affine_transform(std::span<const double> scale,
                                        std::span<const double> shift) const {
  if (scale.size() != dim() || shift.size() != dim())
    fail(ErrorCode::kInvalidArgument, "scale/shift dimension mismatch");
  GridSpec g = grid_;
  for (std::size_t a = 0; a < dim(); ++a) {
    if (!(scale[a] > 0.0) || !std::isfinite(scale[a]))
      fail(ErrorCode::kNonpositiveScale, "scale must be positive");
    g.offset[a] = scale[a] * grid_.offset[a] + shift[a];
    g.step[a] = scale[a] * grid_.step[a];
  }
  LatticePmf out = *this;
  out.grid_ = std::move(g);
  return out;
}

GridPoints LatticePmf::grid_points_in(const Box& box) const {
  box.validate();
  GridPoints gp;
  gp.range = box_index_range(box);
  gp.count.resize(dim());
  for (std::size_t a = 0; a < dim(); ++a)
    gp.count[a] = std::max<std::int64_t>(0, gp.range.hi[a] - gp.range.lo[a] + 1);
  return gp;
}

Box LatticePmf::support_hull() const {
  Vec lo(dim()), hi(dim());
  const IndexVec khi = index_hi();
  for (std::size_t a = 0; a < dim(); ++a) {
    lo[a] = grid_.coordinate(a, index_lo_[a]);
    hi[a] = grid_.coordinate(a, khi[a]);
  }
  return Box::closed(std::move(lo), std::move(hi));
}

}  // namespace llt
