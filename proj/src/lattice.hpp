#pragma once

// Grid-supported probability measures on v + w∘Z^d with O(2^d) box queries.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace llt {

using Vec = std::vector<double>;
using IndexVec = std::vector<std::int64_t>;

// Coordinates within kSnapTolerance * w of a grid point are treated as lying on it.
inline constexpr double kSnapTolerance = 1e-9;

struct GridSpec {
  Vec offset;
  Vec step;

  std::size_t dim() const { return step.size(); }
  double coordinate(std::size_t axis, std::int64_t k) const {
    return offset[axis] + step[axis] * static_cast<double>(k);
  }
  // Position of x in index units along one axis.
  double index_position(std::size_t axis, double x) const {
    return (x - offset[axis]) / step[axis];
  }
  double cell_volume() const;
  void validate() const;
};

// Axis-aligned box with per-endpoint inclusivity. Default flags are closed.
struct Box {
  Vec lower;
  Vec upper;
  std::vector<bool> lower_inclusive;
  std::vector<bool> upper_inclusive;

  static Box closed(Vec lower, Vec upper);
  static Box closed_1d(double lower, double upper) { return closed({lower}, {upper}); }

  std::size_t dim() const { return lower.size(); }
  Vec lengths() const;
  double volume() const;
  bool non_degenerate() const;
  void validate() const;
};

// Inclusive grid index range per axis; empty along an axis when lo > hi.
struct IndexRange {
  IndexVec lo;
  IndexVec hi;

  bool empty() const;
};

struct GridPoints {
  std::vector<std::int64_t> count;
  IndexRange range;
};

class LatticePmf {
 public:
  // Renormalizes so the masses sum to one; the input sum must be within 1e-9.
  static LatticePmf build(GridSpec grid, IndexVec index_lo,
                          std::vector<std::size_t> extents, std::vector<double> masses);
  // Keeps masses bit-for-bit (deserialization); still validates normalization.
  static LatticePmf adopt(GridSpec grid, IndexVec index_lo,
                          std::vector<std::size_t> extents, std::vector<double> masses);

  std::size_t dim() const { return grid_.dim(); }
  const GridSpec& grid() const { return grid_; }
  const IndexVec& index_lo() const { return index_lo_; }
  const std::vector<std::size_t>& extents() const { return extents_; }
  std::span<const double> masses() const { return masses_; }
  std::size_t size() const { return masses_.size(); }
  double cell_volume() const { return grid_.cell_volume(); }
  IndexVec index_hi() const;

  double mass_at_index(std::span<const std::int64_t> k) const;
  Vec point(std::span<const std::int64_t> k) const;
  // Grid index of the table entry at a linear (row-major) offset.
  IndexVec index_of(std::size_t linear) const;

  double point_mass(std::span<const double> x) const;
  double box_mass(const Box& box) const;
  // Mass over inclusive index ranges; ranges are clipped to the occupied table.
  double range_mass(const IndexRange& range) const;

  LatticePmf affine_transform(std::span<const double> scale,
                              std::span<const double> shift) const;
  // Indices of the (unbounded) grid that fall in the box, per axis.
  GridPoints grid_points_in(const Box& box) const;
  IndexRange box_index_range(const Box& box) const;

  // Box covering the occupied table's grid points (closed).
  Box support_hull() const;

 private:
  LatticePmf() = default;
  static LatticePmf make(GridSpec grid, IndexVec index_lo,
                         std::vector<std::size_t> extents, std::vector<double> masses,
                         bool renormalize);
  void build_prefix();

  GridSpec grid_;
  IndexVec index_lo_;
  std::vector<std::size_t> extents_;
  std::vector<double> masses_;
  std::vector<std::size_t> strides_;
  // Cumulative sums over the table padded by one leading zero slice per axis.
  std::vector<long double> prefix_;
  std::vector<std::size_t> prefix_strides_;
};

inline LatticePmf build_pmf(GridSpec grid, IndexVec index_lo,
                            std::vector<std::size_t> extents, std::vector<double> masses) {
  return LatticePmf::build(std::move(grid), std::move(index_lo), std::move(extents),
                           std::move(masses));
}

// Snapped index arithmetic shared by every component that classifies coordinates.
std::int64_t snapped_floor(double t);
std::int64_t snapped_ceil(double t);
// Index range along one axis for an interval with the given inclusivity.
void axis_index_range(double t_lo, bool lo_inclusive, double t_hi, bool hi_inclusive,
                      std::int64_t& k_lo, std::int64_t& k_hi);

}  // namespace llt
