#pragma once

// sup over sub-boxes I of [a,b] with |I| >= m of |mu_n(I) / mu(I) - 1|.
//
// For a fixed set of grid points inside I, mu_n(I) is constant while mu(I)
// moves monotonically with the endpoints, so the supremum is attained at
// extreme endpoint placements. Per axis and per contiguous run of grid points
// i..j the engine builds
//   - the largest placement: open at the neighbouring grid points (or closed
//     at a/b), which minimizes the ratio;
//   - the smallest placements: the closed hull [y_i, y_j] when it is already
//     long enough, else a window of length m slid across its slack (both
//     extremes, the centred position and K interior offsets);
//   - empty windows strictly between grid points where the gap allows.
// Boxes are products of per-axis placements. A box is skipped when the bound
// max(mu_n/(f_min vol) - 1, 1 - mu_n/(f_max vol)) cannot beat the best value
// found so far in its chunk.

#include <optional>
#include <string>

#include "density.hpp"
#include "lattice.hpp"

namespace llt {

struct MinLength {
  Vec m;
};

struct SupOptions {
  int slide_offsets = 8;
  double box_tolerance = kDefaultBoxTolerance;
  unsigned threads = 1;
};

struct SupResult {
  double value = 0.0;
  Box witness;
  double ratio_at_witness = 1.0;
  std::int64_t candidate_count = 0;
  std::vector<std::string> warnings;
};

SupResult sup_ratio_deviation(const LatticePmf& pmf, const ContinuousDensity& density,
                              const Box& ab, const MinLength& m, const SupOptions& options = {});

// Same candidate family with mu replaced by the histogram measure H_n.
SupResult mu_vs_histogram_stat(const LatticePmf& pmf, const ContinuousDensity& density,
                               const Box& ab, const MinLength& m, const SupOptions& options = {});

struct Counterexample {
  Box interval;
  double ratio = 0.0;
};

// Open interval (x_0, x_l) along dim_star around the density's maximum on ab,
// unions of whole cells of total length >= m along the other axes (one cell
// when m is not given).
Counterexample counterexample_interval(const LatticePmf& pmf, const ContinuousDensity& density,
                                       const Box& ab, int l, std::size_t dim_star,
                                       const std::optional<MinLength>& m = std::nullopt,
                                       double box_tolerance = kDefaultBoxTolerance);

// sum_d 4 * f_max * 4^(d-1) / (f_min * (floor(m_d / w_d) - 2)).
double theoretical_step3_bound(const DensityBounds& bounds, const MinLength& m, const Vec& w,
                               std::size_t d);

// sup over all positive-length sub-boxes of [a,b] of |mu_n(I)/mu(I) - 1|,
// which equals max(sup f_n/f - 1, 1 - inf f_n/f) over [a,b].
double continuous_sup_ratio(const ContinuousDensity& density_n,
                            const ContinuousDensity& density_limit, const Box& ab,
                            double tol = 1e-8);

}  // namespace llt
