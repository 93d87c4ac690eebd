#pragma once

// Pointwise local-limit statistic and the box-kernel histogram h_n of a
// lattice pmf: h_n(x) = mu_n(y) / wbar on the half-open cell (y - w/2, y + w/2].

#include <optional>

#include "density.hpp"
#include "lattice.hpp"

namespace llt {

struct PointwiseResult {
  double value = 0.0;
  Vec argmax;
};

// sup over grid points of |mu_n(x) / wbar - f(x)|. Without a region the scan
// covers the support hull widened to +-6 marginal standard deviations.
PointwiseResult pointwise_llt_stat(const LatticePmf& pmf, const ContinuousDensity& density,
                                   const std::optional<Box>& region = std::nullopt);

double histogram_at(const LatticePmf& pmf, std::span<const double> x);
// Exact integral of h_n over the box (inclusivity is irrelevant).
double histogram_measure(const LatticePmf& pmf, const Box& box);
// Index of the half-open cell containing coordinate x along one axis.
std::int64_t cell_index(const GridSpec& grid, std::size_t axis, double x);

struct Step1Result {
  double value = 0.0;
  Vec argmax;
};

// sup over x in the box of |h_n(x) / f(x) - 1|, exact per cell piece.
Step1Result step1_stat(const LatticePmf& pmf, const ContinuousDensity& density, const Box& box);

// [a - margin, b + margin]; the default margin is 3 w / 2 per axis.
Box enlarge_box(const Box& box, const Vec& margin);
Vec default_margin(const GridSpec& grid);

}  // namespace llt
