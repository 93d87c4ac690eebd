#pragma once

// Continuous reference measures mu = f * Lebesgue: N(0, C) in any dimension
// (box probabilities for d <= 3) and the standardized Irwin-Hall law in d = 1.

#include <Eigen/Dense>

#include "lattice.hpp"

namespace llt {

inline constexpr double kDefaultBoxTolerance = 1e-12;

struct DensityBounds {
  double f_min = 0.0;
  double f_max = 0.0;
  Vec argmin;
  Vec argmax;
  Box box;
};

class ContinuousDensity {
 public:
  enum class Kind { kGaussian, kStandardGaussian1D, kIrwinHallStandardized };

  static ContinuousDensity gaussian(const Eigen::MatrixXd& covariance);
  static ContinuousDensity standard_gaussian_1d();
  static ContinuousDensity irwin_hall_standardized(int n);

  Kind kind() const { return kind_; }
  std::size_t dim() const { return dim_; }
  int irwin_hall_order() const { return order_; }
  const Eigen::MatrixXd& covariance() const { return covariance_; }
  // Marginal standard deviation along one axis.
  double marginal_sd(std::size_t axis) const;

  double density_at(std::span<const double> x) const;
  // mu(box) to absolute error tol; inclusivity flags are ignored.
  double box_prob(const Box& box, double tol = kDefaultBoxTolerance) const;
  // Exact min / max of the density over the closed box.
  DensityBounds density_extremes(const Box& box) const;

 private:
  ContinuousDensity() = default;

  double gaussian_box_prob(const Box& box, double tol) const;
  DensityBounds gaussian_extremes(const Box& box) const;
  DensityBounds irwin_hall_extremes(const Box& box) const;
  double quadratic_form(std::span<const double> x) const;

  Kind kind_ = Kind::kGaussian;
  std::size_t dim_ = 1;
  int order_ = 0;
  Eigen::MatrixXd covariance_;
  Eigen::MatrixXd cholesky_;   // lower triangular factor L with C = L L^T
  Eigen::MatrixXd precision_;  // C^-1
  double log_norm_ = 0.0;      // log of the Gaussian normalizing constant
};

}  // namespace llt
