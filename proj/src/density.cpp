#include "density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "errors.hpp"
#include "special.hpp"

namespace llt {
namespace {

// Standard-normal mass beyond |z| = 10 is below 1e-23.
constexpr double kTailCut = 10.0;
constexpr std::size_t kMaxExtremesDim = 10;

void require_bounded(const Box& box) {
  box.validate();
  for (std::size_t a = 0; a < box.dim(); ++a)
    if (!std::isfinite(box.lower[a]) || !std::isfinite(box.upper[a]))
      fail(ErrorCode::kInvalidArgument, "box must be bounded");
}

}  // namespace

ContinuousDensity ContinuousDensity::gaussian(const Eigen::MatrixXd& covariance) {
  if (covariance.rows() == 0 || covariance.rows() != covariance.cols())
    fail(ErrorCode::kInvalidArgument, "covariance must be a non-empty square matrix");
  if (!covariance.allFinite()) fail(ErrorCode::kInvalidArgument, "covariance must be finite");
  if ((covariance - covariance.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    fail(ErrorCode::kInvalidArgument, "covariance must be symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(covariance);
  if (llt.info() != Eigen::Success)
    fail(ErrorCode::kInvalidArgument, "covariance must be positive definite");

  ContinuousDensity g;
  g.kind_ = Kind::kGaussian;
  g.dim_ = static_cast<std::size_t>(covariance.rows());
  g.covariance_ = covariance;
  g.cholesky_ = llt.matrixL();
  g.precision_ = llt.solve(Eigen::MatrixXd::Identity(covariance.rows(), covariance.cols()));
  g.precision_ = 0.5 * (g.precision_ + g.precision_.transpose());
  double log_det_half = 0.0;
  for (Eigen::Index i = 0; i < covariance.rows(); ++i) log_det_half += std::log(g.cholesky_(i, i));
  g.log_norm_ = -0.5 * static_cast<double>(g.dim_) * std::log(2.0 * M_PI) - log_det_half;
  return g;
}

ContinuousDensity ContinuousDensity::standard_gaussian_1d() {
  ContinuousDensity g = gaussian(Eigen::MatrixXd::Identity(1, 1));
  g.kind_ = Kind::kStandardGaussian1D;
  return g;
}

ContinuousDensity ContinuousDensity::irwin_hall_standardized(int n) {
  irwin_hall_std_half_width(n);  // validates n
  ContinuousDensity ih;
  ih.kind_ = Kind::kIrwinHallStandardized;
  ih.dim_ = 1;
  ih.order_ = n;
  ih.covariance_ = Eigen::MatrixXd::Identity(1, 1);
  return ih;
}

double ContinuousDensity::marginal_sd(std::size_t axis) const {
  return std::sqrt(covariance_(static_cast<Eigen::Index>(axis), static_cast<Eigen::Index>(axis)));
}

double ContinuousDensity::quadratic_form(std::span<const double> x) const {
  Eigen::VectorXd v(static_cast<Eigen::Index>(dim_));
  for (std::size_t i = 0; i < dim_; ++i) v(static_cast<Eigen::Index>(i)) = x[i];
  const Eigen::VectorXd z = cholesky_.triangularView<Eigen::Lower>().solve(v);
  return z.squaredNorm();
}

double ContinuousDensity::density_at(std::span<const double> x) const {
  if (x.size() != dim_) fail(ErrorCode::kInvalidArgument, "point dimension mismatch");
  if (kind_ == Kind::kIrwinHallStandardized) return irwin_hall_std_pdf(order_, x[0]);
  if (dim_ == 1) return normal_pdf(x[0] / cholesky_(0, 0)) / cholesky_(0, 0);
  return std::exp(log_norm_ - 0.5 * quadratic_form(x));
}

double ContinuousDensity::box_prob(const Box& box, double tol) const {
  require_bounded(box);
  if (box.dim() != dim_) fail(ErrorCode::kInvalidArgument, "box dimension mismatch");
  if (!(tol >= 1e-12)) fail(ErrorCode::kInvalidArgument, "tolerance must be >= 1e-12");
  if (kind_ == Kind::kIrwinHallStandardized) {
    const double p = irwin_hall_std_cdf(order_, box.upper[0]) - irwin_hall_std_cdf(order_, box.lower[0]);
    return std::max(0.0, p);
  }
  return gaussian_box_prob(box, tol);
}

double ContinuousDensity::gaussian_box_prob(const Box& box, double tol) const {
  const Eigen::MatrixXd& l = cholesky_;
  if (dim_ == 1) return normal_interval(box.lower[0] / l(0, 0), box.upper[0] / l(0, 0));
  if (dim_ > 3) fail(ErrorCode::kDimensionUnsupported, "Gaussian box probabilities need d <= 3");

  // Whitening X = L Z turns the box into nested bounds z_i in [lo_i(z_<i), hi_i(z_<i)].
  const double z1_lo = std::max(box.lower[0] / l(0, 0), -kTailCut);
  const double z1_hi = std::min(box.upper[0] / l(0, 0), kTailCut);
  if (!(z1_hi > z1_lo)) return 0.0;

  if (dim_ == 2) {
    auto inner = [&](double z1) {
      const double lo = (box.lower[1] - l(1, 0) * z1) / l(1, 1);
      const double hi = (box.upper[1] - l(1, 0) * z1) / l(1, 1);
      return normal_pdf(z1) * normal_interval(lo, hi);
    };
    return std::clamp(integrate_adaptive(inner, z1_lo, z1_hi, tol), 0.0, 1.0);
  }

  const double inner_tol = std::max(1e-15, tol * 1e-3);
  auto middle = [&](double z1) {
    const double lo2 = std::max((box.lower[1] - l(1, 0) * z1) / l(1, 1), -kTailCut);
    const double hi2 = std::min((box.upper[1] - l(1, 0) * z1) / l(1, 1), kTailCut);
    if (!(hi2 > lo2)) return 0.0;
    auto inner = [&](double z2) {
      const double lo3 = (box.lower[2] - l(2, 0) * z1 - l(2, 1) * z2) / l(2, 2);
      const double hi3 = (box.upper[2] - l(2, 0) * z1 - l(2, 1) * z2) / l(2, 2);
      return normal_pdf(z2) * normal_interval(lo3, hi3);
    };
    return normal_pdf(z1) * integrate_adaptive(inner, lo2, hi2, inner_tol);
  };
  return std::clamp(integrate_adaptive(middle, z1_lo, z1_hi, tol), 0.0, 1.0);
}

DensityBounds ContinuousDensity::density_extremes(const Box& box) const {
  require_bounded(box);
  if (box.dim() != dim_) fail(ErrorCode::kInvalidArgument, "box dimension mismatch");
  return kind_ == Kind::kIrwinHallStandardized ? irwin_hall_extremes(box) : gaussian_extremes(box);
}

DensityBounds ContinuousDensity::gaussian_extremes(const Box& box) const {
  const std::size_t d = dim_;
  if (d > kMaxExtremesDim) fail(ErrorCode::kDimensionUnsupported, "density extremes need d <= 10");
  const Eigen::MatrixXd& p = precision_;

  // Minimum of x^T P x: the minimizer is the unconstrained minimizer over the
  // affine hull of some face, so enumerate faces (each axis free, at lo, at hi).
  double best_q = std::numeric_limits<double>::infinity();
  Vec best_x(d);
  std::size_t faces = 1;
  for (std::size_t i = 0; i < d; ++i) faces *= 3;
  std::vector<int> state(d);
  for (std::size_t f = 0; f < faces; ++f) {
    std::size_t code = f;
    std::vector<Eigen::Index> free_axes;
    Vec x(d, 0.0);
    bool skip = false;
    for (std::size_t i = 0; i < d; ++i) {
      state[i] = static_cast<int>(code % 3);
      code /= 3;
      if (state[i] == 0) {
        if (box.upper[i] == box.lower[i]) skip = true;  // the fixed variant covers it
        free_axes.push_back(static_cast<Eigen::Index>(i));
      } else {
        if (state[i] == 2 && box.upper[i] == box.lower[i]) skip = true;
        x[i] = state[i] == 1 ? box.lower[i] : box.upper[i];
      }
    }
    if (skip) continue;
    if (!free_axes.empty()) {
      const auto k = static_cast<Eigen::Index>(free_axes.size());
      Eigen::MatrixXd pff(k, k);
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k);
      for (Eigen::Index r = 0; r < k; ++r) {
        for (Eigen::Index c = 0; c < k; ++c) pff(r, c) = p(free_axes[r], free_axes[c]);
        for (std::size_t j = 0; j < d; ++j)
          if (state[j] != 0) rhs(r) -= p(free_axes[r], static_cast<Eigen::Index>(j)) * x[j];
      }
      const Eigen::VectorXd sol = pff.llt().solve(rhs);
      bool feasible = true;
      for (Eigen::Index r = 0; r < k; ++r) {
        const auto axis = static_cast<std::size_t>(free_axes[r]);
        const double slack = 1e-12 * std::max(1.0, box.upper[axis] - box.lower[axis]);
        if (sol(r) < box.lower[axis] - slack || sol(r) > box.upper[axis] + slack) {
          feasible = false;
          break;
        }
        x[axis] = std::clamp(sol(r), box.lower[axis], box.upper[axis]);
      }
      if (!feasible) continue;
    }
    const double q = quadratic_form(x);
    if (q < best_q) {
      best_q = q;
      best_x = x;
    }
  }

  // Maximum of the convex form sits at a vertex.
  double worst_q = -1.0;
  Vec worst_x(d);
  for (std::size_t v = 0; v < (std::size_t{1} << d); ++v) {
    Vec x(d);
    for (std::size_t i = 0; i < d; ++i) x[i] = ((v >> i) & 1U) ? box.upper[i] : box.lower[i];
    const double q = quadratic_form(x);
    if (q > worst_q) {
      worst_q = q;
      worst_x = x;
    }
  }

  DensityBounds b;
  b.f_max = density_at(best_x);
  b.f_min = density_at(worst_x);
  b.argmax = std::move(best_x);
  b.argmin = std::move(worst_x);
  b.box = box;
  return b;
}

DensityBounds ContinuousDensity::irwin_hall_extremes(const Box& box) const {
  // The standardized density is symmetric and unimodal about 0.
  const double lo = box.lower[0];
  const double hi = box.upper[0];
  const double peak = std::clamp(0.0, lo, hi);
  const double f_lo = irwin_hall_std_pdf(order_, lo);
  const double f_hi = irwin_hall_std_pdf(order_, hi);
  DensityBounds b;
  b.box = box;
  b.f_max = irwin_hall_std_pdf(order_, peak);
  b.argmax = {peak};
  if (f_lo <= f_hi) {
    b.f_min = f_lo;
    b.argmin = {lo};
  } else {
    b.f_min = f_hi;
    b.argmin = {hi};
  }
  if (!(b.f_min > 0.0))
    fail(ErrorCode::kZeroDensityOnBox, "box leaves the Irwin-Hall support");
  return b;
}

}  // namespace llt
