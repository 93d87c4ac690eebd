#include <gtest/gtest.h>

#include <cmath>

#include "errors.hpp"
#include "local_law.hpp"
#include "models.hpp"
#include "oracles.hpp"

using namespace llt;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode{};
}

LatticePmf coin(std::int64_t n) { return standardized_iid_sum(BaseLattice1D::fair_coin(), n); }

}  // namespace

TEST(Pointwise, CoinN2) {
  const PointwiseResult r = pointwise_llt_stat(coin(2), ContinuousDensity::standard_gaussian_1d());
  EXPECT_NEAR(r.value, oracle::normal_pdf(0.0) - 0.5 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(r.value, 0.0454, 5e-5);
  EXPECT_NEAR(r.argmax[0], 0.0, 1e-12);
}

TEST(Pointwise, MatchesBinomialOracle) {
  for (int n : {5, 16, 33}) {
    const auto b = oracle::symmetric_binomial(n);
    const double w = 2.0 / std::sqrt(static_cast<double>(n));
    double want = 0.0;
    for (int k = 0; k <= n; ++k) {
      const double x = (2.0 * k - n) / std::sqrt(static_cast<double>(n));
      want = std::max(want, std::fabs(static_cast<double>(b[static_cast<std::size_t>(k)]) / w - oracle::normal_pdf(x)));
    }
    // Off-support grid points inside +-6 sd contribute f(x) itself.
    for (int k = -1; 2.0 * k - n >= -6.0 * std::sqrt(static_cast<double>(n)); --k)
      want = std::max(want, oracle::normal_pdf((2.0 * k - n) / std::sqrt(static_cast<double>(n))));
    EXPECT_NEAR(pointwise_llt_stat(coin(n), ContinuousDensity::standard_gaussian_1d()).value, want, 1e-14) << n;
  }
}

TEST(Pointwise, EmptyRegion) {
  const LatticePmf pmf = coin(4);
  EXPECT_EQ(code_of([&] {
              pointwise_llt_stat(pmf, ContinuousDensity::standard_gaussian_1d(), Box::closed_1d(0.2, 0.8));
            }),
            ErrorCode::kEmptyRegion);
}

TEST(Pointwise, CurieWeissDecreases) {
  double prev = 1.0;
  for (std::int64_t n : {16, 64, 256}) {
    CwModel model;
    model.sizes = {n};
    model.beta = 0.0;
    const double v =
        pointwise_llt_stat(cw_magnetization_pmf(model), ContinuousDensity::gaussian(cw_covariance(model))).value;
    EXPECT_LT(v, prev) << n;
    prev = v;
  }
}

TEST(Histogram, CellsAreHalfOpen) {
  const LatticePmf pmf = coin(2);
  const double w = std::sqrt(2.0);
  const double top[1] = {w / 2.0}, below[1] = {-w / 2.0}, inside[1] = {0.1};
  EXPECT_NEAR(histogram_at(pmf, top), 0.5 / w, 1e-15);
  EXPECT_NEAR(histogram_at(pmf, below), 0.25 / w, 1e-15);
  EXPECT_NEAR(histogram_at(pmf, inside), 0.5 / w, 1e-15);
  EXPECT_EQ(cell_index(pmf.grid(), 0, w / 2.0), cell_index(pmf.grid(), 0, 0.0));
}

TEST(Histogram, MeasureExamples) {
  const LatticePmf pmf = coin(2);
  const double w = std::sqrt(2.0);
  EXPECT_NEAR(histogram_measure(pmf, Box::closed_1d(0.0, w / 2.0)), 0.25, 1e-15);
  EXPECT_NEAR(histogram_measure(pmf, Box::closed_1d(-5.0, 5.0)), 1.0, 1e-15);
  EXPECT_NEAR(histogram_measure(pmf, Box::closed_1d(-0.3, 0.2)), 0.5 * 0.5 / w, 1e-15);

  CwModel model;
  model.sizes = {4, 6};
  model.beta = 0.3;
  const LatticePmf cw = cw_magnetization_pmf(model);
  EXPECT_NEAR(histogram_measure(cw, Box::closed({-5.0, -5.0}, {5.0, 5.0})), 1.0, 1e-14);
  const Box left = Box::closed({-5.0, -5.0}, {0.37, 5.0});
  const Box right = Box::closed({0.37, -5.0}, {5.0, 5.0});
  EXPECT_NEAR(histogram_measure(cw, left) + histogram_measure(cw, right), 1.0, 1e-14);
}

TEST(Step1, DominatesGridPointDeviations) {
  const ContinuousDensity f = ContinuousDensity::standard_gaussian_1d();
  const Box ab = Box::closed_1d(-1.0, 1.0);
  for (std::int64_t n : {9, 64, 400}) {
    const LatticePmf pmf = coin(n);
    const double s1 = step1_stat(pmf, f, ab).value;
    double pointwise = 0.0;
    for (std::size_t i = 0; i < pmf.size(); ++i) {
      const Vec y = pmf.point(pmf.index_of(i));
      if (std::fabs(y[0]) > 1.0) continue;
      pointwise = std::max(pointwise, std::fabs(histogram_at(pmf, y) / f.density_at(y) - 1.0));
    }
    EXPECT_GE(s1, pointwise - 1e-14) << n;
  }
}

TEST(Step1, ShrinksWithN) {
  const ContinuousDensity f = ContinuousDensity::standard_gaussian_1d();
  const Box ab = Box::closed_1d(-1.0, 1.0);
  EXPECT_GT(step1_stat(coin(256), f, ab).value, step1_stat(coin(1024), f, ab).value);
}

TEST(Step1, SingleCellClosedForm) {
  // n = 2, ab inside the cell of 0: h is constant 0.5/w, f is largest at 0.
  const ContinuousDensity f = ContinuousDensity::standard_gaussian_1d();
  const double w = std::sqrt(2.0);
  const double v = step1_stat(coin(2), f, Box::closed_1d(-0.5, 0.5)).value;
  const double h = 0.5 / w;
  EXPECT_NEAR(v, std::max(h / oracle::normal_pdf(0.5) - 1.0, 1.0 - h / oracle::normal_pdf(0.0)), 1e-14);
}

TEST(EnlargeBox, DefaultMargin) {
  const LatticePmf pmf = coin(4);
  const Vec margin = default_margin(pmf.grid());
  EXPECT_NEAR(margin[0], 1.5, 1e-15);
  const Box big = enlarge_box(Box::closed_1d(-1.0, 1.0), margin);
  EXPECT_NEAR(big.lower[0], -2.5, 1e-15);
  EXPECT_NEAR(big.upper[0], 2.5, 1e-15);
}
