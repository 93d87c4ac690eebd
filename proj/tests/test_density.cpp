#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "density.hpp"
#include "errors.hpp"
#include "oracles.hpp"
#include "special.hpp"

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

double at(const ContinuousDensity& f, std::initializer_list<double> x) {
  const Vec v(x);
  return f.density_at(v);
}

Eigen::MatrixXd correlated3() {
  Eigen::MatrixXd c(3, 3);
  c << 1.5, 0.4, -0.2, 0.4, 1.0, 0.3, -0.2, 0.3, 0.8;
  return c;
}

}  // namespace

TEST(DensityAt, ClosedForms) {
  EXPECT_NEAR(at(ContinuousDensity::standard_gaussian_1d(), {0.0}), 0.3989422804, 1e-10);
  EXPECT_NEAR(at(ContinuousDensity::irwin_hall_standardized(1), {0.0}), 0.2886751346, 1e-10);
  EXPECT_NEAR(at(ContinuousDensity::gaussian(Eigen::MatrixXd::Identity(2, 2)), {0.0, 0.0}), 0.1591549431,
              1e-10);
  EXPECT_EQ(at(ContinuousDensity::irwin_hall_standardized(1), {2.0}), 0.0);
}

TEST(DensityAt, GaussianRejectsNonSpd) {
  Eigen::MatrixXd c(2, 2);
  c << 1.0, 2.0, 2.0, 1.0;
  EXPECT_EQ(code_of([&] { ContinuousDensity::gaussian(c); }), ErrorCode::kInvalidArgument);
}

TEST(BoxProb, Examples) {
  EXPECT_NEAR(ContinuousDensity::standard_gaussian_1d().box_prob(Box::closed_1d(-1.0, 1.0)), 0.6826894921,
              1e-10);
  const ContinuousDensity g2 = ContinuousDensity::gaussian(Eigen::MatrixXd::Identity(2, 2));
  const double quarter = oracle::phi(1.0) - oracle::phi(0.0);
  EXPECT_NEAR(g2.box_prob(Box::closed({0.0, 0.0}, {1.0, 1.0})), quarter * quarter, 1e-12);
  EXPECT_NEAR(quarter * quarter, 0.11651623566859807, 1e-15);
  EXPECT_NEAR(g2.box_prob(Box::closed({-12.0, -12.0}, {12.0, 12.0})), 1.0, 1e-9);
  const ContinuousDensity g3 = ContinuousDensity::gaussian(correlated3());
  EXPECT_NEAR(g3.box_prob(Box::closed({-15.0, -15.0, -15.0}, {15.0, 15.0, 15.0})), 1.0, 1e-9);
}

TEST(BoxProb, CorrelatedMatchesTensorOracle) {
  Eigen::MatrixXd c2(2, 2);
  c2 << 1.5, 0.5, 0.5, 1.5;
  const ContinuousDensity g2 = ContinuousDensity::gaussian(c2);
  const std::vector<std::vector<double>> o2{{1.5, 0.5}, {0.5, 1.5}};
  EXPECT_NEAR(g2.box_prob(Box::closed({-1.0, -0.5}, {0.7, 2.0})),
              oracle::gaussian_box_tensor(o2, {-1.0, -0.5}, {0.7, 2.0}), 1e-10);

  const ContinuousDensity g3 = ContinuousDensity::gaussian(correlated3());
  const std::vector<std::vector<double>> o3{{1.5, 0.4, -0.2}, {0.4, 1.0, 0.3}, {-0.2, 0.3, 0.8}};
  EXPECT_NEAR(g3.box_prob(Box::closed({-1.0, -0.3, -2.0}, {0.5, 1.1, 0.4})),
              oracle::gaussian_box_tensor(o3, {-1.0, -0.3, -2.0}, {0.5, 1.1, 0.4}, 60), 1e-9);
}

TEST(BoxProb, Additivity) {
  const ContinuousDensity g = ContinuousDensity::gaussian(correlated3());
  const double whole = g.box_prob(Box::closed({-1.0, -1.0, -1.0}, {1.0, 1.0, 1.0}));
  const double left = g.box_prob(Box::closed({-1.0, -1.0, -1.0}, {0.2, 1.0, 1.0}));
  const double right = g.box_prob(Box::closed({0.2, -1.0, -1.0}, {1.0, 1.0, 1.0}));
  EXPECT_NEAR(left + right, whole, 2e-12);
}

TEST(BoxProb, DimensionUnsupported) {
  const ContinuousDensity g = ContinuousDensity::gaussian(Eigen::MatrixXd::Identity(4, 4));
  EXPECT_EQ(code_of([&] { g.box_prob(Box::closed(Vec(4, 0.0), Vec(4, 1.0))); }), ErrorCode::kDimensionUnsupported);
}

TEST(BoxProb, IrwinHallCdf) {
  const ContinuousDensity u = ContinuousDensity::irwin_hall_standardized(1);
  EXPECT_NEAR(u.box_prob(Box::closed_1d(-1.0, 1.0)), 2.0 / (2.0 * std::sqrt(3.0)), 1e-15);
  const ContinuousDensity ih = ContinuousDensity::irwin_hall_standardized(5);
  const double total = ih.box_prob(Box::closed_1d(-4.0, 4.0));
  EXPECT_NEAR(total, 1.0, 1e-14);
  const double part = integrate_adaptive([&](double x) { return at(ih, {x}); }, -0.7, 1.3, 1e-13);
  EXPECT_NEAR(ih.box_prob(Box::closed_1d(-0.7, 1.3)), part, 1e-12);
}

TEST(IrwinHall, MeanZeroVarianceOne) {
  for (int n : {1, 2, 3, 7, 12, 30}) {
    const ContinuousDensity f = ContinuousDensity::irwin_hall_standardized(n);
    const double h = irwin_hall_std_half_width(n);
    std::vector<double> knots;
    const double scale = std::sqrt(n / 12.0);
    for (int k = 0; k <= n; ++k) knots.push_back((k - 0.5 * n) / scale);
    double mass = 0.0, mean = 0.0, second = 0.0;
    for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
      mass += integrate_adaptive([&](double x) { return at(f, {x}); }, knots[k], knots[k + 1], 1e-13);
      mean += integrate_adaptive([&](double x) { return x * at(f, {x}); }, knots[k], knots[k + 1], 1e-13);
      second += integrate_adaptive([&](double x) { return x * x * at(f, {x}); }, knots[k], knots[k + 1], 1e-13);
    }
    EXPECT_NEAR(mass, 1.0, 1e-10) << n;
    EXPECT_NEAR(mean, 0.0, 1e-8) << n;
    EXPECT_NEAR(second, 1.0, 1e-8) << n;
    EXPECT_NEAR(knots.back(), h, 1e-12);
  }
}

TEST(Extremes, Examples) {
  const ContinuousDensity f = ContinuousDensity::standard_gaussian_1d();
  const DensityBounds b = f.density_extremes(Box::closed_1d(-1.0, 1.0));
  EXPECT_NEAR(b.f_min, 0.2419707245, 1e-10);
  EXPECT_NEAR(b.f_max, 0.3989422804, 1e-10);
  const DensityBounds side = f.density_extremes(Box::closed_1d(1.0, 2.0));
  EXPECT_NEAR(side.f_min, oracle::normal_pdf(2.0), 1e-15);
  EXPECT_NEAR(side.f_max, oracle::normal_pdf(1.0), 1e-15);

  const ContinuousDensity g2 = ContinuousDensity::gaussian(Eigen::MatrixXd::Identity(2, 2));
  const DensityBounds b2 = g2.density_extremes(Box::closed({-1.0, -1.0}, {1.0, 1.0}));
  EXPECT_NEAR(b2.f_min, 0.0585498315, 1e-10);
  EXPECT_NEAR(b2.f_max, 0.1591549431, 1e-10);
}

TEST(Extremes, IrwinHallZeroOnBox) {
  const ContinuousDensity f = ContinuousDensity::irwin_hall_standardized(2);
  EXPECT_EQ(code_of([&] { f.density_extremes(Box::closed_1d(-3.0, 0.0)); }), ErrorCode::kZeroDensityOnBox);
  const DensityBounds b = f.density_extremes(Box::closed_1d(-1.0, 0.5));
  EXPECT_NEAR(b.f_max, at(f, {0.0}), 1e-15);
  EXPECT_NEAR(b.f_min, at(f, {-1.0}), 1e-15);
}

TEST(Extremes, SandwichRandomPoints) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const ContinuousDensity g = ContinuousDensity::gaussian(correlated3());
  for (int trial = 0; trial < 20; ++trial) {
    Vec lo(3), hi(3);
    for (int a = 0; a < 3; ++a) {
      lo[a] = 4.0 * u(rng) - 2.5;
      hi[a] = lo[a] + 0.1 + 2.0 * u(rng);
    }
    const Box box = Box::closed(lo, hi);
    const DensityBounds b = g.density_extremes(box);
    EXPECT_NEAR(g.density_at(b.argmin), b.f_min, 1e-12);
    EXPECT_NEAR(g.density_at(b.argmax), b.f_max, 1e-12);
    for (int s = 0; s < 500; ++s) {
      Vec x(3);
      for (int a = 0; a < 3; ++a) x[a] = lo[a] + (hi[a] - lo[a]) * u(rng);
      const double v = g.density_at(x);
      EXPECT_GE(v, b.f_min - 1e-12);
      EXPECT_LE(v, b.f_max + 1e-12);
    }
    const double p = g.box_prob(box);
    EXPECT_GE(p, b.f_min * box.volume() - 1e-12);
    EXPECT_LE(p, b.f_max * box.volume() + 1e-12);
  }
}
