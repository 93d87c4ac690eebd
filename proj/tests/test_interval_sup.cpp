#include <gtest/gtest.h>

#include <cmath>

#include "errors.hpp"
#include "interval_sup.hpp"
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

const ContinuousDensity& normal() {
  static const ContinuousDensity f = ContinuousDensity::standard_gaussian_1d();
  return f;
}

oracle::MeshResult coin_mesh(const LatticePmf& pmf, double a, double b, double m) {
  std::vector<double> pts, ms;
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    pts.push_back(pmf.point(pmf.index_of(i))[0]);
    ms.push_back(pmf.masses()[i]);
  }
  return oracle::mesh_sup({pts}, {ms}, pmf.grid().step, {a}, {b}, {m});
}

CwModel free_cw(std::vector<std::int64_t> sizes) {
  CwModel model;
  model.sizes = std::move(sizes);
  model.beta = 0.0;
  return model;
}

}  // namespace

TEST(SupRatio, WholeBoxOnly) {
  const LatticePmf pmf = coin(16);
  const Box ab = Box::closed_1d(-1.0, 1.0);
  const SupResult r = sup_ratio_deviation(pmf, normal(), ab, MinLength{{2.0}});
  // +-1 are grid points, so all four inclusivity variants of [-1,1] qualify.
  double want = 0.0;
  for (bool lo_in : {false, true})
    for (bool hi_in : {false, true}) {
      Box b = ab;
      b.lower_inclusive = {lo_in};
      b.upper_inclusive = {hi_in};
      want = std::max(want, std::fabs(pmf.box_mass(b) / normal().box_prob(ab) - 1.0));
    }
  EXPECT_NEAR(r.value, want, 1e-14);
  EXPECT_NEAR(r.witness.lower[0], -1.0, 1e-15);
  EXPECT_NEAR(r.witness.upper[0], 1.0, 1e-15);
}

TEST(SupRatio, WitnessReproducesValue) {
  for (std::int64_t n : {16, 100, 1000}) {
    const LatticePmf pmf = coin(n);
    const SupResult r = sup_ratio_deviation(pmf, normal(), Box::closed_1d(-1.0, 1.0), MinLength{{0.5}});
    EXPECT_NEAR(std::fabs(pmf.box_mass(r.witness) / normal().box_prob(r.witness) - 1.0), r.value, 1e-12);
    EXPECT_NEAR(r.ratio_at_witness - 1.0, r.value * (r.ratio_at_witness >= 1.0 ? 1.0 : -1.0), 1e-12);
    EXPECT_GE(r.witness.upper[0] - r.witness.lower[0], 0.5 - 1e-12);
    EXPECT_GT(r.candidate_count, 0);
  }
  CwModel model;
  model.sizes = {10, 12};
  model.beta = 0.4;
  const LatticePmf pmf = cw_magnetization_pmf(model);
  const ContinuousDensity f = ContinuousDensity::gaussian(cw_covariance(model));
  const SupResult r = sup_ratio_deviation(pmf, f, Box::closed({-1.0, -1.0}, {1.0, 1.0}), MinLength{{0.8, 0.8}});
  EXPECT_NEAR(std::fabs(pmf.box_mass(r.witness) / f.box_prob(r.witness) - 1.0), r.value, 1e-12);
}

TEST(SupRatio, NonincreasingInMinLength) {
  const LatticePmf pmf = coin(64);
  double prev = 2.0;
  for (double m : {0.3, 0.5, 0.8, 1.2, 1.7}) {
    const double v = sup_ratio_deviation(pmf, normal(), Box::closed_1d(-1.0, 1.0), MinLength{{m}}).value;
    EXPECT_LE(v, prev + 1e-12) << m;
    prev = v;
  }
}

TEST(SupRatio, MatchesMeshOracle) {
  const LatticePmf pmf = coin(16);
  const double engine = sup_ratio_deviation(pmf, normal(), Box::closed_1d(-1.0, 1.0), MinLength{{0.6}}).value;
  const oracle::MeshResult mesh = coin_mesh(pmf, -1.0, 1.0, 0.6);
  EXPECT_LE(std::fabs(engine - mesh.value), mesh.resolution);
  // The engine evaluates real intervals, so it never undershoots the mesh by more than rounding.
  EXPECT_GE(engine, mesh.value - 1e-12);
}

TEST(SupRatio, LogLengthMatchesMeshOracle) {
  const LatticePmf pmf = coin(64);
  const double m = pmf.grid().step[0] * std::log(64.0);
  const double engine = sup_ratio_deviation(pmf, normal(), Box::closed_1d(-1.0, 1.0), MinLength{{m}}).value;
  const oracle::MeshResult mesh = coin_mesh(pmf, -1.0, 1.0, m);
  EXPECT_LE(std::fabs(engine - mesh.value), mesh.resolution);
  // floor(m/w) = 4 points in an open window spanning 5 cells.
  EXPECT_NEAR(engine, 0.2, 0.02);
}

TEST(SupRatio, TwoDimensionalMatchesMeshOracle) {
  const CwModel model = free_cw({6, 6});
  const LatticePmf pmf = cw_magnetization_pmf(model);
  const ContinuousDensity f = ContinuousDensity::gaussian(cw_covariance(model));
  const double engine =
      sup_ratio_deviation(pmf, f, Box::closed({-1.0, -1.0}, {1.0, 1.0}), MinLength{{0.9, 0.9}}).value;
  std::vector<std::vector<double>> pts(2), ms(2);
  const auto b = oracle::symmetric_binomial(6);
  for (auto g = 0U; g < 2; ++g)
    for (int k = 0; k <= 6; ++k) {
      pts[g].push_back((2.0 * k - 6) / std::sqrt(6.0));
      ms[g].push_back(static_cast<double>(b[static_cast<std::size_t>(k)]));
    }
  const oracle::MeshResult mesh =
      oracle::mesh_sup(pts, ms, pmf.grid().step, {-1.0, -1.0}, {1.0, 1.0}, {0.9, 0.9});
  EXPECT_LE(std::fabs(engine - mesh.value), mesh.resolution);
}

TEST(SupRatio, EmptyGapGivesOne) {
  // Grid points at integers; [0.2, 0.8] holds none.
  const SupResult r = sup_ratio_deviation(coin(4), normal(), Box::closed_1d(0.2, 0.8), MinLength{{0.3}});
  EXPECT_DOUBLE_EQ(r.value, 1.0);
  EXPECT_DOUBLE_EQ(r.ratio_at_witness, 0.0);
}

TEST(SupRatio, ThreadCountDoesNotChangeResult) {
  CwModel model;
  model.sizes = {30, 40};
  model.beta = 0.5;
  const LatticePmf pmf = cw_magnetization_pmf(model);
  const ContinuousDensity f = ContinuousDensity::gaussian(cw_covariance(model));
  const Box ab = Box::closed({-1.5, -1.0}, {1.0, 1.5});
  SupOptions one, many;
  many.threads = 8;
  const SupResult a = sup_ratio_deviation(pmf, f, ab, MinLength{{0.7, 0.7}}, one);
  const SupResult b = sup_ratio_deviation(pmf, f, ab, MinLength{{0.7, 0.7}}, many);
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.candidate_count, b.candidate_count);
  EXPECT_EQ(a.witness.lower, b.witness.lower);
  EXPECT_EQ(a.witness.upper, b.witness.upper);
}

TEST(SupRatio, Errors) {
  const LatticePmf pmf = coin(16);
  EXPECT_EQ(code_of([&] { sup_ratio_deviation(pmf, normal(), Box::closed_1d(-1.0, 1.0), MinLength{{2.5}}); }),
            ErrorCode::kMinLengthExceedsBox);
  const ContinuousDensity ih = ContinuousDensity::irwin_hall_standardized(2);
  EXPECT_EQ(code_of([&] { sup_ratio_deviation(pmf, ih, Box::closed_1d(-3.0, 0.0), MinLength{{0.5}}); }),
            ErrorCode::kDensityNotBoundedBelow);
  EXPECT_EQ(code_of([&] { sup_ratio_deviation(pmf, normal(), Box::closed_1d(-1.0, 1.0), MinLength{{-0.1}}); }),
            ErrorCode::kInvalidArgument);
}

TEST(SupRatio, SmallMinLengthWarns) {
  const LatticePmf pmf = coin(16);
  const SupResult r = sup_ratio_deviation(pmf, normal(), Box::closed_1d(-1.0, 1.0), MinLength{{0.1}});
  EXPECT_FALSE(r.warnings.empty());
}

TEST(MuVsHistogram, BoundedByStep3) {
  const LatticePmf pmf = coin(400);
  const Box ab = Box::closed_1d(-1.0, 1.0);
  const double w = pmf.grid().step[0];
  const MinLength m{{10.0 * w}};
  const double v = mu_vs_histogram_stat(pmf, normal(), ab, m).value;
  const double bound = theoretical_step3_bound(normal().density_extremes(ab), m, pmf.grid().step, 1);
  EXPECT_GT(v, 0.0);
  EXPECT_LE(v, bound);
}

TEST(Counterexample, OpenIntervalRatios) {
  const LatticePmf pmf = coin(100);
  const Box ab = Box::closed_1d(-1.0, 1.0);
  const Counterexample two = counterexample_interval(pmf, normal(), ab, 2, 0);
  EXPECT_GT(two.ratio, 0.4);
  EXPECT_LT(two.ratio, 0.6);
  EXPECT_FALSE(two.interval.lower_inclusive[0]);
  EXPECT_FALSE(two.interval.upper_inclusive[0]);
  EXPECT_NEAR(two.interval.upper[0] - two.interval.lower[0], 2.0 * pmf.grid().step[0], 1e-12);
  const Counterexample three = counterexample_interval(pmf, normal(), ab, 3, 0);
  EXPECT_NEAR(three.ratio, 2.0 / 3.0, 0.02);
  EXPECT_EQ(code_of([&] { counterexample_interval(pmf, normal(), Box::closed_1d(-0.1, 0.1), 3, 0); }),
            ErrorCode::kNotEnoughGridPoints);
}

TEST(Counterexample, SideAxesUseWholeCells) {
  const CwModel model = free_cw({50, 50});
  const LatticePmf pmf = cw_magnetization_pmf(model);
  const ContinuousDensity f = ContinuousDensity::gaussian(cw_covariance(model));
  const Counterexample c =
      counterexample_interval(pmf, f, Box::closed({-1.0, -1.0}, {1.0, 1.0}), 3, 1, MinLength{{0.5, 0.5}});
  const double w = pmf.grid().step[0];
  EXPECT_NEAR(c.interval.upper[0] - c.interval.lower[0], std::ceil(0.5 / w) * w, 1e-12);
  EXPECT_NEAR(c.ratio, 2.0 / 3.0, 0.03);
}

TEST(Step3Bound, Examples) {
  DensityBounds b;
  b.f_min = oracle::normal_pdf(1.0);
  b.f_max = oracle::normal_pdf(0.0);
  EXPECT_NEAR(theoretical_step3_bound(b, MinLength{{10.0}}, {1.0}, 1), 4.0 * std::exp(0.5) / 8.0, 1e-12);
  EXPECT_NEAR(theoretical_step3_bound(b, MinLength{{0.3}}, {0.1}, 1), 4.0 * std::exp(0.5), 1e-12);
  EXPECT_EQ(code_of([&] { theoretical_step3_bound(b, MinLength{{2.0}}, {1.0}, 1); }),
            ErrorCode::kBoundDegenerate);
  // Two axes with 4^(d-1) = 4.
  EXPECT_NEAR(theoretical_step3_bound(b, MinLength{{4.0, 6.0}}, {1.0, 1.0}, 2),
              16.0 * std::exp(0.5) * (1.0 / 2.0 + 1.0 / 4.0), 1e-12);
}

TEST(ContinuousSup, Examples) {
  const Box ab = Box::closed_1d(-1.0, 1.0);
  EXPECT_NEAR(continuous_sup_ratio(normal(), normal(), ab), 0.0, 1e-15);
  const double v2 = continuous_sup_ratio(ContinuousDensity::irwin_hall_standardized(2), normal(), ab);
  const double v12 = continuous_sup_ratio(ContinuousDensity::irwin_hall_standardized(12), normal(), ab);
  EXPECT_LT(v12, v2);
  // n = 1: the uniform density 1/(2 sqrt 3) against phi, worst at x = 0.
  EXPECT_NEAR(continuous_sup_ratio(ContinuousDensity::irwin_hall_standardized(1), normal(), ab),
              1.0 - 1.0 / (2.0 * std::sqrt(3.0) * oracle::normal_pdf(0.0)), 1e-10);
  const ContinuousDensity g2 = ContinuousDensity::gaussian(Eigen::MatrixXd::Identity(2, 2));
  EXPECT_NEAR(continuous_sup_ratio(g2, g2, Box::closed({-1.0, -1.0}, {1.0, 1.0})), 0.0, 1e-15);
  EXPECT_EQ(code_of([&] {
              continuous_sup_ratio(normal(), ContinuousDensity::irwin_hall_standardized(1), Box::closed_1d(-3.0, 0.0));
            }),
            ErrorCode::kZeroDensityOnBox);
}
