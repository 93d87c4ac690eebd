#include <gtest/gtest.h>

#include <sstream>

#include "errors.hpp"
#include "study.hpp"

using namespace llt;

namespace {

const char* kIid = R"({"study":"iid_dichotomy","model":{"family":"iid","base":{"preset":"fair_coin"}},
  "n_grid":[64,256,1024],"box":{"lower":[-1],"upper":[1]},"min_length":{"rule":"w_times_log"}})";

const char* kCwInterval = R"({"study":"cw_interval","model":{"family":"cw","fractions":[0.5,0.5],
  "coupling":{"beta":0.5}},"n_grid":[64,128,256],"box":{"lower":[-1,-1],"upper":[1,1]},
  "min_length":{"rule":"c_times_w","c":4}})";

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode{};
}

std::string message_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

}  // namespace

TEST(Config, MinimalValid) {
  const StudyConfig c = validate_config(kIid);
  EXPECT_EQ(c.kind, StudyKind::kIidDichotomy);
  EXPECT_EQ(c.n_grid, (std::vector<std::int64_t>{64, 256, 1024}));
  ASSERT_TRUE(c.min_length.has_value());
  EXPECT_EQ(c.min_length->kind, MinLengthRule::Kind::kWTimesLog);
  EXPECT_EQ(study_dim(c), 1U);
  EXPECT_EQ(c.slide_offsets, 8);
}

TEST(Config, NGridMustIncrease) {
  const std::string text = R"({"study":"iid_dichotomy","model":{"family":"iid","base":{"preset":"fair_coin"}},
    "n_grid":[64,64],"box":{"lower":[-1],"upper":[1]},"min_length":{"rule":"w_times_log"}})";
  EXPECT_EQ(code_of([&] { validate_config(text); }), ErrorCode::kConfigInvalid);
  EXPECT_NE(message_of([&] { validate_config(text); }).find("n_grid"), std::string::npos);
}

TEST(Config, RegimeViolationAlone) {
  const std::string text = R"({"study":"cw_local","model":{"family":"cw","fractions":[1.0],
    "coupling":{"beta":1.0}},"n_grid":[16,32],"box":{"lower":[-1],"upper":[1]}})";
  EXPECT_EQ(code_of([&] { validate_config(text); }), ErrorCode::kRegimeViolation);
}

TEST(Config, ReportsEveryViolation) {
  const std::string text = R"({"study":"nope","model":{"family":"iid","base":{"preset":"fair_coin"}},
    "n_grid":[8,4],"box":{"lower":[1],"upper":[-1]},"min_length":{"rule":"c_times_w","c":-2}})";
  const auto violations = config_violations(text);
  std::vector<std::string> paths;
  for (const auto& v : violations) paths.push_back(v.path);
  for (const char* want : {"study", "n_grid", "box", "min_length.c"})
    EXPECT_NE(std::find_if(paths.begin(), paths.end(),
                           [&](const std::string& p) { return p.rfind(want, 0) == 0; }),
              paths.end())
        << want;
  EXPECT_EQ(code_of([&] { validate_config(text); }), ErrorCode::kConfigInvalid);
}

TEST(Config, MalformedJson) {
  EXPECT_EQ(code_of([] { validate_config("{not json"); }), ErrorCode::kConfigInvalid);
}

TEST(MinLengthRule, Apply) {
  MinLengthRule c{MinLengthRule::Kind::kCTimesW, 3.0};
  EXPECT_DOUBLE_EQ(c.apply({0.5}, 100)[0], 1.5);
  MinLengthRule log{MinLengthRule::Kind::kWTimesLog, 0.0};
  EXPECT_DOUBLE_EQ(log.apply({0.5}, 100)[0], 0.5 * std::log(100.0));
  MinLengthRule root{MinLengthRule::Kind::kWTimesSqrtRatio, 0.25};
  EXPECT_NEAR(root.apply({0.5}, 16)[0], 1.0, 1e-15);
}

TEST(ModelSpec, CwSizesFromFractions) {
  ModelSpec spec;
  spec.family = ModelSpec::Family::kCw;
  spec.fractions = {0.3, 0.7};
  spec.cw.beta = 0.2;
  const CwModel m = spec.cw_at(33);
  EXPECT_EQ(m.sizes, (std::vector<std::int64_t>{10, 23}));
}

TEST(Study, IidSupRatioDecreases) {
  const StudyConfig c = validate_config(kIid);
  const auto rows = run_study(c);
  ASSERT_EQ(rows.size(), 3U);
  std::vector<double> sup;
  for (const auto& r : rows) {
    ASSERT_TRUE(r.sup_ratio.has_value());
    ASSERT_TRUE(r.counterexample_ratio.has_value());
    sup.push_back(*r.sup_ratio);
    EXPECT_GE(*r.sup_ratio, 1.0 - *r.counterexample_ratio - 1e-12);
  }
  EXPECT_TRUE(strictly_decreasing(sup));
}

TEST(Study, CwLocalPointwiseDecreases) {
  const StudyConfig c = validate_config(R"({"study":"cw_local","model":{"family":"cw","fractions":[0.5,0.5],
    "coupling":{"beta":0.5}},"n_grid":[32,128,512],"box":{"lower":[-1,-1],"upper":[1,1]}})");
  const auto rows = run_study(c);
  std::vector<double> v;
  for (const auto& r : rows) {
    ASSERT_TRUE(r.pointwise_llt.has_value());
    EXPECT_FALSE(r.sup_ratio.has_value());
    v.push_back(*r.pointwise_llt);
  }
  EXPECT_TRUE(strictly_decreasing(v));
}

TEST(Study, ContinuousDecreases) {
  const StudyConfig c = validate_config(R"({"study":"continuous_llt","model":{"family":"irwin_hall"},
    "n_grid":[1,2,4,8,12],"box":{"lower":[-1],"upper":[1]}})");
  const auto rows = run_study(c);
  std::vector<double> v;
  for (const auto& r : rows) v.push_back(r.sup_ratio.value());
  EXPECT_NEAR(v.front(), 0.2764, 1e-3);
  EXPECT_TRUE(strictly_decreasing(v));
}

TEST(Study, Step3DominatesHistogramDeviation) {
  const StudyConfig c = validate_config(kCwInterval);
  for (const auto& r : run_study(c)) {
    ASSERT_TRUE(r.step3_bound.has_value()) << r.n;
    ASSERT_TRUE(r.mu_vs_histogram.has_value());
    EXPECT_LE(*r.mu_vs_histogram, *r.step3_bound) << r.n;
  }
}

TEST(Study, CsvIsDeterministicAcrossThreads) {
  const StudyConfig c = validate_config(kCwInterval);
  auto strip = [](const std::string& csv) {
    std::istringstream in(csv);
    std::string line, out;
    while (std::getline(in, line)) out += line.substr(0, line.rfind(',')) + "\n";
    return out;
  };
  std::ostringstream a, b;
  write_study_csv(c, run_study(c, 1), a);
  write_study_csv(c, run_study(c, 4), b);
  EXPECT_EQ(strip(a.str()), strip(b.str()));
  const std::string header = a.str().substr(0, a.str().find('\n'));
  EXPECT_EQ(header,
            "n,w_1,w_2,m_1,m_2,pointwise_llt,step1,sup_ratio,counterexample_ratio,mu_vs_histogram,step3_bound,"
            "wall_time_s");
}

TEST(Study, NaCellsForCwLocal) {
  const StudyConfig c = validate_config(R"({"study":"cw_local","model":{"family":"cw","fractions":[1.0],
    "coupling":{"beta":0.2}},"n_grid":[16],"box":{"lower":[-1],"upper":[1]}})");
  std::ostringstream out;
  write_study_csv(c, run_study(c), out);
  EXPECT_NE(out.str().find(",NA,"), std::string::npos);
}

TEST(OneShot, PointwiseAndSupTables) {
  const StudyConfig c = validate_config(kIid);
  std::ostringstream p, s;
  write_pointwise_csv(c, p);
  write_sup_csv(c, s);
  EXPECT_EQ(p.str().substr(0, p.str().find('\n')), "n,statistic_name,value,argmax_1");
  EXPECT_EQ(s.str().substr(0, s.str().find('\n')), "n,m_1,value,witness_lo_1,witness_hi_1,candidates_evaluated");
  const std::string sup = s.str();
  EXPECT_EQ(std::count(sup.begin(), sup.end(), '\n'), 4);
}

TEST(OneShot, ModelSpecBuilds) {
  const ModelSpec spec = parse_model_spec(R"({"family":"iid","base":{"preset":"fair_coin"},"n":4})");
  const LatticePmf pmf = build_model_pmf(spec);
  const double zero[1] = {0.0};
  EXPECT_NEAR(pmf.point_mass(zero), 0.375, 1e-15);
  EXPECT_EQ(reference_density(spec).dim(), 1U);
  EXPECT_EQ(code_of([] { parse_model_spec(R"({"family":"iid"})"); }), ErrorCode::kConfigInvalid);
}
