#pragma once

// Declarative convergence experiments. A config names the study kind, the
// model, an increasing n grid, the box [a,b] and the minimal-length rule; a
// run produces one row per n and a CSV table.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "interval_sup.hpp"
#include "models.hpp"

namespace llt {

enum class StudyKind { kIidDichotomy, kCwLocal, kCwInterval, kContinuousLlt };

struct MinLengthRule {
  enum class Kind { kCTimesW, kWTimesLog, kWTimesSqrtRatio };
  Kind kind = Kind::kCTimesW;
  double parameter = 0.0;  // c, or the exponent of n

  // c w; w ln n; w n^exponent.
  Vec apply(const Vec& w, std::int64_t n) const;
};

struct ModelSpec {
  enum class Family { kIid, kCw, kIrwinHall };
  Family family = Family::kIid;
  BaseLattice1D base;
  bool standardize = true;
  CwModel cw;
  // Group fractions for studies; sizes are derived from each n.
  std::vector<double> fractions;
  std::int64_t n = 0;
  std::size_t support_cap = 0;

  CwModel cw_at(std::int64_t n_total) const;
};

struct StudyConfig {
  StudyKind kind = StudyKind::kIidDichotomy;
  ModelSpec model;
  std::vector<std::int64_t> n_grid;
  Box ab;
  std::optional<MinLengthRule> min_length;
  int slide_offsets = 8;
  double box_tolerance = kDefaultBoxTolerance;
  std::optional<int> counterexample_l;
  // Per-axis widening of [a,b] for the Step-3 density bounds, in units of w.
  double step3_margin_cells = 1.5;
  std::string output;
};

struct ConfigViolation {
  std::string path;
  std::string message;
};

// Parses and validates a study config. Every violation is reported; the
// error is RegimeViolation when that is the only kind found, else ConfigInvalid.
StudyConfig validate_config(const std::string& text);
std::vector<ConfigViolation> config_violations(const std::string& text);

// One-shot model from `{"family":"iid","base":{...},"n":N}` or
// `{"family":"cw","sizes":[...],"coupling":{"beta":b}|{"J":[[...]]}}`.
ModelSpec parse_model_spec(const std::string& text);
LatticePmf build_model_pmf(const ModelSpec& spec);
// N(0,1) for i.i.d. models, N(0, C) for Curie-Weiss.
ContinuousDensity reference_density(const ModelSpec& spec);

struct StudyRow {
  std::int64_t n = 0;
  Vec w;
  Vec m;
  std::optional<double> pointwise_llt;
  std::optional<double> step1;
  std::optional<double> sup_ratio;
  std::optional<double> counterexample_ratio;
  std::optional<double> mu_vs_histogram;
  std::optional<double> step3_bound;
  double wall_time_s = 0.0;
};

std::vector<StudyRow> run_study(const StudyConfig& config, unsigned threads = 1);
void write_study_csv(const StudyConfig& config, const std::vector<StudyRow>& rows, std::ostream& out);
std::size_t study_dim(const StudyConfig& config);

// One-shot tables over the config's n grid:
//   n,statistic_name,value,argmax_1..argmax_d
//   n,m_1..m_d,value,witness_lo_1..,witness_hi_1..,candidates_evaluated
void write_pointwise_csv(const StudyConfig& config, std::ostream& out);
void write_sup_csv(const StudyConfig& config, std::ostream& out, unsigned threads = 1);

}  // namespace llt
