#include "study.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cmath>
#include <exception>
#include <ostream>
#include <sstream>
#include <thread>

#include "errors.hpp"
#include "json.hpp"
#include "local_law.hpp"
#include "pmf_io.hpp"
#include "special.hpp"

namespace llt {
namespace {

using nlohmann::json;

// Collects violations with their field paths instead of stopping at the first.
class Checker {
 public:
  std::vector<ConfigViolation> violations;
  bool regime_only = true;

  void add(const std::string& path, const std::string& message, bool regime = false) {
    violations.push_back({path, message});
    regime_only = regime_only && regime;
  }

  const json* field(const json& obj, const std::string& path, const char* key, bool required) {
    if (!obj.is_object()) return nullptr;
    auto it = obj.find(key);
    if (it == obj.end()) {
      if (required) add(join(path, key), "missing");
      return nullptr;
    }
    return &*it;
  }

  std::optional<double> number(const json& obj, const std::string& path, const char* key,
                               bool required) {
    const json* v = field(obj, path, key, required);
    if (!v) return std::nullopt;
    if (!v->is_number()) {
      add(join(path, key), "must be a number");
      return std::nullopt;
    }
    return v->get<double>();
  }

  std::optional<std::int64_t> integer(const json& obj, const std::string& path, const char* key,
                                      bool required) {
    const json* v = field(obj, path, key, required);
    if (!v) return std::nullopt;
    if (!v->is_number_integer()) {
      add(join(path, key), "must be an integer");
      return std::nullopt;
    }
    return v->get<std::int64_t>();
  }

  std::optional<Vec> vector(const json& obj, const std::string& path, const char* key,
                            bool required) {
    const json* v = field(obj, path, key, required);
    if (!v) return std::nullopt;
    if (!v->is_array() || v->empty()) {
      add(join(path, key), "must be a non-empty array of numbers");
      return std::nullopt;
    }
    Vec out;
    for (std::size_t i = 0; i < v->size(); ++i) {
      if (!(*v)[i].is_number()) {
        add(join(path, key) + "[" + std::to_string(i) + "]", "must be a number");
        return std::nullopt;
      }
      out.push_back((*v)[i].get<double>());
    }
    return out;
  }

  static std::string join(const std::string& path, const char* key) {
    return path.empty() ? std::string(key) : path + "." + key;
  }
};

void check_base(Checker& c, const json& node, const std::string& path, BaseLattice1D& base) {
  if (!node.is_object()) {
    c.add(path, "must be an object");
    return;
  }
  if (node.contains("preset")) {
    const json& preset = node["preset"];
    if (preset == "fair_coin") {
      base = BaseLattice1D::fair_coin();
    } else if (preset == "bernoulli") {
      const auto p = c.number(node, path, "p", true);
      if (p && !(*p > 0.0 && *p < 1.0)) c.add(path + ".p", "must lie in (0,1)");
      if (p && *p > 0.0 && *p < 1.0) base = BaseLattice1D::bernoulli(*p);
    } else {
      c.add(path + ".preset", "unknown preset (fair_coin, bernoulli)");
    }
    return;
  }
  const auto offset = c.number(node, path, "offset", false);
  const auto span = c.number(node, path, "span", false);
  const auto index_lo = c.integer(node, path, "index_lo", false);
  const auto masses = c.vector(node, path, "masses", true);
  base.offset = offset.value_or(0.0);
  base.span = span.value_or(1.0);
  base.index_lo = index_lo.value_or(0);
  if (masses) base.masses = *masses;
  try {
    base.validate();
    moments(base);
  } catch (const Error& e) {
    c.add(path, e.what());
  }
}

void check_coupling(Checker& c, const json& model, const std::string& path, CwModel& cw,
                    std::size_t d) {
  const json* coupling = c.field(model, path, "coupling", true);
  if (!coupling) return;
  const std::string cpath = path + ".coupling";
  if (!coupling->is_object() || (coupling->contains("beta") == coupling->contains("J"))) {
    c.add(cpath, "must be {\"beta\": b} or {\"J\": [[...]]}");
    return;
  }
  if (coupling->contains("beta")) {
    const auto beta = c.number(*coupling, cpath, "beta", true);
    if (beta && !(*beta >= 0.0 && std::isfinite(*beta))) c.add(cpath + ".beta", "must be >= 0");
    cw.beta = beta;
    return;
  }
  const json& rows = (*coupling)["J"];
  if (!rows.is_array() || rows.size() != d) {
    c.add(cpath + ".J", "must be a d x d array");
    return;
  }
  Eigen::MatrixXd j(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t r = 0; r < d; ++r) {
    if (!rows[r].is_array() || rows[r].size() != d) {
      c.add(cpath + ".J[" + std::to_string(r) + "]", "must have d entries");
      return;
    }
    for (std::size_t k = 0; k < d; ++k) {
      if (!rows[r][k].is_number()) {
        c.add(cpath + ".J[" + std::to_string(r) + "][" + std::to_string(k) + "]", "must be a number");
        return;
      }
      j(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) = rows[r][k].get<double>();
    }
  }
  cw.coupling = j;
}

// `study` selects whether Curie-Weiss groups come as fractions (sizes then
// follow from each n) or as fixed sizes.
ModelSpec check_model(Checker& c, const json& model, const std::string& path, bool study) {
  ModelSpec spec;
  if (!model.is_object()) {
    c.add(path, "must be an object");
    return spec;
  }
  const json* family = c.field(model, path, "family", true);
  if (!family) return spec;
  if (*family == "iid") {
    spec.family = ModelSpec::Family::kIid;
    if (const json* base = c.field(model, path, "base", true)) check_base(c, *base, path + ".base", spec.base);
    if (const json* s = c.field(model, path, "standardize", false)) {
      if (s->is_boolean()) spec.standardize = s->get<bool>();
      else c.add(path + ".standardize", "must be a boolean");
    }
  } else if (*family == "cw") {
    spec.family = ModelSpec::Family::kCw;
    std::size_t d = 0;
    if (study) {
      auto fractions = c.vector(model, path, "fractions", !model.contains("sizes"));
      if (!fractions && model.contains("sizes")) fractions = c.vector(model, path, "sizes", true);
      if (fractions) {
        double total = 0.0;
        bool ok = true;
        for (double f : *fractions) {
          ok = ok && f > 0.0 && std::isfinite(f);
          total += f;
        }
        if (!ok) {
          c.add(path + ".fractions", "entries must be positive");
        } else {
          for (double& f : *fractions) f /= total;
          spec.fractions = *fractions;
          d = fractions->size();
        }
      }
    } else {
      const json* sizes = c.field(model, path, "sizes", true);
      if (sizes) {
        bool ok = sizes->is_array() && !sizes->empty();
        for (std::size_t i = 0; ok && i < sizes->size(); ++i)
          ok = (*sizes)[i].is_number_integer() && (*sizes)[i].get<std::int64_t>() >= 1;
        if (!ok) {
          c.add(path + ".sizes", "must be a non-empty array of positive integers");
        } else {
          for (const json& s : *sizes) spec.cw.sizes.push_back(s.get<std::int64_t>());
          d = spec.cw.sizes.size();
        }
      }
    }
    if (d > 0) check_coupling(c, model, path, spec.cw, d);
    if (auto alpha = c.vector(model, path, "alpha", false)) spec.cw.alpha = *alpha;
    if (const json* cr = c.field(model, path, "check_regime", false)) {
      if (cr->is_boolean()) spec.cw.check_regime = cr->get<bool>();
      else c.add(path + ".check_regime", "must be a boolean");
    }
    if (d > 0 && (spec.cw.beta || spec.cw.coupling)) {
      CwModel probe = study ? spec.cw_at(static_cast<std::int64_t>(1000 * d)) : spec.cw;
      if (study && spec.cw.alpha.empty()) probe.alpha = spec.fractions;
      try {
        probe.validate();
        if (probe.check_regime) probe.check_high_temperature();
      } catch (const Error& e) {
        const bool regime = e.code() == ErrorCode::kRegimeViolation;
        c.add(regime ? path + ".coupling" : path, e.what(), regime);
      }
    }
  } else if (*family == "irwin_hall") {
    spec.family = ModelSpec::Family::kIrwinHall;
  } else {
    c.add(path + ".family", "must be one of iid, cw, irwin_hall");
  }
  if (const auto cap = c.integer(model, path, "support_cap", false)) {
    if (*cap < 1) c.add(path + ".support_cap", "must be positive");
    else spec.support_cap = static_cast<std::size_t>(*cap);
  }
  if (!study) {
    const auto n = c.integer(model, path, "n", spec.family == ModelSpec::Family::kIid);
    if (n && *n < 1) c.add(path + ".n", "must be positive");
    if (n) spec.n = *n;
  }
  return spec;
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::kConfigInvalid, std::string("<root>: not valid JSON: ") + e.what());
  }
}

StudyConfig check_config(Checker& c, const json& root) {
  StudyConfig cfg;
  if (!root.is_object()) {
    c.add("<root>", "must be an object");
    return cfg;
  }
  if (const json* kind = c.field(root, "", "study", true)) {
    if (*kind == "iid_dichotomy") cfg.kind = StudyKind::kIidDichotomy;
    else if (*kind == "cw_local") cfg.kind = StudyKind::kCwLocal;
    else if (*kind == "cw_interval") cfg.kind = StudyKind::kCwInterval;
    else if (*kind == "continuous_llt") cfg.kind = StudyKind::kContinuousLlt;
    else c.add("study", "must be one of iid_dichotomy, cw_local, cw_interval, continuous_llt");
  }
  if (const json* model = c.field(root, "", "model", true)) {
    cfg.model = check_model(c, *model, "model", true);
    using F = ModelSpec::Family;
    const F want = cfg.kind == StudyKind::kIidDichotomy ? F::kIid
                   : cfg.kind == StudyKind::kContinuousLlt ? F::kIrwinHall
                                                           : F::kCw;
    if (model->is_object() && model->contains("family") && cfg.model.family != want)
      c.add("model.family", "does not match the study kind");
  }

  if (const json* grid = c.field(root, "", "n_grid", true)) {
    bool ok = grid->is_array() && !grid->empty();
    for (std::size_t i = 0; ok && i < grid->size(); ++i) {
      ok = (*grid)[i].is_number_integer() && (*grid)[i].get<std::int64_t>() >= 1;
      if (ok) cfg.n_grid.push_back((*grid)[i].get<std::int64_t>());
    }
    if (!ok) {
      c.add("n_grid", "must be a non-empty array of positive integers");
    } else {
      for (std::size_t i = 1; i < cfg.n_grid.size(); ++i)
        if (cfg.n_grid[i] <= cfg.n_grid[i - 1]) {
          c.add("n_grid", "must be strictly increasing");
          break;
        }
      if (cfg.kind == StudyKind::kContinuousLlt && cfg.n_grid.back() > kIrwinHallMaxN)
        c.add("n_grid", "Irwin-Hall orders must not exceed 48");
    }
  }

  const std::size_t d = study_dim(cfg);
  if (const json* box = c.field(root, "", "box", true)) {
    const auto lower = c.vector(*box, "box", "lower", true);
    const auto upper = c.vector(*box, "box", "upper", true);
    if (lower && upper) {
      if (lower->size() != upper->size()) {
        c.add("box", "lower and upper must have the same length");
      } else if (d > 0 && lower->size() != d) {
        c.add("box", "dimension must match the model (" + std::to_string(d) + ")");
      } else {
        bool ok = true;
        for (std::size_t a = 0; a < lower->size(); ++a)
          ok = ok && std::isfinite((*lower)[a]) && std::isfinite((*upper)[a]) && (*lower)[a] < (*upper)[a];
        if (!ok) c.add("box", "must be finite and non-degenerate");
        else cfg.ab = Box::closed(*lower, *upper);
      }
    }
  }
  if (d > 3 && (cfg.kind == StudyKind::kCwLocal || cfg.kind == StudyKind::kCwInterval))
    c.add("model.fractions", "at most 3 groups are supported");

  const bool needs_rule = cfg.kind == StudyKind::kIidDichotomy || cfg.kind == StudyKind::kCwInterval;
  if (const json* rule = c.field(root, "", "min_length", needs_rule)) {
    MinLengthRule r;
    const json* name = c.field(*rule, "min_length", "rule", true);
    if (name && *name == "c_times_w") {
      r.kind = MinLengthRule::Kind::kCTimesW;
      const auto v = c.number(*rule, "min_length", "c", true);
      if (v && !(*v > 0.0)) c.add("min_length.c", "must be positive");
      r.parameter = v.value_or(0.0);
    } else if (name && *name == "w_times_log") {
      r.kind = MinLengthRule::Kind::kWTimesLog;
    } else if (name && *name == "w_times_sqrt_ratio") {
      r.kind = MinLengthRule::Kind::kWTimesSqrtRatio;
      const auto v = c.number(*rule, "min_length", "exponent", true);
      if (v && !(*v > 0.0)) c.add("min_length.exponent", "must be positive");
      r.parameter = v.value_or(0.0);
    } else if (name) {
      c.add("min_length.rule", "must be one of c_times_w, w_times_log, w_times_sqrt_ratio");
    }
    cfg.min_length = r;
  }

  if (const json* engine = c.field(root, "", "engine", false)) {
    if (const auto k = c.integer(*engine, "engine", "slide_offsets", false)) {
      if (*k < 0 || *k > 1000) c.add("engine.slide_offsets", "must lie in [0, 1000]");
      else cfg.slide_offsets = static_cast<int>(*k);
    }
    if (const auto tol = c.number(*engine, "engine", "tol", false)) {
      if (!(*tol >= 1e-12)) c.add("engine.tol", "must be >= 1e-12");
      else cfg.box_tolerance = *tol;
    }
    if (const auto l = c.integer(*engine, "engine", "counterexample_l", false)) {
      if (*l < 2) c.add("engine.counterexample_l", "must be >= 2");
      else cfg.counterexample_l = static_cast<int>(*l);
    }
    if (const auto margin = c.number(*engine, "engine", "step3_margin_cells", false)) {
      if (!(*margin >= 0.0)) c.add("engine.step3_margin_cells", "must be >= 0");
      else cfg.step3_margin_cells = *margin;
    }
  }
  if (const json* out = c.field(root, "", "output", false)) {
    if (out->is_string()) cfg.output = out->get<std::string>();
    else c.add("output", "must be a string");
  }
  return cfg;
}

[[noreturn]] void raise(const Checker& c) {
  std::string msg;
  for (const ConfigViolation& v : c.violations) {
    if (!msg.empty()) msg += "; ";
    msg += v.path + ": " + v.message;
  }
  fail(c.regime_only ? ErrorCode::kRegimeViolation : ErrorCode::kConfigInvalid, msg);
}

StudyRow compute_row(const StudyConfig& cfg, std::int64_t n, unsigned engine_threads) {
  const auto start = std::chrono::steady_clock::now();
  StudyRow row;
  row.n = n;
  if (cfg.kind == StudyKind::kContinuousLlt) {
    row.sup_ratio = continuous_sup_ratio(ContinuousDensity::irwin_hall_standardized(static_cast<int>(n)),
                                         ContinuousDensity::standard_gaussian_1d(), cfg.ab);
    row.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return row;
  }

  ModelSpec spec = cfg.model;
  if (spec.family == ModelSpec::Family::kCw) spec.cw = spec.cw_at(n);
  spec.n = n;
  spec.standardize = true;
  const LatticePmf pmf = build_model_pmf(spec);
  const ContinuousDensity density = reference_density(spec);
  const std::size_t d = pmf.dim();
  row.w = pmf.grid().step;

  row.pointwise_llt = pointwise_llt_stat(pmf, density).value;
  row.step1 = step1_stat(pmf, density, cfg.ab).value;
  if (cfg.kind == StudyKind::kCwLocal || !cfg.min_length) return row;

  row.m = cfg.min_length->apply(row.w, n);
  const MinLength m{row.m};
  SupOptions options;
  options.slide_offsets = cfg.slide_offsets;
  options.box_tolerance = cfg.box_tolerance;
  options.threads = engine_threads;
  row.sup_ratio = sup_ratio_deviation(pmf, density, cfg.ab, m, options).value;
  row.mu_vs_histogram = mu_vs_histogram_stat(pmf, density, cfg.ab, m, options).value;

  const int l = cfg.counterexample_l.value_or(
      static_cast<int>(std::max<std::int64_t>(2, snapped_ceil(row.m[0] / row.w[0]))));
  try {
    row.counterexample_ratio =
        counterexample_interval(pmf, density, cfg.ab, l, 0, m, cfg.box_tolerance).ratio;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kNotEnoughGridPoints) throw;
  }

  Vec margin(d);
  for (std::size_t a = 0; a < d; ++a) margin[a] = cfg.step3_margin_cells * row.w[a];
  try {
    const DensityBounds bounds = density.density_extremes(enlarge_box(cfg.ab, margin));
    row.step3_bound = theoretical_step3_bound(bounds, m, row.w, d);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kBoundDegenerate) throw;
  }
  row.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return row;
}

std::string cell(const std::optional<double>& v) { return v ? format_double(*v) : "NA"; }

std::string seconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", s);
  return buf;
}

}  // namespace

Vec MinLengthRule::apply(const Vec& w, std::int64_t n) const {
  const double nn = static_cast<double>(n);
  double factor = parameter;
  if (kind == Kind::kWTimesLog) factor = std::log(nn);
  if (kind == Kind::kWTimesSqrtRatio) factor = std::pow(nn, parameter);
  Vec m(w.size());
  for (std::size_t a = 0; a < w.size(); ++a) m[a] = factor * w[a];
  return m;
}

CwModel ModelSpec::cw_at(std::int64_t n_total) const {
  CwModel model = cw;
  if (fractions.empty()) return model;
  model.sizes.assign(fractions.size(), 0);
  std::int64_t used = 0;
  for (std::size_t g = 0; g + 1 < fractions.size(); ++g) {
    model.sizes[g] = std::llround(fractions[g] * static_cast<double>(n_total));
    used += model.sizes[g];
  }
  model.sizes.back() = n_total - used;
  if (model.alpha.empty()) model.alpha = fractions;
  return model;
}

std::size_t study_dim(const StudyConfig& config) {
  switch (config.model.family) {
    case ModelSpec::Family::kIid:
    case ModelSpec::Family::kIrwinHall:
      return 1;
    case ModelSpec::Family::kCw:
      return config.model.fractions.size();
  }
  return 0;
}

std::vector<ConfigViolation> config_violations(const std::string& text) {
  Checker c;
  try {
    check_config(c, json::parse(text));
  } catch (const json::exception& e) {
    c.add("<root>", std::string("not valid JSON: ") + e.what());
  }
  return c.violations;
}

StudyConfig validate_config(const std::string& text) {
  Checker c;
  StudyConfig cfg = check_config(c, parse_json(text));
  if (!c.violations.empty()) raise(c);
  return cfg;
}

ModelSpec parse_model_spec(const std::string& text) {
  Checker c;
  ModelSpec spec = check_model(c, parse_json(text), "", false);
  if (!c.violations.empty()) raise(c);
  return spec;
}

LatticePmf build_model_pmf(const ModelSpec& spec) {
  switch (spec.family) {
    case ModelSpec::Family::kIid: {
      const std::size_t cap = spec.support_cap ? spec.support_cap : kDefaultIidSupportCap;
      return spec.standardize ? standardized_iid_sum(spec.base, spec.n, cap)
                              : iid_sum_pmf(spec.base, spec.n, cap);
    }
    case ModelSpec::Family::kCw:
      return cw_magnetization_pmf(spec.cw, spec.support_cap ? spec.support_cap : kDefaultCwSupportCap);
    case ModelSpec::Family::kIrwinHall:
      break;
  }
  fail(ErrorCode::kInvalidArgument, "Irwin-Hall models have no lattice pmf");
}

ContinuousDensity reference_density(const ModelSpec& spec) {
  if (spec.family == ModelSpec::Family::kCw) return ContinuousDensity::gaussian(cw_covariance(spec.cw));
  return ContinuousDensity::standard_gaussian_1d();
}

std::vector<StudyRow> run_study(const StudyConfig& config, unsigned threads) {
  const std::size_t count = config.n_grid.size();
  std::vector<StudyRow> rows(count);
  std::vector<std::exception_ptr> errors(count);
  threads = std::max(1U, threads);
  const unsigned row_threads = std::min<unsigned>(threads, static_cast<unsigned>(count));
  const unsigned engine_threads = std::max(1U, threads / row_threads);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < count;) {
      const std::int64_t n = config.n_grid[i];
      try {
        rows[i] = compute_row(config, n, engine_threads);
      } catch (const Error& e) {
        errors[i] = std::make_exception_ptr(Error(e.code(), "n=" + std::to_string(n) + ": " + e.what()));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (row_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < row_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return rows;
}

void write_study_csv(const StudyConfig& config, const std::vector<StudyRow>& rows, std::ostream& out) {
  const std::size_t d = study_dim(config);
  out << "n";
  for (std::size_t a = 1; a <= d; ++a) out << ",w_" << a;
  for (std::size_t a = 1; a <= d; ++a) out << ",m_" << a;
  out << ",pointwise_llt,step1,sup_ratio,counterexample_ratio,mu_vs_histogram,step3_bound,wall_time_s\n";
  for (const StudyRow& r : rows) {
    out << r.n;
    for (std::size_t a = 0; a < d; ++a) out << ',' << (a < r.w.size() ? format_double(r.w[a]) : "NA");
    for (std::size_t a = 0; a < d; ++a) out << ',' << (a < r.m.size() ? format_double(r.m[a]) : "NA");
    out << ',' << cell(r.pointwise_llt) << ',' << cell(r.step1) << ',' << cell(r.sup_ratio) << ','
        << cell(r.counterexample_ratio) << ',' << cell(r.mu_vs_histogram) << ','
        << cell(r.step3_bound) << ',' << seconds(r.wall_time_s) << '\n';
  }
}

namespace {

struct LatticeCase {
  LatticePmf pmf;
  ContinuousDensity density;
};

LatticeCase lattice_case(const StudyConfig& config, std::int64_t n) {
  if (config.kind == StudyKind::kContinuousLlt)
    fail(ErrorCode::kConfigInvalid, "study: continuous_llt has no lattice model");
  ModelSpec spec = config.model;
  if (spec.family == ModelSpec::Family::kCw) spec.cw = spec.cw_at(n);
  spec.n = n;
  spec.standardize = true;
  try {
    return {build_model_pmf(spec), reference_density(spec)};
  } catch (const Error& e) {
    throw Error(e.code(), "n=" + std::to_string(n) + ": " + e.what());
  }
}

}  // namespace

void write_pointwise_csv(const StudyConfig& config, std::ostream& out) {
  const std::size_t d = study_dim(config);
  out << "n,statistic_name,value";
  for (std::size_t a = 1; a <= d; ++a) out << ",argmax_" << a;
  out << '\n';
  for (std::int64_t n : config.n_grid) {
    const LatticeCase c = lattice_case(config, n);
    const PointwiseResult r = pointwise_llt_stat(c.pmf, c.density);
    out << n << ",pointwise_llt," << format_double(r.value);
    for (double x : r.argmax) out << ',' << format_double(x);
    out << '\n';
  }
}

void write_sup_csv(const StudyConfig& config, std::ostream& out, unsigned threads) {
  if (!config.min_length) fail(ErrorCode::kConfigInvalid, "min_length: missing");
  const std::size_t d = study_dim(config);
  out << "n";
  for (std::size_t a = 1; a <= d; ++a) out << ",m_" << a;
  out << ",value";
  for (std::size_t a = 1; a <= d; ++a) out << ",witness_lo_" << a;
  for (std::size_t a = 1; a <= d; ++a) out << ",witness_hi_" << a;
  out << ",candidates_evaluated\n";
  SupOptions options;
  options.slide_offsets = config.slide_offsets;
  options.box_tolerance = config.box_tolerance;
  options.threads = std::max(1U, threads);
  for (std::int64_t n : config.n_grid) {
    const LatticeCase c = lattice_case(config, n);
    const MinLength m{config.min_length->apply(c.pmf.grid().step, n)};
    SupResult r;
    try {
      r = sup_ratio_deviation(c.pmf, c.density, config.ab, m, options);
    } catch (const Error& e) {
      throw Error(e.code(), "n=" + std::to_string(n) + ": " + e.what());
    }
    out << n;
    for (double x : m.m) out << ',' << format_double(x);
    out << ',' << format_double(r.value);
    for (std::size_t a = 0; a < d; ++a) out << ',' << (r.witness.dim() ? format_double(r.witness.lower[a]) : "NA");
    for (std::size_t a = 0; a < d; ++a) out << ',' << (r.witness.dim() ? format_double(r.witness.upper[a]) : "NA");
    out << ',' << r.candidate_count << '\n';
  }
}

}  // namespace llt
