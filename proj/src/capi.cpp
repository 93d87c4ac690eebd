#include "llt/llt.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <new>
#include <sstream>
#include <string>

#include "errors.hpp"
#include "interval_sup.hpp"
#include "local_law.hpp"
#include "pmf_io.hpp"
#include "study.hpp"

struct llt_pmf {
  llt::LatticePmf pmf;
};

struct llt_density {
  llt::ContinuousDensity density;
};

namespace {

thread_local std::string last_error;

llt_status record(llt_status status, const char* what) {
  last_error = what;
  return status;
}

template <class Fn>
llt_status guard(Fn&& fn) {
  try {
    fn();
    return LLT_OK;
  } catch (const llt::Error& e) {
    return record(static_cast<llt_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return record(LLT_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return record(LLT_INTERNAL, e.what());
  }
}

void require(const void* p, const char* name) {
  if (!p) llt::fail(llt::ErrorCode::kInvalidArgument, std::string(name) + " must not be NULL");
}

llt::Vec vec(const double* p, std::size_t d) { return llt::Vec(p, p + d); }

llt::Box box_of(const double* lower, const double* upper, std::size_t d) {
  require(lower, "lower");
  require(upper, "upper");
  return llt::Box::closed(vec(lower, d), vec(upper, d));
}

llt::SupOptions sup_options(const llt_sup_options* options) {
  llt::SupOptions out;
  if (options) {
    out.slide_offsets = options->slide_offsets;
    out.box_tolerance = options->box_tolerance;
    out.threads = options->threads;
  }
  return out;
}

void fill(const llt::SupResult& r, llt_sup_result* out) {
  *out = llt_sup_result{};
  out->value = r.value;
  out->ratio_at_witness = r.ratio_at_witness;
  out->candidate_count = r.candidate_count;
  for (std::size_t a = 0; a < r.witness.dim() && a < 3; ++a) {
    out->witness_lower[a] = r.witness.lower[a];
    out->witness_upper[a] = r.witness.upper[a];
    out->witness_lower_inclusive[a] = r.witness.lower_inclusive[a] ? 1 : 0;
    out->witness_upper_inclusive[a] = r.witness.upper_inclusive[a] ? 1 : 0;
  }
}

void check_dims(const llt_pmf* pmf, const llt_density* density) {
  require(pmf, "pmf");
  require(density, "density");
  if (pmf->pmf.dim() != density->density.dim())
    llt::fail(llt::ErrorCode::kInvalidArgument, "pmf and density dimensions differ");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <class Write>
void write_file(const std::string& path, Write&& write) {
  if (path.empty()) llt::fail(llt::ErrorCode::kIo, "no output path given");
  std::ostringstream buffer;
  write(buffer);
  std::ofstream out(path, std::ios::binary);
  if (!out) llt::fail(llt::ErrorCode::kIo, "cannot open " + path);
  out << buffer.str();
  if (!out) llt::fail(llt::ErrorCode::kIo, "cannot write " + path);
}

}  // namespace

extern "C" {

const char* llt_last_error(void) { return last_error.c_str(); }

const char* llt_status_name(llt_status status) {
  if (status == LLT_OK) return "Ok";
  if (status == LLT_INTERNAL) return "Internal";
  if (status < LLT_INVALID_ARGUMENT || status > LLT_IO) return "Unknown";
  return llt::error_code_name(static_cast<llt::ErrorCode>(status));
}

void llt_string_free(char* s) { std::free(s); }

llt_status llt_pmf_create(size_t d, const double* offset, const double* step,
                          const int64_t* index_lo, const size_t* extents, const double* masses,
                          llt_pmf** out) {
  return guard([&] {
    require(offset, "offset");
    require(step, "step");
    require(index_lo, "index_lo");
    require(extents, "extents");
    require(masses, "masses");
    require(out, "out");
    std::size_t total = 1;
    for (std::size_t a = 0; a < d; ++a) total *= extents[a];
    auto pmf = llt::build_pmf({vec(offset, d), vec(step, d)}, llt::IndexVec(index_lo, index_lo + d),
                              std::vector<std::size_t>(extents, extents + d),
                              std::vector<double>(masses, masses + total));
    *out = new llt_pmf{std::move(pmf)};
  });
}

llt_status llt_pmf_from_model_json(const char* model_json, llt_pmf** out) {
  return guard([&] {
    require(model_json, "model_json");
    require(out, "out");
    *out = new llt_pmf{llt::build_model_pmf(llt::parse_model_spec(model_json))};
  });
}

llt_status llt_pmf_read_csv(const char* csv_path, const char* meta_path, llt_pmf** out) {
  return guard([&] {
    require(csv_path, "csv_path");
    require(meta_path, "meta_path");
    require(out, "out");
    *out = new llt_pmf{llt::load_pmf(csv_path, meta_path)};
  });
}

llt_status llt_pmf_write_csv(const llt_pmf* pmf, const char* csv_path, const char* meta_path) {
  return guard([&] {
    require(pmf, "pmf");
    require(csv_path, "csv_path");
    require(meta_path, "meta_path");
    llt::save_pmf(pmf->pmf, csv_path, meta_path);
  });
}

void llt_pmf_free(llt_pmf* pmf) { delete pmf; }

size_t llt_pmf_dim(const llt_pmf* pmf) { return pmf ? pmf->pmf.dim() : 0; }

size_t llt_pmf_size(const llt_pmf* pmf) { return pmf ? pmf->pmf.size() : 0; }

llt_status llt_pmf_step(const llt_pmf* pmf, double* step) {
  return guard([&] {
    require(pmf, "pmf");
    require(step, "step");
    const llt::Vec& w = pmf->pmf.grid().step;
    std::copy(w.begin(), w.end(), step);
  });
}

llt_status llt_pmf_point_mass(const llt_pmf* pmf, const double* x, double* out) {
  return guard([&] {
    require(pmf, "pmf");
    require(x, "x");
    require(out, "out");
    *out = pmf->pmf.point_mass({x, pmf->pmf.dim()});
  });
}

llt_status llt_pmf_box_mass(const llt_pmf* pmf, const double* lower, const double* upper,
                            const int* lower_inclusive, const int* upper_inclusive, double* out) {
  return guard([&] {
    require(pmf, "pmf");
    require(out, "out");
    const std::size_t d = pmf->pmf.dim();
    llt::Box box = box_of(lower, upper, d);
    for (std::size_t a = 0; a < d; ++a) {
      if (lower_inclusive) box.lower_inclusive[a] = lower_inclusive[a] != 0;
      if (upper_inclusive) box.upper_inclusive[a] = upper_inclusive[a] != 0;
    }
    *out = pmf->pmf.box_mass(box);
  });
}

llt_status llt_density_gaussian(size_t d, const double* covariance, llt_density** out) {
  return guard([&] {
    require(covariance, "covariance");
    require(out, "out");
    const auto n = static_cast<Eigen::Index>(d);
    Eigen::MatrixXd c(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) c(i, j) = covariance[i * n + j];
    *out = new llt_density{llt::ContinuousDensity::gaussian(c)};
  });
}

llt_status llt_density_standard_normal(llt_density** out) {
  return guard([&] {
    require(out, "out");
    *out = new llt_density{llt::ContinuousDensity::standard_gaussian_1d()};
  });
}

llt_status llt_density_irwin_hall(int n, llt_density** out) {
  return guard([&] {
    require(out, "out");
    *out = new llt_density{llt::ContinuousDensity::irwin_hall_standardized(n)};
  });
}

llt_status llt_density_from_model_json(const char* model_json, llt_density** out) {
  return guard([&] {
    require(model_json, "model_json");
    require(out, "out");
    *out = new llt_density{llt::reference_density(llt::parse_model_spec(model_json))};
  });
}

void llt_density_free(llt_density* density) { delete density; }

size_t llt_density_dim(const llt_density* density) { return density ? density->density.dim() : 0; }

llt_status llt_density_at(const llt_density* density, const double* x, double* out) {
  return guard([&] {
    require(density, "density");
    require(x, "x");
    require(out, "out");
    *out = density->density.density_at({x, density->density.dim()});
  });
}

llt_status llt_density_box_prob(const llt_density* density, const double* lower,
                                const double* upper, double tol, double* out) {
  return guard([&] {
    require(density, "density");
    require(out, "out");
    *out = density->density.box_prob(box_of(lower, upper, density->density.dim()), tol);
  });
}

llt_status llt_density_extremes(const llt_density* density, const double* lower,
                                const double* upper, double* f_min, double* f_max) {
  return guard([&] {
    require(density, "density");
    const llt::DensityBounds b =
        density->density.density_extremes(box_of(lower, upper, density->density.dim()));
    if (f_min) *f_min = b.f_min;
    if (f_max) *f_max = b.f_max;
  });
}

llt_status llt_pointwise_stat(const llt_pmf* pmf, const llt_density* density,
                              const double* region_lower, const double* region_upper,
                              double* value, double* argmax) {
  return guard([&] {
    check_dims(pmf, density);
    require(value, "value");
    std::optional<llt::Box> region;
    if (region_lower || region_upper) region = box_of(region_lower, region_upper, pmf->pmf.dim());
    const llt::PointwiseResult r = llt::pointwise_llt_stat(pmf->pmf, density->density, region);
    *value = r.value;
    if (argmax) std::copy(r.argmax.begin(), r.argmax.end(), argmax);
  });
}

llt_status llt_step1_stat(const llt_pmf* pmf, const llt_density* density, const double* lower,
                          const double* upper, double* value, double* argmax) {
  return guard([&] {
    check_dims(pmf, density);
    require(value, "value");
    const llt::Step1Result r =
        llt::step1_stat(pmf->pmf, density->density, box_of(lower, upper, pmf->pmf.dim()));
    *value = r.value;
    if (argmax) std::copy(r.argmax.begin(), r.argmax.end(), argmax);
  });
}

llt_sup_options llt_sup_options_default(void) {
  const llt::SupOptions d;
  return {d.slide_offsets, d.box_tolerance, d.threads};
}

llt_status llt_sup_ratio(const llt_pmf* pmf, const llt_density* density, const double* ab_lower,
                         const double* ab_upper, const double* m, const llt_sup_options* options,
                         llt_sup_result* out, char** warnings) {
  return guard([&] {
    check_dims(pmf, density);
    require(m, "m");
    require(out, "out");
    const std::size_t d = pmf->pmf.dim();
    if (d > 3) llt::fail(llt::ErrorCode::kDimensionUnsupported, "d > 3");
    const llt::SupResult r = llt::sup_ratio_deviation(pmf->pmf, density->density,
                                                      box_of(ab_lower, ab_upper, d),
                                                      llt::MinLength{vec(m, d)}, sup_options(options));
    fill(r, out);
    if (warnings) {
      std::string joined;
      for (const std::string& w : r.warnings) joined += (joined.empty() ? "" : "\n") + w;
      *warnings = joined.empty() ? nullptr : dup_string(joined);
    }
  });
}

llt_status llt_mu_vs_histogram(const llt_pmf* pmf, const llt_density* density,
                               const double* ab_lower, const double* ab_upper, const double* m,
                               const llt_sup_options* options, llt_sup_result* out) {
  return guard([&] {
    check_dims(pmf, density);
    require(m, "m");
    require(out, "out");
    const std::size_t d = pmf->pmf.dim();
    if (d > 3) llt::fail(llt::ErrorCode::kDimensionUnsupported, "d > 3");
    fill(llt::mu_vs_histogram_stat(pmf->pmf, density->density, box_of(ab_lower, ab_upper, d),
                                   llt::MinLength{vec(m, d)}, sup_options(options)),
         out);
  });
}

llt_status llt_counterexample(const llt_pmf* pmf, const llt_density* density,
                              const double* ab_lower, const double* ab_upper, int l,
                              size_t dim_star, const double* m, double* ratio, double* lower,
                              double* upper) {
  return guard([&] {
    check_dims(pmf, density);
    require(ratio, "ratio");
    const std::size_t d = pmf->pmf.dim();
    std::optional<llt::MinLength> min_length;
    if (m) min_length = llt::MinLength{vec(m, d)};
    const llt::Counterexample c = llt::counterexample_interval(
        pmf->pmf, density->density, box_of(ab_lower, ab_upper, d), l, dim_star, min_length);
    *ratio = c.ratio;
    if (lower) std::copy(c.interval.lower.begin(), c.interval.lower.end(), lower);
    if (upper) std::copy(c.interval.upper.begin(), c.interval.upper.end(), upper);
  });
}

llt_status llt_step3_bound(double f_min, double f_max, size_t d, const double* m, const double* w,
                           double* out) {
  return guard([&] {
    require(m, "m");
    require(w, "w");
    require(out, "out");
    llt::DensityBounds bounds;
    bounds.f_min = f_min;
    bounds.f_max = f_max;
    *out = llt::theoretical_step3_bound(bounds, llt::MinLength{vec(m, d)}, vec(w, d), d);
  });
}

llt_status llt_continuous_sup_ratio(const llt_density* density_n, const llt_density* density_limit,
                                    const double* ab_lower, const double* ab_upper, double* out) {
  return guard([&] {
    require(density_n, "density_n");
    require(density_limit, "density_limit");
    require(out, "out");
    *out = llt::continuous_sup_ratio(density_n->density, density_limit->density,
                                     box_of(ab_lower, ab_upper, density_limit->density.dim()));
  });
}

llt_status llt_study_validate(const char* config_json) {
  return guard([&] {
    require(config_json, "config_json");
    llt::validate_config(config_json);
  });
}

llt_status llt_study_run(const char* config_json, const char* out_path, unsigned threads) {
  return guard([&] {
    require(config_json, "config_json");
    const llt::StudyConfig config = llt::validate_config(config_json);
    const auto rows = llt::run_study(config, threads);
    write_file(out_path ? out_path : config.output,
               [&](std::ostream& os) { llt::write_study_csv(config, rows, os); });
  });
}

llt_status llt_study_pointwise(const char* config_json, const char* out_path) {
  return guard([&] {
    require(config_json, "config_json");
    const llt::StudyConfig config = llt::validate_config(config_json);
    write_file(out_path ? out_path : config.output,
               [&](std::ostream& os) { llt::write_pointwise_csv(config, os); });
  });
}

llt_status llt_study_sup(const char* config_json, const char* out_path, unsigned threads) {
  return guard([&] {
    require(config_json, "config_json");
    const llt::StudyConfig config = llt::validate_config(config_json);
    write_file(out_path ? out_path : config.output,
               [&](std::ostream& os) { llt::write_sup_csv(config, os, threads); });
  });
}

}  // extern "C"
