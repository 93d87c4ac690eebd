#include "models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "errors.hpp"

namespace llt {
namespace {

// Direct-summation convolution with renormalization of the accumulated drift.
std::vector<double> convolve(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<long double> acc(a.size() + b.size() - 1, 0.0L);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const long double ai = a[i];
    if (ai == 0.0L) continue;
    for (std::size_t j = 0; j < b.size(); ++j) acc[i + j] += ai * b[j];
  }
  long double total = 0.0L;
  for (long double v : acc) total += v;
  std::vector<double> out(acc.size());
  for (std::size_t i = 0; i < acc.size(); ++i) out[i] = static_cast<double>(acc[i] / total);
  return out;
}

double log_binomial(std::int64_t n, std::int64_t k) {
  return std::lgamma(static_cast<double>(n) + 1.0) - std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(n - k) + 1.0);
}

bool positive_definite(const Eigen::MatrixXd& m) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  return llt.info() == Eigen::Success;
}

}  // namespace

BaseLattice1D BaseLattice1D::fair_coin() { return {1.0, 2.0, -1, {0.5, 0.5}}; }

BaseLattice1D BaseLattice1D::bernoulli(double p) { return {0.0, 1.0, 0, {1.0 - p, p}}; }

void BaseLattice1D::validate() const {
  if (!(span > 0.0) || !std::isfinite(span)) fail(ErrorCode::kInvalidArgument, "span must be positive");
  if (!std::isfinite(offset)) fail(ErrorCode::kInvalidArgument, "offset must be finite");
  if (masses.empty()) fail(ErrorCode::kEmptySupport, "base law has no masses");
  double total = 0.0;
  for (double m : masses) {
    if (!(m >= 0.0) || !std::isfinite(m)) fail(ErrorCode::kNegativeMass, "base masses must be >= 0");
    total += m;
  }
  if (std::fabs(total - 1.0) > 1e-12) fail(ErrorCode::kNotNormalized, "base masses must sum to 1");
}

Moments moments(const BaseLattice1D& base) {
  base.validate();
  long double mean = 0.0L;
  for (std::size_t i = 0; i < base.masses.size(); ++i) {
    const long double x = base.offset + base.span * static_cast<long double>(base.index_lo + static_cast<std::int64_t>(i));
    mean += base.masses[i] * x;
  }
  long double var = 0.0L;
  int support = 0;
  for (std::size_t i = 0; i < base.masses.size(); ++i) {
    if (base.masses[i] > 0.0) ++support;
    const long double x = base.offset + base.span * static_cast<long double>(base.index_lo + static_cast<std::int64_t>(i));
    var += base.masses[i] * (x - mean) * (x - mean);
  }
  if (support < 2 || !(var > 0.0L)) fail(ErrorCode::kZeroVariance, "base law is degenerate");
  return {static_cast<double>(mean), static_cast<double>(var)};
}

LatticePmf iid_sum_pmf(const BaseLattice1D& base, std::int64_t n, std::size_t support_cap) {
  base.validate();
  if (n < 1) fail(ErrorCode::kInvalidArgument, "n must be >= 1");

  // Trim exact zeros at both ends so the support hull is tight.
  std::size_t first = 0;
  std::size_t last = base.masses.size();
  while (first < last && base.masses[first] == 0.0) ++first;
  while (last > first && base.masses[last - 1] == 0.0) --last;
  if (first == last) fail(ErrorCode::kEmptySupport, "base law has no positive mass");
  std::vector<double> unit(base.masses.begin() + static_cast<std::ptrdiff_t>(first),
                           base.masses.begin() + static_cast<std::ptrdiff_t>(last));
  const std::int64_t unit_lo = base.index_lo + static_cast<std::int64_t>(first);

  const auto width = static_cast<long double>(unit.size() - 1);
  if (width * static_cast<long double>(n) + 1.0L > static_cast<long double>(support_cap)) {
    std::ostringstream os;
    os << "sum of " << n << " copies needs more than " << support_cap << " points";
    fail(ErrorCode::kSupportOverflow, os.str());
  }

  std::vector<double> result{1.0};
  std::vector<double> power = unit;
  for (std::int64_t e = n;;) {
    if (e & 1) result = convolve(result, power);
    e >>= 1;
    if (e == 0) break;
    power = convolve(power, power);
  }

  GridSpec grid{{static_cast<double>(n) * base.offset}, {base.span}};
  const std::size_t extent = result.size();
  return LatticePmf::build(std::move(grid), {unit_lo * n}, {extent}, std::move(result));
}

LatticePmf standardized_iid_sum(const BaseLattice1D& base, std::int64_t n, std::size_t support_cap) {
  const Moments mom = moments(base);
  const LatticePmf sum = iid_sum_pmf(base, n, support_cap);
  const double sigma_root_n = std::sqrt(mom.variance) * std::sqrt(static_cast<double>(n));
  const double scale = 1.0 / sigma_root_n;

  // Anchor the grid at the transformed lowest support point with index 0.
  const long double lowest = static_cast<long double>(base.offset) * n +
                             static_cast<long double>(base.span) * sum.index_lo()[0];
  const long double centered = lowest - static_cast<long double>(mom.mean) * n;
  GridSpec grid{{static_cast<double>(centered / sigma_root_n)}, {base.span * scale}};
  std::vector<double> masses(sum.masses().begin(), sum.masses().end());
  return LatticePmf::adopt(std::move(grid), {0}, sum.extents(), std::move(masses));
}

std::int64_t CwModel::total() const {
  std::int64_t n = 0;
  for (auto s : sizes) n += s;
  return n;
}

Eigen::MatrixXd CwModel::coupling_matrix() const {
  const auto d = static_cast<Eigen::Index>(dim());
  if (coupling) return *coupling;
  return Eigen::MatrixXd::Constant(d, d, beta.value_or(0.0));
}

std::vector<double> CwModel::fractions() const {
  if (!alpha.empty()) return alpha;
  std::vector<double> out(dim());
  const double n = static_cast<double>(total());
  for (std::size_t i = 0; i < dim(); ++i) out[i] = static_cast<double>(sizes[i]) / n;
  return out;
}

void CwModel::validate() const {
  if (sizes.empty()) fail(ErrorCode::kInvalidArgument, "Curie-Weiss model needs at least one group");
  for (auto s : sizes)
    if (s < 1) fail(ErrorCode::kInvalidArgument, "group sizes must be positive");
  if (beta.has_value() == coupling.has_value())
    fail(ErrorCode::kInvalidArgument, "exactly one of beta and J must be given");
  if (beta && (!(*beta >= 0.0) || !std::isfinite(*beta)))
    fail(ErrorCode::kInvalidArgument, "beta must be finite and >= 0");
  if (coupling) {
    const auto d = static_cast<Eigen::Index>(dim());
    if (coupling->rows() != d || coupling->cols() != d)
      fail(ErrorCode::kInvalidArgument, "J must be d x d");
    if (!coupling->allFinite()) fail(ErrorCode::kInvalidArgument, "J must be finite");
    if ((*coupling - coupling->transpose()).cwiseAbs().maxCoeff() > 1e-12)
      fail(ErrorCode::kInvalidArgument, "J must be symmetric");
  }
  if (!alpha.empty()) {
    if (alpha.size() != dim()) fail(ErrorCode::kInvalidArgument, "alpha must have d entries");
    double s = 0.0;
    for (double a : alpha) {
      if (!(a >= 0.0 && a <= 1.0)) fail(ErrorCode::kInvalidArgument, "alpha entries must lie in [0,1]");
      s += a;
    }
    if (std::fabs(s - 1.0) > 1e-12) fail(ErrorCode::kInvalidArgument, "alpha must sum to 1");
  }
}

void CwModel::check_high_temperature() const {
  if (beta) {
    if (!(*beta < 1.0)) {
      std::ostringstream os;
      os << "homogeneous coupling beta=" << *beta << " is outside [0,1)";
      fail(ErrorCode::kRegimeViolation, os.str());
    }
    return;
  }
  const Eigen::MatrixXd& j = *coupling;
  if (!positive_definite(j)) fail(ErrorCode::kRegimeViolation, "J is not positive definite");
  const auto frac = fractions();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(j.rows(), j.cols());
  for (Eigen::Index i = 0; i < j.rows(); ++i) a(i, i) = frac[static_cast<std::size_t>(i)];
  if (!positive_definite(j.inverse() - a))
    fail(ErrorCode::kRegimeViolation, "J^-1 - A is not positive definite");
}

LatticePmf cw_magnetization_pmf(const CwModel& model, std::size_t support_cap) {
  model.validate();
  if (model.check_regime) model.check_high_temperature();
  const std::size_t d = model.dim();

  long double cells = 1.0L;
  for (auto s : model.sizes) cells *= static_cast<long double>(s + 1);
  if (cells > static_cast<long double>(support_cap))
    fail(ErrorCode::kSupportOverflow, "magnetization table exceeds the support cap");

  const Eigen::MatrixXd j = model.coupling_matrix();
  const double inv_2n = 1.0 / (2.0 * static_cast<double>(model.total()));

  std::vector<std::size_t> extents(d);
  std::vector<std::vector<double>> log_binom(d);
  for (std::size_t a = 0; a < d; ++a) {
    extents[a] = static_cast<std::size_t>(model.sizes[a] + 1);
    log_binom[a].resize(extents[a]);
    for (std::int64_t k = 0; k <= model.sizes[a]; ++k)
      log_binom[a][static_cast<std::size_t>(k)] = log_binomial(model.sizes[a], k);
  }
  const auto total = static_cast<std::size_t>(cells);

  std::vector<double> logw(total);
  std::vector<std::int64_t> k(d, 0);
  std::vector<double> m(d);
  double max_log = -std::numeric_limits<double>::infinity();
  for (std::size_t lin = 0; lin < total; ++lin) {
    double lw = 0.0;
    for (std::size_t a = 0; a < d; ++a) {
      lw += log_binom[a][static_cast<std::size_t>(k[a])];
      m[a] = static_cast<double>(2 * k[a] - model.sizes[a]);
    }
    double energy = 0.0;
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b)
        energy += j(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) * m[a] * m[b];
    lw += inv_2n * energy;
    logw[lin] = lw;
    max_log = std::max(max_log, lw);
    // Row-major increment, last axis fastest.
    for (std::size_t a = d; a-- > 0;) {
      if (++k[a] <= model.sizes[a]) break;
      k[a] = 0;
    }
  }

  std::vector<double> masses(total);
  long double z = 0.0L;
  for (std::size_t lin = 0; lin < total; ++lin) {
    masses[lin] = std::exp(logw[lin] - max_log);
    z += masses[lin];
  }
  for (double& v : masses) v = static_cast<double>(v / z);

  GridSpec grid;
  grid.offset.resize(d);
  grid.step.resize(d);
  for (std::size_t a = 0; a < d; ++a) {
    const double root = std::sqrt(static_cast<double>(model.sizes[a]));
    grid.offset[a] = -static_cast<double>(model.sizes[a]) / root;
    grid.step[a] = 2.0 / root;
  }
  return LatticePmf::build(std::move(grid), IndexVec(d, 0), std::move(extents), std::move(masses));
}

Eigen::MatrixXd cw_covariance(const CwModel& model) {
  model.validate();
  model.check_high_temperature();
  const auto d = static_cast<Eigen::Index>(model.dim());
  const auto frac = model.fractions();
  Eigen::VectorXd root_alpha(d);
  for (Eigen::Index i = 0; i < d; ++i) root_alpha(i) = std::sqrt(frac[static_cast<std::size_t>(i)]);

  Eigen::MatrixXd inner;
  if (model.beta) {
    inner = Eigen::MatrixXd::Constant(d, d, *model.beta / (1.0 - *model.beta));
  } else {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(d, d);
    for (Eigen::Index i = 0; i < d; ++i) a(i, i) = frac[static_cast<std::size_t>(i)];
    Eigen::FullPivLU<Eigen::MatrixXd> lu_j(*model.coupling);
    if (!lu_j.isInvertible()) fail(ErrorCode::kSingularMatrix, "J is singular");
    const Eigen::MatrixXd gap = lu_j.inverse() - a;
    Eigen::FullPivLU<Eigen::MatrixXd> lu_gap(gap);
    if (!lu_gap.isInvertible()) fail(ErrorCode::kSingularMatrix, "J^-1 - A is singular");
    inner = lu_gap.inverse();
  }
  Eigen::MatrixXd c = Eigen::MatrixXd::Identity(d, d) +
                      root_alpha.asDiagonal() * inner * root_alpha.asDiagonal();
  // Exact symmetry for downstream Cholesky.
  return 0.5 * (c + c.transpose());
}

}  // namespace llt
