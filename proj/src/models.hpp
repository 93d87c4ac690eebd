#pragma once

// Exact lattice models: standardized i.i.d. lattice sums and the multi-group
// Curie-Weiss magnetization vector.

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "lattice.hpp"

namespace llt {

// Law of one summand on offset + span * Z, masses over [index_lo, index_lo + size).
struct BaseLattice1D {
  double offset = 0.0;
  double span = 1.0;
  std::int64_t index_lo = 0;
  std::vector<double> masses;

  static BaseLattice1D fair_coin();  // uniform on {-1, +1}
  static BaseLattice1D bernoulli(double p);  // on {0, 1}
  void validate() const;
};

struct Moments {
  double mean;
  double variance;
};

Moments moments(const BaseLattice1D& base);

inline constexpr std::size_t kDefaultIidSupportCap = 10'000'000;
inline constexpr std::size_t kDefaultCwSupportCap = 100'000'000;

// Law of X_1 + ... + X_n on n*offset + span*Z, by repeated squaring of the
// direct convolution.
LatticePmf iid_sum_pmf(const BaseLattice1D& base, std::int64_t n,
                       std::size_t support_cap = kDefaultIidSupportCap);
// Law of (1/(sigma sqrt n)) sum (X_i - mu); the grid offset is the transformed
// lowest support point.
LatticePmf standardized_iid_sum(const BaseLattice1D& base, std::int64_t n,
                                std::size_t support_cap = kDefaultIidSupportCap);

struct CwModel {
  std::vector<std::int64_t> sizes;
  // Exactly one of beta (homogeneous) and coupling (heterogeneous) is set.
  std::optional<double> beta;
  std::optional<Eigen::MatrixXd> coupling;
  // Asymptotic group fractions; defaults to sizes / n when empty.
  std::vector<double> alpha;
  bool check_regime = true;

  std::size_t dim() const { return sizes.size(); }
  std::int64_t total() const;
  Eigen::MatrixXd coupling_matrix() const;
  std::vector<double> fractions() const;
  // Structural checks; throws ConfigInvalid-style InvalidArgument.
  void validate() const;
  // Throws RegimeViolation outside the high-temperature regime.
  void check_high_temperature() const;
};

// Law of S_n* = (sum_i X_{1i} / sqrt(n_1), ..., sum_i X_{di} / sqrt(n_d)).
LatticePmf cw_magnetization_pmf(const CwModel& model,
                                std::size_t support_cap = kDefaultCwSupportCap);

// Limit covariance of S_n* in the high-temperature regime.
Eigen::MatrixXd cw_covariance(const CwModel& model);

}  // namespace llt
