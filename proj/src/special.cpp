#include "special.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "errors.hpp"

namespace llt {
namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

struct GaussLegendre {
  static constexpr int kOrder = 20;
  std::array<double, kOrder> nodes{};
  std::array<double, kOrder> weights{};

  GaussLegendre() {
    // Newton iteration on P_n from the Chebyshev initial guess.
    constexpr int n = kOrder;
    for (int i = 0; i < (n + 1) / 2; ++i) {
      long double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
      long double pp = 0.0L;
      for (int iter = 0; iter < 100; ++iter) {
        long double p1 = 1.0L, p2 = 0.0L;
        for (int j = 1; j <= n; ++j) {
          const long double p3 = p2;
          p2 = p1;
          p1 = ((2.0L * j - 1.0L) * z * p2 - (j - 1.0L) * p3) / j;
        }
        pp = n * (z * p1 - p2) / (z * z - 1.0L);
        const long double dz = p1 / pp;
        z -= dz;
        if (std::fabs(static_cast<double>(dz)) < 1e-19) break;
      }
      const long double w = 2.0L / ((1.0L - z * z) * pp * pp);
      nodes[static_cast<std::size_t>(i)] = static_cast<double>(-z);
      nodes[static_cast<std::size_t>(n - 1 - i)] = static_cast<double>(z);
      weights[static_cast<std::size_t>(i)] = static_cast<double>(w);
      weights[static_cast<std::size_t>(n - 1 - i)] = static_cast<double>(w);
    }
  }

  double apply(const std::function<double(double)>& f, double a, double b) const {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double s = 0.0;
    for (int i = 0; i < kOrder; ++i)
      s += weights[static_cast<std::size_t>(i)] * f(mid + half * nodes[static_cast<std::size_t>(i)]);
    return s * half;
  }
};

const GaussLegendre& gauss_legendre() {
  static const GaussLegendre rule;
  return rule;
}

double refine(const std::function<double(double)>& f, double a, double b, double whole,
              double tol, int depth) {
  const GaussLegendre& rule = gauss_legendre();
  const double mid = 0.5 * (a + b);
  const double left = rule.apply(f, a, mid);
  const double right = rule.apply(f, mid, b);
  const double halves = left + right;
  const double diff = std::fabs(halves - whole);
  // Second clause: the two levels agree to rounding, further splitting cannot help.
  if (diff <= tol || diff <= 1e-15 * std::max(1.0, std::fabs(halves))) return halves;
  if (depth <= 0) fail(ErrorCode::kToleranceUnreachable, "adaptive quadrature did not converge");
  return refine(f, a, mid, left, 0.5 * tol, depth - 1) +
         refine(f, mid, b, right, 0.5 * tol, depth - 1);
}

// Exact binomial coefficients as long double (n <= kIrwinHallMaxN).
long double binom(int n, int k) {
  long double r = 1.0L;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

long double factorial(int n) {
  long double r = 1.0L;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

// Irwin-Hall density of the raw sum at s in [0, n/2] (symmetry handles the rest).
long double raw_pdf_lower_half(int n, long double s) {
  if (n == 1) return 1.0L;
  long double acc = 0.0L;
  const int top = static_cast<int>(std::floor(static_cast<double>(s)));
  for (int k = 0; k <= top && k <= n; ++k) {
    const long double term = binom(n, k) * std::pow(s - k, static_cast<long double>(n - 1));
    acc += (k % 2 == 0) ? term : -term;
  }
  return acc / factorial(n - 1);
}

long double raw_cdf_lower_half(int n, long double s) {
  long double acc = 0.0L;
  const int top = static_cast<int>(std::floor(static_cast<double>(s)));
  for (int k = 0; k <= top && k <= n; ++k) {
    const long double term = binom(n, k) * std::pow(s - k, static_cast<long double>(n));
    acc += (k % 2 == 0) ? term : -term;
  }
  return acc / factorial(n);
}

void check_irwin_hall_n(int n) {
  if (n < 1 || n > kIrwinHallMaxN)
    fail(ErrorCode::kInvalidArgument, "Irwin-Hall order must lie in [1, 48]");
}

}  // namespace

double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

double normal_interval(double a, double b) {
  if (!(b > a)) return 0.0;
  if (a >= 0.0) return 0.5 * (std::erfc(a * kInvSqrt2) - std::erfc(b * kInvSqrt2));
  if (b <= 0.0) return 0.5 * (std::erfc(-b * kInvSqrt2) - std::erfc(-a * kInvSqrt2));
  return 1.0 - 0.5 * std::erfc(b * kInvSqrt2) - 0.5 * std::erfc(-a * kInvSqrt2);
}

double irwin_hall_std_half_width(int n) {
  check_irwin_hall_n(n);
  return std::sqrt(3.0 * n);
}

double irwin_hall_std_pdf(int n, double x) {
  check_irwin_hall_n(n);
  const long double scale = std::sqrt(static_cast<long double>(n) / 12.0L);
  const long double s = static_cast<long double>(n) / 2.0L + static_cast<long double>(x) * scale;
  if (s < 0.0L || s > n) return 0.0;
  const long double folded = std::min(s, static_cast<long double>(n) - s);
  const long double raw = raw_pdf_lower_half(n, folded);
  return static_cast<double>(std::max(0.0L, raw) * scale);
}

double irwin_hall_std_cdf(int n, double x) {
  check_irwin_hall_n(n);
  const long double scale = std::sqrt(static_cast<long double>(n) / 12.0L);
  const long double s = static_cast<long double>(n) / 2.0L + static_cast<long double>(x) * scale;
  if (s <= 0.0L) return 0.0;
  if (s >= n) return 1.0;
  if (s <= static_cast<long double>(n) / 2.0L)
    return static_cast<double>(std::clamp(raw_cdf_lower_half(n, s), 0.0L, 1.0L));
  return static_cast<double>(std::clamp(1.0L - raw_cdf_lower_half(n, n - s), 0.0L, 1.0L));
}

double integrate_adaptive(const std::function<double(double)>& f, double a, double b, double tol,
                          int max_depth) {
  if (!(b > a)) return 0.0;
  const double whole = gauss_legendre().apply(f, a, b);
  return refine(f, a, b, whole, tol, max_depth);
}

}  // namespace llt
