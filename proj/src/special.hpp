#pragma once

#include <functional>

namespace llt {

inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;

double normal_pdf(double x);
double normal_cdf(double x);
// P(a <= Z <= b) for Z ~ N(0,1), evaluated on the tail that avoids cancellation.
double normal_interval(double a, double b);

// Density and distribution function of (U_1 + ... + U_n - n/2) / sqrt(n/12).
double irwin_hall_std_pdf(int n, double x);
double irwin_hall_std_cdf(int n, double x);
double irwin_hall_std_half_width(int n);  // support is [-h, h]
inline constexpr int kIrwinHallMaxN = 48;

// Adaptive Gauss-Legendre: a panel is accepted when the 20-point rule and the
// sum over its two halves agree to the panel's share of tol. Throws
// ToleranceUnreachable when the recursion depth runs out.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b, double tol,
                          int max_depth = 40);

}  // namespace llt
