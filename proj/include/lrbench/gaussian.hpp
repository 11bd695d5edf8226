#pragma once

// Log-domain Gaussian densities shared by the closed-form LR engine.

#include <cmath>
#include <utility>

namespace lrbench::gauss {

inline constexpr double kLogTwoPi = 1.8378770664093454836;  // log(2*pi)

inline double log_pdf(double x, double mean, double var) {
    const double d = x - mean;
    return -0.5 * (kLogTwoPi + std::log(var) + d * d / var);
}

inline double log_add_exp(double a, double b) {
    if (a < b) std::swap(a, b);
    if (b == -INFINITY) return a;
    return a + std::log1p(std::exp(b - a));
}

// Density of |D| at d >= 0 where D ~ N(mean, var).
inline double log_folded_pdf(double d, double mean, double var) {
    return log_add_exp(log_pdf(d, mean, var), log_pdf(-d, mean, var));
}

// Bivariate normal with means (m1, m2), variances (v1, v2), covariance c.
inline double log_pdf2(double x1, double x2, double m1, double m2, double v1,
                       double v2, double c) {
    const double det = v1 * v2 - c * c;
    const double d1 = x1 - m1;
    const double d2 = x2 - m2;
    const double q = (v2 * d1 * d1 - 2.0 * c * d1 * d2 + v1 * d2 * d2) / det;
    return -0.5 * (2.0 * kLogTwoPi + std::log(det) + q);
}

}  // namespace lrbench::gauss
