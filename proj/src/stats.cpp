#include "l0infer/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace l0infer {

namespace {

// Acklam's rational approximation for the inverse normal CDF.
double normal_quantile_approx(double p) {
    static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                -2.759285104469687e+02, 1.383577518672690e+02,
                                -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                -1.556989798598866e+02, 6.680131188771972e+01,
                                -1.328068155288572e+01};
    static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                -2.400758277161838e+00, -2.549732539343734e+00,
                                4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                2.445134137142996e+00, 3.754408661907416e+00};
    const double p_low = 0.02425;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
               (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    }
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
}

}  // namespace

double normal_quantile(double prob) {
    if (!(prob > 0.0 && prob < 1.0)) {
        throw std::invalid_argument("normal_quantile: probability must lie in (0,1)");
    }
    double x = normal_quantile_approx(prob);
    // Halley refinement against the exact CDF Phi(x) = erfc(-x/sqrt(2))/2.
    for (int pass = 0; pass < 2; ++pass) {
        const double err = 0.5 * std::erfc(-x * 0.7071067811865475244) - prob;
        const double u = err * 2.5066282746310005024 * std::exp(0.5 * x * x);
        x -= u / (1.0 + 0.5 * x * u);
    }
    return x;
}

double chi_sq_quantile_wh(double prob, double dof) {
    if (!(prob > 0.0 && prob < 1.0)) {
        throw std::invalid_argument("chi_sq_quantile_wh: probability must lie in (0,1)");
    }
    if (!(dof > 0.0)) {
        throw std::invalid_argument("chi_sq_quantile_wh: dof must be positive");
    }
    const double z = normal_quantile(prob);
    const double h = 2.0 / (9.0 * dof);
    const double cube = 1.0 - h + z * std::sqrt(h);
    return std::max(0.0, dof * cube * cube * cube);
}

Interval wilson_interval(double successes, double trials, double z) {
    if (trials <= 0.0) throw std::invalid_argument("wilson_interval: trials must be positive");
    const double phat = successes / trials;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / trials;
    const double center = (phat + z2 / (2.0 * trials)) / denom;
    const double half =
        z * std::sqrt(phat * (1.0 - phat) / trials + z2 / (4.0 * trials * trials)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

double nearest_rank_quantile(std::vector<double> values, double q) {
    if (values.empty()) throw std::invalid_argument("nearest_rank_quantile: empty sample");
    if (!(q > 0.0 && q <= 1.0)) {
        throw std::invalid_argument("nearest_rank_quantile: q must lie in (0,1]");
    }
    std::sort(values.begin(), values.end());
    const auto n = static_cast<std::ptrdiff_t>(values.size());
    std::ptrdiff_t rank = static_cast<std::ptrdiff_t>(std::ceil(q * static_cast<double>(n)));
    rank = std::clamp<std::ptrdiff_t>(rank, 1, n);
    return values[static_cast<std::size_t>(rank - 1)];
}

}  // namespace l0infer
