#pragma once

#include <cstddef>
#include <vector>

namespace l0infer {

/// Inverse of the standard normal CDF, accurate to ~1e-15
/// (rational approximation plus one Halley refinement on erfc).
double normal_quantile(double prob);

/// Chi-square quantile via the Wilson-Hilferty cube approximation.
/// Adequate for dof >= 30; error in probability is O(1/dof).
double chi_sq_quantile_wh(double prob, double dof);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Wilson score interval for a binomial proportion at normal quantile z.
Interval wilson_interval(double successes, double trials, double z);

/// Nearest-rank quantile of an unsorted sample, q in (0,1].
double nearest_rank_quantile(std::vector<double> values, double q);

}  // namespace l0infer
