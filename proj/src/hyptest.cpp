#include "l0infer/hyptest.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "l0infer/stats.hpp"

namespace l0infer {

void TestConfig::validate() const {
    if (!(gamma > 0.0 && gamma < 1.0)) {
        throw std::invalid_argument("TestConfig: gamma must lie in (0,1)");
    }
    if (k0 < 0 || k1 <= k0) throw std::invalid_argument("TestConfig: need 0 <= k0 < k1");
    if (!(d_const > 0.0)) throw std::invalid_argument("TestConfig: d_const must be positive");
    if (u_gamma_const < 0.0) {
        throw std::invalid_argument("TestConfig: u_gamma_const must be nonnegative");
    }
}

double TestConfig::effective_u_gamma_const() const {
    if (u_gamma_const > 0.0) return u_gamma_const;
    return std::sqrt(2.0) * normal_quantile(1.0 - gamma);
}

double u_gamma_quantile(double gamma, int n, ThresholdMode mode) {
    if (!(gamma > 0.0 && gamma < 1.0)) {
        throw std::invalid_argument("u_gamma_quantile: gamma must lie in (0,1)");
    }
    if (n < 2) throw std::invalid_argument("u_gamma_quantile: n must be at least 2");
    if (mode == ThresholdMode::gaussian_approx) {
        return normal_quantile(1.0 - gamma);
    }
    const double nd = static_cast<double>(n);
    return (chi_sq_quantile_wh(1.0 - gamma, nd) - nd) / std::sqrt(2.0 * nd);
}

TestOutcome residual_min_test(const LinearSample& sample, const TestConfig& cfg) {
    cfg.validate();
    const int n = sample.n();
    const int p = sample.p();
    if (cfg.k0 > p) throw std::invalid_argument("residual_min_test: k0 exceeds p");

    const MinResidual mr = sparse_ls_min_residual(sample.Y, sample.X, cfg.k0, cfg.exec);
    const double nd = static_cast<double>(n);

    // With the support fixed, the residual sweeps [m_S, infinity) continuously,
    // so the infimum of |t_n| over B_0(k0) is 0 whenever m <= n.
    TestOutcome out;
    out.kind = TestKind::residual_chisq;
    out.statistic = std::max(0.0, mr.rss - nd) / std::sqrt(2.0 * nd);
    out.threshold = u_gamma_quantile(cfg.gamma, n, cfg.threshold_mode);
    out.reject = out.statistic >= out.threshold;
    out.mode_used = mr.mode_used;
    return out;
}

TestOutcome estimator_distance_test(const PenalizedFit& fit, const TestConfig& cfg,
                                    int n, int p) {
    cfg.validate();
    if (n < 2 || p < 2) {
        throw std::invalid_argument("estimator_distance_test: need n >= 2 and p >= 2");
    }
    const double dist = distance_to_sparse(fit.theta_hat, cfg.k0);
    TestOutcome out;
    out.kind = TestKind::estimator_distance;
    out.statistic = dist * dist;
    out.threshold = cfg.d_const * std::log(static_cast<double>(p)) *
                    static_cast<double>(cfg.k1) / static_cast<double>(n);
    out.reject = out.statistic >= out.threshold;
    out.mode_used = fit.mode_used;
    return out;
}

namespace {

// Per-coordinate pieces of U_n: with a_ij = Y_i X_ij, S_j = sum_i a_ij and
// Q_j = sum_i a_ij^2, the contribution of coordinate j at value t is
// u_j(t) = [(S_j - n t)^2 - Q_j + 2 t S_j - n t^2] / (n (n-1)),
// a convex quadratic minimized at t*_j = S_j / n.
struct CoordinatePieces {
    Eigen::VectorXd u_zero;  // u_j(0)
    Eigen::VectorXd gap;     // u_j(0) - u_j(t*_j) >= 0
    double u_n_zero = 0.0;   // U_n(0)
};

CoordinatePieces coordinate_pieces(const LinearSample& sample) {
    const int n = sample.n();
    const int p = sample.p();
    const double nd = static_cast<double>(n);
    const double pair_norm = nd * (nd - 1.0);

    CoordinatePieces pieces;
    pieces.u_zero.resize(p);
    pieces.gap.resize(p);
    for (int j = 0; j < p; ++j) {
        double s = 0.0;
        double q = 0.0;
        for (int i = 0; i < n; ++i) {
            const double a = sample.Y(i) * sample.X(i, j);
            s += a;
            q += a * a;
        }
        const double u0 = (s * s - q) / pair_norm;
        const double ustar = (s * s / nd - q) / pair_norm;
        pieces.u_zero(j) = u0;
        pieces.gap(j) = std::max(0.0, u0 - ustar);
        pieces.u_n_zero += u0;
    }
    return pieces;
}

}  // namespace

TestOutcome u_stat_min_test(const LinearSample& sample, const TestConfig& cfg) {
    cfg.validate();
    const int n = sample.n();
    const int p = sample.p();
    if (n < 2) throw std::invalid_argument("u_stat_min_test: n must be at least 2");

    const CoordinatePieces pieces = coordinate_pieces(sample);

    // Each supported coordinate can lower the total by at most its gap, and
    // continuity lets U_n reach anything above the support's minimum, so
    // T_n = max(0, U_n(0) - sum of the k0 largest gaps).
    std::vector<double> gaps(static_cast<std::size_t>(p));
    for (int j = 0; j < p; ++j) gaps[static_cast<std::size_t>(j)] = pieces.gap(j);
    const int k = std::min(cfg.k0, p);
    std::partial_sort(gaps.begin(), gaps.begin() + k, gaps.end(), std::greater<>());
    double removable = 0.0;
    for (int j = 0; j < k; ++j) removable += gaps[static_cast<std::size_t>(j)];

    TestOutcome out;
    out.kind = TestKind::u_statistic;
    out.statistic = std::max(0.0, pieces.u_n_zero - removable);
    out.threshold = cfg.effective_u_gamma_const() * std::sqrt(static_cast<double>(p)) /
                    static_cast<double>(n);
    out.reject = out.statistic >= out.threshold;
    out.mode_used = SolverMode::exact_enumeration;
    return out;
}

double u_stat_naive(const LinearSample& sample, const Eigen::VectorXd& theta_prime) {
    const int n = sample.n();
    const int p = sample.p();
    if (n < 2) throw std::invalid_argument("u_stat_naive: n must be at least 2");
    if (theta_prime.size() != p) {
        throw std::invalid_argument("u_stat_naive: theta_prime dimension mismatch");
    }
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int k = i + 1; k < n; ++k) {
            double term = 0.0;
            for (int j = 0; j < p; ++j) {
                term += (sample.Y(i) * sample.X(i, j) - theta_prime(j)) *
                        (sample.Y(k) * sample.X(k, j) - theta_prime(j));
            }
            total += term;
        }
    }
    const double nd = static_cast<double>(n);
    return 2.0 * total / (nd * (nd - 1.0));
}

}  // namespace l0infer
