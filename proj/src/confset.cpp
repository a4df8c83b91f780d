#include "l0infer/confset.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "l0infer/rng.hpp"
#include "l0infer/stats.hpp"

namespace l0infer {

void CsConfig::validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("CsConfig: alpha must lie in (0,1)");
    }
    if (!(split_fraction > 0.0 && split_fraction < 1.0)) {
        throw std::invalid_argument("CsConfig: split_fraction must lie in (0,1)");
    }
    if (!(lambda_min_sq > 0.0)) {
        throw std::invalid_argument("CsConfig: lambda_min_sq must be positive");
    }
    if (!(l_prime > 0.0)) throw std::invalid_argument("CsConfig: l_prime must be positive");
}

BallConfidenceSet sample_split_cs(const LinearSample& sample, const CsConfig& cfg,
                                  const SolverConfig& solver) {
    cfg.validate();
    const int n = sample.n();
    const int p = sample.p();
    if (n < 4) throw std::invalid_argument("sample_split_cs: need n >= 4");

    const int n1 = static_cast<int>(std::ceil(cfg.split_fraction * static_cast<double>(n)));
    const int n2 = n - n1;
    if (n1 < 2 || n2 < 2) {
        throw std::invalid_argument("sample_split_cs: degenerate split");
    }

    std::vector<int> rows(static_cast<std::size_t>(n));
    std::iota(rows.begin(), rows.end(), 0);
    if (cfg.random_split) {
        Rng rng(mix_seed(cfg.split_seed, 0x53504C4954ULL));  // split-stream tag
        for (int i = n - 1; i > 0; --i) {
            const auto j = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(i + 1)));
            std::swap(rows[static_cast<std::size_t>(i)], rows[static_cast<std::size_t>(j)]);
        }
    }

    Eigen::MatrixXd x1(n1, p), x2(n2, p);
    Eigen::VectorXd y1(n1), y2(n2);
    for (int i = 0; i < n1; ++i) {
        x1.row(i) = sample.X.row(rows[static_cast<std::size_t>(i)]);
        y1(i) = sample.Y(rows[static_cast<std::size_t>(i)]);
    }
    for (int i = 0; i < n2; ++i) {
        x2.row(i) = sample.X.row(rows[static_cast<std::size_t>(n1 + i)]);
        y2(i) = sample.Y(rows[static_cast<std::size_t>(n1 + i)]);
    }

    const PenalizedFit fit = l0_pls(x1, y1, solver);

    const double n2d = static_cast<double>(n2);
    const double risk_hat = (y2 - x2 * fit.theta_hat).squaredNorm() / n2d - 1.0;
    const double u_alpha = (n2d - chi_sq_quantile_wh(cfg.alpha, n2d)) / std::sqrt(n2d);

    BallConfidenceSet cs;
    cs.center = fit.theta_hat;
    cs.radius_sq =
        std::max(0.0, 2.0 / cfg.lambda_min_sq * (risk_hat + u_alpha / std::sqrt(n2d)));
    cs.level = 1.0 - cfg.alpha;
    cs.construction = CsConstruction::sample_split;
    return cs;
}

BallConfidenceSet two_radius_from_branch(Eigen::VectorXd center, Branch branch,
                                         const CsConfig& cfg, const TestConfig& test_cfg,
                                         int n, int p) {
    const int k = branch == Branch::small ? test_cfg.k0 : test_cfg.k1;
    BallConfidenceSet cs;
    cs.center = std::move(center);
    cs.radius_sq = cfg.l_prime * cfg.l_prime * std::log(static_cast<double>(p)) *
                   static_cast<double>(k) / static_cast<double>(n);
    cs.level = 1.0 - cfg.alpha;
    cs.construction = CsConstruction::two_radius;
    cs.branch = branch;
    return cs;
}

BallConfidenceSet two_radius_cs(const LinearSample& sample, const CsConfig& cfg,
                                const SolverConfig& solver, const TestConfig& test_cfg) {
    cfg.validate();
    test_cfg.validate();
    const int n = sample.n();
    const int p = sample.p();

    const PenalizedFit fit = l0_pls(sample, solver);

    TestOutcome outcome;
    switch (cfg.test_strategy) {
        case TestKind::residual_chisq:
            outcome = residual_min_test(sample, test_cfg);
            break;
        case TestKind::estimator_distance:
            outcome = estimator_distance_test(fit, test_cfg, n, p);
            break;
        case TestKind::u_statistic:
            outcome = u_stat_min_test(sample, test_cfg);
            break;
    }

    return two_radius_from_branch(fit.theta_hat,
                                  outcome.reject ? Branch::large : Branch::small, cfg,
                                  test_cfg, n, p);
}

bool contains(const BallConfidenceSet& cs, const Eigen::VectorXd& theta) {
    if (theta.size() != cs.center.size()) {
        throw std::invalid_argument("contains: dimension mismatch");
    }
    return (theta - cs.center).squaredNorm() <= cs.radius_sq;
}

double diameter_sq(const BallConfidenceSet& cs) { return 4.0 * cs.radius_sq; }

}  // namespace l0infer
