#include "l0infer/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace l0infer {

void SolverConfig::validate() const {
    if (lambda_sq && !(*lambda_sq > 0.0)) {
        throw std::invalid_argument("SolverConfig: lambda_sq must be positive");
    }
    if (!(c3 > 0.0)) throw std::invalid_argument("SolverConfig: c3 must be positive");
    if (max_support < 0) throw std::invalid_argument("SolverConfig: max_support must be >= 0");
}

int SolverConfig::effective_max_support(int n, int p) const {
    const int cap = std::min(n, p);
    if (max_support == 0) return cap;
    return std::min(max_support, cap);
}

double SolverConfig::effective_lambda_sq(int n, int p) const {
    return lambda_sq ? *lambda_sq : select_lambda(n, p, c3);
}

double select_lambda(int n, int p, double c3) {
    if (n < 2 || p < 2) throw std::invalid_argument("select_lambda: need n >= 2 and p >= 2");
    if (!(c3 > 0.0)) throw std::invalid_argument("select_lambda: c3 must be positive");
    return c3 * std::log(static_cast<double>(p)) / static_cast<double>(n);
}

namespace {

// Forward selection on the residual: pick the column with the largest
// normalized correlation, refit least squares on the enlarged support,
// keep it only if the penalized objective strictly decreases.
PenalizedFit greedy_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y,
                        double lambda_sq, int max_support) {
    const int n = static_cast<int>(X.rows());
    const int p = static_cast<int>(X.cols());
    Eigen::VectorXd col_norm(p);
    for (int j = 0; j < p; ++j) {
        col_norm(j) = std::max(X.col(j).norm(), 1e-300);
    }

    std::vector<int> support;
    std::vector<char> in_support(static_cast<std::size_t>(p), 0);
    Eigen::VectorXd residual = Y;
    Eigen::VectorXd beta;
    double best_rss = Y.squaredNorm();
    double best_objective = best_rss / static_cast<double>(n);
    bool rank_flag = false;

    while (static_cast<int>(support.size()) < max_support) {
        int pick = -1;
        double best_corr = 0.0;
        for (int j = 0; j < p; ++j) {
            if (in_support[static_cast<std::size_t>(j)]) continue;
            const double corr = std::abs(X.col(j).dot(residual)) / col_norm(j);
            if (corr > best_corr) {
                best_corr = corr;
                pick = j;
            }
        }
        if (pick < 0) break;

        std::vector<int> trial = support;
        trial.push_back(pick);
        std::sort(trial.begin(), trial.end());
        Eigen::MatrixXd X_s(n, trial.size());
        for (std::size_t a = 0; a < trial.size(); ++a) {
            X_s.col(static_cast<int>(a)) = X.col(trial[a]);
        }
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(X_s);
        const Eigen::VectorXd trial_beta = cod.solve(Y);
        const double rss = (Y - X_s * trial_beta).squaredNorm();
        const double objective = rss / static_cast<double>(n) +
                                 lambda_sq * static_cast<double>(trial.size());
        if (objective >= best_objective) break;

        support = std::move(trial);
        beta = trial_beta;
        residual = Y - X_s * beta;
        best_rss = rss;
        best_objective = objective;
        in_support[static_cast<std::size_t>(pick)] = 1;
        if (cod.rank() < static_cast<Eigen::Index>(support.size())) rank_flag = true;
    }

    PenalizedFit fit;
    fit.theta_hat = Eigen::VectorXd::Zero(p);
    for (std::size_t a = 0; a < support.size(); ++a) {
        fit.theta_hat(support[a]) = beta(static_cast<int>(a));
    }
    fit.support = support;
    fit.k_hat = static_cast<int>(support.size());
    fit.residual_sq_n = best_rss / static_cast<double>(n);
    fit.objective = fit.residual_sq_n + lambda_sq * static_cast<double>(fit.k_hat);
    fit.lambda_sq = lambda_sq;
    fit.mode_used = SolverMode::greedy_forward;
    fit.rank_deficient = rank_flag;
    return fit;
}

}  // namespace

PenalizedFit l0_pls(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y,
                    const SolverConfig& cfg) {
    cfg.validate();
    const int n = static_cast<int>(X.rows());
    const int p = static_cast<int>(X.cols());
    if (n < 1 || p < 1 || X.rows() != Y.size()) {
        throw std::invalid_argument("l0_pls: dimension mismatch");
    }
    const double lambda_sq = cfg.effective_lambda_sq(n, p);
    const int max_support = cfg.effective_max_support(n, p);

    if (cfg.mode == SolverMode::greedy_forward) {
        return greedy_fit(X, Y, lambda_sq, max_support);
    }

    std::uint64_t budget = 0;
    for (int s = 0; s <= max_support; ++s) {
        budget += binomial_capped(p, s, kEnumerationBudget + 1);
        if (budget > kEnumerationBudget) {
            throw std::invalid_argument(
                "l0_pls: exact enumeration budget exceeded; use greedy_forward");
        }
    }

    const GramSystem sys = GramSystem::build(X, Y);
    const ScanResult best = scan_supports(sys, p, 0, max_support, lambda_sq, cfg.exec);

    PenalizedFit fit;
    fit.theta_hat = Eigen::VectorXd::Zero(p);
    const SupportFit refit = solve_on_support(sys, best.support);
    for (std::size_t a = 0; a < best.support.size(); ++a) {
        fit.theta_hat(best.support[a]) = refit.beta(static_cast<int>(a));
    }
    fit.support = best.support;
    fit.k_hat = static_cast<int>(best.support.size());
    fit.residual_sq_n = best.rss / static_cast<double>(n);
    fit.objective = best.objective;
    fit.lambda_sq = lambda_sq;
    fit.mode_used = SolverMode::exact_enumeration;
    fit.rank_deficient = best.rank_deficient;
    return fit;
}

PenalizedFit l0_pls(const LinearSample& sample, const SolverConfig& cfg) {
    return l0_pls(sample.X, sample.Y, cfg);
}

MinResidual sparse_ls_min_residual(const Eigen::VectorXd& Y, const Eigen::MatrixXd& X,
                                   int k0, Exec exec) {
    const int n = static_cast<int>(X.rows());
    const int p = static_cast<int>(X.cols());
    if (X.rows() != Y.size()) {
        throw std::invalid_argument("sparse_ls_min_residual: dimension mismatch");
    }
    if (k0 < 0 || k0 > p) {
        throw std::invalid_argument("sparse_ls_min_residual: need 0 <= k0 <= p");
    }

    MinResidual out;
    if (k0 == 0) {
        out.rss = Y.squaredNorm();
        return out;
    }

    // The residual is nonincreasing in the support, so only size-k0 supports
    // need to be scanned.
    const int size = std::min(k0, p);
    if (binomial_capped(p, size, kEnumerationBudget + 1) <= kEnumerationBudget) {
        const GramSystem sys = GramSystem::build(X, Y);
        const ScanResult best = scan_supports(sys, p, size, size, 0.0, exec);
        out.rss = best.rss;
        out.support = best.support;
        out.mode_used = SolverMode::exact_enumeration;
        return out;
    }

    // Greedy fallback: plain forward selection for k0 steps, then refit.
    std::vector<int> support;
    std::vector<char> in_support(static_cast<std::size_t>(p), 0);
    Eigen::VectorXd residual = Y;
    Eigen::VectorXd col_norm(p);
    for (int j = 0; j < p; ++j) col_norm(j) = std::max(X.col(j).norm(), 1e-300);
    for (int step = 0; step < size; ++step) {
        int pick = -1;
        double best_corr = -1.0;
        for (int j = 0; j < p; ++j) {
            if (in_support[static_cast<std::size_t>(j)]) continue;
            const double corr = std::abs(X.col(j).dot(residual)) / col_norm(j);
            if (corr > best_corr) {
                best_corr = corr;
                pick = j;
            }
        }
        support.push_back(pick);
        in_support[static_cast<std::size_t>(pick)] = 1;
        std::sort(support.begin(), support.end());
        Eigen::MatrixXd X_s(n, support.size());
        for (std::size_t a = 0; a < support.size(); ++a) {
            X_s.col(static_cast<int>(a)) = X.col(support[a]);
        }
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(X_s);
        residual = Y - X_s * cod.solve(Y);
    }
    out.rss = residual.squaredNorm();
    out.support = support;
    out.mode_used = SolverMode::greedy_forward;
    return out;
}

}  // namespace l0infer
