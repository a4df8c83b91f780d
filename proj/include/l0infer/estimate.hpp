#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "l0infer/support_enum.hpp"
#include "l0infer/synth.hpp"

namespace l0infer {

enum class SolverMode { exact_enumeration, greedy_forward };

// Enumeration budget: sum of C(p, s) over the scanned sizes.
inline constexpr std::uint64_t kEnumerationBudget = 1'000'000;

struct SolverConfig {
    std::optional<double> lambda_sq;  // set: explicit penalty; unset: c3*log(p)/n
    SolverMode mode = SolverMode::greedy_forward;
    int max_support = 0;  // 0 means min(n, p)
    double c3 = 3.0;      // default calibrated, see select_lambda
    Exec exec = Exec::parallel;

    void validate() const;
    int effective_max_support(int n, int p) const;
    double effective_lambda_sq(int n, int p) const;
};

struct PenalizedFit {
    Eigen::VectorXd theta_hat;
    std::vector<int> support;
    int k_hat = 0;
    double objective = 0.0;
    double residual_sq_n = 0.0;  // ||Y - X theta_hat||^2 / n
    double lambda_sq = 0.0;
    SolverMode mode_used = SolverMode::exact_enumeration;
    bool rank_deficient = false;
};

/// Penalty level lambda^2 = c3 * log(p) / n.
double select_lambda(int n, int p, double c3);

/// l0-penalized least squares: minimizes ||Y - X theta||^2/n + lambda^2*|S|.
/// Exact mode enumerates all supports up to max_support (budget enforced);
/// greedy mode is forward selection that adds a coordinate only while the
/// penalized objective decreases, with a least-squares refit on the result.
PenalizedFit l0_pls(const LinearSample& sample, const SolverConfig& cfg);
PenalizedFit l0_pls(const Eigen::MatrixXd& X, const Eigen::VectorXd& Y,
                    const SolverConfig& cfg);

struct MinResidual {
    double rss = 0.0;
    std::vector<int> support;
    SolverMode mode_used = SolverMode::exact_enumeration;
};

/// min over supports |S| <= k0 of the least-squares residual ||Y - X_S b||^2.
/// Exact when C(p, k0) fits the budget, greedy forward selection otherwise.
MinResidual sparse_ls_min_residual(const Eigen::VectorXd& Y, const Eigen::MatrixXd& X,
                                   int k0, Exec exec = Exec::parallel);

}  // namespace l0infer
