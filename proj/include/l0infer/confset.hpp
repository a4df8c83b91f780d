#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>

#include "l0infer/estimate.hpp"
#include "l0infer/hyptest.hpp"
#include "l0infer/synth.hpp"

namespace l0infer {

enum class CsConstruction { sample_split, two_radius };
enum class Branch { small, large };

// Euclidean ball {theta : ||theta - center||^2 <= radius_sq}.
struct BallConfidenceSet {
    Eigen::VectorXd center;
    double radius_sq = 0.0;
    double level = 0.0;  // nominal 1 - alpha
    CsConstruction construction = CsConstruction::sample_split;
    std::optional<Branch> branch;
};

struct CsConfig {
    double alpha = 0.05;
    double lambda_min_sq = 1.0;
    double l_prime = 2.0;  // calibrated default, see README
    TestKind test_strategy = TestKind::residual_chisq;
    double split_fraction = 0.5;
    bool random_split = false;
    std::uint64_t split_seed = 0;

    void validate() const;
};

/// Sample-splitting construction: estimate on the first subsample, center the
/// ball there, and size it from the risk estimate
/// R_hat = ||Y2 - X2 theta_hat||^2/n2 - 1 on the second subsample:
/// radius_sq = max(0, 2/lambda_min_sq * (R_hat + u_alpha/sqrt(n2))).
BallConfidenceSet sample_split_cs(const LinearSample& sample, const CsConfig& cfg,
                                  const SolverConfig& solver);

/// Two-radius construction: run the configured sparsity test on the full
/// sample; the ball around the full-sample estimate gets squared radius
/// l_prime^2 * log(p) * k0/n when the test accepts and k1/n when it rejects.
BallConfidenceSet two_radius_cs(const LinearSample& sample, const CsConfig& cfg,
                                const SolverConfig& solver, const TestConfig& test_cfg);

/// The ball implied by a fixed branch decision; used by two_radius_cs and by
/// forced-branch tests.
BallConfidenceSet two_radius_from_branch(Eigen::VectorXd center, Branch branch,
                                         const CsConfig& cfg, const TestConfig& test_cfg,
                                         int n, int p);

bool contains(const BallConfidenceSet& cs, const Eigen::VectorXd& theta);

double diameter_sq(const BallConfidenceSet& cs);

}  // namespace l0infer
