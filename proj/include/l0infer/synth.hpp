#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>

namespace l0infer {

enum class DesignKind { iid_gaussian, bounded_rademacher, correlated_gaussian };

// Row distribution of the design matrix. The population Gram matrix is
// the identity for iid_gaussian, b^2*I for bounded_rademacher, and Sigma
// for correlated_gaussian. lambda_min_sq is the known lower bound on the
// smallest eigenvalue of the population Gram matrix used downstream.
struct DesignSpec {
    int n = 0;
    int p = 0;
    DesignKind kind = DesignKind::iid_gaussian;
    double b = 1.0;             // bounded_rademacher amplitude
    Eigen::MatrixXd sigma;      // correlated_gaussian covariance (p x p)
    double lambda_min_sq = 1.0;

    static DesignSpec iid_gaussian(int n, int p);
    static DesignSpec bounded_rademacher(int n, int p, double b);
    // lambda_min_sq is taken from an eigen-solver on sigma.
    static DesignSpec correlated_gaussian(int n, int p, Eigen::MatrixXd sigma);
    // AR(1) covariance: sigma_ij = corr^|i-j|.
    static DesignSpec ar1_gaussian(int n, int p, double corr);

    void validate() const;  // throws std::invalid_argument
};

enum class AmplitudeProfile { constant, decaying, random_gaussian };

// Parameters of the separated alternative class: k1-sparse vectors at
// l2-distance at least rho from the set of k0-sparse vectors, optionally
// confined to an l_r ball of radius M.
struct SignalSpec {
    int p = 0;
    int k0 = 0;
    int k1 = 0;
    double rho = 0.0;
    std::optional<int> r_norm;   // 1 or 2
    std::optional<double> M;
    double spike_mag = 0.0;      // 0 means default max(5*rho, 5)

    double effective_spike() const;
    void validate() const;
};

// Product prior with marginals theta_j = b_amp * e_j where e_j is 0 with
// probability 1-h_prob and +-1 with probability h_prob/2 each.
struct PriorSpec {
    double b_amp = 0.0;
    double h_prob = 0.0;
    double c = 0.0;
    int k1 = 0;
    int p = 0;
    double rho_bar = 0.0;

    // b_amp = rho_bar/(c*sqrt(k1)), h_prob = c*k1/p.
    static PriorSpec from_boundary(int p, int k1, double rho_bar, double c);
    void validate() const;
};

struct LinearSample {
    Eigen::MatrixXd X;
    Eigen::VectorXd theta_true;
    Eigen::VectorXd Y;
    std::uint64_t seed = 0;
    DesignSpec design;

    int n() const { return static_cast<int>(X.rows()); }
    int p() const { return static_cast<int>(X.cols()); }
};

Eigen::MatrixXd generate_design(const DesignSpec& spec, std::uint64_t seed);

Eigen::VectorXd generate_sparse_signal(int p, int k, AmplitudeProfile profile,
                                       double amplitude, std::uint64_t seed);

// Members of the separated class built as k0 spikes plus k1-k0 equal-magnitude
// coordinates whose squared norms sum to exactly rho^2.
Eigen::VectorXd generate_separated_signal(const SignalSpec& spec, std::uint64_t seed);

// l2-distance from theta to the set of k0-sparse vectors: the root of the
// sum of squares of the p-k0 smallest-magnitude coordinates.
double distance_to_sparse(const Eigen::VectorXd& theta, int k0);

LinearSample sample_model(const DesignSpec& design, const Eigen::VectorXd& theta,
                          std::uint64_t seed);

Eigen::VectorXd sample_prior(const PriorSpec& prior, std::uint64_t seed);

}  // namespace l0infer
