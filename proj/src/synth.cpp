#include "l0infer/synth.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "l0infer/rng.hpp"

namespace l0infer {

namespace {

// Substream tags for sample_model.
constexpr std::uint64_t kDesignStream = 1;
constexpr std::uint64_t kNoiseStream = 2;

std::vector<int> draw_positions(int p, int k, Rng& rng) {
    std::vector<int> idx(static_cast<std::size_t>(p));
    std::iota(idx.begin(), idx.end(), 0);
    for (int i = 0; i < k; ++i) {
        const auto j = i + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(p - i)));
        std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    }
    idx.resize(static_cast<std::size_t>(k));
    return idx;
}

}  // namespace

DesignSpec DesignSpec::iid_gaussian(int n, int p) {
    DesignSpec spec;
    spec.n = n;
    spec.p = p;
    spec.kind = DesignKind::iid_gaussian;
    spec.lambda_min_sq = 1.0;
    spec.validate();
    return spec;
}

DesignSpec DesignSpec::bounded_rademacher(int n, int p, double b) {
    DesignSpec spec;
    spec.n = n;
    spec.p = p;
    spec.kind = DesignKind::bounded_rademacher;
    spec.b = b;
    spec.lambda_min_sq = b * b;
    spec.validate();
    return spec;
}

DesignSpec DesignSpec::correlated_gaussian(int n, int p, Eigen::MatrixXd sigma) {
    DesignSpec spec;
    spec.n = n;
    spec.p = p;
    spec.kind = DesignKind::correlated_gaussian;
    spec.sigma = std::move(sigma);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigs(spec.sigma,
                                                        Eigen::EigenvaluesOnly);
    if (eigs.info() != Eigen::Success) {
        throw std::invalid_argument("correlated_gaussian: eigen decomposition failed");
    }
    spec.lambda_min_sq = eigs.eigenvalues().minCoeff();
    spec.validate();
    return spec;
}

DesignSpec DesignSpec::ar1_gaussian(int n, int p, double corr) {
    if (!(std::abs(corr) < 1.0)) {
        throw std::invalid_argument("ar1_gaussian: |corr| must be < 1");
    }
    Eigen::MatrixXd sigma(p, p);
    for (int i = 0; i < p; ++i) {
        for (int j = 0; j < p; ++j) {
            sigma(i, j) = std::pow(corr, std::abs(i - j));
        }
    }
    return correlated_gaussian(n, p, std::move(sigma));
}

void DesignSpec::validate() const {
    if (n < 2) throw std::invalid_argument("DesignSpec: n must be at least 2");
    if (p < 1) throw std::invalid_argument("DesignSpec: p must be at least 1");
    if (!(lambda_min_sq > 0.0)) {
        throw std::invalid_argument("DesignSpec: lambda_min_sq must be positive");
    }
    if (kind == DesignKind::bounded_rademacher && !(b > 0.0)) {
        throw std::invalid_argument("DesignSpec: rademacher amplitude b must be positive");
    }
    if (kind == DesignKind::correlated_gaussian) {
        if (sigma.rows() != p || sigma.cols() != p) {
            throw std::invalid_argument("DesignSpec: sigma must be p x p");
        }
        if (!sigma.isApprox(sigma.transpose(), 1e-12)) {
            throw std::invalid_argument("DesignSpec: sigma must be symmetric");
        }
        for (int j = 0; j < p; ++j) {
            if (std::abs(sigma(j, j) - 1.0) > 1e-12) {
                throw std::invalid_argument("DesignSpec: sigma must have unit diagonal");
            }
        }
        Eigen::LLT<Eigen::MatrixXd> llt(sigma);
        if (llt.info() != Eigen::Success) {
            throw std::invalid_argument("DesignSpec: sigma must be positive definite");
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigs(sigma, Eigen::EigenvaluesOnly);
        if (eigs.info() == Eigen::Success &&
            lambda_min_sq > eigs.eigenvalues().minCoeff() + 1e-10) {
            throw std::invalid_argument(
                "DesignSpec: lambda_min_sq exceeds the smallest eigenvalue of sigma");
        }
    }
}

double SignalSpec::effective_spike() const {
    return spike_mag > 0.0 ? spike_mag : std::max(5.0 * rho, 5.0);
}

void SignalSpec::validate() const {
    if (p < 1) throw std::invalid_argument("SignalSpec: p must be at least 1");
    if (k0 < 0 || k1 <= k0 || k1 > p) {
        throw std::invalid_argument("SignalSpec: need 0 <= k0 < k1 <= p");
    }
    if (!(rho >= 0.0)) throw std::invalid_argument("SignalSpec: rho must be nonnegative");
    if (r_norm && *r_norm != 1 && *r_norm != 2) {
        throw std::invalid_argument("SignalSpec: r_norm must be 1 or 2");
    }
    if (M && !(*M > 0.0)) throw std::invalid_argument("SignalSpec: M must be positive");
}

PriorSpec PriorSpec::from_boundary(int p, int k1, double rho_bar, double c) {
    PriorSpec prior;
    prior.p = p;
    prior.k1 = k1;
    prior.rho_bar = rho_bar;
    prior.c = c;
    prior.b_amp = rho_bar / (c * std::sqrt(static_cast<double>(k1)));
    prior.h_prob = c * static_cast<double>(k1) / static_cast<double>(p);
    prior.validate();
    return prior;
}

void PriorSpec::validate() const {
    if (p < 1 || k1 < 1) throw std::invalid_argument("PriorSpec: p and k1 must be positive");
    if (!(c > 0.0 && c < 1.0)) throw std::invalid_argument("PriorSpec: c must lie in (0,1)");
    if (!(h_prob >= 0.0 && h_prob < 1.0)) {
        throw std::invalid_argument("PriorSpec: h_prob must lie in [0,1)");
    }
    if (!(b_amp >= 0.0)) throw std::invalid_argument("PriorSpec: b_amp must be nonnegative");
    const double mass = b_amp * b_amp * static_cast<double>(p) * h_prob;
    if (mass + 1e-9 * std::max(1.0, mass) < rho_bar * rho_bar) {
        throw std::invalid_argument("PriorSpec: b_amp^2 * p * h_prob must reach rho_bar^2");
    }
}

Eigen::MatrixXd generate_design(const DesignSpec& spec, std::uint64_t seed) {
    spec.validate();
    Rng rng(seed);
    Eigen::MatrixXd X(spec.n, spec.p);
    switch (spec.kind) {
        case DesignKind::iid_gaussian:
            for (int j = 0; j < spec.p; ++j) {
                for (int i = 0; i < spec.n; ++i) {
                    X(i, j) = rng.next_gaussian();
                }
            }
            break;
        case DesignKind::bounded_rademacher:
            for (int j = 0; j < spec.p; ++j) {
                for (int i = 0; i < spec.n; ++i) {
                    X(i, j) = rng.next_bool() ? spec.b : -spec.b;
                }
            }
            break;
        case DesignKind::correlated_gaussian: {
            Eigen::LLT<Eigen::MatrixXd> llt(spec.sigma);
            if (llt.info() != Eigen::Success) {
                throw std::invalid_argument("generate_design: sigma is not positive definite");
            }
            const Eigen::MatrixXd chol_l = llt.matrixL();
            Eigen::VectorXd z(spec.p);
            for (int i = 0; i < spec.n; ++i) {
                for (int j = 0; j < spec.p; ++j) {
                    z(j) = rng.next_gaussian();
                }
                X.row(i) = (chol_l * z).transpose();
            }
            break;
        }
    }
    return X;
}

Eigen::VectorXd generate_sparse_signal(int p, int k, AmplitudeProfile profile,
                                       double amplitude, std::uint64_t seed) {
    if (p < 1) throw std::invalid_argument("generate_sparse_signal: p must be at least 1");
    if (k < 0 || k > p) {
        throw std::invalid_argument("generate_sparse_signal: need 0 <= k <= p");
    }
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(p);
    if (k == 0) return theta;
    Rng rng(seed);
    const auto positions = draw_positions(p, k, rng);
    for (int rank = 0; rank < k; ++rank) {
        double value = 0.0;
        switch (profile) {
            case AmplitudeProfile::constant:
                value = amplitude;
                break;
            case AmplitudeProfile::decaying:
                value = amplitude / std::sqrt(static_cast<double>(rank + 1));
                break;
            case AmplitudeProfile::random_gaussian:
                do {
                    value = amplitude * rng.next_gaussian();
                } while (value == 0.0);
                break;
        }
        theta(positions[static_cast<std::size_t>(rank)]) = value;
    }
    return theta;
}

Eigen::VectorXd generate_separated_signal(const SignalSpec& spec, std::uint64_t seed) {
    spec.validate();
    if (!(spec.rho > 0.0)) {
        throw std::invalid_argument("generate_separated_signal: rho must be positive");
    }
    const int small_count = spec.k1 - spec.k0;
    const double small_mag = spec.rho / std::sqrt(static_cast<double>(small_count));
    const double spike = spec.effective_spike();
    if (spec.k0 > 0 && !(spike > small_mag)) {
        throw std::invalid_argument(
            "generate_separated_signal: spike magnitude must exceed rho/sqrt(k1-k0)");
    }
    if (spec.M) {
        const int r = spec.r_norm.value_or(2);
        const double mass = static_cast<double>(spec.k0) * std::pow(spike, r) +
                            static_cast<double>(small_count) * std::pow(small_mag, r);
        if (mass > std::pow(*spec.M, r)) {
            throw std::invalid_argument(
                "generate_separated_signal: rho and spikes infeasible inside the l_r ball");
        }
    }

    Rng rng(seed);
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(spec.p);
    const auto positions = draw_positions(spec.p, spec.k1, rng);
    for (int rank = 0; rank < spec.k1; ++rank) {
        theta(positions[static_cast<std::size_t>(rank)]) =
            rank < spec.k0 ? spike : small_mag;
    }

    const double dist = distance_to_sparse(theta, spec.k0);
    if (std::abs(dist - spec.rho) > 1e-9) {
        throw std::runtime_error("generate_separated_signal: separation contract violated");
    }
    return theta;
}

double distance_to_sparse(const Eigen::VectorXd& theta, int k0) {
    const int p = static_cast<int>(theta.size());
    if (k0 < 0 || k0 > p) {
        throw std::invalid_argument("distance_to_sparse: need 0 <= k0 <= p");
    }
    if (k0 == p) return 0.0;
    std::vector<int> order(static_cast<std::size_t>(p));
    std::iota(order.begin(), order.end(), 0);
    // Ascending magnitude, ties by coordinate index.
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const double ma = std::abs(theta(a));
        const double mb = std::abs(theta(b));
        return ma < mb || (ma == mb && a < b);
    });
    double sum_sq = 0.0;
    for (int j = 0; j < p - k0; ++j) {
        const double v = theta(order[static_cast<std::size_t>(j)]);
        sum_sq += v * v;
    }
    return std::sqrt(sum_sq);
}

LinearSample sample_model(const DesignSpec& design, const Eigen::VectorXd& theta,
                          std::uint64_t seed) {
    design.validate();
    if (theta.size() != design.p) {
        throw std::invalid_argument("sample_model: theta dimension does not match design");
    }
    LinearSample sample;
    sample.design = design;
    sample.seed = seed;
    sample.theta_true = theta;
    sample.X = generate_design(design, mix_seed(seed, kDesignStream));
    Rng noise(mix_seed(seed, kNoiseStream));
    Eigen::VectorXd eps(design.n);
    for (int i = 0; i < design.n; ++i) {
        eps(i) = noise.next_gaussian();
    }
    sample.Y = sample.X * theta + eps;
    return sample;
}

Eigen::VectorXd sample_prior(const PriorSpec& prior, std::uint64_t seed) {
    prior.validate();
    Rng rng(seed);
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(prior.p);
    for (int j = 0; j < prior.p; ++j) {
        const double u = rng.next_double();
        if (u < prior.h_prob) {
            theta(j) = (u < 0.5 * prior.h_prob) ? prior.b_amp : -prior.b_amp;
        }
    }
    return theta;
}

}  // namespace l0infer
