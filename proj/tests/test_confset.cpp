#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "l0infer/confset.hpp"
#include "l0infer/rng.hpp"
#include "l0infer/synth.hpp"

using namespace l0infer;

namespace {

LinearSample noiseless_sample(int n, int p, const Eigen::VectorXd& theta,
                              std::uint64_t seed) {
    LinearSample sample;
    sample.design = DesignSpec::iid_gaussian(n, p);
    sample.X = generate_design(sample.design, seed);
    sample.theta_true = theta;
    sample.Y = sample.X * theta;
    return sample;
}

}  // namespace

TEST_CASE("noiseless sample split: exact recovery collapses the ball") {
    const int n = 60, p = 8;
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(p);
    theta(1) = 2.0;
    theta(6) = -1.0;
    const LinearSample sample = noiseless_sample(n, p, theta, 42);

    CsConfig cfg;
    SolverConfig solver;
    solver.mode = SolverMode::exact_enumeration;
    solver.max_support = 4;
    solver.lambda_sq = 1e-6;

    const BallConfidenceSet cs = sample_split_cs(sample, cfg, solver);
    CHECK((cs.center - theta).norm() < 1e-8);
    // R_hat = -1 here, so the clamp fires: the set degenerates to its center.
    CHECK(cs.radius_sq == 0.0);
    CHECK(contains(cs, cs.center));
    CHECK(diameter_sq(cs) == 0.0);
    CHECK(cs.construction == CsConstruction::sample_split);
    CHECK_FALSE(cs.branch.has_value());
}

TEST_CASE("sample split radius is nondecreasing in the confidence level") {
    const DesignSpec design = DesignSpec::iid_gaussian(80, 10);
    const Eigen::VectorXd theta =
        generate_sparse_signal(10, 2, AmplitudeProfile::constant, 1.0, 7);
    const LinearSample sample = sample_model(design, theta, 1001);

    SolverConfig solver;
    solver.mode = SolverMode::greedy_forward;
    double prev = -1.0;
    for (double alpha : {0.5, 0.2, 0.1, 0.05, 0.01}) {
        CsConfig cfg;
        cfg.alpha = alpha;
        const BallConfidenceSet cs = sample_split_cs(sample, cfg, solver);
        CHECK(cs.radius_sq >= prev);
        prev = cs.radius_sq;
    }
}

TEST_CASE("sample split rejects degenerate inputs") {
    const DesignSpec design = DesignSpec::iid_gaussian(3, 2);
    const LinearSample sample = sample_model(design, Eigen::VectorXd::Zero(2), 3);
    CsConfig cfg;
    SolverConfig solver;
    CHECK_THROWS_AS(sample_split_cs(sample, cfg, solver), std::invalid_argument);

    const DesignSpec design5 = DesignSpec::iid_gaussian(5, 2);
    const LinearSample sample5 = sample_model(design5, Eigen::VectorXd::Zero(2), 3);
    CsConfig lopsided;
    lopsided.split_fraction = 0.9;  // second half would have one row
    CHECK_THROWS_AS(sample_split_cs(sample5, lopsided, solver), std::invalid_argument);
}

TEST_CASE("random split is seeded and reproducible") {
    const DesignSpec design = DesignSpec::iid_gaussian(50, 6);
    const Eigen::VectorXd theta =
        generate_sparse_signal(6, 2, AmplitudeProfile::constant, 1.5, 99);
    const LinearSample sample = sample_model(design, theta, 5005);

    SolverConfig solver;
    CsConfig cfg;
    cfg.random_split = true;
    cfg.split_seed = 11;
    const BallConfidenceSet a = sample_split_cs(sample, cfg, solver);
    const BallConfidenceSet b = sample_split_cs(sample, cfg, solver);
    CHECK(a.radius_sq == b.radius_sq);
    CHECK(a.center == b.center);

    cfg.split_seed = 12;
    const BallConfidenceSet c = sample_split_cs(sample, cfg, solver);
    CHECK(a.radius_sq != c.radius_sq);
}

TEST_CASE("two-radius: forced branches give the exact formula radii") {
    CsConfig cfg;
    cfg.l_prime = 1.7;
    TestConfig test_cfg;
    test_cfg.k0 = 2;
    test_cfg.k1 = 9;
    const int n = 150, p = 60;
    Eigen::VectorXd center = Eigen::VectorXd::Zero(p);

    const BallConfidenceSet small_cs =
        two_radius_from_branch(center, Branch::small, cfg, test_cfg, n, p);
    CHECK(small_cs.radius_sq ==
          doctest::Approx(1.7 * 1.7 * std::log(60.0) * 2.0 / 150.0).epsilon(1e-14));
    CHECK(small_cs.branch == Branch::small);

    const BallConfidenceSet large_cs =
        two_radius_from_branch(center, Branch::large, cfg, test_cfg, n, p);
    CHECK(large_cs.radius_sq ==
          doctest::Approx(1.7 * 1.7 * std::log(60.0) * 9.0 / 150.0).epsilon(1e-14));
    CHECK(large_cs.branch == Branch::large);

    // Diameter is a deterministic function of the branch.
    CHECK(diameter_sq(large_cs) == 4.0 * large_cs.radius_sq);
}

TEST_CASE("two-radius records the branch the test actually took") {
    const int n = 100, p = 20;
    TestConfig test_cfg;
    test_cfg.k0 = 2;
    test_cfg.k1 = 8;
    CsConfig cfg;
    cfg.test_strategy = TestKind::residual_chisq;
    SolverConfig solver;

    // Null-like data: sparse truth inside B_0(k0).
    const Eigen::VectorXd null_theta =
        generate_sparse_signal(p, 2, AmplitudeProfile::constant, 1.0, 4);
    const LinearSample null_sample =
        sample_model(DesignSpec::iid_gaussian(n, p), null_theta, 808);
    const BallConfidenceSet null_cs = two_radius_cs(null_sample, cfg, solver, test_cfg);
    CHECK(null_cs.branch == Branch::small);

    // Far alternative: dense-ish strong signal far from B_0(k0).
    SignalSpec sep;
    sep.p = p;
    sep.k0 = 2;
    sep.k1 = 8;
    sep.rho = 6.0;
    const Eigen::VectorXd alt_theta = generate_separated_signal(sep, 9);
    const LinearSample alt_sample =
        sample_model(DesignSpec::iid_gaussian(n, p), alt_theta, 909);
    const BallConfidenceSet alt_cs = two_radius_cs(alt_sample, cfg, solver, test_cfg);
    CHECK(alt_cs.branch == Branch::large);
    CHECK(alt_cs.radius_sq > null_cs.radius_sq);
}

TEST_CASE("contains: center, boundary, and dimension checks") {
    BallConfidenceSet cs;
    cs.center = Eigen::VectorXd::Zero(3);
    cs.radius_sq = 4.0;

    CHECK(contains(cs, cs.center));

    Eigen::VectorXd boundary(3);
    boundary << 2.0, 0.0, 0.0;  // exactly at radius: closed ball
    CHECK(contains(cs, boundary));

    Eigen::VectorXd outside(3);
    outside << 2.0 + 1e-9, 0.0, 0.0;
    CHECK_FALSE(contains(cs, outside));

    cs.radius_sq = 0.0;
    Eigen::VectorXd off(3);
    off << 1e-12, 0.0, 0.0;
    CHECK_FALSE(contains(cs, off));

    Eigen::VectorXd wrong_dim(4);
    wrong_dim.setZero();
    CHECK_THROWS_AS(contains(cs, wrong_dim), std::invalid_argument);
}

TEST_CASE("diameter_sq equals the sampled max pairwise distance squared") {
    const int p = 6;
    BallConfidenceSet cs;
    cs.center = Eigen::VectorXd::Random(p);
    cs.radius_sq = 2.25;

    CHECK(diameter_sq(cs) == doctest::Approx(9.0));

    // Antipodal pairs on the boundary realize the diameter.
    Rng rng(13);
    double max_dist_sq = 0.0;
    std::vector<Eigen::VectorXd> points;
    for (int s = 0; s < 40; ++s) {
        Eigen::VectorXd direction(p);
        for (int j = 0; j < p; ++j) direction(j) = rng.next_gaussian();
        direction.normalize();
        points.push_back(cs.center + 1.5 * direction);
        points.push_back(cs.center - 1.5 * direction);
    }
    for (std::size_t a = 0; a < points.size(); ++a) {
        for (std::size_t b = a + 1; b < points.size(); ++b) {
            max_dist_sq = std::max(max_dist_sq, (points[a] - points[b]).squaredNorm());
        }
    }
    CHECK(std::abs(diameter_sq(cs) - max_dist_sq) < 1e-6);
}

TEST_CASE("confset config validation") {
    CsConfig cfg;
    cfg.alpha = 1.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.alpha = 0.05;
    cfg.split_fraction = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.split_fraction = 0.5;
    cfg.lambda_min_sq = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
