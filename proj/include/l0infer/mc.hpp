#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "l0infer/confset.hpp"
#include "l0infer/estimate.hpp"
#include "l0infer/hyptest.hpp"
#include "l0infer/stats.hpp"
#include "l0infer/synth.hpp"

namespace l0infer {

enum class Procedure { sample_split, two_radius, test_only };
enum class SignalKind { sparse, separated, prior };

// How the truth is drawn each replication. `fixed` draws it once from the
// base seed and reuses it (worst-case-corner protocol).
struct SignalModel {
    SignalKind kind = SignalKind::sparse;
    // sparse
    int k = 1;
    AmplitudeProfile profile = AmplitudeProfile::constant;
    double amplitude = 1.0;
    // separated
    SignalSpec separated;
    // prior
    PriorSpec prior;
    bool fixed = false;

    void validate(int p) const;
};

struct ExperimentConfig {
    DesignSpec design;
    SignalModel signal;
    int replications = 1;
    std::uint64_t base_seed = 0;
    Procedure procedure = Procedure::sample_split;
    SolverConfig solver;
    TestConfig test;
    CsConfig confset;
    int threads = 0;           // 0: library default
    bool record_timing = false;  // when false the wall_ms column is written as 0

    void validate() const;
};

struct RepRow {
    int rep = 0;
    std::uint64_t seed = 0;
    int covered = -1;  // -1 when the procedure produces no confidence set
    double diameter_sq = 0.0;
    double statistic = 0.0;
    int reject = -1;
    int branch = -1;  // 0 small, 1 large, -1 n/a
    double wall_ms = 0.0;
};

struct RateCi {
    double rate = 0.0;
    Interval ci;
    bool defined = false;
};

struct Report {
    int replications = 0;
    RateCi coverage;
    double diam_q50 = 0.0;
    double diam_q90 = 0.0;
    double diam_q95 = 0.0;
    RateCi reject;
    RateCi branch_large;
    double mean_rep_ms = 0.0;
    std::vector<RepRow> rows;
};

Eigen::VectorXd draw_signal(const SignalModel& model, int p, std::uint64_t seed);

struct ReplicationDraw {
    Eigen::VectorXd theta;
    LinearSample sample;
    std::uint64_t rep_seed = 0;
};

/// The (theta, sample) pair replication `rep` of an experiment works on.
/// All randomness derives from mix_seed(base_seed, rep).
ReplicationDraw replication_draw(const ExperimentConfig& cfg, int rep);

/// Runs `replications` independent replications; replication r derives all of
/// its randomness from mix_seed(base_seed, r), so aggregates are identical
/// for any thread count.
Report run_experiment(const ExperimentConfig& cfg);

struct BoundaryRow {
    double rho = 0.0;
    double reject_rate_h0 = 0.0;  // type I
    double reject_rate_h1 = 0.0;  // power
    double error_sum = 0.0;       // type I + type II
};

enum class BoundaryAlternative { separated, prior };

struct BoundaryConfig {
    ExperimentConfig base;                 // design, test, solver, replications, seed
    std::vector<double> rho_grid;          // increasing separations
    BoundaryAlternative alternative = BoundaryAlternative::prior;
    double prior_c = 0.5;                  // prior tuning constant
    int h0_k = 1;                          // sparsity of the null signals
    double h0_amplitude = 1.0;

    void validate() const;
};

/// Error rates of the configured test across a grid of separations: type I
/// under k0-sparse truths, type II under separated/prior alternatives.
std::vector<BoundaryRow> run_boundary_scan(const BoundaryConfig& cfg);

}  // namespace l0infer
