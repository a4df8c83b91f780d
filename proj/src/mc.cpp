#include "l0infer/mc.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "l0infer/rng.hpp"

namespace l0infer {

namespace {

// Substream tags within one replication.
constexpr std::uint64_t kThetaStream = 0;
constexpr std::uint64_t kModelStream = 1;
constexpr std::uint64_t kFixedThetaStream = 0xF1;

constexpr double kWilsonZ = 1.959963984540054;  // normal quantile at 0.975

RateCi make_rate(double successes, double trials) {
    RateCi r;
    if (trials > 0.0) {
        r.rate = successes / trials;
        r.ci = wilson_interval(successes, trials, kWilsonZ);
        r.defined = true;
    }
    return r;
}

}  // namespace

void SignalModel::validate(int p) const {
    switch (kind) {
        case SignalKind::sparse:
            if (k < 0 || k > p) throw std::invalid_argument("SignalModel: need 0 <= k <= p");
            break;
        case SignalKind::separated:
            separated.validate();
            if (separated.p != p) {
                throw std::invalid_argument("SignalModel: separated.p must match design.p");
            }
            break;
        case SignalKind::prior:
            prior.validate();
            if (prior.p != p) {
                throw std::invalid_argument("SignalModel: prior.p must match design.p");
            }
            break;
    }
}

void ExperimentConfig::validate() const {
    design.validate();
    signal.validate(design.p);
    solver.validate();
    if (procedure != Procedure::sample_split) test.validate();
    confset.validate();
    if (replications < 1) {
        throw std::invalid_argument("ExperimentConfig: replications must be >= 1");
    }
    if (threads < 0) throw std::invalid_argument("ExperimentConfig: threads must be >= 0");
}

Eigen::VectorXd draw_signal(const SignalModel& model, int p, std::uint64_t seed) {
    switch (model.kind) {
        case SignalKind::sparse:
            return generate_sparse_signal(p, model.k, model.profile, model.amplitude, seed);
        case SignalKind::separated:
            return generate_separated_signal(model.separated, seed);
        case SignalKind::prior:
            return sample_prior(model.prior, seed);
    }
    throw std::logic_error("draw_signal: unreachable");
}

ReplicationDraw replication_draw(const ExperimentConfig& cfg, int rep) {
    ReplicationDraw draw;
    draw.rep_seed = mix_seed(cfg.base_seed, static_cast<std::uint64_t>(rep));
    draw.theta = cfg.signal.fixed
                     ? draw_signal(cfg.signal, cfg.design.p,
                                   mix_seed(cfg.base_seed, kFixedThetaStream))
                     : draw_signal(cfg.signal, cfg.design.p,
                                   mix_seed(draw.rep_seed, kThetaStream));
    draw.sample = sample_model(cfg.design, draw.theta, mix_seed(draw.rep_seed, kModelStream));
    return draw;
}

namespace {

RepRow run_one(const ExperimentConfig& cfg, int rep) {
    const auto start = std::chrono::steady_clock::now();
    ReplicationDraw draw = replication_draw(cfg, rep);
    const Eigen::VectorXd& theta = draw.theta;
    const LinearSample& sample = draw.sample;

    RepRow row;
    row.rep = rep;
    row.seed = draw.rep_seed;

    switch (cfg.procedure) {
        case Procedure::sample_split: {
            const BallConfidenceSet cs = sample_split_cs(sample, cfg.confset, cfg.solver);
            row.covered = contains(cs, theta) ? 1 : 0;
            row.diameter_sq = diameter_sq(cs);
            break;
        }
        case Procedure::two_radius: {
            const BallConfidenceSet cs =
                two_radius_cs(sample, cfg.confset, cfg.solver, cfg.test);
            row.covered = contains(cs, theta) ? 1 : 0;
            row.diameter_sq = diameter_sq(cs);
            row.branch = cs.branch == Branch::large ? 1 : 0;
            row.reject = row.branch;
            break;
        }
        case Procedure::test_only: {
            TestOutcome outcome;
            switch (cfg.confset.test_strategy) {
                case TestKind::residual_chisq:
                    outcome = residual_min_test(sample, cfg.test);
                    break;
                case TestKind::estimator_distance:
                    outcome = estimator_distance_test(l0_pls(sample, cfg.solver), cfg.test,
                                                      sample.n(), sample.p());
                    break;
                case TestKind::u_statistic:
                    outcome = u_stat_min_test(sample, cfg.test);
                    break;
            }
            row.statistic = outcome.statistic;
            row.reject = outcome.reject ? 1 : 0;
            break;
        }
    }

    if (cfg.record_timing) {
        row.wall_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - start)
                          .count();
    }
    return row;
}

}  // namespace

Report run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const int reps = cfg.replications;

    std::vector<RepRow> rows(static_cast<std::size_t>(reps));
    const auto wall_start = std::chrono::steady_clock::now();

    // Exceptions cannot cross an OpenMP region; the first failure is stored
    // and rethrown after the loop joins.
    std::atomic<bool> failed{false};
    std::string failure;
    auto guarded = [&](int r) {
        if (failed.load(std::memory_order_relaxed)) return;
        try {
            rows[static_cast<std::size_t>(r)] = run_one(cfg, r);
        } catch (const std::exception& err) {
#pragma omp critical(l0infer_mc_failure)
            {
                if (!failed.exchange(true)) failure = err.what();
            }
        }
    };

    if (cfg.threads == 1) {
        for (int r = 0; r < reps; ++r) guarded(r);
    } else if (cfg.threads == 0) {
#pragma omp parallel for schedule(dynamic)
        for (int r = 0; r < reps; ++r) guarded(r);
    } else {
#pragma omp parallel for schedule(dynamic) num_threads(cfg.threads)
        for (int r = 0; r < reps; ++r) guarded(r);
    }
    if (failed.load()) throw std::runtime_error(failure);

    const double total_ms = std::chrono::duration<double, std::milli>(
                                std::chrono::steady_clock::now() - wall_start)
                                .count();

    // Aggregation walks rows in replication order; nothing here depends on
    // the schedule above.
    Report report;
    report.replications = reps;
    report.rows = std::move(rows);
    double covered = 0.0, cover_n = 0.0;
    double rejected = 0.0, reject_n = 0.0;
    double large = 0.0, branch_n = 0.0;
    std::vector<double> diameters;
    for (const RepRow& row : report.rows) {
        if (row.covered >= 0) {
            covered += row.covered;
            cover_n += 1.0;
            diameters.push_back(row.diameter_sq);
        }
        if (row.reject >= 0) {
            rejected += row.reject;
            reject_n += 1.0;
        }
        if (row.branch >= 0) {
            large += row.branch;
            branch_n += 1.0;
        }
    }
    report.coverage = make_rate(covered, cover_n);
    report.reject = make_rate(rejected, reject_n);
    report.branch_large = make_rate(large, branch_n);
    if (!diameters.empty()) {
        report.diam_q50 = nearest_rank_quantile(diameters, 0.5);
        report.diam_q90 = nearest_rank_quantile(diameters, 0.9);
        report.diam_q95 = nearest_rank_quantile(diameters, 0.95);
    }
    report.mean_rep_ms = total_ms / static_cast<double>(reps);
    return report;
}

void BoundaryConfig::validate() const {
    base.validate();
    if (rho_grid.empty()) throw std::invalid_argument("BoundaryConfig: empty rho grid");
    for (std::size_t i = 1; i < rho_grid.size(); ++i) {
        if (!(rho_grid[i] > rho_grid[i - 1])) {
            throw std::invalid_argument("BoundaryConfig: rho grid must be increasing");
        }
    }
    if (!(prior_c > 0.0 && prior_c < 1.0)) {
        throw std::invalid_argument("BoundaryConfig: prior_c must lie in (0,1)");
    }
    if (h0_k < 0 || h0_k > base.design.p) {
        throw std::invalid_argument("BoundaryConfig: invalid h0_k");
    }
}

std::vector<BoundaryRow> run_boundary_scan(const BoundaryConfig& cfg) {
    cfg.validate();

    std::vector<BoundaryRow> table;
    table.reserve(cfg.rho_grid.size());
    for (std::size_t g = 0; g < cfg.rho_grid.size(); ++g) {
        const double rho = cfg.rho_grid[g];

        ExperimentConfig h0 = cfg.base;
        h0.procedure = Procedure::test_only;
        h0.signal = SignalModel{};
        h0.signal.kind = SignalKind::sparse;
        h0.signal.k = cfg.h0_k;
        h0.signal.amplitude = cfg.h0_amplitude;
        h0.base_seed = mix_seed(cfg.base.base_seed, 2 * g);

        ExperimentConfig h1 = cfg.base;
        h1.procedure = Procedure::test_only;
        h1.signal = SignalModel{};
        if (cfg.alternative == BoundaryAlternative::prior) {
            h1.signal.kind = SignalKind::prior;
            h1.signal.prior = PriorSpec::from_boundary(cfg.base.design.p, cfg.base.test.k1,
                                                       rho, cfg.prior_c);
        } else {
            h1.signal.kind = SignalKind::separated;
            SignalSpec sep;
            sep.p = cfg.base.design.p;
            sep.k0 = cfg.base.test.k0;
            sep.k1 = cfg.base.test.k1;
            sep.rho = rho;
            h1.signal.separated = sep;
        }
        h1.base_seed = mix_seed(cfg.base.base_seed, 2 * g + 1);

        const Report r0 = run_experiment(h0);
        const Report r1 = run_experiment(h1);

        BoundaryRow row;
        row.rho = rho;
        row.reject_rate_h0 = r0.reject.rate;
        row.reject_rate_h1 = r1.reject.rate;
        row.error_sum = row.reject_rate_h0 + (1.0 - row.reject_rate_h1);
        table.push_back(row);
    }
    return table;
}

}  // namespace l0infer
