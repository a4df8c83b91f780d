#include "l0infer/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "l0infer/config.hpp"
#include "l0infer/io.hpp"
#include "l0infer/mc.hpp"

namespace l0infer {

namespace {

struct CliOptions {
    std::string verb;
    std::string config_path;
    std::string output_dir;
    std::vector<std::string> overrides;
    int threads = -1;  // -1: not given on the command line
};

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << text;
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

FlatConfig effective_config(const CliOptions& opts) {
    if (!std::filesystem::exists(opts.config_path)) {
        throw ConfigError("config file '" + opts.config_path + "' does not exist");
    }
    FlatConfig raw = load_config_file(opts.config_path);
    for (const auto& assignment : opts.overrides) {
        apply_override(raw, assignment);
    }
    if (opts.threads >= 0) {
        raw["experiment.threads"] = std::to_string(opts.threads);
    } else if (const char* env = std::getenv("SPARSE_CONFSET_THREADS")) {
        if (raw.find("experiment.threads") == raw.end()) {
            raw["experiment.threads"] = env;
        }
    }
    return materialize(raw);
}

void maybe_write_sample(const FlatConfig& cfg, const std::filesystem::path& dir,
                        const LinearSample& sample) {
    if (!write_sample_requested(cfg)) return;
    std::ofstream out(dir / "sample.csv", std::ios::binary);
    write_sample_csv(out, sample);
}

// Single-draw verbs use replication 0 of the experiment stream, so their
// outputs match row 0 of the corresponding coverage run.
ReplicationDraw single_draw(const ExperimentConfig& exp) {
    return replication_draw(exp, 0);
}

int execute(const CliOptions& opts) {
    const FlatConfig cfg = effective_config(opts);
    const std::filesystem::path dir(opts.output_dir);
    std::filesystem::create_directories(dir);

    if (opts.verb == "estimate") {
        const ExperimentConfig exp = experiment_from_config(cfg);
        const ReplicationDraw d = single_draw(exp);
        const PenalizedFit fit = l0_pls(d.sample, exp.solver);
        write_json_file(dir / "fit.json", fit_to_json(fit));
        maybe_write_sample(cfg, dir, d.sample);
    } else if (opts.verb == "test") {
        const ExperimentConfig exp = experiment_from_config(cfg);
        const ReplicationDraw d = single_draw(exp);
        TestOutcome outcome;
        switch (exp.confset.test_strategy) {
            case TestKind::residual_chisq:
                outcome = residual_min_test(d.sample, exp.test);
                break;
            case TestKind::estimator_distance:
                outcome = estimator_distance_test(l0_pls(d.sample, exp.solver), exp.test,
                                                  d.sample.n(), d.sample.p());
                break;
            case TestKind::u_statistic:
                outcome = u_stat_min_test(d.sample, exp.test);
                break;
        }
        write_json_file(dir / "outcome.json", outcome_to_json(outcome));
        maybe_write_sample(cfg, dir, d.sample);
    } else if (opts.verb == "confset") {
        const ExperimentConfig exp = experiment_from_config(cfg);
        const ReplicationDraw d = single_draw(exp);
        const BallConfidenceSet cs =
            construction_from_config(cfg) == CsConstruction::sample_split
                ? sample_split_cs(d.sample, exp.confset, exp.solver)
                : two_radius_cs(d.sample, exp.confset, exp.solver, exp.test);
        write_json_file(dir / "confset.json", cs_to_json(cs));
        maybe_write_sample(cfg, dir, d.sample);
    } else if (opts.verb == "coverage") {
        const ExperimentConfig exp = experiment_from_config(cfg);
        const Report report = run_experiment(exp);
        write_json_file(dir / "summary.json", report_to_json(report));
        std::ofstream csv(dir / "replications.csv", std::ios::binary);
        write_replication_csv(csv, report.rows);
    } else if (opts.verb == "boundary") {
        const BoundaryConfig bc = boundary_from_config(cfg);
        const auto table = run_boundary_scan(bc);
        std::ofstream csv(dir / "boundary.csv", std::ios::binary);
        write_boundary_csv(csv, table);
    } else {
        throw ConfigError("unknown verb '" + opts.verb + "'");
    }

    write_text_file(dir / "effective_config.toml", render_key_table(cfg));
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"l0infer: sparse-regression estimators, tests, and confidence sets"};
    app.require_subcommand(1);

    CliOptions opts;
    for (const std::string& verb :
         {std::string("estimate"), std::string("test"), std::string("confset"),
          std::string("coverage"), std::string("boundary")}) {
        auto* sub = app.add_subcommand(verb);
        sub->add_option("--config", opts.config_path, "configuration file (key-table or JSON)")
            ->required();
        sub->add_option("--out", opts.output_dir, "output directory")->required();
        sub->add_option("--set", opts.overrides, "dotted-key=value override (repeatable)");
        sub->add_option("--threads", opts.threads, "parallelism cap");
        sub->callback([&opts, verb] { opts.verb = verb; });
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& err) {
        if (err.get_exit_code() == 0) {  // --help
            std::cout << app.help() << std::endl;
            return 0;
        }
        std::cerr << "error: " << err.what() << std::endl;
        return 2;
    }

    try {
        return execute(opts);
    } catch (const ConfigError& err) {
        std::cerr << "config error: " << err.what() << std::endl;
        return 2;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << std::endl;
        return 1;
    }
}

}  // namespace l0infer
