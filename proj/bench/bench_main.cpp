// Timing comparison of the serial reference paths against the OpenMP
// kernels: the support-enumeration scan and the Monte Carlo engine.

#include <chrono>
#include <cstdio>
#include <functional>

#include <omp.h>

#include "l0infer/estimate.hpp"
#include "l0infer/mc.hpp"
#include "l0infer/support_enum.hpp"
#include "l0infer/synth.hpp"

using namespace l0infer;

namespace {

double time_ms(const std::function<void()>& fn) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                     start)
        .count();
}

void bench_scan() {
    const int n = 120;
    const int p = 40;
    const int k = 4;  // C(40,4) = 91390 supports
    const DesignSpec design = DesignSpec::iid_gaussian(n, p);
    const Eigen::VectorXd theta =
        generate_sparse_signal(p, 3, AmplitudeProfile::constant, 1.5, 7);
    const LinearSample sample = sample_model(design, theta, 11);
    const GramSystem sys = GramSystem::build(sample.X, sample.Y);

    ScanResult serial_result, parallel_result;
    const double t_serial =
        time_ms([&] { serial_result = scan_supports(sys, p, k, k, 0.0, Exec::serial); });
    const double t_parallel =
        time_ms([&] { parallel_result = scan_supports(sys, p, k, k, 0.0, Exec::parallel); });

    const bool identical = serial_result.support == parallel_result.support &&
                           serial_result.objective == parallel_result.objective;
    std::printf("support scan  C(%d,%d)=%llu   serial %8.1f ms   parallel %8.1f ms   "
                "speedup %.2fx   identical=%s\n",
                p, k,
                static_cast<unsigned long long>(binomial_capped(p, k, UINT64_MAX)),
                t_serial, t_parallel, t_serial / t_parallel, identical ? "yes" : "NO");
}

void bench_mc() {
    ExperimentConfig cfg;
    cfg.design = DesignSpec::iid_gaussian(200, 100);
    cfg.signal.kind = SignalKind::sparse;
    cfg.signal.k = 3;
    cfg.signal.amplitude = 1.0;
    cfg.replications = 200;
    cfg.base_seed = 20240501;
    cfg.procedure = Procedure::sample_split;
    cfg.solver.mode = SolverMode::greedy_forward;

    Report serial_report, parallel_report;
    cfg.threads = 1;
    const double t_serial = time_ms([&] { serial_report = run_experiment(cfg); });
    cfg.threads = 0;
    const double t_parallel = time_ms([&] { parallel_report = run_experiment(cfg); });

    bool identical = serial_report.rows.size() == parallel_report.rows.size();
    if (identical) {
        for (std::size_t i = 0; i < serial_report.rows.size(); ++i) {
            const auto& a = serial_report.rows[i];
            const auto& b = parallel_report.rows[i];
            if (a.seed != b.seed || a.covered != b.covered ||
                a.diameter_sq != b.diameter_sq) {
                identical = false;
                break;
            }
        }
    }
    std::printf("mc engine     %d reps            serial %8.1f ms   parallel %8.1f ms   "
                "speedup %.2fx   identical=%s\n",
                cfg.replications, t_serial, t_parallel, t_serial / t_parallel,
                identical ? "yes" : "NO");
}

}  // namespace

int main() {
    std::printf("threads available: %d\n", omp_get_max_threads());
    bench_scan();
    bench_mc();
    return 0;
}
