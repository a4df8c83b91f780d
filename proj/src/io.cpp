#include "l0infer/io.hpp"

#include <cstdio>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace l0infer {

namespace {

constexpr char kSampleMagic[8] = {'L', '0', 'S', 'M', 'P', 'L', '0', '1'};

void put_u64(std::ostream& os, std::uint64_t v) {
    char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    os.write(buf, 8);
}

std::uint64_t get_u64(std::istream& is) {
    char buf[8];
    is.read(buf, 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
        v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[i])) << (8 * i);
    }
    return v;
}

void put_doubles(std::ostream& os, const double* data, std::size_t count) {
    os.write(reinterpret_cast<const char*>(data),
             static_cast<std::streamsize>(count * sizeof(double)));
}

void get_doubles(std::istream& is, double* data, std::size_t count) {
    is.read(reinterpret_cast<char*>(data),
            static_cast<std::streamsize>(count * sizeof(double)));
}

nlohmann::json sparse_pairs(const Eigen::VectorXd& v) {
    nlohmann::json pairs = nlohmann::json::array();
    for (int j = 0; j < v.size(); ++j) {
        if (v(j) != 0.0) pairs.push_back({j, v(j)});
    }
    return pairs;
}

nlohmann::json rate_to_json(const RateCi& r) {
    if (!r.defined) return nullptr;
    return {{"rate", r.rate}, {"wilson_lo", r.ci.lo}, {"wilson_hi", r.ci.hi}};
}

}  // namespace

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

std::string test_kind_name(TestKind kind) {
    switch (kind) {
        case TestKind::residual_chisq: return "residual_chisq";
        case TestKind::estimator_distance: return "estimator_distance";
        case TestKind::u_statistic: return "u_statistic";
    }
    return "unknown";
}

std::string solver_mode_name(SolverMode mode) {
    return mode == SolverMode::exact_enumeration ? "exact_enumeration" : "greedy_forward";
}

std::string construction_name(CsConstruction construction) {
    return construction == CsConstruction::sample_split ? "sample_split" : "two_radius";
}

void write_sample_csv(std::ostream& os, const LinearSample& sample) {
    os << "y";
    for (int j = 1; j <= sample.p(); ++j) os << ",x_" << j;
    os << "\n";
    for (int i = 0; i < sample.n(); ++i) {
        os << format_double(sample.Y(i));
        for (int j = 0; j < sample.p(); ++j) os << ',' << format_double(sample.X(i, j));
        os << "\n";
    }
}

void write_sample_binary(std::ostream& os, const LinearSample& sample) {
    os.write(kSampleMagic, 8);
    put_u64(os, static_cast<std::uint64_t>(sample.n()));
    put_u64(os, static_cast<std::uint64_t>(sample.p()));
    put_u64(os, sample.seed);
    put_doubles(os, sample.Y.data(), static_cast<std::size_t>(sample.n()));
    put_doubles(os, sample.X.data(),
                static_cast<std::size_t>(sample.n()) * static_cast<std::size_t>(sample.p()));
    put_doubles(os, sample.theta_true.data(), static_cast<std::size_t>(sample.p()));
}

LinearSample read_sample_binary(std::istream& is) {
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, kSampleMagic, 8) != 0) {
        throw std::runtime_error("read_sample_binary: bad magic");
    }
    const auto n = static_cast<int>(get_u64(is));
    const auto p = static_cast<int>(get_u64(is));
    LinearSample sample;
    sample.seed = get_u64(is);
    sample.Y.resize(n);
    sample.X.resize(n, p);
    sample.theta_true.resize(p);
    get_doubles(is, sample.Y.data(), static_cast<std::size_t>(n));
    get_doubles(is, sample.X.data(),
                static_cast<std::size_t>(n) * static_cast<std::size_t>(p));
    get_doubles(is, sample.theta_true.data(), static_cast<std::size_t>(p));
    if (!is) throw std::runtime_error("read_sample_binary: truncated stream");
    sample.design.n = n;
    sample.design.p = p;
    return sample;
}

nlohmann::json fit_to_json(const PenalizedFit& fit) {
    return {{"support", fit.support},
            {"theta_hat", sparse_pairs(fit.theta_hat)},
            {"k_hat", fit.k_hat},
            {"objective", fit.objective},
            {"residual_sq_n", fit.residual_sq_n},
            {"lambda_sq", fit.lambda_sq},
            {"mode", solver_mode_name(fit.mode_used)},
            {"rank_deficient", fit.rank_deficient}};
}

nlohmann::json outcome_to_json(const TestOutcome& outcome) {
    return {{"kind", test_kind_name(outcome.kind)},
            {"statistic", outcome.statistic},
            {"threshold", outcome.threshold},
            {"reject", outcome.reject},
            {"mode_used", solver_mode_name(outcome.mode_used)}};
}

nlohmann::json cs_to_json(const BallConfidenceSet& cs) {
    nlohmann::json j = {{"center", sparse_pairs(cs.center)},
                        {"radius_sq", cs.radius_sq},
                        {"level", cs.level},
                        {"construction", construction_name(cs.construction)}};
    if (cs.branch) {
        j["branch"] = *cs.branch == Branch::small ? "small" : "large";
    } else {
        j["branch"] = nullptr;
    }
    return j;
}

nlohmann::json report_to_json(const Report& report) {
    return {{"replications", report.replications},
            {"coverage", rate_to_json(report.coverage)},
            {"diameter_sq_q50", report.diam_q50},
            {"diameter_sq_q90", report.diam_q90},
            {"diameter_sq_q95", report.diam_q95},
            {"reject", rate_to_json(report.reject)},
            {"branch_large", rate_to_json(report.branch_large)},
            {"mean_rep_ms", report.mean_rep_ms}};
}

void write_replication_csv(std::ostream& os, const std::vector<RepRow>& rows) {
    os << "rep,seed,covered,diameter_sq,statistic,reject,branch,wall_ms\n";
    for (const RepRow& row : rows) {
        os << row.rep << ',' << row.seed << ',';
        if (row.covered >= 0) os << row.covered;
        os << ',' << format_double(row.diameter_sq) << ',' << format_double(row.statistic)
           << ',';
        if (row.reject >= 0) os << row.reject;
        os << ',';
        if (row.branch >= 0) os << (row.branch == 1 ? "large" : "small");
        os << ',' << format_double(row.wall_ms) << "\n";
    }
}

void write_boundary_csv(std::ostream& os, const std::vector<BoundaryRow>& rows) {
    os << "rho,reject_rate_h0,reject_rate_h1,error_sum\n";
    for (const BoundaryRow& row : rows) {
        os << format_double(row.rho) << ',' << format_double(row.reject_rate_h0) << ','
           << format_double(row.reject_rate_h1) << ',' << format_double(row.error_sum)
           << "\n";
    }
}

}  // namespace l0infer
