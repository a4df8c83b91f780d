#include "l0infer/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace l0infer {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string strip_comment(const std::string& line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') quoted = !quoted;
        if (line[i] == '#' && !quoted) return line.substr(0, i);
    }
    return line;
}

enum class ValueType { integer, unsigned64, real, boolean, enumeration, real_list };

struct SchemaEntry {
    const char* key;
    ValueType type;
    const char* default_value;
    std::vector<const char*> allowed;  // enumeration only
};

const std::vector<SchemaEntry>& schema() {
    static const std::vector<SchemaEntry> entries = {
        {"experiment.procedure", ValueType::enumeration, "sample_split",
         {"sample_split", "two_radius", "test_only"}},
        {"experiment.replications", ValueType::integer, "100", {}},
        {"experiment.base_seed", ValueType::unsigned64, "1", {}},
        {"experiment.threads", ValueType::integer, "0", {}},
        {"experiment.record_timing", ValueType::boolean, "false", {}},

        {"design.kind", ValueType::enumeration, "iid_gaussian",
         {"iid_gaussian", "bounded_rademacher", "correlated_ar1"}},
        {"design.n", ValueType::integer, "100", {}},
        {"design.p", ValueType::integer, "10", {}},
        {"design.b", ValueType::real, "1.0", {}},
        {"design.ar1_corr", ValueType::real, "0.5", {}},

        {"signal.kind", ValueType::enumeration, "sparse", {"sparse", "separated", "prior"}},
        {"signal.fixed", ValueType::boolean, "false", {}},
        {"signal.k", ValueType::integer, "1", {}},
        {"signal.profile", ValueType::enumeration, "constant",
         {"constant", "decaying", "random_gaussian"}},
        {"signal.amplitude", ValueType::real, "1.0", {}},
        {"signal.k0", ValueType::integer, "0", {}},
        {"signal.k1", ValueType::integer, "1", {}},
        {"signal.rho", ValueType::real, "0.0", {}},
        {"signal.spike", ValueType::real, "0.0", {}},
        {"signal.r_norm", ValueType::integer, "0", {}},
        {"signal.M", ValueType::real, "0.0", {}},

        {"prior.c", ValueType::real, "0.5", {}},
        {"prior.rho_bar", ValueType::real, "0.0", {}},
        {"prior.k1", ValueType::integer, "0", {}},

        {"solver.mode", ValueType::enumeration, "greedy", {"exact", "greedy"}},
        {"solver.max_support", ValueType::integer, "0", {}},
        {"solver.c3", ValueType::real, "3.0", {}},
        {"solver.lambda_sq", ValueType::real, "0.0", {}},

        {"test.strategy", ValueType::enumeration, "residual_chisq",
         {"residual_chisq", "estimator_distance", "u_statistic"}},
        {"test.gamma", ValueType::real, "0.05", {}},
        {"test.k0", ValueType::integer, "1", {}},
        {"test.k1", ValueType::integer, "2", {}},
        {"test.threshold_mode", ValueType::enumeration, "chi_sq_exact",
         {"chi_sq_exact", "gaussian_approx"}},
        {"test.d_const", ValueType::real, "1.0", {}},
        {"test.u_gamma_const", ValueType::real, "0.0", {}},

        {"confset.construction", ValueType::enumeration, "sample_split",
         {"sample_split", "two_radius"}},
        {"confset.alpha", ValueType::real, "0.05", {}},
        {"confset.l_prime", ValueType::real, "2.0", {}},
        {"confset.split_fraction", ValueType::real, "0.5", {}},
        {"confset.random_split", ValueType::boolean, "false", {}},
        {"confset.split_seed", ValueType::unsigned64, "0", {}},

        {"boundary.rho_grid", ValueType::real_list, "", {}},
        {"boundary.alternative", ValueType::enumeration, "prior", {"separated", "prior"}},
        {"boundary.h0_k", ValueType::integer, "1", {}},
        {"boundary.h0_amplitude", ValueType::real, "1.0", {}},
        {"boundary.prior_c", ValueType::real, "0.5", {}},

        {"output.write_sample", ValueType::boolean, "false", {}},
    };
    return entries;
}

const SchemaEntry* find_entry(const std::string& key) {
    for (const auto& entry : schema()) {
        if (key == entry.key) return &entry;
    }
    return nullptr;
}

long long parse_int(const std::string& key, const std::string& value) {
    long long out = 0;
    const auto* first = value.data();
    const auto* last = value.data() + value.size();
    const auto res = std::from_chars(first, last, out);
    if (res.ec != std::errc{} || res.ptr != last) {
        throw ConfigError("config key '" + key + "': expected an integer, got '" + value + "'");
    }
    return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    std::uint64_t out = 0;
    const auto* first = value.data();
    const auto* last = value.data() + value.size();
    const auto res = std::from_chars(first, last, out);
    if (res.ec != std::errc{} || res.ptr != last) {
        throw ConfigError("config key '" + key + "': expected an unsigned integer, got '" +
                          value + "'");
    }
    return out;
}

double parse_real(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double out = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("");
        return out;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': expected a number, got '" + value + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw ConfigError("config key '" + key + "': expected true/false, got '" + value + "'");
}

std::vector<double> parse_real_list(const std::string& key, const std::string& value) {
    std::vector<double> values;
    if (trim(value).empty()) return values;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        values.push_back(parse_real(key, trim(item)));
    }
    return values;
}

void check_value(const SchemaEntry& entry, const std::string& value) {
    switch (entry.type) {
        case ValueType::integer: parse_int(entry.key, value); break;
        case ValueType::unsigned64: parse_u64(entry.key, value); break;
        case ValueType::real: parse_real(entry.key, value); break;
        case ValueType::boolean: parse_bool(entry.key, value); break;
        case ValueType::real_list: parse_real_list(entry.key, value); break;
        case ValueType::enumeration: {
            const bool ok = std::any_of(entry.allowed.begin(), entry.allowed.end(),
                                        [&](const char* v) { return value == v; });
            if (!ok) {
                std::string options;
                for (const char* v : entry.allowed) {
                    if (!options.empty()) options += ", ";
                    options += v;
                }
                throw ConfigError("config key '" + std::string(entry.key) +
                                  "': invalid value '" + value + "' (allowed: " + options +
                                  ")");
            }
            break;
        }
    }
}

std::string unquote(const std::string& value) {
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
        return value.substr(1, value.size() - 2);
    }
    return value;
}

std::string normalize_array(const std::string& value) {
    if (value.size() >= 2 && value.front() == '[' && value.back() == ']') {
        std::string inner = value.substr(1, value.size() - 2);
        std::stringstream ss(inner);
        std::string item;
        std::string out;
        while (std::getline(ss, item, ',')) {
            if (!out.empty()) out += ",";
            out += trim(item);
        }
        return out;
    }
    return value;
}

void flatten_json(const nlohmann::json& node, const std::string& prefix, FlatConfig& out) {
    if (node.is_object()) {
        for (const auto& [key, value] : node.items()) {
            flatten_json(value, prefix.empty() ? key : prefix + "." + key, out);
        }
        return;
    }
    if (node.is_array()) {
        std::string joined;
        for (const auto& item : node) {
            if (!joined.empty()) joined += ",";
            if (item.is_string()) {
                joined += item.get<std::string>();
            } else {
                joined += item.dump();
            }
        }
        out[prefix] = joined;
        return;
    }
    if (node.is_string()) {
        out[prefix] = node.get<std::string>();
        return;
    }
    out[prefix] = node.dump();
}

}  // namespace

FlatConfig parse_key_table(const std::string& text) {
    FlatConfig cfg;
    std::string section;
    std::istringstream lines(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(lines, raw)) {
        ++line_no;
        const std::string line = trim(strip_comment(raw));
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']') {
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) {
                throw ConfigError("config line " + std::to_string(line_no) +
                                  ": empty section header");
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": expected 'key = value'");
        }
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
        }
        value = normalize_array(unquote(value));
        if (!section.empty() && key.find('.') == std::string::npos) {
            key = section + "." + key;
        }
        cfg[key] = value;
    }
    return cfg;
}

FlatConfig parse_json_config(const std::string& text) {
    nlohmann::json parsed;
    try {
        parsed = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& err) {
        throw ConfigError(std::string("config JSON parse error: ") + err.what());
    }
    if (!parsed.is_object()) throw ConfigError("config JSON must be an object");
    FlatConfig cfg;
    flatten_json(parsed, "", cfg);
    return cfg;
}

FlatConfig parse_config_text(const std::string& text) {
    for (char ch : text) {
        if (std::isspace(static_cast<unsigned char>(ch))) continue;
        return ch == '{' ? parse_json_config(text) : parse_key_table(text);
    }
    return {};
}

FlatConfig load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

void apply_override(FlatConfig& cfg, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) {
        throw ConfigError("override '" + assignment + "' is not of the form key=value");
    }
    const std::string key = trim(assignment.substr(0, eq));
    const std::string value = normalize_array(unquote(trim(assignment.substr(eq + 1))));
    if (find_entry(key) == nullptr) {
        throw ConfigError("unknown config key '" + key + "'");
    }
    cfg[key] = value;
}

FlatConfig materialize(const FlatConfig& cfg) {
    for (const auto& [key, value] : cfg) {
        const SchemaEntry* entry = find_entry(key);
        if (entry == nullptr) throw ConfigError("unknown config key '" + key + "'");
        check_value(*entry, value);
    }
    FlatConfig out;
    for (const auto& entry : schema()) {
        const auto it = cfg.find(entry.key);
        out[entry.key] = it != cfg.end() ? it->second : entry.default_value;
    }
    return out;
}

std::string render_key_table(const FlatConfig& cfg) {
    // Keys grouped by section; FlatConfig is ordered so sections come out
    // alphabetically and reparse to the same map.
    std::ostringstream os;
    std::string section;
    for (const auto& [key, value] : cfg) {
        const auto dot = key.find('.');
        const std::string sec = dot == std::string::npos ? "" : key.substr(0, dot);
        const std::string name = dot == std::string::npos ? key : key.substr(dot + 1);
        if (sec != section) {
            if (!section.empty() || !os.str().empty()) os << "\n";
            os << "[" << sec << "]\n";
            section = sec;
        }
        const bool needs_quotes = value.empty() || value.find(' ') != std::string::npos;
        os << name << " = ";
        if (needs_quotes) {
            os << '"' << value << '"';
        } else {
            os << value;
        }
        os << "\n";
    }
    return os.str();
}

std::vector<std::string> schema_keys() {
    std::vector<std::string> keys;
    keys.reserve(schema().size());
    for (const auto& entry : schema()) keys.emplace_back(entry.key);
    return keys;
}

namespace {

int get_int(const FlatConfig& cfg, const std::string& key) {
    return static_cast<int>(parse_int(key, cfg.at(key)));
}
std::uint64_t get_u64(const FlatConfig& cfg, const std::string& key) {
    return parse_u64(key, cfg.at(key));
}
double get_real(const FlatConfig& cfg, const std::string& key) {
    return parse_real(key, cfg.at(key));
}
bool get_bool(const FlatConfig& cfg, const std::string& key) {
    return parse_bool(key, cfg.at(key));
}

DesignSpec design_from(const FlatConfig& cfg) {
    const std::string kind = cfg.at("design.kind");
    const int n = get_int(cfg, "design.n");
    const int p = get_int(cfg, "design.p");
    try {
        if (kind == "iid_gaussian") return DesignSpec::iid_gaussian(n, p);
        if (kind == "bounded_rademacher") {
            return DesignSpec::bounded_rademacher(n, p, get_real(cfg, "design.b"));
        }
        return DesignSpec::ar1_gaussian(n, p, get_real(cfg, "design.ar1_corr"));
    } catch (const std::invalid_argument& err) {
        throw ConfigError(std::string("design: ") + err.what());
    }
}

SignalModel signal_from(const FlatConfig& cfg, const DesignSpec& design) {
    SignalModel model;
    const std::string kind = cfg.at("signal.kind");
    model.fixed = get_bool(cfg, "signal.fixed");
    if (kind == "sparse") {
        model.kind = SignalKind::sparse;
        model.k = get_int(cfg, "signal.k");
        const std::string profile = cfg.at("signal.profile");
        model.profile = profile == "constant"   ? AmplitudeProfile::constant
                        : profile == "decaying" ? AmplitudeProfile::decaying
                                                : AmplitudeProfile::random_gaussian;
        model.amplitude = get_real(cfg, "signal.amplitude");
    } else if (kind == "separated") {
        model.kind = SignalKind::separated;
        SignalSpec spec;
        spec.p = design.p;
        spec.k0 = get_int(cfg, "signal.k0");
        spec.k1 = get_int(cfg, "signal.k1");
        spec.rho = get_real(cfg, "signal.rho");
        spec.spike_mag = get_real(cfg, "signal.spike");
        const int r_norm = get_int(cfg, "signal.r_norm");
        if (r_norm != 0) spec.r_norm = r_norm;
        const double m_radius = get_real(cfg, "signal.M");
        if (m_radius > 0.0) spec.M = m_radius;
        model.separated = spec;
    } else {
        model.kind = SignalKind::prior;
        int k1 = get_int(cfg, "prior.k1");
        if (k1 == 0) k1 = get_int(cfg, "signal.k1");
        try {
            model.prior = PriorSpec::from_boundary(design.p, k1,
                                                   get_real(cfg, "prior.rho_bar"),
                                                   get_real(cfg, "prior.c"));
        } catch (const std::invalid_argument& err) {
            throw ConfigError(std::string("prior: ") + err.what());
        }
    }
    return model;
}

SolverConfig solver_from(const FlatConfig& cfg) {
    SolverConfig solver;
    solver.mode = cfg.at("solver.mode") == "exact" ? SolverMode::exact_enumeration
                                                   : SolverMode::greedy_forward;
    solver.max_support = get_int(cfg, "solver.max_support");
    solver.c3 = get_real(cfg, "solver.c3");
    const double lambda_sq = get_real(cfg, "solver.lambda_sq");
    if (lambda_sq > 0.0) solver.lambda_sq = lambda_sq;
    return solver;
}

TestConfig test_from(const FlatConfig& cfg) {
    TestConfig test;
    test.gamma = get_real(cfg, "test.gamma");
    test.k0 = get_int(cfg, "test.k0");
    test.k1 = get_int(cfg, "test.k1");
    test.threshold_mode = cfg.at("test.threshold_mode") == "gaussian_approx"
                              ? ThresholdMode::gaussian_approx
                              : ThresholdMode::chi_sq_exact;
    test.d_const = get_real(cfg, "test.d_const");
    test.u_gamma_const = get_real(cfg, "test.u_gamma_const");
    return test;
}

CsConfig confset_from(const FlatConfig& cfg, const DesignSpec& design) {
    CsConfig cs;
    cs.alpha = get_real(cfg, "confset.alpha");
    cs.lambda_min_sq = design.lambda_min_sq;
    cs.l_prime = get_real(cfg, "confset.l_prime");
    const std::string strategy = cfg.at("test.strategy");
    cs.test_strategy = strategy == "residual_chisq"       ? TestKind::residual_chisq
                       : strategy == "estimator_distance" ? TestKind::estimator_distance
                                                          : TestKind::u_statistic;
    cs.split_fraction = get_real(cfg, "confset.split_fraction");
    cs.random_split = get_bool(cfg, "confset.random_split");
    cs.split_seed = get_u64(cfg, "confset.split_seed");
    return cs;
}

}  // namespace

ExperimentConfig experiment_from_config(const FlatConfig& cfg) {
    ExperimentConfig exp;
    exp.design = design_from(cfg);
    exp.signal = signal_from(cfg, exp.design);
    exp.replications = get_int(cfg, "experiment.replications");
    exp.base_seed = get_u64(cfg, "experiment.base_seed");
    const std::string procedure = cfg.at("experiment.procedure");
    exp.procedure = procedure == "sample_split" ? Procedure::sample_split
                    : procedure == "two_radius" ? Procedure::two_radius
                                                : Procedure::test_only;
    exp.solver = solver_from(cfg);
    exp.test = test_from(cfg);
    exp.confset = confset_from(cfg, exp.design);
    exp.threads = get_int(cfg, "experiment.threads");
    exp.record_timing = get_bool(cfg, "experiment.record_timing");
    try {
        exp.validate();
    } catch (const std::invalid_argument& err) {
        throw ConfigError(err.what());
    }
    return exp;
}

BoundaryConfig boundary_from_config(const FlatConfig& cfg) {
    BoundaryConfig bc;
    bc.base = experiment_from_config(cfg);
    bc.rho_grid = parse_real_list("boundary.rho_grid", cfg.at("boundary.rho_grid"));
    bc.alternative = cfg.at("boundary.alternative") == "separated"
                         ? BoundaryAlternative::separated
                         : BoundaryAlternative::prior;
    bc.h0_k = get_int(cfg, "boundary.h0_k");
    bc.h0_amplitude = get_real(cfg, "boundary.h0_amplitude");
    bc.prior_c = get_real(cfg, "boundary.prior_c");
    try {
        bc.validate();
    } catch (const std::invalid_argument& err) {
        throw ConfigError(err.what());
    }
    return bc;
}

CsConstruction construction_from_config(const FlatConfig& cfg) {
    return cfg.at("confset.construction") == "two_radius" ? CsConstruction::two_radius
                                                          : CsConstruction::sample_split;
}

bool write_sample_requested(const FlatConfig& cfg) {
    return get_bool(cfg, "output.write_sample");
}

}  // namespace l0infer
