#include "udisc/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "udisc/error.hpp"
#include "udisc/rng.hpp"

namespace udisc {

namespace {

using nlohmann::json;

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorCode::InvalidConfig, msg); }

// Recursive-descent reader for gate expressions and their angle arguments.
class ExprReader {
public:
    explicit ExprReader(std::string_view s) : s_(s) {}

    ComplexMatrix product() {
        ComplexMatrix m = factor();
        while (eat('*')) m = m * factor();
        skip();
        if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return m;
    }

private:
    std::string_view s_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& what) const {
        config_error("gate expression '" + std::string(s_) + "': " + what);
    }

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    std::string name() {
        skip();
        const std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
        std::string n(s_.substr(start, pos_ - start));
        std::transform(n.begin(), n.end(), n.begin(), [](unsigned char c) { return std::tolower(c); });
        return n;
    }

    double angle_sum() {
        double v = angle_term();
        for (;;) {
            if (eat('+')) v += angle_term();
            else if (eat('-')) v -= angle_term();
            else return v;
        }
    }

    double angle_term() {
        double v = angle_atom();
        for (;;) {
            if (eat('*')) v *= angle_atom();
            else if (eat('/')) v /= angle_atom();
            else return v;
        }
    }

    double angle_atom() {
        if (eat('-')) return -angle_atom();
        if (eat('+')) return angle_atom();
        if (eat('(')) {
            const double v = angle_sum();
            if (!eat(')')) fail("missing ')'");
            return v;
        }
        skip();
        if (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) {
            if (name() != "pi") fail("unknown constant");
            return kPi;
        }
        const std::string rest(s_.substr(pos_));
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(rest, &used);
        } catch (const std::exception&) {
            fail("expected a number");
        }
        pos_ += used;
        return v;
    }

    ComplexMatrix factor() {
        if (eat('(')) {
            ComplexMatrix m = factor();
            while (eat('*')) m = m * factor();
            if (!eat(')')) fail("missing ')'");
            return m;
        }
        const std::string n = name();
        const cplx i{0.0, 1.0};
        if (n == "rx" || n == "ry" || n == "rz") {
            if (!eat('(')) fail(n + " needs an angle");
            const double a = angle_sum();
            if (!eat(')')) fail("missing ')'");
            if (n == "rx") return rx_matrix(a);
            if (n == "rz") return rz_matrix(a);
            return {{std::cos(a / 2), -std::sin(a / 2)}, {std::sin(a / 2), std::cos(a / 2)}};
        }
        if (n == "i") return ComplexMatrix::identity(2);
        if (n == "x") return gate_matrix(Gate::x(0));
        if (n == "y") return {{0.0, -i}, {i, 0.0}};
        if (n == "z") return {{1.0, 0.0}, {0.0, -1.0}};
        if (n == "h") return gate_matrix(Gate::h(0));
        if (n == "sx") return gate_matrix(Gate::sx(0));
        if (n == "s") return {{1.0, 0.0}, {0.0, i}};
        if (n == "sdg") return {{1.0, 0.0}, {0.0, -i}};
        if (n == "t") return {{1.0, 0.0}, {0.0, std::polar(1.0, kPi / 4)}};
        if (n == "tdg") return {{1.0, 0.0}, {0.0, std::polar(1.0, -kPi / 4)}};
        fail(n.empty() ? "expected a gate name" : "unknown gate '" + n + "'");
    }
};

cplx complex_from_json(const json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
        return {j[0].get<double>(), j[1].get<double>()};
    }
    config_error("matrix entry must be a number or [re, im]");
}

ComplexMatrix matrix_from_json(const json& j) {
    if (j.is_string()) return parse_gate_expression(j.get<std::string>());
    if (!j.is_array() || j.size() != 2) config_error("matrix must be a gate expression or a 2x2 array");
    ComplexMatrix m(2, 2);
    for (std::size_t r = 0; r < 2; ++r) {
        if (!j[r].is_array() || j[r].size() != 2) config_error("matrix rows must have two entries");
        for (std::size_t c = 0; c < 2; ++c) m(r, c) = complex_from_json(j[r][c]);
    }
    return m;
}

json matrix_to_json(const ComplexMatrix& m) {
    json rows = json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (std::size_t c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
        rows.push_back(row);
    }
    return rows;
}

void check_keys(const json& j, std::initializer_list<std::string_view> allowed, const std::string& where) {
    if (!j.is_object()) config_error(where + " must be an object");
    for (const auto& [key, _] : j.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            config_error("unknown key '" + key + "' in " + where);
        }
    }
}

ExampleKind example_from_json(const json& j) {
    const std::string s = j.is_number_integer() ? std::to_string(j.get<int>()) : j.get<std::string>();
    if (s == "1") return ExampleKind::Example1;
    if (s == "2") return ExampleKind::Example2;
    if (s == "custom") return ExampleKind::Custom;
    config_error("example must be 1, 2 or \"custom\"");
}

std::string fmt(double v, const char* spec = "%.6f") {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

}  // namespace

ComplexMatrix parse_gate_expression(std::string_view text) {
    ComplexMatrix m = ExprReader(text).product();
    if (!is_unitary(m, 1e-10)) config_error("gate expression '" + std::string(text) + "' is not unitary");
    return m;
}

MeasurementKind ExperimentConfig::measurement_kind() const {
    if (measurement) return *measurement;
    return example == ExampleKind::Example2 ? MeasurementKind::Parity : MeasurementKind::Short;
}

SchemeSpec ExperimentConfig::spec_for(int width, int depth) const {
    SchemeSpec s;
    s.example = example;
    s.n_copies = n_copies;
    s.width = width;
    s.depth = depth;
    s.primitive = primitive;
    s.measurement = measurement_kind();
    s.lambda = std::polar(1.0, lambda_phase);
    s.custom = custom;
    return s;
}

std::vector<std::pair<int, int>> ExperimentConfig::resolved_shapes() const {
    std::vector<std::pair<int, int>> out = shapes.empty() ? factorizations(n_copies) : shapes;
    std::sort(out.begin(), out.end());
    return out;
}

UnitaryPair ExperimentConfig::pair() const {
    if (example == ExampleKind::Custom) return {custom->u, custom->v};
    return example_pair(example, n_copies);
}

void ExperimentConfig::validate() const {
    if (n_copies < 1) config_error("n_copies must be at least 1");
    if (shots < 1) config_error("shots must be at least 1");
    if (format != "csv" && format != "json") config_error("format must be csv or json");
    if ((example == ExampleKind::Custom) != custom.has_value()) {
        config_error("a custom pair is required exactly when example is \"custom\"");
    }
    if (!std::isfinite(lambda_phase)) config_error("lambda_phase must be finite");
    try {
        noise.validate();
        if (custom) UnitaryPair(custom->u, custom->v);
    } catch (const Error& e) {
        config_error(e.what());
    }
    std::set<std::pair<int, int>> seen;
    for (const auto& [w, d] : shapes) {
        if (w < 1 || d < 1 || static_cast<long long>(w) * d != n_copies) {
            config_error("shape (" + std::to_string(w) + ", " + std::to_string(d) + ") does not multiply to N = " +
                         std::to_string(n_copies));
        }
        if (w > kMaxQubits) config_error("width " + std::to_string(w) + " exceeds " + std::to_string(kMaxQubits));
        if (!seen.insert({w, d}).second) config_error("duplicate shape");
    }
}

NoiseModel noise_from_json(const json& j) {
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "default") return NoiseModel::default_fixture();
        if (s == "ideal") return NoiseModel::ideal();
        config_error("noise must be \"default\", \"ideal\" or an object");
    }
    check_keys(j, {"p1", "p2", "p_read", "overrotation"}, "noise");
    NoiseModel n;
    n.p1 = j.value("p1", 0.0);
    n.p2 = j.value("p2", 0.0);
    n.p_read = j.value("p_read", 0.0);
    n.overrotation = j.value("overrotation", 0.0);
    try {
        n.validate();
    } catch (const Error& e) {
        config_error(e.what());
    }
    return n;
}

json noise_to_json(const NoiseModel& n) {
    return {{"p1", n.p1}, {"p2", n.p2}, {"p_read", n.p_read}, {"overrotation", n.overrotation}};
}

ExperimentConfig config_from_json(const json& j) {
    try {
        check_keys(j,
                   {"example", "custom", "lambda_phase", "n_copies", "shapes", "widths", "primitive", "measurement",
                    "shots", "noise", "seed", "output"},
                   "config");
        ExperimentConfig c;
        if (j.contains("example")) c.example = example_from_json(j["example"]);
        if (j.contains("custom")) {
            const json& cj = j["custom"];
            check_keys(cj, {"u", "v", "processing"}, "custom");
            if (!cj.contains("u") || !cj.contains("v")) config_error("custom needs both u and v");
            c.custom = CustomPair{matrix_from_json(cj["u"]), matrix_from_json(cj["v"]),
                                  parse_processing(cj.value("processing", std::string("vdagger")))};
        }
        c.lambda_phase = j.value("lambda_phase", 0.0);
        c.n_copies = j.value("n_copies", 1);
        if (j.contains("shapes") && j.contains("widths")) config_error("give either shapes or widths, not both");
        if (j.contains("shapes")) {
            const json& s = j["shapes"];
            if (s.is_string()) {
                if (s.get<std::string>() != "all") config_error("shapes must be \"all\" or a list of [w, d]");
            } else {
                for (const auto& p : s) {
                    if (!p.is_array() || p.size() != 2) config_error("each shape is [w, d]");
                    c.shapes.emplace_back(p[0].get<int>(), p[1].get<int>());
                }
            }
        }
        if (j.contains("widths")) {
            for (const auto& w : j["widths"]) {
                const int wi = w.get<int>();
                if (wi < 1 || c.n_copies % wi != 0) {
                    config_error("width " + std::to_string(wi) + " does not divide N = " + std::to_string(c.n_copies));
                }
                c.shapes.emplace_back(wi, c.n_copies / wi);
            }
        }
        if (j.contains("primitive")) c.primitive = parse_primitive(j["primitive"].get<std::string>());
        if (j.contains("measurement")) c.measurement = parse_measurement(j["measurement"].get<std::string>());
        if (j.contains("shots")) {
            if (!j["shots"].is_number_integer() || j["shots"].get<long long>() < 1) config_error("shots must be a positive integer");
            c.shots = j["shots"].get<std::uint64_t>();
        }
        if (j.contains("noise")) c.noise = noise_from_json(j["noise"]);
        if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("output")) {
            const json& o = j["output"];
            check_keys(o, {"path", "format"}, "output");
            c.out_path = o.value("path", std::string());
            c.format = o.value("format", std::string("csv"));
        }
        c.validate();
        return c;
    } catch (const json::exception& e) {
        config_error(std::string("malformed config: ") + e.what());
    }
}

json config_to_json(const ExperimentConfig& c) {
    json j;
    j["example"] = std::string(to_string(c.example));
    if (c.custom) {
        j["custom"] = {{"u", matrix_to_json(c.custom->u)},
                       {"v", matrix_to_json(c.custom->v)},
                       {"processing", std::string(to_string(c.custom->processing))}};
    }
    j["lambda_phase"] = c.lambda_phase;
    j["n_copies"] = c.n_copies;
    if (c.shapes.empty()) {
        j["shapes"] = "all";
    } else {
        j["shapes"] = json::array();
        for (const auto& [w, d] : c.shapes) j["shapes"].push_back({w, d});
    }
    j["primitive"] = std::string(to_string(c.primitive));
    if (c.measurement) j["measurement"] = std::string(to_string(*c.measurement));
    j["shots"] = c.shots;
    j["noise"] = noise_to_json(c.noise);
    j["seed"] = c.seed;
    j["output"] = {{"path", c.out_path}, {"format", c.format}};
    return j;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) config_error("cannot open config file '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        config_error("config file '" + path + "' is not valid JSON: " + e.what());
    }
    try {
        return config_from_json(j);
    } catch (const Error& e) {
        config_error("config file '" + path + "': " + e.what());
    }
}

json scheme_to_json(const SchemeSpec& s) {
    json j{{"example", std::string(to_string(s.example))},
           {"n_copies", s.n_copies},
           {"width", s.width},
           {"depth", s.depth},
           {"primitive", std::string(to_string(s.primitive))},
           {"measurement", std::string(to_string(s.measurement))},
           {"lambda", {s.lambda.real(), s.lambda.imag()}}};
    if (s.custom) {
        j["custom"] = {{"u", matrix_to_json(s.custom->u)},
                       {"v", matrix_to_json(s.custom->v)},
                       {"processing", std::string(to_string(s.custom->processing))}};
    }
    return j;
}

SchemeSpec scheme_from_json(const json& j) {
    try {
        check_keys(j, {"example", "n_copies", "width", "depth", "primitive", "measurement", "lambda", "custom"},
                   "scheme");
        SchemeSpec s;
        s.example = example_from_json(j.at("example"));
        s.n_copies = j.at("n_copies").get<int>();
        s.width = j.at("width").get<int>();
        s.depth = j.at("depth").get<int>();
        s.primitive = parse_primitive(j.value("primitive", std::string("cnot")));
        s.measurement = parse_measurement(j.value("measurement", std::string("short")));
        if (j.contains("lambda")) s.lambda = complex_from_json(j["lambda"]);
        if (j.contains("custom")) {
            const json& cj = j["custom"];
            s.custom = CustomPair{matrix_from_json(cj.at("u")), matrix_from_json(cj.at("v")),
                                  parse_processing(cj.value("processing", std::string("vdagger")))};
        }
        s.validate();
        return s;
    } catch (const json::exception& e) {
        config_error(std::string("malformed scheme: ") + e.what());
    } catch (const Error& e) {
        if (e.code() == ErrorCode::InvalidConfig) throw;
        config_error(e.what());
    }
}

std::uint64_t row_seed(std::uint64_t master, int w, int d) {
    return derive_seed(master, {static_cast<std::uint64_t>(w), static_cast<std::uint64_t>(d)});
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
    config.validate();
    const double theta = discrimination_report(config.pair()).theta;
    const double bound = optimal_success_n_copies(theta, static_cast<std::uint64_t>(config.n_copies));

    ExperimentResult result;
    for (const auto& [w, d] : config.resolved_shapes()) {
        const auto start = std::chrono::steady_clock::now();
        ResultRow row;
        row.w = w;
        row.d = d;
        row.measurement = config.measurement_kind();
        row.shots = config.shots;
        row.seed = row_seed(config.seed, w, d);
        row.theoretical_bound = bound;
        try {
            const SchemeSpec spec = config.spec_for(w, d);
            const ClassificationRule rule = rule_for_scheme(spec);
            const OutcomeCounts c0 = sample_counts(assemble_scheme(spec, Hypothesis::H0), config.shots, config.noise,
                                                   derive_seed(row.seed, {0}));
            const OutcomeCounts c1 = sample_counts(assemble_scheme(spec, Hypothesis::H1), config.shots, config.noise,
                                                   derive_seed(row.seed, {1}));
            TieBreaker ties(derive_seed(row.seed, {2}));
            const SuccessEstimate est = estimate_success(c0, c1, rule, ties, bound);
            row.p_succ_raw = est.p_succ;
            row.p_succ_swapped = answer_swap_correction({est}).front().p_succ;
            row.ties = est.ties;
        } catch (const Error& e) {
            throw Error(e.code(), "row w=" + std::to_string(w) + " d=" + std::to_string(d) + ": " + e.what());
        }
        row.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        result.rows.push_back(row);
    }
    return result;
}

SuboptimalResult run_suboptimal(int n_copies, int w, int d, const ExperimentConfig& config) {
    if (n_copies < 1 || w < 1 || d < 1 || static_cast<long long>(w) * d != n_copies) {
        config_error("suboptimal run needs w·d = N with positive w and d");
    }
    if (config.shots < 1) config_error("shots must be at least 1");
    try {
        config.noise.validate();
    } catch (const Error& e) {
        config_error(e.what());
    }
    SuboptimalResult r;
    r.n_copies = n_copies;
    r.w = w;
    r.d = d;
    r.seed = row_seed(config.seed, w, d);

    const ClassificationRule single = ClassificationRule::parity(1);
    TieBreaker ties(derive_seed(r.seed, {2}));
    std::uint64_t correct_votes = 0;
    std::uint64_t correct_single = 0;
    const std::uint64_t per_run = static_cast<std::uint64_t>(w) * config.shots;
    for (Hypothesis h : {Hypothesis::H0, Hypothesis::H1}) {
        const Circuit c = assemble_suboptimal_qubit(n_copies, d, h);
        const auto keys =
            sample_shots(c, per_run, config.noise, derive_seed(r.seed, {h == Hypothesis::H0 ? 0u : 1u}));
        std::vector<Hypothesis> labels(static_cast<std::size_t>(w));
        for (std::uint64_t s = 0; s < config.shots; ++s) {
            for (int q = 0; q < w; ++q) {
                const std::uint64_t key = keys[s * static_cast<std::uint64_t>(w) + static_cast<std::uint64_t>(q)];
                labels[static_cast<std::size_t>(q)] = classify(key & 1U ? "1" : "0", single, ties);
                correct_single += labels[static_cast<std::size_t>(q)] == h;
            }
            correct_votes += majority_vote(labels, ties) == h;
        }
    }
    r.estimate.shots = config.shots;
    r.estimate.ties = ties.draws();
    r.estimate.p_succ = static_cast<double>(correct_votes) / (2.0 * static_cast<double>(config.shots));
    r.p_single = static_cast<double>(correct_single) / (2.0 * static_cast<double>(per_run));
    r.closed_form_measured = majority_success_closed_form(w, r.p_single);
    r.closed_form_noiseless = majority_success_closed_form(w, 0.5 + 0.5 * std::sin(kPi / (2.0 * w)));
    r.estimate.theoretical_bound = optimal_success_n_copies(kPi / n_copies, static_cast<std::uint64_t>(n_copies));
    return r;
}

std::string to_csv(const ExperimentResult& r) {
    std::ostringstream os;
    os << kCsvHeader << '\n';
    for (const auto& row : r.rows) {
        os << row.w << ',' << row.d << ',' << to_string(row.measurement) << ',' << fmt(row.p_succ_raw) << ','
           << fmt(row.p_succ_swapped) << ',' << row.ties << ',' << fmt(row.theoretical_bound) << ',' << row.shots
           << ',' << row.seed << ',' << fmt(row.wall_time_s, "%.3f") << '\n';
    }
    return os.str();
}

json to_json(const ExperimentResult& r) {
    json rows = json::array();
    for (const auto& row : r.rows) {
        rows.push_back({{"w", row.w},
                        {"d", row.d},
                        {"measurement", std::string(to_string(row.measurement))},
                        {"p_succ_raw", row.p_succ_raw},
                        {"p_succ_swapped", row.p_succ_swapped},
                        {"ties", row.ties},
                        {"theoretical_bound", row.theoretical_bound},
                        {"shots", row.shots},
                        {"seed", row.seed},
                        {"wall_time_s", row.wall_time_s}});
    }
    return {{"rows", rows}};
}

std::string to_csv(const SuboptimalResult& r) {
    std::ostringstream os;
    os << "n,w,d,p_succ,p_single,closed_form_measured,closed_form_noiseless,ties,shots,seed\n";
    os << r.n_copies << ',' << r.w << ',' << r.d << ',' << fmt(r.estimate.p_succ) << ',' << fmt(r.p_single) << ','
       << fmt(r.closed_form_measured) << ',' << fmt(r.closed_form_noiseless) << ',' << r.estimate.ties << ','
       << r.estimate.shots << ',' << r.seed << '\n';
    return os.str();
}

json to_json(const SuboptimalResult& r) {
    return {{"n", r.n_copies},
            {"w", r.w},
            {"d", r.d},
            {"p_succ", r.estimate.p_succ},
            {"p_single", r.p_single},
            {"closed_form_measured", r.closed_form_measured},
            {"closed_form_noiseless", r.closed_form_noiseless},
            {"ties", r.estimate.ties},
            {"shots", r.estimate.shots},
            {"seed", r.seed}};
}

}  // namespace udisc
