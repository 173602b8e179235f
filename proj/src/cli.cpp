#include "udisc/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "udisc/error.hpp"
#include "udisc/experiment.hpp"
#include "udisc/qasm.hpp"

namespace udisc {

namespace {

struct Options {
    std::optional<std::string> config;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> shots;
    std::optional<std::string> noise;
    std::optional<std::string> primitive;
    std::optional<std::string> measurement;
    std::optional<std::string> out;
    std::optional<std::string> format;
    std::optional<std::string> example;
    std::optional<int> n;
    std::optional<int> w;
    std::optional<int> d;
    std::optional<std::string> u;
    std::optional<std::string> v;
    std::optional<std::string> processing;
    std::optional<double> lambda_phase;
    std::string hypothesis = "h1";
};

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorCode::InvalidConfig, msg); }

NoiseModel parse_noise_flag(const std::string& s) {
    if (s == "default") return NoiseModel::default_fixture();
    if (s == "ideal") return NoiseModel::ideal();
    std::vector<double> v;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            v.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            config_error("--noise expects p1,p2,pread[,overrotation], 'default' or 'ideal'; got '" + s + "'");
        }
    }
    if (v.size() != 3 && v.size() != 4) {
        config_error("--noise expects 3 or 4 comma-separated values; got '" + s + "'");
    }
    NoiseModel n{v[0], v[1], v[2], v.size() == 4 ? v[3] : 0.0};
    try {
        n.validate();
    } catch (const Error& e) {
        config_error(e.what());
    }
    return n;
}

void add_common(CLI::App* sub, Options& o) {
    sub->add_option("--config", o.config, "JSON config file");
    sub->add_option("--seed", o.seed, "master seed");
    sub->add_option("--shots", o.shots, "shots per hypothesis");
    sub->add_option("--noise", o.noise, "p1,p2,pread[,overrotation] | default | ideal");
    sub->add_option("--primitive", o.primitive, "cnot | ecr");
    sub->add_option("--measurement", o.measurement, "short | xor | parity");
    sub->add_option("--out", o.out, "output file (default: stdout)");
    sub->add_option("--format", o.format, "csv | json");
}

void add_pair(CLI::App* sub, Options& o) {
    sub->add_option("--example", o.example, "1 | 2 | custom");
    sub->add_option("--n", o.n, "number of black-box uses N");
    sub->add_option("--u", o.u, "gate expression for U, e.g. 'sx*rz(-pi/8)*sx'");
    sub->add_option("--v", o.v, "gate expression for V");
    sub->add_option("--processing", o.processing, "none | vdagger (custom pairs)");
    sub->add_option("--lambda-phase", o.lambda_phase, "phase of the discriminator's second branch");
}

ExperimentConfig make_config(const Options& o) {
    ExperimentConfig c = o.config ? load_config(*o.config) : ExperimentConfig{};
    if (o.u || o.v) {
        if (!o.u || !o.v) config_error("--u and --v must be given together");
        c.example = ExampleKind::Custom;
        c.custom = CustomPair{parse_gate_expression(*o.u), parse_gate_expression(*o.v), Processing::VDagger};
    }
    if (o.example) {
        if (*o.example == "1") c.example = ExampleKind::Example1;
        else if (*o.example == "2") c.example = ExampleKind::Example2;
        else if (*o.example == "custom") c.example = ExampleKind::Custom;
        else config_error("--example must be 1, 2 or custom");
        if (c.example != ExampleKind::Custom) c.custom.reset();
    }
    if (o.processing) {
        if (!c.custom) config_error("--processing applies to custom pairs only");
        c.custom->processing = parse_processing(*o.processing);
    }
    if (o.n) {
        if (*o.n != c.n_copies) c.shapes.clear();
        c.n_copies = *o.n;
    }
    if (o.lambda_phase) c.lambda_phase = *o.lambda_phase;
    if (o.primitive) c.primitive = parse_primitive(*o.primitive);
    if (o.measurement) c.measurement = parse_measurement(*o.measurement);
    if (o.shots) c.shots = *o.shots;
    if (o.seed) c.seed = *o.seed;
    if (o.noise) c.noise = parse_noise_flag(*o.noise);
    if (o.out) c.out_path = *o.out;
    return c;
}

void emit(const std::string& text, const std::optional<std::string>& path, std::ostream& out) {
    if (!path || path->empty()) {
        out << text;
        return;
    }
    std::ofstream f(*path);
    if (!f) throw Error(ErrorCode::InvalidConfig, "cannot write output file '" + *path + "'");
    f << text;
    if (!f) throw std::runtime_error("write to '" + *path + "' failed");
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

int cmd_theory(const Options& o, std::ostream& out) {
    ExperimentConfig c = make_config(o);
    if (o.format && *o.format != "text" && *o.format != "json") config_error("theory --format is text or json");
    c.validate();
    const UnitaryPair pair = c.pair();
    const DiscriminationReport r = discrimination_report(pair);
    const auto n = static_cast<std::uint64_t>(c.n_copies);
    const double p_n = optimal_success_n_copies(r.theta, n);
    std::string text;
    if (o.format && *o.format == "json") {
        nlohmann::json j{{"theta", r.theta},
                         {"theta_over_pi", r.theta / kPi},
                         {"nu", r.nu},
                         {"diamond", r.diamond},
                         {"p_succ_bound", r.p_succ_bound},
                         {"min_copies", r.min_copies ? nlohmann::json(*r.min_copies) : nlohmann::json("infinite")},
                         {"n_copies", n},
                         {"p_succ_n_copies", p_n}};
        text = j.dump(2) + "\n";
    } else {
        text += "theta = " + fmt(r.theta) + " (" + fmt(r.theta / kPi) + " pi)\n";
        text += "nu = " + fmt(r.nu) + "\n";
        text += "diamond = " + fmt(r.diamond) + "\n";
        text += "p_succ_bound = " + fmt(r.p_succ_bound) + "\n";
        text += "min_copies = " + (r.min_copies ? std::to_string(*r.min_copies) : std::string("infinite")) + "\n";
        text += "p_succ_n_copies(n=" + std::to_string(n) + ") = " + fmt(p_n) + "\n";
    }
    emit(text, c.out_path.empty() ? std::nullopt : std::optional(c.out_path), out);
    return 0;
}

nlohmann::json circuit_to_json(const Circuit& c) {
    nlohmann::json ops = nlohmann::json::array();
    for (const Gate& g : c.ops()) {
        nlohmann::json op{{"gate", std::string(gate_name(g.kind))}};
        op["qubits"] = g.arity() == 2 ? nlohmann::json::array({g.qubits[0], g.qubits[1]}) : nlohmann::json::array({g.qubits[0]});
        if (g.kind == GateKind::RZ) op["angle"] = g.angle;
        if (!g.is_named()) {
            nlohmann::json m = nlohmann::json::array();
            for (std::size_t r = 0; r < g.matrix->rows(); ++r) {
                nlohmann::json row = nlohmann::json::array();
                for (std::size_t k = 0; k < g.matrix->cols(); ++k) {
                    row.push_back({(*g.matrix)(r, k).real(), (*g.matrix)(r, k).imag()});
                }
                m.push_back(row);
            }
            op["matrix"] = m;
        }
        ops.push_back(op);
    }
    return {{"n_qubits", c.n_qubits()}, {"ops", ops}, {"measured", c.measured()}};
}

int cmd_build(const Options& o, std::ostream& out) {
    ExperimentConfig c = make_config(o);
    c.validate();
    const int w = o.w.value_or(o.d ? c.n_copies / std::max(*o.d, 1) : c.n_copies);
    const int d = o.d.value_or(w > 0 ? c.n_copies / w : 0);
    Hypothesis h;
    if (o.hypothesis == "h0") h = Hypothesis::H0;
    else if (o.hypothesis == "h1") h = Hypothesis::H1;
    else config_error("--hypothesis must be h0 or h1");

    SchemeSpec spec = c.spec_for(w, d);
    try {
        spec.validate();
    } catch (const Error& e) {
        config_error(e.what());
    }
    const Circuit circ = assemble_scheme(spec, h);
    const std::string format = o.format.value_or("qasm");
    std::string text;
    if (format == "qasm") {
        text = emit_qasm(circ);
    } else if (format == "json") {
        nlohmann::json j{{"scheme", scheme_to_json(spec)},
                         {"hypothesis", o.hypothesis},
                         {"circuit", circuit_to_json(circ)}};
        const ClassificationRule rule = rule_for_scheme(spec);
        if (rule.kind() == RuleKind::OutcomeSets) j["outcome_sets"] = {{"h0", rule.set0()}, {"h1", rule.set1()}};
        text = j.dump(2) + "\n";
    } else {
        config_error("build --format is qasm or json");
    }
    emit(text, o.out, out);
    return 0;
}

int cmd_run(const Options& o, std::ostream& out, bool sweep) {
    if (!sweep && !o.config) config_error("run needs --config");
    ExperimentConfig c = make_config(o);
    if (o.format) c.format = *o.format;
    if (sweep) c.shapes.clear();
    c.validate();
    const ExperimentResult r = run_experiment(c);
    const std::string text = c.format == "json" ? to_json(r).dump(2) + "\n" : to_csv(r);
    emit(text, c.out_path.empty() ? std::nullopt : std::optional(c.out_path), out);
    return 0;
}

int cmd_suboptimal(const Options& o, std::ostream& out) {
    ExperimentConfig c = make_config(o);
    if (o.format) c.format = *o.format;
    if (!o.w && !o.d) config_error("suboptimal needs --w or --d");
    const int w = o.w.value_or(c.n_copies / std::max(o.d.value_or(1), 1));
    const int d = o.d.value_or(w > 0 ? c.n_copies / w : 0);
    if (c.format != "csv" && c.format != "json") config_error("format must be csv or json");
    const SuboptimalResult r = run_suboptimal(c.n_copies, w, d, c);
    const std::string text = c.format == "json" ? to_json(r).dump(2) + "\n" : to_csv(r);
    emit(text, c.out_path.empty() ? std::nullopt : std::optional(c.out_path), out);
    return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Multi-copy discrimination of qubit unitary channels", "udisc"};
    app.require_subcommand(1);
    Options o;

    auto* theory = app.add_subcommand("theory", "closed-form discrimination report for a pair");
    add_pair(theory, o);
    theory->add_option("--config", o.config, "JSON config file");
    theory->add_option("--format", o.format, "text | json");
    theory->add_option("--out", o.out, "output file (default: stdout)");

    auto* build = app.add_subcommand("build", "emit the circuit of one scheme");
    add_pair(build, o);
    add_common(build, o);
    build->add_option("--w", o.w, "width");
    build->add_option("--d", o.d, "depth");
    build->add_option("--hypothesis", o.hypothesis, "h0 | h1")->capture_default_str();

    auto* run = app.add_subcommand("run", "run the experiment described by a config file");
    add_pair(run, o);
    add_common(run, o);

    auto* sweep = app.add_subcommand("sweep", "run every factorization w·d = N with w <= 20");
    add_pair(sweep, o);
    add_common(sweep, o);

    auto* sub = app.add_subcommand("suboptimal", "majority vote over independent sequential qubits");
    add_common(sub, o);
    sub->add_option("--n", o.n, "number of black-box uses N");
    sub->add_option("--w", o.w, "number of qubits voting");
    sub->add_option("--d", o.d, "depth per qubit");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        if (theory->parsed()) return cmd_theory(o, out);
        if (build->parsed()) return cmd_build(o, out);
        if (run->parsed()) return cmd_run(o, out, false);
        if (sweep->parsed()) return cmd_run(o, out, true);
        if (sub->parsed()) return cmd_suboptimal(o, out);
    } catch (const Error& e) {
        err << "udisc: " << e.what() << '\n';
        switch (e.code()) {
            case ErrorCode::InvalidConfig:
            case ErrorCode::InvalidSpec:
            case ErrorCode::ParseError: return 1;
            default: return 2;
        }
    } catch (const std::exception& e) {
        err << "udisc: " << e.what() << '\n';
        return 2;
    }
    return 1;
}

}  // namespace udisc
