#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "udisc/classification.hpp"
#include "udisc/scheme.hpp"
#include "udisc/simulator.hpp"

namespace udisc {

/// Single-qubit matrix from an expression such as "sx*rz(-pi/8)*sx".
/// Factors multiply left to right as written. Names: i, x, y, z, h, s, sdg,
/// t, tdg, sx, rx(a), ry(a), rz(a). Angles accept numbers, pi, + − * / and
/// parentheses.
ComplexMatrix parse_gate_expression(std::string_view text);

/// Batch description. Field names match the JSON config (docs/config.md).
struct ExperimentConfig {
    ExampleKind example = ExampleKind::Example1;
    std::optional<CustomPair> custom;
    double lambda_phase = 0.0;
    int n_copies = 1;
    std::vector<std::pair<int, int>> shapes;  // empty: every factorization with w ≤ 20
    Primitive primitive = Primitive::CNOT;
    std::optional<MeasurementKind> measurement;  // default: parity for Example 2, short otherwise
    std::uint64_t shots = 10000;                  // per hypothesis
    NoiseModel noise;
    std::uint64_t seed = 0;
    std::string out_path;
    std::string format = "csv";

    MeasurementKind measurement_kind() const;
    SchemeSpec spec_for(int width, int depth) const;
    std::vector<std::pair<int, int>> resolved_shapes() const;
    UnitaryPair pair() const;

    /// Throws InvalidConfig.
    void validate() const;
};

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& c);

/// Reads and validates a config file. Missing or malformed files raise
/// InvalidConfig naming the path.
ExperimentConfig load_config(const std::string& path);

NoiseModel noise_from_json(const nlohmann::json& j);
nlohmann::json noise_to_json(const NoiseModel& n);

nlohmann::json scheme_to_json(const SchemeSpec& s);
SchemeSpec scheme_from_json(const nlohmann::json& j);

struct ResultRow {
    int w = 0;
    int d = 0;
    MeasurementKind measurement = MeasurementKind::Short;
    double p_succ_raw = 0.0;
    double p_succ_swapped = 0.0;
    std::uint64_t ties = 0;
    double theoretical_bound = 1.0;
    std::uint64_t shots = 0;
    std::uint64_t seed = 0;
    double wall_time_s = 0.0;
};

struct ExperimentResult {
    std::vector<ResultRow> rows;
};

/// Child seeds: row = derive_seed(master, {w, d}); the H0 and H1 runs use
/// derive_seed(row, {0}) and derive_seed(row, {1}); ties use derive_seed(row, {2}).
std::uint64_t row_seed(std::uint64_t master, int w, int d);

ExperimentResult run_experiment(const ExperimentConfig& config);

struct SuboptimalResult {
    int n_copies = 0;
    int w = 0;
    int d = 0;
    SuccessEstimate estimate;
    double p_single = 0.0;                // measured single-qubit success
    double closed_form_measured = 0.0;    // majority closed form at p_single
    double closed_form_noiseless = 0.0;   // majority closed form at 1/2 + 1/2·sin(π/2w)
    std::uint64_t seed = 0;
};

/// w independent single-qubit Example 2 runs of depth d, combined per shot by
/// majority vote. Uses config.shots, noise and seed.
SuboptimalResult run_suboptimal(int n_copies, int w, int d, const ExperimentConfig& config);

inline constexpr std::string_view kCsvHeader =
    "w,d,measurement,p_succ_raw,p_succ_swapped,ties,theoretical_bound,shots,seed,wall_time_s";

std::string to_csv(const ExperimentResult& r);
nlohmann::json to_json(const ExperimentResult& r);
std::string to_csv(const SuboptimalResult& r);
nlohmann::json to_json(const SuboptimalResult& r);

}  // namespace udisc
