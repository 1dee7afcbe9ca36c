#pragma once

// Scenario files, theorem suites and their reports.
//
// Scenario (JSON):
//   {"mode": "single" | "doubly" | "tensor" | "free",
//    "factors": [{"matrix": <matrix or "path">, "state": <state or "path">}, ...],
//    "state": <state or "path">,           optional, doubly mode
//    "degree": N, "trunc": L, "poly_degree": d, "max_alt": m,
//    "samples": s, "tol": t, "seed": k, "minimal": false}
// Relative paths resolve against the scenario file's directory.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "freedil/matrix_io.hpp"

namespace freedil {

inline constexpr const char* kVersion = "0.1.0";

enum class Mode { single, doubly, tensor, free };

std::string to_string(Mode m);
Mode mode_from_string(const std::string& s);

struct ScenarioFactor {
    ComplexMatrix matrix;
    std::optional<State> state;
};

struct Scenario {
    Mode mode = Mode::single;
    std::vector<ScenarioFactor> factors;
    std::optional<State> state;
    int degree = 3;
    int trunc = 4;
    int poly_degree = 3;
    int max_alt = 4;
    int samples = 100;
    double tol = 1e-8;
    std::uint64_t seed = 1;
    bool minimal = false;

    // (path, sha256) of every file read while ingesting, in read order.
    std::vector<std::pair<std::string, std::string>> input_hashes;

    // Inline form; scenario_from_json(to_json()) reproduces the scenario exactly.
    Json to_json() const;

    // Throws IngestError on the first violated invariant.
    void validate() const;
};

// `base` resolves relative file references.
Scenario scenario_from_json(const Json& j, const std::filesystem::path& base = {});
Scenario ingest(const std::filesystem::path& path);

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

struct ReportEntry {
    std::string name;
    double residual = 0.0;
    Json budget = Json::object();
    std::string witness;
    bool pass = false;
    std::string message;
    double wall_ms = 0.0;
    Json detail; // optional structured payload (e.g. a check report)
};

struct Report {
    Json scenario;
    std::vector<std::pair<std::string, std::string>> input_hashes;
    std::vector<ReportEntry> entries;
    Json summary = Json::object(); // construction facts (dimensions, ...)

    bool pass() const;
    Json to_json(bool timing = true) const;
    std::string to_text() const;
};

// Drops every "wall_ms" field, recursively.
Json strip_timing(Json j);

// Runs the mode's construction and every applicable check. Library errors
// become failing entries; this function does not throw for bad scenarios.
Report run_theorem_suite(const Scenario& sc);

// Generators with the state they are checked against.
struct Family {
    std::vector<ComplexMatrix> gens;
    State state;
};

// input: the factor matrices (tensor mode: their tensor model; free mode: the
// free realization S_i with the vacuum). dilated: the mode's unitaries with the
// compressed state.
Family build_family(const Scenario& sc, bool dilated);

// The report for a scenario that could not be read.
Report ingestion_failure_report(const std::string& source, const std::string& message);

} // namespace freedil
