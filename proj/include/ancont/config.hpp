#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "ancont/geometry.hpp"

namespace ancont {

struct SolverConfig {
    int poly_degree = 8;        // 0..64
    int pole_degree = 6;        // 0..64
    int samples = 256;          // 16..4096, per component (per edge for polygons)
    double tolerance = 1e-8;    // relative minimax gap, (0, 1)
    int max_iterations = 2000;  // 1..100000
    int lp_directions = 64;     // 8..512
};

struct CovarianceParams {
    Complex a{1.0, 0.0};  // nonzero
    Complex b{0.0, 0.0};
};

struct QuantizeParams {
    double lambda = 1.0;  // (0, 1e6]
    int n_max = 10;       // 1..64
};

// Parsed run configuration with every default filled in. Sections that make
// no sense without explicit input (domain, covariance) stay unset.
struct RunConfig {
    std::optional<DomainSpec> domain;
    SolverConfig solver;
    std::optional<CovarianceParams> covariance;
    QuantizeParams quantize;
    double classify_tolerance = 5e-3;  // relative gap threshold, (0, 1)
    int sweep_points = 8;              // 2..256
    std::uint64_t seed = 0;
};

// Strict parse: unknown keys anywhere in the document are rejected, integer
// fields must be JSON integers, and every numeric parameter is range-checked.
// Throws ConfigError naming the offending field (or the line/column for
// malformed JSON).
RunConfig parse_config(const std::string& json_text);

// parse_config on the file's contents; unreadable path -> ConfigError.
RunConfig load_config(const std::string& path);

// Canonical echo of the effective configuration for report embedding; the
// same RunConfig always serializes to the same bytes.
nlohmann::ordered_json config_echo(const RunConfig& config);

}  // namespace ancont
