#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hfrac/analysis.hpp"
#include "hfrac/mesh.hpp"
#include "hfrac/solver.hpp"

namespace hfrac {

enum class Mode { solve, extremal, verify, exponents, mesh_info };

const char* to_string(Mode mode);
std::optional<Mode> parse_mode(const std::string& text);

/// Piecewise-linear profile in the gauge distance from the domain center,
/// held constant beyond the first and last knots.
struct RadialProfile {
    std::vector<std::pair<double, double>> knots;
    double operator()(double r) const;
};

/// Source of a nodal field: a constant, a radial profile, or a node file in the
/// solution CSV layout (last column holds the values).
struct FieldSpec {
    enum class Kind { constant, file, radial };
    Kind kind = Kind::constant;
    double value = 0.0;
    std::filesystem::path file;
    RadialProfile radial;
};

struct VerifySettings {
    std::size_t group_samples = 10000;
    std::size_t lemma_samples = 100000;
    std::size_t trial_fields = 100;
    std::size_t comparison_pairs = 20;
    std::size_t prop1_fields = 20;
    std::size_t gradient_fields = 5;
};

struct RunConfig {
    Mode mode = Mode::solve;
    std::uint64_t seed = 0;
    int n = 1;
    double s = 0.5;
    double p = 2.0;
    DomainSpec domain = DomainSpec::cube(1, -1.0, 1.0);
    double h = 0.4;
    double collar_width = 1.0;
    std::size_t max_nodes = kDefaultNodeBudget;
    FieldSpec delta{FieldSpec::Kind::constant, 0.5, {}, {}};
    std::optional<double> delta_epsilon;
    std::optional<double> delta_star;
    FieldSpec source{FieldSpec::Kind::constant, 1.0, {}, {}};
    double source_m = INFINITY;
    SolveConfig solver;
    bool write_solution = true;
    bool write_profile = true;
    VerifySettings verify;
    std::vector<double> refine_h;
    DimensionConvention gamma_convention = DimensionConvention::homogeneous_q;

    ModelParams params() const { return {n, s, p}; }
    /// Resolved settings as ordered key = value pairs, for the run summary.
    std::vector<std::pair<std::string, std::string>> echo() const;
};

/// Parses a flat `key = value` file (`#` comments). Unknown keys, duplicates and
/// constraint violations raise ConfigError naming the line or violated inequality.
RunConfig parse_config(const std::filesystem::path& path);
RunConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir = ".");

/// Values from a node file over `mesh`; every interior node must be present and
/// every row must match a mesh node.
Field read_node_file(const std::filesystem::path& path, const Mesh& mesh);

/// Resolves a field spec over the mesh (collar entries zero).
Field materialize(const FieldSpec& spec, const Mesh& mesh);

}  // namespace hfrac
