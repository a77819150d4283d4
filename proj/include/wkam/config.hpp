#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "wkam/hamiltonian.hpp"
#include "wkam/lax_oleinik.hpp"

namespace wkam {

/// A single-document JSON run configuration, schema-validated on load
/// (unknown keys rejected).
struct ProblemConfig {
    nlohmann::json raw;
    std::filesystem::path base_dir; ///< for resolving relative table paths

    static ProblemConfig load(const std::filesystem::path& path);
    static ProblemConfig from_json(nlohmann::json j,
                                   const std::filesystem::path& base_dir = ".");

    HamiltonianSpec make_hamiltonian() const;
    PeriodicGrid make_grid() const;
    LaxOleinikConfig make_solver_config() const;
    std::uint64_t seed() const;
    std::filesystem::path output_directory() const;
    std::vector<std::string> output_formats() const; ///< subset of {csv, json}
};

/// Solve report as emitted by the CLI (validates against the shipped schema).
nlohmann::json solve_report_json(const WeakKamSolution& sol, const PeriodicGrid& grid);

} // namespace wkam
