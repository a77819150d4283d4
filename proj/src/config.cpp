#include "wkam/config.hpp"

#include <fstream>

#include "wkam/schema.hpp"

namespace wkam {

using nlohmann::json;

ProblemConfig ProblemConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return from_json(std::move(j), path.parent_path());
}

ProblemConfig ProblemConfig::from_json(json j, const std::filesystem::path& base_dir) {
    schema::enforce(schema::problem_config_schema(), j, "config");
    ProblemConfig cfg;
    cfg.raw = std::move(j);
    cfg.base_dir = base_dir;

    // Cross-field requirements the structural schema cannot express.
    const json& h = cfg.raw["hamiltonian"];
    const std::string kind = h["kind"].get<std::string>();
    if (kind == "mechanical" || kind == "shifted") {
        if (!h.contains("potential"))
            throw ConfigError("mechanical/shifted Hamiltonian needs a potential",
                              "/hamiltonian/potential");
    }
    if (kind == "shifted" && !h.contains("omega"))
        throw ConfigError("shifted Hamiltonian needs omega", "/hamiltonian/omega");
    if (kind == "tabulated" && !h.contains("table_path"))
        throw ConfigError("tabulated Hamiltonian needs table_path", "/hamiltonian/table_path");
    int dim = cfg.raw["grid"]["dim"].get<int>();
    if (h.contains("omega") && static_cast<int>(h["omega"].size()) != dim)
        throw ConfigError("omega length must equal grid.dim", "/hamiltonian/omega");
    return cfg;
}

HamiltonianSpec ProblemConfig::make_hamiltonian() const {
    const json& h = raw["hamiltonian"];
    const std::string kind = h["kind"].get<std::string>();
    const int dim = raw["grid"]["dim"].get<int>();

    HamiltonianSpec spec = [&] {
        if (kind == "tabulated") {
            std::filesystem::path p = h["table_path"].get<std::string>();
            if (p.is_relative()) p = base_dir / p;
            std::ifstream in(p);
            if (!in) throw ConfigError("cannot open Hamiltonian table: " + p.string(),
                                       "/hamiltonian/table_path");
            auto s = HamiltonianSpec::load_table_csv(in);
            if (s.dim() != dim)
                throw ConfigError("table dimension does not match grid.dim",
                                  "/hamiltonian/table_path");
            return s;
        }
        PotentialExpr V;
        try {
            V = PotentialExpr::parse(h["potential"].get<std::string>(), dim);
        } catch (const ParseError& e) {
            throw ConfigError(std::string("bad potential: ") + e.what(),
                              "/hamiltonian/potential");
        }
        return HamiltonianSpec::mechanical(std::move(V));
    }();

    if (h.contains("omega")) {
        auto w = h["omega"].get<std::vector<double>>();
        spec = spec.shifted(w);
    }
    return spec;
}

PeriodicGrid ProblemConfig::make_grid() const {
    return PeriodicGrid::make(raw["grid"]["dim"].get<int>(), raw["grid"]["n"].get<int>());
}

LaxOleinikConfig ProblemConfig::make_solver_config() const {
    LaxOleinikConfig cfg;
    if (!raw.contains("solver")) return cfg;
    const json& s = raw["solver"];
    if (s.contains("tau")) cfg.tau = s["tau"].get<double>();
    if (s.contains("v_max")) cfg.v_max = s["v_max"].get<double>();
    if (s.contains("refine")) cfg.refine = s["refine"].get<bool>();
    if (s.contains("anchor")) cfg.anchor = s["anchor"].get<std::size_t>();
    if (s.contains("tol")) cfg.tol = s["tol"].get<double>();
    if (s.contains("max_iter")) cfg.max_iter = s["max_iter"].get<int>();
    return cfg;
}

std::uint64_t ProblemConfig::seed() const {
    return raw.value("seed", 42u);
}

std::filesystem::path ProblemConfig::output_directory() const {
    if (raw.contains("outputs") && raw["outputs"].contains("directory"))
        return raw["outputs"]["directory"].get<std::string>();
    return "out";
}

std::vector<std::string> ProblemConfig::output_formats() const {
    if (raw.contains("outputs") && raw["outputs"].contains("formats"))
        return raw["outputs"]["formats"].get<std::vector<std::string>>();
    return {"csv", "json"};
}

json solve_report_json(const WeakKamSolution& sol, const PeriodicGrid& grid) {
    json j{{"c", sol.c},
           {"residual", sol.residual},
           {"iterations", sol.iterations},
           {"converged", sol.converged},
           {"grid", {{"dim", grid.dim}, {"n", grid.n}}},
           {"tau", sol.cfg.tau},
           {"v_max", sol.cfg.v_max},
           {"anchor", sol.cfg.anchor},
           {"drift_trace", sol.drift_trace}};
    schema::enforce(schema::solve_report_schema(), j, "solve report");
    return j;
}

} // namespace wkam
