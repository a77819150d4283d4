#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "wkam/config.hpp"
#include "wkam/flows.hpp"
#include "wkam/mather.hpp"
#include "wkam/schema.hpp"
#include "wkam/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace wkam;

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_override;
    std::optional<std::uint64_t> seed_override;
};

fs::path resolve_out_dir(const ProblemConfig& cfg, const CommonOpts& opts) {
    if (!opts.out_override.empty()) return opts.out_override;
    if (const char* env = std::getenv("WKAM_OUT"); env && *env) return env;
    return cfg.output_directory();
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    if (!out) throw ConfigError("cannot write " + p.string());
    out << text;
}

void write_grid_function(const fs::path& dir, const std::string& stem, const GridFunction& u,
                         const std::vector<std::string>& formats) {
    for (const auto& f : formats) {
        if (f == "csv") {
            std::ofstream out(dir / (stem + ".csv"));
            u.to_csv(out);
        } else if (f == "json") {
            json j = u.to_json();
            schema::enforce(schema::grid_function_schema(), j, "grid function");
            write_text(dir / (stem + ".json"), j.dump(2) + "\n");
        }
    }
}

struct LoadedArtifacts {
    GridFunction u;
    json report;
    LaxOleinikConfig cfg;
};

LoadedArtifacts load_artifacts(const fs::path& dir) {
    std::ifstream uc(dir / "u.csv");
    if (!uc) throw ConfigError("cannot open solution artifact: " + (dir / "u.csv").string());
    LoadedArtifacts a{GridFunction::from_csv(uc), {}, {}};
    std::ifstream rj(dir / "report.json");
    if (!rj) throw ConfigError("cannot open solve report: " + (dir / "report.json").string());
    rj >> a.report;
    schema::enforce(schema::solve_report_schema(), a.report, "solve report");
    a.cfg.tau = a.report["tau"].get<double>();
    if (a.report.contains("v_max")) a.cfg.v_max = a.report["v_max"].get<double>();
    if (a.report.contains("anchor")) a.cfg.anchor = a.report["anchor"].get<std::size_t>();
    return a;
}

int cmd_solve(const CommonOpts& opts) {
    auto cfg = ProblemConfig::load(opts.config_path);
    auto H = cfg.make_hamiltonian();
    auto grid = cfg.make_grid();
    auto sc = cfg.make_solver_config();

    auto sol = solve_weak_kam(H, grid, sc);
    fs::path out = resolve_out_dir(cfg, opts);
    fs::create_directories(out);
    write_grid_function(out, "u", sol.u, cfg.output_formats());
    write_text(out / "report.json", solve_report_json(sol, grid).dump(2) + "\n");

    std::printf("c = %.12g\nresidual = %.6g\niterations = %d\n", sol.c, sol.residual,
                sol.iterations);
    if (!sol.converged) {
        std::fprintf(stderr, "solver did not converge within max_iter\n");
        return 3;
    }
    return 0;
}

std::vector<Vec2> parse_omega_range(const std::string& range, const std::string& dir_spec,
                                    int dim) {
    double a, b, step;
    if (std::sscanf(range.c_str(), "%lf:%lf:%lf", &a, &b, &step) != 3)
        throw ConfigError("bad --omega-range, expected A:B:STEP");
    if (step <= 0.0 || b < a) throw ConfigError("empty omega range");
    Vec2 dir{1.0, 0.0};
    if (!dir_spec.empty()) {
        if (dim == 1) {
            if (std::sscanf(dir_spec.c_str(), "%lf", &dir[0]) != 1)
                throw ConfigError("bad --omega-dir");
        } else if (std::sscanf(dir_spec.c_str(), "%lf,%lf", &dir[0], &dir[1]) != 2) {
            throw ConfigError("bad --omega-dir, expected dx,dy");
        }
    }
    std::vector<Vec2> out;
    for (double t = a; t <= b + 1e-12; t += step)
        out.push_back({t * dir[0], dim == 2 ? t * dir[1] : 0.0});
    if (out.empty()) throw ConfigError("empty omega range");
    return out;
}

int cmd_alpha(const CommonOpts& opts, const std::string& range, const std::string& dir_spec) {
    auto cfg = ProblemConfig::load(opts.config_path);
    auto H = cfg.make_hamiltonian();
    auto grid = cfg.make_grid();
    auto sc = cfg.make_solver_config();
    auto omegas = parse_omega_range(range, dir_spec, H.dim());

    auto table = alpha_sweep(H, omegas, grid, sc);
    double max_alpha = 1.0;
    for (const auto& e : table.entries) max_alpha = std::max(max_alpha, std::abs(e.alpha));
    double conv_tol = 3.0 * sc.tol * max_alpha;
    auto conv = convexity_check(table, conv_tol);

    fs::path out = resolve_out_dir(cfg, opts);
    fs::create_directories(out);
    {
        std::ofstream csv(out / "alpha.csv");
        table.to_csv(csv);
    }
    json entries = json::array();
    bool all_converged = true;
    for (const auto& e : table.entries) {
        json w = json::array();
        for (int a = 0; a < table.dim; ++a) w.push_back(e.omega[a]);
        entries.push_back({{"omega", w},
                           {"alpha", e.alpha},
                           {"residual", e.residual},
                           {"converged", e.converged}});
        all_converged = all_converged && e.converged;
    }
    json report{{"dim", table.dim},
                {"entries", entries},
                {"convexity",
                 {{"pass", conv.pass},
                  {"worst_second_difference", conv.worst_second_difference},
                  {"worst_index", conv.worst_index},
                  {"tol", conv_tol}}}};
    schema::enforce(schema::alpha_report_schema(), report, "alpha report");
    write_text(out / "alpha_report.json", report.dump(2) + "\n");

    std::printf("alpha sweep: %zu entries, convexity %s\n", table.entries.size(),
                conv.pass ? "pass" : "FAIL");
    return all_converged ? 0 : 3;
}

int cmd_verify(const CommonOpts& opts, const std::string& artifacts, double smooth_eps) {
    auto cfg = ProblemConfig::load(opts.config_path);
    auto H = cfg.make_hamiltonian();
    Lagrangian L(H);

    fs::path dir = artifacts.empty() ? resolve_out_dir(cfg, opts) : fs::path(artifacts);
    auto art = load_artifacts(dir);
    if (!(art.u.grid() == cfg.make_grid()))
        throw ConfigError("artifact grid does not match the config grid");
    const double c = art.report["c"].get<double>();
    const PeriodicGrid& grid = art.u.grid();
    const double h = grid.h;
    LaxOleinikConfig sc = art.cfg;
    if (sc.v_max <= 0.0) sc = sc.resolved(H, grid);
    std::uint64_t seed = opts.seed_override.value_or(cfg.seed());

    VerificationReport rep;
    rep.add(check_subsolution(H, art.u, c, 5 * h));
    rep.add(check_domination(L, art.u, c, 500, seed, 5 * h));

    auto step = lo_step(L, art.u, sc);
    double resid = 0.0;
    for (std::size_t i = 0; i < art.u.size(); ++i)
        resid = std::max(resid, std::abs(step.Tu[i] - art.u[i] + c * sc.tau));
    CheckEntry fp;
    fp.name = "fixed_point";
    fp.value = resid;
    fp.tol = 1e-6;
    fp.pass = resid <= fp.tol;
    fp.detail = "sup |T u - u + c tau| recomputed from artifacts";
    rep.add(fp);

    const int horizon = 200;
    WeakKamSolution shim;
    shim.u = art.u;
    shim.c = c;
    shim.cfg = sc;
    shim.history = record_history(L, art.u, sc, horizon);
    std::vector<std::size_t> endpoints;
    for (int i = 0; i < 16; ++i)
        endpoints.push_back(static_cast<std::size_t>(i) * (grid.size() / 16));
    rep.add(check_calibration(shim, L, endpoints, horizon));

    rep.add(check_evolution(H, art.u, sc, 100));

    fs::path out = resolve_out_dir(cfg, opts);
    fs::create_directories(out);

    if (smooth_eps > 0.0) {
        auto sm = smooth_subsolution(H, art.u, c, smooth_eps);
        rep.add(sm.entry);
        write_grid_function(out, "smooth", sm.g, cfg.output_formats());
        json sj{{"epsilon", smooth_eps}, {"delta", sm.delta},
                {"sup_err", sm.sup_err},  {"max_violation", sm.max_violation},
                {"hull_pass", sm.hull_pass}, {"pass", sm.pass}};
        schema::enforce(schema::smooth_report_schema(), sj, "smooth report");
        write_text(out / "smooth_report.json", sj.dump(2) + "\n");
    }

    json vj = rep.to_json();
    schema::enforce(schema::verification_report_schema(), vj, "verification report");
    write_text(out / "verification.json", vj.dump(2) + "\n");

    for (const auto& e : rep.checks)
        std::printf("%-12s %s  value=%.6g tol=%.6g\n", e.name.c_str(),
                    e.pass ? "pass" : "FAIL", e.value, e.tol);
    return rep.all_pass() ? 0 : 1;
}

int cmd_flow(const CommonOpts& opts, const std::string& x0s, const std::string& p0s,
             double t_end, double dt) {
    auto cfg = ProblemConfig::load(opts.config_path);
    auto H = cfg.make_hamiltonian();
    PhasePoint start;
    auto parse_vec = [&](const std::string& s, Vec2& v, const char* what) {
        if (H.dim() == 1) {
            if (std::sscanf(s.c_str(), "%lf", &v[0]) != 1)
                throw ConfigError(std::string("bad ") + what);
        } else if (std::sscanf(s.c_str(), "%lf,%lf", &v[0], &v[1]) != 2) {
            throw ConfigError(std::string("bad ") + what + ", expected a,b");
        }
    };
    parse_vec(x0s, start.x, "--x0");
    parse_vec(p0s, start.p, "--p0");

    auto traj = integrate(H, start, t_end, dt);
    auto consts = TonelliConstants::estimate(H, std::vector<double>{0.0, 1.0},
                                             std::vector<double>{1.0}, 32);
    auto mom = momentum_bound_check(traj, consts);

    fs::path out = resolve_out_dir(cfg, opts);
    fs::create_directories(out);
    {
        std::ofstream csv(out / "trajectory.csv");
        traj.to_csv(csv);
    }
    std::printf("energy drift = %.6g\nmomentum bound: max|p| = %.6g vs C*(1)+E = %.6g -> %s\n",
                traj.max_energy_drift(), mom.max_p_norm, mom.bound,
                mom.pass ? "pass" : "FAIL");
    return mom.pass ? 0 : 1;
}

int cmd_smooth(const CommonOpts& opts, const std::string& artifacts, double eps) {
    auto cfg = ProblemConfig::load(opts.config_path);
    auto H = cfg.make_hamiltonian();
    fs::path dir = artifacts.empty() ? resolve_out_dir(cfg, opts) : fs::path(artifacts);
    auto art = load_artifacts(dir);
    const double c = art.report["c"].get<double>();

    auto sm = smooth_subsolution(H, art.u, c, eps);
    fs::path out = resolve_out_dir(cfg, opts);
    fs::create_directories(out);
    write_grid_function(out, "smooth", sm.g, cfg.output_formats());
    json sj{{"epsilon", eps},        {"delta", sm.delta},
            {"sup_err", sm.sup_err}, {"max_violation", sm.max_violation},
            {"hull_pass", sm.hull_pass}, {"pass", sm.pass}};
    schema::enforce(schema::smooth_report_schema(), sj, "smooth report");
    write_text(out / "smooth_report.json", sj.dump(2) + "\n");
    std::printf("smoothing: sup_err=%.6g max_violation=%.6g -> %s\n", sm.sup_err,
                sm.max_violation, sm.pass ? "pass" : "FAIL");
    return sm.pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"weak KAM solver for Tonelli Hamiltonians on flat tori"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::string omega_range, omega_dir, artifacts;
    std::string x0 = "0", p0 = "0";
    double t_end = 10.0, dt = 1e-3, smooth_eps = 0.0, eps = 0.05;
    std::uint64_t seed_val = 0;
    bool seed_set = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opts.config_path, "problem config JSON")->required();
        sub->add_option("--out", opts.out_override, "output directory override");
        sub->add_option("--seed", seed_val, "seed override for stochastic checks")
            ->each([&](const std::string&) { seed_set = true; });
    };

    auto* solve = app.add_subcommand("solve", "compute the weak KAM solution and c(H)");
    add_common(solve);

    auto* alpha = app.add_subcommand("alpha", "sweep Mather's alpha function");
    add_common(alpha);
    alpha->add_option("--omega-range", omega_range, "A:B:STEP scalar range")->required();
    alpha->add_option("--omega-dir", omega_dir, "direction (dx[,dy]) scaled by the range");

    auto* verify = app.add_subcommand("verify", "verify solution artifacts");
    add_common(verify);
    verify->add_option("--artifacts", artifacts, "artifact directory (default: outputs)");
    verify->add_option("--smooth", smooth_eps, "also run subsolution smoothing at eps");

    auto* flow = app.add_subcommand("flow", "integrate the Hamiltonian flow");
    add_common(flow);
    flow->add_option("--x0", x0, "initial position");
    flow->add_option("--p0", p0, "initial momentum");
    flow->add_option("--t-end", t_end, "integration time");
    flow->add_option("--dt", dt, "time step");

    auto* smooth = app.add_subcommand("smooth", "mollify a stored subsolution");
    add_common(smooth);
    smooth->add_option("--artifacts", artifacts, "artifact directory (default: outputs)");
    smooth->add_option("--epsilon", eps, "smoothing epsilon");

    CLI11_PARSE(app, argc, argv);
    if (seed_set) opts.seed_override = seed_val;

    try {
        if (solve->parsed()) return cmd_solve(opts);
        if (alpha->parsed()) return cmd_alpha(opts, omega_range, omega_dir);
        if (verify->parsed()) return cmd_verify(opts, artifacts, smooth_eps);
        if (flow->parsed()) return cmd_flow(opts, x0, p0, t_end, dt);
        if (smooth->parsed()) return cmd_smooth(opts, artifacts, eps);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const ParseError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const BoundaryError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    }
    return 0;
}
