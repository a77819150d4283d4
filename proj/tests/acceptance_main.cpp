// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one pass/fail line per criterion. Exit status 0 iff all pass.

#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "wkam/flows.hpp"
#include "wkam/mather.hpp"
#include "wkam/verify.hpp"

using namespace wkam;
using clk = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%2d] %-38s %s  %s\n", id, name.c_str(), pass ? "PASS" : "FAIL",
                detail.c_str());
    if (!pass) ++g_failures;
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

HamiltonianSpec pendulum() {
    return HamiltonianSpec::mechanical(PotentialExpr::parse("cos(2*pi*x)", 1));
}

struct Shared {
    PeriodicGrid grid = PeriodicGrid::make(1, 256);

    // criterion-1 solve at the pinned parameters
    WeakKamSolution coarse;
    double coarse_seconds = 0.0;

    // verification-resolution solve: tau at half-cell scale so the h-scale
    // tolerances of the structural checks apply; history for backtracking
    WeakKamSolution fine;

    Shared() {
        LaxOleinikConfig c1;
        c1.tau = 0.02;
        auto t0 = clk::now();
        coarse = solve_weak_kam(pendulum(), grid, c1);
        coarse_seconds = std::chrono::duration<double>(clk::now() - t0).count();

        LaxOleinikConfig c2;
        c2.tau = 0.002;
        fine = solve_weak_kam(pendulum(), grid, c2, 200);
    }
};

// --------------------------------------------------------------------------

void criterion1_mechanical_critical_value(const Shared& sh) {
    bool ok = sh.coarse.converged && sh.coarse.c >= 0.99 && sh.coarse.c <= 1.01 &&
              sh.coarse_seconds < 10.0;

    auto H2 = HamiltonianSpec::mechanical(PotentialExpr::parse("2*cos(2*pi*x)", 1));
    LaxOleinikConfig cfg;
    cfg.tau = 0.02;
    auto t0 = clk::now();
    auto s2 = solve_weak_kam(H2, sh.grid, cfg);
    double sec2 = std::chrono::duration<double>(clk::now() - t0).count();
    ok = ok && s2.converged && s2.c >= 1.98 && s2.c <= 2.02 && sec2 < 10.0;

    report(1, "mechanical critical value", ok,
           fmt("c=%.6f (%.2fs), 2V: c=%.6f (%.2fs)", sh.coarse.c, sh.coarse_seconds, s2.c,
               sec2));
}

void criterion2_semigroup_laws(const Shared&) {
    auto g = PeriodicGrid::make(1, 64);
    Lagrangian L(pendulum());
    LaxOleinikConfig cfg;
    cfg.tau = 0.1;
    cfg.v_max = 8.0; // window wraps the torus: total pointwise min
    cfg.refine = false;

    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> unit(-1.0, 1.0), kdist(-3.0, 3.0);
    int failures = 0;
    double worst_comm = 0.0, worst_exp = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        std::vector<double> uv(g.size()), vv(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) {
            uv[i] = unit(rng);
            vv[i] = unit(rng);
        }
        GridFunction u(g, uv), v(g, vv);
        auto Tu = lo_step(L, u, cfg).Tu;
        auto Tv = lo_step(L, v, cfg).Tu;

        // monotonicity against the pointwise max
        std::vector<double> wv(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) wv[i] = std::max(uv[i], vv[i]);
        auto Tw = lo_step(L, GridFunction(g, wv), cfg).Tu;
        for (std::size_t i = 0; i < g.size(); ++i)
            if (!(Tu[i] <= Tw[i])) ++failures;

        // constant commutation (machine precision)
        double k = kdist(rng);
        auto Tuk = lo_step(L, u + k, cfg).Tu;
        for (std::size_t i = 0; i < g.size(); ++i) {
            double err = std::abs(Tuk[i] - (Tu[i] + k));
            worst_comm = std::max(worst_comm, err);
            if (err > 1e-12 * (1.0 + std::abs(k))) ++failures;
        }

        // one-step nonexpansiveness
        double lhs = (Tu - Tv).sup_norm();
        double rhs = (u - v).sup_norm();
        worst_exp = std::max(worst_exp, lhs - rhs);
        if (lhs > rhs + 1e-13) ++failures;
    }
    report(2, "semigroup law suite (100 random u)", failures == 0,
           fmt("failures=%d, worst commutation err=%.1e, worst expansion=%.1e", failures,
               worst_comm, worst_exp));
}

void criterion3_fixed_point(const Shared& sh) {
    Lagrangian L(pendulum());
    auto residual_of = [&](const GridFunction& u) {
        auto Tu = lo_step(L, u, sh.fine.cfg).Tu;
        double r = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i)
            r = std::max(r, std::abs(Tu[i] - u[i] + sh.fine.c * sh.fine.cfg.tau));
        return r;
    };
    double base = residual_of(sh.fine.u);

    const double h = sh.grid.h;
    std::vector<double> pert(sh.fine.u.values().begin(), sh.fine.u.values().end());
    int c0 = sh.grid.n / 4;
    for (int d = -3; d <= 3; ++d)
        pert[static_cast<std::size_t>(sh.grid.wrap(c0 + d))] +=
            20.0 * h * (1.0 - std::abs(d) / 4.0);
    double raised = residual_of(GridFunction(sh.grid, pert));

    bool ok = base <= 1e-6 && (raised - base) >= 5.0 * h;
    report(3, "fixed-point characterization", ok,
           fmt("residual=%.2e (<=1e-6), bump raises by %.4f (>=%.4f)", base, raised - base,
               5.0 * h));
}

void criterion4_below_critical(const Shared& sh) {
    Lagrangian L(pendulum());
    const double h = sh.grid.h;
    // positive defects above the 2h discretization noise floor count as
    // genuine domination failures
    int viols = count_domination_violations(L, sh.fine.u, sh.fine.c - 0.1, 500, 42, 2.0 * h);
    report(4, "below-critical impossibility", viols >= 1,
           fmt("%d of 500 curves violate domination at c-0.1", viols));
}

void criterion5_lipschitz_bound(const Shared& sh) {
    auto consts = TonelliConstants::estimate(pendulum(), std::vector<double>{0.0, 1.0},
                                             std::vector<double>{1.0}, 32);
    double lip = sh.fine.u.lipschitz();
    double bound = 1.1 * (sh.fine.c + consts.A(1.0));
    report(5, "Lipschitz bound c+A(1)", lip <= bound,
           fmt("Lip(u)=%.4f <= %.4f", lip, bound));
}

void criterion6_alpha_flat_and_tail(const Shared& sh, AlphaTable& table_out,
                                    LaxOleinikConfig& sweep_cfg_out) {
    auto H = pendulum();
    LaxOleinikConfig cfg;
    cfg.tau = 0.02;
    cfg.tol = 1e-3;
    sweep_cfg_out = cfg;

    auto t0 = clk::now();
    std::vector<Vec2> omegas;
    for (int i = -20; i <= 20; ++i) omegas.push_back({i * 0.1, 0.0});
    auto table = alpha_sweep(H, omegas, sh.grid, cfg);

    bool flat_ok = true;
    double amax20 = 0.0;
    for (const auto& e : table.entries) {
        if (std::abs(e.omega[0]) <= 1.2 + 1e-12 && std::abs(e.alpha - 1.0) > 1e-2)
            flat_ok = false;
        if (std::abs(std::abs(e.omega[0]) - 2.0) < 1e-9) amax20 = e.alpha;
    }
    double oracle20 = alpha_oracle_1d(H.potential(), 2.0);
    bool tail_ok = std::abs(amax20 - oracle20) <= 1e-2;

    // flat-piece boundary: classify the table at a small elevation threshold,
    // then bisect with a few extra solves
    const double thresh = 3e-3;
    double lo = 0.0;
    for (const auto& e : table.entries)
        if (e.omega[0] >= 0 && e.alpha <= 1.0 + thresh) lo = std::max(lo, e.omega[0]);
    double hi = lo + 0.1;
    for (int it = 0; it < 4; ++it) {
        double mid = 0.5 * (lo + hi);
        double a = solve_weak_kam(H.shifted(std::vector<double>{mid}), sh.grid, cfg).c;
        (a <= 1.0 + thresh ? lo : hi) = mid;
    }
    double boundary = 0.5 * (lo + hi);
    double W = 4.0 / M_PI;
    bool boundary_ok = std::abs(boundary - W) <= 0.05;

    double seconds = std::chrono::duration<double>(clk::now() - t0).count();
    bool ok = flat_ok && tail_ok && boundary_ok && seconds < 300.0;
    report(6, "Mather alpha flat piece and tail", ok,
           fmt("flat ok=%d, |a(2)-oracle|=%.1e, boundary=%.4f (4/pi=%.4f), %.1fs", flat_ok,
               std::abs(amax20 - oracle20), boundary, W, seconds));
    table_out = table;
}

void criterion7_convexity_superlinearity(const Shared& sh, const AlphaTable& table,
                                         const LaxOleinikConfig& sweep_cfg) {
    double amax = 1.0;
    for (const auto& e : table.entries) amax = std::max(amax, std::abs(e.alpha));
    auto conv = convexity_check(table, 3.0 * sweep_cfg.tol * amax);

    LaxOleinikConfig cfg = sweep_cfg;
    std::vector<Vec2> span;
    for (int i = -12; i <= 12; ++i) span.push_back({i * 0.5, 0.0});
    auto spant = alpha_sweep(pendulum(), span, sh.grid, cfg);
    std::vector<double> Ks{1.0, 2.0, 4.0};
    auto sup = superlinearity_check(spant, Ks);

    bool ok = conv.pass && sup.pass;
    report(7, "convexity and superlinearity", ok,
           fmt("worst 2nd diff=%.1e (tol %.1e), tail slope=%.2f > K=4",
               conv.worst_second_difference, 3.0 * sweep_cfg.tol * amax, sup.tail_slope));
}

void criterion8_equivariant_identity(const Shared&) {
    auto H = pendulum();
    LaxOleinikConfig cfg;
    cfg.tau = 0.05;
    auto g = PeriodicGrid::make(1, 128);

    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> ur(-3.0, 3.0);
    int identical = 0;
    for (int rep = 0; rep < 10; ++rep) {
        double r = ur(rng);
        Homomorphism rho;
        rho.dim = 1;
        rho.rho = {r, 0.0};
        auto eq = solve_equivariant(H, rho, g, cfg);
        auto shft = solve_weak_kam(H.shifted(std::vector<double>{r}), g, cfg);
        if (eq.periodic.c == shft.c) ++identical; // bit-for-bit
    }
    report(8, "equivariant/shift identity (10 rho)", identical == 10,
           fmt("%d of 10 bit-identical", identical));
}

void criterion9_invariant_solve(const Shared& sh) {
    auto H4 = HamiltonianSpec::mechanical(PotentialExpr::parse("cos(4*pi*x)", 1));
    LaxOleinikConfig cfg;
    cfg.tau = 0.002;
    auto inv = solve_invariant(H4, 2, sh.grid, cfg);
    auto plain = solve_weak_kam(H4, sh.grid, cfg);

    double period_defect = 0.0;
    for (int i = 0; i < sh.grid.n; ++i)
        period_defect = std::max(
            period_defect, std::abs(inv.lifted[static_cast<std::size_t>(i)] -
                                    inv.lifted[static_cast<std::size_t>((i + sh.grid.n / 2) %
                                                                        sh.grid.n)]));
    bool ok = std::abs(inv.c_inv - 1.0) <= 1e-2 && std::abs(plain.c - 1.0) <= 1e-2 &&
              period_defect <= 1e-9;
    report(9, "invariant solve (k=2)", ok,
           fmt("c_inv=%.6f, c=%.6f, lift period defect=%.1e", inv.c_inv, plain.c,
               period_defect));
}

void criterion10_energy_momentum(const Shared&) {
    auto H = pendulum();
    PhasePoint start;
    start.x = {0.0, 0.0};
    start.p = {2.0, 0.0};
    auto traj = integrate(H, start, 10.0, 1e-3);
    double drift = traj.max_energy_drift();

    auto consts = TonelliConstants::estimate(H, std::vector<double>{0.0, 1.0},
                                             std::vector<double>{1.0}, 32);
    std::mt19937_64 rng(5150);
    std::uniform_real_distribution<double> ux(0.0, 1.0), up(-3.0, 3.0);
    int pass_count = 0;
    for (int i = 0; i < 20; ++i) {
        PhasePoint s;
        s.x = {ux(rng), 0.0};
        s.p = {up(rng), 0.0};
        auto t = integrate(H, s, 2.0, 1e-3);
        if (momentum_bound_check(t, consts).pass) ++pass_count;
    }
    bool ok = drift < 1e-6 && pass_count == 20;
    report(10, "energy conservation and momentum bound", ok,
           fmt("drift=%.2e, momentum bound %d/20", drift, pass_count));
}

void criterion11_calibration(const Shared& sh) {
    Lagrangian L(pendulum());
    std::vector<std::size_t> endpoints;
    for (int i = 0; i < 16; ++i)
        endpoints.push_back(static_cast<std::size_t>(i) * (sh.grid.size() / 16));
    auto e = check_calibration(sh.fine, L, endpoints, 200);
    report(11, "calibration along backtracked curves", e.pass,
           fmt("max defect=%.2e <= %.2e", e.value, e.tol));
}

void criterion12_evolution(const Shared& sh) {
    auto e = check_evolution(pendulum(), sh.fine.u, sh.fine.cfg, 100);
    report(12, "evolution equation residual", e.pass,
           fmt("max residual=%.2e <= %.2e", e.value, e.tol));
}

void criterion13_smoothing(const Shared& sh) {
    const double h = sh.grid.h;
    auto r = smooth_subsolution(pendulum(), sh.fine.u, sh.fine.c, 0.05, 5.0 * h);
    bool ok = r.sup_err <= 0.05 && r.max_violation <= 5.0 * h && r.hull_pass;
    report(13, "subsolution smoothing", ok,
           fmt("sup_err=%.4f<=0.05, H(x,Dg)-(c+eps)=%.2e<=%.2e, hull=%d", r.sup_err,
               r.max_violation, 5.0 * h, r.hull_pass));
}

} // namespace

int main() {
    std::printf("acceptance suite\n----------------\n");
    auto t0 = clk::now();
    Shared sh;

    criterion1_mechanical_critical_value(sh);
    criterion2_semigroup_laws(sh);
    criterion3_fixed_point(sh);
    criterion4_below_critical(sh);
    criterion5_lipschitz_bound(sh);
    AlphaTable table;
    LaxOleinikConfig sweep_cfg;
    criterion6_alpha_flat_and_tail(sh, table, sweep_cfg);
    criterion7_convexity_superlinearity(sh, table, sweep_cfg);
    criterion8_equivariant_identity(sh);
    criterion9_invariant_solve(sh);
    criterion10_energy_momentum(sh);
    criterion11_calibration(sh);
    criterion12_evolution(sh);
    criterion13_smoothing(sh);

    double total = std::chrono::duration<double>(clk::now() - t0).count();
    std::printf("----------------\n%s (%d criteria failed, %.1fs total)\n",
                g_failures == 0 ? "ALL PASS" : "FAILURES", g_failures, total);
    return g_failures == 0 ? 0 : 1;
}
