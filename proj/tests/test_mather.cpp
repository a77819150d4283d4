#include <doctest.h>

#include <cmath>
#include <sstream>

#include "wkam/mather.hpp"

using namespace wkam;

namespace {

HamiltonianSpec pendulum() {
    return HamiltonianSpec::mechanical(PotentialExpr::parse("cos(2*pi*x)", 1));
}

PotentialExpr zero_potential() { return PotentialExpr::parse("0", 1); }

std::vector<Vec2> omega_line(double a, double b, double step) {
    std::vector<Vec2> out;
    for (double w = a; w <= b + 1e-12; w += step) out.push_back({w, 0.0});
    return out;
}

LaxOleinikConfig fast_cfg() {
    LaxOleinikConfig cfg;
    cfg.tau = 0.05;
    return cfg;
}

} // namespace

TEST_CASE("alpha oracle closed forms") {
    auto zero = zero_potential();
    // W(c) = sqrt(2c); alpha(1) solves sqrt(2c)=1
    CHECK(alpha_oracle_1d(zero, 1.0) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(alpha_oracle_1d(zero, 3.0) == doctest::Approx(4.5).epsilon(1e-9));
    CHECK(alpha_oracle_1d(zero, -1.0) == doctest::Approx(0.5).epsilon(1e-9)); // even

    auto V = pendulum().potential();
    CHECK(alpha_oracle_1d(V, 0.0) == doctest::Approx(1.0).epsilon(1e-10));
    // flat piece width: integral of 2|sin(pi x)| = 4/pi
    CHECK(flat_piece_width_1d(V) == doctest::Approx(4.0 / M_PI).epsilon(1e-8));
    // inside the flat piece the oracle pins max V
    CHECK(alpha_oracle_1d(V, 1.2) == doctest::Approx(1.0));
    // outside: strictly increasing in |omega|
    CHECK(alpha_oracle_1d(V, 2.0) > alpha_oracle_1d(V, 1.5));
    CHECK(alpha_oracle_1d(V, 2.0) == alpha_oracle_1d(V, -2.0));
}

TEST_CASE("alpha sweep: zero class equals the plain critical value bit for bit") {
    auto H = pendulum();
    auto grid = PeriodicGrid::make(1, 128);
    auto cfg = fast_cfg();
    auto table = alpha_sweep(H, omega_line(-0.4, 0.4, 0.4), grid, cfg);
    auto plain = solve_weak_kam(H, grid, cfg);
    REQUIRE(table.entries.size() == 3);
    CHECK(table.entries[1].omega[0] == 0.0);
    CHECK(table.entries[1].alpha == plain.c);
}

TEST_CASE("alpha sweep reproduces the oracle (flat piece and tail)") {
    auto H = pendulum();
    auto grid = PeriodicGrid::make(1, 128);
    auto cfg = fast_cfg();
    cfg.tau = 0.02;
    auto table = alpha_sweep(H, omega_line(-2.0, 2.0, 0.5), grid, cfg);
    auto V = H.potential();
    for (const auto& e : table.entries) {
        CHECK(e.converged);
        double oracle = alpha_oracle_1d(V, e.omega[0]);
        CHECK(e.alpha == doctest::Approx(oracle).epsilon(1e-2));
    }
    // even potential: alpha is even within solver tolerance
    for (std::size_t i = 0; i < table.entries.size(); ++i) {
        const auto& e = table.entries[i];
        const auto& m = table.entries[table.entries.size() - 1 - i];
        CHECK(e.omega[0] == -m.omega[0]);
        CHECK(e.alpha == doctest::Approx(m.alpha).epsilon(1e-3));
    }
}

TEST_CASE("flat-piece characterization against the oracle width") {
    auto H = pendulum();
    auto grid = PeriodicGrid::make(1, 128);
    auto cfg = fast_cfg();
    double W = flat_piece_width_1d(H.potential());
    auto table = alpha_sweep(H, omega_line(0.0, 1.6, 0.1), grid, cfg);
    for (const auto& e : table.entries) {
        if (std::abs(e.omega[0]) <= W - 0.05)
            CHECK(e.alpha == doctest::Approx(1.0).epsilon(3e-3));
        if (std::abs(e.omega[0]) >= W + 0.05)
            CHECK(e.alpha > 1.0 + 3e-3);
    }
}

TEST_CASE("convexity check") {
    // free particle: alpha = w^2/2 exactly, second differences = step^2
    auto zero = zero_potential();
    AlphaTable t;
    t.dim = 1;
    for (double w = -2.0; w <= 2.0 + 1e-12; w += 0.25)
        t.entries.push_back({{w, 0.0}, 0.5 * w * w, 0.0, true});
    auto r = convexity_check(t, 1e-12);
    CHECK(r.pass);
    CHECK(r.worst_second_difference == doctest::Approx(0.25 * 0.25).epsilon(1e-9));

    // corrupted entry is caught and identified
    AlphaTable bad = t;
    bad.entries[8].alpha -= 0.5;
    auto rb = convexity_check(bad, 1e-6);
    CHECK_FALSE(rb.pass);
    // the most negative triple is centered on a neighbor of the bad entry
    CHECK((rb.worst_index == 7 || rb.worst_index == 9));

    AlphaTable tiny;
    tiny.dim = 1;
    tiny.entries.push_back({{0.0, 0.0}, 0.0, 0.0, true});
    CHECK_THROWS_AS(convexity_check(tiny, 1e-9), std::invalid_argument);
}

TEST_CASE("convexity on the solved pendulum table") {
    auto H = pendulum();
    auto grid = PeriodicGrid::make(1, 128);
    auto cfg = fast_cfg();
    cfg.tau = 0.02;
    cfg.tol = 1e-3;
    auto table = alpha_sweep(H, omega_line(-2.0, 2.0, 0.25), grid, cfg);
    double max_alpha = 0.0;
    for (const auto& e : table.entries) max_alpha = std::max(max_alpha, std::abs(e.alpha));
    auto r = convexity_check(table, 3.0 * cfg.tol * std::max(1.0, max_alpha));
    CHECK(r.pass);
}

TEST_CASE("superlinearity check") {
    // free particle closed form: B(K) attains K^2/2 when the table covers |w|=K
    AlphaTable t;
    t.dim = 1;
    for (double w = -6.0; w <= 6.0 + 1e-12; w += 0.5)
        t.entries.push_back({{w, 0.0}, 0.5 * w * w, 0.0, true});
    std::vector<double> Ks{1.0, 2.0, 4.0};
    auto r = superlinearity_check(t, Ks);
    CHECK(r.pass);
    REQUIRE(r.certificates.size() == 3);
    for (const auto& c : r.certificates) {
        CHECK(c.finite);
        CHECK(c.B == doctest::Approx(c.K * c.K / 2).epsilon(1e-9));
        // certificate holds across the table
        for (const auto& e : t.entries)
            CHECK(e.alpha >= c.K * std::abs(e.omega[0]) - c.B - 1e-12);
    }
    CHECK(r.tail_slope == doctest::Approx(5.75)); // (18 - 15.125) / 0.5

    // insufficient span
    AlphaTable narrow;
    narrow.dim = 1;
    for (double w = -1.0; w <= 1.0 + 1e-12; w += 0.25)
        narrow.entries.push_back({{w, 0.0}, 0.5 * w * w, 0.0, true});
    CHECK_THROWS_AS(superlinearity_check(narrow, std::vector<double>{2.0}),
                    std::invalid_argument);
}

TEST_CASE("strict critical value, 1D") {
    auto cfg = fast_cfg();
    auto grid = PeriodicGrid::make(1, 128);

    // free particle: alpha = w^2/2, minimum at 0
    auto Hf = HamiltonianSpec::mechanical(zero_potential());
    auto rf = strict_critical(Hf, grid, cfg, {-1.0, 0.0}, {1.0, 0.0});
    CHECK(rf.c_strict == doctest::Approx(0.0).epsilon(1e-3));
    CHECK(std::abs(rf.argmin_omega[0]) < 0.3);
    CHECK(rf.c_of_lift == rf.c_strict); // same code path, identical bits

    // pendulum: flat piece attains max V everywhere inside
    auto rp = strict_critical(pendulum(), grid, cfg, {-2.0, 0.0}, {2.0, 0.0});
    CHECK(rp.c_strict == doctest::Approx(1.0).epsilon(1e-2));
    CHECK(rp.c_strict <= alpha_oracle_1d(pendulum().potential(), 0.0) + 1e-9);
    CHECK(rp.c_of_lift == rp.c_strict); // equivariant solve at the argmin, same bits
}

TEST_CASE("strict critical value, 2D separable") {
    auto H = HamiltonianSpec::mechanical(
        PotentialExpr::parse("cos(2*pi*x)+0.3*cos(2*pi*y)", 2));
    auto grid = PeriodicGrid::make(2, 32);
    LaxOleinikConfig cfg;
    cfg.tau = 0.05;
    cfg.v_max = 4.0;
    auto r = strict_critical(H, grid, cfg, {-0.5, -0.5}, {0.5, 0.5});
    // c_strict = alpha(0,0) = sup V = 1.3 by the separable oracle
    CHECK(r.c_strict == doctest::Approx(1.3).epsilon(2e-2));
    auto plain = solve_weak_kam(H, grid, cfg);
    CHECK(r.c_strict == doctest::Approx(plain.c).epsilon(2e-2));
}

TEST_CASE("alpha table csv") {
    AlphaTable t;
    t.dim = 1;
    t.entries.push_back({{-0.5, 0.0}, 1.0, 1e-9, true});
    t.entries.push_back({{0.5, 0.0}, 1.0, 1e-9, true});
    std::stringstream ss;
    t.to_csv(ss);
    std::string header;
    std::getline(ss, header);
    CHECK(header == "omega,alpha,residual");
    int rows = 0;
    std::string line;
    while (std::getline(ss, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 2);
}

TEST_CASE("monotone bracket is rejected") {
    auto Hf = HamiltonianSpec::mechanical(zero_potential());
    auto grid = PeriodicGrid::make(1, 128);
    auto cfg = fast_cfg();
    // alpha = w^2/2 restricted to [1,3] is strictly increasing
    CHECK_THROWS_AS(strict_critical(Hf, grid, cfg, {1.0, 0.0}, {3.0, 0.0}), Error);
}
