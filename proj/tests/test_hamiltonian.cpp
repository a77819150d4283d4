#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "wkam/hamiltonian.hpp"

using namespace wkam;

namespace {

HamiltonianSpec pendulum() {
    return HamiltonianSpec::mechanical(PotentialExpr::parse("cos(2*pi*x)", 1));
}

HamiltonianSpec free1d() {
    return HamiltonianSpec::mechanical(PotentialExpr::parse("0", 1));
}

// Quartic table H(p) = p^4/4 on p in [-3,3], x-independent.
HamiltonianSpec quartic_table(int np = 241) {
    TabulatedHamiltonian t;
    t.dim = 1;
    t.nx = 8;
    t.np = np;
    t.p_min = -3.0;
    t.p_max = 3.0;
    t.values.resize(static_cast<std::size_t>(t.nx) * t.np);
    for (int ix = 0; ix < t.nx; ++ix)
        for (int ip = 0; ip < t.np; ++ip) {
            double p = t.p_min + ip * t.dp();
            t.values[t.index1(ix, ip)] = 0.25 * p * p * p * p;
        }
    return HamiltonianSpec::tabulated(std::move(t));
}

double eval1(const HamiltonianSpec& H, double x, double p) { return H.eval1(x, p); }

} // namespace

TEST_CASE("mechanical evaluation") {
    auto H = pendulum();
    CHECK(eval1(H, 0.0, 2.0) == doctest::Approx(3.0));   // p^2/2 + V(0) = 2+1
    CHECK(eval1(H, 0.5, 0.0) == doctest::Approx(-1.0));  // V(1/2) = -1
    auto Hs = free1d().shifted(std::vector<double>{1.0});
    CHECK(eval1(Hs, 0.37, 0.0) == doctest::Approx(0.5)); // (0+1)^2/2
    CHECK(eval1(Hs, 0.37, -1.0) == doctest::Approx(0.0));
}

TEST_CASE("shift composition folds and zero shift is the identity") {
    auto H = pendulum();
    auto H0 = H.shifted(std::vector<double>{0.0});
    for (double x : {0.0, 0.31, 0.77})
        for (double p : {-2.0, 0.0, 1.3}) CHECK(eval1(H0, x, p) == eval1(H, x, p));

    auto Ha = H.shifted(std::vector<double>{0.4}).shifted(std::vector<double>{0.35});
    auto Hb = H.shifted(std::vector<double>{0.4 + 0.35});
    for (double x : {0.0, 0.31, 0.77})
        for (double p : {-2.0, 0.0, 1.3}) CHECK(eval1(Ha, x, p) == eval1(Hb, x, p));
}

TEST_CASE("legendre point, mechanical closed forms") {
    auto Hf = free1d();
    std::array<double, 1> x{0.0}, v{3.0};
    auto r = legendre_point(Hf, x, v);
    CHECK(r.L == doctest::Approx(4.5));
    CHECK(r.p_star[0] == doctest::Approx(3.0));

    auto Hp = pendulum();
    v[0] = 0.0;
    r = legendre_point(Hp, x, v);
    CHECK(r.L == doctest::Approx(-1.0)); // L(x,0) = -V(x)
    CHECK(r.p_star[0] == doctest::Approx(0.0));

    // Shifted: p* = v - w, L = v^2/2 - V - w v
    auto Hs = Hp.shifted(std::vector<double>{0.7});
    v[0] = 1.2;
    x[0] = 0.25;
    r = legendre_point(Hs, x, v);
    CHECK(r.p_star[0] == doctest::Approx(1.2 - 0.7));
    CHECK(r.L == doctest::Approx(0.5 * 1.44 - std::cos(M_PI / 2) - 0.7 * 1.2));
}

TEST_CASE("legendre point, tabulated quartic") {
    auto H = quartic_table();
    std::array<double, 1> x{0.1}, v{1.0};

    // Oracle: brute-force max of p*v - p^4/4 over a fine momentum grid.
    double oracle = -1e300;
    for (int i = 0; i <= 600000; ++i) {
        double p = -3.0 + 6.0 * i / 600000.0;
        oracle = std::max(oracle, p * v[0] - 0.25 * p * p * p * p);
    }
    CHECK(oracle == doctest::Approx(0.75).epsilon(1e-8)); // closed form (3/4)|v|^(4/3)

    auto r = legendre_point(H, x, v);
    double dp = 6.0 / 240;
    CHECK(std::abs(r.L - oracle) <= 2.0 * dp * dp);
    CHECK(r.p_star[0] == doctest::Approx(1.0).epsilon(0.05));

    // Maximizer on the box edge must signal
    v[0] = 30.0;
    CHECK_THROWS_AS(legendre_point(H, x, v), BoundaryError);
}

TEST_CASE("fenchel inequality and double conjugation") {
    auto H = pendulum();
    Lagrangian L(H);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ux(0.0, 1.0), uv(-3.0, 3.0);
    for (int i = 0; i < 200; ++i) {
        std::array<double, 1> x{ux(rng)}, v{uv(rng)}, p{uv(rng)};
        double lhs = p[0] * v[0];
        CHECK(lhs <= H.eval(x, p) + L.value(x, v) + 1e-12);
        auto leg = legendre_point(H, x, v);
        std::array<double, 1> ps{leg.p_star[0]};
        CHECK(std::abs(ps[0] * v[0] - H.eval(x, ps) - leg.L) <= 1e-8);
    }

    // H(x,p) = max_v <p,v> - L(x,v), recovered numerically within 1e-6
    for (double p : {-1.5, 0.0, 0.8, 2.0}) {
        std::array<double, 1> x{0.3};
        double best = -1e300;
        for (int i = 0; i <= 40000; ++i) {
            double v = -6.0 + 12.0 * i / 40000.0;
            std::array<double, 1> vv{v};
            best = std::max(best, p * v - L.value(x, vv));
        }
        std::array<double, 1> pp{p};
        CHECK(best == doctest::Approx(H.eval(x, pp)).epsilon(1e-6));
    }
}

TEST_CASE("tabulated lagrangian agrees with the direct transform") {
    auto H = quartic_table();
    Lagrangian L(H);
    for (double v : {-1.0, -0.4, 0.0, 0.5, 1.0, 1.5}) {
        std::array<double, 1> x{0.6}, vv{v};
        auto direct = legendre_point(H, x, vv);
        CHECK(L.value(x, vv) == doctest::Approx(direct.L).epsilon(1e-3));
    }
    std::array<double, 1> x{0.0}, vbig{1e3};
    CHECK_THROWS_AS(L.value(x, vbig), BoundaryError);
}

TEST_CASE("estimate_constants on the pendulum") {
    auto H = pendulum();
    std::vector<double> Rs{0.0, 1.0, 2.0};
    std::vector<double> Ks{1.0, 2.0};
    auto c = TonelliConstants::estimate(H, Rs, Ks, 32);

    // A(0) = sup(-V) = 1, A(1) = 1/2 + 1
    CHECK(c.A(0.0) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(c.A(1.0) == doctest::Approx(1.5).epsilon(1e-10));
    // A*(R) = R^2/2 + 1
    CHECK(c.A_star(1.0) == doctest::Approx(1.5).epsilon(1e-10));
    // theta and K_loc wiring
    CHECK(c.theta(1.0) == doctest::Approx(1.0 + c.A(1.0)));
    CHECK(c.k_loc(1.0, 2.0) == doctest::Approx(2.0 * (c.A(0.0) + c.C(c.theta(1.0) + 1.0))));
    CHECK(c.sym_lip() == doctest::Approx(c.C(1.0) + c.A(1.0)));
    CHECK(c.k_loc(1.0, 1.0) >= 0.0);
    CHECK(c.k_loc(1.0, 2.0) == doctest::Approx(2.0 * c.k_loc(1.0, 1.0)));
}

TEST_CASE("estimate_constants free particle: C(K) = K^2/2") {
    auto H = free1d();
    std::vector<double> Rs{1.0};
    std::vector<double> Ks{0.5, 1.0, 2.0, 4.0};
    auto c = TonelliConstants::estimate(H, Rs, Ks, 32);
    for (double K : Ks) CHECK(c.C(K) == doctest::Approx(K * K / 2).epsilon(1e-10));
    CHECK(c.C_star(1.0) == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("constants are monotone and certify superlinearity") {
    auto H = pendulum();
    std::vector<double> Rs{0.0, 0.5, 1.0, 2.0, 4.0};
    std::vector<double> Ks{0.5, 1.0, 2.0, 4.0};
    auto c = TonelliConstants::estimate(H, Rs, Ks, 32);
    for (std::size_t i = 1; i < Rs.size(); ++i) CHECK(c.A(Rs[i]) >= c.A(Rs[i - 1]) - 1e-12);
    for (std::size_t i = 1; i < Ks.size(); ++i) CHECK(c.C(Ks[i]) >= c.C(Ks[i - 1]) - 1e-12);

    // L(x,v) <= A(R) on the sampled ball
    {
        Lagrangian Lb(H);
        std::mt19937_64 rngb(9);
        std::uniform_real_distribution<double> bx(0.0, 1.0), bv(-2.0, 2.0);
        for (int i = 0; i < 300; ++i) {
            std::array<double, 1> x{bx(rngb)}, v{bv(rngb)};
            CHECK(Lb.value(x, v) <= c.A(2.0) + 1e-12);
        }
    }

    // L(x,v) >= K|v| - C(K) across samples
    Lagrangian L(H);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> ux(0.0, 1.0), uv(-4.0, 4.0);
    for (int i = 0; i < 500; ++i) {
        std::array<double, 1> x{ux(rng)}, v{uv(rng)};
        for (double K : Ks)
            CHECK(L.value(x, v) >= K * std::abs(v[0]) - c.C(K) - 1e-9);
    }
}

TEST_CASE("table csv loading") {
    std::stringstream ss;
    ss << "x,p1,H\n";
    const int nx = 4, np = 9;
    for (int ix = 0; ix < nx; ++ix)
        for (int ip = 0; ip < np; ++ip) {
            double x = static_cast<double>(ix) / nx;
            double p = -2.0 + 4.0 * ip / (np - 1);
            ss << x << ',' << p << ',' << 0.5 * p * p + std::cos(2 * M_PI * x) << '\n';
        }
    auto H = HamiltonianSpec::load_table_csv(ss);
    CHECK(H.dim() == 1);
    CHECK(eval1(H, 0.0, 0.0) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK_THROWS_AS(eval1(H, 0.0, 5.0), BoundaryError);

    std::stringstream bad;
    bad << "x,p,H\n0,0,0\n";
    CHECK_THROWS_AS(HamiltonianSpec::load_table_csv(bad), Error);
}

TEST_CASE("tabulated convexity validation") {
    TabulatedHamiltonian t;
    t.dim = 1;
    t.nx = 2;
    t.np = 5;
    t.p_min = -1.0;
    t.p_max = 1.0;
    t.values.assign(10, 0.0); // flat in p: not strictly convex
    CHECK_THROWS_AS(HamiltonianSpec::tabulated(t), std::invalid_argument);
}
