#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "wkam/grid.hpp"

using namespace wkam;

namespace {

GridFunction sawtooth(const PeriodicGrid& g) {
    // periodic sawtooth with Lipschitz constant 2: /\ over one period
    return GridFunction::sample(g, [](std::array<double, 2> p) {
        double x = p[0];
        return x < 0.5 ? 2.0 * x : 2.0 * (1.0 - x);
    });
}

} // namespace

TEST_CASE("minimal representative") {
    CHECK(minimal_rep(0.3) == doctest::Approx(0.3));
    CHECK(minimal_rep(0.7) == doctest::Approx(-0.3));
    CHECK(minimal_rep(-0.6) == doctest::Approx(0.4));
    CHECK(minimal_rep(1.25) == doctest::Approx(0.25));
    CHECK(minimal_rep(0.3, 0.5) == doctest::Approx(-0.2));
}

TEST_CASE("grid invariants") {
    CHECK_THROWS_AS(PeriodicGrid::make(1, 4), std::invalid_argument);
    CHECK_THROWS_AS(PeriodicGrid::make(3, 16), std::invalid_argument);
    auto g = PeriodicGrid::make(2, 16);
    CHECK(g.size() == 256);
    CHECK(g.h * g.n == doctest::Approx(1.0));
}

TEST_CASE("grid function rejects non-finite values") {
    auto g = PeriodicGrid::make(1, 8);
    std::vector<double> v(8, 0.0);
    v[3] = std::nan("");
    CHECK_THROWS_AS(GridFunction(g, v), std::invalid_argument);
}

TEST_CASE("interpolation") {
    auto g = PeriodicGrid::make(1, 8);
    auto c = GridFunction::sample(g, [](std::array<double, 2>) { return 3.25; });
    CHECK(interpolate(c, 0.123) == doctest::Approx(3.25));
    CHECK(interpolate(c, 0.99) == doctest::Approx(3.25));

    std::vector<double> vals{0.0, 1.0, 0.0, -1.0, 0.0, 1.0, 0.0, -1.0};
    GridFunction f(g, vals);
    // halfway between node 0 (value 0) and node 1 (value 1)
    CHECK(interpolate(f, 0.0625) == doctest::Approx(0.5));

    // exact at nodes
    for (int i = 0; i < 8; ++i)
        CHECK(interpolate(f, i / 8.0) == doctest::Approx(vals[static_cast<std::size_t>(i)]));

    // sin(2 pi x) at n=256 within 1e-3 of the closed form
    auto fine = PeriodicGrid::make(1, 256);
    auto s = GridFunction::sample(fine, [](std::array<double, 2> p) {
        return std::sin(2 * M_PI * p[0]);
    });
    CHECK(interpolate(s, 0.3) == doctest::Approx(std::sin(0.6 * M_PI)).epsilon(1e-3));

    // 2D bilinear stays close to a smooth field at moderate resolution
    auto g2 = PeriodicGrid::make(2, 16);
    auto b = GridFunction::sample(g2, [](std::array<double, 2> p) {
        return 2.0 + std::cos(2 * M_PI * p[0]) * std::sin(2 * M_PI * p[1]);
    });
    CHECK(interpolate(b, 0.25, 0.125) ==
          doctest::Approx(2.0 + std::cos(M_PI / 2) * std::sin(M_PI / 4)).epsilon(1e-2));
}

TEST_CASE("centered gradient") {
    auto g = PeriodicGrid::make(1, 256);
    auto c = GridFunction::sample(g, [](std::array<double, 2>) { return 7.0; });
    CHECK(gradient_centered(c)[0].sup_norm() == 0.0);

    auto s = GridFunction::sample(g, [](std::array<double, 2> p) {
        return std::sin(2 * M_PI * p[0]);
    });
    auto ds = gradient_centered(s)[0];
    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        double x = g.node(i)[0];
        worst = std::max(worst, std::abs(ds[i] - 2 * M_PI * std::cos(2 * M_PI * x)));
    }
    CHECK(worst < 1e-3);

    // kinked sawtooth: |gradient| <= Lip everywhere
    auto saw = sawtooth(g);
    auto dsaw = gradient_centered(saw)[0];
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(dsaw[i]) <= 2.0 + 1e-12);
}

TEST_CASE("mollifier kernel invariants") {
    auto g = PeriodicGrid::make(1, 128);
    auto k = MollifierKernel::bump(g, 0.05);
    CHECK(k.weight_sum() == doctest::Approx(1.0).epsilon(1e-12));
    double wsum = 0.0;
    for (int o = -k.radius_cells(); o <= k.radius_cells(); ++o) {
        CHECK(k.weight(o) >= 0.0);
        wsum += k.weight(o);
        CHECK(std::abs(o) * g.h < 0.05 + 1e-12); // support inside the delta ball
    }
    CHECK(wsum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("mollification") {
    auto g = PeriodicGrid::make(1, 256);
    auto k = MollifierKernel::bump(g, 0.02);

    auto c = GridFunction::sample(g, [](std::array<double, 2>) { return -1.75; });
    auto mc = mollify(c, k);
    for (std::size_t i = 0; i < g.size(); ++i)
        CHECK(mc[i] == doctest::Approx(-1.75).epsilon(1e-12));

    // sup-norm does not grow; ||f_d - f|| <= Lip(f) * delta
    auto saw = sawtooth(g);
    auto kd = MollifierKernel::bump(g, 0.01);
    auto ms = mollify(saw, kd);
    CHECK(ms.sup_norm() <= saw.sup_norm() + 1e-14);
    CHECK((ms - saw).sup_norm() <= 2.0 * 0.01 + 1e-12);

    CHECK_THROWS_AS(mollify(saw, MollifierKernel::bump(g, 0.3)), std::invalid_argument);
}

TEST_CASE("mollification is linear and monotone") {
    auto g = PeriodicGrid::make(1, 64);
    auto k = MollifierKernel::bump(g, 0.05);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<double> fv(g.size()), gv(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) {
            fv[i] = unit(rng);
            gv[i] = fv[i] + std::abs(unit(rng)); // g >= f
        }
        GridFunction f(g, fv), h(g, gv);
        auto mf = mollify(f, k), mh = mollify(h, k);
        for (std::size_t i = 0; i < g.size(); ++i) CHECK(mf[i] <= mh[i] + 1e-14);

        double shift = unit(rng) * 3.0;
        auto mshift = mollify(f + shift, k);
        for (std::size_t i = 0; i < g.size(); ++i)
            CHECK(mshift[i] == doctest::Approx(mf[i] + shift).epsilon(1e-12));
    }
}

TEST_CASE("mollified gradient lies in the hull of difference quotients") {
    auto g = PeriodicGrid::make(1, 128);
    auto k = MollifierKernel::bump(g, 0.03);
    auto saw = sawtooth(g);
    auto ms = mollify(saw, k);
    auto grad = gradient_centered(ms)[0];
    const int r = k.radius_cells() + 1;
    for (int i = 0; i < g.n; ++i) {
        double lo = 1e300, hi = -1e300;
        for (int o = -r; o <= r; ++o) {
            int j = g.wrap(i + o);
            double d = (saw[static_cast<std::size_t>(g.wrap(j + 1))] -
                        saw[static_cast<std::size_t>(j)]) /
                       g.h;
            lo = std::min(lo, d);
            hi = std::max(hi, d);
        }
        CHECK(grad[static_cast<std::size_t>(i)] >= lo - 1e-9);
        CHECK(grad[static_cast<std::size_t>(i)] <= hi + 1e-9);
    }
}

TEST_CASE("csv round trip is bit exact") {
    auto g = PeriodicGrid::make(1, 16);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::vector<double> v(g.size());
    for (auto& x : v) x = unit(rng) * std::exp(unit(rng) * 20.0);
    GridFunction f(g, v);

    std::stringstream ss;
    f.to_csv(ss);
    auto f2 = GridFunction::from_csv(ss);
    REQUIRE(f2.size() == f.size());
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(f2[i] == f[i]);

    auto j = f.to_json();
    auto f3 = GridFunction::from_json(j);
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(f3[i] == f[i]);
}

TEST_CASE("csv round trip 2D") {
    auto g = PeriodicGrid::make(2, 8);
    auto f = GridFunction::sample(g, [](std::array<double, 2> p) {
        return std::cos(2 * M_PI * p[0]) + 0.25 * std::sin(2 * M_PI * p[1]);
    });
    std::stringstream ss;
    f.to_csv(ss);
    auto f2 = GridFunction::from_csv(ss);
    REQUIRE(f2.grid().dim == 2);
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(f2[i] == f[i]);
}
