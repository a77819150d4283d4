#include "wkam/mather.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <ostream>

namespace wkam {

void AlphaTable::to_csv(std::ostream& os) const {
    os << (dim == 1 ? "omega,alpha,residual\n" : "omega1,omega2,alpha,residual\n");
    char buf[32];
    auto put = [&](double v, char sep) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        os << buf << sep;
    };
    for (const auto& e : entries) {
        put(e.omega[0], ',');
        if (dim == 2) put(e.omega[1], ',');
        put(e.alpha, ',');
        put(e.residual, '\n');
    }
}

AlphaTable alpha_sweep(const HamiltonianSpec& H, const std::vector<Vec2>& omegas,
                       const PeriodicGrid& grid, const LaxOleinikConfig& cfg) {
    if (omegas.empty()) throw std::invalid_argument("omega list must be nonempty");
    AlphaTable table;
    table.dim = H.dim();
    table.entries.reserve(omegas.size());
    for (const Vec2& w : omegas) {
        for (int a = 0; a < H.dim(); ++a)
            if (!std::isfinite(w[a])) throw std::invalid_argument("omega must be finite");
        AlphaEntry e;
        e.omega = w;
        auto sol = solve_weak_kam(H.shifted(std::span<const double>(w.data(), H.dim())), grid, cfg);
        e.alpha = sol.c;
        e.residual = sol.residual;
        e.converged = sol.converged;
        table.entries.push_back(e);
    }
    std::sort(table.entries.begin(), table.entries.end(), [](const AlphaEntry& a, const AlphaEntry& b) {
        return a.omega[0] != b.omega[0] ? a.omega[0] < b.omega[0] : a.omega[1] < b.omega[1];
    });
    return table;
}

namespace {

// Adaptive Simpson quadrature with absolute tolerance.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa,
                        double fm, double fb, double whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

double integrate01(const std::function<double(double)>& f, double tol) {
    // Split into a few panels first; the integrand may have sqrt kinks.
    const int panels = 8;
    double acc = 0.0;
    for (int i = 0; i < panels; ++i) {
        double a = static_cast<double>(i) / panels, b = static_cast<double>(i + 1) / panels;
        double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
        double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        acc += adaptive_simpson(f, a, b, fa, fm, fb, whole, tol / panels, 48);
    }
    return acc;
}

double potential_max(const PotentialExpr& V) {
    // Dense sampling plus parabolic refinement: V is smooth and 1-periodic.
    const int n = 8192;
    double best = -std::numeric_limits<double>::infinity();
    int besti = 0;
    for (int i = 0; i < n; ++i) {
        double v = V.eval(static_cast<double>(i) / n);
        if (v > best) {
            best = v;
            besti = i;
        }
    }
    double h = 1.0 / n;
    double fm = V.eval((besti - 1.0) / n), fp = V.eval((besti + 1.0) / n);
    double denom = fm - 2.0 * best + fp;
    if (denom < 0.0) {
        double s = std::clamp(0.5 * (fm - fp) / denom, -1.0, 1.0);
        double refined = V.eval(besti * h + s * h);
        best = std::max(best, refined);
    }
    return best;
}

} // namespace

double flat_piece_width_1d(const PotentialExpr& V) {
    if (V.dim() != 1) throw std::invalid_argument("oracle requires dim 1");
    const double vmax = potential_max(V);
    auto integrand = [&](double x) { return std::sqrt(std::max(0.0, 2.0 * (vmax - V.eval(x)))); };
    return integrate01(integrand, 1e-10);
}

double alpha_oracle_1d(const PotentialExpr& V, double omega) {
    if (V.dim() != 1) throw std::invalid_argument("oracle requires dim 1");
    const double vmax = potential_max(V);
    auto W = [&](double c) {
        auto integrand = [&](double x) {
            return std::sqrt(std::max(0.0, 2.0 * (c - V.eval(x))));
        };
        return integrate01(integrand, 1e-10);
    };
    const double target = std::abs(omega);
    if (target <= W(vmax)) return vmax;

    // W is strictly increasing in c; bracket and bisect.
    double lo = vmax;
    double hi = vmax + 0.5 * omega * omega + 1.0;
    while (W(hi) < target) hi = vmax + 2.0 * (hi - vmax);
    for (int it = 0; it < 200 && hi - lo > 1e-10; ++it) {
        double mid = 0.5 * (lo + hi);
        if (W(mid) < target) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

ConvexityResult convexity_check(const AlphaTable& table, double tol) {
    const auto& e = table.entries;
    if (e.size() < 3)
        throw std::invalid_argument("convexity check needs at least 3 samples");

    // Project onto the sampling line (1D tables are trivially collinear).
    Vec2 dir{e.back().omega[0] - e.front().omega[0], e.back().omega[1] - e.front().omega[1]};
    double dn = std::sqrt(dir[0] * dir[0] + dir[1] * dir[1]);
    if (dn == 0.0) throw std::invalid_argument("omega samples are not collinear");
    dir = {dir[0] / dn, dir[1] / dn};
    std::vector<double> t(e.size());
    for (std::size_t i = 0; i < e.size(); ++i) {
        Vec2 d{e[i].omega[0] - e[0].omega[0], e[i].omega[1] - e[0].omega[1]};
        double cross = d[0] * dir[1] - d[1] * dir[0];
        if (std::abs(cross) > 1e-9)
            throw std::invalid_argument("omega samples are not collinear");
        t[i] = d[0] * dir[0] + d[1] * dir[1];
    }

    ConvexityResult r;
    r.pass = true;
    r.worst_second_difference = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i + 1 < e.size(); ++i) {
        double dl = t[i] - t[i - 1], dr = t[i + 1] - t[i];
        // Uniformly spaced triples use the plain second difference; otherwise
        // scale the slope increment back to comparable units.
        double sd;
        if (std::abs(dl - dr) <= 1e-9 * std::max(dl, dr)) {
            sd = e[i - 1].alpha - 2.0 * e[i].alpha + e[i + 1].alpha;
        } else {
            double sl = (e[i].alpha - e[i - 1].alpha) / dl;
            double sr = (e[i + 1].alpha - e[i].alpha) / dr;
            sd = (sr - sl) * std::min(dl, dr);
        }
        if (sd < r.worst_second_difference) {
            r.worst_second_difference = sd;
            r.worst_index = i;
        }
        if (sd < -tol) r.pass = false;
    }
    return r;
}

SuperlinearityResult superlinearity_check(const AlphaTable& table,
                                          std::span<const double> K_list) {
    const auto& e = table.entries;
    if (e.size() < 2) throw std::invalid_argument("table too small");
    double maxK = 0.0;
    for (double K : K_list) maxK = std::max(maxK, K);
    auto absw = [&](const AlphaEntry& a) {
        return std::sqrt(a.omega[0] * a.omega[0] + a.omega[1] * a.omega[1]);
    };
    double span = 0.0;
    for (const auto& a : e) span = std::max(span, absw(a));
    if (span < maxK + 1.0)
        throw std::invalid_argument("table span insufficient for requested K list");

    // Tail slope: one-sided difference quotients of alpha in |omega| at the
    // two sorted ends of the table, the strongest growth witness a finite
    // table carries.
    auto end_slope = [&](std::size_t a, std::size_t b) {
        double dw = absw(e[a]) - absw(e[b]);
        return dw > 0.0 ? (e[a].alpha - e[b].alpha) / dw
                        : -std::numeric_limits<double>::infinity();
    };
    double tail_slope =
        std::max(end_slope(e.size() - 1, e.size() - 2), end_slope(0, 1));

    SuperlinearityResult r;
    r.tail_slope = tail_slope;
    r.pass = true;
    for (double K : K_list) {
        SuperlinearityCertificate c;
        c.K = K;
        c.B = -std::numeric_limits<double>::infinity();
        for (const auto& a : e) c.B = std::max(c.B, K * absw(a) - a.alpha);
        c.finite = std::isfinite(c.B);
        c.growth_exceeds = tail_slope > K;
        if (!c.finite || !c.growth_exceeds) r.pass = false;
        r.certificates.push_back(c);
    }
    return r;
}

namespace {

double golden_min(const std::function<double(double)>& f, double a, double b, double tol,
                  double fa, double fb) {
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = f(x1), f2 = f(x2);
    // Bracket sanity: strictly monotone samples mean no interior minimum.
    if (fa < f1 && f1 < f2 && f2 < fb && fa < fb - 1e-12)
        throw Error("bracket does not contain a minimum (monotone increasing samples)");
    if (fb < f2 && f2 < f1 && f1 < fa && fb < fa - 1e-12)
        throw Error("bracket does not contain a minimum (monotone decreasing samples)");
    while (b - a > tol) {
        if (f1 <= f2) {
            b = x2;
            fb = f2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            fa = f1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = f(x2);
        }
    }
    return 0.5 * (a + b);
}

} // namespace

StrictCriticalResult strict_critical(const HamiltonianSpec& H, const PeriodicGrid& grid,
                                     const LaxOleinikConfig& cfg, const Vec2& bracket_lo,
                                     const Vec2& bracket_hi, double tol_omega) {
    const int dim = H.dim();
    auto alpha = [&](const Vec2& w) {
        auto sol = solve_weak_kam(H.shifted(std::span<const double>(w.data(), dim)), grid, cfg);
        return sol.c;
    };

    StrictCriticalResult r;
    if (dim == 1) {
        double fa = alpha({bracket_lo[0], 0.0});
        double fb = alpha({bracket_hi[0], 0.0});
        double w = golden_min([&](double t) { return alpha({t, 0.0}); }, bracket_lo[0],
                              bracket_hi[0], tol_omega, fa, fb);
        r.argmin_omega = {w, 0.0};
    } else {
        Vec2 w{0.5 * (bracket_lo[0] + bracket_hi[0]), 0.5 * (bracket_lo[1] + bracket_hi[1])};
        for (int round = 0; round < 3; ++round) {
            for (int axis = 0; axis < 2; ++axis) {
                auto line = [&](double t) {
                    Vec2 q = w;
                    q[axis] = t;
                    return alpha(q);
                };
                double fa = line(bracket_lo[axis]);
                double fb = line(bracket_hi[axis]);
                w[axis] = golden_min(line, bracket_lo[axis], bracket_hi[axis], tol_omega, fa, fb);
            }
        }
        r.argmin_omega = w;
    }
    r.c_strict = alpha(r.argmin_omega);
    Homomorphism rho;
    rho.dim = dim;
    rho.rho = r.argmin_omega;
    r.c_of_lift = solve_equivariant(H, rho, grid, cfg).periodic.c;
    return r;
}

} // namespace wkam
