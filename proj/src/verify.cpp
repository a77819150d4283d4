#include "wkam/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace wkam {

bool VerificationReport::all_pass() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

const CheckEntry* VerificationReport::find(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

nlohmann::json VerificationReport::to_json() const {
    nlohmann::json j;
    j["all_pass"] = all_pass();
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : checks)
        arr.push_back({{"name", c.name},
                       {"pass", c.pass},
                       {"value", c.value},
                       {"tol", c.tol},
                       {"detail", c.detail}});
    j["checks"] = arr;
    return j;
}

namespace {

struct KinkFlags {
    std::vector<bool> flagged; // per node, any axis
    std::vector<std::array<bool, 2>> axis_flag;
};

KinkFlags detect_kinks(const GridFunction& u) {
    const PeriodicGrid& g = u.grid();
    const double thresh = 10.0 * g.h * std::max(1.0, u.lipschitz());
    KinkFlags k;
    k.flagged.assign(g.size(), false);
    k.axis_flag.assign(g.size(), {false, false});
    if (g.dim == 1) {
        for (int i = 0; i < g.n; ++i) {
            double dp = (u[static_cast<std::size_t>(g.wrap(i + 1))] - u[static_cast<std::size_t>(i)]) / g.h;
            double dm = (u[static_cast<std::size_t>(i)] - u[static_cast<std::size_t>(g.wrap(i - 1))]) / g.h;
            if (std::abs(dp - dm) > thresh) {
                k.flagged[static_cast<std::size_t>(i)] = true;
                k.axis_flag[static_cast<std::size_t>(i)][0] = true;
            }
        }
    } else {
        for (int ix = 0; ix < g.n; ++ix)
            for (int iy = 0; iy < g.n; ++iy) {
                std::size_t i = g.index(ix, iy);
                double dpx = (u[g.index(g.wrap(ix + 1), iy)] - u[i]) / g.h;
                double dmx = (u[i] - u[g.index(g.wrap(ix - 1), iy)]) / g.h;
                double dpy = (u[g.index(ix, g.wrap(iy + 1))] - u[i]) / g.h;
                double dmy = (u[i] - u[g.index(ix, g.wrap(iy - 1))]) / g.h;
                if (std::abs(dpx - dmx) > thresh) k.axis_flag[i][0] = true;
                if (std::abs(dpy - dmy) > thresh) k.axis_flag[i][1] = true;
                k.flagged[i] = k.axis_flag[i][0] || k.axis_flag[i][1];
            }
    }
    return k;
}

} // namespace

CheckEntry check_subsolution(const HamiltonianSpec& H, const GridFunction& u, double c,
                             double tol) {
    const PeriodicGrid& g = u.grid();
    KinkFlags kinks = detect_kinks(u);
    double worst = -std::numeric_limits<double>::infinity();

    auto H_at = [&](std::size_t i, const Vec2& grad) {
        auto p = g.node(i);
        return H.eval(std::span<const double>(p.data(), g.dim),
                      std::span<const double>(grad.data(), g.dim));
    };

    for (std::size_t i = 0; i < g.size(); ++i) {
        // Per axis: centered gradient normally, else the better one-sided at
        // kink nodes (viscosity subsolutions only constrain differentiability
        // points).
        std::array<std::vector<double>, 2> cand;
        for (int a = 0; a < g.dim; ++a) {
            int ix = g.dim == 1 ? static_cast<int>(i) : static_cast<int>(i) / g.n;
            int iy = g.dim == 1 ? 0 : static_cast<int>(i) % g.n;
            auto at = [&](int dx, int dy) {
                return g.dim == 1 ? u[static_cast<std::size_t>(g.wrap(ix + dx))]
                                  : u[g.index(g.wrap(ix + dx), g.wrap(iy + dy))];
            };
            int dx = a == 0 ? 1 : 0, dy = a == 1 ? 1 : 0;
            double dp = (at(dx, dy) - u[i]) / g.h;
            double dm = (u[i] - at(-dx, -dy)) / g.h;
            if (kinks.axis_flag[i][a]) cand[a] = {dm, dp};
            else cand[a] = {0.5 * (dp + dm)};
        }
        double best = std::numeric_limits<double>::infinity();
        for (double gx : cand[0]) {
            if (g.dim == 1) {
                best = std::min(best, H_at(i, {gx, 0.0}));
            } else {
                for (double gy : cand[1]) best = std::min(best, H_at(i, {gx, gy}));
            }
        }
        worst = std::max(worst, best - c);
    }

    CheckEntry e;
    e.name = "subsolution";
    e.value = worst;
    e.tol = tol;
    e.pass = worst <= tol;
    e.detail = "max H(x,Du)-c over nodes (kink-aware)";
    return e;
}

namespace {

struct CurveSample {
    std::vector<Vec2> vertices;
    double total_time = 0.0;
};

/// Seeded broken-line sampler; the generator algorithm (std::mt19937_64 with
/// uniform_real_distribution, vertices then time) is fixed for reproducibility.
std::vector<CurveSample> sample_curves(int dim, int samples, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> segs(2, 8);
    std::uniform_real_distribution<double> time_dist(0.1, 2.0);
    std::vector<CurveSample> out;
    out.reserve(static_cast<std::size_t>(samples));
    for (int s = 0; s < samples; ++s) {
        CurveSample c;
        int m = segs(rng);
        c.vertices.resize(static_cast<std::size_t>(m) + 1);
        for (auto& v : c.vertices) {
            v[0] = unit(rng);
            v[1] = dim == 2 ? unit(rng) : 0.0;
        }
        c.total_time = time_dist(rng);
        out.push_back(std::move(c));
    }
    return out;
}

/// Endpoint-evaluated action of a straight segment from a to b over time dt,
/// subdivided so each substep moves at most one grid cell.
double segment_action(const Lagrangian& L, const Vec2& a, const Vec2& b, double dt, double h) {
    const int dim = L.dim();
    Vec2 d{minimal_rep(b[0] - a[0]), dim == 2 ? minimal_rep(b[1] - a[1]) : 0.0};
    double len = std::sqrt(d[0] * d[0] + d[1] * d[1]);
    int sub = std::max(1, static_cast<int>(std::ceil(len / h)));
    sub = std::max(sub, static_cast<int>(std::ceil(dt / h)));
    double ts = dt / sub;
    Vec2 v{d[0] / dt, d[1] / dt};
    double acc = 0.0;
    for (int i = 1; i <= sub; ++i) {
        Vec2 x{a[0] + d[0] * i / sub, a[1] + d[1] * i / sub};
        acc += ts * L.value(std::span<const double>(x.data(), dim),
                            std::span<const double>(v.data(), dim));
    }
    return acc;
}

double domination_defect(const Lagrangian& L, const GridFunction& u, double c,
                         const CurveSample& curve) {
    const int dim = L.dim();
    const double h = u.grid().h;
    const int m = static_cast<int>(curve.vertices.size()) - 1;
    const double ts = curve.total_time / m;
    double action = 0.0;
    for (int i = 0; i < m; ++i)
        action += segment_action(L, curve.vertices[static_cast<std::size_t>(i)],
                                 curve.vertices[static_cast<std::size_t>(i) + 1], ts, h);
    double ub = interpolate(u, std::span<const double>(curve.vertices.back().data(), dim));
    double ua = interpolate(u, std::span<const double>(curve.vertices.front().data(), dim));
    return ub - ua - action - c * curve.total_time;
}

} // namespace

CheckEntry check_domination(const Lagrangian& L, const GridFunction& u, double c, int samples,
                            std::uint64_t seed, double tol) {
    if (samples < 100) throw std::invalid_argument("domination check needs >= 100 samples");
    auto curves = sample_curves(L.dim(), samples, seed);
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& curve : curves)
        worst = std::max(worst, domination_defect(L, u, c, curve));
    CheckEntry e;
    e.name = "domination";
    e.value = worst;
    e.tol = tol;
    e.pass = worst <= tol;
    e.detail = "max defect u(b)-u(a) - action - c*dt over sampled curves";
    return e;
}

int count_domination_violations(const Lagrangian& L, const GridFunction& u, double c,
                                int samples, std::uint64_t seed, double positive_margin) {
    auto curves = sample_curves(L.dim(), samples, seed);
    int count = 0;
    for (const auto& curve : curves)
        if (domination_defect(L, u, c, curve) > positive_margin) ++count;
    return count;
}

CheckEntry check_calibration(const WeakKamSolution& solution, const Lagrangian& L,
                             std::span<const std::size_t> endpoints, int horizon) {
    if (!solution.history)
        throw Error("calibration check requires recorded minimizer history");
    const MinimizerHistory& hist = *solution.history;
    if (static_cast<int>(hist.offsets.size()) < horizon)
        throw Error("recorded history shorter than requested horizon");

    const PeriodicGrid& g = hist.u_end.grid();
    const double tau = hist.tau;
    const int dim = g.dim;
    double worst = 0.0;

    for (std::size_t x : endpoints) {
        if (x >= g.size()) throw std::invalid_argument("endpoint index out of range");
        // Follow the last `horizon` recorded sweeps backward from x.
        std::size_t cur = x;
        double action = 0.0;
        const int total = static_cast<int>(hist.offsets.size());
        for (int k = total - 1; k >= total - horizon; --k) {
            auto off = hist.offsets[static_cast<std::size_t>(k)][cur];
            auto pos = g.node(cur);
            Vec2 v{off[0] * g.h / tau, dim == 2 ? off[1] * g.h / tau : 0.0};
            action += tau * L.value(std::span<const double>(pos.data(), dim),
                                    std::span<const double>(v.data(), dim));
            if (dim == 1) {
                cur = static_cast<std::size_t>(g.wrap(static_cast<int>(cur) - off[0]));
            } else {
                int ix = static_cast<int>(cur) / g.n, iy = static_cast<int>(cur) % g.n;
                cur = g.index(g.wrap(ix - off[0]), g.wrap(iy - off[1]));
            }
        }
        // History sweeps started from u_start; over the last `horizon` of them
        // the start values have already been swept forward, so compare the
        // endpoint on u_end against the curve origin on the iterate that fed
        // the first used sweep. With horizon == recorded length those are
        // u_end and u_start.
        double u_origin;
        if (horizon == total) {
            u_origin = hist.u_start[cur];
        } else {
            // Partial horizon: re-derive the intermediate iterate value by
            // telescoping the recorded shifts from u_start is not stored per
            // step; fall back to u_end (the converged regime where iterates
            // agree up to the residual).
            u_origin = hist.u_end[cur];
        }
        double defect =
            std::abs(hist.u_end[x] - u_origin - action - solution.c * tau * horizon);
        worst = std::max(worst, defect);
    }

    CheckEntry e;
    e.name = "calibration";
    e.value = worst;
    e.tol = 10.0 * g.h;
    e.pass = worst <= e.tol;
    e.detail = "max |u(x)-u(gamma(0)) - action - c*T| over backtracked minimizers";
    return e;
}

CheckEntry check_evolution(const HamiltonianSpec& H, const GridFunction& u0,
                           const LaxOleinikConfig& cfg, int steps) {
    Lagrangian L(H);
    LaxOleinikConfig rc = cfg;
    if (rc.tau <= 0.0 || rc.v_max <= 0.0) rc = cfg.resolved(H, u0.grid());
    auto traj = evolve(L, u0, rc, steps);
    const PeriodicGrid& g = u0.grid();
    const double tau = rc.tau;

    double worst = 0.0;
    for (int k = 1; k + 1 < static_cast<int>(traj.size()); ++k) {
        const GridFunction& um = traj[static_cast<std::size_t>(k - 1)];
        const GridFunction& uk = traj[static_cast<std::size_t>(k)];
        const GridFunction& up = traj[static_cast<std::size_t>(k + 1)];
        // Exclude kink nodes (and one-cell margins) of the three time levels.
        KinkFlags fm = detect_kinks(um), fk = detect_kinks(uk), fp = detect_kinks(up);
        std::vector<bool> excluded(g.size(), false);
        auto mark = [&](const KinkFlags& f) {
            for (std::size_t i = 0; i < g.size(); ++i) {
                if (!f.flagged[i]) continue;
                if (g.dim == 1) {
                    int ix = static_cast<int>(i);
                    for (int d = -1; d <= 1; ++d)
                        excluded[static_cast<std::size_t>(g.wrap(ix + d))] = true;
                } else {
                    int ix = static_cast<int>(i) / g.n, iy = static_cast<int>(i) % g.n;
                    for (int dx = -1; dx <= 1; ++dx)
                        for (int dy = -1; dy <= 1; ++dy)
                            excluded[g.index(g.wrap(ix + dx), g.wrap(iy + dy))] = true;
                }
            }
        };
        mark(fm);
        mark(fk);
        mark(fp);

        auto grad = gradient_centered(uk);
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (excluded[i]) continue;
            double dt_u = (up[i] - um[i]) / (2.0 * tau);
            Vec2 du{grad[0][i], g.dim == 2 ? grad[1][i] : 0.0};
            auto pos = g.node(i);
            double Hval = H.eval(std::span<const double>(pos.data(), g.dim),
                                 std::span<const double>(du.data(), g.dim));
            worst = std::max(worst, std::abs(dt_u + Hval));
        }
    }

    CheckEntry e;
    e.name = "evolution";
    e.value = worst;
    e.tol = std::max(10.0 * g.h, 10.0 * tau);
    e.pass = worst <= e.tol;
    e.detail = "max |du/dt + H(x,Du)| away from kink nodes";
    return e;
}

SmoothResult smooth_subsolution(const HamiltonianSpec& H, const GridFunction& u, double c,
                                double epsilon, double tol, double pre_tol) {
    if (epsilon <= 0.0) throw std::invalid_argument("epsilon must be positive");
    const PeriodicGrid& g = u.grid();
    if (tol < 0.0) tol = 5.0 * g.h;
    if (pre_tol < 0.0) pre_tol = 5.0 * g.h;

    CheckEntry pre = check_subsolution(H, u, c, pre_tol);
    if (!pre.pass)
        throw Error("smooth_subsolution precondition: u is not a discrete subsolution at level c");

    double lip = std::max(u.lipschitz(), 1e-12);
    double delta = std::min(epsilon / (2.0 * lip), 0.125);
    if (delta < g.h)
        throw Error("epsilon too small for this grid (kernel radius under one cell)");

    MollifierKernel kernel = MollifierKernel::bump(g, delta);
    SmoothResult r;
    r.g = mollify(u, kernel);
    r.delta = delta;
    r.sup_err = (r.g - u).sup_norm();

    auto grad = gradient_centered(r.g);
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < g.size(); ++i) {
        Vec2 du{grad[0][i], g.dim == 2 ? grad[1][i] : 0.0};
        auto pos = g.node(i);
        double Hval = H.eval(std::span<const double>(pos.data(), g.dim),
                             std::span<const double>(du.data(), g.dim));
        worst = std::max(worst, Hval - (c + epsilon));
    }
    r.max_violation = worst;
    r.hull_pass = clarke_hull_check(u, kernel, 1e-6);
    r.pass = r.sup_err <= epsilon && worst <= tol && r.hull_pass;

    r.entry.name = "smoothing";
    r.entry.value = worst;
    r.entry.tol = tol;
    r.entry.pass = r.pass;
    r.entry.detail = "max H(x,Dg)-(c+eps); sup_err=" + std::to_string(r.sup_err) +
                     " delta=" + std::to_string(delta);
    return r;
}

namespace {

// Convex hull membership for 2D point sets via the monotone chain hull and
// signed distances to its edges.
bool in_hull_2d(const std::vector<Vec2>& pts, const Vec2& q, double tol) {
    std::vector<Vec2> p(pts);
    std::sort(p.begin(), p.end(), [](const Vec2& a, const Vec2& b) {
        return a[0] != b[0] ? a[0] < b[0] : a[1] < b[1];
    });
    p.erase(std::unique(p.begin(), p.end()), p.end());
    if (p.size() == 1)
        return std::abs(q[0] - p[0][0]) <= tol && std::abs(q[1] - p[0][1]) <= tol;
    auto cross = [](const Vec2& o, const Vec2& a, const Vec2& b) {
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    };
    if (p.size() == 2) {
        // Distance from q to the segment.
        Vec2 d{p[1][0] - p[0][0], p[1][1] - p[0][1]};
        double len2 = d[0] * d[0] + d[1] * d[1];
        double t = std::clamp(((q[0] - p[0][0]) * d[0] + (q[1] - p[0][1]) * d[1]) / len2, 0.0, 1.0);
        double dx = q[0] - (p[0][0] + t * d[0]), dy = q[1] - (p[0][1] + t * d[1]);
        return std::sqrt(dx * dx + dy * dy) <= tol;
    }
    std::vector<Vec2> hull(2 * p.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], p[i]) <= 0) --k;
        hull[k++] = p[i];
    }
    for (std::size_t i = p.size() - 1, t0 = k + 1; i-- > 0;) {
        while (k >= t0 && cross(hull[k - 2], hull[k - 1], p[i]) <= 0) --k;
        hull[k++] = p[i];
    }
    hull.resize(k > 1 ? k - 1 : k);
    if (hull.size() < 3) {
        // Degenerate (collinear) set; fall back to segment distance on extremes.
        return in_hull_2d({hull.front(), hull.back()}, q, tol);
    }
    for (std::size_t i = 0; i < hull.size(); ++i) {
        const Vec2& a = hull[i];
        const Vec2& b = hull[(i + 1) % hull.size()];
        double cr = cross(a, b, q);
        double elen = std::sqrt((b[0] - a[0]) * (b[0] - a[0]) + (b[1] - a[1]) * (b[1] - a[1]));
        if (elen > 0 && cr / elen < -tol) return false;
    }
    return true;
}

} // namespace

bool clarke_hull_check(const GridFunction& u, const MollifierKernel& kernel, double tol) {
    const PeriodicGrid& g = u.grid();
    GridFunction m = mollify(u, kernel);
    auto mgrad = gradient_centered(m);
    const int r = kernel.radius_cells() + 1; // support plus the centered stencil cell

    if (g.dim == 1) {
        for (int i = 0; i < g.n; ++i) {
            double lo = std::numeric_limits<double>::infinity();
            double hi = -std::numeric_limits<double>::infinity();
            for (int o = -r; o <= r; ++o) {
                int j = g.wrap(i + o);
                double d = (u[static_cast<std::size_t>(g.wrap(j + 1))] -
                            u[static_cast<std::size_t>(j)]) /
                           g.h;
                lo = std::min(lo, d);
                hi = std::max(hi, d);
            }
            double gv = mgrad[0][static_cast<std::size_t>(i)];
            if (gv < lo - tol || gv > hi + tol) return false;
        }
        return true;
    }

    auto ugrad = gradient_centered(u);
    for (int ix = 0; ix < g.n; ++ix)
        for (int iy = 0; iy < g.n; ++iy) {
            std::vector<Vec2> pts;
            pts.reserve(static_cast<std::size_t>(2 * r + 1) * (2 * r + 1));
            for (int ox = -r; ox <= r; ++ox)
                for (int oy = -r; oy <= r; ++oy) {
                    std::size_t j = g.index(g.wrap(ix + ox), g.wrap(iy + oy));
                    pts.push_back({ugrad[0][j], ugrad[1][j]});
                }
            std::size_t i = g.index(ix, iy);
            if (!in_hull_2d(pts, {mgrad[0][i], mgrad[1][i]}, tol)) return false;
        }
    return true;
}

std::vector<double> forced_drift_trace(const Lagrangian& L, const GridFunction& u0,
                                       const LaxOleinikConfig& cfg, double c_forced, int steps) {
    LaxOleinikConfig rc = cfg;
    if (rc.tau <= 0.0 || rc.v_max <= 0.0) rc = cfg.resolved(L.hamiltonian(), u0.grid());
    rc.validate(u0.grid());
    std::vector<double> trace;
    trace.reserve(static_cast<std::size_t>(steps));
    GridFunction u = u0;
    for (int s = 0; s < steps; ++s) {
        auto step = lo_step(L, u, rc);
        u = step.Tu + c_forced * rc.tau;
        trace.push_back(u[rc.anchor]);
    }
    return trace;
}

} // namespace wkam
