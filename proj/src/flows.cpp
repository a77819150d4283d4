#include "wkam/flows.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "wkam/grid.hpp"

namespace wkam {

double Trajectory::max_energy_drift() const {
    double drift = 0.0;
    for (double e : energy) drift = std::max(drift, std::abs(e - energy.front()));
    return drift;
}

void Trajectory::to_csv(std::ostream& os) const {
    os << (dim == 1 ? "t,x,p,energy\n" : "t,x1,x2,p1,p2,energy\n");
    char buf[32];
    auto put = [&](double v, char sep) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        os << buf << sep;
    };
    for (std::size_t i = 0; i < times.size(); ++i) {
        put(times[i], ',');
        for (int a = 0; a < dim; ++a) put(states[i].x[a], ',');
        for (int a = 0; a < dim; ++a) put(states[i].p[a], ',');
        put(energy[i], '\n');
    }
}

namespace {

struct Deriv {
    Vec2 dx{0, 0}, dp{0, 0};
};

Deriv rhs(const HamiltonianSpec& H, const Vec2& x, const Vec2& p) {
    Deriv d;
    std::array<double, 2> dHdx{0, 0}, dHdp{0, 0};
    H.grad(std::span<const double>(x.data(), H.dim()), std::span<const double>(p.data(), H.dim()),
           dHdx, dHdp);
    for (int a = 0; a < H.dim(); ++a) {
        d.dx[a] = dHdp[a];
        d.dp[a] = -dHdx[a];
    }
    return d;
}

Vec2 axpy(const Vec2& a, double s, const Vec2& b) {
    return {a[0] + s * b[0], a[1] + s * b[1]};
}

} // namespace

Trajectory integrate(const HamiltonianSpec& H, const PhasePoint& start, double t_end, double dt) {
    if (dt <= 0.0 || t_end <= 0.0)
        throw std::invalid_argument("t_end and dt must be positive");
    const int dim = H.dim();
    const int steps = static_cast<int>(std::llround(t_end / dt));

    Trajectory traj;
    traj.dim = dim;
    traj.times.reserve(static_cast<std::size_t>(steps) + 1);
    traj.states.reserve(static_cast<std::size_t>(steps) + 1);
    traj.energy.reserve(static_cast<std::size_t>(steps) + 1);

    Vec2 x = start.x, p = start.p;
    auto record = [&](double t) {
        Vec2 xw{x[0] - std::floor(x[0]), dim == 2 ? x[1] - std::floor(x[1]) : 0.0};
        traj.times.push_back(t);
        traj.states.push_back({xw, p});
        double e = H.eval(std::span<const double>(xw.data(), dim),
                          std::span<const double>(p.data(), dim));
        if (!std::isfinite(e))
            throw Error("non-finite state during integration (flow blow-up)");
        traj.energy.push_back(e);
    };
    record(0.0);

    for (int s = 1; s <= steps; ++s) {
        Deriv k1 = rhs(H, x, p);
        Deriv k2 = rhs(H, axpy(x, 0.5 * dt, k1.dx), axpy(p, 0.5 * dt, k1.dp));
        Deriv k3 = rhs(H, axpy(x, 0.5 * dt, k2.dx), axpy(p, 0.5 * dt, k2.dp));
        Deriv k4 = rhs(H, axpy(x, dt, k3.dx), axpy(p, dt, k3.dp));
        for (int a = 0; a < dim; ++a) {
            x[a] += dt / 6.0 * (k1.dx[a] + 2 * k2.dx[a] + 2 * k3.dx[a] + k4.dx[a]);
            p[a] += dt / 6.0 * (k1.dp[a] + 2 * k2.dp[a] + 2 * k3.dp[a] + k4.dp[a]);
            if (!std::isfinite(x[a]) || !std::isfinite(p[a]))
                throw Error("non-finite state during integration (flow blow-up)");
        }
        // Keep the stored position on the fundamental domain; the integration
        // itself is translation invariant so wrapping x is exact.
        x[0] -= std::floor(x[0]);
        if (dim == 2) x[1] -= std::floor(x[1]);
        record(s * dt);
    }
    return traj;
}

MomentumBoundReport momentum_bound_check(const Trajectory& traj, const TonelliConstants& consts,
                                         double tol) {
    MomentumBoundReport r;
    r.c_star_1 = consts.C_star(1.0);
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
        double pn = norm(std::span<const double>(traj.states[i].p.data(), traj.dim));
        r.max_p_norm = std::max(r.max_p_norm, pn);
        r.max_energy = std::max(r.max_energy, traj.energy[i]);
    }
    r.bound = r.c_star_1 + r.max_energy + tol;
    r.pass = r.max_p_norm <= r.bound;
    return r;
}

ActionCurve minimize_action(const Lagrangian& L, const Vec2& a, const Vec2& b, double T,
                            int segments) {
    if (T <= 0.0) throw std::invalid_argument("T must be positive");
    if (segments < 8) throw std::invalid_argument("segments must be >= 8");
    const int dim = L.dim();
    const int m = segments;
    const double ts = T / m;

    // Vertices live on the real-line lift; only displacements and values mod 1
    // enter the action, so the lift fixes the homotopy class of the initial
    // minimal representative.
    std::vector<Vec2> x(static_cast<std::size_t>(m) + 1);
    Vec2 d{minimal_rep(b[0] - a[0]), dim == 2 ? minimal_rep(b[1] - a[1]) : 0.0};
    for (int i = 0; i <= m; ++i)
        for (int c = 0; c < dim; ++c)
            x[static_cast<std::size_t>(i)][c] = a[c] + d[c] * i / m;

    auto action = [&](const std::vector<Vec2>& pts) {
        double acc = 0.0;
        for (int i = 0; i < m; ++i) {
            Vec2 v{(pts[i + 1][0] - pts[i][0]) / ts,
                   dim == 2 ? (pts[i + 1][1] - pts[i][1]) / ts : 0.0};
            acc += ts * L.value(std::span<const double>(pts[i + 1].data(), dim),
                                std::span<const double>(v.data(), dim));
        }
        return acc;
    };

    // dA/dx_j = ts*Lx(x_j, v_{j-1}) + Lv(x_j, v_{j-1}) - Lv(x_{j+1}, v_j)
    auto gradient = [&](const std::vector<Vec2>& pts, std::vector<Vec2>& g) {
        g.assign(pts.size(), {0.0, 0.0});
        std::array<double, 2> lx, lv;
        for (int i = 0; i < m; ++i) {
            Vec2 v{(pts[i + 1][0] - pts[i][0]) / ts,
                   dim == 2 ? (pts[i + 1][1] - pts[i][1]) / ts : 0.0};
            L.grad(std::span<const double>(pts[i + 1].data(), dim),
                   std::span<const double>(v.data(), dim), lx, lv);
            for (int c = 0; c < dim; ++c) {
                g[static_cast<std::size_t>(i + 1)][c] += ts * lx[c] + lv[c];
                g[static_cast<std::size_t>(i)][c] -= lv[c];
            }
        }
        g.front() = {0.0, 0.0};
        g.back() = {0.0, 0.0};
    };

    const double gtol = 1e-8;
    const int max_iter = 100000;
    ActionCurve out;
    double A = action(x);
    std::vector<Vec2> g, trial(x.size());
    std::vector<Vec2> prev_x, prev_g;
    double step = ts;

    int it = 0;
    for (; it < max_iter; ++it) {
        gradient(x, g);
        double gnorm = 0.0;
        for (auto& gi : g)
            for (int c = 0; c < dim; ++c) gnorm = std::max(gnorm, std::abs(gi[c]));
        out.grad_sup_norm = gnorm;
        if (gnorm < gtol) {
            out.converged = true;
            break;
        }
        double g2 = 0.0;
        for (auto& gi : g)
            for (int c = 0; c < dim; ++c) g2 += gi[c] * gi[c];

        // Barzilai-Borwein trial step (safeguarded by backtracking below);
        // plain fixed steps crawl on the stiff action Hessian.
        double s = step;
        if (!prev_x.empty()) {
            double sy = 0.0, yy = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i)
                for (int c = 0; c < dim; ++c) {
                    double dx = x[i][c] - prev_x[i][c];
                    double dg = g[i][c] - prev_g[i][c];
                    sy += dx * dg;
                    yy += dg * dg;
                }
            if (sy > 0.0 && yy > 0.0 && std::isfinite(sy / yy)) s = sy / yy;
        }
        prev_x = x;
        prev_g = g;

        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            for (std::size_t i = 0; i < x.size(); ++i)
                for (int c = 0; c < dim; ++c) trial[i][c] = x[i][c] - s * g[i][c];
            double At = action(trial);
            if (At <= A - 1e-4 * s * g2) {
                x.swap(trial);
                A = At;
                accepted = true;
                step = s;
                break;
            }
            s *= 0.5;
        }
        if (!accepted) break; // line-search failure: report last iterate, flagged
    }
    out.iterations = it;
    out.points = std::move(x);
    out.action = A;
    return out;
}

} // namespace wkam
