#include "wkam/lax_oleinik.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace wkam {

namespace {

/// Internal grid abstraction: n[a] nodes of spacing h per axis, axis period
/// n[a]*h. The public torus is the period-1 case; the invariant solve runs on
/// a quotient ring with period 1/k along axis 0.
struct Ring {
    int dim = 1;
    std::array<int, 2> n{8, 8};
    double h = 0.125;

    std::size_t size() const {
        return dim == 1 ? static_cast<std::size_t>(n[0])
                        : static_cast<std::size_t>(n[0]) * n[1];
    }
    int wrap(int i, int axis) const {
        int m = i % n[axis];
        return m < 0 ? m + n[axis] : m;
    }
    std::size_t index(int ix, int iy) const {
        return dim == 1 ? static_cast<std::size_t>(ix)
                        : static_cast<std::size_t>(ix) * n[1] + iy;
    }
    std::array<int, 2> coords(std::size_t idx) const {
        if (dim == 1) return {static_cast<int>(idx), 0};
        return {static_cast<int>(idx / static_cast<std::size_t>(n[1])),
                static_cast<int>(idx % static_cast<std::size_t>(n[1]))};
    }
    std::array<double, 2> pos(std::size_t idx) const {
        auto c = coords(idx);
        return {c[0] * h, c[1] * h};
    }
    static Ring of(const PeriodicGrid& g) { return Ring{g.dim, {g.n, g.n}, g.h}; }
};

double ring_interp1(std::span<const double> u, int n, double t) {
    // t in cell units, any real
    double tt = t - n * std::floor(t / n);
    int i0 = static_cast<int>(tt);
    if (i0 >= n) i0 = n - 1;
    double fr = tt - i0;
    return (1.0 - fr) * u[static_cast<std::size_t>(i0)] +
           fr * u[static_cast<std::size_t>((i0 + 1) % n)];
}

double ring_interp2(std::span<const double> u, const Ring& ring, double tx, double ty) {
    double ux = tx - ring.n[0] * std::floor(tx / ring.n[0]);
    double uy = ty - ring.n[1] * std::floor(ty / ring.n[1]);
    int i0 = static_cast<int>(ux), j0 = static_cast<int>(uy);
    if (i0 >= ring.n[0]) i0 = ring.n[0] - 1;
    if (j0 >= ring.n[1]) j0 = ring.n[1] - 1;
    double s = ux - i0, t = uy - j0;
    int i1 = (i0 + 1) % ring.n[0], j1 = (j0 + 1) % ring.n[1];
    return (1 - s) * ((1 - t) * u[ring.index(i0, j0)] + t * u[ring.index(i0, j1)]) +
           s * ((1 - t) * u[ring.index(i1, j0)] + t * u[ring.index(i1, j1)]);
}

/// Per-solve precomputed minimization kernel.
class RingKernel {
public:
    RingKernel(const Lagrangian& L, Ring ring, double tau, double v_max, bool refine)
        : L_(L), ring_(ring), tau_(tau), v_max_(v_max), refine_(refine) {
        mech_ = L.mechanical_family();
        r_ = static_cast<int>(std::floor(tau * v_max / ring.h + 1e-12));
        if (r_ < 1)
            throw std::invalid_argument("tau*v_max below one grid cell: operator is the identity");
        if (r_ > 30000)
            throw std::invalid_argument("search window exceeds 30000 cells; lower tau or v_max");

        const Vec2& w = L.hamiltonian().omega();
        if (mech_) {
            tV_.resize(ring_.size());
            for (std::size_t i = 0; i < tV_.size(); ++i) {
                auto p = ring_.pos(i);
                tV_[i] = tau_ * L_.hamiltonian().potential().eval(
                                    std::span<const double>(p.data(), ring_.dim));
            }
            for (int a = 0; a < ring_.dim; ++a) {
                kin_[a].resize(static_cast<std::size_t>(2 * r_ + 1));
                for (int o = -r_; o <= r_; ++o) {
                    double d = o * ring_.h;
                    kin_[a][static_cast<std::size_t>(o + r_)] =
                        0.5 * d * d / tau_ - w[a] * d;
                }
            }
        } else {
            // Effective per-axis offset bounds from the Lagrangian velocity box.
            o_lo_ = std::max(-r_, static_cast<int>(std::ceil(L.v_box_min() * tau / ring.h)));
            o_hi_ = std::min(r_, static_cast<int>(std::floor(L.v_box_max() * tau / ring.h)));
            if (o_lo_ > o_hi_)
                throw std::invalid_argument("velocity window empty for tabulated Lagrangian");
        }
    }

    int radius() const { return r_; }

    void step(std::span<const double> u, std::vector<double>& Tu,
              std::vector<std::array<int16_t, 2>>* offsets) const {
        Tu.resize(ring_.size());
        if (offsets) offsets->assign(ring_.size(), {0, 0});
        if (ring_.dim == 1) step1(u, Tu, offsets);
        else step2(u, Tu, offsets);
    }

private:
    const Lagrangian& L_;
    Ring ring_;
    double tau_, v_max_;
    bool refine_, mech_ = false;
    int r_ = 0;
    int o_lo_ = 0, o_hi_ = 0; // tabulated effective window
    std::vector<double> tV_;
    std::array<std::vector<double>, 2> kin_;

    double kin_cont(int axis, double s) const {
        double d = s * ring_.h;
        return 0.5 * d * d / tau_ - L_.hamiltonian().omega()[axis] * d;
    }

    void step1(std::span<const double> u, std::vector<double>& Tu,
               std::vector<std::array<int16_t, 2>>* offsets) const {
        const int n = ring_.n[0];
        const double u_min = *std::min_element(u.begin(), u.end());

        const int lo = mech_ ? -r_ : o_lo_;
        const int hi = mech_ ? r_ : o_hi_;
        // A window that wraps the whole ring has no boundary to hit; the
        // locality diagnostic only applies to genuinely local windows.
        const bool check_boundary = (hi - lo + 1) < n;
        const Vec2& w = L_.hamiltonian().omega();
        int o_center = std::clamp(static_cast<int>(std::llround(w[0] * tau_ / ring_.h)), lo, hi);

        for (int i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            int best_o = 0, best_y = 0;

            auto phi = [&](int o) {
                int y = ring_.wrap(i - o, 0);
                if (mech_) return u[static_cast<std::size_t>(y)] + kin_[0][static_cast<std::size_t>(o + r_)];
                double x = i * ring_.h, v = o * ring_.h / tau_;
                return u[static_cast<std::size_t>(y)] + tau_ * L_.value1(x, v);
            };
            auto consider = [&](int o) {
                double val = phi(o);
                int y = ring_.wrap(i - o, 0);
                if (val < best || (val == best && y < best_y)) {
                    best = val;
                    best_o = o;
                    best_y = y;
                }
                return val;
            };

            if (mech_) {
                // kin is quadratic in o: scan outward from its vertex and stop
                // an arm once even the best possible u value cannot win.
                consider(o_center);
                for (int o = o_center - 1; o >= lo; --o) {
                    if (u_min + kin_[0][static_cast<std::size_t>(o + r_)] > best) break;
                    consider(o);
                }
                for (int o = o_center + 1; o <= hi; ++o) {
                    if (u_min + kin_[0][static_cast<std::size_t>(o + r_)] > best) break;
                    consider(o);
                }
            } else {
                for (int o = lo; o <= hi; ++o) consider(o);
            }

            if (check_boundary && (best_o == lo || best_o == hi))
                throw BoundaryError(
                    "discrete minimizer on the search-window boundary (v_max too small)");

            double result = best;
            if (refine_ && best_o > lo && best_o < hi) {
                double fm = phi(best_o - 1), f0 = best, fp = phi(best_o + 1);
                double denom = fm - 2.0 * f0 + fp;
                if (denom > 0.0) {
                    double s = std::clamp(0.5 * (fm - fp) / denom, -1.0, 1.0);
                    double so = best_o + s;
                    bool ok = true;
                    double cand;
                    if (mech_) {
                        cand = ring_interp1(u, n, i - so) + kin_cont(0, so);
                    } else {
                        double v = so * ring_.h / tau_;
                        ok = v >= L_.v_box_min() && v <= L_.v_box_max();
                        cand = ok ? ring_interp1(u, n, i - so) +
                                        tau_ * L_.value1(i * ring_.h, v)
                                  : 0.0;
                    }
                    if (ok && cand < result) result = cand;
                }
            }
            Tu[static_cast<std::size_t>(i)] = result - (mech_ ? tV_[static_cast<std::size_t>(i)] : 0.0);
            if (offsets)
                (*offsets)[static_cast<std::size_t>(i)] = {static_cast<int16_t>(best_o), 0};
        }
    }

    void step2(std::span<const double> u, std::vector<double>& Tu,
               std::vector<std::array<int16_t, 2>>* offsets) const {
        const double rho = tau_ * v_max_ / ring_.h; // ball radius in cells
        const double rho2 = rho * rho;
        const double half0 = 0.5 * ring_.n[0], half1 = 0.5 * ring_.n[1];
        const bool check_boundary = rho2 < half0 * half0 + half1 * half1;
        for (int ix = 0; ix < ring_.n[0]; ++ix) {
            for (int iy = 0; iy < ring_.n[1]; ++iy) {
                const std::size_t idx = ring_.index(ix, iy);
                double best = std::numeric_limits<double>::infinity();
                int bo1 = 0, bo2 = 0;
                std::size_t best_y = 0;
                std::array<double, 2> x{ix * ring_.h, iy * ring_.h};

                auto phi = [&](int o1, int o2) {
                    std::size_t y = ring_.index(ring_.wrap(ix - o1, 0), ring_.wrap(iy - o2, 1));
                    if (mech_)
                        return u[y] + kin_[0][static_cast<std::size_t>(o1 + r_)] +
                               kin_[1][static_cast<std::size_t>(o2 + r_)];
                    std::array<double, 2> v{o1 * ring_.h / tau_, o2 * ring_.h / tau_};
                    return u[y] + tau_ * L_.value(std::span<const double>(x.data(), 2),
                                                  std::span<const double>(v.data(), 2));
                };

                for (int o1 = -r_; o1 <= r_; ++o1) {
                    if (!mech_ && (o1 < o_lo_ || o1 > o_hi_)) continue;
                    int m2 = static_cast<int>(std::floor(std::sqrt(std::max(0.0, rho2 - o1 * o1))));
                    int lo2 = -m2, hi2 = m2;
                    if (!mech_) {
                        lo2 = std::max(lo2, o_lo_);
                        hi2 = std::min(hi2, o_hi_);
                    }
                    for (int o2 = lo2; o2 <= hi2; ++o2) {
                        double val = phi(o1, o2);
                        std::size_t y =
                            ring_.index(ring_.wrap(ix - o1, 0), ring_.wrap(iy - o2, 1));
                        if (val < best || (val == best && y < best_y)) {
                            best = val;
                            bo1 = o1;
                            bo2 = o2;
                            best_y = y;
                        }
                    }
                }

                if (check_boundary &&
                    static_cast<double>(bo1) * bo1 + static_cast<double>(bo2) * bo2 >=
                        (rho - 1.0) * (rho - 1.0))
                    throw BoundaryError(
                        "discrete minimizer on the search-window boundary (v_max too small)");

                double result = best;
                const int rlo = mech_ ? -r_ : o_lo_, rhi = mech_ ? r_ : o_hi_;
                if (refine_ && bo1 > rlo && bo1 < rhi && bo2 > rlo && bo2 < rhi) {
                    double f0 = best;
                    double fxm = phi(bo1 - 1, bo2), fxp = phi(bo1 + 1, bo2);
                    double fym = phi(bo1, bo2 - 1), fyp = phi(bo1, bo2 + 1);
                    double dx = fxm - 2 * f0 + fxp, dy = fym - 2 * f0 + fyp;
                    double s1 = dx > 0 ? std::clamp(0.5 * (fxm - fxp) / dx, -1.0, 1.0) : 0.0;
                    double s2 = dy > 0 ? std::clamp(0.5 * (fym - fyp) / dy, -1.0, 1.0) : 0.0;
                    if (s1 != 0.0 || s2 != 0.0) {
                        double so1 = bo1 + s1, so2 = bo2 + s2;
                        double cand;
                        bool ok = true;
                        if (mech_) {
                            cand = ring_interp2(u, ring_, ix - so1, iy - so2) +
                                   kin_cont(0, so1) + kin_cont(1, so2);
                        } else {
                            std::array<double, 2> v{so1 * ring_.h / tau_, so2 * ring_.h / tau_};
                            ok = v[0] >= L_.v_box_min() && v[0] <= L_.v_box_max() &&
                                 v[1] >= L_.v_box_min() && v[1] <= L_.v_box_max();
                            cand = ok ? ring_interp2(u, ring_, ix - so1, iy - so2) +
                                            tau_ * L_.value(std::span<const double>(x.data(), 2),
                                                            std::span<const double>(v.data(), 2))
                                      : 0.0;
                        }
                        if (ok && cand < result) result = cand;
                    }
                }
                Tu[idx] = result - (mech_ ? tV_[idx] : 0.0);
                if (offsets)
                    (*offsets)[idx] = {static_cast<int16_t>(bo1), static_cast<int16_t>(bo2)};
            }
        }
    }
};

struct CoreSolution {
    std::vector<double> u;
    double c = 0.0;
    double residual = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<double> drift_trace;
    std::vector<std::vector<std::array<int16_t, 2>>> rec_offsets;
    std::vector<double> rec_shifts;
    std::vector<double> rec_u_start;
};

CoreSolution solve_core(const Lagrangian& L, const Ring& ring, const LaxOleinikConfig& cfg,
                        std::size_t anchor, int record_steps) {
    RingKernel kernel(L, ring, cfg.tau, cfg.v_max, cfg.refine);
    CoreSolution out;
    out.u.assign(ring.size(), 0.0);
    std::vector<double> Tu;

    // Averaged (Krasnoselskii-Mann) value iteration: the plain normalized map
    // is only nonexpansive and keeps rotating along minimizing cycles in the
    // supercritical regime; averaging with the identity damps that mode and
    // converges to the same fixed points modulo constants.
    const double beta = 0.5;
    double c_est = 0.0;
    for (int it = 1; it <= cfg.max_iter; ++it) {
        kernel.step(out.u, Tu, nullptr);
        double shift = Tu[anchor] - out.u[anchor];
        for (std::size_t i = 0; i < Tu.size(); ++i)
            Tu[i] = (1.0 - beta) * out.u[i] + beta * Tu[i];
        double norm_shift = Tu[anchor];
        double delta = 0.0;
        for (std::size_t i = 0; i < Tu.size(); ++i) {
            double nu = Tu[i] - norm_shift;
            delta = std::max(delta, std::abs(nu - out.u[i]));
            out.u[i] = nu;
        }
        out.drift_trace.push_back(shift);
        c_est = -shift / cfg.tau;
        out.iterations = it;
        // Stop margin keeps the raw residual within tol*tau*max(1,|c|).
        if (delta <= 0.25 * cfg.tol * cfg.tau * std::max(1.0, std::abs(c_est))) {
            out.converged = true;
            break;
        }
    }

    // Residual against the definition: sup |T u - u + c tau|.
    kernel.step(out.u, Tu, nullptr);
    double shift = Tu[anchor];
    out.c = -shift / cfg.tau;
    double resid = 0.0;
    for (std::size_t i = 0; i < Tu.size(); ++i)
        resid = std::max(resid, std::abs(Tu[i] - out.u[i] + out.c * cfg.tau));
    out.residual = resid;

    if (record_steps > 0) {
        // Recording sweeps run without sub-cell refinement so the argmin maps
        // chain node-to-node and the telescoped action identity is exact.
        LaxOleinikConfig rc = cfg;
        rc.refine = false;
        RingKernel rec_kernel(L, ring, rc.tau, rc.v_max, false);
        out.rec_u_start = out.u;
        for (int s = 0; s < record_steps; ++s) {
            std::vector<std::array<int16_t, 2>> offs;
            rec_kernel.step(out.u, Tu, &offs);
            double sh = Tu[anchor];
            for (std::size_t i = 0; i < Tu.size(); ++i) out.u[i] = Tu[i] - sh;
            out.rec_offsets.push_back(std::move(offs));
            out.rec_shifts.push_back(sh);
        }
    }
    return out;
}

} // namespace

LaxOleinikConfig LaxOleinikConfig::resolved(const HamiltonianSpec& spec,
                                            const PeriodicGrid& grid) const {
    LaxOleinikConfig out = *this;
    if (out.v_max <= 0.0) {
        std::array<double, 2> Rs{0.0, 1.0};
        auto consts = TonelliConstants::estimate(spec, Rs, {}, 32);
        double c_up = consts.C(0.0); // constants are dominated by L + C(0)
        out.v_max = consts.A(0.0) + consts.C(consts.theta(c_up) + 1.0);
    }
    if (out.tau <= 0.0) out.tau = 8.0 * grid.h / out.v_max;
    return out;
}

void LaxOleinikConfig::validate(const PeriodicGrid& grid) const {
    if (tau <= 0.0) throw std::invalid_argument("tau must be positive");
    if (v_max <= 0.0) throw std::invalid_argument("v_max must be positive");
    if (tau * v_max < grid.h * (1.0 - 1e-12))
        throw std::invalid_argument("tau*v_max below one grid cell: operator is the identity");
    if (anchor >= grid.size()) throw std::invalid_argument("anchor index out of range");
    if (tol <= 0.0) throw std::invalid_argument("tol must be positive");
    if (max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
}

std::size_t StepResult::origin_index(const PeriodicGrid& grid, std::size_t i) const {
    auto off = argmin_offsets[i];
    if (grid.dim == 1) return static_cast<std::size_t>(grid.wrap(static_cast<int>(i) - off[0]));
    int ix = static_cast<int>(i) / grid.n, iy = static_cast<int>(i) % grid.n;
    return grid.index(grid.wrap(ix - off[0]), grid.wrap(iy - off[1]));
}

StepResult lo_step(const Lagrangian& L, const GridFunction& u, const LaxOleinikConfig& cfg) {
    LaxOleinikConfig rc = cfg;
    if (rc.tau <= 0.0 || rc.v_max <= 0.0) rc = cfg.resolved(L.hamiltonian(), u.grid());
    rc.validate(u.grid());
    RingKernel kernel(L, Ring::of(u.grid()), rc.tau, rc.v_max, rc.refine);
    StepResult out;
    std::vector<double> Tu;
    kernel.step(u.values(), Tu, &out.argmin_offsets);
    out.Tu = GridFunction(u.grid(), std::move(Tu));
    return out;
}

WeakKamSolution solve_weak_kam(const HamiltonianSpec& H, const PeriodicGrid& grid,
                               const LaxOleinikConfig& cfg, int record_history_steps) {
    LaxOleinikConfig rc = cfg.resolved(H, grid);
    rc.validate(grid);
    Lagrangian L(H);
    CoreSolution core = solve_core(L, Ring::of(grid), rc, rc.anchor, record_history_steps);

    WeakKamSolution sol;
    sol.c = core.c;
    sol.residual = core.residual;
    sol.iterations = core.iterations;
    sol.converged = core.converged;
    sol.drift_trace = std::move(core.drift_trace);
    sol.cfg = rc;
    if (record_history_steps > 0) {
        MinimizerHistory h;
        h.u_start = GridFunction(grid, std::move(core.rec_u_start));
        h.u_end = GridFunction(grid, core.u);
        h.offsets = std::move(core.rec_offsets);
        h.shifts = std::move(core.rec_shifts);
        h.tau = rc.tau;
        sol.u = h.u_start; // converged iterate before the recording sweeps
        sol.history = std::move(h);
    } else {
        sol.u = GridFunction(grid, std::move(core.u));
    }
    return sol;
}

double EquivariantSolution::lift(std::span<const double> x) const {
    double acc = interpolate(periodic.u, x);
    for (int a = 0; a < rho.dim; ++a) acc += rho.rho[a] * x[a];
    return acc;
}

EquivariantSolution solve_equivariant(const HamiltonianSpec& H, const Homomorphism& rho,
                                      const PeriodicGrid& grid, const LaxOleinikConfig& cfg,
                                      int record_history_steps) {
    if (rho.dim != H.dim()) throw std::invalid_argument("homomorphism dim mismatch");
    for (int a = 0; a < rho.dim; ++a)
        if (!std::isfinite(rho.rho[a])) throw std::invalid_argument("rho must be finite");
    EquivariantSolution out;
    out.rho = rho;
    out.periodic = solve_weak_kam(H.shifted(std::span<const double>(rho.rho.data(), rho.dim)),
                                  grid, cfg, record_history_steps);
    return out;
}

InvariantSolution solve_invariant(const HamiltonianSpec& H, int k, const PeriodicGrid& grid,
                                  const LaxOleinikConfig& cfg) {
    if (k < 1) throw std::invalid_argument("subgroup order k must be >= 1");
    if (grid.n % k != 0)
        throw ConfigError("subgroup order k must divide the grid size n");

    // Precondition: H invariant under x -> x + 1/k (axis 0), checked by sampling.
    const double shift = 1.0 / k;
    const int probes = 64;
    for (int i = 0; i < probes; ++i) {
        for (int j = 0; j < (H.dim() == 2 ? probes : 1); ++j) {
            std::array<double, 2> x{static_cast<double>(i) / probes,
                                    static_cast<double>(j) / probes};
            std::array<double, 2> xs{x[0] + shift, x[1]};
            auto sp = std::span<const double>(x.data(), H.dim());
            auto sps = std::span<const double>(xs.data(), H.dim());
            double a, b;
            if (H.kind() == HamiltonianSpec::Kind::Mechanical) {
                a = H.potential().eval(sp);
                b = H.potential().eval(sps);
            } else {
                std::array<double, 2> p{0.5 * (H.table().p_min + H.table().p_max), 0.0};
                auto pp = std::span<const double>(p.data(), H.dim());
                a = H.eval(sp, pp);
                b = H.eval(sps, pp);
            }
            if (std::abs(a - b) > 1e-9)
                throw Error("potential not invariant under x -> x + 1/" + std::to_string(k));
        }
    }

    InvariantSolution out;
    out.k = k;
    if (k == 1) {
        out.quotient = solve_weak_kam(H, grid, cfg);
        out.lifted = out.quotient.u;
        out.c_inv = out.quotient.c;
        return out;
    }

    LaxOleinikConfig rc = cfg.resolved(H, grid);
    rc.validate(grid);
    Lagrangian L(H);
    Ring ring;
    ring.dim = grid.dim;
    ring.n = {grid.n / k, grid.n};
    ring.h = grid.h;

    CoreSolution core = solve_core(L, ring, rc, 0, 0);

    WeakKamSolution q;
    q.c = core.c;
    q.residual = core.residual;
    q.iterations = core.iterations;
    q.converged = core.converged;
    q.drift_trace = std::move(core.drift_trace);
    q.cfg = rc;

    // Lift by replication: exact G-invariance by construction.
    std::vector<double> lifted(grid.size());
    const int nq = grid.n / k;
    if (grid.dim == 1) {
        for (int i = 0; i < grid.n; ++i)
            lifted[static_cast<std::size_t>(i)] = core.u[static_cast<std::size_t>(i % nq)];
    } else {
        for (int ix = 0; ix < grid.n; ++ix)
            for (int iy = 0; iy < grid.n; ++iy)
                lifted[grid.index(ix, iy)] = core.u[ring.index(ix % nq, iy)];
    }
    // Quotient solution kept on its own (smaller) grid only when it is a
    // valid PeriodicGrid; otherwise the lift stands in for it.
    if (grid.dim == 1 && nq >= 8) {
        std::vector<double> qu(core.u.begin(), core.u.begin() + nq);
        q.u = GridFunction(PeriodicGrid::make(1, nq), std::move(qu));
    } else {
        q.u = GridFunction(grid, lifted);
    }
    out.quotient = std::move(q);
    out.lifted = GridFunction(grid, std::move(lifted));
    out.c_inv = out.quotient.c;
    return out;
}

std::vector<GridFunction> evolve(const Lagrangian& L, const GridFunction& u0,
                                 const LaxOleinikConfig& cfg, int steps) {
    if (steps < 0) throw std::invalid_argument("steps must be >= 0");
    LaxOleinikConfig rc = cfg;
    if (rc.tau <= 0.0 || rc.v_max <= 0.0) rc = cfg.resolved(L.hamiltonian(), u0.grid());
    rc.validate(u0.grid());
    RingKernel kernel(L, Ring::of(u0.grid()), rc.tau, rc.v_max, rc.refine);
    std::vector<GridFunction> out;
    out.reserve(static_cast<std::size_t>(steps) + 1);
    out.push_back(u0);
    std::vector<double> Tu;
    for (int s = 0; s < steps; ++s) {
        kernel.step(out.back().values(), Tu, nullptr);
        out.emplace_back(u0.grid(), Tu);
    }
    return out;
}

MinimizerHistory record_history(const Lagrangian& L, const GridFunction& u,
                                const LaxOleinikConfig& cfg, int steps) {
    if (steps < 1) throw std::invalid_argument("record_history needs steps >= 1");
    LaxOleinikConfig rc = cfg;
    if (rc.tau <= 0.0 || rc.v_max <= 0.0) rc = cfg.resolved(L.hamiltonian(), u.grid());
    rc.validate(u.grid());
    RingKernel kernel(L, Ring::of(u.grid()), rc.tau, rc.v_max, false);

    MinimizerHistory h;
    h.u_start = u;
    h.tau = rc.tau;
    std::vector<double> cur(u.values().begin(), u.values().end());
    std::vector<double> Tu;
    for (int s = 0; s < steps; ++s) {
        std::vector<std::array<int16_t, 2>> offs;
        kernel.step(cur, Tu, &offs);
        double sh = Tu[rc.anchor] - cur[rc.anchor];
        for (std::size_t i = 0; i < Tu.size(); ++i) cur[i] = Tu[i] - sh;
        h.offsets.push_back(std::move(offs));
        h.shifts.push_back(sh);
    }
    h.u_end = GridFunction(u.grid(), std::move(cur));
    return h;
}

std::vector<std::size_t> backtrack_minimizer(const MinimizerHistory& history,
                                             const PeriodicGrid& grid, std::size_t x_index) {
    if (history.offsets.empty())
        throw Error("no recorded minimizer history");
    if (x_index >= grid.size())
        throw std::invalid_argument("endpoint index out of range");
    std::vector<std::size_t> curve;
    curve.reserve(history.offsets.size() + 1);
    curve.push_back(x_index);
    std::size_t cur = x_index;
    for (auto it = history.offsets.rbegin(); it != history.offsets.rend(); ++it) {
        auto off = (*it)[cur];
        if (grid.dim == 1) {
            cur = static_cast<std::size_t>(grid.wrap(static_cast<int>(cur) - off[0]));
        } else {
            int ix = static_cast<int>(cur) / grid.n, iy = static_cast<int>(cur) % grid.n;
            cur = grid.index(grid.wrap(ix - off[0]), grid.wrap(iy - off[1]));
        }
        curve.push_back(cur);
    }
    return curve;
}

} // namespace wkam
