#include "wkam/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <sstream>

namespace wkam {

double norm(std::span<const double> v) {
    double s = 0.0;
    for (double c : v) s += c * c;
    return std::sqrt(s);
}

void TabulatedHamiltonian::validate() const {
    if (dim != 1 && dim != 2)
        throw std::invalid_argument("tabulated Hamiltonian dim must be 1 or 2");
    if (nx < 2 || np < 3)
        throw std::invalid_argument("tabulated Hamiltonian needs nx >= 2 and np >= 3");
    if (!(p_max > p_min))
        throw std::invalid_argument("momentum box must be nonempty");
    std::size_t expect = dim == 1
                             ? static_cast<std::size_t>(nx) * np
                             : static_cast<std::size_t>(nx) * nx * np * np;
    if (values.size() != expect)
        throw std::invalid_argument("tabulated Hamiltonian value count mismatch");
    for (double v : values)
        if (!std::isfinite(v))
            throw std::invalid_argument("tabulated Hamiltonian values must be finite");
    // Discrete strict convexity along each momentum axis.
    if (dim == 1) {
        for (int ix = 0; ix < nx; ++ix)
            for (int ip = 1; ip + 1 < np; ++ip) {
                double dd = values[index1(ix, ip - 1)] - 2.0 * values[index1(ix, ip)] +
                            values[index1(ix, ip + 1)];
                if (!(dd > 0.0))
                    throw std::invalid_argument(
                        "tabulated Hamiltonian is not strictly convex in p");
            }
    } else {
        for (int ix = 0; ix < nx; ++ix)
            for (int iy = 0; iy < nx; ++iy)
                for (int iq = 0; iq < np; ++iq)
                    for (int ip = 1; ip + 1 < np; ++ip) {
                        double dd = values[index2(ix, iy, ip - 1, iq)] -
                                    2.0 * values[index2(ix, iy, ip, iq)] +
                                    values[index2(ix, iy, ip + 1, iq)];
                        double ee = values[index2(ix, iy, iq, ip - 1)] -
                                    2.0 * values[index2(ix, iy, iq, ip)] +
                                    values[index2(ix, iy, iq, ip + 1)];
                        if (!(dd > 0.0) || !(ee > 0.0))
                            throw std::invalid_argument(
                                "tabulated Hamiltonian is not strictly convex in p");
                    }
    }
}

HamiltonianSpec HamiltonianSpec::mechanical(PotentialExpr potential) {
    HamiltonianSpec s;
    s.kind_ = Kind::Mechanical;
    s.dim_ = potential.dim();
    s.potential_ = potential;
    s.potential_grad_[0] = potential.derivative(0);
    if (s.dim_ == 2) s.potential_grad_[1] = potential.derivative(1);
    return s;
}

HamiltonianSpec HamiltonianSpec::tabulated(TabulatedHamiltonian table) {
    table.validate();
    HamiltonianSpec s;
    s.kind_ = Kind::Tabulated;
    s.dim_ = table.dim;
    s.table_ = std::make_shared<const TabulatedHamiltonian>(std::move(table));
    return s;
}

HamiltonianSpec HamiltonianSpec::shifted(std::span<const double> omega) const {
    if (static_cast<int>(omega.size()) != dim_)
        throw std::invalid_argument("shift length must equal dim");
    HamiltonianSpec s = *this;
    for (int a = 0; a < dim_; ++a) s.omega_[a] = omega_[a] + omega[a];
    s.shift_nonzero_ = s.omega_[0] != 0.0 || s.omega_[1] != 0.0;
    return s;
}

const PotentialExpr& HamiltonianSpec::potential() const {
    if (kind_ != Kind::Mechanical)
        throw Error("spec has no potential (not mechanical)");
    return potential_;
}

namespace {

// Multilinear table evaluation; x periodic, p clamped-checked to the box.
double table_eval(const TabulatedHamiltonian& t, std::span<const double> x,
                  std::span<const double> p) {
    for (int a = 0; a < t.dim; ++a)
        if (p[a] < t.p_min || p[a] > t.p_max)
            throw BoundaryError("momentum outside tabulated box");
    const double hx = 1.0 / t.nx;
    const double dp = t.dp();
    auto xcell = [&](double xv, int& i0, double& s) {
        double u = (xv - std::floor(xv)) / hx;
        i0 = static_cast<int>(u);
        if (i0 >= t.nx) i0 = t.nx - 1;
        s = u - i0;
    };
    auto pcell = [&](double pv, int& i0, double& s) {
        double u = (pv - t.p_min) / dp;
        i0 = static_cast<int>(u);
        if (i0 >= t.np - 1) i0 = t.np - 2;
        if (i0 < 0) i0 = 0;
        s = u - i0;
    };
    if (t.dim == 1) {
        int ix, ip;
        double sx, sp;
        xcell(x[0], ix, sx);
        pcell(p[0], ip, sp);
        int ix1 = (ix + 1) % t.nx;
        double f00 = t.values[t.index1(ix, ip)], f01 = t.values[t.index1(ix, ip + 1)];
        double f10 = t.values[t.index1(ix1, ip)], f11 = t.values[t.index1(ix1, ip + 1)];
        return (1 - sx) * ((1 - sp) * f00 + sp * f01) + sx * ((1 - sp) * f10 + sp * f11);
    }
    int ix, iy, ip, iq;
    double sx, sy, sp, sq;
    xcell(x[0], ix, sx);
    xcell(x[1], iy, sy);
    pcell(p[0], ip, sp);
    pcell(p[1], iq, sq);
    int ix1 = (ix + 1) % t.nx, iy1 = (iy + 1) % t.nx;
    double acc = 0.0;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c)
                for (int d = 0; d < 2; ++d) {
                    double w = (a ? sx : 1 - sx) * (b ? sy : 1 - sy) * (c ? sp : 1 - sp) *
                               (d ? sq : 1 - sq);
                    acc += w * t.values[t.index2(a ? ix1 : ix, b ? iy1 : iy, ip + c, iq + d)];
                }
    return acc;
}

} // namespace

double HamiltonianSpec::eval(std::span<const double> x, std::span<const double> p) const {
    if (kind_ == Kind::Mechanical) {
        double kin = 0.0;
        for (int a = 0; a < dim_; ++a) {
            double q = p[a] + omega_[a];
            kin += q * q;
        }
        return 0.5 * kin + potential_.eval(x);
    }
    std::array<double, 2> q{p[0] + omega_[0], dim_ == 2 ? p[1] + omega_[1] : 0.0};
    return table_eval(*table_, x, std::span<const double>(q.data(), dim_));
}

double HamiltonianSpec::eval1(double x, double p) const {
    return eval(std::span<const double>(&x, 1), std::span<const double>(&p, 1));
}

void HamiltonianSpec::grad(std::span<const double> x, std::span<const double> p,
                           std::span<double> dHdx, std::span<double> dHdp) const {
    if (kind_ == Kind::Mechanical) {
        for (int a = 0; a < dim_; ++a) {
            dHdp[a] = p[a] + omega_[a];
            dHdx[a] = potential_grad_[a].empty() ? 0.0 : potential_grad_[a].eval(x);
        }
        return;
    }
    // Centered differences on the table (p step: half a cell, clamped to box).
    const double hx = 0.5 / table_->nx;
    const double hp = 0.5 * table_->dp();
    std::array<double, 2> xx{x[0], dim_ == 2 ? x[1] : 0.0};
    std::array<double, 2> pp{p[0], dim_ == 2 ? p[1] : 0.0};
    for (int a = 0; a < dim_; ++a) {
        auto xs = std::span<const double>(xx.data(), dim_);
        auto ps = std::span<const double>(pp.data(), dim_);
        double keep = xx[a];
        xx[a] = keep + hx;
        double fp = eval(xs, ps);
        xx[a] = keep - hx;
        double fm = eval(xs, ps);
        xx[a] = keep;
        dHdx[a] = (fp - fm) / (2.0 * hx);

        keep = pp[a];
        double lo = std::max(table_->p_min - omega_[a], keep - hp);
        double hi = std::min(table_->p_max - omega_[a], keep + hp);
        pp[a] = hi;
        fp = eval(xs, ps);
        pp[a] = lo;
        fm = eval(xs, ps);
        pp[a] = keep;
        dHdp[a] = (fp - fm) / (hi - lo);
    }
}

HamiltonianSpec HamiltonianSpec::load_table_csv(std::istream& is) {
    std::string header;
    if (!std::getline(is, header))
        throw Error("empty Hamiltonian table CSV");
    int dim;
    if (header == "x,p1,H") dim = 1;
    else if (header == "x,y,p1,p2,H") dim = 2;
    else throw Error("unrecognized Hamiltonian table header: " + header);

    const int ncol = dim == 1 ? 3 : 5;
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        std::vector<double> row;
        while (std::getline(ss, field, ',')) row.push_back(std::strtod(field.c_str(), nullptr));
        if (static_cast<int>(row.size()) != ncol)
            throw Error("bad Hamiltonian table row: " + line);
        rows.push_back(std::move(row));
    }
    if (rows.empty())
        throw Error("Hamiltonian table has no data rows");

    auto uniques = [&](int col) {
        std::vector<double> u;
        for (auto& r : rows)
            if (u.empty() || std::find(u.begin(), u.end(), r[col]) == u.end())
                u.push_back(r[col]);
        std::vector<double> s(u);
        std::sort(s.begin(), s.end());
        if (s != u)
            throw Error("table grid coordinates must be strictly increasing (row-major)");
        for (std::size_t i = 1; i < s.size(); ++i)
            if (!(s[i] > s[i - 1]))
                throw Error("table grid coordinates must be strictly increasing");
        return s;
    };

    TabulatedHamiltonian t;
    t.dim = dim;
    std::vector<double> xs = uniques(0);
    std::vector<double> ps = uniques(dim == 1 ? 1 : 2);
    t.nx = static_cast<int>(xs.size());
    t.np = static_cast<int>(ps.size());
    t.p_min = ps.front();
    t.p_max = ps.back();
    std::size_t expect = dim == 1 ? static_cast<std::size_t>(t.nx) * t.np
                                  : static_cast<std::size_t>(t.nx) * t.nx *
                                        static_cast<std::size_t>(t.np) * t.np;
    if (rows.size() != expect)
        throw Error("Hamiltonian table row count does not match its grid");
    t.values.reserve(rows.size());
    for (auto& r : rows) t.values.push_back(r.back());
    return tabulated(std::move(t));
}

namespace {

// 3-point parabolic vertex: offset in [-1,1] from the discrete argmax and
// the modeled value there.
struct ParabolicFit {
    double offset;
    double value;
};
ParabolicFit refine_max(double fm, double f0, double fp) {
    double denom = fm - 2.0 * f0 + fp;
    if (!(denom < 0.0)) return {0.0, f0}; // not locally concave; keep the node
    double s = 0.5 * (fm - fp) / denom;
    s = std::clamp(s, -1.0, 1.0);
    double val = f0 - 0.25 * s * (fm - fp);
    return {s, val};
}

LegendreResult legendre_tabulated(const HamiltonianSpec& spec, std::span<const double> x,
                                  std::span<const double> v) {
    const TabulatedHamiltonian& t = spec.table();
    const double dp = t.dp();
    const int dim = t.dim;
    const Vec2& w = spec.omega();

    // Conjugate the unshifted table, then correct: L_w(x,v) = L(x,v) - <w,v>
    // and p*_w = p* - w. spec.eval adds the shift back internally, so passing
    // p - w evaluates the raw table at p.
    auto phi1 = [&](int ip) {
        double p = t.p_min + ip * dp;
        std::array<double, 1> pp{p - w[0]};
        double H = spec.eval(x, std::span<const double>(pp.data(), 1));
        return p * v[0] - H;
    };

    if (dim == 1) {
        int best = 0;
        double bestval = -std::numeric_limits<double>::infinity();
        std::vector<double> vals(static_cast<std::size_t>(t.np));
        for (int ip = 0; ip < t.np; ++ip) {
            vals[static_cast<std::size_t>(ip)] = phi1(ip);
            if (vals[static_cast<std::size_t>(ip)] > bestval) {
                bestval = vals[static_cast<std::size_t>(ip)];
                best = ip;
            }
        }
        if (best == 0 || best == t.np - 1)
            throw BoundaryError("Legendre maximizer on momentum box boundary; enlarge the box");
        auto fit = refine_max(vals[best - 1], vals[best], vals[best + 1]);
        LegendreResult r;
        r.L = fit.value - w[0] * v[0];
        r.p_star = {t.p_min + (best + fit.offset) * dp - w[0], 0.0};
        return r;
    }

    // dim == 2: brute force over the momentum grid, per-axis refinement.
    int bp = 0, bq = 0;
    double bestval = -std::numeric_limits<double>::infinity();
    std::vector<double> vals(static_cast<std::size_t>(t.np) * t.np);
    for (int ip = 0; ip < t.np; ++ip)
        for (int iq = 0; iq < t.np; ++iq) {
            double p0 = t.p_min + ip * dp, p1 = t.p_min + iq * dp;
            std::array<double, 2> pp{p0 - w[0], p1 - w[1]};
            double H = spec.eval(x, std::span<const double>(pp.data(), 2));
            double val = p0 * v[0] + p1 * v[1] - H;
            vals[static_cast<std::size_t>(ip) * t.np + iq] = val;
            if (val > bestval) {
                bestval = val;
                bp = ip;
                bq = iq;
            }
        }
    if (bp == 0 || bp == t.np - 1 || bq == 0 || bq == t.np - 1)
        throw BoundaryError("Legendre maximizer on momentum box boundary; enlarge the box");
    auto at = [&](int ip, int iq) { return vals[static_cast<std::size_t>(ip) * t.np + iq]; };
    auto fx = refine_max(at(bp - 1, bq), at(bp, bq), at(bp + 1, bq));
    auto fy = refine_max(at(bp, bq - 1), at(bp, bq), at(bp, bq + 1));
    LegendreResult r;
    r.L = at(bp, bq) - 0.25 * fx.offset * (at(bp - 1, bq) - at(bp + 1, bq)) -
          0.25 * fy.offset * (at(bp, bq - 1) - at(bp, bq + 1)) - (w[0] * v[0] + w[1] * v[1]);
    r.p_star = {t.p_min + (bp + fx.offset) * dp - w[0], t.p_min + (bq + fy.offset) * dp - w[1]};
    return r;
}

} // namespace

LegendreResult legendre_point(const HamiltonianSpec& spec, std::span<const double> x,
                              std::span<const double> v) {
    if (spec.kind() == HamiltonianSpec::Kind::Mechanical) {
        const Vec2& w = spec.omega();
        LegendreResult r;
        double kin = 0.0, wv = 0.0;
        for (int a = 0; a < spec.dim(); ++a) {
            kin += v[a] * v[a];
            wv += w[a] * v[a];
            r.p_star[a] = v[a] - w[a];
        }
        r.L = 0.5 * kin - spec.potential().eval(x) - wv;
        return r;
    }
    return legendre_tabulated(spec, x, v);
}

Lagrangian::Lagrangian(HamiltonianSpec H, int velocity_samples) : H_(std::move(H)) {
    if (H_.kind() == HamiltonianSpec::Kind::Mechanical) {
        Vgrad_[0] = H_.potential().derivative(0);
        if (H_.dim() == 2) Vgrad_[1] = H_.potential().derivative(1);
        return;
    }
    // Tabulated: derive a velocity box from the table's interior momentum
    // slopes, then fill L on an (x, v) grid by the numeric Legendre transform.
    const TabulatedHamiltonian& t = H_.table();
    const double dp = t.dp();
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    if (t.dim == 1) {
        for (int ix = 0; ix < t.nx; ++ix) {
            lo = std::min(lo, (t.values[t.index1(ix, 1)] - t.values[t.index1(ix, 0)]) / dp);
            hi = std::max(hi, (t.values[t.index1(ix, t.np - 1)] -
                               t.values[t.index1(ix, t.np - 2)]) /
                                  dp);
        }
    } else {
        for (int ix = 0; ix < t.nx; ++ix)
            for (int iy = 0; iy < t.nx; ++iy)
                for (int k = 0; k < t.np; ++k) {
                    lo = std::min(lo, (t.values[t.index2(ix, iy, 1, k)] -
                                       t.values[t.index2(ix, iy, 0, k)]) /
                                          dp);
                    hi = std::max(hi, (t.values[t.index2(ix, iy, t.np - 1, k)] -
                                       t.values[t.index2(ix, iy, t.np - 2, k)]) /
                                          dp);
                    lo = std::min(lo, (t.values[t.index2(ix, iy, k, 1)] -
                                       t.values[t.index2(ix, iy, k, 0)]) /
                                          dp);
                    hi = std::max(hi, (t.values[t.index2(ix, iy, k, t.np - 1)] -
                                       t.values[t.index2(ix, iy, k, t.np - 2)]) /
                                          dp);
                }
    }
    // Shrink by one slope cell so fiber maximizers stay interior; account for
    // the shift correction v -> v (conjugate shift acts on p only).
    double margin = 2.0 * dp;
    v_min_ = lo + margin;
    v_max_ = hi - margin;
    if (!(v_max_ > v_min_))
        throw Error("tabulated momentum box too small to derive a velocity grid");
    nx_ = t.nx;
    nv_ = velocity_samples > 0 ? velocity_samples : 2 * t.np + 1;
    const double dv = (v_max_ - v_min_) / (nv_ - 1);
    const double hx = 1.0 / nx_;
    if (t.dim == 1) {
        Lvals_.resize(static_cast<std::size_t>(nx_) * nv_);
        for (int ix = 0; ix < nx_; ++ix)
            for (int iv = 0; iv < nv_; ++iv) {
                double xv = ix * hx, vv = v_min_ + iv * dv;
                auto r = legendre_point(H_, std::span<const double>(&xv, 1),
                                        std::span<const double>(&vv, 1));
                Lvals_[static_cast<std::size_t>(ix) * nv_ + iv] = r.L;
            }
    } else {
        Lvals_.resize(static_cast<std::size_t>(nx_) * nx_ * nv_ * nv_);
        for (int ix = 0; ix < nx_; ++ix)
            for (int iy = 0; iy < nx_; ++iy)
                for (int iv = 0; iv < nv_; ++iv)
                    for (int jv = 0; jv < nv_; ++jv) {
                        std::array<double, 2> xv{ix * hx, iy * hx};
                        std::array<double, 2> vv{v_min_ + iv * dv, v_min_ + jv * dv};
                        auto r = legendre_point(H_, xv, vv);
                        Lvals_[((static_cast<std::size_t>(ix) * nx_ + iy) * nv_ + iv) * nv_ +
                               jv] = r.L;
                    }
    }
}

double Lagrangian::table_value(std::span<const double> x, std::span<const double> v) const {
    const double dv = (v_max_ - v_min_) / (nv_ - 1);
    const double hx = 1.0 / nx_;
    for (int a = 0; a < dim(); ++a)
        if (v[a] < v_min_ || v[a] > v_max_)
            throw BoundaryError("velocity outside tabulated Lagrangian box");
    auto cell = [&](double u, int nmax, int& i0, double& s) {
        i0 = static_cast<int>(u);
        if (i0 >= nmax - 1) i0 = nmax - 2;
        if (i0 < 0) i0 = 0;
        s = u - i0;
    };
    if (dim() == 1) {
        double ux = (x[0] - std::floor(x[0])) / hx;
        int ix = static_cast<int>(ux);
        if (ix >= nx_) ix = nx_ - 1;
        double sx = ux - ix;
        int ix1 = (ix + 1) % nx_;
        int iv;
        double sv;
        cell((v[0] - v_min_) / dv, nv_, iv, sv);
        auto at = [&](int i, int j) { return Lvals_[static_cast<std::size_t>(i) * nv_ + j]; };
        return (1 - sx) * ((1 - sv) * at(ix, iv) + sv * at(ix, iv + 1)) +
               sx * ((1 - sv) * at(ix1, iv) + sv * at(ix1, iv + 1));
    }
    double ux = (x[0] - std::floor(x[0])) / hx;
    double uy = (x[1] - std::floor(x[1])) / hx;
    int ix = static_cast<int>(ux), iy = static_cast<int>(uy);
    if (ix >= nx_) ix = nx_ - 1;
    if (iy >= nx_) iy = nx_ - 1;
    double sx = ux - ix, sy = uy - iy;
    int ix1 = (ix + 1) % nx_, iy1 = (iy + 1) % nx_;
    int iv, jv;
    double sv, tv;
    cell((v[0] - v_min_) / dv, nv_, iv, sv);
    cell((v[1] - v_min_) / dv, nv_, jv, tv);
    auto at = [&](int i, int j, int k, int l) {
        return Lvals_[((static_cast<std::size_t>(i) * nx_ + j) * nv_ + k) * nv_ + l];
    };
    double acc = 0.0;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c)
                for (int d = 0; d < 2; ++d)
                    acc += (a ? sx : 1 - sx) * (b ? sy : 1 - sy) * (c ? sv : 1 - sv) *
                           (d ? tv : 1 - tv) *
                           at(a ? ix1 : ix, b ? iy1 : iy, iv + c, jv + d);
    return acc;
}

double Lagrangian::value(std::span<const double> x, std::span<const double> v) const {
    if (mechanical_family()) {
        const Vec2& w = H_.omega();
        double kin = 0.0, wv = 0.0;
        for (int a = 0; a < dim(); ++a) {
            kin += v[a] * v[a];
            wv += w[a] * v[a];
        }
        return 0.5 * kin - H_.potential().eval(x) - wv;
    }
    return table_value(x, v);
}

double Lagrangian::value1(double x, double v) const {
    return value(std::span<const double>(&x, 1), std::span<const double>(&v, 1));
}

LegendreResult Lagrangian::legendre(std::span<const double> x, std::span<const double> v) const {
    return legendre_point(H_, x, v);
}

void Lagrangian::grad(std::span<const double> x, std::span<const double> v,
                      std::span<double> dLdx, std::span<double> dLdv) const {
    auto leg = legendre_point(H_, x, v);
    for (int a = 0; a < dim(); ++a) dLdv[a] = leg.p_star[a];
    if (mechanical_family()) {
        for (int a = 0; a < dim(); ++a) dLdx[a] = -Vgrad_[a].eval(x);
        return;
    }
    const double hx = 0.5 / nx_;
    std::array<double, 2> xx{x[0], dim() == 2 ? x[1] : 0.0};
    for (int a = 0; a < dim(); ++a) {
        double keep = xx[a];
        xx[a] = keep + hx;
        double fp = value(std::span<const double>(xx.data(), dim()), v);
        xx[a] = keep - hx;
        double fm = value(std::span<const double>(xx.data(), dim()), v);
        xx[a] = keep;
        dLdx[a] = (fp - fm) / (2.0 * hx);
    }
}

// ---------------------------------------------------------------------------
// TonelliConstants

namespace {

template <typename F>
double max_over_ball(int dim, double radius, int density, F&& fn) {
    // fn(vector in the ball) -> value; samples a symmetric lattice including
    // 0 and the axis endpoints.
    double best = -std::numeric_limits<double>::infinity();
    int m = 2 * density;
    if (radius == 0.0) m = 0;
    if (dim == 1) {
        for (int i = -m / 2; i <= m / 2; ++i) {
            double v = m == 0 ? 0.0 : radius * (2.0 * i / m);
            std::array<double, 1> vv{v};
            best = std::max(best, fn(std::span<const double>(vv.data(), 1)));
        }
    } else {
        for (int i = -m / 2; i <= m / 2; ++i)
            for (int j = -m / 2; j <= m / 2; ++j) {
                double a = m == 0 ? 0.0 : radius * (2.0 * i / m);
                double b = m == 0 ? 0.0 : radius * (2.0 * j / m);
                if (a * a + b * b > radius * radius * (1.0 + 1e-12)) continue;
                std::array<double, 2> vv{a, b};
                best = std::max(best, fn(std::span<const double>(vv.data(), 2)));
            }
    }
    return best;
}

} // namespace

TonelliConstants TonelliConstants::estimate(const HamiltonianSpec& spec,
                                            std::span<const double> R_list,
                                            std::span<const double> K_list,
                                            int sample_density) {
    if (sample_density < 16)
        throw std::invalid_argument("sample_density must be >= 16 per axis");
    TonelliConstants c;
    c.spec_ = std::make_shared<const HamiltonianSpec>(spec);
    c.lagrangian_ = std::make_shared<const Lagrangian>(spec);
    c.density_ = sample_density;

    std::vector<double> Rs(R_list.begin(), R_list.end());
    Rs.push_back(0.0);
    Rs.push_back(1.0);
    std::vector<double> Ks(K_list.begin(), K_list.end());
    Ks.push_back(1.0);
    for (double R : Rs) {
        c.A_.emplace(R, c.compute_A(R));
        c.A_star_.emplace(R, c.compute_A_star(R));
    }
    for (double K : Ks) {
        c.C_.emplace(K, c.compute_C(K));
        c.C_star_.emplace(K, c.compute_C_star(K));
    }
    return c;
}

double TonelliConstants::compute_A(double R) const {
    const int dim = spec_->dim();
    double best = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < density_; ++i) {
        for (int j = 0; j < (dim == 2 ? density_ : 1); ++j) {
            std::array<double, 2> x{static_cast<double>(i) / density_,
                                    static_cast<double>(j) / density_};
            auto xs = std::span<const double>(x.data(), dim);
            double m = max_over_ball(dim, R, density_, [&](std::span<const double> v) {
                double L = lagrangian_->value(xs, v);
                if (!std::isfinite(L)) throw Error("non-finite Lagrangian value at a sample");
                return L;
            });
            best = std::max(best, m);
        }
    }
    return best;
}

double TonelliConstants::compute_A_star(double R) const {
    const int dim = spec_->dim();
    double best = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < density_; ++i) {
        for (int j = 0; j < (dim == 2 ? density_ : 1); ++j) {
            std::array<double, 2> x{static_cast<double>(i) / density_,
                                    static_cast<double>(j) / density_};
            auto xs = std::span<const double>(x.data(), dim);
            double m = max_over_ball(dim, R, density_, [&](std::span<const double> p) {
                double H = spec_->eval(xs, p);
                if (!std::isfinite(H)) throw Error("non-finite Hamiltonian value at a sample");
                return H;
            });
            best = std::max(best, m);
        }
    }
    return best;
}

double TonelliConstants::compute_C(double K) const {
    // Empirical sup of K|v| - L over a window wide enough that quadratic
    // growth dominates, clamped below at A*(K) (the exact conjugate identity).
    const int dim = spec_->dim();
    const double Rw = std::max(2.0 * K, 2.0);
    double best = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < density_; ++i) {
        for (int j = 0; j < (dim == 2 ? density_ : 1); ++j) {
            std::array<double, 2> x{static_cast<double>(i) / density_,
                                    static_cast<double>(j) / density_};
            auto xs = std::span<const double>(x.data(), dim);
            double m = max_over_ball(dim, Rw, density_, [&](std::span<const double> v) {
                return K * norm(v) - lagrangian_->value(xs, v);
            });
            best = std::max(best, m);
        }
    }
    return std::max(best, compute_A_star(K));
}

double TonelliConstants::compute_C_star(double K) const {
    const int dim = spec_->dim();
    const double Rw = std::max(2.0 * K, 2.0);
    double best = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < density_; ++i) {
        for (int j = 0; j < (dim == 2 ? density_ : 1); ++j) {
            std::array<double, 2> x{static_cast<double>(i) / density_,
                                    static_cast<double>(j) / density_};
            auto xs = std::span<const double>(x.data(), dim);
            double m = max_over_ball(dim, Rw, density_, [&](std::span<const double> p) {
                return K * norm(p) - spec_->eval(xs, p);
            });
            best = std::max(best, m);
        }
    }
    return std::max(best, compute_A(K));
}

double TonelliConstants::A(double R) const {
    auto it = A_.find(R);
    return it != A_.end() ? it->second : compute_A(R);
}
double TonelliConstants::C(double K) const {
    auto it = C_.find(K);
    return it != C_.end() ? it->second : compute_C(K);
}
double TonelliConstants::A_star(double R) const {
    auto it = A_star_.find(R);
    return it != A_star_.end() ? it->second : compute_A_star(R);
}
double TonelliConstants::C_star(double K) const {
    auto it = C_star_.find(K);
    return it != C_star_.end() ? it->second : compute_C_star(K);
}

} // namespace wkam
