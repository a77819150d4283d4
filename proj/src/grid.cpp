#include "wkam/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace wkam {

double minimal_rep(double d, double period) {
    double r = d - period * std::floor(d / period + 0.5);
    // floor rounding can leave r == period/2 from below; keep it in (-P/2, P/2].
    if (r <= -period / 2) r += period;
    return r;
}

PeriodicGrid PeriodicGrid::make(int dim, int n) {
    if (dim != 1 && dim != 2)
        throw std::invalid_argument("grid dim must be 1 or 2");
    if (n < 8)
        throw std::invalid_argument("grid must have n >= 8 points per axis");
    PeriodicGrid g;
    g.dim = dim;
    g.n = n;
    g.h = 1.0 / n;
    return g;
}

GridFunction::GridFunction(PeriodicGrid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size())
        throw std::invalid_argument("value count does not match grid size");
    for (double v : values_)
        if (!std::isfinite(v))
            throw std::invalid_argument("grid function values must be finite");
}

GridFunction GridFunction::zeros(const PeriodicGrid& grid) {
    return GridFunction(grid, std::vector<double>(grid.size(), 0.0));
}

GridFunction GridFunction::sample(const PeriodicGrid& grid,
                                  const std::function<double(std::array<double, 2>)>& f) {
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(grid.node(i));
    return GridFunction(grid, std::move(v));
}

double GridFunction::sup_norm() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

double GridFunction::max() const { return *std::max_element(values_.begin(), values_.end()); }
double GridFunction::min() const { return *std::min_element(values_.begin(), values_.end()); }

double GridFunction::lipschitz() const {
    const int n = grid_.n;
    double lip = 0.0;
    if (grid_.dim == 1) {
        for (int i = 0; i < n; ++i)
            lip = std::max(lip, std::abs(values_[grid_.wrap(i + 1)] - values_[i]) / grid_.h);
    } else {
        for (int ix = 0; ix < n; ++ix)
            for (int iy = 0; iy < n; ++iy) {
                double v = values_[grid_.index(ix, iy)];
                lip = std::max(lip,
                               std::abs(values_[grid_.index(grid_.wrap(ix + 1), iy)] - v) / grid_.h);
                lip = std::max(lip,
                               std::abs(values_[grid_.index(ix, grid_.wrap(iy + 1))] - v) / grid_.h);
            }
    }
    return lip;
}

GridFunction GridFunction::operator+(double k) const {
    std::vector<double> v(values_);
    for (double& x : v) x += k;
    return GridFunction(grid_, std::move(v));
}

GridFunction GridFunction::operator-(const GridFunction& o) const {
    if (!(grid_ == o.grid_))
        throw std::invalid_argument("grid mismatch");
    std::vector<double> v(values_.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = values_[i] - o.values_[i];
    return GridFunction(grid_, std::move(v));
}

namespace {
void print_double(std::ostream& os, double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
}
} // namespace

void GridFunction::to_csv(std::ostream& os) const {
    os << (grid_.dim == 1 ? "index,x,value\n" : "index,x,y,value\n");
    for (std::size_t i = 0; i < values_.size(); ++i) {
        auto p = grid_.node(i);
        os << i << ',';
        print_double(os, p[0]);
        if (grid_.dim == 2) {
            os << ',';
            print_double(os, p[1]);
        }
        os << ',';
        print_double(os, values_[i]);
        os << '\n';
    }
}

GridFunction GridFunction::from_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line))
        throw Error("empty grid function CSV");
    int dim;
    if (line == "index,x,value") dim = 1;
    else if (line == "index,x,y,value") dim = 2;
    else throw Error("unrecognized grid function CSV header: " + line);

    std::vector<double> vals;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() != static_cast<std::size_t>(dim) + 2)
            throw Error("bad grid function CSV row: " + line);
        vals.push_back(std::strtod(fields.back().c_str(), nullptr));
    }
    int n;
    if (dim == 1) {
        n = static_cast<int>(vals.size());
    } else {
        n = static_cast<int>(std::llround(std::sqrt(static_cast<double>(vals.size()))));
        if (static_cast<std::size_t>(n) * static_cast<std::size_t>(n) != vals.size())
            throw Error("2D grid function CSV row count is not a perfect square");
    }
    return GridFunction(PeriodicGrid::make(dim, n), std::move(vals));
}

nlohmann::json GridFunction::to_json() const {
    return {{"grid", {{"dim", grid_.dim}, {"n", grid_.n}}},
            {"values", values_}};
}

GridFunction GridFunction::from_json(const nlohmann::json& j) {
    PeriodicGrid g = PeriodicGrid::make(j.at("grid").at("dim").get<int>(),
                                        j.at("grid").at("n").get<int>());
    return GridFunction(g, j.at("values").get<std::vector<double>>());
}

double interpolate(const GridFunction& f, double x) {
    const PeriodicGrid& g = f.grid();
    double u = (x - std::floor(x)) * g.n;
    int i0 = static_cast<int>(u);
    if (i0 >= g.n) i0 = g.n - 1; // guard u == n from rounding
    double t = u - i0;
    return (1.0 - t) * f[static_cast<std::size_t>(i0)] +
           t * f[static_cast<std::size_t>(g.wrap(i0 + 1))];
}

double interpolate(const GridFunction& f, double x, double y) {
    const PeriodicGrid& g = f.grid();
    double u = (x - std::floor(x)) * g.n;
    double v = (y - std::floor(y)) * g.n;
    int i0 = static_cast<int>(u);
    int j0 = static_cast<int>(v);
    if (i0 >= g.n) i0 = g.n - 1;
    if (j0 >= g.n) j0 = g.n - 1;
    double s = u - i0, t = v - j0;
    int i1 = g.wrap(i0 + 1), j1 = g.wrap(j0 + 1);
    double f00 = f[g.index(i0, j0)], f10 = f[g.index(i1, j0)];
    double f01 = f[g.index(i0, j1)], f11 = f[g.index(i1, j1)];
    return (1 - s) * ((1 - t) * f00 + t * f01) + s * ((1 - t) * f10 + t * f11);
}

double interpolate(const GridFunction& f, std::span<const double> x) {
    return f.grid().dim == 1 ? interpolate(f, x[0]) : interpolate(f, x[0], x[1]);
}

std::vector<GridFunction> gradient_centered(const GridFunction& f) {
    const PeriodicGrid& g = f.grid();
    std::vector<GridFunction> out;
    if (g.dim == 1) {
        std::vector<double> d(g.size());
        for (int i = 0; i < g.n; ++i)
            d[static_cast<std::size_t>(i)] =
                (f[static_cast<std::size_t>(g.wrap(i + 1))] -
                 f[static_cast<std::size_t>(g.wrap(i - 1))]) /
                (2.0 * g.h);
        out.emplace_back(g, std::move(d));
    } else {
        std::vector<double> dx(g.size()), dy(g.size());
        for (int ix = 0; ix < g.n; ++ix)
            for (int iy = 0; iy < g.n; ++iy) {
                dx[g.index(ix, iy)] = (f[g.index(g.wrap(ix + 1), iy)] -
                                       f[g.index(g.wrap(ix - 1), iy)]) /
                                      (2.0 * g.h);
                dy[g.index(ix, iy)] = (f[g.index(ix, g.wrap(iy + 1))] -
                                       f[g.index(ix, g.wrap(iy - 1))]) /
                                      (2.0 * g.h);
            }
        out.emplace_back(g, std::move(dx));
        out.emplace_back(g, std::move(dy));
    }
    return out;
}

MollifierKernel MollifierKernel::bump(const PeriodicGrid& grid, double delta) {
    if (delta <= 0.0)
        throw std::invalid_argument("mollifier delta must be positive");
    MollifierKernel k;
    k.delta_ = delta;
    k.dim_ = grid.dim;
    // Offsets with |o|*h strictly inside the delta-ball carry weight.
    int r = static_cast<int>(std::ceil(delta / grid.h)) - 1;
    if (r < 0) r = 0;
    k.radius_ = r;
    auto bump_val = [&](double rho2) {
        // rho2 = (|y|/delta)^2 < 1
        return std::exp(-1.0 / (1.0 - rho2));
    };
    double sum = 0.0;
    if (grid.dim == 1) {
        k.weights_.assign(static_cast<std::size_t>(2 * r + 1), 0.0);
        for (int o = -r; o <= r; ++o) {
            double rho2 = (o * grid.h / delta) * (o * grid.h / delta);
            if (rho2 < 1.0) {
                double w = bump_val(rho2);
                k.weights_[static_cast<std::size_t>(o + r)] = w;
                sum += w;
            }
        }
    } else {
        k.weights_.assign(static_cast<std::size_t>(2 * r + 1) * (2 * r + 1), 0.0);
        for (int ox = -r; ox <= r; ++ox)
            for (int oy = -r; oy <= r; ++oy) {
                double rho2 = (ox * grid.h * ox * grid.h + oy * grid.h * oy * grid.h) /
                              (delta * delta);
                if (rho2 < 1.0) {
                    double w = bump_val(rho2);
                    k.weights_[static_cast<std::size_t>(ox + r) * (2 * r + 1) + (oy + r)] = w;
                    sum += w;
                }
            }
    }
    for (double& w : k.weights_) w /= sum;
    return k;
}

double MollifierKernel::weight(int ox, int oy) const {
    if (std::abs(ox) > radius_ || std::abs(oy) > radius_) return 0.0;
    if (dim_ == 1) return weights_[static_cast<std::size_t>(ox + radius_)];
    return weights_[static_cast<std::size_t>(ox + radius_) * (2 * radius_ + 1) + (oy + radius_)];
}

double MollifierKernel::weight_sum() const {
    double s = 0.0;
    for (double w : weights_) s += w;
    return s;
}

GridFunction mollify(const GridFunction& f, const MollifierKernel& kernel) {
    const PeriodicGrid& g = f.grid();
    if (kernel.dim() != g.dim)
        throw std::invalid_argument("kernel/grid dimension mismatch");
    if (kernel.delta() >= 0.25)
        throw std::invalid_argument("mollifier support radius must be < 1/4 period");
    const int r = kernel.radius_cells();
    std::vector<double> out(g.size(), 0.0);
    if (g.dim == 1) {
        for (int i = 0; i < g.n; ++i) {
            double acc = 0.0;
            for (int o = -r; o <= r; ++o)
                acc += kernel.weight(o) * f[static_cast<std::size_t>(g.wrap(i - o))];
            out[static_cast<std::size_t>(i)] = acc;
        }
    } else {
        for (int ix = 0; ix < g.n; ++ix)
            for (int iy = 0; iy < g.n; ++iy) {
                double acc = 0.0;
                for (int ox = -r; ox <= r; ++ox)
                    for (int oy = -r; oy <= r; ++oy) {
                        double w = kernel.weight(ox, oy);
                        if (w != 0.0)
                            acc += w * f[g.index(g.wrap(ix - ox), g.wrap(iy - oy))];
                    }
                out[g.index(ix, iy)] = acc;
            }
    }
    return GridFunction(g, std::move(out));
}

} // namespace wkam
