#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include <json.hpp>

#include "wkam/error.hpp"

namespace wkam {

/// Minimal representative of d in (-period/2, period/2].
double minimal_rep(double d, double period = 1.0);

/// Uniform periodic grid on [0,1)^dim with n points per axis.
struct PeriodicGrid {
    int dim = 1;
    int n = 8;
    double h = 0.125;

    static PeriodicGrid make(int dim, int n);

    std::size_t size() const {
        return dim == 1 ? static_cast<std::size_t>(n)
                        : static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
    }
    std::size_t index(int ix, int iy = 0) const {
        return static_cast<std::size_t>(ix) * (dim == 2 ? static_cast<std::size_t>(n) : 1) +
               (dim == 2 ? static_cast<std::size_t>(iy) : 0);
    }
    std::array<double, 2> node(std::size_t idx) const {
        if (dim == 1) return {static_cast<double>(idx) * h, 0.0};
        return {static_cast<double>(idx / static_cast<std::size_t>(n)) * h,
                static_cast<double>(idx % static_cast<std::size_t>(n)) * h};
    }
    int wrap(int i) const {
        int m = i % n;
        return m < 0 ? m + n : m;
    }
    bool operator==(const PeriodicGrid& o) const { return dim == o.dim && n == o.n; }
};

/// Values of a real function on a PeriodicGrid. Immutable by convention:
/// operations return new functions. All values must be finite.
class GridFunction {
public:
    GridFunction() = default;
    GridFunction(PeriodicGrid grid, std::vector<double> values);

    static GridFunction zeros(const PeriodicGrid& grid);
    static GridFunction sample(const PeriodicGrid& grid,
                               const std::function<double(std::array<double, 2>)>& f);

    const PeriodicGrid& grid() const { return grid_; }
    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    double& at(std::size_t i) { return values_[i]; }
    std::span<const double> values() const { return values_; }
    std::vector<double>& mutable_values() { return values_; }

    double sup_norm() const;
    double max() const;
    double min() const;
    /// Discrete Lipschitz constant: max over axis-adjacent nodes of |df|/h.
    double lipschitz() const;

    GridFunction operator+(double k) const;
    GridFunction operator-(const GridFunction& o) const;

    void to_csv(std::ostream& os) const;
    static GridFunction from_csv(std::istream& is);
    nlohmann::json to_json() const;
    static GridFunction from_json(const nlohmann::json& j);

private:
    PeriodicGrid grid_;
    std::vector<double> values_;
};

/// Multilinear periodic interpolation; exact at grid nodes.
double interpolate(const GridFunction& f, std::span<const double> x);
double interpolate(const GridFunction& f, double x);
double interpolate(const GridFunction& f, double x, double y);

/// Centered differences with periodic wrap, one GridFunction per axis.
std::vector<GridFunction> gradient_centered(const GridFunction& f);

/// Discrete nonnegative kernel sampled from the standard smooth bump
/// exp(-1/(1-(|y|/delta)^2)) on |y| < delta, renormalized to unit sum.
class MollifierKernel {
public:
    static MollifierKernel bump(const PeriodicGrid& grid, double delta);

    double delta() const { return delta_; }
    int radius_cells() const { return radius_; }
    int dim() const { return dim_; }
    /// Weight at integer offset (ox[,oy]), offsets in [-radius, radius].
    double weight(int ox, int oy = 0) const;
    double weight_sum() const;

private:
    double delta_ = 0.0;
    int radius_ = 0;
    int dim_ = 1;
    std::vector<double> weights_; // (2r+1) or (2r+1)^2, row-major
};

/// Discrete periodic convolution with the kernel.
/// Preconditions: kernel support radius < 1/4 (quarter period).
GridFunction mollify(const GridFunction& f, const MollifierKernel& kernel);

} // namespace wkam
