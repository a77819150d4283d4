#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>

#include "wkam/error.hpp"

namespace wkam {

/// A compiled arithmetic expression in x (and y for dim 2) over
/// {+,-,*,/,^, sin, cos, exp, abs, pi, numeric literals, parentheses}.
///
/// Evaluation happens on the fractional part of each coordinate, so the
/// resulting function is 1-periodic per axis by construction.
class PotentialExpr {
public:
    PotentialExpr() = default;

    /// Compiles `source`. Variables allowed: x (dim>=1), y (dim==2).
    /// Throws ParseError on syntax errors, unknown identifiers, or a
    /// non-finite value at any probe node of a 64-per-axis grid.
    static PotentialExpr parse(std::string_view source, int dim);

    double eval(double x) const;
    double eval(double x, double y) const;
    double eval(std::span<const double> x) const;

    /// Symbolic derivative along axis 0 (x) or 1 (y).
    PotentialExpr derivative(int axis) const;

    const std::string& source() const { return source_; }
    int dim() const { return dim_; }
    bool empty() const { return root_ == nullptr; }

    struct Node;

private:
    std::shared_ptr<const Node> root_;
    std::string source_;
    int dim_ = 1;
};

} // namespace wkam
