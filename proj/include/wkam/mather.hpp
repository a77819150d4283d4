#pragma once

#include <iosfwd>
#include <vector>

#include "wkam/lax_oleinik.hpp"

namespace wkam {

struct AlphaEntry {
    Vec2 omega{0.0, 0.0};
    double alpha = 0.0;
    double residual = 0.0;
    bool converged = true;
};

/// Sampled Mather function omega -> alpha([omega]) = c(H_omega), sorted by
/// omega (lexicographically for dim 2).
struct AlphaTable {
    int dim = 1;
    std::vector<AlphaEntry> entries;

    void to_csv(std::ostream& os) const;
};

/// alpha(omega) = solve_weak_kam(shifted(H, omega)).c per entry. Entries that
/// fail to converge are flagged and the sweep continues.
AlphaTable alpha_sweep(const HamiltonianSpec& H, const std::vector<Vec2>& omegas,
                       const PeriodicGrid& grid, const LaxOleinikConfig& cfg);

/// Independent oracle for 1D mechanical Hamiltonians:
///   W(c) = integral_0^1 sqrt(2(c - V(x))) dx
/// alpha(omega) = max V if |omega| <= W(max V), else the unique c > max V
/// with W(c) = |omega| (W is strictly increasing). Quadrature and bisection
/// tolerances 1e-10.
double alpha_oracle_1d(const PotentialExpr& V, double omega);

/// W(max V): half-width of the flat piece of alpha for 1D mechanical specs.
double flat_piece_width_1d(const PotentialExpr& V);

struct ConvexityResult {
    bool pass = false;
    std::size_t worst_index = 0;        ///< center of the worst triple
    double worst_second_difference = 0; ///< most negative second difference
};

/// Second differences along the (collinear) table are >= -tol.
ConvexityResult convexity_check(const AlphaTable& table, double tol);

struct SuperlinearityCertificate {
    double K = 0.0;
    double B = 0.0;          ///< max over entries of K|omega| - alpha
    bool finite = false;
    bool growth_exceeds = false; ///< tail slope of alpha exceeds K
};

struct SuperlinearityResult {
    bool pass = false;
    double tail_slope = 0.0;
    std::vector<SuperlinearityCertificate> certificates;
};

/// For each K: a finite B(K) with alpha >= K|omega| - B(K) across the table,
/// and the one-sided slope of alpha at the largest sampled |omega| must
/// exceed K (the growth evidence superlinearity demands of a finite table).
SuperlinearityResult superlinearity_check(const AlphaTable& table,
                                          std::span<const double> K_list);

struct StrictCriticalResult {
    double c_strict = 0.0;
    Vec2 argmin_omega{0.0, 0.0};
    double c_of_lift = 0.0; ///< c of the equivariant solve at the argmin
};

/// Minimizes omega -> alpha(omega) by golden-section search (1D) or
/// coordinate descent of golden-section line searches (2D) over the bracket.
/// Errors if the samples are strictly monotone across the bracket.
StrictCriticalResult strict_critical(const HamiltonianSpec& H, const PeriodicGrid& grid,
                                     const LaxOleinikConfig& cfg, const Vec2& bracket_lo,
                                     const Vec2& bracket_hi, double tol_omega = 1e-2);

} // namespace wkam
