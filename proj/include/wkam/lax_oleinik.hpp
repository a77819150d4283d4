#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "wkam/grid.hpp"
#include "wkam/hamiltonian.hpp"

namespace wkam {

/// Discrete Lax-Oleinik operator parameters.
struct LaxOleinikConfig {
    double tau = 0.0;      ///< time step; <= 0 means derive 8h/v_max
    double v_max = 0.0;    ///< velocity search bound; <= 0 means A(0)+C(theta+1)
    bool refine = true;    ///< parabolic sub-cell refinement of the minimizer
    std::size_t anchor = 0;///< grid index used for normalization
    double tol = 1e-7;     ///< fixed-point tolerance, in units of c
    int max_iter = 20000;

    /// Fills tau/v_max defaults from the Tonelli constants (theta taken at the
    /// upper bound c <= C(0), which constant subsolutions always realize).
    LaxOleinikConfig resolved(const HamiltonianSpec& spec, const PeriodicGrid& grid) const;
    void validate(const PeriodicGrid& grid) const;
};

/// One backward step: per-node origin offsets (in grid cells, per axis) of
/// the chosen minimizer.
struct StepResult {
    GridFunction Tu;
    std::vector<std::array<int16_t, 2>> argmin_offsets;
    /// Grid index of the chosen origin y for node i.
    std::size_t origin_index(const PeriodicGrid& grid, std::size_t i) const;
};

/// Tu(x_i) = min over origins y with |x_i - y| <= tau v_max of
/// u(y) + tau L(x_i, (x_i (-) y)/tau), endpoint Lagrangian evaluation,
/// ties broken toward the lexicographically smallest origin index.
/// Throws BoundaryError if a minimizer lands on the search-window edge.
StepResult lo_step(const Lagrangian& L, const GridFunction& u, const LaxOleinikConfig& cfg);

/// Argmin maps of the final (refinement-free) sweeps, for backtracking.
struct MinimizerHistory {
    GridFunction u_start; ///< normalized iterate before the recorded sweeps
    GridFunction u_end;   ///< normalized iterate after them
    std::vector<std::vector<std::array<int16_t, 2>>> offsets; ///< one map per sweep
    std::vector<double> shifts; ///< per-sweep anchor shift (= -c tau)
    double tau = 0.0;
};

struct WeakKamSolution {
    GridFunction u;       ///< anchor-normalized fixed point, u(anchor) = 0
    double c = 0.0;       ///< critical value estimate
    double residual = 0.0;///< sup-norm of T_tau u - u + c tau
    int iterations = 0;
    bool converged = false;
    std::vector<double> drift_trace; ///< per-iteration anchor shifts
    std::optional<MinimizerHistory> history;
    LaxOleinikConfig cfg; ///< resolved configuration actually used
};

/// Anchor-normalized value iteration from u = 0 until the normalized change
/// drops below tol * tau * max(1,|c|); c is read off the anchor shift.
/// If record_history_steps > 0, that many extra refinement-free sweeps are
/// recorded after convergence for minimizer backtracking.
WeakKamSolution solve_weak_kam(const HamiltonianSpec& H, const PeriodicGrid& grid,
                               const LaxOleinikConfig& cfg, int record_history_steps = 0);

/// rho in Hom(Z^dim, R), given by its values on the standard generators.
struct Homomorphism {
    Vec2 rho{0.0, 0.0};
    int dim = 1;
};

/// A rho-equivariant solution u(x) = <rho,x> + u_periodic(x); the periodic
/// part solves the rho-shifted problem (same code path as solve_weak_kam,
/// so c equals solve_weak_kam(shifted(H,rho)).c bit for bit).
struct EquivariantSolution {
    WeakKamSolution periodic;
    Homomorphism rho;
    double lift(std::span<const double> x) const;
};

EquivariantSolution solve_equivariant(const HamiltonianSpec& H, const Homomorphism& rho,
                                      const PeriodicGrid& grid, const LaxOleinikConfig& cfg,
                                      int record_history_steps = 0);

/// Invariant solve for the cyclic group x -> x + 1/k acting on axis 0.
/// Solves on the quotient ring of period 1/k and lifts back; the lift is
/// G-invariant exactly (replicated values).
struct InvariantSolution {
    WeakKamSolution quotient; ///< solution on the quotient ring (n/k nodes)
    GridFunction lifted;      ///< replicated onto the full grid
    double c_inv = 0.0;
    int k = 1;
};

InvariantSolution solve_invariant(const HamiltonianSpec& H, int k, const PeriodicGrid& grid,
                                  const LaxOleinikConfig& cfg);

/// Un-normalized trajectory (u0, T u0, T^2 u0, ...): steps+1 entries.
std::vector<GridFunction> evolve(const Lagrangian& L, const GridFunction& u0,
                                 const LaxOleinikConfig& cfg, int steps);

/// Follows recorded argmins backward from grid index x over the whole
/// recorded horizon; returns grid indices [gamma(T)=x, ..., gamma(0)].
std::vector<std::size_t> backtrack_minimizer(const MinimizerHistory& history,
                                             const PeriodicGrid& grid, std::size_t x_index);

/// Re-records refinement-free argmin sweeps starting from a converged (or
/// loaded) iterate, e.g. to rebuild backtracking data for saved artifacts.
MinimizerHistory record_history(const Lagrangian& L, const GridFunction& u,
                                const LaxOleinikConfig& cfg, int steps);

} // namespace wkam
