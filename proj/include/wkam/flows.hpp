#pragma once

#include <array>
#include <iosfwd>
#include <vector>

#include "wkam/hamiltonian.hpp"

namespace wkam {

struct PhasePoint {
    Vec2 x{0.0, 0.0};
    Vec2 p{0.0, 0.0};
};

struct Trajectory {
    int dim = 1;
    std::vector<double> times;
    std::vector<PhasePoint> states;
    std::vector<double> energy;

    double max_energy_drift() const;
    void to_csv(std::ostream& os) const;
};

/// Classical RK4 on xdot = dH/dp, pdot = -dH/dx, positions wrapped to the
/// torus, energy recorded per sample. Throws on non-finite states (blow-up).
Trajectory integrate(const HamiltonianSpec& H, const PhasePoint& start, double t_end, double dt);

struct MomentumBoundReport {
    bool pass = false;
    double max_p_norm = 0.0;
    double bound = 0.0;
    double c_star_1 = 0.0;
    double max_energy = 0.0;
};

/// Checks max |p(s)| <= C*(1) + max energy + tol along the trajectory.
MomentumBoundReport momentum_bound_check(const Trajectory& traj, const TonelliConstants& consts,
                                         double tol = 1e-9);

struct ActionCurve {
    std::vector<Vec2> points; ///< vertices, real-line lift (wrap mod 1 for torus points)
    double action = 0.0;
    bool converged = false;
    int iterations = 0;
    double grad_sup_norm = 0.0;
};

/// Gradient descent with backtracking line search on the discretized action
/// sum_s tau_s L(x_{i+1}, (x_{i+1}-x_i)/tau_s) over interior vertices with
/// fixed endpoints; initial curve follows the minimal periodic representative
/// of b-a. Converges when the interior gradient sup-norm drops below 1e-8.
ActionCurve minimize_action(const Lagrangian& L, const Vec2& a, const Vec2& b, double T,
                            int segments);

} // namespace wkam
