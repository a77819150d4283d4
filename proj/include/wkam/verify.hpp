#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "wkam/lax_oleinik.hpp"

namespace wkam {

struct CheckEntry {
    std::string name;
    bool pass = false;
    double value = 0.0; ///< the measured defect / violation / residual
    double tol = 0.0;
    std::string detail;
};

/// Aggregated verification results; serializes to JSON.
struct VerificationReport {
    std::vector<CheckEntry> checks;

    void add(CheckEntry e) { checks.push_back(std::move(e)); }
    bool all_pass() const;
    const CheckEntry* find(const std::string& name) const;
    nlohmann::json to_json() const;
};

/// Max over nodes of H(x, Du) - c with centered differences; at detected
/// gradient kinks (one-sided disagreement above 10 h max(1, Lip u)) the
/// better one-sided gradient is used per axis.
CheckEntry check_subsolution(const HamiltonianSpec& H, const GridFunction& u, double c,
                             double tol);

/// Max positive defect u(b)-u(a) - action - c dt over seeded random broken
/// lines (2-8 segments, total time in [0.1,2], uniform vertices); the action
/// is the endpoint-evaluated Riemann sum on substeps of at most one grid cell.
CheckEntry check_domination(const Lagrangian& L, const GridFunction& u, double c, int samples,
                            std::uint64_t seed, double tol);

/// Count of sampled curves with defect above `positive_margin` (diagnostic
/// companion of check_domination for below-critical tests).
int count_domination_violations(const Lagrangian& L, const GridFunction& u, double c,
                                int samples, std::uint64_t seed, double positive_margin = 0.0);

/// Backtracks one minimizer per endpoint through the recorded history and
/// reports the worst calibration defect |u(x) - u(gamma(0)) - sum tau L - cT|.
/// pass iff <= 10 h.
CheckEntry check_calibration(const WeakKamSolution& solution, const Lagrangian& L,
                             std::span<const std::size_t> endpoints, int horizon);

/// Runs evolve() and measures |(u_{k+1}-u_{k-1})/(2 tau) + H(x, Du_k)| away
/// from kink nodes; pass iff <= max(10 h, 10 tau).
CheckEntry check_evolution(const HamiltonianSpec& H, const GridFunction& u0,
                           const LaxOleinikConfig& cfg, int steps);

struct SmoothResult {
    GridFunction g;
    double delta = 0.0;       ///< kernel radius actually used
    double sup_err = 0.0;     ///< ||g-u||_inf
    double max_violation = 0.0; ///< max H(x,Dg) - (c+eps)
    bool hull_pass = false;
    bool pass = false;
    CheckEntry entry;
};

/// Mollifies a discrete subsolution into a smooth eps-approximate one:
/// kernel radius delta = min(eps/(2 Lip u), 1/8), assert ||g-u|| <= eps and
/// H(x,Dg) <= c + eps + tol. Precondition: u passes check_subsolution at
/// tolerance pre_tol (default 5h; the discrete solution carries O(h) defect).
SmoothResult smooth_subsolution(const HamiltonianSpec& H, const GridFunction& u, double c,
                                double epsilon, double tol = -1.0, double pre_tol = -1.0);

/// The centered gradient of mollify(u) lies in the convex hull of one-sided
/// difference quotients of u over the kernel support (plus one cell).
bool clarke_hull_check(const GridFunction& u, const MollifierKernel& kernel, double tol);

/// Forced-drift iteration u <- T u + c' tau (no normalization); returns the
/// anchor value trace. Below the critical value the trace diverges linearly.
std::vector<double> forced_drift_trace(const Lagrangian& L, const GridFunction& u0,
                                       const LaxOleinikConfig& cfg, double c_forced, int steps);

} // namespace wkam
