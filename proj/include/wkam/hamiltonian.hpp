#pragma once

#include <array>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "wkam/expression.hpp"
#include "wkam/grid.hpp"

namespace wkam {

using Vec2 = std::array<double, 2>;

double norm(std::span<const double> v);

/// Tabulated Hamiltonian data: H sampled on (x-grid) x (momentum box grid).
/// x covers [0,1)^dim periodically with nx points per axis; p covers
/// [p_min, p_max]^dim with np points per axis (inclusive endpoints).
struct TabulatedHamiltonian {
    int dim = 1;
    int nx = 0;
    int np = 0;
    double p_min = 0.0;
    double p_max = 0.0;
    std::vector<double> values; // indexed [x...][p...], row-major

    double dp() const { return (p_max - p_min) / (np - 1); }
    std::size_t index1(int ix, int ip) const {
        return static_cast<std::size_t>(ix) * np + ip;
    }
    std::size_t index2(int ix, int iy, int ip, int iq) const {
        return ((static_cast<std::size_t>(ix) * nx + iy) * np + ip) * np + iq;
    }
    void validate() const; // finiteness + discrete strict convexity in p
};

/// A Tonelli Hamiltonian on the flat torus [0,1)^dim.
///
/// Kinds: Mechanical H = |p|^2/2 + V(x); Shifted H_w(x,p) = base(x, p+w)
/// (compositions fold, so the base is never itself shifted); Tabulated.
class HamiltonianSpec {
public:
    enum class Kind { Mechanical, Tabulated };

    static HamiltonianSpec mechanical(PotentialExpr potential);
    static HamiltonianSpec tabulated(TabulatedHamiltonian table);
    /// CSV with header x[,y],p1[,p2],H, row-major, strictly increasing
    /// grid coordinates.
    static HamiltonianSpec load_table_csv(std::istream& is);

    /// H_w(x,p) = H(x, p+w). Folds with any existing shift; a zero shift
    /// returns an identical spec.
    HamiltonianSpec shifted(std::span<const double> omega) const;

    Kind kind() const { return kind_; }
    int dim() const { return dim_; }
    const Vec2& omega() const { return omega_; }
    bool has_shift() const { return shift_nonzero_; }
    const PotentialExpr& potential() const;
    const TabulatedHamiltonian& table() const { return *table_; }

    double eval(std::span<const double> x, std::span<const double> p) const;
    double eval1(double x, double p) const;
    /// dH/dx and dH/dp (analytic for mechanical, centered differences for
    /// tabulated); used by the Hamiltonian flow.
    void grad(std::span<const double> x, std::span<const double> p,
              std::span<double> dHdx, std::span<double> dHdp) const;

private:
    Kind kind_ = Kind::Mechanical;
    int dim_ = 1;
    Vec2 omega_{0.0, 0.0};
    bool shift_nonzero_ = false;
    PotentialExpr potential_;
    std::array<PotentialExpr, 2> potential_grad_;
    std::shared_ptr<const TabulatedHamiltonian> table_;
};

struct LegendreResult {
    double L = 0.0;
    Vec2 p_star{0.0, 0.0};
};

/// Fiberwise convex conjugate at one point: L(x,v) = max_p <p,v> - H(x,p),
/// together with the maximizing momentum. Closed form for the mechanical
/// family; brute-force fiber maximization with 3-point parabolic refinement
/// for tabulated specs (BoundaryError if the maximizer sits on the box edge).
LegendreResult legendre_point(const HamiltonianSpec& spec, std::span<const double> x,
                              std::span<const double> v);

/// The Lagrangian associated with a Hamiltonian. Mechanical family evaluates
/// in closed form: L = |v|^2/2 - V(x) - <w,v>. Tabulated specs get a velocity
/// grid filled by the numeric Legendre transform, evaluated by interpolation.
class Lagrangian {
public:
    explicit Lagrangian(HamiltonianSpec H, int velocity_samples = 0);

    int dim() const { return H_.dim(); }
    const HamiltonianSpec& hamiltonian() const { return H_; }
    bool mechanical_family() const { return H_.kind() == HamiltonianSpec::Kind::Mechanical; }

    double value(std::span<const double> x, std::span<const double> v) const;
    double value1(double x, double v) const;
    LegendreResult legendre(std::span<const double> x, std::span<const double> v) const;
    /// dL/dv = p_star; dL/dx analytic (-V') for the mechanical family,
    /// centered differences otherwise.
    void grad(std::span<const double> x, std::span<const double> v,
              std::span<double> dLdx, std::span<double> dLdv) const;

    double v_box_min() const { return v_min_; }
    double v_box_max() const { return v_max_; }

private:
    HamiltonianSpec H_;
    std::array<PotentialExpr, 2> Vgrad_;
    // tabulated path
    int nx_ = 0, nv_ = 0;
    double v_min_ = 0.0, v_max_ = 0.0;
    std::vector<double> Lvals_;
    double table_value(std::span<const double> x, std::span<const double> v) const;
};

/// Numerically estimated uniform constants of the Tonelli bounds:
///   A(R)  = sup L over |v| <= R        C(K)  : L >= K|v| - C(K)
///   A*(R) = sup H over |p| <= R        C*(K) : H >= K|p| - C*(K)
/// plus the derived quantities theta(c) = c + A(1),
/// K_loc(c,t) = t(A(0) + C(theta(c)+1)) and sym_lip = C(1) + A(1).
class TonelliConstants {
public:
    static TonelliConstants estimate(const HamiltonianSpec& spec,
                                     std::span<const double> R_list,
                                     std::span<const double> K_list,
                                     int sample_density = 32);

    double A(double R) const;
    double C(double K) const;
    double A_star(double R) const;
    double C_star(double K) const;

    double theta(double c) const { return c + A(1.0); }
    double k_loc(double c, double t) const { return t * (A(0.0) + C(theta(c) + 1.0)); }
    double sym_lip() const { return C(1.0) + A(1.0); }

    const std::map<double, double>& A_map() const { return A_; }
    const std::map<double, double>& C_map() const { return C_; }

private:
    std::shared_ptr<const HamiltonianSpec> spec_;
    std::shared_ptr<const Lagrangian> lagrangian_;
    int density_ = 32;
    std::map<double, double> A_, C_, A_star_, C_star_;

    double compute_A(double R) const;
    double compute_C(double K) const;
    double compute_A_star(double R) const;
    double compute_C_star(double K) const;
};

} // namespace wkam
