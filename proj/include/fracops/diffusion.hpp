#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/LU>

#include "fracops/grid.hpp"
#include "fracops/operator_powers.hpp"

namespace fracops {

using Signal = std::function<double(double t)>;

/// u(x, t) = sum_i b_i(x) v_i(t).
class ActuatorProfile {
public:
    explicit ActuatorProfile(Grid1D grid);

    void add(GridFunction shape, Signal signal);

    const Grid1D& grid() const noexcept { return grid_; }
    std::size_t count() const noexcept { return shapes_.size(); }
    const GridFunction& shape(std::size_t i) const { return shapes_.at(i); }

    GridFunction evaluate(double t) const;

private:
    Grid1D grid_;
    std::vector<GridFunction> shapes_;
    std::vector<Signal> signals_;
};

/// Discrete indicator of the nodes within half_width of center, scaled to
/// unit mass h * sum b = 1. At least the node nearest to center is used.
GridFunction bump_shape(const Grid1D& grid, double center, double half_width);

Signal constant_signal(double value);

struct TrajectoryRecord {
    std::vector<double> times;
    std::vector<GridFunction> states;
    std::vector<double> energies;  // discrete L2 norm per state
    std::string operator_descriptor;
    double dt;
    std::string scheme = "implicit-euler";

    /// ||z_{k+1}|| <= ||z_k|| (1 + rel_tol) for every step.
    bool energy_non_increasing(double rel_tol = 1e-12) const;
};

/// Factorization of I + dt A, reused across steps.
class ImplicitEulerStepper {
public:
    ImplicitEulerStepper(const LinearOperatorMatrix& A, double dt);

    double dt() const noexcept { return dt_; }
    /// Solves (I + dt A) z_next = z + dt u.
    GridFunction step(const GridFunction& z, const GridFunction& u) const;

private:
    double dt_;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

GridFunction step_implicit_euler(const GridFunction& z, const LinearOperatorMatrix& A, const GridFunction& u_now,
                                 double dt);

/// Implicit-Euler trajectory of z_t + A z = u on [0, T] with u taken at the
/// new time level. T / dt must be an integer up to rounding.
TrajectoryRecord solve(const GridFunction& z0, const LinearOperatorMatrix& A, const ActuatorProfile& act, double T,
                       double dt, std::string descriptor = "matrix");

/// sum_k e^{-lambda_k t} (xi_k, z0) xi_k for symmetric positive A.
GridFunction exact_spectral_solution(const GridFunction& z0, const LinearOperatorMatrix& A, double t);

struct SpreadingRow {
    double time;
    double iqr_width;  // interquartile width of |z| as a distribution
    double std_width;  // standard deviation of |z| as a distribution
    double mass;       // h * sum z
};

struct AnomalousResult {
    double alpha;
    double lambda1;       // lowest eigenvalue of the operator
    double mode1_rate;    // fitted decay rate of (xi_1, z)
    double width_exponent;  // log-log slope of the interquartile width in t
    std::vector<SpreadingRow> rows;
};

struct AnomalousReport {
    std::vector<AnomalousResult> results;  // in the order of the ladder
};

/// A narrow unit-mass bump at the centre evolved under assemble_flap_matrix(alpha)
/// (alpha = 2: classical Laplacian). Widths are sampled `snapshots` times on (0, T].
/// Spreading is compared through the growth exponent of the width (about
/// 1/alpha while the bump is far from the boundary), not through the width
/// at a fixed time: on a unit interval lambda_1 grows with alpha.
AnomalousReport anomalous_exponent_probe(const std::vector<double>& alphas, const Grid1D& grid, double T, double dt,
                                         std::size_t snapshots = 5);

/// Interquartile and standard-deviation widths of |z| normalised to unit mass.
SpreadingRow spreading_of(const GridFunction& z, double time);

/// Rows "time,node,value" with %.17g numbers.
void write_trajectory_csv(const TrajectoryRecord& rec, std::ostream& out);

}  // namespace fracops
