#pragma once

#include <concepts>
#include <cstddef>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "fracops/grid.hpp"

namespace fracops {

struct SymmetricEigen {
    Eigen::VectorXd values;   // ascending
    Eigen::MatrixXd vectors;  // orthonormal columns
};

/// Dense operator on grid vectors. A symmetric operator computes its
/// eigendecomposition once, on first use; the cache is shared between
/// copies and is safe to fill from several threads.
class LinearOperatorMatrix {
public:
    explicit LinearOperatorMatrix(Eigen::MatrixXd matrix, bool symmetric = false);
    LinearOperatorMatrix(Eigen::MatrixXd matrix, SymmetricEigen eigen);

    const Eigen::MatrixXd& matrix() const noexcept { return matrix_; }
    Eigen::Index size() const noexcept { return matrix_.rows(); }
    bool is_symmetric() const noexcept { return symmetric_; }

    /// Requires a symmetric operator.
    const SymmetricEigen& eigen() const;

    /// Positivity certificate: every eigenvalue is positive (real parts for
    /// a non-symmetric operator).
    bool is_positive() const;

    Eigen::VectorXd apply(const Eigen::VectorXd& v) const { return matrix_ * v; }
    GridFunction apply(const GridFunction& f) const;

private:
    struct Cache {
        std::once_flag once;
        std::optional<SymmetricEigen> eigen;
    };

    Eigen::MatrixXd matrix_;
    bool symmetric_;
    std::shared_ptr<Cache> cache_;
};

/// Induced infinity norm (max absolute row sum).
double operator_sup_norm(const Eigen::MatrixXd& m);

/// Discrete Dirichlet Laplacian tridiag(-1, 2, -1) / h^2.
LinearOperatorMatrix dirichlet_laplacian(const Grid1D& grid);

/// A^beta = sum lambda^beta (xi, .) xi. Needs a symmetric positive A.
LinearOperatorMatrix spectral_power(const LinearOperatorMatrix& A, double beta);

/// Trapezoid rule for (sin(alpha pi)/pi) int_0^inf s^{-alpha} (A + sI)^{-1} ds
/// after s = e^t. Weights include the Jacobian and the prefactor, so that
/// tail + sum_j weights_j / (lambda + nodes_j) approximates lambda^{-alpha}.
/// Beyond the last node (A + sI)^{-1} ~ 1/s, so the rest of the integral is
/// a multiple of the identity, `tail`.
struct ResolventQuadrature {
    double alpha;
    double step;
    double t_min;
    double t_max;
    std::vector<double> nodes;    // s_j = exp(t_j)
    std::vector<double> weights;  // step * sin(alpha pi)/pi * s_j^{1-alpha}
    double tail = 0.0;
    double tail_coarse = 0.0;

    double scalar_probe(double lambda) const;
    /// Same rule on every other node (step doubled), for error estimation.
    double scalar_probe_coarse(double lambda) const;
};

struct ResolventQuadratureOptions {
    double tolerance = 1e-10;  // truncation target, relative
    double step = 0.25;
};

/// `inverse_norm` bounds ||A^{-1}||; it fixes the lower truncation point.
/// The upper one uses ||(A + sI)^{-1}|| <= 1/s, capped at s = e^690 for
/// exponents near 0.
ResolventQuadrature make_resolvent_quadrature(double alpha, double inverse_norm,
                                              const ResolventQuadratureOptions& options = {});

struct BalakrishnanOptions {
    ResolventQuadratureOptions quadrature{};
    double accuracy = 1e-8;  // relative, against the step-doubled rule
};

/// A^{-alpha} for alpha in (0, 1) from the resolvent integral, one dense
/// solve per node. Non-symmetric A is accepted; its positivity is assumed.
/// Throws AccuracyNotMet when the step-doubling estimate exceeds the target.
LinearOperatorMatrix balakrishnan_negative_power(const LinearOperatorMatrix& A, FracOrder alpha,
                                                 const BalakrishnanOptions& options = {});

/// An operator that can apply A^n and the resolvent (A + sI)^{-1}.
template <typename Op>
concept ResolventOperator = requires(const Op& op, const GridFunction& f, const Eigen::VectorXd& v, int n, double s) {
    { op.grid() } -> std::convertible_to<Grid1D>;
    { op.apply_power(f, n) } -> std::convertible_to<Eigen::VectorXd>;
    { op.resolvent(s, v) } -> std::convertible_to<Eigen::VectorXd>;
    { op.inverse_norm_bound() } -> std::convertible_to<double>;
};

/// Dense-matrix model of ResolventOperator.
class MatrixResolventOperator {
public:
    MatrixResolventOperator(LinearOperatorMatrix A, Grid1D grid);

    const Grid1D& grid() const noexcept { return grid_; }
    Eigen::VectorXd apply_power(const GridFunction& f, int n) const;
    Eigen::VectorXd resolvent(double s, const Eigen::VectorXd& v) const;
    double inverse_norm_bound() const noexcept { return inverse_norm_; }

private:
    LinearOperatorMatrix A_;
    Grid1D grid_;
    double inverse_norm_;
};

/// ((d/dx + sI)^{-1} f)(x) = int_0^x e^{-s(x-y)} f(y) dy, exact for the
/// piecewise-linear interpolant of f. `left_value` is f(0); by default it is
/// extrapolated quadratically from the first three nodes.
GridFunction ddx_resolvent(const GridFunction& f, double s, std::optional<double> left_value = std::nullopt);

/// f^{(k)}(x) for k = 0, 1, 2, ... (k = 0 is f itself).
using SmoothFunction = std::function<double(double x, int order)>;

/// A = d/dx on AC^n[0, l] with zero initial data. A^n f comes from the
/// analytic derivative when one is attached, otherwise from second-order
/// finite differences of the samples.
class DerivativeOperator {
public:
    explicit DerivativeOperator(Grid1D grid, std::optional<SmoothFunction> analytic = std::nullopt);

    const Grid1D& grid() const noexcept { return grid_; }
    Eigen::VectorXd apply_power(const GridFunction& f, int n) const;
    Eigen::VectorXd resolvent(double s, const Eigen::VectorXd& v) const;
    /// ||(d/dx)^{-1}|| <= l on [0, l].
    double inverse_norm_bound() const noexcept { return grid_.length(); }

    /// f^{(n)}(0), from the analytic derivative or by extrapolation.
    double derivative_at_origin(const GridFunction& f, int n) const;

    /// Throws DomainError unless |f^{(n)}(0)| <= tol * scale, where scale is
    /// sup |f^{(n)}| over the nodes (1 if that vanishes).
    void check_domain(const GridFunction& f, int n, double tolerance) const;

private:
    Grid1D grid_;
    std::optional<SmoothFunction> analytic_;
};

/// Finite-difference derivative of order k (second order, one-sided at the ends).
Eigen::VectorXd finite_difference_derivative(const GridFunction& f, int order);

struct PositivePowerOptions {
    ResolventQuadratureOptions quadrature{};
    double domain_tolerance = 1e-8;
};

/// A^alpha f = A^{alpha-n} A^n f for alpha in (n-1, n), with
/// A^{alpha-n} from the resolvent integral with exponent n - alpha.
/// Operators exposing check_domain(f, n, tol) have their domain enforced.
template <ResolventOperator Op>
GridFunction positive_power_via_resolvent(const Op& op, double alpha, int n, const GridFunction& f,
                                          const PositivePowerOptions& options = {});

struct Theorem2Report {
    double alpha;
    int n;
    std::size_t grid_size;
    double window_lo;
    double window_hi;
    double sup_gap;           // resolvent route vs Grunwald-Letnikov route
    double relative_sup_gap;  // relative to the sup of the GL route on the window
    double quadrature_step;
    std::size_t quadrature_nodes;
    GridFunction resolvent_route;
    GridFunction rl_route;
};

/// Compares A^alpha f for A = d/dx (resolvent route, analytic f^{(n)}) with
/// the Grunwald-Letnikov left derivative. Throws DomainError when f^{(n)}(0)
/// is not zero.
Theorem2Report theorem2_check(const SmoothFunction& f, FracOrder alpha, int n, const Grid1D& grid,
                              double window_lo, double window_hi, const PositivePowerOptions& options = {});

struct ResolventBoundProbe {
    std::vector<double> shifts;     // sigma = |s| >= 0, probing lambda = -sigma
    std::vector<double> scaled;     // (1 + sigma) ||(A + sigma I)^{-1}||_inf
    double fitted_constant;         // max of scaled
};

/// Empirical M in ||(A - lambda I)^{-1}|| <= M / (1 + |lambda|) along lambda < 0.
ResolventBoundProbe resolvent_bound_probe(const LinearOperatorMatrix& A, const std::vector<double>& shifts);

}  // namespace fracops

#include "fracops/detail/positive_power.ipp"
