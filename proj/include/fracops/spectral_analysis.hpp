#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "fracops/grid.hpp"
#include "fracops/operator_powers.hpp"

namespace fracops {

/// (-Delta)^{alpha/2} with zero exterior, assembled as minus the symmetric
/// Toeplitz Riesz matrix. alpha in (1, 2]; alpha = 2 is tridiag(-1, 2, -1)/h^2.
LinearOperatorMatrix assemble_flap_matrix(const Grid1D& grid, FracOrder alpha);

struct EigenPairs {
    Eigen::VectorXd values;   // lowest m, ascending
    Eigen::MatrixXd vectors;  // matching columns
    double orthonormality_error;  // max |V^T V - I|
};

/// Lowest m eigenpairs of a symmetric operator. m > size is rejected.
EigenPairs eigen_spectrum(const LinearOperatorMatrix& A, std::size_t m);

/// Lowest m eigenvalues of a symmetric operator, without eigenvectors.
std::vector<double> lowest_eigenvalues(const LinearOperatorMatrix& A, std::size_t m);

/// (k pi / l - (2 - alpha) pi / (4 l))^alpha for k = 1..m, alpha in (0, 2].
std::vector<double> asymptotic_eigenvalues(FracOrder alpha, double l, std::size_t m);

/// (k pi / l)^alpha for k = 1..m: the spectrum of the alpha/2 power of
/// the Dirichlet Laplacian.
std::vector<double> fractional_power_eigenvalues(double alpha, double l, std::size_t m);

/// Richardson extrapolation of eigenvalue tables computed on the grids with
/// spacings h. One grid: unchanged. Two grids: first order. Three or more:
/// least-squares fit lambda(h) = c0 + c1 h + c2 h^alpha, returning c0.
std::vector<double> richardson_extrapolate(const std::vector<std::vector<double>>& per_grid,
                                           const std::vector<double>& spacings, double alpha);

struct SpectrumReport {
    double alpha;
    double l;
    std::vector<std::size_t> grid_sizes;
    std::vector<std::vector<double>> per_grid;  // raw lowest-m eigenvalues per grid
    std::vector<double> numeric;                // extrapolated
    std::vector<double> asymptotic;
    std::vector<double> frac_power;
    std::vector<double> gaps;         // numeric - asymptotic
    std::vector<double> scaled_gaps;  // k * |gap|
    double orthonormality_error;      // eigenvectors of the smallest grid
    bool positive_and_ordered;        // 0 < l1 < l2 <= ... on every grid
    bool frac_power_larger;           // (k pi/l)^alpha > numeric and > asymptotic for every k
    double scaled_gap_ratio;          // max_k k|gap_k| / (1 * |gap_1|)

    std::size_t modes() const noexcept { return numeric.size(); }
};

/// Eigenvalues of the flap matrix on each grid, extrapolated and tabulated
/// against the asymptotic formula and the fractional-power spectrum.
/// Eigenvectors are formed on the smallest grid only.
SpectrumReport compare_spectra(FracOrder alpha, double l, const std::vector<std::size_t>& grid_sizes,
                               std::size_t m);

/// Positivity and ordering of an ascending eigenvalue list: 0 < l1 < l2 <= l3 <= ...
bool positive_and_ordered(const std::vector<double>& values);

/// Gagliardo seminorm (int int |f(x) - f(y)|^p / |x - y|^{1 + s p} dx dy)^{1/p}
/// on (0, l). Tensor trapezoid rule over the nodes 0..n+1 (end values
/// extrapolated linearly), diagonal cells replaced by the integral of the
/// local linear model. A diagnostic, not a certified value. s in (0, 1),
/// p >= 1, s p < 2.
double gagliardo_seminorm(const GridFunction& f, double s, double p);

enum class DecayTrend { ToZero, ToConstant, ToInfinity };

std::string to_string(DecayTrend t);

struct BoundarySide {
    std::vector<double> distance;  // delta(x_i), nearest node first
    std::vector<double> ratio;     // f(x_i) / delta(x_i)^alpha
    double log_slope;              // d log|ratio| / d log delta
    DecayTrend trend;
    double limit_estimate;         // ratio at the node nearest the boundary
};

struct BoundaryDecayReport {
    double alpha;
    BoundarySide left;
    BoundarySide right;
    double weighted_norm;  // (h sum |f / delta^alpha|^p)^{1/p}
    double p;
    double slope_threshold;

    DecayTrend trend() const noexcept;
};

/// Profile of f / delta^alpha on the 10% of nodes nearest each boundary.
/// The trend is read from the log-log slope: |slope| <= threshold means a
/// finite nonzero limit.
BoundaryDecayReport boundary_decay_profile(const GridFunction& f, FracOrder alpha, double p = 2.0,
                                           double slope_threshold = 0.25);

}  // namespace fracops
