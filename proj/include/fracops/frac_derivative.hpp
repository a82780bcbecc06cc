#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "fracops/grid.hpp"

namespace fracops {

/// Grunwald-Letnikov weights g_k = (-1)^k C(alpha, k), k = 0..K.
struct GLWeights {
    double alpha;
    std::vector<double> weights;
};

/// Accepts alpha in (0, 2]; alpha = 2 gives the classical {1, -2, 1} stencil.
GLWeights gl_weights(double alpha, std::size_t K);

enum class DerivKind { LeftRL, RightRL, Riesz };

/// Grid shift of the Grunwald-Letnikov sum: 0 for alpha <= 1, 1 above.
/// The shifted scheme is the stable one for Riesz-type diffusion.
int gl_shift(double alpha) noexcept;

struct FracDerivMatrix {
    DerivKind kind;
    double alpha;
    Grid1D grid;
    Eigen::MatrixXd matrix;
};

/// Dense matrices of the discrete operators. The left matrix is lower
/// triangular for alpha <= 1 and lower Hessenberg for the shifted scheme;
/// the right matrix is its transpose; the Riesz matrix is symmetric Toeplitz.
FracDerivMatrix assemble_rl_left(const Grid1D& grid, FracOrder alpha);
FracDerivMatrix assemble_rl_right(const Grid1D& grid, FracOrder alpha);
FracDerivMatrix assemble_riesz(const Grid1D& grid, FracOrder alpha);

/// Left Riemann-Liouville derivative 0D_x^alpha, alpha in (0, 2), applied
/// matrix-free in O(n^2). Zero values are used at and beyond the boundary.
GridFunction rl_left(const GridFunction& f, FracOrder alpha);

/// Right derivative xD_l^alpha, the mirror of rl_left under x -> l - x.
GridFunction rl_right(const GridFunction& f, FracOrder alpha);

/// Riesz derivative -(rl_left + rl_right) / (2 cos(alpha pi / 2)), alpha in (1, 2).
GridFunction riesz(const GridFunction& f, FracOrder alpha);

/// -1 / (2 cos(alpha pi / 2)).
double riesz_coefficient(double alpha);

/// First column of the symmetric Toeplitz Riesz matrix, alpha in (1, 2].
/// At alpha = 2 this is the classical {-2, 1}/h^2 second difference.
std::vector<double> riesz_toeplitz_column(const Grid1D& grid, double alpha);

Eigen::MatrixXd symmetric_toeplitz(std::span<const double> col);

/// Reverses the node order (x -> l - x).
GridFunction reflect(const GridFunction& f);

}  // namespace fracops
