#pragma once

#include <cstddef>
#include <vector>

namespace fracops {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Gauss-Legendre rule with `points` nodes mapped to [a, b].
QuadratureRule gauss_legendre(std::size_t points, double a = 0.0, double b = 1.0);

/// Gauss-Jacobi rule for the weight (1 - x)^a (1 + x)^b on [-1, 1], via the
/// Golub-Welsch eigenvalue method. Requires a, b > -1.
QuadratureRule gauss_jacobi(std::size_t points, double a, double b);

}  // namespace fracops
