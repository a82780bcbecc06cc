#include "fracops/quadrature.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "fracops/errors.hpp"

namespace fracops {

QuadratureRule gauss_legendre(std::size_t points, double a, double b) {
    if (points == 0) fail(ErrorCode::InvalidArgument, "quadrature needs at least one node");
    QuadratureRule rule;
    rule.nodes.resize(points);
    rule.weights.resize(points);
    const auto n = static_cast<double>(points);
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    for (std::size_t i = 0; i < (points + 1) / 2; ++i) {
        // Newton on P_n, started from the Chebyshev-like guess.
        double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = 0.0;
            for (std::size_t k = 1; k <= points; ++k) {
                const double p2 = p1;
                p1 = p0;
                const auto kk = static_cast<double>(k);
                p0 = ((2.0 * kk - 1.0) * z * p1 - (kk - 1.0) * p2) / kk;
            }
            dp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        const double w = 2.0 / ((1.0 - z * z) * dp * dp);
        rule.nodes[i] = mid - half * z;
        rule.nodes[points - 1 - i] = mid + half * z;
        rule.weights[i] = half * w;
        rule.weights[points - 1 - i] = half * w;
    }
    return rule;
}

QuadratureRule gauss_jacobi(std::size_t points, double a, double b) {
    if (points == 0) fail(ErrorCode::InvalidArgument, "quadrature needs at least one node");
    if (!(a > -1.0) || !(b > -1.0)) fail(ErrorCode::InvalidArgument, "Jacobi exponents must exceed -1");
    const auto n = static_cast<Eigen::Index>(points);
    Eigen::VectorXd diag(n);
    Eigen::VectorXd off(n > 1 ? n - 1 : 0);
    const double ab = a + b;
    for (Eigen::Index k = 0; k < n; ++k) {
        const auto kk = static_cast<double>(k);
        const double denom = (2.0 * kk + ab) * (2.0 * kk + ab + 2.0);
        diag(k) = (denom == 0.0) ? (b - a) / (ab + 2.0) : (b * b - a * a) / denom;
        if (k + 1 < n) {
            const double j = kk + 1.0;
            const double num = 4.0 * j * (j + a) * (j + b) * (j + ab);
            const double den = (2.0 * j + ab) * (2.0 * j + ab) * (2.0 * j + ab + 1.0) * (2.0 * j + ab - 1.0);
            off(k) = std::sqrt(num / den);
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
    const double mu0 = std::exp((ab + 1.0) * std::log(2.0) + std::lgamma(a + 1.0) + std::lgamma(b + 1.0) -
                                std::lgamma(ab + 2.0));
    QuadratureRule rule;
    rule.nodes.resize(points);
    rule.weights.resize(points);
    for (Eigen::Index k = 0; k < n; ++k) {
        rule.nodes[static_cast<std::size_t>(k)] = es.eigenvalues()(k);
        const double v0 = es.eigenvectors()(0, k);
        rule.weights[static_cast<std::size_t>(k)] = mu0 * v0 * v0;
    }
    return rule;
}

}  // namespace fracops
