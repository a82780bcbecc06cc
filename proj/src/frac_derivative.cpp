#include "fracops/frac_derivative.hpp"

#include <cmath>
#include <numbers>

namespace fracops {

GLWeights gl_weights(double alpha, std::size_t K) {
    if (!kOrder02Closed.contains(alpha)) {
        fail(ErrorCode::InvalidOrder, "Grunwald-Letnikov weights need alpha in (0,2]");
    }
    GLWeights w{alpha, std::vector<double>(K + 1)};
    w.weights[0] = 1.0;
    for (std::size_t k = 1; k <= K; ++k) {
        const auto kk = static_cast<double>(k);
        w.weights[k] = w.weights[k - 1] * (kk - 1.0 - alpha) / kk;
    }
    return w;
}

int gl_shift(double alpha) noexcept { return alpha > 1.0 ? 1 : 0; }

double riesz_coefficient(double alpha) { return -1.0 / (2.0 * std::cos(alpha * std::numbers::pi / 2.0)); }

namespace {

// out_i = h^-alpha sum_j g_{i - j + p} f_j over interior j with 0 <= i - j + p.
std::vector<double> left_sum(std::span<const double> f, double alpha, double h) {
    const std::size_t n = f.size();
    const int p = gl_shift(alpha);
    const auto g = gl_weights(alpha, n + 1).weights;
    const double scale = std::pow(h, -alpha);
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t jmax = std::min(n - 1, i + static_cast<std::size_t>(p));
        double acc = 0.0;
        for (std::size_t j = 0; j <= jmax; ++j) acc += g[i + static_cast<std::size_t>(p) - j] * f[j];
        out[i] = scale * acc;
    }
    return out;
}

Eigen::MatrixXd left_matrix(const Grid1D& grid, double alpha) {
    const auto n = static_cast<Eigen::Index>(grid.size());
    const int p = gl_shift(alpha);
    const auto g = gl_weights(alpha, grid.size() + 1).weights;
    const double scale = std::pow(grid.spacing(), -alpha);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j <= std::min(n - 1, i + p); ++j) {
            m(i, j) = scale * g[static_cast<std::size_t>(i + p - j)];
        }
    }
    return m;
}

}  // namespace

GridFunction reflect(const GridFunction& f) {
    const auto v = f.values();
    return {f.grid(), std::vector<double>(v.rbegin(), v.rend())};
}

FracDerivMatrix assemble_rl_left(const Grid1D& grid, FracOrder alpha) {
    const double a = alpha.within(kOrder02).value();
    return {DerivKind::LeftRL, a, grid, left_matrix(grid, a)};
}

FracDerivMatrix assemble_rl_right(const Grid1D& grid, FracOrder alpha) {
    const double a = alpha.within(kOrder02).value();
    return {DerivKind::RightRL, a, grid, left_matrix(grid, a).transpose()};
}

std::vector<double> riesz_toeplitz_column(const Grid1D& grid, double alpha) {
    if (!kOrder12Closed.contains(alpha)) fail(ErrorCode::InvalidOrder, "Riesz stencil needs alpha in (1,2]");
    const auto g = gl_weights(alpha, grid.size() + 1).weights;
    const double c = riesz_coefficient(alpha) * std::pow(grid.spacing(), -alpha);
    std::vector<double> col(grid.size());
    col[0] = c * 2.0 * g[1];
    col[1] = c * (g[0] + g[2]);
    for (std::size_t k = 2; k < col.size(); ++k) col[k] = c * g[k + 1];
    return col;
}

Eigen::MatrixXd symmetric_toeplitz(std::span<const double> col) {
    const auto n = static_cast<Eigen::Index>(col.size());
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) m(i, j) = col[static_cast<std::size_t>(std::abs(i - j))];
    }
    return m;
}

FracDerivMatrix assemble_riesz(const Grid1D& grid, FracOrder alpha) {
    // Assembled from the Toeplitz column so that symmetry is exact.
    const double a = alpha.within(kOrder12).value();
    return {DerivKind::Riesz, a, grid, symmetric_toeplitz(riesz_toeplitz_column(grid, a))};
}

GridFunction rl_left(const GridFunction& f, FracOrder alpha) {
    const double a = alpha.within(kOrder02).value();
    return {f.grid(), left_sum(f.values(), a, f.grid().spacing())};
}

GridFunction rl_right(const GridFunction& f, FracOrder alpha) {
    return reflect(rl_left(reflect(f), alpha));
}

GridFunction riesz(const GridFunction& f, FracOrder alpha) {
    const double a = alpha.within(kOrder12).value();
    const auto left = rl_left(f, alpha);
    const auto right = rl_right(f, alpha);
    return (left + right).scaled(riesz_coefficient(a));
}

}  // namespace fracops
