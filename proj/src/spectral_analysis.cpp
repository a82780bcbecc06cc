#include "fracops/spectral_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "fracops/frac_derivative.hpp"

namespace fracops {

LinearOperatorMatrix assemble_flap_matrix(const Grid1D& grid, FracOrder alpha) {
    const double a = alpha.within(kOrder12Closed).value();
    auto col = riesz_toeplitz_column(grid, a);
    for (auto& c : col) c = -c;
    return LinearOperatorMatrix(symmetric_toeplitz(col), true);
}

EigenPairs eigen_spectrum(const LinearOperatorMatrix& A, std::size_t m) {
    if (m == 0 || static_cast<Eigen::Index>(m) > A.size()) {
        std::ostringstream msg;
        msg << "requested " << m << " eigenpairs of an operator of size " << A.size();
        fail(ErrorCode::InvalidArgument, msg.str());
    }
    const auto& e = A.eigen();
    const auto k = static_cast<Eigen::Index>(m);
    EigenPairs out{e.values.head(k), e.vectors.leftCols(k), 0.0};
    const Eigen::MatrixXd gram = out.vectors.transpose() * out.vectors;
    out.orthonormality_error = (gram - Eigen::MatrixXd::Identity(k, k)).cwiseAbs().maxCoeff();
    return out;
}

std::vector<double> lowest_eigenvalues(const LinearOperatorMatrix& A, std::size_t m) {
    if (!A.is_symmetric()) fail(ErrorCode::InvalidArgument, "eigenvalues need a symmetric operator");
    if (m == 0 || static_cast<Eigen::Index>(m) > A.size()) {
        std::ostringstream msg;
        msg << "requested " << m << " eigenvalues of an operator of size " << A.size();
        fail(ErrorCode::InvalidArgument, msg.str());
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A.matrix(), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) fail(ErrorCode::SolverError, "symmetric eigensolver did not converge");
    return {es.eigenvalues().data(), es.eigenvalues().data() + m};
}

std::vector<double> asymptotic_eigenvalues(FracOrder alpha, double l, std::size_t m) {
    const double a = alpha.within(kOrder02Closed).value();
    if (!(l > 0.0)) fail(ErrorCode::InvalidArgument, "domain length must be positive");
    std::vector<double> out(m);
    for (std::size_t k = 1; k <= m; ++k) {
        const double base = static_cast<double>(k) * std::numbers::pi / l - (2.0 - a) * std::numbers::pi / (4.0 * l);
        out[k - 1] = std::pow(base, a);
    }
    return out;
}

std::vector<double> fractional_power_eigenvalues(double alpha, double l, std::size_t m) {
    std::vector<double> out(m);
    for (std::size_t k = 1; k <= m; ++k) out[k - 1] = std::pow(static_cast<double>(k) * std::numbers::pi / l, alpha);
    return out;
}

std::vector<double> richardson_extrapolate(const std::vector<std::vector<double>>& per_grid,
                                           const std::vector<double>& spacings, double alpha) {
    if (per_grid.empty() || per_grid.size() != spacings.size()) {
        fail(ErrorCode::InvalidArgument, "one eigenvalue table per grid spacing is required");
    }
    const std::size_t m = per_grid.front().size();
    for (const auto& t : per_grid) {
        if (t.size() != m) fail(ErrorCode::InvalidArgument, "eigenvalue tables differ in length");
    }
    const std::size_t g = spacings.size();
    if (g == 1) return per_grid.front();
    std::vector<double> out(m);
    if (g == 2) {
        const double h1 = spacings[0], h2 = spacings[1];
        for (std::size_t k = 0; k < m; ++k) out[k] = (h1 * per_grid[1][k] - h2 * per_grid[0][k]) / (h1 - h2);
        return out;
    }
    Eigen::MatrixXd design(static_cast<Eigen::Index>(g), 3);
    for (std::size_t i = 0; i < g; ++i) {
        design(static_cast<Eigen::Index>(i), 0) = 1.0;
        design(static_cast<Eigen::Index>(i), 1) = spacings[i];
        design(static_cast<Eigen::Index>(i), 2) = std::pow(spacings[i], alpha);
    }
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(g));
    for (std::size_t k = 0; k < m; ++k) {
        for (std::size_t i = 0; i < g; ++i) rhs(static_cast<Eigen::Index>(i)) = per_grid[i][k];
        out[k] = qr.solve(rhs)(0);
    }
    return out;
}

bool positive_and_ordered(const std::vector<double>& v) {
    if (v.empty() || !(v[0] > 0.0)) return false;
    if (v.size() > 1 && !(v[0] < v[1])) return false;
    for (std::size_t k = 2; k < v.size(); ++k) {
        if (!(v[k - 1] <= v[k])) return false;
    }
    return true;
}

SpectrumReport compare_spectra(FracOrder alpha, double l, const std::vector<std::size_t>& grid_sizes,
                               std::size_t m) {
    const double a = alpha.within(kOrder12Closed).value();
    if (grid_sizes.empty()) fail(ErrorCode::InvalidArgument, "at least one grid size is required");
    SpectrumReport r{};
    r.alpha = a;
    r.l = l;
    r.grid_sizes = grid_sizes;
    r.positive_and_ordered = true;
    std::vector<double> spacings;
    const auto smallest = std::min_element(grid_sizes.begin(), grid_sizes.end());
    for (auto it = grid_sizes.begin(); it != grid_sizes.end(); ++it) {
        const std::size_t n = *it;
        const Grid1D grid(l, n);
        const auto A = assemble_flap_matrix(grid, alpha);
        std::vector<double> vals;
        if (it == smallest) {
            const auto pairs = eigen_spectrum(A, m);
            vals.assign(pairs.values.data(), pairs.values.data() + pairs.values.size());
            r.orthonormality_error = pairs.orthonormality_error;
        } else {
            vals = lowest_eigenvalues(A, m);
        }
        r.positive_and_ordered = r.positive_and_ordered && positive_and_ordered(vals);
        r.per_grid.push_back(std::move(vals));
        spacings.push_back(grid.spacing());
    }
    r.numeric = richardson_extrapolate(r.per_grid, spacings, a);
    r.positive_and_ordered = r.positive_and_ordered && positive_and_ordered(r.numeric);
    r.asymptotic = asymptotic_eigenvalues(alpha, l, m);
    r.frac_power = fractional_power_eigenvalues(a, l, m);
    r.frac_power_larger = true;
    double worst = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        r.gaps.push_back(r.numeric[k] - r.asymptotic[k]);
        r.scaled_gaps.push_back(static_cast<double>(k + 1) * std::abs(r.gaps.back()));
        worst = std::max(worst, r.scaled_gaps.back());
        r.frac_power_larger =
            r.frac_power_larger && r.frac_power[k] > r.numeric[k] && r.frac_power[k] > r.asymptotic[k];
    }
    r.scaled_gap_ratio = r.scaled_gaps[0] > 0.0 ? worst / r.scaled_gaps[0] : INFINITY;
    return r;
}

double gagliardo_seminorm(const GridFunction& f, double s, double p) {
    if (!(s > 0.0 && s < 1.0)) fail(ErrorCode::InvalidArgument, "smoothness index s must lie in (0,1)");
    if (!(p >= 1.0)) fail(ErrorCode::InvalidArgument, "integrability index p must be at least 1");
    if (!(s * p < 2.0)) fail(ErrorCode::InvalidArgument, "s*p must stay below 2 for the diagonal correction");
    const std::size_t n = f.size();
    if (n < 2) fail(ErrorCode::InvalidArgument, "seminorm needs at least two interior nodes");
    const double h = f.grid().spacing();

    std::vector<double> y(n + 2);
    for (std::size_t i = 0; i < n; ++i) y[i + 1] = f[i];
    y[0] = 2.0 * y[1] - y[2];
    y[n + 1] = 2.0 * y[n] - y[n - 1];

    const double expo = 1.0 + s * p;
    const std::size_t N = n + 2;
    auto w = [&](std::size_t i) { return (i == 0 || i + 1 == N) ? 0.5 * h : h; };

    double off = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        double row = 0.0;
        for (std::size_t j = i + 1; j < N; ++j) {
            const double d = std::abs(y[i] - y[j]);
            if (d == 0.0) continue;
            row += w(j) * std::pow(d, p) / std::pow(static_cast<double>(j - i) * h, expo);
        }
        off += 2.0 * w(i) * row;
    }

    // Diagonal cells: for linear f the integrand is |f'|^p r^q. Swap the
    // trapezoid estimate of the cell (two corners at r = h, weight h^2/4)
    // for the exact cell integral 2 h^{q+2} / ((q+1)(q+2)).
    const double q = p - expo;
    const double exact = 2.0 * std::pow(h, q + 2.0) / ((q + 1.0) * (q + 2.0));
    const double trap = 0.5 * std::pow(h, q + 2.0);
    double diag = 0.0;
    for (std::size_t i = 0; i + 1 < N; ++i) {
        const double slope = std::abs(y[i + 1] - y[i]) / h;
        diag += std::pow(slope, p) * (exact - trap);
    }
    return std::pow(std::max(off + diag, 0.0), 1.0 / p);
}

std::string to_string(DecayTrend t) {
    switch (t) {
        case DecayTrend::ToZero: return "to-zero";
        case DecayTrend::ToConstant: return "to-constant";
        case DecayTrend::ToInfinity: return "to-infinity";
    }
    return "unknown";
}

namespace {

BoundarySide profile_side(const GridFunction& f, double a, bool left, std::size_t count, double threshold) {
    const std::size_t n = f.size();
    BoundarySide side{};
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t used = 0;
    bool any_zero = false;
    for (std::size_t k = 0; k < count; ++k) {
        const std::size_t i = left ? k : n - 1 - k;
        const double d = f.grid().boundary_distance(i);
        const double r = f[i] / std::pow(d, a);
        side.distance.push_back(d);
        side.ratio.push_back(r);
        if (r == 0.0) {
            any_zero = true;
            continue;
        }
        const double lx = std::log(d), ly = std::log(std::abs(r));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++used;
    }
    const double m = static_cast<double>(used);
    side.log_slope = used >= 2 ? (m * sxy - sx * sy) / (m * sxx - sx * sx) : 0.0;
    side.limit_estimate = side.ratio.front();
    if (used < 2 && any_zero) {
        side.trend = DecayTrend::ToZero;
    } else if (side.log_slope > threshold) {
        side.trend = DecayTrend::ToZero;
    } else if (side.log_slope < -threshold) {
        side.trend = DecayTrend::ToInfinity;
    } else {
        side.trend = DecayTrend::ToConstant;
    }
    return side;
}

}  // namespace

DecayTrend BoundaryDecayReport::trend() const noexcept {
    if (left.trend == DecayTrend::ToInfinity || right.trend == DecayTrend::ToInfinity) return DecayTrend::ToInfinity;
    if (left.trend == DecayTrend::ToConstant || right.trend == DecayTrend::ToConstant) return DecayTrend::ToConstant;
    return DecayTrend::ToZero;
}

BoundaryDecayReport boundary_decay_profile(const GridFunction& f, FracOrder alpha, double p,
                                           double slope_threshold) {
    const double a = alpha.within(kOrder02Closed).value();
    if (!(p >= 1.0)) fail(ErrorCode::InvalidArgument, "weighted norm exponent must be at least 1");
    const std::size_t n = f.size();
    const std::size_t count = std::max<std::size_t>(2, n / 10);
    if (2 * count > n) fail(ErrorCode::InvalidArgument, "boundary profile needs at least 4 interior nodes");

    BoundaryDecayReport r{a,
                          profile_side(f, a, true, count, slope_threshold),
                          profile_side(f, a, false, count, slope_threshold),
                          0.0,
                          p,
                          slope_threshold};
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        acc += std::pow(std::abs(f[i]) / std::pow(f.grid().boundary_distance(i), a), p);
    }
    r.weighted_norm = std::pow(f.grid().spacing() * acc, 1.0 / p);
    return r;
}

}  // namespace fracops
