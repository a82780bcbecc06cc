#include "fracops/operator_powers.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "fracops/frac_derivative.hpp"
#include "fracops/frac_laplacian.hpp"

namespace fracops {

LinearOperatorMatrix::LinearOperatorMatrix(Eigen::MatrixXd matrix, bool symmetric)
    : matrix_(std::move(matrix)), symmetric_(symmetric), cache_(std::make_shared<Cache>()) {
    if (matrix_.rows() != matrix_.cols() || matrix_.rows() == 0) {
        fail(ErrorCode::InvalidArgument, "operator matrix must be square and non-empty");
    }
    if (!matrix_.allFinite()) fail(ErrorCode::InvalidInput, "operator matrix has non-finite entries");
    if (symmetric_) {
        const double scale = std::max(matrix_.cwiseAbs().maxCoeff(), 1e-300);
        const double asym = (matrix_ - matrix_.transpose()).cwiseAbs().maxCoeff();
        if (asym > 1e-12 * scale) {
            std::ostringstream msg;
            msg << "operator flagged symmetric deviates from its transpose by " << asym / scale << " (relative)";
            fail(ErrorCode::InvalidArgument, msg.str());
        }
    }
}

LinearOperatorMatrix::LinearOperatorMatrix(Eigen::MatrixXd matrix, SymmetricEigen eigen)
    : LinearOperatorMatrix(std::move(matrix), true) {
    if (eigen.values.size() != matrix_.rows() || eigen.vectors.rows() != matrix_.rows() ||
        eigen.vectors.cols() != matrix_.rows()) {
        fail(ErrorCode::InvalidArgument, "eigendecomposition does not match operator size");
    }
    std::call_once(cache_->once, [&] { cache_->eigen = std::move(eigen); });
}

const SymmetricEigen& LinearOperatorMatrix::eigen() const {
    if (!symmetric_) fail(ErrorCode::InvalidArgument, "eigendecomposition cache needs a symmetric operator");
    std::call_once(cache_->once, [this] {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(matrix_);
        if (es.info() != Eigen::Success) fail(ErrorCode::SolverError, "symmetric eigensolver did not converge");
        cache_->eigen = SymmetricEigen{es.eigenvalues(), es.eigenvectors()};
    });
    return *cache_->eigen;
}

bool LinearOperatorMatrix::is_positive() const {
    if (symmetric_) return eigen().values.minCoeff() > 0.0;
    Eigen::EigenSolver<Eigen::MatrixXd> es(matrix_, false);
    if (es.info() != Eigen::Success) return false;
    return es.eigenvalues().real().minCoeff() > 0.0;
}

GridFunction LinearOperatorMatrix::apply(const GridFunction& f) const {
    if (static_cast<Eigen::Index>(f.size()) != size()) fail(ErrorCode::InvalidArgument, "operator/grid size mismatch");
    return {f.grid(), Eigen::VectorXd(matrix_ * f.vector())};
}

double operator_sup_norm(const Eigen::MatrixXd& m) { return m.cwiseAbs().rowwise().sum().maxCoeff(); }

LinearOperatorMatrix dirichlet_laplacian(const Grid1D& grid) {
    const auto n = static_cast<Eigen::Index>(grid.size());
    const double ih2 = 1.0 / (grid.spacing() * grid.spacing());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        m(i, i) = 2.0 * ih2;
        if (i > 0) m(i, i - 1) = -ih2;
        if (i + 1 < n) m(i, i + 1) = -ih2;
    }
    return LinearOperatorMatrix(std::move(m), true);
}

LinearOperatorMatrix spectral_power(const LinearOperatorMatrix& A, double beta) {
    if (!A.is_symmetric()) fail(ErrorCode::NotPositiveOperator, "spectral power needs a symmetric operator");
    const auto& e = A.eigen();
    if (!(e.values.minCoeff() > 0.0)) {
        std::ostringstream msg;
        msg << "operator is not positive: smallest eigenvalue " << e.values.minCoeff();
        fail(ErrorCode::NotPositiveOperator, msg.str());
    }
    const Eigen::Index n = e.values.size();
    Eigen::VectorXd mapped = e.values.array().pow(beta).matrix();
    // Keep the cached spectrum ascending.
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return mapped(a) < mapped(b); });
    SymmetricEigen out{Eigen::VectorXd(n), Eigen::MatrixXd(n, n)};
    for (Eigen::Index k = 0; k < n; ++k) {
        out.values(k) = mapped(order[static_cast<std::size_t>(k)]);
        out.vectors.col(k) = e.vectors.col(order[static_cast<std::size_t>(k)]);
    }
    Eigen::MatrixXd m = e.vectors * mapped.asDiagonal() * e.vectors.transpose();
    m = 0.5 * (m + m.transpose()).eval();
    return LinearOperatorMatrix(std::move(m), std::move(out));
}

double ResolventQuadrature::scalar_probe(double lambda) const {
    double acc = 0.0;
    for (std::size_t j = 0; j < nodes.size(); ++j) acc += weights[j] / (lambda + nodes[j]);
    return acc + tail;
}

double ResolventQuadrature::scalar_probe_coarse(double lambda) const {
    double acc = 0.0;
    for (std::size_t j = 0; j < nodes.size(); j += 2) acc += 2.0 * weights[j] / (lambda + nodes[j]);
    return acc + tail_coarse;
}

ResolventQuadrature make_resolvent_quadrature(double alpha, double inverse_norm,
                                              const ResolventQuadratureOptions& options) {
    if (!kOrder01.contains(alpha)) fail(ErrorCode::InvalidOrder, "resolvent quadrature exponent must lie in (0,1)");
    if (!(inverse_norm > 0.0) || !std::isfinite(inverse_norm)) {
        fail(ErrorCode::InvalidArgument, "inverse norm bound must be positive and finite");
    }
    if (!(options.step > 0.0) || !(options.tolerance > 0.0)) {
        fail(ErrorCode::InvalidArgument, "quadrature step and tolerance must be positive");
    }
    // Tails relative to ||A^{-alpha}|| ~ inverse_norm^alpha:
    //   lower: e^{(1-alpha) t} N / (1 - alpha),  upper: e^{-alpha t} / alpha.
    const double log_n = std::log(inverse_norm);
    const double t_min = std::log(options.tolerance * (1.0 - alpha)) / (1.0 - alpha) - log_n;
    constexpr double kMaxLogShift = 690.0;
    const double t_max = std::min(-std::log(options.tolerance * alpha) / alpha - log_n, kMaxLogShift);
    const auto count = static_cast<std::size_t>(std::ceil((t_max - t_min) / options.step)) + 1;

    ResolventQuadrature q{alpha, options.step, t_min, t_min + options.step * static_cast<double>(count - 1), {}, {}};
    q.nodes.resize(count);
    q.weights.resize(count);
    const double pref = std::sin(alpha * std::numbers::pi) / std::numbers::pi;
    for (std::size_t j = 0; j < count; ++j) {
        const double t = t_min + options.step * static_cast<double>(j);
        q.nodes[j] = std::exp(t);
        q.weights[j] = options.step * pref * std::exp((1.0 - alpha) * t);
    }
    // Remaining nodes of the infinite trapezoid rule, where the integrand is
    // pref e^{-alpha t}: a geometric series.
    const double t_last = q.t_max;
    const double t_last_even = t_min + options.step * static_cast<double>((count - 1) / 2 * 2);
    auto geometric_tail = [&](double t_next, double h) {
        return pref * h * std::exp(-alpha * t_next) / -std::expm1(-alpha * h);
    };
    q.tail = geometric_tail(t_last + options.step, options.step);
    q.tail_coarse = geometric_tail(t_last_even + 2.0 * options.step, 2.0 * options.step);
    return q;
}

namespace {

double inverse_sup_norm(const Eigen::MatrixXd& m) {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
    return operator_sup_norm(lu.inverse());
}

Eigen::MatrixXd shifted_inverse(const LinearOperatorMatrix& A, double s) {
    const auto n = A.size();
    Eigen::MatrixXd shifted = A.matrix();
    shifted.diagonal().array() += s;
    if (A.is_symmetric()) {
        Eigen::LDLT<Eigen::MatrixXd> ldlt(shifted);
        if (ldlt.info() != Eigen::Success) fail(ErrorCode::SolverError, "shifted operator is singular");
        return ldlt.solve(Eigen::MatrixXd::Identity(n, n));
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(shifted);
    return lu.solve(Eigen::MatrixXd::Identity(n, n));
}

}  // namespace

LinearOperatorMatrix balakrishnan_negative_power(const LinearOperatorMatrix& A, FracOrder alpha,
                                                 const BalakrishnanOptions& options) {
    const double a = alpha.within(kOrder01).value();
    const auto quad = make_resolvent_quadrature(a, inverse_sup_norm(A.matrix()), options.quadrature);
    const auto n = A.size();
    Eigen::MatrixXd fine = quad.tail * Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd coarse = quad.tail_coarse * Eigen::MatrixXd::Identity(n, n);
    for (std::size_t j = 0; j < quad.nodes.size(); ++j) {
        const Eigen::MatrixXd r = shifted_inverse(A, quad.nodes[j]);
        fine.noalias() += quad.weights[j] * r;
        if (j % 2 == 0) coarse.noalias() += 2.0 * quad.weights[j] * r;
    }
    const double achieved = operator_sup_norm(fine - coarse) / operator_sup_norm(fine);
    if (!(achieved <= options.accuracy)) {
        std::ostringstream msg;
        msg << "resolvent quadrature error estimate " << achieved << " exceeds " << options.accuracy;
        throw AccuracyNotMet(msg.str(), achieved, options.accuracy);
    }
    if (A.is_symmetric()) {
        fine = 0.5 * (fine + fine.transpose()).eval();
        return LinearOperatorMatrix(std::move(fine), true);
    }
    return LinearOperatorMatrix(std::move(fine), false);
}

MatrixResolventOperator::MatrixResolventOperator(LinearOperatorMatrix A, Grid1D grid)
    : A_(std::move(A)), grid_(grid), inverse_norm_(inverse_sup_norm(A_.matrix())) {
    if (A_.size() != static_cast<Eigen::Index>(grid_.size())) {
        fail(ErrorCode::InvalidArgument, "operator/grid size mismatch");
    }
}

Eigen::VectorXd MatrixResolventOperator::apply_power(const GridFunction& f, int n) const {
    Eigen::VectorXd v = f.vector();
    for (int k = 0; k < n; ++k) v = A_.matrix() * v;
    return v;
}

Eigen::VectorXd MatrixResolventOperator::resolvent(double s, const Eigen::VectorXd& v) const {
    Eigen::MatrixXd shifted = A_.matrix();
    shifted.diagonal().array() += s;
    if (A_.is_symmetric()) return Eigen::LDLT<Eigen::MatrixXd>(shifted).solve(v);
    return Eigen::PartialPivLU<Eigen::MatrixXd>(shifted).solve(v);
}

namespace {

// (1 - e^{-z}) / z
double phi1(double z) { return z == 0.0 ? 1.0 : -std::expm1(-z) / z; }

// (1 - e^{-z}(1 + z)) / z^2 = sum_k (-1)^k (k + 1) z^k / (k + 2)!
double phi2(double z) {
    if (z < 0.5) {
        double term = 0.5;  // k = 0: 1 / 2!
        double acc = term;
        double fact = 2.0;
        double zk = 1.0;
        for (int k = 1; k < 20; ++k) {
            fact *= static_cast<double>(k + 2);
            zk *= -z;
            term = static_cast<double>(k + 1) * zk / fact;
            acc += term;
        }
        return acc;
    }
    return (1.0 - std::exp(-z) * (1.0 + z)) / (z * z);
}

double extrapolate_to_origin(std::span<const double> v) {
    if (v.size() >= 3) return 3.0 * v[0] - 3.0 * v[1] + v[2];
    return 2.0 * v[0] - v[1];
}

std::vector<double> exponential_cumulative(std::span<const double> g, double g0, double s, double h) {
    const double z = s * h;
    const double decay = std::exp(-z);
    const double e0 = h * phi1(z);
    const double e1 = h * phi2(z);
    const double w_prev = e1;       // weight of the left panel end
    const double w_curr = e0 - e1;  // weight of the right panel end
    std::vector<double> out(g.size());
    double acc = 0.0;
    double prev = g0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        acc = decay * acc + w_prev * prev + w_curr * g[i];
        out[i] = acc;
        prev = g[i];
    }
    return out;
}

}  // namespace

GridFunction ddx_resolvent(const GridFunction& f, double s, std::optional<double> left_value) {
    if (!(s >= 0.0) || !std::isfinite(s)) fail(ErrorCode::InvalidArgument, "resolvent shift must be nonnegative");
    const double g0 = left_value.value_or(extrapolate_to_origin(f.values()));
    return {f.grid(), exponential_cumulative(f.values(), g0, s, f.grid().spacing())};
}

Eigen::VectorXd finite_difference_derivative(const GridFunction& f, int order) {
    if (order < 0) fail(ErrorCode::InvalidArgument, "derivative order must be nonnegative");
    const double h = f.grid().spacing();
    std::vector<double> v(f.values().begin(), f.values().end());
    const std::size_t n = v.size();
    for (int k = 0; k < order; ++k) {
        if (n < 3) fail(ErrorCode::InvalidArgument, "finite differences need at least 3 nodes");
        std::vector<double> d(n);
        d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
        d[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h);
        for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (v[i + 1] - v[i - 1]) / (2.0 * h);
        v = std::move(d);
    }
    return Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(n));
}

DerivativeOperator::DerivativeOperator(Grid1D grid, std::optional<SmoothFunction> analytic)
    : grid_(grid), analytic_(std::move(analytic)) {}

Eigen::VectorXd DerivativeOperator::apply_power(const GridFunction& f, int n) const {
    if (!(f.grid() == grid_)) fail(ErrorCode::InvalidArgument, "function lives on a different grid");
    if (!analytic_) return finite_difference_derivative(f, n);
    Eigen::VectorXd out(static_cast<Eigen::Index>(grid_.size()));
    for (std::size_t i = 0; i < grid_.size(); ++i) out(static_cast<Eigen::Index>(i)) = (*analytic_)(grid_.node(i), n);
    return out;
}

Eigen::VectorXd DerivativeOperator::resolvent(double s, const Eigen::VectorXd& v) const {
    const std::span<const double> g(v.data(), static_cast<std::size_t>(v.size()));
    const auto out = exponential_cumulative(g, extrapolate_to_origin(g), s, grid_.spacing());
    return Eigen::Map<const Eigen::VectorXd>(out.data(), static_cast<Eigen::Index>(out.size()));
}

double DerivativeOperator::derivative_at_origin(const GridFunction& f, int n) const {
    if (analytic_) return (*analytic_)(0.0, n);
    const Eigen::VectorXd d = finite_difference_derivative(f, n);
    return extrapolate_to_origin(std::span<const double>(d.data(), static_cast<std::size_t>(d.size())));
}

void DerivativeOperator::check_domain(const GridFunction& f, int n, double tolerance) const {
    const double at_origin = derivative_at_origin(f, n);
    double scale = apply_power(f, n).cwiseAbs().maxCoeff();
    if (!(scale > 0.0)) scale = 1.0;
    if (std::abs(at_origin) > tolerance * scale) {
        std::ostringstream msg;
        msg << "f^(" << n << ")(0) = " << at_origin << " violates the domain condition f^(n)(0) = 0 of d/dx";
        fail(ErrorCode::DomainError, msg.str());
    }
}

Theorem2Report theorem2_check(const SmoothFunction& f, FracOrder alpha, int n, const Grid1D& grid,
                              double window_lo, double window_hi, const PositivePowerOptions& options) {
    const double a = alpha.value();
    const FracOrder order(a, OrderRange{static_cast<double>(n - 1), static_cast<double>(n), false});
    const auto samples = sample_function(grid, [&](double x) { return f(x, 0); });
    const DerivativeOperator op(grid, f);
    auto resolvent_route = positive_power_via_resolvent(op, a, n, samples, options);
    auto rl_route = rl_left(samples, order.within(kOrder02));
    const auto gap = window_gap(resolvent_route, rl_route, window_lo, window_hi);
    const auto quad = make_resolvent_quadrature(static_cast<double>(n) - a, op.inverse_norm_bound(), options.quadrature);
    return Theorem2Report{a,
                          n,
                          grid.size(),
                          window_lo,
                          window_hi,
                          gap.sup_gap,
                          gap.relative_sup_gap(),
                          quad.step,
                          quad.nodes.size(),
                          std::move(resolvent_route),
                          std::move(rl_route)};
}

ResolventBoundProbe resolvent_bound_probe(const LinearOperatorMatrix& A, const std::vector<double>& shifts) {
    ResolventBoundProbe probe{shifts, {}, 0.0};
    probe.scaled.reserve(shifts.size());
    for (double sigma : shifts) {
        if (!(sigma >= 0.0)) fail(ErrorCode::InvalidArgument, "probe shifts must be nonnegative");
        const double v = (1.0 + sigma) * operator_sup_norm(shifted_inverse(A, sigma));
        probe.scaled.push_back(v);
        probe.fitted_constant = std::max(probe.fitted_constant, v);
    }
    return probe;
}

}  // namespace fracops
