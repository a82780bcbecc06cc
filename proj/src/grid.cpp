#include "fracops/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fracops {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument: return "invalid-argument";
        case ErrorCode::InvalidInput: return "invalid-input";
        case ErrorCode::InvalidOrder: return "invalid-order";
        case ErrorCode::NotPositiveOperator: return "not-positive-operator";
        case ErrorCode::AccuracyNotMet: return "accuracy-not-met";
        case ErrorCode::DomainError: return "domain-error";
        case ErrorCode::SolverError: return "solver-error";
        case ErrorCode::ConfigParse: return "config-parse-error";
        case ErrorCode::Io: return "io-error";
    }
    return "unknown";
}

Grid1D::Grid1D(double length, std::size_t n_interior)
    : length_(length), n_(n_interior), h_(0.0) {
    if (!(length > 0.0) || !std::isfinite(length)) {
        fail(ErrorCode::InvalidArgument, "grid length must be positive and finite");
    }
    if (n_interior < 2) {
        fail(ErrorCode::InvalidArgument, "grid needs at least 2 interior nodes");
    }
    h_ = length / static_cast<double>(n_interior + 1);
}

std::vector<double> Grid1D::nodes() const {
    std::vector<double> x(n_);
    for (std::size_t i = 0; i < n_; ++i) x[i] = node(i);
    return x;
}

double Grid1D::boundary_distance(std::size_t i) const noexcept {
    // Count in nodes first so the value is exact in h.
    const std::size_t left = i + 1;
    const std::size_t right = n_ - i;
    return static_cast<double>(std::min(left, right)) * h_;
}

Grid1D make_grid(double length, std::size_t n_interior) { return Grid1D(length, n_interior); }

GridFunction::GridFunction(Grid1D grid) : grid_(grid), values_(grid.size(), 0.0) {}

GridFunction::GridFunction(Grid1D grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) {
        fail(ErrorCode::InvalidArgument, "grid function size does not match grid");
    }
    for (double v : values_) {
        if (!std::isfinite(v)) fail(ErrorCode::InvalidInput, "grid function value is not finite");
    }
}

GridFunction::GridFunction(Grid1D grid, const Eigen::VectorXd& values)
    : GridFunction(grid, std::vector<double>(values.data(), values.data() + values.size())) {}

double GridFunction::value_at(double x) const noexcept {
    const double h = grid_.spacing();
    if (!(x > 0.0) || !(x < grid_.length())) return 0.0;
    const double s = x / h;
    const auto j = static_cast<std::size_t>(std::floor(s));
    const double t = s - static_cast<double>(j);
    // Global node j has interior index j - 1; node 0 and node n+1 are zero.
    auto at = [&](std::size_t global) {
        if (global == 0 || global > values_.size()) return 0.0;
        return values_[global - 1];
    };
    return (1.0 - t) * at(j) + t * at(j + 1);
}

GridFunction GridFunction::scaled(double c) const {
    std::vector<double> v(values_);
    for (double& x : v) x *= c;
    return {grid_, std::move(v)};
}

namespace {
void require_same_grid(const GridFunction& a, const GridFunction& b) {
    if (!(a.grid() == b.grid())) fail(ErrorCode::InvalidArgument, "grid functions live on different grids");
}
}  // namespace

GridFunction operator+(const GridFunction& a, const GridFunction& b) {
    require_same_grid(a, b);
    std::vector<double> v(a.values_);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += b.values_[i];
    return {a.grid_, std::move(v)};
}

GridFunction operator-(const GridFunction& a, const GridFunction& b) {
    require_same_grid(a, b);
    std::vector<double> v(a.values_);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] -= b.values_[i];
    return {a.grid_, std::move(v)};
}

GridFunction sample_function(const Grid1D& grid, const std::function<double(double)>& f) {
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        v[i] = f(grid.node(i));
        if (!std::isfinite(v[i])) {
            std::ostringstream msg;
            msg << "sampled value at x = " << grid.node(i) << " is not finite";
            fail(ErrorCode::InvalidInput, msg.str());
        }
    }
    return {grid, std::move(v)};
}

double norm(const GridFunction& f, NormKind kind) {
    const auto v = f.values();
    switch (kind) {
        case NormKind::Sup: {
            double m = 0.0;
            for (double x : v) m = std::max(m, std::abs(x));
            return m;
        }
        case NormKind::DiscreteL2: {
            double s = 0.0;
            for (double x : v) s += x * x;
            return std::sqrt(f.grid().spacing() * s);
        }
    }
    return 0.0;
}

bool OrderRange::contains(double alpha) const noexcept {
    if (!std::isfinite(alpha)) return false;
    return alpha > lo && (hi_closed ? alpha <= hi : alpha < hi);
}

std::string OrderRange::describe() const {
    std::ostringstream s;
    s << '(' << lo << ',' << hi << (hi_closed ? ']' : ')');
    return s.str();
}

FracOrder::FracOrder(double alpha, OrderRange range) : alpha_(alpha), range_(range) {
    if (!range.contains(alpha)) {
        std::ostringstream msg;
        msg << "fractional order " << alpha << " outside admissible range " << range.describe();
        fail(ErrorCode::InvalidOrder, msg.str());
    }
}

}  // namespace fracops
