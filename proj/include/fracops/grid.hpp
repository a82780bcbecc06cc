#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "fracops/errors.hpp"

namespace fracops {

/// Uniform grid on [0, l]. Only the interior nodes x_i = i*h, i = 1..n, are
/// unknowns; the boundary and the exterior carry the value zero.
class Grid1D {
public:
    Grid1D(double length, std::size_t n_interior);

    double length() const noexcept { return length_; }
    std::size_t size() const noexcept { return n_; }
    double spacing() const noexcept { return h_; }

    /// Interior node with zero-based index i, i.e. x = (i + 1) h.
    double node(std::size_t i) const noexcept { return static_cast<double>(i + 1) * h_; }
    std::vector<double> nodes() const;

    /// Distance of interior node i to the complement of (0, l).
    double boundary_distance(std::size_t i) const noexcept;

    bool operator==(const Grid1D& other) const noexcept {
        return n_ == other.n_ && length_ == other.length_;
    }

private:
    double length_;
    std::size_t n_;
    double h_;
};

Grid1D make_grid(double length, std::size_t n_interior);

/// Samples on the interior nodes of a grid. Reads outside the open
/// interval return 0 (zero extension).
class GridFunction {
public:
    explicit GridFunction(Grid1D grid);
    GridFunction(Grid1D grid, std::vector<double> values);
    GridFunction(Grid1D grid, const Eigen::VectorXd& values);

    const Grid1D& grid() const noexcept { return grid_; }
    std::size_t size() const noexcept { return values_.size(); }
    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }

    /// Piecewise-linear read with zero boundary and exterior values.
    double value_at(double x) const noexcept;

    Eigen::Map<const Eigen::VectorXd> vector() const noexcept {
        return {values_.data(), static_cast<Eigen::Index>(values_.size())};
    }

    GridFunction scaled(double c) const;
    friend GridFunction operator+(const GridFunction& a, const GridFunction& b);
    friend GridFunction operator-(const GridFunction& a, const GridFunction& b);

private:
    Grid1D grid_;
    std::vector<double> values_;
};

GridFunction sample_function(const Grid1D& grid, const std::function<double(double)>& f);

enum class NormKind { Sup, DiscreteL2 };

double norm(const GridFunction& f, NormKind kind);

/// Admissible interval for a fractional order. The lower end is always open;
/// the upper end may be closed for consumers that accept a classical limit.
struct OrderRange {
    double lo;
    double hi;
    bool hi_closed = false;

    bool contains(double alpha) const noexcept;
    std::string describe() const;
};

inline constexpr OrderRange kOrder02{0.0, 2.0, false};
inline constexpr OrderRange kOrder12{1.0, 2.0, false};
inline constexpr OrderRange kOrder01{0.0, 1.0, false};
inline constexpr OrderRange kOrder02Closed{0.0, 2.0, true};
inline constexpr OrderRange kOrder12Closed{1.0, 2.0, true};

/// A fractional order validated against the range its consumer needs.
class FracOrder {
public:
    FracOrder(double alpha, OrderRange range);

    double value() const noexcept { return alpha_; }
    const OrderRange& range() const noexcept { return range_; }

    /// Re-validates against a narrower range; throws InvalidOrder on failure.
    FracOrder within(OrderRange range) const { return {alpha_, range}; }

private:
    double alpha_;
    OrderRange range_;
};

}  // namespace fracops
