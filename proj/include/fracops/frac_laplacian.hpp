#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fracops/grid.hpp"

namespace fracops {

/// C_alpha = 2^alpha Gamma(1/2 + alpha/2) / (sqrt(pi) |Gamma(-alpha/2)|).
double c_alpha(FracOrder alpha);

enum class FlapMethod { PvIntegral, FourierSymbol };

/// Quadrature parameters of the principal-value evaluation.
///
/// The grid function is replaced by its not-a-knot cubic spline on
/// [0, l] (zero outside). The symmetrized integrand
/// 2 f(x) - f(x + r) - f(x - r) is split into
///   - the panel r in [0, cutoff]: the spline is C^2 there, so the integrand
///     is a_2 r^{1-alpha} + a_3 r^{2-alpha}, integrated in closed form;
///   - panels [k h, (k+1) h] out to the support edge, Gauss-Legendre with
///     `gauss_points` nodes each (smooth integrand on every panel);
///   - the far field, where only 2 f(x) r^{-1-alpha} survives, in closed form.
struct PvQuadrature {
    std::size_t gauss_points = 10;
};

struct FlapEvaluation {
    FlapMethod method;
    double alpha;
    GridFunction result;
    // pv-integral
    double cutoff_radius = 0.0;
    std::size_t gauss_points = 0;
    std::size_t panels = 0;
    // fourier-symbol
    std::size_t padding = 0;
    std::size_t box_size = 0;
};

/// (-Delta)^{alpha/2} f at every interior node by the principal-value
/// integral with zero exterior extension.
FlapEvaluation flap_integral(const GridFunction& f, FracOrder alpha, const PvQuadrature& quad = {});

/// (-Delta)^{alpha/2} f via the symbol |xi|^alpha on a zero-padded periodic
/// box of at least `padding` times the domain (rounded up to a power of two
/// samples). Approximates the whole-line operator; wrap-around decays with
/// the box size. padding < 2 is rejected.
FlapEvaluation flap_fourier(const GridFunction& f, FracOrder alpha, std::size_t padding);

/// Multiplies the periodic samples `box` (spacing box_length / size) by
/// |xi|^alpha in frequency space. alpha may be any value in (0, 2].
std::vector<double> apply_periodic_symbol(std::span<const double> box, double box_length, double alpha);

/// Cubic interpolant of the PV route: not-a-knot spline through (x_j, y_j), j = 0..n+1, with y_0 = y_{n+1} = 0.
struct ZeroExtendedSpline {
    double h;
    // Per interval j in [x_j, x_{j+1}]: y_j + b_j t + c_j t^2 + d_j t^3.
    std::vector<double> a, b, c, d;

    double operator()(double x) const noexcept;
};

ZeroExtendedSpline zero_extended_spline(const GridFunction& f);

struct DiscrepancyReport {
    double window_lo;
    double window_hi;
    std::size_t window_nodes;
    double sup_gap;
    double l2_gap;
    double reference_sup;  // sup of the flap values on the window
    double reference_l2;
    double relative_sup_gap() const noexcept { return reference_sup > 0 ? sup_gap / reference_sup : sup_gap; }
    double relative_l2_gap() const noexcept { return reference_l2 > 0 ? l2_gap / reference_l2 : l2_gap; }
};

/// Gap riesz(f) + flap_integral(f) on the interior window
/// [window_fraction l, (1 - window_fraction) l]. The identity
/// -(-Delta)^{alpha/2} f = riesz(f) makes the sum vanish.
DiscrepancyReport riesz_vs_flap(const GridFunction& f, FracOrder alpha, double window_fraction = 0.1);

/// Sup and discrete-L2 norms of a - b on the nodes in [lo, hi], with the
/// norms of b as reference.
DiscrepancyReport window_gap(const GridFunction& a, const GridFunction& b, double lo, double hi);

}  // namespace fracops
