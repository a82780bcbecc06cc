#include "fracops/frac_laplacian.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <numbers>

#include <unsupported/Eigen/FFT>

#include "fracops/frac_derivative.hpp"
#include "fracops/quadrature.hpp"

namespace fracops {

double c_alpha(FracOrder alpha) {
    const double a = alpha.within(kOrder02).value();
    const double z = a / 2.0;
    // |Gamma(-z)| = pi / (z sin(pi z) Gamma(z)) for z in (0, 1).
    const double abs_gamma_neg = std::numbers::pi / (z * std::sin(std::numbers::pi * z) * std::tgamma(z));
    return std::pow(2.0, a) * std::tgamma(0.5 + z) / (std::sqrt(std::numbers::pi) * abs_gamma_neg);
}

ZeroExtendedSpline zero_extended_spline(const GridFunction& f) {
    const std::size_t n = f.size();
    const double h = f.grid().spacing();
    std::vector<double> y(n + 2, 0.0);
    for (std::size_t i = 0; i < n; ++i) y[i + 1] = f[i];

    // Second derivatives M_0..M_{n+1}. Not-a-knot on a uniform grid means
    // M_0 = 2 M_1 - M_2, which reduces the first and last rows to h M = r.
    std::vector<double> m(n + 2, 0.0);
    auto rhs = [&](std::size_t i) { return (y[i + 1] - 2.0 * y[i] + y[i - 1]) / h; };
    m[1] = rhs(1) / h;
    m[n] = rhs(n) / h;
    if (n > 2) {
        // M_{i-1} + 4 M_i + M_{i+1} = 6 r_i / h for i = 2..n-1.
        const std::size_t k = n - 2;
        std::vector<double> cp(k), dp(k);
        for (std::size_t r = 0; r < k; ++r) {
            const std::size_t i = r + 2;
            double d = 6.0 * rhs(i) / h;
            if (i == 2) d -= m[1];
            if (i == n - 1) d -= m[n];
            const double denom = (r == 0) ? 4.0 : 4.0 - cp[r - 1];
            cp[r] = 1.0 / denom;
            dp[r] = ((r == 0) ? d : d - dp[r - 1]) / denom;
        }
        for (std::size_t r = k; r-- > 0;) {
            m[r + 2] = dp[r] - (r + 1 < k ? cp[r] * m[r + 3] : 0.0);
        }
    }
    m[0] = 2.0 * m[1] - m[2];
    m[n + 1] = 2.0 * m[n] - m[n - 1];

    ZeroExtendedSpline s{h, std::vector<double>(n + 1), std::vector<double>(n + 1), std::vector<double>(n + 1),
                         std::vector<double>(n + 1)};
    for (std::size_t j = 0; j <= n; ++j) {
        s.a[j] = y[j];
        s.b[j] = (y[j + 1] - y[j]) / h - h * (2.0 * m[j] + m[j + 1]) / 6.0;
        s.c[j] = m[j] / 2.0;
        s.d[j] = (m[j + 1] - m[j]) / (6.0 * h);
    }
    return s;
}

double ZeroExtendedSpline::operator()(double x) const noexcept {
    const double len = h * static_cast<double>(a.size());
    if (!(x > 0.0) || !(x < len)) return 0.0;
    auto j = static_cast<std::size_t>(x / h);
    if (j >= a.size()) j = a.size() - 1;
    const double t = x - static_cast<double>(j) * h;
    return a[j] + t * (b[j] + t * (c[j] + t * d[j]));
}

FlapEvaluation flap_integral(const GridFunction& f, FracOrder alpha, const PvQuadrature& quad) {
    const double a = alpha.within(kOrder02).value();
    const std::size_t n = f.size();
    const double h = f.grid().spacing();
    const auto s = zero_extended_spline(f);

    // Unit panel moments mu[k][m] = int_0^1 u^m (k + u)^{-1-alpha} du, k = 1..n.
    const auto gl = gauss_legendre(quad.gauss_points, 0.0, 1.0);
    std::vector<std::array<double, 4>> mu(n + 1);
    for (std::size_t k = 1; k <= n; ++k) {
        std::array<double, 4> acc{};
        for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
            const double u = gl.nodes[q];
            const double w = gl.weights[q] * std::pow(static_cast<double>(k) + u, -1.0 - a);
            acc[0] += w;
            acc[1] += w * u;
            acc[2] += w * u * u;
            acc[3] += w * u * u * u;
        }
        mu[k] = acc;
    }
    const std::array<double, 4> hm{std::pow(h, -a), std::pow(h, 1.0 - a), std::pow(h, 2.0 - a), std::pow(h, 3.0 - a)};

    const double ca = c_alpha(alpha);
    std::vector<double> out(n);
    for (std::size_t i = 1; i <= n; ++i) {
        const double yi = s.a[i];
        double acc = -2.0 * s.c[i] * hm[2] / (2.0 - a) - (s.d[i] - s.d[i - 1]) * hm[3] / (3.0 - a);
        acc += 2.0 * yi * hm[0] / a;
        // Right neighbours: interval j = i + k, local variable rho.
        for (std::size_t k = 1; i + k <= n; ++k) {
            const std::size_t j = i + k;
            const auto& w = mu[k];
            acc -= s.a[j] * hm[0] * w[0] + s.b[j] * hm[1] * w[1] + s.c[j] * hm[2] * w[2] + s.d[j] * hm[3] * w[3];
        }
        // Left neighbours: interval j = i - k - 1 traversed backwards.
        for (std::size_t k = 1; k + 1 <= i; ++k) {
            const std::size_t j = i - k - 1;
            const double A = s.a[j + 1];
            const double B = -(s.b[j] + 2.0 * s.c[j] * h + 3.0 * s.d[j] * h * h);
            const double C = s.c[j] + 3.0 * s.d[j] * h;
            const double D = -s.d[j];
            const auto& w = mu[k];
            acc -= A * hm[0] * w[0] + B * hm[1] * w[1] + C * hm[2] * w[2] + D * hm[3] * w[3];
        }
        out[i - 1] = ca * acc;
    }

    FlapEvaluation ev{FlapMethod::PvIntegral, a, GridFunction(f.grid(), std::move(out))};
    ev.cutoff_radius = h;
    ev.gauss_points = quad.gauss_points;
    ev.panels = n;
    return ev;
}

std::vector<double> apply_periodic_symbol(std::span<const double> box, double box_length, double alpha) {
    if (!kOrder02Closed.contains(alpha)) fail(ErrorCode::InvalidOrder, "symbol exponent must lie in (0,2]");
    const std::size_t N = box.size();
    std::vector<double> time(box.begin(), box.end());
    std::vector<std::complex<double>> freq;
    Eigen::FFT<double> fft;
    fft.fwd(freq, time);
    for (std::size_t k = 0; k < N; ++k) {
        const double kk = (k <= N / 2) ? static_cast<double>(k) : static_cast<double>(k) - static_cast<double>(N);
        const double xi = 2.0 * std::numbers::pi * kk / box_length;
        freq[k] *= std::pow(std::abs(xi), alpha);
    }
    std::vector<double> back;
    fft.inv(back, freq);
    return back;
}

FlapEvaluation flap_fourier(const GridFunction& f, FracOrder alpha, std::size_t padding) {
    const double a = alpha.within(kOrder02Closed).value();
    if (padding < 2) fail(ErrorCode::InvalidArgument, "padding factor must be at least 2");
    const std::size_t n = f.size();
    std::size_t N = 1;
    while (N < padding * (n + 1)) N <<= 1;
    std::vector<double> box(N, 0.0);
    for (std::size_t i = 0; i < n; ++i) box[i + 1] = f[i];
    const double L = static_cast<double>(N) * f.grid().spacing();
    const auto out = apply_periodic_symbol(box, L, a);
    std::vector<double> res(out.begin() + 1, out.begin() + 1 + static_cast<std::ptrdiff_t>(n));
    FlapEvaluation ev{FlapMethod::FourierSymbol, a, GridFunction(f.grid(), std::move(res))};
    ev.padding = padding;
    ev.box_size = N;
    return ev;
}

DiscrepancyReport window_gap(const GridFunction& a, const GridFunction& b, double lo, double hi) {
    if (!(a.grid() == b.grid())) fail(ErrorCode::InvalidArgument, "window_gap needs a common grid");
    DiscrepancyReport r{lo, hi, 0, 0.0, 0.0, 0.0, 0.0};
    const double h = a.grid().spacing();
    double s2 = 0.0, r2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double x = a.grid().node(i);
        if (x < lo || x > hi) continue;
        const double d = a[i] - b[i];
        r.sup_gap = std::max(r.sup_gap, std::abs(d));
        r.reference_sup = std::max(r.reference_sup, std::abs(b[i]));
        s2 += d * d;
        r2 += b[i] * b[i];
        ++r.window_nodes;
    }
    r.l2_gap = std::sqrt(h * s2);
    r.reference_l2 = std::sqrt(h * r2);
    return r;
}

DiscrepancyReport riesz_vs_flap(const GridFunction& f, FracOrder alpha, double window_fraction) {
    const FracOrder a = alpha.within(kOrder12);
    const auto rz = riesz(f, a);
    const auto neg_flap = flap_integral(f, a).result.scaled(-1.0);
    const double l = f.grid().length();
    return window_gap(rz, neg_flap, window_fraction * l, (1.0 - window_fraction) * l);
}

}  // namespace fracops
