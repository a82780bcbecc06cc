#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "fracops/grid.hpp"

namespace fracops {

/// Symmetric alpha-stable law with characteristic function exp(-t |xi|^alpha).
struct StableSampler {
    StableSampler(double alpha, std::uint64_t seed);

    double alpha;
    std::uint64_t seed;
};

/// Draws are produced in fixed chunks, each from its own generator seeded
/// from (seed, chunk index). Results do not depend on the worker count.
inline constexpr std::size_t kSampleChunk = 1u << 16;

struct ParallelOptions {
    unsigned workers = 0;  // 0: hardware concurrency
};

/// count i.i.d. draws of X_t = t^{1/alpha} X_1 (Chambers-Mallows-Stuck).
std::vector<double> sample_stable(const StableSampler& sampler, double t, std::size_t count,
                                  const ParallelOptions& par = {});

/// Running mean and variance (Welford), mergeable.
struct MeanAccumulator {
    std::size_t count = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) noexcept;
    void merge(const MeanAccumulator& other) noexcept;
    double variance() const noexcept { return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0; }
    double standard_error() const noexcept;
};

struct GeneratorEstimate {
    double x;
    double alpha;
    double h;
    std::size_t count;
    std::uint64_t seed;
    double estimate;
    double standard_error;
};

/// Sample mean of (f(x) - f(x + X_h)) / h, which tends to (-Delta)^{alpha/2} f(x)
/// as h -> 0 with an O(h) bias. f must be defined on the whole line.
GeneratorEstimate generator_estimate(const std::function<double(double)>& f, double x, FracOrder alpha, double h,
                                     std::size_t count, std::uint64_t seed, const ParallelOptions& par = {});

/// (-Delta)^{alpha/2} f(x) on the whole line from the Fourier symbol: f is
/// sampled on [x - half_width, x + half_width] (assumed negligible beyond)
/// and evaluated at the centre node with flap_fourier.
double fourier_generator_reference(const std::function<double(double)>& f, double x, double alpha,
                                   double half_width = 10.0, std::size_t nodes = 1999, std::size_t padding = 16);

struct ConvergenceRow {
    GeneratorEstimate estimate;
    double distance;  // |estimate - reference|
};

struct ConvergenceStudy {
    double reference;
    std::vector<ConvergenceRow> rows;
};

/// generator_estimate across an h ladder (default {1e-1, 1e-2, 1e-3}) with
/// the same seed, tabulated against the Fourier reference.
ConvergenceStudy generator_convergence_study(const std::function<double(double)>& f, double x, FracOrder alpha,
                                             const std::vector<double>& h_ladder, std::size_t count,
                                             std::uint64_t seed, const ParallelOptions& par = {});

}  // namespace fracops
