#include "fracops/levy.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include "fracops/frac_laplacian.hpp"

namespace fracops {

namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::uint64_t chunk_seed(std::uint64_t seed, std::size_t chunk) noexcept {
    return splitmix64(splitmix64(seed) ^ (0xD1B54A32D192ED03ull * (static_cast<std::uint64_t>(chunk) + 1)));
}

// Uniform on the open interval (0, 1) from the top 53 bits.
double open_uniform(std::mt19937_64& rng) noexcept {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

double draw_standard(std::mt19937_64& rng, double alpha) noexcept {
    const double v = std::numbers::pi * (open_uniform(rng) - 0.5);
    const double w = -std::log(open_uniform(rng));
    if (alpha == 1.0) return std::tan(v);
    return std::sin(alpha * v) / std::pow(std::cos(v), 1.0 / alpha) *
           std::pow(std::cos((1.0 - alpha) * v) / w, (1.0 - alpha) / alpha);
}

unsigned worker_count(const ParallelOptions& par, std::size_t chunks) {
    unsigned w = par.workers ? par.workers : std::max(1u, std::thread::hardware_concurrency());
    return static_cast<unsigned>(std::min<std::size_t>(w, std::max<std::size_t>(chunks, 1)));
}

// Runs body(chunk) for every chunk on a small pool; chunks are independent.
template <typename Body>
void for_each_chunk(std::size_t chunks, const ParallelOptions& par, Body body) {
    const unsigned workers = worker_count(par, chunks);
    if (workers <= 1) {
        for (std::size_t c = 0; c < chunks; ++c) body(c);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t) {
        pool.emplace_back([&] {
            for (std::size_t c = next++; c < chunks; c = next++) body(c);
        });
    }
}

void check_sampling_args(double t, std::size_t count) {
    if (!(t > 0.0) || !std::isfinite(t)) fail(ErrorCode::InvalidArgument, "time scale must be positive");
    if (count < 1) fail(ErrorCode::InvalidArgument, "sample count must be at least 1");
}

}  // namespace

StableSampler::StableSampler(double a, std::uint64_t s) : alpha(FracOrder(a, kOrder02).value()), seed(s) {}

std::vector<double> sample_stable(const StableSampler& sampler, double t, std::size_t count,
                                  const ParallelOptions& par) {
    check_sampling_args(t, count);
    const double scale = std::pow(t, 1.0 / sampler.alpha);
    std::vector<double> out(count);
    const std::size_t chunks = (count + kSampleChunk - 1) / kSampleChunk;
    for_each_chunk(chunks, par, [&](std::size_t c) {
        std::mt19937_64 rng(chunk_seed(sampler.seed, c));
        const std::size_t end = std::min(count, (c + 1) * kSampleChunk);
        for (std::size_t i = c * kSampleChunk; i < end; ++i) out[i] = scale * draw_standard(rng, sampler.alpha);
    });
    return out;
}

void MeanAccumulator::add(double x) noexcept {
    ++count;
    const double d = x - mean;
    mean += d / static_cast<double>(count);
    m2 += d * (x - mean);
}

void MeanAccumulator::merge(const MeanAccumulator& o) noexcept {
    if (o.count == 0) return;
    if (count == 0) {
        *this = o;
        return;
    }
    const double na = static_cast<double>(count), nb = static_cast<double>(o.count);
    const double d = o.mean - mean;
    const double n = na + nb;
    mean += d * nb / n;
    m2 += o.m2 + d * d * na * nb / n;
    count += o.count;
}

double MeanAccumulator::standard_error() const noexcept {
    return count > 1 ? std::sqrt(variance() / static_cast<double>(count)) : 0.0;
}

GeneratorEstimate generator_estimate(const std::function<double(double)>& f, double x, FracOrder alpha, double h,
                                     std::size_t count, std::uint64_t seed, const ParallelOptions& par) {
    const double a = alpha.within(kOrder02).value();
    check_sampling_args(h, count);
    const double fx = f(x);
    const double scale = std::pow(h, 1.0 / a);
    const std::size_t chunks = (count + kSampleChunk - 1) / kSampleChunk;
    std::vector<MeanAccumulator> parts(chunks);
    for_each_chunk(chunks, par, [&](std::size_t c) {
        std::mt19937_64 rng(chunk_seed(seed, c));
        const std::size_t end = std::min(count, (c + 1) * kSampleChunk);
        MeanAccumulator acc;
        for (std::size_t i = c * kSampleChunk; i < end; ++i) {
            acc.add((fx - f(x + scale * draw_standard(rng, a))) / h);
        }
        parts[c] = acc;
    });
    MeanAccumulator total;
    for (const auto& p : parts) total.merge(p);
    if (!std::isfinite(total.mean)) fail(ErrorCode::InvalidInput, "test function produced non-finite values");
    return {x, a, h, count, seed, total.mean, total.standard_error()};
}

double fourier_generator_reference(const std::function<double(double)>& f, double x, double alpha,
                                   double half_width, std::size_t nodes, std::size_t padding) {
    if (nodes % 2 == 0) fail(ErrorCode::InvalidArgument, "reference grid needs an odd node count");
    if (!(half_width > 0.0)) fail(ErrorCode::InvalidArgument, "reference half width must be positive");
    const Grid1D grid(2.0 * half_width, nodes);
    const auto samples = sample_function(grid, [&](double y) { return f(x - half_width + y); });
    const auto ev = flap_fourier(samples, FracOrder(alpha, kOrder02Closed), padding);
    return ev.result[nodes / 2];
}

ConvergenceStudy generator_convergence_study(const std::function<double(double)>& f, double x, FracOrder alpha,
                                             const std::vector<double>& h_ladder, std::size_t count,
                                             std::uint64_t seed, const ParallelOptions& par) {
    const std::vector<double> ladder = h_ladder.empty() ? std::vector<double>{1e-1, 1e-2, 1e-3} : h_ladder;
    ConvergenceStudy study{fourier_generator_reference(f, x, alpha.value()), {}};
    for (double h : ladder) {
        auto est = generator_estimate(f, x, alpha, h, count, seed, par);
        study.rows.push_back({est, std::abs(est.estimate - study.reference)});
    }
    return study;
}

}  // namespace fracops
