#include "fracops/experiments/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>

#include "fracops/diffusion.hpp"
#include "fracops/frac_derivative.hpp"
#include "fracops/frac_laplacian.hpp"
#include "fracops/levy.hpp"
#include "fracops/operator_powers.hpp"
#include "fracops/spectral_analysis.hpp"

#ifndef FRACOPS_VERSION
#define FRACOPS_VERSION "unknown"
#endif

namespace fracops::experiments {

std::string version() { return FRACOPS_VERSION; }

std::filesystem::path default_output_root() {
    if (const char* env = std::getenv("FRACOPS_OUTPUT_ROOT"); env && *env) return env;
    return "results";
}

namespace {

constexpr std::uint64_t kDefaultLevySeed = 20240601;

const std::set<std::string> kCommonKeys{"experiment", "output", "seed"};

std::set<std::string> keys(std::initializer_list<std::string> extra) {
    std::set<std::string> out = kCommonKeys;
    out.insert(extra.begin(), extra.end());
    return out;
}

// ---- typed, validated parameters ------------------------------------------

double order(const ExperimentConfig& c, const std::string& key, double fallback, OrderRange range) {
    const double a = c.get_double(key, fallback);
    const bool in_base = (a > 0.0 && a < 2.0) || (a == 2.0 && range.hi_closed);
    if (!in_base) {
        std::ostringstream s;
        s << "fractional order " << a << " outside the admissible range " << kOrder02.describe();
        c.reject(key, s.str());
    }
    if (!range.contains(a)) {
        std::ostringstream s;
        s << "fractional order " << a << " outside the range " << range.describe() << " of experiment '"
          << c.experiment() << "'";
        c.reject(key, s.str());
    }
    return a;
}

std::vector<double> orders(const ExperimentConfig& c, const std::string& key, std::vector<double> fallback,
                           OrderRange range) {
    auto v = c.get_doubles(key, fallback);
    if (v.empty()) c.reject(key, "empty list");
    for (double a : v) {
        if (!range.contains(a)) {
            std::ostringstream s;
            s << "fractional order " << a << " outside the admissible range " << range.describe();
            c.reject(key, s.str());
        }
    }
    return v;
}

double positive(const ExperimentConfig& c, const std::string& key, double fallback) {
    const double v = c.get_double(key, fallback);
    if (!(v > 0.0) || !std::isfinite(v)) c.reject(key, "must be positive and finite");
    return v;
}

double nonnegative(const ExperimentConfig& c, const std::string& key, double fallback) {
    const double v = c.get_double(key, fallback);
    if (!(v >= 0.0) || !std::isfinite(v)) c.reject(key, "must be nonnegative and finite");
    return v;
}

std::size_t at_least(const ExperimentConfig& c, const std::string& key, std::size_t fallback, std::size_t lo) {
    const std::size_t v = c.get_size(key, fallback);
    if (v < lo) c.reject(key, "must be at least " + std::to_string(lo));
    return v;
}

std::vector<std::size_t> increasing_sizes(const ExperimentConfig& c, const std::string& key,
                                          std::vector<std::size_t> fallback, std::size_t lo) {
    auto v = c.get_sizes(key, fallback);
    if (v.empty()) c.reject(key, "empty list");
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] < lo) c.reject(key, "grid sizes must be at least " + std::to_string(lo));
        if (i > 0 && v[i] <= v[i - 1]) c.reject(key, "grid sizes must be strictly increasing");
    }
    return v;
}

std::string choice(const ExperimentConfig& c, const std::string& key, std::string fallback,
                   const std::set<std::string>& allowed) {
    auto v = c.get_string(key, fallback);
    if (!allowed.contains(v)) {
        std::string list;
        for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
        c.reject(key, "'" + v + "' is not one of {" + list + "}");
    }
    return v;
}

long long as_int(std::size_t v) { return static_cast<long long>(v); }

// ---- spectrum -------------------------------------------------------------

PreparedRun prepare_spectrum(const ExperimentConfig& c) {
    c.require_only(keys({"alpha", "l", "grids", "modes", "gap_ratio_max", "orthonormality_tol", "min_power_gap"}));
    const double alpha = order(c, "alpha", 1.5, kOrder12Closed);
    const double l = positive(c, "l", 1.0);
    const auto grids = increasing_sizes(c, "grids", {512, 1024, 2048}, 2);
    const std::size_t modes = at_least(c, "modes", 10, 1);
    if (modes > grids.front()) c.reject("modes", "exceeds the smallest grid size");
    const double ratio_max = positive(c, "gap_ratio_max", 3.0);
    const double orth_tol = positive(c, "orthonormality_tol", 1e-10);
    const double min_gap = nonnegative(c, "min_power_gap", 0.0);

    return [=](RunContext& ctx) {
        const auto r = compare_spectra(FracOrder(alpha, kOrder12Closed), l, grids, modes);
        CsvTable t{"spectrum", {"n", "numeric", "asymptotic", "frac_power", "gap", "scaled_gap"}, {}};
        for (std::size_t k = 0; k < r.modes(); ++k) {
            t.add({as_int(k + 1), r.numeric[k], r.asymptotic[k], r.frac_power[k], r.gaps[k], r.scaled_gaps[k]});
        }
        ctx.write(t);
        CsvTable g{"spectrum_grids", {"grid_n", "mode", "eigenvalue"}, {}};
        for (std::size_t i = 0; i < grids.size(); ++i) {
            for (std::size_t k = 0; k < r.modes(); ++k) g.add({as_int(grids[i]), as_int(k + 1), r.per_grid[i][k]});
        }
        ctx.write(g);
        ctx.check("positive_and_ordered", r.positive_and_ordered, r.numeric.front(), 0.0,
                  "0 < l1 < l2 <= ... on every grid and after extrapolation");
        ctx.check("frac_power_larger", r.frac_power_larger, r.frac_power.front() - r.numeric.front(), 0.0,
                  "(k pi/l)^alpha above the numeric and asymptotic values for every mode");
        ctx.check("scaled_gap_bounded", r.scaled_gap_ratio <= ratio_max, r.scaled_gap_ratio, ratio_max,
                  "max_k k|gap_k| relative to the k = 1 value");
        ctx.check("orthonormal_eigenvectors", r.orthonormality_error <= orth_tol, r.orthonormality_error, orth_tol);
        if (min_gap > 0.0) {
            const double gap = r.frac_power.front() - r.numeric.front();
            ctx.check("operators_differ", gap >= min_gap, gap, min_gap,
                      "(pi/l)^alpha minus the numeric lowest eigenvalue");
        }
        auto& s = ctx.summary();
        s["lambda1_numeric"] = r.numeric.front();
        s["lambda1_asymptotic"] = r.asymptotic.front();
        s["lambda1_frac_power"] = r.frac_power.front();
        s["analytic_gap_mode1"] = r.frac_power.front() - r.asymptotic.front();
        s["scaled_gap_ratio"] = r.scaled_gap_ratio;
    };
}

// ---- equivalence ----------------------------------------------------------

PreparedRun prepare_equivalence(const ExperimentConfig& c) {
    c.require_only(keys({"alphas", "l", "grids", "window", "rel_tol"}));
    const auto alphas = orders(c, "alphas", {1.25, 1.5, 1.75}, kOrder12);
    const double l = positive(c, "l", 1.0);
    const auto grids = increasing_sizes(c, "grids", {128, 256, 512, 1024}, 8);
    const double window = c.get_double("window", 0.1);
    if (!(window >= 0.0 && window < 0.5)) c.reject("window", "must lie in [0, 0.5)");
    const double tol = positive(c, "rel_tol", 1e-2);

    return [=](RunContext& ctx) {
        CsvTable t{"equivalence", {"alpha", "n", "relative_sup_gap", "relative_l2_gap", "sup_gap"}, {}};
        for (double a : alphas) {
            std::vector<double> gaps;
            for (std::size_t n : grids) {
                const Grid1D grid(l, n);
                const auto f = sample_function(grid, [l](double x) {
                    const double u = x / l;
                    return std::sin(std::numbers::pi * u) * u * (1.0 - u);
                });
                const auto rep = riesz_vs_flap(f, FracOrder(a, kOrder12), window);
                t.add({a, as_int(n), rep.relative_sup_gap(), rep.relative_l2_gap(), rep.sup_gap});
                gaps.push_back(rep.relative_sup_gap());
            }
            std::ostringstream an;
            an << "alpha=" << a;
            ctx.check("gap_within_tol[" + an.str() + "]", gaps.back() <= tol, gaps.back(), tol,
                      "relative sup gap on the finest grid");
            bool decreasing = true;
            double worst = 0.0;
            for (std::size_t i = 1; i < gaps.size(); ++i) {
                decreasing = decreasing && gaps[i] < gaps[i - 1];
                worst = std::max(worst, gaps[i] / gaps[i - 1]);
            }
            ctx.check("gap_decreasing[" + an.str() + "]", decreasing, worst, 1.0,
                      "largest ratio of successive gaps under refinement");
        }
        ctx.write(t);
    };
}

// ---- theorem2 -------------------------------------------------------------

SmoothFunction power_function(double p) {
    return [p](double x, int k) {
        double coef = 1.0;
        for (int j = 0; j < k; ++j) coef *= (p - j);
        if (coef == 0.0) return 0.0;
        return coef * std::pow(x, p - k);
    };
}

PreparedRun prepare_theorem2(const ExperimentConfig& c) {
    c.require_only(keys({"alpha", "power", "n", "l", "window_lo", "window_hi", "rel_tol", "quad_step",
                         "quad_tolerance"}));
    const double alpha = order(c, "alpha", 0.5, kOrder02);
    if (alpha == 1.0) c.reject("alpha", "integer orders are not fractional powers");
    const double p = nonnegative(c, "power", 2.0);
    const std::size_t n = at_least(c, "n", 4095, 8);
    const double l = positive(c, "l", 1.0);
    const double lo = nonnegative(c, "window_lo", 0.1);
    const double hi = positive(c, "window_hi", l);
    if (!(lo < hi)) c.reject("window_hi", "must exceed window_lo");
    const double tol = positive(c, "rel_tol", 1e-3);
    PositivePowerOptions opts;
    opts.quadrature.step = positive(c, "quad_step", 0.25);
    opts.quadrature.tolerance = positive(c, "quad_tolerance", 1e-10);
    const int n_int = static_cast<int>(std::ceil(alpha));
    const auto f = power_function(p);
    // Domain of (d/dx)^alpha: f^(n)(0) = 0.
    if (std::abs(f(0.0, n_int)) > 0.0) {
        std::ostringstream s;
        s << "f = x^" << p << " has f^(" << n_int << ")(0) = " << f(0.0, n_int)
          << ", outside the domain of (d/dx)^alpha (domain-error)";
        c.reject("power", s.str());
    }

    return [=](RunContext& ctx) {
        const Grid1D grid(l, n);
        const auto rep = theorem2_check(f, FracOrder(alpha, kOrder02), n_int, grid, lo, hi, opts);
        const double coef = std::tgamma(p + 1.0) / std::tgamma(p + 1.0 - alpha);
        std::vector<double> exact(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) exact[i] = coef * std::pow(grid.node(i), p - alpha);
        const GridFunction analytic(grid, exact);
        const auto vs_exact = window_gap(rep.resolvent_route, analytic, lo, hi);
        const auto rl_exact = window_gap(rep.rl_route, analytic, lo, hi);

        CsvTable t{"theorem2", {"x", "resolvent", "rl", "analytic"}, {}};
        const std::size_t stride = std::max<std::size_t>(1, grid.size() / 256);
        for (std::size_t i = 0; i < grid.size(); i += stride) {
            t.add({grid.node(i), rep.resolvent_route[i], rep.rl_route[i], exact[i]});
        }
        ctx.write(t);
        ctx.check("resolvent_vs_rl", rep.relative_sup_gap <= tol, rep.relative_sup_gap, tol,
                  "relative sup gap on the window");
        ctx.check("resolvent_vs_analytic", vs_exact.relative_sup_gap() <= tol, vs_exact.relative_sup_gap(), tol);
        ctx.check("rl_vs_analytic", rl_exact.relative_sup_gap() <= tol, rl_exact.relative_sup_gap(), tol);
        auto& s = ctx.summary();
        s["integer_part"] = n_int;
        s["quadrature_nodes"] = rep.quadrature_nodes;
        s["grid_size"] = rep.grid_size;
    };
}

// ---- powers ---------------------------------------------------------------

PreparedRun prepare_powers(const ExperimentConfig& c) {
    c.require_only(keys({"n", "l", "alphas", "gap_tol", "semigroup_tol", "integer_tol", "quad_step",
                         "quad_tolerance", "accuracy"}));
    const std::size_t n = at_least(c, "n", 64, 2);
    const double l = positive(c, "l", 1.0);
    const auto alphas = orders(c, "alphas", {0.25, 0.5, 0.75}, kOrder01);
    const double gap_tol = positive(c, "gap_tol", 1e-6);
    const double semi_tol = positive(c, "semigroup_tol", 1e-10);
    const double int_tol = positive(c, "integer_tol", 1e-10);
    BalakrishnanOptions opts;
    opts.quadrature.step = positive(c, "quad_step", 0.25);
    opts.quadrature.tolerance = positive(c, "quad_tolerance", 1e-12);
    opts.accuracy = positive(c, "accuracy", 1e-8);

    return [=](RunContext& ctx) {
        const Grid1D grid(l, n);
        const auto A = dirichlet_laplacian(grid);
        std::map<double, LinearOperatorMatrix> bal;
        CsvTable t{"powers", {"alpha", "sup_gap", "relative_sup_gap"}, {}};
        for (double a : alphas) {
            const auto B = balakrishnan_negative_power(A, FracOrder(a, kOrder01), opts);
            const auto S = spectral_power(A, -a);
            const double gap = operator_sup_norm(B.matrix() - S.matrix());
            t.add({a, gap, gap / operator_sup_norm(S.matrix())});
            std::ostringstream an;
            an << "alpha=" << a;
            ctx.check("balakrishnan_vs_spectral[" + an.str() + "]", gap <= gap_tol, gap, gap_tol,
                      "operator sup-norm gap");
            bal.emplace(a, B);
        }
        ctx.write(t);

        const Eigen::MatrixXd inverse = Eigen::PartialPivLU<Eigen::MatrixXd>(A.matrix()).inverse();
        const double inv_norm = operator_sup_norm(inverse);
        CsvTable sg{"powers_semigroup", {"alpha", "beta", "sum", "sup_gap", "relative_sup_gap", "reference"}, {}};
        for (std::size_t i = 0; i < alphas.size(); ++i) {
            for (std::size_t j = i; j < alphas.size(); ++j) {
                const double a = alphas[i], b = alphas[j], sum = a + b;
                const Eigen::MatrixXd prod = bal.at(a).matrix() * bal.at(b).matrix();
                Eigen::MatrixXd ref;
                std::string ref_name;
                if (std::abs(sum - 1.0) < 1e-12) {
                    ref = inverse;
                    ref_name = "direct-inverse";
                } else if (sum < 1.0) {
                    ref = balakrishnan_negative_power(A, FracOrder(sum, kOrder01), opts).matrix();
                    ref_name = "balakrishnan";
                } else {
                    ref = spectral_power(A, -sum).matrix();
                    ref_name = "spectral";
                }
                const double gap = operator_sup_norm(prod - ref);
                const double rel = gap / operator_sup_norm(ref);
                sg.add({a, b, sum, gap, rel, ref_name});
                std::ostringstream an;
                an << "alpha=" << a << ",beta=" << b;
                if (ref_name == "direct-inverse") {
                    ctx.check("integer_case[" + an.str() + "]", rel <= int_tol, rel, int_tol,
                              "relative sup gap of A^-a A^-b to the direct inverse");
                } else {
                    ctx.check("semigroup[" + an.str() + "]", rel <= semi_tol, rel, semi_tol, "relative sup gap");
                }
            }
        }
        ctx.write(sg);
        const double spec_int = operator_sup_norm(spectral_power(A, -1.0).matrix() - inverse) / inv_norm;
        ctx.check("integer_case[spectral]", spec_int <= int_tol, spec_int, int_tol,
                  "spectral A^-1 against the direct inverse, relative");
        const auto probe = resolvent_bound_probe(A, {0.0, 1.0, 10.0, 100.0, 1e3, 1e4, 1e5});
        ctx.summary()["resolvent_bound_M"] = probe.fitted_constant;
    };
}

// ---- levy -----------------------------------------------------------------

PreparedRun prepare_levy(const ExperimentConfig& c) {
    c.require_only(keys({"alpha", "x", "h", "count", "function", "workers", "rel_tol", "sigma_mult", "h_ladder",
                         "halving_check", "halving_tol"}));
    const double alpha = order(c, "alpha", 1.5, kOrder02);
    const double x = c.get_double("x", 0.0);
    if (!std::isfinite(x)) c.reject("x", "must be finite");
    const double h = positive(c, "h", 1e-3);
    const std::size_t count = at_least(c, "count", 1000000, 2);
    const std::string fn = choice(c, "function", "gaussian", {"gaussian", "constant", "linear"});
    if (fn == "linear" && !(alpha > 1.0)) c.reject("function", "linear f needs alpha in (1,2) for a finite mean");
    const unsigned workers = static_cast<unsigned>(c.get_size("workers", 0));
    const double rel_tol = positive(c, "rel_tol", 0.02);
    const double sigma_mult = positive(c, "sigma_mult", 3.0);
    const auto ladder = c.get_doubles("h_ladder", std::vector<double>{1e-1, 1e-2, 1e-3});
    for (double v : ladder) {
        if (!(v > 0.0)) c.reject("h_ladder", "entries must be positive");
    }
    const bool halving = c.get_bool("halving_check", true);
    const double halving_tol = positive(c, "halving_tol", 0.2);
    const std::uint64_t seed = c.get_seed("seed", kDefaultLevySeed);

    std::function<double(double)> f;
    if (fn == "gaussian") f = [](double y) { return std::exp(-y * y); };
    else if (fn == "constant") f = [](double) { return 1.0; };
    else f = [](double y) { return y; };

    return [=](RunContext& ctx) {
        const ParallelOptions par{workers};
        const FracOrder a(alpha, kOrder02);
        const double reference = fn == "gaussian" ? fourier_generator_reference(f, x, alpha) : 0.0;
        CsvTable t{"levy", {"h", "count", "estimate", "standard_error", "reference", "distance"}, {}};
        const auto main = generator_estimate(f, x, a, h, count, seed, par);
        t.add({h, as_int(count), main.estimate, main.standard_error, reference, std::abs(main.estimate - reference)});
        const double allowed = std::max(sigma_mult * main.standard_error, rel_tol * std::abs(reference));
        ctx.check("generator_matches_fourier", std::abs(main.estimate - reference) <= allowed,
                  std::abs(main.estimate - reference), allowed, "max(sigma_mult * se, rel_tol * |reference|)");
        if (halving) {
            const auto big = generator_estimate(f, x, a, h, 4 * count, seed, par);
            t.add({h, as_int(4 * count), big.estimate, big.standard_error, reference,
                   std::abs(big.estimate - reference)});
            if (main.standard_error > 0.0) {
                const double ratio = main.standard_error / big.standard_error;
                ctx.check("standard_error_halves", std::abs(ratio / 2.0 - 1.0) <= halving_tol, ratio, 2.0,
                          "se(count) / se(4 count), allowed relative deviation " + format_double(halving_tol));
            }
        }
        ctx.write(t);
        CsvTable s{"levy_convergence", {"h", "estimate", "standard_error", "reference", "distance"}, {}};
        for (double hh : ladder) {
            const auto e = generator_estimate(f, x, a, hh, count, seed, par);
            s.add({hh, e.estimate, e.standard_error, reference, std::abs(e.estimate - reference)});
        }
        ctx.write(s);
        ctx.summary()["reference"] = reference;
        ctx.summary()["estimate"] = main.estimate;
        ctx.summary()["standard_error"] = main.standard_error;
    };
}

// ---- solve ----------------------------------------------------------------

LinearOperatorMatrix build_operator(const std::string& kind, const Grid1D& grid, double alpha) {
    if (kind == "laplacian") return dirichlet_laplacian(grid);
    if (kind == "power") return spectral_power(dirichlet_laplacian(grid), alpha / 2.0);
    return assemble_flap_matrix(grid, FracOrder(alpha, kOrder12Closed));
}

PreparedRun prepare_solve_convergence(const ExperimentConfig& c) {
    c.require_only(keys({"mode", "operator", "alpha", "n", "l", "T", "dts", "initial_mode", "ratio_lo", "ratio_hi",
                         "trajectory"}));
    const std::string op = choice(c, "operator", "flap", {"flap", "laplacian", "power"});
    const double alpha = order(c, "alpha", 1.5, kOrder12Closed);
    const std::size_t n = at_least(c, "n", 256, 2);
    const double l = positive(c, "l", 1.0);
    const double T = positive(c, "T", 0.5);
    const auto dts = c.get_doubles("dts", std::vector<double>{1e-2, 5e-3, 2.5e-3});
    if (dts.size() < 2) c.reject("dts", "at least two time steps are needed for a ratio");
    for (std::size_t i = 0; i < dts.size(); ++i) {
        if (!(dts[i] > 0.0)) c.reject("dts", "time steps must be positive");
        if (i > 0 && !(dts[i] < dts[i - 1])) c.reject("dts", "time steps must be decreasing");
        const double steps = T / dts[i];
        if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps)) {
            c.reject("dts", "dt = " + format_double(dts[i]) + " does not divide T");
        }
    }
    const std::size_t mode = at_least(c, "initial_mode", 1, 1);
    if (mode > n) c.reject("initial_mode", "exceeds the grid size");
    const double lo = positive(c, "ratio_lo", 1.8);
    const double hi = positive(c, "ratio_hi", 2.2);
    if (!(lo < hi)) c.reject("ratio_hi", "must exceed ratio_lo");
    const bool traj = c.get_bool("trajectory", false);

    return [=](RunContext& ctx) {
        const Grid1D grid(l, n);
        const auto A = build_operator(op, grid, alpha);
        const auto& e = A.eigen();
        const GridFunction z0(grid, Eigen::VectorXd(e.vectors.col(static_cast<Eigen::Index>(mode - 1))));
        const auto exact = exact_spectral_solution(z0, A, T);
        const ActuatorProfile none(grid);
        CsvTable t{"solve", {"dt", "steps", "error", "ratio", "energy_non_increasing"}, {}};
        double prev = 0.0;
        bool all_energy = true;
        for (std::size_t i = 0; i < dts.size(); ++i) {
            const auto rec = solve(z0, A, none, T, dts[i], op);
            const double err = norm(rec.states.back() - exact, NormKind::DiscreteL2);
            const bool energy = rec.energy_non_increasing();
            all_energy = all_energy && energy;
            Cell ratio = std::string{};
            if (i > 0) {
                const double r = prev / err;
                ratio = r;
                ctx.check("first_order_ratio[dt=" + format_double(dts[i]) + "]", r >= lo && r <= hi, r, hi,
                          "error ratio per dt step, allowed [" + format_double(lo) + ", " + format_double(hi) + "]");
            }
            t.add({dts[i], as_int(rec.states.size() - 1), err, ratio, std::string(energy ? "true" : "false")});
            prev = err;
            if (traj && i + 1 == dts.size()) {
                std::ostringstream out;
                write_trajectory_csv(rec, out);
                ctx.write_text("trajectory.csv", out.str());
            }
        }
        ctx.check("energy_non_increasing", all_energy, all_energy ? 1.0 : 0.0, 1.0, "every step, every dt");
        ctx.write(t);
        ctx.summary()["lambda_initial_mode"] = e.values(static_cast<Eigen::Index>(mode - 1));
    };
}


PreparedRun prepare_solve_anomalous(const ExperimentConfig& c) {
    c.require_only(keys({"mode", "alphas", "n", "l", "T", "dt", "snapshots", "rate_tol"}));
    const auto alphas = orders(c, "alphas", {1.2, 1.5, 1.8, 2.0}, kOrder12Closed);
    for (std::size_t i = 1; i < alphas.size(); ++i) {
        if (!(alphas[i] > alphas[i - 1])) c.reject("alphas", "orders must be increasing");
    }
    const std::size_t n = at_least(c, "n", 255, 16);
    const double l = positive(c, "l", 1.0);
    const double T = positive(c, "T", 0.02);
    const double dt = positive(c, "dt", 2e-4);
    const double steps = T / dt;
    if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps)) c.reject("dt", "does not divide T");
    const std::size_t snapshots = at_least(c, "snapshots", 4, 2);
    if (static_cast<double>(snapshots) > std::round(steps)) c.reject("snapshots", "more snapshots than time steps");
    const double rate_tol = positive(c, "rate_tol", 0.02);

    return [=](RunContext& ctx) {
        const auto rep = anomalous_exponent_probe(alphas, Grid1D(l, n), T, dt, snapshots);
        CsvTable w{"anomalous_widths", {"alpha", "time", "iqr_width", "std_width", "mass"}, {}};
        CsvTable s{"anomalous_summary", {"alpha", "lambda1", "lambda1_asymptotic", "mode1_rate", "width_exponent"}, {}};
        bool exp_ordered = true, lambda_ordered = true;
        for (std::size_t i = 0; i < rep.results.size(); ++i) {
            const auto& r = rep.results[i];
            for (const auto& row : r.rows) w.add({r.alpha, row.time, row.iqr_width, row.std_width, row.mass});
            const double asym = asymptotic_eigenvalues(FracOrder(r.alpha, kOrder02Closed), l, 1).front();
            s.add({r.alpha, r.lambda1, asym, r.mode1_rate, r.width_exponent});
            if (i > 0) {
                exp_ordered = exp_ordered && r.width_exponent < rep.results[i - 1].width_exponent;
                lambda_ordered = lambda_ordered && r.lambda1 > rep.results[i - 1].lambda1;
            }
            if (r.alpha == 2.0) {
                const double heat = std::numbers::pi * std::numbers::pi / (l * l);
                const double rel = std::abs(r.mode1_rate - heat) / heat;
                ctx.check("classical_heat_decay", rel <= rate_tol, rel, rate_tol,
                          "mode-1 decay rate against (pi/l)^2, relative");
            }
        }
        ctx.write(w);
        ctx.write(s);
        ctx.check("spreading_exponent_decreasing_in_alpha", exp_ordered, rep.results.front().width_exponent,
                  rep.results.back().width_exponent, "interquartile width growth exponent, smallest vs largest alpha");
        ctx.check("lambda1_increasing_in_alpha", lambda_ordered, rep.results.front().lambda1,
                  rep.results.back().lambda1);
    };
}

PreparedRun prepare_solve(const ExperimentConfig& c) {
    const std::string mode = choice(c, "mode", "convergence", {"convergence", "anomalous"});
    return mode == "anomalous" ? prepare_solve_anomalous(c) : prepare_solve_convergence(c);
}

// ---- sobolev --------------------------------------------------------------

PreparedRun prepare_sobolev(const ExperimentConfig& c) {
    c.require_only(keys({"s", "p", "grids", "stability_tol", "decay_n", "decay_alpha_const", "decay_alpha_zero",
                         "decay_p", "slope_threshold"}));
    const double s = c.get_double("s", 0.25);
    if (!(s > 0.0 && s < 1.0)) c.reject("s", "must lie in (0,1)");
    const double p = c.get_double("p", 2.0);
    if (!(p >= 1.0)) c.reject("p", "must be at least 1");
    if (!(s * p < 2.0)) c.reject("p", "s*p must stay below 2");
    const auto grids = increasing_sizes(c, "grids", {100, 200, 400, 800, 1600}, 2);
    if (grids.size() < 2) c.reject("grids", "at least two grids are needed for a stability check");
    const double stab = positive(c, "stability_tol", 5e-4);
    const std::size_t decay_n = at_least(c, "decay_n", 1000, 40);
    const double a_const = order(c, "decay_alpha_const", 1.5, kOrder02Closed);
    const double a_zero = order(c, "decay_alpha_zero", 0.5, kOrder01);
    const double decay_p = c.get_double("decay_p", 2.0);
    if (!(decay_p >= 1.0)) c.reject("decay_p", "must be at least 1");
    const double threshold = positive(c, "slope_threshold", 0.25);

    return [=](RunContext& ctx) {
        CsvTable g{"gagliardo", {"n", "seminorm"}, {}};
        std::vector<double> vals;
        for (std::size_t n : grids) {
            const Grid1D grid(1.0, n);
            vals.push_back(gagliardo_seminorm(sample_function(grid, [](double x) { return x; }), s, p));
            g.add({as_int(n), vals.back()});
        }
        ctx.write(g);
        const double change = std::abs(vals.back() - vals[vals.size() - 2]) / vals.back();
        ctx.check("gagliardo_stable", change <= stab, change, stab, "relative change between the two finest grids");

        const Grid1D grid(1.0, decay_n);
        struct Case {
            std::string name;
            double alpha;
            std::function<double(double)> f;
            DecayTrend expected;
        };
        const std::vector<Case> cases{
            {"power_alpha", a_const, [a_const](double x) { return std::pow(x * (1.0 - x), a_const); },
             DecayTrend::ToConstant},
            {"quadratic", a_zero, [](double x) { return x * (1.0 - x); }, DecayTrend::ToZero},
        };
        CsvTable prof{"boundary_profile", {"case", "side", "distance", "ratio"}, {}};
        CsvTable sum{"boundary_summary",
                     {"case", "alpha", "side", "log_slope", "trend", "limit_estimate", "weighted_norm"},
                     {}};
        for (const auto& cs : cases) {
            const auto rep = boundary_decay_profile(sample_function(grid, cs.f), FracOrder(cs.alpha, kOrder02Closed),
                                                    decay_p, threshold);
            for (const auto* side : {&rep.left, &rep.right}) {
                const std::string name = side == &rep.left ? "left" : "right";
                for (std::size_t i = 0; i < side->distance.size(); ++i) {
                    prof.add({cs.name, name, side->distance[i], side->ratio[i]});
                }
                sum.add({cs.name, cs.alpha, name, side->log_slope, to_string(side->trend), side->limit_estimate,
                         rep.weighted_norm});
            }
            const bool ok = rep.left.trend == cs.expected && rep.right.trend == cs.expected &&
                            (cs.expected != DecayTrend::ToConstant ||
                             (rep.left.limit_estimate > 0.0 && rep.right.limit_estimate > 0.0)) &&
                            std::isfinite(rep.weighted_norm);
            ctx.check("boundary_trend[" + cs.name + "]", ok, rep.left.log_slope, threshold,
                      "expected " + to_string(cs.expected) + ", got " + to_string(rep.left.trend) + "/" +
                          to_string(rep.right.trend));
        }
        ctx.write(prof);
        ctx.write(sum);
    };
}

// ---- registry -------------------------------------------------------------

struct Entry {
    ExperimentInfo info;
    PreparedRun (*prepare)(const ExperimentConfig&);
};

const std::vector<Entry>& registry() {
    static const std::vector<Entry> r{
        {{"spectrum", "flap-matrix eigenvalues vs the asymptotic formula and the fractional-power spectrum"},
         prepare_spectrum},
        {{"equivalence", "Riesz GL derivative against minus the PV fractional Laplacian"}, prepare_equivalence},
        {{"theorem2", "(d/dx)^alpha via resolvents against the Riemann-Liouville derivative"}, prepare_theorem2},
        {{"powers", "Balakrishnan negative powers against spectral powers, semigroup law"}, prepare_powers},
        {{"levy", "Monte Carlo generator of the symmetric stable process against the Fourier symbol"}, prepare_levy},
        {{"solve", "implicit-Euler diffusion: dt-convergence or anomalous spreading"}, prepare_solve},
        {{"sobolev", "Gagliardo seminorm refinement and boundary-decay profiles"}, prepare_sobolev},
    };
    return r;
}

}  // namespace

const std::vector<ExperimentInfo>& list_experiments() {
    static const std::vector<ExperimentInfo> out = [] {
        std::vector<ExperimentInfo> v;
        for (const auto& e : registry()) v.push_back(e.info);
        return v;
    }();
    return out;
}

PreparedRun validate(const ExperimentConfig& config) {
    for (const auto& e : registry()) {
        if (e.info.name == config.experiment()) {
            // Validation errors from module types are reported as config errors.
            try {
                return e.prepare(config);
            } catch (const Error& err) {
                if (err.code() == ErrorCode::ConfigParse) throw;
                fail(ErrorCode::ConfigParse, config.source() + ": " + err.what());
            }
        }
    }
    std::string names;
    for (const auto& e : registry()) names += (names.empty() ? "" : ", ") + e.info.name;
    config.reject("experiment", "unknown experiment '" + config.experiment() + "' (known: " + names + ")");
}

std::filesystem::path output_dir_for(const ExperimentConfig& config, const RunOptions& options) {
    std::string rel;
    if (config.has("output")) {
        rel = config.get_string("output");
    } else {
        const std::filesystem::path src(config.source());
        rel = src.has_stem() && config.source().front() != '<' ? src.stem().string() : config.experiment();
    }
    const std::filesystem::path p(rel);
    if (p.is_absolute() || p.has_root_name()) config.reject("output", "must be a relative path");
    for (const auto& part : p) {
        if (part == "..") config.reject("output", "must not contain '..'");
    }
    return options.output_root / p;
}

ExperimentReport run(const ExperimentConfig& config, const RunOptions& options) {
    const PreparedRun prepared = validate(config);
    ExperimentReport report;
    report.experiment = config.experiment();
    report.config_source = config.source();
    report.config_echo = config.entries();
    report.output_dir = output_dir_for(config, options);
    report.version = version();
    if (config.has("seed")) report.seed = config.get_seed("seed");
    else if (report.experiment == "levy") report.seed = kDefaultLevySeed;

    std::error_code ec;
    std::filesystem::create_directories(report.output_dir, ec);
    if (ec) fail(ErrorCode::Io, "cannot create " + report.output_dir.string() + ": " + ec.message());

    RunContext ctx(report);
    const auto t0 = std::chrono::steady_clock::now();
    try {
        prepared(ctx);
    } catch (const Error& err) {
        ctx.check("completed", false, 0.0, 0.0, std::string(to_string(err.code())) + ": " + err.what());
    }
    report.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::ofstream out(report.output_dir / "report.json", std::ios::binary);
    if (!out) fail(ErrorCode::Io, "cannot write report in " + report.output_dir.string());
    out << report.to_json().dump(2) << '\n';
    return report;
}

int SuiteSummary::exit_code() const noexcept {
    int code = 0;
    for (const auto& e : entries) code = std::max(code, static_cast<int>(e.status));
    return code;
}

nlohmann::ordered_json SuiteSummary::to_json() const {
    nlohmann::ordered_json j;
    j["directory"] = directory.string();
    j["version"] = version();
    j["warnings"] = warnings;
    auto& arr = j["configs"] = nlohmann::ordered_json::array();
    for (const auto& e : entries) {
        const char* status = e.status == RunStatus::Passed ? "pass" : e.status == RunStatus::Failed ? "fail" : "config-error";
        arr.push_back({{"config", e.config.string()},
                       {"experiment", e.experiment},
                       {"status", status},
                       {"message", e.message},
                       {"seconds", e.seconds}});
    }
    j["exit_code"] = exit_code();
    return j;
}

SuiteSummary run_all(const std::filesystem::path& directory, const RunOptions& options, unsigned jobs) {
    if (!std::filesystem::is_directory(directory)) fail(ErrorCode::Io, "suite directory not found: " + directory.string());
    SuiteSummary summary{directory, {}, {}};
    std::vector<std::filesystem::path> configs;
    for (const auto& entry : std::filesystem::directory_iterator(directory)) {
        if (entry.is_regular_file() && entry.path().extension() == ".cfg") configs.push_back(entry.path());
    }
    std::sort(configs.begin(), configs.end());
    if (configs.empty()) summary.warnings.push_back("no *.cfg files in " + directory.string());

    summary.entries.resize(configs.size());
    auto run_one = [&](std::size_t i) {
        SuiteEntry e{configs[i], "", RunStatus::Passed, "", 0.0};
        const auto t0 = std::chrono::steady_clock::now();
        try {
            const auto cfg = ExperimentConfig::load(configs[i]);
            e.experiment = cfg.experiment();
            const auto rep = run(cfg, options);
            if (!rep.passed()) {
                e.status = RunStatus::Failed;
                for (const auto& a : rep.assertions) {
                    if (!a.passed) e.message += (e.message.empty() ? "" : "; ") + a.name;
                }
            }
        } catch (const Error& err) {
            e.status = err.code() == ErrorCode::ConfigParse || err.code() == ErrorCode::Io ? RunStatus::ConfigError
                                                                                            : RunStatus::Failed;
            e.message = err.what();
        }
        e.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        summary.entries[i] = std::move(e);
    };
    const unsigned workers = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(configs.size())));
    if (workers <= 1) {
        for (std::size_t i = 0; i < configs.size(); ++i) run_one(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < workers; ++t) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < configs.size(); i = next++) run_one(i);
            });
        }
    }
    return summary;
}

}  // namespace fracops::experiments
