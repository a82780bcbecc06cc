// Acceptance suite. Runs the shipped configs once, re-reads the CSV tables
// they wrote and judges every criterion against the tolerances below, then
// reruns the whole suite to check byte-identical output.
//
// Prints one PASS/FAIL line per criterion; exits 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "fracops/errors.hpp"
#include "fracops/experiments/experiments.hpp"

#ifndef FRACOPS_ACCEPTANCE_CONFIGS
#error "FRACOPS_ACCEPTANCE_CONFIGS must point at the shipped acceptance configs"
#endif

namespace fs = std::filesystem;
namespace fx = fracops::experiments;

namespace {

// ---- tolerances -----------------------------------------------------------

constexpr double kScaledGapRatioMax = 3.0;
constexpr double kPowerGapMin = 0.8;
constexpr double kEquivalenceTol = 1e-2;
constexpr double kTheorem2Tol = 1e-3;
constexpr double kBalakrishnanTol = 1e-6;
constexpr double kSemigroupTol = 1e-10;
constexpr double kIntegerTol = 1e-10;
constexpr double kLevySigmas = 3.0;
constexpr double kLevyRelTol = 0.02;
constexpr double kHalvingTol = 0.2;
constexpr double kRatioLo = 1.8;
constexpr double kRatioHi = 2.2;

// Runtime budgets in seconds.
constexpr double kBudgetSpectrum = 120.0;
constexpr double kBudgetPowerGap = 60.0;
constexpr double kBudgetEquivalence = 120.0;
constexpr double kBudgetTheorem2 = 60.0;
constexpr double kBudgetPowers = 30.0;
constexpr double kBudgetLevy = 120.0;
constexpr double kBudgetSolve = 60.0;
constexpr double kBudgetSobolev = 30.0;
constexpr double kBudgetSuite = 600.0;

// ---- CSV access -----------------------------------------------------------

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t col(const std::string& name) const {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw std::runtime_error("missing column " + name);
        return static_cast<std::size_t>(it - header.begin());
    }
    double num(std::size_t row, const std::string& name) const { return std::stod(rows.at(row).at(col(name))); }
    const std::string& str(std::size_t row, const std::string& name) const { return rows.at(row).at(col(name)); }
};

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

Table read_table(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    Table t;
    std::string line;
    std::getline(in, line);
    t.header = split(line);
    while (std::getline(in, line)) {
        if (!line.empty()) t.rows.push_back(split(line));
    }
    return t;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// ---- bookkeeping ----------------------------------------------------------

struct Verdict {
    bool ok = true;
    std::ostringstream note;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            note << " [fail: " << what << "]";
        }
    }
};

int failures = 0;

void report(int id, const std::string& title, Verdict& v) {
    std::printf("%s criterion %d: %s%s\n", v.ok ? "PASS" : "FAIL", id, title.c_str(), v.note.str().c_str());
    std::fflush(stdout);
    failures += !v.ok;
}

struct Run {
    fx::ExperimentReport report;
    fs::path dir;
};

std::map<std::string, Run> run_suite(const fs::path& root, double& seconds) {
    std::map<std::string, Run> out;
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<fs::path> cfgs;
    for (const auto& e : fs::directory_iterator(FRACOPS_ACCEPTANCE_CONFIGS)) {
        if (e.path().extension() == ".cfg") cfgs.push_back(e.path());
    }
    std::sort(cfgs.begin(), cfgs.end());
    fx::RunOptions opts;
    opts.output_root = root;
    for (const auto& p : cfgs) {
        auto rep = fx::run(fx::ExperimentConfig::load(p), opts);
        const auto dir = rep.output_dir;
        out.emplace(p.stem().string(), Run{std::move(rep), dir});
    }
    seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

const Run& get(const std::map<std::string, Run>& runs, const std::string& stem) {
    const auto it = runs.find(stem);
    if (it == runs.end()) throw std::runtime_error("shipped config " + stem + ".cfg not found");
    return it->second;
}

// Two-grid fit lambda(h) = c0 + c1 h from the two coarsest grids.
std::vector<double> two_grid_extrapolation(const Table& grids, std::size_t modes) {
    std::map<long, std::vector<double>> per;
    for (std::size_t r = 0; r < grids.rows.size(); ++r) {
        per[static_cast<long>(grids.num(r, "grid_n"))].push_back(grids.num(r, "eigenvalue"));
    }
    auto it = per.begin();
    const double n1 = static_cast<double>(it->first);
    const auto& a = it->second;
    ++it;
    const double n2 = static_cast<double>(it->first);
    const auto& b = it->second;
    std::vector<double> out;
    for (std::size_t k = 0; k < modes; ++k) out.push_back((n2 * b[k] - n1 * a[k]) / (n2 - n1));
    return out;
}

double asymptotic(double alpha, int k) {
    const double pi = std::numbers::pi;
    return std::pow(k * pi - (2.0 - alpha) * pi / 4.0, alpha);
}

// ---- criteria -------------------------------------------------------------

void criterion1(const std::map<std::string, Run>& runs) {
    Verdict v;
    for (const auto& [stem, alpha] : std::vector<std::pair<std::string, double>>{
             {"spectrum_alpha12", 1.2}, {"spectrum_alpha15", 1.5}, {"spectrum_alpha18", 1.8}}) {
        const auto& r = get(runs, stem);
        const auto t = read_table(r.dir / "spectrum.csv");
        const auto g = read_table(r.dir / "spectrum_grids.csv");
        const std::size_t modes = t.rows.size();
        v.require(modes == 10, stem + " reports 10 modes");
        double worst = 0.0, first = 0.0;
        bool ordered = t.num(0, "numeric") > 0.0;
        for (std::size_t k = 0; k < modes; ++k) {
            const double lam = t.num(k, "numeric");
            const double sg = static_cast<double>(k + 1) * std::abs(lam - asymptotic(alpha, static_cast<int>(k + 1)));
            if (k == 0) first = sg;
            worst = std::max(worst, sg);
            if (k == 1) ordered = ordered && lam > t.num(0, "numeric");
            if (k > 1) ordered = ordered && lam >= t.num(k - 1, "numeric");
        }
        // Ordering must also hold on every raw grid.
        for (std::size_t row = 1; row < g.rows.size(); ++row) {
            if (g.num(row, "grid_n") != g.num(row - 1, "grid_n")) continue;
            const double prev = g.num(row - 1, "eigenvalue"), cur = g.num(row, "eigenvalue");
            ordered = ordered && (g.num(row, "mode") == 2.0 ? cur > prev : cur >= prev) && prev > 0.0;
        }
        const double ratio = worst / first;
        const auto two = two_grid_extrapolation(g, modes);
        double w2 = 0.0, f2 = 0.0;
        for (std::size_t k = 0; k < two.size(); ++k) {
            const double sg = static_cast<double>(k + 1) * std::abs(two[k] - asymptotic(alpha, static_cast<int>(k + 1)));
            if (k == 0) f2 = sg;
            w2 = std::max(w2, sg);
        }
        v.note << " a=" << alpha << ": ratio=" << ratio << " (two-grid " << w2 / f2 << "), "
               << r.report.wall_clock_seconds << "s;";
        v.require(ratio <= kScaledGapRatioMax, stem + " max_k k|gap_k| within 3x of k=1");
        v.require(ordered, stem + " 0 < l1 < l2 <= ...");
        v.require(r.report.wall_clock_seconds <= kBudgetSpectrum, stem + " runtime");
    }
    report(1, "spectrum against the asymptotic formula", v);
}

void criterion2(const std::map<std::string, Run>& runs) {
    Verdict v;
    const auto& r = get(runs, "spectrum_alpha15");
    const auto t = read_table(r.dir / "spectrum.csv");
    const double power = std::pow(std::numbers::pi, 1.5);
    const double gap = power - t.num(0, "numeric");
    const double analytic = power - asymptotic(1.5, 1);
    v.note << " pi^1.5=" << power << " l1=" << t.num(0, "numeric") << " gap=" << gap << " analytic=" << analytic;
    v.require(gap >= kPowerGapMin, "gap >= 0.8");
    v.require(r.report.wall_clock_seconds <= kBudgetPowerGap, "runtime");
    report(2, "fractional power exceeds the fractional Laplacian", v);
}

void criterion3(const std::map<std::string, Run>& runs) {
    Verdict v;
    const auto& r = get(runs, "equivalence");
    const auto t = read_table(r.dir / "equivalence.csv");
    std::map<double, std::vector<std::pair<double, double>>> by_alpha;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        by_alpha[t.num(i, "alpha")].push_back({t.num(i, "n"), t.num(i, "relative_sup_gap")});
    }
    for (double a : {1.25, 1.5, 1.75}) {
        const auto it = by_alpha.find(a);
        if (it == by_alpha.end()) {
            v.require(false, "alpha rows present");
            continue;
        }
        const auto& rows = it->second;
        bool at1024 = false, decreasing = true;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].first == 1024.0) {
                at1024 = true;
                v.note << " a=" << a << ": " << rows[i].second << ";";
                v.require(rows[i].second <= kEquivalenceTol, "gap <= 1e-2 at n=1024");
            }
            if (i > 0) decreasing = decreasing && rows[i].second < rows[i - 1].second && rows[i].first == 2 * rows[i - 1].first;
        }
        v.require(at1024, "n=1024 present");
        v.require(decreasing, "gap decreasing under halving");
    }
    v.require(r.report.wall_clock_seconds <= kBudgetEquivalence, "runtime");
    report(3, "riesz equals minus the integral fractional Laplacian", v);
}

void criterion4(const std::map<std::string, Run>& runs) {
    Verdict v;
    const auto& r = get(runs, "theorem2");
    const auto t = read_table(r.dir / "theorem2.csv");
    double d_res_rl = 0.0, d_res_ex = 0.0, d_rl_ex = 0.0, m_rl = 0.0, m_ex = 0.0;
    std::size_t used = 0;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const double x = t.num(i, "x");
        if (x < 0.1 || x > 1.0) continue;
        ++used;
        const double exact = 2.0 * std::pow(x, 1.5) / std::tgamma(2.5);
        const double res = t.num(i, "resolvent"), rl = t.num(i, "rl");
        d_res_rl = std::max(d_res_rl, std::abs(res - rl));
        d_res_ex = std::max(d_res_ex, std::abs(res - exact));
        d_rl_ex = std::max(d_rl_ex, std::abs(rl - exact));
        m_rl = std::max(m_rl, std::abs(rl));
        m_ex = std::max(m_ex, std::abs(exact));
    }
    v.note << " resolvent/rl=" << d_res_rl / m_rl << " resolvent/exact=" << d_res_ex / m_ex
           << " rl/exact=" << d_rl_ex / m_ex << " (" << used << " nodes)";
    v.require(used > 100, "window sampled");
    v.require(d_res_rl / m_rl <= kTheorem2Tol, "resolvent vs rl");
    v.require(d_res_ex / m_ex <= kTheorem2Tol, "resolvent vs analytic");
    v.require(d_rl_ex / m_ex <= kTheorem2Tol, "rl vs analytic");
    v.require(r.report.wall_clock_seconds <= kBudgetTheorem2, "runtime");
    report(4, "positive power via the resolvent equals the RL derivative", v);
}

void criterion5(const std::map<std::string, Run>& runs) {
    Verdict v;
    const auto& r = get(runs, "powers");
    const auto t = read_table(r.dir / "powers.csv");
    const auto s = read_table(r.dir / "powers_semigroup.csv");
    double worst_gap = 0.0, worst_semi = 0.0, worst_int = 0.0;
    std::size_t n_int = 0;
    for (std::size_t i = 0; i < t.rows.size(); ++i) worst_gap = std::max(worst_gap, t.num(i, "sup_gap"));
    for (std::size_t i = 0; i < s.rows.size(); ++i) {
        const double rel = s.num(i, "relative_sup_gap");
        if (s.str(i, "reference") == "direct-inverse") {
            worst_int = std::max(worst_int, rel);
            ++n_int;
        } else {
            worst_semi = std::max(worst_semi, rel);
        }
    }
    v.note << " balakrishnan=" << worst_gap << " semigroup=" << worst_semi << " integer=" << worst_int;
    v.require(t.rows.size() == 3, "three orders");
    v.require(worst_gap <= kBalakrishnanTol, "sup gap <= 1e-6");
    v.require(worst_semi <= kSemigroupTol, "semigroup <= 1e-10");
    v.require(n_int > 0 && worst_int <= kIntegerTol, "integer case <= 1e-10");
    v.require(r.report.wall_clock_seconds <= kBudgetPowers, "runtime");
    report(5, "Balakrishnan negative powers against the spectral powers", v);
}

void criterion6(const std::map<std::string, Run>& runs) {
    Verdict v;
    const auto& r = get(runs, "levy");
    const auto t = read_table(r.dir / "levy.csv");
    // (-Delta)^{3/4} exp(-x^2) at 0 = 2^1.5 Gamma(1.25) / sqrt(pi).
    const double exact = std::pow(2.0, 1.5) * std::tgamma(1.25) / std::sqrt(std::numbers::pi);
    const double ref = t.num(0, "reference");
    const double est = t.num(0, "estimate"), se = t.num(0, "standard_error");
    const double allowed = std::max(kLevySigmas * se, kLevyRelTol * std::abs(ref));
    const double ratio = se / t.num(1, "standard_error");
    v.note << " estimate=" << est << " reference=" << ref << " closed-form=" << exact << " se=" << se
           << " se ratio=" << ratio;
    v.require(t.num(0, "count") == 1e6 && t.num(0, "h") == 1e-3, "h=1e-3, count=1e6");
    v.require(std::abs(ref - exact) <= 1e-6 * std::abs(exact), "Fourier reference matches the closed form");
    v.require(std::abs(est - ref) <= allowed, "within max(3 sigma, 2%)");
    v.require(t.num(1, "count") == 4e6 && std::abs(ratio / 2.0 - 1.0) <= kHalvingTol, "se halves under 4x count");
    v.require(r.report.wall_clock_seconds <= kBudgetLevy, "runtime");
    report(6, "Monte Carlo Levy generator against the Fourier symbol", v);
}

void criterion7(const std::map<std::string, Run>& runs) {
    Verdict v;
    const auto& r = get(runs, "solve_convergence");
    const auto t = read_table(r.dir / "solve.csv");
    const std::vector<double> dts{1e-2, 5e-3, 2.5e-3};
    v.require(t.rows.size() == dts.size(), "three time steps");
    for (std::size_t i = 0; i < t.rows.size() && i < dts.size(); ++i) {
        v.require(t.num(i, "dt") == dts[i], "dt ladder");
        v.require(t.str(i, "energy_non_increasing") == "true", "energy non-increasing");
        if (i == 0) continue;
        const double ratio = t.num(i - 1, "error") / t.num(i, "error");
        v.note << " ratio=" << ratio;
        v.require(ratio >= kRatioLo && ratio <= kRatioHi, "ratio in [1.8, 2.2]");
    }
    v.require(r.report.wall_clock_seconds <= kBudgetSolve, "runtime");
    report(7, "implicit Euler is first order", v);
}

void criterion8(const std::map<std::string, Run>& runs) {
    Verdict v;
    const auto& r = get(runs, "sobolev");
    const auto t = read_table(r.dir / "boundary_summary.csv");
    std::size_t seen = 0;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& name = t.str(i, "case");
        const auto& trend = t.str(i, "trend");
        v.note << " " << name << "/" << t.str(i, "side") << "=" << trend;
        if (name == "power_alpha") {
            ++seen;
            v.require(t.num(i, "alpha") == 1.5, "alpha 1.5 for (x(1-x))^alpha");
            v.require(trend == "to-constant" && t.num(i, "limit_estimate") > 0.0, "positive constant limit");
        } else if (name == "quadratic") {
            ++seen;
            v.require(t.num(i, "alpha") == 0.5, "alpha 0.5 for x(1-x)");
            v.require(trend == "to-zero", "profile tends to 0");
        }
    }
    v.require(seen == 4, "both cases, both sides");
    v.require(r.report.wall_clock_seconds <= kBudgetSobolev, "runtime");
    report(8, "boundary decay profile", v);
}

void criterion9(const std::map<std::string, Run>& first, const fs::path& root, double first_seconds) {
    Verdict v;
    double seconds = 0.0;
    const auto second = run_suite(root / "b", seconds);
    std::size_t compared = 0;
    for (const auto& [stem, run] : first) {
        const auto& other = get(second, stem);
        auto a = run.report.tables, b = other.report.tables;
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        v.require(a == b, stem + " writes the same tables");
        for (const auto& f : a) {
            if (fs::path(f).extension() != ".csv") continue;
            ++compared;
            const bool same = slurp(run.dir / f) == slurp(other.dir / f);
            if (!same) v.note << " differs: " << stem << "/" << f;
            v.ok = v.ok && same;
        }
    }
    v.note << " " << compared << " tables, suite " << first_seconds << "s + " << seconds << "s";
    v.require(compared > 0, "tables compared");
    v.require(first_seconds <= kBudgetSuite && seconds <= kBudgetSuite, "suite runtime");
    report(9, "reruns are byte-identical", v);
}

}  // namespace

int main() {
    const fs::path root = fs::temp_directory_path() / ("fracops_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(root);
    try {
        double seconds = 0.0;
        const auto runs = run_suite(root / "a", seconds);
        for (const auto& [stem, r] : runs) {
            std::printf("  ran %-20s %-12s %s %.2fs\n", stem.c_str(), r.report.experiment.c_str(),
                        r.report.passed() ? "pass" : "fail", r.report.wall_clock_seconds);
        }
        criterion1(runs);
        criterion2(runs);
        criterion3(runs);
        criterion4(runs);
        criterion5(runs);
        criterion6(runs);
        criterion7(runs);
        criterion8(runs);
        criterion9(runs, root, seconds);
    } catch (const std::exception& e) {
        std::printf("FAIL acceptance aborted: %s\n", e.what());
        ++failures;
    }
    fs::remove_all(root);
    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
