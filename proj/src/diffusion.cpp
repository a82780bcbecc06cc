#include "fracops/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>

#include "fracops/spectral_analysis.hpp"

namespace fracops {

ActuatorProfile::ActuatorProfile(Grid1D grid) : grid_(grid) {}

void ActuatorProfile::add(GridFunction shape, Signal signal) {
    if (!(shape.grid() == grid_)) fail(ErrorCode::InvalidArgument, "actuator shape does not conform to the solver grid");
    if (!signal) fail(ErrorCode::InvalidArgument, "actuator signal is empty");
    shapes_.push_back(std::move(shape));
    signals_.push_back(std::move(signal));
}

GridFunction ActuatorProfile::evaluate(double t) const {
    Eigen::VectorXd u = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid_.size()));
    for (std::size_t i = 0; i < shapes_.size(); ++i) u += signals_[i](t) * shapes_[i].vector();
    return {grid_, u};
}

GridFunction bump_shape(const Grid1D& grid, double center, double half_width) {
    if (!(center > 0.0 && center < grid.length())) fail(ErrorCode::InvalidArgument, "bump centre must lie inside the domain");
    if (!(half_width >= 0.0)) fail(ErrorCode::InvalidArgument, "bump half width must be nonnegative");
    std::vector<double> v(grid.size(), 0.0);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (std::abs(grid.node(i) - center) <= half_width) {
            v[i] = 1.0;
            ++hits;
        }
    }
    if (hits == 0) {
        const double pos = center / grid.spacing() - 1.0;
        const auto i = static_cast<std::size_t>(std::clamp(std::round(pos), 0.0, static_cast<double>(grid.size() - 1)));
        v[i] = 1.0;
        hits = 1;
    }
    const double mass = 1.0 / (grid.spacing() * static_cast<double>(hits));
    for (auto& x : v) x *= mass;
    return {grid, std::move(v)};
}

Signal constant_signal(double value) {
    return [value](double) { return value; };
}

bool TrajectoryRecord::energy_non_increasing(double rel_tol) const {
    for (std::size_t k = 1; k < energies.size(); ++k) {
        if (energies[k] > energies[k - 1] * (1.0 + rel_tol)) return false;
    }
    return true;
}

ImplicitEulerStepper::ImplicitEulerStepper(const LinearOperatorMatrix& A, double dt) : dt_(dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) fail(ErrorCode::InvalidArgument, "time step must be positive");
    Eigen::MatrixXd m = dt * A.matrix();
    m.diagonal().array() += 1.0;
    lu_.compute(m);
    const double rc = lu_.rcond();
    if (!(rc > 64.0 * std::numeric_limits<double>::epsilon())) {
        std::ostringstream msg;
        msg << "I + dt*A is singular (reciprocal condition " << rc << "); the operator is not positive";
        fail(ErrorCode::SolverError, msg.str());
    }
}

GridFunction ImplicitEulerStepper::step(const GridFunction& z, const GridFunction& u) const {
    if (!(z.grid() == u.grid())) fail(ErrorCode::InvalidArgument, "state and source live on different grids");
    if (static_cast<Eigen::Index>(z.size()) != lu_.rows()) fail(ErrorCode::InvalidArgument, "operator/grid size mismatch");
    const Eigen::VectorXd rhs = z.vector() + dt_ * u.vector();
    return {z.grid(), Eigen::VectorXd(lu_.solve(rhs))};
}

GridFunction step_implicit_euler(const GridFunction& z, const LinearOperatorMatrix& A, const GridFunction& u_now,
                                 double dt) {
    return ImplicitEulerStepper(A, dt).step(z, u_now);
}

TrajectoryRecord solve(const GridFunction& z0, const LinearOperatorMatrix& A, const ActuatorProfile& act, double T,
                       double dt, std::string descriptor) {
    if (!(T > 0.0) || !std::isfinite(T)) fail(ErrorCode::InvalidArgument, "time horizon must be positive");
    if (!(dt > 0.0) || dt > T) fail(ErrorCode::InvalidArgument, "time step must lie in (0, T]");
    if (!(act.grid() == z0.grid())) fail(ErrorCode::InvalidArgument, "actuators do not conform to the solver grid");
    const double steps_real = T / dt;
    const auto steps = static_cast<std::size_t>(std::llround(steps_real));
    if (std::abs(steps_real - static_cast<double>(steps)) > 1e-9 * std::max(1.0, steps_real)) {
        std::ostringstream msg;
        msg << "dt = " << dt << " does not divide T = " << T;
        fail(ErrorCode::InvalidArgument, msg.str());
    }
    const ImplicitEulerStepper stepper(A, dt);
    TrajectoryRecord rec{{0.0}, {z0}, {norm(z0, NormKind::DiscreteL2)}, std::move(descriptor), dt};
    rec.times.reserve(steps + 1);
    rec.states.reserve(steps + 1);
    for (std::size_t k = 1; k <= steps; ++k) {
        const double t = static_cast<double>(k) * dt;
        rec.states.push_back(stepper.step(rec.states.back(), act.evaluate(t)));
        rec.times.push_back(t);
        rec.energies.push_back(norm(rec.states.back(), NormKind::DiscreteL2));
        if (!std::isfinite(rec.energies.back())) fail(ErrorCode::SolverError, "trajectory energy became non-finite");
    }
    return rec;
}

GridFunction exact_spectral_solution(const GridFunction& z0, const LinearOperatorMatrix& A, double t) {
    if (!(t >= 0.0)) fail(ErrorCode::InvalidArgument, "time must be nonnegative");
    if (!A.is_symmetric()) fail(ErrorCode::InvalidArgument, "spectral solution needs a symmetric operator");
    if (static_cast<Eigen::Index>(z0.size()) != A.size()) fail(ErrorCode::InvalidArgument, "operator/grid size mismatch");
    if (t == 0.0) return z0;
    const auto& e = A.eigen();
    const Eigen::VectorXd coeff = e.vectors.transpose() * z0.vector();
    const Eigen::VectorXd decayed = ((-t) * e.values.array()).exp().matrix().cwiseProduct(coeff);
    return {z0.grid(), Eigen::VectorXd(e.vectors * decayed)};
}

SpreadingRow spreading_of(const GridFunction& z, double time) {
    const std::size_t n = z.size();
    const double h = z.grid().spacing();
    double total = 0.0, mass = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        total += std::abs(z[i]);
        mass += z[i];
    }
    SpreadingRow row{time, 0.0, 0.0, h * mass};
    if (!(total > 0.0)) return row;
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += z.grid().node(i) * std::abs(z[i]) / total;
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = z.grid().node(i) - mean;
        var += d * d * std::abs(z[i]) / total;
    }
    row.std_width = std::sqrt(var);
    // Quantiles of the piecewise-constant density (cells centred on the nodes).
    auto quantile = [&](double q) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double w = std::abs(z[i]) / total;
            if (acc + w >= q) {
                const double frac = w > 0.0 ? (q - acc) / w : 0.0;
                return z.grid().node(i) + (frac - 0.5) * h;
            }
            acc += w;
        }
        return z.grid().node(n - 1) + 0.5 * h;
    };
    row.iqr_width = quantile(0.75) - quantile(0.25);
    return row;
}

AnomalousReport anomalous_exponent_probe(const std::vector<double>& alphas, const Grid1D& grid, double T, double dt,
                                         std::size_t snapshots) {
    if (alphas.empty()) fail(ErrorCode::InvalidArgument, "alpha ladder is empty");
    if (snapshots == 0) fail(ErrorCode::InvalidArgument, "at least one snapshot is required");
    const double l = grid.length();
    const GridFunction z0 = bump_shape(grid, 0.5 * l, 2.0 * grid.spacing());
    const ActuatorProfile none(grid);
    AnomalousReport report;
    for (double a : alphas) {
        const auto A = assemble_flap_matrix(grid, FracOrder(a, kOrder12Closed));
        const auto traj = solve(z0, A, none, T, dt, "flap");
        const auto& e = A.eigen();
        AnomalousResult res{a, e.values(0), 0.0, 0.0, {}};
        const auto xi1 = e.vectors.col(0);
        const double c0 = xi1.dot(z0.vector());
        const double cT = xi1.dot(traj.states.back().vector());
        res.mode1_rate = -std::log(cT / c0) / T;
        const std::size_t steps = traj.states.size() - 1;
        for (std::size_t s = 1; s <= snapshots; ++s) {
            const std::size_t k = std::max<std::size_t>(1, steps * s / snapshots);
            res.rows.push_back(spreading_of(traj.states[k], traj.times[k]));
        }
        if (res.rows.size() >= 2) {
            double sx = 0, sy = 0, sxx = 0, sxy = 0;
            for (const auto& r : res.rows) {
                const double x = std::log(r.time), y = std::log(r.iqr_width);
                sx += x;
                sy += y;
                sxx += x * x;
                sxy += x * y;
            }
            const double m = static_cast<double>(res.rows.size());
            res.width_exponent = (m * sxy - sx * sy) / (m * sxx - sx * sx);
        }
        report.results.push_back(std::move(res));
    }
    return report;
}

void write_trajectory_csv(const TrajectoryRecord& rec, std::ostream& out) {
    out << "time,node,value\n";
    char buf[96];
    for (std::size_t k = 0; k < rec.states.size(); ++k) {
        const auto& s = rec.states[k];
        for (std::size_t i = 0; i < s.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", rec.times[k], s.grid().node(i), s[i]);
            out << buf;
        }
    }
}

}  // namespace fracops
