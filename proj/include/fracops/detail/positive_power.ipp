#pragma once

// Template definitions for operator_powers.hpp.

namespace fracops {

template <ResolventOperator Op>
GridFunction positive_power_via_resolvent(const Op& op, double alpha, int n, const GridFunction& f,
                                          const PositivePowerOptions& options) {
    if (n < 1) fail(ErrorCode::InvalidArgument, "integer part n must be at least 1");
    const FracOrder order(alpha, OrderRange{static_cast<double>(n - 1), static_cast<double>(n), false});
    if constexpr (requires { op.check_domain(f, n, options.domain_tolerance); }) {
        op.check_domain(f, n, options.domain_tolerance);
    }
    const double beta = static_cast<double>(n) - order.value();
    const Eigen::VectorXd g = op.apply_power(f, n);
    const auto quad = make_resolvent_quadrature(beta, op.inverse_norm_bound(), options.quadrature);
    Eigen::VectorXd acc = quad.tail * g;
    for (std::size_t j = 0; j < quad.nodes.size(); ++j) {
        acc += quad.weights[j] * op.resolvent(quad.nodes[j], g);
    }
    return {op.grid(), acc};
}

}  // namespace fracops
