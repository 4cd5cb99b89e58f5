#ifndef CFWP_QUADRATURE_HPP
#define CFWP_QUADRATURE_HPP

#include <functional>

#include "cfwp/errors.hpp"

namespace cfwp {

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    bool converged = false;  // estimated relative error <= requested tolerance
    int intervals = 0;       // leaf intervals used
};

/// Adaptive Gauss-Kronrod (7,15) integration of f over [x0, x1].
///
/// Worst-interval-first subdivision; integrable endpoint singularities are
/// handled because no node touches the interval boundary. When the interval
/// budget is exhausted the best estimate is returned with converged=false
/// (tolerance not met) rather than throwing.
///
/// Throws InvalidParams when x0 >= x1 and QuadratureFailure when the
/// integrand evaluates to a non-finite value at a quadrature node.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    double x0, double x1, double rel_tol,
                                    int max_intervals = 20000);

/// Single (7,15) Gauss-Kronrod panel: Kronrod value and |G7-K15| error gauge.
void gauss_kronrod_15(const std::function<double(double)>& f, double a, double b,
                      double& value, double& error);

}  // namespace cfwp

#endif
