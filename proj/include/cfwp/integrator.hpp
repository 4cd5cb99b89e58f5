#ifndef CFWP_INTEGRATOR_HPP
#define CFWP_INTEGRATOR_HPP

#include <limits>
#include <optional>

#include "cfwp/modes.hpp"

namespace cfwp {

/// 2x2 symmetric coefficient field t -> M(t). RadialCoeffs::field() provides
/// the geometry-backed one; synthetic fields plug in directly.
using CoeffField = std::function<Mat2(double)>;
using WeightFn = std::function<double(double)>;

/// Frobenius data at the regular singular endpoint t = 0.
struct IndicialData {
    Mat2 residue;                     // A0 = lim t M(t), symmetrized
    std::array<double, 2> exponents;  // eigenvalues of A0, descending
    std::array<Vec2, 2> directions;   // matching unit eigenvectors
    double threshold = 0.0;           // mu*: log-log slope of the weight at 0
    std::vector<int> admissible;      // indices with exponent >= mu* - 1e-9
};

/// Residue matrix by Richardson extrapolation of t M(t) over
/// t = 1e-4, 1e-5, 1e-6; threshold by least-squares log-log fit of the
/// weight over [1e-6, 1e-4]. Throws IrregularSingularity when the Richardson
/// estimates drift by more than 1e-3 relative.
IndicialData indicial(const CoeffField& coeffs, const WeightFn& weight);
IndicialData indicial(const RadialCoeffs& coeffs);

struct StepStats {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    double accumulated_rel_error = 0.0;  // sum of per-step scaled error estimates
    std::size_t renormalizations = 0;
};

struct Trajectory {
    std::vector<double> nodes;          // monotone in the integration direction
    std::vector<Vec2> states;
    std::vector<double> l2_cumulative;  // int (U^2 + W^2) dt from the start node
    double rel_tol = 0.0;
    StepStats stats;
    bool blow_up = false;               // state passed 1e300; truncated there
    double indicial_exponent = std::numeric_limits<double>::quiet_NaN();

    /// State at a recorded node (1e-9 relative node match), nullptr if absent.
    const Vec2* state_at(double t) const;
    double l2_at(double t) const;  // cumulative L2 at a recorded node (NaN if absent)
};

struct IntegrateOptions {
    double rel_tol = 1e-10;
    std::size_t min_nodes = 256;
    std::vector<double> extra_nodes;  // forced output nodes inside the range
    bool track_direction = false;     // renormalize freely; magnitudes meaningless
};

/// Adaptive embedded Dormand-Prince 5(4) integration of the linear system
/// y' = M(t) y from t0 to t1 (either direction). Dense output lands exactly
/// on a log-spaced node set. Overflow past 1e300 is reported as a truncated
/// trajectory with blow_up set, not as an error.
Trajectory integrate(const CoeffField& coeffs, double t0, double t1, Vec2 init,
                     const IntegrateOptions& opts = {});

struct ShootOptions {
    double t_init = 1e-6;
    double t_max = 1e4;
    double t_mid = 1.0;
    double rel_tol = 1e-10;
};

/// One forward trajectory per admissible indicial direction, initialized as
/// t_init^mu v deep in the asymptotic regime. Empty when no direction meets
/// the boundedness threshold.
std::vector<Trajectory> solve_bounded(const CoeffField& coeffs, const IndicialData& ind,
                                      const ShootOptions& opts = {});

struct MatchResult {
    double residual = std::numeric_limits<double>::quiet_NaN();
    bool degenerate = false;  // eigenvalues of M(t_max) within 1e-10: no recessive direction
    double matched_at = 0.0;
    Vec2 forward_dir{0.0, 0.0};
    Vec2 backward_dir{0.0, 0.0};
};

/// Normalized matching determinant between the bounded-at-0 subspace and the
/// recessive direction at infinity, evaluated at t_mid (or the deepest node a
/// blown-up forward trajectory still reaches). Residual near 0 signals a
/// candidate L2 bound state. Throws InvalidParams on an empty bounded set.
MatchResult match_infinity(const CoeffField& coeffs, const std::vector<Trajectory>& bounded,
                           const ShootOptions& opts = {});

}  // namespace cfwp

#endif
