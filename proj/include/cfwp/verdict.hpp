#ifndef CFWP_VERDICT_HPP
#define CFWP_VERDICT_HPP

#include <optional>
#include <string>

#include "cfwp/hypotheses.hpp"
#include "cfwp/integrator.hpp"

namespace cfwp {

enum class VerdictKind { NoL2, CandidateL2, Inconclusive };
const char* to_string(VerdictKind v);

enum class L2Class { Divergent, Convergent, Inconclusive };
const char* to_string(L2Class c);

struct TrajectoryEvidence {
    double exponent = 0.0;
    bool blow_up = false;
    std::vector<std::pair<double, double>> p_partials;  // (horizon T, P(T))
    L2Class l2 = L2Class::Inconclusive;
};

/// Per-mode classification. no-L2 requires either an empty bounded set or
/// (divergent L2 mass on every bounded trajectory AND matching residual above
/// the floor); candidate-L2 requires the residual below the ceiling. The gap
/// between the two thresholds is three decades wide on purpose.
struct ModeVerdict {
    ModeIndex mode{};
    bool hypotheses_ok = false;
    int bounded_dim = 0;
    std::vector<TrajectoryEvidence> trajectories;
    std::optional<double> matching_residual;
    bool matching_degenerate = false;
    VerdictKind verdict = VerdictKind::Inconclusive;
    std::string note;
};

struct ClassifyOptions {
    ShootOptions shoot;
    double residual_floor = 1e-3;
    double candidate_ceiling = 1e-6;
};

/// Core pipeline on a bare coefficient field and boundedness weight:
/// indicial -> bounded solutions -> partial L2 integrals -> matching.
/// Never throws; failures fold into an Inconclusive verdict with a note.
ModeVerdict classify_system(const CoeffField& coeffs, const WeightFn& weight,
                            const ClassifyOptions& opts = {});

/// Geometry prepared for repeated mode classification: hypotheses evaluated
/// once, conformal factor absorbed into tabulated profiles.
struct PreparedGeometry {
    CfwpGeometry effective;
    HypothesesOutcome hypotheses;
};
PreparedGeometry prepare_geometry(const CfwpGeometry& geom);

ModeVerdict classify_mode(const PreparedGeometry& prepared, const ModeIndex& mode,
                          const ClassifyOptions& opts = {});
ModeVerdict classify_mode(const CfwpGeometry& geom, const ModeIndex& mode,
                          const ClassifyOptions& opts = {});

struct SweepGrid {
    int k_min = 0, k_max = 0;
    std::vector<int> l_values{0};
    std::vector<int> eps_values{-1, 1};
    std::vector<double> lambda_values;
};

struct SweepOptions {
    ClassifyOptions classify;
    unsigned jobs = 0;  // 0 = hardware concurrency
};

struct SweepReport {
    HypothesesOutcome hypotheses;
    std::vector<ModeIndex> modes;       // grid order: k, l, eps, lambda
    std::vector<ModeVerdict> verdicts;  // same order
    std::size_t no_l2 = 0, candidate = 0, inconclusive = 0;
    std::optional<std::size_t> worst_index;  // smallest matching residual
};

/// Classify every mode of the grid; modes run concurrently, the report is
/// identical regardless of execution order. Throws ResourceLimit on empty or
/// oversized grids (|k| range <= 64, |lambda| <= 1024).
SweepReport sweep(const CfwpGeometry& geom, const SweepGrid& grid,
                  const SweepOptions& opts = {});

struct IdentityCheck {
    enum class Status { Pass, Fail, Skipped };
    std::string name;
    Status status = Status::Skipped;
    double residual = 0.0;
    double threshold = 0.0;
};

struct IdentityReport {
    std::vector<IdentityCheck> checks;
    bool all_passed = true;  // no failures; skips are allowed
};

/// Run the lemma-derived identity suite for one mode: the trace identity,
/// determinant transport, the pointwise inequality and lower bound along a
/// sigma-positive trajectory, the special-case difference equation, the
/// lambda = 0 decoupling, and the (u,w) <-> (U,W) transport.
IdentityReport verify_identities(const CfwpGeometry& geom, const ModeIndex& mode);

}  // namespace cfwp

#endif
