#ifndef CFWP_HYPOTHESES_HPP
#define CFWP_HYPOTHESES_HPP

#include <string>
#include <utility>
#include <vector>

#include "cfwp/geometry.hpp"

namespace cfwp {

enum class Condition { A, B, C, APrime, BPrime, CPrime, Int };
const char* to_string(Condition c);

/// Outcome of one vanishing-theorem hypothesis with the numeric evidence
/// that justifies it. status is Holds/Fails only when the decision rule is
/// met; anything short of that is reported Inconclusive, never guessed.
struct HypothesisReport {
    Condition condition;
    CheckStatus status = CheckStatus::Inconclusive;
    std::vector<std::pair<double, double>> evidence;  // (probe or horizon, value)
    std::string narrative;
};

/// Condition (a): int_x^inf e^{-int_x^t 1/(sqrt(2) alpha)} dt = inf.
/// With gamma_weight non-null this is Lemma-style condition (a'): the outer
/// integrand carries the extra factor gamma(t). A power-law hint on alpha
/// (and gamma) decides the classification exactly; without hints the horizon
/// probe only reports an answer on unambiguous evidence.
HypothesisReport check_a(const Profile& alpha, double x, const AsymptoticHint& hint,
                         const Profile* gamma_weight = nullptr);

/// Condition (b): lim_{t->0} alpha(t) = 0, decided on a monotone probe
/// sequence t = 1e-3 .. 1e-9.
HypothesisReport check_b(const CfwpGeometry& geom);

/// Condition (b'): lim_{t->0} gamma(t) alpha(t) = 0.
HypothesisReport check_b_prime(const CfwpGeometry& geom);

/// Condition (c): 2 alpha^2 >= beta^2 > (m-1)/m 2 alpha^2 for all t.
/// Left inequality admits equality, right is strict; right-side ties within
/// 1e-12 relative stay inconclusive.
HypothesisReport check_c(const CfwpGeometry& geom);

struct HypothesesOutcome {
    std::vector<HypothesisReport> reports;
    bool all_hold = false;
};

/// Run the full hypothesis set: (a),(b),(c) for a plain geometry, or
/// (int),(a'),(b'),(c') when a conformal factor is present.
HypothesesOutcome check_all(const CfwpGeometry& geom);

}  // namespace cfwp

#endif
