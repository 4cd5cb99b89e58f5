#include "cfwp/hypotheses.hpp"

#include <algorithm>
#include <cmath>

#include "cfwp/quadrature.hpp"

namespace cfwp {

namespace {
constexpr double kSqrt2 = 1.41421356237309504880;
constexpr double kInvSqrt2 = 0.70710678118654752440;
}  // namespace

const char* to_string(Condition c) {
    switch (c) {
        case Condition::A: return "a";
        case Condition::B: return "b";
        case Condition::C: return "c";
        case Condition::APrime: return "a'";
        case Condition::BPrime: return "b'";
        case Condition::CPrime: return "c'";
        case Condition::Int: return "int";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Condition (a) / (a')
// ---------------------------------------------------------------------------

namespace {

// Exact classification from hints, when they pin down the asymptotics.
// Returns Inconclusive when hints are insufficient for an exact call.
CheckStatus classify_a_from_hints(const AsymptoticHint& ah, const AsymptoticHint* gh) {
    // Effective power of the weight factor in the outer integrand.
    double pg = 0.0;
    bool weight_known = true;
    if (gh) {
        if (gh->kind == AsymptoticHint::Kind::Power) pg = gh->p;
        else weight_known = false;  // bounded-below gives only one-sided bounds
    }

    if (ah.kind != AsymptoticHint::Kind::Power) return CheckStatus::Inconclusive;

    if (ah.p > 1.0) {
        // int 1/alpha converges: the exponential factor is bounded below by a
        // positive constant, so the outer integral behaves like int gamma.
        if (!gh) return CheckStatus::Holds;
        if (gh->kind == AsymptoticHint::Kind::BoundedBelow) return CheckStatus::Holds;
        return pg >= -1.0 ? CheckStatus::Holds : CheckStatus::Fails;
    }
    if (ah.p == 1.0) {
        // alpha ~ C t: integrand ~ gamma(t) (x/t)^q with q = 1/(sqrt(2) C).
        double q = 1.0 / (kSqrt2 * ah.coeff);
        if (gh && gh->kind == AsymptoticHint::Kind::BoundedBelow)
            return q <= 1.0 ? CheckStatus::Holds : CheckStatus::Inconclusive;
        if (!weight_known) return CheckStatus::Inconclusive;
        return pg - q >= -1.0 ? CheckStatus::Holds : CheckStatus::Fails;
    }
    // alpha grows strictly sublinearly: the exponent grows like t^(1-p) and the
    // integrand decays faster than any power, beating a power-law weight.
    if (!gh || gh->kind == AsymptoticHint::Kind::Power) return CheckStatus::Fails;
    return CheckStatus::Inconclusive;
}

}  // namespace

HypothesisReport check_a(const Profile& alpha, double x, const AsymptoticHint& hint,
                         const Profile* gamma_weight) {
    if (!(x > 0.0)) throw InvalidParams("check_a: requires x > 0");

    HypothesisReport rep;
    rep.condition = gamma_weight ? Condition::APrime : Condition::A;

    // Cumulative exponent table E(t) = int_x^t 1/(sqrt(2) alpha) on a log
    // grid out to 1e5 x, one Gauss-Kronrod panel per segment.
    constexpr int kPerDecade = 128;
    constexpr int kDecades = 5;
    const std::size_t n = kPerDecade * kDecades + 1;
    std::vector<double> tg = log_grid(x, x * 1e5, n);
    std::vector<double> lt(n), ev(n);
    lt[0] = std::log(tg[0]);
    ev[0] = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        double v, e;
        gauss_kronrod_15([&](double t) { return 1.0 / (kSqrt2 * alpha(t)); },
                         tg[i - 1], tg[i], v, e);
        ev[i] = ev[i - 1] + v;
        lt[i] = std::log(tg[i]);
    }
    Pchip exponent(lt, ev);

    bool inner_saturated =
        (ev[n - 1] - ev[n - 1 - kPerDecade]) <= 1e-10 * std::max(1.0, ev[n - 1]);

    // Outer partial integrals decade by decade.
    auto outer = [&](double t) {
        double w = gamma_weight ? (*gamma_weight)(t) : 1.0;
        return w * std::exp(-exponent(std::log(t)));
    };
    std::vector<double> increments;
    double cumulative = 0.0;
    for (int d = 0; d < kDecades; ++d) {
        double lo = x * std::pow(10.0, d);
        double hi = x * std::pow(10.0, d + 1);
        double inc = integrate_adaptive(outer, lo, hi, 1e-10, 2000).value;
        increments.push_back(inc);
        cumulative += inc;
        rep.evidence.emplace_back(hi, cumulative);
    }

    // Exact rule when hints apply.
    const AsymptoticHint* gh = gamma_weight ? &gamma_weight->hint() : nullptr;
    CheckStatus from_hint = classify_a_from_hints(hint, gh);
    if (from_hint != CheckStatus::Inconclusive) {
        rep.status = from_hint;
        rep.narrative = std::string("classified exactly from asymptotic hint; partial integral at "
                                    "top horizon = ") + std::to_string(cumulative);
        return rep;
    }

    // Analytic shortcut: a convergent inner integral bounds the integrand
    // below, and for the unweighted condition that already settles divergence.
    if (inner_saturated && !gamma_weight) {
        rep.status = CheckStatus::Holds;
        rep.narrative = "exponent integral saturates: integrand bounded below by a positive constant";
        return rep;
    }

    // Horizon probe: report a definite answer only on unambiguous evidence.
    bool nondecreasing = true;
    bool fast_shrink = true;
    for (std::size_t i = 2; i < increments.size(); ++i) {
        if (increments[i] < increments[i - 1] * (1.0 - 1e-6)) nondecreasing = false;
        if (increments[i] > 0.1 * increments[i - 1]) fast_shrink = false;
    }
    if (nondecreasing && increments.back() > 0.0) {
        rep.status = CheckStatus::Holds;
        rep.narrative = inner_saturated
                            ? "integrand bounded below; partial integrals grow without sign of saturation"
                            : "partial integrals grow with non-decreasing decade increments";
    } else if (fast_shrink) {
        rep.status = CheckStatus::Fails;
        rep.narrative = "decade increments shrink geometrically (ratio <= 0.1): integral converges";
    } else {
        rep.status = CheckStatus::Inconclusive;
        rep.narrative = "horizon probe ambiguous and no asymptotic hint available";
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Conditions (b) / (b')
// ---------------------------------------------------------------------------

namespace {

HypothesisReport limit_zero_probe(Condition cond, const std::function<double(double)>& f) {
    HypothesisReport rep;
    rep.condition = cond;

    std::vector<double> values;
    for (double t = 1e-3; t >= 0.9e-9; t *= 0.1) {
        double v = f(t);
        rep.evidence.emplace_back(t, v);
        values.push_back(v);
    }

    bool decreasing = true;
    bool sustained_decay = true;  // every step keeps a geometric ratio <= 0.9
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (!(std::abs(values[i]) < std::abs(values[i - 1]))) decreasing = false;
        if (std::abs(values[i]) > 0.9 * std::abs(values[i - 1])) sustained_decay = false;
    }

    double last = std::abs(values.back());
    double min_abs = *std::min_element(values.begin(), values.end(),
                                       [](double a, double b) { return std::abs(a) < std::abs(b); });

    // Either the probes already sit below the zero threshold, or they keep
    // decaying geometrically all the way down (fractional-power profiles such
    // as sqrt(t) reach 1e-6 only below the probe range).
    if (decreasing && (last < 1e-6 || (sustained_decay && last < 1e-3))) {
        rep.status = CheckStatus::Holds;
        rep.narrative = "probe sequence decreases monotonically toward 0";
    } else if (std::abs(min_abs) >= 1e-3) {
        rep.status = CheckStatus::Fails;
        rep.narrative = "probe sequence stays bounded away from 0";
    } else {
        rep.status = CheckStatus::Inconclusive;
        rep.narrative = "probe sequence neither vanishes cleanly nor stays bounded below";
    }
    return rep;
}

}  // namespace

HypothesisReport check_b(const CfwpGeometry& geom) {
    const Profile alpha = geom.alpha();
    return limit_zero_probe(Condition::B, [alpha](double t) { return alpha(t); });
}

HypothesisReport check_b_prime(const CfwpGeometry& geom) {
    if (!geom.gamma()) throw InvalidParams("check_b_prime: geometry has no gamma");
    const Profile alpha = geom.alpha();
    const Profile gamma = *geom.gamma();
    return limit_zero_probe(Condition::BPrime,
                            [alpha, gamma](double t) { return gamma(t) * alpha(t); });
}

// ---------------------------------------------------------------------------
// Condition (c) / (c')
// ---------------------------------------------------------------------------

namespace {

// Minimize f on [lo, hi] by ternary section down to the requested width.
double minimize(const std::function<double(double)>& f, double lo, double hi, double width) {
    double m = std::min(f(lo), f(hi));
    while (hi - lo > width) {
        double m1 = lo + (hi - lo) / 3.0;
        double m2 = hi - (hi - lo) / 3.0;
        double f1 = f(m1);
        double f2 = f(m2);
        m = std::min({m, f1, f2});
        if (f1 < f2) hi = m2;
        else lo = m1;
    }
    return m;
}

HypothesisReport check_c_impl(const CfwpGeometry& geom, Condition label) {
    HypothesisReport rep;
    rep.condition = label;

    const Profile& alpha = geom.alpha();
    const Profile& beta = geom.beta();
    const double ratio = 2.0 * static_cast<double>(geom.m() - 1) / static_cast<double>(geom.m());
    constexpr double kTol = 1e-12;
    constexpr std::size_t kPoints = 4096;

    auto left_margin = [&](double t) {  // 2 a^2 - b^2, >= 0 required
        double a = alpha(t), b = beta(t);
        return 2.0 * a * a - b * b;
    };
    auto right_margin = [&](double t) {  // b^2 - (m-1)/m 2 a^2, > 0 required
        double a = alpha(t), b = beta(t);
        return b * b - ratio * a * a;
    };

    std::vector<double> grid = log_grid(geom.window().tmin, geom.window().tmax, kPoints);
    double worst_left = std::numeric_limits<double>::infinity();
    double worst_right = std::numeric_limits<double>::infinity();
    bool right_tie = false;

    for (std::size_t i = 0; i < grid.size(); ++i) {
        double t = grid[i];
        double a = alpha(t);
        double scale = 2.0 * a * a;
        double L = left_margin(t);
        double R = right_margin(t);

        if (L < -kTol * scale || std::abs(L) <= kTol * scale) {
            // Near-equality or apparent violation: refine before judging.
            double lo = i > 0 ? grid[i - 1] : t;
            double hi = i + 1 < grid.size() ? grid[i + 1] : t;
            double lmin = lo < hi ? minimize(left_margin, lo, hi, 1e-10 * std::max(1.0, t)) : L;
            if (lmin < -kTol * scale) {
                rep.status = CheckStatus::Fails;
                rep.evidence.emplace_back(t, lmin);
                rep.narrative = "left inequality 2a^2 >= b^2 violated near t = " + std::to_string(t);
                return rep;
            }
            // Equality is admitted on the left.
        }
        worst_left = std::min(worst_left, L / scale);

        double rscale = std::max(beta(t) * beta(t), std::max(ratio * a * a, 1e-300));
        if (R < -kTol * rscale) {
            rep.status = CheckStatus::Fails;
            rep.evidence.emplace_back(t, R);
            rep.narrative = "right inequality b^2 > (m-1)/m 2a^2 violated at t = " + std::to_string(t);
            return rep;
        }
        if (std::abs(R) <= kTol * rscale) {
            double lo = i > 0 ? grid[i - 1] : t;
            double hi = i + 1 < grid.size() ? grid[i + 1] : t;
            double rmin = lo < hi ? minimize(right_margin, lo, hi, 1e-10 * std::max(1.0, t)) : R;
            if (rmin < -kTol * rscale) {
                rep.status = CheckStatus::Fails;
                rep.evidence.emplace_back(t, rmin);
                rep.narrative = "right inequality violated near t = " + std::to_string(t);
                return rep;
            }
            right_tie = true;  // strict inequality cannot be certified
            rep.evidence.emplace_back(t, R);
        }
        worst_right = std::min(worst_right, R / rscale);
    }

    rep.evidence.emplace_back(0.0, worst_left);
    rep.evidence.emplace_back(0.0, worst_right);
    if (right_tie) {
        rep.status = CheckStatus::Inconclusive;
        rep.narrative = "right inequality ties with equality within tolerance; strictness unverifiable";
    } else {
        rep.status = CheckStatus::Holds;
        rep.narrative = "both inequalities certified on the probe grid (left admits equality)";
    }
    return rep;
}

}  // namespace

HypothesisReport check_c(const CfwpGeometry& geom) {
    return check_c_impl(geom, geom.gamma() ? Condition::CPrime : Condition::C);
}

// ---------------------------------------------------------------------------
// Aggregate
// ---------------------------------------------------------------------------

HypothesesOutcome check_all(const CfwpGeometry& geom) {
    HypothesesOutcome out;
    if (!geom.gamma()) {
        out.reports.push_back(check_a(geom.alpha(), 1.0, geom.alpha().hint()));
        out.reports.push_back(check_b(geom));
        out.reports.push_back(check_c(geom));
    } else {
        HypothesisReport intrep;
        intrep.condition = Condition::Int;
        intrep.status = check_int_condition(geom);
        intrep.narrative = "s(t) = int_0^t gamma must be a bijection of R+";
        // Evidence: partial integrals of gamma over the probe horizons.
        try {
            const Profile& gm = *geom.gamma();
            double cum = 0.0, lo = 0.0;
            for (double hi : {1.0, 10.0, 1e2, 1e3, 1e4}) {
                cum += integrate_adaptive([&](double t) { return gm(t); }, lo, hi, 1e-8, 2000).value;
                intrep.evidence.emplace_back(hi, cum);
                lo = hi;
            }
        } catch (const Error&) {
            // non-integrable gamma: the status already says Fails
        }
        out.reports.push_back(std::move(intrep));

        const Profile& gamma = *geom.gamma();
        out.reports.push_back(check_a(geom.alpha(), 1.0, geom.alpha().hint(), &gamma));
        out.reports.push_back(check_b_prime(geom));
        out.reports.push_back(check_c(geom));
    }
    out.all_hold = std::all_of(out.reports.begin(), out.reports.end(),
                               [](const HypothesisReport& r) { return r.status == CheckStatus::Holds; });
    return out;
}

}  // namespace cfwp
