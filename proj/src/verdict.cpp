#include "cfwp/verdict.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <thread>

#include "cfwp/quadrature.hpp"

namespace cfwp {

const char* to_string(VerdictKind v) {
    switch (v) {
        case VerdictKind::NoL2: return "no-L2";
        case VerdictKind::CandidateL2: return "candidate-L2";
        case VerdictKind::Inconclusive: return "inconclusive";
    }
    return "?";
}

const char* to_string(L2Class c) {
    switch (c) {
        case L2Class::Divergent: return "divergent";
        case L2Class::Convergent: return "convergent";
        case L2Class::Inconclusive: return "inconclusive";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// classify
// ---------------------------------------------------------------------------

namespace {

L2Class classify_l2(const TrajectoryEvidence& ev) {
    if (ev.blow_up) return L2Class::Divergent;  // magnitude passed 1e300
    for (const auto& [horizon, p] : ev.p_partials)
        if (p >= 1e307) return L2Class::Divergent;  // saturated accumulator
    if (ev.p_partials.size() < 3) return L2Class::Inconclusive;

    std::vector<double> inc;
    for (std::size_t i = 1; i < ev.p_partials.size(); ++i)
        inc.push_back(std::max(0.0, ev.p_partials[i].second - ev.p_partials[i - 1].second));

    double last = inc.back();
    double prev = inc[inc.size() - 2];
    if (last > 0.0 && last >= 0.5 * prev) return L2Class::Divergent;

    bool shrinking = true;
    for (std::size_t j = 1; j < inc.size(); ++j)
        if (inc[j] > 0.1 * inc[j - 1] + 1e-300) shrinking = false;
    if (shrinking || (last == 0.0 && prev == 0.0)) return L2Class::Convergent;

    return L2Class::Inconclusive;
}

}  // namespace

ModeVerdict classify_system(const CoeffField& coeffs, const WeightFn& weight,
                            const ClassifyOptions& opts) {
    ModeVerdict out;
    try {
        IndicialData ind = indicial(coeffs, weight);
        std::vector<Trajectory> bounded = solve_bounded(coeffs, ind, opts.shoot);
        out.bounded_dim = static_cast<int>(bounded.size());

        if (bounded.empty()) {
            out.verdict = VerdictKind::NoL2;
            out.note = "no indicial direction meets the boundedness threshold at t = 0";
            return out;
        }

        bool all_divergent = true;
        for (const Trajectory& traj : bounded) {
            TrajectoryEvidence ev;
            ev.exponent = traj.indicial_exponent;
            ev.blow_up = traj.blow_up;
            for (double horizon : {10.0, 1e2, 1e3, 1e4}) {
                if (horizon <= opts.shoot.t_init || horizon > opts.shoot.t_max * (1 + 1e-9))
                    continue;
                double p = traj.l2_at(horizon);
                if (std::isfinite(p)) ev.p_partials.emplace_back(horizon, p);
            }
            ev.l2 = classify_l2(ev);
            if (ev.l2 != L2Class::Divergent) all_divergent = false;
            out.trajectories.push_back(std::move(ev));
        }

        MatchResult match = match_infinity(coeffs, bounded, opts.shoot);
        out.matching_degenerate = match.degenerate;
        if (!match.degenerate) out.matching_residual = match.residual;

        if (!match.degenerate && match.residual < opts.candidate_ceiling) {
            out.verdict = VerdictKind::CandidateL2;
            out.note = "bounded subspace meets the recessive direction at infinity";
        } else if (all_divergent && !match.degenerate && match.residual > opts.residual_floor) {
            out.verdict = VerdictKind::NoL2;
            out.note = "every bounded solution carries divergent L2 mass and misses the "
                       "recessive direction";
        } else {
            out.verdict = VerdictKind::Inconclusive;
            out.note = match.degenerate
                           ? "asymptotically degenerate directions: matching residual undefined"
                           : "evidence falls between the decision floors";
        }
    } catch (const Error& e) {
        out.verdict = VerdictKind::Inconclusive;
        out.note = std::string("analysis failed: ") + e.what();
    }
    return out;
}

PreparedGeometry prepare_geometry(const CfwpGeometry& geom) {
    HypothesesOutcome hyp = check_all(geom);
    if (geom.gamma())
        return PreparedGeometry{reparametrize(geom).geometry, std::move(hyp)};
    return PreparedGeometry{geom, std::move(hyp)};
}

ModeVerdict classify_mode(const PreparedGeometry& prepared, const ModeIndex& mode,
                          const ClassifyOptions& opts) {
    RadialCoeffs co(prepared.effective, mode);
    ModeVerdict v = classify_system(co.field(), co.weight_fn(), opts);
    v.mode = mode;
    v.hypotheses_ok = prepared.hypotheses.all_hold;
    return v;
}

ModeVerdict classify_mode(const CfwpGeometry& geom, const ModeIndex& mode,
                          const ClassifyOptions& opts) {
    return classify_mode(prepare_geometry(geom), mode, opts);
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

SweepReport sweep(const CfwpGeometry& geom, const SweepGrid& grid, const SweepOptions& opts) {
    if (grid.k_max < grid.k_min) throw ResourceLimit("sweep: empty k range");
    if (grid.k_max - grid.k_min + 1 > 64) throw ResourceLimit("sweep: k range exceeds 64 values");
    if (grid.lambda_values.empty()) throw ResourceLimit("sweep: empty lambda grid");
    if (grid.lambda_values.size() > 1024) throw ResourceLimit("sweep: lambda grid exceeds 1024 values");
    if (grid.l_values.empty()) throw ResourceLimit("sweep: empty l grid");
    if (grid.eps_values.empty()) throw ResourceLimit("sweep: empty epsilon grid");
    for (int l : grid.l_values)
        if (l < 0 || l > geom.m() - 1) throw ResourceLimit("sweep: l outside [0, m-1]");
    for (int e : grid.eps_values)
        if (e != 1 && e != -1) throw ResourceLimit("sweep: epsilon must be +-1");

    SweepReport report;
    PreparedGeometry prepared = prepare_geometry(geom);
    report.hypotheses = prepared.hypotheses;

    for (int k = grid.k_min; k <= grid.k_max; ++k)
        for (int l : grid.l_values)
            for (int e : grid.eps_values)
                for (double lam : grid.lambda_values)
                    report.modes.push_back(ModeIndex{k, l, e, lam});

    report.verdicts.resize(report.modes.size());

    unsigned jobs = opts.jobs ? opts.jobs : std::max(1u, std::thread::hardware_concurrency());
    jobs = std::min<unsigned>(jobs, static_cast<unsigned>(report.modes.size()));

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= report.modes.size()) return;
            try {
                report.verdicts[i] = classify_mode(prepared, report.modes[i], opts.classify);
            } catch (const Error& e) {
                ModeVerdict v;
                v.mode = report.modes[i];
                v.verdict = VerdictKind::Inconclusive;
                v.note = std::string("classification failed: ") + e.what();
                report.verdicts[i] = std::move(v);
            }
        }
    };

    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    double best_residual = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < report.verdicts.size(); ++i) {
        const ModeVerdict& v = report.verdicts[i];
        switch (v.verdict) {
            case VerdictKind::NoL2: ++report.no_l2; break;
            case VerdictKind::CandidateL2: ++report.candidate; break;
            case VerdictKind::Inconclusive: ++report.inconclusive; break;
        }
        if (v.matching_residual && *v.matching_residual < best_residual) {
            best_residual = *v.matching_residual;
            report.worst_index = i;
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// identity suite
// ---------------------------------------------------------------------------

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;

IdentityCheck make_check(std::string name, double residual, double threshold) {
    IdentityCheck c;
    c.name = std::move(name);
    c.residual = residual;
    c.threshold = threshold;
    c.status = residual <= threshold ? IdentityCheck::Status::Pass : IdentityCheck::Status::Fail;
    return c;
}

IdentityCheck skipped(std::string name, std::string /*why*/ = {}) {
    IdentityCheck c;
    c.name = std::move(name);
    c.status = IdentityCheck::Status::Skipped;
    return c;
}

// Trace identity rho + tau = -eps (-1)^l beta / (2 alpha^2) at random points.
IdentityCheck check_trace_identity(const CfwpGeometry& geom, const RadialCoeffs& co) {
    std::mt19937 rng(0xC0FFEE);
    std::uniform_real_distribution<double> logt(std::log(geom.window().tmin),
                                                std::log(geom.window().tmax));
    double worst = 0.0;
    for (int i = 0; i < 512; ++i) {
        double t = std::exp(logt(rng));
        double lhs = co.rho(t) + co.tau(t);
        double a = geom.alpha()(t);
        double rhs = -co.sign() * geom.beta()(t) / (2.0 * a * a);
        double scale = std::max({std::abs(co.rho(t)), std::abs(co.tau(t)), std::abs(rhs), 1e-300});
        worst = std::max(worst, std::abs(lhs - rhs) / scale);
    }
    return make_check("trace_identity", worst, 1e-12);
}

IdentityCheck check_det_transport(const CfwpGeometry& geom, const RadialCoeffs& co) {
    const double t0 = 1.0, t1 = 20.0;
    IntegrateOptions io;
    io.rel_tol = 1e-12;
    Trajectory c1 = integrate(co.field(), t0, t1, Vec2{1.0, 0.0}, io);
    Trajectory c2 = integrate(co.field(), t0, t1, Vec2{0.0, 1.0}, io);
    if (c1.blow_up || c2.blow_up) return skipped("det_transport");
    double det = c1.states.back()[0] * c2.states.back()[1] -
                 c1.states.back()[1] * c2.states.back()[0];
    auto q = integrate_adaptive(
        [&](double t) {
            double a = geom.alpha()(t);
            return co.sign() * geom.beta()(t) / (2.0 * a * a);
        },
        t0, t1, 1e-13);
    double expected = std::exp(-q.value);
    return make_check("det_transport", std::abs(det - expected) / std::abs(expected), 1e-8);
}

// Integrate the sigma-positive variant of the mode and assert the pointwise
// inequality and the exponential lower bound wherever U W > 0.
std::pair<IdentityCheck, IdentityCheck> check_uw_inequalities(const CfwpGeometry& geom,
                                                              const ModeIndex& mode) {
    ModeIndex flipped = mode;
    flipped.lambda = (mode.l % 2 == 0) ? std::abs(mode.lambda) : -std::abs(mode.lambda);
    RadialCoeffs co(geom, flipped);

    const double t0 = std::max(0.05, geom.window().tmin * 10.0);
    const double t1 = 1e3;
    IntegrateOptions io;
    io.rel_tol = 1e-10;
    Trajectory traj = integrate(co.field(), t0, t1, Vec2{1.0, 1.0}, io);

    // (in): (UW)' + UW/(sqrt(2) alpha) >= -1e-9 (U^2 + W^2) where UW > 0.
    double worst_in = 0.0;
    for (std::size_t i = 0; i < traj.nodes.size(); ++i) {
        double t = traj.nodes[i];
        double u = traj.states[i][0], w = traj.states[i][1];
        double uw = u * w;
        if (!(uw > 0.0) || !std::isfinite(uw)) continue;
        double nsq = u * u + w * w;
        if (!(nsq > 0.0) || !std::isfinite(nsq)) continue;
        Mat2 m = co.matrix_at(t);
        double duw = (m.a00 + m.a11) * uw + m.a01 * nsq;
        double lhs = duw + uw / (kSqrt2 * geom.alpha()(t));
        worst_in = std::max(worst_in, -lhs / nsq);
    }

    // (uwnega): on each maximal UW > 0 node run starting at x,
    // UW(t) >= UW(x) exp(-int_x^t 1/(sqrt 2 alpha)) - 1e-9 max|UW|.
    double worst_bound = 0.0;
    std::size_t i = 0;
    while (i < traj.nodes.size()) {
        if (!(traj.states[i][0] * traj.states[i][1] > 0.0)) {
            ++i;
            continue;
        }
        std::size_t start = i;
        std::size_t end = i;
        double max_uw = 0.0;
        while (end < traj.nodes.size() &&
               traj.states[end][0] * traj.states[end][1] > 0.0 &&
               std::isfinite(traj.states[end][0] * traj.states[end][1])) {
            max_uw = std::max(max_uw, std::abs(traj.states[end][0] * traj.states[end][1]));
            ++end;
        }
        double uw_x = traj.states[start][0] * traj.states[start][1];
        double integral = 0.0;
        for (std::size_t j = start + 1; j < end; ++j) {
            double v, err;
            gauss_kronrod_15([&](double s) { return 1.0 / (kSqrt2 * geom.alpha()(s)); },
                             traj.nodes[j - 1], traj.nodes[j], v, err);
            integral += v;
            double bound = uw_x * std::exp(-integral);
            double uw_j = traj.states[j][0] * traj.states[j][1];
            if (max_uw > 0.0) worst_bound = std::max(worst_bound, (bound - uw_j) / max_uw);
        }
        i = end;
    }

    return {make_check("inequality_in", worst_in, 1e-9),
            make_check("bound_uwnega", worst_bound, 1e-9)};
}

// Special case k = 0, m = 2l+1, (-1)^l = -eps: D = U - W satisfies a scalar
// equation with a quadrature closed form.
IdentityCheck check_difference_equation(const CfwpGeometry& geom, const ModeIndex& mode) {
    bool parity = (mode.l % 2 == 0);
    double par = parity ? 1.0 : -1.0;
    if (mode.k != 0 || geom.m() != 2 * mode.l + 1 || par != -mode.epsilon)
        return skipped("difference_d");

    RadialCoeffs co(geom, mode);
    const double t0 = 1.0, t1 = 16.0;
    IntegrateOptions io;
    io.rel_tol = 1e-11;
    Trajectory traj = integrate(co.field(), t0, t1, Vec2{2.0, 1.0}, io);
    if (traj.blow_up) return skipped("difference_d");
    double d_num = traj.states.back()[0] - traj.states.back()[1];

    auto q = integrate_adaptive([&](double t) { return co.rho(t) - co.sigma(t); }, t0, t1, 1e-13);
    double d_exact = (2.0 - 1.0) * std::exp(q.value);
    return make_check("difference_d", std::abs(d_num - d_exact) / std::abs(d_exact), 1e-8);
}

IdentityCheck check_lambda0_decoupling(const CfwpGeometry& geom, const ModeIndex& mode) {
    if (mode.lambda != 0.0) return skipped("lambda0_decoupling");
    RadialCoeffs co(geom, mode);
    const double t0 = 1.0, t1 = 16.0;
    IntegrateOptions io;
    io.rel_tol = 1e-11;
    Trajectory traj = integrate(co.field(), t0, t1, Vec2{1.0, 0.0}, io);
    auto q = integrate_adaptive([&](double t) { return co.rho(t); }, t0, t1, 1e-13);
    double expected = std::exp(q.value);
    double residual = std::abs(traj.states.back()[0] - expected) / std::abs(expected);
    // the W channel must stay identically zero
    residual = std::max(residual, std::abs(traj.states.back()[1]));
    return make_check("lambda0_decoupling", residual, 1e-8);
}

IdentityCheck check_transport(const CfwpGeometry& geom, const ModeIndex& mode) {
    if (!geom.alpha().is_symbolic() || !geom.beta().is_symbolic())
        return skipped("transport_uw");
    RawCoeffs raw(geom, mode);
    RadialCoeffs reduced(geom, mode);
    auto w = substitution_weight(geom);

    const double t0 = 0.5, t1 = 4.0;
    Vec2 uw0{0.8, -0.35};
    IntegrateOptions io;
    io.rel_tol = 1e-11;
    Trajectory small = integrate(raw.field(), t0, t1, uw0, io);
    Trajectory big = integrate(reduced.field(), t0, t1,
                               Vec2{uw0[0] * w.value(t0), uw0[1] * w.value(t0)}, io);
    double worst = 0.0;
    double scale = w.value(t1);
    for (int i = 0; i < 2; ++i) {
        double lifted = small.states.back()[i] * scale;
        double direct = big.states.back()[i];
        worst = std::max(worst, std::abs(lifted - direct) /
                                    std::max({std::abs(lifted), std::abs(direct), 1e-12}));
    }
    return make_check("transport_uw", worst, 1e-6);
}

}  // namespace

IdentityReport verify_identities(const CfwpGeometry& geom, const ModeIndex& mode) {
    IdentityReport rep;

    CfwpGeometry eff = geom.gamma() ? reparametrize(geom).geometry : geom;
    validate_mode(mode, eff.m());
    RadialCoeffs co(eff, mode);

    rep.checks.push_back(check_trace_identity(eff, co));
    rep.checks.push_back(check_det_transport(eff, co));
    auto [in_check, bound_check] = check_uw_inequalities(eff, mode);
    rep.checks.push_back(std::move(in_check));
    rep.checks.push_back(std::move(bound_check));
    rep.checks.push_back(check_difference_equation(eff, mode));
    rep.checks.push_back(check_lambda0_decoupling(eff, mode));
    rep.checks.push_back(check_transport(eff, mode));

    rep.all_passed = std::none_of(rep.checks.begin(), rep.checks.end(), [](const IdentityCheck& c) {
        return c.status == IdentityCheck::Status::Fail;
    });
    return rep;
}

}  // namespace cfwp
