#include "cfwp/geometry.hpp"

#include <cmath>

#include "cfwp/quadrature.hpp"

namespace cfwp {

namespace {
constexpr std::size_t kProbePoints = 4096;
constexpr double kInvSqrt2 = 0.70710678118654752440;
}  // namespace

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
    if (!(lo > 0.0) || !(hi > lo) || n < 2) throw InvalidParams("log_grid: bad range");
    std::vector<double> out(n);
    const double llo = std::log(lo);
    const double step = (std::log(hi) - llo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(llo + step * static_cast<double>(i));
    out.front() = lo;
    out.back() = hi;
    return out;
}

// ---------------------------------------------------------------------------
// CfwpGeometry
// ---------------------------------------------------------------------------

CfwpGeometry::CfwpGeometry(int m, Profile alpha, Profile beta,
                           std::optional<Profile> gamma, Window window)
    : m_(m), alpha_(std::move(alpha)), beta_(std::move(beta)),
      gamma_(std::move(gamma)), window_(window) {
    if (m_ < 1) throw InvalidParams("CfwpGeometry: m must be >= 1");
    if (!(window_.tmin > 0.0) || !(window_.tmax > window_.tmin))
        throw InvalidParams("CfwpGeometry: bad working window");

    for (double t : log_grid(window_.tmin, window_.tmax, kProbePoints)) {
        double a = alpha_(t);
        double b = beta_(t);
        if (!(a > 0.0) || !std::isfinite(a))
            throw InvalidParams("alpha not positive at t=" + std::to_string(t));
        if (!(b > 0.0) || !std::isfinite(b))
            throw InvalidParams("beta not positive at t=" + std::to_string(t));
        if (gamma_) {
            double g = (*gamma_)(t);
            if (!(g > 0.0) || !std::isfinite(g))
                throw InvalidParams("gamma not positive at t=" + std::to_string(t));
        }
    }
}

CfwpGeometry CfwpGeometry::without_gamma() const {
    return CfwpGeometry(m_, alpha_, beta_, std::nullopt, window_);
}

// ---------------------------------------------------------------------------
// Presets
// ---------------------------------------------------------------------------

namespace {

double require_positive(const ParamBinding& params, const std::string& name) {
    if (!params.has(name)) throw InvalidParams("preset: missing constant '" + name + "'");
    double v = params.get(name);
    if (!(v > 0.0)) throw InvalidParams("preset: constant '" + name + "' must be positive");
    return v;
}

Profile gamma_conformal(const ParamBinding& params) {
    double b = params.get("b");
    ParamBinding bind;
    bind.set("a", params.get("a"));
    bind.set("b", b);
    return Profile::symbolic("sqrt((a+b*t)/t)", {"a", "b"}, bind,
                             AsymptoticHint::power(0.0, std::sqrt(b)));
}

}  // namespace

CfwpGeometry make_preset(Preset which, const ParamBinding& params, int m, Window window) {
    switch (which) {
        case Preset::Euclidean: {
            Profile alpha = Profile::symbolic("t/sqrt(2)", {}, {},
                                              AsymptoticHint::power(1.0, kInvSqrt2));
            Profile beta = Profile::symbolic("t", {}, {}, AsymptoticHint::power(1.0, 1.0));
            return CfwpGeometry(m, alpha, beta, std::nullopt, window);
        }
        case Preset::TaubNut: {
            if (m != 1) throw InvalidParams("taub-nut preset requires m = 1");
            double a = require_positive(params, "a");
            double b = require_positive(params, "b");
            (void)a;
            Profile alpha = Profile::symbolic("sqrt(2)*t", {}, {},
                                              AsymptoticHint::power(1.0, std::sqrt(2.0)));
            ParamBinding bb;
            bb.set("b", b);
            Profile beta = Profile::symbolic("2*t/(1+b*t)", {"b"}, bb,
                                             AsymptoticHint::power(0.0, 2.0 / b));
            return CfwpGeometry(m, alpha, beta, gamma_conformal(params), window);
        }
        case Preset::IwaiKatayama: {
            if (m != 1) throw InvalidParams("iwai-katayama preset requires m = 1");
            double a = require_positive(params, "a");
            double b = require_positive(params, "b");
            double c = require_positive(params, "c");
            double d = require_positive(params, "d");
            (void)a;
            (void)b;
            Profile alpha = Profile::symbolic("sqrt(2)*t", {}, {},
                                              AsymptoticHint::power(1.0, std::sqrt(2.0)));
            ParamBinding bcd;
            bcd.set("c", c);
            bcd.set("d", d);
            Profile beta = Profile::symbolic("2*t/sqrt(1+c*t+d*t^2)", {"c", "d"}, bcd,
                                             AsymptoticHint::power(0.0, 2.0 / std::sqrt(d)));
            return CfwpGeometry(m, alpha, beta, gamma_conformal(params), window);
        }
    }
    throw InvalidParams("unknown preset");
}

const char* to_string(CheckStatus s) {
    switch (s) {
        case CheckStatus::Holds: return "holds";
        case CheckStatus::Fails: return "fails";
        case CheckStatus::Inconclusive: return "inconclusive";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Condition (int)
// ---------------------------------------------------------------------------

CheckStatus check_int_condition(const CfwpGeometry& geom) {
    if (!geom.gamma()) throw InvalidParams("check_int_condition: geometry has no gamma");
    const Profile& gamma = *geom.gamma();

    // Integrability at 0. A divergent integrand either exhausts the budget
    // with an exploding estimate or drives a node into the non-finite range.
    bool lower_ok = false;
    try {
        auto r = integrate_adaptive([&](double t) { return gamma(t); }, 0.0, 1.0, 1e-10, 4000);
        lower_ok = r.converged && std::isfinite(r.value);
    } catch (const QuadratureFailure&) {
        lower_ok = false;
    }
    if (!lower_ok) return CheckStatus::Fails;

    // Tail: exact under a hint.
    const AsymptoticHint& hint = gamma.hint();
    if (hint.kind == AsymptoticHint::Kind::Power)
        return hint.p >= -1.0 ? CheckStatus::Holds : CheckStatus::Fails;
    if (hint.kind == AsymptoticHint::Kind::BoundedBelow)
        return hint.lower > 0.0 ? CheckStatus::Holds : CheckStatus::Inconclusive;

    // Horizon probe over T in {10, 10^2, 10^3, 10^4}.
    double cumulative = integrate_adaptive([&](double t) { return gamma(t); },
                                           0.0, 10.0, 1e-10, 4000).value;
    std::vector<double> increments;
    double lo = 10.0;
    for (double hi : {1e2, 1e3, 1e4}) {
        double inc = integrate_adaptive([&](double t) { return gamma(t); },
                                        lo, hi, 1e-10, 4000).value;
        increments.push_back(inc);
        cumulative += inc;
        lo = hi;
    }

    if (increments.back() <= 1e-10 * std::abs(cumulative))
        return CheckStatus::Fails;  // total integral saturated: finite

    bool accelerating = cumulative > 1e3;
    for (std::size_t i = 1; i < increments.size(); ++i)
        if (increments[i] < increments[i - 1] * (1.0 - 1e-9)) accelerating = false;
    return accelerating ? CheckStatus::Holds : CheckStatus::Inconclusive;
}

// ---------------------------------------------------------------------------
// Completion limits (Richardson over t = 1e-4, 1e-5, 1e-6)
// ---------------------------------------------------------------------------

namespace {

double richardson_limit(const Profile& f, const char* name) {
    const double probes[3] = {1e-4, 1e-5, 1e-6};
    double v[3];
    for (int i = 0; i < 3; ++i) v[i] = f(probes[i]) / probes[i];

    if (std::abs(v[1]) > 3.0 * std::abs(v[0]) && std::abs(v[2]) > 3.0 * std::abs(v[1]))
        throw LimitDiverges(std::string(name) + "/t grows without bound as t -> 0");

    // First-order Richardson with probe ratio 10; keep the deeper estimate.
    double r1 = (10.0 * v[1] - v[0]) / 9.0;
    double r2 = (10.0 * v[2] - v[1]) / 9.0;
    (void)r1;
    return r2;
}

}  // namespace

CompletionLimits completion_limits(const CfwpGeometry& geom) {
    CompletionLimits out;
    out.alpha_limit = richardson_limit(geom.alpha(), "alpha");
    out.beta_limit = richardson_limit(geom.beta(), "beta");
    out.smooth = std::abs(out.alpha_limit - kInvSqrt2) <= 1e-4 &&
                 std::abs(out.beta_limit - 1.0) <= 1e-4;
    return out;
}

// ---------------------------------------------------------------------------
// Reparametrization
// ---------------------------------------------------------------------------

ReparamResult reparametrize(const CfwpGeometry& geom, const ReparamOptions& opts) {
    if (!geom.gamma()) throw InvalidParams("reparametrize: geometry has no gamma");
    if (!opts.assume_int_condition) {
        CheckStatus st = check_int_condition(geom);
        if (st != CheckStatus::Holds)
            throw IntConditionFailed(std::string("condition (int) ") + to_string(st) +
                                     "; s(t) is not a bijection of R+");
    }

    const Profile& gamma = *geom.gamma();
    const Window& win = geom.window();
    const double t_lo = std::min(opts.t_floor, win.tmin);
    const double t_hi = win.tmax;
    const double decades = std::log10(t_hi / t_lo);
    const std::size_t n = static_cast<std::size_t>(decades * opts.nodes_per_decade) + 2;

    std::vector<double> tg = log_grid(t_lo, t_hi, n);

    // Cumulative s(t): singular head by adaptive quadrature, then one
    // Gauss-Kronrod panel per (narrow) grid segment.
    std::vector<double> sg(n);
    {
        auto head = integrate_adaptive([&](double t) { return gamma(t); },
                                       0.0, t_lo, 1e-12, 4000);
        if (!std::isfinite(head.value) || (!head.converged && head.error_estimate > 0.1 * std::abs(head.value)))
            throw QuadratureFailure("gamma is not integrable near t = 0");
        sg[0] = head.value;
        for (std::size_t i = 1; i < n; ++i) {
            double v, e;
            gauss_kronrod_15([&](double t) { return gamma(t); }, tg[i - 1], tg[i], v, e);
            sg[i] = sg[i - 1] + v;
        }
    }

    // Monotone log-log maps in both directions.
    std::vector<double> lt(n), ls(n);
    for (std::size_t i = 0; i < n; ++i) {
        lt[i] = std::log(tg[i]);
        ls[i] = std::log(sg[i]);
    }
    auto ts_map = std::make_shared<Pchip>(lt, ls);        // log t -> log s
    auto st_seed = std::make_shared<Pchip>(ls, lt);       // log s -> log t (seed)

    auto s_of_t = [ts_map](double t) { return std::exp((*ts_map)(std::log(t))); };

    // Bracketed monotone root finding for t(s): seed from the inverse table,
    // then bisect/Newton against the forward table to 1e-12 in log t.
    auto t_of_s = [ts_map, st_seed](double s) {
        const double target = std::log(s);
        double x = (*st_seed)(target);
        double lo = x - 0.1, hi = x + 0.1;
        while ((*ts_map)(lo) > target) { hi = lo; lo -= 0.5; }
        while ((*ts_map)(hi) < target) { lo = hi; hi += 0.5; }
        for (int it = 0; it < 200; ++it) {
            double mid = 0.5 * (lo + hi);
            double f = (*ts_map)(mid) - target;
            if (std::abs(f) <= 1e-12 || hi - lo <= 1e-14) return std::exp(mid);
            if (f < 0.0) lo = mid;
            else hi = mid;
        }
        return std::exp(0.5 * (lo + hi));
    };

    // Resample the rescaled profiles onto a uniform log-s grid (O(1) lookup).
    const double s_lo = sg.front();
    const double s_hi = sg.back();
    const double s_decades = std::log10(s_hi / s_lo);
    const std::size_t ns = static_cast<std::size_t>(s_decades * opts.nodes_per_decade) + 2;
    std::vector<double> snodes = log_grid(s_lo, s_hi, ns);
    std::vector<double> atab(ns), btab(ns);
    for (std::size_t j = 0; j < ns; ++j) {
        double t = t_of_s(snodes[j]);
        double g = gamma(t);
        atab[j] = g * geom.alpha()(t);
        btab[j] = g * geom.beta()(t);
    }

    // Transport asymptotic hints through the change of variable: for
    // gamma ~ g (constant at infinity), s ~ g t, so a power profile C t^p
    // becomes g^(1-p) C s^p.
    AsymptoticHint ah = AsymptoticHint::none();
    AsymptoticHint bh = AsymptoticHint::none();
    if (gamma.hint().kind == AsymptoticHint::Kind::Power && gamma.hint().p == 0.0) {
        double g = gamma.hint().coeff;
        const AsymptoticHint& a0 = geom.alpha().hint();
        const AsymptoticHint& b0 = geom.beta().hint();
        if (a0.kind == AsymptoticHint::Kind::Power)
            ah = AsymptoticHint::power(a0.p, std::pow(g, 1.0 - a0.p) * a0.coeff);
        if (b0.kind == AsymptoticHint::Kind::Power)
            bh = AsymptoticHint::power(b0.p, std::pow(g, 1.0 - b0.p) * b0.coeff);
    }

    Window swin;
    swin.tmin = std::max(s_lo, s_of_t(win.tmin) * 0.999);
    swin.tmax = s_hi;

    CfwpGeometry reparam(geom.m(),
                         Profile::tabulated(snodes, atab, ah),
                         Profile::tabulated(snodes, btab, bh),
                         std::nullopt, swin);

    return ReparamResult{std::move(reparam), s_of_t, t_of_s};
}

}  // namespace cfwp
