// Acceptance suite: runs every release criterion end-to-end and prints one
// pass/fail line per criterion. Exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "cfwp/config.hpp"
#include "cfwp/verdict.hpp"

using namespace cfwp;

namespace {

int g_failures = 0;

struct Criterion {
    std::string name;
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }

    void finish() {
        if (ok) {
            std::printf("[PASS] %s%s%s\n", name.c_str(), detail.empty() ? "" : " — ",
                        detail.c_str());
        } else {
            std::printf("[FAIL] %s — %s\n", name.c_str(), detail.c_str());
            ++g_failures;
        }
    }
};

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

CfwpGeometry ik_preset(double a, double b, double c, double d) {
    return make_preset(Preset::IwaiKatayama,
                       ParamBinding{{"a", a}, {"b", b}, {"c", c}, {"d", d}}, 1);
}

const double kSqrt2 = std::sqrt(2.0);
const double kHalfPow = std::pow(2.0, -1.5);

// ---------------------------------------------------------------------------

void criterion_1_hypotheses() {
    Criterion crit{"criterion 1: hypothesis checks hold across the Iwai-Katayama grids", true, ""};
    auto start = std::chrono::steady_clock::now();

    auto check_geom = [&](double a, double b, double c, double d) {
        auto outcome = check_all(ik_preset(a, b, c, d));
        char label[64];
        std::snprintf(label, sizeof(label), "(a=%g,b=%g,c=%g,d=%g)", a, b, c, d);
        crit.require(outcome.reports.size() == 4, std::string(label) + ": wrong report count");
        for (const auto& rep : outcome.reports)
            crit.require(rep.status == CheckStatus::Holds,
                         std::string(label) + ": condition " + to_string(rep.condition) +
                             " is " + to_string(rep.status));
    };

    for (double a : {0.5, 1.0, 2.0})
        for (double b : {0.5, 1.0, 2.0}) check_geom(a, b, 1.0, 1.0);
    for (double c : {0.1, 1.0, 10.0})
        for (double d : {0.1, 1.0, 10.0}) check_geom(1.0, 1.0, c, d);

    double elapsed = seconds_since(start);
    crit.require(elapsed < 5.0, "runtime " + std::to_string(elapsed) + "s exceeds 5s");
    char buf[64];
    std::snprintf(buf, sizeof(buf), "18 configs in %.2fs", elapsed);
    crit.detail = crit.ok ? buf : crit.detail;
    crit.finish();
}

void criterion_2_vanishing_sweep() {
    Criterion crit{"criterion 2: vanishing sweep is uniformly no-L2", true, ""};
    auto start = std::chrono::steady_clock::now();

    SweepGrid grid;
    grid.k_min = -4;
    grid.k_max = 4;
    grid.l_values = {0};
    grid.eps_values = {-1, 1};
    for (double l : {0.25, kHalfPow, 0.5, 1.0, kSqrt2, 2.0, 5.0}) {
        grid.lambda_values.push_back(l);
        grid.lambda_values.push_back(-l);
    }
    grid.lambda_values.push_back(0.0);

    SweepOptions opts;
    opts.classify.shoot.rel_tol = 1e-10;

    for (const char* name : {"iwai-katayama", "euclidean"}) {
        CfwpGeometry geom = std::string(name) == "euclidean"
                                ? make_preset(Preset::Euclidean, {}, 1)
                                : ik_preset(1, 1, 1, 1);
        SweepReport report = sweep(geom, grid, opts);
        crit.require(report.verdicts.size() == 9 * 2 * 15,
                     std::string(name) + ": unexpected grid size");
        crit.require(report.no_l2 == report.verdicts.size(),
                     std::string(name) + ": " + std::to_string(report.candidate) +
                         " candidate, " + std::to_string(report.inconclusive) +
                         " inconclusive verdicts");
        crit.require(report.hypotheses.all_hold, std::string(name) + ": hypotheses not all holds");
    }

    double elapsed = seconds_since(start);
    crit.require(elapsed < 120.0, "runtime " + std::to_string(elapsed) + "s exceeds 2min");
    char buf[96];
    std::snprintf(buf, sizeof(buf), "2 geometries x 270 modes at relTol 1e-10 in %.1fs", elapsed);
    crit.detail = crit.ok ? buf : crit.detail;
    crit.finish();
}

void criterion_3_identity_suite() {
    Criterion crit{"criterion 3: identity suite within thresholds", true, ""};
    auto euclid = make_preset(Preset::Euclidean, {}, 1);

    auto get = [](const IdentityReport& rep, const std::string& name) -> const IdentityCheck& {
        for (const auto& c : rep.checks)
            if (c.name == name) return c;
        static IdentityCheck missing;
        return missing;
    };

    // trace identity and determinant transport over 10 random modes
    std::mt19937 rng(20240817);
    std::uniform_int_distribution<int> kd(-2, 2);
    std::uniform_real_distribution<double> ld(0.2, 2.0);
    int transports = 0;
    for (int i = 0; i < 10; ++i) {
        ModeIndex mode{kd(rng), 0, i % 2 == 0 ? 1 : -1, ld(rng)};
        auto rep = verify_identities(euclid, mode);
        const auto& trace = get(rep, "trace_identity");
        crit.require(trace.status == IdentityCheck::Status::Pass && trace.residual <= 1e-12,
                     "trace identity residual " + std::to_string(trace.residual));
        const auto& det = get(rep, "det_transport");
        crit.require(det.status == IdentityCheck::Status::Pass && det.residual <= 1e-8,
                     "det transport residual " + std::to_string(det.residual));
        const auto& tr = get(rep, "transport_uw");
        if (transports < 3) {
            crit.require(tr.status == IdentityCheck::Status::Pass && tr.residual <= 1e-6,
                         "transport residual " + std::to_string(tr.residual));
            ++transports;
        }
    }

    // special case k=0, m=1, l=0, eps=-1 at lambda in {0.5, 1, 2}
    for (double lam : {0.5, 1.0, 2.0}) {
        auto rep = verify_identities(euclid, ModeIndex{0, 0, -1, lam});
        const auto& d = get(rep, "difference_d");
        crit.require(d.status == IdentityCheck::Status::Pass && d.residual <= 1e-8,
                     "difference equation residual " + std::to_string(d.residual) +
                         " at lambda " + std::to_string(lam));
    }

    // lambda = 0 decoupled closed form
    auto rep0 = verify_identities(euclid, ModeIndex{1, 0, +1, 0.0});
    const auto& dec = get(rep0, "lambda0_decoupling");
    crit.require(dec.status == IdentityCheck::Status::Pass && dec.residual <= 1e-8,
                 "decoupling residual " + std::to_string(dec.residual));

    crit.finish();
}

void criterion_4_indicial() {
    Criterion crit{"criterion 4: indicial data exact on the euclidean family", true, ""};
    auto euclid = make_preset(Preset::Euclidean, {}, 1);
    for (double lam : {0.0, 1.0, kSqrt2, 3.0}) {
        RadialCoeffs co(euclid, ModeIndex{0, 0, +1, lam});
        auto ind = indicial(co);
        double off = kSqrt2 * lam;
        crit.require(std::abs(ind.residue.a00 + 0.5) <= 1e-6, "residue a00");
        crit.require(std::abs(ind.residue.a11 + 0.5) <= 1e-6, "residue a11");
        crit.require(std::abs(ind.residue.a01 - off) <= 1e-6, "residue a01");
        crit.require(std::abs(ind.residue.a10 - off) <= 1e-6, "residue a10");
        crit.require(std::abs(ind.exponents[0] - (-0.5 + kSqrt2 * std::abs(lam))) <= 1e-6,
                     "exponent+ at lambda " + std::to_string(lam));
        crit.require(std::abs(ind.exponents[1] - (-0.5 - kSqrt2 * std::abs(lam))) <= 1e-6,
                     "exponent- at lambda " + std::to_string(lam));
        crit.require(std::abs(ind.threshold - 1.5) <= 0.02,
                     "threshold " + std::to_string(ind.threshold));
    }
    crit.finish();
}

void criterion_5_completion_limits() {
    Criterion crit{"criterion 5: reparametrized Iwai-Katayama completes smoothly", true, ""};
    auto rep = reparametrize(ik_preset(1, 1, 1, 1));
    auto lim = completion_limits(rep.geometry);
    crit.require(std::abs(lim.alpha_limit - 1.0 / kSqrt2) <= 1e-2,
                 "alpha~/s limit " + std::to_string(lim.alpha_limit));
    crit.require(std::abs(lim.beta_limit - 1.0) <= 1e-2,
                 "beta~/s limit " + std::to_string(lim.beta_limit));
    crit.require(lim.smooth, "smooth flag not set");
    char buf[96];
    std::snprintf(buf, sizeof(buf), "limits (%.6f, %.6f)", lim.alpha_limit, lim.beta_limit);
    crit.detail = crit.ok ? buf : crit.detail;
    crit.finish();
}

void criterion_6_negative_control() {
    Criterion crit{"criterion 6: planted bound state is detected as candidate-L2", true, ""};
    CoeffField field = [](double t) {
        double s = 0.25 / t - 1.0 / kSqrt2;
        return Mat2{0.0, s, s, 0.0};
    };
    WeightFn weight = [](double t) { return std::pow(t, 0.25); };
    auto v = classify_system(field, weight);
    crit.require(v.verdict == VerdictKind::CandidateL2,
                 std::string("verdict ") + to_string(v.verdict));
    crit.require(v.matching_residual.has_value(), "no matching residual");
    if (v.matching_residual) {
        crit.require(*v.matching_residual < 1e-6,
                     "residual " + std::to_string(*v.matching_residual));
        char buf[64];
        std::snprintf(buf, sizeof(buf), "residual %.3e", *v.matching_residual);
        crit.detail = crit.ok ? buf : crit.detail;
    }
    crit.finish();
}

void criterion_7_condition_a() {
    Criterion crit{"criterion 7: condition (a) classifier on linear profiles", true, ""};
    const double cs[3] = {0.5, 1.0 / kSqrt2, 1.0};
    const CheckStatus expect[3] = {CheckStatus::Fails, CheckStatus::Holds, CheckStatus::Holds};

    for (int i = 0; i < 3; ++i) {
        ParamBinding bind{{"c", cs[i]}};
        Profile with_hint = Profile::symbolic("c*t", {"c"}, bind,
                                              AsymptoticHint::power(1.0, cs[i]));
        auto hinted = check_a(with_hint, 1.0, with_hint.hint());
        crit.require(hinted.status == expect[i],
                     "hinted c=" + std::to_string(cs[i]) + " gave " + to_string(hinted.status));

        Profile bare = Profile::symbolic("c*t", {"c"}, bind);
        auto probed = check_a(bare, 1.0, AsymptoticHint::none());
        crit.require(probed.status == expect[i] || probed.status == CheckStatus::Inconclusive,
                     "hint-free c=" + std::to_string(cs[i]) + " gave the wrong definite answer " +
                         to_string(probed.status));
    }
    crit.finish();
}

void criterion_8_numerical_hygiene() {
    Criterion crit{"criterion 8: numerical hygiene", true, ""};

    // 8a: parse-serialize-parse on 1000 generated expressions.
    {
        std::mt19937 rng(1234);
        std::uniform_real_distribution<double> cd(0.1, 4.0);
        std::function<std::string(int)> gen = [&](int depth) -> std::string {
            auto pick = std::uniform_int_distribution<int>(0, 9)(rng);
            if (depth <= 0 || pick < 3) {
                switch (std::uniform_int_distribution<int>(0, 3)(rng)) {
                    case 0: return "t";
                    case 1: return "a";
                    case 2: return "b";
                    default: {
                        char buf[32];
                        std::snprintf(buf, sizeof(buf), "%.3f", cd(rng));
                        return buf;
                    }
                }
            }
            switch (std::uniform_int_distribution<int>(0, 8)(rng)) {
                case 0: return "(" + gen(depth - 1) + "+" + gen(depth - 1) + ")";
                case 1: return "(" + gen(depth - 1) + "-" + gen(depth - 1) + ")";
                case 2: return "(" + gen(depth - 1) + "*" + gen(depth - 1) + ")";
                case 3: return "(" + gen(depth - 1) + "/" + gen(depth - 1) + ")";
                case 4: return "(" + gen(depth - 1) + "^1.5)";
                case 5: return "sqrt(" + gen(depth - 1) + ")";
                case 6: return "exp(" + gen(depth - 1) + ")";
                case 7: return "log(" + gen(depth - 1) + ")";
                default: return "(-" + gen(depth - 1) + ")";
            }
        };
        int ok = 0;
        for (int i = 0; i < 1000; ++i) {
            std::string text = gen(4);
            WarpExpr e = WarpExpr::parse(text, {"a", "b"});
            std::string canon = e.serialize();
            WarpExpr e2 = WarpExpr::parse(canon, {"a", "b"});
            if (e2.serialize() == canon && e.structurally_equal(e2)) ++ok;
        }
        crit.require(ok == 1000, "round-trip failures: " + std::to_string(1000 - ok));
    }

    // 8b: symbolic derivative against central differences at 1e-7.
    {
        std::mt19937 rng(777);
        std::uniform_real_distribution<double> cd(0.2, 3.0);
        int checked = 0, attempts = 0;
        while (checked < 300 && attempts < 20000) {
            ++attempts;
            char buf[96];
            double c1 = cd(rng), c2 = cd(rng);
            int form = std::uniform_int_distribution<int>(0, 4)(rng);
            switch (form) {
                case 0: std::snprintf(buf, sizeof(buf), "sqrt((%.3f+a*t)/t)", c1); break;
                case 1: std::snprintf(buf, sizeof(buf), "%.3f*t/sqrt(1+a*t+b*t^2)", c1); break;
                case 2: std::snprintf(buf, sizeof(buf), "exp(-%.3f*t)*t^%.3f", c1, c2); break;
                case 3: std::snprintf(buf, sizeof(buf), "log(1+%.3f*t)/(%.3f+t)", c1, c2); break;
                default: std::snprintf(buf, sizeof(buf), "(t^%.3f+%.3f)/sqrt(t)", c2, c1); break;
            }
            WarpExpr e = WarpExpr::parse(buf, {"a", "b"});
            ParamBinding bind{{"a", cd(rng)}, {"b", cd(rng)}};
            double t = cd(rng);
            const double h = 1e-5 * std::max(1.0, t);
            try {
                double fd = (e.eval(t + h, bind) - e.eval(t - h, bind)) / (2.0 * h);
                double sym = e.differentiate().eval(t, bind);
                if (std::abs(sym - fd) > 1e-7 * std::max({1.0, std::abs(sym), std::abs(fd)})) {
                    crit.require(false, std::string("derivative mismatch for ") + buf);
                    break;
                }
                ++checked;
            } catch (const DomainError&) {
                continue;
            }
        }
        crit.require(checked == 300, "derivative corpus incomplete");
    }

    // 8c: tolerance-halving stability.
    {
        auto euclid = make_preset(Preset::Euclidean, {}, 1);
        RadialCoeffs co(euclid, ModeIndex{2, 0, +1, 1.3});
        IntegrateOptions loose;
        loose.rel_tol = 1e-8;
        IntegrateOptions tight;
        tight.rel_tol = 0.5e-8;
        Trajectory a = integrate(co.field(), 0.01, 1e3, Vec2{1.0, 1.0}, loose);
        Trajectory b = integrate(co.field(), 0.01, 1e3, Vec2{1.0, 1.0}, tight);
        double diff = std::max(std::abs(a.states.back()[0] - b.states.back()[0]),
                               std::abs(a.states.back()[1] - b.states.back()[1]));
        double scale = std::max(std::abs(a.states.back()[0]), std::abs(a.states.back()[1]));
        crit.require(diff < 10.0 * a.stats.accumulated_rel_error * scale,
                     "endpoint moved by more than 10x the estimated error");
    }

    // 8d: byte-identical sweep reports across two runs (serial vs parallel).
    {
        auto euclid = make_preset(Preset::Euclidean, {}, 1);
        SweepGrid grid;
        grid.k_min = -2;
        grid.k_max = 2;
        grid.lambda_values = {0.0, 0.5, kSqrt2};
        SweepOptions serial;
        serial.jobs = 1;
        SweepOptions parallel;
        parallel.jobs = 4;
        Json geometry_block = Json::parse(R"json({"m":1,"alpha":"t/sqrt(2)","beta":"t"})json");
        std::string dump1 = sweep_report_to_json(sweep(euclid, grid, serial), geometry_block).dump();
        std::string dump2 = sweep_report_to_json(sweep(euclid, grid, parallel), geometry_block).dump();
        crit.require(dump1 == dump2, "sweep reports differ between runs");
    }

    crit.finish();
}

}  // namespace

int main() {
    std::printf("acceptance suite\n================\n");
    criterion_1_hypotheses();
    criterion_2_vanishing_sweep();
    criterion_3_identity_suite();
    criterion_4_indicial();
    criterion_5_completion_limits();
    criterion_6_negative_control();
    criterion_7_condition_a();
    criterion_8_numerical_hygiene();

    if (g_failures == 0) {
        std::printf("all criteria passed\n");
        return 0;
    }
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
}
