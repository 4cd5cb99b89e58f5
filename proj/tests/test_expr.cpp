#include <cmath>
#include <cstring>
#include <random>
#include <string>
#include <vector>

#include "cfwp/expr.hpp"
#include "doctest.h"

using cfwp::DomainError;
using cfwp::ParamBinding;
using cfwp::SyntaxError;
using cfwp::UnknownIdentifier;
using cfwp::WarpExpr;

namespace {

// Random expression source for the property tests. Depth-limited and biased
// toward leaves so trees stay evaluable.
class ExprGen {
public:
    explicit ExprGen(unsigned seed) : rng_(seed) {}

    std::string generate(int depth) {
        if (depth <= 0 || pick(100) < 35) return leaf();
        switch (pick(9)) {
            case 0: return "(" + generate(depth - 1) + "+" + generate(depth - 1) + ")";
            case 1: return "(" + generate(depth - 1) + "-" + generate(depth - 1) + ")";
            case 2: return "(" + generate(depth - 1) + "*" + generate(depth - 1) + ")";
            case 3: return "(" + generate(depth - 1) + "/" + generate(depth - 1) + ")";
            case 4: return "(" + generate(depth - 1) + "^" + small_const() + ")";
            case 5: return "sqrt(" + generate(depth - 1) + ")";
            case 6: return "exp(" + generate(depth - 1) + ")";
            case 7: return "log(" + generate(depth - 1) + ")";
            default: return "(-" + generate(depth - 1) + ")";
        }
    }

    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(rng_);
    }

private:
    int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }

    std::string leaf() {
        switch (pick(4)) {
            case 0: return "t";
            case 1: return "a";
            case 2: return "b";
            default: {
                char buf[32];
                std::snprintf(buf, sizeof(buf), "%.3f", uniform(0.1, 4.0));
                return buf;
            }
        }
    }

    std::string small_const() {
        // Exponents kept small so powers stay in range.
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.2f", uniform(0.3, 2.5));
        return buf;
    }

    std::mt19937 rng_;
};

const std::vector<std::string> kAB = {"a", "b"};

}  // namespace

TEST_CASE("parse: identity variable") {
    auto e = WarpExpr::parse("t", {});
    CHECK(e.eval(7.0, {}) == 7.0);
    CHECK(e.serialize() == "t");
}

TEST_CASE("parse: conformal factor profile round-trips") {
    auto e = WarpExpr::parse("sqrt((a+b*t)/t)", kAB);
    std::string canon = e.serialize();
    auto e2 = WarpExpr::parse(canon, kAB);
    CHECK(e2.serialize() == canon);
    CHECK(e.structurally_equal(e2));
}

TEST_CASE("parse: fiber profile evaluates") {
    auto e = WarpExpr::parse("2*t/sqrt(1+c*t+d*t^2)", {"c", "d"});
    ParamBinding bind{{"c", 0.0}, {"d", 0.0}};
    CHECK(e.eval(1.0, bind) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("parse: errors carry position and identifier") {
    CHECK_THROWS_AS(WarpExpr::parse("", {}), SyntaxError);
    CHECK_THROWS_AS(WarpExpr::parse("t+", {}), SyntaxError);
    CHECK_THROWS_AS(WarpExpr::parse("(t", {}), SyntaxError);
    CHECK_THROWS_AS(WarpExpr::parse("t q", {}), SyntaxError);
    CHECK_THROWS_AS(WarpExpr::parse("sqrt t", {}), SyntaxError);
    CHECK_THROWS_AS(WarpExpr::parse("x+1", {}), UnknownIdentifier);
    CHECK_THROWS_AS(WarpExpr::parse("a*t", {"b"}), UnknownIdentifier);
    CHECK_THROWS_AS(WarpExpr::parse("t", {"sqrt"}), cfwp::InvalidParams);

    try {
        WarpExpr::parse("1 + zz", {});
        FAIL("expected UnknownIdentifier");
    } catch (const UnknownIdentifier& u) {
        CHECK(u.name() == "zz");
        CHECK(u.position() == 4);
    }
}

TEST_CASE("parse: caret binds tighter than unary minus and right-associates") {
    auto e = WarpExpr::parse("-t^2", {});
    CHECK(e.eval(3.0, {}) == -9.0);  // -(t^2), not (-t)^2

    auto f = WarpExpr::parse("2^3^2", {});
    CHECK(f.eval(1.0, {}) == 512.0);  // 2^(3^2)

    auto g = WarpExpr::parse("2^-1", {});
    CHECK(g.eval(1.0, {}) == 0.5);
}

TEST_CASE("eval: basics") {
    CHECK(WarpExpr::parse("t^2", {}).eval(3.0, {}) == 9.0);
    CHECK(WarpExpr::parse("log(t)", {}).eval(1.0, {}) == 0.0);

    ParamBinding bind{{"a", 1.0}, {"b", 1.0}};
    double v = WarpExpr::parse("sqrt((a+b*t)/t)", kAB).eval(1.0, bind);
    CHECK(v == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("eval: domain errors name the offending subexpression") {
    ParamBinding bind{{"a", -4.0}};
    try {
        WarpExpr::parse("1+sqrt(a)", {"a"}).eval(1.0, bind);
        FAIL("expected DomainError");
    } catch (const DomainError& d) {
        CHECK(d.subexpression() == "sqrt(a)");
    }
    CHECK_THROWS_AS(WarpExpr::parse("log(t-1)", {}).eval(1.0, {}), DomainError);
    CHECK_THROWS_AS(WarpExpr::parse("1/(t-2)", {}).eval(2.0, {}), DomainError);
    CHECK_THROWS_AS(WarpExpr::parse("(t-3)^0.5", {}).eval(1.0, {}), DomainError);
}

TEST_CASE("differentiate: fixed values") {
    CHECK(WarpExpr::parse("t^2", {}).differentiate().eval(3.0, {}) == doctest::Approx(6.0).epsilon(1e-14));
    CHECK(WarpExpr::parse("sqrt(t)", {}).differentiate().eval(4.0, {}) == doctest::Approx(0.25).epsilon(1e-14));

    // d/dt [2t/sqrt(1+ct+dt^2)] = (2+t)(1+t+t^2)^(-3/2) at c=d=1;
    // at t=1 this is 3^(-1/2).
    auto e = WarpExpr::parse("2*t/sqrt(1+c*t+d*t^2)", {"c", "d"});
    ParamBinding bind{{"c", 1.0}, {"d", 1.0}};
    double sym = e.differentiate().eval(1.0, bind);
    CHECK(sym == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-12));

    const double h = 1e-6;
    double fd = (e.eval(1.0 + h, bind) - e.eval(1.0 - h, bind)) / (2.0 * h);
    CHECK(sym == doctest::Approx(fd).epsilon(1e-7));
}

TEST_CASE("differentiate: general power rule") {
    auto e = WarpExpr::parse("t^t", {});
    double d = e.differentiate().eval(2.0, {});
    CHECK(d == doctest::Approx(4.0 * (std::log(2.0) + 1.0)).epsilon(1e-13));
}

TEST_CASE("property: parse-serialize-parse idempotence on 1000 expressions") {
    ExprGen gen(20240817);
    int checked = 0;
    while (checked < 1000) {
        std::string text = gen.generate(4);
        WarpExpr e = WarpExpr::parse(text, kAB);
        std::string canon = e.serialize();
        WarpExpr e2 = WarpExpr::parse(canon, kAB);
        REQUIRE(e2.serialize() == canon);
        REQUIRE(e.structurally_equal(e2));
        ++checked;
    }
    CHECK(checked == 1000);
}

TEST_CASE("property: symbolic derivative matches central differences") {
    ExprGen gen(7151);
    int checked = 0;
    int attempts = 0;
    while (checked < 400 && attempts < 20000) {
        ++attempts;
        std::string text = gen.generate(3);
        double t = gen.uniform(0.6, 2.5);
        ParamBinding bind{{"a", gen.uniform(0.5, 2.0)}, {"b", gen.uniform(0.5, 2.0)}};
        try {
            WarpExpr e = WarpExpr::parse(text, kAB);
            const double h = 1e-5 * std::max(1.0, t);
            double f0 = e.eval(t, bind);
            double fp = e.eval(t + h, bind);
            double fm = e.eval(t - h, bind);
            if (!std::isfinite(f0) || std::abs(f0) > 1e4) continue;
            if (!std::isfinite(fp) || !std::isfinite(fm)) continue;
            double fd = (fp - fm) / (2.0 * h);
            double sym = e.differentiate().eval(t, bind);
            if (!std::isfinite(sym) || std::abs(sym) > 1e6) continue;
            REQUIRE(std::abs(sym - fd) <= 1e-7 * std::max({1.0, std::abs(sym), std::abs(fd)}));
            ++checked;
        } catch (const DomainError&) {
            continue;  // random tree wandered out of the real domain
        }
    }
    CHECK(checked == 400);
}

TEST_CASE("eval is deterministic") {
    auto e = WarpExpr::parse("sqrt((a+b*t)/t)*exp(t/10)-log(1+t^2)", kAB);
    ParamBinding bind{{"a", 1.25}, {"b", 0.75}};
    double v1 = e.eval(3.7, bind);
    double v2 = e.eval(3.7, bind);
    CHECK(std::memcmp(&v1, &v2, sizeof v1) == 0);
}
