#include <cmath>
#include <random>

#include "cfwp/integrator.hpp"
#include "cfwp/modes.hpp"
#include "doctest.h"

using namespace cfwp;

namespace {

CfwpGeometry euclid() { return make_preset(Preset::Euclidean, {}, 1); }

CfwpGeometry ik_in_s() {
    auto ik = make_preset(Preset::IwaiKatayama,
                          ParamBinding{{"a", 1.0}, {"b", 1.0}, {"c", 1.0}, {"d", 1.0}}, 1);
    return reparametrize(ik).geometry;
}

}  // namespace

TEST_CASE("mode validation") {
    CHECK_THROWS_AS(validate_mode(ModeIndex{0, 1, 1, 0.0}, 1), InvalidParams);
    CHECK_THROWS_AS(validate_mode(ModeIndex{0, -1, 1, 0.0}, 3), InvalidParams);
    CHECK_THROWS_AS(validate_mode(ModeIndex{0, 0, 2, 0.0}, 1), InvalidParams);
    CHECK_NOTHROW(validate_mode(ModeIndex{-3, 2, -1, 1.5}, 3));
}

TEST_CASE("euclidean coefficients in closed form") {
    RadialCoeffs co(euclid(), ModeIndex{0, 0, +1, std::sqrt(2.0)});
    for (double t : {0.5, 1.0, 2.0, 10.0}) {
        CHECK(co.rho(t) == doctest::Approx(-0.5 / t).epsilon(1e-14));
        CHECK(co.tau(t) == doctest::Approx(-0.5 / t).epsilon(1e-14));
        CHECK(co.sigma(t) == doctest::Approx(2.0 / t).epsilon(1e-14));
    }

    RadialCoeffs dec(euclid(), ModeIndex{0, 0, +1, 0.0});
    CHECK(dec.sigma(0.7) == 0.0);
    CHECK(dec.matrix_at(0.7).a01 == 0.0);
}

TEST_CASE("trace identity on tabulated profiles") {
    auto geom = ik_in_s();
    RadialCoeffs co(geom, ModeIndex{2, 0, -1, 1.0});
    double t = 1.0;
    double lhs = co.rho(t) + co.tau(t);
    double rhs = -co.sign() * geom.beta()(t) / (2.0 * geom.alpha()(t) * geom.alpha()(t));
    double scale = std::max({std::abs(co.rho(t)), std::abs(co.tau(t)), std::abs(rhs)});
    CHECK(std::abs(lhs - rhs) <= 1e-12 * scale);
}

TEST_CASE("trace identity at 512 random points") {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> logt(std::log(1e-8), std::log(1e6));
    std::uniform_int_distribution<int> kd(-5, 5);
    std::uniform_real_distribution<double> ld(-3.0, 3.0);

    auto geom = euclid();
    for (int rep = 0; rep < 8; ++rep) {
        ModeIndex mode{kd(rng), 0, rep % 2 == 0 ? 1 : -1, ld(rng)};
        RadialCoeffs co(geom, mode);
        for (int i = 0; i < 64; ++i) {
            double t = std::exp(logt(rng));
            double lhs = co.rho(t) + co.tau(t);
            double rhs = -co.sign() * geom.beta()(t) /
                         (2.0 * geom.alpha()(t) * geom.alpha()(t));
            double scale = std::max({std::abs(co.rho(t)), std::abs(co.tau(t)), std::abs(rhs), 1e-300});
            REQUIRE(std::abs(lhs - rhs) <= 1e-12 * scale);
        }
    }
}

TEST_CASE("sigma times alpha is the constant (-1)^l lambda") {
    auto geom = ik_in_s();
    for (int l : {0}) {
        RadialCoeffs co(geom, ModeIndex{1, l, +1, 1.7});
        for (double t : {1e-3, 0.1, 1.0, 50.0, 1e3})
            CHECK(co.sigma(t) * geom.alpha()(t) == doctest::Approx(1.7).epsilon(1e-14));
    }
}

TEST_CASE("chirality flip negates the diagonal and fixes sigma") {
    auto geom = euclid();
    ModeIndex plus{3, 0, +1, 1.7};
    ModeIndex minus{3, 0, -1, 1.7};
    RadialCoeffs cp(geom, plus), cm(geom, minus);
    for (double t : {0.3, 1.0, 42.0}) {
        CHECK(cp.rho(t) == doctest::Approx(-cm.rho(t)).epsilon(1e-15));
        CHECK(cp.tau(t) == doctest::Approx(-cm.tau(t)).epsilon(1e-15));
        CHECK(cp.sigma(t) == cm.sigma(t));
    }
}

TEST_CASE("raw system on euclidean profiles") {
    // u-diagonal = rho - d/dt log(beta^(1/2) alpha^m) = -1/(2t) - 3/(2t) = -2/t
    RawCoeffs raw(euclid(), ModeIndex{0, 0, +1, 1.0});
    CHECK(raw.u_diag(1.0) == doctest::Approx(-2.0).epsilon(1e-14));
    CHECK(raw.u_diag(2.0) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(raw.w_diag(1.0) == doctest::Approx(-2.0).epsilon(1e-14));

    RawCoeffs quiet(euclid(), ModeIndex{0, 0, +1, 0.0});
    CHECK(quiet.offdiag(5.0) == 0.0);

    CHECK_THROWS_AS(RawCoeffs(ik_in_s(), ModeIndex{0, 0, +1, 1.0}),
                    TabulatedProfileUnsupported);
}

TEST_CASE("substitution weight") {
    auto w = substitution_weight(euclid());
    CHECK(w.value(4.0) == doctest::Approx(4.0 * std::sqrt(2.0)).epsilon(1e-14));
    REQUIRE(w.has_log_derivative);
    CHECK(w.log_derivative(2.0) == doctest::Approx(0.75).epsilon(1e-13));

    CfwpGeometry plain(1, Profile::symbolic("t", {}, {}), Profile::symbolic("t", {}, {}));
    CHECK(substitution_weight(plain).value(1.0) == doctest::Approx(1.0).epsilon(1e-14));

    auto ws = substitution_weight(ik_in_s());
    CHECK(!ws.has_log_derivative);
    // near 0 the weight behaves like s^(3/2)/sqrt(2): log-log slope 3/2
    double slope = std::log(ws.value(1e-3) / ws.value(1e-5)) / std::log(1e-3 / 1e-5);
    CHECK(slope == doctest::Approx(1.5).epsilon(0.0333));
}

TEST_CASE("transport consistency between (u,w) and (U,W)") {
    auto geom = euclid();
    auto w = substitution_weight(geom);
    std::mt19937 rng(4242);
    std::uniform_int_distribution<int> kd(-2, 2);
    std::uniform_real_distribution<double> ld(0.2, 2.0);

    const double t0 = 0.5, t1 = 4.0;
    for (int rep = 0; rep < 3; ++rep) {
        ModeIndex mode{kd(rng), 0, rep % 2 == 0 ? 1 : -1, ld(rng)};
        RawCoeffs raw(geom, mode);
        RadialCoeffs reduced(geom, mode);

        Vec2 uw0{0.8, -0.35};
        IntegrateOptions io;
        io.rel_tol = 1e-11;
        Trajectory small = integrate(raw.field(), t0, t1, uw0, io);
        Trajectory big = integrate(reduced.field(), t0, t1,
                                   Vec2{uw0[0] * w.value(t0), uw0[1] * w.value(t0)}, io);

        double scale = w.value(t1);
        for (int i = 0; i < 2; ++i) {
            double lifted = small.states.back()[i] * scale;
            double direct = big.states.back()[i];
            REQUIRE(std::abs(lifted - direct) <=
                    1e-6 * std::max({std::abs(lifted), std::abs(direct), 1e-12}));
        }
    }
}

TEST_CASE("sign flip in sigma mirrors W") {
    auto geom = euclid();
    ModeIndex mode{1, 0, +1, 1.3};
    RadialCoeffs co(geom, mode);

    auto flipped = [co](double t) {
        Mat2 m = co.matrix_at(t);
        return Mat2{m.a00, -m.a01, -m.a10, m.a11};
    };

    IntegrateOptions io;
    io.rel_tol = 1e-11;
    Vec2 init{0.9, 0.4};
    Trajectory base = integrate(co.field(), 0.5, 20.0, init, io);
    Trajectory mirror = integrate(flipped, 0.5, 20.0, Vec2{init[0], -init[1]}, io);

    REQUIRE(base.nodes.size() == mirror.nodes.size());
    double u = base.states.back()[0], wv = base.states.back()[1];
    double mu = mirror.states.back()[0], mw = mirror.states.back()[1];
    CHECK(std::abs(u - mu) <= 1e-8 * std::max(1.0, std::abs(u)));
    CHECK(std::abs(-wv - mw) <= 1e-8 * std::max(1.0, std::abs(wv)));
}
