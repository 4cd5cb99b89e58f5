#include "cfwp/integrator.hpp"

#include <algorithm>
#include <cmath>

#include "cfwp/geometry.hpp"

namespace cfwp {

namespace {

constexpr double kBlowUp = 1e300;

inline Vec2 mat_apply(const Mat2& m, const Vec2& v) {
    return Vec2{m.a00 * v[0] + m.a01 * v[1], m.a10 * v[0] + m.a11 * v[1]};
}

inline double norm_inf(const Vec2& v) { return std::max(std::abs(v[0]), std::abs(v[1])); }

inline double norm2sq(const Vec2& v) { return v[0] * v[0] + v[1] * v[1]; }

struct Eigen2 {
    double lo = 0.0, hi = 0.0;  // eigenvalues, lo <= hi
    Vec2 vlo{0.0, 0.0}, vhi{0.0, 0.0};
};

// Closed-form symmetric 2x2 eigen-decomposition; eigenvectors orthonormal.
Eigen2 eigen_sym(const Mat2& m) {
    const double a = m.a00;
    const double b = 0.5 * (m.a01 + m.a10);
    const double d = m.a11;
    const double mean = 0.5 * (a + d);
    const double half = 0.5 * (a - d);
    const double disc = std::hypot(half, b);

    Eigen2 e;
    e.hi = mean + disc;
    e.lo = mean - disc;

    if (disc == 0.0 || (b == 0.0 && a >= d)) {
        e.vhi = {1.0, 0.0};
        e.vlo = {0.0, 1.0};
    } else if (b == 0.0) {
        e.vhi = {0.0, 1.0};
        e.vlo = {1.0, 0.0};
    } else {
        // (A - hi I) v = 0; pick the numerically larger residual row.
        Vec2 v1{b, e.hi - a};
        Vec2 v2{e.hi - d, b};
        Vec2 v = norm2sq(v1) >= norm2sq(v2) ? v1 : v2;
        double n = std::sqrt(norm2sq(v));
        e.vhi = {v[0] / n, v[1] / n};
        e.vlo = {-e.vhi[1], e.vhi[0]};
    }
    return e;
}

}  // namespace

// ---------------------------------------------------------------------------
// Indicial analysis
// ---------------------------------------------------------------------------

IndicialData indicial(const CoeffField& coeffs, const WeightFn& weight) {
    const double probes[3] = {1e-4, 1e-5, 1e-6};
    Mat2 A[3];
    for (int i = 0; i < 3; ++i) {
        Mat2 m = coeffs(probes[i]);
        A[i] = Mat2{m.a00 * probes[i], m.a01 * probes[i], m.a10 * probes[i], m.a11 * probes[i]};
    }

    auto richardson = [](const Mat2& coarse, const Mat2& fine) {
        return Mat2{(10.0 * fine.a00 - coarse.a00) / 9.0, (10.0 * fine.a01 - coarse.a01) / 9.0,
                    (10.0 * fine.a10 - coarse.a10) / 9.0, (10.0 * fine.a11 - coarse.a11) / 9.0};
    };
    Mat2 r1 = richardson(A[0], A[1]);
    Mat2 r2 = richardson(A[1], A[2]);

    double scale = std::max({std::abs(r2.a00), std::abs(r2.a01), std::abs(r2.a10),
                             std::abs(r2.a11), 1.0});
    double drift = std::max({std::abs(r2.a00 - r1.a00), std::abs(r2.a01 - r1.a01),
                             std::abs(r2.a10 - r1.a10), std::abs(r2.a11 - r1.a11)}) / scale;
    if (drift > 1e-3)
        throw IrregularSingularity("t M(t) does not settle as t -> 0 (Richardson drift " +
                                   std::to_string(drift) + ")");

    IndicialData out;
    double off = 0.5 * (r2.a01 + r2.a10);
    out.residue = Mat2{r2.a00, off, off, r2.a11};

    Eigen2 e = eigen_sym(out.residue);
    out.exponents = {e.hi, e.lo};
    out.directions = {e.vhi, e.vlo};

    // Threshold: least-squares slope of log w against log t over [1e-6, 1e-4].
    {
        std::vector<double> ts = log_grid(1e-6, 1e-4, 33);
        double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
        for (double t : ts) {
            double x = std::log(t);
            double y = std::log(weight(t));
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        double nn = static_cast<double>(ts.size());
        out.threshold = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
    }

    for (int i = 0; i < 2; ++i)
        if (out.exponents[i] >= out.threshold - 1e-9) out.admissible.push_back(i);
    return out;
}

IndicialData indicial(const RadialCoeffs& coeffs) {
    return indicial(coeffs.field(), coeffs.weight_fn());
}

// ---------------------------------------------------------------------------
// Trajectory
// ---------------------------------------------------------------------------

const Vec2* Trajectory::state_at(double t) const {
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (std::abs(nodes[i] - t) <= 1e-9 * std::max(std::abs(t), 1e-300)) return &states[i];
    return nullptr;
}

double Trajectory::l2_at(double t) const {
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (std::abs(nodes[i] - t) <= 1e-9 * std::max(std::abs(t), 1e-300))
            return l2_cumulative[i];
    return std::numeric_limits<double>::quiet_NaN();
}

// ---------------------------------------------------------------------------
// Dormand-Prince 5(4) with FSAL
// ---------------------------------------------------------------------------

namespace {

constexpr double kC[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA21 = 1.0 / 5;
constexpr double kA31 = 3.0 / 40, kA32 = 9.0 / 40;
constexpr double kA41 = 44.0 / 45, kA42 = -56.0 / 15, kA43 = 32.0 / 9;
constexpr double kA51 = 19372.0 / 6561, kA52 = -25360.0 / 2187, kA53 = 64448.0 / 6561,
                 kA54 = -212.0 / 729;
constexpr double kA61 = 9017.0 / 3168, kA62 = -355.0 / 33, kA63 = 46732.0 / 5247,
                 kA64 = 49.0 / 176, kA65 = -5103.0 / 18656;
constexpr double kB1 = 35.0 / 384, kB3 = 500.0 / 1113, kB4 = 125.0 / 192,
                 kB5 = -2187.0 / 6784, kB6 = 11.0 / 84;
// b - bhat (error weights)
constexpr double kE1 = 71.0 / 57600, kE3 = -71.0 / 16695, kE4 = 71.0 / 1920,
                 kE5 = -17253.0 / 339200, kE6 = 22.0 / 525, kE7 = -1.0 / 40;

inline double mat_norm(const Mat2& m) {
    return std::max({std::abs(m.a00), std::abs(m.a01), std::abs(m.a10), std::abs(m.a11)});
}

}  // namespace

Trajectory integrate(const CoeffField& coeffs, double t0, double t1, Vec2 init,
                     const IntegrateOptions& opts) {
    if (!(t0 > 0.0) || !(t1 > 0.0) || t0 == t1)
        throw InvalidParams("integrate: endpoints must be positive and distinct");
    if (!(norm_inf(init) > 0.0) || !std::isfinite(init[0]) || !std::isfinite(init[1]))
        throw InvalidParams("integrate: initial state must be finite and nonzero");
    if (!(opts.rel_tol > 0.0)) throw InvalidParams("integrate: rel_tol must be positive");

    const double dir = t1 > t0 ? 1.0 : -1.0;

    // Output targets: log-spaced between the endpoints plus any forced nodes.
    std::vector<double> targets = log_grid(std::min(t0, t1), std::max(t0, t1),
                                           std::max<std::size_t>(opts.min_nodes, 2));
    for (double e : opts.extra_nodes)
        if (e > std::min(t0, t1) && e < std::max(t0, t1)) targets.push_back(e);
    std::sort(targets.begin(), targets.end());
    targets.erase(std::unique(targets.begin(), targets.end(),
                              [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::abs(a); }),
                  targets.end());
    if (dir < 0.0) std::reverse(targets.begin(), targets.end());

    Trajectory traj;
    traj.rel_tol = opts.rel_tol;

    double t = t0;
    Vec2 y = init;
    double l2 = 0.0;

    std::size_t target_idx = 0;
    // Skip targets at or before the start.
    while (target_idx < targets.size() && (targets[target_idx] - t) * dir <= 0.0) {
        if (std::abs(targets[target_idx] - t) <= 1e-12 * std::abs(t)) break;
        ++target_idx;
    }

    auto record = [&](double tn, const Vec2& yn) {
        traj.nodes.push_back(tn);
        traj.states.push_back(yn);
        traj.l2_cumulative.push_back(l2);
    };
    record(t, y);
    if (target_idx < targets.size() &&
        std::abs(targets[target_idx] - t) <= 1e-12 * std::abs(t))
        ++target_idx;

    Vec2 k1 = mat_apply(coeffs(t), y);
    double nm = mat_norm(coeffs(t0));
    double h = dir * std::min(0.01 / std::max(nm, 1e-12), std::abs(t1 - t0));
    if (h == 0.0) h = dir * std::abs(t1 - t0) * 1e-3;

    const std::size_t kMaxSteps = 50'000'000;
    std::size_t steps = 0;
    std::size_t consecutive_underflow = 0;

    while ((t1 - t) * dir > 0.0) {
        if (++steps > kMaxSteps) throw Error("integrate: step budget exceeded");

        // Land exactly on the next output node / endpoint.
        double h_use = h;
        double next_stop = t1;
        if (target_idx < targets.size() && (targets[target_idx] - t1) * dir < 0.0)
            next_stop = targets[target_idx];
        bool truncated = false;
        if ((t + h_use - next_stop) * dir > 0.0) {
            h_use = next_stop - t;
            truncated = true;
        }

        if (std::abs(h_use) <= std::abs(t) * 1e-14) {
            if (++consecutive_underflow > 50)
                throw StepUnderflow("integrate: step size collapsed at t = " + std::to_string(t));
        } else {
            consecutive_underflow = 0;
        }

        const Vec2 k2 = mat_apply(coeffs(t + kC[1] * h_use),
                              {y[0] + h_use * kA21 * k1[0], y[1] + h_use * kA21 * k1[1]});
        const Vec2 k3 = mat_apply(coeffs(t + kC[2] * h_use),
                              {y[0] + h_use * (kA31 * k1[0] + kA32 * k2[0]),
                               y[1] + h_use * (kA31 * k1[1] + kA32 * k2[1])});
        const Vec2 k4 = mat_apply(coeffs(t + kC[3] * h_use),
                              {y[0] + h_use * (kA41 * k1[0] + kA42 * k2[0] + kA43 * k3[0]),
                               y[1] + h_use * (kA41 * k1[1] + kA42 * k2[1] + kA43 * k3[1])});
        const Vec2 k5 = mat_apply(coeffs(t + kC[4] * h_use),
                              {y[0] + h_use * (kA51 * k1[0] + kA52 * k2[0] + kA53 * k3[0] + kA54 * k4[0]),
                               y[1] + h_use * (kA51 * k1[1] + kA52 * k2[1] + kA53 * k3[1] + kA54 * k4[1])});
        const Vec2 k6 = mat_apply(coeffs(t + h_use),
                              {y[0] + h_use * (kA61 * k1[0] + kA62 * k2[0] + kA63 * k3[0] +
                                               kA64 * k4[0] + kA65 * k5[0]),
                               y[1] + h_use * (kA61 * k1[1] + kA62 * k2[1] + kA63 * k3[1] +
                                               kA64 * k4[1] + kA65 * k5[1])});
        const Vec2 y5{
            y[0] + h_use * (kB1 * k1[0] + kB3 * k3[0] + kB4 * k4[0] + kB5 * k5[0] + kB6 * k6[0]),
            y[1] + h_use * (kB1 * k1[1] + kB3 * k3[1] + kB4 * k4[1] + kB5 * k5[1] + kB6 * k6[1])};
        const Vec2 k7 = mat_apply(coeffs(t + h_use), y5);

        if (!std::isfinite(y5[0]) || !std::isfinite(y5[1]) || !std::isfinite(k7[0]) ||
            !std::isfinite(k7[1])) {
            traj.blow_up = true;
            break;
        }

        const Vec2 errv{h_use * (kE1 * k1[0] + kE3 * k3[0] + kE4 * k4[0] + kE5 * k5[0] +
                                 kE6 * k6[0] + kE7 * k7[0]),
                        h_use * (kE1 * k1[1] + kE3 * k3[1] + kE4 * k4[1] + kE5 * k5[1] +
                                 kE6 * k6[1] + kE7 * k7[1])};
        double err = 0.0;
        for (int i = 0; i < 2; ++i) {
            double sc = opts.rel_tol * std::max(std::abs(y[i]), std::abs(y5[i])) + 1e-300;
            double q = errv[i] / sc;
            err += q * q;
        }
        err = std::sqrt(0.5 * err);

        if (err <= 1.0) {
            double t_new = t + h_use;
            bool on_target = target_idx < targets.size() &&
                             std::abs(t_new - targets[target_idx]) <=
                                 1e-12 * std::abs(targets[target_idx]);
            if (on_target) t_new = targets[target_idx];

            if (!opts.track_direction) {
                double inc = std::abs(h_use) * 0.5 * (norm2sq(y) + norm2sq(y5));
                // Saturate rather than overflow: mass beyond 1e307 is already
                // unambiguous divergence evidence downstream.
                l2 = std::isfinite(inc) ? std::min(l2 + inc, 1e307) : 1e307;
            }
            traj.stats.accumulated_rel_error += err * opts.rel_tol;
            ++traj.stats.accepted;

            t = t_new;
            y = y5;
            k1 = k7;

            if (on_target) {
                record(t, y);
                ++target_idx;
            }

            if (norm_inf(y) > kBlowUp) {
                traj.blow_up = true;
                if (traj.nodes.empty() || traj.nodes.back() != t) record(t, y);
                break;
            }
            if (opts.track_direction) {
                double n = norm_inf(y);
                if (n > 1e100 || (n < 1e-100 && n > 0.0)) {
                    y[0] /= n;
                    y[1] /= n;
                    k1[0] /= n;
                    k1[1] /= n;
                    ++traj.stats.renormalizations;
                }
            }
        } else {
            ++traj.stats.rejected;
        }

        double factor = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
        factor = std::clamp(factor, 0.2, 5.0);
        // A step truncated onto an output node says nothing about the natural
        // step size; keep it unless the error forced a rejection.
        if (!truncated || err > 1.0) h = h_use * factor;
    }

    if (!traj.blow_up && (traj.nodes.empty() || traj.nodes.back() != t)) record(t, y);
    return traj;
}

// ---------------------------------------------------------------------------
// Two-sided shooting
// ---------------------------------------------------------------------------

std::vector<Trajectory> solve_bounded(const CoeffField& coeffs, const IndicialData& ind,
                                      const ShootOptions& opts) {
    std::vector<Trajectory> out;
    for (int idx : ind.admissible) {
        double mu = ind.exponents[idx];
        Vec2 v = ind.directions[idx];
        double scale = std::pow(opts.t_init, mu);
        if (!(scale > 1e-250) || !std::isfinite(scale)) scale = 1.0;  // keep it representable
        Vec2 init{scale * v[0], scale * v[1]};

        IntegrateOptions io;
        io.rel_tol = opts.rel_tol;
        io.extra_nodes = {10.0, 1e2, 1e3, 1e4, opts.t_mid, opts.t_max};
        Trajectory traj = integrate(coeffs, opts.t_init, opts.t_max, init, io);
        traj.indicial_exponent = mu;
        out.push_back(std::move(traj));
    }
    return out;
}

MatchResult match_infinity(const CoeffField& coeffs, const std::vector<Trajectory>& bounded,
                           const ShootOptions& opts) {
    if (bounded.empty())
        throw InvalidParams("match_infinity: bounded set is empty (nothing to match)");

    MatchResult res;

    Eigen2 e = eigen_sym(coeffs(opts.t_max));
    if (std::abs(e.hi - e.lo) < 1e-10) {
        res.degenerate = true;  // asymptotically non-hyperbolic: no recessive direction
        return res;
    }

    if (!(opts.t_init < opts.t_mid) || !(opts.t_mid < opts.t_max))
        throw InvalidParams("match_infinity: requires t_init < t_mid < t_max");

    // The deepest node every forward trajectory still reaches (a blown-up
    // trajectory truncates early), capped at t_mid; nodes where a state
    // underflowed to zero are stepped over as well. Iterate to a common point.
    double t_match = opts.t_mid;
    for (const Trajectory& traj : bounded) t_match = std::min(t_match, traj.nodes.back());
    for (bool moved = true; moved;) {
        moved = false;
        for (const Trajectory& traj : bounded) {
            std::size_t i = 0;
            while (i + 1 < traj.nodes.size() && traj.nodes[i + 1] <= t_match * (1.0 + 1e-12)) ++i;
            while (i > 0 && norm_inf(traj.states[i]) == 0.0) --i;
            if (traj.nodes[i] < t_match * (1.0 - 1e-12)) {
                t_match = traj.nodes[i];
                moved = true;
            }
        }
    }

    // Forward directions at the common matching point.
    std::vector<Vec2> fwd;
    for (const Trajectory& traj : bounded) {
        const Vec2* s = traj.state_at(t_match);
        if (!s) {
            std::size_t i = 0;
            while (i + 1 < traj.nodes.size() && traj.nodes[i + 1] <= t_match * (1.0 + 1e-12)) ++i;
            s = &traj.states[i];
        }
        fwd.push_back(*s);
    }

    // Recessive solution at infinity: integrate backward along the
    // most-decaying eigendirection of M(t_max), tracking direction only.
    IntegrateOptions io;
    io.rel_tol = opts.rel_tol;
    io.track_direction = true;
    io.min_nodes = 64;
    Trajectory back = integrate(coeffs, opts.t_max, t_match, e.vlo, io);
    Vec2 vb = back.states.back();
    double nb = std::sqrt(norm2sq(vb));
    if (!(nb > 0.0)) {
        res.degenerate = true;
        return res;
    }

    double best = std::numeric_limits<double>::infinity();
    Vec2 best_f{0.0, 0.0};
    for (const Vec2& f : fwd) {
        double nf = std::sqrt(norm2sq(f));
        if (!(nf > 0.0)) continue;
        double det = f[0] * vb[1] - f[1] * vb[0];
        double r = std::abs(det) / (nf * nb);
        if (r < best) {
            best = r;
            best_f = {f[0] / nf, f[1] / nf};
        }
    }
    if (!std::isfinite(best)) {
        res.degenerate = true;
        return res;
    }

    // A 2-dimensional bounded subspace of a 2x2 system spans every direction:
    // the recessive line always intersects it.
    if (fwd.size() >= 2) {
        double n0 = std::sqrt(norm2sq(fwd[0]));
        double n1 = std::sqrt(norm2sq(fwd[1]));
        if (n0 > 0.0 && n1 > 0.0) {
            double span = std::abs(fwd[0][0] * fwd[1][1] - fwd[0][1] * fwd[1][0]) / (n0 * n1);
            if (span > 1e-8) best = 0.0;
        }
    }

    res.residual = best;
    res.matched_at = t_match;
    res.forward_dir = best_f;
    res.backward_dir = {vb[0] / nb, vb[1] / nb};
    return res;
}

}  // namespace cfwp
