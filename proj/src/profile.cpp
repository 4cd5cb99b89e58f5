#include "cfwp/profile.hpp"

#include <cmath>

namespace cfwp {

// ---------------------------------------------------------------------------
// Pchip
// ---------------------------------------------------------------------------

Pchip::Pchip(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n) throw InvalidParams("Pchip: need >= 2 matching nodes");
    for (std::size_t i = 1; i < n; ++i)
        if (!(x_[i] > x_[i - 1])) throw InvalidParams("Pchip: grid not strictly increasing");

    // Detect uniform spacing for O(1) segment lookup.
    x0_ = x_.front();
    dx_ = (x_.back() - x_.front()) / static_cast<double>(n - 1);
    uniform_ = true;
    for (std::size_t i = 1; i < n; ++i) {
        double expect = x0_ + dx_ * static_cast<double>(i);
        if (std::abs(x_[i] - expect) > 1e-9 * std::max(std::abs(expect), 1.0)) {
            uniform_ = false;
            break;
        }
    }

    // Fritsch-Carlson shape-preserving slopes.
    std::vector<double> h(n - 1), d(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = x_[i + 1] - x_[i];
        d[i] = (y_[i + 1] - y_[i]) / h[i];
    }
    slope_.assign(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (d[i - 1] * d[i] <= 0.0) {
            slope_[i] = 0.0;
        } else {
            double w1 = 2.0 * h[i] + h[i - 1];
            double w2 = h[i] + 2.0 * h[i - 1];
            slope_[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
        }
    }
    // One-sided three-point end slopes with the usual monotonicity clamp.
    auto end_slope = [](double h0, double h1, double d0, double d1) {
        double m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (m * d0 <= 0.0) return 0.0;
        if (d0 * d1 <= 0.0 && std::abs(m) > 3.0 * std::abs(d0)) return 3.0 * d0;
        return m;
    };
    if (n == 2) {
        slope_[0] = slope_[1] = d[0];
    } else {
        slope_[0] = end_slope(h[0], h[1], d[0], d[1]);
        slope_[n - 1] = end_slope(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);
    }
}

std::size_t Pchip::segment(double x) const {
    const std::size_t n = x_.size();
    if (uniform_) {
        double u = (x - x0_) / dx_;
        if (u <= 0.0) return 0;
        std::size_t i = static_cast<std::size_t>(u);
        return i >= n - 1 ? n - 2 : i;
    }
    if (x <= x_.front()) return 0;
    if (x >= x_.back()) return n - 2;
    std::size_t lo = 0, hi = n - 1;
    while (hi - lo > 1) {
        std::size_t mid = (lo + hi) / 2;
        if (x_[mid] <= x) lo = mid;
        else hi = mid;
    }
    return lo;
}

double Pchip::operator()(double x) const {
    // Outside the grid: continue the boundary tangent (power-law continuation
    // once the caller works in log-log coordinates).
    if (x <= x_.front()) return y_.front() + slope_.front() * (x - x_.front());
    if (x >= x_.back()) return y_.back() + slope_.back() * (x - x_.back());

    std::size_t i = segment(x);
    double h = x_[i + 1] - x_[i];
    double u = (x - x_[i]) / h;
    double u2 = u * u;
    double u3 = u2 * u;
    double h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
    double h10 = u3 - 2.0 * u2 + u;
    double h01 = -2.0 * u3 + 3.0 * u2;
    double h11 = u3 - u2;
    return h00 * y_[i] + h * h10 * slope_[i] + h01 * y_[i + 1] + h * h11 * slope_[i + 1];
}

// ---------------------------------------------------------------------------
// Profile
// ---------------------------------------------------------------------------

struct Profile::Impl {
    enum class Backing { Symbolic, Tabulated, Callable };
    Backing backing;

    // Symbolic
    std::optional<WarpExpr> expr;
    ParamBinding binding;

    // Tabulated: log f against log t
    Pchip loglog;

    // Callable
    std::function<double(double)> fn;

    AsymptoticHint hint;

    double eval(double t) const {
        switch (backing) {
            case Backing::Symbolic: return expr->eval(t, binding);
            case Backing::Tabulated: return std::exp(loglog(std::log(t)));
            case Backing::Callable: return fn(t);
        }
        throw Error("corrupt profile");
    }
};

Profile Profile::symbolic(WarpExpr expr, ParamBinding binding, AsymptoticHint hint) {
    auto impl = std::make_shared<Impl>();
    impl->backing = Impl::Backing::Symbolic;
    impl->expr = std::move(expr);
    impl->binding = std::move(binding);
    impl->hint = hint;
    return Profile(std::move(impl));
}

Profile Profile::symbolic(const std::string& text, std::vector<std::string> params,
                          ParamBinding binding, AsymptoticHint hint) {
    return symbolic(WarpExpr::parse(text, std::move(params)), std::move(binding), hint);
}

Profile Profile::tabulated(const std::vector<double>& t, const std::vector<double>& v,
                           AsymptoticHint hint) {
    if (t.size() != v.size()) throw InvalidParams("Profile::tabulated: size mismatch");
    std::vector<double> lx(t.size()), ly(v.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!(t[i] > 0.0) || !(v[i] > 0.0))
            throw InvalidParams("Profile::tabulated: nodes and values must be positive");
        lx[i] = std::log(t[i]);
        ly[i] = std::log(v[i]);
    }
    auto impl = std::make_shared<Impl>();
    impl->backing = Impl::Backing::Tabulated;
    impl->loglog = Pchip(std::move(lx), std::move(ly));
    impl->hint = hint;
    return Profile(std::move(impl));
}

Profile Profile::callable(std::function<double(double)> f, AsymptoticHint hint) {
    auto impl = std::make_shared<Impl>();
    impl->backing = Impl::Backing::Callable;
    impl->fn = std::move(f);
    impl->hint = hint;
    return Profile(std::move(impl));
}

double Profile::operator()(double t) const { return impl_->eval(t); }

bool Profile::is_symbolic() const { return impl_->backing == Impl::Backing::Symbolic; }
bool Profile::is_tabulated() const { return impl_->backing == Impl::Backing::Tabulated; }

const WarpExpr* Profile::expr() const {
    return is_symbolic() ? &*impl_->expr : nullptr;
}

const ParamBinding* Profile::binding() const {
    return is_symbolic() ? &impl_->binding : nullptr;
}

Profile Profile::derivative() const {
    if (!is_symbolic())
        throw TabulatedProfileUnsupported("derivative requires a symbolic profile");
    return symbolic(impl_->expr->differentiate(), impl_->binding);
}

const AsymptoticHint& Profile::hint() const { return impl_->hint; }

Profile Profile::with_hint(AsymptoticHint h) const {
    auto impl = std::make_shared<Impl>(*impl_);
    impl->hint = h;
    return Profile(std::move(impl));
}

}  // namespace cfwp
