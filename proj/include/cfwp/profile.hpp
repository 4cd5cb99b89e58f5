#ifndef CFWP_PROFILE_HPP
#define CFWP_PROFILE_HPP

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "cfwp/expr.hpp"

namespace cfwp {

/// Declared behavior of a radial profile as t -> infinity. Improper-integral
/// divergence cannot be decided from samples alone; a hint makes the
/// classification exact, its absence makes it conservative.
struct AsymptoticHint {
    enum class Kind { None, Power, BoundedBelow };

    Kind kind = Kind::None;
    double p = 0.0;      // Power: f(t) ~ coeff * t^p
    double coeff = 0.0;  // Power: leading coefficient (> 0)
    double lower = 0.0;  // BoundedBelow: f(t) >= lower > 0 for large t

    static AsymptoticHint none() { return {}; }
    static AsymptoticHint power(double p, double coeff) {
        AsymptoticHint h;
        h.kind = Kind::Power;
        h.p = p;
        h.coeff = coeff;
        return h;
    }
    static AsymptoticHint bounded_below(double c) {
        AsymptoticHint h;
        h.kind = Kind::BoundedBelow;
        h.lower = c;
        return h;
    }
};

/// Shape-preserving cubic Hermite interpolant (Fritsch-Carlson slopes) on a
/// strictly increasing grid. Evaluation outside the grid continues the
/// boundary-segment tangent line.
class Pchip {
public:
    Pchip() = default;
    Pchip(std::vector<double> x, std::vector<double> y);

    double operator()(double x) const;
    double size() const { return static_cast<double>(x_.size()); }
    const std::vector<double>& grid() const { return x_; }
    const std::vector<double>& values() const { return y_; }

private:
    std::size_t segment(double x) const;

    std::vector<double> x_, y_, slope_;
    bool uniform_ = false;
    double x0_ = 0.0, dx_ = 1.0;
};

/// Evaluable positive radial profile. Three backings:
///  - symbolic: WarpExpr + parameter binding (exactly differentiable),
///  - tabulated: monotone cubic interpolation of log f against log t,
///  - callable: opaque function (composite profiles built in code).
class Profile {
public:
    static Profile symbolic(WarpExpr expr, ParamBinding binding,
                            AsymptoticHint hint = AsymptoticHint::none());
    static Profile symbolic(const std::string& text, std::vector<std::string> params,
                            ParamBinding binding,
                            AsymptoticHint hint = AsymptoticHint::none());
    /// Tabulate positive values on a strictly increasing positive grid.
    static Profile tabulated(const std::vector<double>& t, const std::vector<double>& v,
                             AsymptoticHint hint = AsymptoticHint::none());
    static Profile callable(std::function<double(double)> f,
                            AsymptoticHint hint = AsymptoticHint::none());

    double operator()(double t) const;

    bool is_symbolic() const;
    bool is_tabulated() const;
    const WarpExpr* expr() const;           // nullptr unless symbolic
    const ParamBinding* binding() const;    // nullptr unless symbolic

    /// Exact derivative profile; symbolic backing only.
    /// Throws TabulatedProfileUnsupported otherwise.
    Profile derivative() const;

    const AsymptoticHint& hint() const;
    Profile with_hint(AsymptoticHint h) const;

private:
    struct Impl;
    explicit Profile(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
    std::shared_ptr<const Impl> impl_;
};

}  // namespace cfwp

#endif
