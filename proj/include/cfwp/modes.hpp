#ifndef CFWP_MODES_HPP
#define CFWP_MODES_HPP

#include <array>
#include <functional>

#include "cfwp/geometry.hpp"

namespace cfwp {

/// One spinor mode after fiber and base decomposition: the effective
/// auxiliary-bundle power k (fiber Fourier index already folded in), the
/// Kahler Clifford eigenvalue index l, the chirality epsilon and the base
/// Dirac eigenvalue lambda.
struct ModeIndex {
    int k = 0;
    int l = 0;
    int epsilon = +1;
    double lambda = 0.0;
};

/// Throws InvalidParams unless 0 <= l <= m-1 and epsilon is +-1.
void validate_mode(const ModeIndex& mode, int m);

/// 2x2 real symmetric matrix, row major.
struct Mat2 {
    double a00 = 0.0, a01 = 0.0, a10 = 0.0, a11 = 0.0;
};

using Vec2 = std::array<double, 2>;

/// Coefficient field t -> M(t) = [[rho, sigma], [sigma, tau]] of the reduced
/// first-order system U' = rho U + sigma W, W' = sigma U + tau W, with
///   rho   =  eps (-1)^l [(2l-m) b^2 + 2 a^2 k] / (4 b a^2)
///   tau   =  eps (-1)^l [(m-2(l+1)) b^2 - 2 a^2 k] / (4 b a^2)
///   sigma =  (-1)^l lambda / a.
/// Works for symbolic and tabulated profiles alike (no derivatives enter).
class RadialCoeffs {
public:
    RadialCoeffs(const CfwpGeometry& geom, const ModeIndex& mode);

    double rho(double t) const;
    double sigma(double t) const;
    double tau(double t) const;
    Mat2 matrix_at(double t) const;

    const ModeIndex& mode() const { return mode_; }
    int m() const { return m_; }
    double sign() const { return sign_; }  // eps (-1)^l
    double weight(double t) const;         // beta^(1/2) alpha^m

    /// The field as a plain function object (for the integrator).
    std::function<Mat2(double)> field() const;
    std::function<double(double)> weight_fn() const;

private:
    int m_;
    Profile alpha_, beta_;
    ModeIndex mode_;
    double sign_;      // eps (-1)^l
    double par_;       // (-1)^l
};

/// Coefficient field of the pre-substitution (u, w) system; carries alpha'
/// and beta' and therefore requires symbolic profiles.
class RawCoeffs {
public:
    /// Throws TabulatedProfileUnsupported unless alpha and beta are symbolic.
    RawCoeffs(const CfwpGeometry& geom, const ModeIndex& mode);

    double u_diag(double t) const;
    double w_diag(double t) const;
    double offdiag(double t) const;  // (-1)^l lambda / alpha, both entries
    Mat2 matrix_at(double t) const;

    std::function<Mat2(double)> field() const;

private:
    int m_;
    Profile alpha_, beta_, dalpha_, dbeta_;
    ModeIndex mode_;
    double sign_;
    double par_;
};

/// The substitution weight w(t) = beta^(1/2) alpha^m relating (u, w) to
/// (U, W) = w(t) (u, w). The logarithmic derivative m a'/a + b'/(2b) is
/// available exactly when the profiles are symbolic.
struct SubstitutionWeight {
    std::function<double(double)> value;
    std::function<double(double)> log_derivative;  // empty unless symbolic
    bool has_log_derivative = false;
};

SubstitutionWeight substitution_weight(const CfwpGeometry& geom);

}  // namespace cfwp

#endif
