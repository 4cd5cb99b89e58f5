#include "cfwp/modes.hpp"

#include <cmath>

namespace cfwp {

void validate_mode(const ModeIndex& mode, int m) {
    if (mode.l < 0 || mode.l > m - 1)
        throw InvalidParams("mode: l must lie in [0, m-1], got l=" + std::to_string(mode.l) +
                            " with m=" + std::to_string(m));
    if (mode.epsilon != 1 && mode.epsilon != -1)
        throw InvalidParams("mode: epsilon must be +1 or -1");
    if (!std::isfinite(mode.lambda)) throw InvalidParams("mode: lambda must be finite");
}

namespace {
double parity(int l) { return (l % 2 == 0) ? 1.0 : -1.0; }
}  // namespace

// ---------------------------------------------------------------------------
// RadialCoeffs
// ---------------------------------------------------------------------------

RadialCoeffs::RadialCoeffs(const CfwpGeometry& geom, const ModeIndex& mode)
    : m_(geom.m()), alpha_(geom.alpha()), beta_(geom.beta()), mode_(mode),
      sign_(mode.epsilon * parity(mode.l)), par_(parity(mode.l)) {
    validate_mode(mode, m_);
}

double RadialCoeffs::rho(double t) const {
    double a = alpha_(t), b = beta_(t);
    return sign_ * ((2.0 * mode_.l - m_) * b * b + 2.0 * a * a * mode_.k) / (4.0 * b * a * a);
}

double RadialCoeffs::tau(double t) const {
    double a = alpha_(t), b = beta_(t);
    return sign_ * ((m_ - 2.0 * (mode_.l + 1)) * b * b - 2.0 * a * a * mode_.k) /
           (4.0 * b * a * a);
}

double RadialCoeffs::sigma(double t) const { return par_ * mode_.lambda / alpha_(t); }

Mat2 RadialCoeffs::matrix_at(double t) const {
    double a = alpha_(t), b = beta_(t);
    double denom = 4.0 * b * a * a;
    double r = sign_ * ((2.0 * mode_.l - m_) * b * b + 2.0 * a * a * mode_.k) / denom;
    double tt = sign_ * ((m_ - 2.0 * (mode_.l + 1)) * b * b - 2.0 * a * a * mode_.k) / denom;
    double s = par_ * mode_.lambda / a;
    return Mat2{r, s, s, tt};
}

double RadialCoeffs::weight(double t) const {
    return std::sqrt(beta_(t)) * std::pow(alpha_(t), static_cast<double>(m_));
}

std::function<Mat2(double)> RadialCoeffs::field() const {
    RadialCoeffs copy = *this;
    return [copy](double t) { return copy.matrix_at(t); };
}

std::function<double(double)> RadialCoeffs::weight_fn() const {
    RadialCoeffs copy = *this;
    return [copy](double t) { return copy.weight(t); };
}

// ---------------------------------------------------------------------------
// RawCoeffs
// ---------------------------------------------------------------------------

RawCoeffs::RawCoeffs(const CfwpGeometry& geom, const ModeIndex& mode)
    : m_(geom.m()),
      alpha_(geom.alpha()), beta_(geom.beta()),
      dalpha_(geom.alpha().derivative()), dbeta_(geom.beta().derivative()),
      mode_(mode), sign_(mode.epsilon * parity(mode.l)), par_(parity(mode.l)) {
    validate_mode(mode, m_);
}

double RawCoeffs::u_diag(double t) const {
    double a = alpha_(t), b = beta_(t), da = dalpha_(t), db = dbeta_(t);
    return (sign_ * (2.0 * mode_.l - m_) * b * b - 2.0 * a * a * db +
            sign_ * 2.0 * a * a * mode_.k - 4.0 * m_ * a * da * b) /
           (4.0 * b * a * a);
}

double RawCoeffs::w_diag(double t) const {
    double a = alpha_(t), b = beta_(t), da = dalpha_(t), db = dbeta_(t);
    return (sign_ * (m_ - 2.0 * (mode_.l + 1)) * b * b - 2.0 * a * a * db -
            sign_ * 2.0 * a * a * mode_.k - 4.0 * m_ * a * da * b) /
           (4.0 * b * a * a);
}

double RawCoeffs::offdiag(double t) const { return par_ * mode_.lambda / alpha_(t); }

Mat2 RawCoeffs::matrix_at(double t) const {
    return Mat2{u_diag(t), offdiag(t), offdiag(t), w_diag(t)};
}

std::function<Mat2(double)> RawCoeffs::field() const {
    RawCoeffs copy = *this;
    return [copy](double t) { return copy.matrix_at(t); };
}

// ---------------------------------------------------------------------------
// Substitution weight
// ---------------------------------------------------------------------------

SubstitutionWeight substitution_weight(const CfwpGeometry& geom) {
    SubstitutionWeight out;
    const Profile alpha = geom.alpha();
    const Profile beta = geom.beta();
    const double m = static_cast<double>(geom.m());

    out.value = [alpha, beta, m](double t) {
        return std::sqrt(beta(t)) * std::pow(alpha(t), m);
    };

    if (alpha.is_symbolic() && beta.is_symbolic()) {
        const Profile da = alpha.derivative();
        const Profile db = beta.derivative();
        out.log_derivative = [alpha, beta, da, db, m](double t) {
            return m * da(t) / alpha(t) + db(t) / (2.0 * beta(t));
        };
        out.has_log_derivative = true;
    }
    return out;
}

}  // namespace cfwp
