#ifndef CFWP_GEOMETRY_HPP
#define CFWP_GEOMETRY_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cfwp/profile.hpp"

namespace cfwp {

/// Radial working window. All "for all t" invariants are probed on
/// log-uniform grids over this range.
struct Window {
    double tmin = 1e-8;
    double tmax = 1e6;
};

/// Log-uniform grid of n points on [lo, hi], endpoints included.
std::vector<double> log_grid(double lo, double hi, std::size_t n);

/// Metric data of a circle-fibered warped product over CP^m: the base
/// dimension parameter m, the warping profiles alpha(t), beta(t) and an
/// optional radial conformal factor gamma(t).
class CfwpGeometry {
public:
    CfwpGeometry(int m, Profile alpha, Profile beta,
                 std::optional<Profile> gamma = std::nullopt,
                 Window window = {});

    int m() const { return m_; }
    const Profile& alpha() const { return alpha_; }
    const Profile& beta() const { return beta_; }
    const std::optional<Profile>& gamma() const { return gamma_; }
    const Window& window() const { return window_; }

    /// Copy with gamma dropped (used after reparametrization).
    CfwpGeometry without_gamma() const;

private:
    int m_;
    Profile alpha_;
    Profile beta_;
    std::optional<Profile> gamma_;
    Window window_;
};

enum class Preset { Euclidean, TaubNut, IwaiKatayama };

/// Build one of the stock families:
///   euclidean       alpha = t/sqrt(2),  beta = t
///   taub-nut        alpha = sqrt(2)t,   beta = 2t/(1+bt),           gamma = sqrt((a+bt)/t)
///   iwai-katayama   alpha = sqrt(2)t,   beta = 2t/sqrt(1+ct+dt^2),  gamma = sqrt((a+bt)/t)
/// The two gamma families require m = 1 and positive constants.
CfwpGeometry make_preset(Preset which, const ParamBinding& params, int m,
                         Window window = {});

enum class CheckStatus { Holds, Fails, Inconclusive };
const char* to_string(CheckStatus s);

/// Decide whether s(t) = int_0^t gamma is a bijection of R+ onto itself:
/// gamma integrable at 0 and with divergent total integral. The tail is
/// decided exactly from the asymptotic hint when present; otherwise a
/// horizon probe reports Holds/Fails only on unambiguous evidence.
CheckStatus check_int_condition(const CfwpGeometry& geom);

struct CompletionLimits {
    double alpha_limit = 0.0;  // lim alpha(t)/t
    double beta_limit = 0.0;   // lim beta(t)/t
    bool smooth = false;       // limits equal (1/sqrt(2), 1) within 1e-4
};

/// Richardson-extrapolated limits of alpha/t and beta/t at t -> 0, the
/// necessary conditions for a smooth one-point completion.
/// Throws LimitDiverges when the probe values grow without bound.
CompletionLimits completion_limits(const CfwpGeometry& geom);

struct ReparamOptions {
    int nodes_per_decade = 2048;
    double t_floor = 1e-18;  // tabulation extends below the window to here
    bool assume_int_condition = false;
};

/// Conformal change of coordinate s(t) = int_0^t gamma(u) du. The result
/// carries tabulated profiles alpha~(s) = gamma(t(s)) alpha(t(s)) and
/// beta~(s) = gamma(t(s)) beta(t(s)) plus the monotone maps between t and s.
struct ReparamResult {
    CfwpGeometry geometry;  // profiles in the s variable, no gamma
    std::function<double(double)> s_of_t;
    std::function<double(double)> t_of_s;
};

ReparamResult reparametrize(const CfwpGeometry& geom, const ReparamOptions& opts = {});

}  // namespace cfwp

#endif
