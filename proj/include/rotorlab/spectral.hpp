#pragma once

#include "rotorlab/states.hpp"

#include <optional>
#include <vector>

namespace rotorlab {

/// Ground state of the variational operator L^2 + (q/2)(E + E^dag) [+ second
/// harmonic], i.e. the extremal state at fixed dispersion, in the <L> = 0
/// sector.
struct ExtremalState {
    double eigenvalue = 0.0;
    PureState state;
    double q = 0.0;
    double r = 0.0;
    double beta = 0.0;
    double tail_mass = 0.0;
};

struct CurvePoint {
    double param = 0.0;         // q or kappa
    double dispersion_sq = 0.0; // D^2 of the state
    double product = 0.0;       // <(dL)^2> D^2 (or the product under study)
};

/// Ground state of the matrix H_ll = l^2, H_{l,l+1} = q/2 on the window.
ExtremalState mathieu_ground(double q, std::optional<Window> window = std::nullopt);

/// Two-harmonic generalisation: additionally H_{l,l+2} = (r/2) e^{-i beta}.
ExtremalState hill_ground(double q, double r, double beta,
                          std::optional<Window> window = std::nullopt);

/// Parametric trace of (D^2(q), <(dL)^2>(q) D^2(q)) over the given q grid.
std::vector<CurvePoint> mathieu_bound_curve(const std::vector<double>& q_values);

/// Same curve for von Mises states, evaluated in closed form from Bessel
/// ratios: product = (kappa/2) rho1 (1 - rho1^2), D^2 = 1 - rho1^2 with
/// rho1 = I_1(2 kappa)/I_0(2 kappa).
std::vector<CurvePoint> von_mises_bound_curve(const std::vector<double>& kappa_values);

/// Norm of (dL - i kappa dS_alpha) applied to the given state, edge rows of
/// the truncated operator excluded.
double extremal_residual(const PureState& state, double kappa, double alpha);

/// Same residual evaluated on the von Mises state |0, alpha, kappa>.
double von_mises_residual(double kappa, double alpha,
                          std::optional<Window> window = std::nullopt);

struct MatchResult {
    double kappa_matched = 0.0; // equal-dispersion kappa for the given q
    double infidelity = 0.0;    // 1 - |<ground | von Mises>|^2, phases aligned
};

MatchResult mathieu_vs_vonmises(double q);

} // namespace rotorlab
