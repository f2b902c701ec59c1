#pragma once

#include "rotorlab/states.hpp"

#include <utility>
#include <vector>

namespace rotorlab {

/// Which uncertainty product of the commuting two-rotor pair is studied:
/// dispersion mode uses <(dL)^2> D^2, sine mode uses <(dL)^2> <(dS)^2>.
enum class JointMode { dispersion, sine };

/// Extremal-state family used for signal and ancilla.
enum class StateFamily { mathieu, vonmises };

StateFamily default_family(JointMode mode);

/// Totals for the commuting pair built from signal and ancilla moments.
struct JointUncertainties {
    double var_l_total = 0.0;      // <(dL_s)^2> + <(dL_a)^2>
    double dispersion_total = 0.0; // |<E_a>|^2 D_s^2 + D_a^2
    double var_s_total = 0.0;      // |<E_a^2>| <(dS_s)^2> + <(dS_a)^2>
    double beta = 0.0;             // arg<E_a> - arg<E_s>
};

struct BranchPair {
    double a1 = 0.0;
    double a2 = 0.0;
};

struct CriticalPoint {
    enum class Kind { intersection, sharp };
    double ancilla_param = 0.0;
    double ancilla_dispersion_sq = 0.0;
    double product = 0.0;
    Kind kind = Kind::intersection;
};

/// Extremal family state with phases aligned so that arg<E> = 0 and
/// arg<E^2> = 0 (the ground state for q > 0 is rotated by pi).
PureState family_state(StateFamily family, double param);
Moments family_moments(StateFamily family, double param);

JointUncertainties joint_uncertainties(const Moments& signal, const Moments& ancilla);

/// Cauchy-Schwarz branch values; b_s/b_a are single-rotor bound values B(D)
/// used by the dispersion-mode second branch (ignored in sine mode).
BranchPair branch_bounds(const Moments& signal, const Moments& ancilla, JointMode mode,
                         double b_s, double b_a);

double product(const Moments& signal, const Moments& ancilla, JointMode mode);

struct SignalOpt {
    double signal_param = 0.0;
    double product_min = 0.0;
};

/// Minimise the product over the signal family parameter at fixed ancilla.
SignalOpt minimize_over_signal(double ancilla_param, StateFamily family, JointMode mode);

struct JointCurveRow {
    double ancilla_param = 0.0;
    double ancilla_d2 = 0.0;
    double branch1 = 0.0;              // momentum-eigenstate-signal branch
    double branch2 = 0.0;              // saturation-matched branch
    double bound = 0.0;                // min(branch1, branch2)
    double matched_signal_param = 0.0; // signal saturating the Cauchy-Schwarz step
    double min_product = 0.0;          // numerically minimised product
    double gap = 0.0;                  // bound - min_product (signed)
};

std::vector<JointCurveRow> bound_curve(const std::vector<double>& ancilla_grid, JointMode mode,
                                       StateFamily family);
JointCurveRow bound_curve_at(double ancilla_param, JointMode mode, StateFamily family);

/// Signal parameter saturating the branch-2 Cauchy-Schwarz condition.
double matched_signal_param(double ancilla_param, JointMode mode, StateFamily family);

std::pair<CriticalPoint, CriticalPoint> critical_points(JointMode mode);
std::pair<CriticalPoint, CriticalPoint> critical_points(JointMode mode, StateFamily family);

/// Saturation conditions of the four Cauchy-Schwarz decompositions.
enum class MatchKind { d_sa, d_as, s_sa, s_as };

double matching_residual(const Moments& signal, const Moments& ancilla, MatchKind which);

} // namespace rotorlab
