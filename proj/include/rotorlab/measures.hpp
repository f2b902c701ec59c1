#pragma once

#include "rotorlab/states.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <utility>

namespace rotorlab {

/// 2x2 covariance matrix of the sine/cosine operators:
/// [[var_s, cov_sc], [cov_sc, var_c]] with cov_sc = -<{dS, dC}>/2.
struct CovMatrix2 {
    double var_s = 0.0;
    double var_c = 0.0;
    double cov_sc = 0.0;

    double trace() const { return var_s + var_c; }
    double det() const { return var_s * var_c - cov_sc * cov_sc; }
    /// x^T Gamma x for x = (cos alpha, sin alpha)
    double quad_form(double cos_a, double sin_a) const {
        return var_s * cos_a * cos_a + var_c * sin_a * sin_a + 2.0 * cov_sc * cos_a * sin_a;
    }
};

struct InertiaTensor3 {
    std::array<std::array<double, 3>, 3> m{};
    double quad_form(const std::array<double, 3>& n) const;
};

/// Rotation axis through the center of mass: theta from +z, Phi in plane.
struct Axis {
    double theta = 0.0;
    double phi_cap = 0.0;
    std::array<double, 3> unit() const;
};

struct HierarchyReport {
    double dispersion = 0.0;
    double gamma_plus = 0.0;
    double mean_axis = 0.0;
    double optimal_axis = 0.0;
    bool ordered = false;
    bool degenerate = false; // <E> = 0 fallback used

    std::string csv_row(std::uint64_t seed) const;
};

inline constexpr double kDegenerateEps = 1e-12;
inline constexpr double kOrderSlack = 1e-12;

/// D^2 = 1 - |<E>|^2
double dispersion(const Moments& m);

CovMatrix2 covariance_matrix(const Moments& m);

/// Eigenvalues (gamma_plus, gamma_minus) of the covariance matrix.
std::pair<double, double> gamma_pm(const Moments& m);

/// m^T Gamma m along the mean direction; gamma_minus when <E> = 0.
double measure_mean_axis(const Moments& m);

struct OptimalAxis {
    double value = 0.0;
    bool degenerate = false;
    std::array<double, 2> axis{1.0, 0.0};
};

/// x_o^T Gamma x_o at the in-plane axis maximising (c^T x)^2 / (x^T Gamma x).
OptimalAxis optimal_axis_detail(const Moments& m);
double measure_optimal_axis(const Moments& m);

/// (<C_alpha>, <(dS_alpha)^2>) for the rotated sine/cosine pair.
std::pair<double, double> rotated_moments(const Moments& m, double alpha);

HierarchyReport hierarchy(const Moments& m);

enum class InertiaAbout { origin, center_of_mass };

InertiaTensor3 inertia_tensor(const Moments& m, InertiaAbout about);

/// Moment of inertia about the axis; equals the covariance/dispersion mix
/// var_s(Phi) + cos^2(theta) var_c(Phi) = D^2 - sin^2(theta) var_c(Phi).
double moment_about_axis(const Moments& m, const Axis& axis);

struct MixtureCheck {
    double tensor_residual = 0.0;  // worst entry vs. the two-component composition
    double concavity_slack = 0.0;  // min over sampled axes of M(mix) - p M1 - (1-p) M2
};

MixtureCheck mixture_composition_check(double p, const Moments& m1, const Moments& m2,
                                       int axis_grid = 100);

} // namespace rotorlab
