#include "rotorlab/measures.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace rotorlab {

namespace {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
    double norm() const { return std::sqrt(x * x + y * y); }
};

Vec2 mean_vector(const Moments& m) { return Vec2{m.mean_c(), m.mean_s()}; }

// Gamma applied to a vector.
Vec2 gamma_apply(const CovMatrix2& g, const Vec2& v) {
    return Vec2{g.var_s * v.x + g.cov_sc * v.y, g.cov_sc * v.x + g.var_c * v.y};
}

// J = i sigma_y rotates by -90 degrees: (x, y) -> (y, -x).
Vec2 j_apply(const Vec2& v) { return Vec2{v.y, -v.x}; }

} // namespace

double InertiaTensor3::quad_form(const std::array<double, 3>& n) const {
    double s = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            s += n[static_cast<std::size_t>(i)] * m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] *
                 n[static_cast<std::size_t>(j)];
    return s;
}

std::array<double, 3> Axis::unit() const {
    return {std::sin(theta) * std::cos(phi_cap), std::sin(theta) * std::sin(phi_cap),
            std::cos(theta)};
}

std::string HierarchyReport::csv_row(std::uint64_t seed) const {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%llu,%.17g,%.17g,%.17g,%.17g,%d",
                  static_cast<unsigned long long>(seed), dispersion, gamma_plus, mean_axis,
                  optimal_axis, ordered ? 1 : 0);
    return std::string(buf);
}

double dispersion(const Moments& m) { return 1.0 - std::norm(m.mean_e); }

CovMatrix2 covariance_matrix(const Moments& m) {
    const double re2 = m.mean_e2.real();
    const double im2 = m.mean_e2.imag();
    CovMatrix2 g;
    g.var_s = 0.5 * (1.0 - re2) - m.mean_s() * m.mean_s();
    g.var_c = 0.5 * (1.0 + re2) - m.mean_c() * m.mean_c();
    g.cov_sc = 0.5 * im2 + m.mean_s() * m.mean_c();
    if (g.var_s < -1e-12 || g.var_c < -1e-12 || g.det() < -1e-12)
        throw std::invalid_argument("covariance_matrix: inconsistent moments (not PSD)");
    return g;
}

std::pair<double, double> gamma_pm(const Moments& m) {
    const double d2 = dispersion(m);
    const double dev = std::abs(m.mean_e2 - m.mean_e * m.mean_e);
    return {0.5 * (d2 + dev), 0.5 * (d2 - dev)};
}

double measure_mean_axis(const Moments& m) {
    const Vec2 c = mean_vector(m);
    if (c.norm() <= kDegenerateEps)
        return gamma_pm(m).second;
    const CovMatrix2 g = covariance_matrix(m);
    const Vec2 u{c.x / c.norm(), c.y / c.norm()};
    return g.quad_form(u.x, u.y);
}

OptimalAxis optimal_axis_detail(const Moments& m) {
    OptimalAxis out;
    const Vec2 c = mean_vector(m);
    if (c.norm() <= kDegenerateEps) {
        out.value = gamma_pm(m).second;
        out.degenerate = true;
        return out;
    }
    const CovMatrix2 g = covariance_matrix(m);
    // x_o = J Gamma J^T c / sqrt(c^T J Gamma^2 J^T c)
    const Vec2 jc = j_apply(c);
    const Vec2 gjc = gamma_apply(g, jc);
    const double norm = gjc.norm();
    if (norm <= 1e-300 * c.norm()) {
        // Gamma annihilates J^T c: singular covariance along the axis.
        out.value = 0.0;
        out.degenerate = true;
        return out;
    }
    // J^T = -J
    const Vec2 xo{-j_apply(gjc).x / norm, -j_apply(gjc).y / norm};
    out.axis = {xo.x, xo.y};
    out.value = g.quad_form(xo.x, xo.y);
    return out;
}

double measure_optimal_axis(const Moments& m) { return optimal_axis_detail(m).value; }

std::pair<double, double> rotated_moments(const Moments& m, double alpha) {
    alpha = wrap_angle(alpha);
    const Vec2 c = mean_vector(m);
    const double ca = std::cos(alpha);
    const double sa = std::sin(alpha);
    const CovMatrix2 g = covariance_matrix(m);
    return {c.x * ca + c.y * sa, g.quad_form(ca, sa)};
}

HierarchyReport hierarchy(const Moments& m) {
    HierarchyReport r;
    r.dispersion = dispersion(m);
    r.gamma_plus = gamma_pm(m).first;
    r.mean_axis = measure_mean_axis(m);
    const OptimalAxis oa = optimal_axis_detail(m);
    r.optimal_axis = oa.value;
    r.degenerate = std::abs(m.mean_e) <= kDegenerateEps || oa.degenerate;
    r.ordered = r.dispersion >= r.gamma_plus - kOrderSlack &&
                r.gamma_plus >= r.mean_axis - kOrderSlack &&
                r.mean_axis >= r.optimal_axis - kOrderSlack;
    return r;
}

InertiaTensor3 inertia_tensor(const Moments& m, InertiaAbout about) {
    const double re2 = m.mean_e2.real();
    const double im2 = m.mean_e2.imag();
    const double s2 = 0.5 * (1.0 - re2);   // <S^2>
    const double c2 = 0.5 * (1.0 + re2);   // <C^2>
    const double sc = -0.5 * im2;          // <SC>, symmetrised
    InertiaTensor3 t;
    t.m = {{{s2, -sc, 0.0}, {-sc, c2, 0.0}, {0.0, 0.0, 1.0}}};
    if (about == InertiaAbout::origin)
        return t;
    // parallel axis theorem with a = (<C>, <S>, 0), unit mass
    const std::array<double, 3> a{m.mean_c(), m.mean_s(), 0.0};
    const double a2 = a[0] * a[0] + a[1] * a[1];
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const double shift = a2 * (i == j ? 1.0 : 0.0) - a[static_cast<std::size_t>(i)] * a[static_cast<std::size_t>(j)];
            t.m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] -= shift;
        }
    return t;
}

double moment_about_axis(const Moments& m, const Axis& axis) {
    const double ct = std::cos(axis.theta);
    const auto [mean_c_phi, var_s_phi] = rotated_moments(m, axis.phi_cap);
    (void)mean_c_phi;
    const double var_c_phi = dispersion(m) - var_s_phi;
    return var_s_phi + ct * ct * var_c_phi;
}

MixtureCheck mixture_composition_check(double p, const Moments& m1, const Moments& m2,
                                       int axis_grid) {
    if (p < 0.0 || p > 1.0)
        throw std::invalid_argument("mixture_composition_check: p outside [0, 1]");
    Moments mix;
    mix.mean_l = p * m1.mean_l + (1.0 - p) * m2.mean_l;
    mix.mean_l2 = p * m1.mean_l2 + (1.0 - p) * m2.mean_l2;
    mix.mean_e = p * m1.mean_e + (1.0 - p) * m2.mean_e;
    mix.mean_e2 = p * m1.mean_e2 + (1.0 - p) * m2.mean_e2;

    const InertiaTensor3 ig = inertia_tensor(mix, InertiaAbout::center_of_mass);
    const InertiaTensor3 i1 = inertia_tensor(m1, InertiaAbout::center_of_mass);
    const InertiaTensor3 i2 = inertia_tensor(m2, InertiaAbout::center_of_mass);
    const std::array<double, 3> r{m2.mean_c() - m1.mean_c(), m2.mean_s() - m1.mean_s(), 0.0};
    const double r2 = r[0] * r[0] + r[1] * r[1];

    MixtureCheck out;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const double sep = p * (1.0 - p) *
                               (r2 * (i == j ? 1.0 : 0.0) -
                                r[static_cast<std::size_t>(i)] * r[static_cast<std::size_t>(j)]);
            const double composed = p * i1.m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] +
                                    (1.0 - p) * i2.m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] + sep;
            out.tensor_residual =
                std::max(out.tensor_residual,
                         std::abs(ig.m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] - composed));
        }

    double worst = std::numeric_limits<double>::infinity();
    const int n = std::max(axis_grid, 1);
    for (int i = 0; i < n; ++i) {
        // deterministic axis sweep covering polar angle and azimuth together
        const double t = static_cast<double>(i) / static_cast<double>(n);
        const Axis axis{std::numbers::pi * t, wrap_angle(2.0 * std::numbers::pi * t * 7.0)};
        const double slack = moment_about_axis(mix, axis) - p * moment_about_axis(m1, axis) -
                             (1.0 - p) * moment_about_axis(m2, axis);
        worst = std::min(worst, slack);
    }
    out.concavity_slack = worst;
    return out;
}

} // namespace rotorlab
