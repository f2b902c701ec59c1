#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "rotorlab/bessel.hpp"
#include "rotorlab/measures.hpp"
#include "rotorlab/states.hpp"

#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace rotorlab;
using cplx = std::complex<double>;

namespace {

PureState two_level_plus() {
    std::vector<cplx> amps(11, cplx(0.0, 0.0));
    amps[5] = 1.0 / std::sqrt(2.0);
    amps[6] = 1.0 / std::sqrt(2.0);
    return PureState(Window{-5, 5}, std::move(amps), true);
}

// brute-force maximum of (c^T x)^2 / (x^T Gamma x) over a dense angle grid
double grid_max_ratio(const Moments& m, int n_angles) {
    const CovMatrix2 g = covariance_matrix(m);
    const double cx = m.mean_c(), cy = m.mean_s();
    double best = 0.0;
    for (int i = 0; i < n_angles; ++i) {
        const double a = 2.0 * std::numbers::pi * i / n_angles;
        const double x = std::cos(a), y = std::sin(a);
        const double num = (cx * x + cy * y) * (cx * x + cy * y);
        const double den = g.quad_form(x, y);
        if (den > 1e-300)
            best = std::max(best, num / den);
    }
    return best;
}

} // namespace

TEST_CASE("dispersion") {
    CHECK(dispersion(moments(momentum_eigenstate(0, Window::symmetric(5)))) == 1.0);
    // von Mises kappa = 1: frozen series-oracle value of 1 - (I1(2)/I0(2))^2
    CHECK(dispersion(moments(von_mises_state(0, 0.0, 1.0))) ==
          doctest::Approx(0.51311052670321156).epsilon(1e-11));
    CHECK(dispersion(moments(two_level_plus())) == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("covariance matrix") {
    SUBCASE("isotropic for a momentum eigenstate") {
        const CovMatrix2 g =
            covariance_matrix(moments(momentum_eigenstate(0, Window::symmetric(5))));
        CHECK(g.var_s == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(g.var_c == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(g.cov_sc == 0.0);
    }
    SUBCASE("two-level superposition, by hand") {
        const CovMatrix2 g = covariance_matrix(moments(two_level_plus()));
        CHECK(g.var_s == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(g.var_c == doctest::Approx(0.25).epsilon(1e-14));
        CHECK(std::abs(g.cov_sc) < 1e-15);
    }
    SUBCASE("von Mises: diagonal with var_s = rho1/(2 kappa)") {
        for (double kappa : {0.5, 1.0, 4.0, 10.0}) {
            const CovMatrix2 g = covariance_matrix(moments(von_mises_state(0, 0.0, kappa)));
            const double want = bessel_ratio(1, 2.0 * kappa) / (2.0 * kappa);
            CHECK(g.var_s == doctest::Approx(want).epsilon(1e-10));
            CHECK(std::abs(g.cov_sc) < 1e-13);
        }
    }
    SUBCASE("trace identity and positive semidefiniteness on random states") {
        for (std::uint64_t seed = 0; seed < 300; ++seed) {
            const Moments m = moments(random_state(seed, Window::symmetric(16)));
            const CovMatrix2 g = covariance_matrix(m);
            CHECK(std::abs(g.trace() - dispersion(m)) < 1e-14);
            CHECK(g.var_s >= -1e-14);
            CHECK(g.var_c >= -1e-14);
            CHECK(g.det() >= -1e-14);
        }
    }
    SUBCASE("inconsistent moments are rejected") {
        Moments bad;
        bad.mean_e = cplx(0.9, 0.0);
        bad.mean_e2 = cplx(-0.9, 0.0); // sine variance would be negative
        bad.mean_l2 = 1.0;
        CHECK_THROWS_AS(covariance_matrix(bad), std::invalid_argument);
    }
}

TEST_CASE("gamma eigenvalues") {
    SUBCASE("degenerate for a momentum eigenstate") {
        const auto [gp, gm] = gamma_pm(moments(momentum_eigenstate(0, Window::symmetric(5))));
        CHECK(gp == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(gm == doctest::Approx(0.5).epsilon(1e-15));
    }
    SUBCASE("two-level superposition") {
        const auto [gp, gm] = gamma_pm(moments(two_level_plus()));
        CHECK(gp == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(gm == doctest::Approx(0.25).epsilon(1e-14));
    }
    SUBCASE("they are the covariance eigenvalues") {
        for (std::uint64_t seed = 5; seed < 105; ++seed) {
            const Moments m = moments(random_state(seed, Window::symmetric(12)));
            const CovMatrix2 g = covariance_matrix(m);
            const double mid = 0.5 * (g.var_s + g.var_c);
            const double disc = std::sqrt(0.25 * (g.var_s - g.var_c) * (g.var_s - g.var_c) +
                                          g.cov_sc * g.cov_sc);
            const auto [gp, gm] = gamma_pm(m);
            CHECK(gp == doctest::Approx(mid + disc).epsilon(1e-12));
            CHECK(gm == doctest::Approx(mid - disc).epsilon(1e-12));
            CHECK(gp + gm == doctest::Approx(dispersion(m)).epsilon(1e-13));
        }
    }
    SUBCASE("von Mises: gamma_plus equals the sine variance") {
        for (double kappa : {0.3, 1.0, 6.0}) {
            const Moments m = moments(von_mises_state(0, 0.0, kappa));
            CHECK(gamma_pm(m).first ==
                  doctest::Approx(covariance_matrix(m).var_s).epsilon(1e-12));
        }
    }
}

TEST_CASE("mean-axis measure") {
    CHECK(measure_mean_axis(moments(momentum_eigenstate(0, Window::symmetric(5)))) ==
          doctest::Approx(0.5).epsilon(1e-15)); // gamma_minus fallback
    CHECK(measure_mean_axis(moments(two_level_plus())) == doctest::Approx(0.5).epsilon(1e-14));
    for (double kappa : {0.5, 2.0, 9.0}) {
        const Moments m = moments(von_mises_state(0, 0.7, kappa));
        CHECK(measure_mean_axis(m) == doctest::Approx(gamma_pm(m).first).epsilon(1e-11));
    }
}

TEST_CASE("optimal-axis measure") {
    SUBCASE("coincides with the mean axis for von Mises states") {
        for (double kappa : {0.5, 2.0, 9.0}) {
            const Moments m = moments(von_mises_state(0, -1.1, kappa));
            CHECK(measure_optimal_axis(m) ==
                  doctest::Approx(measure_mean_axis(m)).epsilon(1e-11));
        }
    }
    SUBCASE("two-level superposition") {
        CHECK(measure_optimal_axis(moments(two_level_plus())) ==
              doctest::Approx(0.5).epsilon(1e-13));
    }
    SUBCASE("matches the brute-force maximisation over a dense angle grid") {
        for (std::uint64_t seed = 20; seed < 60; ++seed) {
            const Moments m = moments(random_state(seed, Window::symmetric(16)));
            if (std::abs(m.mean_e) < 1e-6)
                continue;
            const OptimalAxis oa = optimal_axis_detail(m);
            const double cx = m.mean_c(), cy = m.mean_s();
            const double num = cx * oa.axis[0] + cy * oa.axis[1];
            const double analytic_ratio = num * num / oa.value;
            const double grid_ratio = grid_max_ratio(m, 10000);
            INFO("seed = ", seed);
            CHECK(analytic_ratio >= grid_ratio * (1.0 - 1e-6));
            CHECK(analytic_ratio <= grid_ratio * (1.0 + 1e-6) + 1e-12);
        }
    }
    SUBCASE("internal consistency with the inverse quadratic form") {
        for (std::uint64_t seed = 60; seed < 90; ++seed) {
            const Moments m = moments(random_state(seed, Window::symmetric(16)));
            if (std::abs(m.mean_e) < 1e-6)
                continue;
            const CovMatrix2 g = covariance_matrix(m);
            if (g.det() < 1e-12)
                continue;
            const double cx = m.mean_c(), cy = m.mean_s();
            const double inv_quad =
                (g.var_c * cx * cx - 2.0 * g.cov_sc * cx * cy + g.var_s * cy * cy) / g.det();
            const OptimalAxis oa = optimal_axis_detail(m);
            const double num = cx * oa.axis[0] + cy * oa.axis[1];
            CHECK(num * num / oa.value == doctest::Approx(inv_quad).epsilon(1e-9));
        }
    }
    SUBCASE("degenerate fallback") {
        const Moments m = moments(momentum_eigenstate(2, Window::symmetric(5)));
        const OptimalAxis oa = optimal_axis_detail(m);
        CHECK(oa.degenerate);
        CHECK(oa.value == doctest::Approx(gamma_pm(m).second).epsilon(1e-14));
    }
}

TEST_CASE("rotated moments") {
    SUBCASE("variance at the mean direction reproduces the mean-axis measure") {
        const Moments m = moments(von_mises_state(1, 0.4, 2.0));
        const auto [mean_c, var_s] = rotated_moments(m, -std::arg(m.mean_e));
        CHECK(mean_c == doctest::Approx(std::abs(m.mean_e)).epsilon(1e-13));
        CHECK(var_s == doctest::Approx(measure_mean_axis(m)).epsilon(1e-12));
    }
    SUBCASE("isotropy of a momentum eigenstate") {
        const Moments m = moments(momentum_eigenstate(0, Window::symmetric(5)));
        for (double a : {-3.0, -1.0, 0.0, 0.5, 2.0})
            CHECK(rotated_moments(m, a).second == doctest::Approx(0.5).epsilon(1e-15));
    }
    SUBCASE("Robertson-type relation saturates for von Mises states") {
        for (double kappa : {0.5, 1.0, 5.0, 20.0}) {
            const Moments m = moments(von_mises_state(0, 0.0, kappa));
            const auto [mean_c, var_s] = rotated_moments(m, 0.0);
            CHECK(std::abs(m.var_l() * var_s - 0.25 * mean_c * mean_c) < 1e-9);
        }
    }
}

TEST_CASE("hierarchy") {
    SUBCASE("two-level superposition values") {
        const HierarchyReport r = hierarchy(moments(two_level_plus()));
        CHECK(r.dispersion == doctest::Approx(0.75).epsilon(1e-14));
        CHECK(r.gamma_plus == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(r.mean_axis == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(r.optimal_axis == doctest::Approx(0.5).epsilon(1e-13));
        CHECK(r.ordered);
        CHECK_FALSE(r.degenerate);
    }
    SUBCASE("von Mises: the three non-dispersion measures coincide") {
        const HierarchyReport r = hierarchy(moments(von_mises_state(0, 0.0, 3.0)));
        CHECK(r.gamma_plus == doctest::Approx(r.mean_axis).epsilon(1e-11));
        CHECK(r.mean_axis == doctest::Approx(r.optimal_axis).epsilon(1e-11));
        CHECK(r.ordered);
    }
    SUBCASE("ordering holds for random pure states and mixtures") {
        for (std::uint64_t seed = 0; seed < 1000; ++seed) {
            const HierarchyReport r =
                hierarchy(moments(random_state(seed, Window::symmetric(16))));
            INFO("seed = ", seed);
            CHECK(r.ordered);
        }
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            Ensemble mix{{{0.35, random_state(seed * 2 + 1, Window::symmetric(12))},
                          {0.65, random_state(seed * 2 + 2, Window::symmetric(12))}}};
            CHECK(hierarchy(moments(mix)).ordered);
        }
    }
    SUBCASE("csv row shape") {
        const std::string row = hierarchy(moments(two_level_plus())).csv_row(7);
        CHECK(row.substr(0, 2) == "7,");
        CHECK(std::count(row.begin(), row.end(), ',') == 5);
    }
}

TEST_CASE("inertia tensors") {
    SUBCASE("uniform ring") {
        const InertiaTensor3 t =
            inertia_tensor(moments(momentum_eigenstate(0, Window::symmetric(5))),
                           InertiaAbout::center_of_mass);
        CHECK(t.m[0][0] == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(t.m[1][1] == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(t.m[2][2] == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(t.m[0][1] == 0.0);
        CHECK(t.m[0][2] == 0.0);
    }
    SUBCASE("parallel-axis identity both ways") {
        for (std::uint64_t seed = 0; seed < 200; ++seed) {
            const Moments m = moments(random_state(seed, Window::symmetric(12)));
            const InertiaTensor3 io = inertia_tensor(m, InertiaAbout::origin);
            const InertiaTensor3 ig = inertia_tensor(m, InertiaAbout::center_of_mass);
            const std::array<double, 3> a{m.mean_c(), m.mean_s(), 0.0};
            const double a2 = a[0] * a[0] + a[1] * a[1];
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) {
                    const double shift = a2 * (i == j ? 1.0 : 0.0) -
                                         a[static_cast<std::size_t>(i)] * a[static_cast<std::size_t>(j)];
                    CHECK(std::abs(io.m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] -
                                   ig.m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] -
                                   shift) < 1e-14);
                }
            CHECK(ig.m[2][2] == doctest::Approx(dispersion(m)).epsilon(1e-13));
            CHECK(ig.m[0][2] == 0.0);
            CHECK(ig.m[1][2] == 0.0);
        }
    }
}

TEST_CASE("moment about an axis") {
    SUBCASE("z-axis recovers the dispersion") {
        const Moments m = moments(von_mises_state(0, 0.0, 2.0));
        CHECK(moment_about_axis(m, Axis{0.0, 0.0}) ==
              doctest::Approx(dispersion(m)).epsilon(1e-14));
    }
    SUBCASE("in-plane mean axis recovers the mean-axis measure") {
        const Moments m = moments(von_mises_state(0, 0.9, 2.0));
        const Axis axis{std::numbers::pi / 2.0, -std::arg(m.mean_e)};
        CHECK(moment_about_axis(m, axis) ==
              doctest::Approx(measure_mean_axis(m)).epsilon(1e-12));
    }
    SUBCASE("agrees with the tensor contraction oracle on random pairs") {
        std::uint64_t rng = 31;
        for (std::uint64_t seed = 0; seed < 300; ++seed) {
            const Moments m = moments(random_state(seed + 400, Window::symmetric(10)));
            const Axis axis{std::numbers::pi * oracle::uniform01(rng),
                            2.0 * std::numbers::pi * oracle::uniform01(rng) - std::numbers::pi};
            const InertiaTensor3 ig = inertia_tensor(m, InertiaAbout::center_of_mass);
            CHECK(std::abs(moment_about_axis(m, axis) - ig.quad_form(axis.unit())) < 1e-13);
        }
    }
    SUBCASE("bounded between gamma_minus and the dispersion") {
        std::uint64_t rng = 77;
        for (std::uint64_t seed = 0; seed < 200; ++seed) {
            const Moments m = moments(random_state(seed + 900, Window::symmetric(10)));
            const double gm = gamma_pm(m).second;
            const Axis axis{std::numbers::pi * oracle::uniform01(rng),
                            2.0 * std::numbers::pi * oracle::uniform01(rng) - std::numbers::pi};
            const double v = moment_about_axis(m, axis);
            CHECK(v >= gm - 1e-12);
            CHECK(v <= dispersion(m) + 1e-12);
        }
    }
    SUBCASE("axis unit vector is normalised") {
        const Axis axis{1.234, -2.345};
        const auto n = axis.unit();
        CHECK(std::abs(n[0] * n[0] + n[1] * n[1] + n[2] * n[2] - 1.0) < 1e-15);
    }
}

TEST_CASE("mixture composition and concavity") {
    SUBCASE("trivial cases") {
        const Moments m1 = moments(von_mises_state(0, 0.0, 2.0));
        const Moments m2 = moments(von_mises_state(0, 1.0, 3.0));
        const MixtureCheck at_zero = mixture_composition_check(0.0, m1, m2, 50);
        CHECK(at_zero.tensor_residual < 1e-15);
        CHECK(std::abs(at_zero.concavity_slack) < 1e-15);
        const MixtureCheck same = mixture_composition_check(0.5, m1, m1, 50);
        CHECK(same.tensor_residual < 1e-15);
        CHECK(std::abs(same.concavity_slack) < 1e-14);
    }
    SUBCASE("two-component von Mises mixture") {
        const Moments m1 = moments(von_mises_state(0, 0.0, 5.0));
        const Moments m2 = moments(von_mises_state(0, 2.0 * std::numbers::pi / 5.0, 5.0));
        const MixtureCheck mc = mixture_composition_check(0.4, m1, m2, 100);
        CHECK(mc.tensor_residual <= 1e-13);
        CHECK(mc.concavity_slack >= -1e-12);
    }
    SUBCASE("random mixtures stay concave") {
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            const Moments m1 = moments(random_state(seed + 50, Window::symmetric(8)));
            const Moments m2 = moments(random_state(seed + 950, Window::symmetric(8)));
            const MixtureCheck mc = mixture_composition_check(0.3, m1, m2, 60);
            CHECK(mc.tensor_residual <= 1e-13);
            CHECK(mc.concavity_slack >= -1e-12);
        }
    }
    SUBCASE("p outside [0, 1] is rejected") {
        const Moments m = moments(momentum_eigenstate(0, Window::symmetric(4)));
        CHECK_THROWS_AS(mixture_composition_check(1.5, m, m, 10), std::invalid_argument);
    }
}
