#include "rotorlab/verify.hpp"

#include "rotorlab/bessel.hpp"
#include "rotorlab/measures.hpp"
#include "rotorlab/states.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>

namespace rotorlab::verify {

namespace {

constexpr int kHalfWidth = 32;

double logspace(double lo, double hi, int i, int n) {
    return lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(n - 1));
}

std::string fmt_g(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", x);
    return buf;
}

std::string describe_worst(const char* what, double worst, std::uint64_t seed) {
    std::ostringstream oss;
    oss << what << " " << fmt_g(worst) << " (seed " << seed << ")";
    return oss.str();
}

} // namespace

std::vector<PropertyResult> hierarchy_suite(int n_states, std::uint64_t seed) {
    const Window w = Window::symmetric(kHalfWidth);
    double worst_order = std::numeric_limits<double>::infinity();
    double worst_weak = std::numeric_limits<double>::infinity();
    std::uint64_t worst_order_seed = 0, worst_weak_seed = 0;

    auto scan = [&](const Moments& m, std::uint64_t tag) {
        const HierarchyReport r = hierarchy(m);
        const double order_slack = std::min(
            {r.dispersion - r.gamma_plus, r.gamma_plus - r.mean_axis, r.mean_axis - r.optimal_axis});
        if (order_slack < worst_order) {
            worst_order = order_slack;
            worst_order_seed = tag;
        }
        const double weak = m.var_l() * r.dispersion - 0.25 * (1.0 - r.dispersion);
        if (weak < worst_weak) {
            worst_weak = weak;
            worst_weak_seed = tag;
        }
    };

    for (int i = 0; i < n_states; ++i) {
        const std::uint64_t s = seed + static_cast<std::uint64_t>(i);
        scan(moments(random_state(s, w)), s);
    }
    const int n_mix = std::max(1, n_states / 10);
    for (int i = 0; i < n_mix; ++i) {
        const std::uint64_t s = seed + 0x10000000ULL + static_cast<std::uint64_t>(3 * i);
        PureState a = random_state(s, w);
        PureState b = random_state(s + 1, w);
        // deterministic weight from the tag
        const double p = 0.5 + 0.4 * std::sin(static_cast<double>(i));
        Ensemble mix{{{p, std::move(a)}, {1.0 - p, std::move(b)}}};
        scan(moments(mix), s);
    }

    std::vector<PropertyResult> out;
    out.push_back({"hierarchy ordering", worst_order >= -kOrderSlack, worst_order,
                   describe_worst("min slack", worst_order, worst_order_seed)});
    out.push_back({"weak product bound", worst_weak >= -1e-12, worst_weak,
                   describe_worst("min slack", worst_weak, worst_weak_seed)});
    return out;
}

std::vector<PropertyResult> saturation_suite() {
    double worst_defect = 0.0;
    double worst_pairwise = 0.0;
    double worst_residual = 0.0;
    const int n = 50;
    for (int i = 0; i < n; ++i) {
        const double kappa = logspace(0.1, 50.0, i, n);
        const Moments m = moments(von_mises_state(0, 0.0, kappa));
        const double alpha = -std::arg(m.mean_e);
        const auto [mean_c, var_s] = rotated_moments(m, alpha);
        worst_defect = std::max(worst_defect,
                                std::abs(m.var_l() * var_s - 0.25 * mean_c * mean_c));
        const HierarchyReport r = hierarchy(m);
        worst_pairwise = std::max({worst_pairwise, std::abs(r.gamma_plus - r.mean_axis),
                                   std::abs(r.gamma_plus - r.optimal_axis),
                                   std::abs(r.mean_axis - r.optimal_axis)});
        // closed-form cross-check of <(dL)^2> against the Bessel ratio
        const double rho1 = bessel_ratio(1, 2.0 * kappa);
        worst_residual =
            std::max(worst_residual, std::abs(m.var_l() - 0.5 * kappa * rho1) /
                                         std::max(1.0, 0.5 * kappa * rho1));
    }
    std::vector<PropertyResult> out;
    out.push_back({"robertson saturation defect", worst_defect <= 1e-9, worst_defect,
                   "max |<dL^2><dS_a^2> - <C_a>^2/4| = " + fmt_g(worst_defect)});
    out.push_back({"measure coincidence", worst_pairwise <= 1e-10, worst_pairwise,
                   "max pairwise gap = " + fmt_g(worst_pairwise)});
    out.push_back({"variance closed form", worst_residual <= 1e-10, worst_residual,
                   "max relative gap = " + fmt_g(worst_residual)});
    return out;
}

std::vector<PropertyResult> inertia_suite(int n_samples, std::uint64_t seed) {
    const Window w = Window::symmetric(kHalfWidth);
    double worst_pa = 0.0;       // parallel-axis round trip
    double worst_forms = 0.0;    // the two closed forms of the axis moment
    double worst_range = 0.0;    // gamma_- <= M <= D^2 violation
    std::uint64_t rng = seed;
    auto next01 = [&rng]() {
        rng += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = rng;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return static_cast<double>((z ^ (z >> 31)) >> 11) * 0x1.0p-53;
    };

    for (int i = 0; i < n_samples; ++i) {
        const Moments m = moments(random_state(seed + 7000u + static_cast<std::uint64_t>(i), w));
        const Axis axis{std::numbers::pi * next01(),
                        wrap_angle(2.0 * std::numbers::pi * next01())};

        const InertiaTensor3 io = inertia_tensor(m, InertiaAbout::origin);
        const InertiaTensor3 ig = inertia_tensor(m, InertiaAbout::center_of_mass);
        const std::array<double, 3> a{m.mean_c(), m.mean_s(), 0.0};
        const double a2 = a[0] * a[0] + a[1] * a[1];
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) {
                const double steiner = a2 * (r == c ? 1.0 : 0.0) - a[static_cast<std::size_t>(r)] * a[static_cast<std::size_t>(c)];
                worst_pa = std::max(worst_pa,
                                    std::abs(io.m[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] -
                                             (ig.m[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] + steiner)));
            }

        const double via_tensor = ig.quad_form(axis.unit());
        const double via_forms = moment_about_axis(m, axis);
        const auto [mc, vs] = rotated_moments(m, axis.phi_cap);
        (void)mc;
        const double vc = dispersion(m) - vs;
        const double alt = dispersion(m) - std::sin(axis.theta) * std::sin(axis.theta) * vc;
        worst_forms = std::max({worst_forms, std::abs(via_tensor - via_forms),
                                std::abs(alt - via_forms)});

        const auto [gp, gm] = gamma_pm(m);
        (void)gp;
        worst_range = std::max({worst_range, gm - via_forms, via_forms - dispersion(m)});
    }

    // fixed two-component von Mises mixture exercising the composition rule
    const Moments m1 = moments(von_mises_state(0, 0.0, 5.0));
    const Moments m2 = moments(von_mises_state(0, 2.0 * std::numbers::pi / 5.0, 5.0));
    const MixtureCheck mc = mixture_composition_check(0.4, m1, m2, 100);

    std::vector<PropertyResult> out;
    out.push_back({"parallel axis round trip", worst_pa <= 1e-13, worst_pa,
                   "max entry residual = " + fmt_g(worst_pa)});
    out.push_back({"axis moment equivalence", worst_forms <= 1e-13, worst_forms,
                   "max form disagreement = " + fmt_g(worst_forms)});
    out.push_back({"axis moment range", worst_range <= 1e-12, worst_range,
                   "max range violation = " + fmt_g(worst_range)});
    out.push_back({"mixture composition", mc.tensor_residual <= 1e-13, mc.tensor_residual,
                   "tensor residual = " + fmt_g(mc.tensor_residual)});
    out.push_back({"mixture concavity", mc.concavity_slack >= -1e-12, mc.concavity_slack,
                   "min slack = " + fmt_g(mc.concavity_slack)});
    return out;
}

std::vector<PropertyResult> povm_suite() {
    std::vector<PropertyResult> out;

    const PureState fid = von_mises_state(0, 0.0, 5.0, Window::symmetric(60), TailPolicy::strict);
    const double dev = povm_deviation(fid, Window::symmetric(20));
    out.push_back({"povm completeness (converged fiducial)", dev <= 1e-12, dev,
                   "deviation = " + fmt_g(dev)});

    const PureState basis = momentum_eigenstate(0, Window::symmetric(5));
    const double dev0 = povm_deviation(basis, Window::symmetric(2));
    out.push_back({"povm completeness (basis fiducial)", dev0 == 0.0, dev0,
                   "deviation = " + fmt_g(dev0)});

    const PureState hard =
        von_mises_state(0, 0.0, 5.0, Window::symmetric(3), TailPolicy::keep);
    const double dev_hard = povm_deviation(hard, Window::symmetric(1));
    const double tail = 1.0 - hard.norm_sq();
    out.push_back({"povm truncation visible", dev_hard > 1e-3 &&
                                                  std::abs(dev_hard - tail) <= 1e-14,
                   dev_hard, "deviation = " + fmt_g(dev_hard)});
    return out;
}

std::vector<PropertyResult> all_suites(int n_states, std::uint64_t seed) {
    std::vector<PropertyResult> out;
    for (auto&& batch :
         {hierarchy_suite(n_states, seed), saturation_suite(),
          inertia_suite(std::max(100, n_states / 10), seed), povm_suite()})
        out.insert(out.end(), batch.begin(), batch.end());
    return out;
}

} // namespace rotorlab::verify
