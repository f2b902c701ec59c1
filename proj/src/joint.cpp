#include "rotorlab/joint.hpp"

#include "rotorlab/bessel.hpp"
#include "rotorlab/measures.hpp"
#include "rotorlab/numerics.hpp"
#include "rotorlab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace rotorlab {

namespace {

constexpr double kPhaseTol = 1e-10;
constexpr double kInteriorFloor = 1e-4;

double sine_sigma(const Moments& m) { return std::sqrt(measure_mean_axis(m)); }

void check_ancilla_phases(const Moments& a) {
    if (std::abs(a.mean_e) > kDegenerateEps && std::abs(std::arg(a.mean_e)) > kPhaseTol)
        throw std::invalid_argument("joint: ancilla violates arg<E_a> = 0, got arg = " +
                                    std::to_string(std::arg(a.mean_e)));
    if (std::abs(a.mean_e2) > kDegenerateEps && std::abs(std::arg(a.mean_e2)) > kPhaseTol)
        throw std::invalid_argument("joint: ancilla violates arg<E_a^2> = 0, got arg = " +
                                    std::to_string(std::arg(a.mean_e2)));
}

double signal_cap(double ancilla_param) { return std::max(50.0, 5.0 * ancilla_param); }

// Interior local minima of the product over the signal parameter, the
// boundary basin at zero excluded.  Returns +inf when none exists.
double interior_minimum(const std::function<double(double)>& f, double cap) {
    const int n = 160;
    std::vector<double> xs(n), ys(n);
    for (int i = 0; i < n; ++i) {
        xs[static_cast<std::size_t>(i)] =
            kInteriorFloor + (cap - kInteriorFloor) * static_cast<double>(i) / (n - 1);
        ys[static_cast<std::size_t>(i)] = f(xs[static_cast<std::size_t>(i)]);
    }
    double best = std::numeric_limits<double>::infinity();
    for (int i = 1; i + 1 < n; ++i) {
        if (ys[static_cast<std::size_t>(i)] <= ys[static_cast<std::size_t>(i - 1)] &&
            ys[static_cast<std::size_t>(i)] <= ys[static_cast<std::size_t>(i + 1)]) {
            const MinimizeResult r = minimize_scalar(f, xs[static_cast<std::size_t>(i - 1)],
                                                     xs[static_cast<std::size_t>(i + 1)], 1e-10, 64);
            best = std::min(best, r.min_value);
        }
    }
    return best;
}

} // namespace

StateFamily default_family(JointMode mode) {
    return mode == JointMode::dispersion ? StateFamily::mathieu : StateFamily::vonmises;
}

PureState family_state(StateFamily family, double param) {
    if (param < 0.0)
        throw std::domain_error("family_state: parameter must be >= 0");
    if (family == StateFamily::vonmises)
        return von_mises_state(0, 0.0, param);
    // Mathieu-family states are labelled by the standard Mathieu-function
    // parameter of ce_0(phi/2, q), which is twice the coupling of the
    // angular-momentum-basis operator.
    const ExtremalState es = mathieu_ground(0.5 * param);
    // The ground state for q > 0 peaks at angle pi; rotate it to zero so that
    // <E> and <E^2> are real and nonnegative.
    return displace(es.state, 0, std::numbers::pi, false);
}

Moments family_moments(StateFamily family, double param) { return moments(family_state(family, param)); }

JointUncertainties joint_uncertainties(const Moments& signal, const Moments& ancilla) {
    check_ancilla_phases(ancilla);
    JointUncertainties j;
    j.var_l_total = signal.var_l() + ancilla.var_l();
    j.dispersion_total = std::norm(ancilla.mean_e) * dispersion(signal) + dispersion(ancilla);
    j.var_s_total =
        std::abs(ancilla.mean_e2) * measure_mean_axis(signal) + measure_mean_axis(ancilla);
    const bool phases_defined =
        std::abs(signal.mean_e) > kDegenerateEps && std::abs(ancilla.mean_e) > kDegenerateEps;
    j.beta = phases_defined ? wrap_angle(std::arg(ancilla.mean_e) - std::arg(signal.mean_e)) : 0.0;
    return j;
}

BranchPair branch_bounds(const Moments& signal, const Moments& ancilla, JointMode mode,
                         double b_s, double b_a) {
    const double dls = std::sqrt(std::max(signal.var_l(), 0.0));
    const double dla = std::sqrt(std::max(ancilla.var_l(), 0.0));
    BranchPair out;
    if (mode == JointMode::dispersion) {
        if (b_s < 0.0 || b_a < 0.0)
            throw std::domain_error("branch_bounds: bound values must be >= 0");
        const double ds = std::sqrt(dispersion(signal));
        const double da = std::sqrt(dispersion(ancilla));
        const double dot1 = std::abs(signal.mean_e) * dls * da + dla * ds;
        out.a1 = dot1 * dot1;
        const double dot2 = std::abs(ancilla.mean_e) * std::sqrt(b_s) + std::sqrt(b_a);
        out.a2 = dot2 * dot2;
    } else {
        const double ss = sine_sigma(signal);
        const double sa = sine_sigma(ancilla);
        const double dot1 = std::sqrt(std::abs(signal.mean_e2)) * dls * sa + dla * ss;
        out.a1 = dot1 * dot1;
        const double dot2 =
            std::sqrt(std::abs(ancilla.mean_e2)) * std::abs(signal.mean_e) + std::abs(ancilla.mean_e);
        out.a2 = 0.25 * dot2 * dot2;
    }
    return out;
}

double product(const Moments& signal, const Moments& ancilla, JointMode mode) {
    const JointUncertainties j = joint_uncertainties(signal, ancilla);
    return j.var_l_total * (mode == JointMode::dispersion ? j.dispersion_total : j.var_s_total);
}

SignalOpt minimize_over_signal(double ancilla_param, StateFamily family, JointMode mode) {
    if (ancilla_param < 0.0)
        throw std::domain_error("minimize_over_signal: ancilla parameter must be >= 0");
    const Moments ancilla = family_moments(family, ancilla_param);
    auto f = [&](double p) { return product(family_moments(family, p), ancilla, mode); };
    const MinimizeResult r = minimize_scalar(f, 0.0, signal_cap(ancilla_param), 1e-9, 160);
    return SignalOpt{r.argmin, r.min_value};
}

double matched_signal_param(double ancilla_param, JointMode mode, StateFamily family) {
    const Moments ancilla = family_moments(family, ancilla_param);
    if (mode == JointMode::sine && family == StateFamily::vonmises) {
        // closed form of the saturation condition for the von Mises family
        const double rho2 = bessel_ratio(2, 2.0 * ancilla_param);
        return std::sqrt(rho2) * ancilla_param;
    }
    const MatchKind which = mode == JointMode::dispersion ? MatchKind::d_as : MatchKind::s_as;
    auto f = [&](double p) { return matching_residual(family_moments(family, p), ancilla, which); };
    if (ancilla.var_l() <= 1e-28)
        return 0.0;
    double hi = std::max(1.0, ancilla_param);
    while (f(hi) < 0.0) {
        hi *= 2.0;
        if (hi > 1e6)
            throw BracketError("matched_signal_param: saturation condition not bracketed");
    }
    return find_root(f, 0.0, hi, 1e-10 * std::max(1.0, hi));
}

namespace {

// branch values and matched signal only; the numerical minimisation is
// grafted on by bound_curve_at
JointCurveRow branches_at(double ancilla_param, JointMode mode, StateFamily family) {
    const Moments ancilla = family_moments(family, ancilla_param);
    JointCurveRow row;
    row.ancilla_param = ancilla_param;
    row.ancilla_d2 = dispersion(ancilla);
    row.branch1 = mode == JointMode::dispersion ? ancilla.var_l() : 0.5 * ancilla.var_l();
    row.matched_signal_param = matched_signal_param(ancilla_param, mode, family);
    const Moments matched = family_moments(family, row.matched_signal_param);
    const double b_s = matched.var_l() * dispersion(matched);
    const double b_a = ancilla.var_l() * dispersion(ancilla);
    row.branch2 = branch_bounds(matched, ancilla, mode, b_s, b_a).a2;
    row.bound = std::min(row.branch1, row.branch2);
    return row;
}

} // namespace

JointCurveRow bound_curve_at(double ancilla_param, JointMode mode, StateFamily family) {
    JointCurveRow row = branches_at(ancilla_param, mode, family);
    const SignalOpt opt = minimize_over_signal(ancilla_param, family, mode);
    row.min_product = opt.product_min;
    row.gap = row.bound - row.min_product;
    return row;
}

std::vector<JointCurveRow> bound_curve(const std::vector<double>& ancilla_grid, JointMode mode,
                                       StateFamily family) {
    double prev = -std::numeric_limits<double>::infinity();
    for (double a : ancilla_grid) {
        if (a < prev)
            throw std::invalid_argument("bound_curve: grid must be sorted");
        prev = a;
    }
    std::vector<JointCurveRow> out;
    out.reserve(ancilla_grid.size());
    for (double a : ancilla_grid)
        out.push_back(bound_curve_at(a, mode, family));
    return out;
}

std::pair<CriticalPoint, CriticalPoint> critical_points(JointMode mode) {
    return critical_points(mode, default_family(mode));
}

namespace {

// Scan a log grid for the first sign change from negative to positive and
// return the bracketing pair; diagnostic error with the scanned values
// otherwise.
std::pair<double, double> bracket_rising(const std::function<double(double)>& f, double lo,
                                         double hi, int n_scan, const char* what) {
    std::vector<double> xs(static_cast<std::size_t>(n_scan)), ys(static_cast<std::size_t>(n_scan));
    for (int i = 0; i < n_scan; ++i) {
        xs[static_cast<std::size_t>(i)] =
            lo * std::pow(hi / lo, static_cast<double>(i) / (n_scan - 1));
        ys[static_cast<std::size_t>(i)] = f(xs[static_cast<std::size_t>(i)]);
    }
    for (int i = 1; i < n_scan; ++i)
        if (ys[static_cast<std::size_t>(i - 1)] < 0.0 && ys[static_cast<std::size_t>(i)] >= 0.0)
            return {xs[static_cast<std::size_t>(i - 1)], xs[static_cast<std::size_t>(i)]};
    std::ostringstream oss;
    oss << what << ": no sign change on [" << lo << ", " << hi << "]; scanned values:";
    for (int i = 0; i < n_scan; ++i)
        oss << " (" << xs[static_cast<std::size_t>(i)] << ", " << ys[static_cast<std::size_t>(i)]
            << ")";
    throw BracketError(oss.str());
}

} // namespace

std::pair<CriticalPoint, CriticalPoint> critical_points(JointMode mode, StateFamily family) {
    // branch1 - branch2 changes sign at the intersection of the two bounds
    auto branch_diff = [&](double a) {
        const JointCurveRow row = branches_at(a, mode, family);
        return row.branch1 - row.branch2;
    };
    const auto [ilo, ihi] =
        bracket_rising(branch_diff, 0.2, 80.0, 25, "critical_points: intersection");
    const double a_int = find_root(branch_diff, ilo, ihi, 1e-8);
    const Moments anc_int = family_moments(family, a_int);
    const double product_int =
        mode == JointMode::dispersion ? anc_int.var_l() : 0.5 * anc_int.var_l();
    CriticalPoint intersection{a_int, dispersion(anc_int), product_int,
                               CriticalPoint::Kind::intersection};

    // The sharp point is where the interior minimum over the signal parameter
    // meets the momentum-eigenstate boundary value.
    auto interior_minus_boundary = [&](double a) {
        const Moments ancilla = family_moments(family, a);
        auto f = [&](double p) { return product(family_moments(family, p), ancilla, mode); };
        const double interior = interior_minimum(f, signal_cap(a));
        const double boundary =
            mode == JointMode::dispersion ? ancilla.var_l() : 0.5 * ancilla.var_l();
        if (!std::isfinite(interior))
            return 1.0; // no interior basin: boundary wins
        return interior - boundary;
    };
    auto falling = [&](double a) { return -interior_minus_boundary(a); };
    const auto [slo, shi] = bracket_rising(falling, 0.2, 80.0, 25, "critical_points: sharp point");
    const double a_sh = find_root(interior_minus_boundary, slo, shi, 1e-4);
    const Moments anc_sh = family_moments(family, a_sh);
    const double boundary_sh =
        mode == JointMode::dispersion ? anc_sh.var_l() : 0.5 * anc_sh.var_l();
    CriticalPoint sharp{a_sh, dispersion(anc_sh), boundary_sh, CriticalPoint::Kind::sharp};
    return {intersection, sharp};
}

double matching_residual(const Moments& signal, const Moments& ancilla, MatchKind which) {
    const double dls = std::sqrt(std::max(signal.var_l(), 0.0));
    const double dla = std::sqrt(std::max(ancilla.var_l(), 0.0));
    const double ds = std::sqrt(dispersion(signal));
    const double da = std::sqrt(dispersion(ancilla));
    switch (which) {
    case MatchKind::d_sa:
        return dls * ds - std::abs(signal.mean_e) * dla * da;
    case MatchKind::d_as:
        return dls * da - std::abs(ancilla.mean_e) * dla * ds;
    case MatchKind::s_sa:
        return dls * sine_sigma(signal) - std::sqrt(std::abs(signal.mean_e2)) * dla * sine_sigma(ancilla);
    case MatchKind::s_as:
        return dls * sine_sigma(ancilla) - std::sqrt(std::abs(ancilla.mean_e2)) * dla * sine_sigma(signal);
    }
    throw std::logic_error("matching_residual: unknown kind");
}

} // namespace rotorlab
