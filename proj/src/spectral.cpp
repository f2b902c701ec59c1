#include "rotorlab/spectral.hpp"

#include "rotorlab/bessel.hpp"
#include "rotorlab/measures.hpp"
#include "rotorlab/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace rotorlab {

namespace {

using cplx = std::complex<double>;

constexpr double kTailTarget = 1e-16;

int default_half_width(double q, double r) {
    const double depth = std::abs(q) + 2.0 * std::abs(r);
    return std::max(12, static_cast<int>(std::ceil(2.0 * std::sqrt(depth))) + 12);
}

ExtremalState solve_on_window(double q, double r, double beta, Window w) {
    w.validate();
    const int n = w.size();
    std::vector<double> diag(static_cast<std::size_t>(n));
    for (int l = w.l_min; l <= w.l_max; ++l)
        diag[static_cast<std::size_t>(l - w.l_min)] = static_cast<double>(l) * static_cast<double>(l);
    std::vector<cplx> u1(static_cast<std::size_t>(n - 1), cplx(0.5 * q, 0.0));
    BandedHermitian h;
    if (r == 0.0) {
        h = BandedHermitian::tridiagonal(std::move(diag), std::move(u1));
    } else {
        std::vector<cplx> u2(static_cast<std::size_t>(n - 2), 0.5 * r * std::polar(1.0, -beta));
        h = BandedHermitian::pentadiagonal(std::move(diag), std::move(u1), std::move(u2));
    }
    GroundState g = ground_state(h);

    // Fix the free phase so the l = 0 amplitude is real and positive; the
    // ground state never vanishes there.
    const std::size_t i0 = static_cast<std::size_t>(-w.l_min);
    const double a0 = std::abs(g.eigenvector[i0]);
    if (a0 > 0.0) {
        const cplx phase = std::conj(g.eigenvector[i0]) / a0;
        for (cplx& x : g.eigenvector)
            x *= phase;
    }
    // A real-banded operator commutes with l -> -l, so its simple ground
    // state is exactly even; project out the residual iteration asymmetry.
    const bool real_bands = r == 0.0 || std::abs(std::sin(beta)) < 1e-15;
    if (real_bands && w.l_min == -w.l_max) {
        for (int l = 1; l <= w.l_max; ++l) {
            const cplx even = 0.5 * (g.eigenvector[static_cast<std::size_t>(l - w.l_min)] +
                                     g.eigenvector[static_cast<std::size_t>(-l - w.l_min)]);
            g.eigenvector[static_cast<std::size_t>(l - w.l_min)] = cplx(even.real(), 0.0);
            g.eigenvector[static_cast<std::size_t>(-l - w.l_min)] = cplx(even.real(), 0.0);
        }
        g.eigenvector[i0] = cplx(g.eigenvector[i0].real(), 0.0);
        double nsq = 0.0;
        for (const cplx& x : g.eigenvector)
            nsq += std::norm(x);
        const double inv = 1.0 / std::sqrt(nsq);
        for (cplx& x : g.eigenvector)
            x *= inv;
    }
    PureState state(w, std::move(g.eigenvector), true);
    const double tail = state.edge_mass();
    return ExtremalState{g.eigenvalue, std::move(state), q, r, beta, tail};
}

ExtremalState solve_auto(double q, double r, double beta, std::optional<Window> window) {
    Window w = window.value_or(Window::symmetric(default_half_width(q, r)));
    for (;;) {
        ExtremalState es = solve_on_window(q, r, beta, w);
        if (es.tail_mass <= kTailTarget)
            return es;
        if (std::max(-w.l_min, w.l_max) >= kWindowCap)
            throw TruncationError("extremal state: window cap reached, edge mass " +
                                      std::to_string(es.tail_mass),
                                  es.tail_mass);
        const int grow = std::max(8, w.size() / 2);
        w.l_min = std::max(w.l_min - grow, -kWindowCap);
        w.l_max = std::min(w.l_max + grow, kWindowCap);
    }
}

} // namespace

ExtremalState mathieu_ground(double q, std::optional<Window> window) {
    if (!std::isfinite(q))
        throw std::domain_error("mathieu_ground: q must be finite");
    return solve_auto(q, 0.0, 0.0, window);
}

ExtremalState hill_ground(double q, double r, double beta, std::optional<Window> window) {
    if (!std::isfinite(q) || !std::isfinite(r))
        throw std::domain_error("hill_ground: q and r must be finite");
    return solve_auto(q, r, wrap_angle(beta), window);
}

std::vector<CurvePoint> mathieu_bound_curve(const std::vector<double>& q_values) {
    std::vector<CurvePoint> out;
    out.reserve(q_values.size());
    double prev = -1.0;
    for (double q : q_values) {
        if (q < 0.0 || q < prev)
            throw std::invalid_argument("mathieu_bound_curve: grid must be sorted and >= 0");
        prev = q;
        const ExtremalState es = mathieu_ground(q);
        const Moments m = moments(es.state);
        const double d2 = dispersion(m);
        out.push_back(CurvePoint{q, d2, m.var_l() * d2});
    }
    return out;
}

std::vector<CurvePoint> von_mises_bound_curve(const std::vector<double>& kappa_values) {
    std::vector<CurvePoint> out;
    out.reserve(kappa_values.size());
    for (double kappa : kappa_values) {
        if (kappa < 0.0)
            throw std::invalid_argument("von_mises_bound_curve: kappa must be >= 0");
        const double rho1 = bessel_ratio(1, 2.0 * kappa);
        const double d2 = 1.0 - rho1 * rho1;
        out.push_back(CurvePoint{kappa, d2, 0.5 * kappa * rho1 * d2});
    }
    return out;
}

double extremal_residual(const PureState& state, double kappa, double alpha) {
    if (kappa < 0.0)
        throw std::domain_error("extremal_residual: kappa must be >= 0");
    alpha = wrap_angle(alpha);
    const Window& w = state.window();
    const Moments m = moments(state);
    const double mean_l = m.mean_l;
    const double mean_s_alpha = -std::imag(std::polar(1.0, alpha) * m.mean_e);
    const cplx em = std::polar(1.0, -alpha);
    const cplx ep = std::polar(1.0, alpha);
    double sum = 0.0;
    for (int l = w.l_min + 1; l <= w.l_max - 1; ++l) {
        const cplx sa = 0.5 * (em * state.amplitude(l - 1) - ep * state.amplitude(l + 1));
        const cplx row = (static_cast<double>(l) - mean_l) * state.amplitude(l) - kappa * sa +
                         cplx(0.0, kappa * mean_s_alpha) * state.amplitude(l);
        sum += std::norm(row);
    }
    return std::sqrt(sum);
}

double von_mises_residual(double kappa, double alpha, std::optional<Window> window) {
    const PureState psi = window ? von_mises_state(0, alpha, kappa, *window)
                                 : von_mises_state(0, alpha, kappa);
    return extremal_residual(psi, kappa, alpha);
}

MatchResult mathieu_vs_vonmises(double q) {
    if (q < 0.0)
        throw std::domain_error("mathieu_vs_vonmises: q must be >= 0");
    if (q == 0.0)
        return MatchResult{0.0, 0.0};
    const ExtremalState es = mathieu_ground(q);
    const double target_d2 = dispersion(moments(es.state));

    auto d2_of = [](double kappa) {
        const double rho1 = bessel_ratio(1, 2.0 * kappa);
        return 1.0 - rho1 * rho1;
    };
    double hi = 1.0;
    while (d2_of(hi) > target_d2) {
        hi *= 2.0;
        if (hi > 1e9)
            throw BracketError("mathieu_vs_vonmises: failed to bracket matching kappa");
    }
    const double kappa = find_root([&](double k) { return d2_of(k) - target_d2; }, 0.0, hi, 1e-13);

    // The ground state for q > 0 concentrates at the angle pi; rotate it to
    // zero before comparing with |0, 0, kappa>.
    const PureState aligned = displace(es.state, 0, std::numbers::pi, false);
    const PureState vm = von_mises_state(0, 0.0, kappa);
    const int lo = std::max(aligned.window().l_min, vm.window().l_min);
    const int hi_l = std::min(aligned.window().l_max, vm.window().l_max);
    cplx overlap(0.0, 0.0);
    for (int l = lo; l <= hi_l; ++l)
        overlap += std::conj(aligned.amplitude(l)) * vm.amplitude(l);
    const double fidelity = std::norm(overlap) / (aligned.norm_sq() * vm.norm_sq());
    return MatchResult{kappa, 1.0 - fidelity};
}

} // namespace rotorlab
