#include "rotorlab/states.hpp"

#include "rotorlab/bessel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "json.hpp"

namespace rotorlab {

namespace {

using cplx = std::complex<double>;

constexpr double kTailTarget = 1e-16;

std::uint64_t splitmix_next(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double uniform01(std::uint64_t& state) {
    return static_cast<double>(splitmix_next(state) >> 11) * 0x1.0p-53;
}

// Box-Muller on explicit splitmix output keeps the stream portable across
// standard libraries.
cplx complex_normal(std::uint64_t& state) {
    double u1 = uniform01(state);
    if (u1 <= 0.0)
        u1 = 0x1.0p-53;
    const double u2 = uniform01(state);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    return cplx(r * std::cos(t), r * std::sin(t));
}

std::vector<cplx> von_mises_amplitudes(int m, double alpha, double kappa, const Window& w) {
    const int n_max = std::max(std::abs(m - w.l_min), std::abs(w.l_max - m));
    const std::vector<double> col_k = bessel_scaled_column(n_max, kappa);
    const std::vector<double> col_2k = bessel_scaled_column(0, 2.0 * kappa);
    // e^{-kappa} I_n(kappa) / sqrt(e^{-2 kappa} I_0(2 kappa)) -- the
    // exponential scalings cancel exactly, so this stays finite for any kappa.
    const double inv_root = 1.0 / std::sqrt(col_2k[0]);
    std::vector<cplx> amps(static_cast<std::size_t>(w.size()));
    for (int l = w.l_min; l <= w.l_max; ++l) {
        const int n = m - l;
        const double mag = col_k[static_cast<std::size_t>(std::abs(n))] * inv_root;
        const double phase = static_cast<double>(n) * alpha;
        amps[static_cast<std::size_t>(l - w.l_min)] = std::polar(mag, phase);
    }
    return amps;
}

int von_mises_start_half_width(int m, double kappa) {
    const double w = kappa + 6.0 * std::sqrt(kappa + 1.0) + 24.0;
    return std::abs(m) + static_cast<int>(std::ceil(w));
}

} // namespace

double wrap_angle(double phi) {
    const double two_pi = 2.0 * std::numbers::pi;
    double x = std::remainder(phi, two_pi);
    if (x <= -std::numbers::pi)
        x += two_pi;
    return x;
}

PureState::PureState(Window window, std::vector<cplx> amplitudes, bool converged)
    : window_(window), amps_(std::move(amplitudes)), converged_(converged) {
    window_.validate();
    if (static_cast<int>(amps_.size()) != window_.size())
        throw std::invalid_argument("PureState: amplitude count does not match window");
}

double PureState::norm_sq() const {
    double s = 0.0;
    for (const cplx& a : amps_)
        s += std::norm(a);
    return s;
}

double PureState::edge_mass() const {
    return std::norm(amps_.front()) + std::norm(amps_.back());
}

void Ensemble::validate() const {
    if (components.empty())
        throw std::invalid_argument("Ensemble: no components");
    double total = 0.0;
    for (const WeightedState& c : components) {
        if (c.weight < 0.0)
            throw std::invalid_argument("Ensemble: negative weight");
        total += c.weight;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw std::invalid_argument("Ensemble: weights sum to " + std::to_string(total));
}

void Moments::validate() const {
    if (mean_l2 < mean_l * mean_l - 1e-12)
        throw std::invalid_argument("Moments: negative angular-momentum variance");
    if (std::abs(mean_e) > 1.0 + 1e-12 || std::abs(mean_e2) > 1.0 + 1e-12)
        throw std::invalid_argument("Moments: shift-operator moment exceeds unit modulus");
    if (std::abs(mean_e2) < 2.0 * std::norm(mean_e) - 1.0 - 1e-12)
        throw std::invalid_argument("Moments: covariance matrix not positive semidefinite");
}

PureState von_mises_state(int m, double alpha, double kappa, Window window, TailPolicy policy) {
    window.validate();
    if (kappa < 0.0 || !std::isfinite(kappa))
        throw std::domain_error("von_mises_state: kappa must be finite and >= 0");
    if (!window.contains(m))
        throw std::invalid_argument("von_mises_state: window does not contain m");
    alpha = wrap_angle(alpha);

    Window w = window;
    for (;;) {
        std::vector<cplx> amps = von_mises_amplitudes(m, alpha, kappa, w);
        const double edge = std::norm(amps.front()) + std::norm(amps.back());
        if (edge <= kTailTarget)
            return PureState(w, std::move(amps), true);
        switch (policy) {
        case TailPolicy::keep:
            return PureState(w, std::move(amps), false);
        case TailPolicy::strict:
            throw TruncationError("von_mises_state: window too small, edge mass " +
                                      std::to_string(edge),
                                  edge);
        case TailPolicy::widen: {
            if (std::max(-w.l_min, w.l_max) >= kWindowCap)
                throw TruncationError("von_mises_state: window cap reached, edge mass " +
                                          std::to_string(edge),
                                      edge);
            const int grow = std::max(8, w.size() / 2);
            w.l_min = std::max(w.l_min - grow, -kWindowCap);
            w.l_max = std::min(w.l_max + grow, kWindowCap);
            break;
        }
        }
    }
}

PureState von_mises_state(int m, double alpha, double kappa) {
    if (kappa < 0.0 || !std::isfinite(kappa))
        throw std::domain_error("von_mises_state: kappa must be finite and >= 0");
    const int h = von_mises_start_half_width(m, kappa);
    if (h > kWindowCap)
        throw TruncationError("von_mises_state: kappa too large for window cap", 1.0);
    return von_mises_state(m, alpha, kappa, Window{-h, h}, TailPolicy::widen);
}

PureState momentum_eigenstate(int l, Window window) {
    window.validate();
    if (!window.contains(l))
        throw std::invalid_argument("momentum_eigenstate: l outside window");
    std::vector<cplx> amps(static_cast<std::size_t>(window.size()), cplx(0.0, 0.0));
    amps[static_cast<std::size_t>(l - window.l_min)] = cplx(1.0, 0.0);
    return PureState(window, std::move(amps), true);
}

Moments moments(const PureState& state) {
    const Window& w = state.window();
    const auto amps = state.amplitudes();
    double nsq = 0.0, ml = 0.0, ml2 = 0.0;
    cplx e(0.0, 0.0), e2(0.0, 0.0);
    for (int l = w.l_min; l <= w.l_max; ++l) {
        const std::size_t i = static_cast<std::size_t>(l - w.l_min);
        const double p = std::norm(amps[i]);
        nsq += p;
        ml += static_cast<double>(l) * p;
        ml2 += static_cast<double>(l) * static_cast<double>(l) * p;
        if (l > w.l_min)
            e += std::conj(amps[i - 1]) * amps[i];
        if (l > w.l_min + 1)
            e2 += std::conj(amps[i - 2]) * amps[i];
    }
    if (nsq <= 0.0)
        throw std::invalid_argument("moments: zero state");
    Moments m;
    m.mean_l = ml / nsq;
    m.mean_l2 = ml2 / nsq;
    m.mean_e = e / nsq;
    m.mean_e2 = e2 / nsq;
    return m;
}

Moments moments(const Ensemble& ensemble) {
    ensemble.validate();
    Moments total;
    for (const WeightedState& c : ensemble.components) {
        const Moments m = moments(c.state);
        total.mean_l += c.weight * m.mean_l;
        total.mean_l2 += c.weight * m.mean_l2;
        total.mean_e += c.weight * m.mean_e;
        total.mean_e2 += c.weight * m.mean_e2;
    }
    return total;
}

std::complex<double> angular_amplitude(const PureState& state, double phi) {
    phi = wrap_angle(phi);
    const Window& w = state.window();
    cplx sum(0.0, 0.0);
    for (int l = w.l_min; l <= w.l_max; ++l)
        sum += state.amplitude(l) * std::polar(1.0, static_cast<double>(l) * phi);
    return sum / std::sqrt(2.0 * std::numbers::pi);
}

PureState displace(const PureState& state, int m, double phi, bool auto_widen) {
    phi = wrap_angle(phi);
    const Window& w = state.window();
    Window target{std::min(w.l_min + m, 0), std::max(w.l_max + m, 0)};
    if (!auto_widen) {
        // Keep the window; the shift must not push weight off the edge.
        double dropped = 0.0;
        for (int l = w.l_min; l <= w.l_max; ++l)
            if (!w.contains(l + m))
                dropped += std::norm(state.amplitude(l));
        if (dropped > kTailTarget)
            throw TruncationError("displace: shift exceeds window, dropped mass " +
                                      std::to_string(dropped),
                                  dropped);
        target = w;
    } else if (std::max(-target.l_min, target.l_max) > kWindowCap) {
        throw TruncationError("displace: window cap reached", 0.0);
    }
    std::vector<cplx> amps(static_cast<std::size_t>(target.size()), cplx(0.0, 0.0));
    for (int l = target.l_min; l <= target.l_max; ++l) {
        const cplx src = state.amplitude(l - m);
        amps[static_cast<std::size_t>(l - target.l_min)] =
            src * std::polar(1.0, -static_cast<double>(l) * phi);
    }
    return PureState(target, std::move(amps), state.converged());
}

double povm_deviation(const PureState& fiducial, Window probe_window) {
    probe_window.validate();
    const Window& fw = fiducial.window();
    if (!(probe_window.l_min > fw.l_min && probe_window.l_max < fw.l_max))
        throw std::invalid_argument("povm_deviation: probe window not interior to fiducial window");
    // The phase integral forces l = l' and the displacement sum telescopes to
    // sum_m |c_{l-m}|^2 = ||c||^2 for every probe index, so the worst
    // deviation over the probe block is the fiducial's norm defect.
    return std::abs(1.0 - fiducial.norm_sq());
}

PureState random_state(std::uint64_t seed, Window window) {
    window.validate();
    // scramble the seed so that sequential seeds start unrelated streams
    std::uint64_t state = (seed ^ (seed >> 30)) * 0xbf58476d1ce4e5b9ULL;
    state = (state ^ (state >> 27)) * 0x94d049bb133111ebULL;
    state ^= state >> 31;
    std::vector<cplx> amps(static_cast<std::size_t>(window.size()));
    for (cplx& a : amps)
        a = complex_normal(state);
    double nsq = 0.0;
    for (const cplx& a : amps)
        nsq += std::norm(a);
    const double inv = 1.0 / std::sqrt(nsq);
    for (cplx& a : amps)
        a *= inv;
    return PureState(window, std::move(amps), false);
}

std::string state_to_json(const PureState& state) {
    nlohmann::json j;
    j["window"] = {state.window().l_min, state.window().l_max};
    std::vector<double> re, im;
    re.reserve(state.amplitudes().size());
    im.reserve(state.amplitudes().size());
    for (const cplx& a : state.amplitudes()) {
        re.push_back(a.real());
        im.push_back(a.imag());
    }
    j["re"] = re;
    j["im"] = im;
    return j.dump();
}

PureState state_from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    Window w{j.at("window").at(0).get<int>(), j.at("window").at(1).get<int>()};
    const auto re = j.at("re").get<std::vector<double>>();
    const auto im = j.at("im").get<std::vector<double>>();
    if (re.size() != im.size() || static_cast<int>(re.size()) != w.size())
        throw std::invalid_argument("state_from_json: array sizes do not match window");
    std::vector<cplx> amps(re.size());
    for (std::size_t i = 0; i < re.size(); ++i)
        amps[i] = cplx(re[i], im[i]);
    PureState s(w, std::move(amps), false);
    if (std::abs(s.norm_sq() - 1.0) > 1e-6)
        throw std::invalid_argument("state_from_json: state is not normalised");
    return s;
}

} // namespace rotorlab
