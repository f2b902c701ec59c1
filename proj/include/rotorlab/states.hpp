#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rotorlab {

/// Raised when a state does not fit its truncation window.
class TruncationError : public std::runtime_error {
public:
    TruncationError(const std::string& what, double tail_mass)
        : std::runtime_error(what), tail_mass_(tail_mass) {}
    double tail_mass() const { return tail_mass_; }

private:
    double tail_mass_;
};

/// Truncation window of angular-momentum indices; always contains l = 0.
struct Window {
    int l_min = 0;
    int l_max = 0;

    int size() const { return l_max - l_min + 1; }
    bool contains(int l) const { return l >= l_min && l <= l_max; }
    void validate() const {
        if (l_min > 0 || l_max < 0)
            throw std::invalid_argument("Window: requires l_min <= 0 <= l_max");
    }
    static Window symmetric(int half_width) { return Window{-half_width, half_width}; }
};

/// Maximum half-width the auto-widening constructors will grow to.
inline constexpr int kWindowCap = 2048;

/// Pure rotor state on a truncation window.  Amplitudes are stored exactly as
/// constructed (closed forms are never re-normalised), so truncation loss
/// remains visible to diagnostics such as povm_deviation.
class PureState {
public:
    PureState(Window window, std::vector<std::complex<double>> amplitudes, bool converged);

    const Window& window() const { return window_; }
    bool converged() const { return converged_; }
    std::span<const std::complex<double>> amplitudes() const { return amps_; }

    std::complex<double> amplitude(int l) const {
        return window_.contains(l) ? amps_[static_cast<std::size_t>(l - window_.l_min)]
                                   : std::complex<double>(0.0, 0.0);
    }

    double norm_sq() const;
    /// |c_{l_min}|^2 + |c_{l_max}|^2
    double edge_mass() const;

private:
    Window window_;
    std::vector<std::complex<double>> amps_;
    bool converged_;
};

struct WeightedState {
    double weight;
    PureState state;
};

/// Mixed state stored as a weighted ensemble of pure components.
struct Ensemble {
    std::vector<WeightedState> components;
    void validate() const;
};

/// First and second moments of L and of the shift operator E.
struct Moments {
    double mean_l = 0.0;
    double mean_l2 = 0.0;
    std::complex<double> mean_e;
    std::complex<double> mean_e2;

    double var_l() const { return mean_l2 - mean_l * mean_l; }
    double mean_c() const { return mean_e.real(); }
    double mean_s() const { return -mean_e.imag() + 0.0; }
    /// relative phase arg<E^2> - 2 arg<E>; zero for phase-aligned states
    double delta() const { return std::arg(mean_e2) - 2.0 * std::arg(mean_e); }
    void validate() const;
};

enum class TailPolicy {
    widen,  ///< grow the window until the edge mass is negligible
    strict, ///< throw TruncationError if the window is too small
    keep    ///< keep the raw truncated coefficients (diagnostic use)
};

/// Wrap an angle into (-pi, pi].
double wrap_angle(double phi);

/// State with amplitudes c_l = e^{i(m-l)alpha} I_{m-l}(kappa) / sqrt(I_0(2 kappa)).
PureState von_mises_state(int m, double alpha, double kappa, Window window,
                          TailPolicy policy = TailPolicy::widen);
/// Same, with an automatically chosen window.
PureState von_mises_state(int m, double alpha, double kappa);

PureState momentum_eigenstate(int l, Window window);

Moments moments(const PureState& state);
Moments moments(const Ensemble& ensemble);

/// <phi|psi> = sum_l c_l e^{i l phi} / sqrt(2 pi)
std::complex<double> angular_amplitude(const PureState& state, double phi);

/// Displacement D(m, phi) = e^{-i L phi} E^{-m}: c_l -> e^{-i l phi} c_{l-m}.
PureState displace(const PureState& state, int m, double phi, bool auto_widen = true);

/// Completeness defect of the displaced-fiducial POVM over the probe window.
/// The phase integral kills off-diagonal terms and the shift sum telescopes
/// to sum_m |c_{l-m}|^2, so the defect reduces to the fiducial's norm loss.
double povm_deviation(const PureState& fiducial, Window probe_window);

/// Seeded complex-normal amplitudes, normalised; reproducible across runs.
PureState random_state(std::uint64_t seed, Window window);

std::string state_to_json(const PureState& state);
PureState state_from_json(const std::string& text);

} // namespace rotorlab
