#include "rotorlab/bessel.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace rotorlab {

namespace {

constexpr double kSeriesCutoff = 15.0;

void check_domain(int order, double z) {
    if (order < 0)
        throw std::domain_error("bessel_i: order must be >= 0, got " + std::to_string(order));
    if (!std::isfinite(z) || z < 0.0)
        throw std::domain_error("bessel_i: argument must be finite and >= 0, got " +
                                std::to_string(z));
}

// Ascending power series, all terms positive.  Converges for any z but is
// only used for moderate arguments where nothing overflows.
double series_i(int n, double z) {
    if (z == 0.0)
        return n == 0 ? 1.0 : 0.0;
    const double half = 0.5 * z;
    double term;
    if (n <= 150) {
        term = 1.0;
        for (int k = 1; k <= n; ++k)
            term *= half / static_cast<double>(k);
    } else {
        const double log_term =
            static_cast<double>(n) * std::log(half) - std::lgamma(static_cast<double>(n) + 1.0);
        if (log_term < -745.0)
            return 0.0;
        term = std::exp(log_term);
    }
    double sum = term;
    const double z2 = half * half;
    for (int k = 1; k < 1000; ++k) {
        term *= z2 / (static_cast<double>(k) * static_cast<double>(n + k));
        sum += term;
        if (term <= sum * 1e-17)
            break;
    }
    return sum;
}

int miller_start_order(int n_max, double z) {
    const double top = std::max(static_cast<double>(n_max), z);
    return std::max(n_max, static_cast<int>(std::ceil(z))) + 40 +
           static_cast<int>(2.0 * std::sqrt(top));
}

// One downward Miller pass.  Produces trial values proportional to I_n(z)
// for n = 0..n_max plus the sum I_0 + 2*sum_{k>=1} I_k in the same scale,
// so both ratios and the e^z-normalised column come out of a single sweep.
struct MillerPass {
    std::vector<double> trial; // index n = 0..n_max
    double norm_sum = 0.0;     // trial-scaled I_0 + 2 sum I_k
};

MillerPass miller_pass(int n_max, double z) {
    MillerPass out;
    out.trial.assign(static_cast<std::size_t>(n_max) + 1, 0.0);
    const int start = miller_start_order(n_max, z);
    double above = 0.0;     // trial I_{k+1}
    double here = 1e-280;   // trial I_k, seeded tiny to leave headroom
    double sum = 0.0;
    for (int k = start; k >= 1; --k) {
        const double below = above + (2.0 * static_cast<double>(k) / z) * here; // I_{k-1}
        above = here;
        here = below;
        const int idx = k - 1;
        sum += (idx == 0) ? below : 2.0 * below;
        if (idx <= n_max)
            out.trial[static_cast<std::size_t>(idx)] = below;
        if (std::abs(here) > 1e250) {
            const double f = 1e-250;
            here *= f;
            above *= f;
            sum *= f;
            for (double& t : out.trial)
                t *= f;
        }
    }
    out.norm_sum = sum;
    return out;
}

} // namespace

std::vector<double> bessel_scaled_column(int n_max, double z) {
    check_domain(n_max, z);
    std::vector<double> col(static_cast<std::size_t>(n_max) + 1, 0.0);
    if (z == 0.0) {
        col[0] = 1.0;
        return col;
    }
    if (z < kSeriesCutoff) {
        const double damp = std::exp(-z);
        for (int n = 0; n <= n_max; ++n)
            col[static_cast<std::size_t>(n)] = damp * series_i(n, z);
        return col;
    }
    MillerPass pass = miller_pass(n_max, z);
    // I_0 + 2 sum I_k = e^z, hence trial/norm_sum = e^{-z} I_n.
    for (int n = 0; n <= n_max; ++n)
        col[static_cast<std::size_t>(n)] = pass.trial[static_cast<std::size_t>(n)] / pass.norm_sum;
    return col;
}

double bessel_i(int order, double z) {
    check_domain(order, z);
    if (z == 0.0)
        return order == 0 ? 1.0 : 0.0;
    if (z < kSeriesCutoff)
        return series_i(order, z);
    MillerPass pass = miller_pass(order, z);
    const double scaled = pass.trial[static_cast<std::size_t>(order)] / pass.norm_sum;
    if (z <= 600.0)
        return scaled * std::exp(z);
    if (scaled <= 0.0)
        return 0.0;
    // Large arguments: combine in log space to dodge exp overflow while the
    // product itself is still representable.
    return std::exp(z + std::log(scaled));
}

BesselResult bessel_i_result(int order, double z) {
    return BesselResult{order, z, bessel_i(order, z)};
}

double bessel_ratio(int order, double z) {
    check_domain(order, z);
    if (order == 0)
        return 1.0;
    if (z == 0.0)
        return 0.0;
    if (z < kSeriesCutoff)
        return series_i(order, z) / series_i(0, z);
    MillerPass pass = miller_pass(order, z);
    return pass.trial[static_cast<std::size_t>(order)] / pass.trial[0];
}

} // namespace rotorlab
