#pragma once

#include <vector>

namespace rotorlab {

/// Value record for a modified Bessel function evaluation.
struct BesselResult {
    int order = 0;
    double argument = 0.0;
    double value = 0.0;
};

/// Modified Bessel function of the first kind, integer order n >= 0.
/// Power series below z = 15, Miller downward recurrence above.
double bessel_i(int order, double z);

BesselResult bessel_i_result(int order, double z);

/// I_order(z) / I_0(z), computed in one downward-recurrence pass so the
/// ratio stays finite even where I_n(z) itself would overflow (z up to 1e4).
double bessel_ratio(int order, double z);

/// Column of exponentially scaled values e^{-z} I_n(z) for n = 0..n_max.
/// Safe for all z >= 0; used wherever a whole ladder of orders is needed.
std::vector<double> bessel_scaled_column(int n_max, double z);

} // namespace rotorlab
