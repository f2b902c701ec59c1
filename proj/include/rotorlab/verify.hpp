#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rotorlab::verify {

struct PropertyResult {
    std::string name;
    bool pass = false;
    double worst = 0.0; // worst slack or defect seen
    std::string detail;
};

/// Ordering of the four uncertainty measures plus the weak product bound,
/// over seeded random pure states and two-component mixtures.
std::vector<PropertyResult> hierarchy_suite(int n_states, std::uint64_t seed);

/// Robertson-type saturation and measure coincidence for von Mises states on
/// a logarithmic kappa grid.
std::vector<PropertyResult> saturation_suite();

/// Parallel-axis round trips, axis-formula equivalence, mixture composition
/// and concavity.
std::vector<PropertyResult> inertia_suite(int n_samples, std::uint64_t seed);

/// Completeness of the displaced-fiducial measurement.
std::vector<PropertyResult> povm_suite();

std::vector<PropertyResult> all_suites(int n_states, std::uint64_t seed);

} // namespace rotorlab::verify
