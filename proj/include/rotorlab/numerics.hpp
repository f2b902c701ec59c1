#pragma once

#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rotorlab {

/// Raised when an iterative solver fails to reach its tolerance.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

/// Raised when a root finder is handed an interval without a sign change.
class BracketError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Hermitian matrix with one or two upper bands; the lower bands are implied
/// by conjugation and never stored.
struct BandedHermitian {
    int dim = 0;
    int bandwidth = 1; // 1 or 2
    std::vector<double> diag;
    // bands[k-1][i] = H[i][i+k] for k = 1..bandwidth
    std::vector<std::vector<std::complex<double>>> bands;

    static BandedHermitian tridiagonal(std::vector<double> d,
                                       std::vector<std::complex<double>> upper1);
    static BandedHermitian pentadiagonal(std::vector<double> d,
                                         std::vector<std::complex<double>> upper1,
                                         std::vector<std::complex<double>> upper2);

    void validate() const;
    std::vector<std::complex<double>> apply(const std::vector<std::complex<double>>& v) const;
};

struct GroundState {
    double eigenvalue = 0.0;
    std::vector<std::complex<double>> eigenvector;
    double residual_norm = 0.0;
};

/// Algebraically smallest eigenpair via shifted inverse power iteration with
/// a banded LU solve.  Deterministic: fixed start vector, fixed schedule.
GroundState ground_state(const BandedHermitian& matrix);

struct MinimizeResult {
    double argmin = 0.0;
    double min_value = 0.0;
};

/// Coarse grid scan (log-spaced when lo > 0) followed by golden-section
/// refinement inside the best cell.  Boundary minima are reported exactly at
/// the boundary.
MinimizeResult minimize_scalar(const std::function<double(double)>& f, double lo, double hi,
                               double rel_tol, int scan_points = 64);

/// Bisection on [lo, hi]; requires f(lo) * f(hi) <= 0.
double find_root(const std::function<double(double)>& f, double lo, double hi, double abs_tol);

} // namespace rotorlab
