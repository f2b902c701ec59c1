#include "rotorlab/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace rotorlab {

namespace {

using cplx = std::complex<double>;

double splitmix_uniform(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z = z ^ (z >> 31);
    return static_cast<double>(z >> 11) * 0x1.0p-53;
}

double norm2(const std::vector<cplx>& v) {
    double s = 0.0;
    for (const cplx& x : v)
        s += std::norm(x);
    return std::sqrt(s);
}

void scale(std::vector<cplx>& v, double f) {
    for (cplx& x : v)
        x *= f;
}

// Banded LU factorisation without pivoting, adequate because the shifted
// matrix H - sigma*I is Hermitian positive definite.
class BandedLU {
public:
    BandedLU(const BandedHermitian& h, double shift) : n_(h.dim), b_(h.bandwidth) {
        // rows of the full band: store[l][i] with l in [-b, b] meaning A[i][i+l]
        store_.assign(static_cast<std::size_t>(2 * b_ + 1),
                      std::vector<cplx>(static_cast<std::size_t>(n_), cplx(0.0, 0.0)));
        for (int i = 0; i < n_; ++i)
            at(0, i) = cplx(h.diag[static_cast<std::size_t>(i)] - shift, 0.0);
        for (int k = 1; k <= b_; ++k) {
            for (int i = 0; i + k < n_; ++i) {
                const cplx u = h.bands[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(i)];
                at(k, i) = u;              // A[i][i+k]
                at(-k, i + k) = std::conj(u); // A[i+k][i]
            }
        }
        factorize();
    }

    // Sylvester inertia: pivots of the factorisation carry the signs of the
    // LDL^H diagonal, so this counts eigenvalues of H - sigma*I below zero.
    int negative_pivot_count() const {
        int count = 0;
        for (int i = 0; i < n_; ++i)
            if (at(0, i).real() < 0.0)
                ++count;
        return count;
    }

    void solve(std::vector<cplx>& x) const {
        // forward substitution with unit-lower factors
        for (int i = 0; i < n_; ++i) {
            cplx s = x[static_cast<std::size_t>(i)];
            for (int k = 1; k <= b_ && i - k >= 0; ++k)
                s -= at(-k, i) * x[static_cast<std::size_t>(i - k)];
            x[static_cast<std::size_t>(i)] = s;
        }
        // back substitution
        for (int i = n_ - 1; i >= 0; --i) {
            cplx s = x[static_cast<std::size_t>(i)];
            for (int k = 1; k <= b_ && i + k < n_; ++k)
                s -= at(k, i) * x[static_cast<std::size_t>(i + k)];
            x[static_cast<std::size_t>(i)] = s / at(0, i);
        }
    }

private:
    cplx& at(int band, int i) { return store_[static_cast<std::size_t>(band + b_)][static_cast<std::size_t>(i)]; }
    const cplx& at(int band, int i) const {
        return store_[static_cast<std::size_t>(band + b_)][static_cast<std::size_t>(i)];
    }

    void factorize() {
        for (int i = 0; i < n_; ++i) {
            const cplx pivot = at(0, i);
            if (std::abs(pivot) == 0.0)
                throw ConvergenceError("banded LU: zero pivot", 0.0);
            for (int r = 1; r <= b_ && i + r < n_; ++r) {
                const cplx m = at(-r, i + r) / pivot; // L[i+r][i]
                at(-r, i + r) = m;
                for (int c = 1; c <= b_; ++c) {
                    if (i + c >= n_)
                        continue;
                    // A[i+r][i+c] -= m * A[i][i+c]
                    const int band = c - r;
                    if (band >= -b_ && band <= b_)
                        at(band, i + r) -= m * at(c, i);
                }
            }
        }
    }

    int n_;
    int b_;
    std::vector<std::vector<cplx>> store_;
};

} // namespace

BandedHermitian BandedHermitian::tridiagonal(std::vector<double> d, std::vector<cplx> upper1) {
    BandedHermitian h;
    h.dim = static_cast<int>(d.size());
    h.bandwidth = 1;
    h.diag = std::move(d);
    h.bands.push_back(std::move(upper1));
    h.validate();
    return h;
}

BandedHermitian BandedHermitian::pentadiagonal(std::vector<double> d, std::vector<cplx> upper1,
                                               std::vector<cplx> upper2) {
    BandedHermitian h;
    h.dim = static_cast<int>(d.size());
    h.bandwidth = 2;
    h.diag = std::move(d);
    h.bands.push_back(std::move(upper1));
    h.bands.push_back(std::move(upper2));
    h.validate();
    return h;
}

void BandedHermitian::validate() const {
    if (bandwidth != 1 && bandwidth != 2)
        throw std::invalid_argument("BandedHermitian: bandwidth must be 1 or 2");
    if (dim < bandwidth + 1)
        throw std::invalid_argument("BandedHermitian: dimension too small for bandwidth");
    if (static_cast<int>(diag.size()) != dim)
        throw std::invalid_argument("BandedHermitian: diagonal size mismatch");
    if (static_cast<int>(bands.size()) != bandwidth)
        throw std::invalid_argument("BandedHermitian: band count mismatch");
    for (int k = 1; k <= bandwidth; ++k)
        if (static_cast<int>(bands[static_cast<std::size_t>(k - 1)].size()) != dim - k)
            throw std::invalid_argument("BandedHermitian: band size mismatch");
}

std::vector<cplx> BandedHermitian::apply(const std::vector<cplx>& v) const {
    std::vector<cplx> out(static_cast<std::size_t>(dim), cplx(0.0, 0.0));
    for (int i = 0; i < dim; ++i)
        out[static_cast<std::size_t>(i)] = diag[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(i)];
    for (int k = 1; k <= bandwidth; ++k) {
        const auto& band = bands[static_cast<std::size_t>(k - 1)];
        for (int i = 0; i + k < dim; ++i) {
            out[static_cast<std::size_t>(i)] += band[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(i + k)];
            out[static_cast<std::size_t>(i + k)] +=
                std::conj(band[static_cast<std::size_t>(i)]) * v[static_cast<std::size_t>(i)];
        }
    }
    return out;
}

namespace {

cplx dot(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    cplx s(0.0, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        s += std::conj(a[i]) * b[i];
    return s;
}

int eigenvalues_below(const BandedHermitian& m, double sigma) {
    for (int attempt = 0; attempt < 4; ++attempt) {
        try {
            return BandedLU(m, sigma).negative_pivot_count();
        } catch (const ConvergenceError&) {
            sigma -= 1e-13 * std::max(1.0, std::abs(sigma)); // hit an eigenvalue exactly
        }
    }
    return -1;
}

struct BlockIterationResult {
    double eigenvalue = 0.0;
    double residual = std::numeric_limits<double>::infinity();
    std::vector<cplx> vector;
};

// Shifted block-2 inverse iteration with Rayleigh-Ritz extraction.  The block
// resolves a near-degenerate bottom pair that would stall a single vector.
BlockIterationResult block_iterate(const BandedHermitian& matrix, double start_shift,
                                   double scale_est, bool refresh_shift, int max_iter) {
    const int n = matrix.dim;
    double shift = start_shift;
    BandedLU lu(matrix, shift);

    std::vector<cplx> v0(static_cast<std::size_t>(n)), v1(static_cast<std::size_t>(n));
    std::uint64_t rng = 0x7261746f726c6162ULL;
    for (int i = 0; i < n; ++i) {
        v0[static_cast<std::size_t>(i)] = cplx(1.0 + 0.01 * (splitmix_uniform(rng) - 0.5), 0.0);
        v1[static_cast<std::size_t>(i)] =
            cplx((i % 2 ? -1.0 : 1.0) + 0.01 * (splitmix_uniform(rng) - 0.5), 0.0);
    }
    auto orthonormalize = [&]() {
        scale(v0, 1.0 / norm2(v0));
        const cplx proj = dot(v0, v1);
        for (std::size_t i = 0; i < v1.size(); ++i)
            v1[i] -= proj * v0[i];
        const double nv1 = norm2(v1);
        if (nv1 < 1e-200) {
            for (int i = 0; i < n; ++i)
                v1[static_cast<std::size_t>(i)] = cplx(splitmix_uniform(rng) - 0.5, 0.0);
            const cplx p2 = dot(v0, v1);
            for (std::size_t i = 0; i < v1.size(); ++i)
                v1[i] -= p2 * v0[i];
            scale(v1, 1.0 / norm2(v1));
        } else {
            scale(v1, 1.0 / nv1);
        }
    };
    orthonormalize();

    BlockIterationResult out;
    out.vector.assign(static_cast<std::size_t>(n), cplx(0.0, 0.0));
    for (int iter = 0; iter < max_iter; ++iter) {
        lu.solve(v0);
        lu.solve(v1);
        orthonormalize();

        // two-dimensional Rayleigh-Ritz
        const std::vector<cplx> h0 = matrix.apply(v0);
        const std::vector<cplx> h1 = matrix.apply(v1);
        const double a = dot(v0, h0).real();
        const double c = dot(v1, h1).real();
        const cplx b = dot(v0, h1);
        const double mid = 0.5 * (a + c);
        const double disc = std::sqrt(0.25 * (a - c) * (a - c) + std::norm(b));
        const double theta = mid - disc;
        cplx y0, y1;
        if (std::abs(theta - a) >= std::abs(theta - c)) {
            y0 = b;
            y1 = cplx(theta - a, 0.0);
        } else {
            y0 = cplx(theta - c, 0.0);
            y1 = std::conj(b);
        }
        const double ynorm = std::sqrt(std::norm(y0) + std::norm(y1));
        if (ynorm < 1e-300) {
            y0 = cplx(1.0, 0.0);
            y1 = cplx(0.0, 0.0);
        } else {
            y0 /= ynorm;
            y1 /= ynorm;
        }
        double rn = 0.0;
        for (int i = 0; i < n; ++i) {
            out.vector[static_cast<std::size_t>(i)] =
                y0 * v0[static_cast<std::size_t>(i)] + y1 * v1[static_cast<std::size_t>(i)];
            const cplx hu = y0 * h0[static_cast<std::size_t>(i)] + y1 * h1[static_cast<std::size_t>(i)];
            rn += std::norm(hu - theta * out.vector[static_cast<std::size_t>(i)]);
        }
        out.eigenvalue = theta;
        out.residual = std::sqrt(rn);
        if (out.residual <= 1e-12 * std::max(1.0, std::abs(theta)))
            break;
        if (refresh_shift && iter % 40 == 39) {
            const double margin = 2.0 * std::max(out.residual, 1e-12 * scale_est);
            const double proposed = theta - margin;
            if (proposed > shift) {
                shift = proposed;
                lu = BandedLU(matrix, shift);
            }
        }
    }
    return out;
}

} // namespace

GroundState ground_state(const BandedHermitian& matrix) {
    matrix.validate();
    const int n = matrix.dim;

    // Gershgorin lower bound, then shift one below it so the shifted matrix
    // is positive definite.
    double gersh = std::numeric_limits<double>::infinity();
    double scale_est = 0.0;
    for (int i = 0; i < n; ++i) {
        double radius = 0.0;
        for (int k = 1; k <= matrix.bandwidth; ++k) {
            if (i + k < n)
                radius += std::abs(matrix.bands[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(i)]);
            if (i - k >= 0)
                radius += std::abs(matrix.bands[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(i - k)]);
        }
        gersh = std::min(gersh, matrix.diag[static_cast<std::size_t>(i)] - radius);
        scale_est = std::max(scale_est, std::abs(matrix.diag[static_cast<std::size_t>(i)]) + radius);
    }
    scale_est = std::max(scale_est, 1.0);

    BlockIterationResult r = block_iterate(matrix, gersh - 1.0, scale_est, true, 400);

    // Certify via matrix inertia that nothing lies below the Ritz value; if
    // the refreshed shift overshot, fall back to the safe fixed shift.
    auto certified = [&](const BlockIterationResult& cand) {
        if (cand.residual > 1e-10 * std::max(1.0, std::abs(cand.eigenvalue)))
            return false;
        const double delta =
            std::max(3.0 * cand.residual, 1e-11 * std::max(1.0, std::abs(cand.eigenvalue)));
        return eigenvalues_below(matrix, cand.eigenvalue - delta) == 0;
    };
    if (!certified(r)) {
        r = block_iterate(matrix, gersh - 1.0, scale_est, false, 2000);
        if (!certified(r))
            throw ConvergenceError("ground_state: inverse iteration stalled, residual " +
                                       std::to_string(r.residual),
                                   r.residual);
    }

    // Canonical phase: largest-magnitude component real and positive.
    std::vector<cplx> u = std::move(r.vector);
    std::size_t imax = 0;
    double amax = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (std::abs(u[i]) > amax) {
            amax = std::abs(u[i]);
            imax = i;
        }
    }
    if (amax > 0.0) {
        const cplx phase = std::conj(u[imax]) / amax;
        for (cplx& x : u)
            x *= phase;
    }
    return GroundState{r.eigenvalue, std::move(u), r.residual};
}

MinimizeResult minimize_scalar(const std::function<double(double)>& f, double lo, double hi,
                               double rel_tol, int scan_points) {
    if (!(lo < hi))
        throw std::invalid_argument("minimize_scalar: need lo < hi");
    const int n = std::max(scan_points, 64);
    const bool log_spaced = lo > 0.0;

    auto grid_at = [&](int i) {
        const double t = static_cast<double>(i) / static_cast<double>(n - 1);
        if (log_spaced)
            return lo * std::pow(hi / lo, t);
        return lo + (hi - lo) * t;
    };
    auto eval = [&](double x) {
        const double y = f(x);
        if (!std::isfinite(y))
            throw std::runtime_error("minimize_scalar: non-finite value at x = " +
                                     std::to_string(x));
        return y;
    };

    int best = 0;
    double best_val = eval(grid_at(0));
    for (int i = 1; i < n; ++i) {
        const double y = eval(grid_at(i));
        if (y < best_val) {
            best_val = y;
            best = i;
        }
    }

    double a = grid_at(std::max(0, best - 1));
    double b = grid_at(std::min(n - 1, best + 1));

    // Golden-section refinement inside [a, b].
    constexpr double kInvPhi = 0.6180339887498949;
    double x1 = b - kInvPhi * (b - a);
    double x2 = a + kInvPhi * (b - a);
    double f1 = eval(x1);
    double f2 = eval(x2);
    for (int iter = 0; iter < 300; ++iter) {
        const double mid = 0.5 * (a + b);
        if ((b - a) <= rel_tol * std::max(std::abs(mid), 1e-12) || !(x1 < x2))
            break;
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kInvPhi * (b - a);
            f1 = eval(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kInvPhi * (b - a);
            f2 = eval(x2);
        }
    }
    double xm = (f1 <= f2) ? x1 : x2;
    double fm = std::min(f1, f2);
    if (best_val < fm) {
        xm = grid_at(best);
        fm = best_val;
    }
    // Boundary minima are reported exactly at the boundary.
    const double f_lo = eval(lo);
    const double f_hi = eval(hi);
    if (f_lo <= fm + std::abs(fm) * 1e-12) {
        xm = lo;
        fm = f_lo;
    } else if (f_hi <= fm + std::abs(fm) * 1e-12) {
        xm = hi;
        fm = f_hi;
    }
    return MinimizeResult{xm, fm};
}

double find_root(const std::function<double(double)>& f, double lo, double hi, double abs_tol) {
    if (!(lo <= hi))
        throw std::invalid_argument("find_root: need lo <= hi");
    double fl = f(lo);
    double fh = f(hi);
    if (fl == 0.0)
        return lo;
    if (fh == 0.0)
        return hi;
    if (fl * fh > 0.0)
        throw BracketError("find_root: no sign change on [" + std::to_string(lo) + ", " +
                           std::to_string(hi) + "]");
    while (hi - lo > abs_tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi)
            break; // interval at floating-point resolution
        const double fm = f(mid);
        if (fm == 0.0)
            return mid;
        if (fl * fm < 0.0) {
            hi = mid;
            fh = fm;
        } else {
            lo = mid;
            fl = fm;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace rotorlab
