#pragma once

// Independent oracles used by the tests: nothing here calls the library's
// classification or renormalization code paths.

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

namespace oracles {

/// Eigenvalues of a real 2x2 matrix by the characteristic polynomial.
inline std::pair<std::complex<double>, std::complex<double>> eig2(double a, double b, double c,
                                                                  double d) {
    const double tr = a + d;
    const double det = a * d - b * c;
    const std::complex<double> disc = std::sqrt(std::complex<double>(tr * tr - 4.0 * det, 0.0));
    return {(tr + disc) / 2.0, (tr - disc) / 2.0};
}

/// Direct pairwise/product classification of a spectrum.
struct FlagSet {
    bool dissipative = false;
    bool area_expanding = false;
    bool sectionally_dissipative = false;
    bool extremely_dissipative = false;
    int expanding_count = 0;
};

inline FlagSet classify_direct(const std::vector<std::complex<double>>& eigs) {
    FlagSet f;
    double product = 1.0;
    for (const auto& e : eigs) {
        product *= std::abs(e);
        if (std::abs(e) > 1.0) ++f.expanding_count;
    }
    f.dissipative = product < 1.0;
    f.area_expanding = product > 1.0;
    if (f.expanding_count == 1) {
        bool pairwise = true;
        for (std::size_t i = 0; i < eigs.size(); ++i) {
            for (std::size_t j = 0; j < eigs.size(); ++j) {
                if (i != j && std::abs(eigs[i]) * std::abs(eigs[j]) >= 1.0) pairwise = false;
            }
        }
        f.sectionally_dissipative = pairwise;
        if (pairwise) {
            double sigma = 0.0;
            double rho = 0.0;
            for (const auto& e : eigs) {
                if (std::abs(e) > 1.0) sigma = std::abs(e);
                else rho = std::max(rho, std::abs(e));
            }
            f.extremely_dissipative = rho * sigma * sigma < 1.0;
        }
    }
    return f;
}

/// Iterates y -> y^2 + nu; returns the limit if it settles within tol.
inline bool converges_to(double y, double nu, double target, int max_steps, double tol) {
    for (int i = 0; i < max_steps; ++i) {
        y = y * y + nu;
        if (!std::isfinite(y)) return false;
        if (std::abs(y - target) < tol) return true;
    }
    return std::abs(y - target) < tol;
}

inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

} // namespace oracles
