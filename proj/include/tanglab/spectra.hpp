#pragma once

#include <Eigen/Dense>

#include <complex>
#include <vector>

#include "tanglab/errors.hpp"

namespace tanglab {

/// Eigenvalue classification of a periodic orbit's linearization.
struct SpectrumReport {
    std::vector<std::complex<double>> eigenvalues;
    int period = 1;
    int expanding_count = 0;
    bool dissipative = false;            ///< product of moduli < 1
    bool area_expanding = false;         ///< product of moduli > 1
    bool sectionally_dissipative = false; ///< unique expanding eig, all pairwise products < 1
    bool extremely_dissipative = false;  ///< sectional and rho(contracting) * sigma^2 < 1
    bool contracts_two_volumes_flag = false; ///< coordinate-dependent evidence (orbit path only)
    bool has_two_volume_check = false;
};

inline constexpr double kUnitCircleBand = 1e-9;

/// Flags from a spectrum alone; rejects eigenvalues within 1e-9 of the unit circle.
[[nodiscard]] SpectrumReport classify(const std::vector<std::complex<double>>& eigs,
                                      int period = 1);

/// rho(contracting block) * sigma^2 for a spectrum with exactly one expanding
/// eigenvalue; throws shape_error otherwise.
[[nodiscard]] double extreme_dissipativity_ratio(const std::vector<std::complex<double>>& eigs);

/// True iff the product of the two largest singular values is < 1, i.e. the
/// matrix contracts area on every 2-plane in the given coordinates.
[[nodiscard]] bool contracts_two_volumes(const Eigen::MatrixXd& m);

/// Multiplies step Jacobians in orbit order, solves for eigenvalues, classifies.
[[nodiscard]] SpectrumReport classify_orbit(const std::vector<Eigen::MatrixXd>& jacobians);

/// Largest singular value.
[[nodiscard]] double spectral_norm(const Eigen::MatrixXd& m);

} // namespace tanglab
