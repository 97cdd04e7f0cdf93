#include "tanglab/spectra.hpp"

#include <algorithm>
#include <cmath>

namespace tanglab {

namespace {

void require_hyperbolic(const std::vector<std::complex<double>>& eigs) {
    if (eigs.empty()) {
        throw shape_error("classify: empty eigenvalue list");
    }
    for (const auto& e : eigs) {
        if (std::abs(std::abs(e) - 1.0) < kUnitCircleBand) {
            throw hyperbolicity_error("eigenvalue modulus within 1e-9 of the unit circle");
        }
    }
}

} // namespace

double extreme_dissipativity_ratio(const std::vector<std::complex<double>>& eigs) {
    require_hyperbolic(eigs);
    double sigma = 0.0;
    double rho_contracting = 0.0;
    int expanding = 0;
    for (const auto& e : eigs) {
        const double m = std::abs(e);
        if (m > 1.0) {
            ++expanding;
            sigma = m;
        } else {
            rho_contracting = std::max(rho_contracting, m);
        }
    }
    if (expanding != 1) {
        throw shape_error("extreme dissipativity needs exactly one expanding eigenvalue, got " +
                          std::to_string(expanding));
    }
    return rho_contracting * sigma * sigma;
}

SpectrumReport classify(const std::vector<std::complex<double>>& eigs, int period) {
    require_hyperbolic(eigs);
    SpectrumReport r;
    r.eigenvalues = eigs;
    r.period = period;

    double modulus_product = 1.0;
    for (const auto& e : eigs) {
        const double m = std::abs(e);
        modulus_product *= m;
        if (m > 1.0) ++r.expanding_count;
    }
    r.dissipative = modulus_product < 1.0;
    r.area_expanding = modulus_product > 1.0;

    if (r.expanding_count == 1) {
        bool pairwise = true;
        for (std::size_t i = 0; i < eigs.size() && pairwise; ++i) {
            for (std::size_t j = i + 1; j < eigs.size(); ++j) {
                if (std::abs(eigs[i]) * std::abs(eigs[j]) >= 1.0) {
                    pairwise = false;
                    break;
                }
            }
        }
        r.sectionally_dissipative = pairwise;
        if (pairwise && eigs.size() >= 2) {
            r.extremely_dissipative = extreme_dissipativity_ratio(eigs) < 1.0;
        }
    }
    return r;
}

bool contracts_two_volumes(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols() || m.rows() < 2) {
        throw shape_error("contracts_two_volumes: need a square matrix of size >= 2");
    }
    if (!m.allFinite()) {
        throw validation_error("contracts_two_volumes: non-finite entries");
    }
    const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues();
    return sv(0) * sv(1) < 1.0;
}

SpectrumReport classify_orbit(const std::vector<Eigen::MatrixXd>& jacobians) {
    if (jacobians.empty()) {
        throw shape_error("classify_orbit: empty Jacobian list");
    }
    const auto dim = jacobians.front().rows();
    for (const auto& j : jacobians) {
        if (j.rows() != dim || j.cols() != dim) {
            throw shape_error("classify_orbit: Jacobian dimensions disagree");
        }
    }
    // dF^per = J_{per-1} ... J_1 J_0: later steps compose on the left.
    Eigen::MatrixXd product = Eigen::MatrixXd::Identity(dim, dim);
    for (const auto& j : jacobians) product = j * product;

    const Eigen::EigenSolver<Eigen::MatrixXd> solver(product, false);
    std::vector<std::complex<double>> eigs(static_cast<std::size_t>(dim));
    for (Eigen::Index i = 0; i < dim; ++i) eigs[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);

    SpectrumReport r = classify(eigs, static_cast<int>(jacobians.size()));
    if (dim >= 2) {
        r.contracts_two_volumes_flag = contracts_two_volumes(product);
        r.has_two_volume_check = true;
    }
    return r;
}

double spectral_norm(const Eigen::MatrixXd& m) {
    return Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues()(0);
}

} // namespace tanglab
