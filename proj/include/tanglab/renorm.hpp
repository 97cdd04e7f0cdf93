#pragma once

#include <Eigen/Dense>

#include <string>
#include <utility>
#include <vector>

#include "tanglab/model_family.hpp"

namespace tanglab {

struct RescaledPoint {
    double X = 0.0;
    double Y = 0.0;
};

/// n-th rescaling frame of the planar family: the affine chart H_n around the
/// closed-form sink and the matching parameter chart around mu_n.
struct RenormFrame2D {
    ModelParams params;
    int n = 1;

    RenormFrame2D(ModelParams p, int n_);

    [[nodiscard]] double coupling() const;  ///< (lambda*sigma)^n
    [[nodiscard]] double mu_center() const; ///< mu_n = sigma^{-n} + lambda^n
    [[nodiscard]] double sigma_n() const;
    [[nodiscard]] double sigma_2n() const;
};

/// H_n: (x, y) -> (sigma^n (x - 1), sigma^{2n} (y - sigma^{-n})).
[[nodiscard]] RescaledPoint h_n(const RenormFrame2D& frame, const PlanarPoint& z);
[[nodiscard]] PlanarPoint h_n_inverse(const RenormFrame2D& frame, const RescaledPoint& w);

/// nu = sigma^{2n} (mu - mu_n); exact affine inverse provided.
[[nodiscard]] double reparam_nu(const RenormFrame2D& frame, double mu);
[[nodiscard]] double reparam_mu(const RenormFrame2D& frame, double nu);

/// G_{n,nu}(X, Y) = (Y, Y^2 - (lambda*sigma)^n X + nu), the return map in the
/// H_n chart, evaluated algebraically (no conjugation round trip).
[[nodiscard]] RescaledPoint renormalized_map_2d(const RenormFrame2D& frame, double nu, double X,
                                                double Y);

/// The quadratic limit family G_nu(X, Y) = (Y, Y^2 + nu).
[[nodiscard]] RescaledPoint limit_map_2d(double nu, double X, double Y);

/// Sup distance between G_{n,nu} and G_nu over a (grid x grid) lattice on
/// [-k,k]^2. For the planar model this equals (lambda*sigma)^n * k exactly.
[[nodiscard]] double c0_deviation(const RenormFrame2D& frame, double nu, double k, int grid = 41);

/// Same sup, for finite-difference Jacobians (Frobenius norm).
[[nodiscard]] double c1_deviation(const RenormFrame2D& frame, double nu, double k, int grid = 41,
                                  double fd_step = 1e-6);

/// One monomial coeff * x_1^{p_1} ... x_{m-1}^{p_{m-1}} * v^{q}, with v = y - 1.
struct PolyTerm {
    double coeff = 0.0;
    std::vector<int> x_powers;
    int v_power = 0;
};

/// Polynomial remainder term in the variables (x, y - 1).
struct Polynomial {
    int x_dim = 1;
    std::vector<PolyTerm> terms;

    [[nodiscard]] double eval(const Eigen::VectorXd& x, double y) const;
    [[nodiscard]] bool jet1_vanishes_at_tangency() const; ///< value and 1-jet at (0,1)
    [[nodiscard]] bool has_pure_v2_term() const;
};

/// Coefficient data of the return map
///   (x, y) -> (e + a (y-1) + gamma x + rho1,  mu - c x + b (y-1)^2 + rho2)
/// around a tangency of an m-dimensional sectionally dissipative saddle.
struct GeneralCoeffs {
    int dim = 2; ///< m; x lives in R^{m-1}
    Eigen::VectorXd e;
    Eigen::VectorXd a;
    double b = 1.0;
    Eigen::RowVectorXd c;
    Eigen::MatrixXd gamma;
    Eigen::MatrixXd lambda_s; ///< contracting block of the saddle
    double sigma = 2.0;       ///< expanding eigenvalue
    std::vector<Polynomial> rho1; ///< one component per x coordinate
    Polynomial rho2;

    /// Shape, dissipativity, and jet conditions (coefficient inspection plus
    /// finite-difference cross-check at tolerance fd_tol).
    void validate(double fd_tol = 1e-6) const;

    [[nodiscard]] Eigen::VectorXd limit_direction() const; ///< A = a / b
    [[nodiscard]] double lambda_spectral_radius() const;
};

[[nodiscard]] GeneralCoeffs load_general_coeffs(const std::string& path);

/// Exact n-th renormalized return map in the general H_n chart, assembling
/// the coupling, drift, and scaled remainder corrections.
[[nodiscard]] std::pair<Eigen::VectorXd, double> general_renormalized_map(const GeneralCoeffs& co,
                                                                          int n, double nu,
                                                                          const Eigen::VectorXd& X,
                                                                          double Y);

/// Limit family (X, Y) -> (A Y, Y^2 + nu).
[[nodiscard]] std::pair<Eigen::VectorXd, double> general_limit_map(const GeneralCoeffs& co,
                                                                   double nu,
                                                                   const Eigen::VectorXd& X,
                                                                   double Y);

[[nodiscard]] double general_c0_deviation(const GeneralCoeffs& co, int n, double nu, double k,
                                          int grid = 9);
[[nodiscard]] double general_c1_deviation(const GeneralCoeffs& co, int n, double nu, double k,
                                          int grid = 9, double fd_step = 1e-6);

/// Fixed points of Y -> Y^2 + nu, via the cancellation-free quadratic formula.
struct QuadraticFamilyPoint {
    double nu = 0.0;
    bool exists = false;
    double sink = 0.0;              ///< a_nu = (1 - sqrt(1-4nu)) / 2
    double source = 0.0;            ///< r_nu = (1 + sqrt(1-4nu)) / 2
    double sink_multiplier = 0.0;   ///< 2 a_nu
    double source_multiplier = 0.0; ///< 2 r_nu
    bool sink_attracting = false;
};

[[nodiscard]] QuadraticFamilyPoint quadratic_fixed_points(double nu);

/// (-r_nu, r_nu): the interval attracted to the sink of Y -> Y^2 + nu.
[[nodiscard]] std::pair<double, double> basin_interval(double nu);

} // namespace tanglab
