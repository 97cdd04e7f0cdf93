#include "tanglab/renorm.hpp"

#include <cmath>

#include "tanglab/io.hpp"

namespace tanglab {

namespace {

Eigen::MatrixXd matrix_power(const Eigen::MatrixXd& m, int n) {
    Eigen::MatrixXd result = Eigen::MatrixXd::Identity(m.rows(), m.cols());
    Eigen::MatrixXd base = m;
    int k = n;
    while (k > 0) {
        if (k & 1) result = result * base;
        base = base * base;
        k >>= 1;
    }
    return result;
}

double spectral_radius(const Eigen::MatrixXd& m) {
    return Eigen::EigenSolver<Eigen::MatrixXd>(m, false).eigenvalues().cwiseAbs().maxCoeff();
}

std::vector<double> lattice(double k, int grid) {
    std::vector<double> pts(static_cast<std::size_t>(grid));
    for (int i = 0; i < grid; ++i) {
        pts[static_cast<std::size_t>(i)] =
            -k + 2.0 * k * static_cast<double>(i) / static_cast<double>(grid - 1);
    }
    pts.front() = -k;
    pts.back() = k;
    return pts;
}

/// sigma^{n*scale} * rho(x_in, y_in) with y_in - 1 = b^{-1} sigma^{-n} Y,
/// accumulated termwise: each monomial keeps (Y/b)^q and a single combined
/// sigma^{n(scale-q)} factor, so the rescaling never overflows on its own.
double scaled_remainder(const Polynomial& poly, const Eigen::VectorXd& x_in, double Y, double b,
                        double sigma, int n, int scale) {
    double total = 0.0;
    for (const auto& term : poly.terms) {
        double mono = term.coeff;
        for (int i = 0; i < poly.x_dim; ++i) {
            for (int p = 0; p < term.x_powers[static_cast<std::size_t>(i)]; ++p) {
                mono *= x_in(i);
            }
        }
        for (int q = 0; q < term.v_power; ++q) mono *= Y / b;
        mono *= std::pow(sigma, static_cast<double>(n) * (scale - term.v_power));
        total += mono;
    }
    return total;
}

} // namespace

RenormFrame2D::RenormFrame2D(ModelParams p, int n_) : params(p), n(n_) {
    if (n < 1) {
        throw validation_error("renormalization index n must be >= 1");
    }
    if (coupling() == 0.0) {
        throw precision_error("(lambda*sigma)^n underflows to zero for n = " + std::to_string(n));
    }
}

double RenormFrame2D::coupling() const { return std::pow(params.lambda * params.sigma, n); }
double RenormFrame2D::mu_center() const {
    return std::pow(params.sigma, -n) + std::pow(params.lambda, n);
}
double RenormFrame2D::sigma_n() const { return std::pow(params.sigma, n); }
double RenormFrame2D::sigma_2n() const { return std::pow(params.sigma, 2.0 * n); }

RescaledPoint h_n(const RenormFrame2D& frame, const PlanarPoint& z) {
    const double sn = frame.sigma_n();
    RescaledPoint w{sn * (z.x - 1.0), frame.sigma_2n() * (z.y - 1.0 / sn)};
    if (!std::isfinite(w.X) || !std::isfinite(w.Y)) {
        throw precision_error("h_n overflowed for n = " + std::to_string(frame.n));
    }
    return w;
}

PlanarPoint h_n_inverse(const RenormFrame2D& frame, const RescaledPoint& w) {
    const double sn_inv = std::pow(frame.params.sigma, -frame.n);
    return {sn_inv * w.X + 1.0, sn_inv * sn_inv * w.Y + sn_inv};
}

double reparam_nu(const RenormFrame2D& frame, double mu) {
    return frame.sigma_2n() * (mu - frame.mu_center());
}

double reparam_mu(const RenormFrame2D& frame, double nu) {
    return frame.mu_center() + nu / frame.sigma_2n();
}

RescaledPoint renormalized_map_2d(const RenormFrame2D& frame, double nu, double X, double Y) {
    return {Y, Y * Y - frame.coupling() * X + nu};
}

RescaledPoint limit_map_2d(double nu, double X, double Y) {
    (void)X;
    return {Y, Y * Y + nu};
}

double c0_deviation(const RenormFrame2D& frame, double nu, double k, int grid) {
    if (!(k >= 1.0) || grid < 2) {
        throw validation_error("c0_deviation needs k >= 1 and grid >= 2");
    }
    const auto pts = lattice(k, grid);
    const long double coupling = frame.coupling();
    const long double nul = nu;
    double sup = 0.0;
    for (const double X : pts) {
        for (const double Y : pts) {
            // Extended precision keeps the tiny coupling term visible next to
            // Y^2 + nu; in doubles the sup would be polluted by ulp(Y^2).
            const long double yl = Y;
            const long double gy = yl * yl - coupling * static_cast<long double>(X) + nul;
            const long double ly = yl * yl + nul;
            const double dist = static_cast<double>(std::fabs(gy - ly)); // X parts coincide
            sup = std::max(sup, dist);
        }
    }
    return sup;
}

double c1_deviation(const RenormFrame2D& frame, double nu, double k, int grid, double fd_step) {
    if (!(k >= 1.0) || grid < 2) {
        throw validation_error("c1_deviation needs k >= 1 and grid >= 2");
    }
    const auto pts = lattice(k, grid);
    const double h = fd_step;
    double sup = 0.0;
    const auto diff_map = [&](double X, double Y) {
        const RescaledPoint g = renormalized_map_2d(frame, nu, X, Y);
        const RescaledPoint l = limit_map_2d(nu, X, Y);
        return Eigen::Vector2d(g.X - l.X, g.Y - l.Y);
    };
    for (const double X : pts) {
        for (const double Y : pts) {
            Eigen::Matrix2d j;
            j.col(0) = (diff_map(X + h, Y) - diff_map(X - h, Y)) / (2.0 * h);
            j.col(1) = (diff_map(X, Y + h) - diff_map(X, Y - h)) / (2.0 * h);
            sup = std::max(sup, j.norm());
        }
    }
    return sup;
}

double Polynomial::eval(const Eigen::VectorXd& x, double y) const {
    const double v = y - 1.0;
    double total = 0.0;
    for (const auto& term : terms) {
        double mono = term.coeff;
        for (int i = 0; i < x_dim; ++i) {
            for (int p = 0; p < term.x_powers[static_cast<std::size_t>(i)]; ++p) mono *= x(i);
        }
        for (int q = 0; q < term.v_power; ++q) mono *= v;
        total += mono;
    }
    return total;
}

bool Polynomial::jet1_vanishes_at_tangency() const {
    for (const auto& term : terms) {
        int total_degree = term.v_power;
        for (const int p : term.x_powers) total_degree += p;
        if (total_degree <= 1 && term.coeff != 0.0) return false;
    }
    return true;
}

bool Polynomial::has_pure_v2_term() const {
    for (const auto& term : terms) {
        if (term.v_power != 2 || term.coeff == 0.0) continue;
        bool pure = true;
        for (const int p : term.x_powers) pure &= (p == 0);
        if (pure) return true;
    }
    return false;
}

Eigen::VectorXd GeneralCoeffs::limit_direction() const { return a / b; }

double GeneralCoeffs::lambda_spectral_radius() const { return spectral_radius(lambda_s); }

namespace {

void check_poly_shape(const Polynomial& poly, int x_dim, const std::string& name) {
    if (poly.x_dim != x_dim) {
        throw shape_error(name + ": x_dim " + std::to_string(poly.x_dim) + " != " +
                          std::to_string(x_dim));
    }
    for (const auto& term : poly.terms) {
        if (static_cast<int>(term.x_powers.size()) != x_dim || term.v_power < 0) {
            throw shape_error(name + ": malformed term");
        }
        for (const int p : term.x_powers) {
            if (p < 0) throw shape_error(name + ": negative power");
        }
    }
}

/// Central finite differences of rho at (x, y) = (0, 1).
void check_jet_numerically(const Polynomial& poly, bool forbid_vv, double tol,
                           const std::string& name) {
    const double h = 1e-4;
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(poly.x_dim);
    if (std::abs(poly.eval(zero, 1.0)) > tol) {
        throw validation_error(name + ": value at (0,1) is nonzero");
    }
    for (int i = 0; i < poly.x_dim; ++i) {
        Eigen::VectorXd xp = zero, xm = zero;
        xp(i) = h;
        xm(i) = -h;
        const double d = (poly.eval(xp, 1.0) - poly.eval(xm, 1.0)) / (2.0 * h);
        if (std::abs(d) > tol) {
            throw validation_error(name + ": d/dx_" + std::to_string(i) + " at (0,1) is nonzero");
        }
    }
    const double dy = (poly.eval(zero, 1.0 + h) - poly.eval(zero, 1.0 - h)) / (2.0 * h);
    if (std::abs(dy) > tol) {
        throw validation_error(name + ": d/dy at (0,1) is nonzero");
    }
    if (forbid_vv) {
        const double dyy =
            (poly.eval(zero, 1.0 + h) - 2.0 * poly.eval(zero, 1.0) + poly.eval(zero, 1.0 - h)) /
            (h * h);
        if (std::abs(dyy) > tol) {
            throw validation_error(name + ": d2/dy2 at (0,1) is nonzero");
        }
    }
}

} // namespace

void GeneralCoeffs::validate(double fd_tol) const {
    if (dim < 2) {
        throw shape_error("GeneralCoeffs: dim must be >= 2");
    }
    const int xd = dim - 1;
    if (e.size() != xd || a.size() != xd || c.size() != xd || gamma.rows() != xd ||
        gamma.cols() != xd || lambda_s.rows() != xd || lambda_s.cols() != xd) {
        throw shape_error("GeneralCoeffs: inconsistent coefficient shapes for dim " +
                          std::to_string(dim));
    }
    if (e.norm() > 1.0) {
        throw validation_error("GeneralCoeffs: |e| must be <= 1");
    }
    if (b == 0.0) {
        throw validation_error("GeneralCoeffs: b must be nonzero");
    }
    if (!(sigma > 1.0)) {
        throw validation_error("GeneralCoeffs: sigma must exceed 1");
    }
    if (!(lambda_spectral_radius() * sigma < 1.0)) {
        throw validation_error("GeneralCoeffs: rho(lambda)*sigma must be < 1");
    }
    if (static_cast<int>(rho1.size()) != xd) {
        throw shape_error("GeneralCoeffs: rho1 must have dim-1 components");
    }
    for (int i = 0; i < xd; ++i) {
        const std::string name = "rho1[" + std::to_string(i) + "]";
        const auto& poly = rho1[static_cast<std::size_t>(i)];
        check_poly_shape(poly, xd, name);
        if (!poly.jet1_vanishes_at_tangency()) {
            throw validation_error(name + ": 1-jet at (0,1) must vanish");
        }
        check_jet_numerically(poly, false, fd_tol, name);
    }
    check_poly_shape(rho2, xd, "rho2");
    if (!rho2.jet1_vanishes_at_tangency()) {
        throw validation_error("rho2: 1-jet at (0,1) must vanish");
    }
    if (rho2.has_pure_v2_term()) {
        throw validation_error("rho2: (y-1)^2 coefficient must vanish");
    }
    check_jet_numerically(rho2, true, fd_tol, "rho2");
}

std::pair<Eigen::VectorXd, double> general_renormalized_map(const GeneralCoeffs& co, int n,
                                                            double nu, const Eigen::VectorXd& X,
                                                            double Y) {
    if (n < 2 || n % 2 != 0) {
        throw validation_error("general renormalization requires even n >= 2");
    }
    if (!std::isfinite(std::pow(co.sigma, 2.0 * n))) {
        throw precision_error("sigma^(2n) overflows for n = " + std::to_string(n));
    }
    if (X.size() != co.dim - 1) {
        throw shape_error("general_renormalized_map: X has wrong dimension");
    }

    // Contracting powers, assembled so no factor alone overflows.
    const Eigen::MatrixXd lambda_n = matrix_power(co.lambda_s, n);
    const Eigen::MatrixXd sl_n = matrix_power(co.sigma * co.lambda_s, n); // sigma^n lambda^n
    const Eigen::MatrixXd ls_inv_n = matrix_power(co.lambda_s / co.sigma, n);

    const Eigen::VectorXd x_in = ls_inv_n * X + lambda_n * co.e; // lambda^n (sigma^{-n} X + e)

    Eigen::VectorXd x_out = co.limit_direction() * Y + co.gamma * (lambda_n * X + sl_n * co.e);
    for (int i = 0; i < co.dim - 1; ++i) {
        x_out(i) += scaled_remainder(co.rho1[static_cast<std::size_t>(i)], x_in, Y, co.b, co.sigma,
                                     n, 1);
    }

    double y_out = Y * Y - co.b * (co.c * (sl_n * X))(0) + nu +
                   co.b * scaled_remainder(co.rho2, x_in, Y, co.b, co.sigma, n, 2);
    return {x_out, y_out};
}

std::pair<Eigen::VectorXd, double> general_limit_map(const GeneralCoeffs& co, double nu,
                                                     const Eigen::VectorXd& X, double Y) {
    (void)X;
    return {co.limit_direction() * Y, Y * Y + nu};
}

namespace {

template <typename Fn>
void for_each_lattice_point(const std::vector<double>& pts, int dims, Fn&& fn) {
    std::vector<int> idx(static_cast<std::size_t>(dims), 0);
    Eigen::VectorXd point(dims);
    while (true) {
        for (int d = 0; d < dims; ++d) {
            point(d) = pts[static_cast<std::size_t>(idx[static_cast<std::size_t>(d)])];
        }
        fn(point);
        int d = 0;
        for (; d < dims; ++d) {
            auto& i = idx[static_cast<std::size_t>(d)];
            if (++i < static_cast<int>(pts.size())) break;
            i = 0;
        }
        if (d == dims) return;
    }
}

} // namespace

double general_c0_deviation(const GeneralCoeffs& co, int n, double nu, double k, int grid) {
    if (!(k >= 1.0) || grid < 2) {
        throw validation_error("general_c0_deviation needs k >= 1 and grid >= 2");
    }
    const auto pts = lattice(k, grid);
    double sup = 0.0;
    for_each_lattice_point(pts, co.dim, [&](const Eigen::VectorXd& z) {
        const Eigen::VectorXd X = z.head(co.dim - 1);
        const double Y = z(co.dim - 1);
        const auto [gx, gy] = general_renormalized_map(co, n, nu, X, Y);
        const auto [lx, ly] = general_limit_map(co, nu, X, Y);
        const double d2 = (gx - lx).squaredNorm() + (gy - ly) * (gy - ly);
        sup = std::max(sup, std::sqrt(d2));
    });
    return sup;
}

double general_c1_deviation(const GeneralCoeffs& co, int n, double nu, double k, int grid,
                            double fd_step) {
    if (!(k >= 1.0) || grid < 2) {
        throw validation_error("general_c1_deviation needs k >= 1 and grid >= 2");
    }
    const auto pts = lattice(k, grid);
    const int m = co.dim;
    const double h = fd_step;
    const auto diff_map = [&](const Eigen::VectorXd& z) {
        const Eigen::VectorXd X = z.head(m - 1);
        const double Y = z(m - 1);
        const auto [gx, gy] = general_renormalized_map(co, n, nu, X, Y);
        const auto [lx, ly] = general_limit_map(co, nu, X, Y);
        Eigen::VectorXd out(m);
        out.head(m - 1) = gx - lx;
        out(m - 1) = gy - ly;
        return out;
    };
    double sup = 0.0;
    for_each_lattice_point(pts, m, [&](const Eigen::VectorXd& z) {
        Eigen::MatrixXd j(m, m);
        for (int d = 0; d < m; ++d) {
            Eigen::VectorXd zp = z, zm = z;
            zp(d) += h;
            zm(d) -= h;
            j.col(d) = (diff_map(zp) - diff_map(zm)) / (2.0 * h);
        }
        sup = std::max(sup, j.norm());
    });
    return sup;
}

QuadraticFamilyPoint quadratic_fixed_points(double nu) {
    QuadraticFamilyPoint out;
    out.nu = nu;
    const double disc = 1.0 - 4.0 * nu;
    if (disc < 0.0) {
        return out;
    }
    const double s = std::sqrt(disc);
    out.exists = true;
    out.source = (1.0 + s) / 2.0;
    out.sink = 2.0 * nu / (1.0 + s); // = (1 - s) / 2 without cancellation
    out.sink_multiplier = 2.0 * out.sink;
    out.source_multiplier = 2.0 * out.source;
    out.sink_attracting = std::abs(out.sink_multiplier) < 1.0;
    return out;
}

std::pair<double, double> basin_interval(double nu) {
    const QuadraticFamilyPoint fp = quadratic_fixed_points(nu);
    if (!fp.exists) {
        throw regime_error("basin_interval: no fixed points for nu > 1/4");
    }
    if (!fp.sink_attracting) {
        throw regime_error("basin_interval: sink is not attracting at nu = " + std::to_string(nu));
    }
    return {-fp.source, fp.source};
}

namespace {

Polynomial parse_poly_terms(const std::vector<std::vector<std::string>>& rows, int x_dim,
                            const std::string& what) {
    Polynomial poly;
    poly.x_dim = x_dim;
    for (const auto& toks : rows) {
        // coeff p_1 ... p_{m-1} q
        if (static_cast<int>(toks.size()) != x_dim + 2) {
            throw validation_error(what + ": term needs coeff, " + std::to_string(x_dim) +
                                   " x-powers, and a (y-1)-power");
        }
        PolyTerm term;
        term.coeff = parse_double(toks[0]);
        for (int i = 0; i < x_dim; ++i) {
            term.x_powers.push_back(parse_int(toks[static_cast<std::size_t>(i) + 1]));
        }
        term.v_power = parse_int(toks.back());
        poly.terms.push_back(std::move(term));
    }
    return poly;
}

Eigen::MatrixXd to_matrix(const std::vector<double>& flat, int rows, int cols,
                          const std::string& what) {
    if (static_cast<int>(flat.size()) != rows * cols) {
        throw validation_error(what + ": expected " + std::to_string(rows * cols) +
                               " row-major entries, got " + std::to_string(flat.size()));
    }
    Eigen::MatrixXd m(rows, cols);
    for (int r = 0; r < rows; ++r) {
        for (int col = 0; col < cols; ++col) {
            m(r, col) = flat[static_cast<std::size_t>(r * cols + col)];
        }
    }
    return m;
}

} // namespace

GeneralCoeffs load_general_coeffs(const std::string& path) {
    const KeyValueConfig cfg = parse_key_value_file(path);
    GeneralCoeffs co;
    co.dim = cfg.integer("family", "dim");
    if (co.dim < 2) {
        throw validation_error("coeffs file: dim must be >= 2");
    }
    const int xd = co.dim - 1;
    co.e = to_matrix(cfg.number_list("family", "e"), xd, 1, "e");
    co.a = to_matrix(cfg.number_list("family", "a"), xd, 1, "a");
    co.b = cfg.number("family", "b");
    co.c = to_matrix(cfg.number_list("family", "c"), 1, xd, "c");
    co.gamma = to_matrix(cfg.number_list("family", "gamma"), xd, xd, "gamma");
    co.lambda_s = to_matrix(cfg.number_list("family", "lambda"), xd, xd, "lambda");
    co.sigma = cfg.number("family", "sigma");

    co.rho1.assign(static_cast<std::size_t>(xd), Polynomial{xd, {}});
    if (cfg.has_section("rho1")) {
        // term = component coeff p_1 ... p_{m-1} q
        for (const auto& toks : cfg.values("rho1", "term")) {
            if (static_cast<int>(toks.size()) != xd + 3) {
                throw validation_error("rho1 term needs component, coeff, " + std::to_string(xd) +
                                       " x-powers, and a (y-1)-power");
            }
            const int comp = parse_int(toks[0]);
            if (comp < 0 || comp >= xd) {
                throw validation_error("rho1 term: component out of range");
            }
            PolyTerm term;
            term.coeff = parse_double(toks[1]);
            for (int i = 0; i < xd; ++i) {
                term.x_powers.push_back(parse_int(toks[static_cast<std::size_t>(i) + 2]));
            }
            term.v_power = parse_int(toks.back());
            co.rho1[static_cast<std::size_t>(comp)].terms.push_back(std::move(term));
        }
    }
    co.rho2 = Polynomial{xd, {}};
    if (cfg.has_section("rho2")) {
        co.rho2 = parse_poly_terms(cfg.values("rho2", "term"), xd, "rho2");
    }
    co.validate();
    return co;
}

} // namespace tanglab
