#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <cstdio>
#include <fstream>

#include "oracles.hpp"
#include "tanglab/renorm.hpp"

using namespace tanglab;
using Catch::Approx;

namespace {

GeneralCoeffs sample_coeffs_m3() {
    GeneralCoeffs co;
    co.dim = 3;
    co.e = Eigen::Vector2d(0.3, -0.2);
    co.a = Eigen::Vector2d(0.7, -0.4);
    co.b = 1.3;
    co.c = Eigen::RowVector2d(0.5, 0.2);
    co.gamma = Eigen::MatrixXd(2, 2);
    co.gamma << 0.2, -0.1, 0.05, 0.15;
    co.lambda_s = Eigen::MatrixXd(2, 2);
    co.lambda_s << 0.3, 0.05, 0.0, 0.25;
    co.sigma = 1.6;
    co.rho1 = {Polynomial{2, {{0.4, {2, 0}, 0}, {0.2, {0, 1}, 1}}},
               Polynomial{2, {{-0.3, {0, 0}, 2}, {0.1, {1, 1}, 0}}}};
    co.rho2 = Polynomial{2, {{0.25, {1, 0}, 1}, {-0.15, {0, 0}, 3}, {0.1, {2, 0}, 0}}};
    co.validate();
    return co;
}

} // namespace

TEST_CASE("h_n centers the closed-form sink and inverts exactly", "[renorm]") {
    const RenormFrame2D frame(ModelParams(0.2, 2.0), 4);

    const RescaledPoint center = h_n(frame, {1.0, std::pow(2.0, -4)});
    CHECK(center.X == 0.0);
    CHECK(center.Y == 0.0);

    const RescaledPoint unit = h_n(frame, {1.0 + std::pow(2.0, -4), std::pow(2.0, -4)});
    CHECK(unit.X == Approx(1.0));
    CHECK(unit.Y == Approx(0.0).margin(1e-14));

    std::mt19937_64 rng(42);
    for (int i = 0; i < 100; ++i) {
        const RescaledPoint w{oracles::uniform(rng, -2.0, 2.0), oracles::uniform(rng, -2.0, 2.0)};
        const PlanarPoint z = h_n_inverse(frame, w);
        const RescaledPoint back = h_n(frame, z);
        CHECK(std::abs(back.X - w.X) < 1e-12);
        CHECK(std::abs(back.Y - w.Y) < 1e-12);
    }
}

TEST_CASE("reparametrization is centered at mu_n and affine-exact", "[renorm]") {
    const RenormFrame2D frame(ModelParams(0.2, 2.0), 4);
    CHECK(reparam_nu(frame, frame.mu_center()) == 0.0);
    CHECK(reparam_nu(frame, frame.mu_center() + std::pow(2.0, -8)) == Approx(1.0));

    // The only rounding in the round trip is the single addition in
    // reparam_mu, amplified by sigma^{2n}.
    const double margin =
        frame.sigma_2n() * frame.mu_center() * std::numeric_limits<double>::epsilon();
    std::mt19937_64 rng(43);
    for (int i = 0; i < 50; ++i) {
        const double nu = oracles::uniform(rng, -2.0, 2.0);
        const double back = reparam_nu(frame, reparam_mu(frame, nu));
        CHECK(back == Approx(nu).epsilon(1e-15).margin(margin));
    }
}

TEST_CASE("renormalized map matches its closed form", "[renorm]") {
    const RenormFrame2D frame(ModelParams(0.2, 2.0), 4);
    const RescaledPoint g = renormalized_map_2d(frame, 0.0, 1.0, 1.0);
    CHECK(g.X == 1.0);
    CHECK(g.Y == Approx(0.9744));

    // X = 0 kills the coupling term.
    std::mt19937_64 rng(44);
    for (int i = 0; i < 20; ++i) {
        const double nu = oracles::uniform(rng, -1.0, 1.0);
        const double y = oracles::uniform(rng, -2.0, 2.0);
        const RescaledPoint a = renormalized_map_2d(frame, nu, 0.0, y);
        CHECK(a.X == y);
        CHECK(a.Y == y * y + nu);
    }
}

TEST_CASE("limit map fixed points", "[renorm]") {
    const RescaledPoint a = limit_map_2d(0.0, 5.0, 0.0);
    CHECK(a.X == 0.0);
    CHECK(a.Y == 0.0);

    const RescaledPoint b = limit_map_2d(0.0, 0.0, 1.0);
    CHECK(b.X == 1.0);
    CHECK(b.Y == 1.0);

    const RescaledPoint c = limit_map_2d(-2.0, 123.0, 2.0);
    CHECK(c.X == 2.0);
    CHECK(c.Y == 2.0);
}

TEST_CASE("conjugacy oracle: H_n conjugates the composite map to G_{n,nu}", "[renorm]") {
    const ModelParams p(0.2, 2.0);
    std::mt19937_64 rng(45);
    for (int n = 3; n <= 8; ++n) {
        const RenormFrame2D frame(p, n);
        for (int i = 0; i < 50; ++i) {
            const double X = oracles::uniform(rng, -1.0, 1.0);
            const double Y = oracles::uniform(rng, -1.0, 1.0);
            const double nu = oracles::uniform(rng, -1.0, 1.0);
            const double mu = reparam_mu(frame, nu);
            const PlanarPoint z = h_n_inverse(frame, {X, Y});
            const RescaledPoint through = h_n(frame, composite_map(p, mu, n, z).image);
            const RescaledPoint direct = renormalized_map_2d(frame, nu, X, Y);
            CHECK(std::abs(through.X - direct.X) < 1e-9);
            CHECK(std::abs(through.Y - direct.Y) < 1e-9);
        }
    }
}

TEST_CASE("planar deviation law is exact", "[renorm]") {
    const ModelParams p(0.2, 2.0);
    const double rate = p.lambda * p.sigma;

    const RenormFrame2D f4(p, 4);
    CHECK(c0_deviation(f4, 0.0, 2.0) == Approx(0.0512).epsilon(1e-12));

    double prev = 0.0;
    for (int n = 2; n <= 12; ++n) {
        const RenormFrame2D frame(p, n);
        const double dev = c0_deviation(frame, 0.0, 2.0);
        CHECK(dev == Approx(std::pow(rate, n) * 2.0).epsilon(1e-12));
        if (n > 2) CHECK(dev / prev == Approx(rate).epsilon(1e-10));
        prev = dev;

        // nu-independence: the quadratic part cancels in the difference.
        CHECK(c0_deviation(frame, -1.0, 2.0) == Approx(dev).epsilon(1e-9));
        CHECK(c0_deviation(frame, 1.0, 2.0) == Approx(dev).epsilon(1e-9));
    }
}

TEST_CASE("planar C1 deviation decreases in n", "[renorm]") {
    const ModelParams p(0.2, 2.0);
    double prev = 1e300;
    for (int n = 2; n <= 12; ++n) {
        const double dev = c1_deviation(RenormFrame2D(p, n), 0.5, 2.0, 21);
        CHECK(dev < prev);
        prev = dev;
    }
    // The only Jacobian difference is the coupling entry -(lambda sigma)^n.
    const double d6 = c1_deviation(RenormFrame2D(p, 6), 0.0, 2.0, 11);
    CHECK(d6 == Approx(std::pow(0.4, 6)).epsilon(1e-6));
}

TEST_CASE("general map with vanishing couplings is the limit family", "[renorm]") {
    GeneralCoeffs co;
    co.dim = 3;
    co.e = Eigen::Vector2d(0.2, 0.1);
    co.a = Eigen::Vector2d(1.0, -0.5);
    co.b = 2.0;
    co.c = Eigen::RowVector2d(0.0, 0.0);
    co.gamma = Eigen::MatrixXd::Zero(2, 2);
    co.lambda_s = Eigen::MatrixXd::Zero(2, 2);
    co.sigma = 1.5;
    co.rho1 = {Polynomial{2, {}}, Polynomial{2, {}}};
    co.rho2 = Polynomial{2, {}};
    co.validate();

    std::mt19937_64 rng(46);
    for (int n = 2; n <= 40; n += 2) {
        const Eigen::Vector2d X(oracles::uniform(rng, -2.0, 2.0), oracles::uniform(rng, -2.0, 2.0));
        const double Y = oracles::uniform(rng, -2.0, 2.0);
        const double nu = oracles::uniform(rng, -1.0, 1.0);
        const auto [gx, gy] = general_renormalized_map(co, n, nu, X, Y);
        const auto [lx, ly] = general_limit_map(co, nu, X, Y);
        CHECK((gx - lx).norm() == 0.0);
        CHECK(gy == ly);
    }
}

TEST_CASE("general map reduces to the planar path for model coefficients", "[renorm]") {
    const ModelParams p(0.2, 2.0);
    GeneralCoeffs co;
    co.dim = 2;
    co.e = Eigen::VectorXd::Constant(1, 1.0); // the tangency lands at (1, 0)
    co.a = Eigen::VectorXd::Constant(1, 1.0);
    co.b = 1.0;
    co.c = Eigen::RowVectorXd::Constant(1, 1.0);
    co.gamma = Eigen::MatrixXd::Zero(1, 1);
    co.lambda_s = Eigen::MatrixXd::Constant(1, 1, p.lambda);
    co.sigma = p.sigma;
    co.rho1 = {Polynomial{1, {}}};
    co.rho2 = Polynomial{1, {}};
    co.validate();

    std::mt19937_64 rng(47);
    for (const int n : {4, 6, 8}) {
        const RenormFrame2D frame(p, n);
        for (int i = 0; i < 50; ++i) {
            const double X = oracles::uniform(rng, -2.0, 2.0);
            const double Y = oracles::uniform(rng, -2.0, 2.0);
            const double nu = oracles::uniform(rng, -1.0, 1.0);
            const auto [gx, gy] =
                general_renormalized_map(co, n, nu, Eigen::VectorXd::Constant(1, X), Y);
            const RescaledPoint planar = renormalized_map_2d(frame, nu, X, Y);
            CHECK(std::abs(gx(0) - planar.X) < 1e-9);
            CHECK(std::abs(gy - planar.Y) < 1e-9);
        }
    }
}

TEST_CASE("general renormalization matches the brute-force conjugacy oracle", "[renorm]") {
    const GeneralCoeffs co = sample_coeffs_m3();
    std::mt19937_64 rng(52);

    // Raw return map in original coordinates, assembled term by term.
    const auto raw_return = [&](const Eigen::VectorXd& x, double y, double mu) {
        Eigen::VectorXd x_img = co.e + co.a * (y - 1.0) + co.gamma * x;
        for (int i = 0; i < 2; ++i) x_img(i) += co.rho1[static_cast<std::size_t>(i)].eval(x, y);
        const double y_img = mu - (co.c * x)(0) + co.b * (y - 1.0) * (y - 1.0) + co.rho2.eval(x, y);
        return std::make_pair(x_img, y_img);
    };

    for (const int n : {8, 12}) {
        const double sn = std::pow(co.sigma, n);
        const double s2n = sn * sn;
        const Eigen::MatrixXd lambda_n = [&] {
            Eigen::MatrixXd m = Eigen::MatrixXd::Identity(2, 2);
            for (int k = 0; k < n; ++k) m = co.lambda_s * m;
            return m;
        }();
        const double mu_n = 1.0 / sn + (co.c * (lambda_n * co.e))(0);

        for (int trial = 0; trial < 40; ++trial) {
            const Eigen::Vector2d X(oracles::uniform(rng, -2.0, 2.0),
                                    oracles::uniform(rng, -2.0, 2.0));
            const double Y = oracles::uniform(rng, -2.0, 2.0);
            const double nu = oracles::uniform(rng, -1.0, 1.0);
            const double mu = mu_n + nu / (co.b * s2n);

            // H_n^{-1}, n linear steps, the return map, then H_n.
            Eigen::VectorXd x = X / sn + co.e;
            double y = Y / (co.b * s2n) + 1.0 / sn;
            x = lambda_n * x;
            y = sn * y;
            const auto [x_img, y_img] = raw_return(x, y, mu);
            const Eigen::VectorXd X_through = sn * (x_img - co.e);
            const double Y_through = co.b * s2n * (y_img - 1.0 / sn);

            const auto [X_direct, Y_direct] = general_renormalized_map(co, n, nu, X, Y);
            CHECK((X_through - X_direct).norm() < 1e-8);
            CHECK(std::abs(Y_through - Y_direct) < 1e-8);
        }
    }
}

TEST_CASE("general renormalization: measured deviation decays with the documented rate",
          "[renorm]") {
    const GeneralCoeffs co = sample_coeffs_m3();
    const double bound = std::max(co.lambda_spectral_radius() * co.sigma, 1.0 / co.sigma) + 0.1;
    double prev_c0 = 1e300;
    double prev_c1 = 1e300;
    for (int n = 10; n <= 30; n += 2) {
        const double c0 = general_c0_deviation(co, n, 0.5, 2.0, 9);
        const double c1 = general_c1_deviation(co, n, 0.5, 2.0, 5);
        CHECK(c0 < prev_c0);
        CHECK(c1 < prev_c1);
        if (prev_c0 < 1e299) {
            CHECK(c0 / prev_c0 < bound);
        }
        prev_c0 = c0;
        prev_c1 = c1;
    }
}

TEST_CASE("general path demands even n", "[renorm]") {
    const GeneralCoeffs co = sample_coeffs_m3();
    const Eigen::Vector2d X(0.0, 0.0);
    CHECK_THROWS_AS(general_renormalized_map(co, 3, 0.0, X, 0.0), validation_error);
    CHECK_NOTHROW(general_renormalized_map(co, 4, 0.0, X, 0.0));
}

TEST_CASE("jet validation accepts cubic and rejects quadratic pure remainders", "[renorm]") {
    GeneralCoeffs co = sample_coeffs_m3();

    co.rho2 = Polynomial{2, {{1.0, {0, 0}, 3}}}; // (y-1)^3
    CHECK_NOTHROW(co.validate());

    co.rho2 = Polynomial{2, {{1.0, {0, 0}, 2}}}; // (y-1)^2: nonzero d2/dy2
    CHECK_THROWS_AS(co.validate(), validation_error);

    co.rho2 = Polynomial{2, {{1.0, {0, 0}, 1}}}; // linear term: 1-jet fails
    CHECK_THROWS_AS(co.validate(), validation_error);

    co.rho2 = Polynomial{2, {}};
    co.rho1[0] = Polynomial{2, {{0.5, {1, 0}, 0}}}; // linear in x: 1-jet fails
    CHECK_THROWS_AS(co.validate(), validation_error);
}

TEST_CASE("general limit family has the (2A, 2) saddle at nu = -2", "[renorm]") {
    for (const int m : {2, 3, 4}) {
        GeneralCoeffs co;
        co.dim = m;
        const int xd = m - 1;
        co.e = Eigen::VectorXd::Constant(xd, 0.1);
        co.a = Eigen::VectorXd::LinSpaced(xd, 0.5, 0.8);
        co.b = 1.25;
        co.c = Eigen::RowVectorXd::Zero(xd);
        co.gamma = Eigen::MatrixXd::Zero(xd, xd);
        co.lambda_s = Eigen::MatrixXd::Zero(xd, xd);
        co.sigma = 1.5;
        co.rho1.assign(static_cast<std::size_t>(xd), Polynomial{xd, {}});
        co.rho2 = Polynomial{xd, {}};
        co.validate();

        const Eigen::VectorXd A = co.limit_direction();
        const Eigen::VectorXd fixed_x = 2.0 * A;
        const auto [ix, iy] = general_limit_map(co, -2.0, fixed_x, 2.0);
        CHECK((ix - fixed_x).norm() < 1e-12);
        CHECK(iy == Approx(2.0));

        // Finite-difference Jacobian at the saddle: spectrum {4, 0 x (m-1)}.
        const double h = 1e-6;
        Eigen::MatrixXd jac(m, m);
        for (int d = 0; d < m; ++d) {
            Eigen::VectorXd zp(m), zm(m);
            zp.head(xd) = fixed_x;
            zp(xd) = 2.0;
            zm = zp;
            zp(d) += h;
            zm(d) -= h;
            const auto [pxv, pyv] = general_limit_map(co, -2.0, zp.head(xd), zp(xd));
            const auto [mxv, myv] = general_limit_map(co, -2.0, zm.head(xd), zm(xd));
            jac.col(d).head(xd) = (pxv - mxv) / (2.0 * h);
            jac(xd, d) = (pyv - myv) / (2.0 * h);
        }
        Eigen::VectorXd mods =
            Eigen::EigenSolver<Eigen::MatrixXd>(jac, false).eigenvalues().cwiseAbs();
        std::sort(mods.data(), mods.data() + mods.size());
        CHECK(std::abs(mods(m - 1) - 4.0) < 1e-9);
        for (int i = 0; i < m - 1; ++i) CHECK(mods(i) < 1e-9);
    }
}

TEST_CASE("quadratic family fixed points", "[renorm]") {
    const QuadraticFamilyPoint origin = quadratic_fixed_points(0.0);
    REQUIRE(origin.exists);
    CHECK(origin.sink == 0.0);
    CHECK(origin.source == 1.0);
    CHECK(origin.sink_multiplier == 0.0);
    CHECK(origin.source_multiplier == 2.0);
    CHECK(origin.sink_attracting);

    const QuadraticFamilyPoint fp = quadratic_fixed_points(-0.16);
    REQUIRE(fp.exists);
    CHECK(fp.sink == Approx(-0.140312).epsilon(1e-5));
    CHECK(fp.source == Approx(1.140312).epsilon(1e-5));
    CHECK(std::abs(fp.sink * fp.sink - 0.16 - fp.sink) < 1e-12);

    CHECK_FALSE(quadratic_fixed_points(0.3).exists);
}

TEST_CASE("quadratic fixed-point residuals across the parameter sweep", "[renorm]") {
    for (int i = -200; i <= 25; ++i) {
        const double nu = i / 100.0;
        const QuadraticFamilyPoint fp = quadratic_fixed_points(nu);
        REQUIRE(fp.exists);
        CHECK(std::abs(fp.sink * fp.sink + nu - fp.sink) < 1e-12);
        CHECK(std::abs(fp.source * fp.source + nu - fp.source) < 1e-12);
        CHECK(fp.sink <= fp.source);
    }
}

TEST_CASE("basin interval attracts interior points to the sink", "[renorm]") {
    const auto [lo0, hi0] = basin_interval(0.0);
    CHECK(lo0 == -1.0);
    CHECK(hi0 == 1.0);
    CHECK(oracles::converges_to(0.999, 0.0, 0.0, 100000, 1e-10));

    const auto [lo, hi] = basin_interval(-0.16);
    const QuadraticFamilyPoint fp = quadratic_fixed_points(-0.16);
    CHECK(hi == Approx(1.140312).epsilon(1e-5));
    CHECK(lo == -hi);
    for (int i = 1; i < 10; ++i) {
        const double y = lo + (hi - lo) * i / 10.0;
        CHECK(oracles::converges_to(y, -0.16, fp.sink, 10000, 1e-10));
    }

    // The boundary point is the source: it stays put.
    double y = fp.source;
    for (int i = 0; i < 5; ++i) y = y * y - 0.16;
    CHECK(y == Approx(fp.source).margin(1e-9));

    CHECK_THROWS_AS(basin_interval(0.3), regime_error);
    CHECK_THROWS_AS(basin_interval(-2.0), regime_error); // sink multiplier -2
}

TEST_CASE("general coefficients load from a key-value file", "[renorm]") {
    const char* path = "tanglab_test_coeffs.ini";
    {
        std::ofstream out(path);
        out << "# three-dimensional sample family\n"
               "[family]\n"
               "dim = 3\n"
               "e = 0.3 -0.2\n"
               "a = 0.7 -0.4\n"
               "b = 1.3\n"
               "c = 0.5 0.2\n"
               "gamma = 0.2 -0.1 0.05 0.15\n"
               "lambda = 0.3 0.05 0.0 0.25\n"
               "sigma = 1.6\n"
               "\n"
               "[rho1]\n"
               "term = 0 0.4 2 0 0\n"
               "term = 0 0.2 0 1 1\n"
               "term = 1 -0.3 0 0 2\n"
               "term = 1 0.1 1 1 0\n"
               "\n"
               "[rho2]\n"
               "term = 0.25 1 0 1\n"
               "term = -0.15 0 0 3\n"
               "term = 0.1 2 0 0\n";
    }
    const GeneralCoeffs loaded = load_general_coeffs(path);
    const GeneralCoeffs reference = sample_coeffs_m3();
    CHECK(loaded.dim == 3);
    CHECK((loaded.e - reference.e).norm() == 0.0);
    CHECK((loaded.gamma - reference.gamma).norm() == 0.0);
    CHECK(loaded.sigma == reference.sigma);

    std::mt19937_64 rng(48);
    for (int i = 0; i < 20; ++i) {
        const Eigen::Vector2d X(oracles::uniform(rng, -2.0, 2.0), oracles::uniform(rng, -2.0, 2.0));
        const double Y = oracles::uniform(rng, -2.0, 2.0);
        const auto [gx, gy] = general_renormalized_map(loaded, 12, 0.3, X, Y);
        const auto [rx, ry] = general_renormalized_map(reference, 12, 0.3, X, Y);
        CHECK((gx - rx).norm() == 0.0);
        CHECK(gy == ry);
    }
    std::remove(path);
}

TEST_CASE("frame construction guards", "[renorm]") {
    const ModelParams p(0.2, 2.0);
    CHECK_THROWS_AS(RenormFrame2D(p, 0), validation_error);
    CHECK_THROWS_AS(RenormFrame2D(p, 900), precision_error); // (0.4)^900 underflows
    CHECK_NOTHROW(RenormFrame2D(p, 500));

    // Rescaled-frame evaluation stays exact at large n; only the unscaled
    // round trip overflows (sigma^{2n} passes 1e308 near n = 512 here).
    const RenormFrame2D deep(p, 550);
    const RescaledPoint img = renormalized_map_2d(deep, 0.3, 1.0, 1.0);
    CHECK(img.Y == Approx(1.3).margin(1e-12));
    CHECK_THROWS_AS(h_n(deep, {0.5, 0.5}), precision_error);

    GeneralCoeffs co = sample_coeffs_m3();
    CHECK_THROWS_AS(general_renormalized_map(co, 2000, 0.0, Eigen::Vector2d(0.0, 0.0), 0.0),
                    precision_error);
}
