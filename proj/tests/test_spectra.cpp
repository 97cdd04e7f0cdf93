#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "tanglab/model_family.hpp"
#include "tanglab/spectra.hpp"

using namespace tanglab;
using Catch::Approx;

namespace {

std::vector<std::complex<double>> reals(std::initializer_list<double> vals) {
    std::vector<std::complex<double>> out;
    for (const double v : vals) out.emplace_back(v, 0.0);
    return out;
}

} // namespace

TEST_CASE("classify matches the direct pairwise oracle on the worked cases", "[spectra]") {
    const SpectrumReport a = classify(reals({2.0, 0.3, 0.1}));
    CHECK(a.dissipative);
    CHECK(a.sectionally_dissipative);
    CHECK_FALSE(a.extremely_dissipative); // 0.3 * 4 = 1.2
    CHECK(a.expanding_count == 1);

    const SpectrumReport b = classify(reals({2.0, 0.1, 0.05}));
    CHECK(b.sectionally_dissipative);
    CHECK(b.extremely_dissipative); // 0.1 * 4 = 0.4

    const SpectrumReport c = classify(reals({2.0, 0.6, 0.9}));
    CHECK_FALSE(c.dissipative); // product 1.08
    CHECK(c.area_expanding);
    CHECK_FALSE(c.sectionally_dissipative); // |2 * 0.6| = 1.2
    CHECK_FALSE(c.extremely_dissipative);
}

TEST_CASE("classify agrees with the brute-force oracle on random spectra", "[spectra]") {
    std::mt19937_64 rng(2024);
    int checked = 0;
    while (checked < 1000) {
        const int dim = 2 + static_cast<int>(rng() % 5);
        std::vector<std::complex<double>> eigs;
        bool near_unit = false;
        for (int i = 0; i < dim; ++i) {
            // moduli log-uniform in [0.01, 100]
            const double modulus = std::pow(10.0, oracles::uniform(rng, -2.0, 2.0));
            const double angle = oracles::uniform(rng, 0.0, 6.2831853);
            if (std::abs(modulus - 1.0) < 1e-6) near_unit = true;
            eigs.emplace_back(modulus * std::cos(angle), modulus * std::sin(angle));
        }
        if (near_unit) continue;
        ++checked;

        const SpectrumReport report = classify(eigs);
        const oracles::FlagSet expect = oracles::classify_direct(eigs);
        REQUIRE(report.dissipative == expect.dissipative);
        REQUIRE(report.area_expanding == expect.area_expanding);
        REQUIRE(report.sectionally_dissipative == expect.sectionally_dissipative);
        REQUIRE(report.extremely_dissipative == expect.extremely_dissipative);
        REQUIRE(report.expanding_count == expect.expanding_count);

        // Implication chain.
        if (report.extremely_dissipative) REQUIRE(report.sectionally_dissipative);
        if (report.sectionally_dissipative) {
            REQUIRE(report.expanding_count == 1);
            REQUIRE(report.dissipative);
        }
    }
}

TEST_CASE("classify rejects unit-circle spectra and empty input", "[spectra]") {
    CHECK_THROWS_AS(classify({}), shape_error);
    CHECK_THROWS_AS(classify(reals({1.0, 0.5})), hyperbolicity_error);
    CHECK_THROWS_AS(classify(reals({0.5, 1.0 + 1e-10})), hyperbolicity_error);
    CHECK_NOTHROW(classify(reals({0.5, 1.0 + 1e-8})));
}

TEST_CASE("extreme dissipativity ratio needs exactly one expanding eigenvalue", "[spectra]") {
    CHECK(extreme_dissipativity_ratio(reals({2.0, 0.3, 0.1})) == Approx(1.2));
    CHECK_THROWS_AS(extreme_dissipativity_ratio(reals({2.0, 3.0, 0.1})), shape_error);
    CHECK_THROWS_AS(extreme_dissipativity_ratio(reals({0.5, 0.1})), shape_error);
}

TEST_CASE("two-volume contraction via the top singular values", "[spectra]") {
    Eigen::MatrixXd d = Eigen::Vector3d(2.0, 0.2, 0.1).asDiagonal();
    CHECK(contracts_two_volumes(d)); // 2 * 0.2 = 0.4

    CHECK_FALSE(contracts_two_volumes(Eigen::Matrix2d::Identity())); // boundary excluded

    Eigen::Matrix2d rot;
    const double c = std::cos(0.5235987755982988), s = std::sin(0.5235987755982988);
    rot << c, -s, s, c;
    CHECK(contracts_two_volumes(0.9 * rot)); // 0.81

    // For diagonal matrices the test is the product of the two largest moduli.
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        Eigen::Vector3d diag;
        for (int i = 0; i < 3; ++i) diag(i) = oracles::uniform(rng, -2.0, 2.0);
        Eigen::Vector3d mods = diag.cwiseAbs();
        std::sort(mods.data(), mods.data() + 3);
        const bool expect = mods(2) * mods(1) < 1.0;
        CHECK(contracts_two_volumes(Eigen::MatrixXd(diag.asDiagonal())) == expect);
    }
}

TEST_CASE("orbit classification multiplies jacobians in orbit order", "[spectra]") {
    const ModelParams p(0.2, 2.0);
    const ClosedFormSink s = closed_form_sink(p, 4);
    const SpectrumReport sink = classify_orbit({composite_jacobian(p, 4, s.point)});
    CHECK(sink.dissipative);
    CHECK(sink.expanding_count == 0);
    for (const auto& e : sink.eigenvalues) {
        CHECK(std::abs(e) == Approx(0.16).epsilon(1e-10));
        CHECK(std::abs(e.real()) < 1e-12);
    }
    CHECK(sink.has_two_volume_check);
    CHECK(sink.contracts_two_volumes_flag); // product of moduli 0.0256

    const Eigen::Matrix2d j1 = Eigen::Vector2d(2.0, 0.1).asDiagonal();
    const Eigen::Matrix2d j2 = Eigen::Vector2d(0.3, 0.9).asDiagonal();
    const SpectrumReport prod = classify_orbit({j1, j2});
    CHECK(prod.expanding_count == 0);
    CHECK(prod.period == 2);
    std::vector<double> mods;
    for (const auto& e : prod.eigenvalues) mods.push_back(std::abs(e));
    std::sort(mods.begin(), mods.end());
    CHECK(mods[0] == Approx(0.09));
    CHECK(mods[1] == Approx(0.6));
}

TEST_CASE("identity products are rejected as non-hyperbolic", "[spectra]") {
    Eigen::Matrix2d a;
    a << 1.5, 0.3, 0.2, 0.8;
    CHECK_THROWS_AS(classify_orbit({a, a.inverse()}), hyperbolicity_error);
    CHECK_THROWS_AS(classify_orbit({}), shape_error);

    Eigen::Matrix2d b = Eigen::Matrix2d::Identity();
    Eigen::Matrix3d c = Eigen::Matrix3d::Identity();
    CHECK_THROWS_AS(classify_orbit({Eigen::MatrixXd(b), Eigen::MatrixXd(c)}), shape_error);
}

TEST_CASE("orbit spectra are invariant under cyclic rotation", "[spectra]") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 25; ++trial) {
        std::vector<Eigen::MatrixXd> jacs;
        for (int i = 0; i < 3; ++i) {
            Eigen::Matrix3d m;
            for (int r = 0; r < 3; ++r)
                for (int c = 0; c < 3; ++c) m(r, c) = oracles::uniform(rng, -1.2, 1.2);
            jacs.push_back(m);
        }
        SpectrumReport r1, r2;
        try {
            r1 = classify_orbit({jacs[0], jacs[1], jacs[2]});
            r2 = classify_orbit({jacs[1], jacs[2], jacs[0]});
        } catch (const hyperbolicity_error&) {
            continue;
        }
        auto key = [](const std::complex<double>& z) { return std::make_pair(z.real(), z.imag()); };
        std::sort(r1.eigenvalues.begin(), r1.eigenvalues.end(),
                  [&](auto x, auto y) { return key(x) < key(y); });
        std::sort(r2.eigenvalues.begin(), r2.eigenvalues.end(),
                  [&](auto x, auto y) { return key(x) < key(y); });
        for (std::size_t i = 0; i < 3; ++i) {
            CHECK(std::abs(r1.eigenvalues[i] - r2.eigenvalues[i]) < 1e-9);
        }
    }
}
