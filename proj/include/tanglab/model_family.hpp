#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "tanglab/errors.hpp"

namespace tanglab {

/// The planar saddle family: linear on R0, quadratic return through R1.
/// Requires 0 < lambda < 1 < sigma and lambda*sigma < 1 (dissipative saddle).
struct ModelParams {
    double lambda = 0.2;
    double sigma = 2.0;

    ModelParams() = default;
    ModelParams(double lambda_, double sigma_);

    /// Skips the dissipativity check; for formula-level evaluation only.
    [[nodiscard]] static ModelParams unchecked(double lambda_, double sigma_);

    [[nodiscard]] bool extremely_dissipative() const { return lambda * sigma * sigma < 1.0; }
    [[nodiscard]] double saddle_product() const { return lambda * sigma; }
};

struct PlanarPoint {
    double x = 0.0;
    double y = 0.0;

    [[nodiscard]] bool finite() const;
    [[nodiscard]] double dist(const PlanarPoint& o) const;
};

/// R0 = [-w,w]^2 and the return window R1 around (0,1).
struct RegionSpec {
    double r0_half_width = 2.0;
    PlanarPoint r1_center{0.0, 1.0};
    double r1_half_x = 0.25;
    double r1_half_y = 0.25;

    RegionSpec() = default;
    RegionSpec(double r0_hw, PlanarPoint center, double hx, double hy);

    [[nodiscard]] bool in_r0(const PlanarPoint& z) const;
    [[nodiscard]] bool in_r1(const PlanarPoint& z) const;
    void validate() const;
};

enum class RegionTag : std::uint8_t { r0 = 0, r1_transition = 1, escaped = 2 };

[[nodiscard]] std::string to_string(RegionTag tag);

/// One simulated trajectory through the piecewise dynamics.
struct OrbitSegment {
    std::vector<PlanarPoint> points;
    std::vector<RegionTag> region_tags;
    bool escaped = false;

    [[nodiscard]] std::size_t size() const { return points.size(); }
};

// Largest n for which sigma^{2n}-scale rescalings retain ~4 significant
// digits near magnitude-1 quantities in doubles.
inline constexpr double kPrecisionSafeLimit = 1e12;

// Admissible unfolding range: the transition stays a diffeomorphism onto its
// image within R1.
inline constexpr double kMuAdmissible = 0.5;

void require_admissible_mu(double mu);

[[nodiscard]] bool precision_safe(const ModelParams& p, int n);
void require_precision_safe(const ModelParams& p, int n);

/// F_mu on R0: (x, y) -> (lambda x, sigma y). Independent of mu.
[[nodiscard]] PlanarPoint local_map(const ModelParams& p, const PlanarPoint& z);
[[nodiscard]] PlanarPoint local_map_checked(const ModelParams& p, const PlanarPoint& z,
                                            const RegionSpec& regions);

/// F^N_mu on R1: (x, y) -> (y, mu - x + (y-1)^2).
[[nodiscard]] PlanarPoint transition_map(const ModelParams& p, double mu, const PlanarPoint& z);
[[nodiscard]] PlanarPoint transition_map_checked(const ModelParams& p, double mu,
                                                 const PlanarPoint& z, const RegionSpec& regions);

/// F^{n+N}_mu near the return window, evaluated in closed form.
struct CompositeResult {
    PlanarPoint image;
    PlanarPoint intermediate; ///< F^n(z), the point presented to the transition
    bool in_r1 = false;       ///< whether the intermediate actually lies in R1
};

[[nodiscard]] CompositeResult composite_map(const ModelParams& p, double mu, int n,
                                            const PlanarPoint& z,
                                            const RegionSpec& regions = RegionSpec{});

/// d F^{n+N}_mu at z: [[0, sigma^n], [-lambda^n, 2 sigma^n (sigma^n y - 1)]].
[[nodiscard]] Eigen::Matrix2d composite_jacobian(const ModelParams& p, int n,
                                                 const PlanarPoint& z);

struct ClosedFormSink {
    PlanarPoint point; ///< (1, sigma^{-n})
    double mu_n = 0.0; ///< lambda^n + sigma^{-n}
    int n = 0;
};

[[nodiscard]] ClosedFormSink closed_form_sink(const ModelParams& p, int n);

/// Tracks a point through R0 (linear) and R1 (quadratic return); leaving
/// R0 u R1 is a terminal "escaped" outcome, not an error.
[[nodiscard]] OrbitSegment simulate_orbit(const ModelParams& p, double mu, PlanarPoint z0,
                                          int max_steps, const RegionSpec& regions = RegionSpec{});

/// Newton iteration for a fixed point of the n-return composite map.
struct NewtonResult {
    PlanarPoint point;
    double residual = 0.0; ///< |F^{n+N}(z) - z| at the final iterate
    int iterations = 0;
    bool converged = false;
};

[[nodiscard]] NewtonResult refine_fixed_point(const ModelParams& p, double mu, int n,
                                              PlanarPoint guess, double tol = 1e-13,
                                              int max_iter = 60);

/// Newton refinement targeting the attracting fixed point of the n-return
/// map. The return map has a sink/source pair on the line x = sigma^n y with
/// sigma^n y solving u^2 - (2 + lambda^n + sigma^{-n}) u + (1 + mu) = 0; when
/// the seed's Newton basin yields the repelling root, the attracting partner
/// is recovered exactly from the Vieta product and re-polished.
struct SinkRefinement {
    NewtonResult newton;    ///< converged result at the attracting fixed point
    bool deflated = false;  ///< raw Newton landed on the repelling partner
    PlanarPoint raw_newton; ///< where the undeflated iteration converged
};

[[nodiscard]] SinkRefinement refine_sink(const ModelParams& p, double mu, int n, PlanarPoint seed,
                                         double tol = 1e-13, int max_iter = 60);

} // namespace tanglab
