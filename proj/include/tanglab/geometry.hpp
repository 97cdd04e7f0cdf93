#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "tanglab/model_family.hpp"
#include "tanglab/renorm.hpp"

namespace tanglab {

/// Which map produced an arc point.
enum class ArcStep : std::uint8_t { seed = 0, linear = 1, transition = 2 };

/// Polyline sample of the saddle's unstable manifold, grown from a
/// fundamental segment on the local unstable axis.
struct ManifoldArc {
    std::vector<PlanarPoint> points;
    std::vector<double> arc_params; ///< cumulative polyline length per point
    std::vector<RegionTag> tags;    ///< current location (escaped points end their branch)
    std::vector<ArcStep> steps;     ///< map that produced the point
    std::vector<int> levels;        ///< forward-iteration depth
    PlanarPoint source_saddle{0.0, 0.0};
    double total_length = 0.0;
    bool escape_exhausted = false; ///< every branch escaped before the target length
};

struct ManifoldOptions {
    double delta0 = 1e-4;         ///< fundamental-segment offset on the unstable axis
    int max_levels = 64;
    int initial_grid = 9;         ///< parameters per level before refinement
    std::size_t max_points = 2'000'000;
    RegionSpec regions{};
};

/// Grows W^u of the origin saddle by iterating the fundamental segment
/// [delta0, sigma*delta0] level by level, inserting parameter midpoints in
/// preimage wherever adjacent images are farther apart than max_gap.
[[nodiscard]] ManifoldArc grow_unstable_manifold(const ModelParams& p, double mu, double length,
                                                 double max_gap,
                                                 const ManifoldOptions& options = {});

/// Trap around a sink in rescaled coordinates.
struct TrapSpec {
    double radius_rescaled = 1e-3;
    int confirmations = 10; ///< return steps that must remain inside the trap
};

/// A Newton-refined sink of the n-return map together with a certified
/// contraction bound for its trap ball.
struct SinkContext {
    ModelParams params;
    double mu = 0.0;
    int n = 1;
    PlanarPoint sink;
    RescaledPoint sink_rescaled;
    TrapSpec trap;
    double contraction_bound = 0.0; ///< adapted-norm bound over the trap, < 1
    RegionSpec regions{};
};

/// Refines the sink from the closed-form seed, verifies it is attracting, and
/// certifies that the trap ball lies in a contraction region. The adapted
/// norm scales Y by (lambda*sigma)^{-n/2}; the return-map Jacobian is affine
/// in Y, so the bound is exact at the trap's Y extremes.
[[nodiscard]] SinkContext make_sink_context(const ModelParams& p, double mu, int n,
                                            const TrapSpec& trap = {},
                                            const RegionSpec& regions = {});

struct AttractionResult {
    bool attracted = false;
    bool escaped = false;
    int steps_used = 0;
    int returns_used = 0;
    std::vector<double> confirmation_distances; ///< rescaled, one per confirmation return
    PlanarPoint final_point;
};

/// Simulates the piecewise dynamics until the orbit enters the trap ball,
/// escapes, or exhausts its budget; then confirms by return-map iteration.
[[nodiscard]] AttractionResult test_attraction(const SinkContext& ctx, PlanarPoint z0,
                                               int max_returns = 500, int max_steps = 100'000);

enum class CellTag : std::uint8_t { attracted = 0, escaped = 1, undecided = 2 };

struct BasinGridConfig {
    double x_min = 0.0, x_max = 1.0;
    double y_min = 0.0, y_max = 1.0;
    int nx = 21, ny = 21;
    int max_returns = 500;
    int max_steps = 100'000;
};

struct BasinGrid {
    BasinGridConfig config;
    PlanarPoint target_sink;
    double trap_radius_rescaled = 0.0;
    std::vector<CellTag> membership; ///< row-major, index iy * nx + ix

    [[nodiscard]] PlanarPoint cell_center(int ix, int iy) const;
    [[nodiscard]] std::optional<CellTag> lookup(const PlanarPoint& z) const;
    [[nodiscard]] std::size_t count(CellTag tag) const;
};

/// Unscaled box h_n^{-1}([-delta, delta]^2) around the frame's sink.
[[nodiscard]] BasinGridConfig default_basin_bounds(const RenormFrame2D& frame, double delta,
                                                   int nx = 21, int ny = 21);

[[nodiscard]] BasinGrid estimate_basin(const SinkContext& ctx, const BasinGridConfig& config);

enum class CaptureRegime : std::uint8_t { extreme = 0, boundary = 1, non_extreme = 2 };

[[nodiscard]] std::string to_string(CaptureRegime regime);

/// Outcome of the capture computation H_n(1, mu) = (0, nu + (lambda sigma^2)^n).
struct CaptureVerdict {
    CaptureRegime regime = CaptureRegime::extreme;
    int n = 1;
    double nu = 0.0;
    double mu = 0.0;
    double predicted_offset = 0.0; ///< (lambda * sigma^2)^n
    RescaledPoint rescaled_entry;  ///< (0, nu + predicted_offset)
    bool captured = false;
    PlanarPoint sink;
    double final_distance = 0.0; ///< unscaled distance to the sink after confirmation
    int returns_used = 0;
    OrbitSegment witness_orbit;
};

[[nodiscard]] CaptureVerdict capture_verdict(const ModelParams& p, int n, double nu,
                                             const TrapSpec& trap = {},
                                             const RegionSpec& regions = {},
                                             double nu_limit = 0.1);

/// First arc point lying in an attracted cell whose own forward orbit also
/// passes the attraction test.
[[nodiscard]] std::pair<bool, std::optional<PlanarPoint>> manifold_meets_basin(
    const ManifoldArc& arc, const BasinGrid& basin, const SinkContext& ctx);

} // namespace tanglab
