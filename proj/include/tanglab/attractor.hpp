#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "tanglab/geometry.hpp"
#include "tanglab/model_family.hpp"
#include "tanglab/spectra.hpp"

namespace tanglab {

/// A user-supplied discrete map on a box, with optional circle factors.
/// The step evaluator mutates the state in place and returns false on escape.
struct UserMap {
    std::string name = "user";
    int dimension = 1;
    std::function<bool(Eigen::VectorXd&)> step;
    Eigen::VectorXd box_min;
    Eigen::VectorXd box_max;
    Eigen::VectorXd wrap; ///< per-coordinate period; entries <= 0 mean no wraparound

    void validate() const;
    [[nodiscard]] double wrapped_distance(const Eigen::VectorXd& a,
                                          const Eigen::VectorXd& b) const;
    [[nodiscard]] Eigen::VectorXd normalize(Eigen::VectorXd v) const;
};

/// x -> x + 0.1 (1 - cos x) on the circle of length 2*pi.
[[nodiscard]] UserMap circle_semistable_map();

/// (x, y) -> (x/2, y/2) on [-1, 1]^2.
[[nodiscard]] UserMap contraction_map_2d();

/// The planar tangency family as a user map; leaving R0 u R1 is escape.
[[nodiscard]] UserMap model_user_map(const ModelParams& p, double mu,
                                     const RegionSpec& regions = {},
                                     Eigen::Vector2d box_min = {-2.0, -2.0},
                                     Eigen::Vector2d box_max = {2.0, 2.0});

struct Cluster {
    Eigen::VectorXd center;
    double radius = 0.0;
    std::size_t count = 0;
    double weight = 0.0;
};

/// Point-cloud surrogate for the Milnor attractor: tails of seeded sample
/// orbits, covered by greedy epsilon balls in lexicographic order.
struct AttractorEstimate {
    int dimension = 1;
    int samples = 0;
    int transient = 0;
    int tail = 0;
    double epsilon = 0.0;
    std::uint64_t seed = 0;
    std::size_t escaped_samples = 0;
    bool escape_warning = false; ///< more than half of the samples escaped
    std::vector<Eigen::VectorXd> points; ///< sorted tail cloud
    std::vector<Cluster> clusters;
};

[[nodiscard]] AttractorEstimate estimate_milnor(const UserMap& map, int samples, int transient,
                                                int tail, double epsilon, std::uint64_t seed);

struct EscapeRecord {
    Eigen::VectorXd start;
    int exit_step = 0;
};

enum class ProbeVerdict : std::uint8_t { no_escape_observed = 0, escape_found = 1 };

struct StabilityProbe {
    double eps_out = 0.0;
    double delta_in = 0.0;
    int probes = 0;
    int horizon = 0;
    std::uint64_t seed = 0;
    std::vector<EscapeRecord> escapes;
    ProbeVerdict verdict = ProbeVerdict::no_escape_observed;
};

/// Launches seeded probes within delta_in of the estimate's cluster centers
/// and reports any orbit whose distance to the estimate cloud exceeds eps_out
/// within the horizon.
[[nodiscard]] StabilityProbe probe_stability(const UserMap& map, const AttractorEstimate& estimate,
                                             double eps_out, double delta_in, int probes,
                                             int horizon, std::uint64_t seed);

struct SinkRecord {
    int n = 0;
    double mu_n = 0.0;
    PlanarPoint point;
    double newton_residual = 0.0;
    double y_distance = 0.0;      ///< distance to the local stable manifold {y = 0}
    double saddle_distance = 0.0; ///< euclidean distance to the saddle
    std::vector<std::complex<double>> eigenvalues;
    bool attracting = false;
};

/// Evidence bundle for the instability mechanism: sinks accumulating to the
/// saddle's stable manifold plus a captured unstable-manifold point, with a
/// wandering orbit segment leaving the neighborhood of the accumulation set.
struct InstabilityCertificate {
    ModelParams params;
    double nu = 0.0;
    PlanarPoint saddle{0.0, 0.0};
    SpectrumReport saddle_report;
    std::vector<SinkRecord> sinks;
    bool accumulation_ok = false;
    CaptureVerdict capture;
    OrbitSegment wandering_exit; ///< backward tail toward the saddle, then the forward exit
    int backward_tail_length = 0;
    int exit_step = -1; ///< index into wandering_exit.points where the exit happens
    double exit_distance = 0.0;
    double exit_threshold = 0.0;
    bool exit_found = false;
    bool complete = false;
};

struct CertificateOptions {
    TrapSpec trap{};
    RegionSpec regions{};
    int backward_tail = 20;
    double exit_threshold = 0.25; ///< distance to {saddle, sinks} counting as "left"
};

[[nodiscard]] InstabilityCertificate build_certificate(const ModelParams& p,
                                                       const std::vector<int>& n_list, double nu,
                                                       const CertificateOptions& options = {});

} // namespace tanglab
