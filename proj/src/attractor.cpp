#include "tanglab/attractor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace tanglab {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double wrap_coordinate(double v, double period) {
    if (period <= 0.0) return v;
    v = std::fmod(v, period);
    if (v < 0.0) v += period;
    return v;
}

} // namespace

void UserMap::validate() const {
    if (dimension < 1) {
        throw shape_error("UserMap: dimension must be >= 1");
    }
    if (!step) {
        throw validation_error("UserMap: missing step evaluator");
    }
    if (box_min.size() != dimension || box_max.size() != dimension || wrap.size() != dimension) {
        throw shape_error("UserMap: box/wrap sizes must match the dimension");
    }
    for (int i = 0; i < dimension; ++i) {
        if (!(box_min(i) < box_max(i))) {
            throw validation_error("UserMap: empty domain box");
        }
    }
}

double UserMap::wrapped_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
    double sq = 0.0;
    for (int i = 0; i < dimension; ++i) {
        double d = std::abs(a(i) - b(i));
        if (wrap(i) > 0.0) d = std::min(d, wrap(i) - d);
        sq += d * d;
    }
    return std::sqrt(sq);
}

Eigen::VectorXd UserMap::normalize(Eigen::VectorXd v) const {
    for (int i = 0; i < dimension; ++i) v(i) = wrap_coordinate(v(i), wrap(i));
    return v;
}

UserMap circle_semistable_map() {
    UserMap m;
    m.name = "circle-semistable";
    m.dimension = 1;
    m.box_min = Eigen::VectorXd::Constant(1, 0.0);
    m.box_max = Eigen::VectorXd::Constant(1, kTwoPi);
    m.wrap = Eigen::VectorXd::Constant(1, kTwoPi);
    m.step = [](Eigen::VectorXd& v) {
        v(0) = wrap_coordinate(v(0) + 0.1 * (1.0 - std::cos(v(0))), kTwoPi);
        return true;
    };
    return m;
}

UserMap contraction_map_2d() {
    UserMap m;
    m.name = "contraction2d";
    m.dimension = 2;
    m.box_min = Eigen::Vector2d(-1.0, -1.0);
    m.box_max = Eigen::Vector2d(1.0, 1.0);
    m.wrap = Eigen::Vector2d(0.0, 0.0);
    m.step = [](Eigen::VectorXd& v) {
        v *= 0.5;
        return true;
    };
    return m;
}

UserMap model_user_map(const ModelParams& p, double mu, const RegionSpec& regions,
                       Eigen::Vector2d box_min, Eigen::Vector2d box_max) {
    UserMap m;
    m.name = "model";
    m.dimension = 2;
    m.box_min = box_min;
    m.box_max = box_max;
    m.wrap = Eigen::Vector2d(0.0, 0.0);
    m.step = [p, mu, regions](Eigen::VectorXd& v) {
        const PlanarPoint z{v(0), v(1)};
        if (regions.in_r1(z)) {
            const PlanarPoint w = transition_map(p, mu, z);
            v(0) = w.x;
            v(1) = w.y;
            return true;
        }
        if (regions.in_r0(z)) {
            const PlanarPoint w = local_map(p, z);
            v(0) = w.x;
            v(1) = w.y;
            return true;
        }
        return false;
    };
    return m;
}

AttractorEstimate estimate_milnor(const UserMap& map, int samples, int transient, int tail,
                                  double epsilon, std::uint64_t seed) {
    map.validate();
    if (samples < 1 || transient < 0 || tail < 1 || !(epsilon > 0.0)) {
        throw validation_error("estimate_milnor: need samples >= 1, transient >= 0, tail >= 1, "
                               "epsilon > 0");
    }
    AttractorEstimate est;
    est.dimension = map.dimension;
    est.samples = samples;
    est.transient = transient;
    est.tail = tail;
    est.epsilon = epsilon;
    est.seed = seed;

    std::mt19937_64 rng(seed);
    std::vector<Eigen::VectorXd> cloud;
    cloud.reserve(static_cast<std::size_t>(samples) * static_cast<std::size_t>(tail));

    for (int s = 0; s < samples; ++s) {
        Eigen::VectorXd z(map.dimension);
        for (int i = 0; i < map.dimension; ++i) {
            z(i) = map.box_min(i) + uniform01(rng) * (map.box_max(i) - map.box_min(i));
        }
        z = map.normalize(z);
        bool escaped = false;
        for (int k = 0; k < transient; ++k) {
            if (!map.step(z)) {
                escaped = true;
                break;
            }
        }
        std::vector<Eigen::VectorXd> orbit_tail;
        if (!escaped) {
            orbit_tail.reserve(static_cast<std::size_t>(tail));
            for (int k = 0; k < tail; ++k) {
                if (!map.step(z)) {
                    escaped = true;
                    break;
                }
                orbit_tail.push_back(map.normalize(z));
            }
        }
        if (escaped) {
            ++est.escaped_samples;
        } else {
            cloud.insert(cloud.end(), orbit_tail.begin(), orbit_tail.end());
        }
    }
    if (cloud.empty()) {
        throw numerical_error("estimate_milnor: every sampled orbit escaped the domain box");
    }
    est.escape_warning = 2 * est.escaped_samples > static_cast<std::size_t>(samples);

    std::sort(cloud.begin(), cloud.end(), [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
        for (int i = 0; i < a.size(); ++i) {
            if (a(i) != b(i)) return a(i) < b(i);
        }
        return false;
    });
    est.points = cloud;

    for (const auto& point : est.points) {
        bool assigned = false;
        for (auto& cluster : est.clusters) {
            const double d = map.wrapped_distance(point, cluster.center);
            if (d <= epsilon) {
                ++cluster.count;
                cluster.radius = std::max(cluster.radius, d);
                assigned = true;
                break;
            }
        }
        if (!assigned) {
            est.clusters.push_back(Cluster{point, 0.0, 1, 0.0});
        }
    }
    const double total = static_cast<double>(est.points.size());
    for (auto& cluster : est.clusters) {
        cluster.weight = static_cast<double>(cluster.count) / total;
    }
    return est;
}

namespace {

/// Distance from z to the estimate's point cloud, with cluster bounds to skip
/// the exact scan when the answer is clear.
double cloud_distance(const UserMap& map, const AttractorEstimate& est, const Eigen::VectorXd& z,
                      double eps_out, bool& exceeds) {
    double lower = std::numeric_limits<double>::infinity();
    double upper = std::numeric_limits<double>::infinity();
    for (const auto& cluster : est.clusters) {
        const double d = map.wrapped_distance(z, cluster.center);
        lower = std::min(lower, std::max(0.0, d - cluster.radius));
        upper = std::min(upper, d + cluster.radius);
    }
    if (lower > eps_out) {
        exceeds = true;
        return lower;
    }
    if (upper <= eps_out) {
        exceeds = false;
        return upper;
    }
    double exact = std::numeric_limits<double>::infinity();
    for (const auto& point : est.points) {
        exact = std::min(exact, map.wrapped_distance(z, point));
    }
    exceeds = exact > eps_out;
    return exact;
}

} // namespace

StabilityProbe probe_stability(const UserMap& map, const AttractorEstimate& estimate,
                               double eps_out, double delta_in, int probes, int horizon,
                               std::uint64_t seed) {
    map.validate();
    if (!(delta_in > 0.0) || !(delta_in < eps_out)) {
        throw validation_error("probe_stability: need 0 < delta_in < eps_out");
    }
    if (probes < 1 || horizon < 1) {
        throw validation_error("probe_stability: need probes >= 1 and horizon >= 1");
    }
    if (estimate.clusters.empty()) {
        throw validation_error("probe_stability: estimate has no clusters");
    }
    StabilityProbe probe;
    probe.eps_out = eps_out;
    probe.delta_in = delta_in;
    probe.probes = probes;
    probe.horizon = horizon;
    probe.seed = seed;

    std::mt19937_64 rng(seed);
    // Per-coordinate range scaled so the start stays within delta_in of the
    // cluster center in the euclidean metric.
    const double coord_range = delta_in / std::sqrt(static_cast<double>(map.dimension));
    for (int i = 0; i < probes; ++i) {
        const Cluster& cluster = estimate.clusters[static_cast<std::size_t>(i) %
                                                   estimate.clusters.size()];
        Eigen::VectorXd z = cluster.center;
        for (int d = 0; d < map.dimension; ++d) {
            z(d) += coord_range * (2.0 * uniform01(rng) - 1.0);
        }
        z = map.normalize(z);
        const Eigen::VectorXd start = z;
        for (int step = 1; step <= horizon; ++step) {
            if (!map.step(z)) {
                probe.escapes.push_back(EscapeRecord{start, step});
                break;
            }
            z = map.normalize(z);
            bool exceeds = false;
            cloud_distance(map, estimate, z, eps_out, exceeds);
            if (exceeds) {
                probe.escapes.push_back(EscapeRecord{start, step});
                break;
            }
        }
    }
    probe.verdict =
        probe.escapes.empty() ? ProbeVerdict::no_escape_observed : ProbeVerdict::escape_found;
    return probe;
}

InstabilityCertificate build_certificate(const ModelParams& p, const std::vector<int>& n_list,
                                         double nu, const CertificateOptions& options) {
    if (!p.extremely_dissipative()) {
        throw regime_error("certificate requires the extreme regime lambda*sigma^2 < 1, got " +
                           std::to_string(p.lambda * p.sigma * p.sigma));
    }
    if (n_list.empty()) {
        throw validation_error("certificate: empty n list");
    }
    for (std::size_t i = 0; i < n_list.size(); ++i) {
        require_precision_safe(p, n_list[i]);
        if (i > 0 && n_list[i] <= n_list[i - 1]) {
            throw validation_error("certificate: n list must be strictly increasing");
        }
    }

    InstabilityCertificate cert;
    cert.params = p;
    cert.nu = nu;
    cert.exit_threshold = options.exit_threshold;
    cert.backward_tail_length = options.backward_tail;

    cert.saddle_report = classify({std::complex<double>(p.lambda, 0.0),
                                   std::complex<double>(p.sigma, 0.0)});

    // The sinks s_n at their own mu_n, each re-verified by Newton and spectra.
    bool sinks_ok = true;
    for (const int n : n_list) {
        SinkRecord rec;
        rec.n = n;
        const ClosedFormSink cf = closed_form_sink(p, n);
        rec.mu_n = cf.mu_n;
        const NewtonResult nr = refine_fixed_point(p, cf.mu_n, n, cf.point);
        rec.point = nr.point;
        rec.newton_residual = nr.residual;
        rec.y_distance = std::abs(nr.point.y);
        rec.saddle_distance = std::hypot(nr.point.x, nr.point.y);
        const SpectrumReport sr = classify_orbit({composite_jacobian(p, n, nr.point)});
        rec.eigenvalues = sr.eigenvalues;
        double max_modulus = 0.0;
        for (const auto& e : sr.eigenvalues) max_modulus = std::max(max_modulus, std::abs(e));
        rec.attracting = nr.converged && max_modulus < 1.0;
        sinks_ok = sinks_ok && rec.attracting;
        cert.sinks.push_back(std::move(rec));
    }
    bool decreasing = cert.sinks.size() >= 2;
    for (std::size_t i = 1; i < cert.sinks.size(); ++i) {
        decreasing = decreasing && cert.sinks[i].y_distance < cert.sinks[i - 1].y_distance;
    }
    cert.accumulation_ok = sinks_ok && decreasing;

    cert.capture = capture_verdict(p, n_list.back(), nu, options.trap, options.regions);

    // Wandering exit: the tangency point (1, 0) on W^s(p) is the accumulation
    // point of the sinks; its exact linear images approach the saddle. Read
    // in reverse they form the backward tail; the forward part follows the
    // captured witness (1, mu) until it leaves the accumulation set's
    // neighborhood.
    for (int k = options.backward_tail; k >= 0; --k) {
        cert.wandering_exit.points.push_back({std::pow(p.lambda, k), 0.0});
        cert.wandering_exit.region_tags.push_back(RegionTag::r0);
    }
    const auto exit_distance_to_core = [&](const PlanarPoint& z) {
        double best = std::hypot(z.x, z.y); // saddle at the origin
        for (const auto& rec : cert.sinks) best = std::min(best, z.dist(rec.point));
        return best;
    };
    const OrbitSegment forward = simulate_orbit(p, cert.capture.mu, {1.0, cert.capture.mu},
                                                64 * (n_list.back() + 1), options.regions);
    for (std::size_t i = 0; i < forward.points.size(); ++i) {
        cert.wandering_exit.points.push_back(forward.points[i]);
        cert.wandering_exit.region_tags.push_back(forward.region_tags[i]);
        const double d = exit_distance_to_core(forward.points[i]);
        if (d > options.exit_threshold) {
            cert.exit_step = static_cast<int>(cert.wandering_exit.points.size()) - 1;
            cert.exit_distance = d;
            cert.exit_found = true;
            break;
        }
    }
    cert.wandering_exit.escaped = false;

    cert.complete = cert.accumulation_ok && cert.capture.captured && cert.exit_found &&
                    cert.saddle_report.sectionally_dissipative &&
                    cert.saddle_report.extremely_dissipative;
    return cert;
}

} // namespace tanglab
