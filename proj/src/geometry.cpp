#include "tanglab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tanglab/spectra.hpp"

namespace tanglab {

namespace {

// Minimal parameter spacing before a gap is declared an unresolvable break
// (the piecewise model is genuinely discontinuous across the R1 boundary).
constexpr double kParamEps = 1e-13;

struct LevelPoint {
    double t = 0.0;
    PlanarPoint point;
    RegionTag tag = RegionTag::r0;
    ArcStep step = ArcStep::seed;

    [[nodiscard]] bool alive() const { return tag != RegionTag::escaped; }
};

RegionTag location_tag(const RegionSpec& regions, const PlanarPoint& z) {
    if (regions.in_r1(z)) return RegionTag::r1_transition;
    if (regions.in_r0(z)) return RegionTag::r0;
    return RegionTag::escaped;
}

PlanarPoint seed_point(const ModelParams& p, double delta0, double t) {
    return {0.0, delta0 * std::pow(p.sigma, t)};
}

/// Iterates seed(t) through `level` piecewise steps. Returns the resulting
/// point when the full depth is reached, nothing when the orbit left the
/// domain at an earlier level.
std::optional<LevelPoint> eval_at_level(const ModelParams& p, double mu,
                                        const ManifoldOptions& opt, double t, int level) {
    LevelPoint lp;
    lp.t = t;
    PlanarPoint z = seed_point(p, opt.delta0, t);
    ArcStep last = ArcStep::seed;
    for (int k = 0; k < level; ++k) {
        const RegionTag here = location_tag(opt.regions, z);
        if (here == RegionTag::escaped) return std::nullopt;
        if (here == RegionTag::r1_transition) {
            z = transition_map(p, mu, z);
            last = ArcStep::transition;
        } else {
            z = local_map(p, z);
            last = ArcStep::linear;
        }
    }
    lp.point = z;
    lp.tag = location_tag(opt.regions, z);
    lp.step = last;
    return lp;
}

} // namespace

ManifoldArc grow_unstable_manifold(const ModelParams& p, double mu, double length, double max_gap,
                                   const ManifoldOptions& options) {
    require_admissible_mu(mu);
    if (!(length > 0.0) || !(max_gap > 0.0)) {
        throw validation_error("manifold growth needs positive length and max_gap");
    }
    if (options.initial_grid < 2 || !(options.delta0 > 0.0)) {
        throw validation_error("manifold options: initial_grid >= 2 and delta0 > 0 required");
    }

    ManifoldArc arc;
    arc.source_saddle = {0.0, 0.0};

    // Current level's surviving parameters and their images.
    std::vector<LevelPoint> current;
    for (int i = 0; i < options.initial_grid; ++i) {
        const double t = static_cast<double>(i) / (options.initial_grid - 1);
        LevelPoint lp;
        lp.t = t;
        lp.point = seed_point(p, options.delta0, t);
        lp.tag = location_tag(options.regions, lp.point);
        lp.step = ArcStep::seed;
        current.push_back(lp);
    }

    const auto emit = [&](const LevelPoint& lp, int level) -> bool {
        if (!arc.points.empty()) {
            const PlanarPoint& prev = arc.points.back();
            if (prev.x == lp.point.x && prev.y == lp.point.y) return false; // level-boundary dup
            const bool prev_alive = arc.tags.back() != RegionTag::escaped;
            const double d = prev.dist(lp.point);
            // Jumps beyond the gap budget are branch breaks, not arc segments.
            if (prev_alive && d <= 2.0 * max_gap) arc.total_length += d;
        }
        arc.points.push_back(lp.point);
        arc.arc_params.push_back(arc.total_length);
        arc.tags.push_back(lp.tag);
        arc.steps.push_back(lp.step);
        arc.levels.push_back(level);
        return arc.total_length >= length;
    };

    for (int level = 0; level <= options.max_levels; ++level) {
        if (level > 0) {
            // Advance survivors by one piecewise step.
            std::vector<LevelPoint> next;
            next.reserve(current.size());
            for (const auto& lp : current) {
                if (!lp.alive()) continue;
                LevelPoint np;
                np.t = lp.t;
                if (lp.tag == RegionTag::r1_transition) {
                    np.point = transition_map(p, mu, lp.point);
                    np.step = ArcStep::transition;
                } else {
                    np.point = local_map(p, lp.point);
                    np.step = ArcStep::linear;
                }
                np.tag = location_tag(options.regions, np.point);
                next.push_back(np);
            }
            current = std::move(next);
            if (current.empty()) {
                arc.escape_exhausted = arc.total_length < length;
                return arc;
            }

            // Preimage refinement: bisect fundamental-segment parameters until
            // adjacent images at this level are within max_gap.
            bool inserted = true;
            while (inserted && arc.points.size() + current.size() < options.max_points) {
                inserted = false;
                std::vector<LevelPoint> refined;
                refined.reserve(current.size() * 2);
                for (std::size_t i = 0; i < current.size(); ++i) {
                    if (i > 0) {
                        const LevelPoint& a = current[i - 1];
                        const LevelPoint& b = current[i];
                        if (b.t - a.t > kParamEps &&
                            a.point.dist(b.point) > max_gap) {
                            const double tm = 0.5 * (a.t + b.t);
                            if (auto mid = eval_at_level(p, mu, options, tm, level)) {
                                refined.push_back(*mid);
                                inserted = true;
                            }
                        }
                    }
                    refined.push_back(current[i]);
                }
                current = std::move(refined);
            }
        }

        for (const auto& lp : current) {
            if (emit(lp, level)) return arc;
        }
    }
    arc.escape_exhausted = arc.total_length < length;
    return arc;
}

SinkContext make_sink_context(const ModelParams& p, double mu, int n, const TrapSpec& trap,
                              const RegionSpec& regions) {
    require_precision_safe(p, n);
    if (!(trap.radius_rescaled > 0.0) || trap.confirmations < 1) {
        throw validation_error("trap needs a positive radius and at least one confirmation");
    }
    SinkContext ctx;
    ctx.params = p;
    ctx.mu = mu;
    ctx.n = n;
    ctx.trap = trap;
    ctx.regions = regions;

    const SinkRefinement refinement = refine_sink(p, mu, n, closed_form_sink(p, n).point);
    ctx.sink = refinement.newton.point;

    const SpectrumReport report = classify_orbit({composite_jacobian(p, n, ctx.sink)});
    double max_modulus = 0.0;
    for (const auto& e : report.eigenvalues) max_modulus = std::max(max_modulus, std::abs(e));
    if (!(max_modulus < 1.0)) {
        throw validation_error("refined point is not attracting at this mu");
    }

    const RenormFrame2D frame(p, n);
    ctx.sink_rescaled = h_n(frame, ctx.sink);

    // Adapted norm: scale Y by d^{-1/2}, d = (lambda sigma)^n. The rescaled
    // return map has Jacobian [[0, 1], [-d, 2Y]], affine in Y, so the norm
    // bound over the trap is attained at the Y extremes.
    const double d = frame.coupling();
    const double sq = std::sqrt(d);
    const auto adapted_norm = [&](double y_val) {
        Eigen::Matrix2d t;
        t << 0.0, sq, -sq, 2.0 * y_val;
        return spectral_norm(t);
    };
    const double lo = adapted_norm(ctx.sink_rescaled.Y - trap.radius_rescaled);
    const double hi = adapted_norm(ctx.sink_rescaled.Y + trap.radius_rescaled);
    ctx.contraction_bound = std::max(lo, hi);
    if (!(ctx.contraction_bound < 1.0)) {
        throw validation_error("trap_radius is not inside a certified contraction ball (bound " +
                               std::to_string(ctx.contraction_bound) + " >= 1)");
    }
    return ctx;
}

namespace {

double rescaled_distance(const RenormFrame2D& frame, const SinkContext& ctx,
                         const PlanarPoint& z) {
    const RescaledPoint w = h_n(frame, z);
    return std::hypot(w.X - ctx.sink_rescaled.X, w.Y - ctx.sink_rescaled.Y);
}

} // namespace

AttractionResult test_attraction(const SinkContext& ctx, PlanarPoint z0, int max_returns,
                                 int max_steps) {
    AttractionResult out;
    const RenormFrame2D frame(ctx.params, ctx.n);
    PlanarPoint z = z0;
    for (; out.steps_used < max_steps; ++out.steps_used) {
        const RegionTag here = location_tag(ctx.regions, z);
        if (here == RegionTag::escaped || !z.finite()) {
            out.escaped = true;
            out.final_point = z;
            return out;
        }
        if (rescaled_distance(frame, ctx, z) <= ctx.trap.radius_rescaled) {
            // Confirmation: certified trap, so return-map iterates must stay
            // inside with non-increasing distance at every second return.
            bool confirmed = true;
            for (int c = 0; c < ctx.trap.confirmations; ++c) {
                z = composite_map(ctx.params, ctx.mu, ctx.n, z, ctx.regions).image;
                ++out.returns_used;
                const double dist = rescaled_distance(frame, ctx, z);
                out.confirmation_distances.push_back(dist);
                if (dist > ctx.trap.radius_rescaled) {
                    confirmed = false;
                    break;
                }
                if (c >= 2) {
                    const double two_back =
                        out.confirmation_distances[static_cast<std::size_t>(c) - 2];
                    if (dist > two_back && dist > 1e-14) {
                        confirmed = false;
                        break;
                    }
                }
            }
            out.attracted = confirmed;
            out.final_point = z;
            return out;
        }
        if (here == RegionTag::r1_transition) {
            if (out.returns_used >= max_returns) break;
            z = transition_map(ctx.params, ctx.mu, z);
            ++out.returns_used;
        } else {
            z = local_map(ctx.params, z);
        }
    }
    out.final_point = z;
    return out; // budget exhausted: undecided
}

PlanarPoint BasinGrid::cell_center(int ix, int iy) const {
    const double fx = (static_cast<double>(ix) + 0.5) / config.nx;
    const double fy = (static_cast<double>(iy) + 0.5) / config.ny;
    return {config.x_min + fx * (config.x_max - config.x_min),
            config.y_min + fy * (config.y_max - config.y_min)};
}

std::optional<CellTag> BasinGrid::lookup(const PlanarPoint& z) const {
    if (z.x < config.x_min || z.x > config.x_max || z.y < config.y_min || z.y > config.y_max) {
        return std::nullopt;
    }
    const double fx = (z.x - config.x_min) / (config.x_max - config.x_min);
    const double fy = (z.y - config.y_min) / (config.y_max - config.y_min);
    const int ix = std::min(config.nx - 1, static_cast<int>(fx * config.nx));
    const int iy = std::min(config.ny - 1, static_cast<int>(fy * config.ny));
    return membership[static_cast<std::size_t>(iy) * static_cast<std::size_t>(config.nx) +
                      static_cast<std::size_t>(ix)];
}

std::size_t BasinGrid::count(CellTag tag) const {
    return static_cast<std::size_t>(std::count(membership.begin(), membership.end(), tag));
}

BasinGridConfig default_basin_bounds(const RenormFrame2D& frame, double delta, int nx, int ny) {
    if (!(delta > 0.0)) {
        throw validation_error("basin bounds need delta > 0");
    }
    const PlanarPoint lo = h_n_inverse(frame, {-delta, -delta});
    const PlanarPoint hi = h_n_inverse(frame, {delta, delta});
    BasinGridConfig cfg;
    cfg.x_min = lo.x;
    cfg.x_max = hi.x;
    cfg.y_min = lo.y;
    cfg.y_max = hi.y;
    cfg.nx = nx;
    cfg.ny = ny;
    return cfg;
}

BasinGrid estimate_basin(const SinkContext& ctx, const BasinGridConfig& config) {
    if (config.nx < 1 || config.ny < 1 || !(config.x_min < config.x_max) ||
        !(config.y_min < config.y_max)) {
        throw validation_error("basin grid config: need positive resolution and ordered bounds");
    }
    BasinGrid grid;
    grid.config = config;
    grid.target_sink = ctx.sink;
    grid.trap_radius_rescaled = ctx.trap.radius_rescaled;
    grid.membership.resize(static_cast<std::size_t>(config.nx) *
                           static_cast<std::size_t>(config.ny));
    for (int iy = 0; iy < config.ny; ++iy) {
        for (int ix = 0; ix < config.nx; ++ix) {
            const AttractionResult r =
                test_attraction(ctx, grid.cell_center(ix, iy), config.max_returns,
                                config.max_steps);
            CellTag tag = CellTag::undecided;
            if (r.attracted) tag = CellTag::attracted;
            else if (r.escaped) tag = CellTag::escaped;
            grid.membership[static_cast<std::size_t>(iy) * static_cast<std::size_t>(config.nx) +
                            static_cast<std::size_t>(ix)] = tag;
        }
    }
    return grid;
}

std::string to_string(CaptureRegime regime) {
    switch (regime) {
        case CaptureRegime::extreme: return "extreme";
        case CaptureRegime::boundary: return "boundary";
        case CaptureRegime::non_extreme: return "non_extreme";
    }
    return "unknown";
}

CaptureVerdict capture_verdict(const ModelParams& p, int n, double nu, const TrapSpec& trap,
                               const RegionSpec& regions, double nu_limit) {
    require_precision_safe(p, n);
    if (std::abs(nu) > nu_limit) {
        throw validation_error("capture_verdict: |nu| must be <= " + std::to_string(nu_limit));
    }
    CaptureVerdict v;
    v.n = n;
    v.nu = nu;
    const double ls2 = p.lambda * p.sigma * p.sigma;
    v.regime = ls2 < 1.0 ? CaptureRegime::extreme
                         : (ls2 > 1.0 ? CaptureRegime::non_extreme : CaptureRegime::boundary);
    v.predicted_offset = std::pow(ls2, n);
    v.rescaled_entry = {0.0, nu + v.predicted_offset};

    const RenormFrame2D frame(p, n);
    v.mu = reparam_mu(frame, nu);

    const SinkContext ctx = make_sink_context(p, v.mu, n, trap, regions);
    v.sink = ctx.sink;

    const PlanarPoint start{1.0, v.mu};
    const AttractionResult attraction = test_attraction(ctx, start);
    v.captured = attraction.attracted;
    v.returns_used = attraction.returns_used;
    v.final_distance = attraction.final_point.dist(ctx.sink);
    v.witness_orbit = simulate_orbit(p, v.mu, start, 2000, regions);
    return v;
}

std::pair<bool, std::optional<PlanarPoint>> manifold_meets_basin(const ManifoldArc& arc,
                                                                 const BasinGrid& basin,
                                                                 const SinkContext& ctx) {
    for (std::size_t i = 0; i < arc.points.size(); ++i) {
        if (arc.tags[i] == RegionTag::escaped) continue;
        const auto cell = basin.lookup(arc.points[i]);
        if (!cell || *cell != CellTag::attracted) continue;
        const AttractionResult check =
            test_attraction(ctx, arc.points[i], basin.config.max_returns, basin.config.max_steps);
        if (check.attracted) {
            return {true, arc.points[i]};
        }
    }
    return {false, std::nullopt};
}

} // namespace tanglab
