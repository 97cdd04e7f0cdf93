#include "tanglab/model_family.hpp"

#include <cmath>

namespace tanglab {

ModelParams::ModelParams(double lambda_, double sigma_) : lambda(lambda_), sigma(sigma_) {
    if (!(lambda > 0.0 && lambda < 1.0)) {
        throw validation_error("lambda must lie in (0, 1), got " + std::to_string(lambda));
    }
    if (!(sigma > 1.0)) {
        throw validation_error("sigma must exceed 1, got " + std::to_string(sigma));
    }
    if (!(lambda * sigma < 1.0)) {
        throw validation_error("lambda*sigma must be < 1 (dissipative saddle), got " +
                               std::to_string(lambda * sigma));
    }
}

ModelParams ModelParams::unchecked(double lambda_, double sigma_) {
    ModelParams p;
    p.lambda = lambda_;
    p.sigma = sigma_;
    return p;
}

bool PlanarPoint::finite() const { return std::isfinite(x) && std::isfinite(y); }

double PlanarPoint::dist(const PlanarPoint& o) const { return std::hypot(x - o.x, y - o.y); }

RegionSpec::RegionSpec(double r0_hw, PlanarPoint center, double hx, double hy)
    : r0_half_width(r0_hw), r1_center(center), r1_half_x(hx), r1_half_y(hy) {
    validate();
}

bool RegionSpec::in_r0(const PlanarPoint& z) const {
    return std::abs(z.x) <= r0_half_width && std::abs(z.y) <= r0_half_width;
}

bool RegionSpec::in_r1(const PlanarPoint& z) const {
    return std::abs(z.x - r1_center.x) <= r1_half_x && std::abs(z.y - r1_center.y) <= r1_half_y;
}

void RegionSpec::validate() const {
    if (!(r0_half_width > 0.0) || !(r1_half_x > 0.0) || !(r1_half_y > 0.0)) {
        throw validation_error("region extents must be positive");
    }
    // R1 sits in the upper part of R0 and stays clear of the saddle at the origin.
    if (std::abs(r1_center.x) + r1_half_x > r0_half_width ||
        r1_center.y + r1_half_y > r0_half_width || r1_center.y - r1_half_y <= 0.0) {
        throw validation_error("R1 must lie inside the upper half of R0, excluding the origin");
    }
}

std::string to_string(RegionTag tag) {
    switch (tag) {
        case RegionTag::r0: return "R0";
        case RegionTag::r1_transition: return "R1_transition";
        case RegionTag::escaped: return "escaped";
    }
    return "unknown";
}

bool precision_safe(const ModelParams& p, int n) {
    return n >= 1 && std::pow(p.sigma, 2.0 * n) <= kPrecisionSafeLimit;
}

void require_admissible_mu(double mu) {
    if (!(std::abs(mu) <= kMuAdmissible)) {
        throw validation_error("mu outside the admissible range |mu| <= " +
                               std::to_string(kMuAdmissible));
    }
}

void require_precision_safe(const ModelParams& p, int n) {
    if (n < 1) {
        throw validation_error("n must be >= 1, got " + std::to_string(n));
    }
    if (!precision_safe(p, n)) {
        throw precision_error("sigma^(2n) exceeds the safe dynamic range " +
                              std::to_string(kPrecisionSafeLimit) + " for n = " +
                              std::to_string(n));
    }
}

PlanarPoint local_map(const ModelParams& p, const PlanarPoint& z) {
    return {p.lambda * z.x, p.sigma * z.y};
}

PlanarPoint local_map_checked(const ModelParams& p, const PlanarPoint& z,
                              const RegionSpec& regions) {
    if (!regions.in_r0(z)) {
        throw validation_error("local_map: point outside R0");
    }
    return local_map(p, z);
}

PlanarPoint transition_map(const ModelParams& /*p*/, double mu, const PlanarPoint& z) {
    const double dy = z.y - 1.0;
    return {z.y, mu - z.x + dy * dy};
}

PlanarPoint transition_map_checked(const ModelParams& p, double mu, const PlanarPoint& z,
                                   const RegionSpec& regions) {
    if (!regions.in_r1(z)) {
        throw validation_error("transition_map: point outside R1");
    }
    return transition_map(p, mu, z);
}

CompositeResult composite_map(const ModelParams& p, double mu, int n, const PlanarPoint& z,
                              const RegionSpec& regions) {
    require_precision_safe(p, n);
    const double ln = std::pow(p.lambda, n);
    const double sn = std::pow(p.sigma, n);
    CompositeResult r;
    r.intermediate = {ln * z.x, sn * z.y};
    r.in_r1 = regions.in_r1(r.intermediate);
    const double dy = sn * z.y - 1.0;
    r.image = {sn * z.y, mu - ln * z.x + dy * dy};
    return r;
}

Eigen::Matrix2d composite_jacobian(const ModelParams& p, int n, const PlanarPoint& z) {
    require_precision_safe(p, n);
    const double ln = std::pow(p.lambda, n);
    const double sn = std::pow(p.sigma, n);
    Eigen::Matrix2d j;
    j << 0.0, sn,
        -ln, 2.0 * sn * (sn * z.y - 1.0);
    return j;
}

ClosedFormSink closed_form_sink(const ModelParams& p, int n) {
    require_precision_safe(p, n);
    ClosedFormSink s;
    s.n = n;
    const double sinv = std::pow(p.sigma, -n);
    s.point = {1.0, sinv};
    s.mu_n = std::pow(p.lambda, n) + sinv;
    return s;
}

OrbitSegment simulate_orbit(const ModelParams& p, double mu, PlanarPoint z0, int max_steps,
                            const RegionSpec& regions) {
    require_admissible_mu(mu);
    OrbitSegment seg;
    seg.points.reserve(static_cast<std::size_t>(max_steps) + 1);
    seg.region_tags.reserve(static_cast<std::size_t>(max_steps) + 1);

    PlanarPoint z = z0;
    for (int step = 0; step <= max_steps; ++step) {
        const bool in1 = regions.in_r1(z);
        const bool in0 = regions.in_r0(z);
        if (!z.finite() || (!in0 && !in1)) {
            seg.points.push_back(z);
            seg.region_tags.push_back(RegionTag::escaped);
            seg.escaped = true;
            return seg;
        }
        seg.points.push_back(z);
        seg.region_tags.push_back(in1 ? RegionTag::r1_transition : RegionTag::r0);
        if (step == max_steps) break;
        z = in1 ? transition_map(p, mu, z) : local_map(p, z);
    }
    return seg;
}

NewtonResult refine_fixed_point(const ModelParams& p, double mu, int n, PlanarPoint guess,
                                double tol, int max_iter) {
    require_precision_safe(p, n);
    NewtonResult res;
    res.point = guess;
    for (int it = 0; it < max_iter; ++it) {
        const CompositeResult f = composite_map(p, mu, n, res.point);
        const Eigen::Vector2d g(f.image.x - res.point.x, f.image.y - res.point.y);
        res.residual = g.norm();
        res.iterations = it;
        if (res.residual < tol) {
            res.converged = true;
            return res;
        }
        Eigen::Matrix2d j = composite_jacobian(p, n, res.point);
        j -= Eigen::Matrix2d::Identity();
        const Eigen::Vector2d delta = j.partialPivLu().solve(g);
        res.point.x -= delta.x();
        res.point.y -= delta.y();
        if (!res.point.finite()) {
            throw numerical_error("Newton iteration diverged to non-finite coordinates");
        }
    }
    const CompositeResult f = composite_map(p, mu, n, res.point);
    res.residual = PlanarPoint{f.image.x, f.image.y}.dist(res.point);
    res.converged = res.residual < tol;
    return res;
}

namespace {

bool is_attracting(const ModelParams& p, int n, const PlanarPoint& z) {
    const Eigen::Matrix2d j = composite_jacobian(p, n, z);
    return Eigen::EigenSolver<Eigen::Matrix2d>(j, false).eigenvalues().cwiseAbs().maxCoeff() < 1.0;
}

} // namespace

SinkRefinement refine_sink(const ModelParams& p, double mu, int n, PlanarPoint seed, double tol,
                           int max_iter) {
    SinkRefinement out;
    out.newton = refine_fixed_point(p, mu, n, seed, tol, max_iter);
    if (!out.newton.converged) {
        throw numerical_error("refine_sink: Newton did not converge from the given seed");
    }
    out.raw_newton = out.newton.point;
    if (is_attracting(p, n, out.raw_newton)) {
        return out;
    }
    // Vieta deflation: the two fixed points have sigma^n y products 1 + mu.
    const double u_found = std::pow(p.sigma, n) * out.raw_newton.y;
    if (u_found == 0.0) {
        throw numerical_error("refine_sink: degenerate fixed point, cannot deflate");
    }
    const double u_other = (1.0 + mu) / u_found;
    const PlanarPoint partner{u_other, u_other * std::pow(p.sigma, -n)};
    out.newton = refine_fixed_point(p, mu, n, partner, tol, max_iter);
    out.deflated = true;
    if (!out.newton.converged || !is_attracting(p, n, out.newton.point)) {
        throw numerical_error("refine_sink: no attracting fixed point found at mu = " +
                              std::to_string(mu));
    }
    return out;
}

} // namespace tanglab
