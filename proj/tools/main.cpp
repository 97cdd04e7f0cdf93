#include <CLI11.hpp>

#include <complex>
#include <iostream>
#include <string>
#include <vector>

#include "tanglab/attractor.hpp"
#include "tanglab/geometry.hpp"
#include "tanglab/io.hpp"
#include "tanglab/model_family.hpp"
#include "tanglab/renorm.hpp"
#include "tanglab/serialize.hpp"
#include "tanglab/spectra.hpp"

namespace {

using namespace tanglab;

std::vector<int> parse_n_list(const std::string& text) {
    std::vector<int> out;
    const auto colon = text.find(':');
    if (colon != std::string::npos) {
        const int lo = parse_int(text.substr(0, colon));
        const int hi = parse_int(text.substr(colon + 1));
        if (hi < lo) throw validation_error("n-list range is empty: " + text);
        for (int n = lo; n <= hi; ++n) out.push_back(n);
        return out;
    }
    std::string token;
    for (const char c : text + ",") {
        if (c == ',') {
            if (!token.empty()) out.push_back(parse_int(token));
            token.clear();
        } else {
            token += c;
        }
    }
    if (out.empty()) throw validation_error("empty n-list: " + text);
    return out;
}

void require_safe_n(const ModelParams& p, int n) {
    if (!precision_safe(p, n)) {
        throw validation_error("precision: sigma^(2n) exceeds the double-mode range 1e12 for n = " +
                               std::to_string(n) + "; use a smaller n");
    }
}

json params_json(const ModelParams& p) {
    return json{{"lambda", p.lambda},
                {"sigma", p.sigma},
                {"lambda_sigma", p.lambda * p.sigma},
                {"lambda_sigma_sq", p.lambda * p.sigma * p.sigma},
                {"extremely_dissipative", p.extremely_dissipative()}};
}

struct SinkArgs {
    double lambda = 0.2, sigma = 2.0, nu = 0.0;
    int n = 6;
    std::string out = "sink.json";
};

int cmd_sink(const SinkArgs& a) {
    const ModelParams p(a.lambda, a.sigma);
    require_safe_n(p, a.n);

    const ClosedFormSink cf = closed_form_sink(p, a.n);
    const RenormFrame2D frame(p, a.n);
    const double mu = reparam_mu(frame, a.nu);
    require_admissible_mu(mu);

    const SinkRefinement refined = refine_sink(p, mu, a.n, cf.point);
    const SpectrumReport report =
        classify_orbit({composite_jacobian(p, a.n, refined.newton.point)});

    const double expected_modulus = std::pow(p.lambda * p.sigma, a.n / 2.0);
    double eig_residual = 0.0;
    for (const auto& e : report.eigenvalues) {
        const std::complex<double> plus(0.0, expected_modulus);
        eig_residual = std::max(eig_residual, std::min(std::abs(e - plus), std::abs(e + plus)));
    }

    json doc;
    doc["schema"] = kSchemaVersion;
    doc["params"] = params_json(p);
    doc["n"] = a.n;
    doc["nu"] = a.nu;
    doc["mu"] = mu;
    doc["mu_n"] = cf.mu_n;
    doc["closed_form"] = to_json(cf.point);
    doc["newton"] = to_json(refined.newton.point);
    doc["newton_residual"] = refined.newton.residual;
    doc["newton_iterations"] = refined.newton.iterations;
    doc["deflated"] = refined.deflated;
    doc["closed_vs_newton_distance"] = refined.newton.point.dist(cf.point);
    doc["expected_eigenvalue_modulus"] = expected_modulus;
    doc["eigenvalue_residual"] = eig_residual;
    doc["spectrum"] = to_json(report);
    write_json_file(a.out, doc);
    return 0;
}

struct SweepArgs {
    double lambda = 0.2, sigma = 2.0, k = 2.0;
    int n_min = 2, n_max = 12, grid = 41;
    std::vector<double> nus{0.0};
    std::string coeffs;
    std::string out = "sweep.csv";
};

int cmd_renorm_sweep(const SweepArgs& a) {
    if (a.n_min < 1 || a.n_max < a.n_min) {
        throw validation_error("need 1 <= n-min <= n-max");
    }
    std::vector<std::vector<std::string>> rows;
    if (a.coeffs.empty()) {
        const ModelParams p(a.lambda, a.sigma);
        for (int n = a.n_min; n <= a.n_max; ++n) {
            const RenormFrame2D frame(p, n);
            for (const double nu : a.nus) {
                rows.push_back({std::to_string(n), format_double(nu),
                                format_double(c0_deviation(frame, nu, a.k, a.grid)),
                                format_double(c1_deviation(frame, nu, a.k, a.grid))});
            }
        }
    } else {
        const GeneralCoeffs co = load_general_coeffs(a.coeffs);
        if (a.n_min % 2 != 0) {
            throw validation_error("general sweeps take even n only; n-min must be even");
        }
        for (int n = a.n_min; n <= a.n_max; n += 2) {
            for (const double nu : a.nus) {
                rows.push_back({std::to_string(n), format_double(nu),
                                format_double(general_c0_deviation(co, n, nu, a.k, a.grid)),
                                format_double(general_c1_deviation(co, n, nu, a.k, a.grid))});
            }
        }
    }
    write_csv(a.out, {"n", "nu", "c0_dev", "c1_dev"}, rows);
    return 0;
}

struct CaptureArgs {
    double lambda = 0.2, sigma = 2.0, nu = 0.0, trap_radius = 1e-3;
    int n = 10;
    std::string out = "capture.json";
    std::string orbit_out;
};

int cmd_capture(const CaptureArgs& a) {
    const ModelParams p(a.lambda, a.sigma);
    require_safe_n(p, a.n);
    TrapSpec trap;
    trap.radius_rescaled = a.trap_radius;

    const CaptureVerdict v = capture_verdict(p, a.n, a.nu, trap);
    write_json_file(a.out, to_json(v));
    if (!a.orbit_out.empty()) write_orbit_csv(a.orbit_out, v.witness_orbit);
    return 0;
}

struct ManifoldArgs {
    double lambda = 0.2, sigma = 2.0, mu = 0.0, length = 2.5, max_gap = 1e-3, delta0 = 1e-4;
    std::string out = "manifold.csv";
};

int cmd_manifold(const ManifoldArgs& a) {
    const ModelParams p(a.lambda, a.sigma);
    require_admissible_mu(a.mu);
    ManifoldOptions opt;
    opt.delta0 = a.delta0;
    const ManifoldArc arc = grow_unstable_manifold(p, a.mu, a.length, a.max_gap, opt);
    write_manifold_csv(a.out, arc);
    if (arc.escape_exhausted) {
        throw escape_exhaustion("every manifold branch escaped at arc length " +
                                format_double(arc.total_length) + " before reaching " +
                                format_double(a.length) + " (output written)");
    }
    return 0;
}

struct BasinArgs {
    double lambda = 0.2, sigma = 2.0, nu = 0.0, trap_radius = 1e-3;
    double delta = 0.0; // 0: use 0.5 * r_nu
    int n = 6, nx = 21, ny = 21, max_returns = 500;
    std::vector<double> bounds; // x_min x_max y_min y_max
    std::string out = "basin.csv";
};

int cmd_basin(const BasinArgs& a) {
    const ModelParams p(a.lambda, a.sigma);
    require_safe_n(p, a.n);
    const RenormFrame2D frame(p, a.n);
    const double mu = reparam_mu(frame, a.nu);
    require_admissible_mu(mu);

    TrapSpec trap;
    trap.radius_rescaled = a.trap_radius;
    const SinkContext ctx = make_sink_context(p, mu, a.n, trap);

    BasinGridConfig cfg;
    if (!a.bounds.empty()) {
        if (a.bounds.size() != 4) {
            throw validation_error("--bounds takes x_min x_max y_min y_max");
        }
        cfg.x_min = a.bounds[0];
        cfg.x_max = a.bounds[1];
        cfg.y_min = a.bounds[2];
        cfg.y_max = a.bounds[3];
        cfg.nx = a.nx;
        cfg.ny = a.ny;
    } else {
        double delta = a.delta;
        if (delta <= 0.0) {
            const QuadraticFamilyPoint fp = quadratic_fixed_points(a.nu);
            if (!fp.exists) throw validation_error("no quadratic fixed points at this nu");
            delta = 0.5 * fp.source;
        }
        cfg = default_basin_bounds(frame, delta, a.nx, a.ny);
    }
    cfg.max_returns = a.max_returns;
    write_basin_csv(a.out, estimate_basin(ctx, cfg));
    return 0;
}

struct AttractorArgs {
    std::string map_name = "circle-semistable";
    double lambda = 0.2, sigma = 2.0, mu = 0.0, epsilon = 0.05;
    int samples = 1000, transient = 100'000, tail = 100;
    std::uint64_t seed = 7;
    std::vector<double> box; // x_min x_max y_min y_max
    bool probe = false;
    double eps_out = 0.5, delta_in = 1e-3;
    int probes = 64, horizon = 100'000;
    std::uint64_t probe_seed = 7;
    std::string out = "attractor.json";
    std::string points_out;
};

UserMap build_user_map(const AttractorArgs& a) {
    if (a.map_name == "circle-semistable") return circle_semistable_map();
    if (a.map_name == "contraction2d") return contraction_map_2d();
    if (a.map_name == "model") {
        const ModelParams p(a.lambda, a.sigma);
        require_admissible_mu(a.mu);
        Eigen::Vector2d lo(-2.0, -2.0), hi(2.0, 2.0);
        if (!a.box.empty()) {
            if (a.box.size() != 4) {
                throw validation_error("--box takes x_min x_max y_min y_max");
            }
            lo = Eigen::Vector2d(a.box[0], a.box[2]);
            hi = Eigen::Vector2d(a.box[1], a.box[3]);
        }
        return model_user_map(p, a.mu, RegionSpec{}, lo, hi);
    }
    throw validation_error("unknown map '" + a.map_name +
                           "' (expected circle-semistable, contraction2d, or model)");
}

int cmd_attractor(const AttractorArgs& a) {
    const UserMap map = build_user_map(a);
    const AttractorEstimate est =
        estimate_milnor(map, a.samples, a.transient, a.tail, a.epsilon, a.seed);
    json doc = to_json(est);
    doc["map"] = map.name;
    if (a.probe) {
        doc["probe"] = to_json(
            probe_stability(map, est, a.eps_out, a.delta_in, a.probes, a.horizon, a.probe_seed));
    }
    write_json_file(a.out, doc);
    if (!a.points_out.empty()) write_cloud_csv(a.points_out, est);
    return 0;
}

struct CertifyArgs {
    double lambda = 0.2, sigma = 2.0, nu = 0.0, exit_threshold = 0.25, trap_radius = 1e-3;
    std::string n_list = "4:10";
    std::string out = "certificate.json";
};

int cmd_certify(const CertifyArgs& a) {
    const ModelParams p(a.lambda, a.sigma);
    if (!p.extremely_dissipative()) {
        throw validation_error("certify requires the extreme regime lambda*sigma^2 < 1");
    }
    const std::vector<int> ns = parse_n_list(a.n_list);
    for (const int n : ns) require_safe_n(p, n);

    CertificateOptions opt;
    opt.exit_threshold = a.exit_threshold;
    opt.trap.radius_rescaled = a.trap_radius;
    write_json_file(a.out, to_json(build_certificate(p, ns, a.nu, opt)));
    return 0;
}

struct ClassifyArgs {
    std::vector<std::string> eigs;
    std::string out = "spectrum.json";
};

int cmd_classify(const ClassifyArgs& a) {
    if (a.eigs.empty()) {
        throw validation_error("classify-spectrum needs at least one --eig re[,im]");
    }
    std::vector<std::complex<double>> eigs;
    for (const std::string& tok : a.eigs) {
        const auto comma = tok.find(',');
        if (comma == std::string::npos) {
            eigs.emplace_back(parse_double(tok), 0.0);
        } else {
            eigs.emplace_back(parse_double(tok.substr(0, comma)),
                              parse_double(tok.substr(comma + 1)));
        }
    }
    write_json_file(a.out, to_json(classify(eigs)));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"tangency unfolding laboratory: sinks, renormalization, capture, attractors"};
    app.require_subcommand(1);
    app.set_config("--config", "", "key-value config file; [section] per subcommand, flags win");

    SinkArgs sink_args;
    auto* sink = app.add_subcommand("sink", "closed-form sink, Newton refinement, spectrum");
    sink->add_option("--lambda", sink_args.lambda, "contraction rate in (0,1)");
    sink->add_option("--sigma", sink_args.sigma, "expansion rate > 1");
    sink->add_option("--n", sink_args.n, "return-map index");
    sink->add_option("--nu", sink_args.nu, "rescaled parameter (mu = mu_n + nu sigma^-2n)");
    sink->add_option("--out", sink_args.out, "output JSON path");

    SweepArgs sweep_args;
    auto* sweep = app.add_subcommand("renorm-sweep", "C0/C1 deviation from the quadratic limit");
    sweep->add_option("--lambda", sweep_args.lambda, "contraction rate (planar sweep)");
    sweep->add_option("--sigma", sweep_args.sigma, "expansion rate (planar sweep)");
    sweep->add_option("--n-min", sweep_args.n_min, "first n");
    sweep->add_option("--n-max", sweep_args.n_max, "last n");
    sweep->add_option("--nu", sweep_args.nus, "nu values (repeatable)");
    sweep->add_option("--k", sweep_args.k, "lattice half-width");
    sweep->add_option("--grid", sweep_args.grid, "lattice points per axis");
    sweep->add_option("--coeffs", sweep_args.coeffs, "general coefficients file (even n only)");
    sweep->add_option("--out", sweep_args.out, "output CSV path");

    CaptureArgs capture_args;
    auto* capture = app.add_subcommand("capture", "capture verdict for H_n(1, mu)");
    capture->add_option("--lambda", capture_args.lambda, "contraction rate");
    capture->add_option("--sigma", capture_args.sigma, "expansion rate");
    capture->add_option("--n", capture_args.n, "return-map index");
    capture->add_option("--nu", capture_args.nu, "rescaled parameter");
    capture->add_option("--trap-radius", capture_args.trap_radius, "trap radius (rescaled)");
    capture->add_option("--out", capture_args.out, "verdict JSON path");
    capture->add_option("--orbit-out", capture_args.orbit_out, "witness orbit CSV path");

    ManifoldArgs manifold_args;
    auto* manifold = app.add_subcommand("manifold", "grow the saddle's unstable manifold");
    manifold->add_option("--lambda", manifold_args.lambda, "contraction rate");
    manifold->add_option("--sigma", manifold_args.sigma, "expansion rate");
    manifold->add_option("--mu", manifold_args.mu, "unfolding parameter");
    manifold->add_option("--length", manifold_args.length, "target arc length");
    manifold->add_option("--max-gap", manifold_args.max_gap, "max image spacing");
    manifold->add_option("--delta0", manifold_args.delta0, "fundamental-segment offset");
    manifold->add_option("--out", manifold_args.out, "arc CSV path");

    BasinArgs basin_args;
    auto* basin = app.add_subcommand("basin", "basin-of-attraction grid around the sink");
    basin->add_option("--lambda", basin_args.lambda, "contraction rate");
    basin->add_option("--sigma", basin_args.sigma, "expansion rate");
    basin->add_option("--n", basin_args.n, "return-map index");
    basin->add_option("--nu", basin_args.nu, "rescaled parameter");
    basin->add_option("--delta", basin_args.delta, "rescaled half-width (default 0.5 r_nu)");
    basin->add_option("--bounds", basin_args.bounds, "explicit x_min x_max y_min y_max")
        ->expected(4);
    basin->add_option("--nx", basin_args.nx, "grid columns");
    basin->add_option("--ny", basin_args.ny, "grid rows");
    basin->add_option("--trap-radius", basin_args.trap_radius, "trap radius (rescaled)");
    basin->add_option("--max-returns", basin_args.max_returns, "return-step budget per cell");
    basin->add_option("--out", basin_args.out, "grid CSV path");

    AttractorArgs attractor_args;
    auto* attractor = app.add_subcommand("attractor", "Milnor-attractor estimate and probing");
    attractor->add_option("--map", attractor_args.map_name,
                          "circle-semistable | contraction2d | model");
    attractor->add_option("--lambda", attractor_args.lambda, "model contraction rate");
    attractor->add_option("--sigma", attractor_args.sigma, "model expansion rate");
    attractor->add_option("--mu", attractor_args.mu, "model unfolding parameter");
    attractor->add_option("--box", attractor_args.box, "model domain box x_min x_max y_min y_max")
        ->expected(4);
    attractor->add_option("--samples", attractor_args.samples, "sample orbits");
    attractor->add_option("--transient", attractor_args.transient, "discarded iterates");
    attractor->add_option("--tail", attractor_args.tail, "recorded iterates per orbit");
    attractor->add_option("--epsilon", attractor_args.epsilon, "clustering radius");
    attractor->add_option("--seed", attractor_args.seed, "sampling seed");
    attractor->add_flag("--probe", attractor_args.probe, "run the Lyapunov stability probe");
    attractor->add_option("--eps-out", attractor_args.eps_out, "escape distance");
    attractor->add_option("--delta-in", attractor_args.delta_in, "probe start offset");
    attractor->add_option("--probes", attractor_args.probes, "probe count");
    attractor->add_option("--horizon", attractor_args.horizon, "probe step budget");
    attractor->add_option("--probe-seed", attractor_args.probe_seed, "probe seed");
    attractor->add_option("--out", attractor_args.out, "estimate JSON path");
    attractor->add_option("--points-out", attractor_args.points_out, "tail cloud CSV path");

    CertifyArgs certify_args;
    auto* certify = app.add_subcommand("certify", "instability certificate for the model family");
    certify->add_option("--lambda", certify_args.lambda, "contraction rate");
    certify->add_option("--sigma", certify_args.sigma, "expansion rate");
    certify->add_option("--n-list", certify_args.n_list, "n values, e.g. 4:10 or 4,6,8");
    certify->add_option("--nu", certify_args.nu, "rescaled parameter");
    certify->add_option("--exit-threshold", certify_args.exit_threshold,
                        "wandering-exit distance");
    certify->add_option("--trap-radius", certify_args.trap_radius, "capture trap radius");
    certify->add_option("--out", certify_args.out, "certificate JSON path");

    ClassifyArgs classify_args;
    auto* classify_cmd = app.add_subcommand("classify-spectrum", "dissipativity predicates");
    classify_cmd->add_option("--eig", classify_args.eigs, "eigenvalue re[,im] (repeatable)");
    classify_cmd->add_option("--out", classify_args.out, "report JSON path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e);
        }
        std::cerr << "usage_error: " << e.what() << std::endl;
        return 2;
    }

    try {
        if (sink->parsed()) return cmd_sink(sink_args);
        if (sweep->parsed()) return cmd_renorm_sweep(sweep_args);
        if (capture->parsed()) return cmd_capture(capture_args);
        if (manifold->parsed()) return cmd_manifold(manifold_args);
        if (basin->parsed()) return cmd_basin(basin_args);
        if (attractor->parsed()) return cmd_attractor(attractor_args);
        if (certify->parsed()) return cmd_certify(certify_args);
        if (classify_cmd->parsed()) return cmd_classify(classify_args);
        std::cerr << "usage_error: no subcommand selected" << std::endl;
        return 2;
    } catch (const validation_error& e) {
        std::cerr << "validation_error: " << e.what() << std::endl;
        return 2;
    } catch (const precision_error& e) {
        std::cerr << "precision_error: " << e.what() << std::endl;
        return 3;
    } catch (const regime_error& e) {
        std::cerr << "regime_error: " << e.what() << std::endl;
        return 3;
    } catch (const escape_exhaustion& e) {
        std::cerr << "escape_exhaustion: " << e.what() << std::endl;
        return 3;
    } catch (const numerical_error& e) {
        std::cerr << "numerical_error: " << e.what() << std::endl;
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal_error: " << e.what() << std::endl;
        return 3;
    }
}
