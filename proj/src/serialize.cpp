#include "tanglab/serialize.hpp"

#include "tanglab/io.hpp"

namespace tanglab {

namespace {

json eigenvalues_to_json(const std::vector<std::complex<double>>& eigs) {
    json arr = json::array();
    for (const auto& e : eigs) {
        arr.push_back(json{{"re", e.real()}, {"im", e.imag()}});
    }
    return arr;
}

} // namespace

json to_json(const PlanarPoint& z) { return json{{"x", z.x}, {"y", z.y}}; }

json to_json(const SpectrumReport& report) {
    json doc;
    doc["schema"] = kSchemaVersion;
    doc["period"] = report.period;
    doc["eigenvalues"] = eigenvalues_to_json(report.eigenvalues);
    doc["expanding_count"] = report.expanding_count;
    doc["dissipative"] = report.dissipative;
    doc["area_expanding"] = report.area_expanding;
    doc["sectionally_dissipative"] = report.sectionally_dissipative;
    doc["extremely_dissipative"] = report.extremely_dissipative;
    if (report.has_two_volume_check) {
        // Coordinate-dependent evidence, not the definition (see Remark on
        // adapted coordinates): reported under a separate key.
        doc["contracts_two_volumes_in_given_coordinates"] = report.contracts_two_volumes_flag;
    }
    return doc;
}

json to_json(const QuadraticFamilyPoint& fp) {
    json doc;
    doc["schema"] = kSchemaVersion;
    doc["nu"] = fp.nu;
    doc["exists"] = fp.exists;
    if (fp.exists) {
        doc["sink"] = fp.sink;
        doc["source"] = fp.source;
        doc["sink_multiplier"] = fp.sink_multiplier;
        doc["source_multiplier"] = fp.source_multiplier;
        doc["sink_attracting"] = fp.sink_attracting;
    }
    return doc;
}

json to_json(const CaptureVerdict& verdict) {
    json doc;
    doc["schema"] = kSchemaVersion;
    doc["regime"] = to_string(verdict.regime);
    doc["n"] = verdict.n;
    doc["nu"] = verdict.nu;
    doc["mu"] = verdict.mu;
    doc["predicted_offset"] = verdict.predicted_offset;
    doc["rescaled_entry_point"] = json{{"X", verdict.rescaled_entry.X},
                                       {"Y", verdict.rescaled_entry.Y}};
    doc["captured"] = verdict.captured;
    doc["sink"] = to_json(verdict.sink);
    doc["final_distance"] = verdict.final_distance;
    doc["returns_used"] = verdict.returns_used;
    doc["witness_escaped"] = verdict.witness_orbit.escaped;
    doc["witness_points"] = verdict.witness_orbit.size();
    return doc;
}

json to_json(const AttractorEstimate& estimate) {
    json doc;
    doc["schema"] = kSchemaVersion;
    doc["dimension"] = estimate.dimension;
    doc["samples"] = estimate.samples;
    doc["transient"] = estimate.transient;
    doc["tail"] = estimate.tail;
    doc["epsilon"] = estimate.epsilon;
    doc["seed"] = estimate.seed;
    doc["escaped_samples"] = estimate.escaped_samples;
    doc["escape_warning"] = estimate.escape_warning;
    doc["tail_points"] = estimate.points.size();
    json clusters = json::array();
    for (const auto& c : estimate.clusters) {
        json center = json::array();
        for (int i = 0; i < c.center.size(); ++i) center.push_back(c.center(i));
        clusters.push_back(json{{"center", center},
                                {"radius", c.radius},
                                {"count", c.count},
                                {"weight", c.weight}});
    }
    doc["clusters"] = clusters;
    return doc;
}

json to_json(const StabilityProbe& probe) {
    json doc;
    doc["schema"] = kSchemaVersion;
    doc["eps_out"] = probe.eps_out;
    doc["delta_in"] = probe.delta_in;
    doc["probes"] = probe.probes;
    doc["horizon"] = probe.horizon;
    doc["seed"] = probe.seed;
    doc["verdict"] = probe.verdict == ProbeVerdict::escape_found ? "escape_found"
                                                                 : "no_escape_observed";
    json escapes = json::array();
    for (const auto& rec : probe.escapes) {
        json start = json::array();
        for (int i = 0; i < rec.start.size(); ++i) start.push_back(rec.start(i));
        escapes.push_back(json{{"start", start}, {"exit_step", rec.exit_step}});
    }
    doc["escapes"] = escapes;
    return doc;
}

json to_json(const InstabilityCertificate& cert) {
    json doc;
    doc["schema"] = kSchemaVersion;
    doc["lambda"] = cert.params.lambda;
    doc["sigma"] = cert.params.sigma;
    doc["nu"] = cert.nu;
    doc["saddle"] = to_json(cert.saddle);
    doc["saddle_report"] = to_json(cert.saddle_report);
    json sinks = json::array();
    for (const auto& rec : cert.sinks) {
        sinks.push_back(json{{"n", rec.n},
                             {"mu_n", rec.mu_n},
                             {"point", to_json(rec.point)},
                             {"newton_residual", rec.newton_residual},
                             {"y_distance", rec.y_distance},
                             {"saddle_distance", rec.saddle_distance},
                             {"eigenvalues", eigenvalues_to_json(rec.eigenvalues)},
                             {"attracting", rec.attracting}});
    }
    doc["sink_sequence"] = sinks;
    doc["accumulation_ok"] = cert.accumulation_ok;
    doc["capture"] = to_json(cert.capture);
    doc["captured"] = cert.capture.captured;
    json exit_points = json::array();
    for (std::size_t i = 0; i < cert.wandering_exit.points.size(); ++i) {
        exit_points.push_back(json{{"x", cert.wandering_exit.points[i].x},
                                   {"y", cert.wandering_exit.points[i].y},
                                   {"tag", to_string(cert.wandering_exit.region_tags[i])}});
    }
    doc["wandering_exit"] = json{{"points", exit_points},
                                 {"backward_tail_length", cert.backward_tail_length},
                                 {"exit_step", cert.exit_step},
                                 {"exit_distance", cert.exit_distance},
                                 {"exit_threshold", cert.exit_threshold},
                                 {"exit_found", cert.exit_found}};
    doc["complete"] = cert.complete;
    return doc;
}

void write_json_file(const std::string& path, const json& doc) {
    write_text_file(path, doc.dump(2) + "\n");
}

void write_orbit_csv(const std::string& path, const OrbitSegment& segment) {
    std::vector<std::vector<std::string>> rows;
    rows.reserve(segment.size());
    for (std::size_t i = 0; i < segment.size(); ++i) {
        rows.push_back({std::to_string(i), format_double(segment.points[i].x),
                        format_double(segment.points[i].y), to_string(segment.region_tags[i])});
    }
    write_csv(path, {"step", "x", "y", "region_tag"}, rows);
}

void write_manifold_csv(const std::string& path, const ManifoldArc& arc) {
    std::vector<std::vector<std::string>> rows;
    rows.reserve(arc.points.size());
    for (std::size_t i = 0; i < arc.points.size(); ++i) {
        rows.push_back({std::to_string(i), format_double(arc.arc_params[i]),
                        format_double(arc.points[i].x), format_double(arc.points[i].y),
                        std::to_string(arc.levels[i]), to_string(arc.tags[i])});
    }
    write_csv(path, {"index", "arc_length", "x", "y", "level", "region_tag"}, rows);
}

void write_basin_csv(const std::string& path, const BasinGrid& grid) {
    std::vector<std::vector<std::string>> rows;
    rows.reserve(grid.membership.size());
    for (int iy = 0; iy < grid.config.ny; ++iy) {
        for (int ix = 0; ix < grid.config.nx; ++ix) {
            const PlanarPoint c = grid.cell_center(ix, iy);
            const CellTag tag = grid.membership[static_cast<std::size_t>(iy) *
                                                    static_cast<std::size_t>(grid.config.nx) +
                                                static_cast<std::size_t>(ix)];
            rows.push_back({std::to_string(ix), std::to_string(iy), format_double(c.x),
                            format_double(c.y), std::to_string(static_cast<int>(tag))});
        }
    }
    write_csv(path, {"ix", "iy", "cx", "cy", "tag"}, rows);
}

void write_cloud_csv(const std::string& path, const AttractorEstimate& estimate) {
    std::vector<std::string> header{"index"};
    for (int d = 0; d < estimate.dimension; ++d) header.push_back("x" + std::to_string(d));
    std::vector<std::vector<std::string>> rows;
    rows.reserve(estimate.points.size());
    for (std::size_t i = 0; i < estimate.points.size(); ++i) {
        std::vector<std::string> row{std::to_string(i)};
        for (int d = 0; d < estimate.dimension; ++d) {
            row.push_back(format_double(estimate.points[i](d)));
        }
        rows.push_back(std::move(row));
    }
    write_csv(path, header, rows);
}

} // namespace tanglab
