#pragma once

#include <json.hpp>

#include <string>

#include "tanglab/attractor.hpp"
#include "tanglab/geometry.hpp"
#include "tanglab/model_family.hpp"
#include "tanglab/renorm.hpp"
#include "tanglab/spectra.hpp"

namespace tanglab {

// All JSON outputs carry "schema": 1 and use insertion-ordered keys so that
// reruns are byte-identical.
using json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

[[nodiscard]] json to_json(const PlanarPoint& z);
[[nodiscard]] json to_json(const SpectrumReport& report);
[[nodiscard]] json to_json(const QuadraticFamilyPoint& fp);
[[nodiscard]] json to_json(const CaptureVerdict& verdict);
[[nodiscard]] json to_json(const AttractorEstimate& estimate);
[[nodiscard]] json to_json(const StabilityProbe& probe);
[[nodiscard]] json to_json(const InstabilityCertificate& cert);

void write_json_file(const std::string& path, const json& doc);

void write_orbit_csv(const std::string& path, const OrbitSegment& segment);
void write_manifold_csv(const std::string& path, const ManifoldArc& arc);
void write_basin_csv(const std::string& path, const BasinGrid& grid);
void write_cloud_csv(const std::string& path, const AttractorEstimate& estimate);

} // namespace tanglab
