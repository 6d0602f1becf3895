// Output persistence: CSV series, JSON summaries, run manifests with content
// hashes, and dependency-free SVG polyline charts.
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fracflow/lab.hpp"
#include "fracflow/mm.hpp"

#include "json.hpp"

namespace fracflow {

using Json = nlohmann::ordered_json;

void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

// FNV-1a 64-bit over the file bytes, hex-encoded.
std::string content_hash(const std::filesystem::path& path);

std::string sweep_csv(const SweepResult& result);
Json sweep_summary(const SweepResult& result);

std::string trajectory_csv(const Trajectory& traj);

// Writes manifest.json into `dir`: full config, convention flags, artifact
// version, and a content hash per emitted file. No volatile fields, so
// identical runs produce identical manifests.
void write_manifest(const std::filesystem::path& dir, const Json& config,
                    const std::vector<std::string>& files);

struct SvgSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

// Minimal polyline chart; log-log when requested (all data must be positive).
std::string render_svg_chart(const std::string& title, const std::vector<SvgSeries>& series,
                             bool log_log = false);

}  // namespace fracflow
