#pragma once

#include <filesystem>

#include <json.hpp>

#include "shipprop/pipeline.hpp"

namespace shipprop {

using Json = nlohmann::json;

Json read_json_file(const std::filesystem::path& path);
void write_json_file(const Json& doc, const std::filesystem::path& path);

/// Flat config object. Recognised keys: variant ("pan" | "panir"), q,
/// tau_deg, levels, suppression, threshold_method, bins,
/// sauvola {window, k, r}, morph_iterations, land_mask, and
/// filter {min_length, max_length, min_width, max_width, min_ratio,
/// max_ratio, min_area}. Missing keys keep their defaults; unknown keys are
/// rejected.
PipelineConfig config_from_json(const Json& doc);
Json config_to_json(const PipelineConfig& config);

/// `[{"id": 0, "polygon": [[x, y], ...]}, ...]`
GroundTruth ground_truth_from_json(const Json& doc);
Json ground_truth_to_json(const GroundTruth& gt);

/// `[{cx, cy, length, width, angle_deg, ratio, area_px, score, pixels}, ...]`
/// where `pixels` lists [x, y] pairs so evaluation can use the exact region.
Json proposals_to_json(std::span<const Proposal> proposals);

/// Uses `pixels` when present; otherwise rasterises the box against a
/// width x height frame.
std::vector<Proposal> proposals_from_json(const Json& doc, int width, int height);

Json eval_report_to_json(const EvalReport& report);
Json contrast_to_json(std::span<const BandContrast> bands);
Json bench_to_json(const BenchResult& result);

SceneSpec scene_spec_from_json(const Json& doc);
Json scene_spec_to_json(const SceneSpec& spec);

/// Nonzero PGM pixels are land.
BinaryMask read_mask_pgm(const std::filesystem::path& path);
void write_mask_pgm(const BinaryMask& mask, const std::filesystem::path& path);

}  // namespace shipprop
