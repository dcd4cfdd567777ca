#pragma once

#include <optional>
#include <string>
#include <vector>

#include "shipprop/anomaly.hpp"
#include "shipprop/eval.hpp"
#include "shipprop/fusion.hpp"
#include "shipprop/proposals.hpp"
#include "shipprop/segment.hpp"
#include "shipprop/synth.hpp"

namespace shipprop {

enum class BandSelection { Pan, PanNir };

/// One of the four ablation variants: band input x texture suppression.
struct Variant {
    BandSelection bands = BandSelection::PanNir;
    bool suppression = true;

    std::string name() const;  // "PAN-WTAS", "PANIR-WOTAS", ...
    friend bool operator==(const Variant&, const Variant&) = default;
};

/// Accepts names such as "panir-wtas" or "PAN-WOTAS".
Variant parse_variant(std::string_view name);
std::vector<Variant> all_variants();

struct PipelineConfig {
    BandSelection bands = BandSelection::PanNir;
    AnomalyOptions anomaly{};
    ThresholdConfig threshold{};
    FilterConfig filter{};
    int morph_iterations = 2;
    std::optional<std::string> land_mask_path;

    Variant variant() const { return {bands, anomaly.suppression_enabled}; }
    void apply(const Variant& v) {
        bands = v.bands;
        anomaly.suppression_enabled = v.suppression;
    }
    void validate() const;
};

/// Pan-sharpens low-resolution MS bands against the image's pan band and
/// returns pan plus the sharpened bands (a sharpened role replaces an
/// existing one). The scale is inferred from the size ratio.
MultibandImage with_sharpened_ms(const MultibandImage& image, const MultibandImage& ms_low);

/// Single band handed to the anomaly detector: the pan band, or the first
/// principal component of pan and nir.
Band detector_input(const MultibandImage& image, BandSelection bands);

struct Detection {
    AnomalyMap anomaly;
    Segmentation segmentation;  // raw threshold output
    BinaryMask mask;            // after opening and land masking
    std::vector<Proposal> proposals;
};

/// Full chain: fusion -> anomaly -> threshold -> opening -> land mask ->
/// proposals. Land-mask pixels are forced to background after thresholding.
Detection detect(const MultibandImage& image, const PipelineConfig& config,
                 const std::optional<BinaryMask>& land_mask = std::nullopt);

/// Per-band contrast of every annotated ship against its 5 px surrounding
/// ring (other ships excluded).
struct BandContrast {
    std::string role;
    std::vector<ContrastReport> ships;
    double mean_mrc = 0.0;
    double mean_fqrc = 0.0;
};

std::vector<BandContrast> contrast_by_band(const MultibandImage& image, const GroundTruth& truth);

// ---------------------------------------------------------------------------
// Benchmark

struct BenchScene {
    std::string name;
    MultibandImage image;
    GroundTruth truth;
};

struct BenchCell {
    Variant variant;
    ThresholdMethod method = ThresholdMethod::Otsu;
    EvalCounts counts;
    EvalReport report;
};

struct VariantSummary {
    Variant variant;
    double mean_ar = 0.0;  // fraction, not percent
    double sd_ar = 0.0;    // sample standard deviation across methods
};

struct BenchResult {
    std::vector<double> t_grid;
    std::vector<Variant> variants;
    std::vector<ThresholdMethod> methods;
    std::vector<BenchCell> cells;  // variant-major
    std::vector<VariantSummary> summaries;
    std::size_t scene_count = 0;

    const BenchCell& cell(const Variant& v, ThresholdMethod m) const;
    const VariantSummary& summary(const Variant& v) const;
};

/// Sample mean and (n-1) standard deviation.
std::pair<double, double> mean_and_sd(std::span<const double> values);

/// Runs every (variant, method) cell over every scene. Scenes are processed
/// in parallel; counts are merged in scene order so results do not depend on
/// scheduling.
BenchResult run_bench(std::span<const BenchScene> scenes, std::span<const Variant> variants,
                      std::span<const ThresholdMethod> methods, const PipelineConfig& base,
                      std::span<const double> t_grid, unsigned threads = 0);

/// Generates scenes for seeds seed0, seed0 + 1, ... from a family.
std::vector<BenchScene> synth_scenes(const SceneFamily& family, std::uint64_t seed0, int count);

/// Loads every subdirectory holding manifest.json and gt.json, sorted by name.
std::vector<BenchScene> load_scene_dir(const std::string& dir);

/// Aligned text rendering: rows are methods, columns variants, last row
/// mean (+/- SD) of average recall, in percent.
std::string format_bench_table(const BenchResult& result);

}  // namespace shipprop
