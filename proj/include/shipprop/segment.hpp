#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "shipprop/anomaly.hpp"
#include "shipprop/raster.hpp"

namespace shipprop {

using Histogram = std::vector<std::uint64_t>;

enum class ThresholdMethod { Otsu, IsoData, Yen, Mean, Sauvola };

std::string_view to_string(ThresholdMethod method) noexcept;
/// Accepts the lower-case names used on the command line and in configs.
ThresholdMethod parse_threshold_method(std::string_view name);

struct SauvolaParams {
    int window = 15;  // odd, >= 3
    double k = 0.5;   // (0, 1]
    double r = 0.5;   // dynamic range of the standard deviation
};

struct ThresholdConfig {
    ThresholdMethod method = ThresholdMethod::Otsu;
    int histogram_bins = 256;
    SauvolaParams sauvola{};

    /// Throws InputError when a field is out of range.
    void validate() const;
};

/// Histogram of an integer-valued band with `levels` bins.
Histogram level_histogram(const Band& levels, int levels_count);

// All global selectors return the level t such that levels strictly above t
// are foreground. Ties resolve to the smallest t.

/// Maximises the between-class variance w0 * w1 * (mu0 - mu1)^2.
int threshold_otsu(std::span<const std::uint64_t> hist);

/// Ridler-Calvard fixed point T <- (mu_below + mu_above) / 2 from the mean,
/// stopping once T moves by less than half a level (at most 1000 steps).
/// Returns floor(T).
int threshold_isodata(std::span<const std::uint64_t> hist);

/// Maximises Yen's entropic correlation.
int threshold_yen(std::span<const std::uint64_t> hist);

/// floor of the histogram mean.
int threshold_mean(std::span<const std::uint64_t> hist);

struct SauvolaResult {
    BinaryMask mask;
    int window_used = 0;
    std::optional<std::string> warning;
};

/// Local threshold m * (1 + k * (s / R - 1)) over a b x b window truncated at
/// the image border; foreground where the score is strictly above it.
SauvolaResult threshold_sauvola(const AnomalyMap& map, const SauvolaParams& params);

struct Segmentation {
    BinaryMask mask;
    std::optional<int> level;  // selected level for global methods
    bool degenerate = false;
    std::vector<std::string> notes;
};

/// Global methods quantise the map to `histogram_bins` levels and keep levels
/// above the selected one; Sauvola is applied per pixel. A histogram with a
/// single occupied level yields an empty mask flagged as degenerate.
Segmentation apply_threshold(const AnomalyMap& map, const ThresholdConfig& cfg);

BinaryMask erode(const BinaryMask& mask);
BinaryMask dilate(const BinaryMask& mask);

/// `iterations` 3x3 erosions followed by as many 3x3 dilations. Pixels
/// outside the image count as background.
BinaryMask morphological_open(const BinaryMask& mask, int iterations = 2);

}  // namespace shipprop
