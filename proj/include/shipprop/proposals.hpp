#pragma once

#include <vector>

#include "shipprop/anomaly.hpp"
#include "shipprop/raster.hpp"

namespace shipprop {

struct Pixel {
    int x = 0;
    int y = 0;
    friend auto operator<=>(const Pixel& a, const Pixel& b) noexcept {
        if (auto c = a.y <=> b.y; c != 0) return c;
        return a.x <=> b.x;
    }
    friend bool operator==(const Pixel&, const Pixel&) = default;
};

/// Pixels sorted in raster order (row, then column).
using PixelSet = std::vector<Pixel>;

struct RotatedBox {
    double cx = 0.0;
    double cy = 0.0;
    double length = 0.0;     // long side
    double width = 0.0;      // short side
    double angle_deg = 0.0;  // direction of the long side in image coords, [0, 180)

    double area() const noexcept { return length * width; }
};

struct Proposal {
    PixelSet pixels;
    RotatedBox box;
    double length_width_ratio = 1.0;
    double score = 0.0;  // mean anomaly over the pixels

    std::size_t area_px() const noexcept { return pixels.size(); }
};

/// Inclusive bounds on the shape features. Lengths are in pixels.
struct FilterConfig {
    double min_length = 2.0;
    double max_length = 128.0;
    double min_width = 1.0;
    double max_width = 64.0;
    double min_ratio = 1.0;
    double max_ratio = 15.0;
    std::size_t min_area = 3;

    void validate() const;
};

/// 8-connected components, ordered by their first pixel in raster order.
std::vector<PixelSet> connected_components(const BinaryMask& mask);

/// Minimum-area enclosing rectangle of the pixels taken as unit squares:
/// convex hull of the square corners, then the best hull-edge orientation.
RotatedBox min_rotated_box(const PixelSet& pixels);

/// Keeps proposals whose length, width, ratio and area are within bounds.
std::vector<Proposal> filter_false_alarms(std::vector<Proposal> proposals, const FilterConfig& cfg);

/// components -> boxes -> filter, sorted by score descending (stable with
/// respect to raster order).
std::vector<Proposal> extract_proposals(const BinaryMask& mask, const AnomalyMap& anomaly, const FilterConfig& cfg);

}  // namespace shipprop
