#pragma once

#include <vector>

#include "shipprop/raster.hpp"

namespace shipprop {

/// Per-pixel abnormality scores. Maps produced by the public operations
/// below are in [0, 1].
class AnomalyMap {
public:
    AnomalyMap(int width, int height, std::vector<double> scores);
    explicit AnomalyMap(Band band);

    int width() const noexcept { return band_.width(); }
    int height() const noexcept { return band_.height(); }
    std::size_t size() const noexcept { return band_.size(); }
    double at(int x, int y) const { return band_.at(x, y); }
    std::span<const double> scores() const noexcept { return band_.values(); }
    const Band& band() const noexcept { return band_; }

    friend bool operator==(const AnomalyMap&, const AnomalyMap&) = default;

private:
    Band band_;
};

/// Gradient-magnitude suppression parameters. rho = q / sin(tau) is the
/// magnitude below which quantisation error can rotate the gradient by more
/// than tau.
class SuppressionConfig {
public:
    SuppressionConfig() : SuppressionConfig(2.0, 22.5) {}
    SuppressionConfig(double q, double tau_deg);

    double q() const noexcept { return q_; }
    double tau_deg() const noexcept { return tau_deg_; }
    double rho() const noexcept { return rho_; }

private:
    double q_;
    double tau_deg_;
    double rho_;
};

struct GradientField {
    Band gx;
    Band gy;
    Band magnitude;
};

inline constexpr int kDefaultAnomalyLevels = 256;

/// Score 1 / f(level), min-max normalised, where f is the scene histogram
/// count of the pixel's level. Bands without a levels hint are quantised to
/// 256 levels first.
AnomalyMap global_anomaly(const Band& band);

/// 2x2 forward differences assigned to the block's top-left pixel; the last
/// row and column are zero.
GradientField gradient_field(const Band& band);

/// Raw suppressed magnitude: G where G >= rho, else 0. Not normalised.
Band suppressed_magnitude(const GradientField& field, const SuppressionConfig& cfg);

/// Suppressed magnitude normalised to [0, 1].
AnomalyMap suppress(const GradientField& field, const SuppressionConfig& cfg);

/// Pointwise sum renormalised to [0, 1].
AnomalyMap combine(const AnomalyMap& regional, const AnomalyMap& global);

struct AnomalyOptions {
    SuppressionConfig suppression{};
    bool suppression_enabled = true;
    int levels = kDefaultAnomalyLevels;
};

/// quantise -> (global, gradient -> suppress or plain normalise) -> combine.
AnomalyMap anomaly_pipeline(const Band& band, const AnomalyOptions& options = {});

}  // namespace shipprop
