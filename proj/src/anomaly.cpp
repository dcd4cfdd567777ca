#include "shipprop/anomaly.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace shipprop {

namespace {

void check_unit_range(const Band& band) {
    for (double v : band.values()) {
        if (v < 0.0 || v > 1.0) throw InputError("anomaly scores must lie in [0, 1]");
    }
}

bool is_quantized(const Band& band) {
    const auto levels = band.levels_hint();
    if (!levels || *levels < 2) return false;
    return std::all_of(band.values().begin(), band.values().end(), [&](double v) {
        return v >= 0.0 && v <= *levels - 1 && v == std::floor(v);
    });
}

}  // namespace

AnomalyMap::AnomalyMap(int width, int height, std::vector<double> scores)
    : band_(width, height, std::move(scores)) {
    check_unit_range(band_);
}

AnomalyMap::AnomalyMap(Band band) : band_(std::move(band)) {
    band_.set_levels_hint(std::nullopt);
    check_unit_range(band_);
}

SuppressionConfig::SuppressionConfig(double q, double tau_deg)
    : q_(q), tau_deg_(tau_deg), rho_(q / std::sin(tau_deg * std::numbers::pi / 180.0)) {
    if (!(q > 0.0)) throw InputError("suppression q must be positive");
    if (!(tau_deg > 0.0 && tau_deg < 90.0)) throw InputError("suppression tau must lie in (0, 90) degrees");
}

AnomalyMap global_anomaly(const Band& band) {
    const Band levels = is_quantized(band) ? band : quantize_levels(band, kDefaultAnomalyLevels);
    const int n_levels = *levels.levels_hint();

    std::vector<std::size_t> freq(static_cast<std::size_t>(n_levels), 0);
    for (double v : levels.values()) ++freq[static_cast<std::size_t>(v)];

    Band raw(band.width(), band.height());
    auto src = levels.values();
    auto dst = raw.values();
    for (std::size_t i = 0; i < dst.size(); ++i) {
        dst[i] = 1.0 / static_cast<double>(freq[static_cast<std::size_t>(src[i])]);
    }
    return AnomalyMap(normalize_unit(raw));
}

GradientField gradient_field(const Band& band) {
    const int w = band.width();
    const int h = band.height();
    if (w < 2 || h < 2) throw InputError("gradient field needs a band of at least 2x2");
    Band gx(w, h);
    Band gy(w, h);
    Band mag(w, h);
    for (int y = 0; y + 1 < h; ++y) {
        for (int x = 0; x + 1 < w; ++x) {
            const double a = band.at(x, y);
            const double b = band.at(x + 1, y);
            const double c = band.at(x, y + 1);
            const double d = band.at(x + 1, y + 1);
            const double dx = (b + d - a - c) / 2.0;
            const double dy = (c + d - a - b) / 2.0;
            gx.at(x, y) = dx;
            gy.at(x, y) = dy;
            mag.at(x, y) = std::sqrt(dx * dx + dy * dy);
        }
    }
    return {std::move(gx), std::move(gy), std::move(mag)};
}

Band suppressed_magnitude(const GradientField& field, const SuppressionConfig& cfg) {
    Band out = field.magnitude;
    for (double& v : out.values()) {
        if (v < cfg.rho()) v = 0.0;
    }
    return out;
}

AnomalyMap suppress(const GradientField& field, const SuppressionConfig& cfg) {
    return AnomalyMap(normalize_unit(suppressed_magnitude(field, cfg)));
}

AnomalyMap combine(const AnomalyMap& regional, const AnomalyMap& global) {
    if (regional.width() != global.width() || regional.height() != global.height()) {
        throw InputError("combine: anomaly map dimensions differ");
    }
    Band sum = regional.band();
    auto dst = sum.values();
    auto src = global.scores();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
    return AnomalyMap(normalize_unit(sum));
}

AnomalyMap anomaly_pipeline(const Band& band, const AnomalyOptions& options) {
    const Band levels = quantize_levels(band, options.levels);
    const AnomalyMap global = global_anomaly(levels);
    const GradientField field = gradient_field(levels);
    const AnomalyMap regional = options.suppression_enabled ? suppress(field, options.suppression)
                                                            : AnomalyMap(normalize_unit(field.magnitude));
    return combine(regional, global);
}

}  // namespace shipprop
