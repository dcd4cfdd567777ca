#include "shipprop/segment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace shipprop {

std::string_view to_string(ThresholdMethod method) noexcept {
    switch (method) {
        case ThresholdMethod::Otsu: return "otsu";
        case ThresholdMethod::IsoData: return "isodata";
        case ThresholdMethod::Yen: return "yen";
        case ThresholdMethod::Mean: return "mean";
        case ThresholdMethod::Sauvola: return "sauvola";
    }
    return "unknown";
}

ThresholdMethod parse_threshold_method(std::string_view name) {
    for (auto m : {ThresholdMethod::Otsu, ThresholdMethod::IsoData, ThresholdMethod::Yen, ThresholdMethod::Mean,
                   ThresholdMethod::Sauvola}) {
        if (to_string(m) == name) return m;
    }
    throw InputError("unknown threshold method '" + std::string(name) + "'");
}

void ThresholdConfig::validate() const {
    if (histogram_bins < 2) throw InputError("threshold bins must be >= 2");
    if (sauvola.window < 3 || sauvola.window % 2 == 0) throw InputError("sauvola window must be odd and >= 3");
    if (!(sauvola.k > 0.0 && sauvola.k <= 1.0)) throw InputError("sauvola k must lie in (0, 1]");
    if (!(sauvola.r > 0.0)) throw InputError("sauvola r must be positive");
}

Histogram level_histogram(const Band& levels, int levels_count) {
    Histogram hist(static_cast<std::size_t>(levels_count), 0);
    for (double v : levels.values()) {
        if (v < 0 || v >= levels_count || v != std::floor(v)) {
            throw InputError("histogram input is not an integer level band");
        }
        ++hist[static_cast<std::size_t>(v)];
    }
    return hist;
}

namespace {

void require_bimodal_support(std::span<const std::uint64_t> hist) {
    const auto occupied = std::count_if(hist.begin(), hist.end(), [](std::uint64_t c) { return c > 0; });
    if (occupied < 2) throw DegenerateError("degenerate histogram: fewer than two occupied levels");
}

}  // namespace

int threshold_otsu(std::span<const std::uint64_t> hist) {
    require_bimodal_support(hist);
    double total = 0.0;
    double total_sum = 0.0;
    for (std::size_t i = 0; i < hist.size(); ++i) {
        total += static_cast<double>(hist[i]);
        total_sum += static_cast<double>(i) * static_cast<double>(hist[i]);
    }

    // w0 w1 (mu0 - mu1)^2 = (n0 * s1 - n1 * s0)^2 / (N^2 n0 n1); N^2 is constant.
    double n0 = 0.0;
    double s0 = 0.0;
    double best = -1.0;
    int best_t = 0;
    for (std::size_t t = 0; t < hist.size(); ++t) {
        n0 += static_cast<double>(hist[t]);
        s0 += static_cast<double>(t) * static_cast<double>(hist[t]);
        const double n1 = total - n0;
        const double s1 = total_sum - s0;
        double score = 0.0;
        if (n0 > 0.0 && n1 > 0.0) {
            const double d = n0 * s1 - n1 * s0;
            score = d * d / (n0 * n1);
        }
        if (score > best) {
            best = score;
            best_t = static_cast<int>(t);
        }
    }
    return best_t;
}

int threshold_isodata(std::span<const std::uint64_t> hist) {
    require_bimodal_support(hist);
    const std::size_t n = hist.size();
    std::vector<double> count(n + 1, 0.0);  // prefix sums
    std::vector<double> moment(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        count[i + 1] = count[i] + static_cast<double>(hist[i]);
        moment[i + 1] = moment[i] + static_cast<double>(i) * static_cast<double>(hist[i]);
    }

    double t = moment[n] / count[n];
    for (int iter = 0; iter < 1000; ++iter) {
        // Levels <= t are below. t >= 0 always since levels are non-negative.
        const auto split = std::min(n, static_cast<std::size_t>(std::floor(t)) + 1);
        const double n_below = count[split];
        const double n_above = count[n] - n_below;
        if (n_below == 0.0 || n_above == 0.0) break;
        const double mu_below = moment[split] / n_below;
        const double mu_above = (moment[n] - moment[split]) / n_above;
        const double next = (mu_below + mu_above) / 2.0;
        const bool settled = std::abs(next - t) < 0.5;
        t = next;
        if (settled) break;
    }
    return static_cast<int>(std::floor(t));
}

int threshold_yen(std::span<const std::uint64_t> hist) {
    require_bimodal_support(hist);
    double total = 0.0;
    double total_sq = 0.0;
    for (auto c : hist) {
        total += static_cast<double>(c);
        total_sq += static_cast<double>(c) * static_cast<double>(c);
    }

    // With p_i = h_i / N the N factors cancel:
    // TC(t) = -ln(sq0 * sq1 / (c0^2 * c1^2)).
    double c0 = 0.0;
    double sq0 = 0.0;
    double best = -std::numeric_limits<double>::infinity();
    int best_t = -1;
    for (std::size_t t = 0; t + 1 < hist.size(); ++t) {
        const auto h = static_cast<double>(hist[t]);
        c0 += h;
        sq0 += h * h;
        const double c1 = total - c0;
        const double sq1 = total_sq - sq0;
        if (c0 == 0.0 || c1 == 0.0) continue;
        const double score = -(std::log(sq0) + std::log(sq1) - 2.0 * std::log(c0) - 2.0 * std::log(c1));
        if (score > best) {
            best = score;
            best_t = static_cast<int>(t);
        }
    }
    return best_t;
}

int threshold_mean(std::span<const std::uint64_t> hist) {
    std::uint64_t total = 0;
    std::uint64_t sum = 0;
    for (std::size_t i = 0; i < hist.size(); ++i) {
        total += hist[i];
        sum += static_cast<std::uint64_t>(i) * hist[i];
    }
    if (total == 0) throw DegenerateError("degenerate histogram: no pixels");
    return static_cast<int>(sum / total);
}

SauvolaResult threshold_sauvola(const AnomalyMap& map, const SauvolaParams& params) {
    const int w = map.width();
    const int h = map.height();
    SauvolaResult result{BinaryMask(w, h), params.window, std::nullopt};
    if (params.window > w || params.window > h) {
        int clamped = std::min(w, h);
        if (clamped % 2 == 0) --clamped;
        result.window_used = std::max(clamped, 1);
        result.warning = "sauvola window " + std::to_string(params.window) + " exceeds the image; clamped to " +
                         std::to_string(result.window_used);
    }
    const int radius = result.window_used / 2;

    // Integral images with a zero row/column in front.
    const auto stride = static_cast<std::size_t>(w) + 1;
    std::vector<double> sum(stride * (static_cast<std::size_t>(h) + 1), 0.0);
    std::vector<double> sum_sq(sum.size(), 0.0);
    for (int y = 0; y < h; ++y) {
        double row = 0.0;
        double row_sq = 0.0;
        for (int x = 0; x < w; ++x) {
            const double v = map.at(x, y);
            row += v;
            row_sq += v * v;
            const std::size_t i = (static_cast<std::size_t>(y) + 1) * stride + static_cast<std::size_t>(x) + 1;
            sum[i] = sum[i - stride] + row;
            sum_sq[i] = sum_sq[i - stride] + row_sq;
        }
    }
    auto box = [&](const std::vector<double>& ii, int x0, int y0, int x1, int y1) {
        // inclusive pixel bounds
        const auto at = [&](int x, int y) {
            return ii[static_cast<std::size_t>(y) * stride + static_cast<std::size_t>(x)];
        };
        return at(x1 + 1, y1 + 1) - at(x0, y1 + 1) - at(x1 + 1, y0) + at(x0, y0);
    };

    for (int y = 0; y < h; ++y) {
        const int y0 = std::max(0, y - radius);
        const int y1 = std::min(h - 1, y + radius);
        for (int x = 0; x < w; ++x) {
            const int x0 = std::max(0, x - radius);
            const int x1 = std::min(w - 1, x + radius);
            const double n = static_cast<double>(x1 - x0 + 1) * static_cast<double>(y1 - y0 + 1);
            const double mean = box(sum, x0, y0, x1, y1) / n;
            const double var = std::max(0.0, box(sum_sq, x0, y0, x1, y1) / n - mean * mean);
            const double threshold = mean * (1.0 + params.k * (std::sqrt(var) / params.r - 1.0));
            result.mask.set(x, y, map.at(x, y) > threshold);
        }
    }
    return result;
}

Segmentation apply_threshold(const AnomalyMap& map, const ThresholdConfig& cfg) {
    cfg.validate();
    if (cfg.method == ThresholdMethod::Sauvola) {
        SauvolaResult s = threshold_sauvola(map, cfg.sauvola);
        Segmentation seg{std::move(s.mask), std::nullopt, false, {}};
        if (s.warning) seg.notes.push_back(*s.warning);
        return seg;
    }

    const Band levels = quantize_levels(map.band(), cfg.histogram_bins);
    const Histogram hist = level_histogram(levels, cfg.histogram_bins);
    Segmentation seg{BinaryMask(map.width(), map.height()), std::nullopt, false, {}};
    int t = 0;
    try {
        switch (cfg.method) {
            case ThresholdMethod::Otsu: t = threshold_otsu(hist); break;
            case ThresholdMethod::IsoData: t = threshold_isodata(hist); break;
            case ThresholdMethod::Yen: t = threshold_yen(hist); break;
            case ThresholdMethod::Mean: t = threshold_mean(hist); break;
            case ThresholdMethod::Sauvola: break;
        }
    } catch (const DegenerateError& e) {
        seg.degenerate = true;
        seg.notes.emplace_back(e.what());
        return seg;
    }
    seg.level = t;
    auto src = levels.values();
    for (int y = 0; y < map.height(); ++y) {
        for (int x = 0; x < map.width(); ++x) seg.mask.set(x, y, src[levels.index(x, y)] > t);
    }
    return seg;
}

// ---------------------------------------------------------------------------

BinaryMask erode(const BinaryMask& mask) {
    BinaryMask out(mask.width(), mask.height());
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            bool keep = true;
            for (int dy = -1; dy <= 1 && keep; ++dy) {
                for (int dx = -1; dx <= 1 && keep; ++dx) {
                    keep = mask.contains(x + dx, y + dy) && mask.at(x + dx, y + dy);
                }
            }
            out.set(x, y, keep);
        }
    }
    return out;
}

BinaryMask dilate(const BinaryMask& mask) {
    BinaryMask out(mask.width(), mask.height());
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            bool hit = false;
            for (int dy = -1; dy <= 1 && !hit; ++dy) {
                for (int dx = -1; dx <= 1 && !hit; ++dx) {
                    hit = mask.contains(x + dx, y + dy) && mask.at(x + dx, y + dy);
                }
            }
            out.set(x, y, hit);
        }
    }
    return out;
}

BinaryMask morphological_open(const BinaryMask& mask, int iterations) {
    if (iterations < 1) throw InputError("morphological opening needs at least one iteration");
    BinaryMask out = mask;
    for (int i = 0; i < iterations; ++i) out = erode(out);
    for (int i = 0; i < iterations; ++i) out = dilate(out);
    return out;
}

}  // namespace shipprop
