#include "shipprop/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <thread>

#include "shipprop/json_io.hpp"

namespace shipprop {

std::string Variant::name() const {
    return std::string(bands == BandSelection::Pan ? "PAN" : "PANIR") + (suppression ? "-WTAS" : "-WOTAS");
}

Variant parse_variant(std::string_view name) {
    std::string upper(name);
    std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return std::toupper(c); });
    for (const auto& v : all_variants()) {
        if (v.name() == upper) return v;
    }
    throw InputError("unknown variant '" + std::string(name) + "' (expected PAN|PANIR-WTAS|WOTAS)");
}

std::vector<Variant> all_variants() {
    return {{BandSelection::Pan, false}, {BandSelection::PanNir, false}, {BandSelection::Pan, true},
            {BandSelection::PanNir, true}};
}

void PipelineConfig::validate() const {
    threshold.validate();
    filter.validate();
    if (morph_iterations < 1) throw InputError("morph_iterations must be >= 1");
    if (anomaly.levels < 2) throw InputError("levels must be >= 2");
}

MultibandImage with_sharpened_ms(const MultibandImage& image, const MultibandImage& ms_low) {
    const Band* pan = image.find("pan");
    if (!pan) throw InputError("image has no 'pan' band");
    if (pan->width() % ms_low.width() != 0 || pan->height() % ms_low.height() != 0 ||
        pan->width() / ms_low.width() != pan->height() / ms_low.height()) {
        throw InputError("MS bands must be an integer factor coarser than pan in both directions");
    }
    const MultibandImage sharp = pansharpen(*pan, ms_low, pan->width() / ms_low.width());
    std::vector<Band> bands;
    std::vector<std::string> roles;
    for (std::size_t k = 0; k < image.band_count(); ++k) {
        if (sharp.find(image.roles()[k]) == nullptr || image.roles()[k] == "pan") {
            bands.push_back(image.band(k));
            roles.push_back(image.roles()[k]);
        }
    }
    for (std::size_t k = 0; k < sharp.band_count(); ++k) {
        if (sharp.roles()[k] == "pan") continue;
        bands.push_back(sharp.band(k));
        roles.push_back(sharp.roles()[k]);
    }
    return MultibandImage(std::move(bands), std::move(roles));
}

Band detector_input(const MultibandImage& image, BandSelection bands) {
    const Band* pan = image.find("pan");
    if (!pan) throw InputError("image has no 'pan' band");
    if (bands == BandSelection::Pan) return *pan;

    const Band* nir = image.find("nir");
    if (!nir) throw InputError("pan+nir selection needs a 'nir' band");
    const MultibandImage stack({*pan, *nir}, {"pan", "nir"});
    return first_component(stack, fit_pca(stack));
}

Detection detect(const MultibandImage& image, const PipelineConfig& config, const std::optional<BinaryMask>& land_mask) {
    config.validate();
    const Band input = detector_input(image, config.bands);
    AnomalyMap anomaly = anomaly_pipeline(input, config.anomaly);
    Segmentation seg = apply_threshold(anomaly, config.threshold);
    BinaryMask mask = morphological_open(seg.mask, config.morph_iterations);
    if (land_mask) {
        if (land_mask->width() != mask.width() || land_mask->height() != mask.height()) {
            throw InputError("land mask dimensions differ from the image");
        }
        for (int y = 0; y < mask.height(); ++y) {
            for (int x = 0; x < mask.width(); ++x) {
                if (land_mask->at(x, y)) mask.set(x, y, false);
            }
        }
    }
    std::vector<Proposal> proposals = extract_proposals(mask, anomaly, config.filter);
    return {std::move(anomaly), std::move(seg), std::move(mask), std::move(proposals)};
}

std::vector<BandContrast> contrast_by_band(const MultibandImage& image, const GroundTruth& truth) {
    if (truth.annotations.empty()) throw InputError("contrast analysis needs at least one annotated ship");
    const int w = image.width();
    const int h = image.height();
    const std::vector<PixelSet> ships = rasterize(truth, w, h);
    BinaryMask all(w, h);
    for (const auto& s : ships) {
        for (const auto& p : s) all.set(p.x, p.y, true);
    }
    std::vector<BinaryMask> ship_masks;
    std::vector<BinaryMask> rings;
    for (const auto& s : ships) {
        BinaryMask m(w, h);
        for (const auto& p : s) m.set(p.x, p.y, true);
        ship_masks.push_back(std::move(m));
        rings.push_back(ring_mask(s, w, h, kBackgroundRingPx, all));
    }

    std::vector<BandContrast> out;
    for (std::size_t k = 0; k < image.band_count(); ++k) {
        BandContrast bc;
        bc.role = image.roles()[k];
        for (std::size_t i = 0; i < ships.size(); ++i) {
            bc.ships.push_back(contrast_report(image.band(k), ship_masks[i], rings[i], bc.role));
            bc.mean_mrc += bc.ships.back().c_m;
            bc.mean_fqrc += bc.ships.back().c_q1;
        }
        bc.mean_mrc /= static_cast<double>(ships.size());
        bc.mean_fqrc /= static_cast<double>(ships.size());
        out.push_back(std::move(bc));
    }
    return out;
}

// ---------------------------------------------------------------------------

const BenchCell& BenchResult::cell(const Variant& v, ThresholdMethod m) const {
    for (const auto& c : cells) {
        if (c.variant == v && c.method == m) return c;
    }
    throw InputError("no bench cell for " + v.name() + "/" + std::string(to_string(m)));
}

const VariantSummary& BenchResult::summary(const Variant& v) const {
    for (const auto& s : summaries) {
        if (s.variant == v) return s;
    }
    throw InputError("no bench summary for " + v.name());
}

std::pair<double, double> mean_and_sd(std::span<const double> values) {
    if (values.empty()) return {0.0, 0.0};
    const double n = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    if (values.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / (n - 1.0))};
}

BenchResult run_bench(std::span<const BenchScene> scenes, std::span<const Variant> variants,
                      std::span<const ThresholdMethod> methods, const PipelineConfig& base,
                      std::span<const double> t_grid, unsigned threads) {
    base.validate();
    const std::size_t n_cells = variants.size() * methods.size();
    // per_scene[s][c]: counts of cell c on scene s.
    std::vector<std::vector<EvalCounts>> per_scene(scenes.size());
    std::vector<std::string> errors(scenes.size());

    auto run_scene = [&](std::size_t s) {
        try {
            const auto& scene = scenes[s];
            const std::vector<PixelSet> truths = rasterize(scene.truth, scene.image.width(), scene.image.height());
            auto& out = per_scene[s];
            out.reserve(n_cells);
            for (const auto& v : variants) {
                PipelineConfig cfg = base;
                cfg.apply(v);
                // Fusion and anomaly do not depend on the threshold method.
                const Band input = detector_input(scene.image, cfg.bands);
                const AnomalyMap anomaly = anomaly_pipeline(input, cfg.anomaly);
                for (auto m : methods) {
                    cfg.threshold.method = m;
                    const Segmentation seg = apply_threshold(anomaly, cfg.threshold);
                    const BinaryMask mask = morphological_open(seg.mask, cfg.morph_iterations);
                    const auto proposals = extract_proposals(mask, anomaly, cfg.filter);
                    out.push_back(count_matches(proposals, truths, t_grid));
                }
            }
        } catch (const std::exception& e) {
            errors[s] = scenes[s].name + ": " + e.what();
        }
    };

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(scenes.size(), 1)));
    {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (unsigned i = 0; i < threads; ++i) {
            pool.emplace_back([&] {
                for (std::size_t s = next++; s < scenes.size(); s = next++) run_scene(s);
            });
        }
    }
    for (const auto& e : errors) {
        if (!e.empty()) throw InputError("bench scene failed: " + e);
    }

    BenchResult result;
    result.t_grid.assign(t_grid.begin(), t_grid.end());
    result.variants.assign(variants.begin(), variants.end());
    result.methods.assign(methods.begin(), methods.end());
    result.scene_count = scenes.size();
    std::size_t c = 0;
    for (const auto& v : variants) {
        std::vector<double> ars;
        for (auto m : methods) {
            EvalCounts total;
            total.detected_at.assign(t_grid.size(), 0);
            for (const auto& scene_counts : per_scene) total += scene_counts[c];
            BenchCell cell{v, m, total, summarize(total, t_grid)};
            ars.push_back(cell.report.average_recall);
            result.cells.push_back(std::move(cell));
            ++c;
        }
        const auto [mean, sd] = mean_and_sd(ars);
        result.summaries.push_back({v, mean, sd});
    }
    return result;
}

std::vector<BenchScene> synth_scenes(const SceneFamily& family, std::uint64_t seed0, int count) {
    std::vector<BenchScene> scenes;
    scenes.reserve(static_cast<std::size_t>(std::max(count, 0)));
    for (int i = 0; i < count; ++i) {
        const std::uint64_t seed = seed0 + static_cast<std::uint64_t>(i);
        Scene s = generate(random_scene_spec(family, seed));
        scenes.push_back({"scene_" + std::to_string(seed), std::move(s.image), std::move(s.truth)});
    }
    return scenes;
}

std::vector<BenchScene> load_scene_dir(const std::string& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw InputError("scene directory not found: " + dir);
    std::vector<fs::path> subdirs;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_directory() && fs::exists(entry.path() / "manifest.json") && fs::exists(entry.path() / "gt.json")) {
            subdirs.push_back(entry.path());
        }
    }
    std::sort(subdirs.begin(), subdirs.end());
    if (subdirs.empty()) throw InputError("no scenes (manifest.json + gt.json) under " + dir);
    std::vector<BenchScene> scenes;
    for (const auto& p : subdirs) {
        scenes.push_back({p.filename().string(), read_manifest(p / "manifest.json"),
                          ground_truth_from_json(read_json_file(p / "gt.json"))});
    }
    return scenes;
}

std::string format_bench_table(const BenchResult& result) {
    constexpr int kCol = 16;
    std::ostringstream os;
    os << std::fixed << std::setprecision(2);
    os << "Average recall (%) over " << result.scene_count << " scenes\n";
    os << std::left << std::setw(12) << "";
    for (const auto& v : result.variants) os << std::right << std::setw(kCol) << v.name();
    os << '\n';
    for (auto m : result.methods) {
        os << std::left << std::setw(12) << to_string(m);
        for (const auto& v : result.variants) {
            os << std::right << std::setw(kCol) << 100.0 * result.cell(v, m).report.average_recall;
        }
        os << '\n';
    }
    os << std::left << std::setw(12) << "#mean+SD";
    for (const auto& v : result.variants) {
        const auto& s = result.summary(v);
        std::ostringstream cell;
        cell << std::fixed << std::setprecision(2) << 100.0 * s.mean_ar << " (+-" << 100.0 * s.sd_ar << ")";
        os << std::right << std::setw(kCol) << cell.str();
    }
    os << '\n';
    return os.str();
}

}  // namespace shipprop
