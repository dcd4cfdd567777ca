#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "shipprop/json_io.hpp"
#include "shipprop/pipeline.hpp"

namespace fs = std::filesystem;
using namespace shipprop;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitDegenerate = 3;

// Flags shared by detect and bench. Empty strings mean "not given", so
// command-line values only override the config file when present.
struct ConfigFlags {
    std::string config_path;
    std::string variant;
    std::string suppression;
    std::string threshold;
    std::string land_mask;

    void add_to(CLI::App& cmd, bool with_land_mask) {
        cmd.add_option("--config", config_path, "pipeline config JSON")->check(CLI::ExistingFile);
        cmd.add_option("--variant", variant, "band input")->check(CLI::IsMember({"pan", "panir"}));
        cmd.add_option("--suppression", suppression, "texture suppression")->check(CLI::IsMember({"on", "off"}));
        cmd.add_option("--threshold", threshold, "threshold method")
            ->check(CLI::IsMember({"otsu", "isodata", "yen", "mean", "sauvola"}));
        if (with_land_mask) cmd.add_option("--land-mask", land_mask, "PGM mask, nonzero = land");
    }

    PipelineConfig resolve() const {
        PipelineConfig cfg = config_path.empty() ? PipelineConfig{} : config_from_json(read_json_file(config_path));
        if (!variant.empty()) cfg.bands = variant == "pan" ? BandSelection::Pan : BandSelection::PanNir;
        if (!suppression.empty()) cfg.anomaly.suppression_enabled = suppression == "on";
        if (!threshold.empty()) cfg.threshold.method = parse_threshold_method(threshold);
        if (!land_mask.empty()) cfg.land_mask_path = land_mask;
        cfg.validate();
        return cfg;
    }
};

void write_text(const std::string& text, const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    out << text;
}

void emit_json(const Json& doc, const std::string& out) {
    if (out.empty()) {
        std::cout << doc.dump(2) << "\n";
    } else {
        write_json_file(doc, out);
    }
}

// Grey copy of the detector input with every proposal box drawn at 255.
Band overlay(const Band& base, const std::vector<Proposal>& proposals) {
    Band img = quantize_levels(base, 200);
    for (const auto& p : proposals) {
        const double a = p.box.angle_deg * std::numbers::pi / 180.0;
        const double ux = std::cos(a), uy = std::sin(a);
        const double hl = p.box.length / 2.0, hw = p.box.width / 2.0;
        const double cx[4] = {-hl, hl, hl, -hl}, cy[4] = {-hw, -hw, hw, hw};
        for (int k = 0; k < 4; ++k) {
            const int n = (k + 1) % 4;
            const double x0 = p.box.cx + cx[k] * ux - cy[k] * uy, y0 = p.box.cy + cx[k] * uy + cy[k] * ux;
            const double x1 = p.box.cx + cx[n] * ux - cy[n] * uy, y1 = p.box.cy + cx[n] * uy + cy[n] * ux;
            const int steps = static_cast<int>(std::ceil(4.0 * std::hypot(x1 - x0, y1 - y0))) + 1;
            for (int s = 0; s <= steps; ++s) {
                const double t = static_cast<double>(s) / steps;
                const int x = static_cast<int>(std::lround(x0 + t * (x1 - x0)));
                const int y = static_cast<int>(std::lround(y0 + t * (y1 - y0)));
                if (x >= 0 && y >= 0 && x < img.width() && y < img.height()) img.at(x, y) = 255.0;
            }
        }
    }
    return img;
}

std::vector<BenchScene> bench_scenes(const std::string& scene_dir, const std::string& family, std::uint64_t seed,
                                     int count) {
    if (!scene_dir.empty() && !family.empty()) throw InputError("give either a scene directory or --synth, not both");
    if (!family.empty()) return synth_scenes(family_preset(family), seed, count);
    if (scene_dir.empty()) throw InputError("bench needs a scene directory or --synth <family>");
    return load_scene_dir(scene_dir);
}

std::string scene_name(int index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "scene_%04d", index);
    return buf;
}

void write_scene(const Scene& scene, const SceneSpec& spec, const fs::path& dir) {
    fs::create_directories(dir);
    write_manifest(scene.image, dir / "manifest.json");
    write_json_file(ground_truth_to_json(scene.truth), dir / "gt.json");
    write_json_file(scene_spec_to_json(spec), dir / "spec.json");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ship proposals from optical satellite imagery"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "shipprop 0.1.0");

    // detect
    auto* detect_cmd = app.add_subcommand("detect", "extract ship proposals from a scene");
    std::string manifest, ms_manifest, out, mask_out, overlay_out;
    ConfigFlags detect_flags;
    detect_cmd->add_option("manifest", manifest, "scene manifest JSON")->required();
    detect_cmd->add_option("--ms", ms_manifest, "low-resolution MS manifest to pan-sharpen first");
    detect_cmd->add_option("--out", out, "proposals JSON (stdout if omitted)");
    detect_cmd->add_option("--mask", mask_out, "write the final binary mask as PGM");
    detect_cmd->add_option("--overlay", overlay_out, "write the input band with proposal boxes as PGM");
    detect_flags.add_to(*detect_cmd, true);

    // contrast
    auto* contrast_cmd = app.add_subcommand("contrast", "per-band ship contrast against the surrounding water");
    std::string gt_path;
    contrast_cmd->add_option("manifest", manifest, "scene manifest JSON")->required();
    contrast_cmd->add_option("gt", gt_path, "ground truth JSON")->required();
    contrast_cmd->add_option("--out", out, "report JSON (stdout if omitted)");

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "score proposals against ground truth");
    std::string proposals_path;
    int width = 256, height = 256;
    eval_cmd->add_option("proposals", proposals_path, "proposals JSON")->required();
    eval_cmd->add_option("gt", gt_path, "ground truth JSON")->required();
    eval_cmd->add_option("--width", width, "frame width for boxes without pixel lists")->capture_default_str();
    eval_cmd->add_option("--height", height, "frame height")->capture_default_str();
    eval_cmd->add_option("--out", out, "metrics JSON (stdout if omitted)");

    // bench
    auto* bench_cmd = app.add_subcommand("bench", "run every variant and threshold method over a scene set");
    std::string scene_dir, family, table_out;
    std::vector<std::string> variant_names, method_names{"otsu", "isodata", "yen"};
    std::uint64_t seed = 1000;
    int count = 100;
    unsigned threads = 0;
    ConfigFlags bench_flags;
    bench_cmd->add_option("scenes", scene_dir, "directory of scene subdirectories (manifest.json + gt.json)");
    bench_cmd->add_option("--synth", family, "generate scenes from a family instead: high, clutter, low");
    bench_cmd->add_option("--count", count, "number of generated scenes")->capture_default_str()->check(CLI::PositiveNumber);
    bench_cmd->add_option("--seed", seed, "first scene seed")->capture_default_str();
    bench_cmd->add_option("--variants", variant_names, "e.g. panir-wtas pan-wotas (default: all four)");
    bench_cmd->add_option("--methods", method_names, "threshold methods")->capture_default_str();
    bench_cmd->add_option("--threads", threads, "worker threads, 0 = hardware");
    bench_cmd->add_option("--out", out, "result JSON");
    bench_cmd->add_option("--table", table_out, "also write the text table to this file");
    bench_flags.add_to(*bench_cmd, false);

    // synth
    auto* synth_cmd = app.add_subcommand("synth", "generate synthetic scenes with ground truth");
    std::string spec_path;
    std::string synth_family = "high";
    int synth_count = 1;
    synth_cmd->add_option("--spec", spec_path, "scene spec JSON (otherwise drawn from --family)");
    synth_cmd->add_option("--family", synth_family, "high, clutter or low")->capture_default_str();
    synth_cmd->add_option("--count", synth_count, "number of scenes")->capture_default_str()->check(CLI::PositiveNumber);
    synth_cmd->add_option("--seed", seed, "seed of the first scene")->capture_default_str();
    synth_cmd->add_option("--out", out, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInput;
    }

    try {
        if (detect_cmd->parsed()) {
            const PipelineConfig cfg = detect_flags.resolve();
            MultibandImage image = read_manifest(manifest);
            if (!ms_manifest.empty()) image = with_sharpened_ms(image, read_manifest(ms_manifest));
            std::optional<BinaryMask> land;
            if (cfg.land_mask_path) land = read_mask_pgm(*cfg.land_mask_path);
            const Detection d = detect(image, cfg, land);
            for (const auto& note : d.segmentation.notes) std::cerr << "note: " << note << "\n";
            emit_json(proposals_to_json(d.proposals), out);
            if (!mask_out.empty()) write_mask_pgm(d.mask, mask_out);
            if (!overlay_out.empty()) write_pgm(overlay(detector_input(image, cfg.bands), d.proposals), overlay_out, 255);
        } else if (contrast_cmd->parsed()) {
            const MultibandImage image = read_manifest(manifest);
            const GroundTruth gt = ground_truth_from_json(read_json_file(gt_path));
            emit_json(contrast_to_json(contrast_by_band(image, gt)), out);
        } else if (eval_cmd->parsed()) {
            if (width < 1 || height < 1) throw InputError("frame size must be positive");
            const auto proposals = proposals_from_json(read_json_file(proposals_path), width, height);
            const auto truths = rasterize(ground_truth_from_json(read_json_file(gt_path)), width, height);
            const auto grid = default_t_grid();
            emit_json(eval_report_to_json(evaluate(proposals, truths, grid)), out);
        } else if (bench_cmd->parsed()) {
            const PipelineConfig base = bench_flags.resolve();
            std::vector<Variant> variants;
            for (const auto& name : variant_names) variants.push_back(parse_variant(name));
            if (variants.empty()) {
                for (const auto& v : all_variants()) {
                    if (!bench_flags.variant.empty() && (v.bands == BandSelection::Pan) != (bench_flags.variant == "pan"))
                        continue;
                    if (!bench_flags.suppression.empty() && v.suppression != (bench_flags.suppression == "on")) continue;
                    variants.push_back(v);
                }
            }
            std::vector<ThresholdMethod> methods;
            for (const auto& name : method_names) methods.push_back(parse_threshold_method(name));
            const auto scenes = bench_scenes(scene_dir, family, seed, count);
            if (scenes.empty()) throw InputError("no scenes to benchmark");
            const BenchResult result = run_bench(scenes, variants, methods, base, default_t_grid(), threads);
            const std::string table = format_bench_table(result);
            std::cout << table;
            if (!out.empty()) write_json_file(bench_to_json(result), out);
            if (!table_out.empty()) write_text(table, table_out);
        } else if (synth_cmd->parsed()) {
            const fs::path dir = out;
            if (!spec_path.empty()) {
                SceneSpec spec = scene_spec_from_json(read_json_file(spec_path));
                if (synth_cmd->count("--seed") > 0) spec.seed = seed;
                write_scene(generate(spec), spec, dir);
            } else {
                const SceneFamily fam = family_preset(synth_family);
                for (int i = 0; i < synth_count; ++i) {
                    const SceneSpec spec = random_scene_spec(fam, seed + static_cast<std::uint64_t>(i));
                    write_scene(generate(spec), spec, synth_count == 1 ? dir : dir / scene_name(i));
                }
            }
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.kind() == ErrorKind::Degenerate ? kExitDegenerate : kExitInput;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return 0;
}
