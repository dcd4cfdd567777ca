#include <doctest.h>

#include "shipprop/json_io.hpp"
#include "shipprop/pipeline.hpp"
#include "temp_dir.hpp"

using namespace shipprop;
using doctest::Approx;

namespace {

Scene quiet_one_ship() {
    SceneSpec spec;
    spec.width = 128;
    spec.height = 128;
    spec.seed = 11;
    spec.background.noise_sd = 0.0;
    ShipSpec s;
    s.cx = 64;
    s.cy = 60;
    s.length = 36;
    s.width = 12;
    s.angle_deg = 30;
    s.target_mcr = 2.5;
    s.intra_ship_sd = 0.0;
    spec.ships.push_back(s);
    return generate(spec);
}

}  // namespace

TEST_CASE("variants") {
    CHECK(parse_variant("panir-wtas") == Variant{BandSelection::PanNir, true});
    CHECK(parse_variant("PAN-WOTAS") == Variant{BandSelection::Pan, false});
    CHECK_THROWS_AS(parse_variant("rgb"), InputError);
    CHECK(all_variants().size() == 4);
    PipelineConfig cfg;
    cfg.apply({BandSelection::Pan, false});
    CHECK(cfg.variant().name() == "PAN-WOTAS");
}

TEST_CASE("detector input") {
    const Scene s = quiet_one_ship();
    CHECK(detector_input(s.image, BandSelection::Pan) == s.image.band(0));
    const Band pc = detector_input(s.image, BandSelection::PanNir);
    CHECK(pc.width() == 128);
    const MultibandImage pan_only({s.image.band(0)}, {"pan"});
    CHECK_THROWS_AS(detector_input(pan_only, BandSelection::PanNir), InputError);
}

TEST_CASE("one flat ship on flat water is found") {
    const Scene s = quiet_one_ship();
    PipelineConfig cfg;
    const Detection d = detect(s.image, cfg);
    REQUIRE(d.proposals.size() == 1);
    CHECK(iou(d.proposals[0].pixels, s.ship_pixels[0]) > 0.5);
}

TEST_CASE("suppression flag is the only difference between WTAS and WOTAS") {
    PipelineConfig a;
    PipelineConfig b = a;
    b.anomaly.suppression_enabled = false;
    Json ja = config_to_json(a), jb = config_to_json(b);
    CHECK(ja["suppression"] != jb["suppression"]);
    ja.erase("suppression");
    jb.erase("suppression");
    CHECK(ja == jb);
}

TEST_CASE("land mask removes detections") {
    const Scene s = quiet_one_ship();
    PipelineConfig cfg;
    const BinaryMask land(128, 128, true);
    CHECK(detect(s.image, cfg, land).proposals.empty());
    CHECK_THROWS_AS(detect(s.image, cfg, BinaryMask(4, 4)), InputError);
}

TEST_CASE("contrast by band") {
    SceneSpec spec;
    spec.width = 96;
    spec.height = 96;
    spec.seed = 2;
    ShipSpec ship;
    ship.cx = 48;
    ship.cy = 48;
    ship.length = 30;
    ship.width = 10;
    ship.target_mcr = 1.5;
    ship.nir_mcr_boost = 1.3;
    spec.ships.push_back(ship);
    const Scene s = generate(spec);
    const auto bands = contrast_by_band(s.image, s.truth);
    REQUIRE(bands.size() == 2);
    CHECK(bands[1].mean_mrc / bands[0].mean_mrc == Approx(1.3).epsilon(0.03));
    CHECK_THROWS_AS(contrast_by_band(s.image, GroundTruth{}), InputError);
}

TEST_CASE("sharpened ms replaces the nir band") {
    const Scene s = quiet_one_ship();
    const MultibandImage ms({box_downsample(s.image.band(1), 4)}, {"nir"});
    const MultibandImage out = with_sharpened_ms(s.image, ms);
    REQUIRE(out.band_count() == 2);
    CHECK(out.roles()[0] == "pan");
    CHECK(out.roles()[1] == "nir");
    CHECK_THROWS_AS(with_sharpened_ms(s.image, MultibandImage({Band(30, 30)}, {"nir"})), InputError);
}

TEST_CASE("bench grid shape and determinism") {
    SceneFamily fam;
    const auto scenes = synth_scenes(fam, 500, 10);
    const std::vector<Variant> variants{{BandSelection::Pan, true}, {BandSelection::PanNir, true}};
    const std::vector<ThresholdMethod> methods{ThresholdMethod::Otsu, ThresholdMethod::IsoData, ThresholdMethod::Yen};
    const auto grid = default_t_grid();
    const BenchResult a = run_bench(scenes, variants, methods, PipelineConfig{}, grid, 4);
    const BenchResult b = run_bench(scenes, variants, methods, PipelineConfig{}, grid, 1);
    CHECK(a.cells.size() == 6);
    CHECK(a.summaries.size() == 2);
    CHECK(bench_to_json(a).dump() == bench_to_json(b).dump());
    const std::string table = format_bench_table(a);
    CHECK(table.find("#mean+SD") != std::string::npos);

    std::vector<double> ars;
    for (auto m : methods) ars.push_back(a.cell(variants[1], m).report.average_recall);
    const auto [mean, sd] = mean_and_sd(ars);
    CHECK(a.summary(variants[1]).mean_ar == Approx(mean));
    CHECK(a.summary(variants[1]).sd_ar == Approx(sd));
}

TEST_CASE("sample standard deviation") {
    const std::vector<double> v{33.13, 33.23, 34.54};
    CHECK(mean_and_sd(v).first == Approx(33.633).epsilon(1e-4));
    CHECK(mean_and_sd(v).second == Approx(0.79).epsilon(0.01));
}

TEST_CASE("config json") {
    const Json doc = Json::parse(R"({"variant":"pan","q":3,"tau_deg":30,"threshold_method":"sauvola",
        "sauvola":{"window":21,"k":0.3},"morph_iterations":1,"filter":{"max_ratio":10}})");
    const PipelineConfig cfg = config_from_json(doc);
    CHECK(cfg.bands == BandSelection::Pan);
    CHECK(cfg.anomaly.suppression.rho() == Approx(3.0 / 0.5));
    CHECK(cfg.threshold.method == ThresholdMethod::Sauvola);
    CHECK(cfg.threshold.sauvola.window == 21);
    CHECK(cfg.morph_iterations == 1);
    CHECK(cfg.filter.max_ratio == 10);
    const PipelineConfig back = config_from_json(config_to_json(cfg));
    CHECK(config_to_json(back) == config_to_json(cfg));
    CHECK_THROWS_AS(config_from_json(Json::parse(R"({"colour":"red"})")), InputError);
    CHECK_THROWS_AS(config_from_json(Json::parse(R"({"bins":"many"})")), InputError);
    CHECK_THROWS_AS(config_from_json(Json::parse(R"({"sauvola":{"window":4}})")), InputError);
}

TEST_CASE("proposal and ground truth json") {
    const Scene s = quiet_one_ship();
    PipelineConfig cfg;
    const Detection d = detect(s.image, cfg);
    const auto back = proposals_from_json(proposals_to_json(d.proposals), 128, 128);
    REQUIRE(back.size() == d.proposals.size());
    CHECK(back[0].pixels == d.proposals[0].pixels);

    Json boxes = proposals_to_json(d.proposals);
    boxes[0].erase("pixels");
    const auto rebuilt = proposals_from_json(boxes, 128, 128);
    CHECK(iou(rebuilt[0].pixels, d.proposals[0].pixels) > 0.7);

    const GroundTruth gt = ground_truth_from_json(ground_truth_to_json(s.truth));
    CHECK(rasterize(gt, 128, 128) == rasterize(s.truth, 128, 128));
    CHECK_THROWS_AS(ground_truth_from_json(Json::parse(R"([{"id":1,"polygon":[[0,0],[1,1]]}])")), InputError);
}

TEST_CASE("scene directory loading") {
    TempDir dir;
    const Scene s = quiet_one_ship();
    std::filesystem::create_directories(dir / "b");
    std::filesystem::create_directories(dir / "a");
    for (const char* name : {"b", "a"}) {
        write_manifest(s.image, dir.path() / name / "manifest.json");
        write_json_file(ground_truth_to_json(s.truth), dir.path() / name / "gt.json");
    }
    const auto scenes = load_scene_dir(dir.path().string());
    REQUIRE(scenes.size() == 2);
    CHECK(scenes[0].name == "a");
    CHECK_THROWS_AS(load_scene_dir((dir / "nothing").string()), InputError);
}

TEST_CASE("mask pgm") {
    TempDir dir;
    BinaryMask m(5, 3);
    m.set(1, 2, true);
    write_mask_pgm(m, dir / "m.pgm");
    CHECK(read_mask_pgm(dir / "m.pgm") == m);
}
