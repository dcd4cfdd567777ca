#include "shipprop/json_io.hpp"

#include <fstream>
#include <set>

namespace shipprop {

Json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    try {
        return Json::parse(in);
    } catch (const Json::exception& e) {
        throw InputError(path.string() + " is not valid JSON: " + e.what());
    }
}

void write_json_file(const Json& doc, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path.string());
    out << doc.dump(2) << '\n';
    if (!out) throw InputError("failed writing " + path.string());
}

namespace {

template <typename T>
T get_as(const Json& doc, const char* key) {
    try {
        return doc.at(key).get<T>();
    } catch (const Json::exception&) {
        throw InputError(std::string("config key '") + key + "' has the wrong type");
    }
}

template <typename T>
void read_opt(const Json& doc, const char* key, T& out) {
    if (doc.contains(key)) out = get_as<T>(doc, key);
}

void reject_unknown(const Json& doc, std::initializer_list<const char*> known, const std::string& where) {
    const std::set<std::string> names(known.begin(), known.end());
    for (const auto& [key, value] : doc.items()) {
        if (!names.count(key)) throw InputError("unknown " + where + " key '" + key + "'");
    }
}

}  // namespace

PipelineConfig config_from_json(const Json& doc) {
    if (!doc.is_object()) throw InputError("config must be a JSON object");
    reject_unknown(doc,
                   {"variant", "q", "tau_deg", "levels", "suppression", "threshold_method", "bins", "sauvola",
                    "morph_iterations", "land_mask", "filter"},
                   "config");
    PipelineConfig cfg;
    if (doc.contains("variant")) {
        const auto v = get_as<std::string>(doc, "variant");
        if (v == "pan") {
            cfg.bands = BandSelection::Pan;
        } else if (v == "panir") {
            cfg.bands = BandSelection::PanNir;
        } else {
            throw InputError("config variant must be 'pan' or 'panir'");
        }
    }
    double q = cfg.anomaly.suppression.q();
    double tau = cfg.anomaly.suppression.tau_deg();
    read_opt(doc, "q", q);
    read_opt(doc, "tau_deg", tau);
    cfg.anomaly.suppression = SuppressionConfig(q, tau);
    read_opt(doc, "levels", cfg.anomaly.levels);
    read_opt(doc, "suppression", cfg.anomaly.suppression_enabled);
    if (doc.contains("threshold_method")) {
        cfg.threshold.method = parse_threshold_method(get_as<std::string>(doc, "threshold_method"));
    }
    read_opt(doc, "bins", cfg.threshold.histogram_bins);
    if (doc.contains("sauvola")) {
        const Json& s = doc["sauvola"];
        if (!s.is_object()) throw InputError("config 'sauvola' must be an object");
        reject_unknown(s, {"window", "k", "r"}, "sauvola");
        read_opt(s, "window", cfg.threshold.sauvola.window);
        read_opt(s, "k", cfg.threshold.sauvola.k);
        read_opt(s, "r", cfg.threshold.sauvola.r);
    }
    read_opt(doc, "morph_iterations", cfg.morph_iterations);
    if (doc.contains("land_mask")) cfg.land_mask_path = get_as<std::string>(doc, "land_mask");
    if (doc.contains("filter")) {
        const Json& f = doc["filter"];
        if (!f.is_object()) throw InputError("config 'filter' must be an object");
        reject_unknown(f, {"min_length", "max_length", "min_width", "max_width", "min_ratio", "max_ratio", "min_area"},
                       "filter");
        read_opt(f, "min_length", cfg.filter.min_length);
        read_opt(f, "max_length", cfg.filter.max_length);
        read_opt(f, "min_width", cfg.filter.min_width);
        read_opt(f, "max_width", cfg.filter.max_width);
        read_opt(f, "min_ratio", cfg.filter.min_ratio);
        read_opt(f, "max_ratio", cfg.filter.max_ratio);
        read_opt(f, "min_area", cfg.filter.min_area);
    }
    cfg.validate();
    return cfg;
}

Json config_to_json(const PipelineConfig& cfg) {
    Json doc = {
        {"variant", cfg.bands == BandSelection::Pan ? "pan" : "panir"},
        {"q", cfg.anomaly.suppression.q()},
        {"tau_deg", cfg.anomaly.suppression.tau_deg()},
        {"levels", cfg.anomaly.levels},
        {"suppression", cfg.anomaly.suppression_enabled},
        {"threshold_method", std::string(to_string(cfg.threshold.method))},
        {"bins", cfg.threshold.histogram_bins},
        {"sauvola", {{"window", cfg.threshold.sauvola.window}, {"k", cfg.threshold.sauvola.k}, {"r", cfg.threshold.sauvola.r}}},
        {"morph_iterations", cfg.morph_iterations},
        {"filter",
         {{"min_length", cfg.filter.min_length},
          {"max_length", cfg.filter.max_length},
          {"min_width", cfg.filter.min_width},
          {"max_width", cfg.filter.max_width},
          {"min_ratio", cfg.filter.min_ratio},
          {"max_ratio", cfg.filter.max_ratio},
          {"min_area", cfg.filter.min_area}}},
    };
    if (cfg.land_mask_path) doc["land_mask"] = *cfg.land_mask_path;
    return doc;
}

GroundTruth ground_truth_from_json(const Json& doc) {
    if (!doc.is_array()) throw InputError("ground truth must be a JSON array");
    GroundTruth gt;
    for (const auto& item : doc) {
        if (!item.is_object() || !item.contains("id") || !item.contains("polygon") || !item["polygon"].is_array()) {
            throw InputError("ground-truth entries need 'id' and 'polygon'");
        }
        Annotation a;
        try {
            a.id = item["id"].get<int>();
            for (const auto& v : item["polygon"]) {
                if (!v.is_array() || v.size() != 2) throw InputError("polygon vertices must be [x, y]");
                a.polygon.push_back({v[0].get<double>(), v[1].get<double>()});
            }
        } catch (const Json::exception& e) {
            throw InputError(std::string("malformed ground-truth entry: ") + e.what());
        }
        if (a.polygon.size() < 3) throw InputError("ground-truth polygon needs at least 3 vertices");
        gt.annotations.push_back(std::move(a));
    }
    return gt;
}

Json ground_truth_to_json(const GroundTruth& gt) {
    Json doc = Json::array();
    for (const auto& a : gt.annotations) {
        Json poly = Json::array();
        for (const auto& p : a.polygon) poly.push_back({p.x, p.y});
        doc.push_back({{"id", a.id}, {"polygon", std::move(poly)}});
    }
    return doc;
}

Json proposals_to_json(std::span<const Proposal> proposals) {
    Json doc = Json::array();
    for (const auto& p : proposals) {
        Json pixels = Json::array();
        for (const auto& px : p.pixels) pixels.push_back({px.x, px.y});
        doc.push_back({{"cx", p.box.cx},
                       {"cy", p.box.cy},
                       {"length", p.box.length},
                       {"width", p.box.width},
                       {"angle_deg", p.box.angle_deg},
                       {"ratio", p.length_width_ratio},
                       {"area_px", p.area_px()},
                       {"score", p.score},
                       {"pixels", std::move(pixels)}});
    }
    return doc;
}

std::vector<Proposal> proposals_from_json(const Json& doc, int width, int height) {
    if (!doc.is_array()) throw InputError("proposals must be a JSON array");
    std::vector<Proposal> out;
    try {
        for (const auto& item : doc) {
            Proposal p;
            p.box = {item.at("cx").get<double>(), item.at("cy").get<double>(), item.at("length").get<double>(),
                     item.at("width").get<double>(), item.at("angle_deg").get<double>()};
            p.length_width_ratio = item.value("ratio", p.box.length / p.box.width);
            p.score = item.value("score", 0.0);
            if (item.contains("pixels")) {
                for (const auto& px : item["pixels"]) p.pixels.push_back({px.at(0).get<int>(), px.at(1).get<int>()});
                std::sort(p.pixels.begin(), p.pixels.end());
            } else {
                ShipSpec box;
                box.cx = p.box.cx;
                box.cy = p.box.cy;
                box.length = p.box.length;
                box.width = p.box.width;
                box.angle_deg = p.box.angle_deg;
                p.pixels = rasterize_polygon(box.corners(), width, height);
            }
            if (p.pixels.empty()) throw InputError("proposal covers no pixel");
            out.push_back(std::move(p));
        }
    } catch (const Json::exception& e) {
        throw InputError(std::string("malformed proposal entry: ") + e.what());
    }
    return out;
}

Json eval_report_to_json(const EvalReport& r) {
    Json per_t = Json::array();
    for (const auto& [t, rec] : r.per_t_recall) per_t.push_back({{"t", t}, {"recall", rec}});
    return {{"recall_05", r.recall_05},
            {"precision_05", r.precision_05},
            {"f1_05", r.f1_05},
            {"average_recall", r.average_recall},
            {"per_t_recall", std::move(per_t)},
            {"counts", {{"detected", r.detected}, {"missed", r.missed}, {"false_alarms", r.false_alarms}}},
            {"precision_undefined", r.precision_undefined},
            {"recall_undefined", r.recall_undefined}};
}

Json contrast_to_json(std::span<const BandContrast> bands) {
    Json doc = Json::array();
    for (const auto& b : bands) {
        Json ships = Json::array();
        for (const auto& s : b.ships) {
            ships.push_back({{"m_t", s.m_t}, {"q1_t", s.q1_t}, {"m_b", s.m_b}, {"c_m", s.c_m}, {"c_q1", s.c_q1}});
        }
        doc.push_back({{"band_role", b.role}, {"mean_mrc", b.mean_mrc}, {"mean_fqrc", b.mean_fqrc}, {"ships", ships}});
    }
    return doc;
}

Json bench_to_json(const BenchResult& result) {
    Json cells = Json::array();
    for (const auto& c : result.cells) {
        cells.push_back({{"variant", c.variant.name()},
                         {"method", std::string(to_string(c.method))},
                         {"average_recall", c.report.average_recall},
                         {"recall_05", c.report.recall_05},
                         {"precision_05", c.report.precision_05},
                         {"f1_05", c.report.f1_05},
                         {"detected", c.report.detected},
                         {"missed", c.report.missed},
                         {"false_alarms", c.report.false_alarms}});
    }
    Json summaries = Json::array();
    for (const auto& s : result.summaries) {
        summaries.push_back({{"variant", s.variant.name()}, {"mean_ar", s.mean_ar}, {"sd_ar", s.sd_ar}});
    }
    return {{"scene_count", result.scene_count}, {"t_grid", result.t_grid}, {"cells", cells}, {"summaries", summaries}};
}

SceneSpec scene_spec_from_json(const Json& doc) {
    if (!doc.is_object()) throw InputError("scene spec must be a JSON object");
    SceneSpec spec;
    try {
        spec.width = doc.value("width", spec.width);
        spec.height = doc.value("height", spec.height);
        spec.seed = doc.value("seed", spec.seed);
        spec.spectral_noise_sd = doc.value("spectral_noise_sd", spec.spectral_noise_sd);
        if (doc.contains("background")) {
            const Json& b = doc["background"];
            spec.background.mean = b.value("mean", spec.background.mean);
            spec.background.noise_sd = b.value("noise_sd", spec.background.noise_sd);
            spec.background.wave_amplitude = b.value("wave_amplitude", spec.background.wave_amplitude);
            spec.background.wave_length = b.value("wave_length", spec.background.wave_length);
            spec.background.wave_angle_deg = b.value("wave_angle_deg", spec.background.wave_angle_deg);
        }
        for (const auto& s : doc.value("ships", Json::array())) {
            ShipSpec ship;
            ship.cx = s.at("cx").get<double>();
            ship.cy = s.at("cy").get<double>();
            ship.length = s.value("length", ship.length);
            ship.width = s.value("width", ship.width);
            ship.angle_deg = s.value("angle_deg", ship.angle_deg);
            ship.target_mcr = s.value("target_mcr", ship.target_mcr);
            ship.nir_mcr_boost = s.value("nir_mcr_boost", ship.nir_mcr_boost);
            ship.intra_ship_sd = s.value("intra_ship_sd", ship.intra_ship_sd);
            if (s.contains("wake")) ship.wake = WakeSpec{s["wake"].at("length").get<double>(), s["wake"].at("intensity").get<double>()};
            spec.ships.push_back(ship);
        }
    } catch (const Json::exception& e) {
        throw InputError(std::string("malformed scene spec: ") + e.what());
    }
    spec.validate();
    return spec;
}

Json scene_spec_to_json(const SceneSpec& spec) {
    Json ships = Json::array();
    for (const auto& s : spec.ships) {
        Json j = {{"cx", s.cx},
                  {"cy", s.cy},
                  {"length", s.length},
                  {"width", s.width},
                  {"angle_deg", s.angle_deg},
                  {"target_mcr", s.target_mcr},
                  {"nir_mcr_boost", s.nir_mcr_boost},
                  {"intra_ship_sd", s.intra_ship_sd}};
        if (s.wake) j["wake"] = {{"length", s.wake->length}, {"intensity", s.wake->intensity}};
        ships.push_back(std::move(j));
    }
    return {{"width", spec.width},
            {"height", spec.height},
            {"seed", spec.seed},
            {"spectral_noise_sd", spec.spectral_noise_sd},
            {"background",
             {{"mean", spec.background.mean},
              {"noise_sd", spec.background.noise_sd},
              {"wave_amplitude", spec.background.wave_amplitude},
              {"wave_length", spec.background.wave_length},
              {"wave_angle_deg", spec.background.wave_angle_deg}}},
            {"ships", ships}};
}

BinaryMask read_mask_pgm(const std::filesystem::path& path) {
    const Band b = read_pgm(path);
    std::vector<std::uint8_t> bits(b.size());
    for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = b.values()[i] != 0.0 ? 1 : 0;
    return BinaryMask(b.width(), b.height(), std::move(bits));
}

void write_mask_pgm(const BinaryMask& mask, const std::filesystem::path& path) {
    std::vector<double> values(mask.size());
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = mask.bits()[i] ? 255.0 : 0.0;
    write_pgm(Band(mask.width(), mask.height(), std::move(values)), path, 255);
}

}  // namespace shipprop
