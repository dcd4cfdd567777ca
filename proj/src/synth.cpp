#include "shipprop/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace shipprop {

double SplitMix64::gaussian() noexcept {
    if (spare_) {
        const double v = *spare_;
        spare_.reset();
        return v;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    return r * std::cos(theta);
}

namespace {

PointD axis(double angle_deg) {
    const double a = angle_deg * std::numbers::pi / 180.0;
    return {std::cos(a), std::sin(a)};
}

std::vector<PointD> oriented_rect(PointD centre, PointD dir, double length, double width) {
    const PointD n{-dir.y, dir.x};
    const double hl = length / 2.0;
    const double hw = width / 2.0;
    return {
        {centre.x + hl * dir.x + hw * n.x, centre.y + hl * dir.y + hw * n.y},
        {centre.x - hl * dir.x + hw * n.x, centre.y - hl * dir.y + hw * n.y},
        {centre.x - hl * dir.x - hw * n.x, centre.y - hl * dir.y - hw * n.y},
        {centre.x + hl * dir.x - hw * n.x, centre.y + hl * dir.y - hw * n.y},
    };
}

BinaryMask to_mask(const PixelSet& pixels, int width, int height) {
    BinaryMask m(width, height);
    for (const auto& p : pixels) m.set(p.x, p.y, true);
    return m;
}

}  // namespace

std::vector<PointD> ShipSpec::corners() const {
    return oriented_rect({cx, cy}, axis(angle_deg), length, width);
}

void SceneSpec::validate() const {
    if (width < 2 || height < 2) throw InputError("scene must be at least 2x2");
    if (!(background.mean > 0.0) || background.noise_sd < 0.0 || spectral_noise_sd < 0.0 ||
        !(background.wave_length > 0.0)) {
        throw InputError("invalid scene background parameters");
    }
    BinaryMask occupied(width, height);
    for (std::size_t i = 0; i < ships.size(); ++i) {
        const auto& s = ships[i];
        if (!(s.target_mcr > 0.0) || !(s.nir_mcr_boost > 0.0) || !(s.length > 0.0) || !(s.width > 0.0) ||
            s.intra_ship_sd < 0.0) {
            throw InputError("ship " + std::to_string(i) + " has invalid parameters");
        }
        for (const auto& c : s.corners()) {
            if (c.x < 0.0 || c.y < 0.0 || c.x > width - 1 || c.y > height - 1) {
                throw InputError("ship " + std::to_string(i) + " does not fit inside the frame");
            }
        }
        const auto corners = s.corners();
        const PixelSet pixels = rasterize_polygon(corners, width, height);
        if (pixels.empty()) throw InputError("ship " + std::to_string(i) + " covers no pixel");
        for (const auto& p : pixels) {
            if (occupied.at(p.x, p.y)) throw InputError("ship " + std::to_string(i) + " overlaps another ship");
            occupied.set(p.x, p.y, true);
        }
    }
}

BinaryMask ring_mask(const PixelSet& pixels, int width, int height, int radius, const BinaryMask& exclude) {
    BinaryMask ring(width, height);
    for (const auto& p : pixels) {
        for (int y = std::max(0, p.y - radius); y <= std::min(height - 1, p.y + radius); ++y) {
            for (int x = std::max(0, p.x - radius); x <= std::min(width - 1, p.x + radius); ++x) {
                ring.set(x, y, true);
            }
        }
    }
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            if (exclude.at(x, y)) ring.set(x, y, false);
        }
    }
    return ring;
}

Scene generate(const SceneSpec& spec) {
    spec.validate();
    const int w = spec.width;
    const int h = spec.height;
    const auto& bg = spec.background;
    SplitMix64 root(spec.seed);
    SplitMix64 pan_rng = root.split();
    SplitMix64 nir_rng = root.split();
    SplitMix64 ship_rng = root.split();

    Band pan(w, h);
    Band nir(w, h);
    const PointD wave_dir = axis(bg.wave_angle_deg);
    const double k = 2.0 * std::numbers::pi / bg.wave_length;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double wave = bg.wave_amplitude * std::sin(k * (x * wave_dir.x + y * wave_dir.y));
            pan.at(x, y) = bg.mean + wave + bg.noise_sd * pan_rng.gaussian();
            nir.at(x, y) = bg.mean + wave + bg.noise_sd * nir_rng.gaussian() + spec.spectral_noise_sd * nir_rng.gaussian();
        }
    }

    // Wakes first so ships overwrite them.
    for (const auto& s : spec.ships) {
        if (!s.wake || s.wake->length <= 0.0) continue;
        const PointD dir = axis(s.angle_deg);
        const PointD stern{s.cx - dir.x * s.length / 2.0, s.cy - dir.y * s.length / 2.0};
        const PointD centre{stern.x - dir.x * s.wake->length / 2.0, stern.y - dir.y * s.wake->length / 2.0};
        const auto poly = oriented_rect(centre, dir, s.wake->length, s.width);
        for (const auto& p : rasterize_polygon(poly, w, h)) {
            const double behind = (stern.x - p.x) * dir.x + (stern.y - p.y) * dir.y;
            const double fade = std::clamp(1.0 - behind / s.wake->length, 0.0, 1.0);
            const double boost = s.wake->intensity * bg.mean * fade;
            pan.at(p.x, p.y) += boost;
            nir.at(p.x, p.y) += boost;
        }
    }

    Scene scene{MultibandImage({Band(1, 1)}, {"pan"}), {}, {}, {}, {}};
    BinaryMask all_ships(w, h);
    for (std::size_t i = 0; i < spec.ships.size(); ++i) {
        const auto& s = spec.ships[i];
        const auto corners = s.corners();
        PixelSet pixels = rasterize_polygon(corners, w, h);
        const double pan_level = s.target_mcr * bg.mean;
        const double nir_level = s.target_mcr * s.nir_mcr_boost * bg.mean;
        for (const auto& p : pixels) {
            const double texture = s.intra_ship_sd * ship_rng.gaussian();
            pan.at(p.x, p.y) = pan_level + texture;
            nir.at(p.x, p.y) = nir_level + texture + spec.spectral_noise_sd * ship_rng.gaussian();
            all_ships.set(p.x, p.y, true);
        }
        scene.truth.annotations.push_back({static_cast<int>(i), corners});
        scene.ship_masks.push_back(to_mask(pixels, w, h));
        scene.ship_pixels.push_back(std::move(pixels));
    }
    for (const auto& pixels : scene.ship_pixels) {
        scene.background_masks.push_back(ring_mask(pixels, w, h, kBackgroundRingPx, all_ships));
    }

    for (Band* b : {&pan, &nir}) {
        for (double& v : b->values()) v = std::clamp(std::round(v), 0.0, 65535.0);
    }
    scene.image = MultibandImage({std::move(pan), std::move(nir)}, {"pan", "nir"});
    return scene;
}

SceneSpec random_scene_spec(const SceneFamily& family, std::uint64_t seed) {
    SplitMix64 rng(seed);
    SceneSpec spec;
    spec.width = family.width;
    spec.height = family.height;
    spec.seed = rng.next();
    spec.background = family.background;
    spec.spectral_noise_sd = family.spectral_noise_sd;

    const int span = family.max_ships - family.min_ships + 1;
    const int count = family.min_ships + static_cast<int>(rng.next() % static_cast<std::uint64_t>(std::max(span, 1)));
    std::vector<double> radii;
    for (int i = 0; i < count; ++i) {
        ShipSpec ship;
        ship.length = rng.uniform(family.min_length, family.max_length);
        ship.width = std::min(ship.length, rng.uniform(family.min_width, family.max_width));
        ship.angle_deg = rng.uniform(0.0, 180.0);
        ship.target_mcr = rng.uniform(family.min_mcr, family.max_mcr);
        ship.nir_mcr_boost = family.nir_mcr_boost;
        ship.intra_ship_sd = family.intra_ship_cv * ship.target_mcr * family.background.mean;
        if (rng.uniform() < family.wake_probability) {
            ship.wake = WakeSpec{rng.uniform(0.5, 1.5) * ship.length, rng.uniform(0.1, 0.4)};
        }
        const double radius = std::hypot(ship.length, ship.width) / 2.0;
        const double margin = radius + 2.0;
        if (2.0 * margin >= family.width || 2.0 * margin >= family.height) continue;

        for (int attempt = 0; attempt < 200; ++attempt) {
            ship.cx = rng.uniform(margin, family.width - 1 - margin);
            ship.cy = rng.uniform(margin, family.height - 1 - margin);
            bool clear = true;
            for (std::size_t j = 0; j < spec.ships.size() && clear; ++j) {
                const double gap = radius + radii[j] + 2.0 * kBackgroundRingPx + 2.0;
                clear = std::hypot(ship.cx - spec.ships[j].cx, ship.cy - spec.ships[j].cy) > gap;
            }
            if (clear) {
                spec.ships.push_back(ship);
                radii.push_back(radius);
                break;
            }
        }
    }
    return spec;
}

SceneFamily family_preset(std::string_view name) {
    SceneFamily f;
    if (name == "high") return f;
    if (name == "clutter") {
        f.background.noise_sd = 6.0;
        f.background.wave_amplitude = 15.0;
        f.wake_probability = 0.3;
        return f;
    }
    if (name == "low") {
        f.min_mcr = 0.75;
        f.max_mcr = 1.25;
        f.nir_mcr_boost = 1.3;
        return f;
    }
    throw InputError("unknown scene family '" + std::string(name) + "' (expected high, clutter or low)");
}

}  // namespace shipprop
