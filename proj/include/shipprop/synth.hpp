#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "shipprop/eval.hpp"
#include "shipprop/raster.hpp"

namespace shipprop {

/// SplitMix64 (Steele, Lea, Flood 2014). Chosen because it is tiny, fully
/// specified and trivially re-implementable, so scene fixtures can be
/// regenerated bit-exactly elsewhere. `split()` derives an independent
/// stream from the next output.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t next() noexcept {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller; both variates of a pair are used.
    double gaussian() noexcept;

    SplitMix64 split() noexcept { return SplitMix64(next()); }

private:
    std::uint64_t state_;
    std::optional<double> spare_;
};

struct BackgroundSpec {
    double mean = 100.0;
    double noise_sd = 2.0;
    double wave_amplitude = 0.0;
    double wave_length = 64.0;  // pixels
    double wave_angle_deg = 30.0;
};

struct WakeSpec {
    double length = 0.0;     // pixels behind the stern
    double intensity = 0.0;  // peak brightening as a fraction of the background mean
};

struct ShipSpec {
    double cx = 0.0;
    double cy = 0.0;
    double length = 20.0;
    double width = 6.0;
    double angle_deg = 0.0;  // heading of the long axis, image coordinates
    double target_mcr = 2.0;
    double nir_mcr_boost = 1.0;
    double intra_ship_sd = 4.0;
    std::optional<WakeSpec> wake;

    /// Rectangle corners in pixel coordinates.
    std::vector<PointD> corners() const;
};

struct SceneSpec {
    int width = 256;
    int height = 256;
    std::uint64_t seed = 0;
    BackgroundSpec background{};
    std::vector<ShipSpec> ships;
    double spectral_noise_sd = 0.0;  // extra noise on the nir band

    /// Throws InputError for out-of-frame or overlapping ships.
    void validate() const;
};

struct Scene {
    MultibandImage image;  // roles {"pan", "nir"}
    GroundTruth truth;
    std::vector<PixelSet> ship_pixels;
    std::vector<BinaryMask> ship_masks;
    std::vector<BinaryMask> background_masks;  // 5 px ring around each ship, other ships excluded
};

inline constexpr int kBackgroundRingPx = 5;

/// Paints the scene. Band values are rounded to non-negative integers so the
/// scene survives a PGM round trip unchanged.
Scene generate(const SceneSpec& spec);

/// Chebyshev ring of `radius` pixels around `pixels`, minus `exclude`.
BinaryMask ring_mask(const PixelSet& pixels, int width, int height, int radius, const BinaryMask& exclude);

/// Parameter ranges for drawing random scenes.
struct SceneFamily {
    int width = 256;
    int height = 256;
    int min_ships = 1;
    int max_ships = 3;
    double min_length = 20.0;
    double max_length = 48.0;
    double min_width = 7.0;
    double max_width = 12.0;
    double min_mcr = 1.75;
    double max_mcr = 3.25;
    double nir_mcr_boost = 1.0;
    double intra_ship_cv = 0.16;  // ship texture sd as a fraction of the ship's pan level
    double wake_probability = 0.0;
    BackgroundSpec background{};
    double spectral_noise_sd = 0.0;
};

/// Deterministic random SceneSpec for `seed`; ships are placed by rejection
/// sampling with clearance between them and from the border.
SceneSpec random_scene_spec(const SceneFamily& family, std::uint64_t seed);

/// Named families used by the benchmark:
///   "high"    bright ships, mcr 1.75 to 3.25, quiet sea
///   "clutter" the same ships on noisy, wavy sea with wakes
///   "low"     dim ships, mcr 0.75 to 1.25, nir contrast boosted 1.3x
/// Throws InputError for other names.
SceneFamily family_preset(std::string_view name);

}  // namespace shipprop
