#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "shipprop/error.hpp"

namespace shipprop {

/// Single-channel real-valued raster, row-major, (x, y) = (column, row),
/// origin top-left. Construction validates shape and finiteness.
class Band {
public:
    Band(int width, int height, std::vector<double> values, std::optional<int> levels_hint = {});
    /// Filled with `fill`.
    Band(int width, int height, double fill = 0.0);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t size() const noexcept { return values_.size(); }

    double at(int x, int y) const { return values_[index(x, y)]; }
    double& at(int x, int y) { return values_[index(x, y)]; }
    std::size_t index(int x, int y) const noexcept {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
    }

    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }

    std::optional<int> levels_hint() const noexcept { return levels_hint_; }
    void set_levels_hint(std::optional<int> levels) noexcept { levels_hint_ = levels; }

    bool same_shape(const Band& other) const noexcept {
        return width_ == other.width_ && height_ == other.height_;
    }

    friend bool operator==(const Band&, const Band&) = default;

private:
    int width_;
    int height_;
    std::vector<double> values_;
    std::optional<int> levels_hint_;
};

/// K co-registered bands with unique role labels.
class MultibandImage {
public:
    MultibandImage(std::vector<Band> bands, std::vector<std::string> roles);

    std::size_t band_count() const noexcept { return bands_.size(); }
    int width() const noexcept { return bands_.front().width(); }
    int height() const noexcept { return bands_.front().height(); }

    const std::vector<Band>& bands() const noexcept { return bands_; }
    const std::vector<std::string>& roles() const noexcept { return roles_; }
    const Band& band(std::size_t k) const { return bands_.at(k); }

    /// Band with the given role, or nullptr.
    const Band* find(std::string_view role) const noexcept;

private:
    std::vector<Band> bands_;
    std::vector<std::string> roles_;
};

class BinaryMask {
public:
    BinaryMask(int width, int height, bool fill = false);
    BinaryMask(int width, int height, std::vector<std::uint8_t> bits);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t size() const noexcept { return bits_.size(); }

    bool at(int x, int y) const { return bits_[index(x, y)] != 0; }
    void set(int x, int y, bool value) { bits_[index(x, y)] = value ? 1 : 0; }
    bool contains(int x, int y) const noexcept {
        return x >= 0 && y >= 0 && x < width_ && y < height_;
    }
    std::size_t index(int x, int y) const noexcept {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
    }

    std::span<const std::uint8_t> bits() const noexcept { return bits_; }
    std::size_t count() const noexcept;

    friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

private:
    int width_;
    int height_;
    std::vector<std::uint8_t> bits_;
};

/// Min-max rescale onto {0, ..., levels-1} with half-up rounding.
/// Constant bands map to all zeros.
Band quantize_levels(const Band& band, int levels);

/// Min-max rescale into [0, 1]; constant bands map to all zeros.
Band normalize_unit(const Band& band);

/// Binary PGM ("P5") failures, each reported distinctly.
class PgmError : public InputError {
public:
    enum class Code { Io, BadMagic, BadHeader, MaxvalOutOfRange, Truncated, ValueOutOfRange };
    PgmError(Code code, const std::string& what) : InputError(what), code_(code) {}
    Code code() const noexcept { return code_; }

private:
    Code code_;
};

Band read_pgm(const std::filesystem::path& path);

/// Writes `band` as P5. Values must be integers in [0, maxval]. When maxval
/// is omitted, 255 is used if the band fits, else 65535.
void write_pgm(const Band& band, const std::filesystem::path& path, std::optional<int> maxval = {});

/// Loads `{"bands":[{"role":..., "path":...}, ...]}`. Relative paths resolve
/// against the manifest's directory.
MultibandImage read_manifest(const std::filesystem::path& path);

/// Writes one PGM per band next to the manifest and the manifest itself.
void write_manifest(const MultibandImage& image, const std::filesystem::path& path);

}  // namespace shipprop
