#include "shipprop/raster.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <set>

#include <json.hpp>

namespace shipprop {

namespace {

void check_dims(int width, int height) {
    if (width < 1 || height < 1) {
        throw InputError("raster dimensions must be positive, got " + std::to_string(width) + "x" +
                         std::to_string(height));
    }
}

std::size_t area(int width, int height) {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
}

std::pair<double, double> min_max(std::span<const double> values) {
    auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    return {*lo, *hi};
}

}  // namespace

Band::Band(int width, int height, std::vector<double> values, std::optional<int> levels_hint)
    : width_(width), height_(height), values_(std::move(values)), levels_hint_(levels_hint) {
    check_dims(width, height);
    if (values_.size() != area(width, height)) {
        throw InputError("band has " + std::to_string(values_.size()) + " values, expected " +
                         std::to_string(area(width, height)));
    }
    if (!std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); })) {
        throw InputError("band contains non-finite values");
    }
}

Band::Band(int width, int height, double fill) : width_(width), height_(height) {
    check_dims(width, height);
    if (!std::isfinite(fill)) throw InputError("band fill value must be finite");
    values_.assign(area(width, height), fill);
}

MultibandImage::MultibandImage(std::vector<Band> bands, std::vector<std::string> roles)
    : bands_(std::move(bands)), roles_(std::move(roles)) {
    if (bands_.empty()) throw InputError("multiband image needs at least one band");
    if (roles_.size() != bands_.size()) throw InputError("band role count does not match band count");
    for (const auto& b : bands_) {
        if (!b.same_shape(bands_.front())) throw InputError("dimension mismatch between bands");
    }
    std::set<std::string> seen;
    for (const auto& r : roles_) {
        if (!seen.insert(r).second) throw InputError("duplicate band role '" + r + "'");
    }
}

const Band* MultibandImage::find(std::string_view role) const noexcept {
    for (std::size_t k = 0; k < roles_.size(); ++k) {
        if (roles_[k] == role) return &bands_[k];
    }
    return nullptr;
}

BinaryMask::BinaryMask(int width, int height, bool fill) : width_(width), height_(height) {
    check_dims(width, height);
    bits_.assign(area(width, height), fill ? 1 : 0);
}

BinaryMask::BinaryMask(int width, int height, std::vector<std::uint8_t> bits)
    : width_(width), height_(height), bits_(std::move(bits)) {
    check_dims(width, height);
    if (bits_.size() != area(width, height)) throw InputError("mask size does not match dimensions");
    for (auto& b : bits_) b = b ? 1 : 0;
}

std::size_t BinaryMask::count() const noexcept {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

Band quantize_levels(const Band& band, int levels) {
    if (levels < 2) throw InputError("quantization needs at least 2 levels");
    auto [lo, hi] = min_max(band.values());
    std::vector<double> out(band.size(), 0.0);
    if (hi > lo) {
        const double span = hi - lo;
        const double top = levels - 1;
        auto src = band.values();
        for (std::size_t i = 0; i < out.size(); ++i) {
            const double scaled = (src[i] - lo) / span * top;
            out[i] = std::min(top, std::floor(scaled + 0.5));
        }
    }
    return Band(band.width(), band.height(), std::move(out), levels);
}

Band normalize_unit(const Band& band) {
    auto [lo, hi] = min_max(band.values());
    std::vector<double> out(band.size(), 0.0);
    if (hi > lo) {
        const double span = hi - lo;
        auto src = band.values();
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = (src[i] - lo) / span;
    }
    return Band(band.width(), band.height(), std::move(out));
}

// ---------------------------------------------------------------------------
// PGM

namespace {

using Code = PgmError::Code;

class HeaderReader {
public:
    explicit HeaderReader(std::istream& in) : in_(in) {}

    // Reads an unsigned decimal token, skipping whitespace and '#' comments.
    long next_number(const char* what) {
        skip_space_and_comments();
        std::string digits;
        while (std::isdigit(in_.peek())) digits.push_back(static_cast<char>(in_.get()));
        if (digits.empty() || digits.size() > 9) {
            throw PgmError(Code::BadHeader, std::string("malformed PGM header: bad ") + what);
        }
        return std::stol(digits);
    }

    void single_whitespace() {
        if (!std::isspace(in_.get())) throw PgmError(Code::BadHeader, "malformed PGM header: missing separator");
    }

private:
    void skip_space_and_comments() {
        for (;;) {
            int c = in_.peek();
            if (c == '#') {
                while (in_.peek() != '\n' && in_.peek() != EOF) in_.get();
            } else if (c != EOF && std::isspace(c)) {
                in_.get();
            } else {
                return;
            }
        }
    }

    std::istream& in_;
};

}  // namespace

Band read_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw PgmError(Code::Io, "cannot open PGM file " + path.string());

    char magic[2] = {0, 0};
    in.read(magic, 2);
    if (in.gcount() != 2 || magic[0] != 'P' || magic[1] != '5') {
        throw PgmError(Code::BadMagic, "not a binary PGM (expected magic P5): " + path.string());
    }
    HeaderReader header(in);
    const long width = header.next_number("width");
    const long height = header.next_number("height");
    const long maxval = header.next_number("maxval");
    if (width < 1 || height < 1 || width > 65536 || height > 65536) {
        throw PgmError(Code::BadHeader, "PGM dimensions out of range");
    }
    if (maxval < 1 || maxval > 65535) {
        throw PgmError(Code::MaxvalOutOfRange, "PGM maxval " + std::to_string(maxval) + " outside [1, 65535]");
    }
    header.single_whitespace();

    const std::size_t count = area(static_cast<int>(width), static_cast<int>(height));
    const std::size_t sample_bytes = maxval > 255 ? 2 : 1;
    std::vector<unsigned char> raw(count * sample_bytes);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size()) {
        throw PgmError(Code::Truncated, "truncated PGM payload in " + path.string());
    }

    std::vector<double> values(count);
    for (std::size_t i = 0; i < count; ++i) {
        unsigned v = sample_bytes == 2 ? (unsigned{raw[2 * i]} << 8) | raw[2 * i + 1] : raw[i];
        if (v > static_cast<unsigned>(maxval)) {
            throw PgmError(Code::ValueOutOfRange, "PGM sample exceeds maxval in " + path.string());
        }
        values[i] = v;
    }
    return Band(static_cast<int>(width), static_cast<int>(height), std::move(values), static_cast<int>(maxval) + 1);
}

void write_pgm(const Band& band, const std::filesystem::path& path, std::optional<int> maxval) {
    const double hi = min_max(band.values()).second;
    const int mv = maxval.value_or(hi <= 255 ? 255 : 65535);
    if (mv < 1 || mv > 65535) throw PgmError(Code::MaxvalOutOfRange, "PGM maxval outside [1, 65535]");
    for (double v : band.values()) {
        if (v < 0 || v > mv || v != std::floor(v)) {
            throw PgmError(Code::ValueOutOfRange, "band value not an integer in [0, maxval] for PGM output");
        }
    }

    std::ofstream out(path, std::ios::binary);
    if (!out) throw PgmError(Code::Io, "cannot write PGM file " + path.string());
    out << "P5\n" << band.width() << ' ' << band.height() << '\n' << mv << '\n';
    std::vector<unsigned char> raw;
    raw.reserve(band.size() * (mv > 255 ? 2 : 1));
    for (double v : band.values()) {
        const auto s = static_cast<unsigned>(v);
        if (mv > 255) raw.push_back(static_cast<unsigned char>(s >> 8));
        raw.push_back(static_cast<unsigned char>(s & 0xFF));
    }
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!out) throw PgmError(Code::Io, "failed writing PGM file " + path.string());
}

MultibandImage read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open manifest " + path.string());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw InputError("manifest " + path.string() + " is not valid JSON: " + e.what());
    }
    if (!doc.is_object() || !doc.contains("bands") || !doc["bands"].is_array()) {
        throw InputError("manifest must be an object with a 'bands' array");
    }
    const auto base = path.parent_path();
    std::vector<Band> bands;
    std::vector<std::string> roles;
    for (const auto& entry : doc["bands"]) {
        if (!entry.is_object() || !entry.contains("role") || !entry.contains("path") ||
            !entry["role"].is_string() || !entry["path"].is_string()) {
            throw InputError("manifest band entries need string 'role' and 'path'");
        }
        std::filesystem::path band_path = entry["path"].get<std::string>();
        if (band_path.is_relative()) band_path = base / band_path;
        if (!std::filesystem::exists(band_path)) throw InputError("missing band file " + band_path.string());
        roles.push_back(entry["role"].get<std::string>());
        bands.push_back(read_pgm(band_path));
    }
    return MultibandImage(std::move(bands), std::move(roles));
}

void write_manifest(const MultibandImage& image, const std::filesystem::path& path) {
    nlohmann::json doc;
    doc["bands"] = nlohmann::json::array();
    for (std::size_t k = 0; k < image.band_count(); ++k) {
        const std::string file = image.roles()[k] + ".pgm";
        write_pgm(image.band(k), path.parent_path() / file);
        doc["bands"].push_back({{"role", image.roles()[k]}, {"path", file}});
    }
    std::ofstream out(path);
    if (!out) throw InputError("cannot write manifest " + path.string());
    out << doc.dump(2) << '\n';
}

}  // namespace shipprop
