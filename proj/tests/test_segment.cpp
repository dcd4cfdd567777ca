#include <doctest.h>

#include "oracles.hpp"
#include "shipprop/segment.hpp"
#include "shipprop/synth.hpp"

using namespace shipprop;

namespace {

Histogram hist_of(std::initializer_list<std::pair<int, std::uint64_t>> entries, int bins = 256) {
    Histogram h(static_cast<std::size_t>(bins), 0);
    for (auto [level, count] : entries) h[static_cast<std::size_t>(level)] += count;
    return h;
}

bool subset(const BinaryMask& a, const BinaryMask& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a.bits()[i] && !b.bits()[i]) return false;
    return true;
}

BinaryMask block(int w, int h, int x0, int y0, int bw, int bh) {
    BinaryMask m(w, h);
    for (int y = y0; y < y0 + bh; ++y)
        for (int x = x0; x < x0 + bw; ++x) m.set(x, y, true);
    return m;
}

}  // namespace

TEST_CASE("two-cluster histogram") {
    const Histogram h = hist_of({{10, 4}, {200, 4}});
    CHECK(threshold_otsu(h) == 10);
    CHECK(threshold_isodata(h) == 105);
    CHECK(threshold_yen(h) == 10);
    CHECK(oracle::otsu(h) == 10);
    CHECK(oracle::yen(h) == 10);
}

TEST_CASE("degenerate histograms") {
    const Histogram one = hist_of({{7, 12}});
    CHECK_THROWS_AS(threshold_otsu(one), DegenerateError);
    CHECK_THROWS_AS(threshold_isodata(one), DegenerateError);
    CHECK_THROWS_AS(threshold_yen(one), DegenerateError);
    CHECK(threshold_mean(one) == 7);
    CHECK_THROWS_AS(threshold_mean(Histogram(256, 0)), DegenerateError);
}

TEST_CASE("yen on three levels and two levels") {
    const Histogram h = hist_of({{0, 8}, {128, 1}, {255, 1}});
    CHECK(threshold_yen(h) == oracle::yen(h));
    const Histogram two = hist_of({{3, 5}, {9, 5}});
    const int t = threshold_yen(two);
    CHECK(t >= 3);
    CHECK(t < 9);
}

TEST_CASE("isodata on a symmetric histogram") {
    const Histogram h = hist_of({{20, 3}, {30, 9}, {40, 3}, {160, 3}, {170, 9}, {180, 3}});
    CHECK(threshold_isodata(h) == 100);
}

TEST_CASE("mean threshold") {
    CHECK(threshold_mean(hist_of({{0, 1}, {10, 1}})) == 5);
    CHECK(threshold_mean(hist_of({{0, 3}, {9, 1}})) == 2);
}

TEST_CASE("global selectors agree with the oracles") {
    SplitMix64 rng(123);
    for (int trial = 0; trial < 300; ++trial) {
        const Histogram h = oracle::random_histogram(rng, 256, 500);
        REQUIRE(threshold_otsu(h) == oracle::otsu(h));
        REQUIRE(threshold_isodata(h) == oracle::isodata(h));
        REQUIRE(threshold_yen(h) == oracle::yen(h));
    }
}

TEST_CASE("global selectors follow a level shift") {
    SplitMix64 rng(9);
    for (int trial = 0; trial < 50; ++trial) {
        Histogram h = oracle::random_histogram(rng, 200, 300);
        Histogram shifted(256, 0);
        std::copy(h.begin(), h.end(), shifted.begin() + 40);
        h.resize(256, 0);
        // Leading empty bins move every candidate by the same offset.
        CHECK(threshold_otsu(shifted) == threshold_otsu(h) + 40);
        CHECK(threshold_yen(shifted) == threshold_yen(h) + 40);
    }
}

TEST_CASE("sauvola") {
    SUBCASE("flat non-zero map is all foreground") {
        const SauvolaResult r = threshold_sauvola(AnomalyMap(5, 5, std::vector<double>(25, 0.4)), SauvolaParams{3, 0.5, 0.5});
        CHECK(r.mask.count() == 25);
    }
    SUBCASE("zero map is all background") {
        const SauvolaResult r = threshold_sauvola(AnomalyMap(5, 5, std::vector<double>(25, 0.0)), SauvolaParams{});
        CHECK(r.mask.count() == 0);
    }
    SUBCASE("single bright pixel is foreground and then opened away") {
        std::vector<double> v(81, 0.0);
        v[40] = 1.0;
        const SauvolaResult r = threshold_sauvola(AnomalyMap(9, 9, v), SauvolaParams{3, 0.5, 0.5});
        CHECK(r.mask.at(4, 4));
        CHECK(morphological_open(r.mask, 2).count() == 0);
    }
    SUBCASE("window larger than the image is clamped with a warning") {
        const SauvolaResult r = threshold_sauvola(AnomalyMap(6, 8, std::vector<double>(48, 0.2)), SauvolaParams{15, 0.5, 0.5});
        CHECK(r.window_used == 5);
        CHECK(r.warning.has_value());
    }
    SUBCASE("direct window evaluation") {
        SplitMix64 rng(8);
        std::vector<double> v(12 * 10);
        for (auto& x : v) x = rng.uniform();
        const AnomalyMap map(12, 10, v);
        const SauvolaParams p{5, 0.3, 0.5};
        const SauvolaResult r = threshold_sauvola(map, p);
        for (int y = 0; y < 10; ++y) {
            for (int x = 0; x < 12; ++x) {
                double s = 0, ss = 0, n = 0;
                for (int yy = std::max(0, y - 2); yy <= std::min(9, y + 2); ++yy)
                    for (int xx = std::max(0, x - 2); xx <= std::min(11, x + 2); ++xx) {
                        s += map.at(xx, yy);
                        ss += map.at(xx, yy) * map.at(xx, yy);
                        n += 1;
                    }
                const double m = s / n;
                const double sd = std::sqrt(std::max(0.0, ss / n - m * m));
                const double t = m * (1 + p.k * (sd / p.r - 1));
                // Skip razor-thin ties where summation order could matter.
                if (std::abs(map.at(x, y) - t) > 1e-9) CHECK(r.mask.at(x, y) == (map.at(x, y) > t));
            }
        }
    }
}

TEST_CASE("apply_threshold") {
    SUBCASE("global methods agree on a two-cluster map") {
        std::vector<double> v(100, 0.1);
        for (int i = 0; i < 30; ++i) v[i] = 0.9;
        const AnomalyMap map(10, 10, v);
        ThresholdConfig cfg;
        const BinaryMask otsu = apply_threshold(map, cfg).mask;
        cfg.method = ThresholdMethod::IsoData;
        CHECK(apply_threshold(map, cfg).mask == otsu);
        cfg.method = ThresholdMethod::Yen;
        CHECK(apply_threshold(map, cfg).mask == otsu);
        CHECK(otsu.count() == 30);
    }
    SUBCASE("constant map is degenerate") {
        const Segmentation s = apply_threshold(AnomalyMap(4, 4, std::vector<double>(16, 0.3)), ThresholdConfig{});
        CHECK(s.degenerate);
        CHECK(s.mask.count() == 0);
        CHECK_FALSE(s.notes.empty());
    }
    SUBCASE("mask mass equals histogram mass above the level") {
        SplitMix64 rng(12);
        std::vector<double> v(400);
        for (auto& x : v) x = rng.uniform() * rng.uniform();
        const AnomalyMap map(20, 20, v);
        for (auto m : {ThresholdMethod::Otsu, ThresholdMethod::IsoData, ThresholdMethod::Yen, ThresholdMethod::Mean}) {
            ThresholdConfig cfg;
            cfg.method = m;
            const Segmentation s = apply_threshold(map, cfg);
            REQUIRE(s.level.has_value());
            const Histogram h = level_histogram(quantize_levels(map.band(), 256), 256);
            std::uint64_t above = 0;
            for (std::size_t i = static_cast<std::size_t>(*s.level) + 1; i < h.size(); ++i) above += h[i];
            CHECK(s.mask.count() == above);
        }
    }
    SUBCASE("config validation") {
        ThresholdConfig cfg;
        cfg.histogram_bins = 1;
        CHECK_THROWS_AS(cfg.validate(), InputError);
        cfg = {};
        cfg.sauvola.window = 4;
        CHECK_THROWS_AS(cfg.validate(), InputError);
        cfg = {};
        cfg.sauvola.k = 0.0;
        CHECK_THROWS_AS(cfg.validate(), InputError);
        CHECK(parse_threshold_method("yen") == ThresholdMethod::Yen);
        CHECK_THROWS_AS(parse_threshold_method("triangle"), InputError);
    }
}

TEST_CASE("opening examples") {
    BinaryMask single(7, 7);
    single.set(3, 3, true);
    CHECK(morphological_open(single, 2).count() == 0);
    const BinaryMask b5 = block(9, 9, 2, 2, 5, 5);
    CHECK(erode(erode(b5)).count() == 1);
    CHECK(morphological_open(b5, 2) == b5);
    CHECK(morphological_open(block(8, 8, 3, 3, 2, 2), 2).count() == 0);
    // A block touching the border erodes from the outside too.
    CHECK(morphological_open(block(5, 5, 0, 0, 5, 5), 2) == block(5, 5, 0, 0, 5, 5));
    CHECK(morphological_open(block(4, 4, 0, 0, 4, 4), 2).count() == 0);
}

TEST_CASE("opening properties on random masks") {
    SplitMix64 rng(77);
    for (int trial = 0; trial < 300; ++trial) {
        const BinaryMask m = oracle::random_mask(rng, 24, 20, rng.uniform(0.2, 0.95));
        const int it = 1 + static_cast<int>(rng.next() % 3);
        const BinaryMask o = morphological_open(m, it);
        CHECK(subset(o, m));
        CHECK(morphological_open(o, it) == o);
    }
}
