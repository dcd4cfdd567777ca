#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "shipprop/anomaly.hpp"
#include "shipprop/synth.hpp"

using namespace shipprop;
using doctest::Approx;

namespace {

Band random_band(SplitMix64& rng, int w, int h, double lo, double hi) {
    std::vector<double> v(static_cast<std::size_t>(w) * h);
    for (auto& x : v) x = std::round(rng.uniform(lo, hi));
    return Band(w, h, v);
}

// Flat sea at 50 with a bright 3x5 block at 200.
Band ship_scene(int w, int h) {
    Band b(w, h, 50.0);
    for (int y = 6; y < 9; ++y)
        for (int x = 5; x < 10; ++x) b.at(x, y) = 200.0;
    return b;
}

}  // namespace

TEST_CASE("suppression threshold from q and tau") {
    const SuppressionConfig cfg;
    CHECK(std::abs(cfg.rho() - 5.2263) <= 1e-4);
    CHECK(std::abs(cfg.rho() - 2.0 / std::sin(22.5 * std::numbers::pi / 180.0)) == 0.0);
    CHECK_THROWS_AS(SuppressionConfig(0.0, 22.5), InputError);
    CHECK_THROWS_AS(SuppressionConfig(2.0, 90.0), InputError);
    CHECK_THROWS_AS(SuppressionConfig(2.0, 0.0), InputError);
}

TEST_CASE("anomaly map range is enforced") {
    CHECK_THROWS_AS(AnomalyMap(1, 2, {0.5, 1.5}), InputError);
    CHECK_NOTHROW(AnomalyMap(1, 2, {0.0, 1.0}));
}

TEST_CASE("global anomaly") {
    SUBCASE("constant band") {
        const AnomalyMap g = global_anomaly(Band(3, 3, 4.0));
        for (double v : g.scores()) CHECK(v == 0.0);
    }
    SUBCASE("histogram arithmetic") {
        const Band b(2, 2, std::vector<double>{5, 5, 5, 9}, 256);
        const AnomalyMap g = global_anomaly(b);
        CHECK(g.at(0, 0) == 0.0);
        CHECK(g.at(1, 0) == 0.0);
        CHECK(g.at(0, 1) == 0.0);
        CHECK(g.at(1, 1) == 1.0);
    }
    SUBCASE("unique bright pixel scores 1") {
        SplitMix64 rng(2);
        Band b = random_band(rng, 16, 16, 0, 10);
        b.at(3, 7) = 100.0;
        CHECK(global_anomaly(b).at(3, 7) == 1.0);
    }
    SUBCASE("scores depend only on the histogram") {
        SplitMix64 rng(6);
        const Band b = random_band(rng, 8, 8, 0, 20);
        std::vector<double> rev(b.values().rbegin(), b.values().rend());
        const AnomalyMap g1 = global_anomaly(b);
        const AnomalyMap g2 = global_anomaly(Band(8, 8, rev));
        for (std::size_t i = 0; i < 64; ++i) CHECK(g1.scores()[i] == g2.scores()[63 - i]);
    }
}

TEST_CASE("gradient field") {
    SUBCASE("flat field") {
        const GradientField f = gradient_field(Band(4, 4, 3.0));
        for (double v : f.magnitude.values()) CHECK(v == 0.0);
    }
    SUBCASE("vertical step") {
        Band b(6, 4, 0.0);
        for (int y = 0; y < 4; ++y)
            for (int x = 3; x < 6; ++x) b.at(x, y) = 8.0;
        const GradientField f = gradient_field(b);
        CHECK(f.gx.at(2, 1) == 8.0);
        CHECK(f.gy.at(2, 1) == 0.0);
        CHECK(f.magnitude.at(2, 1) == 8.0);
        CHECK(f.magnitude.at(1, 1) == 0.0);
    }
    SUBCASE("diagonal step") {
        Band b(6, 6, 0.0);
        for (int y = 0; y < 6; ++y)
            for (int x = 0; x < 6; ++x)
                if (x > y) b.at(x, y) = 8.0;
        const GradientField f = gradient_field(b);
        CHECK(std::abs(f.gx.at(2, 2)) == 4.0);
        CHECK(std::abs(f.gy.at(2, 2)) == 4.0);
        CHECK(f.magnitude.at(2, 2) == Approx(4.0 * std::sqrt(2.0)));
    }
    SUBCASE("last row and column are zero") {
        SplitMix64 rng(1);
        const GradientField f = gradient_field(random_band(rng, 5, 4, 0, 255));
        for (int y = 0; y < 4; ++y) CHECK(f.magnitude.at(4, y) == 0.0);
        for (int x = 0; x < 5; ++x) CHECK(f.magnitude.at(x, 3) == 0.0);
    }
    SUBCASE("matches the direct mask evaluation") {
        SplitMix64 rng(17);
        for (int trial = 0; trial < 100; ++trial) {
            const Band b = random_band(rng, 16, 16, 0, 255);
            const GradientField f = gradient_field(b);
            const GradientField o = oracle::gradient(b);
            CHECK(f.gx == o.gx);
            CHECK(f.gy == o.gy);
            CHECK(f.magnitude == o.magnitude);
        }
    }
    CHECK_THROWS_AS(gradient_field(Band(1, 5)), InputError);
}

TEST_CASE("suppression") {
    Band step8(4, 2, 0.0), step4(4, 2, 0.0);
    for (int y = 0; y < 2; ++y) {
        for (int x = 2; x < 4; ++x) {
            step8.at(x, y) = 8.0;
            step4.at(x, y) = 4.0;
        }
    }
    const SuppressionConfig cfg;
    CHECK(suppressed_magnitude(gradient_field(step8), cfg).at(1, 0) == 8.0);
    CHECK(suppressed_magnitude(gradient_field(step4), cfg).at(1, 0) == 0.0);

    SplitMix64 rng(31);
    for (int trial = 0; trial < 50; ++trial) {
        const GradientField f = gradient_field(random_band(rng, 12, 12, 0, 12));
        const Band s = suppressed_magnitude(f, cfg);
        const Band s_loose = suppressed_magnitude(f, SuppressionConfig(3.0, 22.5));
        const Band s_tight = suppressed_magnitude(f, SuppressionConfig(2.0, 30.0));
        for (std::size_t i = 0; i < s.size(); ++i) {
            const double g = f.magnitude.values()[i];
            CHECK(s.values()[i] <= g);
            if (g > 0) CHECK((s.values()[i] == g) == (g >= cfg.rho()));
            // Larger q or smaller tau can only remove survivors.
            if (s_loose.values()[i] > 0) CHECK(s.values()[i] > 0);
            if (s.values()[i] > 0) CHECK(s_tight.values()[i] > 0);
        }
    }
    // Noise whose every gradient is below rho leaves nothing.
    Band quiet(8, 8, 100.0);
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x) quiet.at(x, y) += (x + y) % 2;
    const AnomalyMap none = suppress(gradient_field(quiet), cfg);
    for (double v : none.scores()) CHECK(v == 0.0);
}

TEST_CASE("combine") {
    CHECK(combine(AnomalyMap(2, 1, {0, 0}), AnomalyMap(2, 1, {0, 0})) == AnomalyMap(2, 1, {0, 0}));
    const AnomalyMap peak = combine(AnomalyMap(3, 1, {1, 0, 0}), AnomalyMap(3, 1, {1, 0, 0}));
    CHECK(peak.at(0, 0) == 1.0);
    const AnomalyMap flat = combine(AnomalyMap(2, 1, {0, 1}), AnomalyMap(2, 1, {1, 0}));
    CHECK(flat.at(0, 0) == 0.0);
    CHECK(flat.at(1, 0) == 0.0);
    CHECK_THROWS_AS(combine(AnomalyMap(2, 1, {0, 0}), AnomalyMap(1, 2, {0, 0})), InputError);
}

TEST_CASE("anomaly pipeline on a constructed scene") {
    const Band scene = ship_scene(16, 16);
    const AnomalyMap m = anomaly_pipeline(scene);
    double sea_max = 0, ship_min = 1;
    for (int y = 0; y < 16; ++y) {
        for (int x = 0; x < 16; ++x) {
            const bool ship = x >= 5 && x < 10 && y >= 6 && y < 9;
            const bool edge = x >= 4 && x < 10 && y >= 5 && y < 9;  // top-left assignment reaches one pixel out
            if (ship) ship_min = std::min(ship_min, m.at(x, y));
            if (!edge) sea_max = std::max(sea_max, m.at(x, y));
        }
    }
    CHECK(sea_max == 0.0);
    CHECK(ship_min > 0.0);

    // Per-stage oracle: quantise, count, gradient, suppress, combine by hand.
    const Band q = quantize_levels(scene, 256);
    std::vector<double> counts(256, 0);
    for (double v : q.values()) counts[static_cast<std::size_t>(v)] += 1;
    const GradientField o = oracle::gradient(q);
    std::vector<double> raw_g, raw_r;
    for (std::size_t i = 0; i < q.size(); ++i) {
        raw_g.push_back(1.0 / counts[static_cast<std::size_t>(q.values()[i])]);
        const double g = o.magnitude.values()[i];
        raw_r.push_back(g >= SuppressionConfig().rho() ? g : 0.0);
    }
    auto norm = [](std::vector<double> v) {
        const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
        const double a = *lo, b = *hi;
        for (auto& x : v) x = b > a ? (x - a) / (b - a) : 0.0;
        return v;
    };
    const auto g = norm(raw_g), r = norm(raw_r);
    std::vector<double> sum(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) sum[i] = g[i] + r[i];
    const auto expected = norm(sum);
    for (std::size_t i = 0; i < expected.size(); ++i) CHECK(m.scores()[i] == Approx(expected[i]).epsilon(1e-12));
}

TEST_CASE("noise is scattered without suppression and removed with it") {
    SplitMix64 rng(44);
    Band clean = ship_scene(32, 32);
    Band noisy = clean;
    for (double& v : noisy.values()) v = std::round(v + 1.0 * rng.gaussian());

    AnomalyOptions off;
    off.suppression_enabled = false;
    const AnomalyMap without = anomaly_pipeline(noisy, off);
    int scattered = 0;
    for (int y = 20; y < 32; ++y)
        for (int x = 0; x < 32; ++x) scattered += without.at(x, y) > 0.0;
    CHECK(scattered > 100);

    // With suppression, open water has no regional response left, so the
    // final score there is the global term under the combine rescale.
    const Band q = quantize_levels(noisy, 256);
    const AnomalyMap regional = suppress(gradient_field(q), SuppressionConfig());
    const AnomalyMap global = global_anomaly(q);
    const AnomalyMap with = anomaly_pipeline(noisy);
    double lo = 2, hi = -1;
    for (std::size_t i = 0; i < q.size(); ++i) {
        const double s = regional.scores()[i] + global.scores()[i];
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    int quiet_cells = 0, sea_cells = 0;
    for (int y = 20; y < 31; ++y) {
        for (int x = 0; x < 31; ++x) {
            ++sea_cells;
            if (regional.at(x, y) != 0.0) continue;
            ++quiet_cells;
            CHECK(with.at(x, y) == Approx((global.at(x, y) - lo) / (hi - lo)).epsilon(1e-12));
        }
    }
    CHECK(quiet_cells > sea_cells * 9 / 10);
    for (double v : with.scores()) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
}
