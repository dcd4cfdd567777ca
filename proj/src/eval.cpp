#include "shipprop/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace shipprop {

namespace {

bool on_segment(const PointD& p, const PointD& a, const PointD& b) {
    constexpr double eps = 1e-9;
    const double cr = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
    if (std::abs(cr) > eps * std::max(1.0, std::hypot(b.x - a.x, b.y - a.y))) return false;
    return p.x >= std::min(a.x, b.x) - eps && p.x <= std::max(a.x, b.x) + eps && p.y >= std::min(a.y, b.y) - eps &&
           p.y <= std::max(a.y, b.y) + eps;
}

bool inside(const PointD& p, std::span<const PointD> poly) {
    bool in = false;
    for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
        const PointD& a = poly[i];
        const PointD& b = poly[j];
        if (on_segment(p, a, b)) return true;
        if ((a.y > p.y) != (b.y > p.y)) {
            const double x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (p.x < x_cross) in = !in;
        }
    }
    return in;
}

}  // namespace

PixelSet rasterize_polygon(std::span<const PointD> polygon, int width, int height) {
    if (polygon.size() < 3) throw InputError("ground-truth polygon needs at least 3 vertices");
    double xmin = polygon[0].x, xmax = xmin, ymin = polygon[0].y, ymax = ymin;
    for (const auto& p : polygon) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw InputError("ground-truth polygon has non-finite vertex");
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
    }
    const int x0 = std::max(0, static_cast<int>(std::floor(xmin)) - 1);
    const int x1 = std::min(width - 1, static_cast<int>(std::ceil(xmax)) + 1);
    const int y0 = std::max(0, static_cast<int>(std::floor(ymin)) - 1);
    const int y1 = std::min(height - 1, static_cast<int>(std::ceil(ymax)) + 1);
    PixelSet out;
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            if (inside({static_cast<double>(x), static_cast<double>(y)}, polygon)) out.push_back({x, y});
        }
    }
    return out;
}

std::vector<PixelSet> rasterize(const GroundTruth& gt, int width, int height) {
    std::vector<PixelSet> out;
    out.reserve(gt.annotations.size());
    for (const auto& a : gt.annotations) {
        out.push_back(rasterize_polygon(a.polygon, width, height));
        if (out.back().empty()) {
            throw InputError("ground-truth annotation " + std::to_string(a.id) + " covers no pixel");
        }
    }
    return out;
}

double iou(const PixelSet& a, const PixelSet& b) {
    if (a.empty() || b.empty()) throw InputError("IoU of an empty pixel set");
    std::size_t common = 0;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (*ia < *ib) {
            ++ia;
        } else if (*ib < *ia) {
            ++ib;
        } else {
            ++common;
            ++ia;
            ++ib;
        }
    }
    return static_cast<double>(common) / static_cast<double>(a.size() + b.size() - common);
}

std::vector<std::vector<double>> iou_table(std::span<const Proposal> proposals, std::span<const PixelSet> truths) {
    std::vector<std::vector<double>> table(proposals.size(), std::vector<double>(truths.size(), 0.0));
    for (std::size_t p = 0; p < proposals.size(); ++p) {
        for (std::size_t g = 0; g < truths.size(); ++g) table[p][g] = iou(proposals[p].pixels, truths[g]);
    }
    return table;
}

namespace {

Matching greedy_match(std::span<const Proposal> proposals, const std::vector<std::vector<double>>& table,
                      std::size_t truth_count, double t) {
    std::vector<Match> candidates;
    for (std::size_t p = 0; p < proposals.size(); ++p) {
        for (std::size_t g = 0; g < truth_count; ++g) {
            if (table[p][g] > t) candidates.push_back({p, g, table[p][g]});
        }
    }
    std::sort(candidates.begin(), candidates.end(), [&](const Match& a, const Match& b) {
        if (a.iou != b.iou) return a.iou > b.iou;
        const auto& pa = proposals[a.proposal];
        const auto& pb = proposals[b.proposal];
        if (pa.score != pb.score) return pa.score > pb.score;
        if (pa.pixels.front() != pb.pixels.front()) return pa.pixels.front() < pb.pixels.front();
        return a.truth < b.truth;
    });

    Matching m;
    std::vector<bool> p_used(proposals.size(), false);
    std::vector<bool> g_used(truth_count, false);
    for (const auto& c : candidates) {
        if (p_used[c.proposal] || g_used[c.truth]) continue;
        p_used[c.proposal] = true;
        g_used[c.truth] = true;
        m.pairs.push_back(c);
    }
    for (std::size_t p = 0; p < proposals.size(); ++p) {
        if (!p_used[p]) m.false_alarms.push_back(p);
    }
    for (std::size_t g = 0; g < truth_count; ++g) {
        if (!g_used[g]) m.missed.push_back(g);
    }
    return m;
}

}  // namespace

Matching match_proposals(std::span<const Proposal> proposals, std::span<const PixelSet> truths, double t) {
    return greedy_match(proposals, iou_table(proposals, truths), truths.size(), t);
}

std::vector<double> default_t_grid() {
    std::vector<double> grid;
    for (int i = 0; i < 10; ++i) grid.push_back((50 + 5 * i) / 100.0);
    return grid;
}

EvalCounts& EvalCounts::operator+=(const EvalCounts& other) {
    if (detected_at.empty()) detected_at.assign(other.detected_at.size(), 0);
    if (detected_at.size() != other.detected_at.size()) throw InputError("cannot merge counts over different T grids");
    truths += other.truths;
    proposals += other.proposals;
    detected_05 += other.detected_05;
    for (std::size_t i = 0; i < detected_at.size(); ++i) detected_at[i] += other.detected_at[i];
    return *this;
}

EvalCounts count_matches(std::span<const Proposal> proposals, std::span<const PixelSet> truths,
                         std::span<const double> t_grid) {
    const auto table = iou_table(proposals, truths);
    EvalCounts c;
    c.truths = truths.size();
    c.proposals = proposals.size();
    c.detected_05 = greedy_match(proposals, table, truths.size(), 0.5).pairs.size();
    for (double t : t_grid) c.detected_at.push_back(greedy_match(proposals, table, truths.size(), t).pairs.size());
    return c;
}

EvalReport summarize(const EvalCounts& counts, std::span<const double> t_grid) {
    if (counts.detected_at.size() != t_grid.size()) throw InputError("T grid does not match the tallies");
    EvalReport r;
    r.detected = counts.detected_05;
    r.missed = counts.truths - counts.detected_05;
    r.false_alarms = counts.proposals - counts.detected_05;
    r.recall_undefined = counts.truths == 0;
    r.precision_undefined = counts.proposals == 0;
    auto rate = [](std::size_t num, std::size_t den) {
        return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
    };
    r.recall_05 = rate(counts.detected_05, counts.truths);
    r.precision_05 = rate(counts.detected_05, counts.proposals);
    r.f1_05 = r.recall_05 + r.precision_05 > 0.0
                  ? 2.0 * r.recall_05 * r.precision_05 / (r.recall_05 + r.precision_05)
                  : 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        const double rec = rate(counts.detected_at[i], counts.truths);
        r.per_t_recall.emplace_back(t_grid[i], rec);
        sum += rec;
    }
    r.average_recall = t_grid.empty() ? 0.0 : sum / static_cast<double>(t_grid.size());
    return r;
}

EvalReport evaluate(std::span<const Proposal> proposals, std::span<const PixelSet> truths,
                    std::span<const double> t_grid) {
    return summarize(count_matches(proposals, truths, t_grid), t_grid);
}

}  // namespace shipprop
