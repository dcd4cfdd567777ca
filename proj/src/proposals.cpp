#include "shipprop/proposals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace shipprop {

void FilterConfig::validate() const {
    const bool ok = min_length > 0 && min_width > 0 && min_ratio > 0 && min_length <= max_length &&
                    min_width <= max_width && min_ratio <= max_ratio;
    if (!ok) throw InputError("filter bounds must be positive with min <= max");
}

std::vector<PixelSet> connected_components(const BinaryMask& mask) {
    std::vector<PixelSet> components;
    std::vector<std::uint8_t> seen(mask.size(), 0);
    std::vector<Pixel> stack;
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            if (!mask.at(x, y) || seen[mask.index(x, y)]) continue;
            PixelSet component;
            seen[mask.index(x, y)] = 1;
            stack.push_back({x, y});
            while (!stack.empty()) {
                const Pixel p = stack.back();
                stack.pop_back();
                component.push_back(p);
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int nx = p.x + dx;
                        const int ny = p.y + dy;
                        if (!mask.contains(nx, ny) || !mask.at(nx, ny) || seen[mask.index(nx, ny)]) continue;
                        seen[mask.index(nx, ny)] = 1;
                        stack.push_back({nx, ny});
                    }
                }
            }
            std::sort(component.begin(), component.end());
            components.push_back(std::move(component));
        }
    }
    return components;
}

namespace {

struct Point {
    double x;
    double y;
};

double cross(const Point& o, const Point& a, const Point& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

// Andrew's monotone chain; collinear points dropped, counter-clockwise in a
// y-up frame.
std::vector<Point> convex_hull(std::vector<Point> pts) {
    std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) {
        return a.x < b.x || (a.x == b.x && a.y < b.y);
    });
    pts.erase(std::unique(pts.begin(), pts.end(), [](const Point& a, const Point& b) {
                  return a.x == b.x && a.y == b.y;
              }),
              pts.end());
    if (pts.size() < 3) return pts;
    std::vector<Point> hull(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
        hull[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
        while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

double normalize_angle(double deg, double period) {
    double a = std::fmod(deg, period);
    if (a < 0) a += period;
    // Snap values that are a rounding step short of the period.
    if (period - a < 1e-9) a = 0.0;
    return a;
}

}  // namespace

RotatedBox min_rotated_box(const PixelSet& pixels) {
    if (pixels.empty()) throw InputError("rotated box of an empty pixel set");
    std::vector<Point> corners;
    corners.reserve(pixels.size() * 4);
    for (const auto& p : pixels) {
        for (double dx : {-0.5, 0.5}) {
            for (double dy : {-0.5, 0.5}) corners.push_back({p.x + dx, p.y + dy});
        }
    }
    const std::vector<Point> hull = convex_hull(std::move(corners));

    // The minimum-area rectangle has a side collinear with some hull edge.
    double best_area = std::numeric_limits<double>::infinity();
    RotatedBox best;
    for (std::size_t i = 0; i < hull.size(); ++i) {
        const Point& a = hull[i];
        const Point& b = hull[(i + 1) % hull.size()];
        const double len = std::hypot(b.x - a.x, b.y - a.y);
        const Point u{(b.x - a.x) / len, (b.y - a.y) / len};
        const Point v{-u.y, u.x};
        double umin = std::numeric_limits<double>::infinity();
        double umax = -umin;
        double vmin = umin;
        double vmax = -umin;
        for (const auto& p : hull) {
            const double pu = p.x * u.x + p.y * u.y;
            const double pv = p.x * v.x + p.y * v.y;
            umin = std::min(umin, pu);
            umax = std::max(umax, pu);
            vmin = std::min(vmin, pv);
            vmax = std::max(vmax, pv);
        }
        const double extent_u = umax - umin;
        const double extent_v = vmax - vmin;
        const double area = extent_u * extent_v;
        if (area >= best_area * (1.0 - 1e-12)) continue;
        best_area = area;

        const double mu = (umin + umax) / 2.0;
        const double mv = (vmin + vmax) / 2.0;
        best.cx = mu * u.x + mv * v.x;
        best.cy = mu * u.y + mv * v.y;
        const double deg_u = std::atan2(u.y, u.x) * 180.0 / std::numbers::pi;
        if (std::abs(extent_u - extent_v) <= 1e-9 * std::max(extent_u, extent_v)) {
            best.length = best.width = std::max(extent_u, extent_v);
            best.angle_deg = normalize_angle(deg_u, 90.0);
        } else if (extent_u > extent_v) {
            best.length = extent_u;
            best.width = extent_v;
            best.angle_deg = normalize_angle(deg_u, 180.0);
        } else {
            best.length = extent_v;
            best.width = extent_u;
            best.angle_deg = normalize_angle(deg_u + 90.0, 180.0);
        }
    }
    return best;
}

std::vector<Proposal> filter_false_alarms(std::vector<Proposal> proposals, const FilterConfig& cfg) {
    cfg.validate();
    std::erase_if(proposals, [&](const Proposal& p) {
        const auto& b = p.box;
        const bool keep = b.length >= cfg.min_length && b.length <= cfg.max_length && b.width >= cfg.min_width &&
                          b.width <= cfg.max_width && p.length_width_ratio >= cfg.min_ratio &&
                          p.length_width_ratio <= cfg.max_ratio && p.area_px() >= cfg.min_area;
        return !keep;
    });
    return proposals;
}

std::vector<Proposal> extract_proposals(const BinaryMask& mask, const AnomalyMap& anomaly, const FilterConfig& cfg) {
    if (mask.width() != anomaly.width() || mask.height() != anomaly.height()) {
        throw InputError("proposal extraction: mask and anomaly map dimensions differ");
    }
    std::vector<Proposal> proposals;
    for (auto& pixels : connected_components(mask)) {
        Proposal p;
        p.box = min_rotated_box(pixels);
        p.length_width_ratio = p.box.length / p.box.width;
        double sum = 0.0;
        for (const auto& px : pixels) sum += anomaly.at(px.x, px.y);
        p.score = sum / static_cast<double>(pixels.size());
        p.pixels = std::move(pixels);
        proposals.push_back(std::move(p));
    }
    proposals = filter_false_alarms(std::move(proposals), cfg);
    std::stable_sort(proposals.begin(), proposals.end(),
                     [](const Proposal& a, const Proposal& b) { return a.score > b.score; });
    return proposals;
}

}  // namespace shipprop
