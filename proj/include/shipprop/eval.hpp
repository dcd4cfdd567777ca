#pragma once

#include <span>
#include <vector>

#include "shipprop/proposals.hpp"

namespace shipprop {

struct PointD {
    double x = 0.0;
    double y = 0.0;
};

struct Annotation {
    int id = 0;
    std::vector<PointD> polygon;  // pixel coordinates, >= 3 vertices
};

struct GroundTruth {
    std::vector<Annotation> annotations;
};

/// Pixels of a width x height image whose centres lie inside the polygon
/// (even-odd rule; points on an edge count as inside).
PixelSet rasterize_polygon(std::span<const PointD> polygon, int width, int height);

/// Rasterises every annotation; throws InputError if one covers no pixel.
std::vector<PixelSet> rasterize(const GroundTruth& gt, int width, int height);

/// |a n b| / |a u b| for raster-ordered pixel sets.
double iou(const PixelSet& a, const PixelSet& b);

struct Match {
    std::size_t proposal = 0;
    std::size_t truth = 0;
    double iou = 0.0;
};

struct Matching {
    std::vector<Match> pairs;
    std::vector<std::size_t> false_alarms;  // unmatched proposal indices
    std::vector<std::size_t> missed;        // unmatched ground-truth indices
};

/// Pairwise IoU table, indexed [proposal][truth].
std::vector<std::vector<double>> iou_table(std::span<const Proposal> proposals, std::span<const PixelSet> truths);

/// Greedy one-to-one matching: pairs in order of IoU (descending), then
/// proposal score (descending), then proposal raster order, then truth index;
/// a pair is accepted when IoU > t and both sides are still free.
Matching match_proposals(std::span<const Proposal> proposals, std::span<const PixelSet> truths, double t);

/// IoU thresholds 0.50, 0.55, ..., 0.95.
std::vector<double> default_t_grid();

/// Raw per-scene tallies. Tallies for several scenes add up.
struct EvalCounts {
    std::size_t truths = 0;
    std::size_t proposals = 0;
    std::size_t detected_05 = 0;
    std::vector<std::size_t> detected_at;  // parallel to the T grid

    EvalCounts& operator+=(const EvalCounts& other);
};

EvalCounts count_matches(std::span<const Proposal> proposals, std::span<const PixelSet> truths,
                         std::span<const double> t_grid);

struct EvalReport {
    double recall_05 = 0.0;
    double precision_05 = 0.0;
    double f1_05 = 0.0;
    double average_recall = 0.0;
    std::vector<std::pair<double, double>> per_t_recall;
    std::size_t detected = 0;
    std::size_t missed = 0;
    std::size_t false_alarms = 0;
    bool precision_undefined = false;  // no proposals; precision reported as 0
    bool recall_undefined = false;     // no ground truth; recall reported as 0
};

EvalReport summarize(const EvalCounts& counts, std::span<const double> t_grid);

EvalReport evaluate(std::span<const Proposal> proposals, std::span<const PixelSet> truths,
                    std::span<const double> t_grid);

}  // namespace shipprop
