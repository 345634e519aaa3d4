#pragma once

// Brute-force reference implementations used only by tests. They stay
// deliberately independent of the library's algorithms: coverage and IoU
// are computed by counting grid cells, matching by a direct greedy trace.

#include <algorithm>
#include <cstdint>
#include <vector>

#include <polyart/dataset.hpp>
#include <polyart/evaluation.hpp>
#include <polyart/geometry.hpp>

namespace oracles {

/// Cell (x, y) is covered by an integer box iff x_min <= x < x_max and
/// y_min <= y < y_max (the grid convention that coincides with continuous
/// geometry on integer coordinates).
inline bool cell_covered(const polyart::Box& b, int x, int y) {
    return x >= b.x_min && x < b.x_max && y >= b.y_min && y < b.y_max;
}

inline double raster_union_fraction(const std::vector<polyart::Box>& boxes,
                                    int width, int height) {
    std::int64_t covered = 0;
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            for (const polyart::Box& b : boxes) {
                if (cell_covered(b, x, y)) {
                    ++covered;
                    break;
                }
            }
        }
    }
    return static_cast<double>(covered) /
           (static_cast<double>(width) * height);
}

/// IoU by counting cells over a grid that spans both boxes; exact for
/// integer-coordinate boxes.
inline double raster_iou(const polyart::Box& a, const polyart::Box& b) {
    const int x0 = static_cast<int>(std::min(a.x_min, b.x_min));
    const int x1 = static_cast<int>(std::max(a.x_max, b.x_max));
    const int y0 = static_cast<int>(std::min(a.y_min, b.y_min));
    const int y1 = static_cast<int>(std::max(a.y_max, b.y_max));
    std::int64_t inter = 0, uni = 0;
    for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) {
            const bool in_a = cell_covered(a, x, y);
            const bool in_b = cell_covered(b, x, y);
            if (in_a && in_b) ++inter;
            if (in_a || in_b) ++uni;
        }
    }
    return static_cast<double>(inter) / static_cast<double>(uni);
}

/// Containment as cell-set inclusion.
inline bool raster_contains(const polyart::Box& outer,
                            const polyart::Box& inner) {
    const int x0 = static_cast<int>(inner.x_min);
    const int x1 = static_cast<int>(inner.x_max);
    const int y0 = static_cast<int>(inner.y_min);
    const int y1 = static_cast<int>(inner.y_max);
    for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) {
            if (!cell_covered(outer, x, y)) return false;
        }
    }
    return true;
}

/// Strict centroid matching traced directly from the documented rule:
/// walk detections in descending score (ties by input position), give
/// each one the first unexhausted ground truth containing its centroid.
struct OracleCounts {
    int tp = 0;
    int fp = 0;
    int fn = 0;
};

inline OracleCounts strict_match_oracle(
    const std::vector<polyart::Box>& gts,
    const std::vector<polyart::Detection>& dets, double threshold) {
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < dets.size(); ++i) {
        if (dets[i].score >= threshold) order.push_back(i);
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) {
                         return dets[a].score > dets[b].score;
                     });
    OracleCounts counts;
    std::vector<bool> used(gts.size(), false);
    for (std::size_t idx : order) {
        const double cx = dets[idx].box.center_x();
        const double cy = dets[idx].box.center_y();
        bool matched = false;
        for (std::size_t g = 0; g < gts.size() && !matched; ++g) {
            if (used[g]) continue;
            if (cx >= gts[g].x_min && cx <= gts[g].x_max &&
                cy >= gts[g].y_min && cy <= gts[g].y_max) {
                used[g] = true;
                matched = true;
            }
        }
        matched ? ++counts.tp : ++counts.fp;
    }
    for (bool u : used) {
        if (!u) ++counts.fn;
    }
    return counts;
}

/// Central finite difference of a scalar function.
template <typename F>
double central_diff(F f, double x, double h = 1e-6) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

}  // namespace oracles
