#include "polyart/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace polyart {

namespace {

std::string describe(double x0, double y0, double x1, double y1) {
    return "(" + std::to_string(x0) + ", " + std::to_string(y0) + ", " +
           std::to_string(x1) + ", " + std::to_string(y1) + ")";
}

}  // namespace

Box::Box(double x0, double y0, double x1, double y1)
    : x_min(x0), y_min(y0), x_max(x1), y_max(y1) {
    if (!std::isfinite(x0) || !std::isfinite(y0) || !std::isfinite(x1) ||
        !std::isfinite(y1)) {
        throw InvariantError("box has non-finite coordinates " +
                             describe(x0, y0, x1, y1));
    }
    if (!(x_min < x_max) || !(y_min < y_max)) {
        throw InvariantError("box has zero or negative area " +
                             describe(x0, y0, x1, y1));
    }
}

ImageSize::ImageSize(int w, int h) : width(w), height(h) {
    if (w < 1 || h < 1) {
        throw InvariantError("image size must be at least 1x1, got " +
                             std::to_string(w) + "x" + std::to_string(h));
    }
}

double iou(const Box& a, const Box& b) {
    const double ix0 = std::max(a.x_min, b.x_min);
    const double iy0 = std::max(a.y_min, b.y_min);
    const double ix1 = std::min(a.x_max, b.x_max);
    const double iy1 = std::min(a.y_max, b.y_max);
    if (ix0 >= ix1 || iy0 >= iy1) return 0.0;
    const double inter = (ix1 - ix0) * (iy1 - iy0);
    const double uni = a.area() + b.area() - inter;
    return inter / uni;
}

bool centroid_inside(const Box& det, const Box& gt) {
    const double cx = det.center_x();
    const double cy = det.center_y();
    return cx >= gt.x_min && cx <= gt.x_max && cy >= gt.y_min &&
           cy <= gt.y_max;
}

bool contains(const Box& outer, const Box& inner) {
    return inner.x_min >= outer.x_min && inner.x_max <= outer.x_max &&
           inner.y_min >= outer.y_min && inner.y_max <= outer.y_max;
}

double union_area_fraction(std::span<const Box> boxes, const ImageSize& img) {
    struct Rect {
        double x0, y0, x1, y1;
    };

    // Clip to the image and drop boxes that fall entirely outside it.
    std::vector<Rect> clipped;
    clipped.reserve(boxes.size());
    const double w = static_cast<double>(img.width);
    const double h = static_cast<double>(img.height);
    for (const Box& b : boxes) {
        const Rect r{std::max(b.x_min, 0.0), std::max(b.y_min, 0.0),
                     std::min(b.x_max, w), std::min(b.y_max, h)};
        if (r.x0 < r.x1 && r.y0 < r.y1) clipped.push_back(r);
    }
    if (clipped.empty()) return 0.0;

    // Coordinate-compression sweep over x: within each vertical slab the
    // set of active boxes is constant, so the covered y-length is the
    // merged length of their y-intervals.
    std::vector<double> xs;
    xs.reserve(clipped.size() * 2);
    for (const Rect& r : clipped) {
        xs.push_back(r.x0);
        xs.push_back(r.x1);
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

    double covered = 0.0;
    std::vector<std::pair<double, double>> spans;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        const double slab_w = xs[i + 1] - xs[i];
        if (slab_w <= 0.0) continue;
        spans.clear();
        for (const Rect& r : clipped) {
            if (r.x0 <= xs[i] && r.x1 >= xs[i + 1]) {
                spans.emplace_back(r.y0, r.y1);
            }
        }
        if (spans.empty()) continue;
        std::sort(spans.begin(), spans.end());
        double merged = 0.0;
        double cur_lo = spans.front().first;
        double cur_hi = spans.front().second;
        for (std::size_t k = 1; k < spans.size(); ++k) {
            if (spans[k].first > cur_hi) {
                merged += cur_hi - cur_lo;
                cur_lo = spans[k].first;
                cur_hi = spans[k].second;
            } else {
                cur_hi = std::max(cur_hi, spans[k].second);
            }
        }
        merged += cur_hi - cur_lo;
        covered += merged * slab_w;
    }
    return covered / img.area();
}

}  // namespace polyart
