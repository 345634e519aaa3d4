#pragma once

#include <compare>
#include <span>
#include <vector>

#include "polyart/errors.hpp"

namespace polyart {

/// Axis-aligned bounding box in pixel coordinates, continuous-geometry
/// convention: area = (x_max - x_min) * (y_max - y_min). Construction
/// rejects non-finite coordinates and zero or negative area.
struct Box {
    double x_min;
    double y_min;
    double x_max;
    double y_max;

    Box(double x0, double y0, double x1, double y1);

    double width() const { return x_max - x_min; }
    double height() const { return y_max - y_min; }
    double area() const { return width() * height(); }
    double center_x() const { return 0.5 * (x_min + x_max); }
    double center_y() const { return 0.5 * (y_min + y_max); }

    friend bool operator==(const Box&, const Box&) = default;
};

/// Frame dimensions in pixels. Both sides must be >= 1.
struct ImageSize {
    int width;
    int height;

    ImageSize(int w, int h);

    double area() const { return static_cast<double>(width) * height; }

    friend bool operator==(const ImageSize&, const ImageSize&) = default;
};

/// Intersection-over-union of two boxes. Symmetric, 0 for disjoint boxes,
/// 1 iff the boxes are identical.
double iou(const Box& a, const Box& b);

/// True iff the center point of `det` lies within `gt`. The boundary is
/// inclusive: a centroid exactly on an edge of `gt` counts as inside.
bool centroid_inside(const Box& det, const Box& gt);

/// True iff `inner` is fully contained in `outer`, edges inclusive.
/// contains(b, b) is true for every box b.
bool contains(const Box& outer, const Box& inner);

/// Fraction of the image covered by the union of the boxes. Boxes are
/// clipped to the image first; overlapping regions are counted once.
/// Computed by a coordinate-compression sweep, exact for inputs whose
/// coordinates are exactly representable (e.g. integer-valued boxes).
double union_area_fraction(std::span<const Box> boxes, const ImageSize& img);

}  // namespace polyart
