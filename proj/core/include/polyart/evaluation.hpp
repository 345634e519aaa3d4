#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "polyart/dataset.hpp"

namespace polyart {

/// Counting modes for centroid matching.
///
/// Strict: each ground-truth box can absorb one true positive; further
/// detections of an already-detected polyp are false positives.
///
/// Analysis: duplicates stay true positives — a detection is a TP iff its
/// centroid lies inside any ground-truth box, so tp + fn may exceed the
/// ground-truth count.
enum class MatchMode { Strict, Analysis };

/// Matching result for one frame. Indices refer to the input lists.
struct MatchOutcome {
    MatchMode mode = MatchMode::Strict;
    std::vector<std::pair<std::size_t, std::size_t>> tp_pairs;  // (det, gt)
    std::vector<std::size_t> fp;  // detection indices
    std::vector<std::size_t> fn;  // ground-truth indices
};

/// Applies the centroid criterion to one frame. Detections with
/// score < score_threshold are discarded; the rest are processed in
/// descending score order (ties keep input order). In Strict mode a
/// detection matches the first unmatched ground-truth box (input order)
/// containing its centroid; in Analysis mode any containing box counts
/// and ground-truth boxes are never exhausted.
MatchOutcome match_frame(const std::vector<Box>& gt,
                         const std::vector<Detection>& dets,
                         double score_threshold, MatchMode mode);

/// Micro-aggregated counts and derived scores. Zero denominators yield 0.
struct Metrics {
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    std::int64_t fn = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double f2 = 0.0;
};

/// F-beta = (1+beta^2) P R / (beta^2 P + R); 0 when the denominator is 0.
double f_beta(double precision, double recall, double beta);

/// Aggregates frame outcomes into dataset metrics. All outcomes must come
/// from the same mode (ModeMixError otherwise).
Metrics metrics(std::span<const MatchOutcome> outcomes);

/// Builds metrics directly from counts.
Metrics metrics_from_counts(std::int64_t tp, std::int64_t fp, std::int64_t fn);

}  // namespace polyart
