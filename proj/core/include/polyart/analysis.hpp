#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <vector>

#include "polyart/dataset.hpp"
#include "polyart/evaluation.hpp"

namespace polyart {

/// Per-class area thresholds deciding when an artifact counts as present
/// in a frame. A class is present when the pixel-union of its boxes
/// exceeds the threshold fraction of the image; at threshold 0 a single
/// box suffices.
struct PresenceRule {
    std::map<ArtifactClass, double> area_threshold;

    /// Blur 0.50, Specularity 0.05, Misc 0.02, Bubbles 0.02,
    /// Contrast 0, Saturation 0.
    static PresenceRule defaults();

    double threshold_for(ArtifactClass cls) const;
};

/// True iff `cls` is present in the frame under the rule. Only artifact
/// boxes with score >= artifact_score_threshold count.
bool artifact_present(const FrameRecord& frame, ArtifactClass cls,
                      const PresenceRule& rule,
                      double artifact_score_threshold = 0.0);

/// One row of the presence table: frequency of the class and the
/// present-minus-absent score differences in percentage points.
/// `degenerate` marks classes where one split is empty.
struct PresenceClassRow {
    ArtifactClass cls = ArtifactClass::Blur;
    double frequency = 0.0;  // share of frames where the class is present
    bool degenerate = false;
    double d_precision = 0.0;
    double d_recall = 0.0;
    double d_f1 = 0.0;
    double d_f2 = 0.0;
    Metrics present;
    Metrics absent;
};

struct PresenceReport {
    std::vector<PresenceClassRow> rows;  // kReportClassOrder
    std::size_t frame_count = 0;
};

/// Splits frames by artifact presence per class and compares Strict-mode
/// polyp detection metrics between the splits.
PresenceReport presence_analysis(const Dataset& d, const PresenceRule& rule,
                                 double det_threshold = 0.5,
                                 double artifact_score_threshold = 0.25);

/// Spatial relation between a polyp box and an artifact box.
enum class Relation {
    Overlap,   // IoU greater than the threshold
    Contains,  // artifact box fully inside the polyp box
};

enum class PolypCategory : std::uint8_t {
    GroundTruth = 0,
    TruePositive = 1,
    FalsePositive = 2,
    FalseNegative = 3,
};

std::string_view to_string(PolypCategory cat);

/// One row of the relation table: for every category of polyp box, the
/// share of boxes related to at least one artifact of each class, plus
/// the "any artifact" union share.
struct RelationRow {
    PolypCategory category = PolypCategory::GroundTruth;
    std::int64_t frequency = 0;
    double any_share = 0.0;
    std::array<double, kAnalysisClassCount> class_share{};  // kReportClassOrder
};

struct RelationReport {
    Relation relation = Relation::Overlap;
    std::array<RelationRow, 4> rows;  // gt, tp, fp, fn
};

struct RelationOptions {
    double iou_threshold = 0.5;
    double artifact_score_threshold = 0.25;
    double det_threshold = 0.5;
    MatchMode match_mode = MatchMode::Analysis;
};

/// Counts, per polyp-box category, how often boxes overlap artifacts
/// (IoU > iou_threshold) or fully contain them. Matching defaults to
/// Analysis mode, where duplicate detections of one polyp all stay TPs.
RelationReport relation_analysis(const Dataset& d, Relation relation,
                                 const RelationOptions& opts = {});

/// Phi coefficients between per-frame presence indicators of the six
/// analysis classes, in kReportClassOrder. Entries involving a constant
/// indicator are NaN and the class is flagged in `constant`.
struct CorrelationMatrix {
    std::array<std::array<double, kAnalysisClassCount>, kAnalysisClassCount>
        phi{};
    std::array<bool, kAnalysisClassCount> constant{};
    std::size_t frame_count = 0;
};

/// Requires at least 2 frames (TooFewFramesError otherwise).
CorrelationMatrix correlation_matrix(const Dataset& d,
                                     const PresenceRule& rule,
                                     double artifact_score_threshold = 0.25);

}  // namespace polyart
