#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "polyart/geometry.hpp"

namespace polyart {

/// Artifact classes with stable integer codes fixed by the file format.
/// Instrument (code 6) is accepted on ingestion but excluded from all
/// analyses and label specs; the six analysis classes carry codes 0-5.
enum class ArtifactClass : std::uint8_t {
    Blur = 0,
    Bubbles = 1,
    Contrast = 2,
    Specularity = 3,
    Saturation = 4,
    Misc = 5,
    Instrument = 6,
};

inline constexpr int kArtifactClassCount = 7;
inline constexpr int kAnalysisClassCount = 6;

/// The six classes used by every analysis, in code order.
inline constexpr std::array<ArtifactClass, kAnalysisClassCount>
    kAnalysisClasses = {ArtifactClass::Blur,       ArtifactClass::Bubbles,
                        ArtifactClass::Contrast,   ArtifactClass::Specularity,
                        ArtifactClass::Saturation, ArtifactClass::Misc};

/// The class order used by report tables: bubbles, blur, misc,
/// specularity, saturation, contrast.
inline constexpr std::array<ArtifactClass, kAnalysisClassCount>
    kReportClassOrder = {ArtifactClass::Bubbles,     ArtifactClass::Blur,
                         ArtifactClass::Misc,        ArtifactClass::Specularity,
                         ArtifactClass::Saturation,  ArtifactClass::Contrast};

std::string_view to_string(ArtifactClass cls);

/// Parses a lowercase class name ("blur", ..., "instrument").
/// Throws ParseError on an unknown name.
ArtifactClass artifact_class_from_string(std::string_view name);

/// Converts a stable integer code (0-6) to the class.
/// Throws ParseError when the code is out of range.
ArtifactClass artifact_class_from_code(int code);

/// One class label in the multi-task label space: either the polyp class
/// or one of the artifact classes.
class TaskLabel {
  public:
    static constexpr TaskLabel polyp() noexcept { return TaskLabel(-1); }
    static constexpr TaskLabel artifact(ArtifactClass cls) noexcept {
        return TaskLabel(static_cast<int>(cls));
    }

    constexpr bool is_polyp() const noexcept { return code_ < 0; }
    constexpr ArtifactClass artifact_class() const {
        return static_cast<ArtifactClass>(code_);
    }

    friend constexpr auto operator<=>(TaskLabel, TaskLabel) = default;

  private:
    constexpr explicit TaskLabel(int code) noexcept : code_(code) {}
    int code_;
};

std::string to_string(TaskLabel label);

/// A scored box. Polyp detections leave `artifact_class` empty; artifact
/// detections carry their class. Scores must lie in [0,1].
struct Detection {
    Box box;
    double score = 1.0;
    std::optional<ArtifactClass> artifact_class;

    Detection(Box b, double s,
              std::optional<ArtifactClass> cls = std::nullopt);

    friend bool operator==(const Detection&, const Detection&) = default;
};

/// One video frame: ground-truth polyp boxes, predicted polyp boxes with
/// scores, and artifact boxes with class and score.
struct FrameRecord {
    std::string frame_id;
    ImageSize image{1, 1};
    std::vector<Box> gt_polyps;
    std::vector<Detection> pred_polyps;  // artifact_class empty
    std::vector<Detection> artifacts;    // artifact_class set

    friend bool operator==(const FrameRecord&, const FrameRecord&) = default;
};

/// How the class labels of a fused dataset are organized.
enum class LabelMode {
    TwoHead,         // polyp labels and artifact labels stay partitioned
    FlatMultiClass,  // one flat label space: polyp + artifact classes
};

std::string_view to_string(LabelMode mode);
LabelMode label_mode_from_string(std::string_view name);

/// Ordered collection of frames. Iteration order is the frame order and
/// is deterministic; frame ids are unique (enforced by `validate`).
struct Dataset {
    std::string name;
    std::vector<FrameRecord> frames;
    std::optional<LabelMode> label_mode;  // set by apply_label_spec
    std::string notes;                    // free-form provenance, not serialized

    bool operator==(const Dataset& other) const {
        return name == other.name && frames == other.frames &&
               label_mode == other.label_mode;
    }
};

/// Checks frame-id uniqueness and per-list label placement (polyp
/// detections carry no class, artifact detections carry one).
/// Throws InvariantError naming the offending frame.
void validate(const Dataset& d);

/// Label-space configuration for a fused multi-task dataset.
struct MultiTaskLabelSpec {
    LabelMode mode = LabelMode::TwoHead;
    double artifact_threshold = 0.0;
    std::vector<ArtifactClass> included_artifacts;  // analysis classes only
    std::map<TaskLabel, double> class_weights;      // empty = unweighted
};

/// Throws ConfigError when the spec is inconsistent (empty class set,
/// threshold outside [0,1], weights not summing to 1 within 1e-9, or a
/// non-analysis class in the set).
void validate(const MultiTaskLabelSpec& spec);

/// Builds the fused multi-task dataset: `polyp_ds` with each frame's
/// artifacts replaced by those detections of the matching `artifact_ds`
/// frame whose score is >= threshold. Polyp annotations are untouched and
/// pseudo-label scores are preserved. Frames of `polyp_ds` absent from
/// `artifact_ds` merge with zero artifacts; a frame of `artifact_ds` that
/// is missing from `polyp_ds` raises FrameAlignmentError.
Dataset merge_pseudo_labels(const Dataset& polyp_ds, const Dataset& artifact_ds,
                            double threshold);

/// Applies a label spec: artifacts outside `included_artifacts` or below
/// `artifact_threshold` are dropped and the dataset is tagged with the
/// spec's mode. gt_polyps and pred_polyps are never altered.
Dataset apply_label_spec(const Dataset& d, const MultiTaskLabelSpec& spec);

/// Weight map giving the polyp class `polyp_share` and distributing the
/// remaining share equally over `artifact_classes`. With no share, all
/// classes (polyp included) are weighted uniformly. Shares outside (0,1)
/// raise ConfigError. The result always sums to 1 within 1e-9.
std::map<TaskLabel, double> class_weighting(
    std::optional<double> polyp_share,
    const std::vector<ArtifactClass>& artifact_classes);

/// Mean number of artifact boxes per frame (the fusion diagnostic).
double artifacts_per_image(const Dataset& d);

}  // namespace polyart
