#include "polyart/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

namespace polyart {

namespace {

constexpr std::array<std::string_view, kArtifactClassCount> kClassNames = {
    "blur", "bubbles", "contrast", "specularity",
    "saturation", "misc", "instrument"};

}  // namespace

std::string_view to_string(ArtifactClass cls) {
    return kClassNames[static_cast<std::size_t>(cls)];
}

ArtifactClass artifact_class_from_string(std::string_view name) {
    for (std::size_t i = 0; i < kClassNames.size(); ++i) {
        if (kClassNames[i] == name) return static_cast<ArtifactClass>(i);
    }
    throw ParseError("unknown artifact class name '" + std::string(name) +
                     "'");
}

ArtifactClass artifact_class_from_code(int code) {
    if (code < 0 || code >= kArtifactClassCount) {
        throw ParseError("artifact class code out of range: " +
                         std::to_string(code));
    }
    return static_cast<ArtifactClass>(code);
}

std::string to_string(TaskLabel label) {
    if (label.is_polyp()) return "polyp";
    return std::string(to_string(label.artifact_class()));
}

Detection::Detection(Box b, double s, std::optional<ArtifactClass> cls)
    : box(b), score(s), artifact_class(cls) {
    if (!(score >= 0.0 && score <= 1.0)) {
        throw InvariantError("detection score outside [0,1]: " +
                             std::to_string(s));
    }
}

std::string_view to_string(LabelMode mode) {
    return mode == LabelMode::TwoHead ? "two_head" : "flat_multiclass";
}

LabelMode label_mode_from_string(std::string_view name) {
    if (name == "two_head") return LabelMode::TwoHead;
    if (name == "flat_multiclass") return LabelMode::FlatMultiClass;
    throw ParseError("unknown label mode '" + std::string(name) + "'");
}

void validate(const Dataset& d) {
    std::unordered_set<std::string> seen;
    seen.reserve(d.frames.size());
    for (const FrameRecord& f : d.frames) {
        if (!seen.insert(f.frame_id).second) {
            throw InvariantError("duplicate frame id '" + f.frame_id + "'");
        }
        for (const Detection& det : f.pred_polyps) {
            if (det.artifact_class.has_value()) {
                throw InvariantError("frame '" + f.frame_id +
                                     "': polyp prediction carries an "
                                     "artifact class");
            }
        }
        for (const Detection& det : f.artifacts) {
            if (!det.artifact_class.has_value()) {
                throw InvariantError("frame '" + f.frame_id +
                                     "': artifact detection without a class");
            }
        }
    }
}

void validate(const MultiTaskLabelSpec& spec) {
    if (spec.included_artifacts.empty()) {
        throw ConfigError("label spec includes no artifact classes");
    }
    if (!(spec.artifact_threshold >= 0.0 && spec.artifact_threshold <= 1.0)) {
        throw ConfigError("artifact threshold outside [0,1]");
    }
    std::unordered_set<int> seen;
    for (ArtifactClass cls : spec.included_artifacts) {
        if (cls == ArtifactClass::Instrument) {
            throw ConfigError("instrument is not an analysis class");
        }
        if (!seen.insert(static_cast<int>(cls)).second) {
            throw ConfigError("duplicate artifact class in label spec");
        }
    }
    if (!spec.class_weights.empty()) {
        double sum = 0.0;
        for (const auto& [label, w] : spec.class_weights) {
            if (!(w >= 0.0 && w <= 1.0)) {
                throw ConfigError("class weight outside [0,1] for " +
                                  to_string(label));
            }
            sum += w;
        }
        if (std::abs(sum - 1.0) > 1e-9) {
            throw ConfigError("class weights sum to " + std::to_string(sum) +
                              ", expected 1");
        }
    }
}

Dataset merge_pseudo_labels(const Dataset& polyp_ds, const Dataset& artifact_ds,
                            double threshold) {
    std::unordered_map<std::string_view, const FrameRecord*> by_id;
    by_id.reserve(polyp_ds.frames.size());
    for (const FrameRecord& f : polyp_ds.frames) by_id.emplace(f.frame_id, &f);

    for (const FrameRecord& f : artifact_ds.frames) {
        if (!by_id.contains(f.frame_id)) {
            throw FrameAlignmentError("frame '" + f.frame_id +
                                      "' of the artifact dataset is missing "
                                      "from the polyp dataset");
        }
    }

    std::unordered_map<std::string_view, const FrameRecord*> art_by_id;
    art_by_id.reserve(artifact_ds.frames.size());
    for (const FrameRecord& f : artifact_ds.frames) {
        art_by_id.emplace(f.frame_id, &f);
    }

    Dataset fused;
    fused.name = polyp_ds.name;
    fused.frames.reserve(polyp_ds.frames.size());
    for (const FrameRecord& f : polyp_ds.frames) {
        FrameRecord out = f;
        out.artifacts.clear();
        if (auto it = art_by_id.find(f.frame_id); it != art_by_id.end()) {
            for (const Detection& det : it->second->artifacts) {
                if (det.score >= threshold) out.artifacts.push_back(det);
            }
        }
        fused.frames.push_back(std::move(out));
    }
    return fused;
}

Dataset apply_label_spec(const Dataset& d, const MultiTaskLabelSpec& spec) {
    validate(spec);
    Dataset out = d;
    out.label_mode = spec.mode;
    const auto included = [&](ArtifactClass cls) {
        return std::find(spec.included_artifacts.begin(),
                         spec.included_artifacts.end(),
                         cls) != spec.included_artifacts.end();
    };
    for (FrameRecord& f : out.frames) {
        std::erase_if(f.artifacts, [&](const Detection& det) {
            return !included(*det.artifact_class) ||
                   det.score < spec.artifact_threshold;
        });
    }
    return out;
}

std::map<TaskLabel, double> class_weighting(
    std::optional<double> polyp_share,
    const std::vector<ArtifactClass>& artifact_classes) {
    if (artifact_classes.empty()) {
        throw ConfigError("class weighting requires at least one artifact "
                          "class");
    }
    const auto n = static_cast<double>(artifact_classes.size());
    std::map<TaskLabel, double> weights;
    if (polyp_share.has_value()) {
        if (!(*polyp_share > 0.0 && *polyp_share < 1.0)) {
            throw ConfigError("polyp share must lie strictly in (0,1)");
        }
        weights[TaskLabel::polyp()] = *polyp_share;
        for (ArtifactClass cls : artifact_classes) {
            weights[TaskLabel::artifact(cls)] = (1.0 - *polyp_share) / n;
        }
    } else {
        const double uniform = 1.0 / (n + 1.0);
        weights[TaskLabel::polyp()] = uniform;
        for (ArtifactClass cls : artifact_classes) {
            weights[TaskLabel::artifact(cls)] = uniform;
        }
    }
    return weights;
}

double artifacts_per_image(const Dataset& d) {
    if (d.frames.empty()) return 0.0;
    std::size_t total = 0;
    for (const FrameRecord& f : d.frames) total += f.artifacts.size();
    return static_cast<double>(total) / static_cast<double>(d.frames.size());
}

}  // namespace polyart
