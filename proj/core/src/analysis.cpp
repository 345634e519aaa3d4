#include "polyart/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace polyart {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::vector<Box> class_boxes(const FrameRecord& frame, ArtifactClass cls,
                             double score_threshold) {
    std::vector<Box> boxes;
    for (const Detection& det : frame.artifacts) {
        if (det.artifact_class == cls && det.score >= score_threshold) {
            boxes.push_back(det.box);
        }
    }
    return boxes;
}

bool related(const Box& polyp, const Box& artifact, Relation relation,
             double iou_threshold) {
    if (relation == Relation::Overlap) {
        return iou(polyp, artifact) > iou_threshold;
    }
    return contains(polyp, artifact);
}

}  // namespace

PresenceRule PresenceRule::defaults() {
    PresenceRule rule;
    rule.area_threshold = {
        {ArtifactClass::Blur, 0.50},     {ArtifactClass::Specularity, 0.05},
        {ArtifactClass::Misc, 0.02},     {ArtifactClass::Bubbles, 0.02},
        {ArtifactClass::Contrast, 0.0},  {ArtifactClass::Saturation, 0.0},
    };
    return rule;
}

double PresenceRule::threshold_for(ArtifactClass cls) const {
    const auto it = area_threshold.find(cls);
    return it == area_threshold.end() ? 0.0 : it->second;
}

bool artifact_present(const FrameRecord& frame, ArtifactClass cls,
                      const PresenceRule& rule,
                      double artifact_score_threshold) {
    const std::vector<Box> boxes =
        class_boxes(frame, cls, artifact_score_threshold);
    const double threshold = rule.threshold_for(cls);
    if (threshold == 0.0) return !boxes.empty();
    return union_area_fraction(boxes, frame.image) > threshold;
}

PresenceReport presence_analysis(const Dataset& d, const PresenceRule& rule,
                                 double det_threshold,
                                 double artifact_score_threshold) {
    PresenceReport report;
    report.frame_count = d.frames.size();

    std::vector<MatchOutcome> outcomes;
    outcomes.reserve(d.frames.size());
    for (const FrameRecord& f : d.frames) {
        outcomes.push_back(match_frame(f.gt_polyps, f.pred_polyps,
                                       det_threshold, MatchMode::Strict));
    }

    for (ArtifactClass cls : kReportClassOrder) {
        PresenceClassRow row;
        row.cls = cls;
        std::vector<MatchOutcome> present, absent;
        for (std::size_t i = 0; i < d.frames.size(); ++i) {
            if (artifact_present(d.frames[i], cls, rule,
                                 artifact_score_threshold)) {
                present.push_back(outcomes[i]);
            } else {
                absent.push_back(outcomes[i]);
            }
        }
        row.frequency = d.frames.empty()
                            ? 0.0
                            : static_cast<double>(present.size()) /
                                  static_cast<double>(d.frames.size());
        row.degenerate = present.empty() || absent.empty();
        row.present = metrics(present);
        row.absent = metrics(absent);
        row.d_precision = (row.present.precision - row.absent.precision) * 100.0;
        row.d_recall = (row.present.recall - row.absent.recall) * 100.0;
        row.d_f1 = (row.present.f1 - row.absent.f1) * 100.0;
        row.d_f2 = (row.present.f2 - row.absent.f2) * 100.0;
        report.rows.push_back(row);
    }
    return report;
}

std::string_view to_string(PolypCategory cat) {
    switch (cat) {
        case PolypCategory::GroundTruth: return "ground-truth";
        case PolypCategory::TruePositive: return "true positives";
        case PolypCategory::FalsePositive: return "false positives";
        case PolypCategory::FalseNegative: return "false negatives";
    }
    return "?";
}

RelationReport relation_analysis(const Dataset& d, Relation relation,
                                 const RelationOptions& opts) {
    RelationReport report;
    report.relation = relation;
    for (std::size_t c = 0; c < 4; ++c) {
        report.rows[c].category = static_cast<PolypCategory>(c);
    }
    std::array<std::int64_t, 4> counts{};
    std::array<std::int64_t, 4> any_hits{};
    std::array<std::array<std::int64_t, kAnalysisClassCount>, 4> class_hits{};

    for (const FrameRecord& f : d.frames) {
        // Per-class artifact boxes above the score threshold.
        std::array<std::vector<Box>, kAnalysisClassCount> artifacts;
        for (std::size_t k = 0; k < kReportClassOrder.size(); ++k) {
            artifacts[k] = class_boxes(f, kReportClassOrder[k],
                                       opts.artifact_score_threshold);
        }

        const MatchOutcome outcome = match_frame(
            f.gt_polyps, f.pred_polyps, opts.det_threshold, opts.match_mode);

        const auto tally = [&](PolypCategory cat, const Box& polyp) {
            const auto c = static_cast<std::size_t>(cat);
            ++counts[c];
            bool any = false;
            for (std::size_t k = 0; k < artifacts.size(); ++k) {
                const bool hit = std::any_of(
                    artifacts[k].begin(), artifacts[k].end(),
                    [&](const Box& a) {
                        return related(polyp, a, relation,
                                       opts.iou_threshold);
                    });
                if (hit) {
                    ++class_hits[c][k];
                    any = true;
                }
            }
            if (any) ++any_hits[c];
        };

        for (const Box& gt : f.gt_polyps) {
            tally(PolypCategory::GroundTruth, gt);
        }
        for (const auto& [det_idx, gt_idx] : outcome.tp_pairs) {
            tally(PolypCategory::TruePositive, f.pred_polyps[det_idx].box);
        }
        for (std::size_t det_idx : outcome.fp) {
            tally(PolypCategory::FalsePositive, f.pred_polyps[det_idx].box);
        }
        for (std::size_t gt_idx : outcome.fn) {
            tally(PolypCategory::FalseNegative, f.gt_polyps[gt_idx]);
        }
    }

    for (std::size_t c = 0; c < 4; ++c) {
        RelationRow& row = report.rows[c];
        row.frequency = counts[c];
        const double n = counts[c] > 0 ? static_cast<double>(counts[c]) : 1.0;
        row.any_share = static_cast<double>(any_hits[c]) / n;
        for (std::size_t k = 0; k < kAnalysisClassCount; ++k) {
            row.class_share[k] = static_cast<double>(class_hits[c][k]) / n;
        }
    }
    return report;
}

CorrelationMatrix correlation_matrix(const Dataset& d,
                                     const PresenceRule& rule,
                                     double artifact_score_threshold) {
    if (d.frames.size() < 2) {
        throw TooFewFramesError(
            "correlation needs at least 2 frames, got " +
            std::to_string(d.frames.size()));
    }
    CorrelationMatrix out;
    out.frame_count = d.frames.size();
    const std::size_t n = d.frames.size();

    std::array<std::vector<bool>, kAnalysisClassCount> indicator;
    for (std::size_t k = 0; k < kReportClassOrder.size(); ++k) {
        indicator[k].reserve(n);
        for (const FrameRecord& f : d.frames) {
            indicator[k].push_back(artifact_present(
                f, kReportClassOrder[k], rule, artifact_score_threshold));
        }
        const auto ones = static_cast<std::size_t>(std::count(
            indicator[k].begin(), indicator[k].end(), true));
        out.constant[k] = ones == 0 || ones == n;
    }

    for (std::size_t a = 0; a < kAnalysisClassCount; ++a) {
        for (std::size_t b = 0; b < kAnalysisClassCount; ++b) {
            if (out.constant[a] || out.constant[b]) {
                out.phi[a][b] = kNan;
                continue;
            }
            if (a == b) {
                out.phi[a][b] = 1.0;
                continue;
            }
            double n11 = 0, n10 = 0, n01 = 0, n00 = 0;
            for (std::size_t i = 0; i < n; ++i) {
                const bool x = indicator[a][i];
                const bool y = indicator[b][i];
                if (x && y) ++n11;
                else if (x) ++n10;
                else if (y) ++n01;
                else ++n00;
            }
            const double r1 = n11 + n10, r0 = n01 + n00;
            const double c1 = n11 + n01, c0 = n10 + n00;
            out.phi[a][b] =
                (n11 * n00 - n10 * n01) / std::sqrt(r1 * r0 * c1 * c0);
        }
    }
    return out;
}

}  // namespace polyart
