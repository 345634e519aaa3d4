#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "polyart/dataset.hpp"

namespace polyart {

/// Focal-loss parameters: focusing exponent gamma >= 0 and foreground
/// weight alpha in (0,1).
struct FocalParams {
    double gamma = 2.5;
    double alpha = 0.25;
};

void validate(const FocalParams& p);

/// A scalar value together with its derivative.
struct ValueGrad {
    double value = 0.0;
    double grad = 0.0;
};

/// Focal loss of a single prediction. q is the estimated probability of
/// the positive class, y the binary target. With q* = q for y=1 and 1-q
/// otherwise (alpha* analogously), the loss is
///   -alpha* (1 - q*)^gamma log(q*)
/// and grad is d(loss)/dq. q is clamped to [1e-7, 1-1e-7] before the log;
/// values outside [0,1] raise std::domain_error. gamma = 0 reduces to
/// alpha-weighted cross-entropy.
ValueGrad focal_loss(double q, bool y, const FocalParams& p);

/// Smooth L1: 0.5 r^2 for |r| < 1, |r| - 0.5 otherwise. Loss and gradient
/// are continuous at |r| = 1.
ValueGrad smooth_l1(double residual);

/// A ground-truth box with an integer class index.
struct LabeledBox {
    Box box;
    int cls = 0;
};

enum class AnchorRole : std::uint8_t { Foreground, Background, Ignored };

/// Per-anchor assignment. Foreground anchors carry the index and class of
/// their max-IoU ground truth plus normalized center/size offsets
/// (dx, dy, dw, dh).
struct AnchorAssignment {
    AnchorRole role = AnchorRole::Background;
    std::int32_t gt_index = -1;
    std::int32_t cls = -1;
    std::array<double, 4> reg_target{};
};

struct AnchorTargets {
    std::vector<AnchorAssignment> anchors;

    std::size_t foreground_count() const;
};

/// Matches anchors to ground truths by IoU: foreground at max IoU >=
/// fg_iou (class of the max-IoU gt, ties to the first gt), background
/// below bg_iou, ignored in between. No ground truths means all
/// background.
AnchorTargets assign_anchors(std::span<const Box> anchors,
                             std::span<const LabeledBox> gts,
                             double fg_iou = 0.5, double bg_iou = 0.4);

/// Encodes `gt` relative to `anchor` as (dx, dy, dw, dh):
/// dx = (gcx-acx)/aw, dy = (gcy-acy)/ah, dw = log(gw/aw), dh = log(gh/ah).
std::array<double, 4> encode_box(const Box& anchor, const Box& gt);

/// Inverse of encode_box. dw and dh are clamped to [-4, 4] so decoded
/// boxes stay finite.
Box decode_box(const Box& anchor, std::span<const double, 4> offsets);

/// Weights of the composite objective: one weight per subnetwork loss
/// (regression, artifact classification, polyp classification), optional
/// per-class weights for the classification channels, and the coefficient
/// of the sum-of-squares weight regularizer.
struct LossConfig {
    FocalParams focal;
    double w_reg = 1.0;
    double w_art = 1.0;
    double w_pol = 1.0;
    std::map<TaskLabel, double> class_weights;  // empty = unweighted
    double reg_coeff = 0.0;                     // lambda
};

void validate(const LossConfig& cfg);

/// w_pol * polyp_cls + w_art * artifact_cls + w_reg * reg +
/// lambda * regularizer. All task weights zero raises ConfigError.
double composite_loss(double polyp_cls_loss, double artifact_cls_loss,
                      double reg_loss, double regularizer_value,
                      const LossConfig& cfg);

/// Sum of weight(c) * loss(c). A loss whose label has no weight raises
/// MissingWeightError.
double weighted_class_loss(const std::map<TaskLabel, double>& per_class_losses,
                           const std::map<TaskLabel, double>& weights);

}  // namespace polyart
