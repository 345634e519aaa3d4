#include "polyart/loss.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace polyart {

namespace {

constexpr double kProbClamp = 1e-7;

}  // namespace

void validate(const FocalParams& p) {
    if (!(p.gamma >= 0.0) || !std::isfinite(p.gamma)) {
        throw ConfigError("focal gamma must be finite and >= 0");
    }
    if (!(p.alpha > 0.0 && p.alpha < 1.0)) {
        throw ConfigError("focal alpha must lie strictly in (0,1)");
    }
}

ValueGrad focal_loss(double q, bool y, const FocalParams& p) {
    if (!(q >= 0.0 && q <= 1.0)) {
        throw std::domain_error("focal loss probability outside [0,1]: " +
                                std::to_string(q));
    }
    const double qc = std::clamp(q, kProbClamp, 1.0 - kProbClamp);
    const double q_star = y ? qc : 1.0 - qc;
    const double a_star = y ? p.alpha : 1.0 - p.alpha;
    const double one_minus = 1.0 - q_star;
    const double log_q = std::log(q_star);

    ValueGrad out;
    if (p.gamma == 0.0) {
        out.value = -a_star * log_q;
        out.grad = -a_star / q_star;
    } else {
        const double pow_g = std::pow(one_minus, p.gamma);
        out.value = -a_star * pow_g * log_q;
        // d/dq* of -a*(1-q*)^g log(q*)
        out.grad = a_star * (p.gamma * std::pow(one_minus, p.gamma - 1.0) *
                                 log_q -
                             pow_g / q_star);
    }
    if (!y) out.grad = -out.grad;  // q* = 1 - q
    return out;
}

ValueGrad smooth_l1(double residual) {
    ValueGrad out;
    const double a = std::abs(residual);
    if (a < 1.0) {
        out.value = 0.5 * residual * residual;
        out.grad = residual;
    } else {
        out.value = a - 0.5;
        out.grad = residual > 0.0 ? 1.0 : -1.0;
    }
    return out;
}

std::size_t AnchorTargets::foreground_count() const {
    std::size_t n = 0;
    for (const AnchorAssignment& a : anchors) {
        if (a.role == AnchorRole::Foreground) ++n;
    }
    return n;
}

std::array<double, 4> encode_box(const Box& anchor, const Box& gt) {
    const double aw = anchor.width();
    const double ah = anchor.height();
    return {(gt.center_x() - anchor.center_x()) / aw,
            (gt.center_y() - anchor.center_y()) / ah,
            std::log(gt.width() / aw), std::log(gt.height() / ah)};
}

Box decode_box(const Box& anchor, std::span<const double, 4> offsets) {
    const double aw = anchor.width();
    const double ah = anchor.height();
    const double cx = anchor.center_x() + offsets[0] * aw;
    const double cy = anchor.center_y() + offsets[1] * ah;
    const double w = aw * std::exp(std::clamp(offsets[2], -4.0, 4.0));
    const double h = ah * std::exp(std::clamp(offsets[3], -4.0, 4.0));
    return Box(cx - 0.5 * w, cy - 0.5 * h, cx + 0.5 * w, cy + 0.5 * h);
}

AnchorTargets assign_anchors(std::span<const Box> anchors,
                             std::span<const LabeledBox> gts, double fg_iou,
                             double bg_iou) {
    if (!(bg_iou <= fg_iou)) {
        throw ConfigError("anchor IoU bands require bg_iou <= fg_iou");
    }
    AnchorTargets out;
    out.anchors.resize(anchors.size());
    for (std::size_t i = 0; i < anchors.size(); ++i) {
        double best = 0.0;
        std::int32_t best_gt = -1;
        for (std::size_t g = 0; g < gts.size(); ++g) {
            const double v = iou(anchors[i], gts[g].box);
            if (v > best) {
                best = v;
                best_gt = static_cast<std::int32_t>(g);
            }
        }
        AnchorAssignment& a = out.anchors[i];
        if (best_gt >= 0 && best >= fg_iou) {
            a.role = AnchorRole::Foreground;
            a.gt_index = best_gt;
            a.cls = gts[static_cast<std::size_t>(best_gt)].cls;
            a.reg_target =
                encode_box(anchors[i], gts[static_cast<std::size_t>(best_gt)].box);
        } else if (best < bg_iou) {
            a.role = AnchorRole::Background;
        } else {
            a.role = AnchorRole::Ignored;
        }
    }
    return out;
}

void validate(const LossConfig& cfg) {
    validate(cfg.focal);
    if (!(cfg.w_reg >= 0.0 && cfg.w_art >= 0.0 && cfg.w_pol >= 0.0)) {
        throw ConfigError("task loss weights must be nonnegative");
    }
    if (cfg.w_reg == 0.0 && cfg.w_art == 0.0 && cfg.w_pol == 0.0) {
        throw ConfigError("at least one task loss weight must be positive");
    }
    if (!(cfg.reg_coeff >= 0.0)) {
        throw ConfigError("regularizer coefficient must be >= 0");
    }
}

double composite_loss(double polyp_cls_loss, double artifact_cls_loss,
                      double reg_loss, double regularizer_value,
                      const LossConfig& cfg) {
    validate(cfg);
    return cfg.w_pol * polyp_cls_loss + cfg.w_art * artifact_cls_loss +
           cfg.w_reg * reg_loss + cfg.reg_coeff * regularizer_value;
}

double weighted_class_loss(const std::map<TaskLabel, double>& per_class_losses,
                           const std::map<TaskLabel, double>& weights) {
    double total = 0.0;
    for (const auto& [label, loss] : per_class_losses) {
        const auto it = weights.find(label);
        if (it == weights.end()) {
            throw MissingWeightError("no weight for class " +
                                     to_string(label));
        }
        total += it->second * loss;
    }
    return total;
}

}  // namespace polyart
