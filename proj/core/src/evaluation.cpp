#include "polyart/evaluation.hpp"

#include <algorithm>
#include <numeric>

namespace polyart {

MatchOutcome match_frame(const std::vector<Box>& gt,
                         const std::vector<Detection>& dets,
                         double score_threshold, MatchMode mode) {
    MatchOutcome out;
    out.mode = mode;

    std::vector<std::size_t> order;
    order.reserve(dets.size());
    for (std::size_t i = 0; i < dets.size(); ++i) {
        if (dets[i].score >= score_threshold) order.push_back(i);
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) {
                         return dets[a].score > dets[b].score;
                     });

    // covered[g]: some surviving detection has its centroid inside gt[g].
    std::vector<bool> covered(gt.size(), false);
    for (std::size_t det_idx : order) {
        for (std::size_t g = 0; g < gt.size(); ++g) {
            if (centroid_inside(dets[det_idx].box, gt[g])) covered[g] = true;
        }
    }

    std::vector<bool> exhausted(gt.size(), false);
    for (std::size_t det_idx : order) {
        bool matched = false;
        for (std::size_t g = 0; g < gt.size(); ++g) {
            if (mode == MatchMode::Strict && exhausted[g]) continue;
            if (centroid_inside(dets[det_idx].box, gt[g])) {
                out.tp_pairs.emplace_back(det_idx, g);
                exhausted[g] = true;
                matched = true;
                break;
            }
        }
        if (!matched) out.fp.push_back(det_idx);
    }
    for (std::size_t g = 0; g < gt.size(); ++g) {
        const bool is_fn =
            mode == MatchMode::Strict ? !exhausted[g] : !covered[g];
        if (is_fn) out.fn.push_back(g);
    }
    return out;
}

double f_beta(double precision, double recall, double beta) {
    const double b2 = beta * beta;
    const double denom = b2 * precision + recall;
    if (denom <= 0.0) return 0.0;
    return (1.0 + b2) * precision * recall / denom;
}

Metrics metrics_from_counts(std::int64_t tp, std::int64_t fp,
                            std::int64_t fn) {
    Metrics m;
    m.tp = tp;
    m.fp = fp;
    m.fn = fn;
    m.precision = (tp + fp) > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
    m.recall = (tp + fn) > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
    m.f1 = f_beta(m.precision, m.recall, 1.0);
    m.f2 = f_beta(m.precision, m.recall, 2.0);
    return m;
}

Metrics metrics(std::span<const MatchOutcome> outcomes) {
    std::int64_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        if (outcomes[i].mode != outcomes[0].mode) {
            throw ModeMixError(
                "cannot aggregate outcomes from different counting modes");
        }
        tp += static_cast<std::int64_t>(outcomes[i].tp_pairs.size());
        fp += static_cast<std::int64_t>(outcomes[i].fp.size());
        fn += static_cast<std::int64_t>(outcomes[i].fn.size());
    }
    return metrics_from_counts(tp, fp, fn);
}

}  // namespace polyart
