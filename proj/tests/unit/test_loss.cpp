#include <doctest.h>

#include <cmath>
#include <random>

#include <polyart/loss.hpp>

#include "oracles.hpp"

using namespace polyart;

TEST_SUITE("loss") {

TEST_CASE("focal loss hand values") {
    // gamma 0 reduces to alpha-weighted cross-entropy
    const ValueGrad ce = focal_loss(0.5, true, {0.0, 0.5});
    CHECK(ce.value == doctest::Approx(0.346574).epsilon(1e-6));

    const ValueGrad pos = focal_loss(0.5, true, {2.0, 0.25});
    CHECK(pos.value == doctest::Approx(0.043322).epsilon(1e-5));

    const ValueGrad neg = focal_loss(0.5, false, {2.0, 0.25});
    CHECK(neg.value == doctest::Approx(0.129965).epsilon(1e-5));
}

TEST_CASE("focal loss domain handling") {
    CHECK_THROWS_AS(focal_loss(-0.1, true, {}), std::domain_error);
    CHECK_THROWS_AS(focal_loss(1.1, true, {}), std::domain_error);
    // exact 0/1 are clamped, not rejected
    CHECK(std::isfinite(focal_loss(0.0, true, {}).value));
    CHECK(std::isfinite(focal_loss(1.0, false, {}).value));
}

TEST_CASE("focal gamma=0 equals weighted cross-entropy everywhere") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> prob(0.001, 0.999);
    std::uniform_real_distribution<double> alpha_d(0.05, 0.95);
    for (int i = 0; i < 10000; ++i) {
        const double q = prob(rng);
        const double alpha = alpha_d(rng);
        const bool y = (i % 2) == 0;
        const ValueGrad fl = focal_loss(q, y, {0.0, alpha});
        const double a_star = y ? alpha : 1.0 - alpha;
        const double q_star = y ? q : 1.0 - q;
        CHECK(fl.value ==
              doctest::Approx(-a_star * std::log(q_star)).epsilon(1e-12));
    }
}

TEST_CASE("focal loss decreases in q* and vanishes at 1") {
    const FocalParams p{2.5, 0.25};
    double prev = focal_loss(0.05, true, p).value;
    for (double q = 0.1; q < 1.0; q += 0.05) {
        const double cur = focal_loss(q, true, p).value;
        CHECK(cur < prev);
        prev = cur;
    }
    CHECK(focal_loss(1.0, true, p).value ==
          doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("focal gradient matches finite differences") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> prob(0.01, 0.99);
    std::uniform_real_distribution<double> gamma_d(0.0, 4.0);
    std::uniform_real_distribution<double> alpha_d(0.1, 0.9);
    for (int i = 0; i < 1000; ++i) {
        const FocalParams p{gamma_d(rng), alpha_d(rng)};
        const bool y = (i % 2) == 0;
        const double q = prob(rng);
        const double analytic = focal_loss(q, y, p).grad;
        const double numeric = oracles::central_diff(
            [&](double x) { return focal_loss(x, y, p).value; }, q);
        const double scale =
            std::max({std::abs(analytic), std::abs(numeric), 1e-5});
        CHECK(std::abs(analytic - numeric) / scale < 1e-4);
    }
}

TEST_CASE("smooth l1 values and gradient") {
    CHECK(smooth_l1(0.0).value == 0.0);
    CHECK(smooth_l1(0.5).value == doctest::Approx(0.125));
    CHECK(smooth_l1(2.0).value == doctest::Approx(1.5));
    CHECK(smooth_l1(-2.0).value == doctest::Approx(1.5));
    CHECK(smooth_l1(-0.5).grad == doctest::Approx(-0.5));
    CHECK(smooth_l1(3.0).grad == 1.0);

    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> res(-4.0, 4.0);
    for (int i = 0; i < 1000; ++i) {
        const double r = res(rng);
        if (std::abs(std::abs(r) - 1.0) < 1e-5) continue;  // kink
        const double numeric = oracles::central_diff(
            [](double x) { return smooth_l1(x).value; }, r);
        const double scale =
            std::max({std::abs(smooth_l1(r).grad), std::abs(numeric), 1e-5});
        CHECK(std::abs(smooth_l1(r).grad - numeric) / scale < 1e-4);
    }
}

TEST_CASE("smooth l1 is continuous at the transition") {
    const double eps = 1e-9;
    CHECK(std::abs(smooth_l1(1.0 - eps).value - smooth_l1(1.0 + eps).value) <
          1e-8);
    CHECK(std::abs(smooth_l1(1.0 - eps).grad - smooth_l1(1.0 + eps).grad) <
          1e-8);
    CHECK(smooth_l1(1.0).value == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("encode/decode boxes are inverse") {
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> pos(0.0, 50.0);
    std::uniform_real_distribution<double> size(2.0, 30.0);
    for (int i = 0; i < 300; ++i) {
        const double ax = pos(rng), ay = pos(rng);
        const Box anchor(ax, ay, ax + size(rng), ay + size(rng));
        const double gx = pos(rng), gy = pos(rng);
        const Box gt(gx, gy, gx + size(rng), gy + size(rng));
        const auto off = encode_box(anchor, gt);
        const Box back = decode_box(anchor, off);
        CHECK(back.x_min == doctest::Approx(gt.x_min).epsilon(1e-9));
        CHECK(back.y_max == doctest::Approx(gt.y_max).epsilon(1e-9));
    }
}

TEST_CASE("anchor assignment roles") {
    const std::vector<Box> anchors = {
        Box(0, 0, 10, 10),    // identical to gt -> foreground
        Box(1, 1, 11, 11),    // high IoU -> foreground
        Box(4, 0, 14, 10),    // IoU 6/14 ~ 0.43 -> ignored
        Box(50, 50, 60, 60),  // disjoint -> background
    };
    const std::vector<LabeledBox> gts = {{Box(0, 0, 10, 10), 3}};
    const AnchorTargets t = assign_anchors(anchors, gts);
    REQUIRE(t.anchors.size() == 4);
    CHECK(t.anchors[0].role == AnchorRole::Foreground);
    CHECK(t.anchors[0].cls == 3);
    CHECK(t.anchors[0].gt_index == 0);
    CHECK(t.anchors[1].role == AnchorRole::Foreground);
    CHECK(t.anchors[2].role == AnchorRole::Ignored);
    CHECK(t.anchors[3].role == AnchorRole::Background);
    CHECK(t.foreground_count() == 2);

    // identical anchor regresses to zero offsets
    for (double v : t.anchors[0].reg_target) CHECK(v == 0.0);
}

TEST_CASE("no ground truths means all background") {
    const std::vector<Box> anchors = {Box(0, 0, 10, 10), Box(5, 5, 20, 20)};
    const AnchorTargets t = assign_anchors(anchors, {});
    for (const AnchorAssignment& a : t.anchors) {
        CHECK(a.role == AnchorRole::Background);
    }
}

TEST_CASE("assignment bands partition all anchors") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> pos(0.0, 80.0);
    std::uniform_real_distribution<double> size(4.0, 30.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<Box> anchors;
        for (int i = 0; i < 10; ++i) {
            const double x = pos(rng), y = pos(rng);
            anchors.emplace_back(x, y, x + size(rng), y + size(rng));
        }
        std::vector<LabeledBox> gts;
        for (int i = 0; i < 3; ++i) {
            const double x = pos(rng), y = pos(rng);
            gts.push_back({Box(x, y, x + size(rng), y + size(rng)), i});
        }
        const AnchorTargets t = assign_anchors(anchors, gts);
        for (std::size_t i = 0; i < anchors.size(); ++i) {
            double best = 0.0;
            for (const LabeledBox& g : gts) {
                best = std::max(best, iou(anchors[i], g.box));
            }
            switch (t.anchors[i].role) {
                case AnchorRole::Foreground: CHECK(best >= 0.5); break;
                case AnchorRole::Background: CHECK(best < 0.4); break;
                case AnchorRole::Ignored:
                    CHECK(best >= 0.4);
                    CHECK(best < 0.5);
                    break;
            }
        }
    }
}

TEST_CASE("composite loss is the weighted sum") {
    LossConfig cfg;
    cfg.w_reg = 1.0;
    cfg.w_art = 1.0;
    cfg.w_pol = 1.0;
    CHECK(composite_loss(2.0, 3.0, 4.0, 0.0, cfg) == 9.0);

    cfg.w_pol = 20.0;  // the 1:1:20 configuration
    CHECK(composite_loss(1.0, 1.0, 1.0, 0.0, cfg) == 22.0);

    cfg.w_pol = 1.0;
    CHECK(composite_loss(0.0, 0.0, 0.0, 0.0, cfg) == 0.0);

    cfg.reg_coeff = 0.5;
    CHECK(composite_loss(1.0, 1.0, 1.0, 2.0, cfg) == doctest::Approx(4.0));

    LossConfig zeros;
    zeros.w_reg = zeros.w_art = zeros.w_pol = 0.0;
    CHECK_THROWS_AS(composite_loss(1, 1, 1, 0, zeros), ConfigError);
}

TEST_CASE("composite loss is linear in each component") {
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> u(0.0, 5.0);
    for (int i = 0; i < 100; ++i) {
        LossConfig cfg;
        cfg.w_reg = u(rng);
        cfg.w_art = u(rng);
        cfg.w_pol = u(rng) + 0.1;
        const double p = u(rng), a = u(rng), r = u(rng);
        const double base = composite_loss(p, a, r, 0.0, cfg);
        const double scaled = composite_loss(2.0 * p, a, r, 0.0, cfg);
        CHECK(scaled - base == doctest::Approx(cfg.w_pol * p).epsilon(1e-9));
    }
}

TEST_CASE("weighted class loss") {
    const std::vector<ArtifactClass> six(kAnalysisClasses.begin(),
                                         kAnalysisClasses.end());
    const auto weights = class_weighting(0.75, six);

    std::map<TaskLabel, double> losses;
    losses[TaskLabel::polyp()] = 1.0;
    for (ArtifactClass cls : six) losses[TaskLabel::artifact(cls)] = 1.0;
    CHECK(weighted_class_loss(losses, weights) ==
          doctest::Approx(1.0).epsilon(1e-12));

    // uniform weights give the arithmetic mean
    const auto uniform = class_weighting(std::nullopt, six);
    CHECK(weighted_class_loss(losses, uniform) ==
          doctest::Approx(1.0).epsilon(1e-12));

    // zero weight nullifies the class
    std::map<TaskLabel, double> w2 = weights;
    w2[TaskLabel::artifact(ArtifactClass::Blur)] = 0.0;
    std::map<TaskLabel, double> l2 = losses;
    l2[TaskLabel::artifact(ArtifactClass::Blur)] = 1e9;
    const double without_blur = weighted_class_loss(l2, w2);
    CHECK(without_blur < 2.0);

    std::map<TaskLabel, double> orphan;
    orphan[TaskLabel::artifact(ArtifactClass::Instrument)] = 1.0;
    CHECK_THROWS_AS(weighted_class_loss(orphan, weights),
                    MissingWeightError);
}

}  // TEST_SUITE
