#include <doctest.h>

#include <random>
#include <vector>

#include <polyart/evaluation.hpp>

#include "oracles.hpp"

using namespace polyart;

namespace {

Detection det_at(double cx, double cy, double score) {
    return Detection(Box(cx - 5, cy - 5, cx + 5, cy + 5), score);
}

}  // namespace

TEST_SUITE("evaluation") {

TEST_CASE("no detections means all ground truths are missed") {
    const std::vector<Box> gt = {Box(0, 0, 10, 10), Box(20, 20, 30, 30)};
    const MatchOutcome out = match_frame(gt, {}, 0.5, MatchMode::Strict);
    CHECK(out.tp_pairs.empty());
    CHECK(out.fp.empty());
    CHECK(out.fn.size() == 2);
}

TEST_CASE("score threshold discards detections") {
    const std::vector<Box> gt = {Box(0, 0, 10, 10)};
    const std::vector<Detection> dets = {det_at(5, 5, 0.4)};
    const MatchOutcome out = match_frame(gt, dets, 0.5, MatchMode::Strict);
    CHECK(out.tp_pairs.empty());
    CHECK(out.fp.empty());  // discarded, not a false positive
    CHECK(out.fn.size() == 1);
    // exactly at the threshold the detection survives
    const MatchOutcome kept =
        match_frame(gt, {det_at(5, 5, 0.5)}, 0.5, MatchMode::Strict);
    CHECK(kept.tp_pairs.size() == 1);
}

TEST_CASE("duplicate detections: strict vs analysis") {
    const std::vector<Box> gt = {Box(0, 0, 20, 20)};
    const std::vector<Detection> dets = {det_at(10, 10, 0.9),
                                         det_at(9, 9, 0.8)};
    const MatchOutcome strict =
        match_frame(gt, dets, 0.5, MatchMode::Strict);
    CHECK(strict.tp_pairs.size() == 1);
    CHECK(strict.fp.size() == 1);
    CHECK(strict.fn.empty());

    const MatchOutcome analysis =
        match_frame(gt, dets, 0.5, MatchMode::Analysis);
    CHECK(analysis.tp_pairs.size() == 2);
    CHECK(analysis.fp.empty());
    CHECK(analysis.fn.empty());
}

TEST_CASE("analysis mode: a gt is missed only when no centroid hits it") {
    // one detection whose centroid lies inside both overlapping gts
    const std::vector<Box> gt = {Box(0, 0, 20, 20), Box(5, 5, 25, 25)};
    const std::vector<Detection> dets = {det_at(10, 10, 0.9)};
    const MatchOutcome analysis =
        match_frame(gt, dets, 0.5, MatchMode::Analysis);
    CHECK(analysis.tp_pairs.size() == 1);
    CHECK(analysis.fn.empty());  // both gts contain the centroid

    const MatchOutcome strict = match_frame(gt, dets, 0.5, MatchMode::Strict);
    CHECK(strict.tp_pairs.size() == 1);
    CHECK(strict.fn.size() == 1);  // second gt stays unmatched
}

TEST_CASE("matching processes detections by descending score") {
    // low-score detection sits in gt0 and gt1; high-score only in gt0.
    // High score goes first and takes gt0, low score falls through to gt1.
    const std::vector<Box> gt = {Box(0, 0, 20, 20), Box(15, 0, 40, 20)};
    const std::vector<Detection> dets = {
        det_at(17, 10, 0.6),  // inside both (input first)
        det_at(5, 10, 0.9),   // inside gt0 only
    };
    const MatchOutcome out = match_frame(gt, dets, 0.5, MatchMode::Strict);
    REQUIRE(out.tp_pairs.size() == 2);
    CHECK(out.tp_pairs[0] == std::pair<std::size_t, std::size_t>{1, 0});
    CHECK(out.tp_pairs[1] == std::pair<std::size_t, std::size_t>{0, 1});
}

TEST_CASE("score ties keep input order") {
    const std::vector<Box> gt = {Box(0, 0, 20, 20)};
    const std::vector<Detection> dets = {det_at(10, 10, 0.7),
                                         det_at(11, 11, 0.7)};
    const MatchOutcome out = match_frame(gt, dets, 0.5, MatchMode::Strict);
    REQUIRE(out.tp_pairs.size() == 1);
    CHECK(out.tp_pairs[0].first == 0);
    CHECK(out.fp == std::vector<std::size_t>{1});
}

TEST_CASE("f_beta formula and zero denominators") {
    CHECK(f_beta(1.0, 1.0, 1.0) == 1.0);
    CHECK(f_beta(1.0, 1.0, 2.0) == 1.0);
    CHECK(f_beta(0.0, 0.0, 1.0) == 0.0);
    CHECK(f_beta(0.75, 0.6, 1.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
    CHECK(f_beta(0.75, 0.6, 2.0) == doctest::Approx(0.625).epsilon(1e-9));
}

TEST_CASE("metrics from hand-counted outcomes") {
    const Metrics m = metrics_from_counts(3, 1, 2);
    CHECK(m.precision == doctest::Approx(0.75));
    CHECK(m.recall == doctest::Approx(0.6));
    CHECK(m.f1 == doctest::Approx(0.666667).epsilon(1e-5));
    CHECK(m.f2 == doctest::Approx(0.625).epsilon(1e-9));

    const Metrics zero = metrics_from_counts(0, 0, 0);
    CHECK(zero.precision == 0.0);
    CHECK(zero.recall == 0.0);
    CHECK(zero.f1 == 0.0);
    CHECK(zero.f2 == 0.0);
}

TEST_CASE("aggregation rejects mixed modes and ignores frame order") {
    MatchOutcome a = match_frame({Box(0, 0, 20, 20)}, {det_at(10, 10, 0.9)},
                                 0.5, MatchMode::Strict);
    MatchOutcome b = match_frame({Box(0, 0, 20, 20)}, {}, 0.5,
                                 MatchMode::Strict);
    const std::vector<MatchOutcome> fwd = {a, b};
    const std::vector<MatchOutcome> rev = {b, a};
    const Metrics m_fwd = metrics(fwd);
    const Metrics m_rev = metrics(rev);
    CHECK(m_fwd.tp == m_rev.tp);
    CHECK(m_fwd.f1 == m_rev.f1);

    MatchOutcome c = match_frame({Box(0, 0, 20, 20)}, {}, 0.5,
                                 MatchMode::Analysis);
    const std::vector<MatchOutcome> mixed = {a, c};
    CHECK_THROWS_AS(metrics(mixed), ModeMixError);
}

TEST_CASE("f1 lies between precision and recall") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> count(1, 50);
    for (int i = 0; i < 300; ++i) {
        const Metrics m =
            metrics_from_counts(count(rng), count(rng), count(rng));
        const double lo = std::min(m.precision, m.recall);
        const double hi = std::max(m.precision, m.recall);
        CHECK(m.f1 >= lo - 1e-12);
        CHECK(m.f1 <= hi + 1e-12);
    }
}

TEST_CASE("strict matching matches the greedy oracle on random frames") {
    std::mt19937_64 rng(31337);
    std::uniform_int_distribution<int> n_gt(0, 6);
    std::uniform_int_distribution<int> n_det(0, 6);
    std::uniform_real_distribution<double> pos(0.0, 90.0);
    std::uniform_real_distribution<double> size(4.0, 30.0);

    // distinct scores so the score order is unique
    std::vector<double> score_pool;
    for (int i = 0; i < 64; ++i) score_pool.push_back(0.30 + 0.01 * i);

    for (int trial = 0; trial < 500; ++trial) {
        std::vector<Box> gts;
        for (int g = n_gt(rng); g > 0; --g) {
            const double x = pos(rng), y = pos(rng);
            gts.emplace_back(x, y, x + size(rng), y + size(rng));
        }
        std::shuffle(score_pool.begin(), score_pool.end(), rng);
        std::vector<Detection> dets;
        int k = 0;
        for (int d = n_det(rng); d > 0; --d, ++k) {
            const double x = pos(rng), y = pos(rng);
            dets.emplace_back(Box(x, y, x + size(rng), y + size(rng)),
                              score_pool[static_cast<std::size_t>(k)]);
        }

        const MatchOutcome out =
            match_frame(gts, dets, 0.5, MatchMode::Strict);
        const oracles::OracleCounts expect =
            oracles::strict_match_oracle(gts, dets, 0.5);
        CHECK(out.tp_pairs.size() == static_cast<std::size_t>(expect.tp));
        CHECK(out.fp.size() == static_cast<std::size_t>(expect.fp));
        CHECK(out.fn.size() == static_cast<std::size_t>(expect.fn));
        // per-frame strict identities
        CHECK(out.tp_pairs.size() + out.fn.size() == gts.size());
    }
}

}  // TEST_SUITE
