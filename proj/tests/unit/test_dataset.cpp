#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <polyart/dataset.hpp>
#include <polyart/dataset_io.hpp>

using namespace polyart;

namespace {

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / name;
}

Dataset small_dataset() {
    Dataset d;
    d.name = "fixture";
    FrameRecord f;
    f.frame_id = "f001";
    f.image = ImageSize(640, 480);
    f.gt_polyps.emplace_back(100, 100, 200, 200);
    f.pred_polyps.emplace_back(Box(110, 105, 190, 195), 0.92);
    f.artifacts.emplace_back(Box(10, 10, 40, 40), 0.7,
                             ArtifactClass::Bubbles);
    f.artifacts.emplace_back(Box(300, 10, 340, 60), 0.4,
                             ArtifactClass::Specularity);
    d.frames.push_back(std::move(f));
    FrameRecord g;
    g.frame_id = "f002";
    g.image = ImageSize(640, 480);
    d.frames.push_back(std::move(g));
    return d;
}

}  // namespace

TEST_SUITE("dataset") {

TEST_CASE("artifact class codes and names are stable") {
    CHECK(static_cast<int>(ArtifactClass::Blur) == 0);
    CHECK(static_cast<int>(ArtifactClass::Bubbles) == 1);
    CHECK(static_cast<int>(ArtifactClass::Contrast) == 2);
    CHECK(static_cast<int>(ArtifactClass::Specularity) == 3);
    CHECK(static_cast<int>(ArtifactClass::Saturation) == 4);
    CHECK(static_cast<int>(ArtifactClass::Misc) == 5);
    CHECK(static_cast<int>(ArtifactClass::Instrument) == 6);
    for (int code = 0; code < kArtifactClassCount; ++code) {
        const ArtifactClass cls = artifact_class_from_code(code);
        CHECK(artifact_class_from_string(std::string(to_string(cls))) == cls);
    }
    CHECK_THROWS_AS(artifact_class_from_code(7), ParseError);
    CHECK_THROWS_AS(artifact_class_from_string("sparkle"), ParseError);
}

TEST_CASE("detection score range is enforced") {
    CHECK_THROWS_AS(Detection(Box(0, 0, 1, 1), 1.2), InvariantError);
    CHECK_THROWS_AS(Detection(Box(0, 0, 1, 1), -0.1), InvariantError);
    CHECK_NOTHROW(Detection(Box(0, 0, 1, 1), 0.0));
    CHECK_NOTHROW(Detection(Box(0, 0, 1, 1), 1.0));
}

TEST_CASE("validate flags duplicate frame ids") {
    Dataset d = small_dataset();
    d.frames.push_back(d.frames.front());
    CHECK_THROWS_AS(validate(d), InvariantError);
}

TEST_CASE("json round trip is the identity and byte-stable") {
    const Dataset d = small_dataset();
    const auto path = temp_file("polyart_roundtrip.json");
    save_dataset(d, path);
    const Dataset loaded = load_dataset(path, DatasetFormat::CanonicalJson);
    CHECK(loaded == d);

    const std::string first = dataset_to_json_string(d);
    const std::string second = dataset_to_json_string(loaded);
    CHECK(first == second);
    CHECK(first.back() == '\n');

    std::filesystem::remove(path);
}

TEST_CASE("empty frame list stays empty") {
    Dataset d;
    d.name = "empty";
    const auto path = temp_file("polyart_empty.json");
    save_dataset(d, path);
    const Dataset loaded = load_dataset_json(path);
    CHECK(loaded.frames.empty());
    std::filesystem::remove(path);
}

TEST_CASE("instrument artifacts survive ingestion with code 6") {
    Dataset d = small_dataset();
    d.frames[0].artifacts.emplace_back(Box(1, 1, 5, 5), 0.9,
                                       ArtifactClass::Instrument);
    const auto path = temp_file("polyart_instrument.json");
    save_dataset(d, path);
    const Dataset loaded = load_dataset_json(path);
    CHECK(loaded == d);
    CHECK(loaded.frames[0].artifacts.back().artifact_class ==
          ArtifactClass::Instrument);
    std::filesystem::remove(path);
}

TEST_CASE("malformed json carries a locus") {
    const auto path = temp_file("polyart_bad.json");
    {
        std::ofstream out(path);
        out << R"({"schema":1,"name":"x","frames":[{"frame_id":"f1",
            "width":10,"height":10,"gt_polyps":[[5,5,1,9]],
            "pred_polyps":[],"artifacts":[]}]})";
    }
    CHECK_THROWS_WITH_AS(load_dataset_json(path),
                         doctest::Contains("frame 0"), InvariantError);
    std::filesystem::remove(path);
}

TEST_CASE("csv import groups rows into frames") {
    const auto path = temp_file("polyart_import.csv");
    {
        std::ofstream out(path);
        out << "frame_id,label,score,x_min,y_min,x_max,y_max\n";
        out << "f1,polyp_gt,1.0,100,100,200,200\n";
        out << "f1,polyp,0.8,110,110,190,190\n";
        out << "f1,blur,0.6,0,0,50,50\n";
        out << "f2,specularity,0.9,10,10,20,20\n";
    }
    const Dataset d = load_dataset(path, DatasetFormat::Csv);
    REQUIRE(d.frames.size() == 2);
    CHECK(d.frames[0].frame_id == "f1");
    CHECK(d.frames[0].gt_polyps.size() == 1);
    CHECK(d.frames[0].pred_polyps.size() == 1);
    CHECK(d.frames[0].artifacts.size() == 1);
    CHECK(d.frames[0].artifacts[0].artifact_class == ArtifactClass::Blur);
    CHECK(d.frames[1].frame_id == "f2");
    CHECK(d.frames[0].image == kDefaultCsvFrameSize);
    std::filesystem::remove(path);
}

TEST_CASE("csv row with inverted box names the row") {
    const auto path = temp_file("polyart_badrow.csv");
    {
        std::ofstream out(path);
        out << "frame_id,label,score,x_min,y_min,x_max,y_max\n";
        out << "f1,polyp_gt,1.0,100,100,200,200\n";
        out << "f1,polyp_gt,1.0,300,100,200,200\n";
    }
    CHECK_THROWS_WITH_AS(load_dataset_csv(path), doctest::Contains(":3"),
                         InvariantError);
    std::filesystem::remove(path);
}

TEST_CASE("merge_pseudo_labels filters by score and keeps polyps") {
    Dataset polyp_ds = small_dataset();
    Dataset artifact_ds;
    artifact_ds.name = "annotator";
    FrameRecord f;
    f.frame_id = "f001";
    f.image = ImageSize(640, 480);
    f.artifacts.emplace_back(Box(0, 0, 5, 5), 0.3, ArtifactClass::Blur);
    f.artifacts.emplace_back(Box(0, 0, 5, 5), 0.6, ArtifactClass::Blur);
    f.artifacts.emplace_back(Box(0, 0, 5, 5), 0.9, ArtifactClass::Misc);
    artifact_ds.frames.push_back(std::move(f));

    SUBCASE("threshold zero keeps everything") {
        const Dataset fused =
            merge_pseudo_labels(polyp_ds, artifact_ds, 0.0);
        CHECK(fused.frames[0].artifacts.size() == 3);
        CHECK(fused.frames[0].gt_polyps == polyp_ds.frames[0].gt_polyps);
        CHECK(fused.frames[0].pred_polyps == polyp_ds.frames[0].pred_polyps);
    }
    SUBCASE("threshold 0.5 keeps two of three") {
        const Dataset fused =
            merge_pseudo_labels(polyp_ds, artifact_ds, 0.5);
        CHECK(fused.frames[0].artifacts.size() == 2);
        // scores are preserved, not reset
        CHECK(fused.frames[0].artifacts[0].score == 0.6);
    }
    SUBCASE("frames without annotator output merge with zero artifacts") {
        const Dataset fused =
            merge_pseudo_labels(polyp_ds, artifact_ds, 0.0);
        CHECK(fused.frames[1].artifacts.empty());
    }
    SUBCASE("unknown frame id in the artifact dataset is an error") {
        artifact_ds.frames[0].frame_id = "f999";
        CHECK_THROWS_AS(merge_pseudo_labels(polyp_ds, artifact_ds, 0.0),
                        FrameAlignmentError);
    }
    SUBCASE("artifact subsets shrink as the threshold grows") {
        const Dataset lo = merge_pseudo_labels(polyp_ds, artifact_ds, 0.2);
        const Dataset hi = merge_pseudo_labels(polyp_ds, artifact_ds, 0.7);
        for (std::size_t i = 0; i < lo.frames.size(); ++i) {
            for (const Detection& det : hi.frames[i].artifacts) {
                const auto& pool = lo.frames[i].artifacts;
                CHECK(std::find(pool.begin(), pool.end(), det) != pool.end());
            }
        }
        CHECK(artifacts_per_image(hi) <= artifacts_per_image(lo));
    }
}

TEST_CASE("apply_label_spec filters classes and tags the mode") {
    Dataset d = small_dataset();  // bubbles + specularity in f001

    MultiTaskLabelSpec spec;
    spec.mode = LabelMode::TwoHead;
    spec.included_artifacts = {ArtifactClass::Blur, ArtifactClass::Bubbles,
                               ArtifactClass::Contrast,
                               ArtifactClass::Specularity,
                               ArtifactClass::Saturation, ArtifactClass::Misc};

    SUBCASE("all six classes leave the data unchanged except the tag") {
        const Dataset out = apply_label_spec(d, spec);
        CHECK(out.label_mode == LabelMode::TwoHead);
        CHECK(out.frames == d.frames);
    }
    SUBCASE("single-class spec drops the rest") {
        spec.included_artifacts = {ArtifactClass::Bubbles};
        const Dataset out = apply_label_spec(d, spec);
        CHECK(out.frames[0].artifacts.size() == 1);
        CHECK(out.frames[0].artifacts[0].artifact_class ==
              ArtifactClass::Bubbles);
        CHECK(out.frames[0].gt_polyps == d.frames[0].gt_polyps);
        CHECK(out.frames[0].pred_polyps == d.frames[0].pred_polyps);
    }
    SUBCASE("the four-class configuration") {
        spec.included_artifacts = {ArtifactClass::Blur,
                                   ArtifactClass::Specularity,
                                   ArtifactClass::Misc,
                                   ArtifactClass::Bubbles};
        const Dataset out = apply_label_spec(d, spec);
        CHECK(out.frames[0].artifacts.size() == 2);  // bubbles + specularity
    }
    SUBCASE("empty class set is a config error") {
        spec.included_artifacts = {};
        CHECK_THROWS_AS(apply_label_spec(d, spec), ConfigError);
    }
    SUBCASE("instrument is not a label-spec class") {
        spec.included_artifacts = {ArtifactClass::Instrument};
        CHECK_THROWS_AS(apply_label_spec(d, spec), ConfigError);
    }
    SUBCASE("mode tag round-trips through the canonical format") {
        const Dataset out = apply_label_spec(d, spec);
        const Dataset back = dataset_from_json_string(
            dataset_to_json_string(out), "mem");
        CHECK(back == out);
    }
}

TEST_CASE("class_weighting distributes the remaining share") {
    const std::vector<ArtifactClass> six(kAnalysisClasses.begin(),
                                         kAnalysisClasses.end());

    SUBCASE("share 0.75 over six classes") {
        const auto w = class_weighting(0.75, six);
        CHECK(w.at(TaskLabel::polyp()) == doctest::Approx(0.75));
        for (ArtifactClass cls : six) {
            CHECK(w.at(TaskLabel::artifact(cls)) ==
                  doctest::Approx(0.0416667).epsilon(1e-4));
        }
    }
    SUBCASE("share 0.25 gives each artifact 0.125") {
        const auto w = class_weighting(0.25, six);
        for (ArtifactClass cls : six) {
            CHECK(w.at(TaskLabel::artifact(cls)) == doctest::Approx(0.125));
        }
    }
    SUBCASE("no share means uniform weights") {
        const auto w = class_weighting(std::nullopt, six);
        for (const auto& [label, weight] : w) {
            CHECK(weight == doctest::Approx(1.0 / 7.0));
        }
    }
    SUBCASE("weights always sum to 1") {
        for (double share : {0.1, 0.25, 0.5, 0.75, 0.9}) {
            const auto w = class_weighting(share, six);
            double sum = 0.0;
            for (const auto& [label, weight] : w) sum += weight;
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
    SUBCASE("share outside (0,1) is rejected") {
        CHECK_THROWS_AS(class_weighting(0.0, six), ConfigError);
        CHECK_THROWS_AS(class_weighting(1.0, six), ConfigError);
        CHECK_THROWS_AS(class_weighting(-0.5, six), ConfigError);
    }
}

}  // TEST_SUITE
