#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <polyart/analysis.hpp>
#include <polyart/dataset.hpp>
#include <polyart/dataset_io.hpp>
#include <polyart/evaluation.hpp>
#include <polyart/reports.hpp>
#include <polyart/scene.hpp>
#include <polyart/toy_detector.hpp>
#include <polyart/version.hpp>

#include "kvconfig.hpp"
#include "manifest.hpp"

namespace {

using namespace polyart;
using polyart::cli::KvConfig;
using polyart::cli::RunManifest;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitEmpty = 3;
constexpr int kExitAlignment = 4;
constexpr int kExitDivergence = 5;

struct EmptyInputError : Error {
    using Error::Error;
};

struct GradCheckFailure : Error {
    using Error::Error;
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

std::string fmt_full(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.15e", v);
    return buf;
}

ImageSize parse_image_size(const std::string& text) {
    const auto x = text.find('x');
    if (x == std::string::npos) {
        throw ConfigError("image size must look like 1920x1080, got '" +
                          text + "'");
    }
    return ImageSize(std::stoi(text.substr(0, x)),
                     std::stoi(text.substr(x + 1)));
}

Dataset load_any(const std::string& path, const std::string& csv_size) {
    if (path.ends_with(".csv")) {
        return load_dataset_csv(path, parse_image_size(csv_size));
    }
    return load_dataset_json(path);
}

void require_frames(const Dataset& d, const std::string& path) {
    if (d.frames.empty()) {
        throw EmptyInputError("no frames in '" + path + "'");
    }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open '" + path.string() + "' for writing");
    }
    out << text;
    if (!out) throw IoError("write failure on '" + path.string() + "'");
}

MatchMode parse_match_mode(const std::string& name) {
    if (name == "strict") return MatchMode::Strict;
    if (name == "analysis") return MatchMode::Analysis;
    throw ConfigError("unknown match mode '" + name + "'");
}

PresenceRule presence_rule_with_overrides(
    const std::vector<std::string>& overrides) {
    PresenceRule rule = PresenceRule::defaults();
    for (const std::string& entry : overrides) {
        const auto eq = entry.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("area threshold override must look like "
                              "blur=0.5, got '" + entry + "'");
        }
        const ArtifactClass cls =
            artifact_class_from_string(entry.substr(0, eq));
        const double value = std::stod(entry.substr(eq + 1));
        if (!(value >= 0.0 && value <= 1.0)) {
            throw ConfigError("area threshold outside [0,1]: " + entry);
        }
        rule.area_threshold[cls] = value;
    }
    return rule;
}

// ---------------------------------------------------------------- eval

struct EvalOptions {
    std::string dataset;
    double det_threshold = 0.5;
    std::string mode = "strict";
    std::string format = "csv";
    std::string out;
    std::string csv_size = "1920x1080";
};

int cmd_eval(const EvalOptions& opt) {
    const Dataset d = load_any(opt.dataset, opt.csv_size);
    require_frames(d, opt.dataset);
    const MatchMode mode = parse_match_mode(opt.mode);

    std::vector<MatchOutcome> outcomes;
    outcomes.reserve(d.frames.size());
    for (const FrameRecord& f : d.frames) {
        outcomes.push_back(
            match_frame(f.gt_polyps, f.pred_polyps, opt.det_threshold, mode));
    }
    const Metrics m = metrics(outcomes);
    const std::string report =
        opt.format == "md" ? to_markdown(m) : to_csv(m);
    std::cout << report;

    if (!opt.out.empty()) {
        write_text(opt.out, report);
        RunManifest manifest;
        manifest.command = "eval";
        manifest.config = {{"det_threshold", fmt(opt.det_threshold)},
                           {"mode", opt.mode},
                           {"format", opt.format}};
        add_input(manifest, opt.dataset);
        manifest.outputs = {opt.out};
        write_manifest(manifest, opt.out);
    }
    return kExitOk;
}

// ------------------------------------------------------------- analyze

struct AnalyzeOptions {
    std::string dataset;
    std::string kind;
    double artifact_threshold = 0.25;
    double det_threshold = 0.5;
    double iou_threshold = 0.5;
    std::string match_mode = "analysis";
    std::vector<std::string> area_overrides;
    std::string format = "csv";
    std::string out;
    std::string csv_size = "1920x1080";
};

int cmd_analyze(const AnalyzeOptions& opt) {
    const Dataset d = load_any(opt.dataset, opt.csv_size);
    require_frames(d, opt.dataset);
    const PresenceRule rule = presence_rule_with_overrides(opt.area_overrides);

    std::string report;
    if (opt.kind == "presence") {
        const PresenceReport r = presence_analysis(
            d, rule, opt.det_threshold, opt.artifact_threshold);
        report = opt.format == "md" ? to_markdown(r) : to_csv(r);
    } else if (opt.kind == "overlap" || opt.kind == "contain") {
        RelationOptions rel;
        rel.iou_threshold = opt.iou_threshold;
        rel.artifact_score_threshold = opt.artifact_threshold;
        rel.det_threshold = opt.det_threshold;
        rel.match_mode = parse_match_mode(opt.match_mode);
        const RelationReport r = relation_analysis(
            d, opt.kind == "overlap" ? Relation::Overlap : Relation::Contains,
            rel);
        report = opt.format == "md" ? to_markdown(r) : to_csv(r);
    } else if (opt.kind == "corr") {
        const CorrelationMatrix r =
            correlation_matrix(d, rule, opt.artifact_threshold);
        report = opt.format == "md" ? to_markdown(r) : to_csv(r);
    } else {
        throw ConfigError("unknown analysis kind '" + opt.kind + "'");
    }
    std::cout << report;

    if (!opt.out.empty()) {
        write_text(opt.out, report);
        RunManifest manifest;
        manifest.command = "analyze";
        manifest.config = {{"kind", opt.kind},
                           {"artifact_threshold", fmt(opt.artifact_threshold)},
                           {"det_threshold", fmt(opt.det_threshold)},
                           {"iou_threshold", fmt(opt.iou_threshold)},
                           {"match_mode", opt.match_mode},
                           {"format", opt.format}};
        for (const auto& [cls, value] : rule.area_threshold) {
            manifest.config["area_threshold." +
                            std::string(to_string(cls))] = fmt(value);
        }
        add_input(manifest, opt.dataset);
        manifest.outputs = {opt.out};
        write_manifest(manifest, opt.out);
    }
    return kExitOk;
}

// -------------------------------------------------------- merge-labels

struct MergeOptions {
    std::string polyp_path;
    std::string artifact_path;
    std::string out;
    double threshold = 0.5;
    std::string csv_size = "1920x1080";
};

int cmd_merge_labels(const MergeOptions& opt) {
    const Dataset polyp_ds = load_any(opt.polyp_path, opt.csv_size);
    require_frames(polyp_ds, opt.polyp_path);
    const Dataset artifact_ds = load_any(opt.artifact_path, opt.csv_size);

    const Dataset fused =
        merge_pseudo_labels(polyp_ds, artifact_ds, opt.threshold);
    save_dataset(fused, opt.out);
    std::cout << "frames=" << fused.frames.size()
              << " artifacts_per_image=" << fmt(artifacts_per_image(fused))
              << "\n";

    RunManifest manifest;
    manifest.command = "merge-labels";
    manifest.config = {{"threshold", fmt(opt.threshold)}};
    add_input(manifest, opt.polyp_path);
    add_input(manifest, opt.artifact_path);
    manifest.outputs = {opt.out};
    write_manifest(manifest, opt.out);
    return kExitOk;
}

// ---------------------------------------------------------- gen-scenes

struct SceneFlags {
    std::uint64_t seed = 1;
    int count = 16;
    int grid = 64;
    int polyps = 1;
    int bubbles = 1;
    int specularity = 1;
    int blur = 0;
    int saturation = 0;
    int contrast = 0;
    int misc = 0;
    double inside_rate = 0.0;
    double overlap_rate = 0.0;
    double noise = 0.05;
    double size_scale = 1.0;
};

SceneConfig scene_config_from_flags(const SceneFlags& f) {
    SceneConfig cfg;
    cfg.width = cfg.height = f.grid;
    cfg.polyp_count = f.polyps;
    cfg.artifact_counts = {{ArtifactClass::Bubbles, f.bubbles},
                           {ArtifactClass::Specularity, f.specularity},
                           {ArtifactClass::Blur, f.blur},
                           {ArtifactClass::Saturation, f.saturation},
                           {ArtifactClass::Contrast, f.contrast},
                           {ArtifactClass::Misc, f.misc}};
    cfg.inside_polyp_rate = f.inside_rate;
    cfg.overlap_polyp_rate = f.overlap_rate;
    cfg.noise_level = f.noise;
    cfg.size_scale = f.size_scale;
    return cfg;
}

void add_scene_flags(CLI::App* cmd, SceneFlags& f) {
    cmd->add_option("--seed", f.seed, "scene RNG seed");
    cmd->add_option("--count", f.count, "number of scenes");
    cmd->add_option("--grid", f.grid, "grid side length");
    cmd->add_option("--polyps", f.polyps, "polyps per scene");
    cmd->add_option("--bubbles", f.bubbles, "bubble rings per scene");
    cmd->add_option("--specularity", f.specularity,
                    "specular squares per scene");
    cmd->add_option("--blur", f.blur, "blur patches per scene");
    cmd->add_option("--saturation", f.saturation,
                    "saturated patches per scene");
    cmd->add_option("--contrast", f.contrast, "contrast patches per scene");
    cmd->add_option("--misc", f.misc, "misc rectangles per scene");
    cmd->add_option("--inside-rate", f.inside_rate,
                    "probability an artifact is placed inside a polyp");
    cmd->add_option("--overlap-rate", f.overlap_rate,
                    "probability an artifact straddles a polyp edge");
    cmd->add_option("--noise", f.noise, "background noise level");
    cmd->add_option("--size-scale", f.size_scale, "primitive size scale");
}

std::map<std::string, std::string> scene_flags_config(const SceneFlags& f) {
    return {{"seed", std::to_string(f.seed)},
            {"count", std::to_string(f.count)},
            {"grid", std::to_string(f.grid)},
            {"polyps", std::to_string(f.polyps)},
            {"bubbles", std::to_string(f.bubbles)},
            {"specularity", std::to_string(f.specularity)},
            {"blur", std::to_string(f.blur)},
            {"saturation", std::to_string(f.saturation)},
            {"contrast", std::to_string(f.contrast)},
            {"misc", std::to_string(f.misc)},
            {"inside_rate", fmt(f.inside_rate)},
            {"overlap_rate", fmt(f.overlap_rate)},
            {"noise", fmt(f.noise)},
            {"size_scale", fmt(f.size_scale)}};
}

struct GenScenesOptions {
    SceneFlags scene;
    std::string out;
    std::string name = "scenes";
    bool polyp_only = false;
};

int cmd_gen_scenes(const GenScenesOptions& opt) {
    const SceneConfig cfg = scene_config_from_flags(opt.scene);
    const std::vector<SyntheticScene> scenes =
        generate_scenes(opt.scene.seed, opt.scene.count, cfg);
    const Dataset d = scenes_to_dataset(scenes, opt.name, !opt.polyp_only);
    save_dataset(d, opt.out);
    std::cout << "frames=" << d.frames.size()
              << " artifacts_per_image=" << fmt(artifacts_per_image(d))
              << "\n";

    RunManifest manifest;
    manifest.command = "gen-scenes";
    manifest.config = scene_flags_config(opt.scene);
    manifest.config["polyp_only"] = opt.polyp_only ? "true" : "false";
    manifest.config["name"] = opt.name;
    manifest.seed = opt.scene.seed;
    manifest.outputs = {opt.out};
    write_manifest(manifest, opt.out);
    return kExitOk;
}

// ----------------------------------------------------------- train-toy

const std::set<std::string> kSceneKeys = {
    "scenes",       "scene_seed", "grid",
    "polyps",       "bubbles",    "specularity",
    "blur",         "saturation", "contrast",
    "misc",         "inside_polyp_rate", "overlap_polyp_rate",
    "noise_level",  "size_scale"};

const std::set<std::string> kLossKeys = {
    "gamma", "alpha", "w_reg", "w_art", "w_pol", "lambda",
    "polyp_weight_share"};

std::set<std::string> with(std::set<std::string> base,
                           std::initializer_list<const char*> extra) {
    for (const char* k : extra) base.insert(k);
    return base;
}

SceneConfig scene_config_from_kv(const KvConfig& kv) {
    SceneConfig cfg;
    cfg.width = cfg.height = kv.get_int("grid", 64);
    cfg.polyp_count = kv.get_int("polyps", 1);
    cfg.artifact_counts = {
        {ArtifactClass::Bubbles, kv.get_int("bubbles", 1)},
        {ArtifactClass::Specularity, kv.get_int("specularity", 1)},
        {ArtifactClass::Blur, kv.get_int("blur", 0)},
        {ArtifactClass::Saturation, kv.get_int("saturation", 0)},
        {ArtifactClass::Contrast, kv.get_int("contrast", 0)},
        {ArtifactClass::Misc, kv.get_int("misc", 0)}};
    cfg.inside_polyp_rate = kv.get_double("inside_polyp_rate", 0.0);
    cfg.overlap_polyp_rate = kv.get_double("overlap_polyp_rate", 0.0);
    cfg.noise_level = kv.get_double("noise_level", 0.05);
    cfg.size_scale = kv.get_double("size_scale", 1.0);
    return cfg;
}

LossConfig loss_config_from_kv(const KvConfig& kv) {
    LossConfig cfg;
    cfg.focal.gamma = kv.get_double("gamma", 2.5);
    cfg.focal.alpha = kv.get_double("alpha", 0.25);
    cfg.w_reg = kv.get_double("w_reg", 1.0);
    cfg.w_art = kv.get_double("w_art", 1.0);
    cfg.w_pol = kv.get_double("w_pol", 1.0);
    cfg.reg_coeff = kv.get_double("lambda", 0.0);
    if (const auto share = kv.get_optional_double("polyp_weight_share")) {
        cfg.class_weights = class_weighting(
            *share, std::vector<ArtifactClass>(kAnalysisClasses.begin(),
                                               kAnalysisClasses.end()));
    }
    return cfg;
}

HeadMode head_mode_from_kv(const KvConfig& kv) {
    const std::string mode = kv.get_string("mode", "two_head");
    if (mode == "two_head") return HeadMode::TwoHead;
    if (mode == "flat_multiclass") return HeadMode::FlatMultiClass;
    throw ConfigError("unknown mode '" + mode + "'");
}

struct TrainToyOptions {
    std::string config_path;
    std::string out_dir = "train_out";
};

int cmd_train_toy(const TrainToyOptions& opt) {
    const auto keys = with(kSceneKeys, {"mode", "steps", "learning_rate",
                                        "batch_size", "seed"});
    std::set<std::string> all = keys;
    all.insert(kLossKeys.begin(), kLossKeys.end());
    const KvConfig kv = KvConfig::parse(opt.config_path, all);

    TrainConfig cfg;
    cfg.loss = loss_config_from_kv(kv);
    cfg.steps = kv.get_int("steps", 500);
    cfg.learning_rate = kv.get_double("learning_rate", 0.05);
    cfg.batch_size = kv.get_int("batch_size", 8);
    cfg.seed = kv.get_u64("seed", 0);
    cfg.mode = head_mode_from_kv(kv);
    if (cfg.steps < 1) throw ConfigError("steps must be >= 1");

    const SceneConfig scene_cfg = scene_config_from_kv(kv);
    const std::vector<SyntheticScene> scenes = generate_scenes(
        kv.get_u64("scene_seed", 100), kv.get_int("scenes", 32), scene_cfg);

    ToyArchitecture arch;
    arch.grid_w = arch.grid_h = scene_cfg.width;
    arch.mode = cfg.mode;
    ToyModel model = ToyModel::init(arch, cfg.seed);

    const TrainResult result = train(std::move(model), scenes, cfg);

    std::filesystem::create_directories(opt.out_dir);
    const std::filesystem::path dir(opt.out_dir);
    const auto checkpoint_path = dir / "checkpoint.json";
    const auto trace_path = dir / "trace.csv";
    save_checkpoint(result.model, checkpoint_path);
    std::string trace = "step,composite_loss\n";
    for (std::size_t i = 0; i < result.trace.size(); ++i) {
        trace += std::to_string(i) + "," + fmt_full(result.trace[i]) + "\n";
    }
    write_text(trace_path, trace);

    RunManifest manifest;
    manifest.command = "train-toy";
    for (const auto& [k, v] : kv.entries()) manifest.config[k] = v;
    manifest.config["resolved.steps"] = std::to_string(cfg.steps);
    manifest.config["resolved.loss_weights"] =
        fmt(cfg.loss.w_reg) + ":" + fmt(cfg.loss.w_art) + ":" +
        fmt(cfg.loss.w_pol);
    manifest.seed = cfg.seed;
    add_input(manifest, opt.config_path);
    manifest.outputs = {checkpoint_path.string(), trace_path.string()};
    polyart::cli::write_manifest(manifest, dir / "manifest.json");

    std::cout << "steps=" << cfg.steps
              << " initial_loss=" << fmt(result.trace.front())
              << " final_loss=" << fmt(result.trace.back()) << "\n";
    return kExitOk;
}

// ----------------------------------------------------------- gradcheck

struct GradCheckOptions {
    std::string config_path;
};

int cmd_gradcheck(const GradCheckOptions& opt) {
    const auto keys = with(kSceneKeys, {"mode", "seed", "coords", "fd_step",
                                        "tolerance", "check_seed"});
    std::set<std::string> all = keys;
    all.insert(kLossKeys.begin(), kLossKeys.end());
    const KvConfig kv = KvConfig::parse(opt.config_path, all);

    const LossConfig loss = loss_config_from_kv(kv);
    const SceneConfig scene_cfg = scene_config_from_kv(kv);
    const SyntheticScene scene =
        generate_scene(kv.get_u64("scene_seed", 100), scene_cfg);

    ToyArchitecture arch;
    arch.grid_w = arch.grid_h = scene_cfg.width;
    arch.mode = head_mode_from_kv(kv);
    const ToyModel model = ToyModel::init(arch, kv.get_u64("seed", 0));

    const auto coords =
        static_cast<std::size_t>(kv.get_int("coords", 200));
    const double tolerance = kv.get_double("tolerance", 1e-4);
    const GradCheckReport report =
        grad_check(model, scene, loss, coords, kv.get_u64("check_seed", 1),
                   kv.get_double("fd_step", 1e-6), tolerance);

    char line[160];
    std::snprintf(line, sizeof(line),
                  "max_rel_error=%.6e coords=%zu tolerance=%.1e %s\n",
                  report.max_rel_error, report.coords_checked, tolerance,
                  report.pass ? "PASS" : "FAIL");
    std::cout << line;
    if (!report.pass) {
        throw GradCheckFailure("gradient check failed");
    }
    return kExitOk;
}

// --------------------------------------------------------- predict-toy

struct PredictToyOptions {
    std::string checkpoint;
    SceneFlags scene;
    double score_threshold = 0.5;
    double nms_iou = 0.5;
    std::string out;
    std::string name = "toy-predictions";
};

int cmd_predict_toy(const PredictToyOptions& opt) {
    const ToyModel model = load_checkpoint(opt.checkpoint);
    SceneFlags flags = opt.scene;
    flags.grid = model.arch.grid_w;
    const SceneConfig cfg = scene_config_from_flags(flags);
    const std::vector<SyntheticScene> scenes =
        generate_scenes(flags.seed, flags.count, cfg);

    Dataset d = scenes_to_dataset(scenes, opt.name, /*include_artifacts=*/false);
    for (std::size_t i = 0; i < scenes.size(); ++i) {
        const std::vector<Detection> dets = predict_boxes(
            model, scenes[i], opt.score_threshold, opt.nms_iou);
        for (const Detection& det : dets) {
            if (det.artifact_class.has_value()) {
                d.frames[i].artifacts.push_back(det);
            } else {
                d.frames[i].pred_polyps.push_back(det);
            }
        }
    }
    save_dataset(d, opt.out);
    std::cout << "frames=" << d.frames.size()
              << " artifacts_per_image=" << fmt(artifacts_per_image(d))
              << "\n";

    RunManifest manifest;
    manifest.command = "predict-toy";
    manifest.config = scene_flags_config(flags);
    manifest.config["score_threshold"] = fmt(opt.score_threshold);
    manifest.config["nms_iou"] = fmt(opt.nms_iou);
    manifest.config["name"] = opt.name;
    manifest.seed = flags.seed;
    add_input(manifest, opt.checkpoint);
    manifest.outputs = {opt.out};
    write_manifest(manifest, opt.out);
    return kExitOk;
}

int run_guarded(const std::function<int()>& fn) {
    try {
        return fn();
    } catch (const EmptyInputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitEmpty;
    } catch (const FrameAlignmentError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitAlignment;
    } catch (const DivergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDivergence;
    } catch (const GradCheckFailure&) {
        return kExitDivergence;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"polyp/artifact detection analysis toolkit"};
    app.set_version_flag("--version", polyart::kVersion);
    app.require_subcommand(1);

    EvalOptions eval_opt;
    CLI::App* eval_cmd = app.add_subcommand(
        "eval", "centroid-criterion metrics of a dataset");
    eval_cmd->add_option("dataset", eval_opt.dataset, "dataset file")
        ->required();
    eval_cmd->add_option("--det-threshold", eval_opt.det_threshold,
                         "polyp detection score threshold");
    eval_cmd->add_option("--mode", eval_opt.mode, "strict or analysis");
    eval_cmd->add_option("--format", eval_opt.format, "csv or md");
    eval_cmd->add_option("-o,--out", eval_opt.out, "report file");
    eval_cmd->add_option("--csv-image-size", eval_opt.csv_size,
                         "frame size for CSV inputs");

    AnalyzeOptions an_opt;
    CLI::App* an_cmd =
        app.add_subcommand("analyze", "artifact-effect analyses");
    an_cmd->add_option("dataset", an_opt.dataset, "dataset file")->required();
    an_cmd->add_option("--kind", an_opt.kind,
                       "presence, overlap, contain or corr")
        ->required();
    an_cmd->add_option("--artifact-threshold", an_opt.artifact_threshold,
                       "artifact confidence threshold");
    an_cmd->add_option("--det-threshold", an_opt.det_threshold,
                       "polyp detection score threshold");
    an_cmd->add_option("--iou", an_opt.iou_threshold,
                       "overlap IoU threshold");
    an_cmd->add_option("--match-mode", an_opt.match_mode,
                       "analysis or strict");
    an_cmd->add_option("--area-threshold", an_opt.area_overrides,
                       "per-class presence override, e.g. blur=0.5");
    an_cmd->add_option("--format", an_opt.format, "csv or md");
    an_cmd->add_option("-o,--out", an_opt.out, "report file");
    an_cmd->add_option("--csv-image-size", an_opt.csv_size,
                       "frame size for CSV inputs");

    MergeOptions merge_opt;
    CLI::App* merge_cmd = app.add_subcommand(
        "merge-labels", "fuse artifact pseudo-labels into a polyp dataset");
    merge_cmd->add_option("polyp", merge_opt.polyp_path, "polyp dataset")
        ->required();
    merge_cmd
        ->add_option("artifact", merge_opt.artifact_path,
                     "artifact predictions dataset")
        ->required();
    merge_cmd->add_option("-o,--out", merge_opt.out, "fused dataset file")
        ->required();
    merge_cmd->add_option("--threshold", merge_opt.threshold,
                          "pseudo-label confidence threshold");
    merge_cmd->add_option("--csv-image-size", merge_opt.csv_size,
                          "frame size for CSV inputs");

    GenScenesOptions gen_opt;
    CLI::App* gen_cmd =
        app.add_subcommand("gen-scenes", "generate synthetic scenes");
    add_scene_flags(gen_cmd, gen_opt.scene);
    gen_cmd->add_option("-o,--out", gen_opt.out, "dataset file")->required();
    gen_cmd->add_option("--name", gen_opt.name, "dataset name");
    gen_cmd->add_flag("--polyp-only", gen_opt.polyp_only,
                      "export without artifact annotations");

    TrainToyOptions train_opt;
    CLI::App* train_cmd =
        app.add_subcommand("train-toy", "train the toy detector");
    train_cmd->add_option("--config", train_opt.config_path, "config file")
        ->required();
    train_cmd->add_option("--out-dir", train_opt.out_dir,
                          "output directory");

    GradCheckOptions gc_opt;
    CLI::App* gc_cmd = app.add_subcommand(
        "gradcheck", "finite-difference check of the analytic gradients");
    gc_cmd->add_option("--config", gc_opt.config_path, "config file")
        ->required();

    PredictToyOptions pred_opt;
    CLI::App* pred_cmd = app.add_subcommand(
        "predict-toy", "run a toy checkpoint over generated scenes");
    pred_cmd->add_option("--checkpoint", pred_opt.checkpoint,
                         "checkpoint file")
        ->required();
    add_scene_flags(pred_cmd, pred_opt.scene);
    pred_cmd->add_option("--score-threshold", pred_opt.score_threshold,
                         "detection score threshold");
    pred_cmd->add_option("--nms-iou", pred_opt.nms_iou,
                         "NMS suppression IoU");
    pred_cmd->add_option("-o,--out", pred_opt.out, "dataset file")
        ->required();
    pred_cmd->add_option("--name", pred_opt.name, "dataset name");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    }

    if (eval_cmd->parsed()) {
        return run_guarded([&] { return cmd_eval(eval_opt); });
    }
    if (an_cmd->parsed()) {
        return run_guarded([&] { return cmd_analyze(an_opt); });
    }
    if (merge_cmd->parsed()) {
        return run_guarded([&] { return cmd_merge_labels(merge_opt); });
    }
    if (gen_cmd->parsed()) {
        return run_guarded([&] { return cmd_gen_scenes(gen_opt); });
    }
    if (train_cmd->parsed()) {
        return run_guarded([&] { return cmd_train_toy(train_opt); });
    }
    if (gc_cmd->parsed()) {
        return run_guarded([&] { return cmd_gradcheck(gc_opt); });
    }
    if (pred_cmd->parsed()) {
        return run_guarded([&] { return cmd_predict_toy(pred_opt); });
    }
    return kExitInput;
}
