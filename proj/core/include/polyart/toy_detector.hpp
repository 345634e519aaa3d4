#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "polyart/loss.hpp"
#include "polyart/scene.hpp"

namespace polyart {

/// Head layout of the toy detector.
///   TwoHead: one polyp channel plus six artifact channels, each with its
///            own classification head; regression head shared.
///   FlatMultiClass: a single 7-channel classification head
///            (channel 0 = polyp, channel 1+c = artifact class c).
enum class HeadMode { TwoHead, FlatMultiClass };

/// Fixed small architecture: a two-layer tanh trunk maps a square pixel
/// patch around each anchor cell to a feature vector; linear heads score
/// each anchor slot. Single-scale anchor grid, square anchors.
struct ToyArchitecture {
    int grid_h = 64;
    int grid_w = 64;
    int stride = 8;
    int patch = 16;
    int hidden1 = 48;
    int hidden2 = 32;
    std::vector<double> anchor_sizes = {8.0, 16.0, 28.0};
    HeadMode mode = HeadMode::TwoHead;
    // When true the shared regression head trains on foreground anchors
    // of both tasks; otherwise on polyp foregrounds only.
    bool regress_both_tasks = true;

    int cells_x() const { return grid_w / stride; }
    int cells_y() const { return grid_h / stride; }
    int cell_count() const { return cells_x() * cells_y(); }
    int anchors_per_cell() const {
        return static_cast<int>(anchor_sizes.size());
    }
    int anchor_count() const { return cell_count() * anchors_per_cell(); }
    int patch_dim() const { return patch * patch; }
    int cls_channels() const { return mode == HeadMode::TwoHead ? 1 : 7; }
    int art_channels() const { return mode == HeadMode::TwoHead ? 6 : 0; }

    std::size_t shared_size() const;
    std::size_t polyp_size() const;
    std::size_t artifact_size() const;
    std::size_t reg_size() const;

    friend bool operator==(const ToyArchitecture&,
                           const ToyArchitecture&) = default;
};

void validate(const ToyArchitecture& arch);

/// The anchor boxes of the grid, ordered by cell (row-major) then size.
std::vector<Box> anchor_boxes(const ToyArchitecture& arch);

/// Parameter store partitioned into disjoint blocks: shared trunk,
/// polyp head (the flat head in FlatMultiClass mode), artifact head
/// (empty in FlatMultiClass mode) and the shared regression head.
struct ToyModel {
    ToyArchitecture arch;
    std::vector<double> shared_params;
    std::vector<double> polyp_params;
    std::vector<double> artifact_params;
    std::vector<double> reg_params;

    static ToyModel zeros(const ToyArchitecture& arch);
    /// Uniform init scaled by 1/sqrt(fan_in), biases zero. Deterministic
    /// for a given seed.
    static ToyModel init(const ToyArchitecture& arch, std::uint64_t seed);

    std::size_t parameter_count() const;
};

/// Per-anchor head outputs. Probabilities come from logistic squashing;
/// offsets are unconstrained.
struct ForwardResult {
    std::vector<double> cls_prob;  // anchor-major, cls_channels per anchor
    std::vector<double> art_prob;  // anchor-major, art_channels per anchor
    std::vector<double> offsets;   // anchor-major, 4 per anchor
};

/// Runs the model over a scene. ShapeError when the scene grid does not
/// match the architecture.
ForwardResult forward(const ToyModel& m, const SyntheticScene& scene);

/// Anchor assignments of one scene for the classification tasks and the
/// shared regression head.
struct SceneTargets {
    AnchorTargets cls;         // polyp task (TwoHead) or flat label space
    AnchorTargets artifact;    // artifact task (TwoHead only)
    AnchorTargets regression;  // union per regress_both_tasks
};

SceneTargets make_targets(const ToyArchitecture& arch,
                          const SyntheticScene& scene);

/// Gradient blocks matching the model's parameter blocks.
struct Gradients {
    std::vector<double> shared;
    std::vector<double> polyp;
    std::vector<double> artifact;
    std::vector<double> reg;

    static Gradients zeros(const ToyArchitecture& arch);
    void accumulate(const Gradients& other);
    void scale(double factor);
};

/// Composite-loss breakdown of one scene. Per-anchor classification
/// losses are summed and normalized by max(1, foreground count) of the
/// task; the regularizer is the sum of squares over all blocks.
struct SceneLossBreakdown {
    double polyp_cls = 0.0;
    double artifact_cls = 0.0;
    double regression = 0.0;
    double regularizer = 0.0;
    double composite = 0.0;
};

/// Computes the composite loss of one scene and, when `grads` is given,
/// its analytic gradient via hand-derived backpropagation.
SceneLossBreakdown scene_loss(const ToyModel& m, const SyntheticScene& scene,
                              const LossConfig& cfg,
                              Gradients* grads = nullptr);

struct TrainConfig {
    LossConfig loss;
    int steps = 500;
    double learning_rate = 0.05;
    int batch_size = 8;
    std::uint64_t seed = 0;
    HeadMode mode = HeadMode::TwoHead;
};

struct TrainResult {
    ToyModel model;
    std::vector<double> trace;  // batch composite loss per step, pre-update
};

/// Plain gradient descent on the composite loss. Batches cycle through
/// the scenes deterministically; identical configs and seeds yield
/// bitwise-identical traces. Throws DivergenceError when the loss stops
/// being finite and ConfigError on bad settings (steps < 1, negative
/// learning rate, mode mismatch). A zero learning rate is legal and
/// leaves the parameters unchanged.
TrainResult train(ToyModel m, const std::vector<SyntheticScene>& data,
                  const TrainConfig& cfg);

struct GradCheckReport {
    double max_rel_error = 0.0;
    std::size_t coords_checked = 0;
    bool pass = false;
};

/// Compares the analytic gradient of the composite loss against central
/// finite differences on a random subsample of parameter coordinates.
GradCheckReport grad_check(const ToyModel& m, const SyntheticScene& scene,
                           const LossConfig& cfg,
                           std::size_t sample_coords = 200,
                           std::uint64_t seed = 1, double step = 1e-6,
                           double tolerance = 1e-4);

/// Relative error between an externally supplied gradient and finite
/// differences; lets callers check corrupted gradients.
GradCheckReport grad_check_against(const ToyModel& m,
                                   const SyntheticScene& scene,
                                   const LossConfig& cfg,
                                   const Gradients& analytic,
                                   std::size_t sample_coords = 200,
                                   std::uint64_t seed = 1, double step = 1e-6,
                                   double tolerance = 1e-4);

/// Decodes anchors, applies the score threshold and per-class greedy
/// non-maximum suppression (boxes of different classes never suppress
/// each other). Output order: polyp detections first, then artifact
/// classes in code order, each sorted by descending score.
std::vector<Detection> predict_boxes(const ToyModel& m,
                                     const SyntheticScene& scene,
                                     double score_threshold,
                                     double nms_iou = 0.5);

/// Versioned JSON checkpoint with the architecture descriptor and all
/// parameter blocks. load(save(m)) == m.
void save_checkpoint(const ToyModel& m, const std::filesystem::path& path);
ToyModel load_checkpoint(const std::filesystem::path& path);

}  // namespace polyart
