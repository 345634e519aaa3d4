#include "polyart/toy_detector.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "polyart/version.hpp"

namespace polyart {

namespace {

using nlohmann::json;

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double clamp_prob(double q) { return std::clamp(q, 1e-7, 1.0 - 1e-7); }

/// Offsets of the weight/bias segments inside the shared block.
struct SharedLayout {
    std::size_t w1, b1, w2, b2;
    explicit SharedLayout(const ToyArchitecture& a)
        : w1(0),
          b1(static_cast<std::size_t>(a.hidden1) * a.patch_dim()),
          w2(b1 + a.hidden1),
          b2(w2 + static_cast<std::size_t>(a.hidden2) * a.hidden1) {}
};

/// Per-cell forward cache for backpropagation.
struct CellCache {
    std::vector<double> patch;  // patch_dim
    std::vector<double> a1;     // hidden1
    std::vector<double> a2;     // hidden2
};

void extract_patch(const SyntheticScene& s, const ToyArchitecture& arch,
                   int cell_x, int cell_y, std::vector<double>& out) {
    out.assign(static_cast<std::size_t>(arch.patch_dim()), 0.0);
    const int cx = cell_x * arch.stride + arch.stride / 2;
    const int cy = cell_y * arch.stride + arch.stride / 2;
    const int x0 = cx - arch.patch / 2;
    const int y0 = cy - arch.patch / 2;
    for (int py = 0; py < arch.patch; ++py) {
        const int y = y0 + py;
        if (y < 0 || y >= s.height) continue;
        for (int px = 0; px < arch.patch; ++px) {
            const int x = x0 + px;
            if (x < 0 || x >= s.width) continue;
            out[static_cast<std::size_t>(py) * arch.patch + px] = s.at(x, y);
        }
    }
}

void trunk_forward(const ToyModel& m, const std::vector<double>& patch,
                   std::vector<double>& a1, std::vector<double>& a2) {
    const ToyArchitecture& arch = m.arch;
    const SharedLayout lay(arch);
    const std::vector<double>& th = m.shared_params;
    const int d = arch.patch_dim();

    a1.resize(static_cast<std::size_t>(arch.hidden1));
    for (int i = 0; i < arch.hidden1; ++i) {
        double z = th[lay.b1 + i];
        const std::size_t row = lay.w1 + static_cast<std::size_t>(i) * d;
        for (int k = 0; k < d; ++k) z += th[row + k] * patch[k];
        a1[static_cast<std::size_t>(i)] = std::tanh(z);
    }
    a2.resize(static_cast<std::size_t>(arch.hidden2));
    for (int i = 0; i < arch.hidden2; ++i) {
        double z = th[lay.b2 + i];
        const std::size_t row =
            lay.w2 + static_cast<std::size_t>(i) * arch.hidden1;
        for (int k = 0; k < arch.hidden1; ++k) {
            z += th[row + k] * a1[static_cast<std::size_t>(k)];
        }
        a2[static_cast<std::size_t>(i)] = std::tanh(z);
    }
}

/// Linear head over a2: rows = anchors_per_cell * channels, packed as
/// [W (rows x hidden2), b (rows)].
double head_logit(const std::vector<double>& params,
                  const ToyArchitecture& arch, int rows, int row,
                  const std::vector<double>& a2) {
    const std::size_t w_off = static_cast<std::size_t>(row) * arch.hidden2;
    const std::size_t b_off =
        static_cast<std::size_t>(rows) * arch.hidden2 + row;
    double z = params[b_off];
    for (int k = 0; k < arch.hidden2; ++k) {
        z += params[w_off + k] * a2[static_cast<std::size_t>(k)];
    }
    return z;
}

void check_scene(const ToyArchitecture& arch, const SyntheticScene& scene) {
    if (scene.width != arch.grid_w || scene.height != arch.grid_h) {
        throw ShapeError("scene " + std::to_string(scene.width) + "x" +
                         std::to_string(scene.height) +
                         " does not match model grid " +
                         std::to_string(arch.grid_w) + "x" +
                         std::to_string(arch.grid_h));
    }
}

/// Flat-mode class index of a gt box: 0 = polyp, 1 + code = artifact.
int flat_class(int artifact_code) { return 1 + artifact_code; }

double channel_weight(const LossConfig& cfg, TaskLabel label) {
    if (cfg.class_weights.empty()) return 1.0;
    const auto it = cfg.class_weights.find(label);
    return it == cfg.class_weights.end() ? 0.0 : it->second;
}

TaskLabel cls_channel_label(const ToyArchitecture& arch, int channel) {
    if (arch.mode == HeadMode::TwoHead || channel == 0) {
        return TaskLabel::polyp();
    }
    return TaskLabel::artifact(artifact_class_from_code(channel - 1));
}

double block_sumsq(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

}  // namespace

std::size_t ToyArchitecture::shared_size() const {
    return static_cast<std::size_t>(hidden1) * patch_dim() + hidden1 +
           static_cast<std::size_t>(hidden2) * hidden1 + hidden2;
}

std::size_t ToyArchitecture::polyp_size() const {
    const std::size_t rows =
        static_cast<std::size_t>(anchors_per_cell()) * cls_channels();
    return rows * hidden2 + rows;
}

std::size_t ToyArchitecture::artifact_size() const {
    const std::size_t rows =
        static_cast<std::size_t>(anchors_per_cell()) * art_channels();
    return rows * hidden2 + rows;
}

std::size_t ToyArchitecture::reg_size() const {
    const std::size_t rows = static_cast<std::size_t>(anchors_per_cell()) * 4;
    return rows * hidden2 + rows;
}

void validate(const ToyArchitecture& arch) {
    if (arch.grid_h < 1 || arch.grid_w < 1 || arch.stride < 1 ||
        arch.patch < 1 || arch.hidden1 < 1 || arch.hidden2 < 1) {
        throw ConfigError("architecture dimensions must be positive");
    }
    if (arch.grid_h % arch.stride != 0 || arch.grid_w % arch.stride != 0) {
        throw ConfigError("grid size must be divisible by the stride");
    }
    if (arch.anchor_sizes.empty()) {
        throw ConfigError("at least one anchor size is required");
    }
    for (double s : arch.anchor_sizes) {
        if (!(s > 0.0)) throw ConfigError("anchor sizes must be positive");
    }
}

std::vector<Box> anchor_boxes(const ToyArchitecture& arch) {
    validate(arch);
    std::vector<Box> anchors;
    anchors.reserve(static_cast<std::size_t>(arch.anchor_count()));
    for (int cy = 0; cy < arch.cells_y(); ++cy) {
        for (int cx = 0; cx < arch.cells_x(); ++cx) {
            const double px = cx * arch.stride + arch.stride * 0.5;
            const double py = cy * arch.stride + arch.stride * 0.5;
            for (double s : arch.anchor_sizes) {
                anchors.emplace_back(px - s * 0.5, py - s * 0.5, px + s * 0.5,
                                     py + s * 0.5);
            }
        }
    }
    return anchors;
}

ToyModel ToyModel::zeros(const ToyArchitecture& arch) {
    validate(arch);
    ToyModel m;
    m.arch = arch;
    m.shared_params.assign(arch.shared_size(), 0.0);
    m.polyp_params.assign(arch.polyp_size(), 0.0);
    m.artifact_params.assign(arch.artifact_size(), 0.0);
    m.reg_params.assign(arch.reg_size(), 0.0);
    return m;
}

ToyModel ToyModel::init(const ToyArchitecture& arch, std::uint64_t seed) {
    ToyModel m = zeros(arch);
    std::mt19937_64 rng(seed);
    const auto fill_layer = [&rng](std::span<double> weights, int fan_in) {
        const double scale = 1.0 / std::sqrt(static_cast<double>(fan_in));
        std::uniform_real_distribution<double> dist(-scale, scale);
        for (double& w : weights) w = dist(rng);
    };
    const SharedLayout lay(arch);
    fill_layer(std::span(m.shared_params).subspan(lay.w1, lay.b1 - lay.w1),
               arch.patch_dim());
    fill_layer(std::span(m.shared_params).subspan(lay.w2, lay.b2 - lay.w2),
               arch.hidden1);
    const auto fill_head = [&](std::vector<double>& block, int channels) {
        if (channels == 0) return;
        const std::size_t rows =
            static_cast<std::size_t>(arch.anchors_per_cell()) * channels;
        fill_layer(std::span(block).first(rows * arch.hidden2), arch.hidden2);
    };
    fill_head(m.polyp_params, arch.cls_channels());
    fill_head(m.artifact_params, arch.art_channels());
    fill_head(m.reg_params, 4);
    return m;
}

std::size_t ToyModel::parameter_count() const {
    return shared_params.size() + polyp_params.size() +
           artifact_params.size() + reg_params.size();
}

ForwardResult forward(const ToyModel& m, const SyntheticScene& scene) {
    check_scene(m.arch, scene);
    const ToyArchitecture& arch = m.arch;
    const int A = arch.anchors_per_cell();
    const int Cc = arch.cls_channels();
    const int Ca = arch.art_channels();

    ForwardResult out;
    out.cls_prob.resize(static_cast<std::size_t>(arch.anchor_count()) * Cc);
    out.art_prob.resize(static_cast<std::size_t>(arch.anchor_count()) * Ca);
    out.offsets.resize(static_cast<std::size_t>(arch.anchor_count()) * 4);

    std::vector<double> patch, a1, a2;
    for (int cy = 0; cy < arch.cells_y(); ++cy) {
        for (int cx = 0; cx < arch.cells_x(); ++cx) {
            extract_patch(scene, arch, cx, cy, patch);
            trunk_forward(m, patch, a1, a2);
            const int cell = cy * arch.cells_x() + cx;
            for (int a = 0; a < A; ++a) {
                const std::size_t anchor =
                    static_cast<std::size_t>(cell) * A + a;
                for (int c = 0; c < Cc; ++c) {
                    out.cls_prob[anchor * Cc + c] = clamp_prob(sigmoid(
                        head_logit(m.polyp_params, arch, A * Cc, a * Cc + c,
                                   a2)));
                }
                for (int c = 0; c < Ca; ++c) {
                    out.art_prob[anchor * Ca + c] = clamp_prob(sigmoid(
                        head_logit(m.artifact_params, arch, A * Ca,
                                   a * Ca + c, a2)));
                }
                for (int k = 0; k < 4; ++k) {
                    out.offsets[anchor * 4 + k] = head_logit(
                        m.reg_params, arch, A * 4, a * 4 + k, a2);
                }
            }
        }
    }
    return out;
}

SceneTargets make_targets(const ToyArchitecture& arch,
                          const SyntheticScene& scene) {
    check_scene(arch, scene);
    const std::vector<Box> anchors = anchor_boxes(arch);

    std::vector<LabeledBox> polyp_gts;
    polyp_gts.reserve(scene.gt_polyps.size());
    for (const Box& b : scene.gt_polyps) polyp_gts.push_back({b, 0});

    SceneTargets targets;
    if (arch.mode == HeadMode::TwoHead) {
        targets.cls = assign_anchors(anchors, polyp_gts);
        targets.artifact = assign_anchors(anchors, scene.gt_artifacts);
    } else {
        std::vector<LabeledBox> flat_gts = polyp_gts;
        for (const LabeledBox& a : scene.gt_artifacts) {
            flat_gts.push_back({a.box, flat_class(a.cls)});
        }
        targets.cls = assign_anchors(anchors, flat_gts);
    }

    std::vector<LabeledBox> reg_gts = polyp_gts;
    if (arch.regress_both_tasks) {
        for (const LabeledBox& a : scene.gt_artifacts) {
            reg_gts.push_back({a.box, a.cls});
        }
    }
    targets.regression = assign_anchors(anchors, reg_gts);
    return targets;
}

Gradients Gradients::zeros(const ToyArchitecture& arch) {
    Gradients g;
    g.shared.assign(arch.shared_size(), 0.0);
    g.polyp.assign(arch.polyp_size(), 0.0);
    g.artifact.assign(arch.artifact_size(), 0.0);
    g.reg.assign(arch.reg_size(), 0.0);
    return g;
}

void Gradients::accumulate(const Gradients& other) {
    const auto add = [](std::vector<double>& dst,
                        const std::vector<double>& src) {
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
    };
    add(shared, other.shared);
    add(polyp, other.polyp);
    add(artifact, other.artifact);
    add(reg, other.reg);
}

void Gradients::scale(double factor) {
    for (auto* block : {&shared, &polyp, &artifact, &reg}) {
        for (double& v : *block) v *= factor;
    }
}

SceneLossBreakdown scene_loss(const ToyModel& m, const SyntheticScene& scene,
                              const LossConfig& cfg, Gradients* grads) {
    validate(cfg);
    check_scene(m.arch, scene);
    const ToyArchitecture& arch = m.arch;
    const int A = arch.anchors_per_cell();
    const int Cc = arch.cls_channels();
    const int Ca = arch.art_channels();
    const int n_anchors = arch.anchor_count();

    const SceneTargets targets = make_targets(arch, scene);
    const double n_cls =
        static_cast<double>(std::max<std::size_t>(1, targets.cls.foreground_count()));
    const double n_art = static_cast<double>(
        std::max<std::size_t>(1, targets.artifact.foreground_count()));
    const double n_reg = static_cast<double>(
        std::max<std::size_t>(1, targets.regression.foreground_count()));

    // Forward pass with per-cell caches for the backward pass.
    std::vector<CellCache> cells(static_cast<std::size_t>(arch.cell_count()));
    std::vector<double> cls_q(static_cast<std::size_t>(n_anchors) * Cc);
    std::vector<double> art_q(static_cast<std::size_t>(n_anchors) * Ca);
    std::vector<double> reg_t(static_cast<std::size_t>(n_anchors) * 4);
    for (int cy = 0; cy < arch.cells_y(); ++cy) {
        for (int cx = 0; cx < arch.cells_x(); ++cx) {
            const int cell = cy * arch.cells_x() + cx;
            CellCache& cache = cells[static_cast<std::size_t>(cell)];
            extract_patch(scene, arch, cx, cy, cache.patch);
            trunk_forward(m, cache.patch, cache.a1, cache.a2);
            for (int a = 0; a < A; ++a) {
                const std::size_t anchor =
                    static_cast<std::size_t>(cell) * A + a;
                for (int c = 0; c < Cc; ++c) {
                    cls_q[anchor * Cc + c] = sigmoid(head_logit(
                        m.polyp_params, arch, A * Cc, a * Cc + c, cache.a2));
                }
                for (int c = 0; c < Ca; ++c) {
                    art_q[anchor * Ca + c] = sigmoid(head_logit(
                        m.artifact_params, arch, A * Ca, a * Ca + c,
                        cache.a2));
                }
                for (int k = 0; k < 4; ++k) {
                    reg_t[anchor * 4 + k] = head_logit(m.reg_params, arch,
                                                       A * 4, a * 4 + k,
                                                       cache.a2);
                }
            }
        }
    }

    // Per-output dL/d(logit or offset) with task weights and normalizers
    // folded in; zero entries mean "no contribution".
    std::vector<double> g_cls(cls_q.size(), 0.0);
    std::vector<double> g_art(art_q.size(), 0.0);
    std::vector<double> g_reg(reg_t.size(), 0.0);

    SceneLossBreakdown loss;

    for (int anchor = 0; anchor < n_anchors; ++anchor) {
        const AnchorAssignment& cls_as =
            targets.cls.anchors[static_cast<std::size_t>(anchor)];
        if (cls_as.role != AnchorRole::Ignored) {
            for (int c = 0; c < Cc; ++c) {
                const bool y = cls_as.role == AnchorRole::Foreground &&
                               cls_as.cls == c;
                const double kappa =
                    channel_weight(cfg, cls_channel_label(arch, c));
                if (kappa == 0.0) continue;
                const std::size_t idx =
                    static_cast<std::size_t>(anchor) * Cc + c;
                const ValueGrad fl = focal_loss(cls_q[idx], y, cfg.focal);
                loss.polyp_cls += kappa * fl.value / n_cls;
                const double q = cls_q[idx];
                g_cls[idx] = cfg.w_pol * kappa / n_cls * fl.grad * q *
                             (1.0 - q);
            }
        }
        if (Ca > 0) {
            const AnchorAssignment& art_as =
                targets.artifact.anchors[static_cast<std::size_t>(anchor)];
            if (art_as.role != AnchorRole::Ignored) {
                for (int c = 0; c < Ca; ++c) {
                    const bool y = art_as.role == AnchorRole::Foreground &&
                                   art_as.cls == c;
                    const double kappa = channel_weight(
                        cfg,
                        TaskLabel::artifact(artifact_class_from_code(c)));
                    if (kappa == 0.0) continue;
                    const std::size_t idx =
                        static_cast<std::size_t>(anchor) * Ca + c;
                    const ValueGrad fl =
                        focal_loss(art_q[idx], y, cfg.focal);
                    loss.artifact_cls += kappa * fl.value / n_art;
                    const double q = art_q[idx];
                    g_art[idx] = cfg.w_art * kappa / n_art * fl.grad * q *
                                 (1.0 - q);
                }
            }
        }
        const AnchorAssignment& reg_as =
            targets.regression.anchors[static_cast<std::size_t>(anchor)];
        if (reg_as.role == AnchorRole::Foreground) {
            for (int k = 0; k < 4; ++k) {
                const std::size_t idx = static_cast<std::size_t>(anchor) * 4 +
                                        static_cast<std::size_t>(k);
                const ValueGrad sl = smooth_l1(
                    reg_t[idx] -
                    reg_as.reg_target[static_cast<std::size_t>(k)]);
                loss.regression += sl.value / n_reg;
                g_reg[idx] = cfg.w_reg / n_reg * sl.grad;
            }
        }
    }

    loss.regularizer = block_sumsq(m.shared_params) +
                       block_sumsq(m.polyp_params) +
                       block_sumsq(m.artifact_params) +
                       block_sumsq(m.reg_params);
    loss.composite = composite_loss(loss.polyp_cls, loss.artifact_cls,
                                    loss.regression, loss.regularizer, cfg);

    if (grads == nullptr) return loss;

    *grads = Gradients::zeros(arch);
    const SharedLayout lay(arch);
    const int d = arch.patch_dim();
    std::vector<double> da2(static_cast<std::size_t>(arch.hidden2));
    std::vector<double> dz2(static_cast<std::size_t>(arch.hidden2));
    std::vector<double> da1(static_cast<std::size_t>(arch.hidden1));

    const auto head_backward = [&](std::vector<double>& dblock,
                                   const std::vector<double>& params,
                                   int rows, int row, double g,
                                   const std::vector<double>& a2) {
        const std::size_t w_off = static_cast<std::size_t>(row) * arch.hidden2;
        const std::size_t b_off =
            static_cast<std::size_t>(rows) * arch.hidden2 + row;
        for (int k = 0; k < arch.hidden2; ++k) {
            dblock[w_off + k] += g * a2[static_cast<std::size_t>(k)];
            da2[static_cast<std::size_t>(k)] += g * params[w_off + k];
        }
        dblock[b_off] += g;
    };

    for (int cell = 0; cell < arch.cell_count(); ++cell) {
        const CellCache& cache = cells[static_cast<std::size_t>(cell)];
        std::fill(da2.begin(), da2.end(), 0.0);
        bool touched = false;
        for (int a = 0; a < A; ++a) {
            const std::size_t anchor = static_cast<std::size_t>(cell) * A + a;
            for (int c = 0; c < Cc; ++c) {
                const double g = g_cls[anchor * Cc + c];
                if (g == 0.0) continue;
                head_backward(grads->polyp, m.polyp_params, A * Cc,
                              a * Cc + c, g, cache.a2);
                touched = true;
            }
            for (int c = 0; c < Ca; ++c) {
                const double g = g_art[anchor * Ca + c];
                if (g == 0.0) continue;
                head_backward(grads->artifact, m.artifact_params, A * Ca,
                              a * Ca + c, g, cache.a2);
                touched = true;
            }
            for (int k = 0; k < 4; ++k) {
                const double g = g_reg[anchor * 4 + k];
                if (g == 0.0) continue;
                head_backward(grads->reg, m.reg_params, A * 4, a * 4 + k, g,
                              cache.a2);
                touched = true;
            }
        }
        if (!touched) continue;

        for (int i = 0; i < arch.hidden2; ++i) {
            const double a2v = cache.a2[static_cast<std::size_t>(i)];
            dz2[static_cast<std::size_t>(i)] =
                da2[static_cast<std::size_t>(i)] * (1.0 - a2v * a2v);
        }
        std::fill(da1.begin(), da1.end(), 0.0);
        for (int i = 0; i < arch.hidden2; ++i) {
            const double g = dz2[static_cast<std::size_t>(i)];
            if (g == 0.0) continue;
            const std::size_t row =
                lay.w2 + static_cast<std::size_t>(i) * arch.hidden1;
            for (int k = 0; k < arch.hidden1; ++k) {
                grads->shared[row + k] +=
                    g * cache.a1[static_cast<std::size_t>(k)];
                da1[static_cast<std::size_t>(k)] +=
                    g * m.shared_params[row + k];
            }
            grads->shared[lay.b2 + i] += g;
        }
        for (int i = 0; i < arch.hidden1; ++i) {
            const double a1v = cache.a1[static_cast<std::size_t>(i)];
            const double g =
                da1[static_cast<std::size_t>(i)] * (1.0 - a1v * a1v);
            if (g == 0.0) continue;
            const std::size_t row = lay.w1 + static_cast<std::size_t>(i) * d;
            for (int k = 0; k < d; ++k) {
                grads->shared[row + k] +=
                    g * cache.patch[static_cast<std::size_t>(k)];
            }
            grads->shared[lay.b1 + i] += g;
        }
    }

    if (cfg.reg_coeff != 0.0) {
        const auto add_reg = [&](std::vector<double>& dst,
                                 const std::vector<double>& params) {
            for (std::size_t i = 0; i < dst.size(); ++i) {
                dst[i] += cfg.reg_coeff * 2.0 * params[i];
            }
        };
        add_reg(grads->shared, m.shared_params);
        add_reg(grads->polyp, m.polyp_params);
        add_reg(grads->artifact, m.artifact_params);
        add_reg(grads->reg, m.reg_params);
    }
    return loss;
}

TrainResult train(ToyModel m, const std::vector<SyntheticScene>& data,
                  const TrainConfig& cfg) {
    validate(cfg.loss);
    if (data.empty()) throw ConfigError("training data is empty");
    if (cfg.steps < 1) throw ConfigError("steps must be >= 1");
    if (cfg.batch_size < 1) throw ConfigError("batch size must be >= 1");
    if (!(cfg.learning_rate >= 0.0)) {
        throw ConfigError("learning rate must be >= 0");
    }
    if (cfg.mode != m.arch.mode) {
        throw ConfigError("train config mode does not match the model");
    }
    for (const SyntheticScene& s : data) check_scene(m.arch, s);

    TrainResult result;
    result.trace.reserve(static_cast<std::size_t>(cfg.steps));
    const std::size_t n = data.size();

    Gradients batch_grads = Gradients::zeros(m.arch);
    Gradients scene_grads;
    for (int step = 0; step < cfg.steps; ++step) {
        batch_grads = Gradients::zeros(m.arch);
        double batch_loss = 0.0;
        for (int k = 0; k < cfg.batch_size; ++k) {
            const std::size_t idx =
                (static_cast<std::size_t>(step) * cfg.batch_size + k) % n;
            const SceneLossBreakdown loss =
                scene_loss(m, data[idx], cfg.loss, &scene_grads);
            batch_loss += loss.composite;
            batch_grads.accumulate(scene_grads);
        }
        batch_loss /= cfg.batch_size;
        if (!std::isfinite(batch_loss)) {
            throw DivergenceError("composite loss became non-finite at step " +
                                  std::to_string(step));
        }
        result.trace.push_back(batch_loss);
        batch_grads.scale(cfg.learning_rate / cfg.batch_size);
        const auto apply = [](std::vector<double>& params,
                              const std::vector<double>& g) {
            for (std::size_t i = 0; i < params.size(); ++i) params[i] -= g[i];
        };
        apply(m.shared_params, batch_grads.shared);
        apply(m.polyp_params, batch_grads.polyp);
        apply(m.artifact_params, batch_grads.artifact);
        apply(m.reg_params, batch_grads.reg);
    }
    result.model = std::move(m);
    return result;
}

namespace {

std::size_t total_params(const ToyModel& m) { return m.parameter_count(); }

double& param_at(ToyModel& m, std::size_t idx) {
    if (idx < m.shared_params.size()) return m.shared_params[idx];
    idx -= m.shared_params.size();
    if (idx < m.polyp_params.size()) return m.polyp_params[idx];
    idx -= m.polyp_params.size();
    if (idx < m.artifact_params.size()) return m.artifact_params[idx];
    idx -= m.artifact_params.size();
    return m.reg_params[idx];
}

double grad_at(const Gradients& g, std::size_t idx) {
    if (idx < g.shared.size()) return g.shared[idx];
    idx -= g.shared.size();
    if (idx < g.polyp.size()) return g.polyp[idx];
    idx -= g.polyp.size();
    if (idx < g.artifact.size()) return g.artifact[idx];
    idx -= g.artifact.size();
    return g.reg[idx];
}

}  // namespace

GradCheckReport grad_check_against(const ToyModel& m,
                                   const SyntheticScene& scene,
                                   const LossConfig& cfg,
                                   const Gradients& analytic,
                                   std::size_t sample_coords,
                                   std::uint64_t seed, double step,
                                   double tolerance) {
    const std::size_t total = total_params(m);
    std::vector<std::size_t> coords;
    if (sample_coords >= total) {
        coords.resize(total);
        for (std::size_t i = 0; i < total; ++i) coords[i] = i;
    } else {
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<std::size_t> pick(0, total - 1);
        std::unordered_set<std::size_t> seen;
        while (seen.size() < sample_coords) seen.insert(pick(rng));
        coords.assign(seen.begin(), seen.end());
        std::sort(coords.begin(), coords.end());
    }

    ToyModel probe = m;
    GradCheckReport report;
    report.coords_checked = coords.size();
    for (std::size_t idx : coords) {
        double& p = param_at(probe, idx);
        const double saved = p;
        p = saved + step;
        const double up = scene_loss(probe, scene, cfg).composite;
        p = saved - step;
        const double down = scene_loss(probe, scene, cfg).composite;
        p = saved;
        const double numeric = (up - down) / (2.0 * step);
        const double a = grad_at(analytic, idx);
        const double scale = std::max({std::abs(a), std::abs(numeric), 1e-5});
        report.max_rel_error =
            std::max(report.max_rel_error, std::abs(a - numeric) / scale);
    }
    report.pass = report.max_rel_error < tolerance;
    return report;
}

GradCheckReport grad_check(const ToyModel& m, const SyntheticScene& scene,
                           const LossConfig& cfg, std::size_t sample_coords,
                           std::uint64_t seed, double step, double tolerance) {
    Gradients analytic;
    scene_loss(m, scene, cfg, &analytic);
    return grad_check_against(m, scene, cfg, analytic, sample_coords, seed,
                              step, tolerance);
}

std::vector<Detection> predict_boxes(const ToyModel& m,
                                     const SyntheticScene& scene,
                                     double score_threshold, double nms_iou) {
    const ForwardResult fwd = forward(m, scene);
    const ToyArchitecture& arch = m.arch;
    const std::vector<Box> anchors = anchor_boxes(arch);
    const int Cc = arch.cls_channels();
    const int Ca = arch.art_channels();

    struct Candidate {
        Box box;
        double score;
    };
    // Slot 0 is the polyp class; slots 1..6 the artifact classes by code.
    std::array<std::vector<Candidate>, 7> per_class;

    const auto add = [&](int slot, std::size_t anchor, double score) {
        if (score < score_threshold) return;
        const std::span<const double, 4> off(
            fwd.offsets.data() + anchor * 4, 4);
        per_class[static_cast<std::size_t>(slot)].push_back(
            {decode_box(anchors[anchor], off), score});
    };

    for (std::size_t anchor = 0;
         anchor < static_cast<std::size_t>(arch.anchor_count()); ++anchor) {
        for (int c = 0; c < Cc; ++c) {
            const int slot = arch.mode == HeadMode::TwoHead ? 0 : c;
            add(slot, anchor, fwd.cls_prob[anchor * Cc + c]);
        }
        for (int c = 0; c < Ca; ++c) {
            add(1 + c, anchor, fwd.art_prob[anchor * Ca + c]);
        }
    }

    std::vector<Detection> detections;
    for (std::size_t slot = 0; slot < per_class.size(); ++slot) {
        auto& cands = per_class[slot];
        std::stable_sort(cands.begin(), cands.end(),
                         [](const Candidate& a, const Candidate& b) {
                             return a.score > b.score;
                         });
        std::vector<Candidate> kept;
        for (const Candidate& c : cands) {
            const bool suppressed = std::any_of(
                kept.begin(), kept.end(), [&](const Candidate& k) {
                    return iou(k.box, c.box) > nms_iou;
                });
            if (!suppressed) kept.push_back(c);
        }
        for (const Candidate& c : kept) {
            if (slot == 0) {
                detections.emplace_back(c.box, c.score);
            } else {
                detections.emplace_back(
                    c.box, c.score,
                    artifact_class_from_code(static_cast<int>(slot) - 1));
            }
        }
    }
    return detections;
}

void save_checkpoint(const ToyModel& m, const std::filesystem::path& path) {
    json root;
    root["format"] = kCheckpointFormatVersion;
    json arch;
    arch["grid_h"] = m.arch.grid_h;
    arch["grid_w"] = m.arch.grid_w;
    arch["stride"] = m.arch.stride;
    arch["patch"] = m.arch.patch;
    arch["hidden1"] = m.arch.hidden1;
    arch["hidden2"] = m.arch.hidden2;
    arch["anchor_sizes"] = m.arch.anchor_sizes;
    arch["mode"] = m.arch.mode == HeadMode::TwoHead ? "two_head"
                                                    : "flat_multiclass";
    arch["regress_both_tasks"] = m.arch.regress_both_tasks;
    root["arch"] = std::move(arch);
    json params;
    params["shared"] = m.shared_params;
    params["polyp"] = m.polyp_params;
    params["artifact"] = m.artifact_params;
    params["reg"] = m.reg_params;
    root["params"] = std::move(params);

    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open '" + path.string() + "' for writing");
    }
    out << root.dump(2) << "\n";
    if (!out) throw IoError("write failure on '" + path.string() + "'");
}

ToyModel load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "' for reading");
    }
    json root;
    try {
        in >> root;
    } catch (const json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    if (!root.contains("format") ||
        root["format"].get<int>() != kCheckpointFormatVersion) {
        throw ParseError(path.string() + ": unsupported checkpoint format");
    }
    const json& arch_j = root.at("arch");
    ToyArchitecture arch;
    arch.grid_h = arch_j.at("grid_h").get<int>();
    arch.grid_w = arch_j.at("grid_w").get<int>();
    arch.stride = arch_j.at("stride").get<int>();
    arch.patch = arch_j.at("patch").get<int>();
    arch.hidden1 = arch_j.at("hidden1").get<int>();
    arch.hidden2 = arch_j.at("hidden2").get<int>();
    arch.anchor_sizes = arch_j.at("anchor_sizes").get<std::vector<double>>();
    const std::string mode = arch_j.at("mode").get<std::string>();
    if (mode == "two_head") {
        arch.mode = HeadMode::TwoHead;
    } else if (mode == "flat_multiclass") {
        arch.mode = HeadMode::FlatMultiClass;
    } else {
        throw ParseError(path.string() + ": unknown head mode '" + mode + "'");
    }
    arch.regress_both_tasks = arch_j.at("regress_both_tasks").get<bool>();
    validate(arch);

    ToyModel m;
    m.arch = arch;
    const json& params = root.at("params");
    m.shared_params = params.at("shared").get<std::vector<double>>();
    m.polyp_params = params.at("polyp").get<std::vector<double>>();
    m.artifact_params = params.at("artifact").get<std::vector<double>>();
    m.reg_params = params.at("reg").get<std::vector<double>>();
    if (m.shared_params.size() != arch.shared_size() ||
        m.polyp_params.size() != arch.polyp_size() ||
        m.artifact_params.size() != arch.artifact_size() ||
        m.reg_params.size() != arch.reg_size()) {
        throw ShapeError(path.string() +
                         ": parameter block sizes do not match the "
                         "architecture");
    }
    return m;
}

}  // namespace polyart
