#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "polyart/dataset.hpp"
#include "polyart/loss.hpp"

namespace polyart {

/// Knobs for synthetic scene generation. Primitive sizes are fixed
/// per class (scaled by size_scale); placement knobs control how often
/// artifacts land inside or straddling a polyp box.
struct SceneConfig {
    int width = 64;
    int height = 64;
    int polyp_count = 1;
    std::map<ArtifactClass, int> artifact_counts;
    double inside_polyp_rate = 0.0;   // P(artifact box placed inside a polyp)
    double overlap_polyp_rate = 0.0;  // P(artifact box straddles a polyp edge)
    double size_scale = 1.0;
    double noise_level = 0.05;
};

void validate(const SceneConfig& cfg);

/// A single-channel synthetic frame with ground-truth boxes. Polyps are
/// filled domes; artifacts are per-class primitives (rings for bubbles,
/// small bright squares for specularity, smoothed patches for blur,
/// clipped patches for saturation, low-variance patches for contrast,
/// flat rectangles for misc). Every box lies within the grid.
struct SyntheticScene {
    int width = 0;
    int height = 0;
    std::vector<double> grid;  // row-major, height x width
    std::vector<Box> gt_polyps;
    std::vector<LabeledBox> gt_artifacts;  // cls = artifact class code 0-5
    std::uint64_t seed = 0;

    double at(int x, int y) const { return grid[static_cast<std::size_t>(y) * width + x]; }
    double& at(int x, int y) { return grid[static_cast<std::size_t>(y) * width + x]; }
};

/// Deterministic for a given (seed, cfg) pair.
SyntheticScene generate_scene(std::uint64_t seed, const SceneConfig& cfg = {});

/// Generates `count` scenes from consecutive seeds starting at `seed`.
std::vector<SyntheticScene> generate_scenes(std::uint64_t seed, int count,
                                            const SceneConfig& cfg = {});

/// Exports scene ground truth to the annotation data model (artifact
/// boxes become score-1 detections). Grid pixels are not exported.
Dataset scenes_to_dataset(std::span<const SyntheticScene> scenes,
                          std::string name, bool include_artifacts = true);

}  // namespace polyart
