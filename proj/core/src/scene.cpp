#include "polyart/scene.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

namespace polyart {

namespace {

/// Half-extent range of each primitive, in pixels before size_scale.
struct SizeRange {
    double lo;
    double hi;
};

SizeRange primitive_half_extent(ArtifactClass cls) {
    switch (cls) {
        case ArtifactClass::Blur: return {10.0, 16.0};
        case ArtifactClass::Bubbles: return {3.0, 7.0};
        case ArtifactClass::Contrast: return {5.0, 10.0};
        case ArtifactClass::Specularity: return {1.5, 2.5};
        case ArtifactClass::Saturation: return {4.0, 9.0};
        case ArtifactClass::Misc: return {2.0, 6.0};
        case ArtifactClass::Instrument: break;
    }
    throw ConfigError("instrument primitives are not generated");
}

constexpr SizeRange kPolypRadius{6.0, 11.0};

struct Rect {
    double cx, cy, half_w, half_h;
    Box box() const {
        return Box(cx - half_w, cy - half_h, cx + half_w, cy + half_h);
    }
};

void draw_polyp(SyntheticScene& s, const Rect& r) {
    const int x0 = std::max(0, static_cast<int>(std::floor(r.cx - r.half_w)));
    const int x1 = std::min(s.width - 1,
                            static_cast<int>(std::ceil(r.cx + r.half_w)));
    const int y0 = std::max(0, static_cast<int>(std::floor(r.cy - r.half_h)));
    const int y1 = std::min(s.height - 1,
                            static_cast<int>(std::ceil(r.cy + r.half_h)));
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            const double d = std::hypot(x + 0.5 - r.cx, y + 0.5 - r.cy);
            if (d <= r.half_w) {
                const double t = d / r.half_w;
                s.at(x, y) = 0.55 + 0.35 * (1.0 - t * t);
            }
        }
    }
}

void draw_ring(SyntheticScene& s, const Rect& r) {
    const double outer = r.half_w;
    const double inner = 0.55 * outer;
    const int x0 = std::max(0, static_cast<int>(std::floor(r.cx - outer)));
    const int x1 =
        std::min(s.width - 1, static_cast<int>(std::ceil(r.cx + outer)));
    const int y0 = std::max(0, static_cast<int>(std::floor(r.cy - outer)));
    const int y1 =
        std::min(s.height - 1, static_cast<int>(std::ceil(r.cy + outer)));
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            const double d = std::hypot(x + 0.5 - r.cx, y + 0.5 - r.cy);
            if (d >= inner && d <= outer) s.at(x, y) = 0.75;
        }
    }
}

void fill_rect(SyntheticScene& s, const Rect& r, double value) {
    const int x0 = std::max(0, static_cast<int>(std::floor(r.cx - r.half_w)));
    const int x1 = std::min(s.width - 1,
                            static_cast<int>(std::ceil(r.cx + r.half_w)) - 1);
    const int y0 = std::max(0, static_cast<int>(std::floor(r.cy - r.half_h)));
    const int y1 = std::min(s.height - 1,
                            static_cast<int>(std::ceil(r.cy + r.half_h)) - 1);
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) s.at(x, y) = value;
    }
}

void squash_rect(SyntheticScene& s, const Rect& r, double factor) {
    const int x0 = std::max(0, static_cast<int>(std::floor(r.cx - r.half_w)));
    const int x1 = std::min(s.width - 1,
                            static_cast<int>(std::ceil(r.cx + r.half_w)) - 1);
    const int y0 = std::max(0, static_cast<int>(std::floor(r.cy - r.half_h)));
    const int y1 = std::min(s.height - 1,
                            static_cast<int>(std::ceil(r.cy + r.half_h)) - 1);
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            s.at(x, y) = 0.5 + (s.at(x, y) - 0.5) * factor;
        }
    }
}

void smooth_rect(SyntheticScene& s, const Rect& r, int passes) {
    const int x0 = std::max(1, static_cast<int>(std::floor(r.cx - r.half_w)));
    const int x1 = std::min(s.width - 2,
                            static_cast<int>(std::ceil(r.cx + r.half_w)) - 1);
    const int y0 = std::max(1, static_cast<int>(std::floor(r.cy - r.half_h)));
    const int y1 = std::min(s.height - 2,
                            static_cast<int>(std::ceil(r.cy + r.half_h)) - 1);
    for (int pass = 0; pass < passes; ++pass) {
        std::vector<double> copy = s.grid;
        for (int y = y0; y <= y1; ++y) {
            for (int x = x0; x <= x1; ++x) {
                double sum = 0.0;
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        sum += copy[static_cast<std::size_t>(y + dy) * s.width +
                                    (x + dx)];
                    }
                }
                s.at(x, y) = sum / 9.0;
            }
        }
    }
}

void draw_artifact(SyntheticScene& s, ArtifactClass cls, const Rect& r,
                   std::mt19937_64& rng) {
    switch (cls) {
        case ArtifactClass::Blur:
            smooth_rect(s, r, 3);
            break;
        case ArtifactClass::Bubbles:
            draw_ring(s, r);
            break;
        case ArtifactClass::Contrast:
            squash_rect(s, r, 0.2);
            break;
        case ArtifactClass::Specularity:
            fill_rect(s, r, 1.0);
            break;
        case ArtifactClass::Saturation:
            fill_rect(s, r, 1.0);
            break;
        case ArtifactClass::Misc: {
            std::uniform_real_distribution<double> level(0.3, 0.7);
            fill_rect(s, r, level(rng));
            break;
        }
        case ArtifactClass::Instrument:
            break;
    }
}

}  // namespace

void validate(const SceneConfig& cfg) {
    if (cfg.width < 16 || cfg.height < 16) {
        throw ConfigError("scene grid must be at least 16x16");
    }
    if (cfg.polyp_count < 0) throw ConfigError("negative polyp count");
    if (!(cfg.size_scale > 0.0)) throw ConfigError("size_scale must be > 0");
    if (!(cfg.noise_level >= 0.0 && cfg.noise_level <= 1.0)) {
        throw ConfigError("noise_level must lie in [0,1]");
    }
    if (cfg.inside_polyp_rate < 0.0 || cfg.overlap_polyp_rate < 0.0 ||
        cfg.inside_polyp_rate + cfg.overlap_polyp_rate > 1.0) {
        throw ConfigError("placement rates must be nonnegative and sum to "
                          "at most 1");
    }
    const double half_limit = 0.5 * std::min(cfg.width, cfg.height) - 1.0;
    if (cfg.polyp_count > 0 && kPolypRadius.hi * cfg.size_scale > half_limit) {
        throw ConfigError("polyp primitive larger than grid");
    }
    bool any_artifacts = false;
    for (const auto& [cls, count] : cfg.artifact_counts) {
        if (count < 0) throw ConfigError("negative artifact count");
        if (count == 0) continue;
        any_artifacts = true;
        if (cls == ArtifactClass::Instrument) {
            throw ConfigError("instrument primitives are not generated");
        }
        if (primitive_half_extent(cls).hi * cfg.size_scale > half_limit) {
            throw ConfigError("artifact primitive larger than grid: " +
                              std::string(to_string(cls)));
        }
    }
    if ((cfg.inside_polyp_rate > 0.0 || cfg.overlap_polyp_rate > 0.0) &&
        any_artifacts && cfg.polyp_count == 0) {
        throw ConfigError("polyp-relative placement requires polyps");
    }
    if (cfg.inside_polyp_rate > 0.0 && any_artifacts &&
        kPolypRadius.lo * cfg.size_scale <= 0.75) {
        throw ConfigError("polyps too small to contain artifacts");
    }
}

SyntheticScene generate_scene(std::uint64_t seed, const SceneConfig& cfg) {
    validate(cfg);
    SyntheticScene s;
    s.width = cfg.width;
    s.height = cfg.height;
    s.seed = seed;
    s.grid.assign(static_cast<std::size_t>(cfg.width) * cfg.height, 0.0);

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> noise(0.0, 1.0);
    for (double& v : s.grid) v = cfg.noise_level * noise(rng);

    std::uniform_real_distribution<double> unit(0.0, 1.0);

    for (int i = 0; i < cfg.polyp_count; ++i) {
        std::uniform_real_distribution<double> rad(
            kPolypRadius.lo * cfg.size_scale, kPolypRadius.hi * cfg.size_scale);
        const double r = rad(rng);
        std::uniform_real_distribution<double> px(r + 0.5, cfg.width - r - 0.5);
        std::uniform_real_distribution<double> py(r + 0.5,
                                                  cfg.height - r - 0.5);
        const Rect rect{px(rng), py(rng), r, r};
        draw_polyp(s, rect);
        s.gt_polyps.push_back(rect.box());
    }

    for (ArtifactClass cls : kAnalysisClasses) {
        const auto it = cfg.artifact_counts.find(cls);
        if (it == cfg.artifact_counts.end()) continue;
        for (int i = 0; i < it->second; ++i) {
            const SizeRange range = primitive_half_extent(cls);
            std::uniform_real_distribution<double> size(
                range.lo * cfg.size_scale, range.hi * cfg.size_scale);
            double half = size(rng);

            Rect rect{0, 0, half, half};
            const double u = unit(rng);
            if (u < cfg.inside_polyp_rate && !s.gt_polyps.empty()) {
                // Fully inside a polyp box, shrinking to fit if needed.
                std::uniform_int_distribution<std::size_t> pick(
                    0, s.gt_polyps.size() - 1);
                const Box& host = s.gt_polyps[pick(rng)];
                const double fit =
                    0.5 * std::min(host.width(), host.height()) - 0.5;
                half = std::min(half, fit);
                rect.half_w = rect.half_h = half;
                std::uniform_real_distribution<double> cx(host.x_min + half,
                                                          host.x_max - half);
                std::uniform_real_distribution<double> cy(host.y_min + half,
                                                          host.y_max - half);
                rect.cx = cx(rng);
                rect.cy = cy(rng);
            } else if (u < cfg.inside_polyp_rate + cfg.overlap_polyp_rate &&
                       !s.gt_polyps.empty()) {
                // Centered on a polyp edge so the boxes straddle.
                std::uniform_int_distribution<std::size_t> pick(
                    0, s.gt_polyps.size() - 1);
                const Box& host = s.gt_polyps[pick(rng)];
                std::uniform_int_distribution<int> side(0, 1);
                const double edge_x = side(rng) ? host.x_min : host.x_max;
                std::uniform_real_distribution<double> cy(host.y_min,
                                                          host.y_max);
                rect.cx = std::clamp(edge_x, half + 0.5,
                                     cfg.width - half - 0.5);
                rect.cy = std::clamp(cy(rng), half + 0.5,
                                     cfg.height - half - 0.5);
            } else {
                std::uniform_real_distribution<double> cx(
                    half + 0.5, cfg.width - half - 0.5);
                std::uniform_real_distribution<double> cy(
                    half + 0.5, cfg.height - half - 0.5);
                rect.cx = cx(rng);
                rect.cy = cy(rng);
            }
            draw_artifact(s, cls, rect, rng);
            s.gt_artifacts.push_back(
                {rect.box(), static_cast<int>(cls)});
        }
    }

    for (double& v : s.grid) v = std::clamp(v, 0.0, 1.0);
    return s;
}

std::vector<SyntheticScene> generate_scenes(std::uint64_t seed, int count,
                                            const SceneConfig& cfg) {
    std::vector<SyntheticScene> out;
    out.reserve(static_cast<std::size_t>(std::max(0, count)));
    for (int i = 0; i < count; ++i) {
        out.push_back(generate_scene(seed + static_cast<std::uint64_t>(i), cfg));
    }
    return out;
}

Dataset scenes_to_dataset(std::span<const SyntheticScene> scenes,
                          std::string name, bool include_artifacts) {
    Dataset d;
    d.name = std::move(name);
    d.frames.reserve(scenes.size());
    for (std::size_t i = 0; i < scenes.size(); ++i) {
        const SyntheticScene& s = scenes[i];
        FrameRecord f;
        char id[32];
        std::snprintf(id, sizeof(id), "scene-%05zu", i);
        f.frame_id = id;
        f.image = ImageSize(s.width, s.height);
        f.gt_polyps = s.gt_polyps;
        if (include_artifacts) {
            for (const LabeledBox& a : s.gt_artifacts) {
                f.artifacts.emplace_back(
                    a.box, 1.0, artifact_class_from_code(a.cls));
            }
        }
        d.frames.push_back(std::move(f));
    }
    return d;
}

}  // namespace polyart
