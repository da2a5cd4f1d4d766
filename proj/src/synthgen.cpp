#include "dado/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dado/map_store.hpp"

namespace dado::synth {

int Lcg64::uniform_int(int lo, int hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<int>((next() >> 11) % span);
}

double Lcg64::normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

namespace {

bool inside(const SceneObject& obj, int x, int y) {
    const Box& b = obj.box;
    if (x < b.xmin || x >= b.xmax || y < b.ymin || y >= b.ymax) return false;
    if (obj.shape == Shape::rect) return true;
    const double cx = (b.xmin + b.xmax) / 2.0;
    const double cy = (b.ymin + b.ymax) / 2.0;
    const double dx = (x + 0.5 - cx) / (b.width() / 2.0);
    const double dy = (y + 0.5 - cy) / (b.height() / 2.0);
    return dx * dx + dy * dy <= 1.0;
}

double object_depth(const SceneObject& obj, int y) {
    const double t = (y - obj.box.ymin + 0.5) / obj.box.height();
    switch (obj.profile) {
        case Profile::flat: return obj.depth_plane;
        case Profile::ramp: return obj.depth_plane + obj.relief * t;
        case Profile::ridge: return obj.depth_plane + obj.relief * std::sin(std::numbers::pi * t);
    }
    return obj.depth_plane;
}

void validate(const SceneSpec& spec) {
    if (spec.width < 1 || spec.height < 1) throw ContractError("scene dimensions must be positive");
    if (spec.heads < 1) throw ContractError("scene needs at least one attention head");
    const double min_gap = 2.0 / spec.bins;
    std::vector<double> planes{spec.background_depth};
    for (const auto& obj : spec.objects) {
        const Box& b = obj.box;
        if (!b.valid() || b.xmin < 0 || b.ymin < 0 || b.xmax > spec.width || b.ymax > spec.height) {
            throw ContractError("object box outside the image");
        }
        planes.push_back(obj.depth_plane);
    }
    for (double p : planes) {
        if (p < 0.0 || p > 1.0) throw ContractError("depth planes must lie in [0,1]");
    }
    for (std::size_t i = 0; i < planes.size(); ++i) {
        for (std::size_t j = i + 1; j < planes.size(); ++j) {
            const double gap = std::fabs(planes[i] - planes[j]);
            if (gap > 0.0 && gap < min_gap) {
                throw ContractError("depth planes " + std::to_string(planes[i]) + " and " +
                                    std::to_string(planes[j]) + " are closer than 2/bins");
            }
        }
    }
}

}  // namespace

Scene generate_scene(const SceneSpec& spec, const std::string& stem) {
    validate(spec);
    Scene scene;
    const int w = spec.width;
    const int h = spec.height;

    for (std::size_t i = 0; i < spec.objects.size(); ++i) {
        for (std::size_t j = i + 1; j < spec.objects.size(); ++j) {
            const auto& a = spec.objects[i];
            const auto& b = spec.objects[j];
            if (a.depth_plane == b.depth_plane && iou(a.box, b.box) > 0.0) {
                scene.warnings.push_back(stem + ": objects " + std::to_string(i) + " and " +
                                         std::to_string(j) + " overlap on the same depth plane");
            }
        }
    }

    scene.depth = Raster(w, h, static_cast<float>(spec.background_depth));
    for (const auto& obj : spec.objects) {
        for (int y = obj.box.ymin; y < obj.box.ymax; ++y) {
            const auto d = static_cast<float>(object_depth(obj, y));
            for (int x = obj.box.xmin; x < obj.box.xmax; ++x) {
                if (inside(obj, x, y)) scene.depth.at(x, y) = d;
            }
        }
    }
    if (spec.noise_sigma > 0.0) {
        Lcg64 rng(spec.seed);
        for (float& v : scene.depth.values()) {
            v = static_cast<float>(std::clamp(v + spec.noise_sigma * rng.normal(), 0.0, 1.0));
        }
    }
    for (float& v : scene.depth.values()) v = std::clamp(v, 0.0f, 1.0f);

    // one Gaussian blob per object, dealt round-robin across heads
    scene.heads.assign(static_cast<std::size_t>(spec.heads), Raster(w, h, 0.0f));
    for (std::size_t i = 0; i < spec.objects.size(); ++i) {
        const auto& obj = spec.objects[i];
        Raster& head = scene.heads[i % scene.heads.size()];
        const double cx = (obj.box.xmin + obj.box.xmax) / 2.0;
        const double cy = (obj.box.ymin + obj.box.ymax) / 2.0;
        const double sx = obj.box.width() / 2.0;
        const double sy = obj.box.height() / 2.0;
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                const double dx = (x + 0.5 - cx) / sx;
                const double dy = (y + 0.5 - cy) / sy;
                const double v = obj.attention_gain * std::exp(-0.5 * (dx * dx + dy * dy));
                head.at(x, y) = std::max(head.at(x, y), static_cast<float>(v));
            }
        }
    }
    Lcg64 att_rng(spec.seed ^ 0x9E3779B97F4A7C15ULL);
    for (Raster& head : scene.heads) {
        for (float& v : head.values()) v += static_cast<float>(spec.attention_noise * att_rng.uniform());
    }

    scene.truth.stem = stem;
    scene.truth.image_width = w;
    scene.truth.image_height = h;
    for (const auto& obj : spec.objects) scene.truth.objects.push_back({obj.box, obj.label, false});
    return scene;
}

SuiteKind parse_suite_kind(std::string_view name) {
    if (name == "standard") return SuiteKind::standard;
    if (name == "deep") return SuiteKind::deep;
    throw ContractError("unknown suite kind '" + std::string(name) + "'");
}

std::string scene_stem(int index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "scene_%04d", index);
    return buf;
}

namespace {

// Raw nearness values. Background is the farthest and 0.9 the nearest plane,
// so normalization maps them to 0 and 1 in every noise-free scene.
constexpr double kBackground = 0.1;
constexpr double kPlanes[] = {0.54, 0.7, 0.9};

SceneObject make_object(Shape shape, Box box, double plane, std::string label) {
    SceneObject obj;
    obj.shape = shape;
    obj.box = box;
    obj.depth_plane = plane;
    obj.label = std::move(label);
    return obj;
}

Box at(int x, int y, int w, int h) { return Box{x, y, x + w, y + h}; }

// Every depth plane carries at least ~30% of the pixels so its histogram peak
// clears the prominence bar after smoothing, with or without depth noise.
SceneSpec standard_scene(Lcg64& rng, int index) {
    SceneSpec spec;
    spec.width = 160;
    spec.height = 120;
    spec.background_depth = kBackground;
    const int kind = index % 4 == 0 ? 3 : rng.uniform_int(0, 2);
    const double plane = kPlanes[rng.uniform_int(0, 2)];
    switch (kind) {
        case 0: {  // one isolated object
            const bool round = rng.uniform_int(0, 1) == 1;
            const int w = round ? rng.uniform_int(92, 100) : rng.uniform_int(80, 90);
            const int h = round ? rng.uniform_int(80, 88) : rng.uniform_int(72, 80);
            const int x = rng.uniform_int(0, spec.width - w);
            const int y = rng.uniform_int(0, spec.height - h);
            spec.objects.push_back(make_object(round ? Shape::ellipse : Shape::rect, at(x, y, w, h), plane, "blob"));
            break;
        }
        case 1: {  // two isolated objects sharing a plane
            const int w = rng.uniform_int(64, 70);
            const int h = rng.uniform_int(46, 52);
            const int gap = rng.uniform_int(8, spec.width - 2 * w);
            const int x0 = rng.uniform_int(0, spec.width - 2 * w - gap);
            spec.objects.push_back(make_object(Shape::rect, at(x0, rng.uniform_int(0, spec.height - h), w, h), plane, "left"));
            spec.objects.push_back(make_object(Shape::rect, at(x0 + w + gap, rng.uniform_int(0, spec.height - h), w, h), plane, "right"));
            break;
        }
        case 2: {  // two isolated objects on different planes
            const int w = 76;
            const int h = rng.uniform_int(76, 82);
            const int first = rng.uniform_int(0, 2);
            const int second = (first + rng.uniform_int(1, 2)) % 3;
            spec.objects.push_back(make_object(Shape::rect, at(0, rng.uniform_int(0, spec.height - h), w, h), kPlanes[first], "left"));
            spec.objects.push_back(make_object(Shape::rect, at(84, rng.uniform_int(0, spec.height - h), w, h), kPlanes[second], "right"));
            break;
        }
        default: {  // occlusion: a near object covers one corner of a far one
            const int dx = rng.uniform_int(0, 4);
            const int dy = rng.uniform_int(0, 4);
            spec.objects.push_back(make_object(Shape::rect, at(dx, dy, 88, 80), kPlanes[0], "far"));
            spec.objects.push_back(make_object(Shape::rect, at(56 + dx, 40 + dy, 76, 76), kPlanes[2], "near"));
            break;
        }
    }
    return spec;
}

// Two planar anchors at normalized nearness 0.55 and 1.0 and, between them, a
// ridge whose depth runs from 0.65 at its ends to ~0.81 at mid-height. The
// valley between the anchors falls near 0.77, so without overlap the ridge is
// cut into a middle band and two end caps, none of which covers half its box.
SceneSpec deep_scene(Lcg64& rng) {
    SceneSpec spec;
    spec.width = 200;
    spec.height = 150;
    spec.background_depth = kBackground;
    const auto raw = [](double normalized) { return kBackground + normalized * (0.9 - kBackground); };
    const int jitter_x = rng.uniform_int(-2, 2);
    const int ridge_h = rng.uniform_int(96, 104);
    const int ridge_y = rng.uniform_int(20, spec.height - ridge_h - 20);
    spec.objects.push_back(make_object(Shape::rect, at(2, 35 + rng.uniform_int(-4, 4), 80, 84), raw(0.55), "anchor_far"));
    spec.objects.push_back(make_object(Shape::rect, at(118, 35 + rng.uniform_int(-4, 4), 80, 84), raw(1.0), "anchor_near"));
    SceneObject ridge = make_object(Shape::rect, at(90 + jitter_x, ridge_y, 20, ridge_h), raw(0.65), "deep");
    ridge.profile = Profile::ridge;
    ridge.relief = raw(0.814) - raw(0.65);
    spec.objects.push_back(ridge);
    return spec;
}

}  // namespace

std::vector<SceneSpec> suite_specs(int n_scenes, std::uint64_t seed, const SuiteOptions& options) {
    if (n_scenes < 0) throw ContractError("scene count must be >= 0");
    Lcg64 rng(seed);
    std::vector<SceneSpec> specs;
    for (int i = 0; i < n_scenes; ++i) {
        SceneSpec spec = options.kind == SuiteKind::standard ? standard_scene(rng, i) : deep_scene(rng);
        spec.seed = rng.next();
        spec.noise_sigma = options.noise_sigma;
        specs.push_back(std::move(spec));
    }
    return specs;
}

SuiteManifest generate_suite(int n_scenes, std::uint64_t seed, const std::filesystem::path& out_dir,
                             const SuiteOptions& options) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create directory", out_dir.string());

    SuiteManifest manifest;
    const auto specs = suite_specs(n_scenes, seed, options);
    for (std::size_t i = 0; i < specs.size(); ++i) {
        const std::string stem = scene_stem(static_cast<int>(i));
        const Scene scene = generate_scene(specs[i], stem);
        store::write_pfm(scene.depth, out_dir / (stem + ".depth.pfm"));
        for (std::size_t k = 0; k < scene.heads.size(); ++k) {
            store::write_pfm(scene.heads[k], out_dir / (stem + ".att.h" + std::to_string(k) + ".pfm"));
        }
        store::write_file(out_dir / (stem + ".ann.xml"), store::serialize_voc_xml(scene.truth));
        manifest.stems.push_back(stem);
        manifest.warnings.insert(manifest.warnings.end(), scene.warnings.begin(), scene.warnings.end());
    }
    return manifest;
}

}  // namespace dado::synth
