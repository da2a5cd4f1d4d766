#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "dado/raster.hpp"

namespace dado::synth {

/// 64-bit linear congruential generator (Knuth's MMIX constants). Output is
/// the state after each step; uniforms take its top 53 bits.
class Lcg64 {
public:
    explicit Lcg64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ = state_ * 6364136223846793005ULL + 1442695040888963407ULL;
        return state_;
    }
    /// [0, 1)
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    /// Integer in [lo, hi].
    int uniform_int(int lo, int hi);
    /// Box-Muller, one variate per call (the sine branch is discarded).
    double normal();

private:
    std::uint64_t state_;
};

enum class Shape { rect, ellipse };

/// How depth varies inside an object's shape.
enum class Profile {
    flat,   // depth_plane everywhere
    ramp,   // depth_plane at the top row, depth_plane + relief at the bottom row
    ridge,  // depth_plane at top and bottom rows, depth_plane + relief at mid-height
};

struct SceneObject {
    Shape shape = Shape::rect;
    Box box;
    double depth_plane = 0.5;
    double attention_gain = 1.0;
    Profile profile = Profile::flat;
    double relief = 0.0;
    std::string label = "object";
};

struct SceneSpec {
    std::uint64_t seed = 0;
    int width = 160;
    int height = 120;
    std::vector<SceneObject> objects;  // drawn in order; later objects occlude earlier ones
    double background_depth = 0.1;
    double noise_sigma = 0.0;
    int heads = 6;
    double attention_noise = 0.03;  // amplitude of uniform attention noise
    int bins = 64;                  // planes must differ by 0 or >= 2/bins
};

struct Scene {
    Raster depth;
    std::vector<Raster> heads;
    GroundTruth truth;
    std::vector<std::string> warnings;
};

/// Throws ContractError for out-of-bounds objects or planes closer than 2/bins.
Scene generate_scene(const SceneSpec& spec, const std::string& stem = "scene");

enum class SuiteKind {
    standard,  // isolated, same-plane pairs, depth-separated pairs, occlusion pairs
    deep,      // a tall ridge-shaped object spanning the gap between two planar anchors
};

SuiteKind parse_suite_kind(std::string_view name);

struct SuiteOptions {
    SuiteKind kind = SuiteKind::standard;
    double noise_sigma = 0.0;
};

std::vector<SceneSpec> suite_specs(int n_scenes, std::uint64_t seed, const SuiteOptions& options = {});

struct SuiteManifest {
    std::vector<std::string> stems;
    std::vector<std::string> warnings;
};

/// Writes <stem>.depth.pfm, <stem>.att.h<k>.pfm and <stem>.ann.xml per scene.
SuiteManifest generate_suite(int n_scenes, std::uint64_t seed, const std::filesystem::path& out_dir,
                             const SuiteOptions& options = {});

std::string scene_stem(int index);

}  // namespace dado::synth
