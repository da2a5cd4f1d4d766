#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "dado/boxes.hpp"
#include "dado/config.hpp"
#include "dado/depth_layers.hpp"
#include "dado/eval.hpp"
#include "dado/fusion.hpp"
#include "dado/map_store.hpp"
#include "dado/png_io.hpp"

namespace dado::pipeline {

namespace fs = std::filesystem;

/// Intermediate products for one image, kept for inspection and tests.
struct ImageResult {
    attention::AttentionMap attention;
    Raster depth;  // normalized
    depth::LayerSet layers;
    fusion::FusionWeights weights;
    std::vector<fusion::CombinedLayer> combined;
    boxes::DetectionSet detections;
};

/// normalize -> resample attention -> layers -> fuse -> extract -> Soft-NMS
ImageResult process_image(const store::LoadedImage& image, const Config& config);

store::Prediction to_prediction(const boxes::DetectionSet& detections);

/// DADO_THREADS if set and positive, otherwise the hardware concurrency.
int resolve_threads();

struct DiscoverSummary {
    int processed = 0;
    std::vector<store::SkippedStem> skipped;
    std::map<std::string, std::size_t> detection_counts;
};

std::string summary_to_json(const DiscoverSummary& summary);

/// Writes out_dir/predictions.jsonl (stem order) and out_dir/summary.json.
/// Output bytes do not depend on the thread count.
DiscoverSummary run_discover(const fs::path& input_dir, const fs::path& out_dir, const Config& config,
                             int threads = 0);

/// Ground truth from <stem>.ann.xml files, sorted by stem.
std::vector<GroundTruth> load_annotations(const fs::path& ann_dir);

/// Writes report.json and pr_iouNN.{csv,svg} for each IoU threshold.
eval::EvalReport run_eval(const fs::path& pred_path, const fs::path& ann_dir, const fs::path& out_dir,
                          const Config& config);

/// CorLoc and odAP lines at one decimal.
std::string headline(const eval::EvalReport& report);

struct VizSummary {
    int written = 0;
    int fallback_bases = 0;  // images drawn over the rendered depth map
};

/// <stem>.viz.png per predicted image: GT boxes in green, predictions from
/// orange (low score) to red (high score).
VizSummary run_viz(const fs::path& input_dir, const fs::path& pred_path, const fs::path& out_dir);

png::Rgb score_color(double score);
inline constexpr png::Rgb kGroundTruthColor{0, 255, 0};

}  // namespace dado::pipeline
