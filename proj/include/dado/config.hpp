#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "dado/attention.hpp"
#include "dado/boxes.hpp"
#include "dado/fusion.hpp"

namespace dado {

/// Every tunable of the discovery pipeline and evaluator. Serializes to a flat
/// `key=value` file; '#' starts a comment.
struct Config {
    // depth layering
    int bins = 64;
    int smooth_window = 3;
    double overlap_frac = 0.2;
    double min_prominence_frac = 0.05;
    int n_discard = 1;
    double lambda_consistency = 10.0;

    // fusion
    double cc_threshold = 0.5;
    fusion::CombineMode combine_mode = fusion::CombineMode::product;
    bool tau_on_support = false;
    attention::SparsityMeasure sparsity = attention::SparsityMeasure::entropy;

    // boxes
    int kernel = 3;
    boxes::CleanOrder clean_order = boxes::CleanOrder::close_then_open;
    double min_area_frac = 0.001;
    double nms_sigma = 0.5;
    double score_floor = 0.001;

    // evaluation
    double iou_thresh = 0.5;
    bool corloc_any_box = false;

    // ablation switches
    bool use_depth = true;       // false: attention alone, one all-ones layer
    bool use_weights = true;     // false: w_a = w_d = 0.5
    bool isolate_layers = true;  // false: foreground layers merged into one
    bool dynamic_bins = true;    // false: fixed_layers equal-width intervals
    int fixed_layers = 4;

    /// Throws ContractError naming the first out-of-domain field.
    void validate() const;

    /// Sets one field from its textual form; unknown keys throw ParseError.
    void set(std::string_view key, std::string_view value);

    static std::vector<std::string> keys();
    std::string get(std::string_view key) const;

    friend bool operator==(const Config&, const Config&) = default;
};

Config parse_config(std::string_view text);
std::string format_config(const Config& config);
Config load_config(const std::filesystem::path& path);

}  // namespace dado
