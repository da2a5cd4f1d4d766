#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dado/map_store.hpp"
#include "dado/raster.hpp"

namespace dado::eval {

using store::Prediction;

enum class Outcome { true_positive, false_positive, ignored };

struct MatchRecord {
    std::string stem;
    std::size_t detection = 0;           // index within the image's ranked boxes
    std::optional<std::size_t> matched_gt;
    double iou_at_match = 0.0;
    double score = 0.0;
    Outcome outcome = Outcome::false_positive;
};

struct PrPoint {
    double recall = 0.0;
    double precision = 0.0;

    friend bool operator==(const PrPoint&, const PrPoint&) = default;
};

struct CorLocResult {
    double corloc = 0.0;  // percent
    int correct = 0;
    int images = 0;                     // images with at least one GT box
    std::vector<std::string> missing;   // GT images with no prediction entry
};

/// Percentage of GT images whose top-scoring box reaches iou_thresh against
/// any GT box. With any_box, every predicted box gets a chance.
CorLocResult corloc(const std::vector<Prediction>& preds, const std::vector<GroundTruth>& gts,
                    double iou_thresh = 0.5, bool any_box = false);

/// Class-agnostic greedy matching of the pooled, score-ranked detections.
/// Difficult GT boxes absorb matches without counting either way and are
/// left out of the recall denominator.
std::vector<MatchRecord> match_detections(const std::vector<Prediction>& preds,
                                          const std::vector<GroundTruth>& gts, double iou_thresh);

std::vector<PrPoint> pr_curve(const std::vector<MatchRecord>& matches, std::size_t positives);

/// All-point interpolated area under the precision envelope, times 100.
double average_precision(const std::vector<PrPoint>& curve);

struct OdapResult {
    std::vector<double> thresholds;
    std::vector<double> ap;  // percent, per threshold
    std::vector<std::vector<PrPoint>> curves;
};

/// Throws ContractError when there is no non-difficult GT box.
OdapResult odap(const std::vector<Prediction>& preds, const std::vector<GroundTruth>& gts,
                const std::vector<double>& iou_threshs);

/// 0.50, 0.55, ..., 0.95
std::vector<double> coco_thresholds();

std::size_t positive_count(const std::vector<GroundTruth>& gts);

struct EvalReport {
    double corloc = 0.0;
    double odap50 = 0.0;
    double odap_coco = 0.0;
    std::vector<double> thresholds;
    std::vector<std::vector<PrPoint>> pr_curves;
    int image_count = 0;
    int gt_count = 0;
    std::vector<std::string> missing_predictions;
};

EvalReport evaluate(const std::vector<Prediction>& preds, const std::vector<GroundTruth>& gts,
                    double corloc_iou = 0.5, bool any_box_corloc = false);

std::string report_to_json(const EvalReport& report);

/// CSV with header "recall,precision"; values printed with round-trip precision.
std::string pr_curve_csv(const std::vector<PrPoint>& points);
std::vector<PrPoint> parse_pr_csv(const std::string& csv);
std::string pr_curve_svg(const std::vector<PrPoint>& points, const std::string& title);

void emit_pr_curve(const std::vector<PrPoint>& points, const std::filesystem::path& csv_path,
                   const std::filesystem::path& svg_path, const std::string& title = "PR curve");

}  // namespace dado::eval
