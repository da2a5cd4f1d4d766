#include "dado/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <set>
#include <thread>

#include "json.hpp"

namespace dado::pipeline {

namespace {

depth::LayerSet merge_layers(const depth::LayerSet& set) {
    depth::LayerSet merged;
    merged.discarded = set.discarded;
    if (set.layers.empty()) return merged;
    depth::DepthLayer all = set.layers.front();
    for (std::size_t k = 1; k < set.layers.size(); ++k) {
        const auto& layer = set.layers[k];
        all.lo = std::min(all.lo, layer.lo);
        all.hi = std::max(all.hi, layer.hi);
        auto dst = all.mask.values();
        auto src = layer.mask.values();
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = std::max(dst[i], src[i]);
    }
    merged.layers.push_back(std::move(all));
    return merged;
}

}  // namespace

ImageResult process_image(const store::LoadedImage& image, const Config& config) {
    config.validate();
    ImageResult r;
    r.depth = attention::normalize_unit(image.depth);

    Raster att = attention::normalize_unit(attention::aggregate_heads(image.attention_heads));
    att = attention::resample_bilinear(att, r.depth.width(), r.depth.height());
    r.attention.mask = std::move(att);
    r.attention.sparsity = attention::attention_sparsity(r.attention.mask, config.sparsity);

    if (!config.use_depth) {
        depth::DepthLayer everything;
        everything.mask = Raster(r.depth.width(), r.depth.height(), 1.0f);
        r.layers.layers.push_back(std::move(everything));
    } else {
        depth::LayerSet layers;
        if (config.dynamic_bins) {
            const auto hist = depth::depth_histogram(r.depth, config.bins);
            const auto peaks = depth::find_peaks(hist, config.min_prominence_frac, config.smooth_window);
            layers = depth::build_layers(r.depth, peaks, config.overlap_frac);
        } else {
            layers = depth::build_fixed_layers(r.depth, config.fixed_layers, config.overlap_frac);
        }
        layers = depth::discard_background(std::move(layers), config.n_discard);
        r.layers = config.isolate_layers ? std::move(layers) : merge_layers(layers);
    }

    r.weights = fusion::compute_weights(r.attention, r.depth, config.cc_threshold, config.lambda_consistency);
    if (!config.use_weights) r.weights = fusion::FusionWeights{r.weights.cc, 0.5, 0.5, false};

    r.combined = fusion::fuse_image(r.attention, r.layers, r.weights,
                                    fusion::FuseOptions{config.combine_mode, config.tau_on_support});
    r.detections = boxes::extract_detections(
        r.combined,
        boxes::ExtractOptions{config.kernel, config.clean_order, config.min_area_frac, config.nms_sigma,
                              config.score_floor},
        image.stem);
    return r;
}

store::Prediction to_prediction(const boxes::DetectionSet& detections) {
    store::Prediction p;
    p.image = detections.stem;
    for (const auto& d : detections.detections) {
        p.boxes.push_back(d.box);
        p.scores.push_back(std::clamp(d.score, 0.0, 1.0));
    }
    store::canonicalize(p);
    return p;
}

int resolve_threads() {
    if (const char* env = std::getenv("DADO_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::string summary_to_json(const DiscoverSummary& summary) {
    nlohmann::ordered_json doc;
    doc["processed"] = summary.processed;
    doc["skipped"] = nlohmann::ordered_json::array();
    for (const auto& s : summary.skipped) doc["skipped"].push_back({{"stem", s.stem}, {"reason", s.reason}});
    doc["detections"] = nlohmann::ordered_json::object();
    for (const auto& [stem, n] : summary.detection_counts) doc["detections"][stem] = n;
    return doc.dump(2) + "\n";
}

DiscoverSummary run_discover(const fs::path& input_dir, const fs::path& out_dir, const Config& config,
                             int threads) {
    config.validate();
    if (!fs::is_directory(input_dir)) throw IoError("input is not a directory", input_dir.string());
    const store::Manifest manifest = store::scan_manifest(input_dir);

    const std::size_t n = manifest.records.size();
    std::vector<std::optional<store::Prediction>> results(n);
    std::vector<std::string> failures(n);
    std::atomic<std::size_t> next{0};
    const auto work = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                const auto image = store::load_record(manifest.records[i]);
                results[i] = to_prediction(process_image(image, config).detections);
            } catch (const std::exception& e) {
                failures[i] = e.what();
            }
        }
    };
    const int workers = std::clamp(threads > 0 ? threads : resolve_threads(), 1, static_cast<int>(std::max<std::size_t>(n, 1)));
    {
        std::vector<std::jthread> pool;
        for (int t = 1; t < workers; ++t) pool.emplace_back(work);
        work();
    }

    DiscoverSummary summary;
    summary.skipped = manifest.skipped;
    std::vector<store::Prediction> predictions;
    for (std::size_t i = 0; i < n; ++i) {
        const std::string& stem = manifest.records[i].stem;
        if (!results[i]) {
            summary.skipped.push_back({stem, failures[i]});
            continue;
        }
        ++summary.processed;
        summary.detection_counts[stem] = results[i]->boxes.size();
        predictions.push_back(std::move(*results[i]));
    }
    std::sort(summary.skipped.begin(), summary.skipped.end(),
              [](const auto& a, const auto& b) { return a.stem < b.stem; });

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create directory", out_dir.string());
    store::write_predictions(predictions, out_dir / "predictions.jsonl");
    store::write_file(out_dir / "summary.json", summary_to_json(summary));
    return summary;
}

std::vector<GroundTruth> load_annotations(const fs::path& ann_dir) {
    if (!fs::is_directory(ann_dir)) throw IoError("annotation path is not a directory", ann_dir.string());
    std::vector<GroundTruth> gts;
    for (const auto& entry : fs::directory_iterator(ann_dir)) {
        const std::string name = entry.path().filename().string();
        if (entry.is_regular_file() && name.ends_with(".ann.xml")) gts.push_back(store::read_voc_xml(entry.path()));
    }
    std::sort(gts.begin(), gts.end(), [](const auto& a, const auto& b) { return a.stem < b.stem; });
    return gts;
}

eval::EvalReport run_eval(const fs::path& pred_path, const fs::path& ann_dir, const fs::path& out_dir,
                          const Config& config) {
    config.validate();
    const auto preds = store::read_predictions(pred_path);
    const auto gts = load_annotations(ann_dir);

    std::set<std::string> gt_stems;
    for (const auto& gt : gts) gt_stems.insert(gt.stem);
    const bool overlap = std::any_of(preds.begin(), preds.end(),
                                     [&](const auto& p) { return gt_stems.contains(p.image); });
    if (!overlap) throw ContractError("predictions and annotations share no image stems");

    const auto report = eval::evaluate(preds, gts, config.iou_thresh, config.corloc_any_box);

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create directory", out_dir.string());
    store::write_file(out_dir / "report.json", eval::report_to_json(report));
    for (std::size_t t = 0; t < report.thresholds.size(); ++t) {
        const int pct = static_cast<int>(std::lround(report.thresholds[t] * 100));
        const std::string base = "pr_iou" + std::to_string(pct);
        eval::emit_pr_curve(report.pr_curves[t], out_dir / (base + ".csv"), out_dir / (base + ".svg"),
                            "PR curve, IoU " + std::to_string(pct) + "%");
    }
    return report;
}

std::string headline(const eval::EvalReport& report) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "CorLoc: %.1f\nodAP50: %.1f\nodAP@[50:95]: %.1f\n", report.corloc,
                  report.odap50, report.odap_coco);
    return buf;
}

png::Rgb score_color(double score) {
    const double s = std::clamp(score, 0.0, 1.0);
    return {255, static_cast<std::uint8_t>(std::lround(200.0 * (1.0 - s))), 0};
}

VizSummary run_viz(const fs::path& input_dir, const fs::path& pred_path, const fs::path& out_dir) {
    const auto manifest = store::scan_manifest(input_dir);
    const auto preds = store::read_predictions(pred_path);

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create directory", out_dir.string());

    VizSummary summary;
    for (const auto& record : manifest.records) {
        const auto pred = std::find_if(preds.begin(), preds.end(), [&](const auto& p) { return p.image == record.stem; });
        if (pred == preds.end()) continue;

        png::RgbImage canvas;
        bool have_base = false;
        if (record.image) {
            try {
                canvas = png::read_png(*record.image);
                have_base = true;
            } catch (const Error&) {
            }
        }
        if (!have_base) {
            canvas = png::render_gray(store::read_pfm(record.depth));
            ++summary.fallback_bases;
        }
        if (record.annotation) {
            for (const auto& obj : store::read_voc_xml(*record.annotation).objects) {
                png::draw_box(canvas, obj.box, kGroundTruthColor);
            }
        }
        store::Prediction ordered = *pred;
        store::canonicalize(ordered);
        // lowest score first so the strongest boxes end up on top
        for (std::size_t i = ordered.boxes.size(); i-- > 0;) {
            png::draw_box(canvas, ordered.boxes[i], score_color(ordered.scores[i]));
        }
        png::write_png(canvas, out_dir / (record.stem + ".viz.png"));
        ++summary.written;
    }
    return summary;
}

}  // namespace dado::pipeline
