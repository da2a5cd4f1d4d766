#include "dado/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>

#include "json.hpp"

namespace dado::eval {

namespace {

std::map<std::string, const GroundTruth*> index_truth(const std::vector<GroundTruth>& gts) {
    std::map<std::string, const GroundTruth*> by_stem;
    for (const auto& gt : gts) by_stem[gt.stem] = &gt;
    return by_stem;
}

std::vector<Prediction> canonical(const std::vector<Prediction>& preds) {
    std::vector<Prediction> out = preds;
    for (auto& p : out) store::canonicalize(p);
    return out;
}

std::string number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::size_t positive_count(const std::vector<GroundTruth>& gts) {
    std::size_t n = 0;
    for (const auto& gt : gts) {
        for (const auto& obj : gt.objects) n += obj.difficult ? 0 : 1;
    }
    return n;
}

std::vector<double> coco_thresholds() {
    std::vector<double> t;
    for (int i = 0; i < 10; ++i) t.push_back((50 + 5 * i) / 100.0);
    return t;
}

CorLocResult corloc(const std::vector<Prediction>& preds, const std::vector<GroundTruth>& gts,
                    double iou_thresh, bool any_box) {
    std::map<std::string, Prediction> by_stem;
    for (auto p : preds) {
        store::canonicalize(p);
        by_stem[p.image] = std::move(p);
    }
    CorLocResult result;
    for (const auto& gt : gts) {
        if (gt.objects.empty()) continue;
        ++result.images;
        auto it = by_stem.find(gt.stem);
        if (it == by_stem.end()) {
            result.missing.push_back(gt.stem);
            continue;
        }
        const auto& boxes = it->second.boxes;
        const std::size_t tried = any_box ? boxes.size() : std::min<std::size_t>(1, boxes.size());
        bool hit = false;
        for (std::size_t d = 0; d < tried && !hit; ++d) {
            for (const auto& obj : gt.objects) {
                if (iou(boxes[d], obj.box) >= iou_thresh) {
                    hit = true;
                    break;
                }
            }
        }
        result.correct += hit ? 1 : 0;
    }
    result.corloc = result.images == 0 ? 0.0 : 100.0 * result.correct / result.images;
    return result;
}

std::vector<MatchRecord> match_detections(const std::vector<Prediction>& preds,
                                          const std::vector<GroundTruth>& gts, double iou_thresh) {
    const auto truth = index_truth(gts);
    const auto ranked = canonical(preds);

    struct Entry {
        double score;
        const Prediction* pred;
        std::size_t index;
    };
    std::vector<Entry> pool;
    for (const auto& p : ranked) {
        if (!truth.contains(p.image)) continue;
        for (std::size_t i = 0; i < p.boxes.size(); ++i) pool.push_back({p.scores[i], &p, i});
    }
    std::stable_sort(pool.begin(), pool.end(), [](const Entry& a, const Entry& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.pred->image != b.pred->image) return a.pred->image < b.pred->image;
        return a.index < b.index;
    });

    std::map<std::string, std::vector<bool>> taken;
    for (const auto& [stem, gt] : truth) taken[stem].assign(gt->objects.size(), false);

    std::vector<MatchRecord> records;
    records.reserve(pool.size());
    for (const Entry& e : pool) {
        const GroundTruth& gt = *truth.at(e.pred->image);
        auto& used = taken[e.pred->image];
        const Box& box = e.pred->boxes[e.index];

        std::optional<std::size_t> best;
        double best_iou = -1.0;
        for (std::size_t g = 0; g < gt.objects.size(); ++g) {
            if (used[g]) continue;
            const double v = iou(box, gt.objects[g].box);
            if (v > best_iou) {
                best_iou = v;
                best = g;
            }
        }

        MatchRecord rec{e.pred->image, e.index, std::nullopt, 0.0, e.score, Outcome::false_positive};
        if (best && best_iou >= iou_thresh) {
            rec.matched_gt = best;
            rec.iou_at_match = best_iou;
            if (gt.objects[*best].difficult) {
                rec.outcome = Outcome::ignored;
            } else {
                rec.outcome = Outcome::true_positive;
                used[*best] = true;
            }
        }
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<PrPoint> pr_curve(const std::vector<MatchRecord>& matches, std::size_t positives) {
    std::vector<PrPoint> points;
    std::size_t tp = 0, fp = 0;
    for (const auto& m : matches) {
        if (m.outcome == Outcome::ignored) continue;
        (m.outcome == Outcome::true_positive ? tp : fp) += 1;
        points.push_back({positives == 0 ? 0.0 : static_cast<double>(tp) / positives,
                          static_cast<double>(tp) / static_cast<double>(tp + fp)});
    }
    return points;
}

double average_precision(const std::vector<PrPoint>& curve) {
    double envelope = 0.0;
    double area = 0.0;
    // walk backwards so the envelope is the max precision at any later rank
    for (std::size_t i = curve.size(); i-- > 0;) {
        envelope = std::max(envelope, curve[i].precision);
        const double prev_recall = i == 0 ? 0.0 : curve[i - 1].recall;
        area += (curve[i].recall - prev_recall) * envelope;
    }
    return 100.0 * area;
}

OdapResult odap(const std::vector<Prediction>& preds, const std::vector<GroundTruth>& gts,
                const std::vector<double>& iou_threshs) {
    const std::size_t positives = positive_count(gts);
    if (positives == 0) throw ContractError("odAP is undefined without ground-truth boxes");
    OdapResult result;
    result.thresholds = iou_threshs;
    for (double t : iou_threshs) {
        auto curve = pr_curve(match_detections(preds, gts, t), positives);
        result.ap.push_back(average_precision(curve));
        result.curves.push_back(std::move(curve));
    }
    return result;
}

EvalReport evaluate(const std::vector<Prediction>& preds, const std::vector<GroundTruth>& gts,
                    double corloc_iou, bool any_box_corloc) {
    EvalReport report;
    const auto loc = corloc(preds, gts, corloc_iou, any_box_corloc);
    report.corloc = loc.corloc;
    report.missing_predictions = loc.missing;
    report.image_count = static_cast<int>(gts.size());
    report.gt_count = static_cast<int>(positive_count(gts));

    const auto result = odap(preds, gts, coco_thresholds());
    report.thresholds = result.thresholds;
    report.pr_curves = result.curves;
    report.odap50 = result.ap.front();
    double sum = 0.0;
    for (double ap : result.ap) sum += ap;
    report.odap_coco = sum / static_cast<double>(result.ap.size());
    return report;
}

std::string report_to_json(const EvalReport& report) {
    nlohmann::ordered_json doc;
    doc["corloc"] = report.corloc;
    doc["odap50"] = report.odap50;
    doc["odap_coco"] = report.odap_coco;
    doc["image_count"] = report.image_count;
    doc["gt_count"] = report.gt_count;
    doc["missing_predictions"] = report.missing_predictions;
    auto& curves = doc["pr_curves"] = nlohmann::ordered_json::array();
    for (std::size_t t = 0; t < report.thresholds.size(); ++t) {
        nlohmann::ordered_json entry;
        entry["iou"] = report.thresholds[t];
        entry["points"] = nlohmann::ordered_json::array();
        for (const auto& p : report.pr_curves[t]) entry["points"].push_back({p.recall, p.precision});
        curves.push_back(std::move(entry));
    }
    return doc.dump(2) + "\n";
}

std::string pr_curve_csv(const std::vector<PrPoint>& points) {
    std::string out = "recall,precision\n";
    for (const auto& p : points) out += number(p.recall) + "," + number(p.precision) + "\n";
    return out;
}

std::vector<PrPoint> parse_pr_csv(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    if (!std::getline(in, line) || line != "recall,precision") {
        throw ParseError("PR CSV must start with 'recall,precision'");
    }
    std::vector<PrPoint> points;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw ParseError("bad PR CSV line '" + line + "'");
        points.push_back({std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1))});
    }
    return points;
}

std::string pr_curve_svg(const std::vector<PrPoint>& points, const std::string& title) {
    constexpr double size = 400.0, pad = 40.0;
    const auto px = [&](double r) { return number(pad + r * (size - 2 * pad)); };
    const auto py = [&](double p) { return number(size - pad - p * (size - 2 * pad)); };
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"400\" height=\"400\" viewBox=\"0 0 400 400\">\n"
        << "<rect width=\"400\" height=\"400\" fill=\"white\"/>\n"
        << "<text x=\"200\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n"
        << "<line x1=\"" << px(0) << "\" y1=\"" << py(0) << "\" x2=\"" << px(1) << "\" y2=\"" << py(0)
        << "\" stroke=\"black\"/>\n"
        << "<line x1=\"" << px(0) << "\" y1=\"" << py(0) << "\" x2=\"" << px(0) << "\" y2=\"" << py(1)
        << "\" stroke=\"black\"/>\n"
        << "<text x=\"200\" y=\"392\" text-anchor=\"middle\" font-size=\"12\">recall</text>\n"
        << "<text x=\"12\" y=\"200\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 12 200)\">precision</text>\n";
    if (!points.empty()) {
        svg << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"";
        for (std::size_t i = 0; i < points.size(); ++i) {
            svg << (i ? " " : "") << px(points[i].recall) << "," << py(points[i].precision);
        }
        svg << "\"/>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

void emit_pr_curve(const std::vector<PrPoint>& points, const std::filesystem::path& csv_path,
                   const std::filesystem::path& svg_path, const std::string& title) {
    store::write_file(csv_path, pr_curve_csv(points));
    store::write_file(svg_path, pr_curve_svg(points, title));
}

}  // namespace dado::eval
