#pragma once

// Hand-built evaluation fixtures. Every expected number below was enumerated by
// hand from the listed boxes: ranks, TP/FP/ignored outcomes, PR points and the
// precision-envelope area. GT boxes are 10x10; a det shifted right by s pixels
// has IoU (10-s)/(10+s): s=1 -> 0.818, s=2 -> 0.667, s=5 -> 0.333.

#include <array>
#include <string>
#include <vector>

#include "dado/eval.hpp"

namespace fixtures {

using dado::Box;
using dado::GroundTruth;
using dado::GtObject;
using dado::eval::PrPoint;
using dado::store::Prediction;

struct EvalFixture {
    std::string name;
    std::vector<Prediction> preds;
    std::vector<GroundTruth> gts;
    std::array<double, 10> ap;         // per IoU 0.50, 0.55, ..., 0.95
    std::vector<PrPoint> curve50;      // PR table at IoU 0.5
    int corloc_correct;
    int corloc_images;
};

inline Box at(int x, int y = 0) { return Box{x, y, x + 10, y + 10}; }

inline GroundTruth image(const std::string& stem, std::vector<GtObject> objects) {
    return GroundTruth{stem, 100, 100, std::move(objects)};
}

inline GtObject obj(Box b, bool difficult = false) { return GtObject{b, "thing", difficult}; }

inline std::array<double, 10> flat(double v) {
    std::array<double, 10> a;
    a.fill(v);
    return a;
}

inline std::vector<EvalFixture> eval_fixtures() {
    std::vector<EvalFixture> f;

    // 1. perfect: two images, one exact box each
    f.push_back({"perfect",
                 {{"a", {at(0)}, {0.9}}, {"b", {at(30)}, {0.8}}},
                 {image("a", {obj(at(0))}), image("b", {obj(at(30))})},
                 flat(100.0),
                 {{0.5, 1.0}, {1.0, 1.0}},
                 2, 2});

    // 2. every detection misses
    f.push_back({"disjoint",
                 {{"a", {at(50)}, {0.9}}, {"b", {at(60)}, {0.8}}},
                 {image("a", {obj(at(0))}), image("b", {obj(at(30))})},
                 flat(0.0),
                 {{0.0, 0.0}, {0.0, 0.0}},
                 0, 2});

    // 3. duplicate of A ranks between the two true hits: TP FP TP
    //    area = 0.5*1 + 0.5*(2/3)
    f.push_back({"duplicates",
                 {{"a", {at(0), at(0), at(20)}, {0.9, 0.8, 0.7}}},
                 {image("a", {obj(at(0)), obj(at(20))})},
                 flat(100.0 * (0.5 + 0.5 * (2.0 / 3.0))),
                 {{0.5, 1.0}, {0.5, 0.5}, {1.0, 2.0 / 3.0}},
                 1, 1});

    // 4. top box lands on a difficult GT: ignored, then a TP
    f.push_back({"difficult_ignored",
                 {{"a", {at(20), at(0)}, {0.9, 0.8}}},
                 {image("a", {obj(at(0)), obj(at(20), true)})},
                 flat(100.0),
                 {{1.0, 1.0}},
                 1, 1});

    // 5. ignored, FP, TP -> points (0,0) (1,1/2); area 0.5
    f.push_back({"difficult_then_fp",
                 {{"a", {at(20), at(50, 50), at(0)}, {0.9, 0.8, 0.7}}},
                 {image("a", {obj(at(0)), obj(at(20), true)})},
                 flat(50.0),
                 {{0.0, 0.0}, {1.0, 0.5}},
                 1, 1});

    // 6. image b has no GT at all: its confident box is a FP; CorLoc counts only a
    f.push_back({"empty_image",
                 {{"a", {at(0)}, {0.6}}, {"b", {at(0)}, {0.9}}},
                 {image("a", {obj(at(0))}), image("b", {})},
                 flat(50.0),
                 {{0.0, 0.0}, {1.0, 0.5}},
                 1, 1});

    // 7. IoU 2/3: TP up to 0.65, FP from 0.70
    f.push_back({"loose_only",
                 {{"a", {at(2)}, {0.9}}},
                 {image("a", {obj(at(0))})},
                 {100, 100, 100, 100, 0, 0, 0, 0, 0, 0},
                 {{1.0, 1.0}},
                 1, 1});

    // 8. three images, five detections, four positives.
    //    ranks: a:at(0) .95, b:at(5) .90, c:at(1) .85, a:at(20,20) .70, b:at(0) .60
    //    IoU <= 0.80: TP FP TP TP TP -> area .25*1 + .75*.8 = 0.85
    //    IoU >= 0.85: TP FP FP TP TP -> area .25*1 + .50*.6 = 0.55
    f.push_back({"pr_table",
                 {{"a", {at(0), at(20, 20)}, {0.95, 0.70}},
                  {"b", {at(5), at(0)}, {0.90, 0.60}},
                  {"c", {at(1)}, {0.85}}},
                 {image("a", {obj(at(0)), obj(at(20, 20))}), image("b", {obj(at(0))}),
                  image("c", {obj(at(0))})},
                 {85, 85, 85, 85, 85, 85, 85, 55, 55, 55},
                 {{0.25, 1.0}, {0.25, 0.5}, {0.5, 2.0 / 3.0}, {0.75, 0.75}, {1.0, 0.8}},
                 2, 3});

    // 9. four images, top boxes shifted 0,1,2,5 -> 3 of 4 localized
    //    pooled: TP TP TP FP TP -> area .75*1 + .25*.8 = 0.95 at IoU 0.5
    //    at 0.70..0.80 the shift-2 box fails: TP TP FP FP TP -> .5 + .25*.6 = 0.65
    //    from 0.85 only exact boxes survive: TP FP FP FP TP -> .25 + .25*.4 = 0.35
    f.push_back({"corloc_four",
                 {{"a", {at(0)}, {0.9}},
                  {"b", {at(1)}, {0.8}},
                  {"c", {at(2)}, {0.7}},
                  {"d", {at(5), at(0)}, {0.6, 0.5}}},
                 {image("a", {obj(at(0))}), image("b", {obj(at(0))}), image("c", {obj(at(0))}),
                  image("d", {obj(at(0))})},
                 {95, 95, 95, 95, 65, 65, 65, 35, 35, 35},
                 {{0.25, 1.0}, {0.5, 1.0}, {0.75, 1.0}, {0.75, 0.75}, {1.0, 0.8}},
                 3, 4});

    // 10. image b has GT but no prediction entry: counts against CorLoc and recall
    f.push_back({"missing_entry",
                 {{"a", {at(0)}, {0.9}}},
                 {image("a", {obj(at(0))}), image("b", {obj(at(0))})},
                 flat(50.0),
                 {{0.5, 1.0}},
                 1, 2});

    // 11. entries present but empty
    f.push_back({"no_detections",
                 {{"a", {}, {}}, {"b", {}, {}}},
                 {image("a", {obj(at(0))}), image("b", {obj(at(0))})},
                 flat(0.0),
                 {},
                 0, 2});

    // 12. equal scores across images rank by stem: a (FP) before b (TP)
    //     points (0,0) (1/2,1/2) -> area 0.25
    f.push_back({"score_tie",
                 {{"b", {at(0)}, {0.5}}, {"a", {at(0)}, {0.5}}},
                 {image("a", {obj(at(50, 50))}), image("b", {obj(at(0))})},
                 flat(25.0),
                 {{0.0, 0.0}, {0.5, 0.5}},
                 1, 2});

    // 13. greedy takes the best-IoU free GT: at(2) prefers g2=at(3) (0.818) over
    //     g1=at(0) (0.667), leaving g1 for the exact box. From 0.85 at(2) fails.
    f.push_back({"best_iou_match",
                 {{"a", {at(2), at(0)}, {0.9, 0.8}}},
                 {image("a", {obj(at(0)), obj(at(3))})},
                 {100, 100, 100, 100, 100, 100, 100, 25, 25, 25},
                 {{0.5, 1.0}, {1.0, 1.0}},
                 1, 1});

    return f;
}

}  // namespace fixtures
