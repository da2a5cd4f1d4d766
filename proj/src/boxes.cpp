#include "dado/boxes.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dado::boxes {

bool ranks_before(const Detection& a, const Detection& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.box.xmin != b.box.xmin) return a.box.xmin < b.box.xmin;
    if (a.box.ymin != b.box.ymin) return a.box.ymin < b.box.ymin;
    if (a.box.xmax != b.box.xmax) return a.box.xmax < b.box.xmax;
    if (a.box.ymax != b.box.ymax) return a.box.ymax < b.box.ymax;
    return a.layer_index < b.layer_index;
}

namespace {

void check_kernel(int kernel) {
    if (kernel < 1 || kernel % 2 == 0) {
        throw ContractError("morphology kernel must be odd and >= 1, got " + std::to_string(kernel));
    }
}

// Separable running extreme: a row pass followed by a column pass.
template <typename Pick>
Raster window_filter(const Raster& in, int kernel, Pick pick) {
    check_kernel(kernel);
    if (kernel == 1) return in;
    const int r = kernel / 2;
    const int w = in.width();
    const int h = in.height();
    Raster rows(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            float v = in.at(x, y);
            for (int k = std::max(0, x - r); k <= std::min(w - 1, x + r); ++k) v = pick(v, in.at(k, y));
            rows.at(x, y) = v;
        }
    }
    Raster out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            float v = rows.at(x, y);
            for (int k = std::max(0, y - r); k <= std::min(h - 1, y + r); ++k) v = pick(v, rows.at(x, k));
            out.at(x, y) = v;
        }
    }
    return out;
}

}  // namespace

Raster erode(const Raster& binary, int kernel) {
    return window_filter(binary, kernel, [](float a, float b) { return std::min(a, b); });
}

Raster dilate(const Raster& binary, int kernel) {
    return window_filter(binary, kernel, [](float a, float b) { return std::max(a, b); });
}

Raster morph_clean(const Raster& binary, int kernel, CleanOrder order) {
    check_kernel(kernel);
    if (kernel == 1) return binary;
    const auto closing = [&](const Raster& r) { return erode(dilate(r, kernel), kernel); };
    const auto opening = [&](const Raster& r) { return dilate(erode(r, kernel), kernel); };
    return order == CleanOrder::close_then_open ? opening(closing(binary))
                                                : closing(opening(binary));
}

namespace {

class DisjointSet {
public:
    std::size_t make() {
        parent_.push_back(parent_.size());
        return parent_.size() - 1;
    }
    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (b < a) std::swap(a, b);
        parent_[b] = a;
    }

private:
    std::vector<std::size_t> parent_;
};

}  // namespace

std::vector<Component> connected_components(const Raster& binary, double min_area_frac) {
    const int w = binary.width();
    const int h = binary.height();
    constexpr std::size_t none = static_cast<std::size_t>(-1);
    std::vector<std::size_t> label(binary.size(), none);
    DisjointSet sets;

    // first pass: provisional labels from the already-visited 8-neighbours
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            if (binary[i] == 0.0f) continue;
            std::size_t current = none;
            const int nx[4] = {x - 1, x - 1, x, x + 1};
            const int ny[4] = {y, y - 1, y - 1, y - 1};
            for (int k = 0; k < 4; ++k) {
                if (nx[k] < 0 || nx[k] >= w || ny[k] < 0) continue;
                const std::size_t n = label[static_cast<std::size_t>(ny[k]) * w + nx[k]];
                if (n == none) continue;
                if (current == none) current = n;
                else sets.unite(current, n);
            }
            label[i] = current == none ? sets.make() : current;
        }
    }

    // second pass: gather pixels per root, roots numbered in raster order
    std::vector<std::size_t> slot;
    std::vector<Component> comps;
    for (std::size_t i = 0; i < label.size(); ++i) {
        if (label[i] == none) continue;
        const std::size_t root = sets.find(label[i]);
        if (root >= slot.size()) slot.resize(root + 1, none);
        if (slot[root] == none) {
            slot[root] = comps.size();
            const int x = static_cast<int>(i % w);
            const int y = static_cast<int>(i / w);
            comps.push_back({Box{x, y, x + 1, y + 1}, {}});
        }
        Component& c = comps[slot[root]];
        const int x = static_cast<int>(i % w);
        const int y = static_cast<int>(i / w);
        c.box.xmin = std::min(c.box.xmin, x);
        c.box.xmax = std::max(c.box.xmax, x + 1);
        c.box.ymax = std::max(c.box.ymax, y + 1);
        c.pixels.push_back(i);
    }

    const double min_area = min_area_frac * static_cast<double>(binary.size());
    std::erase_if(comps, [&](const Component& c) { return static_cast<double>(c.pixels.size()) < min_area; });
    // raster order of first pixels already sorts by ymin; stable keeps it for equal corners
    std::stable_sort(comps.begin(), comps.end(), [](const Component& a, const Component& b) {
        if (a.box.ymin != b.box.ymin) return a.box.ymin < b.box.ymin;
        return a.box.xmin < b.box.xmin;
    });
    return comps;
}

double score_box(const Raster& raw, const Component& component) {
    if (component.pixels.empty()) throw ContractError("score_box: empty component");
    double sum = 0.0;
    for (std::size_t i : component.pixels) {
        if (i >= raw.size()) throw ContractError("score_box: component pixel outside raster");
        sum += raw[i];
    }
    return sum / static_cast<double>(component.pixels.size());
}

DetectionSet soft_nms(DetectionSet dets, double sigma, double score_floor) {
    if (!(sigma > 0.0)) throw ContractError("soft_nms: sigma must be positive");
    if (score_floor < 0.0) throw ContractError("soft_nms: score_floor must be >= 0");

    std::vector<Detection> pending = std::move(dets.detections);
    std::stable_sort(pending.begin(), pending.end(), ranks_before);
    std::vector<Detection> kept;
    kept.reserve(pending.size());
    while (!pending.empty()) {
        auto best = pending.begin();
        for (auto it = pending.begin() + 1; it != pending.end(); ++it) {
            if (it->score > best->score) best = it;
        }
        const Detection pick = *best;
        pending.erase(best);
        for (Detection& d : pending) {
            const double overlap = iou(pick.box, d.box);
            d.score *= std::exp(-(overlap * overlap) / sigma);
        }
        std::erase_if(pending, [&](const Detection& d) { return d.score < score_floor; });
        kept.push_back(pick);
    }
    std::erase_if(kept, [&](const Detection& d) { return d.score < score_floor; });
    std::stable_sort(kept.begin(), kept.end(), ranks_before);
    dets.detections = std::move(kept);
    return dets;
}

DetectionSet extract_detections(const std::vector<fusion::CombinedLayer>& layers,
                                const ExtractOptions& options, std::string stem) {
    DetectionSet pooled;
    pooled.stem = std::move(stem);
    for (const auto& layer : layers) {
        const Raster cleaned = morph_clean(layer.binary, options.kernel, options.order);
        for (const Component& c : connected_components(cleaned, options.min_area_frac)) {
            pooled.detections.push_back(
                Detection{c.box, score_box(layer.raw, c), layer.layer_index, c.pixels.size()});
        }
    }
    return soft_nms(std::move(pooled), options.nms_sigma, options.score_floor);
}

}  // namespace dado::boxes
