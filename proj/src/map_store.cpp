#include "dado/map_store.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "json.hpp"

namespace dado::store {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

class HeaderReader {
public:
    explicit HeaderReader(std::string_view bytes) : bytes_(bytes) {}

    std::size_t offset() const { return pos_; }

    void skip_space() {
        while (pos_ < bytes_.size() && is_space(bytes_[pos_])) ++pos_;
    }

    std::string_view token() {
        skip_space();
        const std::size_t start = pos_;
        while (pos_ < bytes_.size() && !is_space(bytes_[pos_])) ++pos_;
        if (start == pos_) throw FormatError("unexpected end of PFM header", start);
        return bytes_.substr(start, pos_ - start);
    }

    int dimension(const char* name) {
        const std::size_t start = (skip_space(), pos_);
        const auto tok = token();
        int value = 0;
        auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
        if (ec != std::errc{} || ptr != tok.data() + tok.size() || value < 1) {
            throw FormatError(std::string("invalid PFM ") + name + " '" + std::string(tok) + "'",
                              start);
        }
        return value;
    }

    double scale() {
        const std::size_t start = (skip_space(), pos_);
        const std::string tok(token());
        char* end = nullptr;
        const double value = std::strtod(tok.c_str(), &end);
        if (end != tok.c_str() + tok.size() || !std::isfinite(value) || value == 0.0) {
            throw FormatError("invalid PFM scale '" + tok + "'", start);
        }
        return value;
    }

    // Exactly one whitespace byte separates the scale from the payload.
    void end_of_header() {
        if (pos_ >= bytes_.size() || !is_space(bytes_[pos_])) {
            throw FormatError("PFM header not terminated by whitespace", pos_);
        }
        ++pos_;
    }

private:
    std::string_view bytes_;
    std::size_t pos_ = 0;
};

std::uint32_t byteswap32(std::uint32_t v) {
    return ((v & 0x000000FFu) << 24) | ((v & 0x0000FF00u) << 8) | ((v & 0x00FF0000u) >> 8) |
           ((v & 0xFF000000u) >> 24);
}

std::string stem_of(const fs::path& path, std::string_view suffix) {
    const std::string name = path.filename().string();
    if (name.size() > suffix.size() && name.ends_with(suffix)) {
        return name.substr(0, name.size() - suffix.size());
    }
    return {};
}

}  // namespace

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading", path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) throw IoError("read failed", path.string());
    return std::move(buffer).str();
}

void write_file(const fs::path& path, std::string_view contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing", path.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw IoError("write failed", path.string());
}

// ---------------------------------------------------------------- PFM

Raster decode_pfm(std::string_view bytes) {
    HeaderReader header(bytes);
    const auto magic = header.token();
    if (magic == "PF") throw FormatError("color PFM ('PF') is not supported, expected 'Pf'", 0);
    if (magic != "Pf") throw FormatError("bad PFM magic '" + std::string(magic) + "'", 0);

    const int width = header.dimension("width");
    const int height = header.dimension("height");
    const double scale = header.scale();
    header.end_of_header();

    const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    const std::size_t payload = bytes.size() - header.offset();
    if (payload != count * 4) {
        throw FormatError("PFM payload is " + std::to_string(payload) + " bytes, expected " +
                              std::to_string(count * 4),
                          header.offset());
    }

    const bool file_little = scale < 0.0;
    const bool swap = file_little != (std::endian::native == std::endian::little);

    std::vector<float> data(count);
    const char* src = bytes.data() + header.offset();
    for (int row = 0; row < height; ++row) {
        // first stored row is the bottom of the image
        const std::size_t dst_row = static_cast<std::size_t>(height - 1 - row);
        for (int x = 0; x < width; ++x) {
            std::uint32_t word;
            std::memcpy(&word, src, 4);
            src += 4;
            if (swap) word = byteswap32(word);
            const float value = std::bit_cast<float>(word);
            const std::size_t index = dst_row * static_cast<std::size_t>(width) +
                                      static_cast<std::size_t>(x);
            if (!std::isfinite(value)) throw DataError("non-finite PFM value", index);
            data[index] = value;
        }
    }
    return Raster(width, height, std::move(data));
}

Raster read_pfm(const fs::path& path) {
    const std::string bytes = read_file(path);
    try {
        return decode_pfm(bytes);
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what(), e.offset());
    }
}

std::string encode_pfm(const Raster& raster) {
    std::string out = "Pf\n" + std::to_string(raster.width()) + " " +
                      std::to_string(raster.height()) + "\n-1.0\n";
    const std::size_t header = out.size();
    out.resize(header + raster.size() * 4);
    char* dst = out.data() + header;
    for (int row = raster.height() - 1; row >= 0; --row) {
        for (int x = 0; x < raster.width(); ++x) {
            std::uint32_t word = std::bit_cast<std::uint32_t>(raster.at(x, row));
            if constexpr (std::endian::native == std::endian::big) word = byteswap32(word);
            std::memcpy(dst, &word, 4);
            dst += 4;
        }
    }
    return out;
}

void write_pfm(const Raster& raster, const fs::path& path) { write_file(path, encode_pfm(raster)); }

// ---------------------------------------------------------------- VOC XML

VocParse parse_voc_xml(std::string_view xml) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        std::istringstream in{std::string(xml)};
        pt::read_xml(in, tree, pt::xml_parser::trim_whitespace);
    } catch (const pt::xml_parser_error& e) {
        throw ParseError(std::string("malformed annotation XML: ") + e.what());
    }

    const auto root = tree.get_child_optional("annotation");
    if (!root) throw ParseError("annotation XML has no <annotation> root");
    const auto size = root->get_child_optional("size");
    if (!size) throw ParseError("annotation XML has no <size> element");

    VocParse result;
    GroundTruth& gt = result.truth;
    try {
        gt.image_width = size->get<int>("width");
        gt.image_height = size->get<int>("height");
    } catch (const pt::ptree_error& e) {
        throw ParseError(std::string("bad <size> element: ") + e.what());
    }
    if (gt.image_width < 1 || gt.image_height < 1) {
        throw ParseError("annotation <size> must be positive");
    }
    if (auto filename = root->get_optional<std::string>("filename")) {
        gt.stem = fs::path(*filename).stem().string();
    }

    for (const auto& [tag, node] : *root) {
        if (tag != "object") continue;
        GtObject obj;
        obj.label = node.get<std::string>("name", "");
        obj.difficult = node.get<int>("difficult", 0) != 0;
        const auto bndbox = node.get_child_optional("bndbox");
        if (!bndbox) throw ParseError("object '" + obj.label + "' has no <bndbox>");
        try {
            const auto coord = [&](const char* key) {
                return static_cast<int>(std::lround(bndbox->get<double>(key)));
            };
            obj.box = Box{coord("xmin") - 1, coord("ymin") - 1, coord("xmax"), coord("ymax")};
        } catch (const pt::ptree_error& e) {
            throw ParseError("object '" + obj.label + "': bad <bndbox>: " + e.what());
        }

        Box clamped{std::clamp(obj.box.xmin, 0, gt.image_width),
                    std::clamp(obj.box.ymin, 0, gt.image_height),
                    std::clamp(obj.box.xmax, 0, gt.image_width),
                    std::clamp(obj.box.ymax, 0, gt.image_height)};
        // degenerate boxes are dropped and counted with the clamped ones
        if (clamped != obj.box || !clamped.valid()) ++result.clamped;
        if (!clamped.valid()) continue;
        obj.box = clamped;
        gt.objects.push_back(std::move(obj));
    }
    return result;
}

GroundTruth read_voc_xml(const fs::path& path) {
    GroundTruth gt = parse_voc_xml(read_file(path)).truth;
    if (auto stem = stem_of(path, ".ann.xml"); !stem.empty()) {
        gt.stem = stem;
    } else {
        gt.stem = path.stem().string();
    }
    return gt;
}

std::string serialize_voc_xml(const GroundTruth& truth) {
    namespace pt = boost::property_tree;
    pt::ptree root;
    root.put("filename", truth.stem);
    root.put("size.width", truth.image_width);
    root.put("size.height", truth.image_height);
    root.put("size.depth", 1);
    for (const auto& obj : truth.objects) {
        pt::ptree node;
        node.put("name", obj.label);
        node.put("difficult", obj.difficult ? 1 : 0);
        node.put("bndbox.xmin", obj.box.xmin + 1);
        node.put("bndbox.ymin", obj.box.ymin + 1);
        node.put("bndbox.xmax", obj.box.xmax);
        node.put("bndbox.ymax", obj.box.ymax);
        root.add_child("object", node);
    }
    pt::ptree tree;
    tree.add_child("annotation", root);
    std::ostringstream out;
    pt::write_xml(out, tree, pt::xml_writer_make_settings<std::string>(' ', 2));
    return std::move(out).str();
}

// ---------------------------------------------------------------- manifest

Manifest scan_manifest(const fs::path& dir) {
    struct Entry {
        std::map<int, fs::path> heads;
        std::optional<fs::path> depth, annotation, image;
    };
    static const std::regex head_pattern(R"((.+)\.att\.h(\d+)\.pfm)");

    std::map<std::string, Entry> entries;
    std::error_code ec;
    for (const auto& item : fs::directory_iterator(dir, ec)) {
        if (!item.is_regular_file()) continue;
        const fs::path& path = item.path();
        const std::string name = path.filename().string();
        std::smatch m;
        if (std::regex_match(name, m, head_pattern)) {
            entries[m[1].str()].heads[std::stoi(m[2].str())] = path;
        } else if (auto s = stem_of(path, ".depth.pfm"); !s.empty()) {
            entries[s].depth = path;
        } else if (auto s = stem_of(path, ".ann.xml"); !s.empty()) {
            entries[s].annotation = path;
        } else if (auto s = stem_of(path, ".png"); !s.empty()) {
            entries[s].image = path;
        }
    }
    if (ec) throw IoError("cannot list directory", dir.string());

    Manifest manifest;
    for (auto& [stem, entry] : entries) {
        if (entry.heads.empty() && !entry.depth) {
            // annotation- or image-only stems are not inputs
            if (entry.annotation || entry.image) {
                manifest.skipped.push_back({stem, "missing depth and attention heads"});
            }
            continue;
        }
        if (!entry.depth) {
            manifest.skipped.push_back({stem, "missing depth map"});
            continue;
        }
        if (entry.heads.empty()) {
            manifest.skipped.push_back({stem, "missing attention heads"});
            continue;
        }
        if (entry.heads.begin()->first != 0 ||
            entry.heads.rbegin()->first != static_cast<int>(entry.heads.size()) - 1) {
            manifest.skipped.push_back({stem, "attention head indices are not contiguous from 0"});
            continue;
        }
        ImageRecord record;
        record.stem = stem;
        for (auto& [k, path] : entry.heads) record.attention_heads.push_back(path);
        record.depth = *entry.depth;
        record.annotation = entry.annotation;
        record.image = entry.image;
        manifest.records.push_back(std::move(record));
    }
    return manifest;
}

LoadedImage load_record(const ImageRecord& record) {
    LoadedImage image;
    image.stem = record.stem;
    for (const auto& path : record.attention_heads) image.attention_heads.push_back(read_pfm(path));
    image.depth = read_pfm(record.depth);
    if (record.annotation) {
        image.annotation = read_voc_xml(*record.annotation);
        image.annotation->stem = record.stem;
    }
    return image;
}

// ---------------------------------------------------------------- predictions

void canonicalize(Prediction& prediction) {
    if (prediction.boxes.size() != prediction.scores.size()) {
        throw ContractError("prediction '" + prediction.image + "' has " +
                            std::to_string(prediction.boxes.size()) + " boxes but " +
                            std::to_string(prediction.scores.size()) + " scores");
    }
    std::vector<std::size_t> order(prediction.boxes.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (prediction.scores[a] != prediction.scores[b]) {
            return prediction.scores[a] > prediction.scores[b];
        }
        const Box& ba = prediction.boxes[a];
        const Box& bb = prediction.boxes[b];
        if (ba.xmin != bb.xmin) return ba.xmin < bb.xmin;
        return ba.ymin < bb.ymin;
    });
    Prediction sorted{prediction.image, {}, {}};
    for (auto i : order) {
        sorted.boxes.push_back(prediction.boxes[i]);
        sorted.scores.push_back(prediction.scores[i]);
    }
    prediction = std::move(sorted);
}

std::string prediction_to_json_line(const Prediction& prediction) {
    Prediction p = prediction;
    canonicalize(p);
    nlohmann::ordered_json doc;
    doc["image"] = p.image;
    doc["boxes"] = nlohmann::ordered_json::array();
    for (const Box& b : p.boxes) {
        doc["boxes"].push_back({b.xmin, b.ymin, b.xmax, b.ymax});
    }
    doc["scores"] = nlohmann::ordered_json::array();
    for (double s : p.scores) {
        if (!std::isfinite(s) || s < 0.0 || s > 1.0) {
            throw ContractError("prediction '" + p.image + "' has score outside [0,1]");
        }
        doc["scores"].push_back(s);
    }
    return doc.dump();
}

Prediction prediction_from_json_line(std::string_view line) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(line);
        Prediction p;
        p.image = doc.at("image").get<std::string>();
        for (const auto& b : doc.at("boxes")) {
            if (b.size() != 4) throw ParseError("box must have 4 coordinates");
            p.boxes.push_back(Box{b[0].get<int>(), b[1].get<int>(), b[2].get<int>(),
                                  b[3].get<int>()});
        }
        for (const auto& s : doc.at("scores")) p.scores.push_back(s.get<double>());
        if (p.boxes.size() != p.scores.size()) {
            throw ContractError("prediction '" + p.image + "': boxes/scores length mismatch");
        }
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad prediction line: ") + e.what());
    }
}

void write_predictions(const std::vector<Prediction>& predictions, const fs::path& path) {
    std::string out;
    for (const auto& p : predictions) {
        out += prediction_to_json_line(p);
        out += '\n';
    }
    write_file(path, out);
}

std::vector<Prediction> read_predictions(const fs::path& path) {
    const std::string text = read_file(path);
    std::vector<Prediction> result;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        result.push_back(prediction_from_json_line(line));
    }
    return result;
}

}  // namespace dado::store
