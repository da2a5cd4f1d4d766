#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dado/raster.hpp"

namespace dado::store {

namespace fs = std::filesystem;

/// Reads a grayscale ("Pf") PFM file. Rows are stored bottom-to-top on disk
/// and returned top-to-bottom. Endianness follows the sign of the scale line.
Raster read_pfm(const fs::path& path);
Raster decode_pfm(std::string_view bytes);

/// Writes little-endian grayscale PFM (scale -1.0).
void write_pfm(const Raster& raster, const fs::path& path);
std::string encode_pfm(const Raster& raster);

struct VocParse {
    GroundTruth truth;
    int clamped = 0;  // boxes pulled back inside the image (or dropped if empty after clamping)
};

/// VOC coordinates are 1-based inclusive; they become 0-based half-open here
/// and nowhere else.
VocParse parse_voc_xml(std::string_view xml);
GroundTruth read_voc_xml(const fs::path& path);
std::string serialize_voc_xml(const GroundTruth& truth);

/// Per-stem file set following the directory convention:
///   X.att.h<k>.pfm (k = 0..H-1), X.depth.pfm, optional X.ann.xml, optional X.png
struct ImageRecord {
    std::string stem;
    std::vector<fs::path> attention_heads;  // in head order
    fs::path depth;
    std::optional<fs::path> annotation;
    std::optional<fs::path> image;
};

struct SkippedStem {
    std::string stem;
    std::string reason;
};

struct Manifest {
    std::vector<ImageRecord> records;  // sorted by stem
    std::vector<SkippedStem> skipped;  // sorted by stem
};

Manifest scan_manifest(const fs::path& dir);

struct LoadedImage {
    std::string stem;
    std::vector<Raster> attention_heads;
    Raster depth;
    std::optional<GroundTruth> annotation;
};

LoadedImage load_record(const ImageRecord& record);

struct Prediction {
    std::string image;
    std::vector<Box> boxes;
    std::vector<double> scores;

    friend bool operator==(const Prediction&, const Prediction&) = default;
};

/// Orders boxes by score descending, ties by xmin then ymin.
/// Throws ContractError if boxes and scores differ in length.
void canonicalize(Prediction& prediction);

std::string prediction_to_json_line(const Prediction& prediction);
Prediction prediction_from_json_line(std::string_view line);

/// JSON-lines: one object per image, keys in the order image, boxes, scores.
void write_predictions(const std::vector<Prediction>& predictions, const fs::path& path);
std::vector<Prediction> read_predictions(const fs::path& path);

std::string read_file(const fs::path& path);
void write_file(const fs::path& path, std::string_view contents);

}  // namespace dado::store
