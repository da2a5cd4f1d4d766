#include <bit>
#include <cstring>
#include <fstream>
#include <random>

#include "doctest.h"
#include "dado/map_store.hpp"
#include "oracles.hpp"
#include "temp_dir.hpp"

using namespace dado;
namespace fs = std::filesystem;

namespace {

void touch(const fs::path& p) { std::ofstream(p) << ""; }

bool bit_identical(const Raster& a, const Raster& b) {
    if (!a.same_shape(b)) return false;
    return std::memcmp(a.values().data(), b.values().data(), a.size() * sizeof(float)) == 0;
}

}  // namespace

TEST_CASE("pfm round trip is bit-exact for random finite rasters") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> dim(1, 40);
    std::uniform_int_distribution<std::uint32_t> bits;
    for (int trial = 0; trial < 50; ++trial) {
        Raster r(dim(rng), dim(rng));
        for (float& v : r.values()) {
            do {
                v = std::bit_cast<float>(bits(rng));
            } while (!std::isfinite(v));
        }
        CHECK(bit_identical(store::decode_pfm(store::encode_pfm(r)), r));
    }
}

TEST_CASE("pfm 1x1 file is header plus four payload bytes") {
    TempDir dir;
    const Raster r(1, 1, 0.5f);
    store::write_pfm(r, dir / "one.pfm");
    const std::string bytes = store::read_file(dir / "one.pfm");
    CHECK(bytes == std::string("Pf\n1 1\n-1.0\n") + std::string("\0\0\0\x3f", 4));
    CHECK(store::read_pfm(dir / "one.pfm").at(0, 0) == 0.5f);
}

TEST_CASE("pfm payload size and bottom-up row order") {
    Raster r(2, 3);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = static_cast<float>(i);
    const std::string bytes = store::encode_pfm(r);
    const std::string header = "Pf\n2 3\n-1.0\n";
    REQUIRE(bytes.size() == header.size() + 24);
    float first;
    std::memcpy(&first, bytes.data() + header.size(), 4);
    CHECK(first == 4.0f);  // bottom-left pixel comes first on disk
}

TEST_CASE("pfm reader honours big-endian scale") {
    std::string bytes = "Pf\n2 1\n1.0\n";
    for (float v : {1.5f, -2.0f}) {
        const auto w = std::bit_cast<std::uint32_t>(v);
        for (int shift = 24; shift >= 0; shift -= 8) bytes.push_back(static_cast<char>((w >> shift) & 0xFF));
    }
    const Raster r = store::decode_pfm(bytes);
    CHECK(r.at(0, 0) == 1.5f);
    CHECK(r.at(1, 0) == -2.0f);
}

TEST_CASE("pfm errors") {
    SUBCASE("colour PF header is rejected") {
        CHECK_THROWS_AS(store::decode_pfm("PF\n1 1\n-1.0\n" + std::string(12, '\0')), FormatError);
    }
    SUBCASE("truncated payload reports the payload offset") {
        try {
            store::decode_pfm("Pf\n2 2\n-1.0\n" + std::string(8, '\0'));
            FAIL("expected FormatError");
        } catch (const FormatError& e) {
            CHECK(e.offset() == 12);
        }
    }
    SUBCASE("bad width reports where it starts") {
        try {
            store::decode_pfm("Pf\nx 2\n-1.0\n");
            FAIL("expected FormatError");
        } catch (const FormatError& e) {
            CHECK(e.offset() == 3);
        }
    }
    SUBCASE("NaN payload names the pixel") {
        Raster r(3, 2, 0.0f);
        std::string bytes = store::encode_pfm(r);
        const float nan = std::numeric_limits<float>::quiet_NaN();
        // second value of the first stored row = pixel (1, bottom row) = index 4
        std::memcpy(bytes.data() + bytes.size() - 24 + 4, &nan, 4);
        try {
            store::decode_pfm(bytes);
            FAIL("expected DataError");
        } catch (const DataError& e) {
            CHECK(e.pixel() == 4);
        }
    }
    SUBCASE("unwritable path") {
        CHECK_THROWS_AS(store::write_pfm(Raster(1, 1), "/nonexistent-dir/x.pfm"), IoError);
    }
}

TEST_CASE("voc coordinates become 0-based half-open") {
    const std::string xml = R"(<annotation><size><width>20</width><height>20</height></size>
        <object><name>cat</name><bndbox><xmin>1</xmin><ymin>1</ymin><xmax>10</xmax><ymax>10</ymax></bndbox></object>
        </annotation>)";
    const auto parsed = store::parse_voc_xml(xml);
    REQUIRE(parsed.truth.objects.size() == 1);
    CHECK(parsed.truth.objects[0].box == Box{0, 0, 10, 10});
    CHECK(parsed.truth.objects[0].label == "cat");
    CHECK(parsed.clamped == 0);
}

TEST_CASE("voc with zero objects") {
    const auto parsed = store::parse_voc_xml(
        "<annotation><size><width>5</width><height>4</height></size></annotation>");
    CHECK(parsed.truth.objects.empty());
    CHECK(parsed.truth.image_width == 5);
    CHECK(parsed.truth.image_height == 4);
}

TEST_CASE("voc three-object fixture matches hand-read values") {
    const auto gt = store::read_voc_xml(fs::path(DADO_FIXTURES) / "three_objects.ann.xml");
    CHECK(gt.stem == "three_objects");
    CHECK(gt.image_width == 500);
    CHECK(gt.image_height == 375);
    REQUIRE(gt.objects.size() == 3);
    CHECK(gt.objects[0] == GtObject{Box{47, 239, 195, 371}, "dog", false});
    CHECK(gt.objects[1] == GtObject{Box{7, 11, 352, 375}, "person", false});
    CHECK(gt.objects[2] == GtObject{Box{399, 99, 500, 300}, "chair", true});
}

TEST_CASE("voc errors and clamping") {
    CHECK_THROWS_AS(store::parse_voc_xml("<annotation><object/></annotation>"), ParseError);
    CHECK_THROWS_AS(store::parse_voc_xml("<annotation><size>"), ParseError);

    const auto parsed = store::parse_voc_xml(R"(<annotation><size><width>10</width><height>10</height></size>
        <object><name>a</name><bndbox><xmin>-3</xmin><ymin>2</ymin><xmax>14</xmax><ymax>8</ymax></bndbox></object>
        <object><name>b</name><bndbox><xmin>30</xmin><ymin>2</ymin><xmax>40</xmax><ymax>8</ymax></bndbox></object>
        </annotation>)");
    CHECK(parsed.clamped == 2);
    REQUIRE(parsed.truth.objects.size() == 1);
    CHECK(parsed.truth.objects[0].box == Box{0, 1, 10, 8});
}

TEST_CASE("voc serialize then parse is identity") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        GroundTruth gt;
        gt.stem = "img" + std::to_string(trial);
        gt.image_width = 64;
        gt.image_height = 48;
        for (int k = 0; k < trial % 5; ++k) {
            Box b = oracle::random_box(rng, 48);
            gt.objects.push_back({b, "obj" + std::to_string(k), k % 2 == 1});
        }
        CHECK(store::parse_voc_xml(store::serialize_voc_xml(gt)).truth == gt);
    }
}

TEST_CASE("scan_manifest groups complete stems and reports the rest") {
    TempDir dir;
    SUBCASE("complete and missing depth") {
        touch(dir / "a.att.h0.pfm");
        touch(dir / "a.depth.pfm");
        touch(dir / "b.att.h0.pfm");
        const auto m = store::scan_manifest(dir.path());
        REQUIRE(m.records.size() == 1);
        CHECK(m.records[0].stem == "a");
        REQUIRE(m.skipped.size() == 1);
        CHECK(m.skipped[0].stem == "b");
    }
    SUBCASE("empty directory") {
        const auto m = store::scan_manifest(dir.path());
        CHECK(m.records.empty());
        CHECK(m.skipped.empty());
    }
    SUBCASE("heads come back in numeric k order") {
        for (int k : {5, 0, 3, 1, 4, 2}) touch(dir / ("x.att.h" + std::to_string(k) + ".pfm"));
        touch(dir / "x.depth.pfm");
        touch(dir / "x.ann.xml");
        touch(dir / "x.png");
        const auto m = store::scan_manifest(dir.path());
        REQUIRE(m.records.size() == 1);
        const auto& rec = m.records[0];
        REQUIRE(rec.attention_heads.size() == 6);
        for (int k = 0; k < 6; ++k) {
            CHECK(rec.attention_heads[k].filename() == "x.att.h" + std::to_string(k) + ".pfm");
        }
        CHECK(rec.annotation.has_value());
        CHECK(rec.image.has_value());
    }
    SUBCASE("gaps in head numbering are skipped") {
        touch(dir / "g.att.h0.pfm");
        touch(dir / "g.att.h2.pfm");
        touch(dir / "g.depth.pfm");
        const auto m = store::scan_manifest(dir.path());
        CHECK(m.records.empty());
        REQUIRE(m.skipped.size() == 1);
    }
}

TEST_CASE("scan_manifest depends only on the directory listing") {
    std::vector<std::string> names{"c.att.h0.pfm", "c.depth.pfm", "a.att.h1.pfm", "a.att.h0.pfm",
                                   "a.depth.pfm", "b.depth.pfm", "d.ann.xml"};
    std::mt19937_64 rng(11);
    std::optional<store::Manifest> first;
    for (int trial = 0; trial < 5; ++trial) {
        TempDir dir;
        std::shuffle(names.begin(), names.end(), rng);
        for (const auto& n : names) touch(dir / n);
        auto m = store::scan_manifest(dir.path());
        std::vector<std::string> stems, skipped;
        for (const auto& r : m.records) stems.push_back(r.stem + ":" + std::to_string(r.attention_heads.size()));
        for (const auto& s : m.skipped) skipped.push_back(s.stem + ":" + s.reason);
        CHECK(stems == std::vector<std::string>{"a:2", "c:1"});
        CHECK(skipped == std::vector<std::string>{"b:missing attention heads",
                                                  "d:missing depth and attention heads"});
    }
}

TEST_CASE("prediction serialization") {
    SUBCASE("empty detection set") {
        CHECK(store::prediction_to_json_line({"x", {}, {}}) == R"({"image":"x","boxes":[],"scores":[]})");
    }
    SUBCASE("boxes ordered by descending score") {
        store::Prediction p{"img", {Box{5, 5, 9, 9}, Box{0, 0, 4, 4}}, {0.4, 0.9}};
        CHECK(store::prediction_to_json_line(p) ==
              R"({"image":"img","boxes":[[0,0,4,4],[5,5,9,9]],"scores":[0.9,0.4]})");
    }
    SUBCASE("score ties break on xmin then ymin") {
        store::Prediction p{"t", {Box{3, 1, 5, 5}, Box{1, 2, 5, 5}, Box{1, 0, 5, 5}}, {0.5, 0.5, 0.5}};
        store::canonicalize(p);
        CHECK(p.boxes == std::vector<Box>{Box{1, 0, 5, 5}, Box{1, 2, 5, 5}, Box{3, 1, 5, 5}});
    }
    SUBCASE("length mismatch") {
        store::Prediction p{"bad", {Box{0, 0, 1, 1}}, {}};
        CHECK_THROWS_AS(store::canonicalize(p), ContractError);
    }
    SUBCASE("file round trip") {
        TempDir dir;
        std::vector<store::Prediction> preds{{"a", {Box{0, 0, 3, 3}, Box{1, 1, 2, 2}}, {0.75, 0.123456789012345}},
                                             {"b", {}, {}}};
        store::write_predictions(preds, dir / "p.jsonl");
        CHECK(store::read_predictions(dir / "p.jsonl") == preds);
    }
}
