// dado: discover objects in attention/depth raster sets and evaluate them.
//
//   dado synth    --out DIR [--scenes N] [--seed S] [--noise SIGMA] [--kind standard|deep]
//   dado discover --input DIR --out DIR [config flags]
//   dado eval     --pred FILE --ann DIR --out DIR [config flags]
//   dado viz      --input DIR --pred FILE --out DIR

#include <cstdio>
#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "dado/config.hpp"
#include "dado/pipeline.hpp"
#include "dado/synthgen.hpp"

namespace {

std::string flag_name(const std::string& key) {
    std::string out = "--";
    for (char c : key) out += c == '_' ? '-' : c;
    return out;
}

struct ConfigFlags {
    std::string config_path;
    std::map<std::string, std::string> overrides;

    void attach(CLI::App* app) {
        app->add_option("--config", config_path, "key=value config file");
        for (const auto& key : dado::Config::keys()) {
            app->add_option(flag_name(key), overrides[key], "override config key " + key);
        }
    }

    dado::Config resolve() const {
        dado::Config config = config_path.empty() ? dado::Config{} : dado::load_config(config_path);
        for (const auto& [key, value] : overrides) {
            if (!value.empty()) config.set(key, value);
        }
        config.validate();
        return config;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Depth-and-attention object discovery"};
    app.require_subcommand(1);

    std::string input, out, pred, ann, kind = "standard";
    int scenes = 10;
    std::uint64_t seed = 42;
    double noise = 0.0;

    auto* synth = app.add_subcommand("synth", "write a synthetic scene suite");
    synth->add_option("--out", out, "output directory")->required();
    synth->add_option("--scenes", scenes, "number of scenes");
    synth->add_option("--seed", seed, "suite seed");
    synth->add_option("--noise", noise, "depth noise sigma");
    synth->add_option("--kind", kind, "standard or deep");

    ConfigFlags discover_flags, eval_flags;
    auto* discover = app.add_subcommand("discover", "run object discovery over a raster directory");
    discover->add_option("--input", input, "directory of X.att.h<k>.pfm / X.depth.pfm files")->required();
    discover->add_option("--out", out, "output directory")->required();
    discover_flags.attach(discover);

    auto* evaluate = app.add_subcommand("eval", "score predictions against VOC annotations");
    evaluate->add_option("--pred", pred, "predictions.jsonl")->required();
    evaluate->add_option("--ann", ann, "directory of X.ann.xml files")->required();
    evaluate->add_option("--out", out, "report directory")->required();
    eval_flags.attach(evaluate);

    auto* viz = app.add_subcommand("viz", "draw predicted and ground-truth boxes");
    viz->add_option("--input", input, "raster directory")->required();
    viz->add_option("--pred", pred, "predictions.jsonl")->required();
    viz->add_option("--out", out, "output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth->parsed()) {
            dado::synth::SuiteOptions options{dado::synth::parse_suite_kind(kind), noise};
            const auto manifest = dado::synth::generate_suite(scenes, seed, out, options);
            for (const auto& w : manifest.warnings) std::cerr << "warning: " << w << "\n";
            std::cout << "wrote " << manifest.stems.size() << " scenes to " << out << "\n";
            return 0;
        }
        if (discover->parsed()) {
            const auto summary = dado::pipeline::run_discover(input, out, discover_flags.resolve());
            for (const auto& s : summary.skipped) std::cerr << "skipped " << s.stem << ": " << s.reason << "\n";
            std::size_t total = 0;
            for (const auto& [stem, n] : summary.detection_counts) total += n;
            std::cout << "processed " << summary.processed << " images, skipped " << summary.skipped.size()
                      << ", " << total << " detections\n";
            return summary.processed > 0 ? 0 : 1;
        }
        if (evaluate->parsed()) {
            const auto report = dado::pipeline::run_eval(pred, ann, out, eval_flags.resolve());
            for (const auto& stem : report.missing_predictions) {
                std::cerr << "no prediction for " << stem << "\n";
            }
            std::cout << dado::pipeline::headline(report);
            return 0;
        }
        if (viz->parsed()) {
            const auto summary = dado::pipeline::run_viz(input, pred, out);
            std::cout << "wrote " << summary.written << " overlays\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
