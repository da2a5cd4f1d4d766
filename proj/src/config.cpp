#include "dado/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>

#include "dado/map_store.hpp"

namespace dado {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

int to_int(std::string_view key, std::string_view v) {
    int out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) {
        throw ParseError("config key '" + std::string(key) + "': '" + std::string(v) + "' is not an integer");
    }
    return out;
}

double to_double(std::string_view key, std::string_view v) {
    const std::string s(v);
    char* end = nullptr;
    const double out = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(out)) {
        throw ParseError("config key '" + std::string(key) + "': '" + s + "' is not a number");
    }
    return out;
}

bool to_bool(std::string_view key, std::string_view v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ParseError("config key '" + std::string(key) + "': '" + std::string(v) + "' is not a boolean");
}

std::string from_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Field {
    std::function<void(Config&, std::string_view)> set;
    std::function<std::string(const Config&)> get;
};

// Ordered as they are written by format_config.
const std::vector<std::pair<std::string, Field>>& fields() {
    static const std::vector<std::pair<std::string, Field>> table = [] {
        std::vector<std::pair<std::string, Field>> t;
        const auto num = [&](const char* key, double Config::*m) {
            t.emplace_back(key, Field{[m, key](Config& c, std::string_view v) { c.*m = to_double(key, v); },
                                      [m](const Config& c) { return from_double(c.*m); }});
        };
        const auto integer = [&](const char* key, int Config::*m) {
            t.emplace_back(key, Field{[m, key](Config& c, std::string_view v) { c.*m = to_int(key, v); },
                                      [m](const Config& c) { return std::to_string(c.*m); }});
        };
        const auto flag = [&](const char* key, bool Config::*m) {
            t.emplace_back(key, Field{[m, key](Config& c, std::string_view v) { c.*m = to_bool(key, v); },
                                      [m](const Config& c) { return std::string(c.*m ? "true" : "false"); }});
        };
        integer("bins", &Config::bins);
        integer("smooth_window", &Config::smooth_window);
        num("overlap_frac", &Config::overlap_frac);
        num("min_prominence_frac", &Config::min_prominence_frac);
        integer("n_discard", &Config::n_discard);
        num("lambda_consistency", &Config::lambda_consistency);
        num("cc_threshold", &Config::cc_threshold);
        t.emplace_back("combine_mode",
                       Field{[](Config& c, std::string_view v) { c.combine_mode = fusion::parse_combine_mode(v); },
                             [](const Config& c) { return std::string(fusion::to_string(c.combine_mode)); }});
        flag("tau_on_support", &Config::tau_on_support);
        t.emplace_back("sparsity",
                       Field{[](Config& c, std::string_view v) { c.sparsity = attention::parse_sparsity_measure(v); },
                             [](const Config& c) { return std::string(attention::to_string(c.sparsity)); }});
        integer("kernel", &Config::kernel);
        t.emplace_back("clean_order",
                       Field{[](Config& c, std::string_view v) {
                                 if (v == "close_open") c.clean_order = boxes::CleanOrder::close_then_open;
                                 else if (v == "open_close") c.clean_order = boxes::CleanOrder::open_then_close;
                                 else throw ParseError("config key 'clean_order': expected close_open or open_close");
                             },
                             [](const Config& c) {
                                 return std::string(c.clean_order == boxes::CleanOrder::close_then_open ? "close_open"
                                                                                                          : "open_close");
                             }});
        num("min_area_frac", &Config::min_area_frac);
        num("nms_sigma", &Config::nms_sigma);
        num("score_floor", &Config::score_floor);
        num("iou_thresh", &Config::iou_thresh);
        flag("corloc_any_box", &Config::corloc_any_box);
        flag("use_depth", &Config::use_depth);
        flag("use_weights", &Config::use_weights);
        flag("isolate_layers", &Config::isolate_layers);
        flag("dynamic_bins", &Config::dynamic_bins);
        integer("fixed_layers", &Config::fixed_layers);
        return t;
    }();
    return table;
}

const Field& field(std::string_view key) {
    for (const auto& [name, f] : fields()) {
        if (name == key) return f;
    }
    throw ParseError("unknown config key '" + std::string(key) + "'");
}

void require(bool ok, const char* what) {
    if (!ok) throw ContractError(std::string("config: ") + what);
}

}  // namespace

void Config::validate() const {
    require(bins >= 2, "bins must be >= 2");
    require(smooth_window >= 1 && smooth_window <= 15 && smooth_window % 2 == 1,
            "smooth_window must be odd and in [1,15]");
    require(overlap_frac >= 0.0 && overlap_frac < 0.5, "overlap_frac must be in [0, 0.5)");
    require(min_prominence_frac >= 0.0 && min_prominence_frac <= 1.0, "min_prominence_frac must be in [0,1]");
    require(n_discard >= 0, "n_discard must be >= 0");
    require(lambda_consistency >= 0.0, "lambda_consistency must be >= 0");
    require(cc_threshold > 0.0 && cc_threshold < 1.0, "cc_threshold must be in (0,1)");
    require(kernel >= 1 && kernel % 2 == 1, "kernel must be odd and >= 1");
    require(min_area_frac >= 0.0 && min_area_frac <= 1.0, "min_area_frac must be in [0,1]");
    require(nms_sigma > 0.0, "nms_sigma must be > 0");
    require(score_floor >= 0.0, "score_floor must be >= 0");
    require(iou_thresh > 0.0 && iou_thresh <= 1.0, "iou_thresh must be in (0,1]");
    require(fixed_layers >= 1, "fixed_layers must be >= 1");
}

void Config::set(std::string_view key, std::string_view value) { field(key).set(*this, value); }

std::string Config::get(std::string_view key) const { return field(key).get(*this); }

std::vector<std::string> Config::keys() {
    std::vector<std::string> out;
    for (const auto& [name, f] : fields()) out.push_back(name);
    return out;
}

Config parse_config(std::string_view text) {
    Config config;
    std::istringstream in{std::string(text)};
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string body = trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw ParseError("config line " + std::to_string(number) + ": expected key=value");
        }
        config.set(trim(std::string_view(body).substr(0, eq)), trim(std::string_view(body).substr(eq + 1)));
    }
    config.validate();
    return config;
}

std::string format_config(const Config& config) {
    std::string out;
    for (const auto& [name, f] : fields()) out += name + "=" + f.get(config) + "\n";
    return out;
}

Config load_config(const std::filesystem::path& path) { return parse_config(store::read_file(path)); }

}  // namespace dado
