#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "curveclock/error.hpp"
#include "curveclock/learn.hpp"
#include "curveclock/normalize.hpp"
#include "curveclock/reparam.hpp"

namespace curveclock {

/// Deterministic dataset split: the first train_per_class samples of each
/// class in sorted file order go to the training set, the remainder to test.
struct SplitSpec {
    int train_per_class = 50;
};

/// Everything a pipeline run needs. Parsed from a flat "key = value" file
/// with dotted section keys; '#' starts a comment; unknown keys are rejected.
struct RunConfig {
    NormalizationPlan plan;
    ParamFamily family; // family.samples is adapted to the sector count at use time
    std::optional<GridSpec> grid;
    SplitSpec split;
    std::string manifest_path;
    std::string in_dir;  // optional base dir for manifest-relative paths
    std::string out_dir; // empty means the current directory
    int threshold = 128;
    unsigned threads = 0;
    unsigned long seed = 0; // reserved; the pipeline is deterministic
    int knn_k = 5;
    double logistic_penalty = 1.0;
    int logistic_iters = 500;
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

inline double parse_lambda_value(const std::string& v, const std::string& key) {
    if (v == "inf" || v == "+inf" || v == "infinity") return kArcLengthLambda;
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size() || std::isnan(d)) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ValidationError("config: key '" + key + "': bad value '" + v + "'");
    }
}

inline long parse_int_value(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        const long d = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ValidationError("config: key '" + key + "': bad integer '" + v + "'");
    }
}

inline std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    return out;
}

} // namespace detail

inline void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value) {
    using detail::parse_int_value;
    using detail::parse_lambda_value;
    auto bad_choice = [&](const char* choices) {
        throw ValidationError("config: key '" + key + "': bad value '" + value +
                              "' (expected " + choices + ")");
    };

    if (key == "plan.direction") {
        if (value == "ccw") cfg.plan.direction = DirectionRule::ccw;
        else if (value == "none") cfg.plan.direction = DirectionRule::none;
        else bad_choice("ccw|none");
    } else if (key == "plan.start") {
        if (value == "max_y") cfg.plan.start = StartRule::max_y;
        else if (value == "none") cfg.plan.start = StartRule::none;
        else bad_choice("max_y|none");
    } else if (key == "plan.scale") {
        if (value == "unit_length") cfg.plan.scale = ScaleRule::unit_length;
        else if (value == "unit_area") cfg.plan.scale = ScaleRule::unit_area;
        else if (value == "none") cfg.plan.scale = ScaleRule::none;
        else bad_choice("unit_length|unit_area|none");
    } else if (key == "plan.translate") {
        if (value == "start_origin") cfg.plan.translate = TranslateRule::start_origin;
        else if (value == "contour_centroid") cfg.plan.translate = TranslateRule::contour_centroid;
        else if (value == "area_centroid") cfg.plan.translate = TranslateRule::area_centroid;
        else if (value == "none") cfg.plan.translate = TranslateRule::none;
        else bad_choice("start_origin|contour_centroid|area_centroid|none");
    } else if (key == "plan.rotate") {
        if (value == "ellipse_axes") cfg.plan.rotate = RotateRule::ellipse_axes;
        else if (value == "tip_vertical") cfg.plan.rotate = RotateRule::tip_vertical;
        else if (value == "none") cfg.plan.rotate = RotateRule::none;
        else bad_choice("ellipse_axes|tip_vertical|none");
    } else if (key == "family.lambda") {
        cfg.family.lambda = parse_lambda_value(value, key);
    } else if (key == "family.sectors") {
        cfg.family.sectors = static_cast<int>(parse_int_value(value, key));
    } else if (key == "family.samples") {
        cfg.family.samples = static_cast<int>(parse_int_value(value, key));
    } else if (key == "grid.lambdas") {
        GridSpec& g = cfg.grid ? *cfg.grid : cfg.grid.emplace();
        g.lambdas.clear();
        for (const std::string& item : detail::split_list(value))
            g.lambdas.push_back(parse_lambda_value(item, key));
    } else if (key == "grid.sectors") {
        GridSpec& g = cfg.grid ? *cfg.grid : cfg.grid.emplace();
        g.sector_counts.clear();
        for (const std::string& item : detail::split_list(value))
            g.sector_counts.push_back(static_cast<int>(parse_int_value(item, key)));
    } else if (key == "grid.samples") {
        GridSpec& g = cfg.grid ? *cfg.grid : cfg.grid.emplace();
        g.samples = static_cast<int>(parse_int_value(value, key));
    } else if (key == "split.train_per_class") {
        const long v = parse_int_value(value, key);
        if (v < 1) throw ValidationError("config: key 'split.train_per_class': must be >= 1");
        cfg.split.train_per_class = static_cast<int>(v);
    } else if (key == "paths.manifest") {
        cfg.manifest_path = value;
    } else if (key == "paths.in") {
        cfg.in_dir = value;
    } else if (key == "paths.out") {
        cfg.out_dir = value;
    } else if (key == "threshold") {
        const long v = parse_int_value(value, key);
        if (v < 0 || v > 255) throw ValidationError("config: key 'threshold': must be in [0,255]");
        cfg.threshold = static_cast<int>(v);
    } else if (key == "threads") {
        const long v = parse_int_value(value, key);
        if (v < 0) throw ValidationError("config: key 'threads': must be >= 0");
        cfg.threads = static_cast<unsigned>(v);
    } else if (key == "seed") {
        const long v = parse_int_value(value, key);
        if (v < 0) throw ValidationError("config: key 'seed': must be >= 0");
        cfg.seed = static_cast<unsigned long>(v);
    } else if (key == "classifier.knn_k") {
        const long v = parse_int_value(value, key);
        if (v < 1) throw ValidationError("config: key 'classifier.knn_k': must be >= 1");
        cfg.knn_k = static_cast<int>(v);
    } else if (key == "classifier.logistic_penalty") {
        const double v = parse_lambda_value(value, key);
        if (!(v >= 0.0) || std::isinf(v))
            throw ValidationError("config: key 'classifier.logistic_penalty': must be finite and >= 0");
        cfg.logistic_penalty = v;
    } else if (key == "classifier.logistic_iters") {
        const long v = parse_int_value(value, key);
        if (v < 1) throw ValidationError("config: key 'classifier.logistic_iters': must be >= 1");
        cfg.logistic_iters = static_cast<int>(v);
    } else {
        throw ValidationError("config: unknown key '" + key + "'");
    }
}

inline RunConfig parse_config_text(std::istream& in, const std::string& origin) {
    RunConfig cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ValidationError("config: " + origin + ":" + std::to_string(lineno) +
                                  ": expected 'key = value'");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty())
            throw ValidationError("config: " + origin + ":" + std::to_string(lineno) + ": empty key");
        apply_config_entry(cfg, key, value);
    }
    return cfg;
}

/// Relative paths.* values resolve against the config file's directory.
inline RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("config: cannot open " + path);
    RunConfig cfg = parse_config_text(in, path);
    const std::filesystem::path base = std::filesystem::path(path).parent_path();
    auto resolve = [&](std::string& p) {
        if (!p.empty() && std::filesystem::path(p).is_relative()) p = (base / p).string();
    };
    resolve(cfg.manifest_path);
    resolve(cfg.in_dir);
    resolve(cfg.out_dir);
    return cfg;
}

/// The family actually used by commands: the requested sample count rounded
/// to the nearest positive multiple of the sector count.
inline ParamFamily effective_family(const RunConfig& cfg) {
    ParamFamily fam = cfg.family;
    fam.samples = adapt_samples(fam.samples, fam.sectors);
    fam.validate();
    return fam;
}

} // namespace curveclock
