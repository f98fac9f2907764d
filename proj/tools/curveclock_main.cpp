#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "curveclock/config.hpp"
#include "curveclock/pipeline.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::string out_dir;
    int threads = -1;
    int threshold = -1;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool with_config) {
    if (with_config)
        cmd->add_option("--config", flags.config_path, "Run configuration file (key = value)")
            ->required();
    cmd->add_option("--out", flags.out_dir, "Output directory");
    cmd->add_option("--threads", flags.threads, "Worker threads (0 = auto)");
    cmd->add_option("--threshold", flags.threshold, "Binarization threshold (0-255)");
}

curveclock::RunConfig load_config(const CommonFlags& flags) {
    curveclock::RunConfig cfg;
    if (!flags.config_path.empty()) cfg = curveclock::parse_config_file(flags.config_path);
    if (!flags.out_dir.empty()) cfg.out_dir = flags.out_dir;
    if (flags.threads >= 0) cfg.threads = static_cast<unsigned>(flags.threads);
    if (flags.threshold >= 0) {
        if (flags.threshold > 255) throw curveclock::ValidationError("--threshold must be in [0,255]");
        cfg.threshold = flags.threshold;
    }
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"curveclock: canonical parameterization, section distances and metric "
                 "learning for closed plane curves"};
    app.require_subcommand(1);

    CommonFlags extract_flags, pipeline_flags, grid_flags, classify_flags;
    std::string extract_manifest;

    CLI::App* extract = app.add_subcommand("extract", "Trace a manifest of images into contour CSVs");
    extract->add_option("manifest", extract_manifest, "Manifest CSV (path,class_id,class_name)")
        ->required();
    add_common(extract, extract_flags, false);

    CLI::App* pipeline = app.add_subcommand(
        "pipeline", "Normalize + reparameterize + distance matrix + Dunn index in one pass");
    add_common(pipeline, pipeline_flags, true);

    CLI::App* grid = app.add_subcommand("gridsearch", "Dunn table over the (lambda, n) grid");
    add_common(grid, grid_flags, true);

    CLI::App* classify = app.add_subcommand("classify", "KNN and logistic accuracy on the test split");
    add_common(classify, classify_flags, true);

    CLI11_PARSE(app, argc, argv);

    try {
        if (extract->parsed()) {
            curveclock::RunConfig cfg = load_config(extract_flags);
            const std::string out_dir = extract_flags.out_dir.empty() ? "." : extract_flags.out_dir;
            return curveclock::cmd_extract(extract_manifest, out_dir, cfg.threshold, cfg.threads);
        }
        if (pipeline->parsed()) return curveclock::cmd_pipeline(load_config(pipeline_flags));
        if (grid->parsed()) return curveclock::cmd_gridsearch(load_config(grid_flags));
        if (classify->parsed()) return curveclock::cmd_classify(load_config(classify_flags));
    } catch (const curveclock::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const curveclock::NumericError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
