#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "curveclock/config.hpp"
#include "curveclock/ingest.hpp"
#include "curveclock/learn.hpp"
#include "curveclock/metric.hpp"
#include "curveclock/normalize.hpp"
#include "curveclock/parallel.hpp"
#include "curveclock/reparam.hpp"

namespace curveclock {

inline std::string fmt10(double v) {
    char buf[48];
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

/// First split.train_per_class samples of each class (sorted file order) vs
/// the remainder.
inline void split_dataset(const LoadedDataset& all, const SplitSpec& split,
                          LoadedDataset& train, LoadedDataset& test) {
    train = LoadedDataset{};
    test = LoadedDataset{};
    train.class_names = test.class_names = all.class_names;
    train.data.class_count = test.data.class_count = all.data.class_count;
    std::vector<int> taken(static_cast<std::size_t>(all.data.class_count), 0);
    for (std::size_t i = 0; i < all.data.size(); ++i) {
        const int label = all.data.labels[i];
        LoadedDataset& dst =
            taken[static_cast<std::size_t>(label)]++ < split.train_per_class ? train : test;
        dst.data.contours.push_back(all.data.contours[i]);
        dst.data.labels.push_back(label);
        dst.paths.push_back(all.paths[i]);
    }
}

/// plan + family applied to every contour: normalize, pick the clock
/// reference point, reparameterize.
inline LabeledDataset canonicalize(const LabeledDataset& raw, const NormalizationPlan& plan,
                                   const ParamFamily& fam, unsigned threads = 0) {
    LabeledDataset out;
    out.labels = raw.labels;
    out.class_count = raw.class_count;
    out.contours.resize(raw.size());
    parallel_for(raw.size(), threads, [&](std::size_t i) {
        const Contour normalized = apply_plan(raw.contours[i], plan);
        out.contours[i] = curvature_clock_resample(normalized, fam, reference_point(normalized));
    });
    return out;
}

inline void write_distance_matrix_csv(const DistanceMatrix& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path);
    for (std::size_t i = 0; i < m.size; ++i) {
        for (std::size_t j = 0; j < m.size; ++j) {
            if (j) out << ',';
            out << fmt10(m(i, j));
        }
        out << '\n';
    }
}

/// Table-shaped CSV: rows = sector counts, columns = lambdas.
inline void write_grid_csv(const GridResult& g, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path);
    out << "n";
    for (double l : g.lambdas) out << ',' << fmt10(l);
    out << '\n';
    for (std::size_t row = 0; row < g.cells.size(); ++row) {
        out << g.sector_counts[row];
        for (const GridCell& cell : g.cells[row])
            out << ',' << (cell.ok ? fmt10(cell.dunn) : std::string("error"));
        out << '\n';
    }
}

inline void write_predictions_csv(const std::string& path, const std::vector<std::string>& names,
                                  const std::vector<int>& truth, const std::vector<int>& pred) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path);
    out << "path,true,pred\n";
    for (std::size_t i = 0; i < names.size(); ++i)
        out << names[i] << ',' << truth[i] << ',' << pred[i] << '\n';
}

namespace detail {

inline std::filesystem::path contour_output_path(const std::filesystem::path& out_dir,
                                                 const std::string& entry_path) {
    std::filesystem::path rel(entry_path);
    rel.replace_extension(".csv");
    return out_dir / rel;
}

} // namespace detail

/// Traces every manifest entry into a contour CSV under out_dir (layout
/// mirrored from the manifest paths). Per-file failures are reported and do
/// not stop the run; any failure makes the exit code 1.
inline int cmd_extract(const std::string& manifest, const std::string& out_dir, int threshold,
                       unsigned threads = 0, const std::string& in_dir = "",
                       std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    const DatasetManifest mf = read_manifest(manifest, in_dir);
    for (const std::string& w : mf.warnings) err << "warning: " << w << '\n';

    struct FileResult {
        bool ok = false;
        std::size_t vertices = 0;
        std::string error;
    };
    std::vector<FileResult> results(mf.entries.size());
    parallel_for(mf.entries.size(), threads, [&](std::size_t i) {
        try {
            const Contour c = load_contour_file(mf.entries[i].resolved, threshold);
            const std::filesystem::path dst =
                detail::contour_output_path(out_dir, mf.entries[i].path);
            std::filesystem::create_directories(dst.parent_path());
            write_contour_csv(c, dst.string());
            results[i].ok = true;
            results[i].vertices = c.size();
        } catch (const std::exception& e) {
            results[i].error = e.what();
        }
    });

    bool any_failed = false;
    for (std::size_t i = 0; i < results.size(); ++i) {
        if (results[i].ok) {
            out << mf.entries[i].path << " " << results[i].vertices << '\n';
        } else {
            any_failed = true;
            err << mf.entries[i].path << " ERROR: " << results[i].error << '\n';
        }
    }
    return any_failed ? 1 : 0;
}

/// normalize + reparameterize + distance matrix + Dunn in one deterministic
/// pass over the training split. Writes contours/*.csv, distmat.csv, dunn.txt.
inline int cmd_pipeline(const RunConfig& cfg, std::ostream& out = std::cout,
                        std::ostream& err = std::cerr) {
    if (cfg.manifest_path.empty()) throw ValidationError("config: key 'paths.manifest' is required");
    std::vector<std::string> warnings;
    const LoadedDataset all =
        load_dataset(cfg.manifest_path, cfg.threshold, cfg.threads, cfg.in_dir, &warnings);
    for (const std::string& w : warnings) err << "warning: " << w << '\n';

    LoadedDataset train, test;
    split_dataset(all, cfg.split, train, test);

    const ParamFamily fam = effective_family(cfg);
    const LabeledDataset canon = canonicalize(train.data, cfg.plan, fam, cfg.threads);

    const std::filesystem::path out_dir(cfg.out_dir.empty() ? "." : cfg.out_dir);
    std::filesystem::create_directories(out_dir / "contours");
    for (std::size_t i = 0; i < canon.size(); ++i) {
        const std::filesystem::path dst =
            detail::contour_output_path(out_dir / "contours", train.paths[i]);
        std::filesystem::create_directories(dst.parent_path());
        write_contour_csv(canon.contours[i], dst.string());
    }

    const DistanceMatrix dm = distance_matrix(canon, cfg.threads);
    write_distance_matrix_csv(dm, (out_dir / "distmat.csv").string());

    const double dunn = dunn_index(canon, cfg.threads);
    {
        std::ofstream f(out_dir / "dunn.txt", std::ios::binary);
        if (!f) throw ValidationError("cannot write dunn.txt");
        f << "dunn = " << fmt10(dunn) << '\n';
    }
    out << "dunn = " << fmt10(dunn) << '\n';
    return 0;
}

/// Dunn table over the (lambda, n) grid on the training split; writes
/// grid.csv (rows n, columns lambda) and report.txt with the argmax.
inline int cmd_gridsearch(const RunConfig& cfg, std::ostream& out = std::cout,
                          std::ostream& err = std::cerr) {
    if (cfg.manifest_path.empty()) throw ValidationError("config: key 'paths.manifest' is required");
    if (!cfg.grid) throw ValidationError("config: gridsearch needs grid.* keys");
    std::vector<std::string> warnings;
    const LoadedDataset all =
        load_dataset(cfg.manifest_path, cfg.threshold, cfg.threads, cfg.in_dir, &warnings);
    for (const std::string& w : warnings) err << "warning: " << w << '\n';

    LoadedDataset train, test;
    split_dataset(all, cfg.split, train, test);

    const GridResult grid = grid_search(train.data, cfg.plan, *cfg.grid, cfg.threads);

    const std::filesystem::path out_dir(cfg.out_dir.empty() ? "." : cfg.out_dir);
    std::filesystem::create_directories(out_dir);
    write_grid_csv(grid, (out_dir / "grid.csv").string());

    std::ofstream report(out_dir / "report.txt", std::ios::binary);
    if (!report) throw ValidationError("cannot write report.txt");
    if (!grid.has_best)
        throw NumericError("gridsearch: every grid cell failed");
    const std::string argmax_line =
        "argmax: n = " + std::to_string(grid.sector_counts[grid.best_row]) +
        ", lambda = " + fmt10(grid.lambdas[grid.best_col]) +
        ", dunn = " + fmt10(grid.best().dunn) +
        " (samples = " + std::to_string(grid.best().samples_used) + ")";
    report << argmax_line << '\n';
    for (std::size_t row = 0; row < grid.cells.size(); ++row)
        for (std::size_t col = 0; col < grid.cells[row].size(); ++col)
            if (!grid.cells[row][col].ok)
                report << "cell n = " << grid.sector_counts[row] << ", lambda = "
                       << fmt10(grid.lambdas[col]) << " failed: " << grid.cells[row][col].error
                       << '\n';
    out << argmax_line << '\n';
    return 0;
}

/// Trains on the train split, predicts the test split, reports accuracy for
/// KNN (k = 5 by default) and multinomial logistic regression.
inline int cmd_classify(const RunConfig& cfg, std::ostream& out = std::cout,
                        std::ostream& err = std::cerr) {
    if (cfg.manifest_path.empty()) throw ValidationError("config: key 'paths.manifest' is required");
    std::vector<std::string> warnings;
    const LoadedDataset all =
        load_dataset(cfg.manifest_path, cfg.threshold, cfg.threads, cfg.in_dir, &warnings);
    for (const std::string& w : warnings) err << "warning: " << w << '\n';

    LoadedDataset train, test;
    split_dataset(all, cfg.split, train, test);
    if (test.data.size() == 0)
        throw ValidationError("classify: the test split is empty (lower split.train_per_class)");

    const ParamFamily fam = effective_family(cfg);
    const LabeledDataset canon_train = canonicalize(train.data, cfg.plan, fam, cfg.threads);
    const LabeledDataset canon_test = canonicalize(test.data, cfg.plan, fam, cfg.threads);

    const std::vector<int> knn_pred = knn_classify(canon_train, canon_test, cfg.knn_k, cfg.threads);
    const LogisticModel model =
        logistic_train(canon_train, cfg.logistic_penalty, cfg.logistic_iters);
    const std::vector<int> log_pred = logistic_predict(model, canon_test);

    const double knn_acc = accuracy(canon_test.labels, knn_pred);
    const double log_acc = accuracy(canon_test.labels, log_pred);

    const std::filesystem::path out_dir(cfg.out_dir.empty() ? "." : cfg.out_dir);
    std::filesystem::create_directories(out_dir);
    write_predictions_csv((out_dir / "predictions.csv").string(), test.paths, canon_test.labels,
                          knn_pred);
    write_predictions_csv((out_dir / "predictions_logistic.csv").string(), test.paths,
                          canon_test.labels, log_pred);
    std::ofstream report(out_dir / "report.txt", std::ios::binary);
    if (!report) throw ValidationError("cannot write report.txt");
    report << "knn_accuracy = " << fmt10(knn_acc) << '\n';
    report << "logistic_accuracy = " << fmt10(log_acc) << '\n';
    out << "knn_accuracy = " << fmt10(knn_acc) << '\n';
    out << "logistic_accuracy = " << fmt10(log_acc) << '\n';
    return 0;
}

} // namespace curveclock
