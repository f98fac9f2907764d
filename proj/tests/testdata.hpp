#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "curveclock/ingest.hpp"
#include "testutil.hpp"

namespace testdata {

namespace fs = std::filesystem;
using curveclock::Contour;

inline fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

inline void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

struct SyntheticDataset {
    fs::path dir;
    fs::path manifest;
};

/// Circles vs squares under random similarity transforms, written as contour
/// CSVs plus a manifest. With identical=true every class member is the same
/// contour (degenerate clustering).
inline SyntheticDataset circles_squares_on_disk(const std::string& name, int per_class,
                                                unsigned seed, bool identical = false) {
    SyntheticDataset ds;
    ds.dir = fresh_dir(name);
    std::mt19937 rng(seed);
    std::string manifest = "path,class_id,class_name\n";
    char buf[64];
    for (int i = 0; i < per_class; ++i) {
        Contour c = testutil::regular_polygon(96);
        if (!identical) c = testutil::apply_similarity(c, testutil::random_similarity(rng));
        std::snprintf(buf, sizeof(buf), "circle_%03d.csv", i);
        curveclock::write_contour_csv(c, (ds.dir / buf).string());
        manifest += std::string(buf) + ",0,circle\n";
    }
    for (int i = 0; i < per_class; ++i) {
        Contour c = testutil::unit_square();
        if (!identical) c = testutil::apply_similarity(c, testutil::random_similarity(rng));
        std::snprintf(buf, sizeof(buf), "square_%03d.csv", i);
        curveclock::write_contour_csv(c, (ds.dir / buf).string());
        manifest += std::string(buf) + ",1,square\n";
    }
    ds.manifest = ds.dir / "manifest.csv";
    write_text_file(ds.manifest, manifest);
    return ds;
}

inline std::string read_file_bytes(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

} // namespace testdata
