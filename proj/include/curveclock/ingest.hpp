#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <queue>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "curveclock/contour.hpp"
#include "curveclock/error.hpp"
#include "curveclock/metric.hpp"
#include "curveclock/parallel.hpp"

namespace curveclock {

struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels; // row-major

    std::uint8_t at(int row, int col) const {
        return pixels[static_cast<std::size_t>(row) * static_cast<std::size_t>(width) +
                      static_cast<std::size_t>(col)];
    }
};

struct BinaryMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> fg; // 1 = foreground

    bool at(int row, int col) const {
        if (row < 0 || row >= height || col < 0 || col >= width) return false;
        return fg[static_cast<std::size_t>(row) * static_cast<std::size_t>(width) +
                  static_cast<std::size_t>(col)] != 0;
    }
    void set(int row, int col, bool v) {
        fg[static_cast<std::size_t>(row) * static_cast<std::size_t>(width) +
           static_cast<std::size_t>(col)] = v ? 1 : 0;
    }
};

// ---------------------------------------------------------------- PGM I/O

namespace detail {

inline int next_pnm_token(std::istream& in, std::string& token) {
    token.clear();
    int ch;
    for (;;) {
        ch = in.get();
        if (ch == EOF) return 0;
        if (ch == '#') {
            while (ch != EOF && ch != '\n') ch = in.get();
            continue;
        }
        if (!std::isspace(ch)) break;
    }
    while (ch != EOF && !std::isspace(ch)) {
        token.push_back(static_cast<char>(ch));
        ch = in.get();
    }
    return 1;
}

inline int parse_pnm_int(std::istream& in, const std::string& what) {
    std::string tok;
    if (!next_pnm_token(in, tok)) throw ValidationError("pgm: truncated header, missing " + what);
    try {
        std::size_t pos = 0;
        const int v = std::stoi(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw ValidationError("pgm: bad " + what + " token '" + tok + "'");
    }
}

} // namespace detail

/// Decodes 8-bit grayscale PGM, both ASCII "P2" and binary "P5", maxval <= 255.
inline GrayImage read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("pgm: cannot open " + path);
    std::string magic;
    if (!detail::next_pnm_token(in, magic) || (magic != "P2" && magic != "P5"))
        throw ValidationError("pgm: " + path + " is not a P2/P5 grayscale image");
    GrayImage img;
    img.width = detail::parse_pnm_int(in, "width");
    img.height = detail::parse_pnm_int(in, "height");
    const int maxval = detail::parse_pnm_int(in, "maxval");
    if (img.width <= 0 || img.height <= 0)
        throw ValidationError("pgm: " + path + " has empty dimensions");
    if (maxval <= 0 || maxval > 255)
        throw ValidationError("pgm: " + path + " maxval must be in [1,255]");
    const std::size_t count =
        static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height);
    img.pixels.resize(count);
    if (magic == "P5") {
        // The single whitespace after maxval was consumed with the token.
        in.read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(count));
        if (static_cast<std::size_t>(in.gcount()) != count)
            throw ValidationError("pgm: " + path + " truncated pixel data");
    } else {
        for (std::size_t i = 0; i < count; ++i) {
            const int v = detail::parse_pnm_int(in, "pixel");
            if (v < 0 || v > maxval)
                throw ValidationError("pgm: " + path + " pixel out of range");
            img.pixels[i] = static_cast<std::uint8_t>(v);
        }
    }
    return img;
}

inline void write_pgm(const GrayImage& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("pgm: cannot write " + path);
    out << "P5\n" << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.pixels.data()),
              static_cast<std::streamsize>(img.pixels.size()));
}

// ------------------------------------------------------------- binarize

/// Foreground = intensity strictly below the threshold (dark shapes on a
/// light background). The foreground must be a nonempty proper subset.
inline BinaryMask binarize(const GrayImage& img, int threshold = 128) {
    if (threshold < 0 || threshold > 255)
        throw ValidationError("binarize: threshold must be in [0,255]");
    BinaryMask mask;
    mask.width = img.width;
    mask.height = img.height;
    mask.fg.resize(img.pixels.size());
    std::size_t count = 0;
    for (std::size_t i = 0; i < img.pixels.size(); ++i) {
        const bool f = img.pixels[i] < threshold;
        mask.fg[i] = f ? 1 : 0;
        count += f ? 1 : 0;
    }
    if (count == 0) throw NumericError("binarize: empty foreground (threshold too low?)");
    if (count == img.pixels.size())
        throw NumericError("binarize: full-image foreground (threshold too high?)");
    return mask;
}

// ------------------------------------------------------- boundary tracing

namespace detail {

/// Largest 8-connected foreground component; ties resolve to the first in
/// scan order.
inline BinaryMask largest_component(const BinaryMask& mask) {
    BinaryMask out;
    out.width = mask.width;
    out.height = mask.height;
    out.fg.assign(mask.fg.size(), 0);
    std::vector<int> label(mask.fg.size(), -1);
    int best_label = -1;
    std::size_t best_size = 0;
    int next_label = 0;
    std::vector<std::pair<int, int>> stack;
    for (int r = 0; r < mask.height; ++r) {
        for (int c = 0; c < mask.width; ++c) {
            const std::size_t idx = static_cast<std::size_t>(r) * mask.width + c;
            if (!mask.fg[idx] || label[idx] >= 0) continue;
            std::size_t size = 0;
            stack.push_back({r, c});
            label[idx] = next_label;
            while (!stack.empty()) {
                const auto [pr, pc] = stack.back();
                stack.pop_back();
                ++size;
                for (int dr = -1; dr <= 1; ++dr) {
                    for (int dc = -1; dc <= 1; ++dc) {
                        if (dr == 0 && dc == 0) continue;
                        const int nr = pr + dr, nc = pc + dc;
                        if (!mask.at(nr, nc)) continue;
                        const std::size_t nidx = static_cast<std::size_t>(nr) * mask.width + nc;
                        if (label[nidx] >= 0) continue;
                        label[nidx] = next_label;
                        stack.push_back({nr, nc});
                    }
                }
            }
            if (size > best_size) { best_size = size; best_label = next_label; }
            ++next_label;
        }
    }
    if (best_label < 0) throw NumericError("trace_boundary: no foreground component");
    for (std::size_t i = 0; i < label.size(); ++i)
        if (label[i] == best_label) out.fg[i] = 1;
    return out;
}

/// Straight-through collinear vertices pruned (turn angle ~ 0); reversal
/// spikes are kept so self-touching traces fail validation downstream.
inline std::vector<Vec2> prune_collinear(std::vector<Vec2> pts) {
    bool changed = true;
    while (changed && pts.size() > 3) {
        changed = false;
        std::vector<Vec2> next;
        next.reserve(pts.size());
        const std::size_t n = pts.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2& prev = pts[(i + n - 1) % n];
            const Vec2& cur = pts[i];
            const Vec2& nxt = pts[(i + 1) % n];
            const Vec2 a = cur - prev, b = nxt - cur;
            const double scale = norm(a) * norm(b);
            if (scale > 0.0 && std::abs(cross(a, b)) < 1e-12 * scale && dot(a, b) > 0.0) {
                changed = true;
                continue;
            }
            next.push_back(cur);
        }
        pts.swap(next);
    }
    return pts;
}

} // namespace detail

/// Moore-neighbor tracing (8-connectivity, Jacob's stopping criterion) of the
/// largest foreground component's outer boundary. Vertices are pixel centers
/// mapped as (x = col, y = height-1-row) so the image's visual up is +y.
/// Collinear duplicates are pruned; the result must satisfy the full contour
/// invariants (components that are one pixel thin trace back over themselves
/// and fail as degenerate).
inline Contour trace_boundary(const BinaryMask& raw_mask) {
    const BinaryMask mask = detail::largest_component(raw_mask);

    int sr = -1, sc = -1;
    for (int r = 0; r < mask.height && sr < 0; ++r)
        for (int c = 0; c < mask.width; ++c)
            if (mask.at(r, c)) { sr = r; sc = c; break; }
    if (sr < 0) throw NumericError("trace_boundary: empty mask");

    // Clockwise Moore neighborhood in image coordinates (row down):
    // W, NW, N, NE, E, SE, S, SW.
    static constexpr int kDr[8] = {0, -1, -1, -1, 0, 1, 1, 1};
    static constexpr int kDc[8] = {-1, -1, 0, 1, 1, 1, 0, -1};

    // After entering a pixel by moving in direction d, the clockwise scan
    // resumes at the last background pixel examined around the previous
    // pixel; seen from the new pixel that is always the cardinal direction
    // ((d/2)*2 + 6) mod 8.
    auto resume_dir = [](int d) { return ((d / 2) * 2 + 6) % 8; };
    auto next_move = [&](int r, int c, int from) {
        for (int s = 1; s <= 8; ++s) {
            const int cand = (from + s) % 8;
            if (mask.at(r + kDr[cand], c + kDc[cand])) return cand;
        }
        return -1;
    };

    // The scan entered the start pixel from the west.
    const int first_dir = next_move(sr, sc, 0);
    if (first_dir < 0)
        throw NumericError("trace_boundary: degenerate single-pixel component");

    std::vector<std::pair<int, int>> boundary;
    boundary.push_back({sr, sc});
    int dir = first_dir;
    int pr = sr + kDr[dir];
    int pc = sc + kDc[dir];
    const std::size_t guard = 8 * mask.fg.size() + 16;
    std::size_t steps = 0;
    for (;;) {
        const int nxt = next_move(pr, pc, resume_dir(dir));
        if (nxt < 0) throw NumericError("trace_boundary: dead end while tracing");
        // The walk is determined by (pixel, exit move); repeating the very
        // first state means the boundary is complete (Jacob's criterion).
        if (pr == sr && pc == sc && nxt == first_dir) break;
        boundary.push_back({pr, pc});
        dir = nxt;
        pr += kDr[dir];
        pc += kDc[dir];
        if (++steps > guard) throw NumericError("trace_boundary: tracing did not terminate");
    }

    std::vector<Vec2> pts;
    pts.reserve(boundary.size());
    for (const auto& [r, c] : boundary)
        pts.push_back({static_cast<double>(c), static_cast<double>(mask.height - 1 - r)});
    pts = detail::prune_collinear(std::move(pts));

    Contour out{std::move(pts)};
    try {
        validate_simple_contour(out, "trace_boundary");
    } catch (const ValidationError& e) {
        throw NumericError(std::string("trace_boundary: degenerate contour (") + e.what() + ")");
    }
    return out;
}

// ------------------------------------------------------------ contour CSV

/// One "x,y" pair per line at 17 significant digits (lossless round-trip),
/// LF endings, with a leading "x,y" header.
inline void write_contour_csv(const Contour& c, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("write_contour_csv: cannot write " + path);
    out << "x,y\n";
    char buf[80];
    for (const Vec2& p : c.points) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", p.x, p.y);
        out << buf;
    }
}

inline Contour read_contour_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("read_contour_csv: cannot open " + path);
    Contour c;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (lineno == 1 && line == "x,y") continue;
        const std::size_t comma = line.find(',');
        if (comma == std::string::npos)
            throw ValidationError("read_contour_csv: " + path + ":" + std::to_string(lineno) +
                                  ": expected 'x,y'");
        try {
            std::size_t px = 0, py = 0;
            const std::string xs = line.substr(0, comma), ys = line.substr(comma + 1);
            const double x = std::stod(xs, &px);
            const double y = std::stod(ys, &py);
            if (px != xs.size() || py != ys.size()) throw std::invalid_argument(line);
            if (!std::isfinite(x) || !std::isfinite(y)) throw std::invalid_argument(line);
            c.points.push_back({x, y});
        } catch (const std::exception&) {
            throw ValidationError("read_contour_csv: " + path + ":" + std::to_string(lineno) +
                                  ": malformed row '" + line + "'");
        }
    }
    validate_simple_contour(c, "read_contour_csv: " + path);
    return c;
}

// --------------------------------------------------------------- manifest

struct ManifestEntry {
    std::string path;     // as written in the manifest
    std::string resolved; // absolute/relative path on disk
    int class_id = 0;
    std::string class_name;
};

struct DatasetManifest {
    std::vector<ManifestEntry> entries;
    std::vector<std::string> class_names; // index = class id
    std::vector<std::string> warnings;

    int class_count() const { return static_cast<int>(class_names.size()); }
};

/// Header "path,class_id,class_name", one row per sample. Paths resolve
/// relative to `base_dir` (defaults to the manifest's directory). Entries are
/// sorted by path; class ids must be dense in [0, K).
inline DatasetManifest read_manifest(const std::string& path, const std::string& base_dir = "") {
    std::ifstream in(path);
    if (!in) throw ValidationError("manifest: cannot open " + path);
    const std::filesystem::path base =
        base_dir.empty() ? std::filesystem::path(path).parent_path() : std::filesystem::path(base_dir);

    DatasetManifest mf;
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("manifest: " + path + " is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "path,class_id,class_name")
        throw ValidationError("manifest: " + path + ": expected header 'path,class_id,class_name'");

    std::size_t lineno = 1;
    int max_id = -1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::size_t c1 = line.find(',');
        const std::size_t c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos)
            throw ValidationError("manifest: " + path + ":" + std::to_string(lineno) +
                                  ": expected 'path,class_id,class_name'");
        ManifestEntry e;
        e.path = line.substr(0, c1);
        e.class_name = line.substr(c2 + 1);
        const std::string ids = line.substr(c1 + 1, c2 - c1 - 1);
        try {
            std::size_t pos = 0;
            e.class_id = std::stoi(ids, &pos);
            if (pos != ids.size() || e.class_id < 0) throw std::invalid_argument(ids);
        } catch (const std::exception&) {
            throw ValidationError("manifest: " + path + ":" + std::to_string(lineno) +
                                  ": bad class id '" + ids + "'");
        }
        e.resolved = (base / e.path).string();
        max_id = std::max(max_id, e.class_id);
        mf.entries.push_back(std::move(e));
    }
    if (mf.entries.empty()) throw ValidationError("manifest: " + path + " has no entries");

    std::sort(mf.entries.begin(), mf.entries.end(),
              [](const ManifestEntry& a, const ManifestEntry& b) { return a.path < b.path; });
    for (std::size_t i = 1; i < mf.entries.size(); ++i)
        if (mf.entries[i].path == mf.entries[i - 1].path)
            throw ValidationError("manifest: duplicate path " + mf.entries[i].path);

    mf.class_names.assign(static_cast<std::size_t>(max_id) + 1, "");
    std::vector<std::size_t> counts(static_cast<std::size_t>(max_id) + 1, 0);
    for (const ManifestEntry& e : mf.entries) {
        auto& name = mf.class_names[static_cast<std::size_t>(e.class_id)];
        if (name.empty()) name = e.class_name;
        else if (name != e.class_name)
            throw ValidationError("manifest: class " + std::to_string(e.class_id) +
                                  " has conflicting names '" + name + "' and '" + e.class_name + "'");
        ++counts[static_cast<std::size_t>(e.class_id)];
    }
    for (int k = 0; k <= max_id; ++k)
        if (counts[static_cast<std::size_t>(k)] == 0)
            throw ValidationError("manifest: class ids not dense, class " + std::to_string(k) +
                                  " has no samples");
    const std::size_t first_count = counts[0];
    for (int k = 1; k <= max_id; ++k)
        if (counts[static_cast<std::size_t>(k)] != first_count) {
            mf.warnings.push_back("class sample counts differ (class 0 has " +
                                  std::to_string(first_count) + ", class " + std::to_string(k) +
                                  " has " + std::to_string(counts[static_cast<std::size_t>(k)]) + ")");
            break;
        }
    return mf;
}

// ------------------------------------------------------------ dataset load

struct LoadedDataset {
    LabeledDataset data; // raw contours, pre-canonicalization
    std::vector<std::string> paths;
    std::vector<std::string> class_names;
};

inline bool has_extension(const std::string& path, const char* ext) {
    std::string e = std::filesystem::path(path).extension().string();
    std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return std::tolower(c); });
    return e == ext;
}

inline Contour load_contour_file(const std::string& resolved, int threshold) {
    if (has_extension(resolved, ".csv")) return read_contour_csv(resolved);
    if (has_extension(resolved, ".pgm")) return trace_boundary(binarize(read_pgm(resolved), threshold));
    throw ValidationError("load_dataset: unsupported file type " + resolved +
                          " (expected .csv or .pgm)");
}

/// Loads every manifest entry (tracing images as needed) in sorted-path
/// order. Loads run in parallel; order and results are deterministic.
inline LoadedDataset load_dataset(const std::string& manifest_path, int threshold = 128,
                                  unsigned threads = 0, const std::string& base_dir = "",
                                  std::vector<std::string>* warnings = nullptr) {
    const DatasetManifest mf = read_manifest(manifest_path, base_dir);
    if (warnings) *warnings = mf.warnings;

    LoadedDataset out;
    out.class_names = mf.class_names;
    out.data.class_count = mf.class_count();
    out.data.contours.resize(mf.entries.size());
    out.data.labels.resize(mf.entries.size());
    out.paths.resize(mf.entries.size());
    parallel_for(mf.entries.size(), threads, [&](std::size_t i) {
        const ManifestEntry& e = mf.entries[i];
        try {
            out.data.contours[i] = load_contour_file(e.resolved, threshold);
        } catch (const NumericError& err) {
            throw NumericError(e.path + ": " + err.what());
        } catch (const ValidationError& err) {
            throw ValidationError(e.path + ": " + err.what());
        }
        out.data.labels[i] = e.class_id;
        out.paths[i] = e.path;
    });
    return out;
}

} // namespace curveclock
