#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "curveclock/contour.hpp"
#include "curveclock/vec2.hpp"

namespace testutil {

using curveclock::Contour;
using curveclock::Vec2;

constexpr double kPi = std::numbers::pi;

inline Contour regular_polygon(int n, double radius = 1.0, Vec2 center = {0, 0},
                               double phase = 0.0) {
    Contour c;
    c.points.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double a = phase + 2.0 * kPi * i / n;
        c.points.push_back({center.x + radius * std::cos(a), center.y + radius * std::sin(a)});
    }
    return c;
}

inline Contour ellipse_polygon(double a, double b, int n, Vec2 center = {0, 0}) {
    Contour c;
    c.points.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double t = 2.0 * kPi * i / n;
        c.points.push_back({center.x + a * std::cos(t), center.y + b * std::sin(t)});
    }
    return c;
}

inline Contour unit_square() {
    return Contour{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}};
}

/// Smooth star-shaped blob: radius 1 plus a few random low harmonics.
/// Simple by construction (radius stays positive).
inline Contour fourier_blob(std::mt19937& rng, int n_vertices, int harmonics = 4,
                            double amplitude = 0.12) {
    std::uniform_real_distribution<double> amp(-amplitude, amplitude);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
    std::vector<double> as(static_cast<std::size_t>(harmonics)), ph(static_cast<std::size_t>(harmonics));
    for (int h = 0; h < harmonics; ++h) {
        as[static_cast<std::size_t>(h)] = amp(rng);
        ph[static_cast<std::size_t>(h)] = phase(rng);
    }
    Contour c;
    c.points.reserve(static_cast<std::size_t>(n_vertices));
    for (int i = 0; i < n_vertices; ++i) {
        const double t = 2.0 * kPi * i / n_vertices;
        double r = 1.0;
        for (int h = 0; h < harmonics; ++h)
            r += as[static_cast<std::size_t>(h)] * std::cos((h + 1) * t + ph[static_cast<std::size_t>(h)]);
        c.points.push_back({r * std::cos(t), r * std::sin(t)});
    }
    return c;
}

/// Star-shaped polygon with rough random radii (still simple).
inline Contour random_star(std::mt19937& rng, int n_vertices, double r_min = 0.5,
                           double r_max = 1.5) {
    std::uniform_real_distribution<double> rad(r_min, r_max);
    Contour c;
    c.points.reserve(static_cast<std::size_t>(n_vertices));
    for (int i = 0; i < n_vertices; ++i) {
        const double t = 2.0 * kPi * i / n_vertices;
        const double r = rad(rng);
        c.points.push_back({r * std::cos(t), r * std::sin(t)});
    }
    return c;
}

/// Disk with a long thin protrusion (peduncle-like), CCW, simple.
inline Contour disk_with_spike(double spike_len = 2.0, double half_width = 0.03,
                               int n_arc = 240) {
    Contour c;
    // Spike along +x: out along the lower edge, around the tip, back along
    // the upper edge, then the big circular arc.
    const double r = 1.0;
    const double a0 = std::asin(half_width / r);
    c.points.push_back({r * std::cos(-a0), -half_width});
    c.points.push_back({r + spike_len, -half_width});
    c.points.push_back({r + spike_len + 2 * half_width, 0.0});
    c.points.push_back({r + spike_len, half_width});
    c.points.push_back({r * std::cos(a0), half_width});
    for (int i = 1; i < n_arc; ++i) {
        const double t = a0 + (2.0 * kPi - 2.0 * a0) * i / n_arc;
        c.points.push_back({r * std::cos(t), r * std::sin(t)});
    }
    return c;
}

/// U-shaped (non-convex, not star-shaped from the notch).
inline Contour u_shape() {
    return Contour{{{0, 0}, {5, 0}, {5, 4}, {4, 4}, {4, 1}, {1, 1}, {1, 4}, {0, 4}}};
}

/// Thick annulus sector sweeping `sweep` radians; its area centroid falls in
/// the central void for large sweeps.
inline Contour crescent(double r_in = 0.8, double r_out = 1.0, double sweep = 4.6,
                        int n_arc = 120) {
    Contour c;
    for (int i = 0; i <= n_arc; ++i) {
        const double t = sweep * i / n_arc;
        c.points.push_back({r_out * std::cos(t), r_out * std::sin(t)});
    }
    for (int i = n_arc; i >= 0; --i) {
        const double t = sweep * i / n_arc;
        c.points.push_back({r_in * std::cos(t), r_in * std::sin(t)});
    }
    return c;
}

struct Similarity {
    double angle = 0.0;
    double scale = 1.0;
    Vec2 shift{0, 0};
};

inline Similarity random_similarity(std::mt19937& rng, double max_shift = 5.0) {
    std::uniform_real_distribution<double> ang(0.0, 2.0 * kPi);
    std::uniform_real_distribution<double> sc(0.5, 2.0);
    std::uniform_real_distribution<double> sh(-max_shift, max_shift);
    return {ang(rng), sc(rng), {sh(rng), sh(rng)}};
}

inline Contour apply_similarity(const Contour& c, const Similarity& t) {
    Contour out = c;
    const double cs = std::cos(t.angle), sn = std::sin(t.angle);
    for (Vec2& p : out.points) {
        const Vec2 r{cs * p.x - sn * p.y, sn * p.x + cs * p.y};
        p = r * t.scale + t.shift;
    }
    return out;
}

inline double max_pointwise_distance(const Contour& a, const Contour& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        worst = std::max(worst, curveclock::distance(a[i], b[i]));
    return worst;
}

/// Symmetric Hausdorff distance between the two vertex sets.
inline double hausdorff(const Contour& a, const Contour& b) {
    auto one_sided = [](const Contour& p, const Contour& q) {
        double worst = 0.0;
        for (const Vec2& x : p.points) {
            double best = std::numeric_limits<double>::infinity();
            for (const Vec2& y : q.points) best = std::min(best, curveclock::distance(x, y));
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::max(one_sided(a, b), one_sided(b, a));
}

inline double bbox_diagonal(const Contour& c) { return curveclock::bounding_box(c).diagonal(); }

} // namespace testutil
