#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "curveclock/error.hpp"
#include "curveclock/vec2.hpp"

namespace curveclock {

/// A closed polyline: vertex i connects to vertex i+1 and the last vertex
/// wraps to vertex 0. Vertex i sits at parameter t_i = i/N.
struct Contour {
    std::vector<Vec2> points;

    Contour() = default;
    explicit Contour(std::vector<Vec2> pts) : points(std::move(pts)) {}

    std::size_t size() const { return points.size(); }
    Vec2& operator[](std::size_t i) { return points[i]; }
    const Vec2& operator[](std::size_t i) const { return points[i]; }

    const Vec2& wrapped(std::size_t i) const { return points[i % points.size()]; }

    /// Directed edge i: from vertex i to vertex i+1 (mod N).
    Vec2 edge(std::size_t i) const {
        return points[(i + 1) % points.size()] - points[i];
    }
};

struct BBox {
    Vec2 lo{0, 0}, hi{0, 0};
    double diagonal() const { return distance(lo, hi); }
};

inline BBox bounding_box(const Contour& c) {
    BBox b;
    b.lo = b.hi = c[0];
    for (const Vec2& p : c.points) {
        b.lo.x = std::min(b.lo.x, p.x);
        b.lo.y = std::min(b.lo.y, p.y);
        b.hi.x = std::max(b.hi.x, p.x);
        b.hi.y = std::max(b.hi.y, p.y);
    }
    return b;
}

namespace detail {

inline int orientation_sign(const Vec2& a, const Vec2& b, const Vec2& c) {
    const double v = cross(b - a, c - a);
    return (v > 0.0) - (v < 0.0);
}

inline bool collinear_point_on_segment(const Vec2& a, const Vec2& b, const Vec2& p) {
    return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
           std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

/// Any contact between closed segments [a,b] and [c,d], endpoints included.
inline bool segments_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    const int o1 = orientation_sign(a, b, c);
    const int o2 = orientation_sign(a, b, d);
    const int o3 = orientation_sign(c, d, a);
    const int o4 = orientation_sign(c, d, b);
    if (o1 != o2 && o3 != o4) return true;
    if (o1 == 0 && collinear_point_on_segment(a, b, c)) return true;
    if (o2 == 0 && collinear_point_on_segment(a, b, d)) return true;
    if (o3 == 0 && collinear_point_on_segment(c, d, a)) return true;
    if (o4 == 0 && collinear_point_on_segment(c, d, b)) return true;
    return false;
}

} // namespace detail

/// Checks N >= 3 and that no edge has zero length.
inline void validate_contour(const Contour& c, const std::string& where = "contour") {
    const std::size_t n = c.size();
    if (n < 3) throw ValidationError(where + ": needs at least 3 points, got " + std::to_string(n));
    for (std::size_t i = 0; i < n; ++i) {
        if (c[i] == c.wrapped(i + 1))
            throw ValidationError(where + ": zero-length edge at vertex " + std::to_string(i));
    }
}

/// True iff no two non-adjacent edges touch. O(N^2) pair sweep with early exit.
inline bool is_simple(const Contour& c) {
    const std::size_t n = c.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
            if (adjacent) continue;
            if (detail::segments_intersect(c[i], c.wrapped(i + 1), c[j], c.wrapped(j + 1)))
                return false;
        }
    }
    return true;
}

/// Full ingestion check: basic invariants plus simplicity.
inline void validate_simple_contour(const Contour& c, const std::string& where = "contour") {
    validate_contour(c, where);
    if (!is_simple(c)) throw ValidationError(where + ": polyline is self-intersecting");
}

inline Contour translated(const Contour& c, const Vec2& offset) {
    Contour out = c;
    for (Vec2& p : out.points) p += offset;
    return out;
}

inline Contour scaled(const Contour& c, double factor) {
    Contour out = c;
    for (Vec2& p : out.points) p *= factor;
    return out;
}

inline Contour rotated(const Contour& c, const Vec2& center, double angle) {
    Contour out = c;
    for (Vec2& p : out.points) p = rotate_about(p, center, angle);
    return out;
}

/// Reverses the direction of travel keeping vertex 0 in place.
inline Contour reversed(const Contour& c) {
    Contour out;
    const std::size_t n = c.size();
    out.points.reserve(n);
    out.points.push_back(c[0]);
    for (std::size_t k = 1; k < n; ++k) out.points.push_back(c[n - k]);
    return out;
}

/// Cyclic index rotation making vertex `start` the new vertex 0.
inline Contour cyclic_shift(const Contour& c, std::size_t start) {
    Contour out = c;
    std::rotate(out.points.begin(), out.points.begin() + static_cast<std::ptrdiff_t>(start % c.size()),
                out.points.end());
    return out;
}

} // namespace curveclock
