#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "curveclock/contour.hpp"
#include "curveclock/error.hpp"
#include "curveclock/vec2.hpp"

namespace curveclock {

/// Principal axes of the arc-length-weighted second moment of a contour.
/// Axes are orthonormal, major_len >= minor_len >= 0. Axis signs carry the
/// usual 180-degree ambiguity.
struct EllipseFrame {
    Vec2 center;
    Vec2 major_axis;
    Vec2 minor_axis;
    double major_len = 0.0;
    double minor_len = 0.0;
};

inline double length(const Contour& c) {
    double sum = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) sum += norm(c.edge(i));
    return sum;
}

/// Shoelace sum; positive iff the contour is traveled counterclockwise.
inline double signed_area(const Contour& c) {
    double sum = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const Vec2& a = c[i];
        const Vec2& b = c.wrapped(i + 1);
        sum += a.x * b.y - b.x * a.y;
    }
    return 0.5 * sum;
}

/// Arc-length-weighted mean of the curve (midpoint rule per edge).
inline Vec2 contour_centroid(const Contour& c) {
    Vec2 acc{0, 0};
    double total = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const Vec2& a = c[i];
        const Vec2& b = c.wrapped(i + 1);
        const double len = distance(a, b);
        acc += (a + b) * (0.5 * len);
        total += len;
    }
    return acc / total;
}

/// Centroid of the enclosed area (shoelace moments); orientation independent.
inline Vec2 area_centroid(const Contour& c) {
    const double area = signed_area(c);
    const double len = length(c);
    if (std::abs(area) <= 1e-14 * len * len)
        throw NumericError("area_centroid: degenerate contour with zero enclosed area");
    double cx = 0.0, cy = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const Vec2& a = c[i];
        const Vec2& b = c.wrapped(i + 1);
        const double w = a.x * b.y - b.x * a.y;
        cx += (a.x + b.x) * w;
        cy += (a.y + b.y) * w;
    }
    const double inv = 1.0 / (6.0 * area);
    return {cx * inv, cy * inv};
}

/// Signed turning angle at vertex i between the incoming and outgoing edge,
/// positive for left turns.
inline double turning_angle(const Contour& c, std::size_t i) {
    const std::size_t n = c.size();
    const Vec2 e_in = c[i] - c[(i + n - 1) % n];
    const Vec2 e_out = c.wrapped(i + 1) - c[i];
    return std::atan2(cross(e_in, e_out), dot(e_in, e_out));
}

/// Per-vertex signed curvature: turning angle divided by the mean of the two
/// adjacent edge lengths. Summed against those mean lengths this recovers the
/// total turning 2*pi exactly (up to rounding) on simple CCW contours.
inline std::vector<double> discrete_curvature(const Contour& c) {
    const std::size_t n = c.size();
    std::vector<double> kappa(n);
    std::vector<double> elen(n);
    for (std::size_t i = 0; i < n; ++i) elen[i] = norm(c.edge(i));
    for (std::size_t i = 0; i < n; ++i) {
        const double mean_len = 0.5 * (elen[(i + n - 1) % n] + elen[i]);
        kappa[i] = turning_angle(c, i) / mean_len;
    }
    return kappa;
}

/// Circular Gaussian filter on the vertex sequence, sigma in vertex units.
/// Kernel truncated at 3*sigma. sigma <= 0 returns the input unchanged.
/// Optional pre-step for curvature estimation on noisy traces; off by default
/// everywhere in the pipeline.
inline Contour gaussian_smooth(const Contour& c, double sigma) {
    if (sigma <= 0.0) return c;
    const std::size_t n = c.size();
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> kernel(2 * radius + 1);
    double ksum = 0.0;
    for (int k = -radius; k <= radius; ++k) {
        kernel[k + radius] = std::exp(-0.5 * (k / sigma) * (k / sigma));
        ksum += kernel[k + radius];
    }
    for (double& w : kernel) w /= ksum;
    Contour out;
    out.points.resize(n);
    const int ni = static_cast<int>(n);
    for (std::size_t i = 0; i < n; ++i) {
        Vec2 acc{0, 0};
        for (int k = -radius; k <= radius; ++k) {
            int j = (static_cast<int>(i) + k) % ni;
            if (j < 0) j += ni;
            acc += c[static_cast<std::size_t>(j)] * kernel[k + radius];
        }
        out.points[i] = acc;
    }
    return out;
}

/// Arc-length-weighted second-moment principal axes about the contour
/// centroid. The per-edge integral of the outer product is evaluated exactly
/// for the linear segment. Throws NumericError when the two moments agree to
/// relative 1e-9 (ambiguous ellipse, e.g. a circle).
inline EllipseFrame best_fit_ellipse(const Contour& c) {
    const Vec2 ctr = contour_centroid(c);
    double mxx = 0.0, mxy = 0.0, myy = 0.0, total = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const Vec2 a = c[i] - ctr;
        const Vec2 b = c.wrapped(i + 1) - ctr;
        const Vec2 d = b - a;
        const double len = norm(d);
        // int_0^1 (a+td)(a+td)^T dt = aa^T + (ad^T+da^T)/2 + dd^T/3
        mxx += len * (a.x * a.x + a.x * d.x + d.x * d.x / 3.0);
        myy += len * (a.y * a.y + a.y * d.y + d.y * d.y / 3.0);
        mxy += len * (a.x * a.y + 0.5 * (a.x * d.y + a.y * d.x) + d.x * d.y / 3.0);
        total += len;
    }
    mxx /= total;
    myy /= total;
    mxy /= total;

    const double half_trace = 0.5 * (mxx + myy);
    const double discr = std::sqrt(0.25 * (mxx - myy) * (mxx - myy) + mxy * mxy);
    const double lam_max = half_trace + discr;
    const double lam_min = half_trace - discr;
    if (lam_max - lam_min <= 1e-9 * (lam_max + lam_min))
        throw NumericError("best_fit_ellipse: ambiguous ellipse (equal principal moments)");

    const double theta = 0.5 * std::atan2(2.0 * mxy, mxx - myy);
    EllipseFrame f;
    f.center = ctr;
    f.major_axis = {std::cos(theta), std::sin(theta)};
    f.minor_axis = {-std::sin(theta), std::cos(theta)};
    f.major_len = std::sqrt(std::max(lam_max, 0.0));
    f.minor_len = std::sqrt(std::max(lam_min, 0.0));
    return f;
}

namespace detail {

inline double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
    const Vec2 d = b - a;
    const double len2 = norm2(d);
    if (len2 == 0.0) return distance(p, a);
    const double t = std::clamp(dot(p - a, d) / len2, 0.0, 1.0);
    return distance(p, a + d * t);
}

} // namespace detail

/// Signed winding number of the contour around p: 0 outside, +-1 inside a
/// simple contour. Throws NumericError when p lies within 1e-9 of the
/// bounding-box diagonal from an edge.
inline int winding_number(const Contour& c, const Vec2& p) {
    const double tol = 1e-9 * bounding_box(c).diagonal();
    const std::size_t n = c.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (detail::point_segment_distance(p, c[i], c.wrapped(i + 1)) <= tol)
            throw NumericError("winding_number: point lies on the contour boundary");
    }
    int wn = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = c[i];
        const Vec2& b = c.wrapped(i + 1);
        if (a.y <= p.y) {
            if (b.y > p.y && detail::orientation_sign(a, b, p) > 0) ++wn;
        } else {
            if (b.y <= p.y && detail::orientation_sign(a, b, p) < 0) --wn;
        }
    }
    return wn;
}

} // namespace curveclock
