#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "curveclock/contour.hpp"
#include "curveclock/error.hpp"
#include "curveclock/geometry.hpp"

namespace curveclock {

enum class DirectionRule { ccw, none };
enum class StartRule { max_y, none };
enum class ScaleRule { unit_length, unit_area, none };
enum class TranslateRule { start_origin, contour_centroid, area_centroid, none };
enum class RotateRule { ellipse_axes, tip_vertical, none };

/// Standardization plan. Defaults are the selected steps: counterclockwise
/// travel, start at the topmost point, unit length, area centroid at the
/// origin, tip straight above the centroid. Steps run in the order
/// direction -> start -> scale -> translate -> rotate, with the start rule
/// re-applied after a rotation step so vertex 0 is the topmost point of the
/// final pose.
struct NormalizationPlan {
    DirectionRule direction = DirectionRule::ccw;
    StartRule start = StartRule::max_y;
    ScaleRule scale = ScaleRule::unit_length;
    TranslateRule translate = TranslateRule::area_centroid;
    RotateRule rotate = RotateRule::tip_vertical;
};

/// Flips clockwise contours (keeping vertex 0) so the signed area is positive.
inline Contour ensure_ccw(const Contour& c) {
    const double area = signed_area(c);
    const double len = length(c);
    if (std::abs(area) <= 1e-14 * len * len)
        throw NumericError("ensure_ccw: degenerate contour with zero signed area");
    return area > 0.0 ? c : reversed(c);
}

/// Cyclic rotation making the vertex with maximum y the new vertex 0.
/// Ties break toward smaller x, then smaller original index.
inline Contour set_start_max_y(const Contour& c) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < c.size(); ++i) {
        if (c[i].y > c[best].y || (c[i].y == c[best].y && c[i].x < c[best].x))
            best = i;
    }
    return cyclic_shift(c, best);
}

inline Contour scale_normalize(const Contour& c, ScaleRule mode) {
    switch (mode) {
    case ScaleRule::unit_length:
        return scaled(c, 1.0 / length(c));
    case ScaleRule::unit_area: {
        const double area = std::abs(signed_area(c));
        const double len = length(c);
        if (area <= 1e-14 * len * len)
            throw NumericError("scale_normalize: degenerate contour with zero enclosed area");
        return scaled(c, 1.0 / std::sqrt(area));
    }
    case ScaleRule::none:
        return c;
    }
    throw ValidationError("scale_normalize: unknown mode");
}

inline Contour translate_normalize(const Contour& c, TranslateRule mode) {
    switch (mode) {
    case TranslateRule::start_origin:
        return translated(c, Vec2{0, 0} - c[0]);
    case TranslateRule::contour_centroid:
        return translated(c, Vec2{0, 0} - contour_centroid(c));
    case TranslateRule::area_centroid:
        return translated(c, Vec2{0, 0} - area_centroid(c));
    case TranslateRule::none:
        return c;
    }
    throw ValidationError("translate_normalize: unknown mode");
}

namespace detail {

inline std::size_t farthest_vertex(const Contour& c, const Vec2& from) {
    std::size_t best = 0;
    double best_d = norm2(c[0] - from);
    for (std::size_t i = 1; i < c.size(); ++i) {
        const double d = norm2(c[i] - from);
        if (d > best_d) { best_d = d; best = i; }
    }
    return best;
}

} // namespace detail

/// Orientation standardization.
///
/// tip_vertical rotates about the area centroid so the farthest vertex from
/// the centroid (the tip) ends up straight above it; placing the farthest
/// vertex up makes it the topmost point of the result, which is the fixed
/// point of "centroid vertically below the highest point" and is invariant
/// under similarity transforms of the input.
///
/// ellipse_axes rotates about the origin (the translation anchor) so the
/// approximating ellipse has its minor axis horizontal and major axis
/// vertical; the 180-degree ambiguity resolves toward the pose with the tip
/// in the upper half plane.
inline Contour rotate_normalize(const Contour& c, RotateRule mode) {
    switch (mode) {
    case RotateRule::none:
        return c;
    case RotateRule::tip_vertical: {
        const Vec2 center = area_centroid(c);
        const std::size_t tip = detail::farthest_vertex(c, center);
        const Vec2 d = c[tip] - center;
        if (norm(d) <= 1e-12 * bounding_box(c).diagonal())
            throw NumericError("rotate_normalize: tip coincides with the area centroid");
        const double angle = std::numbers::pi / 2.0 - std::atan2(d.y, d.x);
        return rotated(c, center, angle);
    }
    case RotateRule::ellipse_axes: {
        const EllipseFrame frame = best_fit_ellipse(c); // throws when ambiguous
        const Vec2 anchor{0, 0};
        const double theta = std::atan2(frame.major_axis.y, frame.major_axis.x);
        Contour out = rotated(c, anchor, std::numbers::pi / 2.0 - theta);
        const Vec2 tip = out[detail::farthest_vertex(out, anchor)] - anchor;
        if (tip.y < 0.0 || (tip.y == 0.0 && tip.x < 0.0))
            out = rotated(out, anchor, std::numbers::pi);
        return out;
    }
    }
    throw ValidationError("rotate_normalize: unknown mode");
}

/// Runs the standardization steps of `plan` in order, tagging errors with the
/// failing step.
inline Contour apply_plan(const Contour& c, const NormalizationPlan& plan) {
    auto step = [](const char* name, auto&& fn) -> Contour {
        try {
            return fn();
        } catch (const NumericError& e) {
            throw NumericError(std::string(name) + ": " + e.what());
        } catch (const ValidationError& e) {
            throw ValidationError(std::string(name) + ": " + e.what());
        }
    };
    Contour out = c;
    if (plan.direction == DirectionRule::ccw)
        out = step("direction", [&] { return ensure_ccw(out); });
    if (plan.start == StartRule::max_y)
        out = step("start", [&] { return set_start_max_y(out); });
    out = step("scale", [&] { return scale_normalize(out, plan.scale); });
    out = step("translate", [&] { return translate_normalize(out, plan.translate); });
    if (plan.rotate != RotateRule::none) {
        out = step("rotate", [&] { return rotate_normalize(out, plan.rotate); });
        if (plan.start == StartRule::max_y)
            out = step("start", [&] { return set_start_max_y(out); });
    }
    return out;
}

} // namespace curveclock
