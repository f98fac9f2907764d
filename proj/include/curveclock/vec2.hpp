#pragma once

#include <cmath>

namespace curveclock {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
    Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
    bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }
    bool operator!=(const Vec2& o) const { return !(*this == o); }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }

/// z-component of the 3D cross product of (a,0) and (b,0).
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }

inline double norm2(const Vec2& v) { return v.x * v.x + v.y * v.y; }
inline double norm(const Vec2& v) { return std::hypot(v.x, v.y); }

inline double distance(const Vec2& a, const Vec2& b) { return norm(a - b); }

inline Vec2 lerp(const Vec2& a, const Vec2& b, double t) {
    return {a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
}

/// Counterclockwise rotation by `angle` radians about `center`.
inline Vec2 rotate_about(const Vec2& p, const Vec2& center, double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    const Vec2 d = p - center;
    return {center.x + c * d.x - s * d.y, center.y + s * d.x + c * d.y};
}

} // namespace curveclock
