#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "curveclock/contour.hpp"
#include "curveclock/error.hpp"
#include "curveclock/geometry.hpp"
#include "curveclock/vec2.hpp"

namespace curveclock {

/// Sentinel selecting pure arc-length weighting (the lambda -> +inf limit,
/// handled symbolically: the curvature term is dropped).
inline constexpr double kArcLengthLambda = std::numeric_limits<double>::infinity();

inline bool is_arclength_lambda(double lambda) { return std::isinf(lambda) && lambda > 0; }

/// One member of the curvature-weighted clock family: weight lambda,
/// clock subdivision count (0 = no clock), output sample count.
struct ParamFamily {
    double lambda = kArcLengthLambda;
    int sectors = 0;
    int samples = 1000;

    void validate() const {
        if (samples < 3)
            throw ValidationError("ParamFamily: samples must be >= 3");
        if (sectors < 0)
            throw ValidationError("ParamFamily: sectors must be >= 0");
        if (sectors > 0 && samples % sectors != 0)
            throw ValidationError("ParamFamily: samples must be a positive multiple of sectors");
        if (std::isnan(lambda) || (!is_arclength_lambda(lambda) && lambda <= 0.0))
            throw ValidationError("ParamFamily: lambda must be > 0 or the arc-length sentinel (+inf)");
    }
};

/// A resampled contour together with the monotone map values Phi(t_i) at the
/// source vertices (size N_source + 1, phi[0] = 0, phi back at the start = 1).
struct ReparamResult {
    Contour contour;
    std::vector<double> phi;
};

namespace detail {

/// Piecewise-linear inversion: verts has E+1 points, cum has E+1 cumulative
/// values (cum[0] = 0, nondecreasing). For each increasing target in
/// [0, cum.back()) returns the interpolated position. Flat spans resolve to
/// their left endpoint.
inline std::vector<Vec2> invert_cumulative(const std::vector<Vec2>& verts,
                                           const std::vector<double>& cum,
                                           const std::vector<double>& targets) {
    std::vector<Vec2> out;
    out.reserve(targets.size());
    std::size_t j = 0;
    const std::size_t last = cum.size() - 1;
    for (double t : targets) {
        while (j + 1 < last && cum[j + 1] <= t) ++j;
        const double span = cum[j + 1] - cum[j];
        const double f = span > 0.0 ? std::clamp((t - cum[j]) / span, 0.0, 1.0) : 0.0;
        out.push_back(lerp(verts[j], verts[j + 1], f));
    }
    return out;
}

/// Closed contour unrolled to vertex list [p_0 .. p_{N-1}, p_0].
inline std::vector<Vec2> unroll(const Contour& c) {
    std::vector<Vec2> v(c.points.begin(), c.points.end());
    v.push_back(c[0]);
    return v;
}

inline std::vector<double> cumulative_arclength(const std::vector<Vec2>& verts) {
    std::vector<double> cum(verts.size());
    cum[0] = 0.0;
    for (std::size_t i = 0; i + 1 < verts.size(); ++i)
        cum[i + 1] = cum[i] + distance(verts[i], verts[i + 1]);
    return cum;
}

} // namespace detail

/// Constant-speed resampling: N points at arc-length spacing Length/N,
/// starting exactly at vertex 0.
inline Contour arclength_resample(const Contour& c, int n_samples) {
    if (n_samples < 3) throw ValidationError("arclength_resample: need at least 3 samples");
    const std::vector<Vec2> verts = detail::unroll(c);
    const std::vector<double> cum = detail::cumulative_arclength(verts);
    const double total = cum.back();
    std::vector<double> targets(static_cast<std::size_t>(n_samples));
    for (int k = 0; k < n_samples; ++k)
        targets[static_cast<std::size_t>(k)] = total * k / n_samples;
    Contour out;
    out.points = detail::invert_cumulative(verts, cum, targets);
    out.points[0] = c[0];
    return out;
}

/// Discrete Phi_lambda at the vertices: normalized prefix sums of
/// (lambda*Length + |kappa_j|) * edgelen_j, with the curvature term dropped
/// for the arc-length sentinel. Size N+1 with phi[0] = 0 and phi[N] = 1.
/// Strictly increasing for lambda > 0; lambda = 0 on a flat curve is
/// undefined and throws.
inline std::vector<double> cumulative_weight(const Contour& c, double lambda) {
    if (std::isnan(lambda) || lambda < 0.0)
        throw ValidationError("cumulative_weight: lambda must be >= 0 or the arc-length sentinel");
    const std::size_t n = c.size();
    std::vector<double> w(n);
    if (is_arclength_lambda(lambda)) {
        for (std::size_t j = 0; j < n; ++j) w[j] = norm(c.edge(j));
    } else {
        const double len = length(c);
        const std::vector<double> kappa = discrete_curvature(c);
        for (std::size_t j = 0; j < n; ++j)
            w[j] = (lambda * len + std::abs(kappa[j])) * norm(c.edge(j));
    }
    std::vector<double> phi(n + 1);
    phi[0] = 0.0;
    for (std::size_t j = 0; j < n; ++j) phi[j + 1] = phi[j] + w[j];
    const double total = phi[n];
    if (total <= 0.0)
        throw NumericError("cumulative_weight: Phi_0 undefined on a flat curve (zero total weight)");
    for (std::size_t j = 0; j <= n; ++j) phi[j] /= total;
    phi[n] = 1.0;
    return phi;
}

namespace detail {

/// Vertex count of the fine intermediate resampling on which curvature is
/// estimated, so Phi_lambda is stable under the input sampling density.
inline int fine_sample_count(const Contour& c, int n_samples) {
    return std::max({1000, static_cast<int>(c.size()), n_samples});
}

} // namespace detail

/// Resampling at the Phi_lambda-preimages of the uniform grid {k/N}.
/// Curvature is evaluated on a fine constant-speed resampling of the input,
/// never on the raw vertex distribution. Also reports Phi at the input
/// vertices.
inline ReparamResult curvature_weighted_reparam(const Contour& c, double lambda, int n_samples) {
    if (n_samples < 3) throw ValidationError("curvature_weighted_resample: need at least 3 samples");
    if (std::isnan(lambda) || (!is_arclength_lambda(lambda) && lambda <= 0.0))
        throw ValidationError("curvature_weighted_resample: lambda must be > 0 or the arc-length sentinel");

    if (is_arclength_lambda(lambda)) {
        ReparamResult r;
        r.contour = arclength_resample(c, n_samples);
        const std::vector<double> cum = detail::cumulative_arclength(detail::unroll(c));
        r.phi.resize(cum.size());
        for (std::size_t i = 0; i < cum.size(); ++i) r.phi[i] = cum[i] / cum.back();
        r.phi.back() = 1.0;
        return r;
    }

    const Contour fine = arclength_resample(c, detail::fine_sample_count(c, n_samples));
    const std::vector<double> phi_fine = cumulative_weight(fine, lambda);
    const std::vector<Vec2> verts = detail::unroll(fine);

    std::vector<double> targets(static_cast<std::size_t>(n_samples));
    for (int k = 0; k < n_samples; ++k)
        targets[static_cast<std::size_t>(k)] = static_cast<double>(k) / n_samples;

    ReparamResult r;
    r.contour.points = detail::invert_cumulative(verts, phi_fine, targets);
    r.contour.points[0] = c[0];

    // Phi at the input vertices: interpolate the fine map at their arc positions.
    const std::vector<double> cum_in = detail::cumulative_arclength(detail::unroll(c));
    const std::vector<double> cum_fine = detail::cumulative_arclength(verts);
    r.phi.resize(cum_in.size());
    std::size_t j = 0;
    for (std::size_t i = 0; i < cum_in.size(); ++i) {
        const double s = cum_in[i] * cum_fine.back() / cum_in.back();
        while (j + 2 < cum_fine.size() && cum_fine[j + 1] <= s) ++j;
        const double span = cum_fine[j + 1] - cum_fine[j];
        const double f = span > 0.0 ? (s - cum_fine[j]) / span : 0.0;
        r.phi[i] = phi_fine[j] + f * (phi_fine[j + 1] - phi_fine[j]);
    }
    r.phi[0] = 0.0;
    r.phi.back() = 1.0;
    return r;
}

inline Contour curvature_weighted_resample(const Contour& c, double lambda, int n_samples) {
    return curvature_weighted_reparam(c, lambda, n_samples).contour;
}

/// Running maximum of the unwrapped angle swept at `ref` by a point walking
/// the contour, starting at 0. Size N+1; ends at 2*pi (up to rounding) for a
/// CCW simple contour. The raw angle may regress locally on non-star-shaped
/// contours; the running max makes threshold crossings well-defined.
inline std::vector<double> angle_function(const Contour& c, const Vec2& ref) {
    const int wn = winding_number(c, ref); // throws when ref lies on the contour
    if (wn != 1)
        throw ValidationError(wn == 0
                                  ? "angle_function: reference point lies outside the contour"
                                  : "angle_function: contour must wind counterclockwise around the reference point");
    const std::size_t n = c.size();
    std::vector<double> run(n + 1);
    run[0] = 0.0;
    double alpha = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = c[i] - ref;
        const Vec2 b = c.wrapped(i + 1) - ref;
        alpha += std::atan2(cross(a, b), dot(a, b));
        run[i + 1] = std::max(run[i], alpha);
    }
    return run;
}

/// Contour point at index parameter t in [0,1): linear along the bracketing
/// edge.
inline Vec2 point_at_param(const Contour& c, double t) {
    const std::size_t n = c.size();
    double u = t - std::floor(t);
    double scaled = u * static_cast<double>(n);
    std::size_t idx = static_cast<std::size_t>(scaled);
    if (idx >= n) { idx = n - 1; scaled = static_cast<double>(n); }
    return lerp(c[idx], c.wrapped(idx + 1), scaled - static_cast<double>(idx));
}

/// Index parameters (in [0,1), t_i = i/N convention) of the first points at
/// which the running-max angle reaches 2*pi*k/n, k = 0..n-1. Keypoint 0 is
/// t = 0. The crossing on the bracketing edge is solved exactly as a
/// ray-segment intersection (the angle is strictly monotone along a straight
/// edge), so keypoints sit at the target angles to machine precision.
inline std::vector<double> clock_keypoints(const Contour& c, int n_sectors, const Vec2& ref) {
    if (n_sectors < 1) throw ValidationError("clock_keypoints: need n >= 1");
    const std::vector<double> run = angle_function(c, ref);
    const std::size_t n = c.size();
    const Vec2 first = c[0] - ref;
    const double base_angle = std::atan2(first.y, first.x);

    std::vector<double> keypoints(static_cast<std::size_t>(n_sectors));
    keypoints[0] = 0.0;
    std::size_t j = 0;
    for (int k = 1; k < n_sectors; ++k) {
        const double target = 2.0 * std::numbers::pi * k / n_sectors;
        while (j + 1 <= n && run[j + 1] < target) ++j;
        if (j >= n)
            throw NumericError("clock_keypoints: angle function never reaches the target angle");
        const Vec2 a = c[j];
        const Vec2 b = c.wrapped(j + 1);
        const double phi = base_angle + target;
        const Vec2 dir{std::cos(phi), std::sin(phi)};
        const double denom = cross(dir, b - a);
        double s;
        if (std::abs(denom) > 1e-15 * norm(b - a)) {
            s = -cross(dir, a - ref) / denom;
        } else {
            // Edge nearly parallel to the target ray: fall back to the
            // angle-value fraction.
            const double lo = run[j], hi = run[j + 1];
            s = hi > lo ? (target - lo) / (hi - lo) : 0.0;
        }
        keypoints[static_cast<std::size_t>(k)] = (static_cast<double>(j) + std::clamp(s, 0.0, 1.0)) / static_cast<double>(n);
    }
    return keypoints;
}

namespace detail {

/// Sector of a closed contour from index parameter t_a to t_b (t_b may wrap
/// past 1): the polyline start, interior vertices, end.
inline std::vector<Vec2> sector_polyline(const Contour& c, double t_a, double t_b,
                                         std::vector<std::size_t>* edge_of_segment = nullptr) {
    const std::size_t n = c.size();
    const double sa = t_a * static_cast<double>(n);
    const double sb = t_b * static_cast<double>(n);
    std::vector<Vec2> pts;
    if (edge_of_segment) edge_of_segment->clear();
    pts.push_back(point_at_param(c, t_a));
    std::size_t prev_edge = static_cast<std::size_t>(sa) % n;
    for (std::size_t i = static_cast<std::size_t>(std::floor(sa)) + 1; static_cast<double>(i) < sb; ++i) {
        const Vec2 v = c[i % n];
        if (v != pts.back()) {
            if (edge_of_segment) edge_of_segment->push_back(prev_edge);
            pts.push_back(v);
        }
        prev_edge = i % n;
    }
    const Vec2 end = point_at_param(c, t_b - std::floor(t_b));
    if (end != pts.back()) {
        if (edge_of_segment) edge_of_segment->push_back(prev_edge);
        pts.push_back(end);
    }
    return pts;
}

} // namespace detail

/// Clock resampling: the n arcs between consecutive angle keypoints each get
/// N/n arc-length-uniform points; the output starts at keypoint 0 (= vertex 0).
inline Contour clock_resample(const Contour& c, int n_sectors, int n_samples, const Vec2& ref) {
    if (n_sectors < 1) throw ValidationError("clock_resample: need n >= 1");
    if (n_samples < 3 || n_samples % n_sectors != 0)
        throw ValidationError("clock_resample: sample count must be a positive multiple of the sector count");
    const std::vector<double> keypoints = clock_keypoints(c, n_sectors, ref);
    const int per_sector = n_samples / n_sectors;

    Contour out;
    out.points.reserve(static_cast<std::size_t>(n_samples));
    for (int k = 0; k < n_sectors; ++k) {
        const double t_a = keypoints[static_cast<std::size_t>(k)];
        const double t_b = (k + 1 < n_sectors) ? keypoints[static_cast<std::size_t>(k + 1)]
                                               : keypoints[0] + 1.0;
        const std::vector<Vec2> arc = detail::sector_polyline(c, t_a, t_b);
        const std::vector<double> cum = detail::cumulative_arclength(arc);
        std::vector<double> targets(static_cast<std::size_t>(per_sector));
        for (int q = 0; q < per_sector; ++q)
            targets[static_cast<std::size_t>(q)] = cum.back() * q / per_sector;
        const std::vector<Vec2> pts = detail::invert_cumulative(arc, cum, targets);
        out.points.insert(out.points.end(), pts.begin(), pts.end());
    }
    out.points[0] = c[0];
    return out;
}

/// The full two-parameter family. sectors = 0 is the pure curvature-weighted
/// family; the arc-length sentinel reduces each sector to uniform spacing.
/// For finite lambda with sectors > 0, keypoints and curvature both live on
/// the fine constant-speed resampling and each sector is reweighted by
/// lambda * (sector arc length) + |kappa|.
inline Contour curvature_clock_resample(const Contour& c, const ParamFamily& fam, const Vec2& ref) {
    fam.validate();
    if (fam.sectors == 0)
        return curvature_weighted_resample(c, fam.lambda, fam.samples);
    if (is_arclength_lambda(fam.lambda))
        return clock_resample(c, fam.sectors, fam.samples, ref);

    const Contour fine = arclength_resample(c, detail::fine_sample_count(c, fam.samples));
    const std::vector<double> kappa = discrete_curvature(fine);
    const std::vector<double> keypoints = clock_keypoints(fine, fam.sectors, ref);
    const int per_sector = fam.samples / fam.sectors;

    Contour out;
    out.points.reserve(static_cast<std::size_t>(fam.samples));
    for (int k = 0; k < fam.sectors; ++k) {
        const double t_a = keypoints[static_cast<std::size_t>(k)];
        const double t_b = (k + 1 < fam.sectors) ? keypoints[static_cast<std::size_t>(k + 1)]
                                                 : keypoints[0] + 1.0;
        std::vector<std::size_t> seg_edge;
        const std::vector<Vec2> arc = detail::sector_polyline(fine, t_a, t_b, &seg_edge);
        double arc_len = 0.0;
        for (std::size_t s = 0; s + 1 < arc.size(); ++s) arc_len += distance(arc[s], arc[s + 1]);

        std::vector<double> cum(arc.size());
        cum[0] = 0.0;
        for (std::size_t s = 0; s + 1 < arc.size(); ++s) {
            const double density = fam.lambda * arc_len + std::abs(kappa[seg_edge[s]]);
            cum[s + 1] = cum[s] + density * distance(arc[s], arc[s + 1]);
        }
        std::vector<double> targets(static_cast<std::size_t>(per_sector));
        for (int q = 0; q < per_sector; ++q)
            targets[static_cast<std::size_t>(q)] = cum.back() * q / per_sector;
        const std::vector<Vec2> pts = detail::invert_cumulative(arc, cum, targets);
        out.points.insert(out.points.end(), pts.begin(), pts.end());
    }
    out.points[0] = fine[0];
    return out;
}

/// Interior anchor for the clock construction: the area centroid when it lies
/// inside, otherwise the first interior centroid of triangles formed by the
/// contour point closest to the area centroid and two vertices at symmetric
/// index offsets, scanning outward.
inline Vec2 reference_point(const Contour& c) {
    const Vec2 g = area_centroid(c);
    auto interior = [&](const Vec2& p) {
        try {
            const int wn = winding_number(c, p);
            return wn == 1 || wn == -1;
        } catch (const NumericError&) {
            return false; // on the boundary
        }
    };
    if (interior(g)) return g;

    const std::size_t n = c.size();
    std::size_t closest = 0;
    double best = distance(c[0], g);
    for (std::size_t i = 1; i < n; ++i) {
        const double d = distance(c[i], g);
        if (d < best) { best = d; closest = i; }
    }
    for (std::size_t off = 1; off <= n / 2; ++off) {
        const Vec2 a = c[closest];
        const Vec2 b = c[(closest + n - off) % n];
        const Vec2 d = c[(closest + off) % n];
        const Vec2 cand = (a + b + d) / 3.0;
        if (interior(cand)) return cand;
    }
    throw NumericError("reference_point: no interior fallback found (pathological contour)");
}

} // namespace curveclock
