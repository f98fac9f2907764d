#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "curveclock/normalize.hpp"
#include "testutil.hpp"

using namespace curveclock;
using namespace testutil;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

namespace {

double oracle_shoelace(const Contour& c) {
    double s = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const Vec2 a = c[i], b = c[(i + 1) % c.size()];
        s += (b.x - a.x) * (b.y + a.y); // negative for CCW
    }
    return -0.5 * s;
}

} // namespace

TEST_CASE("ensure_ccw flips only clockwise contours") {
    const Contour ccw = unit_square();
    CHECK(ensure_ccw(ccw).points == ccw.points);
    const Contour cw = reversed(ccw);
    const Contour fixed = ensure_ccw(cw);
    CHECK(signed_area(fixed) > 0.0);
    CHECK(fixed[0] == cw[0]);
}

TEST_CASE("ensure_ccw output is CCW for random simple polygons (shoelace oracle)") {
    std::mt19937 rng(3);
    for (int k = 0; k < 100; ++k) {
        Contour c = random_star(rng, 20 + (k % 30));
        if (k % 2 == 1) c = reversed(c);
        const Contour out = ensure_ccw(c);
        CHECK(oracle_shoelace(out) > 0.0);
        CHECK(ensure_ccw(out).points == out.points); // exact idempotence
    }
}

TEST_CASE("ensure_ccw rejects flat contours") {
    CHECK_THROWS_AS(ensure_ccw(Contour{{{0, 0}, {1, 0}, {2, 0}}}), NumericError);
}

TEST_CASE("set_start_max_y picks max y with min-x tie break") {
    const Contour sq = unit_square(); // (0,0),(1,0),(1,1),(0,1)
    const Contour out = set_start_max_y(sq);
    CHECK(out[0] == Vec2{0, 1});
    CHECK(out.size() == 4);

    const Contour apex{{{0, 5}, {-1, 0}, {1, 0}}};
    CHECK(set_start_max_y(apex).points == apex.points);
}

TEST_CASE("set_start_max_y is invariant under cyclic index rotations") {
    std::mt19937 rng(7);
    const Contour c = random_star(rng, 37);
    const Contour want = set_start_max_y(c);
    for (std::size_t shift = 1; shift < c.size(); ++shift)
        CHECK(set_start_max_y(cyclic_shift(c, shift)).points == want.points);
}

TEST_CASE("scale_normalize reaches unit length or unit area") {
    const Contour sq2 = scaled(unit_square(), 2.0); // side 2
    const Contour by_len = scale_normalize(sq2, ScaleRule::unit_length);
    CHECK_THAT(length(by_len), WithinAbs(1.0, 1e-12));
    CHECK_THAT(distance(by_len[0], by_len[1]), WithinAbs(0.25, 1e-12));

    const Contour by_area = scale_normalize(sq2, ScaleRule::unit_area);
    CHECK_THAT(std::abs(signed_area(by_area)), WithinAbs(1.0, 1e-12));
    CHECK_THAT(distance(by_area[0], by_area[1]), WithinAbs(1.0, 1e-12));

    const Contour twice = scale_normalize(by_len, ScaleRule::unit_length);
    CHECK(max_pointwise_distance(twice, by_len) < 1e-12); // projection property
}

TEST_CASE("translate_normalize anchors") {
    std::mt19937 rng(11);
    const Contour c = translated(fourier_blob(rng, 80), {4, -3});
    const Contour s = translate_normalize(c, TranslateRule::start_origin);
    CHECK(norm(s[0]) == 0.0);
    const Contour g = translate_normalize(c, TranslateRule::contour_centroid);
    CHECK(norm(contour_centroid(g)) < 1e-12);
    const Contour a = translate_normalize(c, TranslateRule::area_centroid);
    CHECK(norm(area_centroid(a)) < 1e-12);

    const Contour centered = regular_polygon(64);
    for (TranslateRule mode : {TranslateRule::contour_centroid, TranslateRule::area_centroid})
        CHECK(max_pointwise_distance(translate_normalize(centered, mode), centered) < 1e-12);
}

TEST_CASE("a longer peduncle drags the contour centroid more than the area centroid") {
    const Contour short_spike = disk_with_spike(0.5);
    const Contour long_spike = disk_with_spike(1.5);
    const double area_shift = norm(area_centroid(long_spike) - area_centroid(short_spike));
    const double contour_shift = norm(contour_centroid(long_spike) - contour_centroid(short_spike));
    CHECK(area_shift < contour_shift);
}

TEST_CASE("rotate_normalize(ellipse_axes) puts the major axis vertical") {
    const Contour c = rotated(ellipse_polygon(2.0, 1.0, 600), {0, 0}, kPi / 6.0);
    const Contour out = rotate_normalize(c, RotateRule::ellipse_axes);
    const EllipseFrame f = best_fit_ellipse(out);
    CHECK(std::abs(f.major_axis.y) > 1.0 - 1e-9);
}

TEST_CASE("rotate_normalize(tip_vertical) places the tip straight above the centroid") {
    const Contour leaf = disk_with_spike(2.0);
    const Contour out = rotate_normalize(leaf, RotateRule::tip_vertical);
    const Vec2 g = area_centroid(out);
    std::size_t tip = 0;
    double best = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double d = norm(out[i] - g);
        if (d > best) { best = d; tip = i; }
    }
    CHECK_THAT(out[tip].x - g.x, WithinAbs(0.0, 1e-12));
    CHECK(out[tip].y > g.y);
}

TEST_CASE("tip_vertical collapses rotations of centered contours") {
    std::mt19937 rng(13);
    Contour c = fourier_blob(rng, 150);
    c = translate_normalize(c, TranslateRule::area_centroid);
    const Contour base = rotate_normalize(c, RotateRule::tip_vertical);
    std::uniform_real_distribution<double> ang(0.0, 2.0 * kPi);
    for (int k = 0; k < 8; ++k) {
        const Contour moved = rotated(c, {0, 0}, ang(rng));
        CHECK(max_pointwise_distance(rotate_normalize(moved, RotateRule::tip_vertical), base) <
              1e-9);
    }
}

TEST_CASE("rotate_normalize rejects isotropic contours in ellipse mode") {
    CHECK_THROWS_AS(rotate_normalize(regular_polygon(512), RotateRule::ellipse_axes), NumericError);
}

TEST_CASE("apply_plan is idempotent") {
    std::mt19937 rng(17);
    const NormalizationPlan plan;
    const Contour once = apply_plan(fourier_blob(rng, 120), plan);
    const Contour twice = apply_plan(once, plan);
    CHECK(max_pointwise_distance(twice, once) < 1e-9);
}

TEST_CASE("apply_plan postconditions hold for any input") {
    std::mt19937 rng(19);
    const NormalizationPlan plan;
    for (int k = 0; k < 10; ++k) {
        Contour c = apply_similarity(fourier_blob(rng, 100 + 10 * k), random_similarity(rng));
        if (k % 3 == 0) c = reversed(c);
        const Contour out = apply_plan(c, plan);
        CHECK_THAT(length(out), WithinAbs(1.0, 1e-12));
        CHECK(signed_area(out) > 0.0);
        CHECK(norm(area_centroid(out)) < 1e-9);
        // vertex 0: topmost, on the vertical axis, above the origin
        for (const Vec2& p : out.points) CHECK(p.y <= out[0].y + 1e-12);
        CHECK_THAT(out[0].x, WithinAbs(0.0, 1e-9));
        CHECK(out[0].y > 0.0);
    }
}

TEST_CASE("apply_plan collapses similarity and cyclic-shift orbits") {
    std::mt19937 rng(23);
    const NormalizationPlan plan;
    const Contour base = fourier_blob(rng, 160);
    const Contour want = apply_plan(base, plan);
    std::uniform_int_distribution<std::size_t> shift(0, base.size() - 1);
    for (int k = 0; k < 20; ++k) {
        const Contour moved =
            apply_similarity(cyclic_shift(base, shift(rng)), random_similarity(rng));
        CHECK(max_pointwise_distance(apply_plan(moved, plan), want) < 1e-6);
    }
}

TEST_CASE("apply_plan attaches the failing step to errors") {
    NormalizationPlan plan;
    plan.rotate = RotateRule::ellipse_axes;
    try {
        apply_plan(regular_polygon(512), plan);
        FAIL("expected an ambiguous-ellipse failure");
    } catch (const NumericError& e) {
        CHECK_THAT(e.what(), ContainsSubstring("rotate"));
    }
}

TEST_CASE("partial plans leave untouched aspects alone") {
    std::mt19937 rng(29);
    const Contour c = apply_similarity(fourier_blob(rng, 90), random_similarity(rng));
    NormalizationPlan none;
    none.direction = DirectionRule::none;
    none.start = StartRule::none;
    none.scale = ScaleRule::none;
    none.translate = TranslateRule::none;
    none.rotate = RotateRule::none;
    CHECK(apply_plan(c, none).points == c.points);

    NormalizationPlan only_ccw = none;
    only_ccw.direction = DirectionRule::ccw;
    CHECK(signed_area(apply_plan(reversed(c), only_ccw)) > 0.0);
}
