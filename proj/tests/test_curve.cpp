#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "besovtk/curve.hpp"
#include "besovtk/curve_metrics.hpp"

using namespace besovtk;

namespace {
const double kPi = 3.14159265358979323846;

// brute-force Riemann-sum arc length, kept independent of the library path
double riemann_arc(const Curve& c, double t1, double t2, int n) {
    double h = (t2 - t1) / n;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += std::abs(c.deriv(t1 + (i + 0.5) * h)) * h;
    return sum;
}
}  // namespace

TEST_CASE("arc length of the unit-speed line") {
    CHECK(arc_length(Curve::line(), 0.0, 3.0, 1e-12) == Catch::Approx(3.0).margin(1e-12));
}

TEST_CASE("grating with zero amplitude reduces to the line") {
    CHECK(arc_length(Curve::grating(0.0), 0.0, 2.0 * kPi, 1e-12) ==
          Catch::Approx(2.0 * kPi).margin(1e-11));
}

TEST_CASE("grating arc length against a Riemann-sum oracle") {
    auto c = Curve::grating(0.5);
    double got = arc_length(c, 0.0, 2.0 * kPi, 1e-9);
    CHECK(got > kPi);
    CHECK(got < 3.0 * kPi);
    double oracle = riemann_arc(c, 0.0, 2.0 * kPi, 1'000'000);
    CHECK(got == Catch::Approx(oracle).margin(1e-6));
    // frozen from the same oracle
    CHECK(got == Catch::Approx(6.6824466102776291).margin(1e-8));
}

TEST_CASE("arc length is additive") {
    auto c = Curve::grating(0.7);
    double tol = 1e-10;
    double full = arc_length(c, -1.0, 5.0, tol);
    double split = arc_length(c, -1.0, 2.3, tol) + arc_length(c, 2.3, 5.0, tol);
    CHECK(std::abs(full - split) <= 2.0 * tol);
}

TEST_CASE("distance to the real axis") {
    auto [d, t] = distance_to_curve(Curve::line(), {0.0, 1.0}, CurveWindow(-10, 10));
    CHECK(d == Catch::Approx(1.0).margin(1e-12));
    CHECK(t == Catch::Approx(0.0).margin(1e-9));
}

TEST_CASE("sector with alpha=1 is the line") {
    auto [d, t] = distance_to_curve(Curve::sector_boundary(1.0), {0.0, 1.0},
                                    CurveWindow(-10, 10));
    CHECK(d == Catch::Approx(1.0).margin(1e-12));
    CHECK(t == Catch::Approx(0.0).margin(1e-9));
}

TEST_CASE("parabola distance against a brute-force grid") {
    auto c = Curve::parabola(1.0);
    cplx w{0.0, 2.0};
    auto [d, t] = distance_to_curve(c, w, CurveWindow(-3, 3, 4001));
    double best = INFINITY;
    const int N = 10'000'000;
    for (int i = 0; i <= N; ++i) {
        double tt = -3.0 + 6.0 * i / double(N);
        best = std::min(best, std::abs(w - cplx{tt, tt * tt}));
    }
    CHECK(d == Catch::Approx(best).margin(1e-7));
    CHECK(std::abs(c.eval(t) - w) == Catch::Approx(d).margin(1e-12));
    // closed-form stationary point sqrt(3/2)
    CHECK(d == Catch::Approx(std::sqrt(1.75)).margin(1e-9));
}

TEST_CASE("distance is a lower envelope of the sample grid") {
    auto c = Curve::grating(0.6);
    CurveWindow win(-8, 8, 801);
    cplx w{0.3, 2.1};
    auto [d, t] = distance_to_curve(c, w, win);
    (void)t;
    for (auto& s : curve_window_samples(c, win))
        CHECK(d <= std::abs(w - s.point) + 1e-12);
}

TEST_CASE("window-insufficient minimum is detected") {
    // nearest approach of the parabola to this point lies far beyond the window
    CHECK_THROWS_AS(distance_to_curve(Curve::parabola(1.0), {50.0, 2500.0},
                                      CurveWindow(-1.0, 1.0)),
                    window_insufficient_error);
}

TEST_CASE("fast nearest-point agrees with the generic path") {
    auto check = [](const Curve& c, cplx w, const CurveWindow& win) {
        auto fast = c.nearest_point(w);
        auto slow = distance_to_curve(c, w, win);
        CHECK(fast.first == Catch::Approx(slow.first).epsilon(1e-9));
    };
    check(Curve::grating(0.6), {1.3, 2.0}, CurveWindow(-20, 20, 4001));
    check(Curve::grating(0.9), {-4.0, 0.9}, CurveWindow(-20, 20, 4001));
    check(Curve::sector_boundary(0.5), {1.0, 1.0}, CurveWindow(-20, 20, 4001));
    check(Curve::parabola(0.5), {2.0, 3.0}, CurveWindow(-20, 20, 4001));
}

TEST_CASE("chord-arc constant of the line is one") {
    auto r = chord_arc_constant(Curve::line(), CurveWindow(-5, 5, 201));
    CHECK(r.constant == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("chord-arc constant of sector boundaries") {
    // calculus maximum over opposite-ray pairs (s,s): 1/sin(alpha*pi/2)
    for (double alpha : {0.25, 0.5, 1.5, 1.75}) {
        auto r = chord_arc_constant(Curve::sector_boundary(alpha),
                                    CurveWindow(-10, 10, 401));
        CHECK(r.constant ==
              Catch::Approx(1.0 / std::sin(alpha * kPi / 2.0)).epsilon(0.01));
    }
}

TEST_CASE("chord-arc witnesses reproduce the constant") {
    auto c = Curve::sector_boundary(0.5);
    CurveWindow win(-10, 10, 401);
    auto r = chord_arc_constant(c, win);
    double arc = arc_length(c, std::min(r.t1, r.t2), std::max(r.t1, r.t2), 1e-11);
    double chord = std::abs(c.eval(r.t2) - c.eval(r.t1));
    CHECK(arc / chord == Catch::Approx(r.constant).margin(1e-12));
}

TEST_CASE("parabola chord-arc grows with the window") {
    auto small = chord_arc_constant(Curve::parabola(1.0), CurveWindow(-10, 10, 301));
    auto large = chord_arc_constant(Curve::parabola(1.0), CurveWindow(-100, 100, 301));
    CHECK(small.constant >= 10.0 / 4.0);
    CHECK(large.constant >= 100.0 / 4.0);
    CHECK(large.constant > small.constant);
}

TEST_CASE("grating chord-arc obeys the amplitude bound") {
    for (double c : {0.3, 0.6}) {
        auto r = chord_arc_constant(Curve::grating(c), CurveWindow(-15, 15, 501));
        CHECK(r.constant <= (1.0 + c) / (1.0 - c) + 1e-9);
        CHECK(r.constant >= 1.0);
    }
}

TEST_CASE("ahlfors constant of the line is two") {
    auto r = ahlfors_constant(Curve::line(), CurveWindow(-20, 20, 801),
                              {0.5, 1.0, 2.0, 4.0});
    CHECK(r.constant == Catch::Approx(2.0).margin(1e-6));
}

TEST_CASE("ahlfors constant near the sector vertex") {
    std::vector<double> radii;
    for (int k = -4; k <= 4; ++k) radii.push_back(std::pow(10.0, k / 2.0));
    auto r1 = ahlfors_constant(Curve::sector_boundary(0.5), CurveWindow(-200, 200, 401),
                               radii);
    CHECK(r1.constant >= 2.0 - 1e-9);
    CHECK(r1.constant <= 4.0);
    auto r2 = ahlfors_constant(Curve::sector_boundary(0.5), CurveWindow(-200, 200, 801),
                               radii);
    CHECK(r2.constant == Catch::Approx(r1.constant).epsilon(0.05));
}

TEST_CASE("parabola ahlfors constant plateaus while chord-arc grows") {
    std::vector<double> radii;
    for (int k = 0; k <= 12; ++k) radii.push_back(0.05 * std::pow(2.0, k));
    auto small = ahlfors_constant(Curve::parabola(1.0), CurveWindow(-10, 10, 401), radii);
    auto large = ahlfors_constant(Curve::parabola(1.0), CurveWindow(-100, 100, 401), radii);
    CHECK(large.constant <= small.constant * 1.10);
}

TEST_CASE("regularity integral on the line") {
    CurveWindow win(-50, 50);
    for (cplx w : {cplx{0, 1}, cplx{0, 2}, cplx{1, 1}}) {
        auto md = meyer_david_ratio(Curve::line(), w, win, 1e-10);
        CHECK(md.ratio == Catch::Approx(kPi).margin(1e-8));
        CHECK_FALSE(md.finite_only);
    }
}

TEST_CASE("regularity integral on grating probes") {
    auto c = Curve::grating(0.5);
    CurveWindow win(-200, 200);
    CurveWindow win2(-400, 400);
    auto base = meyer_david_sup(c, win);
    CHECK(std::isfinite(base.sup));
    CHECK(base.sup > 0.0);
    auto doubled = meyer_david_sup(c, win2);
    CHECK(doubled.sup == Catch::Approx(base.sup).epsilon(0.05));
}

TEST_CASE("polyline regularity integral is flagged finite-only") {
    auto c = Curve::polyline({{0, 0}, {1, 0}, {1, 1}});
    auto md = meyer_david_ratio(c, {0.5, 0.25}, CurveWindow(0.0, 2.0), 1e-8);
    CHECK(md.finite_only);
    CHECK(std::isfinite(md.ratio));
}

TEST_CASE("similarity invariance of the geometric constants") {
    auto c = Curve::grating(0.5);
    auto c2 = c.similarity({0.0, 2.0}, {3.0, -1.0});  // rotate+scale by 2i, shift
    CurveWindow win(-10, 10, 501);

    auto ca1 = chord_arc_constant(c, win);
    auto ca2 = chord_arc_constant(c2, win);
    CHECK(ca2.constant == Catch::Approx(ca1.constant).margin(1e-6));

    std::vector<double> radii{0.5, 1.0, 2.0, 4.0};
    std::vector<double> radii2{1.0, 2.0, 4.0, 8.0};  // matched: scaled by |a|=2
    auto ah1 = ahlfors_constant(c, win, radii);
    auto ah2 = ahlfors_constant(c2, win, radii2);
    CHECK(ah2.constant == Catch::Approx(ah1.constant).margin(1e-6));

    cplx w{0.7, 1.9};
    cplx w2 = cplx{0.0, 2.0} * w + cplx{3.0, -1.0};
    CurveWindow mdwin(-60, 60);
    auto md1 = meyer_david_ratio(c, w, mdwin, 1e-9);
    auto md2 = meyer_david_ratio(c2, w2, mdwin, 1e-9);
    CHECK(md2.ratio == Catch::Approx(md1.ratio).margin(1e-6));
}

TEST_CASE("window samples: uniform grid on the line") {
    auto s = curve_window_samples(Curve::line(), CurveWindow(0.0, 1.0, 3));
    REQUIRE(s.size() == 3);
    CHECK(s[0].t == 0.0);
    CHECK(s[1].t == 0.5);
    CHECK(s[2].t == 1.0);
}

TEST_CASE("window samples: geometric grading at the sector vertex") {
    auto s = curve_window_samples(Curve::sector_boundary(0.5), CurveWindow(-8, 8, 41));
    // consecutive positive parameters should shrink geometrically (ratio ~2)
    std::vector<double> pos;
    for (auto& q : s)
        if (q.t > 0.0) pos.push_back(q.t);
    for (std::size_t i = 1; i < pos.size(); ++i) {
        double ratio = pos[i] / pos[i - 1];
        CHECK(ratio >= 1.0);
        CHECK(ratio <= 4.0);
    }
}

TEST_CASE("window samples: grating tangents bounded by the amplitude") {
    auto s = curve_window_samples(Curve::grating(0.9), CurveWindow(-20, 20, 501));
    for (auto& q : s) {
        CHECK(std::abs(q.tangent) >= 0.1 - 1e-12);
        CHECK(std::abs(q.tangent) <= 1.9 + 1e-12);
    }
}

TEST_CASE("catalog constructors reject degenerate inputs") {
    CHECK_THROWS_AS(Curve::grating(1.0), malformed_curve_error);
    CHECK_THROWS_AS(Curve::grating(1.5), malformed_curve_error);
    CHECK_THROWS_AS(Curve::sector_boundary(0.0), malformed_curve_error);
    CHECK_THROWS_AS(Curve::sector_boundary(2.0), malformed_curve_error);
    CHECK_THROWS_AS(Curve::parabola(-1.0), malformed_curve_error);
    CHECK_THROWS_AS(Curve::polyline({{0, 0}}), malformed_curve_error);
    CHECK_THROWS_AS(Curve::polyline({{0, 0}, {0, 0}}), malformed_curve_error);
}

TEST_CASE("curve samples are injective") {
    for (auto c : {Curve::grating(0.9), Curve::wiggle(3), Curve::parabola(2.0)}) {
        auto s = curve_window_samples(c, CurveWindow(-9, 9, 301));
        for (std::size_t i = 0; i < s.size(); ++i)
            for (std::size_t j = i + 1; j < s.size(); ++j)
                CHECK(std::abs(s[i].point - s[j].point) > 1e-14);
    }
}

TEST_CASE("wiggle tangents never vanish") {
    auto c = Curve::wiggle(4);
    for (auto& s : curve_window_samples(c, CurveWindow(-5, 5, 2001)))
        CHECK(std::abs(s.tangent) > 0.0);
}
