#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "besovtk/carleson.hpp"

using namespace besovtk;

namespace {
HarmonicTestFunction cauchy_pole() {
    return HarmonicTestFunction::single_pole({0.0, -1.0});
}
}  // namespace

TEST_CASE("carleson sup over dyadic boxes is finite and refinement-stable") {
    auto F = cauchy_pole();
    QuadratureSpec spec(1e-6, 1e-9, 4000);
    auto base = carleson_norm(F, dyadic_boxes(0.0, -4, 4), spec);
    CHECK(std::isfinite(base.norm));
    CHECK(base.norm > 0.0);

    // refinement: half-octave scales plus one octave on each side
    std::vector<Interval> finer;
    for (int k = -10; k <= 10; ++k) {
        double h = std::pow(2.0, k / 2.0) / 2.0;
        finer.push_back({-h, h});
    }
    auto fine = carleson_norm(F, finer, spec);
    CHECK(fine.norm == Catch::Approx(base.norm).epsilon(0.05));
}

TEST_CASE("a constant has zero carleson mass") {
    // gradient of any order of a constant field vanishes; emulate with a
    // far-away microscopic pole
    auto F = HarmonicTestFunction::single_pole({0.0, -1e8}, 1, {1e-12, 0.0});
    auto r = carleson_norm(F, dyadic_boxes(0.0, -2, 2), QuadratureSpec(1e-6, 1e-12, 800));
    CHECK(r.norm < 1e-20);
}

TEST_CASE("box mass is covariant under dilation") {
    // F_2(z) = F(2z) shifts the dyadic family by one octave
    auto F = cauchy_pole();
    auto F2 = F.similarity_pushforward({0.5, 0.0}, {0.0, 0.0});  // F2(z) = F(2z)
    QuadratureSpec spec(1e-8, 1e-12, 8000);
    auto a = carleson_norm(F2, dyadic_boxes(0.0, -3, 3), spec);
    auto b = carleson_norm(F, dyadic_boxes(0.0, -2, 4), spec);
    CHECK(a.norm == Catch::Approx(b.norm).epsilon(1e-6));
}

TEST_CASE("lusin area of a constant vanishes") {
    auto F = HarmonicTestFunction::single_pole({0.0, -1e8}, 1, {1e-12, 0.0});
    CHECK(lusin_area(F, 0.0, 1.0, QuadratureSpec(1e-8, 1e-14, 800)) < 1e-12);
}

TEST_CASE("lusin area decays along the boundary") {
    auto F = cauchy_pole();
    QuadratureSpec spec(1e-7, 1e-10, 2000);
    double prev = lusin_area(F, 0.0, 1.0, spec);
    CHECK(prev > 0.0);
    for (double x0 : {2.0, 5.0, 12.0, 30.0}) {
        double cur = lusin_area(F, x0, 1.0, spec);
        CHECK(cur < prev);
        prev = cur;
    }
}

TEST_CASE("averaged cone inequality against the tripled box") {
    auto F = cauchy_pole();
    QuadratureSpec spec(1e-5, 1e-8, 2000);
    for (Interval I : {Interval{-0.5, 0.5}, Interval{-2.0, 2.0}, Interval{1.0, 2.0},
                       Interval{-4.0, 0.0}, Interval{0.25, 0.75}}) {
        auto [lhs, rhs] = lusin_average_inequality(F, I, spec);
        CHECK(lhs <= rhs * (1.0 + 1e-6) + 1e-12);
    }
}

TEST_CASE("degenerate cones and boxes are rejected") {
    auto F = cauchy_pole();
    CHECK_THROWS_AS(lusin_area(F, 0.0, 0.0, {}), domain_error);
    CHECK_THROWS_AS(carleson_box_mass(F, {1.0, 1.0}, {}), domain_error);
}
