#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "besovtk/boundary_norm.hpp"
#include "besovtk/energy.hpp"

using namespace besovtk;

namespace {
const double kPi = 3.14159265358979323846;

BoundaryFunction cauchy_trace(double b = 1.0) {
    return BoundaryFunction::trace_of(
        HarmonicTestFunction::single_pole({0.0, -b}));
}
}  // namespace

TEST_CASE("line norm of the Cauchy trace at p=2") {
    // separable closed form: |f(x)-f(y)|^2/(x-y)^2 = ((x^2+1)(y^2+1))^-1,
    // so the norm is (\int dx/(x^2+1))^2 = pi^2
    QuadratureSpec spec(1e-7, 1e-10, 8000);
    auto r = boundary_norm_line(cauchy_trace(), 2.0, spec);
    CHECK(r.value == Catch::Approx(kPi * kPi).epsilon(1e-5));
    CHECK(std::abs(r.value - kPi * kPi) <= r.total_error() + 1e-7);
    CHECK(r.converged);
}

TEST_CASE("line norm with the pole at 2i") {
    // same separation with b=2: (\int dx/(x^2+4))^2 = (pi/2)^2
    QuadratureSpec spec(1e-7, 1e-10, 8000);
    auto r = boundary_norm_line(cauchy_trace(2.0), 2.0, spec);
    CHECK(r.value == Catch::Approx(kPi * kPi / 4.0).epsilon(1e-5));
}

TEST_CASE("constant boundary data has zero norm") {
    auto f = BoundaryFunction::formula([](cplx) { return cplx{3.0, -1.0}; });
    auto r = boundary_norm_line(f, 2.0, {});
    CHECK(std::abs(r.value) < 1e-12);
    auto rc = boundary_norm_curve(f, Curve::grating(0.5), 2.0, CurveWindow(-30, 30),
                                  QuadratureSpec(1e-6, 1e-9, 4000));
    CHECK(std::abs(rc.value) < 1e-10);
}

TEST_CASE("curve norm on the line matches the axis norm") {
    QuadratureSpec spec(1e-7, 1e-10, 8000);
    auto via_curve = boundary_norm_curve(cauchy_trace(), Curve::line(), 2.0,
                                         CurveWindow(-50, 50), spec);
    CHECK(via_curve.value == Catch::Approx(kPi * kPi).epsilon(1e-5));
}

TEST_CASE("affine invariance of the line norm") {
    QuadratureSpec spec(1e-8, 1e-11, 8000);
    auto u = HarmonicTestFunction::single_pole({0.0, -1.0});
    auto base = boundary_norm_line(BoundaryFunction::trace_of(u), 2.0, spec);
    struct Affine {
        double a, b;
    };
    for (Affine ab : {Affine{2.0, 0.0}, Affine{1.0, 3.0}, Affine{0.5, -1.0}}) {
        // f(ax+b) is the trace of the pushed-forward pole function
        auto moved = u.similarity_pushforward(1.0 / ab.a, -ab.b / ab.a);
        auto r = boundary_norm_line(BoundaryFunction::trace_of(moved), 2.0, spec);
        CHECK(r.value == Catch::Approx(base.value).epsilon(1e-6));
    }
}

TEST_CASE("windowed grating norm carries a certified tail") {
    auto u = HarmonicTestFunction::single_pole({0.0, -3.0});
    auto f = BoundaryFunction::trace_of(u);
    QuadratureSpec spec(1e-4, 1e-7, 4000);
    auto r1 = boundary_norm_curve(f, Curve::grating(0.5), 2.0,
                                  CurveWindow(-240, 240), spec);
    CHECK(r1.value > 0.0);
    CHECK(std::isfinite(r1.tail_estimate));
    auto r2 = boundary_norm_curve(f, Curve::grating(0.5), 2.0,
                                  CurveWindow(-480, 480), spec);
    // window growth keeps the value within the declared tail of the smaller run
    CHECK(std::abs(r2.value - r1.value) <=
          r1.tail_estimate + r1.error_estimate + r2.error_estimate);
    CHECK(r2.tail_estimate < r1.tail_estimate);
}

TEST_CASE("polyline norms are finite-only") {
    auto f = BoundaryFunction::formula([](cplx z) { return z; });
    auto c = Curve::polyline({{0, 0}, {1, 0}, {1, 1}});
    auto r = boundary_norm_curve(f, c, 2.0, CurveWindow(0.0, 2.0),
                                 QuadratureSpec(1e-5, 1e-8, 2000));
    CHECK(r.finite_only);
    CHECK(std::isfinite(r.value));
}

TEST_CASE("pullback norm on the half-plane divides by 4 pi^2") {
    QuadratureSpec spec(1e-6, 1e-9, 8000);
    auto r = bp_phi_norm(cauchy_trace(), Domain::halfplane(), false, 2.0, spec);
    CHECK(r.value == Catch::Approx(0.25).epsilon(1e-5));
}

TEST_CASE("pullback norm through the sector map is finite") {
    // alpha=1 is the identity; alpha=0.5 is reported for the experiments
    QuadratureSpec spec(1e-4, 1e-7, 4000);
    auto id = bp_phi_norm(cauchy_trace(), Domain::sector(1.0), false, 2.0, spec);
    CHECK(id.value == Catch::Approx(0.25).epsilon(1e-3));
    auto u = HarmonicTestFunction::single_pole(2.0 * std::polar(1.0, 1.25 * kPi));
    auto r = bp_phi_norm(BoundaryFunction::trace_of(u), Domain::sector(0.5), false,
                         2.0, spec);
    CHECK(std::isfinite(r.value));
    CHECK(r.value > 0.0);
}

TEST_CASE("norm rejects p at or below one") {
    CHECK_THROWS_AS(boundary_norm_line(cauchy_trace(), 1.0, {}), domain_error);
}

TEST_CASE("poisson kernel has unit mass") {
    auto one = BoundaryFunction::formula([](cplx) { return cplx{1.0, 0.0}; });
    QuadratureSpec spec(1e-10, 1e-12, 4000);
    cplx v = poisson_extend(one, {0.7, 2.0}, spec);
    CHECK(std::abs(v - cplx{1.0, 0.0}) < 1e-9);
}

TEST_CASE("poisson extension reproduces holomorphic boundary data") {
    QuadratureSpec spec(1e-10, 1e-13, 8000);
    cplx v = poisson_extend(cauchy_trace(), {0.0, 1.0}, spec);
    CHECK(std::abs(v - cplx{0.0, -0.5}) < 1e-8);
    // linearity split: the real part of the trace alone gives Re of the value
    auto re_part = BoundaryFunction::formula(
        [](cplx z) { return cplx{(1.0 / (z + cplx{0.0, 1.0})).real(), 0.0}; });
    cplx vr = poisson_extend(re_part, {0.0, 1.0}, spec);
    CHECK(std::abs(vr.real() - 0.0) < 1e-8);
    CHECK(std::abs(vr.imag()) < 1e-12);
}

TEST_CASE("poisson divergence is detected") {
    auto growing = BoundaryFunction::formula([](cplx z) {
        return cplx{z.real() * z.real() * z.real(), 0.0};
    });
    CHECK_THROWS_AS(poisson_extend(growing, {0.0, 1.0}, QuadratureSpec(1e-9, 1e-12, 64)),
                    divergence_error);
}
