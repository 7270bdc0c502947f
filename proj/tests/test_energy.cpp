#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "besovtk/energy.hpp"

using namespace besovtk;

namespace {
const double kPi = 3.14159265358979323846;

// Beta-integral reduction of the first-order energy of 1/(z+i) on H:
// sqrt(pi) Gamma(p-1/2) Gamma(p-1) / Gamma(2p-1)
double closed_form_I1(double p) {
    return std::sqrt(kPi) *
           std::exp(std::lgamma(p - 0.5) + std::lgamma(p - 1.0) - std::lgamma(2.0 * p - 1.0));
}

// same reduction at order two: 2^p sqrt(pi) G((3p-1)/2)/G(3p/2) * B(2p-1, p)
double closed_form_I2(double p) {
    return std::pow(2.0, p) * std::sqrt(kPi) *
           std::exp(std::lgamma((3.0 * p - 1.0) / 2.0) - std::lgamma(1.5 * p) +
                    std::lgamma(2.0 * p - 1.0) + std::lgamma(p) -
                    std::lgamma(3.0 * p - 1.0));
}

HarmonicTestFunction basic_pole() { return HarmonicTestFunction::single_pole({0.0, -1.0}); }
}  // namespace

TEST_CASE("first-order energy of the basic pole on the half-plane") {
    auto u = basic_pole();
    auto dom = Domain::halfplane();

    QuadratureSpec spec(1e-7, 1e-10, 20000);
    auto r2 = interior_energy(u, dom, 2.0, 1, spec);
    CHECK(r2.value == Catch::Approx(kPi / 4.0).epsilon(1e-6));
    CHECK(std::abs(r2.value - kPi / 4.0) <= r2.total_error() + 1e-9);

    for (double p : {1.5, 3.0}) {
        auto r = interior_energy(u, dom, p, 1, spec);
        CHECK(r.value == Catch::Approx(closed_form_I1(p)).epsilon(1e-5));
        CHECK(std::abs(r.value - closed_form_I1(p)) <= r.total_error() + 1e-9);
    }
}

TEST_CASE("second-order energies against the closed forms") {
    auto u = basic_pole();
    auto dom = Domain::halfplane();
    QuadratureSpec spec(1e-7, 1e-10, 20000);
    // frozen oracle values: 1.0844327485362932, pi/8, 0.069659863945578231
    auto r15 = interior_energy(u, dom, 1.5, 2, spec);
    CHECK(r15.value == Catch::Approx(1.0844327485362932).epsilon(1e-5));
    auto r2 = interior_energy(u, dom, 2.0, 2, spec);
    CHECK(r2.value == Catch::Approx(kPi / 8.0).epsilon(1e-6));
    CHECK(r2.value == Catch::Approx(closed_form_I2(2.0)).epsilon(1e-6));
    auto r3 = interior_energy(u, dom, 3.0, 2, spec);
    CHECK(r3.value == Catch::Approx(0.069659863945578231).epsilon(1e-5));
}

TEST_CASE("third-order energy at p=2") {
    auto r = interior_energy(basic_pole(), Domain::halfplane(), 2.0, 3,
                             QuadratureSpec(1e-6, 1e-9, 20000));
    CHECK(r.value == Catch::Approx(3.0 * kPi / 8.0).epsilon(1e-5));
}

TEST_CASE("energy is invariant under a simultaneous similarity") {
    auto u = basic_pole();
    cplx a{2.0, 0.0}, b{3.0, 0.0};  // real-affine keeps the half-plane
    auto dom2 = Domain::halfplane().similarity(a, b);
    auto u2 = u.similarity_pushforward(a, b);
    QuadratureSpec spec(1e-7, 1e-10, 20000);
    for (double p : {1.5, 2.0}) {
        auto base = interior_energy(u, Domain::halfplane(), p, 1, spec);
        auto moved = interior_energy(u2, dom2, p, 1, spec);
        CHECK(moved.value == Catch::Approx(base.value).epsilon(1e-6));
    }
}

TEST_CASE("pullback through the identity reproduces the energy bit-for-bit") {
    auto u = basic_pole();
    QuadratureSpec spec(1e-6, 1e-9, 20000);
    auto direct = interior_energy(u, Domain::halfplane(), 1.5, 2, spec);
    auto pulled = pullback_energy(u, Domain::halfplane(), 1.5, 2, spec);
    CHECK(direct.value == pulled.value);
}

TEST_CASE("conformal transfer stays inside the distortion bracket") {
    auto u = HarmonicTestFunction::single_pole({0.0, -3.0});
    auto dom = Domain::grating(0.6);
    QuadratureSpec spec(1e-4, 1e-7, 20000);
    for (double p : {1.5, 3.0}) {
        auto direct = interior_energy(u, dom, p, 1, spec);
        auto pulled = pullback_energy(u, dom, p, 1, spec);
        double ratio = direct.value / pulled.value;
        double spread = std::pow(4.0, std::abs(p - 2.0));
        double slack = 1.0 + 2.0 * (direct.total_error() / direct.value +
                                    pulled.total_error() / pulled.value);
        CHECK(ratio <= spread * slack);
        CHECK(ratio >= 1.0 / (spread * slack));
    }
    // p = 2 is the exactly invariant case
    auto d2 = interior_energy(u, dom, 2.0, 1, spec);
    auto p2 = pullback_energy(u, dom, 2.0, 1, spec);
    double rel = std::abs(d2.value / p2.value - 1.0);
    CHECK(rel <= 2.0 * (d2.total_error() / d2.value + p2.total_error() / p2.value) + 1e-9);
}

TEST_CASE("grating pullback energies are finite at higher order") {
    auto u = HarmonicTestFunction::single_pole({0.0, -3.0});
    auto r = pullback_energy(u, Domain::grating(0.6), 2.0, 2,
                             QuadratureSpec(1e-4, 1e-7, 20000));
    CHECK(std::isfinite(r.value));
    CHECK(r.value > 0.0);
    CHECK(r.converged);
}

TEST_CASE("sector energies converge with certified tails") {
    for (double alpha : {0.5, 1.5}) {
        // pole on the bisector of the exterior sector
        auto u = HarmonicTestFunction::single_pole(
            2.0 * std::polar(1.0, kPi * (1.0 + alpha / 2.0)));
        auto r = interior_energy(u, Domain::sector(alpha), 2.0, 1,
                                 QuadratureSpec(1e-4, 1e-7, 20000));
        CHECK(r.converged);
        CHECK(r.value > 0.0);
        auto pulled = pullback_energy(u, Domain::sector(alpha), 2.0, 1,
                                      QuadratureSpec(1e-4, 1e-7, 20000));
        double rel = std::abs(pulled.value / r.value - 1.0);
        CHECK(rel <= 2.0 * (r.total_error() / r.value +
                            pulled.total_error() / pulled.value) + 1e-9);
    }
}

TEST_CASE("halving the tolerance never moves the value past the estimate") {
    auto u = basic_pole();
    auto dom = Domain::halfplane();
    QuadratureSpec coarse(1e-4, 1e-7, 20000);
    QuadratureSpec fine(5e-5, 3.5e-8, 20000);
    for (double p : {1.5, 2.0}) {
        auto rc = interior_energy(u, dom, p, 1, coarse);
        auto rf = interior_energy(u, dom, p, 1, fine);
        CHECK(std::abs(rc.value - rf.value) <= rc.total_error() + rf.total_error());
    }
}

TEST_CASE("energy rejects inadmissible inputs") {
    auto dom = Domain::halfplane();
    auto u = basic_pole();
    CHECK_THROWS_AS(interior_energy(u, dom, 1.0, 1, {}), domain_error);
    CHECK_THROWS_AS(interior_energy(u, dom, 2.0, 5, {}), domain_error);
    auto interior_pole = HarmonicTestFunction::single_pole({0.0, 1.0});
    CHECK_THROWS_AS(interior_energy(interior_pole, dom, 2.0, 1, {}), singularity_error);
    auto near_pole = HarmonicTestFunction::single_pole({0.0, -0.01});
    CHECK_THROWS_AS(interior_energy(near_pole, dom, 2.0, 1, {}), singularity_error);
}

TEST_CASE("ray tail integral on the half-plane") {
    auto dom = Domain::halfplane();
    QuadratureSpec spec(1e-9, 1e-12, 4000);
    for (double eps : {0.25, 0.5, 1.0}) {
        auto r = tail_integral(dom, {0.0, 2.0}, eps, spec);
        CHECK(r.ratio == Catch::Approx(1.0 / eps).margin(1e-8));
        // translation invariance
        auto rt = tail_integral(dom, {7.0, 2.0}, eps, spec);
        CHECK(rt.ratio == Catch::Approx(1.0 / eps).margin(1e-8));
    }
    auto lo = tail_integral(dom, {0.0, 0.5}, 0.5, spec);
    CHECK(lo.integral == Catch::Approx(std::pow(0.5, -0.5) / 0.5).margin(1e-8));
}

TEST_CASE("ray tail ratios on a sector stay in a narrow bracket") {
    auto dom = Domain::sector(1.5);
    QuadratureSpec spec(1e-5, 1e-8, 4000);
    double alpha = 1.5;
    std::vector<double> ratios;
    for (double delta : {1e-2, 1.0, 1e2}) {
        // bisector points: delta(R e^{i alpha pi/2}) = R here
        cplx w = delta * std::polar(1.0, alpha * kPi / 2.0);
        auto r = tail_integral(dom, w, 0.5, spec);
        ratios.push_back(r.ratio);
    }
    double lo = *std::min_element(ratios.begin(), ratios.end());
    double hi = *std::max_element(ratios.begin(), ratios.end());
    CHECK(hi / lo < 50.0);
}

TEST_CASE("ray tail rejects out-of-range exponents") {
    CHECK_THROWS_AS(tail_integral(Domain::halfplane(), {0.0, 1.0}, 2.0, {}),
                    domain_error);
    CHECK_THROWS_AS(tail_integral(Domain::halfplane(), {0.0, 1.0}, -0.5, {}),
                    domain_error);
}
