#pragma once

#include <cmath>
#include <vector>

#include "besovtk/errors.hpp"
#include "besovtk/harmonic.hpp"
#include "besovtk/quadrature.hpp"

namespace besovtk {

struct Interval {
    double lo, hi;
    double length() const { return hi - lo; }
    Interval tripled() const { return {2.0 * lo - hi, 2.0 * hi - lo}; }
};

// nu(Q_I) = \int_{I x (0,|I|)} |grad F|^2 y dm for one Carleson box.
template <class Field>
double carleson_box_mass(const Field& F, const Interval& I,
                         const QuadratureSpec& spec = {}) {
    if (!(I.length() > 0.0)) throw domain_error("carleson_box_mass: empty interval");
    auto integrand = [&](double x, double y) {
        double g = F.grad_norm({x, y}, 1);
        return g * g * y;
    };
    auto r = integrate_2d_graded(integrand, Rect{I.lo, I.hi, 0.0, I.length()},
                                 std::nullopt, spec);
    return r.value;
}

struct CarlesonResult {
    double norm;  // max over boxes of nu(Q_I)/|I|
    Interval argmax;
    std::vector<double> per_box;
};

// max over the given boxes of nu(Q_I)/|I|.
template <class Field>
CarlesonResult carleson_norm(const Field& F, const std::vector<Interval>& boxes,
                             const QuadratureSpec& spec = {}) {
    if (boxes.empty()) throw domain_error("carleson_norm: no boxes");
    CarlesonResult out{0.0, boxes.front(), {}};
    for (const auto& I : boxes) {
        double v = carleson_box_mass(F, I, spec) / I.length();
        out.per_box.push_back(v);
        if (v > out.norm) {
            out.norm = v;
            out.argmax = I;
        }
    }
    return out;
}

// dyadic box family centered at x0: |I| = 2^k for k in [k_lo, k_hi]
inline std::vector<Interval> dyadic_boxes(double x0, int k_lo, int k_hi) {
    std::vector<Interval> out;
    for (int k = k_lo; k <= k_hi; ++k) {
        double h = std::pow(2.0, k) / 2.0;
        out.push_back({x0 - h, x0 + h});
    }
    return out;
}

// Truncated Lusin area function:
//   S_I(F)(x0) = ( \int_{|x-x0|<y<|I|} |grad F|^2 dm )^{1/2}.
template <class Field>
double lusin_area(const Field& F, double x0, double I_len,
                  const QuadratureSpec& spec = {}) {
    if (!(I_len > 0.0)) throw domain_error("lusin_area: cone height must be positive");
    QuadratureSpec inner = spec;
    inner.rel_tol = std::max(spec.rel_tol * 0.1, 1e-13);
    inner.abs_tol = spec.abs_tol * 0.1;
    auto row = [&](double y) {
        auto f = [&](double x) {
            double g = F.grad_norm({x, y}, 1);
            return g * g;
        };
        return integrate_1d(f, x0 - y, x0 + y, inner).value;
    };
    auto r = integrate_1d(row, 0.0, I_len, spec);
    return std::sqrt(std::max(0.0, r.value));
}

// Both sides of the averaged cone inequality
//   \int_I S_I(F)^2 dx0  <=  2 nu(Q over the tripled interval).
template <class Field>
std::pair<double, double> lusin_average_inequality(const Field& F, const Interval& I,
                                                   const QuadratureSpec& spec = {}) {
    auto s2 = [&](double x0) {
        double s = lusin_area(F, x0, I.length(), spec);
        return s * s;
    };
    QuadratureSpec outer = spec;
    outer.max_subdivisions = std::max(64, spec.max_subdivisions / 8);
    auto lhs = integrate_1d(s2, I.lo, I.hi, outer);
    double rhs = 2.0 * carleson_box_mass(F, I.tripled(), spec);
    return {lhs.value, rhs};
}

}  // namespace besovtk
