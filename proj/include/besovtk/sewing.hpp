#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "besovtk/conformal.hpp"
#include "besovtk/curve.hpp"
#include "besovtk/errors.hpp"

namespace besovtk {

// Boundary value of a half-plane map at real x: vertical limits at
// eps = 1e-3, 1e-4, 1e-5 combined by two Richardson stages. The error
// estimate is the spread of the first-stage extrapolants; it stays near
// rounding at smooth points and grows to eps^alpha at a corner.
struct BoundaryValue {
    cplx value;
    double error;
};

inline BoundaryValue boundary_value_est(const ConformalMap& map, double x) {
    const double flip = map.source() == HalfPlane::Upper ? 1.0 : -1.0;
    cplx v1 = map.eval({x, flip * 1e-3});
    cplx v2 = map.eval({x, flip * 1e-4});
    cplx v3 = map.eval({x, flip * 1e-5});
    cplx r12 = (10.0 * v2 - v1) / 9.0;
    cplx r23 = (10.0 * v3 - v2) / 9.0;
    cplx r = (100.0 * r23 - r12) / 99.0;
    return {r, std::abs(r23 - r12) + 1e-13 * std::abs(r)};
}

inline cplx boundary_value(const ConformalMap& map, double x) {
    return boundary_value_est(map, x).value;
}

// h_Gamma(x) = psi^{-1}(phi(x)), solved through the shared boundary curve:
// both traces are points of Gamma, so h is found by matching curve parameters
// with a monotone bracketing search.
inline double sewing_eval(const Domain& domain, double x, double tol = 1e-9) {
    const ConformalMap& phi = domain.interior_map();
    const ConformalMap& psi = domain.exterior_map_or_throw();

    auto [target, target_err] = boundary_value_est(phi, x);
    double t_target = domain.curve().nearest_point(target).second;

    auto tau = [&](double h) {
        return domain.curve().nearest_point(boundary_value(psi, h)).second;
    };

    // bracket: tau is increasing for an orientation-consistent catalog
    double lo = x, hi = x;
    double step = std::max(1.0, std::abs(x));
    for (int it = 0; it < 200 && tau(lo) > t_target; ++it) lo -= step, step *= 2.0;
    step = std::max(1.0, std::abs(x));
    for (int it = 0; it < 200 && tau(hi) < t_target; ++it) hi += step, step *= 2.0;
    if (!(tau(lo) <= t_target && t_target <= tau(hi)))
        throw inversion_failure("sewing_eval: failed to bracket the trace", {lo, hi});

    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
        double mid = 0.5 * (lo + hi);
        if (tau(mid) < t_target) lo = mid;
        else hi = mid;
    }
    double h = 0.5 * (lo + hi);
    auto [meet, meet_err] = boundary_value_est(psi, h);
    double allow = std::max({tol, 1e-7 * std::abs(target),
                             4.0 * (target_err + meet_err)});
    if (std::abs(meet - target) > allow)
        throw inversion_failure("sewing_eval: traces failed to meet", {h, 0.0});
    return h;
}

// Supremum over centers and scales of max(rho, 1/rho) for the quotient of
// adjacent equal-length increments of h.
inline double quasisymmetric_constant(const std::function<double(double)>& h,
                                      const CurveWindow& window,
                                      const std::vector<double>& scales,
                                      int centers = 101) {
    if (scales.empty()) throw domain_error("quasisymmetric_constant: no scales");
    double worst = 1.0;
    for (int i = 0; i < centers; ++i) {
        double x = window.t_lo + (window.t_hi - window.t_lo) * (i + 0.5) / centers;
        double hx = h(x);
        for (double s : scales) {
            if (!(s > 0.0)) throw domain_error("quasisymmetric_constant: scales must be positive");
            double up = h(x + s) - hx;
            double dn = hx - h(x - s);
            if (!(up > 0.0) || !(dn > 0.0))
                throw monotonicity_error("quasisymmetric_constant: non-monotone samples");
            double rho = up / dn;
            worst = std::max(worst, std::max(rho, 1.0 / rho));
        }
    }
    return worst;
}

// Least-squares exponent of h over log-spaced x in [x_lo, x_hi]: slope of
// log h(x) against log x.
inline double fit_sewing_exponent(const std::function<double(double)>& h, double x_lo,
                                  double x_hi, int n = 25) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        double x = x_lo * std::pow(x_hi / x_lo, i / double(n - 1));
        double y = h(x);
        if (!(y > 0.0)) throw monotonicity_error("fit_sewing_exponent: h must be positive");
        double lx = std::log(x), ly = std::log(y);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace besovtk
