#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>

#include "besovtk/curve.hpp"
#include "besovtk/conformal.hpp"
#include "besovtk/errors.hpp"
#include "besovtk/harmonic.hpp"
#include "besovtk/quadrature.hpp"
#include "besovtk/sewing.hpp"

namespace besovtk {

// A function living on curve points (or on the real axis embedded in C).
// A decay model enables certified tails; without one only windowed values
// are available.
struct BoundaryFunction {
    std::function<cplx(cplx)> eval;
    std::string provenance = "formula";
    std::optional<FieldDecay> decay;
    double sup_bound = INFINITY;  // global |f| bound on the curve, if known

    static BoundaryFunction trace_of(const HarmonicTestFunction& u) {
        BoundaryFunction f;
        f.eval = [u](cplx z) { return u.value(z); };
        f.provenance = "trace";
        f.decay = u.decay();
        double sup = 0.0;
        for (const auto& t : u.terms())
            sup += std::abs(t.coef) * std::pow(0.1, -double(t.k));
        f.sup_bound = sup;
        return f;
    }

    static BoundaryFunction formula(std::function<cplx(cplx)> fn) {
        BoundaryFunction f;
        f.eval = std::move(fn);
        return f;
    }
};

struct NormResult {
    double value = 0.0;           // the p-th power of the norm (the raw integral)
    double error_estimate = 0.0;  // quadrature + strip extrapolation error
    double tail_estimate = 0.0;   // certified bound on mass outside the window
    bool finite_only = false;     // no tail model was available
    bool converged = false;

    double total_error() const { return error_estimate + tail_estimate; }
};

namespace detail {

// Core engine: 2 * \int_{v>0} slice(v) dv where slice(v) integrates the
// gap-v pair integrand over the admissible offsets. The v-ladder is
// geometric toward 0 with the v^(p-2) strip model, then compactified
// (v_top infinite) or cut at the window diameter.
struct GapIntegralResult {
    double value;
    double error;
    bool converged;
};

template <class Slice>
GapIntegralResult gap_integral(const Slice& slice, double p, double v_top,
                               const QuadratureSpec& spec) {
    const double r = spec.grading_ratio;
    const double shoulder = std::isinf(v_top) ? 4.0 : std::min(4.0, v_top);
    const double cut = shoulder * 1e-9;

    std::vector<double> ladder;
    double h = shoulder;
    ladder.push_back(h);
    while (h / r > cut) {
        h /= r;
        ladder.push_back(h);
    }
    double strip_top = h / r;
    std::vector<double> vbreaks{strip_top};
    for (auto it = ladder.rbegin(); it != ladder.rend(); ++it) vbreaks.push_back(*it);

    QuadratureSpec outer = spec;
    outer.max_subdivisions = std::max(128, spec.max_subdivisions / 4);

    double total = 0.0, err = 0.0;
    double layer1 = 0.0, layer2 = 0.0;
    bool ok = true;
    for (std::size_t i = 0; i + 1 < vbreaks.size(); ++i) {
        auto piece = integrate_1d(slice, vbreaks[i], vbreaks[i + 1], outer);
        total += piece.value;
        err += piece.error_estimate;
        ok = ok && piece.converged;
        if (i == 0) layer1 = piece.value;
        if (i == 1) layer2 = piece.value;
    }
    if (std::isinf(v_top)) {
        auto upper = integrate_1d(slice, shoulder, INFINITY, outer);
        total += upper.value;
        err += upper.error_estimate;
        ok = ok && upper.converged;
    } else if (v_top > shoulder) {
        auto upper = integrate_1d(slice, shoulder, v_top, outer);
        total += upper.value;
        err += upper.error_estimate;
        ok = ok && upper.converged;
    }

    // strip (0, strip_top]: slice ~ A v^(p-2)
    double q = std::pow(r, p - 1.0);
    double s1 = layer1 / (q - 1.0);
    double s2 = layer2 / (q * (q - 1.0));
    total += s1;
    err += std::abs(s1 - s2) * q / (q - 1.0);

    return {2.0 * total, 2.0 * err, ok};
}

// certified bound on the pair-integral mass with |t| beyond T, doubled for
// the symmetric role of the two coordinates
inline double curve_norm_tail(const Curve& curve, const FieldDecay& fd, double f_sup,
                              double p, double T) {
    double M = curve.deriv_sup();
    double c = curve.chord_lower_factor();
    if (!(c > 0.0) || !std::isfinite(M)) return INFINITY;
    double kappa = fd.kappa;
    // escape floor m(t) <= |gamma(t)| for |t| >= T0
    double off = std::abs(curve.offset());
    double shrink = (curve.kind() == CurveKind::Grating ? curve.grating_c() : 0.0) +
                    off / std::abs(curve.scale());
    auto m = [&](double t) { return std::abs(curve.scale()) * (t - shrink); };
    double T0 = shrink + fd.min_radius / std::abs(curve.scale());
    if (T <= 2.0 * T0 + 2.0) return INFINITY;

    double pk = p * kappa;
    if (!(pk > 1.0)) return INFINITY;
    double C0 = fd.C[0], C1 = fd.C[1];
    double s = std::abs(curve.scale());

    // \int_X^inf m(t)^{-e} dt for e > 1
    auto power_tail = [&](double X, double e) {
        return std::pow(m(X), 1.0 - e) / (s * (e - 1.0));
    };

    // near-diagonal part: |v| <= 1, slope of f o gamma at |t| > T-1
    double near = (M * M / (c * c)) * (2.0 / (p - 1.0)) * 2.0 *
                  std::pow(C1 * M, p) * power_tail(T - 1.0, p * (kappa + 1.0));
    // far part, the |f(t)|^p term
    auto tailmass = [&](double X) { return 2.0 * std::pow(C0, p) * power_tail(X, pk); };
    double far_t = std::pow(2.0, p) * (M * M / (c * c)) * tailmass(T);
    // far part, the |f(s)|^p term: full-line p-mass of the trace
    double mass_p = 2.0 * T0 * std::pow(f_sup, p) + tailmass(T0);
    double far_s = std::pow(2.0, p - 1.0) * (M * M / (c * c)) *
                   (4.0 * mass_p / T + 2.0 * tailmass(T / 2.0));
    return 2.0 * (near + far_t + far_s);
}

}  // namespace detail

// ||f||^p_{B_p(Gamma)} over the window, in parameter coordinates:
//   \int\int |f(g(s))-f(g(t))|^p / |g(s)-g(t)|^2 |g'(s)||g'(t)| ds dt.
// Line, sector and parabola traces with a decay model integrate over the
// whole parameter line through compactified tails; other kinds report the
// windowed value plus a certified tail bound (finite-only for a polyline).
inline NormResult boundary_norm_curve(const BoundaryFunction& f, const Curve& curve,
                                      double p, const CurveWindow& window,
                                      const QuadratureSpec& spec = {}) {
    if (!(p > 1.0)) throw domain_error("boundary_norm_curve: requires p > 1");

    auto pair_integrand = [&](double t, double s) {
        cplx gt = curve.eval(t), gs = curve.eval(s);
        cplx diff = f.eval(gs) - f.eval(gt);
        double chord2 = std::norm(gs - gt);
        if (!(chord2 > 0.0)) return 0.0;
        return std::pow(std::abs(diff), p) / chord2 * std::abs(curve.deriv(t)) *
               std::abs(curve.deriv(s));
    };

    const bool full_line = f.decay.has_value() &&
                           (curve.kind() == CurveKind::Line ||
                            curve.kind() == CurveKind::SectorBoundary ||
                            curve.kind() == CurveKind::Parabola);
    QuadratureSpec inner = spec;
    inner.rel_tol = std::max(spec.rel_tol * 0.05, 1e-13);
    inner.abs_tol = spec.abs_tol * 0.05;
    inner.max_subdivisions = std::max(256, spec.max_subdivisions / 4);

    NormResult out;
    if (full_line) {
        auto slice = [&](double v) {
            auto h = [&](double t) { return pair_integrand(t, t + v); };
            // corner curves kink where either coordinate crosses zero
            return integrate_1d(h, -INFINITY, INFINITY, inner, {0.0, -v}).value;
        };
        auto g = detail::gap_integral(slice, p, INFINITY, spec);
        out.value = g.value;
        out.error_estimate = g.error;
        out.converged = g.converged;
        return out;
    }

    auto slice = [&](double v) {
        auto h = [&](double t) { return pair_integrand(t, t + v); };
        return integrate_1d(h, window.t_lo, window.t_hi - v, inner,
                            curve.corner_params(window.t_lo, window.t_hi - v)).value;
    };
    auto g = detail::gap_integral(slice, p, window.t_hi - window.t_lo, spec);
    out.value = g.value;
    out.error_estimate = g.error;
    if (curve.finite() || !f.decay.has_value()) {
        out.finite_only = true;
        out.converged = g.converged;
        return out;
    }
    double T = std::min(-window.t_lo, window.t_hi);
    out.tail_estimate = detail::curve_norm_tail(curve, *f.decay, f.sup_bound, p, T);
    if (!std::isfinite(out.tail_estimate))
        throw window_insufficient_error(
            "boundary_norm_curve: window too small for the tail bound");
    out.converged = g.converged;
    return out;
}

// ||f||^p_{B_p(R)}: the boundary norm along the real axis. Without a decay
// model only a windowed value is available and the result is flagged.
inline NormResult boundary_norm_line(const BoundaryFunction& f, double p,
                                     const QuadratureSpec& spec = {}) {
    if (f.decay.has_value())
        return boundary_norm_curve(f, Curve::line(), p, CurveWindow(-200.0, 200.0), spec);
    NormResult r;
    auto pair_integrand = [&](double x, double y) {
        cplx diff = f.eval({y, 0.0}) - f.eval({x, 0.0});
        return std::pow(std::abs(diff), p) / ((y - x) * (y - x));
    };
    QuadratureSpec inner = spec;
    inner.rel_tol = std::max(spec.rel_tol * 0.05, 1e-13);
    inner.abs_tol = spec.abs_tol * 0.05;
    auto slice = [&](double v) {
        auto h = [&](double x) { return pair_integrand(x, x + v); };
        return integrate_1d(h, -200.0, 200.0 - v, inner).value;
    };
    auto g = detail::gap_integral(slice, p, 400.0, spec);
    r.value = g.value;
    r.error_estimate = g.error;
    r.finite_only = true;
    r.converged = g.converged;
    return r;
}

// ||f||^p in the pullback convention: (1/4pi^2) ||f o (boundary trace)||^p_{B_p(R)}.
inline NormResult bp_phi_norm(const BoundaryFunction& f, const Domain& domain,
                              bool exterior_side, double p,
                              const QuadratureSpec& spec = {}) {
    const ConformalMap& map =
        exterior_side ? domain.exterior_map_or_throw() : domain.interior_map();
    auto composed = [&, map](double t) { return f.eval(boundary_value(map, t)); };

    if (!(p > 1.0)) throw domain_error("bp_phi_norm: requires p > 1");
    auto pair_integrand = [&](double x, double y) {
        cplx diff = composed(y) - composed(x);
        double d2 = (y - x) * (y - x);
        return std::pow(std::abs(diff), p) / d2;
    };
    QuadratureSpec inner = spec;
    inner.rel_tol = std::max(spec.rel_tol * 0.05, 1e-13);
    inner.abs_tol = spec.abs_tol * 0.05;
    inner.max_subdivisions = std::max(256, spec.max_subdivisions / 4);
    auto slice = [&](double v) {
        auto h = [&](double x) { return pair_integrand(x, x + v); };
        return integrate_1d(h, -INFINITY, INFINITY, inner, {0.0, -v}).value;
    };
    auto g = detail::gap_integral(slice, p, INFINITY, spec);
    const double four_pi_sq = 4.0 * 3.14159265358979323846 * 3.14159265358979323846;
    NormResult out;
    out.value = g.value / four_pi_sq;
    out.error_estimate = g.error / four_pi_sq;
    out.converged = g.converged;
    return out;
}

// Poisson extension of boundary data to z in H:
//   (1/pi) \int y f(t) / ((x-t)^2 + y^2) dt.
inline cplx poisson_extend(const BoundaryFunction& f, cplx z,
                           const QuadratureSpec& spec = {}) {
    if (!(z.imag() > 0.0)) throw domain_error("poisson_extend: z must lie in H");
    const double x = z.real(), y = z.imag();
    auto kernel = [&](double t) {
        double d = (x - t) * (x - t) + y * y;
        return y / (d * 3.14159265358979323846);
    };
    auto re = integrate_1d([&](double t) { return kernel(t) * f.eval({t, 0.0}).real(); },
                           -INFINITY, INFINITY, spec, {x});
    auto im = integrate_1d([&](double t) { return kernel(t) * f.eval({t, 0.0}).imag(); },
                           -INFINITY, INFINITY, spec, {x});
    if (!re.converged || !im.converged)
        throw divergence_error("poisson_extend: pairing failed to converge");
    return {re.value, im.value};
}

}  // namespace besovtk
