#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "besovtk/curve.hpp"
#include "besovtk/errors.hpp"
#include "besovtk/quadrature.hpp"

namespace besovtk {

struct ChordArcResult {
    double constant;
    double t1, t2;  // witness pair
};

struct AhlforsResult {
    double constant;
    double center_t;  // witness center parameter (center lies on the curve)
    double radius;    // witness radius
};

struct MeyerDavidResult {
    double value;           // integral of |dz|/|z-w|^2 (window + tail)
    double error_estimate;  // quadrature error plus half of any tail bracket
    double delta;           // dist(w, curve)
    double ratio;           // delta * value
    bool finite_only;       // no tail available (polyline)
};

struct DiagnosticsReport {
    std::string curve_id;
    double chord_arc_constant;
    double ca_t1, ca_t2;
    double ahlfors_constant;
    double ah_center_t;
    double ah_radius;
    double meyer_david_sup;
    double md_t, md_h;  // witness probe: offset h along the left normal at t
    double window_lo, window_hi;
    int sample_count;
};

namespace detail {

// prefix arc lengths along the sample grid
inline std::vector<double> prefix_arcs(const Curve& curve,
                                       const std::vector<CurveSample>& s) {
    std::vector<double> cum(s.size(), 0.0);
    for (std::size_t i = 1; i < s.size(); ++i)
        cum[i] = cum[i - 1] + arc_length(curve, s[i - 1].t, s[i].t, 1e-11);
    return cum;
}

inline double golden_max(const std::function<double(double)>& f, double a, double b,
                         int iters = 60) {
    const double gr = 0.6180339887498949;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int i = 0; i < iters && b - a > 1e-14 * std::max(1.0, std::abs(b)); ++i) {
        if (f1 > f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = f(x2);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace detail

// Supremum over parameter pairs of arc(t1,t2)/|chord|, with golden-section
// refinement around the discrete argmax. Always >= 1.
inline ChordArcResult chord_arc_constant(const Curve& curve, const CurveWindow& window) {
    auto s = curve_window_samples(curve, window);
    auto cum = detail::prefix_arcs(curve, s);
    const std::size_t n = s.size();
    double best = 1.0;
    std::size_t bi = 0, bj = n - 1;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double chord = std::abs(s[j].point - s[i].point);
            if (chord < 1e-14)
                throw injectivity_error("chord_arc_constant: coincident points at t=" +
                                        std::to_string(s[i].t) + ", " + std::to_string(s[j].t));
            double ratio = (cum[j] - cum[i]) / chord;
            if (ratio > best) {
                best = ratio;
                bi = i;
                bj = j;
            }
        }
    }

    double t1 = s[bi].t, t2 = s[bj].t;
    auto ratio_at = [&](double a, double b) {
        double chord = std::abs(curve.eval(b) - curve.eval(a));
        if (chord < 1e-14) return 0.0;
        return arc_length(curve, std::min(a, b), std::max(a, b), 1e-11) / chord;
    };
    for (int round = 0; round < 3; ++round) {
        double lo1 = s[bi == 0 ? 0 : bi - 1].t, hi1 = s[std::min(bi + 1, n - 1)].t;
        t1 = detail::golden_max([&](double a) { return ratio_at(a, t2); }, lo1, hi1);
        double lo2 = s[bj == 0 ? 0 : bj - 1].t, hi2 = s[std::min(bj + 1, n - 1)].t;
        t2 = detail::golden_max([&](double b) { return ratio_at(t1, b); }, lo2, hi2);
    }
    double refined = ratio_at(t1, t2);
    if (refined >= best) return {refined, t1, t2};
    return {best, s[bi].t, s[bj].t};
}

// Arc length of the windowed curve inside the annulus r_lo <= |z-center| <= r_hi.
// Segment crossings of either threshold are bisected before the length of the
// inside portion is accumulated.
inline double arc_within_annulus(const Curve& curve, const CurveWindow& window,
                                 cplx center, double r_lo, double r_hi) {
    // uniform walking grid: crossings are bisected, so moderate density is fine
    CurveWindow walk(window.t_lo, window.t_hi, std::max(window.sample_count, 801));
    std::vector<CurveSample> s;
    s.reserve(walk.sample_count);
    std::vector<double> ts;
    for (int i = 0; i < walk.sample_count; ++i)
        ts.push_back(walk.t_lo + (walk.t_hi - walk.t_lo) * i / double(walk.sample_count - 1));
    for (double c : curve.corner_params(walk.t_lo, walk.t_hi)) ts.push_back(c);
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    for (double t : ts) s.push_back({t, curve.eval(t), curve.deriv(t)});
    auto inside = [&](double t) {
        double d = std::abs(curve.eval(t) - center);
        return d >= r_lo && d <= r_hi;
    };
    auto cross = [&](double ta, double tb) {  // boundary of the inside set in (ta,tb)
        bool ia = inside(ta);
        for (int it = 0; it < 80; ++it) {
            double tm = 0.5 * (ta + tb);
            if (inside(tm) == ia) ta = tm; else tb = tm;
        }
        return 0.5 * (ta + tb);
    };
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        double ta = s[i].t, tb = s[i + 1].t;
        bool ia = inside(ta), ib = inside(tb);
        if (ia && ib) {
            total += arc_length(curve, ta, tb, 1e-11);
        } else if (ia != ib) {
            double tc = cross(ta, tb);
            if (ia) total += arc_length(curve, ta, tc, 1e-11);
            else total += arc_length(curve, tc, tb, 1e-11);
        } else {
            // both outside: check the midpoint for a short interior dip
            double tm = 0.5 * (ta + tb);
            if (inside(tm)) {
                double tc1 = cross(ta, tm);
                double tc2 = cross(tm, tb);
                total += arc_length(curve, tc1, tc2, 1e-11);
            }
        }
    }
    return total;
}

inline double arc_within_ball(const Curve& curve, const CurveWindow& window, cplx center,
                              double r) {
    return arc_within_annulus(curve, window, center, 0.0, r);
}

// Supremum of arc(curve ∩ B(z,r))/r over centers sampled on the curve and the
// given radii, golden-refined in the radius and the center parameter.
// Restricting centers to the curve costs at most a factor 2 against arbitrary
// centers: any ball meeting the curve sits inside the doubled ball about a
// curve point it contains.
inline AhlforsResult ahlfors_constant(const Curve& curve, const CurveWindow& window,
                                      const std::vector<double>& radii) {
    if (radii.empty()) throw domain_error("ahlfors_constant: need at least one radius");
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (!(radii[i] > 0.0)) throw domain_error("ahlfors_constant: radii must be positive");
        if (i > 0 && radii[i] < radii[i - 1])
            throw domain_error("ahlfors_constant: radii must be sorted");
    }
    auto s = curve_window_samples(curve, window);
    std::size_t stride = std::max<std::size_t>(1, s.size() / 48);
    double best = 0.0, best_t = s.front().t, best_r = radii.front();
    for (std::size_t i = 0; i < s.size(); i += stride) {
        for (double r : radii) {
            double len = arc_within_ball(curve, window, s[i].point, r);
            if (len / r > best) {
                best = len / r;
                best_t = s[i].t;
                best_r = r;
            }
        }
    }
    auto value_at = [&](double t, double r) {
        return arc_within_ball(curve, window, curve.eval(t), r) / r;
    };
    double r_lo = best_r / 2.0, r_hi = best_r * 2.0;
    best_r = detail::golden_max([&](double r) { return value_at(best_t, r); }, r_lo, r_hi, 40);
    double span = (window.t_hi - window.t_lo) / double(s.size() / stride);
    best_t = detail::golden_max(
        [&](double t) { return value_at(t, best_r); },
        std::max(window.t_lo, best_t - span), std::min(window.t_hi, best_t + span), 40);
    best = value_at(best_t, best_r);
    return {best, best_t, best_r};
}

namespace detail {

// Exact tail of integral dt/((t-u)^2 + v^2) over [T, inf).
inline double arctan_tail(double T, double u, double v) {
    double av = std::abs(v);
    if (av < 1e-300) {
        if (T <= u) throw domain_error("arctan_tail: singular tail");
        return 1.0 / (T - u);
    }
    return (1.5707963267948966 - std::atan((T - u) / av)) / av;
}

}  // namespace detail

// The regularity integral delta(w) * \int |dz|/|z-w|^2. The windowed part is
// adaptive quadrature; the two unbounded ends get closed-form tails where the
// catalog admits them (line, sector rays, numeric compactified tails for the
// parabola) and an analytic upper bracket otherwise (grating, wiggle). For a
// polyline there is no tail and the result is flagged finite-only.
inline MeyerDavidResult meyer_david_ratio(const Curve& curve, cplx w,
                                          const CurveWindow& window, double tol = 1e-9) {
    if (!(tol > 0.0)) throw domain_error("meyer_david_ratio: tol must be positive");
    // work on the base curve: a similarity scales the integral by 1/|scale|
    const cplx a = curve.scale(), b = curve.offset();
    const cplx w0 = (w - b) / a;
    const double inv_scale = 1.0 / std::abs(a);
    Curve base = curve.similarity(1.0 / a, -b / a);  // undo the transform

    auto [delta0, tnear] = base.nearest_point(w0);
    (void)tnear;
    if (delta0 < 1e-12) throw domain_error("meyer_david_ratio: w lies on the curve");

    auto integrand = [&](double t) {
        cplx d = base.eval(t) - w0;
        return std::abs(base.deriv(t)) / std::norm(d);
    };
    QuadratureSpec spec;
    spec.rel_tol = 1e-12;
    spec.abs_tol = tol * delta0 * 0.5;
    spec.max_subdivisions = 8000;
    auto win = integrate_1d(integrand, window.t_lo, window.t_hi, spec,
                            base.corner_params(window.t_lo, window.t_hi));

    double value = win.value;
    double err = win.error_estimate;
    bool finite_only = false;

    const double T_hi = window.t_hi, T_lo = window.t_lo;
    switch (base.kind()) {
        case CurveKind::Line: {
            value += detail::arctan_tail(T_hi, w0.real(), w0.imag());
            value += detail::arctan_tail(-T_lo, -w0.real(), w0.imag());
            break;
        }
        case CurveKind::SectorBoundary: {
            // positive ray along arg 0, negative ray along arg alpha*pi
            cplx u0 = w0;
            value += detail::arctan_tail(T_hi, u0.real(), u0.imag());
            cplx u1 = w0 * std::polar(1.0, -base.sector_alpha() * 3.14159265358979323846);
            value += detail::arctan_tail(-T_lo, u1.real(), u1.imag());
            break;
        }
        case CurveKind::Parabola: {
            QuadratureSpec tail_spec = spec;
            auto hi = integrate_1d(integrand, T_hi, INFINITY, tail_spec);
            auto lo = integrate_1d(integrand, -INFINITY, T_lo, tail_spec);
            value += hi.value + lo.value;
            err += hi.error_estimate + lo.error_estimate;
            break;
        }
        case CurveKind::Grating:
        case CurveKind::Wiggle: {
            double speed = base.deriv_sup();
            double shrink = base.kind() == CurveKind::Grating ? base.grating_c() : 0.0;
            double margin = shrink + std::abs(w0);
            if (T_hi <= margin + 1.0 || -T_lo <= margin + 1.0)
                throw window_insufficient_error(
                    "meyer_david_ratio: window too small for the tail bound");
            double bound = speed * (1.0 / (T_hi - margin) + 1.0 / (-T_lo - margin));
            value += 0.5 * bound;
            err += 0.5 * bound;
            break;
        }
        case CurveKind::Polyline:
            finite_only = true;
            break;
    }

    MeyerDavidResult out;
    out.value = value * inv_scale;
    out.error_estimate = err * inv_scale;
    out.delta = delta0 * std::abs(a);
    out.ratio = out.delta * out.value;
    out.finite_only = finite_only;
    return out;
}

// Probe grid for the regularity sup: nt parameters across the window, nh
// offsets along the left normal, log-spaced over [h_lo, h_hi].
struct MeyerDavidSup {
    double sup;
    double t, h;  // witness probe
};

inline MeyerDavidSup meyer_david_sup(const Curve& curve, const CurveWindow& window,
                                     int nt = 5, int nh = 5, double h_lo = 0.5,
                                     double h_hi = 8.0, double tol = 1e-7) {
    MeyerDavidSup out{0.0, 0.0, 0.0};
    for (int i = 0; i < nt; ++i) {
        double t = window.t_lo +
                   (window.t_hi - window.t_lo) * (i + 1) / double(nt + 1);
        cplx tangent = curve.deriv(t);
        cplx normal = cplx{0.0, 1.0} * tangent / std::abs(tangent);
        for (int j = 0; j < nh; ++j) {
            double h = h_lo * std::pow(h_hi / h_lo, nh == 1 ? 0.0 : j / double(nh - 1));
            cplx w = curve.eval(t) + h * normal;
            auto md = meyer_david_ratio(curve, w, window, tol);
            if (md.ratio > out.sup) {
                out.sup = md.ratio;
                out.t = t;
                out.h = h;
            }
        }
    }
    return out;
}

}  // namespace besovtk
