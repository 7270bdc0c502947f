#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <utility>
#include <vector>

#include "besovtk/errors.hpp"
#include "besovtk/quadrature.hpp"

namespace besovtk {

enum class CurveKind { Line, SectorBoundary, Grating, Parabola, Wiggle, Polyline };

struct CurveWindow {
    double t_lo;
    double t_hi;
    int sample_count = 2001;

    CurveWindow(double lo, double hi, int n = 2001) : t_lo(lo), t_hi(hi), sample_count(n) {
        if (!(t_lo < t_hi)) throw domain_error("CurveWindow: t_lo must be below t_hi");
        if (sample_count < 2) throw domain_error("CurveWindow: sample_count must be >= 2");
    }
};

// A locally rectifiable Jordan curve through infinity (or a finite polyline),
// given by an explicit regular parametrization. Catalog curves carry an
// optional similarity z -> a*z + b applied to the image.
class Curve {
public:
    static Curve line() { return Curve(CurveKind::Line); }

    static Curve sector_boundary(double alpha) {
        if (!(alpha > 0.0 && alpha < 2.0))
            throw malformed_curve_error("sector opening alpha must lie in (0,2)");
        Curve c(CurveKind::SectorBoundary);
        c.alpha_ = alpha;
        return c;
    }

    static Curve grating(double amp) {
        if (!(amp >= 0.0 && amp < 1.0))
            throw malformed_curve_error("grating amplitude c must lie in [0,1)");
        Curve c(CurveKind::Grating);
        c.c_ = amp;
        return c;
    }

    static Curve parabola(double a) {
        if (!(a > 0.0)) throw malformed_curve_error("parabola coefficient must be positive");
        Curve c(CurveKind::Parabola);
        c.a_ = a;
        return c;
    }

    static Curve wiggle(int depth) {
        if (depth < 1) throw malformed_curve_error("wiggle depth must be >= 1");
        Curve c(CurveKind::Wiggle);
        c.depth_ = depth;
        return c;
    }

    // Arc-length parametrized; at least two distinct points required.
    static Curve polyline(std::vector<cplx> pts) {
        if (pts.size() < 2) throw malformed_curve_error("polyline needs >= 2 points");
        Curve c(CurveKind::Polyline);
        c.points_ = std::move(pts);
        c.cumlen_.resize(c.points_.size(), 0.0);
        for (std::size_t i = 1; i < c.points_.size(); ++i) {
            double seg = std::abs(c.points_[i] - c.points_[i - 1]);
            if (!(seg > 1e-14))
                throw malformed_curve_error("polyline has coincident consecutive points");
            c.cumlen_[i] = c.cumlen_[i - 1] + seg;
        }
        return c;
    }

    CurveKind kind() const { return kind_; }
    double sector_alpha() const { return alpha_; }
    double grating_c() const { return c_; }
    double parabola_a() const { return a_; }
    int wiggle_depth() const { return depth_; }
    bool finite() const { return kind_ == CurveKind::Polyline; }
    cplx scale() const { return scale_; }
    cplx offset() const { return offset_; }

    Curve similarity(cplx a, cplx b) const {
        if (std::abs(a) == 0.0) throw malformed_curve_error("similarity scale must be nonzero");
        Curve c = *this;
        c.scale_ = a * scale_;
        c.offset_ = a * offset_ + b;
        return c;
    }

    cplx eval(double t) const { return scale_ * base_eval(t) + offset_; }
    cplx deriv(double t) const { return scale_ * base_deriv(t); }

    CurveWindow default_window() const {
        switch (kind_) {
            case CurveKind::Parabola: return CurveWindow(-10.0, 10.0);
            case CurveKind::Polyline: return CurveWindow(0.0, cumlen_.back());
            default: return CurveWindow(-50.0, 50.0);
        }
    }

    bool has_corner_at_zero() const {
        return kind_ == CurveKind::SectorBoundary || kind_ == CurveKind::Wiggle;
    }

    // parameters of polyline vertices (quadrature split points)
    std::vector<double> corner_params(double lo, double hi) const {
        std::vector<double> out;
        if (has_corner_at_zero() && lo < 0.0 && hi > 0.0) out.push_back(0.0);
        if (kind_ == CurveKind::Polyline)
            for (double s : cumlen_)
                if (s > lo && s < hi) out.push_back(s);
        return out;
    }

    // sup of |deriv| over the whole parameter line (inf for the parabola)
    double deriv_sup() const {
        double m;
        switch (kind_) {
            case CurveKind::Grating: m = 1.0 + c_; break;
            case CurveKind::Parabola: m = INFINITY; break;
            case CurveKind::Wiggle: {
                double ad = kWiggleAmp * depth_;
                m = std::sqrt(1.0 + ad * ad);
                break;
            }
            default: m = 1.0; break;
        }
        return m * std::abs(scale_);
    }

    // c with |eval(s)-eval(t)| >= c*|s-t| for all s,t (0 when unavailable)
    double chord_lower_factor() const {
        double c;
        switch (kind_) {
            case CurveKind::Line: c = 1.0; break;
            case CurveKind::SectorBoundary: c = std::sin(alpha_ * kPi / 2.0); break;
            case CurveKind::Grating: c = 1.0 - c_; break;
            case CurveKind::Parabola: c = 1.0; break;
            case CurveKind::Wiggle: c = std::cos(kWiggleAmp); break;
            default: c = 0.0; break;
        }
        return c * std::abs(scale_);
    }

    // Fast distance to the curve: closed forms for line/sector/parabola and a
    // seeded Newton scan for the rest. Returns (delta, nearest parameter).
    std::pair<double, double> nearest_point(cplx w) const {
        cplx wb = (w - offset_) / scale_;
        auto [d, t] = base_nearest(wb);
        return {d * std::abs(scale_), t};
    }

    double boundary_distance(cplx w) const { return nearest_point(w).first; }

private:
    explicit Curve(CurveKind k) : kind_(k) {}

    static constexpr double kPi = 3.14159265358979323846;
    static constexpr double kWiggleAmp = kPi / 8.0;

    cplx base_eval(double t) const {
        switch (kind_) {
            case CurveKind::Line: return {t, 0.0};
            case CurveKind::SectorBoundary:
                return t >= 0.0 ? cplx{t, 0.0} : -t * std::polar(1.0, alpha_ * kPi);
            case CurveKind::Grating: return cplx{t, 0.0} + c_ * std::polar(1.0, t);
            case CurveKind::Parabola: return {t, a_ * t * t};
            case CurveKind::Wiggle: {
                double at = std::abs(t);
                if (at < 1e-300) return {t, 0.0};
                return t * std::polar(1.0, kWiggleAmp * std::sin(depth_ * std::log(at)));
            }
            case CurveKind::Polyline: {
                auto [i, s] = polyline_locate(t);
                cplx dir = (points_[i + 1] - points_[i]) / (cumlen_[i + 1] - cumlen_[i]);
                return points_[i] + s * dir;
            }
        }
        return {};
    }

    cplx base_deriv(double t) const {
        switch (kind_) {
            case CurveKind::Line: return {1.0, 0.0};
            case CurveKind::SectorBoundary:
                return t >= 0.0 ? cplx{1.0, 0.0} : -std::polar(1.0, alpha_ * kPi);
            case CurveKind::Grating:
                return cplx{1.0, 0.0} + cplx{0.0, c_} * std::polar(1.0, t);
            case CurveKind::Parabola: return {1.0, 2.0 * a_ * t};
            case CurveKind::Wiggle: {
                double at = std::abs(t);
                if (at < 1e-300) return {1.0, 0.0};
                double phase = depth_ * std::log(at);
                cplx rot = std::polar(1.0, kWiggleAmp * std::sin(phase));
                return rot * cplx{1.0, kWiggleAmp * depth_ * std::cos(phase)};
            }
            case CurveKind::Polyline: {
                auto [i, s] = polyline_locate(t);
                (void)s;
                return (points_[i + 1] - points_[i]) / (cumlen_[i + 1] - cumlen_[i]);
            }
        }
        return {};
    }

    std::pair<std::size_t, double> polyline_locate(double t) const {
        double tt = std::clamp(t, 0.0, cumlen_.back());
        auto it = std::upper_bound(cumlen_.begin(), cumlen_.end(), tt);
        std::size_t i = std::min<std::size_t>(
            cumlen_.size() - 2, it == cumlen_.begin() ? 0 : (it - cumlen_.begin() - 1));
        return {i, tt - cumlen_[i]};
    }

    static double ray_distance(cplx w, double theta, double& t_on_ray) {
        cplx u = w * std::polar(1.0, -theta);
        if (u.real() >= 0.0) {
            t_on_ray = u.real();
            return std::abs(u.imag());
        }
        t_on_ray = 0.0;
        return std::abs(u);
    }

    std::pair<double, double> base_nearest(cplx w) const {
        switch (kind_) {
            case CurveKind::Line:
                return {std::abs(w.imag()), w.real()};
            case CurveKind::SectorBoundary: {
                double t0, t1;
                double d0 = ray_distance(w, 0.0, t0);
                double d1 = ray_distance(w, alpha_ * kPi, t1);
                if (d0 <= d1) return {d0, t0};
                return {d1, -t1};
            }
            case CurveKind::Parabola:
                return parabola_nearest(w);
            case CurveKind::Grating: {
                // The nearest parameter sits within pi+2c of Re w whenever
                // Im w >= c: a sin t = 1 candidate within pi of Re w already
                // beats every farther point. Below the crests the same
                // argument leaves the larger reach below.
                double reach = w.imag() >= c_
                                   ? kPi + 2.0 * c_ + 0.1
                                   : c_ + std::hypot(kPi + c_, c_ - w.imag()) + 0.1;
                return scan_newton_nearest(w, w.real() - reach, w.real() + reach, 0.2);
            }
            case CurveKind::Wiggle: {
                double reach = 4.0 * std::abs(w) + 8.0;
                return scan_newton_nearest(w, -reach, reach, reach / 4096.0);
            }
            case CurveKind::Polyline: {
                double best = INFINITY, best_t = 0.0;
                for (std::size_t i = 0; i + 1 < points_.size(); ++i) {
                    cplx a = points_[i], b = points_[i + 1];
                    cplx ab = b - a;
                    double len2 = std::norm(ab);
                    double s = std::clamp(((w - a) * std::conj(ab)).real() / len2, 0.0, 1.0);
                    double d = std::abs(w - (a + s * ab));
                    if (d < best) {
                        best = d;
                        best_t = cumlen_[i] + s * std::abs(ab);
                    }
                }
                return {best, best_t};
            }
        }
        return {INFINITY, 0.0};
    }

    std::pair<double, double> parabola_nearest(cplx w) const {
        // stationary points of |w - (t + i a t^2)|^2: 2a^2 t^3 + (1-2ay) t - x = 0
        double x = w.real(), y = w.imag();
        double p = (1.0 - 2.0 * a_ * y) / (2.0 * a_ * a_);
        double q = -x / (2.0 * a_ * a_);
        std::vector<double> roots;
        double disc = q * q / 4.0 + p * p * p / 27.0;
        if (disc >= 0.0) {
            double sq = std::sqrt(disc);
            roots.push_back(std::cbrt(-q / 2.0 + sq) + std::cbrt(-q / 2.0 - sq));
        } else {
            double rho = std::sqrt(-p * p * p / 27.0);
            double phi = std::acos(std::clamp(-q / (2.0 * rho), -1.0, 1.0));
            double m = 2.0 * std::sqrt(-p / 3.0);
            for (int k = 0; k < 3; ++k)
                roots.push_back(m * std::cos((phi + 2.0 * kPi * k) / 3.0));
        }
        double best = INFINITY, best_t = 0.0;
        for (double t : roots) {
            double d = std::abs(w - cplx{t, a_ * t * t});
            if (d < best) {
                best = d;
                best_t = t;
            }
        }
        return {best, best_t};
    }

    std::pair<double, double> scan_newton_nearest(cplx w, double lo, double hi,
                                                  double step) const {
        double best = INFINITY, best_t = lo;
        for (double t = lo; t <= hi; t += step) {
            double d = std::abs(base_eval(t) - w);
            if (d < best) {
                best = d;
                best_t = t;
            }
        }
        // damped Newton on g(t) = Re[(gamma(t)-w) conj gamma'(t)]
        double t = best_t;
        for (int it = 0; it < 80; ++it) {
            cplx diff = base_eval(t) - w;
            cplx dp = base_deriv(t);
            double g = (diff * std::conj(dp)).real();
            double h = 1e-6 * std::max(1.0, std::abs(t));
            cplx dpp = (base_deriv(t + h) - base_deriv(t - h)) / (2.0 * h);
            double gp = std::norm(dp) + (diff * std::conj(dpp)).real();
            if (!(std::abs(gp) > 0.0)) break;
            double dt = -g / gp;
            double damp = 1.0;
            double dcur = std::abs(diff);
            while (damp > 1e-6) {
                double cand = t + damp * dt;
                if (std::abs(base_eval(cand) - w) <= dcur + 1e-18) break;
                damp *= 0.5;
            }
            t += damp * dt;
            if (std::abs(damp * dt) < 1e-12 * std::max(1.0, std::abs(t))) break;
        }
        double d = std::abs(base_eval(t) - w);
        if (d < best) {
            best = d;
            best_t = t;
        }
        return {best, best_t};
    }

    CurveKind kind_;
    double alpha_ = 1.0;
    double c_ = 0.0;
    double a_ = 1.0;
    int depth_ = 1;
    std::vector<cplx> points_;
    std::vector<double> cumlen_;
    cplx scale_{1.0, 0.0};
    cplx offset_{0.0, 0.0};
};

struct CurveSample {
    double t;
    cplx point;
    cplx tangent;
};

// Monotone parameter grid over the window; corner curves (sector vertex,
// wiggle center) get a ratio-2 geometric grid toward t=0 on each side.
inline std::vector<CurveSample> curve_window_samples(const Curve& curve,
                                                     const CurveWindow& window) {
    std::vector<double> ts;
    const int n = window.sample_count;
    const bool corner = curve.has_corner_at_zero() && window.t_lo < 0.0 && window.t_hi > 0.0;
    if (!corner) {
        ts.reserve(n);
        for (int i = 0; i < n; ++i)
            ts.push_back(window.t_lo + (window.t_hi - window.t_lo) * i / double(n - 1));
    } else {
        // ratio-2 geometric levels toward the vertex, capped well above the
        // injectivity resolution; any remaining budget fills in uniformly
        int per_side = std::min((n - 1) / 2, 34);
        ts.push_back(0.0);
        for (int j = 0; j < per_side; ++j) {
            ts.push_back(window.t_hi * std::pow(2.0, -j));
            ts.push_back(window.t_lo * std::pow(2.0, -j));
        }
        int filler = n - static_cast<int>(ts.size()) - 2;
        for (int i = 1; i <= filler; ++i)
            ts.push_back(window.t_lo + (window.t_hi - window.t_lo) * i / double(filler + 1));
        ts.push_back(window.t_lo);
        ts.push_back(window.t_hi);
        std::sort(ts.begin(), ts.end());
        ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    }
    std::vector<CurveSample> out;
    out.reserve(ts.size());
    for (double t : ts) out.push_back({t, curve.eval(t), curve.deriv(t)});
    return out;
}

// Arc length between parameters, with absolute error below tol.
inline double arc_length(const Curve& curve, double t1, double t2, double tol = 1e-10) {
    if (!(t1 <= t2)) throw domain_error("arc_length: t1 must not exceed t2");
    if (!(tol > 0.0)) throw domain_error("arc_length: tol must be positive");
    if (t1 == t2) return 0.0;
    auto speed = [&](double t) {
        double s = std::abs(curve.deriv(t));
        if (!std::isfinite(s)) throw malformed_curve_error("non-finite curve derivative");
        return s;
    };
    QuadratureSpec spec;
    spec.rel_tol = 1e-13;
    spec.abs_tol = tol;
    spec.max_subdivisions = 4000;
    auto r = integrate_1d(speed, t1, t2, spec, curve.corner_params(t1, t2));
    return r.value;
}

// Distance from w to the windowed curve: dense sampling plus damped Newton on
// the squared distance (golden-section fallback). Throws if the minimum sits
// at the window edge while the curve is still approaching w.
inline std::pair<double, double> distance_to_curve(const Curve& curve, cplx w,
                                                   const CurveWindow& window) {
    auto samples = curve_window_samples(curve, window);
    double best = INFINITY;
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        double d = std::abs(w - samples[i].point);
        if (d < best) {
            best = d;
            best_i = i;
        }
    }
    if (best < 1e-14) throw domain_error("distance_to_curve: w lies on the curve");

    auto escape_outward = [&](double t, double dir) {
        cplx diff = curve.eval(t) - w;
        double g = (diff * std::conj(curve.deriv(t))).real();
        return g * dir < 0.0;  // squared distance still decreasing outward
    };
    if (!curve.finite()) {
        if (best_i == 0 && escape_outward(window.t_lo, -1.0))
            throw window_insufficient_error("distance_to_curve: minimum escapes below window");
        if (best_i + 1 == samples.size() && escape_outward(window.t_hi, 1.0))
            throw window_insufficient_error("distance_to_curve: minimum escapes above window");
    }

    // Newton on the stationarity of the squared distance, damped on |g|.
    // The iteration roams the whole window; a bracketed golden section below
    // is the fallback when it drifts to a worse stationary point.
    double lo = samples[best_i == 0 ? 0 : best_i - 1].t;
    double hi = samples[std::min(best_i + 1, samples.size() - 1)].t;
    double t = samples[best_i].t;
    for (int it = 0; it < 100; ++it) {
        cplx diff = curve.eval(t) - w;
        cplx dp = curve.deriv(t);
        double g = (diff * std::conj(dp)).real();
        double h = 1e-7 * std::max(1.0, std::abs(t));
        cplx dpp = (curve.deriv(t + h) - curve.deriv(t - h)) / (2.0 * h);
        double gp = std::norm(dp) + (diff * std::conj(dpp)).real();
        if (!(std::abs(gp) > 0.0)) break;
        double dt = -g / gp;
        double damp = 1.0;
        double cand = t;
        while (damp > 1e-8) {
            cand = std::clamp(t + damp * dt, window.t_lo, window.t_hi);
            cplx cdiff = curve.eval(cand) - w;
            double cg = (cdiff * std::conj(curve.deriv(cand))).real();
            if (std::abs(cg) <= std::abs(g)) break;
            damp *= 0.5;
        }
        double moved = std::abs(cand - t);
        t = cand;
        if (moved < 1e-13 * std::max(1.0, std::abs(t))) break;
    }
    if (std::abs(curve.eval(t) - w) > best) t = samples[best_i].t;
    // golden-section safety net on [lo, hi]
    {
        const double gr = 0.6180339887498949;
        double a = lo, b = hi;
        double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
        double f1 = std::abs(curve.eval(x1) - w), f2 = std::abs(curve.eval(x2) - w);
        for (int it = 0; it < 80 && (b - a) > 1e-13 * std::max(1.0, std::abs(b)); ++it) {
            if (f1 < f2) {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - gr * (b - a);
                f1 = std::abs(curve.eval(x1) - w);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + gr * (b - a);
                f2 = std::abs(curve.eval(x2) - w);
            }
        }
        double tg = 0.5 * (a + b);
        if (std::abs(curve.eval(tg) - w) < std::abs(curve.eval(t) - w)) t = tg;
    }
    double delta = std::abs(curve.eval(t) - w);
    return {delta, t};
}

}  // namespace besovtk
