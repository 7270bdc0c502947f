#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "besovtk/conformal.hpp"
#include "besovtk/curve.hpp"
#include "besovtk/errors.hpp"
#include "besovtk/harmonic.hpp"
#include "besovtk/quadrature.hpp"

namespace besovtk {

struct EnergyResult {
    double value = 0.0;
    double quadrature_error = 0.0;
    double truncation_tail = 0.0;
    double p = 0.0;
    int n = 0;
    double rect_halfwidth = 0.0;  // truncation rectangle [-R,R] x (0,R]
    bool converged = false;

    double total_error() const { return quadrature_error + truncation_tail; }
};

namespace detail {

inline double sin_power_integral(double a) {  // \int_0^pi sin^a, a > -1
    return std::sqrt(3.14159265358979323846) *
           std::exp(std::lgamma((a + 1.0) / 2.0) - std::lgamma(a / 2.0 + 1.0));
}

inline double log_beta(double x, double y) {
    return std::lgamma(x) + std::lgamma(y) - std::lgamma(x + y);
}

// growth model of a catalog map: |phi(z)| >= A_lo |z|^alpha and
// |phi'(z)| <= A_hi |z|^(alpha-1) once |z| >= R0
struct MapGrowth {
    double A_lo, A_hi, alpha, R0;
    bool exact_halfplane;  // delta(phi(z)) equals scale * y exactly
};

inline MapGrowth map_growth(const ConformalMap& map) {
    double s = std::abs(map.scale());
    double off = std::abs(map.offset());
    switch (map.kind()) {
        case MapKind::IdentityH:
        case MapKind::IdentityL:
            return {0.5 * s, s, 1.0, std::max(1.0, 4.0 * off / s), true};
        case MapKind::GratingMap: {
            double c = map.grating_c();
            return {0.5 * s, s * (1.0 + c), 1.0,
                    std::max(1.0, 4.0 * (c + off / s)), false};
        }
        case MapKind::Power: {
            double a = map.alpha();
            return {0.5 * s, s * a, a,
                    std::max(1.0, std::pow(4.0 * off / s + 1.0, 1.0 / a)), false};
        }
        case MapKind::ExteriorPower: {
            double b = 2.0 - map.alpha();
            return {0.5 * s, s * b, b,
                    std::max(1.0, std::pow(4.0 * off / s + 1.0, 1.0 / b)), false};
        }
    }
    throw domain_error("map_growth: unknown map kind");
}

// Bound for the energy integrand mass outside |z| > R (upper half-plane),
// where the integrand is grad^n(field at phi(z))^p * delta^(np-2) |phi'|^2:
// Koebe brackets delta by 4 Im z |phi'|, and the field decay model bounds the
// gradient. Returns +inf while R is below the model's validity radius.
inline double polar_tail_bound(const FieldDecay& fd, const MapGrowth& g, double p,
                               int n, double R) {
    const double a = n * p - 2.0;
    if (R < g.R0) return INFINITY;
    if (g.A_lo * std::pow(R, g.alpha) < fd.min_radius) return INFINITY;
    double koebe = g.exact_halfplane ? 1.0 : std::pow(4.0, std::abs(a));
    double K = koebe * std::pow(fd.C[n], p) *
               std::pow(g.A_lo, -p * (fd.kappa + n)) * std::pow(g.A_hi, a + 2.0);
    double q = g.alpha * p * (fd.kappa + n) - (g.alpha - 1.0) * (a + 2.0);
    double margin = q - a - 2.0;  // = alpha * p * kappa > 0
    if (!(margin > 0.0)) return INFINITY;
    return K * sin_power_integral(a) * std::pow(R, -margin) / margin;
}

// Tail of the pullback energy for the grating composite u o (z + c e^{iz})
// over the complement of [-R,R] x (0,R]. Faa di Bruno terms are grouped by
// the order m of the inner derivative and the count s of map derivatives of
// order >= 2, each of which contributes a factor c e^{-y}.
inline double grating_pullback_tail(const FieldDecay& fd, double c, double p, int n,
                                    double R) {
    struct Part {
        double coef;
        int m, s;
    };
    static const std::vector<Part> table[5] = {
        {},
        {{1, 1, 0}},
        {{1, 2, 0}, {1, 1, 1}},
        {{1, 3, 0}, {3, 2, 1}, {1, 1, 1}},
        {{1, 4, 0}, {6, 3, 1}, {3, 2, 2}, {4, 2, 1}, {1, 1, 1}}};
    const auto& parts = table[n];
    if (R < std::max({8.0 * c, 4.0 * fd.min_radius, 8.0})) return INFINITY;
    const double kappa = fd.kappa;
    const double b = n * p - 1.0;  // y-exponent + 1
    double total = 0.0;
    for (const auto& part : parts) {
        int ones = part.m - part.s;
        double B = part.coef * fd.C[part.m] * std::pow(1.0 + c, ones) *
                   std::pow(c, part.s);
        double Bp = std::pow(B, p);
        if (Bp == 0.0) continue;
        double cm = p * (kappa + part.m);
        if (part.s == 0) {
            // pure power term, |phi| >= (|x|+y)/4 outside the rectangle
            double ce = p * (kappa + n);
            double tail_x = Bp * std::pow(4.0, ce) * 2.0 *
                            std::exp(log_beta(b, ce - b)) * std::pow(R, -p * kappa) /
                            (p * kappa);
            double tail_y = 2.0 * std::pow(2.0, ce) * Bp * std::pow(R, -p * kappa) /
                            (p * kappa + 1.0);
            total += tail_x + tail_y;
        } else {
            double ps = p * part.s;
            double tail_x = Bp * 2.0 * std::pow(2.0, cm) * std::pow(R, 1.0 - cm) /
                            (cm - 1.0) * std::exp(std::lgamma(b)) / std::pow(ps, b);
            double tail_y = Bp * 2.0 * R * std::pow(R / 2.0, -cm) *
                            std::exp(-ps * R / 2.0) * std::exp(std::lgamma(b)) *
                            std::pow(2.0 / ps, b);
            total += tail_x + tail_y;
        }
    }
    return std::pow(double(parts.size()), p - 1.0) * total;
}

template <class Field>
double energy_tail_bound(const Field& field, const ConformalMap& map, double p, int n,
                         double R);

template <>
inline double energy_tail_bound<HarmonicTestFunction>(const HarmonicTestFunction& u,
                                                      const ConformalMap& map,
                                                      double p, int n, double R) {
    return polar_tail_bound(u.decay(), map_growth(map), p, n, R);
}

template <>
inline double energy_tail_bound<PullbackField>(const PullbackField& v,
                                               const ConformalMap& map, double p,
                                               int n, double R) {
    if (!map.is_identity())
        throw truncation_error("pullback fields integrate over the half-plane only");
    if (v.grating_composite())
        return grating_pullback_tail(v.inner().decay(), v.map().grating_c(), p, n, R);
    return polar_tail_bound(v.decay(), map_growth(map), p, n, R);
}

inline std::vector<double> dyadic_breaks(double R) {
    std::vector<double> b{0.0};
    for (double x = 1.0; x < R; x *= 2.0) {
        b.push_back(x);
        b.push_back(-x);
    }
    return b;
}

}  // namespace detail

// The weighted interior energy in pullback coordinates:
//   \int_H gradnorm(field at phi(z), n)^p * delta(phi(z))^(np-2) |phi'(z)|^2 dm
// over the truncation rectangle [-R,R] x (0,R], with R chosen so the
// certified analytic tail stays below a quarter of the tolerance and the
// near-boundary strip handled by the graded-mesh extrapolation.
template <class Field>
EnergyResult interior_energy(const Field& field, const Domain& domain, double p,
                             int n, const QuadratureSpec& spec = {}) {
    if (!(p > 1.0)) throw domain_error("interior_energy: requires p > 1");
    if (n < 1 || n > 4) throw domain_error("interior_energy: order must lie in [1,4]");
    spec.validate();

    if constexpr (std::is_same_v<Field, HarmonicTestFunction>) {
        for (const auto& t : field.terms()) {
            if (domain.side_of(t.w) != Domain::Side::Exterior)
                throw singularity_error(
                    "interior_energy: poles must lie in the exterior domain");
            if (domain.boundary_distance(t.w) < 0.1)
                throw singularity_error(
                    "interior_energy: poles must keep distance 0.1 from the curve");
        }
    } else {
        if (!domain.interior_map().is_identity())
            throw truncation_error(
                "interior_energy: composite fields integrate over the half-plane");
    }

    const ConformalMap& phi = domain.interior_map();
    const Curve& curve = domain.curve();
    const double a = n * p - 2.0;
    const bool identity_map = phi.is_identity();
    const double curve_scale = std::abs(curve.scale());
    const bool line_domain = curve.kind() == CurveKind::Line;

    auto integrand = [&](double x, double y) {
        cplx z{x, y};
        cplx w = identity_map ? z : phi.eval(z);
        double g = field.grad_norm(w, n);
        double delta = line_domain ? curve_scale * y : curve.nearest_point(w).first;
        double dphi2 = identity_map ? curve_scale * curve_scale
                                    : std::norm(phi.deriv(z, 1));
        return std::pow(g, p) * std::pow(delta, a) * dphi2;
    };

    // pilot pass for the magnitude
    QuadratureSpec pilot_spec(1e-2, 1e-12, 400);
    auto pilot = integrate_2d_graded(integrand, Rect{-48.0, 48.0, 0.0, 48.0},
                                     GradedEdge{a}, pilot_spec, detail::dyadic_breaks(48.0));
    double scale_est = std::max(std::abs(pilot.value), spec.abs_tol);
    double tol = std::max(spec.abs_tol, spec.rel_tol * scale_est);

    // truncation radius from the analytic tail
    double R = 16.0;
    double tail = INFINITY;
    for (int it = 0; it < 60; ++it) {
        tail = detail::energy_tail_bound<Field>(field, phi, p, n, R);
        if (tail <= 0.25 * tol) break;
        R *= 2.0;
    }
    if (!(tail <= 0.25 * tol))
        throw truncation_error("interior_energy: tail bound failed to certify");

    QuadratureSpec inner = spec;
    inner.abs_tol = 0.5 * tol;
    inner.rel_tol = 1e-15;  // drive by the absolute budget
    inner.max_subdivisions = std::max(spec.max_subdivisions, 4000);
    inner.grading_cut = std::min(spec.grading_cut, 1e-6 / R);

    auto quad = integrate_2d_graded(integrand, Rect{-R, R, 0.0, R}, GradedEdge{a},
                                    inner, detail::dyadic_breaks(R));

    EnergyResult out;
    out.value = quad.value;
    out.quadrature_error = quad.error_estimate;
    out.truncation_tail = tail;
    out.p = p;
    out.n = n;
    out.rect_halfwidth = R;
    out.converged = quad.converged && tail <= 0.25 * tol;
    return out;
}

// I^n_p(u o phi, H): the pullback energy of u through the domain's interior
// map, integrated over the half-plane with the flat weight y^(np-2).
inline EnergyResult pullback_energy(const HarmonicTestFunction& u, const Domain& domain,
                                    double p, int n, const QuadratureSpec& spec = {}) {
    PullbackField v(u, domain);
    return interior_energy(v, Domain::halfplane(), p, n, spec);
}

// Conformal tail integral along the vertical ray L(w):
//   \int_0^inf delta(ray(t))^(-1-eps) |phi'(z_0 + it)| dt,
// plus ratio = integral * delta(w)^eps. On the half-plane the ratio is 1/eps.
struct TailIntegral {
    double integral;
    double ratio;
    double error_estimate;
};

inline TailIntegral tail_integral(const Domain& domain, cplx w, double eps,
                                  const QuadratureSpec& spec = {}) {
    if (!(eps > 0.0 && eps < 2.0))
        throw domain_error("tail_integral: eps must lie in (0,2)");
    const ConformalMap& phi = domain.interior_map();
    cplx z0 = map_inverse(phi, w, 1e-12);
    if (!(z0.imag() > 0.0)) throw domain_error("tail_integral: w must lie inside");

    auto integrand = [&](double t) {
        cplx z = z0 + cplx{0.0, t};
        double delta = domain.boundary_distance(phi.eval(z));
        return std::pow(delta, -1.0 - eps) * std::abs(phi.deriv(z, 1));
    };

    double delta_w = domain.boundary_distance(w);
    const double y0 = z0.imag();
    const double s = std::abs(phi.scale());
    const bool exact_tail =
        phi.kind() == MapKind::IdentityH || phi.kind() == MapKind::IdentityL;

    // remainder beyond t > T: exact power integral on the half-plane; for the
    // other catalog maps the Koebe bracket delta >= (y0+t)|phi'|/4 together
    // with a closed lower bound on |phi'| along the ray
    auto tail_at = [&](double T0) {
        switch (phi.kind()) {
            case MapKind::IdentityH:
            case MapKind::IdentityL:
                return std::pow(s, -eps) * std::pow(y0 + T0, -eps) / eps;
            case MapKind::GratingMap: {
                double c = phi.grating_c();
                return std::pow(s, -eps) * std::pow(4.0, 1.0 + eps) *
                       std::pow(1.0 - c, -eps) * std::pow(y0 + T0, -eps) / eps;
            }
            case MapKind::Power:
            case MapKind::ExteriorPower: {
                double alpha = phi.kind() == MapKind::Power ? phi.alpha()
                                                            : 2.0 - phi.alpha();
                double lead = std::pow(s, -eps) * std::pow(4.0, 1.0 + eps) *
                              std::pow(alpha, -eps);
                if (alpha >= 1.0)
                    return lead * std::pow(y0 + T0, -alpha * eps) / (alpha * eps);
                double A = std::abs(z0.real()) + y0;
                double Q = (A + T0) / (y0 + T0);
                return lead * std::pow(Q, 1.0 + eps) *
                       std::pow(A + T0, -alpha * eps) / (alpha * eps);
            }
        }
        return double(INFINITY);
    };

    double budget = std::max(spec.abs_tol, spec.rel_tol * std::pow(delta_w, -eps) / eps);
    double T = 16.0 * std::max(1.0, y0);
    double tail = tail_at(T);
    if (!exact_tail) {
        for (int it = 0; it < 50 && tail > 0.25 * budget; ++it) {
            T *= 2.0;
            tail = tail_at(T);
        }
        if (!(tail <= 0.25 * budget))
            throw truncation_error("tail_integral: truncation failed to certify");
    }

    QuadratureSpec inner = spec;
    inner.abs_tol = 0.5 * budget;
    auto quad = integrate_1d(integrand, 0.0, T, inner);

    TailIntegral out;
    if (exact_tail) {
        out.integral = quad.value + tail;
        out.error_estimate = quad.error_estimate;
    } else {
        out.integral = quad.value + 0.5 * tail;
        out.error_estimate = quad.error_estimate + 0.5 * tail;
    }
    out.ratio = out.integral * std::pow(delta_w, eps);
    return out;
}

}  // namespace besovtk
