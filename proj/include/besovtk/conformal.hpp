#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <vector>

#include "besovtk/curve.hpp"
#include "besovtk/errors.hpp"

namespace besovtk {

enum class MapKind { IdentityH, IdentityL, Power, ExteriorPower, GratingMap };
enum class HalfPlane { Upper, Lower };

// Explicit conformal maps of a half-plane fixing infinity, with closed-form
// derivatives through order 4 and Newton inversion seeded by the asymptotic
// inverse. An optional similarity w -> a*w + b is post-composed.
class ConformalMap {
public:
    static ConformalMap identity_h() { return ConformalMap(MapKind::IdentityH); }
    static ConformalMap identity_l() { return ConformalMap(MapKind::IdentityL); }

    // z^alpha on H, image = sector {0 < arg w < alpha*pi}
    static ConformalMap power(double alpha) {
        if (!(alpha > 0.0 && alpha < 2.0))
            throw domain_error("power map: alpha must lie in (0,2)");
        ConformalMap m(MapKind::Power);
        m.alpha_ = alpha;
        return m;
    }

    // e^{i alpha pi} (-z)^{2-alpha} on L, image = the complementary sector
    // {alpha*pi < arg w < 2*pi}; branch fixed so psi(1) sits on arg 0 and
    // psi(-1) on arg alpha*pi.
    static ConformalMap exterior_power(double alpha) {
        if (!(alpha > 0.0 && alpha < 2.0))
            throw domain_error("exterior power map: alpha must lie in (0,2)");
        ConformalMap m(MapKind::ExteriorPower);
        m.alpha_ = alpha;
        return m;
    }

    // z + c e^{iz} on H, boundary trace is the grating curve
    static ConformalMap grating_map(double c) {
        if (!(c >= 0.0 && c < 1.0))
            throw domain_error("grating map: amplitude must lie in [0,1)");
        ConformalMap m(MapKind::GratingMap);
        m.c_ = c;
        return m;
    }

    MapKind kind() const { return kind_; }
    double alpha() const { return alpha_; }
    double grating_c() const { return c_; }
    cplx scale() const { return scale_; }
    cplx offset() const { return offset_; }

    HalfPlane source() const {
        return (kind_ == MapKind::IdentityL || kind_ == MapKind::ExteriorPower)
                   ? HalfPlane::Lower
                   : HalfPlane::Upper;
    }

    bool in_source(cplx z) const {
        return source() == HalfPlane::Upper ? z.imag() > 0.0 : z.imag() < 0.0;
    }

    ConformalMap similarity(cplx a, cplx b) const {
        if (std::abs(a) == 0.0) throw domain_error("similarity scale must be nonzero");
        ConformalMap m = *this;
        m.scale_ = a * scale_;
        m.offset_ = a * offset_ + b;
        return m;
    }

    cplx eval(cplx z) const { return scale_ * base_eval(z) + offset_; }

    // k-th derivative, 1 <= k <= 4
    cplx deriv(cplx z, int k) const {
        if (k < 1 || k > 4) throw domain_error("conformal map derivatives go up to order 4");
        return scale_ * base_deriv(z, k);
    }

    bool is_identity() const {
        return (kind_ == MapKind::IdentityH || kind_ == MapKind::IdentityL) &&
               scale_ == cplx{1.0, 0.0} && offset_ == cplx{0.0, 0.0};
    }

private:
    explicit ConformalMap(MapKind k) : kind_(k) {}

    static constexpr double kPi = 3.14159265358979323846;

    // -z with the branch chosen as the limit from the lower half-plane:
    // a real z must negate to a point approached from above the cut.
    static cplx negated(cplx z) {
        return {-z.real(), z.imag() == 0.0 ? 0.0 : -z.imag()};
    }

    cplx base_eval(cplx z) const {
        switch (kind_) {
            case MapKind::IdentityH:
            case MapKind::IdentityL: return z;
            case MapKind::Power: return std::pow(z, alpha_);
            case MapKind::ExteriorPower:
                return std::polar(1.0, alpha_ * kPi) * std::pow(negated(z), 2.0 - alpha_);
            case MapKind::GratingMap: return z + c_ * std::exp(cplx{0.0, 1.0} * z);
        }
        return {};
    }

    cplx base_deriv(cplx z, int k) const {
        switch (kind_) {
            case MapKind::IdentityH:
            case MapKind::IdentityL: return k == 1 ? cplx{1.0, 0.0} : cplx{0.0, 0.0};
            case MapKind::Power: {
                double coef = 1.0;
                for (int j = 0; j < k; ++j) coef *= alpha_ - j;
                return coef * std::pow(z, alpha_ - k);
            }
            case MapKind::ExteriorPower: {
                double beta = 2.0 - alpha_;
                double coef = 1.0;
                for (int j = 0; j < k; ++j) coef *= beta - j;
                double sign = (k % 2 == 0) ? 1.0 : -1.0;
                return std::polar(1.0, alpha_ * kPi) * sign * coef *
                       std::pow(negated(z), beta - k);
            }
            case MapKind::GratingMap: {
                cplx ik{0.0, 1.0};
                cplx e = c_ * std::exp(ik * z);
                cplx ipow = ik;
                for (int j = 1; j < k; ++j) ipow *= ik;
                cplx d = ipow * e;
                if (k == 1) d += 1.0;
                return d;
            }
        }
        return {};
    }

public:
    // asymptotic inverse used to seed Newton (exact for the power maps)
    cplx inverse_seed(cplx w) const {
        cplx w0 = (w - offset_) / scale_;
        switch (kind_) {
            case MapKind::IdentityH:
            case MapKind::IdentityL:
            case MapKind::GratingMap: return w0;
            case MapKind::Power: return std::pow(w0, 1.0 / alpha_);
            case MapKind::ExteriorPower: {
                cplx u = w0 * std::polar(1.0, -alpha_ * kPi);
                double theta = std::arg(u);
                if (theta < 0.0) theta += 2.0 * kPi;
                double beta = 2.0 - alpha_;
                return -std::polar(std::pow(std::abs(u), 1.0 / beta), theta / beta);
            }
        }
        return w0;
    }

private:
    MapKind kind_;
    double alpha_ = 1.0;
    double c_ = 0.0;
    cplx scale_{1.0, 0.0};
    cplx offset_{0.0, 0.0};
};

// phi(z), phi'(z), ..., phi^(k_max)(z) at an interior point.
inline std::vector<cplx> map_eval_derivs(const ConformalMap& map, cplx z, int k_max) {
    if (k_max < 0 || k_max > 4)
        throw domain_error("map_eval_derivs: k_max must lie in [0,4]");
    if (!map.in_source(z))
        throw domain_error("map_eval_derivs: z outside the open source half-plane");
    std::vector<cplx> out;
    out.reserve(k_max + 1);
    out.push_back(map.eval(z));
    for (int k = 1; k <= k_max; ++k) out.push_back(map.deriv(z, k));
    return out;
}

// Damped Newton inversion; |eval(z) - w| <= tol on success.
inline cplx map_inverse(const ConformalMap& map, cplx w, double tol = 1e-12) {
    if (!(tol > 0.0)) throw domain_error("map_inverse: tol must be positive");
    cplx z = map.inverse_seed(w);
    // keep the seed strictly inside the source
    const double flip = map.source() == HalfPlane::Upper ? 1.0 : -1.0;
    if (!map.in_source(z)) z = cplx{z.real(), flip * std::max(1e-8, std::abs(z.imag()))};
    double res = std::abs(map.eval(z) - w);
    for (int it = 0; it < 100; ++it) {
        if (res <= tol) return z;
        cplx d = map.deriv(z, 1);
        if (!(std::abs(d) > 0.0)) break;
        cplx step = -(map.eval(z) - w) / d;
        double damp = 1.0;
        bool moved = false;
        while (damp > 1e-10) {
            cplx cand = z + damp * step;
            if (map.in_source(cand)) {
                double r = std::abs(map.eval(cand) - w);
                if (r < res) {
                    z = cand;
                    res = r;
                    moved = true;
                    break;
                }
            }
            damp *= 0.5;
        }
        if (!moved) break;
    }
    if (res <= tol) return z;
    throw inversion_failure("map_inverse: Newton did not reach tolerance", z);
}

// A Jordan curve together with the Riemann maps of its two sides. The
// exterior map is absent when the catalog has no closed form (grating).
class Domain {
public:
    static Domain halfplane() {
        return Domain(Curve::line(), ConformalMap::identity_h(),
                      ConformalMap::identity_l(), "halfplane");
    }

    static Domain sector(double alpha) {
        return Domain(Curve::sector_boundary(alpha), ConformalMap::power(alpha),
                      ConformalMap::exterior_power(alpha),
                      "sector:alpha=" + std::to_string(alpha));
    }

    static Domain grating(double c) {
        return Domain(Curve::grating(c), ConformalMap::grating_map(c), std::nullopt,
                      "grating:c=" + std::to_string(c));
    }

    Domain similarity(cplx a, cplx b) const {
        Domain d = *this;
        d.curve_ = curve_.similarity(a, b);
        d.interior_ = interior_.similarity(a, b);
        if (d.exterior_) d.exterior_ = d.exterior_->similarity(a, b);
        return d;
    }

    const Curve& curve() const { return curve_; }
    const ConformalMap& interior_map() const { return interior_; }
    const std::optional<ConformalMap>& exterior_map() const { return exterior_; }
    const ConformalMap& exterior_map_or_throw() const {
        if (!exterior_)
            throw unsupported_domain_error("domain '" + id_ + "' carries no exterior map");
        return *exterior_;
    }
    const std::string& id() const { return id_; }

    double boundary_distance(cplx w) const { return curve_.nearest_point(w).first; }

    // which complementary component a point belongs to
    enum class Side { Interior, Exterior, Boundary };
    Side side_of(cplx w, double boundary_tol = 1e-12) const {
        if (boundary_distance(w) <= boundary_tol) return Side::Boundary;
        cplx w0 = (w - curve_.offset()) / curve_.scale();
        switch (curve_.kind()) {
            case CurveKind::Line:
                return w0.imag() > 0.0 ? Side::Interior : Side::Exterior;
            case CurveKind::SectorBoundary: {
                double theta = std::arg(w0);
                if (theta < 0.0) theta += 2.0 * 3.14159265358979323846;
                return theta < curve_.sector_alpha() * 3.14159265358979323846
                           ? Side::Interior
                           : Side::Exterior;
            }
            case CurveKind::Grating: {
                // the curve is a graph over x: x(t) = t + c cos t is monotone
                double c = curve_.grating_c();
                double t = w0.real();
                for (int it = 0; it < 60; ++it)
                    t -= (t + c * std::cos(t) - w0.real()) / (1.0 - c * std::sin(t));
                return w0.imag() > c * std::sin(t) ? Side::Interior : Side::Exterior;
            }
            default:
                throw unsupported_domain_error("side_of: no interior for this curve");
        }
    }

private:
    Domain(Curve c, ConformalMap in, std::optional<ConformalMap> ex, std::string id)
        : curve_(std::move(c)), interior_(in), exterior_(ex), id_(std::move(id)) {
        verify_traces();
    }

    void verify_traces() const {
        for (double x : {-20.0, -5.0, -2.0, -1.0, -0.5, 0.5, 1.0, 2.0, 5.0, 20.0}) {
            double d = curve_.nearest_point(interior_.eval({x, 0.0})).first;
            if (!(d <= 1e-9))
                throw malformed_curve_error("interior map trace leaves the curve");
            if (exterior_) {
                double de = curve_.nearest_point(exterior_->eval({x, 0.0})).first;
                if (!(de <= 1e-9))
                    throw malformed_curve_error("exterior map trace leaves the curve");
            }
        }
    }

    Curve curve_;
    ConformalMap interior_;
    std::optional<ConformalMap> exterior_;
    std::string id_;
};

// delta(phi(z)) / (Im z * |phi'(z)|); the distortion theorem pins this to
// [1/4, 4], with equality to 1 on the half-plane itself.
inline double poincare_ratio(const Domain& domain, cplx z) {
    if (!(z.imag() > 0.0)) throw domain_error("poincare_ratio: z must lie in H");
    const ConformalMap& phi = domain.interior_map();
    cplx w = phi.eval(z);
    double dphi = std::abs(phi.deriv(z, 1));
    return domain.boundary_distance(w) / (z.imag() * dphi);
}

// phi(x + i(y+t)) for w = phi(x+iy): the conformal vertical ray through w.
inline cplx vertical_ray_point(const Domain& domain, cplx w, double t,
                               double tol = 1e-12) {
    if (!(t >= 0.0)) throw domain_error("vertical_ray_point: t must be nonnegative");
    cplx z = map_inverse(domain.interior_map(), w, tol);
    return domain.interior_map().eval(z + cplx{0.0, t});
}

}  // namespace besovtk
