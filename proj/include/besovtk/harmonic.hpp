#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "besovtk/conformal.hpp"
#include "besovtk/curve.hpp"
#include "besovtk/errors.hpp"

namespace besovtk {

// One term c * (z - w)^(-k).
struct PoleTerm {
    cplx w;
    int k = 1;
    cplx coef{1.0, 0.0};
};

// Decay model: grad-order-m data is bounded by C[m] * |z|^(-(kappa+m)) once
// |z| >= min_radius. kappa may be fractional for conformal pullbacks.
struct FieldDecay {
    std::array<double, 5> C{};
    double kappa = 1.0;
    double min_radius = 1.0;
};

namespace detail {
inline double rising(int k, int m) {
    double r = 1.0;
    for (int j = 0; j < m; ++j) r *= k + j;
    return r;
}
}  // namespace detail

// u = u1 + conj(u2) with u1, u2 finite sums of pole terms. Harmonic by
// construction; all derivatives vanish at infinity with order kappa+m.
class HarmonicTestFunction {
public:
    explicit HarmonicTestFunction(std::vector<PoleTerm> holo,
                                  std::vector<PoleTerm> anti = {})
        : holo_(std::move(holo)), anti_(std::move(anti)) {
        if (holo_.empty() && anti_.empty())
            throw domain_error("harmonic test function needs at least one pole term");
        for (const auto& t : terms())
            if (t.k < 1 || t.k > 8)
                throw domain_error("pole orders must lie in [1,8]");
    }

    static HarmonicTestFunction single_pole(cplx w, int k = 1, cplx coef = {1.0, 0.0}) {
        return HarmonicTestFunction({PoleTerm{w, k, coef}});
    }

    const std::vector<PoleTerm>& holo_terms() const { return holo_; }
    const std::vector<PoleTerm>& anti_terms() const { return anti_; }
    std::vector<PoleTerm> terms() const {
        std::vector<PoleTerm> all = holo_;
        all.insert(all.end(), anti_.begin(), anti_.end());
        return all;
    }

    // n-th z-derivative of the holomorphic part (n = 0 gives the value)
    cplx holo_deriv(cplx z, int n) const { return part_deriv(holo_, z, n); }
    // n-th z-derivative of u2 viewed as a holomorphic function
    cplx anti_deriv(cplx z, int n) const { return part_deriv(anti_, z, n); }

    cplx value(cplx z) const { return holo_deriv(z, 0) + std::conj(anti_deriv(z, 0)); }

    double grad_norm(cplx z, int n) const {
        guard_poles(z);
        cplx a = holo_deriv(z, n), b = anti_deriv(z, n);
        return std::sqrt(std::norm(a) + std::norm(b));
    }

    FieldDecay decay() const {
        FieldDecay d;
        double rho = 0.0;
        int kmin = 99;
        for (const auto& t : terms()) {
            rho = std::max(rho, std::abs(t.w));
            kmin = std::min(kmin, t.k);
        }
        d.kappa = kmin;
        d.min_radius = std::max(2.0 * rho, 1.0);
        for (int m = 0; m <= 4; ++m) {
            double c = 0.0;
            for (const auto& t : terms())
                c += std::abs(t.coef) * detail::rising(t.k, m) *
                     std::pow(2.0, t.k + m);
            d.C[m] = c;
        }
        return d;
    }

    // push-forward under sigma(z) = a z + b: returns u o sigma^{-1}
    HarmonicTestFunction similarity_pushforward(cplx a, cplx b) const {
        if (std::abs(a) == 0.0) throw domain_error("similarity scale must be nonzero");
        auto push = [&](const std::vector<PoleTerm>& src) {
            std::vector<PoleTerm> out;
            for (const auto& t : src)
                out.push_back({a * t.w + b, t.k, t.coef * std::pow(a, t.k)});
            return out;
        };
        return HarmonicTestFunction(push(holo_), push(anti_));
    }

private:
    static cplx part_deriv(const std::vector<PoleTerm>& terms, cplx z, int n) {
        cplx sum = 0.0;
        double sign = (n % 2 == 0) ? 1.0 : -1.0;
        for (const auto& t : terms)
            sum += t.coef * sign * detail::rising(t.k, n) *
                   std::pow(z - t.w, -double(t.k + n));
        return sum;
    }

    void guard_poles(cplx z) const {
        for (const auto& t : terms())
            if (std::abs(z - t.w) < 1e-12)
                throw singularity_error("evaluation too close to a pole");
    }

    std::vector<PoleTerm> holo_, anti_;
};

// |grad^n u| = sqrt(|d^n u1|^2 + |d^n u2|^2), 1 <= n <= 4.
inline double grad_norm(const HarmonicTestFunction& u, cplx z, int n) {
    if (n < 1 || n > 4) throw domain_error("grad_norm: order must lie in [1,4]");
    return u.grad_norm(z, n);
}

namespace detail {

// (f o g)^{(n)} for n <= 4 from the derivative tables f1..f4 (at g(z)) and
// g1..g4 (at z).
inline cplx composite_deriv(int n, const std::array<cplx, 5>& f,
                            const std::array<cplx, 5>& g) {
    switch (n) {
        case 0: return f[0];
        case 1: return f[1] * g[1];
        case 2: return f[2] * g[1] * g[1] + f[1] * g[2];
        case 3:
            return f[3] * g[1] * g[1] * g[1] + 3.0 * f[2] * g[1] * g[2] + f[1] * g[3];
        case 4:
            return f[4] * g[1] * g[1] * g[1] * g[1] +
                   6.0 * f[3] * g[1] * g[1] * g[2] +
                   f[2] * (4.0 * g[1] * g[3] + 3.0 * g[2] * g[2]) + f[1] * g[4];
    }
    throw domain_error("composite derivatives go up to order 4");
}

}  // namespace detail

// The pullback u o phi of a test function under a domain's interior map. Any
// similarity carried by the map is folded into the pole data so the stored
// map is always a bare catalog map.
class PullbackField {
public:
    PullbackField(const HarmonicTestFunction& u, const Domain& domain)
        : u_(normalize(u, domain.interior_map())),
          map_(strip_similarity(domain.interior_map())) {
        for (const auto& t : u.terms()) {
            if (domain.side_of(t.w) != Domain::Side::Exterior)
                throw singularity_error("pullback poles must lie in the exterior domain");
            if (domain.boundary_distance(t.w) < 0.1)
                throw singularity_error("pullback poles must keep distance 0.1 from the curve");
        }
    }

    const HarmonicTestFunction& inner() const { return u_; }
    const ConformalMap& map() const { return map_; }
    bool identity_composite() const { return map_.is_identity(); }
    bool grating_composite() const { return map_.kind() == MapKind::GratingMap; }

    cplx holo_deriv(cplx z, int n) const { return pulled(u_holo(), z, n); }
    cplx anti_deriv(cplx z, int n) const { return pulled(u_anti(), z, n); }

    cplx value(cplx z) const { return holo_deriv(z, 0) + std::conj(anti_deriv(z, 0)); }

    double grad_norm(cplx z, int n) const {
        cplx a = holo_deriv(z, n), b = anti_deriv(z, n);
        return std::sqrt(std::norm(a) + std::norm(b));
    }

    // decay of the composite (power-law maps only; the grating composite
    // carries exponential cross terms handled by a dedicated tail bound)
    FieldDecay decay() const {
        FieldDecay base = u_.decay();
        if (map_.is_identity() || map_.kind() == MapKind::IdentityH ||
            map_.kind() == MapKind::IdentityL)
            return base;
        if (map_.kind() != MapKind::Power)
            throw truncation_error("decay model unavailable for this composite");
        double alpha = map_.alpha();
        std::array<double, 5> P{};  // |phi^{(k)}| = P[k] * |z|^(alpha-k)
        for (int k = 1; k <= 4; ++k) {
            double c = 1.0;
            for (int j = 0; j < k; ++j) c *= std::abs(alpha - j);
            P[k] = c;
        }
        FieldDecay d;
        d.kappa = alpha * base.kappa;
        d.min_radius = std::max(std::pow(base.min_radius, 1.0 / alpha), 1.0);
        d.C[0] = base.C[0];
        d.C[1] = base.C[1] * P[1];
        d.C[2] = base.C[2] * P[1] * P[1] + base.C[1] * P[2];
        d.C[3] = base.C[3] * P[1] * P[1] * P[1] + 3.0 * base.C[2] * P[1] * P[2] +
                 base.C[1] * P[3];
        d.C[4] = base.C[4] * P[1] * P[1] * P[1] * P[1] +
                 6.0 * base.C[3] * P[1] * P[1] * P[2] +
                 base.C[2] * (4.0 * P[1] * P[3] + 3.0 * P[2] * P[2]) +
                 base.C[1] * P[4];
        return d;
    }

private:
    static HarmonicTestFunction normalize(const HarmonicTestFunction& u,
                                          const ConformalMap& phi) {
        if (phi.scale() == cplx{1.0, 0.0} && phi.offset() == cplx{0.0, 0.0}) return u;
        // u o (a*base + b) = (u o sigma) o base with sigma(w) = a w + b
        cplx a = phi.scale(), b = phi.offset();
        return u.similarity_pushforward(1.0 / a, -b / a);
    }

    static ConformalMap strip_similarity(const ConformalMap& phi) {
        cplx a = phi.scale(), b = phi.offset();
        if (a == cplx{1.0, 0.0} && b == cplx{0.0, 0.0}) return phi;
        return phi.similarity(1.0 / a, -b / a);
    }

    struct PartFn {
        const std::vector<PoleTerm>* terms;
        const HarmonicTestFunction* u;
        bool holo;
    };
    PartFn u_holo() const { return {&u_.holo_terms(), &u_, true}; }
    PartFn u_anti() const { return {&u_.anti_terms(), &u_, false}; }

    cplx pulled(const PartFn& part, cplx z, int n) const {
        std::array<cplx, 5> g{};
        g[0] = map_.eval(z);
        for (int k = 1; k <= std::max(1, n); ++k) g[k] = map_.deriv(z, k);
        std::array<cplx, 5> f{};
        for (int m = 0; m <= n; ++m)
            f[m] = part.holo ? part.u->holo_deriv(g[0], m) : part.u->anti_deriv(g[0], m);
        return detail::composite_deriv(n, f, g);
    }

    HarmonicTestFunction u_;
    ConformalMap map_;
};

}  // namespace besovtk
