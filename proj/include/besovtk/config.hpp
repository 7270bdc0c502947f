#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "besovtk/conformal.hpp"
#include "besovtk/curve.hpp"
#include "besovtk/errors.hpp"
#include "besovtk/harmonic.hpp"
#include "besovtk/quadrature.hpp"

namespace besovtk {

struct config_error : std::runtime_error {
    std::vector<std::string> violations;
    explicit config_error(std::vector<std::string> v)
        : std::runtime_error(join(v)), violations(std::move(v)) {}
    static std::string join(const std::vector<std::string>& v) {
        std::string s = "invalid config:";
        for (const auto& x : v) s += "\n  " + x;
        return s;
    }
};

enum class ExperimentKind {
    Equivalence,
    Characterization,
    Diagnostics,
    Tail,
    Sewing,
    Carleson,
    Energy,
    BoundaryNorm
};

struct DomainSpec {
    std::string kind = "halfplane";  // halfplane | sector | grating | parabola | wiggle | polyline
    double alpha = 1.0;
    double c = 0.5;
    double a = 1.0;
    int depth = 3;
    std::string points_csv;
    std::vector<double> sweep;  // sweep of the kind's parameter; empty = single run

    bool has_maps() const {
        return kind == "halfplane" || kind == "sector" || kind == "grating";
    }

    std::string id(std::optional<double> param = std::nullopt) const {
        if (kind == "halfplane") return "halfplane";
        std::ostringstream os;
        if (kind == "sector") os << "sector:alpha=" << param.value_or(alpha);
        else if (kind == "grating") os << "grating:c=" << param.value_or(c);
        else if (kind == "parabola") os << "parabola:a=" << param.value_or(a);
        else if (kind == "wiggle") os << "wiggle:depth=" << int(param.value_or(depth));
        else os << "polyline:" << points_csv;
        return os.str();
    }

    Curve make_curve(std::optional<double> param = std::nullopt) const;
    Domain make_domain(std::optional<double> param = std::nullopt) const;
};

struct ProbeSpec {
    int per_site = 3;        // delta targets per boundary site
    int sites = 3;           // boundary sites across the window
    double delta_lo = 1e-2;
    double delta_hi = 1e2;
};

struct BoxSpec {
    double center = 0.0;
    int k_lo = -4;
    int k_hi = 4;
};

struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::Diagnostics;
    DomainSpec domain;
    std::vector<std::string> function_specs{"pole(w=-3i,k=1,coef=1)"};
    std::vector<double> p{2.0};
    std::vector<int> n{1, 2};
    double window_lo = -50.0, window_hi = 50.0;
    int window_samples = 2001;
    QuadratureSpec quadrature{1e-5, 1e-8, 20000};
    ProbeSpec probes;
    BoxSpec boxes;
    std::vector<double> eps{0.5};
    std::vector<double> scales{0.25, 0.5, 1.0, 2.0, 4.0};
    std::vector<double> radii;
    double bracket_spread = 1e2;
    std::string out_dir = "reports";

    CurveWindow window() const { return CurveWindow(window_lo, window_hi, window_samples); }
};

// --- textual pole-term functions: pole(w=-1i,k=1,coef=1)+cpole(w=2+1i,...) ---

namespace detail {

inline bool parse_complex(const std::string& text, cplx& out) {
    // forms: a, bi, a+bi, a-bi, i, -i (whitespace-free)
    std::string s;
    for (char ch : text)
        if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
    if (s.empty()) return false;
    auto parse_num = [](const std::string& t, double& v) {
        if (t.empty()) return false;
        if (t == "+" || t == "") { v = 1.0; return true; }
        if (t == "-") { v = -1.0; return true; }
        try {
            std::size_t used = 0;
            v = std::stod(t, &used);
            return used == t.size();
        } catch (...) { return false; }
    };
    // split at the sign of the imaginary part (not the leading sign, not an exponent sign)
    if (s.back() == 'i' || s.back() == 'I') {
        std::string body = s.substr(0, s.size() - 1);
        for (std::size_t i = body.size(); i-- > 1;) {
            char ch = body[i];
            if ((ch == '+' || ch == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
                double re, im;
                if (parse_num(body.substr(0, i), re) &&
                    parse_num(body.substr(i), im)) {
                    out = {re, im};
                    return true;
                }
                return false;
            }
        }
        double im;
        if (!parse_num(body, im)) return false;
        out = {0.0, im};
        return true;
    }
    double re;
    if (!parse_num(s, re)) return false;
    out = {re, 0.0};
    return true;
}

}  // namespace detail

// Parses a sum of pole terms into a harmonic test function.
inline HarmonicTestFunction parse_test_function(const std::string& text) {
    std::vector<PoleTerm> holo, anti;
    std::vector<std::string> violations;
    std::size_t pos = 0;
    while (pos < text.size()) {
        while (pos < text.size() &&
               (std::isspace(static_cast<unsigned char>(text[pos])) || text[pos] == '+'))
            ++pos;
        if (pos >= text.size()) break;
        bool conj = false;
        if (text.compare(pos, 6, "cpole(") == 0) {
            conj = true;
            pos += 6;
        } else if (text.compare(pos, 5, "pole(") == 0) {
            pos += 5;
        } else {
            violations.push_back("functions: expected pole(/cpole( at '" +
                                 text.substr(pos, 12) + "'");
            break;
        }
        std::size_t close = text.find(')', pos);
        if (close == std::string::npos) {
            violations.push_back("functions: unterminated pole term");
            break;
        }
        std::string args = text.substr(pos, close - pos);
        pos = close + 1;
        PoleTerm term;
        std::stringstream ss(args);
        std::string kv;
        while (std::getline(ss, kv, ',')) {
            auto eq = kv.find('=');
            if (eq == std::string::npos) {
                violations.push_back("functions: malformed argument '" + kv + "'");
                continue;
            }
            std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
            if (key == "w") {
                if (!detail::parse_complex(val, term.w))
                    violations.push_back("functions: bad complex literal '" + val + "'");
            } else if (key == "k") {
                term.k = std::stoi(val);
            } else if (key == "coef") {
                if (!detail::parse_complex(val, term.coef))
                    violations.push_back("functions: bad complex literal '" + val + "'");
            } else {
                violations.push_back("functions: unknown key '" + key + "'");
            }
        }
        (conj ? anti : holo).push_back(term);
    }
    if (!violations.empty()) throw config_error(violations);
    if (holo.empty() && anti.empty())
        throw config_error({"functions: no pole terms found"});
    return HarmonicTestFunction(holo, anti);
}

inline std::vector<cplx> read_polyline_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error({"domain.points_csv: cannot open '" + path + "'"});
    std::vector<cplx> pts;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string a, b;
        if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',')) continue;
        try {
            pts.push_back({std::stod(a), std::stod(b)});
        } catch (...) {
            continue;  // header or comment line
        }
    }
    if (pts.size() < 2)
        throw config_error({"domain.points_csv: fewer than two numeric rows"});
    return pts;
}

inline Curve DomainSpec::make_curve(std::optional<double> param) const {
    if (kind == "halfplane") return Curve::line();
    if (kind == "sector") return Curve::sector_boundary(param.value_or(alpha));
    if (kind == "grating") return Curve::grating(param.value_or(c));
    if (kind == "parabola") return Curve::parabola(param.value_or(a));
    if (kind == "wiggle") return Curve::wiggle(int(param.value_or(depth)));
    if (kind == "polyline") return Curve::polyline(read_polyline_csv(points_csv));
    throw config_error({"domain.kind: unknown '" + kind + "'"});
}

inline Domain DomainSpec::make_domain(std::optional<double> param) const {
    if (kind == "halfplane") return Domain::halfplane();
    if (kind == "sector") return Domain::sector(param.value_or(alpha));
    if (kind == "grating") return Domain::grating(param.value_or(c));
    throw unsupported_domain_error("domain '" + kind +
                                   "' is geometry-only (no conformal maps)");
}

// Parses and validates a JSON config, reporting every violation at once.
inline ExperimentConfig parse_config(const std::string& text) {
    std::vector<std::string> bad;
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        throw config_error({std::string("json: ") + e.what()});
    }

    ExperimentConfig cfg;

    if (j.contains("experiment")) {
        std::string k = j["experiment"];
        if (k == "equivalence") cfg.experiment = ExperimentKind::Equivalence;
        else if (k == "characterization") cfg.experiment = ExperimentKind::Characterization;
        else if (k == "diagnostics") cfg.experiment = ExperimentKind::Diagnostics;
        else if (k == "tail") cfg.experiment = ExperimentKind::Tail;
        else if (k == "sewing") cfg.experiment = ExperimentKind::Sewing;
        else if (k == "carleson") cfg.experiment = ExperimentKind::Carleson;
        else if (k == "energy") cfg.experiment = ExperimentKind::Energy;
        else if (k == "boundary-norm") cfg.experiment = ExperimentKind::BoundaryNorm;
        else bad.push_back("experiment: unknown kind '" + k + "'");
    }

    if (j.contains("domain")) {
        const auto& d = j["domain"];
        if (d.contains("kind")) cfg.domain.kind = d["kind"];
        if (d.contains("alpha")) cfg.domain.alpha = d["alpha"];
        if (d.contains("c")) cfg.domain.c = d["c"];
        if (d.contains("a")) cfg.domain.a = d["a"];
        if (d.contains("depth")) cfg.domain.depth = d["depth"];
        if (d.contains("points_csv")) cfg.domain.points_csv = d["points_csv"];
        if (d.contains("sweep"))
            cfg.domain.sweep = d["sweep"].get<std::vector<double>>();

        const std::string& k = cfg.domain.kind;
        if (k != "halfplane" && k != "sector" && k != "grating" && k != "parabola" &&
            k != "wiggle" && k != "polyline")
            bad.push_back("domain.kind: unknown '" + k + "'");
        auto check_param = [&](double v, const std::string& path) {
            if (k == "sector" && !(v > 0.0 && v < 2.0))
                bad.push_back(path + ": sector alpha must lie in (0,2), got " +
                              std::to_string(v));
            if (k == "grating" && !(v >= 0.0 && v < 1.0))
                bad.push_back(path + ": grating c must lie in [0,1), got " +
                              std::to_string(v));
            if (k == "parabola" && !(v > 0.0))
                bad.push_back(path + ": parabola a must be positive, got " +
                              std::to_string(v));
            if (k == "wiggle" && !(v >= 1.0))
                bad.push_back(path + ": wiggle depth must be >= 1, got " +
                              std::to_string(v));
        };
        if (cfg.domain.sweep.empty()) {
            if (k == "sector") check_param(cfg.domain.alpha, "domain.alpha");
            if (k == "grating") check_param(cfg.domain.c, "domain.c");
            if (k == "parabola") check_param(cfg.domain.a, "domain.a");
            if (k == "wiggle") check_param(double(cfg.domain.depth), "domain.depth");
        } else {
            for (std::size_t i = 0; i < cfg.domain.sweep.size(); ++i)
                check_param(cfg.domain.sweep[i],
                            "domain.sweep[" + std::to_string(i) + "]");
        }
        if (k == "polyline" && cfg.domain.points_csv.empty())
            bad.push_back("domain.points_csv: required for polyline");
    }

    if (j.contains("functions")) {
        cfg.function_specs = j["functions"].get<std::vector<std::string>>();
        if (cfg.function_specs.empty()) bad.push_back("functions: must be non-empty");
    }

    if (j.contains("p")) {
        cfg.p = j["p"].get<std::vector<double>>();
        if (cfg.p.empty()) bad.push_back("p: must be non-empty");
        for (std::size_t i = 0; i < cfg.p.size(); ++i)
            if (!(cfg.p[i] > 1.0))
                bad.push_back("p[" + std::to_string(i) + "]: must exceed 1, got " +
                              std::to_string(cfg.p[i]));
    }

    if (j.contains("n")) {
        cfg.n = j["n"].get<std::vector<int>>();
        if (cfg.n.empty()) bad.push_back("n: must be non-empty");
        for (std::size_t i = 0; i < cfg.n.size(); ++i)
            if (cfg.n[i] < 1 || cfg.n[i] > 3)
                bad.push_back("n[" + std::to_string(i) + "]: must lie in {1,2,3}, got " +
                              std::to_string(cfg.n[i]));
    }

    if (j.contains("window")) {
        const auto& w = j["window"];
        if (w.contains("t_lo")) cfg.window_lo = w["t_lo"];
        if (w.contains("t_hi")) cfg.window_hi = w["t_hi"];
        if (w.contains("samples")) cfg.window_samples = w["samples"];
        if (!(cfg.window_lo < cfg.window_hi))
            bad.push_back("window: t_lo must be below t_hi");
        if (cfg.window_samples < 2) bad.push_back("window.samples: must be >= 2");
    }

    if (j.contains("quadrature")) {
        const auto& q = j["quadrature"];
        if (q.contains("rel_tol")) cfg.quadrature.rel_tol = q["rel_tol"];
        if (q.contains("abs_tol")) cfg.quadrature.abs_tol = q["abs_tol"];
        if (q.contains("max_subdivisions"))
            cfg.quadrature.max_subdivisions = q["max_subdivisions"];
        if (q.contains("grading_ratio")) cfg.quadrature.grading_ratio = q["grading_ratio"];
        if (!(cfg.quadrature.rel_tol > 0.0) || !(cfg.quadrature.abs_tol > 0.0))
            bad.push_back("quadrature: tolerances must be positive");
        if (cfg.quadrature.max_subdivisions < 16)
            bad.push_back("quadrature.max_subdivisions: must be >= 16");
        if (!(cfg.quadrature.grading_ratio > 1.0))
            bad.push_back("quadrature.grading_ratio: must exceed 1");
    }

    if (j.contains("probes")) {
        const auto& pr = j["probes"];
        if (pr.contains("per_site")) cfg.probes.per_site = pr["per_site"];
        if (pr.contains("sites")) cfg.probes.sites = pr["sites"];
        if (pr.contains("delta_lo")) cfg.probes.delta_lo = pr["delta_lo"];
        if (pr.contains("delta_hi")) cfg.probes.delta_hi = pr["delta_hi"];
        if (cfg.probes.per_site < 1 || cfg.probes.sites < 1)
            bad.push_back("probes: counts must be positive");
        if (!(cfg.probes.delta_lo > 0.0) || !(cfg.probes.delta_hi >= cfg.probes.delta_lo))
            bad.push_back("probes: need 0 < delta_lo <= delta_hi");
    }

    if (j.contains("boxes")) {
        const auto& b = j["boxes"];
        if (b.contains("center")) cfg.boxes.center = b["center"];
        if (b.contains("k_lo")) cfg.boxes.k_lo = b["k_lo"];
        if (b.contains("k_hi")) cfg.boxes.k_hi = b["k_hi"];
        if (cfg.boxes.k_lo > cfg.boxes.k_hi)
            bad.push_back("boxes: k_lo must not exceed k_hi");
    }

    if (j.contains("eps")) {
        cfg.eps = j["eps"].get<std::vector<double>>();
        for (std::size_t i = 0; i < cfg.eps.size(); ++i)
            if (!(cfg.eps[i] > 0.0 && cfg.eps[i] < 2.0))
                bad.push_back("eps[" + std::to_string(i) + "]: must lie in (0,2)");
    }

    if (j.contains("scales")) {
        cfg.scales = j["scales"].get<std::vector<double>>();
        for (std::size_t i = 0; i < cfg.scales.size(); ++i)
            if (!(cfg.scales[i] > 0.0))
                bad.push_back("scales[" + std::to_string(i) + "]: must be positive");
    }

    if (j.contains("radii")) {
        cfg.radii = j["radii"].get<std::vector<double>>();
        for (std::size_t i = 0; i < cfg.radii.size(); ++i) {
            if (!(cfg.radii[i] > 0.0))
                bad.push_back("radii[" + std::to_string(i) + "]: must be positive");
            if (i > 0 && cfg.radii[i] < cfg.radii[i - 1])
                bad.push_back("radii: must be sorted ascending");
        }
    }

    if (j.contains("brackets")) {
        const auto& b = j["brackets"];
        if (b.contains("spread")) cfg.bracket_spread = b["spread"];
        if (!(cfg.bracket_spread >= 1.0))
            bad.push_back("brackets.spread: must be >= 1");
    }

    if (j.contains("out")) {
        const auto& o = j["out"];
        if (o.contains("dir")) cfg.out_dir = o["dir"];
    }

    // validate the textual function specs
    for (std::size_t i = 0; i < cfg.function_specs.size(); ++i) {
        try {
            parse_test_function(cfg.function_specs[i]);
        } catch (const config_error& e) {
            for (const auto& v : e.violations)
                bad.push_back("functions[" + std::to_string(i) + "]: " + v);
        } catch (const std::exception& e) {
            bad.push_back("functions[" + std::to_string(i) + "]: " + e.what());
        }
    }

    if (!bad.empty()) throw config_error(bad);
    return cfg;
}

inline ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error({"config: cannot open '" + path + "'"});
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace besovtk
