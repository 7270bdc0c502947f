#pragma once

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "besovtk/errors.hpp"

namespace besovtk {

// One experiment row: ordered typed cells. Numbers are serialized with
// enough digits that every pass/fail flag can be recomputed from the file.
struct ReportRow {
    using Cell = std::variant<double, std::string, bool>;
    std::vector<std::pair<std::string, Cell>> cells;

    void set(const std::string& key, double v) { cells.emplace_back(key, v); }
    void set(const std::string& key, const std::string& v) { cells.emplace_back(key, v); }
    void set(const std::string& key, const char* v) { cells.emplace_back(key, std::string(v)); }
    void set_flag(const std::string& key, bool ok) { cells.emplace_back(key, ok); }
    void set_unsupported(const std::string& key) {
        cells.emplace_back(key, std::string("unsupported"));
    }

    const Cell* find(const std::string& key) const {
        for (const auto& [k, v] : cells)
            if (k == key) return &v;
        return nullptr;
    }
    double number(const std::string& key) const {
        const Cell* c = find(key);
        if (!c || !std::holds_alternative<double>(*c))
            throw domain_error("report row missing numeric cell '" + key + "'");
        return std::get<double>(*c);
    }
    bool all_flags_pass() const {
        for (const auto& [k, v] : cells)
            if (std::holds_alternative<bool>(v) && !std::get<bool>(v)) return false;
        return true;
    }
};

struct Report {
    std::string experiment;
    std::vector<ReportRow> rows;
    // declared plot series: one polyline per distinct series_key value
    std::string plot_x;
    std::string plot_y;
    std::string series_key;

    bool all_pass() const {
        for (const auto& r : rows)
            if (!r.all_flags_pass()) return false;
        return true;
    }
};

namespace detail {

inline std::string cell_to_string(const ReportRow::Cell& c) {
    if (std::holds_alternative<double>(c)) {
        std::ostringstream os;
        os << std::setprecision(17) << std::get<double>(c);
        return os.str();
    }
    if (std::holds_alternative<bool>(c)) return std::get<bool>(c) ? "pass" : "fail";
    return std::get<std::string>(c);
}

inline std::vector<std::string> column_order(const std::vector<ReportRow>& rows) {
    std::vector<std::string> cols;
    for (const auto& r : rows)
        for (const auto& [k, v] : r.cells) {
            (void)v;
            bool seen = false;
            for (const auto& c : cols)
                if (c == k) { seen = true; break; }
            if (!seen) cols.push_back(k);
        }
    return cols;
}

}  // namespace detail

inline void emit_csv(const Report& report, const std::string& path) {
    if (report.rows.empty()) throw domain_error("emit_csv: no rows");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("emit_csv: cannot open '" + path + "'");
    auto cols = detail::column_order(report.rows);
    for (std::size_t i = 0; i < cols.size(); ++i)
        out << (i ? "," : "") << cols[i];
    out << "\n";
    for (const auto& r : report.rows) {
        for (std::size_t i = 0; i < cols.size(); ++i) {
            const ReportRow::Cell* c = r.find(cols[i]);
            out << (i ? "," : "") << (c ? detail::cell_to_string(*c) : "");
        }
        out << "\n";
    }
    if (!out) throw std::runtime_error("emit_csv: write failed for '" + path + "'");
}

inline void emit_json(const Report& report, const std::string& path) {
    if (report.rows.empty()) throw domain_error("emit_json: no rows");
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : report.rows) {
        nlohmann::json obj = nlohmann::json::object();
        for (const auto& [k, v] : r.cells) {
            if (std::holds_alternative<double>(v)) obj[k] = std::get<double>(v);
            else if (std::holds_alternative<bool>(v)) obj[k] = std::get<bool>(v);
            else obj[k] = std::get<std::string>(v);
        }
        arr.push_back(obj);
    }
    nlohmann::json doc;
    doc["experiment"] = report.experiment;
    doc["rows"] = arr;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("emit_json: cannot open '" + path + "'");
    out << doc.dump(1) << "\n";
    if (!out) throw std::runtime_error("emit_json: write failed for '" + path + "'");
}

// Static SVG line plot: one polyline per distinct series-key value, the
// declared ratio against the declared sweep parameter.
inline void emit_svg(const Report& report, const std::string& path) {
    if (report.rows.empty()) throw domain_error("emit_svg: no rows");
    struct Pt {
        double x, y;
    };
    std::vector<std::pair<std::string, std::vector<Pt>>> series;
    for (const auto& r : report.rows) {
        const ReportRow::Cell* xc = r.find(report.plot_x);
        const ReportRow::Cell* yc = r.find(report.plot_y);
        if (!xc || !yc || !std::holds_alternative<double>(*xc) ||
            !std::holds_alternative<double>(*yc))
            continue;
        std::string key = "all";
        if (!report.series_key.empty()) {
            const ReportRow::Cell* kc = r.find(report.series_key);
            if (kc) key = detail::cell_to_string(*kc);
        }
        auto it = series.begin();
        for (; it != series.end(); ++it)
            if (it->first == key) break;
        if (it == series.end()) {
            series.push_back({key, {}});
            it = series.end() - 1;
        }
        it->second.push_back({std::get<double>(*xc), std::get<double>(*yc)});
    }

    const double W = 720, H = 480, ml = 70, mr = 20, mt = 30, mb = 50;
    double xlo = 1e300, xhi = -1e300, ylo = 1e300, yhi = -1e300;
    for (auto& [k, pts] : series)
        for (auto& p : pts) {
            xlo = std::min(xlo, p.x);
            xhi = std::max(xhi, p.x);
            ylo = std::min(ylo, p.y);
            yhi = std::max(yhi, p.y);
        }
    if (!(xhi >= xlo)) { xlo = 0; xhi = 1; ylo = 0; yhi = 1; }
    if (xhi == xlo) { xhi = xlo + 1; }
    if (yhi == ylo) { yhi = ylo + 1; }
    auto sx = [&](double x) { return ml + (x - xlo) / (xhi - xlo) * (W - ml - mr); };
    auto sy = [&](double y) { return H - mb - (y - ylo) / (yhi - ylo) * (H - mt - mb); };

    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
    std::ofstream out(path);
    if (!out) throw std::runtime_error("emit_svg: cannot open '" + path + "'");
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\""
        << H << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    out << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << W - mr
        << "\" y2=\"" << H - mb << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
        << H - mb << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        double x = xlo + (xhi - xlo) * i / 4.0, y = ylo + (yhi - ylo) * i / 4.0;
        out << "<text x=\"" << sx(x) << "\" y=\"" << H - mb + 18
            << "\" font-size=\"11\" text-anchor=\"middle\">" << std::setprecision(4)
            << x << "</text>\n";
        out << "<text x=\"" << ml - 8 << "\" y=\"" << sy(y) + 4
            << "\" font-size=\"11\" text-anchor=\"end\">" << std::setprecision(4) << y
            << "</text>\n";
    }
    out << "<text x=\"" << (W / 2) << "\" y=\"" << H - 12
        << "\" font-size=\"12\" text-anchor=\"middle\">" << report.plot_x
        << "</text>\n";
    out << "<text x=\"" << (W / 2) << "\" y=\"" << 18
        << "\" font-size=\"13\" text-anchor=\"middle\">" << report.experiment << ": "
        << report.plot_y << "</text>\n";
    int ci = 0;
    for (auto& [key, pts] : series) {
        const char* color = palette[ci % 8];
        out << "<polyline fill=\"none\" stroke=\"" << color
            << "\" stroke-width=\"1.5\" points=\"";
        for (auto& p : pts) out << sx(p.x) << "," << sy(p.y) << " ";
        out << "\"/>\n";
        out << "<text x=\"" << W - mr - 5 << "\" y=\"" << mt + 16 * ci + 12
            << "\" font-size=\"11\" text-anchor=\"end\" fill=\"" << color << "\">"
            << report.series_key << "=" << key << "</text>\n";
        ++ci;
    }
    out << "</svg>\n";
    if (!out) throw std::runtime_error("emit_svg: write failed for '" + path + "'");
}

inline std::vector<std::string> emit_report(const Report& report,
                                            const std::string& format,
                                            const std::string& dir) {
    std::filesystem::create_directories(dir);
    std::string base = dir + "/" + report.experiment;
    std::vector<std::string> written;
    if (format == "csv" || format == "all") {
        emit_csv(report, base + ".csv");
        written.push_back(base + ".csv");
    }
    if (format == "json" || format == "all") {
        emit_json(report, base + ".json");
        written.push_back(base + ".json");
    }
    if ((format == "svg" || format == "all") && !report.plot_x.empty()) {
        emit_svg(report, base + ".svg");
        written.push_back(base + ".svg");
    }
    return written;
}

}  // namespace besovtk
