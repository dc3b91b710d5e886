#pragma once

// Output side of the command-line tool: a small typed table that renders as CSV
// with a "# key=value" config header, or as a JSON object, plus a bare SVG heatmap.

#include <fmt/format.h>
#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace twistgap::cli {

using Cell = std::variant<double, long long, bool, std::string>;
using ConfigEcho = std::vector<std::pair<std::string, std::string>>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add(std::vector<Cell> row) { rows.push_back(std::move(row)); }
};

inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return fmt::format("{:.17g}", v);
}

inline std::string cell_text(const Cell& c) {
    struct V {
        std::string operator()(double v) const { return format_double(v); }
        std::string operator()(long long v) const { return std::to_string(v); }
        std::string operator()(bool v) const { return v ? "true" : "false"; }
        std::string operator()(const std::string& v) const { return v; }
    };
    return std::visit(V{}, c);
}

// Non-finite doubles have no JSON literal; they travel as the CSV markers.
inline nlohmann::json cell_json(const Cell& c) {
    struct V {
        nlohmann::json operator()(double v) const {
            return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(format_double(v));
        }
        nlohmann::json operator()(long long v) const { return v; }
        nlohmann::json operator()(bool v) const { return v; }
        nlohmann::json operator()(const std::string& v) const { return v; }
    };
    return std::visit(V{}, c);
}

inline void write_config_header(std::ostream& os, const ConfigEcho& cfg) {
    for (const auto& [k, v] : cfg) os << "# " << k << '=' << v << '\n';
}

inline void write_csv(std::ostream& os, const ConfigEcho& cfg, const Table& t) {
    write_config_header(os, cfg);
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
    os << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << cell_text(row[i]);
        os << '\n';
    }
}

inline nlohmann::json config_json(const ConfigEcho& cfg) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, v] : cfg) j[k] = v;
    return j;
}

inline nlohmann::json table_json(const Table& t) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : t.rows) {
        nlohmann::json r = nlohmann::json::object();
        for (std::size_t i = 0; i < row.size(); ++i) r[t.columns[i]] = cell_json(row[i]);
        rows.push_back(std::move(r));
    }
    return rows;
}

inline void write_json(std::ostream& os, const ConfigEcho& cfg, const Table& t) {
    nlohmann::json j;
    j["config"] = config_json(cfg);
    j["columns"] = t.columns;
    j["rows"] = table_json(t);
    os << j.dump(2) << '\n';
}

/// Grayscale heatmap, one rect per cell; NaN cells black, infinite cells white.
inline void write_svg_heatmap(std::ostream& os, int n_rows, int n_cols, const std::vector<double>& values,
                              int cell_px = 3) {
    const int w = n_cols * cell_px, h = n_rows * cell_px;
    os << fmt::format(R"svg(<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" shape-rendering="crispEdges">)svg",
                      w, h)
       << '\n';
    for (int r = 0; r < n_rows; ++r) {
        for (int c = 0; c < n_cols; ++c) {
            const double v = values[static_cast<std::size_t>(r) * n_cols + c];
            int level = 0;
            if (std::isinf(v)) level = 255;
            else if (!std::isnan(v)) level = static_cast<int>(std::lround(255.0 * std::clamp(v, 0.0, 1.0)));
            // first grid row at the bottom so the vertical axis increases upwards
            os << fmt::format(R"svg(<rect x="{}" y="{}" width="{}" height="{}" fill="rgb({},{},{})"/>)svg",
                              c * cell_px, (n_rows - 1 - r) * cell_px, cell_px, cell_px, level, level, level)
               << '\n';
        }
    }
    os << "</svg>\n";
}

}  // namespace twistgap::cli
