#include "cellcast/report.hpp"

#include "cellcast/error.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace cellcast {

namespace {

const std::vector<double>& rows_of(const ModelReport& m, ReportTable table) {
    return table == ReportTable::pooled_rmsle ? m.pooled : m.stability;
}

double mean_of(const ModelReport& m, ReportTable table) {
    return table == ReportTable::pooled_rmsle ? m.pooled_mean : m.stability_mean;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << text;
    out.flush();
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::string fixed(double v, int digits = 2) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

} // namespace

std::string table_csv(const EvalReport& report, ReportTable table) {
    std::ostringstream out;
    out << "step";
    for (const auto& m : report.models) out << ',' << m.name;
    out << '\n';
    for (std::size_t k = 0; k < report.steps.size(); ++k) {
        out << report.steps[k];
        for (const auto& m : report.models) out << ',' << (m.ok ? format_double(rows_of(m, table)[k]) : "NA");
        out << '\n';
    }
    out << "mean";
    for (const auto& m : report.models) out << ',' << (m.ok ? format_double(mean_of(m, table)) : "NA");
    out << '\n';
    return out.str();
}

std::string per_series_csv(const EvalReport& report) {
    std::ostringstream out;
    out << "model,series_id,step,value\n";
    for (const auto& m : report.models) {
        if (!m.ok) continue;
        for (std::size_t i = 0; i < report.series_ids.size(); ++i) {
            for (std::size_t k = 0; k < report.steps.size(); ++k) {
                out << m.name << ',' << report.series_ids[i] << ',' << report.steps[k] << ','
                    << format_double(m.per_series(i, k)) << '\n';
            }
        }
    }
    return out.str();
}

std::string provenance_json(const EvalReport& report) {
    nlohmann::json doc = report.provenance;
    nlohmann::json status = nlohmann::json::object();
    for (const auto& m : report.models) {
        status[m.name] = m.ok ? nlohmann::json{{"ok", true}} : nlohmann::json{{"ok", false}, {"error", m.error}};
    }
    doc["model_status"] = status;
    return doc.dump(2) + "\n";
}

std::string line_plot_svg(const EvalReport& report, ReportTable table) {
    constexpr double width = 640, height = 400, left = 60, right = 150, top = 30, bottom = 50;
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

    double lo = 0.0, hi = 0.0;
    bool any = false;
    for (const auto& m : report.models) {
        if (!m.ok) continue;
        for (double v : rows_of(m, table)) {
            lo = any ? std::min(lo, v) : v;
            hi = any ? std::max(hi, v) : v;
            any = true;
        }
    }
    if (!any || hi <= lo) {
        lo -= 0.5;
        hi += 0.5;
    }
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
    const std::size_t first = report.steps.empty() ? 0 : report.steps.front();
    const std::size_t last = report.steps.empty() ? 1 : report.steps.back();
    const double span_x = last > first ? static_cast<double>(last - first) : 1.0;
    auto px = [&](std::size_t step) {
        return left + (static_cast<double>(step) - static_cast<double>(first)) / span_x * (width - left - right);
    };
    auto py = [&](double v) { return top + (hi - v) / (hi - lo) * (height - top - bottom); };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << left << "\" y=\"18\" font-size=\"13\">"
        << (table == ReportTable::pooled_rmsle ? "Pooled RMSLE by prediction step" : "Std of per-series RMSLE by prediction step")
        << "</text>\n";
    out << "<line x1=\"" << left << "\" y1=\"" << height - bottom << "\" x2=\"" << width - right << "\" y2=\""
        << height - bottom << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << height - bottom
        << "\" stroke=\"black\"/>\n";
    for (auto step : report.steps) {
        out << "<text x=\"" << fixed(px(step)) << "\" y=\"" << height - bottom + 15 << "\" text-anchor=\"middle\">"
            << step << "</text>\n";
    }
    for (int k = 0; k <= 4; ++k) {
        const double v = lo + (hi - lo) * k / 4.0;
        out << "<text x=\"" << left - 5 << "\" y=\"" << fixed(py(v) + 4) << "\" text-anchor=\"end\">" << fixed(v, 3)
            << "</text>\n";
    }
    out << "<text x=\"" << (left + width - right) / 2 << "\" y=\"" << height - 12
        << "\" text-anchor=\"middle\">step</text>\n";

    std::size_t colour = 0;
    for (const auto& m : report.models) {
        if (!m.ok) continue;
        const char* stroke = palette[colour % std::size(palette)];
        out << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"2\" points=\"";
        const auto& rows = rows_of(m, table);
        for (std::size_t k = 0; k < rows.size(); ++k) {
            out << (k ? " " : "") << fixed(px(report.steps[k])) << ',' << fixed(py(rows[k]));
        }
        out << "\"/>\n";
        const double ly = top + 16.0 * static_cast<double>(colour);
        out << "<line x1=\"" << width - right + 10 << "\" y1=\"" << ly << "\" x2=\"" << width - right + 30
            << "\" y2=\"" << ly << "\" stroke=\"" << stroke << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << width - right + 35 << "\" y=\"" << ly + 4 << "\">" << m.name << "</text>\n";
        ++colour;
    }
    out << "</svg>\n";
    return out.str();
}

std::vector<std::filesystem::path> write_report(const EvalReport& report, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create report directory '" + dir.string() + "': " + ec.message());
    const std::vector<std::pair<std::string, std::string>> files = {
        {"rmsle_by_step.csv", table_csv(report, ReportTable::pooled_rmsle)},
        {"stability_std_by_step.csv", table_csv(report, ReportTable::stability_std)},
        {"per_series_rmsle.csv", per_series_csv(report)},
        {"provenance.json", provenance_json(report)},
        {"rmsle_by_step.svg", line_plot_svg(report, ReportTable::pooled_rmsle)},
        {"stability_std_by_step.svg", line_plot_svg(report, ReportTable::stability_std)},
    };
    std::vector<std::filesystem::path> written;
    for (const auto& [name, text] : files) {
        write_text(dir / name, text);
        written.push_back(dir / name);
    }
    return written;
}

} // namespace cellcast
