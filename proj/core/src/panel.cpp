#include "cellcast/panel.hpp"

#include "cellcast/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <cstdio>
#include <set>
#include <sstream>

namespace cellcast {

namespace {

bool all_digits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

int to_int(std::string_view s) {
    int value = 0;
    std::from_chars(s.data(), s.data() + s.size(), value);
    return value;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t begin = 0;
    for (;;) {
        const auto comma = line.find(',', begin);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(begin));
            return fields;
        }
        fields.push_back(line.substr(begin, comma - begin));
        begin = comma + 1;
    }
}

struct Row {
    Date date;
    double value;
    std::size_t line;
};

} // namespace

Date parse_date(std::string_view text) {
    using namespace std::chrono;
    if (text.size() != 10 || text[4] != '-' || text[7] != '-' || !all_digits(text.substr(0, 4)) ||
        !all_digits(text.substr(5, 2)) || !all_digits(text.substr(8, 2))) {
        throw ValidationError("invalid date '" + std::string(text) + "' (expected YYYY-MM-DD)");
    }
    const year_month_day ymd{year{to_int(text.substr(0, 4))},
                             month{static_cast<unsigned>(to_int(text.substr(5, 2)))},
                             day{static_cast<unsigned>(to_int(text.substr(8, 2)))}};
    if (!ymd.ok()) throw ValidationError("invalid calendar date '" + std::string(text) + "'");
    return sys_days{ymd};
}

std::string format_date(Date date) {
    using namespace std::chrono;
    const year_month_day ymd{date};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

std::string format_double(double value) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

SeriesPanel SeriesPanel::create(std::vector<std::string> ids, Date start,
                                std::vector<std::vector<double>> values) {
    if (ids.size() != values.size()) throw ValidationError("series id count does not match series count");
    if (ids.empty()) throw ValidationError("panel has no series");

    std::set<std::string_view> seen;
    for (const auto& id : ids) {
        if (id.empty()) throw ValidationError("empty series id");
        if (!seen.insert(id).second) throw ValidationError("duplicate series id '" + id + "'");
    }
    const std::size_t n = values.front().size();
    if (n == 0) throw ValidationError("series length must be at least 1");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i].size() != n) throw ValidationError("unequal series lengths (series '" + ids[i] + "')");
        for (std::size_t t = 0; t < n; ++t) {
            const double v = values[i][t];
            if (!std::isfinite(v) || v < 0.0) {
                throw ValidationError("series '" + ids[i] + "' step " + std::to_string(t + 1) +
                                      ": value must be finite and >= 0");
            }
        }
    }

    std::vector<std::size_t> order(ids.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ids[a] < ids[b]; });

    SeriesPanel panel;
    panel.start_ = start;
    panel.ids_.reserve(ids.size());
    panel.values_.reserve(ids.size());
    for (auto k : order) {
        panel.ids_.push_back(std::move(ids[k]));
        panel.values_.push_back(std::move(values[k]));
    }
    return panel;
}

void SplitSpec::validate(std::size_t series_length) const {
    if (t0 <= 1) throw ValidationError("split t0 must be > 1 (no conditioning range)");
    if (last < t0) throw ValidationError("split end must be >= t0");
    if (last > series_length) {
        throw ValidationError("split end " + std::to_string(last) + " exceeds series length " +
                              std::to_string(series_length));
    }
}

SeriesPanel load_panel(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open panel file '" + path.string() + "'");

    const std::string where = path.string() + ":";
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(in, line)) throw ValidationError(where + "1: missing header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "series_id,date,value") {
        throw ValidationError(where + "1: expected header 'series_id,date,value'");
    }

    std::map<std::string, std::vector<Row>> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_fields(line);
        const std::string at = where + std::to_string(line_no);
        if (fields.size() != 3) throw ValidationError(at + ": malformed row (expected 3 fields)");
        const std::string id(fields[0]);
        if (id.empty()) throw ValidationError(at + ": empty series id");

        Date date;
        try {
            date = parse_date(fields[1]);
        } catch (const ValidationError& e) {
            throw ValidationError(at + ": series '" + id + "': " + e.what());
        }
        double value = 0.0;
        const auto vtext = fields[2];
        auto [ptr, ec] = std::from_chars(vtext.data(), vtext.data() + vtext.size(), value);
        if (ec != std::errc{} || ptr != vtext.data() + vtext.size()) {
            throw ValidationError(at + ": series '" + id + "': malformed value '" + std::string(vtext) + "'");
        }
        if (!std::isfinite(value) || value < 0.0) {
            throw ValidationError(at + ": series '" + id + "': value must be finite and >= 0");
        }
        rows[id].push_back({date, value, line_no});
    }
    if (rows.empty()) throw ValidationError(where + " panel has no data rows");

    std::vector<std::string> ids;
    std::vector<std::vector<double>> values;
    std::optional<Date> first_start;
    std::optional<std::size_t> first_len;
    for (auto& [id, series_rows] : rows) {
        std::stable_sort(series_rows.begin(), series_rows.end(),
                         [](const Row& a, const Row& b) { return a.date < b.date; });
        for (std::size_t k = 1; k < series_rows.size(); ++k) {
            const auto& prev = series_rows[k - 1];
            const auto& cur = series_rows[k];
            if (cur.date == prev.date) {
                throw ValidationError(where + std::to_string(std::max(cur.line, prev.line)) + ": series '" + id +
                                      "': duplicate date " + format_date(cur.date));
            }
            if (cur.date - prev.date != std::chrono::days(1)) {
                throw ValidationError(where + std::to_string(cur.line) + ": series '" + id + "': date gap between " +
                                      format_date(prev.date) + " and " + format_date(cur.date));
            }
        }
        const Date start = series_rows.front().date;
        if (!first_start) {
            first_start = start;
            first_len = series_rows.size();
        } else if (series_rows.size() != *first_len) {
            throw ValidationError(where + std::to_string(series_rows.front().line) + ": series '" + id +
                                  "': unequal series lengths (" + std::to_string(series_rows.size()) + " vs " +
                                  std::to_string(*first_len) + ")");
        } else if (start != *first_start) {
            throw ValidationError(where + std::to_string(series_rows.front().line) + ": series '" + id +
                                  "': start date " + format_date(start) + " differs from " +
                                  format_date(*first_start));
        }
        std::vector<double> v;
        v.reserve(series_rows.size());
        for (const auto& r : series_rows) v.push_back(r.value);
        ids.push_back(id);
        values.push_back(std::move(v));
    }
    return SeriesPanel::create(std::move(ids), *first_start, std::move(values));
}

void write_panel(const SeriesPanel& panel, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << "series_id,date,value\n";
    for (std::size_t i = 0; i < panel.series_count(); ++i) {
        const auto s = panel.series(i);
        for (std::size_t t = 0; t < s.size(); ++t) {
            out << panel.id(i) << ',' << format_date(panel.date_at(t)) << ',' << format_double(s[t]) << '\n';
        }
    }
    out.flush();
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::pair<SeriesPanel, SeriesPanel> split_panel(const SeriesPanel& panel, const SplitSpec& split) {
    split.validate(panel.length());
    std::vector<std::vector<double>> train, test;
    train.reserve(panel.series_count());
    test.reserve(panel.series_count());
    for (std::size_t i = 0; i < panel.series_count(); ++i) {
        const auto s = panel.series(i);
        train.emplace_back(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(split.t0 - 1));
        test.emplace_back(s.begin() + static_cast<std::ptrdiff_t>(split.t0 - 1),
                          s.begin() + static_cast<std::ptrdiff_t>(split.last));
    }
    return {SeriesPanel::create(panel.ids(), panel.start_date(), std::move(train)),
            SeriesPanel::create(panel.ids(), panel.date_at(split.t0 - 1), std::move(test))};
}

} // namespace cellcast
