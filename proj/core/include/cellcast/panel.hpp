#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cellcast {

using Date = std::chrono::sys_days;

/// Parses strict ISO `YYYY-MM-DD`; throws ValidationError otherwise.
Date parse_date(std::string_view text);
std::string format_date(Date date);

/// N equal-length daily series. Series are kept sorted by id so that the
/// canonical CSV form round-trips to an equal panel.
class SeriesPanel {
public:
    SeriesPanel() = default;

    /// Validates and builds a panel. Throws ValidationError when ids are
    /// empty or duplicated, lengths differ, the length is zero, or any
    /// value is negative or non-finite.
    static SeriesPanel create(std::vector<std::string> ids, Date start,
                              std::vector<std::vector<double>> values);

    std::size_t series_count() const { return ids_.size(); }
    std::size_t length() const { return values_.empty() ? 0 : values_.front().size(); }
    Date start_date() const { return start_; }
    Date date_at(std::size_t t) const { return start_ + std::chrono::days(static_cast<long>(t)); }

    const std::vector<std::string>& ids() const { return ids_; }
    const std::string& id(std::size_t i) const { return ids_[i]; }
    std::span<const double> series(std::size_t i) const { return values_[i]; }
    const std::vector<std::vector<double>>& values() const { return values_; }

    bool operator==(const SeriesPanel&) const = default;

private:
    std::vector<std::string> ids_;
    Date start_{};
    std::vector<std::vector<double>> values_;
};

/// Prediction window in 1-based day indices: steps [t0, last] are predicted,
/// steps [1, t0 - 1] condition the model.
struct SplitSpec {
    std::size_t t0 = 0;
    std::size_t last = 0;

    std::size_t horizon() const { return last - t0 + 1; }
    void validate(std::size_t series_length) const;
};

/// Reads `series_id,date,value` CSV. Rows may appear in any order.
SeriesPanel load_panel(const std::filesystem::path& path);
/// Writes the canonical CSV: rows sorted by id then date, shortest
/// round-trip decimal values.
void write_panel(const SeriesPanel& panel, const std::filesystem::path& path);

/// Returns (steps 1..t0-1, steps t0..last) of every series.
std::pair<SeriesPanel, SeriesPanel> split_panel(const SeriesPanel& panel, const SplitSpec& split);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

} // namespace cellcast
