#pragma once

#include "cellcast/panel.hpp"
#include "cellcast/rng.hpp"

#include <atomic>
#include <fstream>
#include <sstream>
#include <filesystem>
#include <string>
#include <system_error>
#include <vector>

#include <unistd.h>

namespace testsupport {

// Scratch directory removed on scope exit.
class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("cellcast_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline cellcast::SeriesPanel periodic_panel(std::size_t series, std::size_t days, std::size_t period) {
    std::vector<std::string> ids;
    std::vector<std::vector<double>> values;
    for (std::size_t i = 0; i < series; ++i) {
        ids.push_back("s" + std::to_string(i));
        std::vector<double> v(days);
        for (std::size_t t = 0; t < days; ++t) v[t] = 100.0 * static_cast<double>(i + 1) + 10.0 * static_cast<double>(t % period);
        values.push_back(std::move(v));
    }
    return cellcast::SeriesPanel::create(std::move(ids), cellcast::parse_date("2020-01-01"), std::move(values));
}

} // namespace testsupport
