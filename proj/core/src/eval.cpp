#include "cellcast/eval.hpp"

#include "cellcast/error.hpp"

#include <algorithm>
#include <cmath>

namespace cellcast {

namespace {

void check_pair(MatrixView actual, MatrixView predicted) {
    if (actual.rows != predicted.rows || actual.cols != predicted.cols) {
        throw ValidationError("RMSLE: actual and predicted shapes differ");
    }
    if (actual.rows == 0 || actual.cols == 0) throw ValidationError("RMSLE: empty matrices");
    auto check = [](std::span<const double> data, const char* which) {
        for (double v : data) {
            if (!std::isfinite(v) || v < 0.0) {
                throw ValidationError(std::string("RMSLE: ") + which + " entries must be finite and >= 0");
            }
        }
    };
    check(actual.data.first(actual.rows * actual.cols), "actual");
    check(predicted.data.first(predicted.rows * predicted.cols), "predicted");
}

double squared_log_error_sum(std::span<const double> actual, std::span<const double> predicted) {
    double sum = 0.0;
    for (std::size_t k = 0; k < actual.size(); ++k) {
        const double d = std::log1p(predicted[k]) - std::log1p(actual[k]);
        sum += d * d;
    }
    return sum;
}

double mean_of(std::span<const double> v) {
    double sum = 0.0;
    for (double x : v) sum += x;
    return sum / static_cast<double>(v.size());
}

} // namespace

double rmsle_pooled(MatrixView actual, MatrixView predicted) {
    check_pair(actual, predicted);
    double sum = 0.0;
    for (std::size_t r = 0; r < actual.rows; ++r) sum += squared_log_error_sum(actual.row(r), predicted.row(r));
    return std::sqrt(sum / static_cast<double>(actual.rows * actual.cols));
}

std::vector<double> rmsle_per_series(MatrixView actual, MatrixView predicted) {
    check_pair(actual, predicted);
    std::vector<double> out(actual.rows);
    for (std::size_t r = 0; r < actual.rows; ++r) {
        out[r] = std::sqrt(squared_log_error_sum(actual.row(r), predicted.row(r)) / static_cast<double>(actual.cols));
    }
    return out;
}

double stability_std(std::span<const double> values) {
    if (values.empty()) throw ValidationError("stability_std: no values");
    const double mean = mean_of(values);
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / static_cast<double>(values.size()));
}

std::vector<std::size_t> step_range(std::size_t first, std::size_t last) {
    if (first < 1 || last < first) throw ValidationError("step range must satisfy 1 <= first <= last");
    std::vector<std::size_t> out;
    for (std::size_t s = first; s <= last; ++s) out.push_back(s);
    return out;
}

ModelReport score_forecast(const std::string& name, MatrixView actual, MatrixView predicted,
                           std::span<const std::size_t> steps) {
    if (steps.empty()) throw ValidationError("no evaluation steps");
    const std::size_t max_step = *std::max_element(steps.begin(), steps.end());
    if (*std::min_element(steps.begin(), steps.end()) < 1) throw ValidationError("evaluation steps must be >= 1");
    if (actual.cols < max_step || predicted.cols < max_step) {
        throw ValidationError("forecast covers " + std::to_string(predicted.cols) + " steps, test range " +
                              std::to_string(actual.cols) + "; step " + std::to_string(max_step) + " requested");
    }
    if (actual.rows != predicted.rows) throw ValidationError("forecast series count does not match the panel");

    ModelReport rep;
    rep.name = name;
    rep.per_series = Matrix(actual.rows, steps.size());
    for (std::size_t k = 0; k < steps.size(); ++k) {
        const std::size_t s = steps[k];
        Matrix a(actual.rows, s);
        Matrix p(actual.rows, s);
        for (std::size_t r = 0; r < actual.rows; ++r) {
            for (std::size_t c = 0; c < s; ++c) {
                a(r, c) = actual(r, c);
                p(r, c) = std::max(0.0, predicted(r, c));
            }
        }
        rep.pooled.push_back(rmsle_pooled(a, p));
        const auto per = rmsle_per_series(a, p);
        rep.stability.push_back(stability_std(per));
        for (std::size_t r = 0; r < per.size(); ++r) rep.per_series(r, k) = per[r];
    }
    rep.pooled_mean = mean_of(rep.pooled);
    rep.stability_mean = mean_of(rep.stability);
    rep.ok = true;
    return rep;
}

EvalReport sweep(std::span<const std::shared_ptr<Forecaster>> models, const SeriesPanel& panel,
                 const SplitSpec& split, std::span<const std::size_t> steps, std::uint64_t seed) {
    split.validate(panel.length());
    if (steps.empty()) throw ValidationError("sweep: no evaluation steps");
    const std::size_t max_step = *std::max_element(steps.begin(), steps.end());
    if (max_step > split.horizon()) {
        throw ValidationError("sweep: step " + std::to_string(max_step) + " exceeds the test range of " +
                              std::to_string(split.horizon()) + " days");
    }
    const auto [train, test] = split_panel(panel, split);
    Matrix actual(test.series_count(), max_step);
    for (std::size_t i = 0; i < test.series_count(); ++i) {
        const auto s = test.series(i);
        std::copy(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(max_step), actual.row(i).begin());
    }

    EvalReport report;
    report.steps.assign(steps.begin(), steps.end());
    report.series_ids = panel.ids();
    for (const auto& model : models) {
        ModelReport rep;
        try {
            const Matrix predicted = model->forecast(train, max_step, seed);
            rep = score_forecast(model->name(), actual, predicted, steps);
        } catch (const std::exception& e) {
            rep = ModelReport{};
            rep.name = model->name();
            rep.ok = false;
            rep.error = e.what();
        }
        rep.description = model->describe();
        report.models.push_back(std::move(rep));
    }
    report.provenance["sweep_seed"] = seed;
    report.provenance["split"] = {{"t0", split.t0}, {"T", split.last}};
    report.provenance["steps"] = report.steps;
    nlohmann::json described = nlohmann::json::object();
    for (const auto& m : report.models) described[m.name] = m.description;
    report.provenance["models"] = described;
    return report;
}

} // namespace cellcast
