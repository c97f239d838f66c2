#include "cellcast/model.hpp"

#include "cellcast/adam.hpp"
#include "cellcast/error.hpp"
#include "cellcast/parallel.hpp"
#include "cellcast/rng.hpp"

#include <algorithm>
#include <cmath>

namespace cellcast {

namespace {

constexpr double kInitRange = 0.08;

struct WindowRef {
    std::size_t series = 0;
    std::size_t offset = 0;
};

void check_covariates(const SeriesPanel& panel, const CovariatePanel& covariates) {
    if (covariates.ids() != panel.ids()) throw ValidationError("covariate panel series do not match the data panel");
    if (covariates.train_length() != panel.length()) {
        throw ValidationError("covariate panel was built for a different series length");
    }
}

} // namespace

void TrainConfig::validate() const {
    if (horizon < 1) throw ValidationError("train.horizon must be >= 1");
    if (context_length < horizon) throw ValidationError("train.context_length must be >= train.horizon");
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw ValidationError("train.learning_rate must be > 0");
    if (batch_size < 1) throw ValidationError("train.batch_size must be >= 1");
    if (hidden_size < 1) throw ValidationError("train.hidden_size must be >= 1");
    if (num_layers < 1) throw ValidationError("train.num_layers must be >= 1");
    if (!(sigma_floor > 0.0) || !std::isfinite(sigma_floor)) throw ValidationError("train.sigma_floor must be > 0");
    if (windows_per_series < 1) throw ValidationError("train.windows_per_series must be >= 1");
}

NetworkParams initialize_params(std::size_t input_size, const TrainConfig& cfg) {
    NetworkParams params(input_size, cfg.hidden_size, cfg.num_layers);
    const auto mask = params.bias_mask();
    Rng rng(derive_seed(cfg.seed, 0));
    auto values = params.values();
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (!mask[k]) values[k] = rng.uniform(-kInitRange, kInitRange);
    }
    for (std::size_t l = 0; l < cfg.num_layers; ++l) {
        auto b = params.bias(l);
        std::fill(b.begin() + static_cast<std::ptrdiff_t>(gate_forget * cfg.hidden_size),
                  b.begin() + static_cast<std::ptrdiff_t>((gate_forget + 1) * cfg.hidden_size), 1.0);
    }
    return params;
}

TrainedModel train(const SeriesPanel& panel, const CovariatePanel& covariates, const TrainConfig& cfg) {
    cfg.validate();
    check_covariates(panel, covariates);
    if (covariates.horizon() != cfg.horizon) {
        throw ValidationError("covariates were built for horizon " + std::to_string(covariates.horizon()) +
                              ", training horizon is " + std::to_string(cfg.horizon));
    }
    const std::size_t window = cfg.context_length + cfg.horizon;
    const std::size_t n = panel.length();
    if (n < window) {
        throw ValidationError("series too short: length " + std::to_string(n) + " < context_length + horizon = " +
                              std::to_string(window));
    }

    TrainedModel model;
    model.train_config = cfg;
    model.covariates = covariates.spec();
    model.params = initialize_params(1 + covariates.channel_count(), cfg);

    Adam optimizer(model.params.size(), AdamConfig{cfg.learning_rate});
    std::vector<double> batch_grad(model.params.size());
    std::vector<LossAndGrad> slots(cfg.batch_size);

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        Rng rng(derive_seed(cfg.seed, epoch + 1));
        std::vector<WindowRef> windows;
        windows.reserve(panel.series_count() * cfg.windows_per_series);
        for (std::size_t i = 0; i < panel.series_count(); ++i) {
            for (std::size_t w = 0; w < cfg.windows_per_series; ++w) {
                windows.push_back({i, rng.uniform_index(n - window + 1)});
            }
        }
        for (std::size_t k = windows.size(); k-- > 1;) std::swap(windows[k], windows[rng.uniform_index(k + 1)]);

        double epoch_loss = 0.0;
        for (std::size_t first = 0; first < windows.size(); first += cfg.batch_size) {
            const std::size_t count = std::min(cfg.batch_size, windows.size() - first);
            parallel_for(count, [&](std::size_t b) {
                const auto [series, offset] = windows[first + b];
                const auto z = panel.series(series);
                std::vector<double> lagged(window);
                lagged[0] = offset == 0 ? 0.0 : z[offset - 1];
                std::copy(z.begin() + static_cast<std::ptrdiff_t>(offset),
                          z.begin() + static_cast<std::ptrdiff_t>(offset + window - 1), lagged.begin() + 1);
                const auto targets = z.subspan(offset, window);
                const Matrix cov = covariates.window(series, offset, window);
                const double scale = series_scale(z.subspan(offset, cfg.context_length));
                slots[b] = window_loss_and_grad(lagged, targets, cov, model.params, scale, cfg.sigma_floor);
            });

            std::fill(batch_grad.begin(), batch_grad.end(), 0.0);
            for (std::size_t b = 0; b < count; ++b) {
                epoch_loss += slots[b].loss;
                const auto g = slots[b].grad.values();
                for (std::size_t k = 0; k < batch_grad.size(); ++k) batch_grad[k] += g[k];
            }
            const double inv = 1.0 / static_cast<double>(count);
            for (auto& g : batch_grad) g *= inv;
            optimizer.step(model.params.values(), batch_grad);
        }
        const double mean_nll = epoch_loss / static_cast<double>(windows.size());
        if (!std::isfinite(mean_nll)) {
            throw Error("training diverged: non-finite loss in epoch " + std::to_string(epoch + 1));
        }
        model.epoch_nll.push_back(mean_nll);
    }
    return model;
}

EncodedSeries encode_conditioning(const TrainedModel& model, std::span<const double> conditioning,
                                  MatrixView covariates, SampleTrace* trace) {
    const auto& cfg = model.train_config;
    const std::size_t ctx = cfg.context_length;
    const std::size_t n = conditioning.size();
    if (n < ctx) {
        throw ValidationError("conditioning range has " + std::to_string(n) + " steps; context_length is " +
                              std::to_string(ctx));
    }
    if (covariates.rows <= n) throw ValidationError("covariates must cover the conditioning range and a horizon");
    if (covariates.cols != model.covariates.channel_count()) {
        throw ValidationError("covariate channel count does not match the model");
    }

    const auto encoder_range = conditioning.subspan(n - ctx, ctx);
    std::vector<double> lagged(ctx);
    lagged[0] = n > ctx ? conditioning[n - ctx - 1] : 0.0;
    std::copy(encoder_range.begin(), encoder_range.end() - 1, lagged.begin() + 1);

    EncodedSeries enc;
    enc.scale = series_scale(encoder_range);
    enc.last_value = conditioning[n - 1];
    const MatrixView encoder_cov{covariates.data.subspan((n - ctx) * covariates.cols, ctx * covariates.cols), ctx,
                                 covariates.cols};
    enc.state = forward_window(lagged, encoder_cov, model.params, enc.scale, cfg.sigma_floor).final_state;
    if (trace != nullptr) trace->encoder = &model.params;

    const std::size_t horizon = covariates.rows - n;
    enc.horizon_covariates = Matrix(horizon, covariates.cols);
    for (std::size_t h = 0; h < horizon; ++h) {
        for (std::size_t k = 0; k < covariates.cols; ++k) enc.horizon_covariates(h, k) = covariates(n + h, k);
    }
    return enc;
}

std::vector<double> sample_trajectory(const TrainedModel& model, const EncodedSeries& encoded,
                                      std::uint64_t trajectory_seed, SampleTrace* trace) {
    const NetworkParams& params = model.params;
    if (trace != nullptr) trace->decoder = &params;
    const std::size_t horizon = encoded.horizon_covariates.rows();
    const std::size_t channels = encoded.horizon_covariates.cols();

    Rng rng(trajectory_seed);
    HiddenState state = encoded.state;
    std::vector<double> input(params.input_size());
    std::vector<double> out(horizon);
    double previous = encoded.last_value;
    for (std::size_t h = 0; h < horizon; ++h) {
        input[0] = previous / encoded.scale;
        for (std::size_t k = 0; k < channels; ++k) input[k + 1] = encoded.horizon_covariates(h, k);
        const LikelihoodParams theta = network_step(params, state, input, model.train_config.sigma_floor);
        const double draw = (theta.mu + theta.sigma * rng.normal()) * encoded.scale;
        previous = draw;
        out[h] = std::max(0.0, draw);
    }
    return out;
}

Forecast sample_forecast(const TrainedModel& model, std::span<const double> conditioning, MatrixView covariates,
                         std::size_t samples, std::uint64_t seed, SampleTrace* trace) {
    if (samples == 0) throw ValidationError("sample count must be >= 1");
    const EncodedSeries encoded = encode_conditioning(model, conditioning, covariates, trace);
    Forecast f;
    f.scale = encoded.scale;
    f.seed = seed;
    f.samples = Matrix(samples, encoded.horizon_covariates.rows());
    for (std::size_t s = 0; s < samples; ++s) {
        const auto path = sample_trajectory(model, encoded, derive_seed(seed, s), trace);
        std::copy(path.begin(), path.end(), f.samples.row(s).begin());
    }
    return f;
}

std::vector<Forecast> forecast_panel(const TrainedModel& model, const SeriesPanel& conditioning,
                                     const CovariatePanel& covariates, std::size_t horizon, std::size_t samples,
                                     std::uint64_t seed) {
    check_covariates(conditioning, covariates);
    if (horizon < 1 || horizon > covariates.horizon()) {
        throw ValidationError("forecast horizon " + std::to_string(horizon) + " outside covariate horizon 1.." +
                              std::to_string(covariates.horizon()));
    }
    std::vector<Forecast> out(conditioning.series_count());
    const std::size_t rows = conditioning.length() + horizon;
    parallel_for(conditioning.series_count(), [&](std::size_t i) {
        const Matrix cov = covariates.window(i, 0, rows);
        out[i] = sample_forecast(model, conditioning.series(i), cov, samples, derive_seed(seed, i));
    });
    return out;
}

std::string_view to_string(PointStatistic statistic) {
    return statistic == PointStatistic::median ? "median" : "mean";
}

PointStatistic parse_point_statistic(std::string_view text) {
    if (text == "median") return PointStatistic::median;
    if (text == "mean") return PointStatistic::mean;
    throw ValidationError("unknown point statistic '" + std::string(text) + "' (expected median or mean)");
}

std::vector<double> point_forecast(const Forecast& forecast, PointStatistic statistic) {
    const std::size_t samples = forecast.samples.rows();
    const std::size_t horizon = forecast.samples.cols();
    if (samples == 0 || horizon == 0) throw ValidationError("point_forecast: empty forecast");
    std::vector<double> out(horizon);
    std::vector<double> column(samples);
    for (std::size_t h = 0; h < horizon; ++h) {
        for (std::size_t s = 0; s < samples; ++s) column[s] = forecast.samples(s, h);
        if (statistic == PointStatistic::mean) {
            double sum = 0.0;
            for (double v : column) sum += v;
            out[h] = sum / static_cast<double>(samples);
        } else {
            std::sort(column.begin(), column.end());
            const std::size_t mid = samples / 2;
            out[h] = samples % 2 == 1 ? column[mid] : 0.5 * (column[mid - 1] + column[mid]);
        }
    }
    return out;
}

} // namespace cellcast
