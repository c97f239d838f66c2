#include "cli/commands.hpp"

#include "cli/run_config.hpp"

#include <cellcast/error.hpp>
#include <cellcast/forecasters.hpp>
#include <cellcast/model_io.hpp>
#include <cellcast/report.hpp>

#include <CLI11.hpp>

#include <charconv>
#include <fstream>
#include <map>
#include <memory>
#include <ostream>

namespace cellcast::cli {

namespace {

using json = nlohmann::json;

constexpr const char* kToolVersion = "0.1.0";
constexpr const char* kRngDescription =
    "mt19937_64 engine; uniform = top 53 bits * 2^-53; normal = Box-Muller (cos first, sin cached); "
    "child seeds = splitmix64(parent ^ splitmix64(index + 0x9E3779B97F4A7C15))";

struct Options {
    std::string config;
    std::vector<std::string> overrides;
    std::string panel;
    std::string out;
    std::string model;
    std::string samples_out;
    std::string point_out;
    std::string point_in;
    std::string report_dir;
    std::string name = "forecast";
    std::size_t horizon = 0;
    bool no_lma = false;
};

std::string pick(const std::string& flag, const std::string& fallback) {
    return flag.empty() ? fallback : flag;
}

json provenance(const RunConfig& cfg, const std::string& command) {
    const json doc = cfg.to_json();
    return {{"tool", "cellcast"},
            {"version", kToolVersion},
            {"command", command},
            {"config", doc},
            {"config_hash", config_hash(doc)},
            {"rng", kRngDescription}};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << text;
    out.flush();
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

void write_sidecar(const std::filesystem::path& artifact, const json& doc) {
    write_text(artifact.string() + ".provenance.json", doc.dump(2) + "\n");
}

std::pair<SeriesPanel, SeriesPanel> load_split(const RunConfig& cfg, const std::string& path) {
    const SeriesPanel panel = load_panel(path);
    return split_panel(panel, cfg.split);
}

int cmd_generate(const RunConfig& cfg, const Options& opt, std::ostream& out) {
    const std::string path = pick(opt.out, cfg.io.panel);
    const SeriesPanel panel = generate_panel(cfg.synth);
    write_panel(panel, path);
    write_sidecar(path, provenance(cfg, "generate"));
    out << "wrote " << panel.series_count() << " series x " << panel.length() << " days to " << path << "\n";
    return kExitOk;
}

int cmd_covariates(const RunConfig& cfg, const Options& opt, std::ostream& out) {
    const auto [train, test] = load_split(cfg, pick(opt.panel, cfg.io.panel));
    const CovariateSpec spec = cfg.covariate_spec(cfg.use_lma && !opt.no_lma);
    const CovariatePanel cov = make_covariates(train, spec, cfg.train.horizon);
    const std::string path = pick(opt.out, cfg.io.covariates);
    write_covariates(cov, path);
    write_sidecar(path, provenance(cfg, "covariates"));
    out << "wrote " << cov.channel_count() << " channels x " << cov.length() << " steps for "
        << cov.series_count() << " series to " << path << "\n";
    return kExitOk;
}

int cmd_train(const RunConfig& cfg, const Options& opt, std::ostream& out) {
    const auto [train_panel, test] = load_split(cfg, pick(opt.panel, cfg.io.panel));
    const CovariateSpec spec = cfg.covariate_spec(cfg.use_lma && !opt.no_lma);
    const CovariatePanel cov = make_covariates(train_panel, spec, cfg.train.horizon);
    const TrainedModel model = train(train_panel, cov, cfg.train);
    const std::string path = pick(opt.model, cfg.io.model);
    save_model(model, path);
    json doc = provenance(cfg, opt.no_lma ? "train --no-lma" : "train");
    doc["epoch_nll"] = model.epoch_nll;
    write_sidecar(path, doc);
    out << "trained " << (spec.lma ? "LMA-DeepAR" : "DeepAR") << " on " << train_panel.series_count()
        << " series for " << cfg.train.epochs << " epochs; saved " << path << "\n";
    for (std::size_t e = 0; e < model.epoch_nll.size(); ++e) {
        out << "  epoch " << (e + 1) << " mean NLL " << format_double(model.epoch_nll[e]) << "\n";
    }
    return kExitOk;
}

int cmd_forecast(const RunConfig& cfg, const Options& opt, std::ostream& out) {
    const std::string model_path = pick(opt.model, cfg.io.model);
    const TrainedModel model = load_model(model_path);
    const auto [train_panel, test] = load_split(cfg, pick(opt.panel, cfg.io.panel));
    const std::size_t horizon = opt.horizon == 0 ? model.train_config.horizon : opt.horizon;
    const CovariatePanel cov = make_covariates(train_panel, model.covariates, model.train_config.horizon);
    const auto forecasts =
        forecast_panel(model, train_panel, cov, horizon, cfg.forecast.samples, cfg.forecast.seed);

    std::string samples = "series_id,step,sample_id,value\n";
    std::string points = "series_id,step,value\n";
    for (std::size_t i = 0; i < forecasts.size(); ++i) {
        const auto& f = forecasts[i];
        const std::string& id = train_panel.id(i);
        for (std::size_t h = 0; h < f.horizon(); ++h) {
            for (std::size_t s = 0; s < f.samples.rows(); ++s) {
                samples += id + ',' + std::to_string(h + 1) + ',' + std::to_string(s) + ',' +
                           format_double(f.samples(s, h)) + '\n';
            }
        }
        const auto point = point_forecast(f, cfg.forecast.statistic);
        for (std::size_t h = 0; h < point.size(); ++h) {
            points += id + ',' + std::to_string(h + 1) + ',' + format_double(point[h]) + '\n';
        }
    }
    const std::string samples_path = pick(opt.samples_out, cfg.io.forecast_samples);
    const std::string point_path = pick(opt.point_out, cfg.io.forecast_point);
    write_text(samples_path, samples);
    write_text(point_path, points);
    json doc = provenance(cfg, "forecast");
    doc["model_file"] = model_path;
    doc["horizon"] = horizon;
    write_sidecar(samples_path, doc);
    write_sidecar(point_path, doc);
    out << "wrote " << cfg.forecast.samples << " trajectories x " << horizon << " steps for " << forecasts.size()
        << " series to " << samples_path << " and " << to_string(cfg.forecast.statistic) << " point forecasts to "
        << point_path << "\n";
    return kExitOk;
}

Matrix read_point_forecast(const std::string& path, const SeriesPanel& panel) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open point forecast '" + path + "'");
    std::string line;
    std::getline(in, line);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "series_id,step,value") throw ValidationError(path + ":1: expected header 'series_id,step,value'");

    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < panel.series_count(); ++i) index[panel.id(i)] = i;
    std::map<std::pair<std::size_t, std::size_t>, double> cells;
    std::size_t horizon = 0;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::string at = path + ":" + std::to_string(line_no);
        const auto c1 = line.find(',');
        const auto c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
        if (c2 == std::string::npos || line.find(',', c2 + 1) != std::string::npos) {
            throw ValidationError(at + ": malformed row");
        }
        const std::string id = line.substr(0, c1);
        const auto it = index.find(id);
        if (it == index.end()) throw ValidationError(at + ": series '" + id + "' is not in the panel");
        std::size_t step = 0;
        double value = 0.0;
        const char* s_begin = line.data() + c1 + 1;
        const char* s_end = line.data() + c2;
        const char* v_begin = line.data() + c2 + 1;
        const char* v_end = line.data() + line.size();
        auto r1 = std::from_chars(s_begin, s_end, step);
        auto r2 = std::from_chars(v_begin, v_end, value);
        if (r1.ec != std::errc{} || r1.ptr != s_end || step < 1 || r2.ec != std::errc{} || r2.ptr != v_end) {
            throw ValidationError(at + ": series '" + id + "': malformed step or value");
        }
        if (!cells.emplace(std::make_pair(it->second, step), value).second) {
            throw ValidationError(at + ": series '" + id + "': duplicate step " + std::to_string(step));
        }
        horizon = std::max(horizon, step);
    }
    if (cells.size() != panel.series_count() * horizon) {
        throw ValidationError(path + ": forecast must cover steps 1.." + std::to_string(horizon) +
                              " for every panel series");
    }
    Matrix m(panel.series_count(), horizon);
    for (const auto& [key, value] : cells) m(key.first, key.second - 1) = value;
    return m;
}

int cmd_evaluate(const RunConfig& cfg, const Options& opt, std::ostream& out) {
    const auto [train_panel, test] = load_split(cfg, pick(opt.panel, cfg.io.panel));
    const Matrix predicted = read_point_forecast(pick(opt.point_in, cfg.io.forecast_point), test);
    Matrix actual(test.series_count(), test.length());
    for (std::size_t i = 0; i < test.series_count(); ++i) {
        const auto s = test.series(i);
        std::copy(s.begin(), s.end(), actual.row(i).begin());
    }
    const auto steps = step_range(cfg.sweep.first_step, cfg.sweep.last_step);
    EvalReport report;
    report.steps = steps;
    report.series_ids = test.ids();
    report.models.push_back(score_forecast(opt.name, actual, predicted, steps));
    report.provenance = provenance(cfg, "evaluate");
    report.provenance["point_forecast_file"] = pick(opt.point_in, cfg.io.forecast_point);
    const std::string dir = pick(opt.report_dir, cfg.io.report_dir);
    write_report(report, dir);
    out << table_csv(report, ReportTable::pooled_rmsle);
    out << "wrote report to " << dir << "\n";
    return kExitOk;
}

std::vector<std::shared_ptr<Forecaster>> build_models(const RunConfig& cfg) {
    std::vector<std::shared_ptr<Forecaster>> models;
    for (const auto& name : cfg.sweep.models) {
        if (name == "lma_deepar") {
            models.push_back(std::make_shared<DeepArForecaster>(name, cfg.train, cfg.covariate_spec(true),
                                                                cfg.forecast.samples, cfg.forecast.statistic));
        } else if (name == "deepar") {
            models.push_back(std::make_shared<DeepArForecaster>(name, cfg.train, cfg.covariate_spec(false),
                                                                cfg.forecast.samples, cfg.forecast.statistic));
        } else if (name == "seasonal_naive") {
            models.push_back(std::make_shared<SeasonalNaiveForecaster>(cfg.sweep.naive_season));
        } else if (name == "holt_winters") {
            models.push_back(std::make_shared<HoltWintersForecaster>(cfg.holt_winters));
        } else if (name == "constant_mean") {
            models.push_back(std::make_shared<ConstantMeanForecaster>());
        } else {
            throw ValidationError("config key 'sweep.models': unknown model '" + name + "'");
        }
    }
    return models;
}

int cmd_sweep(const RunConfig& cfg, const Options& opt, std::ostream& out) {
    const SeriesPanel panel = opt.panel.empty() ? generate_panel(cfg.synth) : load_panel(opt.panel);
    const auto models = build_models(cfg);
    const auto steps = step_range(cfg.sweep.first_step, cfg.sweep.last_step);
    EvalReport report = sweep(models, panel, cfg.split, steps, cfg.forecast.seed);
    const json sweep_prov = report.provenance;
    report.provenance = provenance(cfg, "sweep");
    report.provenance["sweep"] = sweep_prov;
    report.provenance["panel_source"] = opt.panel.empty() ? json("synth") : json(opt.panel);
    const std::string dir = pick(opt.report_dir, cfg.io.report_dir);
    write_report(report, dir);
    out << table_csv(report, ReportTable::pooled_rmsle);
    for (const auto& m : report.models) {
        if (!m.ok) out << "model " << m.name << " failed: " << m.error << "\n";
    }
    out << "wrote report to " << dir << "\n";
    return kExitOk;
}

} // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Cell traffic forecasting with LMA covariates and an autoregressive recurrent model", "cellcast"};
    app.require_subcommand(1);
    Options opt;

    auto add_common = [&opt](CLI::App* sub) {
        sub->add_option("-c,--config", opt.config, "JSON config file");
        sub->add_option("--set", opt.overrides, "Override: section.key=value (repeatable)");
    };

    auto* generate = app.add_subcommand("generate", "Write a synthetic traffic panel");
    add_common(generate);
    generate->add_option("-o,--out", opt.out, "Panel CSV path (default io.panel)");

    auto* covariates = app.add_subcommand("covariates", "Export LMA covariate channels of the training range");
    add_common(covariates);
    covariates->add_option("--panel", opt.panel, "Panel CSV (default io.panel)");
    covariates->add_option("-o,--out", opt.out, "Covariate CSV path (default io.covariates)");
    covariates->add_flag("--no-lma", opt.no_lma, "Omit LMA channels");

    auto* train_cmd = app.add_subcommand("train", "Train a model on the training range and save it");
    add_common(train_cmd);
    train_cmd->add_option("--panel", opt.panel, "Panel CSV (default io.panel)");
    train_cmd->add_option("--model", opt.model, "Model file to write (default io.model)");
    train_cmd->add_flag("--no-lma", opt.no_lma, "Train plain DeepAR without LMA covariates");

    auto* forecast = app.add_subcommand("forecast", "Sample forecasts from a saved model");
    add_common(forecast);
    forecast->add_option("--panel", opt.panel, "Panel CSV (default io.panel)");
    forecast->add_option("--model", opt.model, "Model file (default io.model)");
    forecast->add_option("--samples-out", opt.samples_out, "Sample CSV (default io.forecast_samples)");
    forecast->add_option("--point-out", opt.point_out, "Point forecast CSV (default io.forecast_point)");
    forecast->add_option("--horizon", opt.horizon, "Forecast horizon (default: the model's horizon)");

    auto* evaluate = app.add_subcommand("evaluate", "Score a point forecast file against the test range");
    add_common(evaluate);
    evaluate->add_option("--panel", opt.panel, "Panel CSV (default io.panel)");
    evaluate->add_option("--point-forecast", opt.point_in, "Point forecast CSV (default io.forecast_point)");
    evaluate->add_option("--report-dir", opt.report_dir, "Report directory (default io.report_dir)");
    evaluate->add_option("--name", opt.name, "Column name for the forecast in the report");

    auto* sweep_cmd = app.add_subcommand("sweep", "Run the per-step RMSLE and stability protocol over models");
    add_common(sweep_cmd);
    sweep_cmd->add_option("--panel", opt.panel, "Panel CSV (default: generate from the synth section)");
    sweep_cmd->add_option("--report-dir", opt.report_dir, "Report directory (default io.report_dir)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitValidation;
    }

    try {
        const RunConfig cfg = load_run_config(opt.config, opt.overrides);
        if (generate->parsed()) return cmd_generate(cfg, opt, out);
        if (covariates->parsed()) return cmd_covariates(cfg, opt, out);
        if (train_cmd->parsed()) return cmd_train(cfg, opt, out);
        if (forecast->parsed()) return cmd_forecast(cfg, opt, out);
        if (evaluate->parsed()) return cmd_evaluate(cfg, opt, out);
        if (sweep_cmd->parsed()) return cmd_sweep(cfg, opt, out);
        err << "error: no subcommand\n";
        return kExitValidation;
    } catch (const IoError& e) {
        err << "I/O error: " << e.what() << "\n";
        return kExitIo;
    } catch (const ValidationError& e) {
        err << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    }
}

} // namespace cellcast::cli
