// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fails. Pass criterion numbers as arguments to run a subset.

#include "oracles.hpp"
#include "support.hpp"

#include "cli/commands.hpp"

#include "cellcast/baselines.hpp"
#include "cellcast/eval.hpp"
#include "cellcast/lma.hpp"
#include "cellcast/model.hpp"
#include "cellcast/model_io.hpp"
#include "cellcast/network.hpp"
#include "cellcast/rng.hpp"
#include "cellcast/synthgen.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace cellcast;
using testsupport::read_file;
using testsupport::TempDir;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

bool bit_equal(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) return false;
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (std::bit_cast<std::uint64_t>(a[k]) != std::bit_cast<std::uint64_t>(b[k])) return false;
    }
    return true;
}

int run_cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::run_command(args, out, err);
    if (code != 0) std::cerr << err.str();
    return code;
}

// step -> column -> value, from a report table.
std::map<std::string, std::map<std::string, std::string>> read_table(const std::filesystem::path& p) {
    std::istringstream in(read_file(p));
    std::string line;
    std::getline(in, line);
    std::vector<std::string> header;
    {
        std::istringstream h(line);
        std::string cell;
        while (std::getline(h, cell, ',')) header.push_back(cell);
    }
    std::map<std::string, std::map<std::string, std::string>> table;
    while (std::getline(in, line)) {
        std::istringstream r(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(r, cell, ',')) cells.push_back(cell);
        for (std::size_t c = 1; c < cells.size() && c < header.size(); ++c) table[cells[0]][header[c]] = cells[c];
    }
    return table;
}

// ---------------------------------------------------------------------------

Outcome gradient_check() {
    Rng rng(20240901);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t hidden = trial == 0 ? 8 : 1 + rng.uniform_index(8);
        const std::size_t layers = trial == 0 ? 2 : 1 + rng.uniform_index(2);
        const std::size_t len = trial == 0 ? 12 : 1 + rng.uniform_index(12);
        NetworkParams p(3, hidden, layers);
        for (auto& v : p.values()) v = rng.uniform(-0.5, 0.5);
        std::vector<double> lagged(len), targets(len);
        for (auto& v : targets) v = rng.exponential(50.0);
        lagged[0] = rng.exponential(50.0);
        for (std::size_t t = 1; t < len; ++t) lagged[t] = targets[t - 1];
        Matrix cov(len, 2);
        for (auto& v : cov.data()) v = rng.normal();
        const double scale = 1.0 + rng.uniform(10.0, 80.0);

        const auto analytic = window_loss_and_grad(lagged, targets, cov, p, scale, 1e-6);
        const auto numeric = oracle::numeric_gradient(lagged, targets, cov, p, scale, 1e-6, 1e-5);
        for (std::size_t k = 0; k < numeric.size(); ++k) {
            worst = std::max(worst, oracle::relative_error(analytic.grad.values()[k], numeric[k]));
        }
    }
    return {worst < 1e-4, "max relative error " + fmt(worst) + " (limit 1e-4)"};
}

Outcome lma_oracle() {
    const std::vector<double> worked{10, 20, 30, 40, 50, 60};
    LmaConfig cfg;
    cfg.context = 3;
    cfg.prediction = 2;
    cfg.features = {FeatureKind::mean};
    const bool worked_ok = lma_features(worked, cfg)[0] == std::vector<double>{20, 20, 30, 50, 50, 55, 55, 55};

    Rng rng(1337);
    std::size_t mismatches = 0;
    for (int k = 0; k < 200; ++k) {
        const std::size_t n = 1 + rng.uniform_index(200);
        const std::size_t cl = 1 + rng.uniform_index(n);
        const std::size_t pl = 1 + rng.uniform_index(cl);
        std::vector<double> z(n);
        for (auto& v : z) v = rng.uniform() < 0.1 ? 0.0 : rng.exponential(1000.0);
        LmaConfig c;
        c.context = cl;
        c.prediction = pl;
        c.features = {FeatureKind::mean, FeatureKind::std};
        const auto out = lma_features(z, c);
        const auto mean = oracle::lma_channel(z, static_cast<long long>(cl), static_cast<long long>(pl), FeatureKind::mean);
        const auto sd = oracle::lma_channel(z, static_cast<long long>(cl), static_cast<long long>(pl), FeatureKind::std);
        if (!bit_equal(out[0], mean) || !bit_equal(out[1], sd)) ++mismatches;
    }
    return {worked_ok && mismatches == 0, std::string("worked example ") + (worked_ok ? "ok" : "WRONG") + ", " +
                                              std::to_string(mismatches) + "/200 random instances differ"};
}

Outcome rmsle_oracle() {
    Rng rng(6);
    double worst = 0.0;
    double worst_pooling = 0.0;
    bool symmetric = true;
    bool zero_iff_equal = true;
    for (int k = 0; k < 1000; ++k) {
        const std::size_t rows = 1 + rng.uniform_index(20);
        const std::size_t cols = 1 + rng.uniform_index(31);
        std::vector<std::vector<double>> a(rows, std::vector<double>(cols)), p = a;
        Matrix A(rows, cols), P(rows, cols);
        for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t c = 0; c < cols; ++c) {
                a[r][c] = A(r, c) = rng.uniform() < 0.05 ? 0.0 : rng.exponential(2000.0);
                p[r][c] = P(r, c) = rng.uniform() < 0.05 ? 0.0 : rng.exponential(2000.0);
            }
        }
        const double pooled = rmsle_pooled(A, P);
        worst = std::max(worst, std::abs(pooled - oracle::rmsle(a, p)));
        symmetric = symmetric && rmsle_pooled(P, A) == pooled;
        zero_iff_equal = zero_iff_equal && rmsle_pooled(A, A) == 0.0 && (A == P || pooled > 0.0);
        const auto per = rmsle_per_series(A, P);
        double mean_sq = 0.0;
        for (double v : per) mean_sq += v * v;
        mean_sq /= static_cast<double>(rows);
        worst_pooling = std::max(worst_pooling, std::abs(pooled * pooled - mean_sq) / std::max(mean_sq, 1e-300));
    }
    const bool pass = worst <= 1e-12 && symmetric && zero_iff_equal && worst_pooling <= 1e-12;
    return {pass, "max |impl - oracle| " + fmt(worst) + ", symmetry " + (symmetric ? "exact" : "BROKEN") +
                      ", zero iff equal " + (zero_iff_equal ? "holds" : "BROKEN") + ", pooling rel. error " +
                      fmt(worst_pooling)};
}

// Criteria 4 and 5 share one trained model.
struct SinusoidRun {
    std::vector<double> epoch_nll;
    double model_rmsle = 0.0;
    double constant_rmsle = 0.0;
    double coverage = 0.0;
};

SinusoidRun sinusoid_run() {
    SynthConfig s;
    s.series = 20;
    s.trend_slope = {0.0, 0.0};
    s.amplitude = {200.0, 200.0};
    s.noise_sigma = 4.0;
    s.burst_rate = 0.0;
    s.seed = 4242;
    const auto panel = generate_panel(s);
    const auto [train_panel, test] = split_panel(panel, SplitSpec{182, 212});

    const TrainConfig cfg;
    CovariateSpec spec;
    spec.lma = LmaConfig{};
    const auto cov = make_covariates(train_panel, spec, cfg.horizon);
    const auto model = train(train_panel, cov, cfg);

    const std::size_t horizon = 15;
    const auto forecasts = forecast_panel(model, train_panel, cov, horizon, 100, 2018);
    Matrix actual(panel.series_count(), horizon), point(panel.series_count(), horizon),
        flat(panel.series_count(), horizon);
    std::size_t covered = 0;
    for (std::size_t i = 0; i < panel.series_count(); ++i) {
        const auto med = point_forecast(forecasts[i], PointStatistic::median);
        const auto cm = constant_mean(train_panel.series(i), horizon);
        for (std::size_t h = 0; h < horizon; ++h) {
            actual(i, h) = test.series(i)[h];
            point(i, h) = med[h];
            flat(i, h) = cm[h];
            std::vector<double> col(forecasts[i].samples.rows());
            for (std::size_t k = 0; k < col.size(); ++k) col[k] = forecasts[i].samples(k, h);
            std::sort(col.begin(), col.end());
            auto quantile = [&](double q) {
                const double pos = q * static_cast<double>(col.size() - 1);
                const auto lo = static_cast<std::size_t>(pos);
                const std::size_t hi = std::min(lo + 1, col.size() - 1);
                return col[lo] + (pos - static_cast<double>(lo)) * (col[hi] - col[lo]);
            };
            if (actual(i, h) >= quantile(0.1) && actual(i, h) <= quantile(0.9)) ++covered;
        }
    }
    SinusoidRun run;
    run.epoch_nll = model.epoch_nll;
    run.model_rmsle = rmsle_pooled(actual, point);
    run.constant_rmsle = rmsle_pooled(actual, flat);
    run.coverage = static_cast<double>(covered) / static_cast<double>(panel.series_count() * horizon);
    return run;
}

Outcome learning_sanity(const SinusoidRun& run) {
    const bool nll_down = !run.epoch_nll.empty() && run.epoch_nll.back() < run.epoch_nll.front();
    const bool beats_flat = run.model_rmsle < run.constant_rmsle;
    return {nll_down && beats_flat,
            "NLL " + fmt(run.epoch_nll.front()) + " -> " + fmt(run.epoch_nll.back()) + ", step-15 RMSLE " +
                fmt(run.model_rmsle) + " vs constant mean " + fmt(run.constant_rmsle)};
}

Outcome coverage_sanity(const SinusoidRun& run) {
    return {run.coverage >= 0.60 && run.coverage <= 0.95, "80% interval coverage " + fmt(run.coverage) + " (want [0.60, 0.95])"};
}

// Criteria 6-8 share two default sweeps.
struct SweepRuns {
    int code_a = -1;
    int code_b = -1;
    TempDir dir;
};

SweepRuns& default_sweeps() {
    static SweepRuns runs;
    if (runs.code_a < 0) {
        runs.code_a = run_cli({"sweep", "--report-dir", (runs.dir / "a").string()});
        runs.code_b = run_cli({"sweep", "--report-dir", (runs.dir / "b").string()});
    }
    return runs;
}

Outcome lma_not_worse() {
    auto& runs = default_sweeps();
    if (runs.code_a != 0) return {false, "sweep exited with " + std::to_string(runs.code_a)};
    const auto table = read_table(runs.dir / "a" / "rmsle_by_step.csv");
    const double lma = std::stod(table.at("mean").at("lma_deepar"));
    const double plain = std::stod(table.at("mean").at("deepar"));
    return {lma <= plain, "mean RMSLE over steps 15-31: LMA-DeepAR " + fmt(lma) + ", DeepAR " + fmt(plain) +
                              ", seasonal naive " + table.at("mean").at("seasonal_naive") + ", Holt-Winters " +
                              table.at("mean").at("holt_winters")};
}

Outcome horizon_degrades() {
    auto& runs = default_sweeps();
    if (runs.code_a != 0) return {false, "sweep exited with " + std::to_string(runs.code_a)};
    const auto table = read_table(runs.dir / "a" / "rmsle_by_step.csv");
    bool pass = true;
    std::string detail;
    for (const std::string m : {"lma_deepar", "deepar"}) {
        const double s15 = std::stod(table.at("15").at(m));
        const double s31 = std::stod(table.at("31").at(m));
        pass = pass && s31 >= s15;
        detail += (detail.empty() ? "" : ", ") + m + " " + fmt(s15) + " -> " + fmt(s31);
    }
    return {pass, detail};
}

Outcome rerun_identical() {
    auto& runs = default_sweeps();
    if (runs.code_a != 0 || runs.code_b != 0) return {false, "sweep failed"};
    std::size_t compared = 0;
    std::vector<std::string> differing;
    for (const auto& entry : std::filesystem::directory_iterator(runs.dir / "a")) {
        const auto name = entry.path().filename().string();
        if (entry.path().extension() != ".csv" && entry.path().extension() != ".json") continue;
        ++compared;
        const auto other = runs.dir / "b" / name;
        if (!std::filesystem::exists(other) || read_file(entry.path()) != read_file(other)) differing.push_back(name);
    }
    std::string detail = std::to_string(compared) + " report files compared";
    for (const auto& d : differing) detail += ", differs: " + d;
    return {compared >= 4 && differing.empty(), detail};
}

Outcome persistence() {
    TempDir dir;
    Rng rng(909);
    std::size_t mismatches = 0;
    for (int k = 0; k < 10; ++k) {
        TrainedModel model;
        auto& cfg = model.train_config;
        cfg.context_length = 5 + rng.uniform_index(20);
        cfg.horizon = 1 + rng.uniform_index(cfg.context_length);
        cfg.hidden_size = 1 + rng.uniform_index(12);
        cfg.num_layers = 1 + rng.uniform_index(3);
        cfg.seed = rng.next_u64();
        if (rng.uniform() < 0.7) {
            LmaConfig lma;
            lma.context = cfg.context_length;
            lma.prediction = cfg.horizon;
            lma.features = rng.uniform() < 0.5 ? std::vector<FeatureKind>{FeatureKind::mean, FeatureKind::std}
                                               : std::vector<FeatureKind>{FeatureKind::std};
            model.covariates.lma = lma;
        }
        model.covariates.day_of_week = rng.uniform() < 0.5;
        model.params = initialize_params(1 + model.covariates.channel_count(), cfg);
        for (auto& v : model.params.values()) v += rng.normal(0.0, 0.2);
        model.epoch_nll = {rng.normal(), rng.normal()};

        std::vector<double> z(cfg.context_length + rng.uniform_index(30));
        for (auto& v : z) v = rng.exponential(500.0);
        const auto panel = SeriesPanel::create({"x"}, parse_date("2019-03-04"), {z});
        const auto cov = make_covariates(panel, model.covariates, cfg.horizon);
        const Matrix rows = cov.window(0, 0, cov.length());

        const auto path = dir / ("m" + std::to_string(k) + ".ccm");
        save_model(model, path);
        const auto loaded = load_model(path);
        const std::uint64_t seed = rng.next_u64();
        const auto a = sample_forecast(model, z, rows, 20, seed);
        const auto b = sample_forecast(loaded, z, rows, 20, seed);
        if (!bit_equal(a.samples.data(), b.samples.data()) || !bit_equal(model.params.values(), loaded.params.values())) {
            ++mismatches;
        }
    }
    return {mismatches == 0, std::to_string(mismatches) + "/10 reloaded models differ"};
}

Outcome baseline_anchor() {
    TempDir dir;
    SynthConfig s;
    s.noise_sigma = 0.0;
    s.burst_rate = 0.0;
    s.trend_slope = {0.0, 0.0};
    const auto generated = generate_panel(s);
    // Tile the first week so the panel is exactly, not just approximately, periodic.
    std::vector<std::vector<double>> values;
    for (std::size_t i = 0; i < generated.series_count(); ++i) {
        std::vector<double> v(generated.length());
        for (std::size_t t = 0; t < v.size(); ++t) v[t] = generated.series(i)[t % 7];
        values.push_back(std::move(v));
    }
    write_panel(SeriesPanel::create(generated.ids(), generated.start_date(), std::move(values)), dir / "p.csv");

    const int code = run_cli({"sweep", "--panel", (dir / "p.csv").string(), "--report-dir", (dir / "r").string(),
                              "--set", "sweep.models=[\"seasonal_naive\"]"});
    if (code != 0) return {false, "sweep exited with " + std::to_string(code)};
    const auto table = read_table(dir / "r" / "rmsle_by_step.csv");
    std::size_t nonzero = 0;
    for (const auto& [step, cells] : table) nonzero += cells.at("seasonal_naive") == "0" ? 0 : 1;
    return {table.size() == 18 && nonzero == 0,
            std::to_string(table.size()) + " report rows, " + std::to_string(nonzero) + " non-zero"};
}

} // namespace

int main(int argc, char** argv) {
    std::set<int> wanted;
    for (int a = 1; a < argc; ++a) wanted.insert(std::stoi(argv[a]));
    auto selected = [&](int k) { return wanted.empty() || wanted.contains(k); };

    std::optional<SinusoidRun> sinusoid;
    auto with_sinusoid = [&](auto check) {
        return [&, check] {
            if (!sinusoid) sinusoid = sinusoid_run();
            return check(*sinusoid);
        };
    };

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"gradient check against finite differences", gradient_check},
        {"LMA features equal the literal oracle", lma_oracle},
        {"RMSLE equals its direct transcription", rmsle_oracle},
        {"learning sanity on a sinusoid panel", with_sinusoid(learning_sanity)},
        {"central 80% interval coverage", with_sinusoid(coverage_sanity)},
        {"LMA-DeepAR not worse than DeepAR", lma_not_worse},
        {"RMSLE grows from step 15 to step 31", horizon_degrades},
        {"rerun gives byte-identical reports", rerun_identical},
        {"saved models reproduce forecasts", persistence},
        {"seasonal naive scores zero on a periodic panel", baseline_anchor},
    };

    int failures = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const int id = static_cast<int>(k + 1);
        if (!selected(id)) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[k].second();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        failures += o.pass ? 0 : 1;
        std::printf("[%s] %2d %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", id, criteria[k].first.c_str(),
                    o.detail.c_str(), secs);
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
