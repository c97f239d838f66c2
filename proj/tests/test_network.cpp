#include "oracles.hpp"

#include "cellcast/adam.hpp"
#include "cellcast/error.hpp"
#include "cellcast/lstm.hpp"
#include "cellcast/network.hpp"
#include "cellcast/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

using namespace cellcast;

namespace {

double sig(double x) { return 1.0 / (1.0 + std::exp(-x)); }

NetworkParams random_params(Rng& rng, std::size_t input, std::size_t hidden, std::size_t layers, double range) {
    NetworkParams p(input, hidden, layers);
    for (auto& v : p.values()) v = rng.uniform(-range, range);
    return p;
}

} // namespace

TEST_CASE("parameter layout") {
    NetworkParams p(3, 4, 2);
    CHECK(p.size() == (16 * 3 + 16 * 4 + 16) + (16 * 4 + 16 * 4 + 16) + 2 * (4 + 1));
    CHECK(p.layer_input_size(0) == 3);
    CHECK(p.layer_input_size(1) == 4);
    const auto mask = p.bias_mask();
    std::size_t biases = 0;
    for (bool b : mask) biases += b ? 1 : 0;
    CHECK(biases == 16 + 16 + 2);
    p.mu_bias() = 1.5;
    p.sigma_bias() = -2.0;
    CHECK(p.values()[p.size() - 1] == -2.0);
    CHECK(p.values()[p.size() - 6] == 1.5);
}

TEST_CASE("lstm cell") {
    SUBCASE("all zero") {
        NetworkParams p(2, 3, 1);
        const std::vector<double> x(2, 0.0), h(3, 0.0), c(3, 0.0);
        const auto out = lstm_cell(x, h, c, p.layer(0));
        for (double v : out.h) CHECK(v == 0.0);
        for (double v : out.c) CHECK(v == 0.0);
    }
    SUBCASE("saturated forget gate keeps the cell") {
        NetworkParams p(1, 1, 1);
        p.bias(0)[gate_forget] = 20.0;
        const std::vector<double> x{0.0}, h{0.0}, c{1.0};
        const auto out = lstm_cell(x, h, c, p.layer(0));
        CHECK(out.c[0] == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(out.h[0] == doctest::Approx(0.5 * std::tanh(1.0)).epsilon(1e-8));
        CHECK(out.h[0] == doctest::Approx(0.38079).epsilon(1e-5));
    }
    SUBCASE("pure and shape checked") {
        Rng rng(3);
        const auto p = random_params(rng, 2, 3, 1, 0.5);
        const std::vector<double> x{0.3, -1.0}, h{0.1, 0.2, 0.3}, c{-0.1, 0.0, 0.4};
        const auto a = lstm_cell(x, h, c, p.layer(0));
        const auto b = lstm_cell(x, h, c, p.layer(0));
        CHECK(a.h == b.h);
        CHECK(a.c == b.c);
        CHECK_THROWS_AS(lstm_cell(std::vector<double>{1.0}, h, c, p.layer(0)), ValidationError);
        CHECK_THROWS_AS(lstm_cell(x, std::vector<double>{0.0}, c, p.layer(0)), ValidationError);
    }
}

TEST_CASE("softplus is stable") {
    CHECK(softplus(0.0) == doctest::Approx(std::log(2.0)));
    CHECK(softplus(800.0) == 800.0);
    CHECK(softplus(-800.0) >= 0.0);
    CHECK(std::isfinite(softplus(-800.0)));
    CHECK(sigmoid(0.0) == 0.5);
}

TEST_CASE("gaussian nll") {
    CHECK(gaussian_nll(3.0, {3.0, 1.0}, 1.0) == doctest::Approx(0.5 * std::log(2.0 * std::numbers::pi)));
    const double sigma = 0.7;
    CHECK(gaussian_nll(10.0 * (1.0 + 2.0 * sigma), {1.0, sigma}, 10.0) ==
          doctest::Approx(0.5 * std::log(2.0 * std::numbers::pi * sigma * sigma) + 2.0));
    CHECK_THROWS_AS(gaussian_nll(1.0, {1.0, 0.0}, 1.0), ValidationError);
    CHECK_THROWS_AS(gaussian_nll(1.0, {1.0, 1.0}, 0.0), ValidationError);
    CHECK_THROWS_AS(gaussian_nll(std::numeric_limits<double>::quiet_NaN(), {1.0, 1.0}, 1.0), ValidationError);
}

TEST_CASE("series scale") {
    CHECK(series_scale(std::vector<double>{1, 2, 3}) == 3.0);
    CHECK(series_scale(std::vector<double>{0, 0}) == 1.0);
    CHECK_THROWS_AS(series_scale(std::vector<double>{}), ValidationError);
}

TEST_CASE("zero weights give constant heads") {
    NetworkParams p(3, 5, 2);
    p.mu_bias() = 0.25;
    p.sigma_bias() = -1.0;
    const std::vector<double> lagged{0.0, 5.0, 7.0, 2.0};
    Matrix cov(4, 2, 0.3);
    const auto out = forward_window(lagged, cov, p, 4.0, 1e-6);
    REQUIRE(out.theta.size() == 4);
    for (const auto& th : out.theta) {
        CHECK(th.mu == 0.25);
        CHECK(th.sigma == softplus(-1.0) + 1e-6);
    }
}

TEST_CASE("hand-evaluated scalar recurrence over two steps") {
    NetworkParams p(1, 1, 1);
    const double wi = 0.5, wf = -0.3, wg = 0.8, wo = 0.2;
    const double ri = 0.1, rf = 0.4, rg = -0.6, ro = 0.3;
    const double bi = 0.05, bf = 1.0, bg = -0.1, bo = 0.0;
    auto W = p.input_weights(0);
    auto R = p.recurrent_weights(0);
    auto B = p.bias(0);
    W[0] = wi, W[1] = wf, W[2] = wg, W[3] = wo;
    R[0] = ri, R[1] = rf, R[2] = rg, R[3] = ro;
    B[0] = bi, B[1] = bf, B[2] = bg, B[3] = bo;
    p.mu_weights()[0] = 2.0;
    p.mu_bias() = 0.1;
    p.sigma_weights()[0] = -1.0;
    p.sigma_bias() = 0.5;

    const double scale = 4.0;
    const std::vector<double> lagged{0.0, 2.0};

    double h = 0.0, c = 0.0;
    std::vector<std::pair<double, double>> expected;
    for (double z : lagged) {
        const double x = z / scale;
        const double i = sig(wi * x + ri * h + bi);
        const double f = sig(wf * x + rf * h + bf);
        const double g = std::tanh(wg * x + rg * h + bg);
        const double o = sig(wo * x + ro * h + bo);
        c = f * c + i * g;
        h = o * std::tanh(c);
        expected.emplace_back(2.0 * h + 0.1, std::log(1.0 + std::exp(-h + 0.5)) + 1e-6);
    }

    const auto out = forward_window(lagged, Matrix(2, 0), p, scale, 1e-6);
    for (std::size_t t = 0; t < 2; ++t) {
        CHECK(out.theta[t].mu == doctest::Approx(expected[t].first).epsilon(1e-14));
        CHECK(out.theta[t].sigma == doctest::Approx(expected[t].second).epsilon(1e-14));
    }
    CHECK(out.final_state.h[0][0] == doctest::Approx(h).epsilon(1e-14));
    CHECK(out.final_state.c[0][0] == doctest::Approx(c).epsilon(1e-14));
}

TEST_CASE("forward_window checks shapes and inputs") {
    NetworkParams p(2, 2, 1);
    const std::vector<double> lagged{1.0, 2.0};
    CHECK_THROWS_AS(forward_window(lagged, Matrix(3, 1), p, 1.0, 1e-6), ValidationError);
    CHECK_THROWS_AS(forward_window(lagged, Matrix(2, 2), p, 1.0, 1e-6), ValidationError);
    CHECK_THROWS_AS(forward_window(std::vector<double>{1.0, std::nan("")}, Matrix(2, 1), p, 1.0, 1e-6),
                    ValidationError);
}

TEST_CASE("loss of a matched constant head") {
    NetworkParams p(1, 3, 1);
    p.mu_bias() = 0.5;
    p.sigma_bias() = std::log(std::expm1(1.0 - 1e-6));
    const double scale = 8.0;
    const std::vector<double> targets(5, 0.5 * scale);
    const std::vector<double> lagged(5, 3.0);
    const double loss = window_loss(lagged, targets, Matrix(5, 0), p, scale, 1e-6);
    CHECK(loss == doctest::Approx(0.5 * std::log(2.0 * std::numbers::pi)).epsilon(1e-12));
}

TEST_CASE("sigma never drops below the floor") {
    Rng rng(12);
    auto p = random_params(rng, 2, 4, 2, 0.5);
    p.sigma_bias() = -800.0;
    std::vector<double> lagged(10);
    for (auto& v : lagged) v = rng.uniform(0.0, 50.0);
    Matrix cov(10, 1);
    for (auto& v : cov.data()) v = rng.normal();
    for (const auto& th : forward_window(lagged, cov, p, 20.0, 1e-6).theta) CHECK(th.sigma >= 1e-6);
}

TEST_CASE("gradient matches finite differences") {
    Rng rng(2024);
    for (int trial = 0; trial < 5; ++trial) {
        const std::size_t hidden = 1 + rng.uniform_index(5);
        const std::size_t layers = 1 + rng.uniform_index(2);
        const std::size_t len = 2 + rng.uniform_index(8);
        const auto p = random_params(rng, 3, hidden, layers, 0.4);
        std::vector<double> lagged(len), targets(len);
        for (auto& v : targets) v = rng.uniform(0.0, 40.0);
        lagged[0] = rng.uniform(0.0, 40.0);
        for (std::size_t t = 1; t < len; ++t) lagged[t] = targets[t - 1];
        Matrix cov(len, 2);
        for (auto& v : cov.data()) v = rng.normal();
        const double scale = 1.0 + rng.uniform(5.0, 30.0);

        const auto analytic = window_loss_and_grad(lagged, targets, cov, p, scale, 1e-6);
        CHECK(analytic.loss == window_loss(lagged, targets, cov, p, scale, 1e-6));
        const auto numeric = oracle::numeric_gradient(lagged, targets, cov, p, scale, 1e-6, 1e-5);
        double worst = 0.0;
        for (std::size_t k = 0; k < numeric.size(); ++k) {
            worst = std::max(worst, oracle::relative_error(analytic.grad.values()[k], numeric[k]));
        }
        CHECK(worst < 1e-4);

        const auto again = window_loss_and_grad(lagged, targets, cov, p, scale, 1e-6);
        CHECK(again.loss == analytic.loss);
        CHECK(again.grad == analytic.grad);
    }
}

TEST_CASE("adam step") {
    // One step from zero moments moves each coordinate by lr * sign(g).
    std::vector<double> params{1.0, -2.0, 0.0};
    const std::vector<double> grad{0.5, -3.0, 0.0};
    cellcast::Adam adam(3, {});
    adam.step(params, grad);
    CHECK(params[0] == doctest::Approx(1.0 - 1e-3).epsilon(1e-9));
    CHECK(params[1] == doctest::Approx(-2.0 + 1e-3).epsilon(1e-9));
    CHECK(params[2] == 0.0);
    CHECK(adam.steps_taken() == 1);
}
