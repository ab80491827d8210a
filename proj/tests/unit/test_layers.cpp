#include <doctest.h>

#include <cmath>
#include <vector>

#include "metaphor/errors.hpp"
#include "metaphor/layers.hpp"
#include "metaphor/ops.hpp"
#include "metaphor/random.hpp"

using namespace metaphor;

namespace {

std::vector<double> random_values(std::size_t n, Rng& rng) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(-1.0, 1.0);
  return v;
}

double sig(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Plain-loop LSTM step over the stacked gate layout [i; f; o; g].
struct ScalarLstm {
  std::size_t din, dh;
  std::vector<double> wx, wh, b;  // {4h, din}, {4h, h}, {4h}

  void step(const std::vector<double>& x, std::vector<double>& h, std::vector<double>& c) const {
    std::vector<double> z(4 * dh);
    for (std::size_t r = 0; r < 4 * dh; ++r) {
      double acc = b[r];
      for (std::size_t k = 0; k < din; ++k) acc += wx[r * din + k] * x[k];
      for (std::size_t k = 0; k < dh; ++k) acc += wh[r * dh + k] * h[k];
      z[r] = acc;
    }
    for (std::size_t j = 0; j < dh; ++j) {
      const double i = sig(z[j]), f = sig(z[dh + j]), o = sig(z[2 * dh + j]), g = std::tanh(z[3 * dh + j]);
      c[j] = f * c[j] + i * g;
      h[j] = o * std::tanh(c[j]);
    }
  }
};

ScalarLstm random_scalar_lstm(std::size_t din, std::size_t dh, Rng& rng) {
  return {din, dh, random_values(4 * dh * din, rng), random_values(4 * dh * dh, rng), random_values(4 * dh, rng)};
}

LstmCell cell_from(const ScalarLstm& s) {
  return LstmCell(Tensor::parameter({4 * s.dh, s.din}, s.wx), Tensor::parameter({4 * s.dh, s.dh}, s.wh),
                  Tensor::parameter({4 * s.dh}, s.b));
}

}  // namespace

TEST_CASE("lstm step matches a scalar reference") {
  Rng rng(5);
  const auto ref = random_scalar_lstm(3, 4, rng);
  const auto cell = cell_from(ref);
  std::vector<double> h(4, 0.0), c(4, 0.0);
  LstmState state = cell.initial_state();
  for (int t = 0; t < 4; ++t) {
    const auto x = random_values(3, rng);
    ref.step(x, h, c);
    state = cell.step(Tensor::constant({3}, x), state);
    for (std::size_t j = 0; j < 4; ++j) {
      CHECK(state.h.at(j) == doctest::Approx(h[j]).epsilon(1e-13));
      CHECK(state.c.at(j) == doctest::Approx(c[j]).epsilon(1e-13));
    }
  }
}

TEST_CASE("bilstm concatenates a forward pass and a reversed pass") {
  Rng rng(8);
  const auto fwd = random_scalar_lstm(2, 3, rng);
  const auto bwd = random_scalar_lstm(2, 3, rng);
  const BiLstm bilstm(cell_from(fwd), cell_from(bwd));
  std::vector<std::vector<double>> xs;
  std::vector<Tensor> inputs;
  for (int t = 0; t < 5; ++t) {
    xs.push_back(random_values(2, rng));
    inputs.push_back(Tensor::constant({2}, xs.back()));
  }
  const auto out = bilstm.run(inputs);
  REQUIRE(out.size() == 5);

  std::vector<double> h(3, 0.0), c(3, 0.0);
  for (std::size_t t = 0; t < 5; ++t) {
    fwd.step(xs[t], h, c);
    for (std::size_t j = 0; j < 3; ++j) CHECK(out[t].at(j) == doctest::Approx(h[j]).epsilon(1e-13));
  }
  std::fill(h.begin(), h.end(), 0.0);
  std::fill(c.begin(), c.end(), 0.0);
  for (std::size_t t = 5; t-- > 0;) {
    bwd.step(xs[t], h, c);
    for (std::size_t j = 0; j < 3; ++j) CHECK(out[t].at(3 + j) == doctest::Approx(h[j]).epsilon(1e-13));
  }
  CHECK(out[0].shape() == Shape{6});
  CHECK(bilstm.named_parameters("enc.").front().first == "enc.forward.w_input");
}

TEST_CASE("bilstm rejects empty and misshapen input") {
  Rng rng(1);
  const BiLstm bilstm(3, 2, InitScheme::xavier, rng);
  CHECK_THROWS_AS(bilstm.run({}), DomainError);
  const std::vector<Tensor> wrong{Tensor::zeros({4})};
  CHECK_THROWS_AS(bilstm.run(wrong), DimensionError);
}

TEST_CASE("xavier init: bounded weights, zero biases, forget bias one") {
  Rng rng(2);
  const LstmCell cell(6, 4, InitScheme::xavier, rng);
  const auto params = cell.named_parameters("");
  const double bound = std::sqrt(6.0 / (16.0 + 10.0));
  for (double w : params[0].second.data()) CHECK(std::abs(w) <= bound);
  const auto bias = params[2].second.to_vector();
  for (std::size_t j = 0; j < 16; ++j) CHECK(bias[j] == (j >= 4 && j < 8 ? 1.0 : 0.0));

  const LstmCell zero(6, 4, InitScheme::zeros, rng);
  for (const auto& [_, t] : zero.named_parameters("")) {
    for (double v : t.data()) CHECK(v == 0.0);
  }
}

TEST_CASE("attention weights form a distribution and pool the states") {
  Rng rng(4);
  const Attention attention(Tensor::parameter({1, 2}, {1.0, -1.0}), Tensor::parameter({1}, {0.5}));
  const std::vector<Tensor> states{Tensor::constant({2}, {1, 0}), Tensor::constant({2}, {0, 1}),
                                   Tensor::constant({2}, {2, 2})};
  const auto out = attention.pool(states);
  // Scores 1.5, -0.5, 0.5 after the bias.
  const double e0 = std::exp(1.5), e1 = std::exp(-0.5), e2 = std::exp(0.5), z = e0 + e1 + e2;
  CHECK(out.weights.at(0) == doctest::Approx(e0 / z));
  CHECK(out.weights.at(1) == doctest::Approx(e1 / z));
  CHECK(out.pooled.at(0) == doctest::Approx((e0 + 2 * e2) / z));
  CHECK(out.pooled.at(1) == doctest::Approx((e1 + 2 * e2) / z));

  const Attention random(5, InitScheme::xavier, rng);
  std::vector<Tensor> many;
  for (int i = 0; i < 7; ++i) many.push_back(Tensor::constant({5}, random_values(5, rng)));
  const auto pooled = random.pool(many);
  double total = 0.0;
  for (double w : pooled.weights.data()) {
    CHECK(w >= 0.0);
    total += w;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(random.pool({}), DomainError);
}

TEST_CASE("feedforward is relu hidden layer then two logits") {
  const FeedForward ff(Tensor::parameter({2, 2}, {1, 0, 0, -1}), Tensor::parameter({2}, {0, 0}),
                       Tensor::parameter({2, 2}, {1, 1, 2, -1}), Tensor::parameter({2}, {0.5, 0}));
  const auto y = ff.forward(Tensor::constant({2}, {3, 4}));
  // hidden = relu([3, -4]) = [3, 0]
  CHECK(y.to_vector() == std::vector<double>{3.5, 6.0});
  CHECK_THROWS_AS(ff.forward(Tensor::constant({3}, {1, 2, 3})), DimensionError);
}

TEST_CASE("embedding layer lookups") {
  const auto table = Tensor::parameter({3, 2}, {0, 0, 1, 2, 3, 4});
  const EmbeddingLayer trainable(table, true);
  auto v = trainable.lookup(2);
  CHECK(v.to_vector() == std::vector<double>{3, 4});
  CHECK(v.requires_grad());
  CHECK_THROWS_AS(trainable.lookup(3), LookupError);

  const EmbeddingLayer frozen(Tensor::constant({3, 2}, {0, 0, 1, 2, 3, 4}), false);
  const auto f = frozen.lookup(1);
  CHECK_FALSE(f.requires_grad());
  f.mutable_data()[0] = 99.0;  // a copy: the table is untouched
  CHECK(frozen.lookup(1).at(0) == 1.0);
}

TEST_CASE("dropout: identity in eval, inverted scaling in train") {
  Rng rng(3);
  const auto x = Tensor::constant({20000}, std::vector<double>(20000, 1.0));
  CHECK(dropout(x, 0.3, Mode::eval, rng).node() == x.node());
  const auto y = dropout(x, 0.3, Mode::train, rng);
  double total = 0.0;
  std::size_t zeros = 0;
  for (double v : y.data()) {
    total += v;
    if (v == 0.0) ++zeros;
    else CHECK(v == doctest::Approx(1.0 / 0.7));
  }
  CHECK(total / 20000.0 == doctest::Approx(1.0).epsilon(0.03));
  CHECK(static_cast<double>(zeros) / 20000.0 == doctest::Approx(0.3).epsilon(0.05));
  CHECK_THROWS_AS(dropout(x, 1.0, Mode::train, rng), ConfigError);
  CHECK_THROWS_AS(dropout(x, -0.1, Mode::train, rng), ConfigError);
}
