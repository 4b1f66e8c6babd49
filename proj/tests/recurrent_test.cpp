#include <gtest/gtest.h>

#include <cmath>

#include "crossner/error.h"
#include "crossner/gradcheck.h"
#include "crossner/ops.h"
#include "crossner/recurrent.h"
#include "test_util.h"

namespace crossner {
namespace {

using testing::random_tensor;
using D = double;

Tensor<D> reversed_rows(const Tensor<D>& t) {
  Tensor<D> out(t.rows(), t.cols());
  for (std::size_t i = 0; i < t.rows(); ++i)
    for (std::size_t j = 0; j < t.cols(); ++j) out(i, j) = t(t.rows() - 1 - i, j);
  return out;
}

TEST(LstmStep, ZeroParametersGiveZeroState) {
  ParameterStore<D> store;
  Rng rng(1);
  auto cell = LstmCell<D>::create(store, "cell", 3, 4, rng);
  cell.input_weights->value.fill(0);
  cell.recurrent_weights->value.fill(0);
  cell.bias->value.fill(0);
  Graph<D> g;
  auto s = lstm_step(cell, g.constant(random_tensor(1, 3, rng)), g.constant(Tensor<D>(1, 4)),
                     g.constant(Tensor<D>(1, 4)));
  for (D v : s.h.value().values()) EXPECT_EQ(v, 0.0);
  for (D v : s.c.value().values()) EXPECT_EQ(v, 0.0);
}

TEST(LstmStep, SaturatedForgetGateKeepsCell) {
  ParameterStore<D> store;
  Rng rng(2);
  auto cell = LstmCell<D>::create(store, "cell", 3, 4, rng);
  for (std::size_t j = 4; j < 8; ++j) cell.bias->value[j] = 10.0;
  Tensor<D> x = random_tensor(1, 3, rng), h0 = random_tensor(1, 4, rng), c0 = random_tensor(1, 4, rng);
  Graph<D> g;
  auto s = lstm_step(cell, g.constant(x), g.constant(h0), g.constant(c0));
  // With f ~ 1 the new cell is c_prev + i * g; recompute i and g directly.
  Tensor<D> pre(1, 16);
  for (std::size_t j = 0; j < 16; ++j) {
    D v = cell.bias->value[j];
    for (std::size_t k = 0; k < 3; ++k) v += x[k] * cell.input_weights->value(k, j);
    for (std::size_t k = 0; k < 4; ++k) v += h0[k] * cell.recurrent_weights->value(k, j);
    pre[j] = v;
  }
  for (std::size_t j = 0; j < 4; ++j) {
    const D i = 1 / (1 + std::exp(-pre[j])), cand = std::tanh(pre[8 + j]);
    EXPECT_NEAR(s.c.value()[j], c0[j] + i * cand, 1e-4);
  }
}

TEST(LstmStep, DimensionMismatchNamesCell) {
  ParameterStore<D> store;
  Rng rng(3);
  auto cell = LstmCell<D>::create(store, "lstm7", 3, 4, rng);
  Graph<D> g;
  try {
    lstm_step(cell, g.constant(Tensor<D>(1, 5)), g.constant(Tensor<D>(1, 4)), g.constant(Tensor<D>(1, 4)));
    FAIL();
  } catch (const DimensionError& e) {
    EXPECT_NE(std::string(e.what()).find("lstm7"), std::string::npos) << e.what();
  }
}

TEST(LstmStep, InitialisationHasForgetBiasOne) {
  ParameterStore<D> store;
  Rng rng(4);
  auto cell = LstmCell<D>::create(store, "cell", 3, 4, rng);
  for (std::size_t j = 0; j < 16; ++j) EXPECT_EQ(cell.bias->value[j], (j >= 4 && j < 8) ? 1.0 : 0.0);
}

TEST(RunDirection, SingleTokenIsDirectionFree) {
  ParameterStore<D> store;
  Rng rng(5);
  auto cell = LstmCell<D>::create(store, "cell", 3, 4, rng);
  Graph<D> g;
  Var<D> x = g.constant(random_tensor(1, 3, rng));
  const Tensor<D> fwd = run_direction(cell, x, Direction::Forward).value();
  EXPECT_EQ(fwd, run_direction(cell, x, Direction::Backward).value());
}

TEST(RunDirection, BackwardOfReversedIsReversedForward) {
  ParameterStore<D> store;
  Rng rng(6);
  auto cell = LstmCell<D>::create(store, "cell", 3, 4, rng);
  Tensor<D> x = random_tensor(5, 3, rng);
  Graph<D> g;
  const Tensor<D> fwd = run_direction(cell, g.constant(x), Direction::Forward).value();
  const Tensor<D> bwd = run_direction(cell, g.constant(reversed_rows(x)), Direction::Backward).value();
  EXPECT_EQ(bwd, reversed_rows(fwd));
}

TEST(RunDirection, ForwardStateIgnoresLaterTokens) {
  ParameterStore<D> store;
  Rng rng(7);
  auto cell = LstmCell<D>::create(store, "cell", 3, 4, rng);
  Tensor<D> x = random_tensor(3, 3, rng), y = x;
  for (std::size_t j = 0; j < 3; ++j) y(2, j) += 0.5;
  Graph<D> g;
  const Tensor<D> a = run_direction(cell, g.constant(x), Direction::Forward).value();
  const Tensor<D> b = run_direction(cell, g.constant(y), Direction::Forward).value();
  for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(a(0, j), b(0, j));
}

struct EncoderCase {
  ParameterStore<D> store;
  Rng rng{11};
  BiLstmEncoder<D> encoder;
  explicit EncoderCase(Architecture a, std::size_t in = 6, std::size_t h = 5) : encoder(store, a, in, h, rng) {}
};

Tensor<D> perturbed(Tensor<D> x, std::size_t row, Rng& rng) {
  for (std::size_t j = 0; j < x.cols(); ++j) x(row, j) += rng.uniform(-1, 1);
  return x;
}

TEST(BaselineEncode, ShapesAndCausality) {
  EncoderCase c(Architecture::Baseline);
  Rng rng(12);
  const std::size_t n = 5;
  Tensor<D> x = random_tensor(n, 6, rng);
  Graph<D> g;
  auto base = c.encoder.encode(g.constant(x));
  EXPECT_EQ(base.hidden.rows(), n);
  EXPECT_EQ(base.hidden.cols(), 10u);
  for (D v : base.hidden.value().values()) EXPECT_LT(std::abs(v), 1.0);
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t future = t + 1; future < n; ++future) {
      auto other = c.encoder.encode(g.constant(perturbed(x, future, rng)));
      for (std::size_t j = 0; j < 5; ++j) EXPECT_EQ(base.forward.value()(t, j), other.forward.value()(t, j));
    }
    for (std::size_t past = 0; past < t; ++past) {
      auto other = c.encoder.encode(g.constant(perturbed(x, past, rng)));
      for (std::size_t j = 0; j < 5; ++j) EXPECT_EQ(base.backward.value()(t, j), other.backward.value()(t, j));
    }
  }
}

TEST(BaselineEncode, HiddenIsForwardThenBackward) {
  EncoderCase c(Architecture::Baseline);
  Rng rng(13);
  Graph<D> g;
  auto e = c.encoder.encode(g.constant(random_tensor(4, 6, rng)));
  for (std::size_t t = 0; t < 4; ++t) {
    for (std::size_t j = 0; j < 5; ++j) {
      EXPECT_EQ(e.hidden.value()(t, j), e.forward.value()(t, j));
      EXPECT_EQ(e.hidden.value()(t, 5 + j), e.backward.value()(t, j));
    }
  }
}

TEST(CrossEncode, ForwardStateSeesTheFuture) {
  for (int trial = 0; trial < 10; ++trial) {
    ParameterStore<D> store;
    Rng rng(100 + static_cast<std::uint64_t>(trial));
    BiLstmEncoder<D> encoder(store, Architecture::Cross, 6, 5, rng);
    Tensor<D> x = random_tensor(3, 6, rng);
    Graph<D> g;
    auto a = encoder.encode(g.constant(x));
    auto b = encoder.encode(g.constant(perturbed(x, 1, rng)));
    double change = 0;
    for (std::size_t j = 0; j < 5; ++j) change += std::abs(a.forward.value()(0, j) - b.forward.value()(0, j));
    EXPECT_GT(change, 1e-8) << "trial " << trial;
    EXPECT_EQ(a.hidden.cols(), 10u);
  }
}

TEST(CrossEncode, SecondLayerInputIsDoubled) {
  EncoderCase base(Architecture::Baseline, 6, 5), cross(Architecture::Cross, 6, 5);
  for (std::size_t i : {2u, 4u}) {
    EXPECT_EQ(cross.encoder.cell(i).input_weights->value.rows(), 2 * base.encoder.cell(i).input_weights->value.rows());
    EXPECT_EQ(cross.encoder.cell(i).input_weights->value.size(), 2 * base.encoder.cell(i).input_weights->value.size());
  }
  for (std::size_t i : {1u, 3u}) EXPECT_EQ(cross.encoder.cell(i).input_dim, 6u);
}

TEST(CrossEncode, RejectsMisSizedSecondLayer) {
  ParameterStore<D> store;
  Rng rng(14);
  std::array<LstmCell<D>, 4> cells = {
      LstmCell<D>::create(store, "c1", 6, 5, rng), LstmCell<D>::create(store, "c2", 5, 5, rng),
      LstmCell<D>::create(store, "c3", 6, 5, rng), LstmCell<D>::create(store, "c4", 5, 5, rng)};
  Graph<D> g;
  EXPECT_THROW(cross_encode(cells, g.constant(random_tensor(3, 6, rng))), ConfigError);
}

TEST(Encoders, GradientsMatchFiniteDifferences) {
  for (Architecture a : {Architecture::Baseline, Architecture::Cross}) {
    EncoderCase c(a, 4, 3);
    Rng rng(15);
    Tensor<D> w = random_tensor(3, 6, rng);
    auto f = [&](Graph<D>& g, Var<D> x) { return ops::sum(ops::mul(c.encoder.encode(x).hidden, g.constant(w))); };
    auto report = finite_difference_check(f, random_tensor(3, 4, rng), 1e-4);
    EXPECT_TRUE(report.passed) << to_string(a) << ": " << report.max_relative_error;
  }
}

}  // namespace
}  // namespace crossner
