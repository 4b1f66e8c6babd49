#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "crossner/error.h"
#include "crossner/evaluation.h"
#include "crossner/train.h"

namespace crossner {
namespace {

struct Scalar {
  ParameterStore<double> store;
  Parameter<double>& w;
  explicit Scalar(double init) : w(store.add("w", Tensor<double>::scalar(init))) { w.grad = Tensor<double>(1, 1); }
};

TEST(Nadam, ZeroGradientOnlyAdvancesStep) {
  Scalar s(0.7);
  Nadam<double> opt(0.001);
  opt.step(s.store);
  opt.step(s.store);
  EXPECT_EQ(s.w.value.item(), 0.7);
  EXPECT_EQ(opt.steps(), 2u);
}

TEST(Nadam, FirstStepOpposesGradient) {
  for (double g : {3.0, -0.2}) {
    Scalar s(0.0);
    s.w.grad[0] = g;
    Nadam<double> opt(0.001);
    opt.step(s.store);
    EXPECT_LT(s.w.value.item() * g, 0.0);
  }
}

TEST(Nadam, FirstStepMatchesHandComputation) {
  Scalar s(1.0);
  s.w.grad[0] = 0.5;
  Nadam<double> opt(0.01);
  opt.step(s.store);
  // m = 0.05, v = 0.00025; m_hat = 0.9*0.05/(1-0.81) + 0.1*0.5/0.1, v_hat = 0.25.
  const double m_hat = 0.9 * 0.05 / (1 - 0.81) + 0.5;
  EXPECT_NEAR(s.w.value.item(), 1.0 - 0.01 * m_hat / (0.5 + 1e-8), 1e-12);
}

// Reference trajectory of w <- w - lr * nadam(2w) from w = 1, computed
// independently in plain double arithmetic.
TEST(Nadam, QuadraticBowlFollowsReferenceTrajectory) {
  Scalar s(1.0);
  Nadam<double> opt(0.001);
  std::size_t first_below = 0;
  for (std::size_t step = 1; step <= 3000; ++step) {
    s.w.grad[0] = 2 * s.w.value.item();
    opt.step(s.store);
    if (step == 1000) EXPECT_NEAR(s.w.value.item(), 0.2575689656406666, 1e-9);
    if (step == 2000) EXPECT_NEAR(s.w.value.item(), 0.02073939220117155, 1e-9);
    if (first_below == 0 && std::abs(s.w.value.item()) < 1e-3) first_below = step;
  }
  EXPECT_EQ(first_below, 2724u);
  EXPECT_NEAR(s.w.value.item(), 0.0002173836261338038, 1e-9);
}

TEST(Nadam, ZeroLearningRateIsIdentity) {
  Scalar s(0.3);
  Nadam<double> opt(0.0);
  for (int i = 0; i < 10; ++i) {
    s.w.grad[0] = 1.0 + i;
    opt.step(s.store);
  }
  EXPECT_EQ(s.w.value.item(), 0.3);
}

TEST(Nadam, GradientShapeMismatchIsContractError) {
  Scalar s(0.0);
  s.w.grad = Tensor<double>(2, 1);
  Nadam<double> opt(0.001);
  EXPECT_THROW(opt.step(s.store), ContractError);
}

TEST(SelectBestEpoch, EarliestMaximum) {
  EXPECT_EQ(select_best_epoch(std::vector<double>{0.2, 0.5, 0.4}), 2u);
  EXPECT_EQ(select_best_epoch(std::vector<double>{0.5, 0.1, 0.5}), 1u);
  EXPECT_EQ(select_best_epoch(std::vector<double>{}), 0u);
}

TEST(TrainConfig, PaperDefaults) {
  TrainConfig paper = TrainConfig::defaults(Preset::Paper);
  EXPECT_EQ(paper.learning_rate, 0.001);
  EXPECT_EQ(paper.batch_size, 32u);
  EXPECT_EQ(paper.dropout, 0.35);
  EXPECT_EQ(paper.max_epochs, 400u);
  EXPECT_EQ(TrainConfig::defaults(Preset::Mini).max_epochs, 300u);
  TrainConfig bad = paper;
  bad.batch_size = 0;
  EXPECT_THROW(bad.validate(), ConfigError);
}

double token_accuracy(NerModel<float>& model, const Corpus& corpus) {
  auto predicted = predict_corpus(model, corpus);
  std::size_t right = 0, total = 0;
  for (std::size_t i = 0; i < corpus.size(); ++i)
    for (std::size_t t = 0; t < predicted[i].size(); ++t, ++total) right += predicted[i][t] == corpus.sentences[i].tags[t];
  return static_cast<double>(right) / static_cast<double>(total);
}

// Ten sentences whose tags follow from the words themselves, so every
// architecture can fit them.
SyntheticData local_corpus() {
  const std::vector<std::vector<std::string>> sentences{
      {"John", "Smith", "visited", "Paris"},  {"we", "saw", "New", "York", "City"},
      {"Mary", "lives", "in", "Rome"},        {"the", "UN", "met", "John", "Smith"},
      {"Paris", "is", "big"},                 {"Mary", "Ann", "Lee", "saw", "the", "UN"},
      {"in", "New", "York", "City", "we", "met"}, {"Rome", "met", "Paris"},
      {"the", "Red", "Cross", "is", "in", "Rome"}, {"Mary", "visited", "the", "Red", "Cross"}};
  const std::map<std::string, std::string> gold{
      {"John", "PER:B"}, {"Smith", "PER:E"}, {"Paris", "LOC:S"}, {"New", "LOC:B"}, {"York", "LOC:I"},
      {"City", "LOC:E"}, {"Mary", "PER:S"}, {"Rome", "LOC:S"}, {"UN", "ORG:S"}, {"Red", "ORG:B"},
      {"Cross", "ORG:E"}};
  std::ostringstream text;
  std::set<std::string> words;
  for (const auto& s : sentences) {
    for (std::size_t t = 0; t < s.size(); ++t) {
      std::string tag = gold.count(s[t]) ? gold.at(s[t]) : "O";
      // "Mary Ann Lee" is one three-token person.
      if (s[t] == "Mary" && t + 1 < s.size() && s[t + 1] == "Ann") tag = "PER:B";
      if (s[t] == "Ann") tag = "PER:I";
      if (s[t] == "Lee") tag = "PER:E";
      text << s[t] << '\t' << tag << '\n';
      words.insert(s[t]);
    }
    text << '\n';
  }
  std::istringstream in(text.str());
  const std::vector<std::string> vocab(words.begin(), words.end());
  return {read_conll(in), std::make_shared<EmbeddingTable>(orthogonal_embeddings(vocab, 3, 24))};
}

class Overfit : public ::testing::TestWithParam<std::pair<Architecture, Head>> {};

TEST_P(Overfit, TenSentencesReachFullTokenAccuracy) {
  SyntheticData data = local_corpus();
  ASSERT_EQ(data.corpus.size(), 10u);
  TrainConfig config = TrainConfig::defaults(Preset::Mini);
  config.architecture = GetParam().first;
  config.head = GetParam().second;
  config.dropout = 0.0;
  auto model = build_model(config, data.corpus, data.embeddings);
  Trainer trainer(*model, config);
  const auto prepared = prepare_corpus(*model, data.corpus);
  std::vector<double> losses;
  double accuracy = 0;
  for (std::size_t epoch = 1; epoch <= 300; ++epoch) {
    losses.push_back(trainer.train_epoch(prepared, epoch).mean_loss);
    if (epoch % 10 == 0 && (accuracy = token_accuracy(*model, data.corpus)) == 1.0) break;
  }
  EXPECT_EQ(accuracy, 1.0);
  // Loss averaged over 10-epoch windows never rises.
  for (std::size_t w = 10; w + 10 <= losses.size(); w += 10) {
    double prev = 0, cur = 0;
    for (std::size_t i = 0; i < 10; ++i) prev += losses[w - 10 + i], cur += losses[w + i];
    EXPECT_LE(cur, prev) << "window ending at epoch " << w + 10;
  }
}

INSTANTIATE_TEST_SUITE_P(Architectures, Overfit,
                         ::testing::Values(std::pair{Architecture::Baseline, Head::Softmax},
                                           std::pair{Architecture::Cross, Head::Softmax},
                                           std::pair{Architecture::Att, Head::Softmax},
                                           std::pair{Architecture::Baseline, Head::Crf}));

TEST(Trainer, NonFiniteLossNamesEpochAndBatch) {
  SyntheticData data = gen_mention_corpus(4, 2);
  TrainConfig config = TrainConfig::defaults(Preset::Mini);
  auto model = build_model(config, data.corpus, data.embeddings);
  model->params().at("classifier.bias").value.fill(std::numeric_limits<float>::quiet_NaN());
  Trainer trainer(*model, config);
  try {
    trainer.train_epoch(prepare_corpus(*model, data.corpus), 3);
    FAIL();
  } catch (const TrainingError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("epoch 3"), std::string::npos) << what;
    EXPECT_NE(what.find("batch 1"), std::string::npos) << what;
  }
}

TEST(Trainer, RestoresBestDevEpoch) {
  SyntheticData train = gen_mention_corpus(12, 7), dev = gen_mention_corpus(6, 8);
  TrainConfig config = TrainConfig::defaults(Preset::Mini);
  config.max_epochs = 15;
  config.batch_size = 5;
  auto model = build_model(config, train.corpus, train.embeddings);
  Trainer trainer(*model, config);
  std::size_t callbacks = 0;
  TrainResult result = trainer.fit(train.corpus, &dev.corpus, [&](const EpochRecord&) { ++callbacks; });
  EXPECT_EQ(callbacks, 15u);
  std::vector<double> f1;
  for (const auto& r : result.history) f1.push_back(r.dev_f1);
  EXPECT_EQ(result.best_epoch, select_best_epoch(f1));
  EXPECT_EQ(evaluate(*model, dev.corpus).f1(), result.best_dev_f1);
  EXPECT_EQ(trainer.optimizer().steps(), 15u * 3);
}

TEST(Trainer, SameSeedSameTrajectory) {
  SyntheticData data = gen_mention_corpus(10, 4);
  TrainConfig config = TrainConfig::defaults(Preset::Mini);
  config.max_epochs = 5;
  auto run = [&] {
    auto model = build_model(config, data.corpus, data.embeddings);
    Trainer trainer(*model, config);
    TrainResult r = trainer.fit(data.corpus, nullptr);
    std::vector<double> losses;
    for (const auto& e : r.history) losses.push_back(e.train_loss);
    std::vector<Tensor<float>> params;
    for (const auto& p : model->params()) params.push_back(p.value);
    return std::pair{losses, params};
  };
  EXPECT_EQ(run(), run());
}

}  // namespace
}  // namespace crossner
