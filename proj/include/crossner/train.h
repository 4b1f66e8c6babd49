#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "crossner/config.h"
#include "crossner/gradcheck.h"
#include "crossner/corpus.h"
#include "crossner/model.h"
#include "crossner/synthetic.h"

namespace crossner {

struct TrainConfig {
  Architecture architecture = Architecture::Baseline;
  Head head = Head::Softmax;
  Preset preset = Preset::Paper;
  double learning_rate = 0.001;
  std::size_t batch_size = 32;
  double dropout = 0.35;
  std::size_t max_epochs = 400;
  std::uint64_t seed = 1;

  // 400 epochs for the paper preset, 300 for mini.
  static TrainConfig defaults(Preset preset);
  ModelConfig model_config(std::size_t word_dim) const;
  void validate() const;
};

struct NadamOptions {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Adam with Nesterov momentum. Moments are kept per parameter in store order.
template <typename T>
class Nadam {
 public:
  explicit Nadam(double learning_rate, NadamOptions options = {});

  // Applies one update from the accumulated gradients of every trainable
  // parameter; a gradient whose shape differs from its parameter is a
  // ContractError.
  void step(ParameterStore<T>& store);

  std::size_t steps() const { return steps_; }
  double learning_rate() const { return learning_rate_; }

 private:
  double learning_rate_;
  NadamOptions options_;
  std::size_t steps_ = 0;
  std::vector<Tensor<T>> first_;
  std::vector<Tensor<T>> second_;
};

extern template class Nadam<float>;
extern template class Nadam<double>;

// A sentence featurized once, with gold tag ids under the model scheme.
struct PreparedSentence {
  SentenceFeatures features;
  std::vector<int> gold;
};

std::vector<PreparedSentence> prepare_corpus(const NerModel<float>& model, const Corpus& corpus);

struct EpochStats {
  double mean_loss = 0.0;
  // Decoded training predictions in corpus order, if requested. With dropout
  // off these are exactly what inference before the epoch's updates yields.
  std::vector<std::vector<int>> decoded;
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double dev_f1 = 0.0;
};

struct TrainResult {
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;  // 1-based; 0 when no epoch ran
  double best_dev_f1 = 0.0;
};

// 1-based index of the highest dev score, earliest on ties.
std::size_t select_best_epoch(std::span<const double> dev_f1);

// Seeded shuffling, batches of batch_size (the last one may be short), one
// graph per sentence with gradients summed into the batch, one Nadam step per
// batch. The softmax batch loss averages over the batch's tokens, the CRF
// batch loss over its sentences.
class Trainer {
 public:
  Trainer(NerModel<float>& model, TrainConfig config);

  // Throws TrainingError naming the epoch and batch on a non-finite loss.
  EpochStats train_epoch(std::span<const PreparedSentence> data, std::size_t epoch, bool collect_predictions = false);

  // Trains for max_epochs, scoring dev after every epoch and restoring the
  // best epoch's weights. Without dev data the last epoch is kept.
  TrainResult fit(const Corpus& train, const Corpus* dev,
                  const std::function<void(const EpochRecord&)>& on_epoch = {});

  const Nadam<float>& optimizer() const { return optimizer_; }

 private:
  NerModel<float>& model_;
  TrainConfig config_;
  Nadam<float> optimizer_;
};

// Vocabulary from the training corpus, model built from the config.
std::unique_ptr<NerModel<float>> build_model(const TrainConfig& config, const Corpus& train,
                                             std::shared_ptr<const EmbeddingTable> embeddings);

struct XorOptions {
  std::size_t max_epochs = 3000;
  double loss_target = 1e-4;
  // Stop once the scored predictions have not changed for stable_epochs and
  // the loss fell by less than plateau_tolerance (relative) over that window.
  std::size_t stable_epochs = 200;
  double plateau_tolerance = 0.01;
  double learning_rate = 0.001;
};

struct XorSeedResult {
  std::uint64_t seed = 0;
  std::size_t correct = 0;  // middle tokens (phrase) or whole phrases (oso, bie)
  std::size_t total = 0;
  std::size_t epochs = 0;
  double final_loss = 0.0;
};

struct XorReport {
  XorVariant variant = XorVariant::Phrase;
  Architecture architecture = Architecture::Baseline;
  Head head = Head::Softmax;
  std::vector<XorSeedResult> seeds;

  std::size_t seeds_with_all_correct() const;
  std::size_t max_correct() const;
};

// Trains on the XOR corpus and scores on the same corpus, dropout off, mini
// preset, until the loss target, a plateau, or max_epochs.
XorSeedResult run_xor_seed(Architecture architecture, Head head, XorVariant variant, std::uint64_t seed,
                           const XorOptions& options = {});
XorReport run_xor_experiment(Architecture architecture, Head head, XorVariant variant,
                             std::span<const std::uint64_t> seeds, const XorOptions& options = {});

// Finite-difference check of every parameter of a double-precision mini
// model on one XOR phrase (chosen by `seed`), dropout off. `entries` bounds
// the probes per parameter tensor (0 probes all).
GradCheckReport check_model_gradients(Architecture architecture, Head head, std::uint64_t seed, double tol,
                                      std::size_t entries = 24);

}  // namespace crossner
