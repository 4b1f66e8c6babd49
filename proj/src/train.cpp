#include "crossner/train.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include "crossner/error.h"
#include "crossner/evaluation.h"
#include "crossner/ops.h"

namespace crossner {

TrainConfig TrainConfig::defaults(Preset preset) {
  TrainConfig c;
  c.preset = preset;
  c.max_epochs = preset == Preset::Paper ? 400 : 300;
  return c;
}

ModelConfig TrainConfig::model_config(std::size_t word_dim) const {
  return ModelConfig::for_preset(preset, architecture, head, word_dim);
}

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) throw ConfigError("learning_rate must be >= 0");
  if (batch_size == 0) throw ConfigError("batch_size must be positive");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("dropout must be in [0, 1)");
}

template <typename T>
Nadam<T>::Nadam(double learning_rate, NadamOptions options) : learning_rate_(learning_rate), options_(options) {}

template <typename T>
void Nadam<T>::step(ParameterStore<T>& store) {
  if (first_.empty()) {
    for (const Parameter<T>& p : store) {
      first_.emplace_back(p.value.rows(), p.value.cols());
      second_.emplace_back(p.value.rows(), p.value.cols());
    }
  }
  if (first_.size() != store.size()) throw ContractError("optimizer state was built for a different store");
  ++steps_;
  const double b1 = options_.beta1, b2 = options_.beta2;
  const double t = static_cast<double>(steps_);
  const double m_corr_next = 1.0 - std::pow(b1, t + 1.0);
  const double m_corr = 1.0 - std::pow(b1, t);
  const double v_corr = 1.0 - std::pow(b2, t);
  std::size_t index = 0;
  for (Parameter<T>& p : store) {
    Tensor<T>& m = first_[index];
    Tensor<T>& v = second_[index];
    ++index;
    if (!p.trainable) continue;
    if (!p.grad.same_shape(p.value)) {
      throw ContractError("gradient " + p.grad.shape_string() + " does not match parameter " + p.name + " " +
                          p.value.shape_string());
    }
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const double g = p.grad[i];
      const double mi = b1 * m[i] + (1.0 - b1) * g;
      const double vi = b2 * v[i] + (1.0 - b2) * g * g;
      m[i] = static_cast<T>(mi);
      v[i] = static_cast<T>(vi);
      const double m_hat = b1 * mi / m_corr_next + (1.0 - b1) * g / m_corr;
      const double v_hat = vi / v_corr;
      p.value[i] = static_cast<T>(p.value[i] - learning_rate_ * m_hat / (std::sqrt(v_hat) + options_.epsilon));
    }
  }
}

template class Nadam<float>;
template class Nadam<double>;

std::vector<PreparedSentence> prepare_corpus(const NerModel<float>& model, const Corpus& corpus) {
  std::vector<PreparedSentence> out;
  out.reserve(corpus.size());
  for (const Sentence& s : corpus.sentences) out.push_back({model.prepare(s.tokens), model.scheme().ids(s.tags)});
  return out;
}

std::size_t select_best_epoch(std::span<const double> dev_f1) {
  if (dev_f1.empty()) return 0;
  return static_cast<std::size_t>(std::max_element(dev_f1.begin(), dev_f1.end()) - dev_f1.begin()) + 1;
}

Trainer::Trainer(NerModel<float>& model, TrainConfig config)
    : model_(model), config_(config), optimizer_(config.learning_rate) {
  config_.validate();
}

EpochStats Trainer::train_epoch(std::span<const PreparedSentence> data, std::size_t epoch, bool collect_predictions) {
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  Rng(config_.seed).split(epoch).shuffle(order);

  EpochStats stats;
  if (collect_predictions) stats.decoded.resize(data.size());
  const bool crf = model_.config().head == Head::Crf;
  const bool dropout = config_.dropout > 0.0;
  double loss_total = 0.0;
  std::size_t batch = 0;
  for (std::size_t begin = 0; begin < order.size(); begin += config_.batch_size, ++batch) {
    const std::size_t end = std::min(order.size(), begin + config_.batch_size);
    std::size_t batch_tokens = 0;
    for (std::size_t k = begin; k < end; ++k) batch_tokens += data[order[k]].gold.size();

    model_.params().zero_grad();
    for (std::size_t k = begin; k < end; ++k) {
      const PreparedSentence& s = data[order[k]];
      Graph<float> g;
      ForwardOptions opts;
      opts.training = dropout;
      opts.dropout = config_.dropout;
      opts.dropout_seed = Rng::mix(config_.seed ^ Rng::mix((epoch << 32) ^ order[k]));
      const std::string where = "at epoch " + std::to_string(epoch) + " batch " + std::to_string(batch + 1);
      std::optional<ForwardResult<float>> forward;
      Var<float> loss;
      try {
        forward = model_.forward(g, s.features, opts);
        loss = model_.loss(*forward, s.gold);
      } catch (const DataError& e) {
        // Inputs were validated by prepare_corpus, so a non-finite activation
        // means the parameters diverged.
        throw TrainingError(std::string(e.what()) + " " + where);
      }
      const ForwardResult<float>& r = *forward;
      const double value = loss.value().item();
      if (!std::isfinite(value)) throw TrainingError("non-finite loss " + where);
      loss_total += value;
      const double weight = crf ? 1.0 / static_cast<double>(end - begin)
                                : static_cast<double>(s.gold.size()) / static_cast<double>(batch_tokens);
      g.backward(ops::scale(loss, static_cast<float>(weight)));
      if (collect_predictions) stats.decoded[order[k]] = model_.decode(r);
    }
    optimizer_.step(model_.params());
  }
  stats.mean_loss = data.empty() ? 0.0 : loss_total / static_cast<double>(data.size());
  return stats;
}

TrainResult Trainer::fit(const Corpus& train, const Corpus* dev,
                         const std::function<void(const EpochRecord&)>& on_epoch) {
  if (train.empty()) throw DataError("training corpus is empty");
  const std::vector<PreparedSentence> data = prepare_corpus(model_, train);
  std::optional<Corpus> dev_data;
  if (dev && !dev->empty()) dev_data = rebase(*dev, model_.scheme());

  TrainResult result;
  std::vector<Tensor<float>> best;
  for (std::size_t epoch = 1; epoch <= config_.max_epochs; ++epoch) {
    EpochRecord record;
    record.epoch = epoch;
    record.train_loss = train_epoch(data, epoch).mean_loss;
    if (dev_data) record.dev_f1 = evaluate(model_, *dev_data).f1();
    result.history.push_back(record);
    if (on_epoch) on_epoch(record);
    if (result.best_epoch == 0 || record.dev_f1 > result.best_dev_f1) {
      result.best_epoch = epoch;
      result.best_dev_f1 = record.dev_f1;
      best.clear();
      for (const Parameter<float>& p : model_.params()) best.push_back(p.value);
    }
  }
  if (!dev_data && !result.history.empty()) {
    result.best_epoch = result.history.size();
    return result;
  }
  std::size_t i = 0;
  for (Parameter<float>& p : model_.params()) p.value = best[i++];
  return result;
}

std::unique_ptr<NerModel<float>> build_model(const TrainConfig& config, const Corpus& train,
                                             std::shared_ptr<const EmbeddingTable> embeddings) {
  if (!embeddings) throw ConfigError("training needs word embeddings");
  const ModelConfig model_config = config.model_config(embeddings->dim());
  return std::make_unique<NerModel<float>>(model_config, build_vocab(train), std::move(embeddings), config.seed);
}

std::size_t XorReport::seeds_with_all_correct() const {
  return static_cast<std::size_t>(
      std::count_if(seeds.begin(), seeds.end(), [](const XorSeedResult& r) { return r.correct == r.total; }));
}

std::size_t XorReport::max_correct() const {
  std::size_t best = 0;
  for (const auto& r : seeds) best = std::max(best, r.correct);
  return best;
}

namespace {

// Middle-token hits for the phrase corpus, whole-phrase hits otherwise.
std::size_t xor_correct(XorVariant variant, std::span<const PreparedSentence> data,
                        const std::vector<std::vector<int>>& decoded) {
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (variant == XorVariant::Phrase ? decoded[i][1] == data[i].gold[1] : decoded[i] == data[i].gold) ++correct;
  }
  return correct;
}

std::vector<std::vector<int>> scored_items(XorVariant variant, const std::vector<std::vector<int>>& decoded) {
  if (variant != XorVariant::Phrase) return decoded;
  std::vector<std::vector<int>> middle;
  for (const auto& d : decoded) middle.push_back({d[1]});
  return middle;
}

}  // namespace

XorSeedResult run_xor_seed(Architecture architecture, Head head, XorVariant variant, std::uint64_t seed,
                           const XorOptions& options) {
  SyntheticData data = gen_xor_corpus(variant, seed);
  TrainConfig config = TrainConfig::defaults(Preset::Mini);
  config.architecture = architecture;
  config.head = head;
  config.dropout = 0.0;
  config.seed = seed;
  config.learning_rate = options.learning_rate;
  auto model = build_model(config, data.corpus, data.embeddings);
  Trainer trainer(*model, config);
  const std::vector<PreparedSentence> prepared = prepare_corpus(*model, data.corpus);

  XorSeedResult result;
  result.seed = seed;
  result.total = prepared.size();
  std::vector<std::vector<int>> last;
  std::vector<double> losses;
  std::size_t stable = 0;
  for (std::size_t epoch = 1; epoch <= options.max_epochs; ++epoch) {
    EpochStats stats = trainer.train_epoch(prepared, epoch, true);
    result.epochs = epoch;
    result.final_loss = stats.mean_loss;
    losses.push_back(stats.mean_loss);
    auto items = scored_items(variant, stats.decoded);
    stable = items == last ? stable + 1 : 0;
    last = std::move(items);
    if (stats.mean_loss < options.loss_target) break;
    if (stable >= options.stable_epochs) {
      const double before = losses[losses.size() - 1 - options.stable_epochs];
      if (before - stats.mean_loss < options.plateau_tolerance * before) break;
    }
  }
  std::vector<std::vector<int>> decoded;
  for (const PreparedSentence& s : prepared) decoded.push_back(model->predict(s.features));
  result.correct = xor_correct(variant, prepared, decoded);
  return result;
}

XorReport run_xor_experiment(Architecture architecture, Head head, XorVariant variant,
                             std::span<const std::uint64_t> seeds, const XorOptions& options) {
  XorReport report{variant, architecture, head, {}};
  for (std::uint64_t seed : seeds) report.seeds.push_back(run_xor_seed(architecture, head, variant, seed, options));
  return report;
}

GradCheckReport check_model_gradients(Architecture architecture, Head head, std::uint64_t seed, double tol,
                                      std::size_t entries) {
  SyntheticData data = gen_xor_phrase_corpus(seed);
  NerModel<double> model(ModelConfig::mini(architecture, head, data.embeddings->dim()), build_vocab(data.corpus),
                         data.embeddings, seed);
  const Sentence& s = data.corpus.sentences[seed % data.corpus.size()];
  const SentenceFeatures features = model.prepare(s.tokens);
  const std::vector<int> gold = model.scheme().ids(s.tags);
  return check_parameter_gradients(
      model.params(), [&](Graph<double>& g) { return model.loss(model.forward(g, features), gold); }, tol, entries,
      seed);
}

}  // namespace crossner

