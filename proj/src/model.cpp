#include "crossner/model.h"

#include <charconv>

#include "crossner/error.h"
#include "crossner/ops.h"

namespace crossner {

AblationSpec AblationSpec::parse(std::string_view text) {
  if (text == "HC_all") return all();
  if (text == "H") return hidden();
  if (text == "C_all") return contexts();
  if (text.size() > 2 && text.substr(0, 2) == "C_") {
    std::size_t index = 0;
    auto [ptr, ec] = std::from_chars(text.data() + 2, text.data() + text.size(), index);
    if (ec == std::errc() && ptr == text.data() + text.size() && index >= 1) return single_head(index - 1);
  }
  throw ConfigError("unknown ablation '" + std::string(text) + "' (HC_all, H, C_all or C_<k>)");
}

std::string AblationSpec::to_string() const {
  switch (kind) {
    case Kind::All: return "HC_all";
    case Kind::Hidden: return "H";
    case Kind::Contexts: return "C_all";
    case Kind::Head: return "C_" + std::to_string(head + 1);
  }
  return "?";
}

template <typename T>
NerModel<T>::NerModel(ModelConfig config, Vocab vocab, std::shared_ptr<const EmbeddingTable> embeddings,
                      std::uint64_t seed)
    : config_(config), vocab_(std::move(vocab)), embeddings_(std::move(embeddings)) {
  config_.validate();
  if (!embeddings_) throw ConfigError("model needs a word embedding table");
  if (embeddings_->dim() != config_.word_dim) {
    throw ConfigError("embedding table has " + std::to_string(embeddings_->dim()) +
                      " dims, config expects " + std::to_string(config_.word_dim));
  }
  Rng rng(seed);
  features_ = std::make_unique<FeatureEncoder<T>>(params_, config_, vocab_.char_table_size(), rng);
  encoder_ = std::make_unique<BiLstmEncoder<T>>(params_, config_.architecture, config_.feature_dim(),
                                                config_.lstm_dim, rng);
  if (config_.architecture == Architecture::Att) {
    attention_ = std::make_unique<MultiHeadAttention<T>>(params_, config_.hidden_dim(), config_.heads,
                                                         config_.head_dim, rng);
  }
  classifier_ = AffineClassifier<T>::create(params_, config_.classifier_input_dim(), scheme().num_tags(), rng);
  if (config_.head == Head::Crf) crf_ = CrfLayer<T>::create(params_, scheme().num_tags());
}

template <typename T>
SentenceFeatures NerModel<T>::prepare(std::span<const std::string> tokens) const {
  return prepare_sentence(tokens, vocab_, *embeddings_, config_.max_word_length);
}

template <typename T>
ForwardResult<T> NerModel<T>::forward(Graph<T>& g, const SentenceFeatures& sentence,
                                      const ForwardOptions& options) {
  const bool att = config_.architecture == Architecture::Att;
  if (!att && options.keep.kind != AblationSpec::Kind::All) {
    throw ConfigError("ablation " + options.keep.to_string() + " needs the att architecture");
  }
  if (options.keep.kind == AblationSpec::Kind::Head && options.keep.head >= config_.heads) {
    throw ConfigError("ablation " + options.keep.to_string() + " but the model has " +
                      std::to_string(config_.heads) + " heads");
  }
  ForwardResult<T> r;
  r.features = features_->assemble(g, sentence);
  Var<T> x = ops::variational_dropout(r.features, options.dropout, Rng::mix(options.dropout_seed ^ 0x11),
                                      options.training);
  r.encoded = encoder_->encode(x);
  Var<T> hidden = ops::variational_dropout(r.encoded.hidden, options.dropout,
                                           Rng::mix(options.dropout_seed ^ 0x22), options.training);
  if (!att) {
    r.classifier_input = hidden;
  } else {
    r.attention = attention_->forward(hidden);
    using Kind = AblationSpec::Kind;
    auto zeros_like = [&g](Var<T> v) { return g.constant(Tensor<T>(v.rows(), v.cols())); };
    const Kind kind = options.keep.kind;
    Var<T> kept_hidden = (kind == Kind::All || kind == Kind::Hidden) ? hidden : zeros_like(hidden);
    std::vector<Var<T>> contexts;
    for (std::size_t i = 0; i < r.attention.contexts.size(); ++i) {
      const bool keep = kind == Kind::All || kind == Kind::Contexts || (kind == Kind::Head && options.keep.head == i);
      contexts.push_back(keep ? r.attention.contexts[i] : zeros_like(r.attention.contexts[i]));
    }
    r.classifier_input = att_classifier_input<T>(kept_hidden, contexts);
  }
  r.scores = classifier_.token_scores(r.classifier_input);
  return r;
}

template <typename T>
Var<T> NerModel<T>::loss(const ForwardResult<T>& result, std::span<const int> gold) {
  if (crf_) {
    return crf_nll(result.scores, result.scores.graph->param(*crf_->transitions), gold);
  }
  return softmax_nll(result.scores, gold);
}

template <typename T>
std::vector<int> NerModel<T>::decode(const ForwardResult<T>& result) const {
  if (crf_) return crf_viterbi(result.scores.value(), crf_->transitions->value).tags;
  return argmax_rows(result.scores.value());
}

template <typename T>
std::vector<int> NerModel<T>::predict(const SentenceFeatures& sentence, const AblationSpec& keep) {
  Graph<T> g;
  ForwardOptions options;
  options.keep = keep;
  return decode(forward(g, sentence, options));
}

template class NerModel<float>;
template class NerModel<double>;

}  // namespace crossner
