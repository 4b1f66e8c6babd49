// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Positional arguments restrict the run to named criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "crossner/checkpoint.h"
#include "crossner/classifier.h"
#include "crossner/evaluation.h"
#include "crossner/gradcheck.h"
#include "crossner/train.h"
#include "primitive_cases.h"
#include "test_util.h"

namespace crossner {
namespace {

using testing::random_tensor;

struct Outcome {
  bool passed = false;
  std::string detail;
};

class Clock {
 public:
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count(); }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

const std::vector<std::uint64_t> kXorSeeds{1, 2, 3, 4, 5, 6};

std::string correct_list(const XorReport& r) {
  std::string out;
  for (const XorSeedResult& s : r.seeds) out += (out.empty() ? "" : ",") + std::to_string(s.correct);
  return out + " of " + std::to_string(r.seeds.empty() ? 0 : r.seeds.front().total);
}

Outcome xor_impossibility() {
  Clock clock;
  XorReport r = run_xor_experiment(Architecture::Baseline, Head::Softmax, XorVariant::Phrase, kXorSeeds);
  const double secs = clock.seconds();
  const bool ok = r.seeds.size() >= 6 && r.max_correct() <= 3 && secs < 120;
  return {ok, format("baseline+softmax middle tokens correct per seed [%s], %.1fs", correct_list(r).c_str(), secs)};
}

Outcome xor_attainability() {
  Clock clock;
  XorReport cross = run_xor_experiment(Architecture::Cross, Head::Softmax, XorVariant::Phrase, kXorSeeds);
  XorReport att = run_xor_experiment(Architecture::Att, Head::Softmax, XorVariant::Phrase, kXorSeeds);
  const double secs = clock.seconds();
  const bool ok = cross.seeds_with_all_correct() >= 4 && att.seeds_with_all_correct() >= 4 && secs < 300;
  return {ok, format("cross [%s], att [%s], %.1fs", correct_list(cross).c_str(), correct_list(att).c_str(), secs)};
}

Outcome crf_two_fold() {
  Clock clock;
  XorReport bie = run_xor_experiment(Architecture::Baseline, Head::Crf, XorVariant::Bie, kXorSeeds);
  XorReport oso = run_xor_experiment(Architecture::Baseline, Head::Crf, XorVariant::Oso, kXorSeeds);
  const double secs = clock.seconds();
  const bool ok = bie.seeds_with_all_correct() >= 4 && oso.max_correct() <= 3 && secs < 300;
  return {ok, format("baseline+crf phrases correct: bie [%s], oso [%s], %.1fs", correct_list(bie).c_str(),
                     correct_list(oso).c_str(), secs)};
}

Outcome gradient_fidelity() {
  double worst_primitive = 0, worst_model = 0;
  std::size_t failures = 0, checks = 0;
  for (const testing::PrimitiveCase& pc : testing::primitive_cases()) {
    Rng rng(std::hash<std::string>{}(pc.name));
    for (std::uint64_t instance = 0; instance < 20; ++instance, ++checks) {
      Rng body_rng = rng.split(instance);
      auto f = [&](Graph<double>& g, Var<double> x) {
        Rng local = body_rng;
        return pc.body(g, x, local);
      };
      GradCheckReport r = finite_difference_check(f, random_tensor(pc.rows, pc.cols, rng), 1e-4);
      worst_primitive = std::max(worst_primitive, r.max_relative_error);
      failures += !r.passed;
    }
  }
  for (Architecture a : {Architecture::Baseline, Architecture::Cross, Architecture::Att}) {
    for (Head h : {Head::Softmax, Head::Crf}) {
      for (std::uint64_t seed = 1; seed <= 20; ++seed, ++checks) {
        GradCheckReport r = check_model_gradients(a, h, seed, 1e-3);
        worst_model = std::max(worst_model, r.max_relative_error);
        failures += !r.passed;
      }
    }
  }
  return {failures == 0, format("%zu checks (%zu primitives, 6 models, 20 instances each), %zu failed; "
                                "worst relative error %.2e primitive, %.2e model",
                                checks, testing::primitive_cases().size(), failures, worst_primitive, worst_model)};
}

Outcome crf_oracle() {
  Rng rng(5150);
  std::size_t partition_ok = 0, viterbi_ok = 0;
  double worst = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng.below(5), k = 1 + rng.below(5);
    Tensor<double> s = random_tensor(n, k, rng, -2, 2), tr = random_tensor(k + 2, k + 2, rng, -2, 2);
    Graph<double> g;
    const double logz = ops::crf_log_partition(g.constant(s), g.constant(tr)).value().item();
    const double err = std::abs(logz - testing::brute_log_partition(s, tr));
    worst = std::max(worst, err);
    partition_ok += err <= 1e-6;
    viterbi_ok += crf_viterbi(s, tr).tags == testing::brute_viterbi(s, tr);
  }
  return {partition_ok == 50 && viterbi_ok == 50,
          format("log partition %zu/50 (max error %.1e), viterbi %zu/50 exact", partition_ok, worst, viterbi_ok)};
}

Outcome codec_round_trip() {
  Rng rng(2024);
  std::size_t round_trips = 0, legal = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng.below(12);
    const auto mentions = testing::random_mentions(n, 3, rng);
    round_trips += decode_tags(encode_mentions(n, mentions)) == mentions;
  }
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng.below(12);
    const auto mentions = decode_tags(testing::random_chunk_tags(n, 3, rng));
    const auto again = encode_mentions(n, mentions);
    legal += validate_tags(again).empty() && decode_tags(again) == mentions;
  }
  return {round_trips == 1000 && legal == 1000,
          format("round trip %zu/1000, arbitrary sequences decode and re-encode legally %zu/1000", round_trips, legal)};
}

Outcome scorer_correctness() {
  TagScheme scheme({"PER", "ORG"});
  const MentionLists gold{{{0, 1, 0}}}, pred{{{0, 1, 0}, {3, 3, 1}}};
  const EvalReport hand = strict_f1(gold, pred, &scheme);
  const bool hand_ok = hand.precision() == 0.5 && hand.recall() == 1.0 && std::abs(hand.f1() - 2.0 / 3.0) < 1e-12;
  Rng rng(77);
  std::size_t agree = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.below(4);
    MentionLists g = testing::random_mention_lists(rng, n), p = testing::random_mention_lists(rng, n);
    for (std::size_t i = 0; i < n; ++i)
      for (const Mention& m : g[i])
        if (rng.bernoulli(0.5)) p[i].push_back(m);
    const testing::MatchCounts want = testing::brute_match(g, p);
    const Counts got = strict_f1(g, p).overall;
    agree += got == Counts{want.true_positives, want.predicted, want.gold};
  }
  return {hand_ok && agree == 200, format("hand example P=%.3f R=%.3f F1=%.4f, oracle agreement %zu/200",
                                          hand.precision(), hand.recall(), hand.f1(), agree)};
}

Outcome attention_invariants() {
  double worst = 0;
  std::size_t passes = 0, identical = 0, sentences = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    SyntheticData data = gen_mention_corpus(10, seed);
    TrainConfig config = TrainConfig::defaults(Preset::Mini);
    config.architecture = Architecture::Att;
    config.seed = seed;
    auto model = build_model(config, data.corpus, data.embeddings);
    for (const Sentence& s : data.corpus.sentences) {
      const SentenceFeatures f = model->prepare(s.tokens);
      Graph<float> g;
      ForwardResult<float> plain = model->forward(g, f);
      for (const Var<float>& alpha : plain.attention.alphas) {
        for (std::size_t i = 0; i < alpha.rows(); ++i) {
          double total = 0;
          for (float v : alpha.value().row_span(i)) total += v;
          worst = std::max(worst, std::abs(total - 1.0));
        }
      }
      ++passes;
      ForwardOptions keep_all;
      keep_all.keep = AblationSpec::parse("HC_all");
      const Tensor<float> plain_scores = plain.scores.value();
      const Tensor<float> kept = model->forward(g, f, keep_all).scores.value();
      identical += kept == plain_scores && model->predict(f, keep_all.keep) == model->predict(f);
      ++sentences;
    }
  }
  return {worst <= 1e-6 && passes == 100 && identical == sentences,
          format("%zu forward passes, max |row sum - 1| %.1e, HC_all identical on %zu/%zu", passes, worst, identical,
                 sentences)};
}

// Trains att at full dimensions on the synthetic mention corpus without
// dropout until the training chunk accuracy saturates.
Outcome ablation_direction() {
  Clock clock;
  const std::vector<std::uint64_t> seeds{1, 2, 3};
  std::size_t agree = 0;
  std::string per_seed;
  for (std::uint64_t seed : seeds) {
    SyntheticData data = gen_mention_corpus(60, seed);
    std::set<std::size_t> lengths;
    for (const Sentence& s : data.corpus.sentences)
      for (const Mention& m : s.mentions()) lengths.insert(m.length());
    TrainConfig config = TrainConfig::defaults(Preset::Paper);
    config.architecture = Architecture::Att;
    config.dropout = 0.0;
    config.seed = seed;
    auto model = build_model(config, data.corpus, data.embeddings);
    Trainer trainer(*model, config);
    const auto prepared = prepare_corpus(*model, data.corpus);
    std::vector<std::vector<ChunkTag>> gold;
    for (const Sentence& s : data.corpus.sentences) gold.push_back(s.tags);
    double accuracy = 0;
    std::size_t epoch = 1;
    for (; epoch <= 200; ++epoch) {
      trainer.train_epoch(prepared, epoch);
      if (epoch % 25 == 0 && (accuracy = chunk_accuracy(gold, predict_corpus(*model, data.corpus))) >= 0.999) break;
    }
    accuracy = chunk_accuracy(gold, predict_corpus(*model, data.corpus));
    const AblationTable table = ablation_table(*model, data.corpus);
    // Columns: HC_all, H, C_all, C_1 ...
    const double drop_h = -table.cell(Chunk::I, 1), drop_c = -table.cell(Chunk::I, 2);
    const bool ok = accuracy >= 0.95 && drop_h > drop_c && lengths == std::set<std::size_t>{1, 2, 3, 4};
    agree += ok;
    per_seed += format("%sseed %llu: acc %.3f, I drop H %.1f vs C_all %.1f", per_seed.empty() ? "" : "; ",
                       static_cast<unsigned long long>(seed), accuracy, 100 * drop_h + 0.0, 100 * drop_c + 0.0);
  }
  return {agree == seeds.size(), format("%s (%.0fs)", per_seed.c_str(), clock.seconds())};
}

Outcome structural_counts() {
  Rng rng(1);
  bool ok = true;
  std::string detail;
  for (std::size_t hidden : {16u, 100u}) {
    ParameterStore<float> base_store, cross_store;
    BiLstmEncoder<float> base(base_store, Architecture::Baseline, 30, hidden, rng);
    BiLstmEncoder<float> cross(cross_store, Architecture::Cross, 30, hidden, rng);
    for (std::size_t cell : {2u, 4u}) {
      const std::size_t b = base.cell(cell).input_weights->value.rows(), c = cross.cell(cell).input_weights->value.rows();
      ok &= c == 2 * b;
      if (hidden == 100) detail += format("layer-2 input rows %zu vs %zu; ", c, b);
    }
  }
  for (Preset p : {Preset::Mini, Preset::Paper}) {
    const ModelConfig att = ModelConfig::for_preset(p, Architecture::Att, Head::Softmax, 300);
    ok &= att.classifier_input_dim() == 2 * att.hidden_dim() && att.heads * att.head_dim == att.hidden_dim();
    SyntheticData data = gen_xor_phrase_corpus();
    ModelConfig small = ModelConfig::for_preset(p, Architecture::Att, Head::Softmax, data.embeddings->dim());
    NerModel<float> model(small, build_vocab(data.corpus), data.embeddings, 1);
    Graph<float> g;
    const std::size_t width = model.forward(g, model.prepare(data.corpus.sentences[0].tokens)).classifier_input.cols();
    ok &= width == 2 * small.hidden_dim();
    if (p == Preset::Paper) detail += format("att classifier input %zu = 2 x %zu; ", width, small.hidden_dim());
  }
  for (std::size_t types : {1u, 6u, 18u}) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < types; ++i) names.push_back("T" + std::to_string(i));
    const std::size_t tags = TagScheme(names).num_tags();
    ok &= tags == types * 4 + 1;
    detail += format("d_p(%zu)=%zu ", types, tags);
  }
  return {ok, detail};
}

Outcome reproducibility() {
  SyntheticData train = gen_mention_corpus(30, 11), dev = gen_mention_corpus(10, 12);
  TrainConfig config = TrainConfig::defaults(Preset::Mini);
  config.architecture = Architecture::Att;
  config.head = Head::Crf;
  config.max_epochs = 4;
  config.batch_size = 8;
  config.seed = 5;
  auto run = [&] {
    auto model = build_model(config, train.corpus, train.embeddings);
    Trainer(*model, config).fit(train.corpus, &dev.corpus);
    std::ostringstream checkpoint, report;
    save_checkpoint(checkpoint, *model);
    write_report_kv(report, evaluate(*model, dev.corpus));
    return std::pair{checkpoint.str(), report.str()};
  };
  const auto first = run(), second = run();
  const bool ok = first.first == second.first && first.second == second.second;
  return {ok, format("checkpoints %zu bytes %s, reports %s", first.first.size(),
                     first.first == second.first ? "identical" : "differ",
                     first.second == second.second ? "identical" : "differ")};
}

}  // namespace
}  // namespace crossner

int main(int argc, char** argv) {
  using namespace crossner;
  CLI::App app{"Acceptance criteria A1-A11"};
  std::vector<std::string> only;
  app.add_option("criteria", only, "Criteria to run, e.g. A1 A5 (default: all)");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"A1", xor_impossibility},     {"A2", xor_attainability}, {"A3", crf_two_fold},
      {"A4", gradient_fidelity},     {"A5", crf_oracle},        {"A6", codec_round_trip},
      {"A7", scorer_correctness},    {"A8", attention_invariants}, {"A9", ablation_direction},
      {"A10", structural_counts},    {"A11", reproducibility}};
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), name) == only.end()) continue;
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    std::printf("%-3s %s %s\n", name.c_str(), o.passed ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    failed += !o.passed;
  }
  return failed == 0 ? 0 : 1;
}
