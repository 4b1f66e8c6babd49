// Command-line front end: train, eval, ablate, xor, heatmap, gradcheck.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include "crossner/checkpoint.h"
#include "crossner/error.h"
#include "crossner/evaluation.h"
#include "crossner/gradcheck.h"
#include "crossner/ops.h"
#include "crossner/synthetic.h"
#include "crossner/train.h"

namespace fs = std::filesystem;
using namespace crossner;

namespace {

struct SharedOptions {
  std::string arch = "baseline";
  std::string head = "softmax";
  std::string preset = "paper";
  std::uint64_t seed = 1;
  std::string train, dev, test;
  std::string embeddings;
  std::size_t embedding_dim = 0;
  std::string out = ".";
  double learning_rate = 0.001;
  double dropout = 0.35;
  std::size_t batch_size = 32;
  std::size_t epochs = 0;  // 0: preset default
};

TrainConfig train_config(const SharedOptions& o) {
  TrainConfig c = TrainConfig::defaults(parse_preset(o.preset));
  c.architecture = parse_architecture(o.arch);
  c.head = parse_head(o.head);
  c.seed = o.seed;
  c.learning_rate = o.learning_rate;
  c.dropout = o.dropout;
  c.batch_size = o.batch_size;
  if (o.epochs > 0) c.max_epochs = o.epochs;
  c.validate();
  return c;
}

std::shared_ptr<const EmbeddingTable> embeddings(const SharedOptions& o) {
  if (o.embeddings.empty() || o.embedding_dim == 0) {
    throw ConfigError("--embeddings PATH and --embedding-dim D are required");
  }
  return std::make_shared<const EmbeddingTable>(load_embeddings(o.embeddings, o.embedding_dim));
}

Corpus required_corpus(const std::string& path, const char* flag) {
  if (path.empty()) throw ConfigError(std::string(flag) + " PATH is required");
  return read_conll(path);
}

fs::path out_dir(const SharedOptions& o) {
  fs::create_directories(o.out);
  return o.out;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  f << text;
  if (!f) throw DataError("cannot write " + path.string());
}

void report(const fs::path& dir, const std::string& stem, const EvalReport& r) {
  std::ostringstream table, kv;
  write_report_table(table, r);
  write_report_kv(kv, r);
  std::cout << table.str();
  write_file(dir / (stem + ".txt"), table.str());
  write_file(dir / (stem + ".kv"), kv.str());
}

int cmd_train(const SharedOptions& o) {
  const TrainConfig config = train_config(o);
  const Corpus train = required_corpus(o.train, "--train");
  std::optional<Corpus> dev;
  if (!o.dev.empty()) dev = read_conll(o.dev);
  auto model = build_model(config, train, embeddings(o));
  const fs::path dir = out_dir(o);

  std::ofstream history(dir / "history.tsv");
  history << "epoch\ttrain_loss\tdev_f1\n";
  Trainer trainer(*model, config);
  const TrainResult result = trainer.fit(train, dev ? &*dev : nullptr, [&](const EpochRecord& r) {
    char line[128];
    std::snprintf(line, sizeof line, "%zu\t%.6f\t%.6f\n", r.epoch, r.train_loss, r.dev_f1);
    history << line;
    std::cout << "epoch " << r.epoch << " loss " << r.train_loss << " dev_f1 " << r.dev_f1 << '\n';
  });
  std::cout << "best epoch " << result.best_epoch << " dev_f1 " << result.best_dev_f1 << '\n';
  save_checkpoint((dir / "model.ckpt").string(), *model);
  if (!o.test.empty()) report(dir, "test_report", evaluate(*model, rebase(read_conll(o.test), model->scheme())));
  return 0;
}

std::unique_ptr<NerModel<float>> load_model(const std::string& path, const SharedOptions& o) {
  if (path.empty()) throw ConfigError("--model PATH is required");
  return load_checkpoint(path, embeddings(o));
}

int cmd_eval(const SharedOptions& o, const std::string& model_path) {
  auto model = load_model(model_path, o);
  const Corpus test = rebase(required_corpus(o.test, "--test"), model->scheme());
  report(out_dir(o), "report", evaluate(*model, test));
  return 0;
}

int cmd_ablate(const SharedOptions& o, const std::string& model_path) {
  auto model = load_model(model_path, o);
  const Corpus test = rebase(required_corpus(o.test, "--test"), model->scheme());
  const AblationTable table = ablation_table(*model, test);
  std::ostringstream text, kv;
  write_ablation_table(text, table);
  write_ablation_kv(kv, table);
  std::cout << text.str();
  const fs::path dir = out_dir(o);
  write_file(dir / "ablation.txt", text.str());
  write_file(dir / "ablation.kv", kv.str());
  return 0;
}

int cmd_xor(const SharedOptions& o, const std::string& variant_name, std::size_t seeds, std::size_t max_epochs) {
  const XorVariant variant = parse_xor_variant(variant_name);
  const Architecture arch = parse_architecture(o.arch);
  const Head head = parse_head(o.head);
  XorOptions options;
  options.max_epochs = max_epochs;
  options.learning_rate = o.learning_rate;
  std::vector<std::uint64_t> seed_list(seeds);
  std::iota(seed_list.begin(), seed_list.end(), o.seed);
  const char* unit = variant == XorVariant::Phrase ? "middle tokens" : "phrases";
  XorReport r;
  r.variant = variant;
  r.architecture = arch;
  r.head = head;
  for (std::uint64_t s : seed_list) {
    r.seeds.push_back(run_xor_seed(arch, head, variant, s, options));
    const XorSeedResult& x = r.seeds.back();
    std::printf("seed %llu: %zu/%zu %s correct after %zu epochs (loss %.6f)\n", static_cast<unsigned long long>(s),
                x.correct, x.total, unit, x.epochs, x.final_loss);
  }
  std::printf("%s+%s on %s: %zu/%zu seeds fully correct, best %zu/4\n", to_string(arch).c_str(),
              to_string(head).c_str(), std::string(to_string(variant)).c_str(), r.seeds_with_all_correct(),
              r.seeds.size(), r.max_correct());
  return 0;
}

std::vector<std::string> split_words(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

int cmd_heatmap(const SharedOptions& o, const std::string& model_path, const std::string& sentence,
                std::size_t index) {
  auto model = load_model(model_path, o);
  if (!model->attention()) throw ConfigError("heat maps need a model with the att architecture");
  std::vector<std::string> tokens;
  if (!sentence.empty()) {
    tokens = split_words(sentence);
  } else {
    const Corpus test = required_corpus(o.test, "--test");
    if (index >= test.size()) throw DataError("--index " + std::to_string(index) + " but the corpus has " +
                                              std::to_string(test.size()) + " sentences");
    tokens = test.sentences[index].tokens;
  }
  Graph<float> g;
  const ForwardResult<float> r = model->forward(g, model->prepare(tokens));
  std::vector<Tensor<float>> alphas;
  for (const Var<float>& a : r.attention.alphas) alphas.push_back(a.value());
  for (const std::string& path : export_heatmap(alphas, tokens, out_dir(o).string())) std::cout << path << '\n';
  return 0;
}

int cmd_gradcheck(const SharedOptions& o, std::size_t entries, double tol) {
  const Architecture arch = parse_architecture(o.arch);
  const Head head = parse_head(o.head);
  const GradCheckReport rep = check_model_gradients(arch, head, o.seed, tol, entries);
  std::printf("%s+%s: %zu entries, max relative error %.3e (worst %s), %s\n", to_string(arch).c_str(),
              to_string(head).c_str(), rep.entries_checked, rep.max_relative_error, rep.worst_entry.c_str(),
              rep.passed ? "pass" : "FAIL");
  return rep.passed ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Named entity tagger with baseline, cross and attention BiLSTM-CNN encoders"};
  app.set_config("--config", "", "Read options from a key=value file");
  app.require_subcommand(1);
  app.fallthrough();

  SharedOptions o;
  const std::vector<std::string> archs{"baseline", "cross", "att"};
  app.add_option("--arch", o.arch, "Encoder architecture")->check(CLI::IsMember(archs));
  app.add_option("--head", o.head, "Output layer")->check(CLI::IsMember({"softmax", "crf"}));
  app.add_option("--preset", o.preset, "Model dimensions")->check(CLI::IsMember({"paper", "mini"}));
  app.add_option("--seed", o.seed, "Random seed");
  app.add_option("--train", o.train, "Training corpus (CoNLL)");
  app.add_option("--dev", o.dev, "Development corpus (CoNLL)");
  app.add_option("--test", o.test, "Test corpus (CoNLL)");
  app.add_option("--embeddings", o.embeddings, "Word vectors, one 'word v1 ... vD' per line");
  app.add_option("--embedding-dim", o.embedding_dim, "Word vector dimension");
  app.add_option("--out", o.out, "Output directory");
  app.add_option("--lr", o.learning_rate, "Learning rate");
  app.add_option("--dropout", o.dropout, "Variational dropout rate");
  app.add_option("--batch-size", o.batch_size, "Sentences per batch");
  app.add_option("--epochs", o.epochs, "Training epochs (default: 400 paper, 300 mini)");

  std::string model_path, variant = "phrase", sentence;
  std::size_t seeds = 6, max_epochs = 3000, index = 0, entries = 24;
  double tol = 1e-3;

  auto* train = app.add_subcommand("train", "Train with dev-set epoch selection; writes model.ckpt");
  auto* eval = app.add_subcommand("eval", "Strict mention F1 of a checkpoint on --test");
  eval->add_option("--model", model_path, "Checkpoint file")->required();
  auto* ablate = app.add_subcommand("ablate", "Chunk-tag recalls with classifier inputs zeroed");
  ablate->add_option("--model", model_path, "Checkpoint file")->required();
  auto* xr = app.add_subcommand("xor", "Train and score on the XOR corpora");
  xr->add_option("--variant", variant, "phrase, oso or bie")->check(CLI::IsMember({"phrase", "oso", "bie"}));
  xr->add_option("--seeds", seeds, "Number of seeds, counting up from --seed");
  xr->add_option("--max-epochs", max_epochs, "Epoch budget per seed");
  auto* heat = app.add_subcommand("heatmap", "Export attention maps as PGM and text");
  heat->add_option("--model", model_path, "Checkpoint file")->required();
  heat->add_option("--sentence", sentence, "Space-separated tokens");
  heat->add_option("--index", index, "Sentence index in --test when --sentence is absent");
  auto* grad = app.add_subcommand("gradcheck", "Finite-difference check of the full model in double precision");
  grad->add_option("--entries", entries, "Entries probed per parameter tensor (0: all)");
  grad->add_option("--tol", tol, "Relative error tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error category=usage " << e.what() << '\n';
    return 2;
  }

  try {
    if (*train) return cmd_train(o);
    if (*eval) return cmd_eval(o, model_path);
    if (*ablate) return cmd_ablate(o, model_path);
    if (*xr) return cmd_xor(o, variant, seeds, max_epochs);
    if (*heat) return cmd_heatmap(o, model_path, sentence, index);
    if (*grad) return cmd_gradcheck(o, entries, tol);
  } catch (const Error& e) {
    std::cerr << "error category=" << e.category() << ' ' << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error category=internal " << e.what() << '\n';
    return 1;
  }
  return 0;
}
