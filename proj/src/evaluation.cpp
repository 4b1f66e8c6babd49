#include "crossner/evaluation.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "crossner/error.h"

namespace crossner {
namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string type_label(int type, const TagScheme* scheme) {
  if (scheme && type >= 0 && static_cast<std::size_t>(type) < scheme->num_types()) return scheme->type_name(type);
  return "type" + std::to_string(type);
}

}  // namespace

double Counts::precision() const { return ratio(true_positives, predicted); }
double Counts::recall() const { return ratio(true_positives, gold); }
double Counts::f1() const {
  const double p = precision(), r = recall();
  return p + r > 0 ? 2 * p * r / (p + r) : 0.0;
}

Counts& Counts::operator+=(const Counts& o) {
  true_positives += o.true_positives;
  predicted += o.predicted;
  gold += o.gold;
  return *this;
}

std::string length_bucket(std::size_t length) { return length >= 4 ? "3+" : std::to_string(length); }

EvalReport strict_f1(std::span<const std::vector<Mention>> gold, std::span<const std::vector<Mention>> predicted,
                     const TagScheme* scheme) {
  if (gold.size() != predicted.size()) {
    throw DataError("strict_f1: " + std::to_string(gold.size()) + " gold sentences vs " +
                    std::to_string(predicted.size()) + " predicted");
  }
  EvalReport report;
  for (const char* b : kLengthBuckets) report.per_length[b];
  for (std::size_t s = 0; s < gold.size(); ++s) {
    std::vector<bool> used(gold[s].size(), false);
    for (const Mention& g : gold[s]) {
      ++report.overall.gold;
      ++report.per_type[type_label(g.type, scheme)].gold;
      ++report.per_length[length_bucket(g.length())].gold;
    }
    for (const Mention& p : predicted[s]) {
      ++report.overall.predicted;
      Counts& by_type = report.per_type[type_label(p.type, scheme)];
      Counts& by_length = report.per_length[length_bucket(p.length())];
      ++by_type.predicted;
      ++by_length.predicted;
      for (std::size_t i = 0; i < gold[s].size(); ++i) {
        if (!used[i] && gold[s][i] == p) {
          used[i] = true;
          ++report.overall.true_positives;
          ++by_type.true_positives;
          ++by_length.true_positives;
          break;
        }
      }
    }
  }
  return report;
}

double ChunkRecall::recall(Chunk c) const {
  const auto i = static_cast<std::size_t>(c);
  return ratio(correct[i], support[i]);
}

ChunkRecall& ChunkRecall::operator+=(const ChunkRecall& o) {
  for (std::size_t i = 0; i < 5; ++i) {
    correct[i] += o.correct[i];
    support[i] += o.support[i];
  }
  return *this;
}

ChunkRecall chunk_tag_recall(std::span<const ChunkTag> gold, std::span<const ChunkTag> predicted) {
  if (gold.size() != predicted.size()) {
    throw DataError("chunk_tag_recall: " + std::to_string(gold.size()) + " gold tags vs " +
                    std::to_string(predicted.size()) + " predicted");
  }
  ChunkRecall r;
  for (std::size_t t = 0; t < gold.size(); ++t) {
    const auto g = static_cast<std::size_t>(gold[t].chunk);
    ++r.support[g];
    if (predicted[t].chunk == gold[t].chunk) ++r.correct[g];
  }
  return r;
}

double chunk_accuracy(std::span<const std::vector<ChunkTag>> gold, std::span<const std::vector<ChunkTag>> predicted) {
  if (gold.size() != predicted.size()) throw DataError("chunk_accuracy: sentence counts differ");
  ChunkRecall total;
  for (std::size_t s = 0; s < gold.size(); ++s) total += chunk_tag_recall(gold[s], predicted[s]);
  std::size_t correct = 0, support = 0;
  for (std::size_t i = 0; i < 5; ++i) correct += total.correct[i], support += total.support[i];
  return ratio(correct, support);
}

std::vector<std::vector<ChunkTag>> predict_corpus(NerModel<float>& model, const Corpus& corpus,
                                                  const AblationSpec& keep) {
  std::vector<std::vector<ChunkTag>> out;
  out.reserve(corpus.size());
  for (const Sentence& s : corpus.sentences) {
    const std::vector<int> ids = model.predict(model.prepare(s.tokens), keep);
    out.push_back(model.scheme().tags(ids));
  }
  return out;
}

MentionLists corpus_mentions(std::span<const std::vector<ChunkTag>> tags) {
  MentionLists out;
  out.reserve(tags.size());
  for (const auto& t : tags) out.push_back(decode_tags(t));
  return out;
}

EvalReport evaluate(NerModel<float>& model, const Corpus& corpus) {
  std::vector<std::vector<ChunkTag>> gold;
  for (const Sentence& s : corpus.sentences) gold.push_back(s.tags);
  const auto predicted = predict_corpus(model, corpus);
  return strict_f1(corpus_mentions(gold), corpus_mentions(predicted), &model.scheme());
}

ChunkRecall run_ablation(NerModel<float>& model, const Corpus& corpus, const AblationSpec& keep) {
  if (model.config().architecture != Architecture::Att) {
    throw ConfigError("ablation is defined for the att architecture, model is " +
                      to_string(model.config().architecture));
  }
  const auto predicted = predict_corpus(model, corpus, keep);
  ChunkRecall total;
  for (std::size_t s = 0; s < corpus.size(); ++s) total += chunk_tag_recall(corpus.sentences[s].tags, predicted[s]);
  return total;
}

double AblationTable::cell(Chunk c, std::size_t column) const {
  const double full = recalls.at(0).recall(c);
  return column == 0 ? full : recalls.at(column).recall(c) - full;
}

AblationTable ablation_table(NerModel<float>& model, const Corpus& corpus) {
  AblationTable table;
  table.columns = {AblationSpec::all(), AblationSpec::hidden(), AblationSpec::contexts()};
  for (std::size_t h = 0; h < model.config().heads; ++h) table.columns.push_back(AblationSpec::single_head(h));
  for (const AblationSpec& spec : table.columns) table.recalls.push_back(run_ablation(model, corpus, spec));
  return table;
}

void write_report_table(std::ostream& out, const EvalReport& report) {
  auto row = [&out](const std::string& label, const Counts& c) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-16s %8.2f %8.2f %8.2f %8zu %8zu %8zu\n", label.c_str(), 100 * c.precision(),
                  100 * c.recall(), 100 * c.f1(), c.true_positives, c.predicted, c.gold);
    out << buf;
  };
  char head[160];
  std::snprintf(head, sizeof head, "%-16s %8s %8s %8s %8s %8s %8s\n", "", "P", "R", "F1", "tp", "pred", "gold");
  out << head;
  row("overall", report.overall);
  for (const auto& [type, c] : report.per_type) row("type " + type, c);
  for (const char* b : kLengthBuckets) row(std::string("length ") + b, report.per_length.at(b));
}

void write_report_kv(std::ostream& out, const EvalReport& report) {
  auto emit = [&out](const std::string& prefix, const Counts& c) {
    out << prefix << ".precision=" << fixed(c.precision(), 6) << '\n'
        << prefix << ".recall=" << fixed(c.recall(), 6) << '\n'
        << prefix << ".f1=" << fixed(c.f1(), 6) << '\n'
        << prefix << ".tp=" << c.true_positives << '\n'
        << prefix << ".predicted=" << c.predicted << '\n'
        << prefix << ".gold=" << c.gold << '\n';
  };
  emit("overall", report.overall);
  for (const auto& [type, c] : report.per_type) emit("type." + type, c);
  for (const char* b : kLengthBuckets) emit(std::string("length.") + b, report.per_length.at(b));
}

void write_ablation_table(std::ostream& out, const AblationTable& table) {
  out << "     ";
  for (const AblationSpec& spec : table.columns) {
    char buf[32];
    std::snprintf(buf, sizeof buf, " %8s", spec.to_string().c_str());
    out << buf;
  }
  out << '\n';
  for (Chunk c : kChunks) {
    out << "  " << chunk_letter(c) << "  ";
    for (std::size_t col = 0; col < table.columns.size(); ++col) {
      char buf[32];
      std::snprintf(buf, sizeof buf, col == 0 ? " %8.2f" : " %+8.2f", 100 * table.cell(c, col));
      out << buf;
    }
    out << '\n';
  }
}

void write_ablation_kv(std::ostream& out, const AblationTable& table) {
  for (std::size_t col = 0; col < table.columns.size(); ++col) {
    for (Chunk c : kChunks) {
      out << table.columns[col].to_string() << '.' << chunk_letter(c) << '=' << fixed(table.cell(c, col), 6) << '\n';
    }
  }
}

std::string encode_pgm(const Tensor<float>& alpha) {
  if (alpha.rows() != alpha.cols()) throw DataError("attention map " + alpha.shape_string() + " is not square");
  std::string out = "P5\n" + std::to_string(alpha.cols()) + " " + std::to_string(alpha.rows()) + "\n255\n";
  for (float a : alpha.values()) {
    const double clamped = std::min(1.0, std::max(0.0, static_cast<double>(a)));
    out.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * clamped))));
  }
  return out;
}

Tensor<float> read_pgm(std::istream& in) {
  std::string magic;
  std::size_t width = 0, height = 0, maxval = 0;
  if (!(in >> magic >> width >> height >> maxval) || magic != "P5" || maxval != 255) {
    throw DataError("not a binary PGM with maxval 255");
  }
  in.get();
  Tensor<float> out(height, width);
  for (float& v : out.values()) {
    const int byte = in.get();
    if (byte == std::char_traits<char>::eof()) throw DataError("PGM payload is truncated");
    v = static_cast<float>(byte) / 255.0f;
  }
  return out;
}

std::string encode_alpha_text(const Tensor<float>& alpha, std::span<const std::string> tokens) {
  if (alpha.rows() != tokens.size() || alpha.cols() != tokens.size()) {
    throw DataError("attention map " + alpha.shape_string() + " does not match " + std::to_string(tokens.size()) +
                    " tokens");
  }
  std::ostringstream out;
  for (const std::string& t : tokens) out << '\t' << t;
  out << '\n';
  for (std::size_t i = 0; i < alpha.rows(); ++i) {
    out << tokens[i];
    for (float a : alpha.row_span(i)) out << '\t' << fixed(a, 4);
    out << '\n';
  }
  return out.str();
}

std::vector<std::string> export_heatmap(std::span<const Tensor<float>> alphas, std::span<const std::string> tokens,
                                        const std::string& directory, const std::string& prefix) {
  std::filesystem::create_directories(directory);
  std::vector<std::string> paths;
  for (std::size_t h = 0; h < alphas.size(); ++h) {
    const std::string text = encode_alpha_text(alphas[h], tokens);
    const std::string base = (std::filesystem::path(directory) / (prefix + "head" + std::to_string(h + 1))).string();
    std::ofstream pgm(base + ".pgm", std::ios::binary);
    pgm << encode_pgm(alphas[h]);
    std::ofstream txt(base + ".txt");
    txt << text;
    if (!pgm || !txt) throw DataError("cannot write heat map files under " + directory);
    paths.push_back(base + ".pgm");
    paths.push_back(base + ".txt");
  }
  return paths;
}

}  // namespace crossner
