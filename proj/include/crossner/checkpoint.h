#pragma once

#include <iosfwd>
#include <memory>
#include <string>

#include "crossner/model.h"

namespace crossner {

inline constexpr int kCheckpointVersion = 1;

// Text header (version, model config, entity types, character and word
// inventories, tensor directory) followed by each tensor as little-endian
// float32 in directory order. Word vectors are not stored; they come from
// the embedding file at load time.
void save_checkpoint(std::ostream& out, const NerModel<float>& model);
void save_checkpoint(const std::string& path, const NerModel<float>& model);

// Overwrites the model's parameters. The directory must name exactly the
// model's tensors with the same shapes (CheckpointShapeError otherwise).
void load_parameters(std::istream& in, NerModel<float>& model);

// Rebuilds the model described by the header, then loads its parameters.
std::unique_ptr<NerModel<float>> load_checkpoint(std::istream& in, std::shared_ptr<const EmbeddingTable> embeddings);
std::unique_ptr<NerModel<float>> load_checkpoint(const std::string& path,
                                                 std::shared_ptr<const EmbeddingTable> embeddings);

// Header-only view, for tools that need the config before loading.
struct CheckpointInfo {
  ModelConfig config;
  Vocab vocab;
};
CheckpointInfo read_checkpoint_info(std::istream& in);

}  // namespace crossner
