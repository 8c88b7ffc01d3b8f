#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "textpure/dataset.hpp"
#include "textpure/vocab.hpp"

namespace textpure {

// One vector per vocabulary id; special ids carry zero vectors and never
// participate in similarity queries.
using EmbeddingTable = std::vector<Eigen::VectorXd>;

struct SkipGramConfig {
  int dim = 32;
  int window = 3;
  int negatives = 5;
  int epochs = 3;
  double lr = 0.05;
  std::uint64_t seed = 0;
};

// Fixture file: one line per word, `surface v1 v2 ...`. Words absent from the
// fixture get zero vectors (and therefore empty neighbor lists).
EmbeddingTable load_embedding_fixture(const std::string& path,
                                      const Vocabulary& vocab);

// Fallback when no fixture is supplied: skip-gram with negative sampling
// trained on the corpus itself.
EmbeddingTable train_skipgram(const std::vector<LabeledExample>& corpus,
                              const Vocabulary& vocab,
                              const SkipGramConfig& cfg);

struct SynonymTable {
  // neighbors[id] sorted by descending similarity, length <= k_max,
  // similarities >= threshold, never containing id itself.
  std::vector<std::vector<std::pair<int, double>>> neighbors;

  const std::vector<std::pair<int, double>>& of(int id) const {
    return neighbors[static_cast<std::size_t>(id)];
  }
};

SynonymTable build_synonym_table(const EmbeddingTable& embeddings, int k_max,
                                 double threshold);

double cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

// Mean-embedding cosine between two token sequences (desk-scale stand-in for
// a sentence encoder constraint). Returns 1 for identical sequences.
double sentence_similarity(const EmbeddingTable& embeddings,
                           const TokenSequence& a, const TokenSequence& b);

}  // namespace textpure
