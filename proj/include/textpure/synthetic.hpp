#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "textpure/dataset.hpp"

namespace textpure {

// Keyword-driven two-class sentiment generator. Sentences mix strongly
// label-bearing keywords with weakly class-correlated filler words; keyword
// embeddings place same-class variants and opposite-class counterparts inside
// the attacker's candidate range, fillers stay out of reach.
struct SyntheticSpec {
  int train_size = 2000;
  int test_size = 200;
  int keyword_groups = 24;     // each group: forms_per_class pos + neg words
  int forms_per_class = 4;
  int filler_pos = 60;
  int filler_neg = 60;
  int filler_neutral = 300;
  int keywords_per_sentence = 7;
  int fillers_per_sentence = 15;
  double filler_purity = 0.0;      // label-pool share of filler draws
  double filler_opposite = 0.0;    // opposite-pool share
  double keyword_noise = 0.05;     // chance of an opposite-class keyword
  int embedding_dim = 64;
  std::uint64_t seed = 7;
};

struct SyntheticCorpus {
  std::vector<RawExample> train;
  std::vector<RawExample> test;
  // surface -> embedding, written as the fixture file
  std::map<std::string, Eigen::VectorXd> embeddings;
};

SyntheticCorpus generate_synthetic(const SyntheticSpec& spec);

void write_embedding_fixture(const std::string& path,
                             const std::map<std::string, Eigen::VectorXd>& emb);

// Convenience: writes train.csv, test.csv, embeddings.txt under dir.
void write_synthetic_corpus(const std::string& dir,
                            const SyntheticCorpus& corpus);

}  // namespace textpure
