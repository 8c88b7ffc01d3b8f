#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "textpure/vocab.hpp"

namespace textpure {

// Masking noise — the text analogue of additive Gaussian noise. Rates are
// deliberately configurable: mask_rate masks existing tokens, insert_rate
// inserts fresh MASK tokens after existing ones.
struct NoiseSpec {
  double mask_rate = 0.3;
  double insert_rate = 0.1;
  bool enable_insertion = true;
  std::uint64_t seed = 0;

  void validate() const;
};

// Each non-special position independently replaced by MASK with probability p.
TokenSequence mask_replace(const TokenSequence& text, const Vocabulary& vocab,
                           double p, std::mt19937_64& rng);

// After each original token, insert a MASK with probability q; truncates from
// the end if max_len would be exceeded.
TokenSequence mask_insert(const TokenSequence& text, const Vocabulary& vocab,
                          double q, int max_len, std::mt19937_64& rng);

// N independent draws; copy i depends only on (spec.seed, i), never on
// evaluation order.
std::vector<TokenSequence> make_noisy_copies(const TokenSequence& text,
                                             const Vocabulary& vocab,
                                             const NoiseSpec& spec, int n,
                                             int max_len);

// Training-side masking: replacement only, with the replaced positions
// reported so the MLM loss can target them.
struct MaskedText {
  TokenSequence masked;
  std::vector<int> positions;
};

MaskedText mask_for_training(const TokenSequence& text, const Vocabulary& vocab,
                             double p, std::mt19937_64& rng);

}  // namespace textpure
