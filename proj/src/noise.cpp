#include "textpure/noise.hpp"

#include <stdexcept>

#include "textpure/rng.hpp"

namespace textpure {

void NoiseSpec::validate() const {
  if (mask_rate < 0.0 || mask_rate > 1.0)
    throw std::invalid_argument("noise.mask_rate must be in [0,1]");
  if (insert_rate < 0.0 || insert_rate > 1.0)
    throw std::invalid_argument("noise.insert_rate must be in [0,1]");
}

TokenSequence mask_replace(const TokenSequence& text, const Vocabulary& vocab,
                           double p, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  TokenSequence out = text;
  for (auto& id : out.ids) {
    if (vocab.is_special(id)) continue;
    if (u(rng) < p) id = Vocabulary::kMask;
  }
  return out;
}

MaskedText mask_for_training(const TokenSequence& text, const Vocabulary& vocab,
                             double p, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  MaskedText out;
  out.masked = text;
  for (std::size_t i = 0; i < out.masked.ids.size(); ++i) {
    if (vocab.is_special(out.masked.ids[i])) continue;
    if (u(rng) < p) {
      out.masked.ids[i] = Vocabulary::kMask;
      out.positions.push_back(static_cast<int>(i));
    }
  }
  return out;
}

TokenSequence mask_insert(const TokenSequence& text, const Vocabulary& vocab,
                          double q, int max_len, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  TokenSequence out;
  out.ids.reserve(text.ids.size() * 2);
  for (int id : text.ids) {
    out.ids.push_back(id);
    if (id == Vocabulary::kPad) continue;
    if (u(rng) < q) out.ids.push_back(Vocabulary::kMask);
  }
  if (out.length() > max_len) out.ids.resize(static_cast<std::size_t>(max_len));
  return out;
}

std::vector<TokenSequence> make_noisy_copies(const TokenSequence& text,
                                             const Vocabulary& vocab,
                                             const NoiseSpec& spec, int n,
                                             int max_len) {
  if (n < 1) throw std::invalid_argument("copy count must be >= 1");
  spec.validate();
  std::vector<TokenSequence> copies;
  copies.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    auto rng = make_rng(spec.seed, static_cast<std::uint64_t>(i));
    TokenSequence c = mask_replace(text, vocab, spec.mask_rate, rng);
    if (spec.enable_insertion)
      c = mask_insert(c, vocab, spec.insert_rate, max_len, rng);
    copies.push_back(std::move(c));
  }
  return copies;
}

}  // namespace textpure
