#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace textpure {

struct TokenSequence {
  std::vector<int> ids;

  int length() const { return static_cast<int>(ids.size()); }
  bool operator==(const TokenSequence&) const = default;
};

std::uint64_t sequence_hash(const TokenSequence& seq);

// Word-level vocabulary with reserved special ids. Ids are dense 0..size-1;
// the MASK surface can never be produced by tokenizing raw text because '['
// splits off as punctuation.
class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;
  static constexpr int kMask = 2;
  static constexpr int kBos = 3;
  static constexpr int kNumSpecial = 4;

  static Vocabulary from_corpus(std::span<const std::string> texts,
                                int min_freq = 1);
  static Vocabulary from_tokens(std::vector<std::string> tokens);

  int size() const { return static_cast<int>(tokens_.size()); }
  int id(const std::string& surface) const;  // kUnk if absent
  const std::string& surface(int id) const;
  bool is_special(int id) const { return id < kNumSpecial; }
  bool contains(const std::string& surface) const;

  // FNV-1a over the ordered surface list; used to bind checkpoints to a vocab.
  std::uint64_t hash() const;

  TokenSequence tokenize(const std::string& raw) const;  // throws on empty
  std::string detokenize(const TokenSequence& seq) const;

  // Whitespace/punctuation word split, shared with vocab construction.
  static std::vector<std::string> split_words(const std::string& raw);

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

}  // namespace textpure
