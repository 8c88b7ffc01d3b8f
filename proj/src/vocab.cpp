#include "textpure/vocab.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <stdexcept>

#include "textpure/rng.hpp"

namespace textpure {

std::uint64_t sequence_hash(const TokenSequence& seq) {
  return fnv1a(seq.ids.data(), seq.ids.size() * sizeof(int));
}

std::vector<std::string> Vocabulary::split_words(const std::string& raw) {
  std::vector<std::string> out;
  std::string cur;
  for (unsigned char c : raw) {
    if (std::isspace(c)) {
      if (!cur.empty()) out.push_back(std::move(cur)), cur.clear();
    } else if (std::ispunct(c)) {
      if (!cur.empty()) out.push_back(std::move(cur)), cur.clear();
      out.emplace_back(1, static_cast<char>(c));
    } else {
      cur.push_back(static_cast<char>(c));
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

Vocabulary Vocabulary::from_corpus(std::span<const std::string> texts,
                                   int min_freq) {
  std::map<std::string, int> freq;
  for (const auto& t : texts) {
    for (auto& w : split_words(t)) ++freq[w];
  }
  std::vector<std::string> toks;
  for (auto& [w, n] : freq) {
    if (n >= min_freq) toks.push_back(w);
  }
  return from_tokens(std::move(toks));
}

Vocabulary Vocabulary::from_tokens(std::vector<std::string> tokens) {
  Vocabulary v;
  v.tokens_ = {"[PAD]", "[UNK]", "[MASK]", "[BOS]"};
  for (auto& t : tokens) {
    if (!v.index_.contains(t)) {
      v.index_.emplace(t, static_cast<int>(v.tokens_.size()));
      v.tokens_.push_back(std::move(t));
    }
  }
  for (int i = 0; i < kNumSpecial; ++i) v.index_.emplace(v.tokens_[i], i);
  return v;
}

int Vocabulary::id(const std::string& surface) const {
  auto it = index_.find(surface);
  return it == index_.end() ? kUnk : it->second;
}

bool Vocabulary::contains(const std::string& surface) const {
  return index_.contains(surface);
}

const std::string& Vocabulary::surface(int id) const {
  if (id < 0 || id >= size()) throw std::out_of_range("vocab id out of range");
  return tokens_[static_cast<std::size_t>(id)];
}

std::uint64_t Vocabulary::hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  for (const auto& t : tokens_) {
    h = fnv1a(std::string_view(t), h);
    h = fnv1a(std::string_view("\x1f", 1), h);
  }
  return h;
}

TokenSequence Vocabulary::tokenize(const std::string& raw) const {
  auto words = split_words(raw);
  if (words.empty()) throw std::invalid_argument("empty input");
  TokenSequence seq;
  seq.ids.reserve(words.size());
  for (const auto& w : words) seq.ids.push_back(id(w));
  return seq;
}

std::string Vocabulary::detokenize(const TokenSequence& seq) const {
  std::string out;
  for (int id : seq.ids) {
    if (!out.empty()) out.push_back(' ');
    out += surface(id);
  }
  return out;
}

}  // namespace textpure
