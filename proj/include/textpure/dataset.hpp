#pragma once

#include <string>
#include <vector>

#include "textpure/vocab.hpp"

namespace textpure {

enum class DataFormat { kCsv, kJsonl };

DataFormat parse_format(const std::string& name);  // "csv" | "jsonl"

struct RawExample {
  std::string text;
  int label = 0;
};

struct LabeledExample {
  TokenSequence text;
  int label = 0;
};

// Raw rows, used for vocabulary construction before ids exist.
std::vector<RawExample> load_raw_dataset(const std::string& path,
                                         DataFormat format);

// Tokenized examples; labels validated against num_classes, sequences
// truncated to max_len. Malformed rows report their index.
std::vector<LabeledExample> load_dataset(const std::string& path,
                                         DataFormat format,
                                         const Vocabulary& vocab,
                                         int num_classes, int max_len);

std::vector<LabeledExample> encode_dataset(const std::vector<RawExample>& raw,
                                           const Vocabulary& vocab,
                                           int num_classes, int max_len);

void write_csv(const std::string& path, const std::vector<RawExample>& rows);
void write_jsonl(const std::string& path, const std::vector<RawExample>& rows);

}  // namespace textpure
