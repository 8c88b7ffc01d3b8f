#include "textpure/dataset.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace textpure {
namespace {

using nlohmann::json;

[[noreturn]] void row_error(std::size_t row, const std::string& what) {
  throw std::runtime_error("row " + std::to_string(row) + ": " + what);
}

// Minimal RFC-4180 line parser for the two-column `text,label` schema.
std::vector<std::string> parse_csv_line(const std::string& line,
                                        std::size_t row) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (quoted) row_error(row, "unterminated quote");
  fields.push_back(std::move(cur));
  return fields;
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += "\"";
  return out;
}

int parse_label(const std::string& s, std::size_t row) {
  try {
    std::size_t pos = 0;
    int v = std::stoi(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    row_error(row, "malformed label '" + s + "'");
  }
}

}  // namespace

DataFormat parse_format(const std::string& name) {
  if (name == "csv") return DataFormat::kCsv;
  if (name == "jsonl") return DataFormat::kJsonl;
  throw std::invalid_argument("unknown dataset format '" + name + "'");
}

std::vector<RawExample> load_raw_dataset(const std::string& path,
                                         DataFormat format) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset file: " + path);
  std::vector<RawExample> out;
  std::string line;
  std::size_t row = 0;
  if (format == DataFormat::kCsv) {
    if (!std::getline(in, line) || parse_csv_line(line, 0) !=
                                       std::vector<std::string>{"text", "label"})
      throw std::runtime_error(path + ": expected header 'text,label'");
    while (std::getline(in, line)) {
      ++row;
      if (line.empty()) continue;
      auto fields = parse_csv_line(line, row);
      if (fields.size() != 2) row_error(row, "expected 2 fields");
      out.push_back({fields[0], parse_label(fields[1], row)});
    }
  } else {
    while (std::getline(in, line)) {
      ++row;
      if (line.empty()) continue;
      json j = json::parse(line, nullptr, false);
      if (j.is_discarded() || !j.is_object() || !j.contains("text") ||
          !j.contains("label") || !j["text"].is_string() ||
          !j["label"].is_number_integer())
        row_error(row, "expected {\"text\": str, \"label\": int}");
      out.push_back({j["text"].get<std::string>(), j["label"].get<int>()});
    }
  }
  return out;
}

std::vector<LabeledExample> encode_dataset(const std::vector<RawExample>& raw,
                                           const Vocabulary& vocab,
                                           int num_classes, int max_len) {
  std::vector<LabeledExample> out;
  out.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const auto& r = raw[i];
    if (r.label < 0 || r.label >= num_classes)
      row_error(i + 1, "label " + std::to_string(r.label) +
                           " outside num_classes=" + std::to_string(num_classes));
    LabeledExample ex;
    ex.label = r.label;
    ex.text = vocab.tokenize(r.text);
    if (ex.text.length() > max_len)
      ex.text.ids.resize(static_cast<std::size_t>(max_len));
    out.push_back(std::move(ex));
  }
  return out;
}

std::vector<LabeledExample> load_dataset(const std::string& path,
                                         DataFormat format,
                                         const Vocabulary& vocab,
                                         int num_classes, int max_len) {
  return encode_dataset(load_raw_dataset(path, format), vocab, num_classes,
                        max_len);
}

void write_csv(const std::string& path, const std::vector<RawExample>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "text,label\n";
  for (const auto& r : rows)
    out << csv_quote(r.text) << "," << r.label << "\n";
}

void write_jsonl(const std::string& path, const std::vector<RawExample>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (const auto& r : rows) {
    json j{{"text", r.text}, {"label", r.label}};
    out << j.dump() << "\n";
  }
}

}  // namespace textpure
