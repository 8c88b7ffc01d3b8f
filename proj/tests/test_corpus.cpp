#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <vector>

#include "textpure/dataset.hpp"
#include "textpure/embedding.hpp"
#include "textpure/rng.hpp"
#include "textpure/vocab.hpp"

using namespace textpure;
namespace fs = std::filesystem;

namespace {

fs::path tmp_dir() {
  auto d = fs::temp_directory_path() / "textpure_test_corpus";
  fs::create_directories(d);
  return d;
}

Vocabulary toy_vocab() {
  return Vocabulary::from_tokens(
      {"the", "movie", "was", "great", "awful", "plot", "."});
}

}  // namespace

TEST_CASE("split_words separates punctuation and whitespace") {
  auto w = Vocabulary::split_words("Hello, world!  twice");
  REQUIRE(w == std::vector<std::string>{"Hello", ",", "world", "!", "twice"});
  CHECK(Vocabulary::split_words("   ").empty());
  CHECK(Vocabulary::split_words("a-b") ==
        std::vector<std::string>{"a", "-", "b"});
}

TEST_CASE("tokenize maps unknown words to UNK and rejects empty input") {
  auto v = toy_vocab();
  auto seq = v.tokenize("the movie was bizarre .");
  REQUIRE(seq.length() == 5);
  CHECK(seq.ids[0] == v.id("the"));
  CHECK(seq.ids[3] == Vocabulary::kUnk);
  CHECK_THROWS_AS((void)v.tokenize("   "), std::invalid_argument);
}

TEST_CASE("detokenize round-trips space-separated text") {
  auto v = toy_vocab();
  std::string text = "the movie was great .";
  CHECK(v.detokenize(v.tokenize(text)) == text);
}

TEST_CASE("special ids occupy the reserved range") {
  auto v = toy_vocab();
  CHECK(v.surface(Vocabulary::kPad) == "[PAD]");
  CHECK(v.surface(Vocabulary::kUnk) == "[UNK]");
  CHECK(v.surface(Vocabulary::kMask) == "[MASK]");
  CHECK(v.surface(Vocabulary::kBos) == "[BOS]");
  for (int i = 0; i < Vocabulary::kNumSpecial; ++i) CHECK(v.is_special(i));
  CHECK_FALSE(v.is_special(Vocabulary::kNumSpecial));
  // Raw text can never produce the MASK surface: brackets split off.
  auto seq = v.tokenize("x [MASK] y");
  for (int id : seq.ids) CHECK(id != Vocabulary::kMask);
}

TEST_CASE("from_corpus assigns ids independent of document order") {
  std::vector<std::string> docs = {"b a c", "c d", "a a e"};
  auto v1 = Vocabulary::from_corpus(docs);
  std::reverse(docs.begin(), docs.end());
  auto v2 = Vocabulary::from_corpus(docs);
  CHECK(v1.hash() == v2.hash());
  CHECK(v1.id("a") == v2.id("a"));
  CHECK(v1.size() == Vocabulary::kNumSpecial + 5);
}

TEST_CASE("vocabulary hash is sensitive to content") {
  auto v1 = Vocabulary::from_tokens({"a", "b"});
  auto v2 = Vocabulary::from_tokens({"a", "c"});
  auto v3 = Vocabulary::from_tokens({"ab"});
  CHECK(v1.hash() != v2.hash());
  CHECK(v1.hash() != v3.hash());
}

TEST_CASE("sequence_hash distinguishes order and content") {
  TokenSequence a{{4, 5, 6}};
  TokenSequence b{{4, 6, 5}};
  TokenSequence c{{4, 5}};
  CHECK(sequence_hash(a) != sequence_hash(b));
  CHECK(sequence_hash(a) != sequence_hash(c));
  CHECK(sequence_hash(a) == sequence_hash(TokenSequence{{4, 5, 6}}));
}

TEST_CASE("csv and jsonl round-trip the same dataset") {
  std::vector<RawExample> rows = {
      {"plain words here", 0},
      {"contains, a comma", 1},
      {"quote \"inside\" text", 0},
      {"newline stays out", 1},
  };
  auto dir = tmp_dir();
  auto csv = (dir / "roundtrip.csv").string();
  auto jsonl = (dir / "roundtrip.jsonl").string();
  write_csv(csv, rows);
  write_jsonl(jsonl, rows);
  auto from_csv = load_raw_dataset(csv, DataFormat::kCsv);
  auto from_jsonl = load_raw_dataset(jsonl, DataFormat::kJsonl);
  REQUIRE(from_csv.size() == rows.size());
  REQUIRE(from_jsonl.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(from_csv[i].text == rows[i].text);
    CHECK(from_csv[i].label == rows[i].label);
    CHECK(from_jsonl[i].text == rows[i].text);
    CHECK(from_jsonl[i].label == rows[i].label);
  }
}

TEST_CASE("malformed rows report their position") {
  auto dir = tmp_dir();
  auto bad_csv = (dir / "bad.csv").string();
  {
    std::ofstream out(bad_csv);
    out << "text,label\nfine text,0\nmissing label field\n";
  }
  CHECK_THROWS_WITH_AS((void)load_raw_dataset(bad_csv, DataFormat::kCsv),
                       doctest::Contains("row 2"), std::runtime_error);

  auto bad_jsonl = (dir / "bad.jsonl").string();
  {
    std::ofstream out(bad_jsonl);
    out << R"({"text":"ok","label":0})" << "\n" << R"({"text":"no label"})" << "\n";
  }
  CHECK_THROWS_WITH_AS((void)load_raw_dataset(bad_jsonl, DataFormat::kJsonl),
                       doctest::Contains("row 2"), std::runtime_error);

  auto header_csv = (dir / "header.csv").string();
  {
    std::ofstream out(header_csv);
    out << "body,class\nx,0\n";
  }
  CHECK_THROWS_AS((void)load_raw_dataset(header_csv, DataFormat::kCsv),
                  std::runtime_error);
}

TEST_CASE("encode_dataset validates labels and truncates") {
  auto v = toy_vocab();
  std::vector<RawExample> rows = {{"the movie was great great great", 1}};
  auto enc = encode_dataset(rows, v, 2, 4);
  REQUIRE(enc.size() == 1);
  CHECK(enc[0].text.length() == 4);
  CHECK(enc[0].label == 1);
  rows[0].label = 2;
  CHECK_THROWS_AS((void)encode_dataset(rows, v, 2, 4), std::runtime_error);
  rows[0].label = -1;
  CHECK_THROWS_AS((void)encode_dataset(rows, v, 2, 4), std::runtime_error);
}

TEST_CASE("parse_format accepts csv and jsonl only") {
  CHECK(parse_format("csv") == DataFormat::kCsv);
  CHECK(parse_format("jsonl") == DataFormat::kJsonl);
  CHECK_THROWS_AS((void)parse_format("tsv"), std::invalid_argument);
}

TEST_CASE("embedding fixture loads vectors and zero-fills missing words") {
  auto v = toy_vocab();
  auto dir = tmp_dir();
  auto path = (dir / "emb.txt").string();
  {
    std::ofstream out(path);
    out << "great 1.0 0.0\nawful -1.0 0.0\nstranger 0.5 0.5\n";
  }
  auto table = load_embedding_fixture(path, v);
  REQUIRE(static_cast<int>(table.size()) == v.size());
  CHECK(table[static_cast<std::size_t>(v.id("great"))](0) == 1.0);
  CHECK(table[static_cast<std::size_t>(v.id("awful"))](0) == -1.0);
  CHECK(table[static_cast<std::size_t>(v.id("movie"))].norm() == 0.0);
  CHECK(table[Vocabulary::kMask].norm() == 0.0);

  auto bad = (dir / "emb_bad.txt").string();
  {
    std::ofstream out(bad);
    out << "a 1.0 2.0\nb 1.0\n";
  }
  CHECK_THROWS_WITH_AS((void)load_embedding_fixture(bad, v),
                       doctest::Contains("line 2"), std::runtime_error);
}

TEST_CASE("cosine handles degenerate vectors") {
  Eigen::VectorXd a(2), b(2), z(2);
  a << 1, 0;
  b << 0, 1;
  z << 0, 0;
  CHECK(cosine(a, a) == doctest::Approx(1.0));
  CHECK(cosine(a, b) == doctest::Approx(0.0));
  CHECK(cosine(a, z) == 0.0);
}

TEST_CASE("synonym table matches a brute-force oracle") {
  const int n_words = 20;
  std::vector<std::string> words;
  for (int i = 0; i < n_words; ++i) words.push_back("w" + std::to_string(i));
  auto v = Vocabulary::from_tokens(words);

  EmbeddingTable emb(static_cast<std::size_t>(v.size()));
  auto rng = make_rng(123);
  std::normal_distribution<double> d(0.0, 1.0);
  for (int i = 0; i < v.size(); ++i) {
    Eigen::VectorXd e(6);
    if (!v.is_special(i))
      for (int k = 0; k < 6; ++k) e(k) = d(rng);
    else
      e = Eigen::VectorXd::Zero(6);
    emb[static_cast<std::size_t>(i)] = e;
  }

  const double threshold = 0.2;
  const int k_max = 5;
  auto table = build_synonym_table(emb, k_max, threshold);

  for (int i = Vocabulary::kNumSpecial; i < v.size(); ++i) {
    // Independent oracle: rank every other word by cosine, filter, cut.
    std::vector<std::pair<double, int>> ranked;
    for (int j = Vocabulary::kNumSpecial; j < v.size(); ++j) {
      if (j == i) continue;
      double sim = cosine(emb[static_cast<std::size_t>(i)],
                          emb[static_cast<std::size_t>(j)]);
      if (sim >= threshold) ranked.emplace_back(-sim, j);
    }
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    if (static_cast<int>(ranked.size()) > k_max) ranked.resize(k_max);

    const auto& got = table.of(i);
    REQUIRE(got.size() == ranked.size());
    for (std::size_t k = 0; k < got.size(); ++k) {
      CHECK(got[k].first == ranked[k].second);
      CHECK(got[k].second == doctest::Approx(-ranked[k].first));
    }
  }

  // Structural invariants on every list.
  for (int i = 0; i < v.size(); ++i) {
    const auto& list = table.of(i);
    if (v.is_special(i)) CHECK(list.empty());
    for (std::size_t k = 0; k < list.size(); ++k) {
      CHECK(list[k].first != i);
      CHECK(list[k].first >= Vocabulary::kNumSpecial);
      CHECK(list[k].second >= threshold);
      if (k > 0) CHECK(list[k - 1].second >= list[k].second);
    }
    CHECK(list.size() <= static_cast<std::size_t>(k_max));
  }
}

TEST_CASE("sentence similarity is a mean-embedding cosine") {
  auto v = Vocabulary::from_tokens({"a", "b", "c"});
  EmbeddingTable emb(static_cast<std::size_t>(v.size()),
                     Eigen::VectorXd::Zero(2));
  emb[static_cast<std::size_t>(v.id("a"))] = Eigen::Vector2d(1, 0);
  emb[static_cast<std::size_t>(v.id("b"))] = Eigen::Vector2d(0, 1);
  emb[static_cast<std::size_t>(v.id("c"))] = Eigen::Vector2d(1, 1);

  TokenSequence sa{{v.id("a")}}, sb{{v.id("b")}}, sc{{v.id("c")}};
  TokenSequence sab{{v.id("a"), v.id("b")}};
  CHECK(sentence_similarity(emb, sa, sa) == 1.0);
  CHECK(sentence_similarity(emb, sa, sb) == doctest::Approx(0.0));
  // mean(a, b) is parallel to c
  CHECK(sentence_similarity(emb, sab, sc) == doctest::Approx(1.0));
  // Tokens with zero embeddings (specials, OOV) are ignored in the mean.
  TokenSequence sa_pad{{v.id("a"), Vocabulary::kPad}};
  CHECK(sentence_similarity(emb, sa_pad, sa) == doctest::Approx(1.0));
}

TEST_CASE("skip-gram places co-occurring words closer than strangers") {
  // Two disjoint topic clusters; words inside a cluster co-occur constantly.
  std::vector<std::string> docs;
  auto rng = make_rng(9);
  for (int i = 0; i < 300; ++i)
    docs.push_back(i % 2 == 0 ? "cat dog pet fur" : "sea wave tide salt");
  auto v = Vocabulary::from_corpus(docs);
  std::vector<LabeledExample> corpus;
  for (const auto& d : docs) corpus.push_back({v.tokenize(d), 0});
  SkipGramConfig cfg;
  cfg.dim = 16;
  cfg.epochs = 2;
  cfg.seed = 4;
  auto emb = train_skipgram(corpus, v, cfg);
  auto sim = [&](const char* a, const char* b) {
    return cosine(emb[static_cast<std::size_t>(v.id(a))],
                  emb[static_cast<std::size_t>(v.id(b))]);
  };
  CHECK(sim("cat", "dog") > sim("cat", "wave"));
  CHECK(sim("sea", "tide") > sim("sea", "fur"));
}
