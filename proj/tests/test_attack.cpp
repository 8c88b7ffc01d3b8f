#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <map>
#include <vector>

#include "textpure/attack.hpp"
#include "textpure/rng.hpp"
#include "textpure/train.hpp"
#include "textpure/victims.hpp"

using namespace textpure;

namespace {

struct FnVictim : Victim {
  std::function<Eigen::VectorXd(const TokenSequence&)> fn;
  Eigen::VectorXd scores(const TokenSequence& text) const override {
    return fn(text);
  }
};

// Additive two-class victim: p(class 1) = sigmoid(sum of per-token weights).
// UNK and other unknown ids carry weight 0.
FnVictim additive_victim(std::map<int, double> weights) {
  FnVictim v;
  v.fn = [weights = std::move(weights)](const TokenSequence& text) {
    double sum = 0.0;
    for (int id : text.ids) {
      auto it = weights.find(id);
      if (it != weights.end()) sum += it->second;
    }
    double p1 = 1.0 / (1.0 + std::exp(-sum));
    Eigen::VectorXd s(2);
    s << 1.0 - p1, p1;
    return s;
  };
  return v;
}

// Vocabulary with three interchangeable word groups; embeddings inside a
// group share a direction (cosine 1), across groups they are orthogonal.
struct Toybox {
  Vocabulary vocab;
  EmbeddingTable embeddings;
  SynonymTable synonyms;
  AttackResources res;

  Toybox() {
    std::vector<std::string> words;
    for (char g : {'a', 'b', 'c'})
      for (int i = 0; i < 3; ++i) words.push_back(std::string(1, g) + std::to_string(i));
    words.push_back(".");
    vocab = Vocabulary::from_tokens(words);
    embeddings.assign(static_cast<std::size_t>(vocab.size()),
                      Eigen::VectorXd::Zero(3));
    for (char g : {'a', 'b', 'c'})
      for (int i = 0; i < 3; ++i) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(3);
        e(g - 'a') = 1.0 + 0.01 * i;  // same direction, distinct magnitude
        embeddings[static_cast<std::size_t>(
            vocab.id(std::string(1, g) + std::to_string(i)))] = e;
      }
    synonyms = build_synonym_table(embeddings, 8, 0.5);
    res.synonyms = &synonyms;
    res.embeddings = &embeddings;
    res.vocab = &vocab;
  }
};

}  // namespace

TEST_CASE("substitutable tokens are non-special words with alnum content") {
  Toybox t;
  CHECK(is_substitutable(t.vocab.id("a0"), t.vocab));
  CHECK_FALSE(is_substitutable(Vocabulary::kPad, t.vocab));
  CHECK_FALSE(is_substitutable(Vocabulary::kUnk, t.vocab));
  CHECK_FALSE(is_substitutable(Vocabulary::kMask, t.vocab));
  CHECK_FALSE(is_substitutable(t.vocab.id("."), t.vocab));
}

TEST_CASE("word importance ranks by true-class probability drop") {
  Toybox t;
  int a0 = t.vocab.id("a0"), b0 = t.vocab.id("b0"), c0 = t.vocab.id("c0");
  // Label 1; dropping a heavier positive weight hurts p(1) more.
  auto victim = additive_victim({{a0, 0.5}, {b0, 2.0}, {c0, 1.0}});
  TokenSequence text{{a0, b0, c0, t.vocab.id(".")}};
  int queries = 0;
  auto order = word_importance(victim, text, 1, t.vocab, queries);
  REQUIRE(order.size() == 3);  // "." is not substitutable
  CHECK(order[0] == 1);        // b0, weight 2.0
  CHECK(order[1] == 2);        // c0, weight 1.0
  CHECK(order[2] == 0);        // a0, weight 0.5
  CHECK(queries == 4);         // base + one probe per substitutable position
}

TEST_CASE("importance probing respects the query budget") {
  Toybox t;
  auto victim = additive_victim({});
  TokenSequence text{{t.vocab.id("a0"), t.vocab.id("a1"), t.vocab.id("a2"),
                      t.vocab.id("b0"), t.vocab.id("b1")}};
  int queries = 0;
  auto order = word_importance(victim, text, 0, t.vocab, queries, 3);
  CHECK(queries <= 3);
  CHECK(order.size() == 2);  // base query + 2 probes fit in the budget
}

TEST_CASE("candidate generation from the synonym table") {
  Toybox t;
  AttackConfig cfg;
  cfg.k = 8;
  cfg.sim_threshold = 0.5;
  TokenSequence text{{t.vocab.id("a0")}};
  auto cands = get_candidates(t.vocab.id("a0"), 0, text, cfg, t.res);
  REQUIRE(cands.size() == 2);  // a1, a2; other groups are orthogonal
  for (int id : cands) {
    CHECK(id != t.vocab.id("a0"));
    CHECK(t.vocab.surface(id)[0] == 'a');
  }
  cfg.k = 1;
  CHECK(get_candidates(t.vocab.id("a0"), 0, text, cfg, t.res).size() == 1);
  cfg.k = 0;
  CHECK(get_candidates(t.vocab.id("a0"), 0, text, cfg, t.res).empty());
  cfg.k = 8;
  cfg.sim_threshold = 1.1;  // nothing reaches an impossible threshold
  CHECK(get_candidates(t.vocab.id("a0"), 0, text, cfg, t.res).empty());
}

TEST_CASE("MLM candidate source masks the slot and filters specials") {
  Toybox t;
  AttackConfig cfg;
  cfg.k = 3;
  cfg.source = CandidateSource::kMlm;
  AttackResources res = t.res;
  int seen_mask = 0;
  res.mlm = [&](const TokenSequence& masked, int pos, int k) {
    CHECK(masked.ids[static_cast<std::size_t>(pos)] == Vocabulary::kMask);
    ++seen_mask;
    // Propose specials, the original and normal words; only normal non-original
    // ids may survive.
    return std::vector<int>{Vocabulary::kPad, t.vocab.id("a0"),
                            t.vocab.id("b1"), t.vocab.id("c2"),
                            t.vocab.id("a1")};
  };
  TokenSequence text{{t.vocab.id("a0"), t.vocab.id("b0")}};
  auto cands = get_candidates(t.vocab.id("a0"), 0, text, cfg, res);
  CHECK(seen_mask == 1);
  REQUIRE(cands.size() == 3);
  CHECK(cands == std::vector<int>{t.vocab.id("b1"), t.vocab.id("c2"),
                                  t.vocab.id("a1")});
}

TEST_CASE("already-misclassified examples are not attacked") {
  Toybox t;
  auto victim = additive_victim({{t.vocab.id("a0"), 1.0}});
  AttackConfig cfg;
  LabeledExample ex{{{t.vocab.id("a0")}}, 0};  // victim says 1, label is 0
  auto r = greedy_attack(victim, ex, cfg, t.res);
  CHECK_FALSE(r.attacked);
  CHECK_FALSE(r.success);
  CHECK(r.queries == 1);
  CHECK(r.adversarial == ex.text);
}

TEST_CASE("greedy attack finds the same flips as brute force on additive victims") {
  Toybox t;
  // Group-a words pull towards class 1 with different strengths; group b and c
  // words push down. Candidates stay within a group, so the attacker can only
  // reweight within groups.
  std::map<int, double> w = {
      {t.vocab.id("a0"), 1.2}, {t.vocab.id("a1"), 0.3},  {t.vocab.id("a2"), -0.9},
      {t.vocab.id("b0"), 0.8}, {t.vocab.id("b1"), -0.2}, {t.vocab.id("b2"), 0.1},
      {t.vocab.id("c0"), 0.4}, {t.vocab.id("c1"), 0.6},  {t.vocab.id("c2"), -0.5},
  };
  auto victim = additive_victim(w);
  AttackConfig cfg;
  cfg.k = 8;
  cfg.max_change_rate = 1.0;
  cfg.sentence_sim_threshold = 0.0;
  cfg.query_budget = 10000;

  auto rng = make_rng(55);
  std::uniform_int_distribution<int> gi(0, 2);
  int greedy_successes = 0, brute_flips = 0;
  for (int trial = 0; trial < 50; ++trial) {
    // Random 5-token sentence over the nine words.
    TokenSequence text;
    for (int i = 0; i < 5; ++i) {
      char g = static_cast<char>('a' + gi(rng));
      text.ids.push_back(t.vocab.id(std::string(1, g) + std::to_string(gi(rng))));
    }
    LabeledExample ex{text, 0};
    double base = victim.scores(text)(1);
    if (base >= 0.5) continue;  // misclassified; skip

    // Brute-force oracle: per position, the within-group candidate assignment
    // maximizing p(1); additivity makes per-position choice independent.
    double best_sum = 0.0;
    for (int id : text.ids) best_sum += w.at(id);
    double max_sum = 0.0;
    for (std::size_t i = 0; i < text.ids.size(); ++i) {
      double best = w.at(text.ids[i]);
      char g = t.vocab.surface(text.ids[i])[0];
      for (int j = 0; j < 3; ++j)
        best = std::max(best, w.at(t.vocab.id(std::string(1, g) + std::to_string(j))));
      max_sum += best;
    }
    bool flip_possible = max_sum > 0.0;

    auto r = greedy_attack(victim, ex, cfg, t.res);
    REQUIRE(r.attacked);
    if (flip_possible) ++brute_flips;
    if (r.success) {
      ++greedy_successes;
      // Soundness: the final text genuinely flips the victim.
      auto s = victim.scores(r.adversarial);
      CHECK(s(1) > s(0));
      CHECK(flip_possible);
      // Every substitution came from the candidate machinery.
      for (const auto& sub : r.substitutions) {
        CHECK(t.vocab.surface(sub.new_id)[0] ==
              t.vocab.surface(sub.original_id)[0]);
        CHECK(sub.new_id != sub.original_id);
      }
      CHECK(r.substitutions.size() <= text.ids.size());
    }
  }
  CHECK(brute_flips > 5);
  CHECK(greedy_successes == brute_flips);
}

TEST_CASE("the change budget bounds substitutions") {
  Toybox t;
  std::map<int, double> w = {{t.vocab.id("a0"), -1.0}, {t.vocab.id("a1"), 1.2},
                             {t.vocab.id("b0"), -1.0}, {t.vocab.id("b1"), 1.2},
                             {t.vocab.id("c0"), -1.0}, {t.vocab.id("c1"), 1.2}};
  auto victim = additive_victim(w);
  TokenSequence text{{t.vocab.id("a0"), t.vocab.id("b0"), t.vocab.id("c0")}};
  LabeledExample ex{text, 0};
  AttackConfig cfg;
  cfg.k = 8;
  cfg.max_change_rate = 0.34;  // one of three positions
  cfg.sentence_sim_threshold = 0.0;
  auto r = greedy_attack(victim, ex, cfg, t.res);
  CHECK(r.attacked);
  CHECK(r.substitutions.size() <= 1);
  CHECK_FALSE(r.success);  // one substitution cannot push the sum positive
}

TEST_CASE("query budget caps total victim calls") {
  Toybox t;
  int calls = 0;
  FnVictim victim;
  victim.fn = [&](const TokenSequence& text) {
    ++calls;
    Eigen::VectorXd s(2);
    s << 0.6, 0.4;
    return s;
  };
  TokenSequence text;
  for (int i = 0; i < 6; ++i)
    text.ids.push_back(t.vocab.id("a" + std::to_string(i % 3)));
  LabeledExample ex{text, 0};
  AttackConfig cfg;
  cfg.k = 8;
  cfg.query_budget = 5;
  cfg.sentence_sim_threshold = 0.0;
  auto r = greedy_attack(victim, ex, cfg, t.res);
  CHECK(r.queries <= 5);
  CHECK(calls == r.queries);
}

TEST_CASE("sentence similarity constraint prunes distant rewrites") {
  Toybox t;
  // A victim that flips whenever any group-b word appears.
  FnVictim victim;
  victim.fn = [&](const TokenSequence& text) {
    bool has_b = false;
    for (int id : text.ids)
      if (t.vocab.surface(id)[0] == 'b') has_b = true;
    Eigen::VectorXd s(2);
    if (has_b)
      s << 0.1, 0.9;
    else
      s << 0.9, 0.1;
    return s;
  };
  // Candidate set contains only same-group words, which keep the sentence mean
  // identical in direction -> constraint passes and no b-word is reachable.
  TokenSequence text{{t.vocab.id("a0"), t.vocab.id("a1")}};
  LabeledExample ex{text, 0};
  AttackConfig cfg;
  cfg.k = 8;
  cfg.sentence_sim_threshold = 0.99;
  auto r = greedy_attack(victim, ex, cfg, t.res);
  CHECK(r.attacked);
  CHECK_FALSE(r.success);
  for (const auto& sub : r.substitutions)
    CHECK(t.vocab.surface(sub.new_id)[0] == 'a');
}

TEST_CASE("larger candidate sets are never worse on additive victims") {
  Toybox t;
  std::map<int, double> w = {
      {t.vocab.id("a0"), 0.9},  {t.vocab.id("a1"), 0.1}, {t.vocab.id("a2"), -0.8},
      {t.vocab.id("b0"), 0.7},  {t.vocab.id("b1"), 0.2}, {t.vocab.id("b2"), -0.6},
      {t.vocab.id("c0"), 0.5},  {t.vocab.id("c1"), 0.3}, {t.vocab.id("c2"), -0.4},
  };
  auto victim = additive_victim(w);
  AttackConfig cfg;
  cfg.max_change_rate = 1.0;
  cfg.sentence_sim_threshold = 0.0;
  cfg.query_budget = 10000;

  auto rng = make_rng(66);
  std::uniform_int_distribution<int> gi(0, 2);
  for (int trial = 0; trial < 30; ++trial) {
    TokenSequence text;
    for (int i = 0; i < 5; ++i) {
      char g = static_cast<char>('a' + gi(rng));
      text.ids.push_back(t.vocab.id(std::string(1, g) + std::to_string(gi(rng))));
    }
    LabeledExample ex{text, 0};
    if (victim.scores(text)(1) >= 0.5) continue;
    cfg.k = 1;
    bool small = greedy_attack(victim, ex, cfg, t.res).success;
    cfg.k = 8;
    bool large = greedy_attack(victim, ex, cfg, t.res).success;
    if (small) CHECK(large);
  }
}

TEST_CASE("attack_dataset is deterministic across worker counts") {
  Toybox t;
  std::map<int, double> w = {
      {t.vocab.id("a0"), 0.9},  {t.vocab.id("a1"), -0.5}, {t.vocab.id("a2"), 0.2},
      {t.vocab.id("b0"), 0.4},  {t.vocab.id("b1"), -0.3}, {t.vocab.id("b2"), 0.6},
      {t.vocab.id("c0"), -0.2}, {t.vocab.id("c1"), 0.8},  {t.vocab.id("c2"), 0.1},
  };
  auto victim = additive_victim(w);
  std::vector<LabeledExample> examples;
  auto rng = make_rng(88);
  std::uniform_int_distribution<int> gi(0, 2);
  for (int e = 0; e < 12; ++e) {
    TokenSequence text;
    for (int i = 0; i < 5; ++i) {
      char g = static_cast<char>('a' + gi(rng));
      text.ids.push_back(t.vocab.id(std::string(1, g) + std::to_string(gi(rng))));
    }
    examples.push_back({text, e % 2});
  }
  AttackConfig cfg;
  cfg.k = 8;
  cfg.sentence_sim_threshold = 0.0;
  auto serial = attack_dataset(victim, examples, cfg, t.res, 1);
  auto parallel = attack_dataset(victim, examples, cfg, t.res, 3);
  REQUIRE(serial.results.size() == parallel.results.size());
  for (std::size_t i = 0; i < serial.results.size(); ++i) {
    CHECK(serial.results[i].adversarial == parallel.results[i].adversarial);
    CHECK(serial.results[i].success == parallel.results[i].success);
    CHECK(serial.results[i].queries == parallel.results[i].queries);
  }
  CHECK(serial.summary.total == 12);
  CHECK(serial.summary.attacked == parallel.summary.attacked);
  CHECK(serial.summary.successes == parallel.summary.successes);
  // Summary bucket conservation.
  int succ = 0, attacked = 0;
  for (const auto& r : serial.results) {
    attacked += r.attacked;
    succ += r.success;
  }
  CHECK(serial.summary.attacked == attacked);
  CHECK(serial.summary.successes == succ);
}

TEST_CASE("AttackConfig validation") {
  AttackConfig cfg;
  cfg.k = -1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.k = 8;
  cfg.max_change_rate = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.max_change_rate = 0.4;
  cfg.sim_threshold = 2.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.sim_threshold = 0.5;
  CHECK_NOTHROW(cfg.validate());
}
