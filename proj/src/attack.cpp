#include "textpure/attack.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>
#include <thread>

namespace textpure {
namespace {

int argmax(const Eigen::VectorXd& v) {
  int best = 0;
  for (int i = 1; i < v.size(); ++i)
    if (v(i) > v(best)) best = i;
  return best;
}

}  // namespace

void AttackConfig::validate() const {
  if (k < 0) throw std::invalid_argument("attack.k must be >= 0");
  if (sim_threshold < -1.0 || sim_threshold > 1.0)
    throw std::invalid_argument("attack.sim_threshold must be in [-1,1]");
  if (max_change_rate <= 0.0 || max_change_rate > 1.0)
    throw std::invalid_argument("attack.max_change_rate must be in (0,1]");
  if (query_budget < 0)
    throw std::invalid_argument("attack.query_budget must be >= 0");
}

bool is_substitutable(int id, const Vocabulary& vocab) {
  if (vocab.is_special(id)) return false;
  const std::string& s = vocab.surface(id);
  return std::any_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isalnum(c); });
}

std::vector<int> word_importance(const Victim& victim,
                                 const TokenSequence& text, int label,
                                 const Vocabulary& vocab, int& queries,
                                 int query_budget) {
  double base = victim.scores(text)(label);
  ++queries;
  std::vector<std::pair<double, int>> drops;
  for (int pos = 0; pos < text.length(); ++pos) {
    if (!is_substitutable(text.ids[static_cast<std::size_t>(pos)], vocab))
      continue;
    if (queries >= query_budget) break;
    TokenSequence probe = text;
    probe.ids[static_cast<std::size_t>(pos)] = Vocabulary::kUnk;
    double p = victim.scores(probe)(label);
    ++queries;
    drops.emplace_back(base - p, pos);
  }
  std::stable_sort(drops.begin(), drops.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  std::vector<int> order;
  order.reserve(drops.size());
  for (auto& [drop, pos] : drops) order.push_back(pos);
  return order;
}

std::vector<int> get_candidates(int original_id, int pos,
                                const TokenSequence& text,
                                const AttackConfig& cfg,
                                const AttackResources& res) {
  if (cfg.k == 0) return {};
  std::vector<int> out;
  if (cfg.source == CandidateSource::kSynonymTable) {
    if (res.synonyms == nullptr)
      throw std::invalid_argument("synonym table required for this source");
    for (const auto& [id, sim] : res.synonyms->of(original_id)) {
      if (sim < cfg.sim_threshold) continue;
      out.push_back(id);
      if (static_cast<int>(out.size()) == cfg.k) break;
    }
  } else {
    if (!res.mlm)
      throw std::invalid_argument("MLM proposer required for this source");
    if (res.vocab == nullptr)
      throw std::invalid_argument("vocabulary required for MLM candidates");
    TokenSequence masked = text;
    masked.ids[static_cast<std::size_t>(pos)] = Vocabulary::kMask;
    for (int id : res.mlm(masked, pos, cfg.k + 1)) {
      if (id == original_id || res.vocab->is_special(id)) continue;
      out.push_back(id);
      if (static_cast<int>(out.size()) == cfg.k) break;
    }
  }
  return out;
}

AttackResult greedy_attack(const Victim& victim, const LabeledExample& example,
                           const AttackConfig& cfg,
                           const AttackResources& res) {
  cfg.validate();
  if (res.vocab == nullptr) throw std::invalid_argument("vocabulary required");
  const Vocabulary& vocab = *res.vocab;
  const int label = example.label;

  AttackResult result;
  result.adversarial = example.text;

  Eigen::VectorXd base_scores = victim.scores(example.text);
  result.queries = 1;
  result.final_scores = base_scores;
  if (argmax(base_scores) != label) return result;  // attack is moot
  result.attacked = true;

  int n_subst = 0;
  for (int id : example.text.ids)
    if (is_substitutable(id, vocab)) ++n_subst;
  if (n_subst == 0) return result;
  const int max_changes = std::max(
      1, static_cast<int>(cfg.max_change_rate * n_subst));

  auto order = word_importance(victim, example.text, label, vocab,
                               result.queries, cfg.query_budget);
  double cur_prob = base_scores(label);
  TokenSequence& cur = result.adversarial;

  for (int pos : order) {
    if (static_cast<int>(result.substitutions.size()) >= max_changes) break;
    if (result.queries >= cfg.query_budget) break;
    const int original_id = example.text.ids[static_cast<std::size_t>(pos)];
    auto candidates = get_candidates(original_id, pos, cur, cfg, res);

    int best_id = -1;
    double best_prob = cur_prob;
    Eigen::VectorXd best_scores;
    bool flipped = false;
    for (int cand : candidates) {
      if (result.queries >= cfg.query_budget) break;
      TokenSequence trial = cur;
      trial.ids[static_cast<std::size_t>(pos)] = cand;
      if (res.embeddings != nullptr &&
          sentence_similarity(*res.embeddings, example.text, trial) <
              cfg.sentence_sim_threshold)
        continue;
      Eigen::VectorXd s = victim.scores(trial);
      ++result.queries;
      if (argmax(s) != label) {
        best_id = cand;
        best_scores = s;
        flipped = true;
        break;
      }
      if (s(label) < best_prob) {
        best_prob = s(label);
        best_id = cand;
        best_scores = s;
      }
    }

    if (best_id >= 0) {
      cur.ids[static_cast<std::size_t>(pos)] = best_id;
      result.substitutions.push_back({pos, original_id, best_id});
      result.final_scores = best_scores;
      if (flipped) {
        result.success = true;
        break;
      }
      cur_prob = best_prob;
    }
  }

  result.change_rate =
      static_cast<double>(result.substitutions.size()) / n_subst;
  return result;
}

DatasetAttackOutcome attack_dataset(const Victim& victim,
                                    const std::vector<LabeledExample>& examples,
                                    const AttackConfig& cfg,
                                    const AttackResources& res, int workers) {
  DatasetAttackOutcome out;
  out.results.resize(examples.size());

  auto run_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i)
      out.results[i] = greedy_attack(victim, examples[i], cfg, res);
  };
  if (workers <= 1 || examples.size() < 2) {
    run_range(0, examples.size());
  } else {
    std::vector<std::thread> pool;
    const std::size_t n = examples.size();
    const std::size_t w = std::min<std::size_t>(static_cast<std::size_t>(workers), n);
    for (std::size_t t = 0; t < w; ++t)
      pool.emplace_back([&, t] {
        for (std::size_t i = t; i < n; i += w)
          out.results[i] = greedy_attack(victim, examples[i], cfg, res);
      });
    for (auto& th : pool) th.join();
  }

  auto& s = out.summary;
  s.total = static_cast<int>(examples.size());
  double q_sum = 0.0, cr_sum = 0.0;
  for (const auto& r : out.results) {
    if (!r.attacked) continue;
    ++s.attacked;
    q_sum += r.queries;
    if (r.success) {
      ++s.successes;
      cr_sum += r.change_rate;
    }
  }
  s.mean_queries = s.attacked ? q_sum / s.attacked : 0.0;
  s.mean_change_rate = s.successes ? cr_sum / s.successes : 0.0;
  return out;
}

}  // namespace textpure
