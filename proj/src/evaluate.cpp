#include "textpure/evaluate.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "textpure/rng.hpp"

namespace textpure {

using nlohmann::ordered_json;

ordered_json EvalReport::to_json() const {
  ordered_json per;
  per = ordered_json::array();
  for (const auto& o : outcomes)
    per.push_back({{"index", o.index},
                   {"correct_clean", o.correct_clean},
                   {"attack_success", o.attack_success},
                   {"queries", o.queries},
                   {"change_rate", o.change_rate}});
  return ordered_json{{"original_accuracy", original_accuracy},
                      {"after_attack_accuracy", after_attack_accuracy},
                      {"attack_success_rate", attack_success_rate},
                      {"mean_change_rate", mean_change_rate},
                      {"mean_queries", mean_queries},
                      {"total", total},
                      {"config_fingerprint", config_fingerprint},
                      {"outcomes", per}};
}

std::string EvalReport::to_table() const {
  std::ostringstream out;
  auto row = [&](const std::string& k, double v) {
    out << k;
    for (std::size_t i = k.size(); i < 28; ++i) out << ' ';
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%10.4f", v);
    out << buf << "\n";
  };
  row("original_accuracy", original_accuracy);
  row("after_attack_accuracy", after_attack_accuracy);
  row("attack_success_rate", attack_success_rate);
  row("mean_change_rate", mean_change_rate);
  row("mean_queries", mean_queries);
  out << "total";
  for (std::size_t i = 5; i < 28; ++i) out << ' ';
  out << total << "\n";
  return out.str();
}

EvalReport evaluate_defense(const Victim& victim,
                            const std::vector<LabeledExample>& examples,
                            const AttackConfig& cfg,
                            const AttackResources& res,
                            const std::string& fingerprint, int workers) {
  auto outcome = attack_dataset(victim, examples, cfg, res, workers);
  EvalReport report;
  report.total = static_cast<int>(examples.size());
  report.config_fingerprint = fingerprint;

  int correct = 0, survived = 0, successes = 0;
  double q_sum = 0.0, cr_sum = 0.0;
  for (std::size_t i = 0; i < outcome.results.size(); ++i) {
    const auto& r = outcome.results[i];
    ExampleOutcome o;
    o.index = static_cast<int>(i);
    o.correct_clean = r.attacked;
    o.attack_success = r.success;
    o.queries = r.queries;
    o.change_rate = r.change_rate;
    report.outcomes.push_back(o);
    if (r.attacked) {
      ++correct;
      q_sum += r.queries;
      if (r.success) {
        ++successes;
        cr_sum += r.change_rate;
      } else {
        ++survived;
      }
    }
  }
  if (report.total > 0) {
    report.original_accuracy = static_cast<double>(correct) / report.total;
    report.after_attack_accuracy = static_cast<double>(survived) / report.total;
  }
  report.attack_success_rate =
      correct > 0 ? static_cast<double>(successes) / correct : 0.0;
  report.mean_queries = correct > 0 ? q_sum / correct : 0.0;
  report.mean_change_rate = successes > 0 ? cr_sum / successes : 0.0;
  return report;
}

std::vector<DefenseSpec> default_ablation_grid() {
  return {
      {"no_defense", ClassifierKind::kNone, false, true, true},
      {"purify_vanilla", ClassifierKind::kVanilla, true, true, true},
      {"purify_combined", ClassifierKind::kCombined, true, true, true},
      {"purify_at", ClassifierKind::kAdversarial, true, true, true},
  };
}

std::unique_ptr<Victim> make_defense_victim(const DefenseSpec& spec,
                                            const AblationModels& models,
                                            const Vocabulary& vocab,
                                            const PurifyConfig& purify_cfg) {
  auto require = [](const JointModel* m, const char* what) {
    if (m == nullptr)
      throw std::invalid_argument(std::string("ablation needs model: ") + what);
    return m;
  };
  if (!spec.purify) {
    const JointModel* cls = spec.kind == ClassifierKind::kAdversarial
                                ? require(models.adversarial, "adversarial")
                            : spec.kind == ClassifierKind::kCombined
                                ? require(models.joint, "joint")
                                : require(models.classifier, "classifier");
    return std::make_unique<RawVictim>(*cls);
  }
  PurifyConfig cfg = purify_cfg;
  if (!spec.multi_recovery) cfg.n = 1;
  if (!spec.mask_insertion) cfg.noise.enable_insertion = false;
  switch (spec.kind) {
    case ClassifierKind::kVanilla:
      return std::make_unique<PurifiedVictim>(*require(models.mlm, "mlm"),
                                              *require(models.classifier, "classifier"),
                                              vocab, cfg);
    case ClassifierKind::kCombined:
      return std::make_unique<PurifiedVictim>(*require(models.joint, "joint"),
                                              *require(models.joint, "joint"),
                                              vocab, cfg);
    case ClassifierKind::kAdversarial:
      return std::make_unique<PurifiedVictim>(
          *require(models.adversarial, "adversarial"),
          *require(models.adversarial, "adversarial"), vocab, cfg);
    case ClassifierKind::kNone:
      break;
  }
  throw std::invalid_argument("purify defense needs a classifier kind");
}

std::vector<AblationRow> ablation_grid(
    const std::vector<LabeledExample>& examples, const AblationModels& models,
    const Vocabulary& vocab, const PurifyConfig& purify_cfg,
    const AttackConfig& attack_cfg, const AttackResources& res,
    const std::vector<DefenseSpec>& grid, const std::string& fingerprint,
    int workers) {
  std::vector<AblationRow> rows;
  for (const auto& spec : grid) {
    auto victim = make_defense_victim(spec, models, vocab, purify_cfg);
    rows.push_back({spec.name, evaluate_defense(*victim, examples, attack_cfg,
                                                res, fingerprint, workers)});
  }
  return rows;
}

std::vector<std::pair<int, double>> candidate_size_sweep(
    const Victim& victim, const std::vector<LabeledExample>& examples,
    const AttackConfig& base_cfg, const AttackResources& res,
    const std::vector<int>& k_values, const std::string& fingerprint,
    int workers) {
  std::vector<std::pair<int, double>> curve;
  for (int k : k_values) {
    AttackConfig cfg = base_cfg;
    cfg.k = k;
    auto report =
        evaluate_defense(victim, examples, cfg, res, fingerprint, workers);
    curve.emplace_back(k, report.after_attack_accuracy);
  }
  return curve;
}

void write_attack_traces(const std::string& path,
                         const std::vector<AttackResult>& results,
                         const std::vector<LabeledExample>& examples,
                         const Vocabulary& vocab) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write traces: " + path);
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    if (!r.attacked) continue;
    ordered_json subs = ordered_json::array();
    for (const auto& s : r.substitutions)
      subs.push_back({{"position", s.position},
                      {"original", vocab.surface(s.original_id)},
                      {"new", vocab.surface(s.new_id)}});
    ordered_json j{{"index", i},
                   {"original", vocab.detokenize(examples[i].text)},
                   {"adversarial", vocab.detokenize(r.adversarial)},
                   {"substitutions", subs},
                   {"queries", r.queries},
                   {"success", r.success}};
    out << j.dump() << "\n";
  }
}

std::vector<LabeledExample> sample_examples(
    const std::vector<LabeledExample>& examples, std::size_t n,
    std::uint64_t seed) {
  if (n >= examples.size()) return examples;
  std::vector<std::size_t> idx(examples.size());
  std::iota(idx.begin(), idx.end(), 0);
  auto rng = make_rng(derive_stream(seed, 0x73616d70ULL));
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(n);
  std::sort(idx.begin(), idx.end());
  std::vector<LabeledExample> out;
  out.reserve(n);
  for (auto i : idx) out.push_back(examples[i]);
  return out;
}

}  // namespace textpure
