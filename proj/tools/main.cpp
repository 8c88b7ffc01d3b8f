#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "textpure/pipeline.hpp"
#include "textpure/rng.hpp"
#include "textpure/synthetic.hpp"

namespace fs = std::filesystem;
using namespace textpure;

namespace {

struct Overrides {
  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string output_dir;
  int epochs = -1;
  int n = -1;
  int k = -1;
  int sample = -1;
  int workers = -1;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "experiment config (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--seed", seed, "override config seed")
        ->each([this](const std::string&) { seed_set = true; });
    cmd->add_option("--output-dir", output_dir, "override output directory");
    cmd->add_option("--epochs", epochs, "override training epochs");
    cmd->add_option("--recoveries,-n", n, "override purification count N");
    cmd->add_option("--candidates,-k", k, "override attack candidate size K");
    cmd->add_option("--sample", sample, "override evaluation sample size");
    cmd->add_option("--workers", workers, "override attack worker count");
  }

  ExperimentConfig load() const {
    ExperimentConfig cfg = ExperimentConfig::load(config_path);
    if (seed_set) cfg.seed = seed;
    if (!output_dir.empty()) cfg.output_dir = output_dir;
    if (epochs >= 0) cfg.train.epochs = epochs;
    if (n >= 0) cfg.purify.n = n;
    if (k >= 0) cfg.attack.k = k;
    if (sample >= 0) cfg.eval.sample = sample;
    if (workers >= 1) cfg.eval.workers = workers;
    cfg.propagate_seed();
    cfg.validate();
    return cfg;
  }
};

void write_text(const std::string& path, const std::string& body) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << body;
}

std::string prepare_output(const ExperimentConfig& cfg) {
  fs::create_directories(cfg.output_dir);
  write_text(cfg.output_dir + "/config.json", cfg.to_json().dump(2) + "\n");
  return cfg.output_dir;
}

std::vector<LabeledExample> eval_split(const CorpusBundle& bundle,
                                       const ExperimentConfig& cfg) {
  if (bundle.test.empty())
    throw std::runtime_error("this command needs data.test in the config");
  if (cfg.eval.sample <= 0 ||
      static_cast<std::size_t>(cfg.eval.sample) >= bundle.test.size())
    return bundle.test;
  return sample_examples(bundle.test,
                         static_cast<std::size_t>(cfg.eval.sample),
                         derive_stream(cfg.seed, 0x73616d70ULL));
}

int cmd_gen_corpus(const SyntheticSpec& spec, const std::string& out_dir) {
  SyntheticCorpus corpus = generate_synthetic(spec);
  write_synthetic_corpus(out_dir, corpus);
  write_manifest(out_dir);
  std::cout << "wrote " << corpus.train.size() << " train / "
            << corpus.test.size() << " test examples to " << out_dir << "\n";
  return 0;
}

int cmd_train(const Overrides& ov, const std::string& mode_name) {
  ExperimentConfig cfg = ov.load();
  TrainMode mode = parse_train_mode(mode_name);
  CorpusBundle bundle = load_corpus_bundle(cfg);
  std::string dir = prepare_output(cfg);

  TrainLog log;
  JointModel model = run_training(bundle, cfg, mode, &log);
  model.save(dir + "/model.bin", bundle.vocab.hash());
  write_train_log_csv(dir + "/train_log.csv", log);

  double acc = bundle.test.empty() ? clean_accuracy(model, bundle.train)
                                   : clean_accuracy(model, bundle.test);
  std::ostringstream summary;
  summary << "mode=" << train_mode_name(mode) << " epochs="
          << cfg.train.epochs << " final_clean_acc=" << acc << "\n";
  write_text(dir + "/summary.txt", summary.str());
  write_manifest(dir);
  std::cout << summary.str();
  return 0;
}

std::unique_ptr<Victim> build_victim(const std::string& defense,
                                     const JointModel& model,
                                     const JointModel* recover,
                                     const CorpusBundle& bundle,
                                     const ExperimentConfig& cfg) {
  if (defense == "none") return std::make_unique<RawVictim>(model);
  if (defense == "purify")
    return std::make_unique<PurifiedVictim>(recover ? *recover : model, model,
                                            bundle.vocab, cfg.purify);
  throw std::invalid_argument("defense must be none or purify");
}

int cmd_attack(const Overrides& ov, const std::string& model_path,
               const std::string& mlm_path, const std::string& defense) {
  ExperimentConfig cfg = ov.load();
  CorpusBundle bundle = load_corpus_bundle(cfg);
  std::string dir = prepare_output(cfg);

  JointModel model = JointModel::load(model_path, bundle.vocab.hash());
  std::unique_ptr<JointModel> mlm;
  if (!mlm_path.empty())
    mlm = std::make_unique<JointModel>(
        JointModel::load(mlm_path, bundle.vocab.hash()));
  auto victim = build_victim(defense, model, mlm.get(), bundle, cfg);

  AttackResources res = attack_resources(bundle);
  MlmProposer proposer =
      make_mlm_proposer(mlm ? *mlm : model);  // attacker-side proposals
  res.mlm = proposer;

  auto examples = eval_split(bundle, cfg);
  EvalReport report = evaluate_defense(*victim, examples, cfg.attack, res,
                                       cfg.fingerprint(), cfg.eval.workers);
  write_text(dir + "/report.json", report.to_json().dump(2) + "\n");
  write_text(dir + "/report.txt", report.to_table());

  auto outcome =
      attack_dataset(*victim, examples, cfg.attack, res, cfg.eval.workers);
  write_attack_traces(dir + "/traces.jsonl", outcome.results, examples,
                      bundle.vocab);
  write_manifest(dir);
  std::cout << report.to_table();
  return 0;
}

int cmd_ablate(const Overrides& ov, const std::string& classifier_path,
               const std::string& mlm_path, const std::string& joint_path,
               const std::string& adv_path) {
  ExperimentConfig cfg = ov.load();
  CorpusBundle bundle = load_corpus_bundle(cfg);
  std::string dir = prepare_output(cfg);

  std::uint64_t vh = bundle.vocab.hash();
  JointModel classifier = JointModel::load(classifier_path, vh);
  JointModel mlm = JointModel::load(mlm_path, vh);
  JointModel joint = JointModel::load(joint_path, vh);
  JointModel adv = JointModel::load(adv_path, vh);
  AblationModels models{&classifier, &mlm, &joint, &adv};

  AttackResources res = attack_resources(bundle);
  MlmProposer proposer = make_mlm_proposer(mlm);
  res.mlm = proposer;

  auto examples = eval_split(bundle, cfg);
  auto rows = ablation_grid(examples, models, bundle.vocab, cfg.purify,
                            cfg.attack, res, default_ablation_grid(),
                            cfg.fingerprint(), cfg.eval.workers);

  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  std::ostringstream table;
  for (const auto& row : rows) {
    out.push_back({{"defense", row.name}, {"report", row.report.to_json()}});
    table << "== " << row.name << " ==\n" << row.report.to_table() << "\n";
  }
  write_text(dir + "/ablation.json", out.dump(2) + "\n");
  write_text(dir + "/ablation.txt", table.str());
  write_manifest(dir);
  std::cout << table.str();
  return 0;
}

std::vector<int> parse_int_list(const std::string& csv) {
  std::vector<int> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
  if (out.empty()) throw std::invalid_argument("empty value list");
  return out;
}

int cmd_sweep(const Overrides& ov, const std::string& model_path,
              const std::string& mlm_path, const std::string& ks,
              const std::string& ns) {
  ExperimentConfig cfg = ov.load();
  CorpusBundle bundle = load_corpus_bundle(cfg);
  std::string dir = prepare_output(cfg);

  JointModel model = JointModel::load(model_path, bundle.vocab.hash());
  std::unique_ptr<JointModel> mlm;
  if (!mlm_path.empty())
    mlm = std::make_unique<JointModel>(
        JointModel::load(mlm_path, bundle.vocab.hash()));
  const JointModel& recover = mlm ? *mlm : model;

  AttackResources res = attack_resources(bundle);
  MlmProposer proposer = make_mlm_proposer(recover);
  res.mlm = proposer;
  auto examples = eval_split(bundle, cfg);

  nlohmann::ordered_json out;
  std::ostringstream table;
  if (!ks.empty()) {
    PurifiedVictim victim(recover, model, bundle.vocab, cfg.purify);
    auto points = candidate_size_sweep(victim, examples, cfg.attack, res,
                                       parse_int_list(ks), cfg.fingerprint(),
                                       cfg.eval.workers);
    auto arr = nlohmann::ordered_json::array();
    table << "K  after_attack_acc\n";
    for (auto [k, acc] : points) {
      arr.push_back({{"k", k}, {"after_attack_accuracy", acc}});
      table << k << "  " << acc << "\n";
    }
    out["candidate_size"] = arr;
  }
  if (!ns.empty()) {
    auto points = sweep_recovery_count(examples, recover, model, bundle.vocab,
                                       cfg.purify, parse_int_list(ns));
    auto arr = nlohmann::ordered_json::array();
    table << "N  clean_acc\n";
    for (auto [n, acc] : points) {
      arr.push_back({{"n", n}, {"clean_accuracy", acc}});
      table << n << "  " << acc << "\n";
    }
    out["recovery_count"] = arr;
  }
  write_text(dir + "/sweep.json", out.dump(2) + "\n");
  write_text(dir + "/sweep.txt", table.str());
  write_manifest(dir);
  std::cout << table.str();
  return 0;
}

int cmd_purify_inspect(const Overrides& ov, const std::string& model_path,
                       const std::string& text, int limit) {
  ExperimentConfig cfg = ov.load();
  CorpusBundle bundle = load_corpus_bundle(cfg);
  std::string dir = prepare_output(cfg);
  JointModel model = JointModel::load(model_path, bundle.vocab.hash());

  std::vector<TokenSequence> inputs;
  if (!text.empty()) {
    inputs.push_back(bundle.vocab.tokenize(text));
  } else {
    auto examples = eval_split(bundle, cfg);
    for (std::size_t i = 0;
         i < examples.size() && i < static_cast<std::size_t>(limit); ++i)
      inputs.push_back(examples[i].text);
  }

  std::ofstream out(dir + "/purify.jsonl");
  for (const auto& input : inputs) {
    NoiseSpec per_input = cfg.purify.noise;
    per_input.seed = derive_stream(per_input.seed, sequence_hash(input));
    auto copies = make_noisy_copies(input, bundle.vocab, per_input,
                                    cfg.purify.n, model.config().max_len);
    auto pred = purify_predict(input, model, model, bundle.vocab, cfg.purify);
    nlohmann::ordered_json rec;
    rec["original"] = bundle.vocab.detokenize(input);
    auto noisy = nlohmann::ordered_json::array();
    auto recovered = nlohmann::ordered_json::array();
    auto per_copy = nlohmann::ordered_json::array();
    for (int i = 0; i < cfg.purify.n; ++i) {
      noisy.push_back(bundle.vocab.detokenize(copies[i]));
      recovered.push_back(bundle.vocab.detokenize(pred.recoveries[i]));
      Vec p = softmax(model.classify_logits(pred.recoveries[i]));
      per_copy.push_back(std::vector<double>(p.data(), p.data() + p.size()));
    }
    rec["noisy"] = noisy;
    rec["recovered"] = recovered;
    rec["per_copy_probs"] = per_copy;
    rec["mean_probs"] =
        std::vector<double>(pred.probs.data(), pred.probs.data() + pred.probs.size());
    rec["label"] = pred.label;
    out << rec.dump() << "\n";
  }
  out.close();
  write_manifest(dir);
  std::cout << "inspected " << inputs.size() << " inputs -> " << dir
            << "/purify.jsonl\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"adversarial purification for text classification"};
  app.require_subcommand(1);

  SyntheticSpec spec;
  std::string gen_out = "data/synthetic";
  auto* gen = app.add_subcommand("gen-corpus", "generate the synthetic corpus");
  gen->add_option("--out", gen_out, "output directory");
  gen->add_option("--train-size", spec.train_size);
  gen->add_option("--test-size", spec.test_size);
  gen->add_option("--seed", spec.seed);
  gen->add_option("--filler-purity", spec.filler_purity);
  gen->add_option("--filler-opposite", spec.filler_opposite);
  gen->add_option("--keywords", spec.keywords_per_sentence);
  gen->add_option("--fillers", spec.fillers_per_sentence);
  gen->add_option("--keyword-noise", spec.keyword_noise);

  Overrides train_ov;
  std::string mode = "joint";
  auto* train = app.add_subcommand("train", "train a model");
  train_ov.attach(train);
  train->add_option("--mode", mode, "plain|mlm|joint|adv");

  Overrides attack_ov;
  std::string model_path, mlm_path, defense = "purify";
  auto* attack = app.add_subcommand("attack", "attack a (defended) victim");
  attack_ov.attach(attack);
  attack->add_option("--model", model_path, "classifier checkpoint")
      ->required()
      ->check(CLI::ExistingFile);
  attack->add_option("--mlm-checkpoint", mlm_path,
                     "separate recovery model (vanilla setup)")
      ->check(CLI::ExistingFile);
  attack->add_option("--defense", defense, "none|purify");

  Overrides ablate_ov;
  std::string cls_path, amlm_path, joint_path, adv_path;
  auto* ablate = app.add_subcommand("ablate", "run the four-way defense grid");
  ablate_ov.attach(ablate);
  ablate->add_option("--classifier", cls_path)->required()->check(CLI::ExistingFile);
  ablate->add_option("--mlm", amlm_path)->required()->check(CLI::ExistingFile);
  ablate->add_option("--joint", joint_path)->required()->check(CLI::ExistingFile);
  ablate->add_option("--adv", adv_path)->required()->check(CLI::ExistingFile);

  Overrides sweep_ov;
  std::string s_model, s_mlm, ks, ns;
  auto* sweep = app.add_subcommand("sweep", "candidate-size and recovery sweeps");
  sweep_ov.attach(sweep);
  sweep->add_option("--model", s_model)->required()->check(CLI::ExistingFile);
  sweep->add_option("--mlm-checkpoint", s_mlm)->check(CLI::ExistingFile);
  sweep->add_option("--ks", ks, "comma-separated candidate sizes");
  sweep->add_option("--ns", ns, "comma-separated recovery counts");

  Overrides insp_ov;
  std::string i_model, i_text;
  int i_limit = 5;
  auto* insp = app.add_subcommand("purify-inspect",
                                  "dump noisy copies and recoveries");
  insp_ov.attach(insp);
  insp->add_option("--model", i_model)->required()->check(CLI::ExistingFile);
  insp->add_option("--text", i_text, "single input to inspect");
  insp->add_option("--limit", i_limit, "test examples to inspect");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_gen_corpus(spec, gen_out);
    if (train->parsed()) return cmd_train(train_ov, mode);
    if (attack->parsed())
      return cmd_attack(attack_ov, model_path, mlm_path, defense);
    if (ablate->parsed())
      return cmd_ablate(ablate_ov, cls_path, amlm_path, joint_path, adv_path);
    if (sweep->parsed()) return cmd_sweep(sweep_ov, s_model, s_mlm, ks, ns);
    if (insp->parsed())
      return cmd_purify_inspect(insp_ov, i_model, i_text, i_limit);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
