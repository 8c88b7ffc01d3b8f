#include "textpure/config.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "textpure/rng.hpp"

namespace textpure {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void DataConfig::validate() const {
  if (train_path.empty()) throw std::invalid_argument("data.train is required");
  if (num_classes < 2)
    throw std::invalid_argument("data.num_classes must be >= 2");
  parse_format(format);  // throws on unknown format
}

void EvalConfig::validate() const {
  if (sample < 0) throw std::invalid_argument("eval.sample must be >= 0");
  if (workers < 1) throw std::invalid_argument("eval.workers must be >= 1");
}

namespace {

template <typename T>
void maybe(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  ExperimentConfig c;
  maybe(j, "seed", c.seed);
  maybe(j, "output_dir", c.output_dir);
  if (j.contains("data")) {
    const auto& d = j.at("data");
    maybe(d, "train", c.data.train_path);
    maybe(d, "test", c.data.test_path);
    maybe(d, "embeddings", c.data.embeddings_fixture);
    maybe(d, "format", c.data.format);
    maybe(d, "num_classes", c.data.num_classes);
  }
  if (j.contains("model")) {
    const auto& m = j.at("model");
    maybe(m, "dim", c.model.dim);
    maybe(m, "heads", c.model.heads);
    maybe(m, "blocks", c.model.blocks);
    maybe(m, "ffn_dim", c.model.ffn_dim);
    maybe(m, "max_len", c.model.max_len);
  }
  if (j.contains("train")) {
    const auto& t = j.at("train");
    maybe(t, "lr", c.train.lr);
    maybe(t, "batch_size", c.train.batch_size);
    maybe(t, "epochs", c.train.epochs);
    maybe(t, "w_c", c.train.w_c);
    maybe(t, "w_mlm", c.train.w_mlm);
  }
  if (j.contains("adv")) {
    const auto& a = j.at("adv");
    maybe(a, "adv_steps", c.adv.adv_steps);
    maybe(a, "alpha", c.adv.alpha);
    maybe(a, "eps", c.adv.eps_ball);
    maybe(a, "sigma", c.adv.sigma);
    maybe(a, "raw_sum_update", c.adv.raw_sum_update);
    maybe(a, "disable_noise_loss", c.adv.disable_noise_loss);
  }
  if (j.contains("noise")) {
    const auto& n = j.at("noise");
    maybe(n, "mask_rate", c.noise.mask_rate);
    maybe(n, "insert_rate", c.noise.insert_rate);
    maybe(n, "enable_insertion", c.noise.enable_insertion);
  }
  if (j.contains("purify")) {
    const auto& p = j.at("purify");
    maybe(p, "n", c.purify.n);
    maybe(p, "average_logits", c.purify.average_logits);
  }
  if (j.contains("attack")) {
    const auto& a = j.at("attack");
    maybe(a, "k", c.attack.k);
    maybe(a, "sim_threshold", c.attack.sim_threshold);
    maybe(a, "sentence_sim_threshold", c.attack.sentence_sim_threshold);
    maybe(a, "max_change_rate", c.attack.max_change_rate);
    maybe(a, "query_budget", c.attack.query_budget);
    std::string source = "synonym_table";
    maybe(a, "source", source);
    if (source == "synonym_table")
      c.attack.source = CandidateSource::kSynonymTable;
    else if (source == "mlm")
      c.attack.source = CandidateSource::kMlm;
    else
      throw std::invalid_argument("attack.source must be synonym_table or mlm");
  }
  if (j.contains("eval")) {
    const auto& e = j.at("eval");
    maybe(e, "sample", c.eval.sample);
    maybe(e, "workers", c.eval.workers);
  }
  c.propagate_seed();
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  json j = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  return from_json(j);
}

void ExperimentConfig::propagate_seed() {
  train.seed = seed;
  adv.base = train;
  noise.seed = derive_stream(seed, 0x6e6f69ULL);
  purify.noise = noise;
  attack.seed = derive_stream(seed, 0x61746bULL);
  model.seed = seed;
}

ordered_json ExperimentConfig::to_json() const {
  return ordered_json{
      {"seed", seed},
      {"output_dir", output_dir},
      {"data",
       {{"train", data.train_path},
        {"test", data.test_path},
        {"embeddings", data.embeddings_fixture},
        {"format", data.format},
        {"num_classes", data.num_classes}}},
      {"model",
       {{"dim", model.dim},
        {"heads", model.heads},
        {"blocks", model.blocks},
        {"ffn_dim", model.ffn_dim},
        {"max_len", model.max_len}}},
      {"train",
       {{"lr", train.lr},
        {"batch_size", train.batch_size},
        {"epochs", train.epochs},
        {"w_c", train.w_c},
        {"w_mlm", train.w_mlm}}},
      {"adv",
       {{"adv_steps", adv.adv_steps},
        {"alpha", adv.alpha},
        {"eps", adv.eps_ball},
        {"sigma", adv.sigma},
        {"raw_sum_update", adv.raw_sum_update},
        {"disable_noise_loss", adv.disable_noise_loss}}},
      {"noise",
       {{"mask_rate", noise.mask_rate},
        {"insert_rate", noise.insert_rate},
        {"enable_insertion", noise.enable_insertion}}},
      {"purify", {{"n", purify.n}, {"average_logits", purify.average_logits}}},
      {"attack",
       {{"k", attack.k},
        {"sim_threshold", attack.sim_threshold},
        {"sentence_sim_threshold", attack.sentence_sim_threshold},
        {"max_change_rate", attack.max_change_rate},
        {"query_budget", attack.query_budget},
        {"source", attack.source == CandidateSource::kMlm ? "mlm"
                                                          : "synonym_table"}}},
      {"eval", {{"sample", eval.sample}, {"workers", eval.workers}}}};
}

void ExperimentConfig::validate() const {
  data.validate();
  train.validate();
  adv.validate();
  noise.validate();
  purify.validate();
  attack.validate();
  eval.validate();
  if (output_dir.empty())
    throw std::invalid_argument("output_dir is required");
}

std::string ExperimentConfig::fingerprint() const {
  return hex64(fnv1a(to_json().dump()));
}

void write_manifest(const std::string& dir) {
  ordered_json files = ordered_json::object();
  std::vector<fs::path> paths;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    if (entry.path().filename() == "manifest.json") continue;
    paths.push_back(entry.path());
  }
  std::sort(paths.begin(), paths.end());
  for (const auto& p : paths) {
    std::ifstream in(p, std::ios::binary);
    std::string data((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    files[fs::relative(p, dir).generic_string()] = hex64(fnv1a(data));
  }
  std::ofstream out(dir + "/manifest.json");
  out << ordered_json{{"files", files}}.dump(2) << "\n";
}

}  // namespace textpure
