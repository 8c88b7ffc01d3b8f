#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "textpure/config.hpp"
#include "textpure/rng.hpp"

using namespace textpure;
namespace fs = std::filesystem;

namespace {

fs::path tmp_dir(const std::string& name) {
  auto d = fs::temp_directory_path() / "textpure_test_config" / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

void write_file(const fs::path& p, const std::string& body) {
  std::ofstream out(p);
  out << body;
}

int run_cli(const std::string& args) {
  std::string cmd = std::string(TEXTPURE_CLI) + " " + args + " > /dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  return rc;
}

}  // namespace

TEST_CASE("config parsing applies defaults and explicit values") {
  auto j = nlohmann::json::parse(R"({
    "seed": 7,
    "output_dir": "out",
    "data": {"train": "t.csv", "num_classes": 3},
    "train": {"epochs": 4, "lr": 0.002},
    "purify": {"n": 8},
    "attack": {"k": 12, "source": "mlm"}
  })");
  auto cfg = ExperimentConfig::from_json(j);
  CHECK(cfg.seed == 7);
  CHECK(cfg.data.train_path == "t.csv");
  CHECK(cfg.data.num_classes == 3);
  CHECK(cfg.train.epochs == 4);
  CHECK(cfg.train.lr == 0.002);
  CHECK(cfg.purify.n == 8);
  CHECK(cfg.attack.k == 12);
  CHECK(cfg.attack.source == CandidateSource::kMlm);
  // Untouched fields keep their defaults.
  CHECK(cfg.model.dim == 64);
  CHECK(cfg.noise.mask_rate == 0.3);
  CHECK(cfg.attack.sentence_sim_threshold == 0.7);
}

TEST_CASE("unknown attack source is rejected") {
  auto j = nlohmann::json::parse(R"({"attack": {"source": "wordnet"}})");
  CHECK_THROWS_AS((void)ExperimentConfig::from_json(j), std::invalid_argument);
}

TEST_CASE("seed propagation derives disjoint subsystem streams") {
  ExperimentConfig cfg;
  cfg.seed = 123;
  cfg.propagate_seed();
  CHECK(cfg.train.seed == 123);
  CHECK(cfg.model.seed == 123);
  CHECK(cfg.adv.base.seed == 123);
  CHECK(cfg.noise.seed != cfg.seed);
  CHECK(cfg.attack.seed != cfg.seed);
  CHECK(cfg.noise.seed != cfg.attack.seed);
  CHECK(cfg.purify.noise.seed == cfg.noise.seed);

  ExperimentConfig again;
  again.seed = 123;
  again.propagate_seed();
  CHECK(again.noise.seed == cfg.noise.seed);
}

TEST_CASE("fingerprint is stable and sensitive") {
  ExperimentConfig a, b;
  a.propagate_seed();
  b.propagate_seed();
  CHECK(a.fingerprint() == b.fingerprint());
  b.attack.k = a.attack.k + 1;
  CHECK(a.fingerprint() != b.fingerprint());
  CHECK(a.fingerprint().size() == 16);
}

TEST_CASE("validation rejects incomplete configs") {
  ExperimentConfig cfg;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);  // no train path
  cfg.data.train_path = "t.csv";
  CHECK_NOTHROW(cfg.validate());
  cfg.output_dir = "";
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("config files may contain comments") {
  auto dir = tmp_dir("comments");
  auto path = dir / "config.json";
  write_file(path, R"({
    // experiment seed
    "seed": 9,
    "data": {"train": "t.csv"}
  })");
  auto cfg = ExperimentConfig::load(path.string());
  CHECK(cfg.seed == 9);
  CHECK_THROWS_AS((void)ExperimentConfig::load((dir / "nope.json").string()),
                  std::runtime_error);
}

TEST_CASE("manifest hashes every file and skips itself") {
  auto dir = tmp_dir("manifest");
  write_file(dir / "a.txt", "alpha");
  fs::create_directories(dir / "sub");
  write_file(dir / "sub" / "b.txt", "beta");
  write_manifest(dir.string());

  std::ifstream in(dir / "manifest.json");
  auto j = nlohmann::json::parse(in);
  REQUIRE(j.contains("files"));
  CHECK(j["files"].size() == 2);
  CHECK(j["files"].contains("a.txt"));
  CHECK(j["files"].contains("sub/b.txt"));
  CHECK_FALSE(j["files"].contains("manifest.json"));
  CHECK(j["files"]["a.txt"].get<std::string>() == hex64(fnv1a("alpha")));

  // Rewriting without changes is byte-stable.
  std::ifstream m1(dir / "manifest.json");
  std::string before((std::istreambuf_iterator<char>(m1)), {});
  write_manifest(dir.string());
  std::ifstream m2(dir / "manifest.json");
  std::string after((std::istreambuf_iterator<char>(m2)), {});
  CHECK(before == after);

  write_file(dir / "a.txt", "gamma");
  write_manifest(dir.string());
  std::ifstream in3(dir / "manifest.json");
  auto j3 = nlohmann::json::parse(in3);
  CHECK(j3["files"]["a.txt"] != j["files"]["a.txt"]);
}

TEST_CASE("cli end-to-end: corpus generation, training, inspection") {
  auto dir = tmp_dir("cli");
  REQUIRE(run_cli("gen-corpus --out " + (dir / "data").string() +
                  " --train-size 60 --test-size 12 --seed 7") == 0);
  CHECK(fs::exists(dir / "data" / "train.csv"));
  CHECK(fs::exists(dir / "data" / "test.csv"));
  CHECK(fs::exists(dir / "data" / "embeddings.txt"));
  CHECK(fs::exists(dir / "data" / "manifest.json"));

  write_file(dir / "config.json", R"({
    "seed": 5,
    "output_dir": ")" + (dir / "run").string() + R"(",
    "data": {
      "train": ")" + (dir / "data" / "train.csv").string() + R"(",
      "test": ")" + (dir / "data" / "test.csv").string() + R"(",
      "embeddings": ")" + (dir / "data" / "embeddings.txt").string() + R"("
    },
    "model": {"dim": 16, "heads": 2, "blocks": 1, "max_len": 32},
    "train": {"epochs": 1, "batch_size": 16},
    "purify": {"n": 2},
    "eval": {"sample": 4}
  })");
  REQUIRE(run_cli("train --config " + (dir / "config.json").string() +
                  " --mode joint") == 0);
  CHECK(fs::exists(dir / "run" / "model.bin"));
  CHECK(fs::exists(dir / "run" / "train_log.csv"));
  CHECK(fs::exists(dir / "run" / "config.json"));
  CHECK(fs::exists(dir / "run" / "manifest.json"));

  // Flag overrides land in the persisted effective config.
  REQUIRE(run_cli("train --config " + (dir / "config.json").string() +
                  " --mode plain --seed 99 --output-dir " +
                  (dir / "run2").string()) == 0);
  std::ifstream in(dir / "run2" / "config.json");
  auto j = nlohmann::json::parse(in);
  CHECK(j["seed"].get<int>() == 99);

  REQUIRE(run_cli("attack --config " + (dir / "config.json").string() +
                  " --model " + (dir / "run" / "model.bin").string() +
                  " --defense none --output-dir " + (dir / "atk").string()) ==
          0);
  CHECK(fs::exists(dir / "atk" / "report.json"));
  CHECK(fs::exists(dir / "atk" / "report.txt"));
  CHECK(fs::exists(dir / "atk" / "traces.jsonl"));

  REQUIRE(run_cli("purify-inspect --config " + (dir / "config.json").string() +
                  " --model " + (dir / "run" / "model.bin").string() +
                  " --limit 2 --output-dir " + (dir / "insp").string()) == 0);
  CHECK(fs::exists(dir / "insp" / "purify.jsonl"));

  // Failure modes exit nonzero.
  CHECK(run_cli("train --config " + (dir / "missing.json").string()) != 0);
  CHECK(run_cli("train --config " + (dir / "config.json").string() +
                " --mode bogus") != 0);
}
