#include "textpure/pipeline.hpp"

#include <stdexcept>

namespace textpure {

namespace {
constexpr int kSynonymKMax = 64;
constexpr double kSynonymBuildThreshold = 0.4;
}  // namespace

CorpusBundle load_corpus_bundle(const ExperimentConfig& cfg) {
  cfg.data.validate();
  CorpusBundle bundle;
  DataFormat fmt = parse_format(cfg.data.format);
  auto raw_train = load_raw_dataset(cfg.data.train_path, fmt);
  std::vector<std::string> texts;
  texts.reserve(raw_train.size());
  for (const auto& r : raw_train) texts.push_back(r.text);
  bundle.vocab = Vocabulary::from_corpus(texts);
  bundle.train = encode_dataset(raw_train, bundle.vocab, cfg.data.num_classes,
                                cfg.model.max_len);
  if (!cfg.data.test_path.empty())
    bundle.test = load_dataset(cfg.data.test_path, fmt, bundle.vocab,
                               cfg.data.num_classes, cfg.model.max_len);
  if (!cfg.data.embeddings_fixture.empty()) {
    bundle.embeddings =
        load_embedding_fixture(cfg.data.embeddings_fixture, bundle.vocab);
  } else {
    SkipGramConfig sg;
    sg.seed = cfg.seed;
    bundle.embeddings = train_skipgram(bundle.train, bundle.vocab, sg);
  }
  bundle.synonyms = build_synonym_table(bundle.embeddings, kSynonymKMax,
                                        kSynonymBuildThreshold);
  return bundle;
}

AttackResources attack_resources(const CorpusBundle& bundle) {
  AttackResources res;
  res.synonyms = &bundle.synonyms;
  res.embeddings = &bundle.embeddings;
  res.vocab = &bundle.vocab;
  return res;
}

TrainMode parse_train_mode(const std::string& name) {
  if (name == "plain") return TrainMode::kPlain;
  if (name == "mlm") return TrainMode::kMlm;
  if (name == "joint") return TrainMode::kJoint;
  if (name == "adv") return TrainMode::kAdv;
  throw std::invalid_argument("unknown train mode '" + name +
                              "' (expected plain|mlm|joint|adv)");
}

std::string train_mode_name(TrainMode mode) {
  switch (mode) {
    case TrainMode::kPlain: return "plain";
    case TrainMode::kMlm: return "mlm";
    case TrainMode::kJoint: return "joint";
    case TrainMode::kAdv: return "adv";
  }
  return "?";
}

JointModel run_training(const CorpusBundle& bundle, const ExperimentConfig& cfg,
                        TrainMode mode, TrainLog* log) {
  TrainConfig tc = cfg.train;
  switch (mode) {
    case TrainMode::kPlain:
      tc.w_mlm = 0.0;
      return train_joint(bundle.train, bundle.vocab, cfg.model, tc, cfg.noise,
                         log);
    case TrainMode::kMlm:
      tc.w_c = 0.0;
      return train_joint(bundle.train, bundle.vocab, cfg.model, tc, cfg.noise,
                         log);
    case TrainMode::kJoint:
      return train_joint(bundle.train, bundle.vocab, cfg.model, tc, cfg.noise,
                         log);
    case TrainMode::kAdv: {
      AdvTrainConfig ac = cfg.adv;
      ac.base = tc;
      return train_adversarial(bundle.train, bundle.vocab, cfg.model, ac,
                               cfg.noise, log);
    }
  }
  throw std::logic_error("unreachable");
}

}  // namespace textpure
