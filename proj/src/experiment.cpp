//------------------------------------------------------------------------------
//
//   Copyright 2026 The emoknn Authors
//
//   Licensed under the Apache License, Version 2.0 (the "License");
//   you may not use this file except in compliance with the License.
//   You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
//   Unless required by applicable law or agreed to in writing, software
//   distributed under the License is distributed on an "AS IS" BASIS,
//   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//   See the License for the specific language governing permissions and
//   limitations under the License.
//
//------------------------------------------------------------------------------
#include "emoknn/experiment.hpp"

#include "emoknn/parallel.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <climits>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace emoknn {

using nlohmann::json;

std::string format_real(double v)
{
  if (!std::isfinite(v))
  {
    return "NA";
  }
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------------------
// config

namespace {

std::string read_text(fs::path const &path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
  {
    throw LookupError("cannot open " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(fs::path const &path, std::string const &contents)
{
  if (path.has_parent_path())
  {
    fs::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out)
  {
    throw LookupError("cannot write " + path.string());
  }
  out << contents;
}

fs::path resolve(fs::path const &base, std::string const &p)
{
  fs::path path(p);
  return (path.is_absolute() ? path : base / path).lexically_normal();
}

std::optional<int> parse_k(json const &j)
{
  if (j.is_string())
  {
    if (j.get<std::string>() != "auto")
    {
      throw ValidationError("k must be an integer or \"auto\"");
    }
    return std::nullopt;
  }
  return j.get<int>();
}

FeatureSpec parse_feature(json const &j)
{
  FeatureSpec spec;
  if (j.contains("embedding") && !j.at("embedding").is_null())
  {
    spec.embedding = j.at("embedding").get<std::string>();
  }
  if (j.contains("lexicon") && !j.at("lexicon").is_null())
  {
    spec.lexicon = parse_lexicon_name(j.at("lexicon").get<std::string>());
  }
  spec.mode = spec.embedding && spec.lexicon ? FeatureMode::appended
              : spec.lexicon                 ? FeatureMode::lexicon_only
                                             : FeatureMode::embedding_only;
  spec.validate();
  return spec;
}

MemberSpec parse_member(json const &j)
{
  MemberSpec m;
  m.features    = parse_feature(j);
  m.name        = j.value("name", m.features.name());
  m.k           = j.contains("k") ? parse_k(j.at("k")) : std::nullopt;
  m.aggregation = parse_aggregation(j.value("aggregation", std::string("weighted_mean")));
  m.cleaning    = CleaningConfig::parse(j.value("cleaning", std::string("raw")));
  return m;
}

EnsembleConfig parse_ensemble_body(std::string const &name, json const &j)
{
  EnsembleConfig cfg{name, {}};
  for (auto const &m : j.at("members"))
  {
    cfg.members.push_back(parse_member(m));
  }
  cfg.validate();
  return cfg;
}

NamedEnsemble parse_named_ensemble(std::string const &name, json const &j)
{
  NamedEnsemble out;
  if (j.contains("preset"))
  {
    if (j.at("preset").get<std::string>() != "best")
    {
      throw ValidationError("unknown ensemble preset '" + j.at("preset").get<std::string>() + "'");
    }
    for (auto e : kAllEmotions)
    {
      auto cfg = preset_best_ensemble(e);
      cfg.name = name;
      out.per_emotion.emplace(e, std::move(cfg));
    }
    return out;
  }
  if (j.contains("members"))
  {
    out.all = parse_ensemble_body(name, j);
    return out;
  }
  for (auto const &[key, body] : j.items())
  {
    out.per_emotion.emplace(parse_emotion(key), parse_ensemble_body(name, body));
  }
  return out;
}

}  // namespace

EnsembleConfig const &NamedEnsemble::for_emotion(Emotion e) const
{
  if (auto it = per_emotion.find(e); it != per_emotion.end())
  {
    return it->second;
  }
  if (all)
  {
    return *all;
  }
  throw LookupError("ensemble has no definition for " + std::string(to_string(e)));
}

ExperimentConfig ExperimentConfig::parse(std::string_view text, fs::path const &base_dir)
{
  ExperimentConfig cfg;
  cfg.base_dir = base_dir;
  try
  {
    auto const j = json::parse(text);

    cfg.seed   = j.value("seed", FoldAssignment::kDefaultSeed);
    cfg.folds  = j.value("folds", 5);
    cfg.output = resolve(base_dir, j.value("output", std::string("out")));

    for (auto const &[key, d] : j.at("data").items())
    {
      EmotionData ed;
      ed.train = resolve(base_dir, d.at("train").get<std::string>());
      if (d.contains("dev"))
      {
        ed.dev = resolve(base_dir, d.at("dev").get<std::string>());
      }
      if (d.contains("test"))
      {
        ed.test = resolve(base_dir, d.at("test").get<std::string>());
      }
      cfg.data.emplace(parse_emotion(key), std::move(ed));
    }
    if (j.contains("emotions"))
    {
      for (auto const &e : j.at("emotions"))
      {
        cfg.emotions.push_back(parse_emotion(e.get<std::string>()));
      }
    }
    else
    {
      for (auto const &[e, _] : cfg.data)
      {
        cfg.emotions.push_back(e);
      }
    }

    if (j.contains("resources"))
    {
      auto const &r = j.at("resources");
      if (r.contains("emoticons"))
      {
        cfg.emoticons = resolve(base_dir, r.at("emoticons").get<std::string>());
      }
      if (r.contains("emojis"))
      {
        cfg.emojis = resolve(base_dir, r.at("emojis").get<std::string>());
      }
      if (r.contains("stopwords"))
      {
        cfg.stopwords = resolve(base_dir, r.at("stopwords").get<std::string>());
      }
    }

    for (auto const &e : j.value("embeddings", json::array()))
    {
      EmbeddingSource src;
      src.model = e.at("model").get<std::string>();
      if (e.contains("cleaning"))
      {
        src.cleaning = CleaningConfig::parse(e.at("cleaning").get<std::string>());
      }
      for (auto const &f : e.at("files"))
      {
        src.files.push_back(resolve(base_dir, f.get<std::string>()));
      }
      cfg.embeddings.push_back(std::move(src));
    }

    auto const lexicons = j.value("lexicons", json::object());
    for (auto const &[key, l] : lexicons.items())
    {
      LexiconSource src{parse_lexicon_name(key), {}, std::nullopt};
      if (l.is_string())
      {
        src.file = resolve(base_dir, l.get<std::string>());
      }
      else
      {
        src.file = resolve(base_dir, l.at("file").get<std::string>());
        if (l.contains("descriptor"))
        {
          src.descriptor = resolve(base_dir, l.at("descriptor").get<std::string>());
        }
      }
      cfg.lexicons.push_back(std::move(src));
    }

    auto const ensembles = j.value("ensembles", json::object());
    for (auto const &[name, body] : ensembles.items())
    {
      cfg.ensembles.emplace(name, parse_named_ensemble(name, body));
    }

    if (j.contains("sweep"))
    {
      auto const &s = j.at("sweep");
      for (auto const &f : s.value("features", json::array()))
      {
        cfg.sweep.features.push_back(parse_feature(f));
      }
      if (s.contains("cleaning"))
      {
        cfg.sweep.cleaning.clear();
        for (auto const &c : s.at("cleaning"))
        {
          cfg.sweep.cleaning.push_back(CleaningConfig::parse(c.get<std::string>()));
        }
      }
      if (s.contains("k"))
      {
        cfg.sweep.k.clear();
        for (auto const &k : s.at("k"))
        {
          cfg.sweep.k.push_back(parse_k(k));
        }
      }
      cfg.sweep.aggregation = parse_aggregation(s.value("aggregation", std::string("weighted_mean")));
      cfg.sweep.ensembles   = s.value("ensembles", std::vector<std::string>{});
    }

    if (j.contains("predict"))
    {
      auto const &p = j.at("predict");
      if (p.contains("ensemble"))
      {
        auto const &ens = p.at("ensemble");
        if (ens.is_string())
        {
          for (auto e : kAllEmotions)
          {
            cfg.predict_ensemble[e] = ens.get<std::string>();
          }
        }
        else
        {
          for (auto const &[key, name] : ens.items())
          {
            cfg.predict_ensemble[parse_emotion(key)] = name.get<std::string>();
          }
        }
      }
      cfg.explain_ids = p.value("explain_ids", std::vector<std::string>{});
    }
  }
  catch (json::exception const &e)
  {
    throw ValidationError(std::string("config: ") + e.what());
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::load(fs::path const &path)
{
  return parse(read_text(path), path.parent_path());
}

EnsembleConfig preset_best_ensemble(Emotion emotion)
{
  auto const raw   = CleaningConfig::raw();
  auto const gen   = CleaningConfig::preprocessed();
  auto const nostp = CleaningConfig::without_stopwords();

  struct Row
  {
    CleaningConfig cleaning;
    int            k;
  };
  // per embedding: best cleaning and k for anger, joy, sadness, fear
  auto pick = [emotion](Row anger, Row joy, Row sadness, Row fear) {
    switch (emotion)
    {
    case Emotion::anger:
      return anger;
    case Emotion::joy:
      return joy;
    case Emotion::sadness:
      return sadness;
    case Emotion::fear:
      return fear;
    }
    return anger;
  };
  Row const roberta  = pick({raw, 19}, {raw, 13}, {raw, 9}, {gen, 11});
  Row const deepmoji = pick({nostp, 11}, {gen, 21}, {gen, 13}, {gen, 13});
  Row const use      = pick({gen, 19}, {gen, 21}, {gen, 19}, {raw, 11});
  Row const sbert    = pick({gen, 21}, {gen, 9}, {gen, 21}, {gen, 13});
  Row const word2vec = pick({nostp, 5}, {nostp, 23}, {nostp, 21}, {nostp, 13});

  LexiconName lexicon  = LexiconName::AI;
  int         lex_k    = 11;
  switch (emotion)
  {
  case Emotion::anger:
    break;
  case Emotion::joy:
    lexicon = LexiconName::Combined, lex_k = 19;
    break;
  case Emotion::sadness:
    lex_k = 23;
    break;
  case Emotion::fear:
    lexicon = LexiconName::ANEW, lex_k = 17;
    break;
  }
  // only the anger appended member's k is known; the others fall back to the rule of thumb
  std::optional<int> appended_k = emotion == Emotion::anger ? std::optional<int>(11) : std::nullopt;

  auto const lex_name = std::string(to_string(lexicon));
  auto const wm       = Aggregation::weighted_mean;
  return EnsembleConfig{
      "best",
      {
          {"roBERTa", FeatureSpec::of_embedding("roberta"), roberta.k, wm, roberta.cleaning},
          {"DeepMoji", FeatureSpec::of_embedding("deepmoji"), deepmoji.k, wm, deepmoji.cleaning},
          {"USE", FeatureSpec::of_embedding("use"), use.k, wm, use.cleaning},
          {"SBERT", FeatureSpec::of_embedding("sbert"), sbert.k, wm, sbert.cleaning},
          {"Word2Vec", FeatureSpec::of_embedding("word2vec"), word2vec.k, wm, word2vec.cleaning},
          {lex_name + " lexicon", FeatureSpec::of_lexicon(lexicon), lex_k, wm, gen},
          {"roBERTa with " + lex_name, FeatureSpec::of_appended("roberta", lexicon), appended_k, wm, roberta.cleaning},
      }};
}

// ---------------------------------------------------------------------------
// workspace

Workspace Workspace::load(ExperimentConfig const &config, std::vector<Emotion> const &emotions, bool with_test)
{
  Workspace ws;
  for (auto e : emotions)
  {
    auto it = config.data.find(e);
    if (it == config.data.end())
    {
      throw LookupError("no data configured for " + std::string(to_string(e)));
    }
    auto train = parse_dataset(it->second.train, Split::train, e);
    if (it->second.dev)
    {
      ws.add_training(merge(train, parse_dataset(*it->second.dev, Split::dev, e)));
    }
    else
    {
      ws.add_training(merge(train, Dataset(e, Split::dev, {})));
    }
    if (with_test)
    {
      if (!it->second.test)
      {
        throw LookupError("no test data configured for " + std::string(to_string(e)));
      }
      ws.add_test(parse_dataset(*it->second.test, Split::test, e));
    }
  }

  CleaningResources res;
  if (config.emoticons)
  {
    res.emoticons = EmoticonTable(ReplacementTable::load(*config.emoticons));
  }
  if (config.emojis)
  {
    res.emojis = EmojiTable::load(*config.emojis);
  }
  if (config.stopwords)
  {
    res.stopwords = StopwordList::load(*config.stopwords);
  }
  ws.set_resources(std::move(res));

  LexiconSet lexicons;
  for (auto const &src : config.lexicons)
  {
    auto schema = LexiconSchema::standard(src.name);
    lexicons.add(src.descriptor ? load_lexicon(src.file, schema, LexiconDescriptor::load(*src.descriptor))
                                : load_lexicon(src.file, schema));
  }
  ws.set_lexicons(std::move(lexicons));

  for (auto const &src : config.embeddings)
  {
    std::optional<EmbeddingStore> merged;
    for (auto const &f : src.files)
    {
      auto store = load_embeddings(f);
      if (store.model_name() != src.model)
      {
        throw ValidationError(f.string() + " declares model '" + store.model_name() + "', config expects '" +
                              src.model + "'");
      }
      if (!merged)
      {
        merged.emplace(std::move(store));
      }
      else
      {
        merged->absorb(store);
      }
    }
    if (merged)
    {
      ws.add_store(src.cleaning, std::move(*merged));
    }
  }
  return ws;
}

void Workspace::add_training(Dataset ds)
{
  auto e = ds.emotion();
  training_.insert_or_assign(e, std::move(ds));
}

void Workspace::add_test(Dataset ds)
{
  auto e = ds.emotion();
  test_.insert_or_assign(e, std::move(ds));
}

void Workspace::set_resources(CleaningResources res)
{
  resources_ = std::make_shared<CleaningResources>(std::move(res));
}

void Workspace::set_lexicons(LexiconSet lex)
{
  lexicons_ = std::make_shared<LexiconSet>(std::move(lex));
}

void Workspace::add_store(std::optional<CleaningConfig> cleaning, EmbeddingStore store)
{
  for (auto &[c, s] : stores_)
  {
    if (c == cleaning && s.model_name() == store.model_name())
    {
      s.absorb(store);
      return;
    }
  }
  stores_.emplace_back(cleaning, std::move(store));
}

Dataset const &Workspace::training(Emotion e) const
{
  auto it = training_.find(e);
  if (it == training_.end())
  {
    throw LookupError("no training data loaded for " + std::string(to_string(e)));
  }
  return it->second;
}

Dataset const *Workspace::test(Emotion e) const
{
  auto it = test_.find(e);
  return it == test_.end() ? nullptr : &it->second;
}

EmbeddingStore const *Workspace::store(std::string const &model, CleaningConfig const &cleaning) const
{
  EmbeddingStore const *fallback = nullptr;
  for (auto const &[c, s] : stores_)
  {
    if (s.model_name() != model)
    {
      continue;
    }
    if (c && *c == cleaning)
    {
      return &s;
    }
    if (!c)
    {
      fallback = &s;
    }
  }
  return fallback;
}

// ---------------------------------------------------------------------------
// pipeline

FeatureBlocks member_blocks(MemberSpec const &member, Workspace const &ws, Dataset const &dataset,
                            std::vector<std::string> *warnings)
{
  std::vector<std::string>              ids;
  std::vector<std::vector<std::string>> tokens;
  ids.reserve(dataset.size());
  tokens.reserve(dataset.size());
  for (auto const &inst : dataset.instances())
  {
    ids.push_back(inst.id);
    tokens.push_back(tokenize(clean(inst.text, member.cleaning, ws.resources())));
  }
  FeatureSources sources;
  sources.lexicons = &ws.lexicons();
  if (member.features.embedding)
  {
    sources.store = ws.store(*member.features.embedding, member.cleaning);
    if (sources.store == nullptr)
    {
      throw LookupError("no embedding store for model '" + *member.features.embedding + "' with cleaning " +
                        member.cleaning.name());
    }
  }
  return raw_blocks(member.features, ids, tokens, sources, warnings);
}

int resolve_k(MemberSpec const &member, std::size_t n)
{
  return member.k ? *member.k : rule_of_thumb_k(n);
}

TrainedEnsemble::TrainedEnsemble(EnsembleConfig config, std::vector<FeatureBlocks> const &train_blocks,
                                 std::vector<EmotionClass> labels, std::vector<std::string> ids,
                                 std::size_t k_reference)
  : config_(std::move(config))
{
  config_.validate();
  if (train_blocks.size() != config_.members.size())
  {
    throw ValidationError("ensemble '" + config_.name + "' needs one block set per member");
  }
  normalizers_.reserve(config_.members.size());
  models_.reserve(config_.members.size());
  for (std::size_t m = 0; m < config_.members.size(); ++m)
  {
    auto const &member = config_.members[m];
    normalizers_.push_back(FeatureNormalizer::fit(member.features, train_blocks[m]));
    RowMatrix<double> x = assemble(member.features, train_blocks[m], normalizers_.back());
    models_.emplace_back(std::move(x), labels, ids, resolve_k(member, k_reference), member.aggregation);
  }
}

std::vector<std::string> TrainedEnsemble::member_names() const
{
  std::vector<std::string> out;
  for (auto const &m : config_.members)
  {
    out.push_back(m.name);
  }
  return out;
}

std::vector<Eigen::MatrixXd> TrainedEnsemble::featurize(std::vector<FeatureBlocks> const &query_blocks) const
{
  if (query_blocks.size() != config_.members.size())
  {
    throw ValidationError("ensemble '" + config_.name + "' needs one block set per member");
  }
  std::vector<Eigen::MatrixXd> out;
  out.reserve(query_blocks.size());
  for (std::size_t m = 0; m < query_blocks.size(); ++m)
  {
    out.push_back(assemble(config_.members[m].features, query_blocks[m], normalizers_[m]));
  }
  return out;
}

EnsemblePrediction TrainedEnsemble::predict(std::vector<Eigen::MatrixXd> const &features, Eigen::Index row,
                                            std::string id) const
{
  std::vector<KnnPrediction> preds;
  preds.reserve(models_.size());
  for (std::size_t m = 0; m < models_.size(); ++m)
  {
    preds.push_back(models_[m].predict(features[m].row(row).transpose()));
  }
  return combine_members(std::move(id), std::move(preds));
}

EvalReport cross_validate_ensemble(EnsembleConfig const &config, std::vector<FeatureBlocks const *> const &blocks,
                                   Dataset const &dataset, FoldAssignment const &folds, std::string setup)
{
  auto predictor = [&](std::span<std::size_t const> train, std::span<std::size_t const> test) {
    std::vector<FeatureBlocks> train_blocks;
    std::vector<FeatureBlocks> test_blocks;
    for (auto const *b : blocks)
    {
      train_blocks.push_back(b->select(train));
      test_blocks.push_back(b->select(test));
    }
    std::vector<EmotionClass> labels;
    std::vector<std::string>  ids;
    for (auto i : train)
    {
      labels.push_back(*dataset[i].label);
      ids.push_back(dataset[i].id);
    }
    TrainedEnsemble ens(config, train_blocks, std::move(labels), std::move(ids), dataset.size());
    auto const      features = ens.featurize(test_blocks);
    std::vector<double> scores;
    scores.reserve(test.size());
    for (std::size_t r = 0; r < test.size(); ++r)
    {
      scores.push_back(ens.predict(features, static_cast<Eigen::Index>(r), dataset[test[r]].id).final_score);
    }
    return scores;
  };
  return cross_validate(dataset, folds, predictor, std::move(setup));
}

// ---------------------------------------------------------------------------
// sweep

namespace {

std::string block_key(Emotion e, MemberSpec const &m)
{
  return std::string(to_string(e)) + "|" + m.features.name() + "|" + m.cleaning.name();
}

int cleaning_rank(std::string const &name)
{
  if (name == "-")
  {
    return 100;
  }
  auto const c = CleaningConfig::parse(name);
  return (c.general ? 2 : 0) + (c.remove_stopwords ? 2 : 0) + (c.lowercase ? 1 : 0);
}

std::string sanitize(std::string s)
{
  for (auto &c : s)
  {
    if (c == '\t' || c == '\n' || c == '\r')
    {
      c = ' ';
    }
  }
  return s;
}

std::vector<int> label_ints(Dataset const &ds)
{
  std::vector<int> out;
  for (auto const &inst : ds.instances())
  {
    if (!inst.label)
    {
      throw ValidationError("training instance " + inst.id + " has no label");
    }
    out.push_back(inst.label->value());
  }
  return out;
}

struct GridPoint
{
  SweepRow       row;
  EnsembleConfig ensemble;
};

}  // namespace

std::optional<std::size_t> select_best(std::vector<SweepRow> const &rows, Emotion emotion)
{
  std::optional<std::size_t> best;
  auto key_k = [](SweepRow const &r) { return r.k == 0 ? INT_MAX : r.k; };
  for (std::size_t i = 0; i < rows.size(); ++i)
  {
    auto const &r = rows[i];
    if (r.kind != RowKind::grid || r.emotion != emotion || !r.report.ok())
    {
      continue;
    }
    if (!best)
    {
      best = i;
      continue;
    }
    auto const &b = rows[*best];
    if (*r.report.mean_pcc != *b.report.mean_pcc)
    {
      if (*r.report.mean_pcc > *b.report.mean_pcc)
      {
        best = i;
      }
      continue;
    }
    if (key_k(r) != key_k(b))
    {
      if (key_k(r) < key_k(b))
      {
        best = i;
      }
      continue;
    }
    if (cleaning_rank(r.cleaning) < cleaning_rank(b.cleaning))
    {
      best = i;
    }
  }
  return best;
}

SweepResult run_sweep(ExperimentConfig const &config, Workspace const &ws, RunOptions const &options)
{
  auto const seed = options.seed.value_or(config.seed);

  std::vector<GridPoint> points;
  for (auto e : options.emotions)
  {
    auto const n = ws.training(e).size();
    for (auto const &f : config.sweep.features)
    {
      for (auto const &c : config.sweep.cleaning)
      {
        for (auto const &k : config.sweep.k)
        {
          MemberSpec m{f.name(), f, k, config.sweep.aggregation, c};
          int const  kk = resolve_k(m, n);
          m.k           = kk;
          SweepRow row;
          row.emotion     = e;
          row.features    = f.name();
          row.cleaning    = c.name();
          row.k           = kk;
          row.aggregation = std::string(to_string(config.sweep.aggregation));
          row.setup       = row.features + "|" + row.cleaning + "|k=" + std::to_string(kk);
          points.push_back({std::move(row), EnsembleConfig{m.name, {m}}});
        }
      }
    }
    for (auto const &name : config.sweep.ensembles)
    {
      auto it = config.ensembles.find(name);
      if (it == config.ensembles.end())
      {
        throw LookupError("sweep references unknown ensemble '" + name + "'");
      }
      SweepRow row;
      row.emotion     = e;
      row.setup       = "ensemble:" + name;
      row.features    = name;
      row.cleaning    = "-";
      row.k           = 0;
      row.aggregation = "mean_vote";
      points.push_back({std::move(row), it->second.for_emotion(e)});
    }
  }

  // raw blocks are shared between points that differ only in k
  std::vector<std::string>                 keys;
  std::vector<std::pair<Emotion, MemberSpec>> key_specs;
  std::unordered_set<std::string>          seen;
  for (auto const &p : points)
  {
    for (auto const &m : p.ensemble.members)
    {
      auto key = block_key(p.row.emotion, m);
      if (seen.insert(key).second)
      {
        keys.push_back(key);
        key_specs.emplace_back(p.row.emotion, m);
      }
    }
  }
  std::vector<std::optional<FeatureBlocks>> blocks(keys.size());
  std::vector<std::string>                  block_errors(keys.size());
  parallel_for(keys.size(), options.jobs, [&](std::size_t i) {
    try
    {
      auto const &[e, m] = key_specs[i];
      blocks[i]          = member_blocks(m, ws, ws.training(e));
    }
    catch (std::exception const &ex)
    {
      block_errors[i] = ex.what();
    }
  });
  std::unordered_map<std::string, std::size_t> key_index;
  for (std::size_t i = 0; i < keys.size(); ++i)
  {
    key_index.emplace(keys[i], i);
  }

  std::map<Emotion, FoldAssignment> folds;
  for (auto e : options.emotions)
  {
    auto const labels = label_ints(ws.training(e));
    folds.emplace(e, FoldAssignment::stratified(labels, config.folds, seed));
  }

  parallel_for(points.size(), options.jobs, [&](std::size_t i) {
    auto &p = points[i];
    std::vector<FeatureBlocks const *> member_blocks_ptrs;
    std::string                        error;
    for (auto const &m : p.ensemble.members)
    {
      auto const idx = key_index.at(block_key(p.row.emotion, m));
      if (!blocks[idx])
      {
        error = block_errors[idx];
        break;
      }
      member_blocks_ptrs.push_back(&*blocks[idx]);
    }
    if (!error.empty())
    {
      p.row.report = EvalReport{p.row.setup, std::vector<FoldResult>(static_cast<std::size_t>(config.folds),
                                                                     FoldResult{std::nullopt, error}),
                                std::nullopt};
      return;
    }
    p.row.report = cross_validate_ensemble(p.ensemble, member_blocks_ptrs, ws.training(p.row.emotion),
                                           folds.at(p.row.emotion), p.row.setup);
  });

  SweepResult result;
  for (auto &p : points)
  {
    result.rows.push_back(std::move(p.row));
  }

  std::map<Emotion, double> best_scores;
  std::size_t const         n_grid = result.rows.size();
  for (auto e : options.emotions)
  {
    std::vector<SweepRow> grid(result.rows.begin(), result.rows.begin() + static_cast<std::ptrdiff_t>(n_grid));
    if (auto b = select_best(grid, e))
    {
      auto row = result.rows[*b];
      row.kind = RowKind::best;
      best_scores.emplace(e, *row.report.mean_pcc);
      result.rows.push_back(std::move(row));
    }
  }
  if (best_scores.size() == 4)
  {
    result.average_best = average_emotions(best_scores);
    SweepRow avg;
    avg.kind            = RowKind::average;
    avg.setup           = "-";
    avg.features        = "-";
    avg.cleaning        = "-";
    avg.aggregation     = "-";
    avg.report.mean_pcc = result.average_best;
    result.rows.push_back(std::move(avg));
  }

  // two-sided t-tests between cleaning variants at fixed features and k
  for (auto e : options.emotions)
  {
    for (auto const &f : config.sweep.features)
    {
      std::vector<int> ks;
      for (std::size_t i = 0; i < n_grid; ++i)
      {
        auto const &r = result.rows[i];
        if (r.emotion == e && r.features == f.name() && r.cleaning != "-" &&
            std::find(ks.begin(), ks.end(), r.k) == ks.end())
        {
          ks.push_back(r.k);
        }
      }
      for (int k : ks)
      {
        std::vector<SweepRow const *> variants;
        for (std::size_t i = 0; i < n_grid; ++i)
        {
          auto const &r = result.rows[i];
          if (r.emotion == e && r.features == f.name() && r.k == k && r.report.ok())
          {
            variants.push_back(&r);
          }
        }
        for (std::size_t a = 0; a < variants.size(); ++a)
        {
          for (std::size_t b = a + 1; b < variants.size(); ++b)
          {
            TTestRow t;
            t.emotion    = e;
            t.features   = f.name();
            t.k          = k;
            t.cleaning_a = variants[a]->cleaning;
            t.cleaning_b = variants[b]->cleaning;
            t.mean_a     = *variants[a]->report.mean_pcc;
            t.mean_b     = *variants[b]->report.mean_pcc;
            try
            {
              auto const xa = variants[a]->report.per_fold_pcc();
              auto const xb = variants[b]->report.per_fold_pcc();
              t.result      = ttest_two_sided(xa, xb);
            }
            catch (DegenerateError const &)
            {
            }
            result.ttests.push_back(std::move(t));
          }
        }
      }
    }
  }

  if (!options.out_dir.empty())
  {
    write_text(options.out_dir / "sweep.tsv", result.format_table(config.folds));
    write_text(options.out_dir / "sweep_ttest.tsv", result.format_ttests());
    write_text(options.out_dir / "sweep_folds.tsv", result.format_folds());
  }
  return result;
}

std::string SweepResult::format_table(int n_folds) const
{
  std::string out = "kind\temotion\tsetup\tfeatures\tcleaning\tk\taggregation";
  for (int f = 1; f <= n_folds; ++f)
  {
    out += "\tfold_" + std::to_string(f);
  }
  out += "\tmean_pcc\tstatus\n";
  for (auto const &r : rows)
  {
    out += r.kind == RowKind::grid ? "grid" : r.kind == RowKind::best ? "best" : "average";
    out += '\t';
    out += r.kind == RowKind::average ? std::string("average") : std::string(to_string(r.emotion));
    out += '\t' + r.setup + '\t' + r.features + '\t' + r.cleaning + '\t';
    out += r.k > 0 ? std::to_string(r.k) : std::string("-");
    out += '\t' + r.aggregation;
    std::string status = "ok";
    for (int f = 0; f < n_folds; ++f)
    {
      out += '\t';
      if (static_cast<std::size_t>(f) < r.report.folds.size())
      {
        auto const &fold = r.report.folds[static_cast<std::size_t>(f)];
        out += fold.pcc ? format_real(*fold.pcc) : "NA";
        if (!fold.pcc && status == "ok")
        {
          status = "failed: fold " + std::to_string(f + 1) + ": " + sanitize(fold.error);
        }
      }
      else
      {
        out += "-";
      }
    }
    out += '\t';
    out += r.report.mean_pcc ? format_real(*r.report.mean_pcc) : "NA";
    out += '\t' + status + '\n';
  }
  return out;
}

std::string SweepResult::format_ttests() const
{
  std::string out = "emotion\tfeatures\tk\tcleaning_a\tcleaning_b\tmean_a\tmean_b\tt\tdf\tp\n";
  for (auto const &t : ttests)
  {
    out += std::string(to_string(t.emotion)) + '\t' + t.features + '\t' + std::to_string(t.k) + '\t' + t.cleaning_a +
           '\t' + t.cleaning_b + '\t' + format_real(t.mean_a) + '\t' + format_real(t.mean_b) + '\t';
    if (t.result)
    {
      out += format_real(t.result->t) + '\t' + format_real(t.result->df) + '\t' + format_real(t.result->p);
    }
    else
    {
      out += "NA\tNA\tNA";
    }
    out += '\n';
  }
  return out;
}

std::string SweepResult::format_folds() const
{
  std::string out = "emotion\tsetup\tfold\tpcc\terror\n";
  for (auto const &r : rows)
  {
    if (r.kind != RowKind::grid)
    {
      continue;
    }
    auto const prefix = std::string(to_string(r.emotion)) + '\t' + r.setup + '\t';
    for (std::size_t f = 0; f < r.report.folds.size(); ++f)
    {
      auto const &fold = r.report.folds[f];
      out += prefix + std::to_string(f + 1) + '\t' + (fold.pcc ? format_real(*fold.pcc) : "NA") + '\t' +
             (fold.pcc ? "-" : sanitize(fold.error)) + '\n';
    }
    out += prefix + "mean\t" + (r.report.mean_pcc ? format_real(*r.report.mean_pcc) : "NA") + "\t-\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// predict

PredictResult run_predict(ExperimentConfig const &config, Workspace const &ws, RunOptions const &options,
                          bool write_submissions)
{
  PredictResult result;
  auto const    requested = options.ids.value_or(config.explain_ids);
  std::set<std::string> pending(requested.begin(), requested.end());

  for (auto e : options.emotions)
  {
    auto const &train = ws.training(e);
    auto const *test  = ws.test(e);
    if (test == nullptr)
    {
      throw LookupError("no test data loaded for " + std::string(to_string(e)));
    }
    auto it = config.predict_ensemble.find(e);
    if (it == config.predict_ensemble.end())
    {
      throw LookupError("no prediction ensemble configured for " + std::string(to_string(e)));
    }
    auto ens_it = config.ensembles.find(it->second);
    if (ens_it == config.ensembles.end())
    {
      throw LookupError("unknown ensemble '" + it->second + "'");
    }
    auto const &ensemble = ens_it->second.for_emotion(e);
    ensemble.validate();

    // every sentence-level store must cover the whole test split
    std::vector<std::string> missing;
    for (auto const &m : ensemble.members)
    {
      if (!m.features.embedding)
      {
        continue;
      }
      auto const *store = ws.store(*m.features.embedding, m.cleaning);
      if (store == nullptr || store->level() == EmbeddingLevel::token)
      {
        continue;
      }
      for (auto const &inst : test->instances())
      {
        if (!store->contains(inst.id))
        {
          missing.push_back(store->model_name() + ":" + inst.id);
        }
      }
    }
    if (!missing.empty())
    {
      std::string msg = "missing test embeddings for " + std::string(to_string(e)) + ":";
      for (auto const &id : missing)
      {
        msg += " " + id;
      }
      throw LookupError(msg);
    }

    auto const                 n_members = ensemble.members.size();
    std::vector<FeatureBlocks> train_blocks(n_members);
    std::vector<FeatureBlocks> test_blocks(n_members);
    std::vector<std::vector<std::string>> member_warnings(n_members);
    parallel_for(n_members, options.jobs, [&](std::size_t m) {
      train_blocks[m] = member_blocks(ensemble.members[m], ws, train, &member_warnings[m]);
      test_blocks[m]  = member_blocks(ensemble.members[m], ws, *test, &member_warnings[m]);
    });
    for (auto const &w : member_warnings)
    {
      result.warnings.insert(result.warnings.end(), w.begin(), w.end());
    }

    std::vector<EmotionClass> labels;
    std::vector<std::string>  ids;
    for (auto const &inst : train.instances())
    {
      labels.push_back(*inst.label);
      ids.push_back(inst.id);
    }
    TrainedEnsemble trained(ensemble, train_blocks, std::move(labels), std::move(ids), train.size());
    auto const      features = trained.featurize(test_blocks);

    std::vector<std::optional<EnsemblePrediction>> slots(test->size());
    parallel_for(test->size(), options.jobs, [&](std::size_t i) {
      slots[i] = trained.predict(features, static_cast<Eigen::Index>(i), (*test)[i].id);
    });
    std::vector<EnsemblePrediction> preds;
    preds.reserve(slots.size());
    for (auto &s : slots)
    {
      preds.push_back(std::move(*s));
    }

    if (write_submissions && !options.out_dir.empty())
    {
      std::vector<PredictionRecord> records;
      std::string                   scores = "id\traw_score\trounded_label\n";
      for (auto const &p : preds)
      {
        records.push_back(to_record(p));
        scores += p.instance_id + '\t' + format_real(p.final_score) + '\t' + std::to_string(p.rounded.value()) + '\n';
      }
      auto const dir = options.out_dir / "predictions";
      fs::create_directories(dir);
      write_predictions(records, *test, dir / ("EI-oc_en_" + std::string(to_string(e)) + "_pred.txt"));
      write_text(dir / (std::string(to_string(e)) + "_scores.tsv"), scores);
    }

    std::unordered_map<std::string_view, std::size_t> train_index;
    for (std::size_t i = 0; i < train.size(); ++i)
    {
      train_index.emplace(train[i].id, i);
    }
    auto text_of = [&](std::string_view id) -> std::string {
      auto tit = train_index.find(id);
      return tit == train_index.end() ? std::string() : train[tit->second].text;
    };
    auto const names = trained.member_names();
    for (std::size_t i = 0; i < preds.size(); ++i)
    {
      auto const &inst = (*test)[i];
      if (!pending.contains(inst.id))
      {
        continue;
      }
      pending.erase(inst.id);
      auto report = explain_prediction(preds[i], names, text_of, inst.text,
                                       inst.label ? std::optional<int>(inst.label->value()) : std::nullopt);
      if (!options.out_dir.empty())
      {
        auto const dir = options.out_dir / "explanations";
        write_text(dir / (inst.id + ".json"), report.to_json());
        write_text(dir / (inst.id + ".txt"), report.to_text());
      }
      result.explanations.push_back(std::move(report));
    }
    result.predictions.emplace(e, std::move(preds));
  }

  if (!pending.empty())
  {
    std::string msg = "explanation ids not found in any test split:";
    for (auto const &id : pending)
    {
      msg += " " + id;
    }
    throw LookupError(msg);
  }
  return result;
}

// ---------------------------------------------------------------------------
// validation

ValidationReport validate_artifacts(ExperimentConfig const &config, std::vector<Emotion> const &emotions)
{
  ValidationReport report;
  auto fail = [&report](std::string msg) { report.failures.push_back(std::move(msg)); };

  auto check_path = [&](fs::path const &p, std::string const &what) {
    if (!fs::exists(p))
    {
      fail(what + ": missing file " + p.string());
      return false;
    }
    return true;
  };

  if (config.folds < 2)
  {
    fail("folds must be at least 2");
  }

  std::vector<Dataset> datasets;
  for (auto e : emotions)
  {
    auto it = config.data.find(e);
    if (it == config.data.end())
    {
      fail("no data configured for " + std::string(to_string(e)));
      continue;
    }
    auto const name = std::string(to_string(e));
    auto load       = [&](fs::path const &p, Split s) {
      if (!check_path(p, name + " " + std::string(to_string(s))))
      {
        return;
      }
      try
      {
        datasets.push_back(parse_dataset(p, s, e));
      }
      catch (std::exception const &ex)
      {
        fail(name + " " + std::string(to_string(s)) + ": " + ex.what());
      }
    };
    load(it->second.train, Split::train);
    if (it->second.dev)
    {
      load(*it->second.dev, Split::dev);
    }
    if (it->second.test)
    {
      load(*it->second.test, Split::test);
    }
  }

  for (auto const &[what, p] : {std::pair{"emoticon table", config.emoticons}, std::pair{"emoji table", config.emojis},
                                std::pair{"stop-word list", config.stopwords}})
  {
    if (p)
    {
      check_path(*p, what);
    }
  }

  std::set<LexiconName> lexicons;
  for (auto const &src : config.lexicons)
  {
    auto const name = std::string(to_string(src.name));
    lexicons.insert(src.name);
    if (!check_path(src.file, "lexicon " + name))
    {
      continue;
    }
    try
    {
      auto schema = LexiconSchema::standard(src.name);
      auto lex    = src.descriptor ? load_lexicon(src.file, schema, LexiconDescriptor::load(*src.descriptor))
                                   : load_lexicon(src.file, schema);
      if (lex.width() != schema.width)
      {
        fail("lexicon " + name + ": schema width " + std::to_string(lex.width()));
      }
    }
    catch (std::exception const &ex)
    {
      fail("lexicon " + name + " schema: " + ex.what());
    }
  }
  if (lexicons.size() == 5)
  {
    lexicons.insert(LexiconName::Combined);
  }

  std::set<std::pair<std::string, std::string>> stores;  // (model, cleaning or "*")
  for (auto const &src : config.embeddings)
  {
    std::optional<EmbeddingStore> merged;
    bool                          broken = false;
    for (auto const &f : src.files)
    {
      if (!check_path(f, "embedding " + src.model))
      {
        broken = true;
        continue;
      }
      try
      {
        auto s = load_embeddings(f);
        if (s.model_name() != src.model)
        {
          fail(f.string() + ": declares model '" + s.model_name() + "', expected '" + src.model + "'");
          broken = true;
          continue;
        }
        if (!merged)
        {
          merged.emplace(std::move(s));
        }
        else
        {
          merged->absorb(s);
        }
      }
      catch (std::exception const &ex)
      {
        fail("embedding " + src.model + ": " + ex.what());
        broken = true;
      }
    }
    auto const label = src.model + "/" + (src.cleaning ? src.cleaning->name() : std::string("*"));
    stores.emplace(src.model, src.cleaning ? src.cleaning->name() : std::string("*"));
    if (!merged || broken)
    {
      continue;
    }
    for (auto const &ds : datasets)
    {
      std::vector<std::string> missing;
      for (auto const &inst : ds.instances())
      {
        if (!merged->contains(inst.id))
        {
          missing.push_back(inst.id);
        }
      }
      if (missing.empty())
      {
        continue;
      }
      std::string msg = "embedding store " + label + " is missing " + std::to_string(missing.size()) + " " +
                        std::string(to_string(ds.emotion())) + " " + std::string(to_string(ds.split())) + " ids:";
      for (auto const &id : missing)
      {
        msg += " " + id;
      }
      if (merged->level() == EmbeddingLevel::token)
      {
        report.warnings.push_back(msg + " (treated as all out-of-vocabulary)");
      }
      else
      {
        fail(msg);
      }
    }
  }

  auto check_member = [&](MemberSpec const &m, std::string const &where) {
    try
    {
      m.features.validate();
      m.cleaning.validate();
    }
    catch (std::exception const &ex)
    {
      fail(where + ": " + ex.what());
      return;
    }
    if (m.k && (*m.k < 1 || *m.k % 2 == 0))
    {
      fail(where + ": k must be odd and positive, got " + std::to_string(*m.k));
    }
    if (m.features.embedding && !stores.contains({*m.features.embedding, m.cleaning.name()}) &&
        !stores.contains({*m.features.embedding, "*"}))
    {
      fail(where + ": no embedding store for " + *m.features.embedding + " with cleaning " + m.cleaning.name());
    }
    if (m.features.lexicon && !lexicons.contains(*m.features.lexicon))
    {
      fail(where + ": lexicon " + std::string(to_string(*m.features.lexicon)) + " not configured");
    }
    if (m.cleaning.remove_stopwords && !config.stopwords)
    {
      fail(where + ": stop-word removal needs a stop-word list");
    }
  };

  if (config.sweep.cleaning.empty() || config.sweep.k.empty())
  {
    fail("sweep grid: cleaning and k lists must be non-empty");
  }
  if (config.sweep.features.empty() && config.sweep.ensembles.empty())
  {
    fail("sweep grid: no features and no ensembles");
  }
  for (auto const &f : config.sweep.features)
  {
    for (auto const &c : config.sweep.cleaning)
    {
      for (auto const &k : config.sweep.k)
      {
        check_member(MemberSpec{f.name(), f, k, config.sweep.aggregation, c}, "sweep " + f.name() + "/" + c.name());
      }
    }
  }
  for (auto const &name : config.sweep.ensembles)
  {
    if (!config.ensembles.contains(name))
    {
      fail("sweep references unknown ensemble '" + name + "'");
    }
  }
  for (auto const &[name, ens] : config.ensembles)
  {
    for (auto e : emotions)
    {
      try
      {
        auto const &cfg = ens.for_emotion(e);
        for (std::size_t i = 0; i < cfg.members.size(); ++i)
        {
          check_member(cfg.members[i], "ensemble " + name + " (" + std::string(to_string(e)) + ") member " +
                                           cfg.members[i].name);
        }
      }
      catch (std::exception const &ex)
      {
        fail("ensemble " + name + ": " + ex.what());
      }
    }
  }
  for (auto const &[e, name] : config.predict_ensemble)
  {
    if (std::find(emotions.begin(), emotions.end(), e) != emotions.end() && !config.ensembles.contains(name))
    {
      fail("predict uses unknown ensemble '" + name + "'");
    }
  }
  std::set<std::string> seen;
  std::erase_if(report.failures, [&seen](std::string const &f) { return !seen.insert(f).second; });
  return report;
}

}  // namespace emoknn
