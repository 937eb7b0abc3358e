#include <cstdint>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "profilereg/baselines.hpp"
#include "profilereg/corpus.hpp"
#include "profilereg/error.hpp"
#include "profilereg/eval.hpp"
#include "profilereg/gradcheck.hpp"
#include "profilereg/model.hpp"
#include "profilereg/text.hpp"

namespace fs = std::filesystem;
using namespace profilereg;

namespace {

struct RunConfig {
  std::string samples;
  std::string profiles;
  std::string embeddings;
  std::string manifests;
  std::string model_dir;
  std::string train_samples;
  std::string predictions;
  std::string out;
  std::string config;
  std::string kind = "entity";
  std::string which = "onlyname";
  std::string granularity = "character";
  std::uint64_t seed = 1;
  int min_count = 1;
  // Central differences at float64: larger steps drown in truncation error,
  // smaller ones in roundoff against the 1e-8 denominator floor.
  double epsilon = 2e-3;
  int coords = 5;
  double tolerance = 1e-4;
  model::ModelConfig model;
};

std::string fmt_double(double v) {
  std::ostringstream out;
  out.precision(15);
  out << v;
  return out.str();
}

using ConfigEntries = std::vector<std::pair<std::string, std::string>>;

ConfigEntries model_entries(const model::ModelConfig& m) {
  return {
      {"word_embed_dim", std::to_string(m.word_embed_dim)},
      {"char_embed_dim", std::to_string(m.char_embed_dim)},
      {"char_merge_dim", std::to_string(m.char_merge_dim)},
      {"attn_dim", std::to_string(m.attn_dim)},
      {"word_hidden", std::to_string(m.word_hidden)},
      {"char_hidden", std::to_string(m.char_hidden)},
      {"max_decode_len", std::to_string(m.max_decode_len)},
      {"dropout_rate", fmt_double(m.dropout_rate)},
      {"batch_size", std::to_string(m.batch_size)},
      {"max_epochs", std::to_string(m.max_epochs)},
      {"patience", std::to_string(m.patience)},
      {"learning_rate", fmt_double(m.learning_rate)},
      {"clip_norm", fmt_double(m.clip_norm)},
  };
}

void write_effective_config(const fs::path& path, const std::string& command,
                            const ConfigEntries& entries) {
  std::ofstream out(path);
  if (!out) throw DataError(path.string() + ": cannot open for writing");
  out << "# profilereg " << command << "\n";
  for (const auto& [key, value] : entries) out << key << " = " << value << "\n";
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path + ": cannot open config");
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::size_t eq = t.find('=');
    if (eq == std::string::npos) {
      throw DataError(path + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    out[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
  }
  return out;
}

void apply_model_config(const std::map<std::string, std::string>& kv, model::ModelConfig& m) {
  auto geti = [&](const char* key, int& slot) {
    auto it = kv.find(key);
    if (it != kv.end()) slot = std::stoi(it->second);
  };
  auto getd = [&](const char* key, double& slot) {
    auto it = kv.find(key);
    if (it != kv.end()) slot = std::stod(it->second);
  };
  geti("word_embed_dim", m.word_embed_dim);
  geti("char_embed_dim", m.char_embed_dim);
  geti("char_merge_dim", m.char_merge_dim);
  geti("attn_dim", m.attn_dim);
  geti("word_hidden", m.word_hidden);
  geti("char_hidden", m.char_hidden);
  geti("max_decode_len", m.max_decode_len);
  getd("dropout_rate", m.dropout_rate);
  geti("batch_size", m.batch_size);
  geti("max_epochs", m.max_epochs);
  geti("patience", m.patience);
  getd("learning_rate", m.learning_rate);
  getd("clip_norm", m.clip_norm);
}

// Config files hold the same keys as the long options, one `key = value` per
// line. A file value applies only where the option was not given on the
// command line, so flags always win. The vendored CLI11 drops config values
// given to a subcommand's set_config, hence the hand-rolled merge.
struct ConfigMerge {
  CLI::App* sub;
  std::string path;
  std::map<std::string, std::string> kv;
  std::set<std::string> known;

  ConfigMerge(CLI::App* s, const std::string& config_path) : sub(s), path(config_path) {
    if (!path.empty()) kv = read_config_file(path);
  }

  [[noreturn]] void bad_value(const std::string& key, const std::string& v, const char* want) {
    throw DataError(path + ": key '" + key + "': expected " + want + ", got '" + v + "'");
  }

  const std::string* value_for(const std::string& key) {
    known.insert(key);
    auto it = kv.find(key);
    if (it == kv.end()) return nullptr;
    if (sub->get_option("--" + key)->count() > 0) return nullptr;
    return &it->second;
  }

  bool str(const std::string& key, std::string& slot) {
    const std::string* v = value_for(key);
    if (v == nullptr) return false;
    slot = *v;
    return true;
  }

  bool integer(const std::string& key, int& slot) {
    const std::string* v = value_for(key);
    if (v == nullptr) return false;
    std::size_t used = 0;
    int parsed = 0;
    try {
      parsed = std::stoi(*v, &used);
    } catch (const std::exception&) {
      bad_value(key, *v, "an integer");
    }
    if (used != v->size()) bad_value(key, *v, "an integer");
    slot = parsed;
    return true;
  }

  bool u64(const std::string& key, std::uint64_t& slot) {
    const std::string* v = value_for(key);
    if (v == nullptr) return false;
    std::size_t used = 0;
    std::uint64_t parsed = 0;
    try {
      parsed = std::stoull(*v, &used);
    } catch (const std::exception&) {
      bad_value(key, *v, "an unsigned integer");
    }
    if (used != v->size()) bad_value(key, *v, "an unsigned integer");
    slot = parsed;
    return true;
  }

  bool real(const std::string& key, double& slot) {
    const std::string* v = value_for(key);
    if (v == nullptr) return false;
    std::size_t used = 0;
    double parsed = 0.0;
    try {
      parsed = std::stod(*v, &used);
    } catch (const std::exception&) {
      bad_value(key, *v, "a number");
    }
    if (used != v->size()) bad_value(key, *v, "a number");
    slot = parsed;
    return true;
  }

  // Key that written configs record for provenance but this command takes no
  // flag for; accepted so an effective.cfg can be fed back verbatim.
  void recorded(const std::string& key) { known.insert(key); }

  bool specified(const std::string& key) const {
    return sub->get_option("--" + key)->count() > 0 || kv.count(key) > 0;
  }

  void finish() const {
    for (const auto& [key, value] : kv) {
      if (known.count(key) == 0) throw DataError(path + ": unknown config key '" + key + "'");
    }
  }
};

void merge_model_keys(ConfigMerge& m, model::ModelConfig& mc) {
  m.integer("word_embed_dim", mc.word_embed_dim);
  m.integer("char_embed_dim", mc.char_embed_dim);
  m.integer("char_merge_dim", mc.char_merge_dim);
  m.integer("attn_dim", mc.attn_dim);
  m.integer("word_hidden", mc.word_hidden);
  m.integer("char_hidden", mc.char_hidden);
  m.integer("max_decode_len", mc.max_decode_len);
  m.real("dropout_rate", mc.dropout_rate);
  m.integer("batch_size", mc.batch_size);
  m.integer("max_epochs", mc.max_epochs);
  m.integer("patience", mc.patience);
  m.real("learning_rate", mc.learning_rate);
  m.real("clip_norm", mc.clip_norm);
}

void accept_model_keys(ConfigMerge& m) {
  model::ModelConfig defaults;
  for (const auto& [key, value] : model_entries(defaults)) m.recorded(key);
}

void require_present(const char* flag, const std::string& value) {
  if (value.empty()) throw CLI::RequiredError(flag);
}

void require_member(const char* flag, const std::string& value,
                    std::initializer_list<const char*> allowed) {
  std::string joined;
  for (const char* a : allowed) {
    if (value == a) return;
    if (!joined.empty()) joined += "|";
    joined += a;
  }
  throw CLI::ValidationError(std::string(flag) + ": '" + value + "' is not one of " + joined);
}

corpus::SplitManifest make_manifest(const RunConfig& rc,
                                    const std::vector<corpus::Sample>& samples) {
  if (rc.kind == "entity") return corpus::manifest_for_entity_split(samples, rc.seed);
  if (rc.kind == "random") return corpus::manifest_for_random_split(samples, rc.seed);
  if (rc.manifests.empty()) {
    throw DataError("split kind 'original' needs --manifests pointing at *.ids files");
  }
  corpus::SplitManifest m;
  m.train = corpus::load_manifest_file(rc.manifests + "/train.ids");
  m.dev = corpus::load_manifest_file(rc.manifests + "/dev.ids");
  m.test = corpus::load_manifest_file(rc.manifests + "/test.ids");
  return m;
}

struct LoadedModel {
  model::ModelConfig cfg;
  corpus::Vocabulary vocab;
  model::ModelParams params;
};

LoadedModel load_model_dir(const std::string& dir) {
  LoadedModel lm;
  apply_model_config(read_config_file(dir + "/effective.cfg"), lm.cfg);
  lm.vocab = corpus::Vocabulary::load(dir + "/vocab.txt", dir + "/chars.txt");
  lm.cfg.vocab_size = lm.vocab.size();
  lm.cfg.char_vocab_size = lm.vocab.char_size();
  Rng rng(1);
  lm.params = model::ModelParams::init(lm.cfg, rng);
  model::apply_checkpoint(model::load_checkpoint(dir + "/checkpoint.bin"), lm.params.named());
  return lm;
}

struct Prediction {
  std::string wiki_id;
  std::vector<std::string> tokens;
};

std::vector<Prediction> read_predictions(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path + ": cannot open predictions");
  std::vector<Prediction> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw DataError(path + ":" + std::to_string(line_no) + ": expected wiki_id<TAB>expression");
    }
    Prediction p;
    p.wiki_id = line.substr(0, tab);
    p.tokens = text::split_whitespace(line.substr(tab + 1));
    out.push_back(std::move(p));
  }
  return out;
}

void write_predictions(const fs::path& path, const std::vector<Prediction>& predictions) {
  std::ofstream out(path);
  if (!out) throw DataError(path.string() + ": cannot open for writing");
  for (const Prediction& p : predictions) out << p.wiki_id << '\t' << text::join(p.tokens) << '\n';
}

std::vector<std::string> raw_profile_tokens(
    const std::map<std::string, std::vector<std::string>>& raw_map, const std::string& wiki_id) {
  auto it = raw_map.find(wiki_id);
  if (it != raw_map.end() && !it->second.empty()) return it->second;
  std::string spaced = wiki_id;
  for (char& c : spaced) {
    if (c == '_') c = ' ';
  }
  return text::split_whitespace(spaced);
}

corpus::Form sample_form(const corpus::Sample& s) {
  return s.gold_form ? *s.gold_form : corpus::classify_form(s.gold_expression);
}

void make_out_dir(const std::string& out) {
  if (out.empty()) throw DataError("--out must not be empty");
  fs::create_directories(out);
}

// --- subcommands -------------------------------------------------------------

void run_split(const RunConfig& rc) {
  std::vector<corpus::Sample> samples = corpus::parse_samples(rc.samples);
  corpus::SplitManifest manifest = make_manifest(rc, samples);
  corpus::DatasetSplit split = corpus::split_original(samples, manifest);

  make_out_dir(rc.out);
  ConfigEntries entries = {{"samples", rc.samples}, {"kind", rc.kind},
                           {"seed", std::to_string(rc.seed)}};
  if (!rc.manifests.empty()) entries.emplace_back("manifests", rc.manifests);
  write_effective_config(fs::path(rc.out) / "effective.cfg", "split", entries);

  corpus::write_manifest_file(manifest.train, rc.out + "/train.ids");
  corpus::write_manifest_file(manifest.dev, rc.out + "/dev.ids");
  corpus::write_manifest_file(manifest.test, rc.out + "/test.ids");
  corpus::write_samples(split.train, rc.out + "/train.tsv");
  corpus::write_samples(split.dev, rc.out + "/dev.tsv");
  corpus::write_samples(split.test, rc.out + "/test.tsv");
  std::cout << "split " << rc.kind << ": train " << split.train.size() << ", dev "
            << split.dev.size() << ", test " << split.test.size() << "\n";
}

void run_train(RunConfig& rc) {
  std::vector<corpus::Sample> samples = corpus::parse_samples(rc.samples);
  std::vector<corpus::ProfileRecord> records = corpus::load_profiles(rc.profiles);
  std::map<std::string, corpus::Profile> profiles = corpus::normalize_profiles(records);

  corpus::SplitManifest manifest = make_manifest(rc, samples);
  corpus::DatasetSplit split = corpus::split_original(samples, manifest);

  corpus::Vocabulary vocab = corpus::Vocabulary::build(split.train, profiles, rc.min_count);
  rc.model.vocab_size = vocab.size();
  rc.model.char_vocab_size = vocab.char_size();
  rc.model.seed = rc.seed;

  make_out_dir(rc.out);
  ConfigEntries entries = {{"samples", rc.samples},
                           {"profiles", rc.profiles},
                           {"kind", rc.kind},
                           {"seed", std::to_string(rc.seed)},
                           {"min_count", std::to_string(rc.min_count)}};
  if (!rc.embeddings.empty()) entries.emplace_back("embeddings", rc.embeddings);
  if (!rc.manifests.empty()) entries.emplace_back("manifests", rc.manifests);
  for (auto& e : model_entries(rc.model)) entries.push_back(std::move(e));
  write_effective_config(fs::path(rc.out) / "effective.cfg", "train", entries);

  vocab.save(rc.out + "/vocab.txt", rc.out + "/chars.txt");

  std::function<void(model::ModelParams&)> after_init;
  if (!rc.embeddings.empty()) {
    after_init = [&](model::ModelParams& p) {
      int loaded = model::load_pretrained_embeddings(rc.embeddings, vocab, p.word_embed);
      std::cout << "pretrained embeddings: " << loaded << " rows initialized\n";
    };
  }

  model::TrainResult result = model::train(rc.model, split, profiles, vocab, &std::cout,
                                           after_init);
  model::save_checkpoint(rc.out + "/checkpoint.bin", result.params.named());

  std::ofstream log(rc.out + "/train_log.tsv");
  if (!log) throw DataError(rc.out + "/train_log.tsv: cannot open for writing");
  log << "epoch\tmean_loss\tdev_accuracy\n";
  log.precision(15);
  for (const model::EpochLog& e : result.log) {
    log << e.epoch << '\t' << e.mean_loss << '\t' << e.dev_accuracy << '\n';
  }
  std::cout << "best epoch " << result.best_epoch << " with dev accuracy "
            << result.best_dev_accuracy << "\n";
}

void run_generate(RunConfig& rc, bool max_len_overridden) {
  std::vector<corpus::Sample> samples = corpus::parse_samples(rc.samples);
  std::vector<corpus::ProfileRecord> records = corpus::load_profiles(rc.profiles);
  std::map<std::string, corpus::Profile> profiles = corpus::normalize_profiles(records);
  LoadedModel lm = load_model_dir(rc.model_dir);
  if (max_len_overridden) lm.cfg.max_decode_len = rc.model.max_decode_len;

  make_out_dir(rc.out);
  ConfigEntries entries = {{"samples", rc.samples},
                           {"profiles", rc.profiles},
                           {"model", rc.model_dir},
                           {"seed", std::to_string(rc.seed)}};
  for (auto& e : model_entries(lm.cfg)) entries.push_back(std::move(e));
  write_effective_config(fs::path(rc.out) / "effective.cfg", "generate", entries);

  std::vector<Prediction> predictions;
  predictions.reserve(samples.size());
  for (const corpus::Sample& sample : samples) {
    corpus::Profile profile = corpus::profile_for(profiles, sample.wiki_id);
    Prediction p;
    p.wiki_id = sample.wiki_id;
    p.tokens = model::greedy_decode(lm.params, lm.cfg, sample, profile, lm.vocab,
                                    lm.cfg.max_decode_len);
    predictions.push_back(std::move(p));
  }
  write_predictions(fs::path(rc.out) / "predictions.tsv", predictions);
  std::cout << "generated " << predictions.size() << " expressions\n";
}

void run_evaluate(const RunConfig& rc) {
  std::vector<corpus::Sample> samples = corpus::parse_samples(rc.samples);
  std::vector<Prediction> predictions = read_predictions(rc.predictions);
  if (predictions.size() != samples.size()) {
    throw DataError("evaluate: " + std::to_string(samples.size()) + " samples but " +
                    std::to_string(predictions.size()) + " predictions");
  }
  std::set<std::string> train_ids;
  if (!rc.train_samples.empty()) {
    for (const corpus::Sample& s : corpus::parse_samples(rc.train_samples)) {
      train_ids.insert(s.wiki_id);
    }
  }

  std::vector<eval::EvalPair> pairs;
  pairs.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const corpus::Sample& s = samples[i];
    const Prediction& p = predictions[i];
    if (p.wiki_id != s.wiki_id) {
      throw DataError("evaluate: prediction " + std::to_string(i + 1) + " is for '" + p.wiki_id +
                      "' but sample is '" + s.wiki_id + "'");
    }
    eval::EvalPair pair;
    pair.wiki_id = s.wiki_id;
    pair.gold = s.gold_expression;
    pair.generated = p.tokens;
    pair.gold_form = sample_form(s);
    pair.seen = train_ids.empty() ? true : train_ids.count(s.wiki_id) > 0;
    pairs.push_back(std::move(pair));
  }

  eval::SedGranularity granularity = rc.granularity == "token" ? eval::SedGranularity::token
                                                               : eval::SedGranularity::character;
  eval::EvalReport report = eval::evaluate(pairs, granularity);

  make_out_dir(rc.out);
  ConfigEntries entries = {{"samples", rc.samples},
                           {"predictions", rc.predictions},
                           {"granularity", rc.granularity},
                           {"seed", std::to_string(rc.seed)}};
  if (!rc.train_samples.empty()) entries.emplace_back("train_samples", rc.train_samples);
  write_effective_config(fs::path(rc.out) / "effective.cfg", "evaluate", entries);

  std::ofstream text_out(rc.out + "/report.txt");
  if (!text_out) throw DataError(rc.out + "/report.txt: cannot open for writing");
  eval::write_report_text(report, text_out);
  std::ofstream tsv_out(rc.out + "/report.tsv");
  if (!tsv_out) throw DataError(rc.out + "/report.tsv: cannot open for writing");
  eval::write_report_tsv(report, tsv_out);
  eval::write_report_text(report, std::cout);
}

void run_baseline(const RunConfig& rc) {
  std::vector<corpus::Sample> samples = corpus::parse_samples(rc.samples);
  std::vector<corpus::ProfileRecord> records = corpus::load_profiles(rc.profiles);
  std::map<std::string, corpus::Profile> profiles = corpus::normalize_profiles(records);
  std::map<std::string, std::vector<std::string>> raw_map;
  for (const corpus::ProfileRecord& r : records) {
    raw_map[r.wiki_id] = text::split_whitespace(r.raw_text);
  }

  corpus::SplitManifest manifest = make_manifest(rc, samples);
  corpus::DatasetSplit split = corpus::split_original(samples, manifest);

  make_out_dir(rc.out);
  ConfigEntries entries = {{"samples", rc.samples},
                           {"profiles", rc.profiles},
                           {"which", rc.which},
                           {"kind", rc.kind},
                           {"seed", std::to_string(rc.seed)}};
  if (!rc.manifests.empty()) entries.emplace_back("manifests", rc.manifests);
  write_effective_config(fs::path(rc.out) / "effective.cfg", "baseline", entries);

  std::vector<Prediction> predictions;
  predictions.reserve(split.test.size());
  if (rc.which == "onlyname") {
    for (const corpus::Sample& s : split.test) {
      Prediction p;
      p.wiki_id = s.wiki_id;
      p.tokens = baselines::only_name(raw_profile_tokens(raw_map, s.wiki_id));
      predictions.push_back(std::move(p));
    }
  } else {
    std::vector<std::pair<baselines::FeatureVector, corpus::Form>> examples;
    examples.reserve(split.train.size());
    for (const corpus::Sample& s : split.train) {
      std::vector<int> mentions = baselines::find_entity_mentions(s.pre_context, s.wiki_id);
      examples.emplace_back(baselines::extract_features(s, mentions), sample_form(s));
    }
    baselines::NaiveBayesModel nb = baselines::nb_train(examples);
    for (const corpus::Sample& s : split.test) {
      std::vector<int> mentions = baselines::find_entity_mentions(s.pre_context, s.wiki_id);
      corpus::Form form = baselines::nb_predict_form(nb, baselines::extract_features(s, mentions));
      corpus::Profile profile = corpus::profile_for(profiles, s.wiki_id);
      Prediction p;
      p.wiki_id = s.wiki_id;
      p.tokens = baselines::ferreira_realize(form, raw_profile_tokens(raw_map, s.wiki_id), profile,
                                             s.gold_expression);
      predictions.push_back(std::move(p));
    }
  }
  write_predictions(fs::path(rc.out) / "predictions.tsv", predictions);
  std::cout << "baseline " << rc.which << ": " << predictions.size()
            << " predictions for the test partition\n";
}

void run_gradcheck(const RunConfig& rc) {
  // Small fixed fixture; dimensions come from the model flags.
  std::vector<corpus::Sample> samples;
  corpus::Sample a;
  a.wiki_id = "Ada_Lim";
  a.gold_expression = {"Ada", "Lim"};
  a.pre_context = {"the", "piece", "by"};
  a.post_context = {"won", "praise", "."};
  corpus::Sample b;
  b.wiki_id = "Bo_Rey";
  b.gold_expression = {"she"};
  b.post_context = {"wrote", "it", "."};
  samples.push_back(a);
  samples.push_back(b);

  std::vector<corpus::ProfileRecord> records = {
      {"Ada_Lim", "Ada Lim is a composer from Oslo ."},
      {"Bo_Rey", "Bo Rey is a pilot ."},
  };
  std::map<std::string, corpus::Profile> profiles = corpus::normalize_profiles(records);
  corpus::Vocabulary vocab = corpus::Vocabulary::build(samples, profiles, 1);

  model::ModelConfig cfg = rc.model;
  cfg.vocab_size = vocab.size();
  cfg.char_vocab_size = vocab.char_size();
  cfg.seed = rc.seed;

  Rng init_rng(cfg.seed);
  model::ModelParams params = model::ModelParams::init(cfg, init_rng);
  std::vector<nn::NamedTensor> named = params.named();

  model::DropoutPlan inference;  // gradient checking needs a deterministic loss
  auto loss_fn = [&]() {
    double total = 0.0;
    for (const corpus::Sample& s : samples) {
      nn::Graph g;
      corpus::Profile profile = corpus::profile_for(profiles, s.wiki_id);
      nn::Var loss = model::sample_loss(g, params, cfg, s, profile, vocab, inference);
      g.backward(loss);
      total += g.value(loss).at(0);
    }
    return total;
  };

  Rng coord_rng(cfg.seed);
  nn::GradCheckReport report = nn::grad_check(loss_fn, named, rc.epsilon, rc.coords, coord_rng);

  std::ostringstream lines;
  lines << "checked " << report.coords_checked << " coordinates across " << named.size()
        << " tensors\n";
  lines << "max relative error = " << report.max_rel_error << " at " << report.worst_param << "["
        << report.worst_coord << "] (analytic " << report.worst_analytic << ", numeric "
        << report.worst_numeric << ")\n";
  std::cout << lines.str();

  if (!rc.out.empty()) {
    make_out_dir(rc.out);
    ConfigEntries entries = {{"seed", std::to_string(rc.seed)},
                             {"epsilon", fmt_double(rc.epsilon)},
                             {"coords", std::to_string(rc.coords)},
                             {"tolerance", fmt_double(rc.tolerance)}};
    for (auto& e : model_entries(cfg)) entries.push_back(std::move(e));
    write_effective_config(fs::path(rc.out) / "effective.cfg", "gradcheck", entries);
    std::ofstream out(rc.out + "/gradcheck.txt");
    if (!out) throw DataError(rc.out + "/gradcheck.txt: cannot open for writing");
    out << lines.str();
  }

  if (report.max_rel_error > rc.tolerance) {
    throw NumericError("gradient check failed: max relative error " +
                       fmt_double(report.max_rel_error) + " exceeds " +
                       fmt_double(rc.tolerance));
  }
}

void run_stats(const RunConfig& rc) {
  std::vector<corpus::Sample> samples = corpus::parse_samples(rc.samples);
  std::vector<corpus::ProfileRecord> records = corpus::load_profiles(rc.profiles);
  std::map<std::string, corpus::Profile> profiles = corpus::normalize_profiles(records);
  LoadedModel lm = load_model_dir(rc.model_dir);

  model::SwitchStats stats = model::switch_statistics(lm.params, lm.cfg, samples, profiles,
                                                      lm.vocab);

  make_out_dir(rc.out);
  ConfigEntries entries = {{"samples", rc.samples},
                           {"profiles", rc.profiles},
                           {"model", rc.model_dir},
                           {"seed", std::to_string(rc.seed)}};
  for (auto& e : model_entries(lm.cfg)) entries.push_back(std::move(e));
  write_effective_config(fs::path(rc.out) / "effective.cfg", "stats", entries);

  std::ofstream out(rc.out + "/switch_stats.tsv");
  if (!out) throw DataError(rc.out + "/switch_stats.tsv: cannot open for writing");
  model::write_switch_stats(stats, out);
  model::write_switch_stats(stats, std::cout);
}

void add_model_options(CLI::App* sub, RunConfig& rc) {
  sub->add_option("--word_embed_dim", rc.model.word_embed_dim, "Word embedding size");
  sub->add_option("--char_embed_dim", rc.model.char_embed_dim, "Character embedding size");
  sub->add_option("--char_merge_dim", rc.model.char_merge_dim, "Character merge layer size");
  sub->add_option("--attn_dim", rc.model.attn_dim, "Attention scorer inner size");
  sub->add_option("--word_hidden", rc.model.word_hidden, "Word-level LSTM hidden size");
  sub->add_option("--char_hidden", rc.model.char_hidden, "Character LSTM hidden size");
  sub->add_option("--max_decode_len", rc.model.max_decode_len, "Greedy decoding cap");
  sub->add_option("--dropout_rate", rc.model.dropout_rate, "Dropout rate in [0, 1)");
  sub->add_option("--batch_size", rc.model.batch_size, "Samples per optimizer step");
  sub->add_option("--max_epochs", rc.model.max_epochs, "Upper bound on training epochs");
  sub->add_option("--patience", rc.model.patience, "Epochs without dev improvement before stop");
  sub->add_option("--learning_rate", rc.model.learning_rate, "Adam learning rate");
  sub->add_option("--clip_norm", rc.model.clip_norm, "Global gradient norm cap");
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig rc;
  CLI::App app{"profile-conditioned referring expression generation"};
  app.require_subcommand(1);

  CLI::App* split = app.add_subcommand("split", "Partition a sample file into train/dev/test");
  split->add_option("--config", rc.config, "Key = value config file; flags override it")
      ->check(CLI::ExistingFile);
  split->add_option("--samples", rc.samples, "Sample TSV")->check(CLI::ExistingFile);
  split->add_option("--kind", rc.kind, "entity | random | original")
      ->check(CLI::IsMember({"entity", "random", "original"}));
  split->add_option("--seed", rc.seed, "Shuffle seed");
  split->add_option("--manifests", rc.manifests, "Directory with train/dev/test.ids")
      ->check(CLI::ExistingDirectory);
  split->add_option("--out", rc.out, "Output directory");
  split->callback([&]() {
    ConfigMerge m(split, rc.config);
    m.str("samples", rc.samples);
    m.str("kind", rc.kind);
    m.u64("seed", rc.seed);
    m.str("manifests", rc.manifests);
    m.str("out", rc.out);
    m.finish();
    require_present("--samples", rc.samples);
    require_present("--out", rc.out);
    require_member("--kind", rc.kind, {"entity", "random", "original"});
    run_split(rc);
  });

  CLI::App* train = app.add_subcommand("train", "Train the generator");
  train->add_option("--config", rc.config, "Key = value config file; flags override it")
      ->check(CLI::ExistingFile);
  train->add_option("--samples", rc.samples, "Sample TSV")->check(CLI::ExistingFile);
  train->add_option("--profiles", rc.profiles, "Profile TSV")->check(CLI::ExistingFile);
  train->add_option("--embeddings", rc.embeddings, "Pretrained word embeddings, text format")
      ->check(CLI::ExistingFile);
  train->add_option("--kind", rc.kind, "entity | random | original")
      ->check(CLI::IsMember({"entity", "random", "original"}));
  train->add_option("--seed", rc.seed, "Split, init and shuffle seed");
  train->add_option("--manifests", rc.manifests, "Directory with train/dev/test.ids")
      ->check(CLI::ExistingDirectory);
  train->add_option("--min_count", rc.min_count, "Vocabulary frequency threshold");
  train->add_option("--out", rc.out, "Model output directory");
  add_model_options(train, rc);
  train->callback([&]() {
    ConfigMerge m(train, rc.config);
    m.str("samples", rc.samples);
    m.str("profiles", rc.profiles);
    m.str("embeddings", rc.embeddings);
    m.str("kind", rc.kind);
    m.u64("seed", rc.seed);
    m.str("manifests", rc.manifests);
    m.integer("min_count", rc.min_count);
    m.str("out", rc.out);
    merge_model_keys(m, rc.model);
    m.finish();
    require_present("--samples", rc.samples);
    require_present("--profiles", rc.profiles);
    require_present("--out", rc.out);
    require_member("--kind", rc.kind, {"entity", "random", "original"});
    run_train(rc);
  });

  CLI::App* generate = app.add_subcommand("generate", "Greedy-decode expressions for a sample file");
  generate->add_option("--config", rc.config, "Key = value config file; flags override it")
      ->check(CLI::ExistingFile);
  generate->add_option("--samples", rc.samples, "Sample TSV")->check(CLI::ExistingFile);
  generate->add_option("--profiles", rc.profiles, "Profile TSV")->check(CLI::ExistingFile);
  generate->add_option("--model", rc.model_dir, "Model directory from train")
      ->check(CLI::ExistingDirectory);
  auto* max_len_opt =
      generate->add_option("--max_decode_len", rc.model.max_decode_len, "Greedy decoding cap");
  generate->add_option("--seed", rc.seed, "Recorded in the effective config");
  generate->add_option("--out", rc.out, "Output directory");
  generate->callback([&]() {
    ConfigMerge m(generate, rc.config);
    m.str("samples", rc.samples);
    m.str("profiles", rc.profiles);
    m.str("model", rc.model_dir);
    bool max_len_set = m.integer("max_decode_len", rc.model.max_decode_len);
    m.u64("seed", rc.seed);
    m.str("out", rc.out);
    accept_model_keys(m);
    m.finish();
    require_present("--samples", rc.samples);
    require_present("--profiles", rc.profiles);
    require_present("--model", rc.model_dir);
    require_present("--out", rc.out);
    run_generate(rc, max_len_set || max_len_opt->count() > 0);
  });

  CLI::App* evaluate = app.add_subcommand("evaluate", "Score predictions against gold samples");
  evaluate->add_option("--config", rc.config, "Key = value config file; flags override it")
      ->check(CLI::ExistingFile);
  evaluate->add_option("--samples", rc.samples, "Gold sample TSV")->check(CLI::ExistingFile);
  evaluate->add_option("--predictions", rc.predictions, "Predictions TSV from generate/baseline")
      ->check(CLI::ExistingFile);
  evaluate->add_option("--train_samples", rc.train_samples,
                       "Training sample TSV for the seen/unseen split")
      ->check(CLI::ExistingFile);
  evaluate->add_option("--granularity", rc.granularity, "character | token")
      ->check(CLI::IsMember({"character", "token"}));
  evaluate->add_option("--seed", rc.seed, "Recorded in the effective config");
  evaluate->add_option("--out", rc.out, "Output directory");
  evaluate->callback([&]() {
    ConfigMerge m(evaluate, rc.config);
    m.str("samples", rc.samples);
    m.str("predictions", rc.predictions);
    m.str("train_samples", rc.train_samples);
    m.str("granularity", rc.granularity);
    m.u64("seed", rc.seed);
    m.str("out", rc.out);
    m.finish();
    require_present("--samples", rc.samples);
    require_present("--predictions", rc.predictions);
    require_present("--out", rc.out);
    require_member("--granularity", rc.granularity, {"character", "token"});
    run_evaluate(rc);
  });

  CLI::App* baseline = app.add_subcommand("baseline", "Run a baseline on the test partition");
  baseline->add_option("--config", rc.config, "Key = value config file; flags override it")
      ->check(CLI::ExistingFile);
  baseline->add_option("--which", rc.which, "onlyname | ferreira")
      ->check(CLI::IsMember({"onlyname", "ferreira"}));
  baseline->add_option("--samples", rc.samples, "Sample TSV")->check(CLI::ExistingFile);
  baseline->add_option("--profiles", rc.profiles, "Profile TSV")->check(CLI::ExistingFile);
  baseline->add_option("--kind", rc.kind, "entity | random | original")
      ->check(CLI::IsMember({"entity", "random", "original"}));
  baseline->add_option("--seed", rc.seed, "Split seed");
  baseline->add_option("--manifests", rc.manifests, "Directory with train/dev/test.ids")
      ->check(CLI::ExistingDirectory);
  baseline->add_option("--out", rc.out, "Output directory");
  baseline->callback([&]() {
    ConfigMerge m(baseline, rc.config);
    m.str("which", rc.which);
    m.str("samples", rc.samples);
    m.str("profiles", rc.profiles);
    m.str("kind", rc.kind);
    m.u64("seed", rc.seed);
    m.str("manifests", rc.manifests);
    m.str("out", rc.out);
    m.finish();
    require_present("--samples", rc.samples);
    require_present("--profiles", rc.profiles);
    require_present("--out", rc.out);
    require_member("--which", rc.which, {"onlyname", "ferreira"});
    require_member("--kind", rc.kind, {"entity", "random", "original"});
    run_baseline(rc);
  });

  CLI::App* gradcheck = app.add_subcommand("gradcheck", "Finite-difference gradient check");
  gradcheck->add_option("--config", rc.config, "Key = value config file; flags override it")
      ->check(CLI::ExistingFile);
  gradcheck->add_option("--seed", rc.seed, "Init and coordinate sampling seed");
  gradcheck->add_option("--epsilon", rc.epsilon, "Central difference step");
  gradcheck->add_option("--coords", rc.coords, "Coordinates checked per tensor (<= 0: all)");
  gradcheck->add_option("--tolerance", rc.tolerance, "Maximum acceptable relative error");
  gradcheck->add_option("--out", rc.out, "Optional output directory");
  add_model_options(gradcheck, rc);
  gradcheck->callback([&]() {
    ConfigMerge m(gradcheck, rc.config);
    m.u64("seed", rc.seed);
    m.real("epsilon", rc.epsilon);
    m.integer("coords", rc.coords);
    m.real("tolerance", rc.tolerance);
    m.str("out", rc.out);
    merge_model_keys(m, rc.model);
    m.finish();
    // Toy dimensions unless explicitly overridden; full size would be slow here.
    auto fallback = [&](const char* key, int& slot, int small) {
      if (!m.specified(key)) slot = small;
    };
    fallback("word_embed_dim", rc.model.word_embed_dim, 8);
    fallback("char_embed_dim", rc.model.char_embed_dim, 6);
    fallback("char_merge_dim", rc.model.char_merge_dim, 5);
    fallback("attn_dim", rc.model.attn_dim, 7);
    fallback("word_hidden", rc.model.word_hidden, 8);
    fallback("char_hidden", rc.model.char_hidden, 4);
    run_gradcheck(rc);
  });

  CLI::App* stats = app.add_subcommand("stats", "Per-form switch probability table");
  stats->add_option("--config", rc.config, "Key = value config file; flags override it")
      ->check(CLI::ExistingFile);
  stats->add_option("--samples", rc.samples, "Sample TSV")->check(CLI::ExistingFile);
  stats->add_option("--profiles", rc.profiles, "Profile TSV")->check(CLI::ExistingFile);
  stats->add_option("--model", rc.model_dir, "Model directory from train")
      ->check(CLI::ExistingDirectory);
  stats->add_option("--seed", rc.seed, "Recorded in the effective config");
  stats->add_option("--out", rc.out, "Output directory");
  stats->callback([&]() {
    ConfigMerge m(stats, rc.config);
    m.str("samples", rc.samples);
    m.str("profiles", rc.profiles);
    m.str("model", rc.model_dir);
    m.u64("seed", rc.seed);
    m.str("out", rc.out);
    accept_model_keys(m);
    m.finish();
    require_present("--samples", rc.samples);
    require_present("--profiles", rc.profiles);
    require_present("--model", rc.model_dir);
    require_present("--out", rc.out);
    run_stats(rc);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
