// Release gate: one PASS/FAIL line per criterion, exit 0 only when all hold.
#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "harness.hpp"
#include "profilereg/baselines.hpp"
#include "profilereg/corpus.hpp"
#include "profilereg/error.hpp"
#include "profilereg/eval.hpp"
#include "profilereg/gradcheck.hpp"
#include "profilereg/model.hpp"
#include "synthetic.hpp"

using namespace profilereg;

namespace {

int failures = 0;

void report(int number, const std::string& what, bool ok, const std::string& detail = "") {
  std::printf("%s  %2d  %s%s%s\n", ok ? "PASS" : "FAIL", number, what.c_str(),
              detail.empty() ? "" : " -- ", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

// One entity, five plain words, a five-token profile: vocabulary is exactly
// 4 specials + 16 pronouns + 5 words = 25. The two samples exercise the
// copy, pronoun and generate routes.
struct GradFixture {
  std::vector<corpus::Sample> samples;
  std::map<std::string, corpus::Profile> profiles;
  corpus::Vocabulary vocab;
};

GradFixture make_grad_fixture() {
  GradFixture f;
  corpus::Sample a;
  a.wiki_id = "x_y";
  a.gold_expression = {"alpha"};
  a.pre_context = {"beta", "gamma"};
  a.post_context = {"delta"};
  corpus::Sample b;
  b.wiki_id = "x_y";
  b.gold_expression = {"she"};
  b.pre_context = {"epsilon"};
  b.post_context = {"alpha", "delta"};
  f.samples = {a, b};
  f.profiles["x_y"] = corpus::Profile{"x_y", {"alpha", "beta", "gamma", "delta", "epsilon"}};
  f.vocab = corpus::Vocabulary::build(f.samples, f.profiles, 1);
  return f;
}

model::ModelConfig toy_config(const corpus::Vocabulary& vocab, int word_embed, int char_embed,
                              int char_merge, int attn, int word_hidden, int char_hidden) {
  model::ModelConfig cfg;
  cfg.word_embed_dim = word_embed;
  cfg.char_embed_dim = char_embed;
  cfg.char_merge_dim = char_merge;
  cfg.attn_dim = attn;
  cfg.word_hidden = word_hidden;
  cfg.char_hidden = char_hidden;
  cfg.vocab_size = vocab.size();
  cfg.char_vocab_size = vocab.char_size();
  cfg.dropout_rate = 0.0;
  return cfg;
}

// 1. Analytic gradients of the training loss agree with central differences
//    on every coordinate of every tensor, with dropout off.
void criterion_gradients() {
  GradFixture f = make_grad_fixture();
  model::ModelConfig cfg = toy_config(f.vocab, 8, 6, 5, 7, 8, 4);
  Rng init_rng(1);
  model::ModelParams params = model::ModelParams::init(cfg, init_rng);
  std::vector<nn::NamedTensor> named = params.named();
  model::DropoutPlan inference;
  auto loss_fn = [&]() {
    double total = 0.0;
    for (const corpus::Sample& s : f.samples) {
      nn::Graph g;
      corpus::Profile profile = corpus::profile_for(f.profiles, s.wiki_id);
      nn::Var loss = model::sample_loss(g, params, cfg, s, profile, f.vocab, inference);
      g.backward(loss);
      total += g.value(loss).at(0);
    }
    return total;
  };
  auto started = std::chrono::steady_clock::now();
  Rng coord_rng(1);
  nn::GradCheckReport r = nn::grad_check(loss_fn, named, 2e-3, 0, coord_rng);
  auto seconds = std::chrono::duration_cast<std::chrono::seconds>(
                     std::chrono::steady_clock::now() - started)
                     .count();
  std::ostringstream detail;
  detail << r.coords_checked << " coordinates, max relative error " << r.max_rel_error << " at "
         << r.worst_param << "[" << r.worst_coord << "], " << seconds << "s";
  report(1, "full-model gradient check stays under 1e-4", r.max_rel_error < 1e-4, detail.str());
}

// 2. Attention, vocabulary, switch and final outputs are probability
//    distributions for 1000 random parameter draws and inputs.
void criterion_distributions() {
  GradFixture f = make_grad_fixture();
  model::ModelConfig cfg = toy_config(f.vocab, 4, 3, 2, 2, 3, 2);
  model::DropoutPlan inference;
  bool ok = true;
  std::string detail;
  for (int draw = 0; draw < 1000 && ok; ++draw) {
    Rng rng(static_cast<std::uint64_t>(draw + 1));
    model::ModelParams params = model::ModelParams::init(cfg, rng);
    const corpus::Sample& s = f.samples[static_cast<std::size_t>(draw % 2)];
    nn::Graph g;
    corpus::Profile profile = corpus::profile_for(f.profiles, s.wiki_id);
    auto enc = model::encode_sample(g, params, cfg, s, profile, f.vocab, inference);
    int input_id = draw % f.vocab.size();
    auto step = model::decode_step(g, params, cfg, enc, input_id, enc.context,
                                   g.zeros(cfg.word_hidden), inference);
    for (nn::Var v : {step.attention, step.vocab_dist, step.switch3, step.final}) {
      double sum = 0.0;
      for (double x : g.value(v).values) {
        if (x < 0.0) ok = false;
        sum += x;
      }
      if (std::abs(sum - 1.0) > 1e-9) ok = false;
    }
    if (!ok) detail = "violated at draw " + std::to_string(draw);
  }
  report(2, "decoder outputs stay normalized across 1000 random draws", ok, detail);
}

// 3. Forcing the switch to the copy route makes every generated token a
//    profile token.
void criterion_forced_copy() {
  GradFixture f = make_grad_fixture();
  model::ModelConfig cfg = toy_config(f.vocab, 4, 3, 2, 2, 3, 2);
  bool ok = true;
  std::string detail;
  for (int draw = 0; draw < 100 && ok; ++draw) {
    Rng rng(static_cast<std::uint64_t>(1000 + draw));
    model::ModelParams params = model::ModelParams::init(cfg, rng);
    params.switch_b = nn::Tensor::from({3}, {500.0, -500.0, -500.0});
    const corpus::Sample& s = f.samples[static_cast<std::size_t>(draw % 2)];
    corpus::Profile profile = corpus::profile_for(f.profiles, s.wiki_id);
    std::set<std::string> allowed(profile.tokens.begin(), profile.tokens.end());
    auto out = model::greedy_decode(params, cfg, s, profile, f.vocab, 8);
    if (out.empty()) ok = false;
    for (const std::string& token : out) {
      if (!allowed.count(token)) {
        ok = false;
        detail = "draw " + std::to_string(draw) + " emitted '" + token + "'";
      }
    }
  }
  report(3, "a forced copy switch only ever emits profile tokens", ok, detail);
}

// 4. The fused mixing op on a 4-word vocabulary (one pronoun) and a 2-token
//    profile equals brute-force evaluation of the routing rule: pronouns
//    ride the pronoun share, other vocabulary words the generation share,
//    profile positions the copy share, then renormalize.
void criterion_mix_oracle() {
  nn::CopyMixPlan plan;
  plan.vocab_size = 4;
  plan.extended_size = 5;
  plan.copy_target = {4, 2};  // one profile-only token, one in-vocabulary
  plan.pronoun = {0, 1, 0, 0};

  Rng rng(4242);
  bool ok = true;
  std::string detail;
  for (int draw = 0; draw < 200 && ok; ++draw) {
    auto draw_dist = [&](int n) {
      std::vector<double> v(static_cast<std::size_t>(n));
      double sum = 0.0;
      for (double& x : v) {
        x = uniform(rng, 1e-3, 1.0);
        sum += x;
      }
      for (double& x : v) x /= sum;
      return v;
    };
    std::vector<double> voc = draw_dist(4), att = draw_dist(2), sw = draw_dist(3);

    std::vector<double> expect(5, 0.0);
    for (int w = 0; w < 4; ++w) {
      expect[static_cast<std::size_t>(w)] =
          (plan.pronoun[static_cast<std::size_t>(w)] ? sw[1] : sw[2]) *
          voc[static_cast<std::size_t>(w)];
    }
    for (int slot = 0; slot < 2; ++slot) {
      expect[static_cast<std::size_t>(plan.copy_target[static_cast<std::size_t>(slot)])] +=
          sw[0] * att[static_cast<std::size_t>(slot)];
    }
    double z = 0.0;
    for (double x : expect) z += x;
    for (double& x : expect) x /= z;

    std::vector<double> direct = nn::copy_mix_forward(voc, att, sw, plan);
    nn::Graph g;
    nn::Var mixed = g.copy_mix(g.input(nn::Tensor::from({4}, voc)),
                               g.input(nn::Tensor::from({2}, att)),
                               g.input(nn::Tensor::from({3}, sw)), plan);
    for (int i = 0; i < 5; ++i) {
      double want = expect[static_cast<std::size_t>(i)];
      if (std::abs(g.value(mixed).at(i) - want) > 1e-12 ||
          std::abs(direct[static_cast<std::size_t>(i)] - want) > 1e-12) {
        ok = false;
        detail = "draw " + std::to_string(draw) + " index " + std::to_string(i);
      }
    }
  }
  report(4, "copy mixing matches the brute-force routing rule to 1e-12", ok, detail);
}

// 5. Training overfits the 50-sample desk corpus to at least 95% and the
//    trained switch makes the pronoun route dominant on pronoun-form rows.
void criterion_overfit() {
  auto corpus = testsupport::make_synthetic_corpus();
  corpus::DatasetSplit split;
  split.train = corpus.samples;
  split.dev = corpus.samples;
  auto profiles = corpus::normalize_profiles(corpus.profiles);
  auto vocab = corpus::Vocabulary::build(split.train, profiles, 1);

  model::ModelConfig cfg;
  cfg.word_embed_dim = 24;
  cfg.char_embed_dim = 12;
  cfg.char_merge_dim = 10;
  cfg.attn_dim = 16;
  cfg.word_hidden = 32;
  cfg.char_hidden = 8;
  cfg.vocab_size = vocab.size();
  cfg.char_vocab_size = vocab.char_size();
  cfg.dropout_rate = 0.0;
  cfg.batch_size = 10;
  cfg.max_epochs = 200;
  cfg.patience = 200;
  cfg.learning_rate = 0.01;
  cfg.seed = 1;

  auto started = std::chrono::steady_clock::now();
  model::TrainResult result = model::train(cfg, split, profiles, vocab);
  auto seconds = std::chrono::duration_cast<std::chrono::seconds>(
                     std::chrono::steady_clock::now() - started)
                     .count();

  bool accurate = result.best_dev_accuracy >= 0.95;
  model::SwitchStats stats = model::switch_statistics(result.params, cfg, split.train, profiles,
                                                      vocab);
  bool dominant = false;
  std::ostringstream detail;
  detail << "train accuracy " << result.best_dev_accuracy << " at epoch " << result.best_epoch
         << " after " << seconds << "s";
  if (stats.by_form.count(corpus::Form::pronoun) > 0) {
    const auto& row = stats.by_form.at(corpus::Form::pronoun);
    dominant = row.pronoun > row.copy && row.pronoun > row.generate;
    detail << "; pronoun-form switch means copy " << row.copy << " / pronoun " << row.pronoun
           << " / generate " << row.generate;
  }
  report(5, "training overfits the desk corpus and the switch prefers pronouns where gold does",
         accurate && dominant, detail.str());
}

// 6. The tuned distance routine agrees with a memoized three-way recursion
//    on every pair of strings up to length 7 over {a,b,c}, and behaves like
//    a metric on random strings.
struct NaiveDistance {
  // Flat memo reused across calls; -1 marks unsolved cells.
  std::vector<int> memo;
  const std::string* a = nullptr;
  const std::string* b = nullptr;

  int solve(std::size_t i, std::size_t j) {
    if (i == a->size()) return static_cast<int>(b->size() - j);
    if (j == b->size()) return static_cast<int>(a->size() - i);
    int& slot = memo[i * (b->size() + 1) + j];
    if (slot >= 0) return slot;
    int best = solve(i + 1, j + 1) + ((*a)[i] == (*b)[j] ? 0 : 1);
    best = std::min(best, solve(i + 1, j) + 1);
    best = std::min(best, solve(i, j + 1) + 1);
    slot = best;
    return best;
  }

  int operator()(const std::string& x, const std::string& y) {
    a = &x;
    b = &y;
    memo.assign((x.size() + 1) * (y.size() + 1), -1);
    return solve(0, 0);
  }
};

void criterion_edit_distance() {
  std::vector<std::string> universe = {""};
  std::size_t level_start = 0;
  for (int len = 1; len <= 7; ++len) {
    std::size_t level_end = universe.size();
    for (std::size_t k = level_start; k < level_end; ++k) {
      for (char c : {'a', 'b', 'c'}) universe.push_back(universe[k] + c);
    }
    level_start = level_end;
  }

  NaiveDistance naive;
  bool ok = true;
  std::string detail;
  for (const std::string& a : universe) {
    for (const std::string& b : universe) {
      if (eval::edit_distance_chars(a, b) != naive(a, b)) {
        ok = false;
        detail = "'" + a + "' vs '" + b + "'";
        break;
      }
    }
    if (!ok) break;
  }

  Rng rng(77);
  auto random_word = [&]() {
    std::string s;
    std::size_t len = uniform_index(rng, 9);
    for (std::size_t i = 0; i < len; ++i) {
      s.push_back(static_cast<char>('a' + uniform_index(rng, 4)));
    }
    return s;
  };
  for (int i = 0; i < 10000 && ok; ++i) {
    std::string x = random_word(), y = random_word(), z = random_word();
    int xy = eval::edit_distance_chars(x, y);
    if (xy != eval::edit_distance_chars(y, x)) ok = false;        // symmetry
    if (eval::edit_distance_chars(x, x) != 0) ok = false;         // identity
    if (eval::edit_distance_chars(x, z) > xy + eval::edit_distance_chars(y, z)) {
      ok = false;                                                 // triangle
    }
    if (!ok) detail = "metric violation on random triple " + std::to_string(i);
  }
  report(6, "edit distance matches a memoized recursion and is a metric", ok, detail);
}

// 7. Canonicalization identifies punctuation and diacritic variants.
void criterion_normalization() {
  bool ok = eval::normalize_expression(std::string_view("Tranmere Rovers F.C.")) ==
                "tranmere rovers fc" &&
            eval::normalize_expression(std::string_view("Tranmere Rovers FC")) ==
                "tranmere rovers fc" &&
            eval::normalize_expression(std::string_view("De\xC5\x9Fteapt\xC4\x83-te rom\xC3\xA2ne")) ==
                eval::normalize_expression(std::string_view("Desteapta-te romane")) &&
            eval::normalize_expression(std::string_view("\xC3\x89mile Zol\xC3\xA0")) ==
                "emile zola";
  report(7, "expression canonicalization folds punctuation and diacritics", ok);
}

// 8. The name-copy baseline extracts the leading name from real profile
//    texts and never scores on pronoun gold.
void criterion_only_name() {
  std::vector<std::string> acharya = {
      "Acharya", "Institute", "of", "Technology", ",", "or", "AIT", ",", "is", "a", "private",
      "co-educational", "engineering", "and", "management", "college", "in", "Bengaluru", ",",
      "India", "."};
  std::vector<std::string> ardmore = {"Ardmore", "Airport", "is", "an", "airport", "3", "NM",
                                      "southeast", "of", "Manurewa", "in", "Auckland", ",",
                                      "New", "Zealand", "."};
  bool names = baselines::only_name(acharya) ==
                   std::vector<std::string>{"Acharya", "Institute", "of", "Technology"} &&
               baselines::only_name(ardmore) == std::vector<std::string>{"Ardmore", "Airport"};

  std::vector<eval::EvalPair> pairs;
  for (const std::string& pronoun : {"he", "she", "they", "it"}) {
    eval::EvalPair p;
    p.wiki_id = pronoun;
    p.gold = {pronoun};
    p.generated = baselines::only_name(acharya);
    p.gold_form = corpus::Form::pronoun;
    pairs.push_back(p);
  }
  eval::EvalReport r = eval::evaluate(pairs, eval::SedGranularity::character);
  bool zero = r.pronoun_detection.precision == 0.0 && r.pronoun_detection.recall == 0.0 &&
              r.pronoun_detection.f1 == 0.0 &&
              r.by_form.at(corpus::Form::pronoun).accuracy == 0.0;
  report(8, "the name-copy baseline extracts names and scores zero on pronoun gold",
         names && zero);
}

// 9. The form classifier reproduces hand-computed posteriors and its
//    decisions are invariant to a uniform rescaling of the priors.
void criterion_nb() {
  using baselines::FeatureVector;
  using baselines::MentionStatus;
  using baselines::Recency;
  using baselines::SyntacticPosition;
  auto features = [](SyntacticPosition p, MentionStatus t, MentionStatus s, Recency r) {
    FeatureVector f;
    f.position = p;
    f.status_text = t;
    f.status_sentence = s;
    f.recency = r;
    return f;
  };
  std::vector<std::pair<FeatureVector, corpus::Form>> examples = {
      {features(SyntacticPosition::subject, MentionStatus::initial, MentionStatus::initial,
                Recency::first),
       corpus::Form::name},
      {features(SyntacticPosition::subject, MentionStatus::initial, MentionStatus::initial,
                Recency::first),
       corpus::Form::name},
      {features(SyntacticPosition::other, MentionStatus::subsequent, MentionStatus::subsequent,
                Recency::within_10),
       corpus::Form::pronoun},
      {features(SyntacticPosition::subject, MentionStatus::subsequent, MentionStatus::initial,
                Recency::within_10),
       corpus::Form::pronoun},
      {features(SyntacticPosition::other, MentionStatus::subsequent, MentionStatus::subsequent,
                Recency::within_40),
       corpus::Form::description},
      {features(SyntacticPosition::other, MentionStatus::subsequent, MentionStatus::subsequent,
                Recency::beyond_40),
       corpus::Form::demonstrative},
  };
  baselines::NaiveBayesModel nb = baselines::nb_train(examples);

  FeatureVector probe_a = features(SyntacticPosition::subject, MentionStatus::subsequent,
                                   MentionStatus::initial, Recency::within_10);
  FeatureVector probe_b = features(SyntacticPosition::other, MentionStatus::subsequent,
                                   MentionStatus::subsequent, Recency::beyond_40);
  std::array<double, 4> post_a = baselines::nb_posteriors(nb, probe_a);
  std::array<double, 4> post_b = baselines::nb_posteriors(nb, probe_b);
  std::array<double, 4> want_a = {0.1711508663191999, 0.6846034652767996, 0.07212283420200029,
                                  0.07212283420200029};
  std::array<double, 4> want_b = {0.01709077098366882, 0.20508925180402582, 0.2592733257374351,
                                  0.5185466514748702};
  bool frozen = true;
  for (std::size_t i = 0; i < 4; ++i) {
    if (std::abs(post_a[i] - want_a[i]) > 1e-12) frozen = false;
    if (std::abs(post_b[i] - want_b[i]) > 1e-12) frozen = false;
  }

  baselines::NaiveBayesModel scaled = nb;
  for (double& p : scaled.prior) p *= 37.5;
  bool invariant = true;
  for (int pos = 0; pos < 2 && invariant; ++pos) {
    for (int st = 0; st < 2 && invariant; ++st) {
      for (int ss = 0; ss < 2 && invariant; ++ss) {
        for (int rec = 0; rec < 4 && invariant; ++rec) {
          FeatureVector probe = features(static_cast<SyntacticPosition>(pos),
                                         static_cast<MentionStatus>(st),
                                         static_cast<MentionStatus>(ss),
                                         static_cast<Recency>(rec));
          if (baselines::nb_predict_form(nb, probe) !=
              baselines::nb_predict_form(scaled, probe)) {
            invariant = false;
          }
        }
      }
    }
  }
  report(9, "form classifier posteriors are frozen and scale-invariant", frozen && invariant);
}

// 10. Splits respect their contracts: disjoint entities, 8:1:1 sizes,
//     seed-deterministic replays.
void criterion_splits() {
  auto corpus = testsupport::make_synthetic_corpus();
  bool ok = true;
  std::string detail;

  corpus::DatasetSplit entity = corpus::split_entity_separated(corpus.samples, 9);
  auto ids_of = [](const std::vector<corpus::Sample>& part) {
    std::set<std::string> ids;
    for (const auto& s : part) ids.insert(s.wiki_id);
    return ids;
  };
  std::set<std::string> train_ids = ids_of(entity.train);
  std::set<std::string> dev_ids = ids_of(entity.dev);
  std::set<std::string> test_ids = ids_of(entity.test);
  for (const std::string& id : dev_ids) {
    if (train_ids.count(id)) ok = false;
  }
  for (const std::string& id : test_ids) {
    if (train_ids.count(id) || dev_ids.count(id)) ok = false;
  }
  if (!ok) detail = "entity partitions share an entity";

  corpus::DatasetSplit random = corpus::split_random(corpus.samples, 9);
  if (random.train.size() != 40 || random.dev.size() != 5 || random.test.size() != 5) {
    ok = false;
    detail = "random split sizes off";
  }

  auto same = [](const corpus::SplitManifest& x, const corpus::SplitManifest& y) {
    return x.train == y.train && x.dev == y.dev && x.test == y.test;
  };
  corpus::SplitManifest e1 = corpus::manifest_for_entity_split(corpus.samples, 9);
  corpus::SplitManifest e2 = corpus::manifest_for_entity_split(corpus.samples, 9);
  corpus::SplitManifest e3 = corpus::manifest_for_entity_split(corpus.samples, 10);
  corpus::SplitManifest r1 = corpus::manifest_for_random_split(corpus.samples, 9);
  corpus::SplitManifest r2 = corpus::manifest_for_random_split(corpus.samples, 9);
  if (!same(e1, e2) || !same(r1, r2)) {
    ok = false;
    detail = "same-seed replay differs";
  }
  if (same(e1, e3)) {
    ok = false;
    detail = "seed has no effect";
  }
  corpus::DatasetSplit replay = corpus::split_original(corpus.samples, e1);
  if (replay.train.size() + replay.dev.size() + replay.test.size() != corpus.samples.size()) {
    ok = false;
    detail = "manifest replay loses samples";
  }
  report(10, "splits are disjoint, 8:1:1 sized and seed-deterministic", ok, detail);
}

// 11. The command-line pipeline is reproducible end to end: two independent
//     runs agree byte for byte.
void criterion_pipeline() {
  testsupport::TempDir dir("gate");
  auto corpus = testsupport::make_synthetic_corpus();
  std::string samples = dir.str("corpus.tsv");
  std::string profiles = dir.str("profiles.tsv");
  testsupport::write_corpus_files(corpus, samples, profiles);
  std::string cli = PROFILEREG_CLI;
  std::string dims =
      " --word_embed_dim 4 --char_embed_dim 3 --char_merge_dim 2 --attn_dim 2"
      " --word_hidden 3 --char_hidden 2 --dropout_rate 0.0 --batch_size 8"
      " --max_epochs 2 --patience 2";

  bool ok = true;
  std::string detail;
  for (const char* run : {"r1", "r2"}) {
    std::string base = dir.str(run);
    auto sh = [&](const std::string& cmd) {
      testsupport::CommandResult r = testsupport::run_command(cmd);
      if (r.exit_code != 0) {
        ok = false;
        detail = "command failed: " + cmd;
      }
    };
    sh(cli + " split --samples " + samples + " --kind entity --seed 1 --out " + base + "/split");
    sh(cli + " train --samples " + samples + " --profiles " + profiles +
       " --kind entity --seed 1 --out " + base + "/model" + dims);
    sh(cli + " generate --samples " + base + "/split/test.tsv --profiles " + profiles +
       " --model " + base + "/model --out " + base + "/gen");
    sh(cli + " evaluate --samples " + base + "/split/test.tsv --predictions " + base +
       "/gen/predictions.tsv --train_samples " + base + "/split/train.tsv --out " + base +
       "/eval");
    if (!ok) break;
  }
  if (ok) {
    for (const char* file : {"split/test.tsv", "model/train_log.tsv", "gen/predictions.tsv",
                             "eval/report.tsv", "eval/report.txt"}) {
      std::string a = testsupport::read_file(dir.str(std::string("r1/") + file));
      std::string b = testsupport::read_file(dir.str(std::string("r2/") + file));
      if (a.empty() || a != b) {
        ok = false;
        detail = std::string("runs differ in ") + file;
      }
    }
  }
  report(11, "the split/train/generate/evaluate pipeline replays byte-identically", ok, detail);
}

}  // namespace

int main() {
  criterion_gradients();
  criterion_distributions();
  criterion_forced_copy();
  criterion_mix_oracle();
  criterion_overfit();
  criterion_edit_distance();
  criterion_normalization();
  criterion_only_name();
  criterion_nb();
  criterion_splits();
  criterion_pipeline();
  if (failures == 0) {
    std::printf("all criteria passed\n");
    return 0;
  }
  std::printf("%d criteria failed\n", failures);
  return 1;
}
