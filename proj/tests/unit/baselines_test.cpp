#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <string>
#include <vector>

#include "harness.hpp"
#include "profilereg/baselines.hpp"
#include "profilereg/corpus.hpp"
#include "profilereg/error.hpp"
#include "profilereg/text.hpp"

using namespace profilereg;
using baselines::FeatureVector;
using baselines::MentionStatus;
using baselines::Recency;
using baselines::SyntacticPosition;
using corpus::Form;
using testsupport::TempDir;

namespace {

FeatureVector features(SyntacticPosition p, MentionStatus t, MentionStatus s, Recency r) {
  FeatureVector f;
  f.position = p;
  f.status_text = t;
  f.status_sentence = s;
  f.recency = r;
  return f;
}

// Two name, two pronoun, one description, one demonstrative example with
// hand-tractable counts.
std::vector<std::pair<FeatureVector, Form>> six_examples() {
  using P = SyntacticPosition;
  using M = MentionStatus;
  using R = Recency;
  return {
      {features(P::subject, M::initial, M::initial, R::first), Form::name},
      {features(P::other, M::subsequent, M::subsequent, R::within_10), Form::pronoun},
      {features(P::subject, M::subsequent, M::initial, R::within_10), Form::pronoun},
      {features(P::other, M::subsequent, M::subsequent, R::within_40), Form::description},
      {features(P::subject, M::initial, M::initial, R::first), Form::name},
      {features(P::other, M::subsequent, M::subsequent, R::beyond_40), Form::demonstrative},
  };
}

}  // namespace

TEST_CASE("only_name takes the first capitalized run with connectors") {
  auto tokens = text::split_whitespace(
      "Acharya Institute of Technology , or AIT , is a private co-educational engineering "
      "and management college in Bengaluru , India .");
  CHECK(baselines::only_name(tokens) ==
        std::vector<std::string>{"Acharya", "Institute", "of", "Technology"});

  auto airport = text::split_whitespace(
      "Ardmore Airport is an airport 3 NM southeast of Manurewa in Auckland , New Zealand .");
  CHECK(baselines::only_name(airport) == std::vector<std::string>{"Ardmore", "Airport"});
}

TEST_CASE("only_name falls back to the first non-article token") {
  auto tokens = text::split_whitespace("the democratic labour party is a political party .");
  CHECK(baselines::only_name(tokens) == std::vector<std::string>{"democratic"});
}

TEST_CASE("only_name skips leading lowercase words before a capitalized run") {
  auto tokens = text::split_whitespace("a profile of Elliot See , test pilot .");
  CHECK(baselines::only_name(tokens) == std::vector<std::string>{"Elliot", "See"});
}

TEST_CASE("only_name never returns a lone article when alternatives exist") {
  auto out = baselines::only_name({"the", "a", "an", "zebra"});
  REQUIRE(out.size() == 1);
  CHECK(out[0] == "zebra");
}

TEST_CASE("find_entity_mentions sees both id and spaced forms") {
  auto pre = text::split_whitespace("elliot see was born in dallas . elliot_see flew .");
  auto ends = baselines::find_entity_mentions(pre, "elliot_see");
  REQUIRE(ends.size() == 2);
  CHECK(ends[0] == 2);  // after "elliot see"
  CHECK(ends[1] == 8);  // after the bare id token
  CHECK(baselines::find_entity_mentions({"nothing", "here"}, "elliot_see").empty());
}

TEST_CASE("extract_features marks a first sentence-initial mention") {
  corpus::Sample s;
  s.wiki_id = "x_y";
  s.pre_context = {};
  s.post_context = {"was", "here", "."};
  auto f = baselines::extract_features(s, {});
  CHECK(f.position == SyntacticPosition::subject);
  CHECK(f.status_text == MentionStatus::initial);
  CHECK(f.status_sentence == MentionStatus::initial);
  CHECK(f.recency == Recency::first);
}

TEST_CASE("extract_features buckets a close repeat mention") {
  corpus::Sample s;
  s.wiki_id = "x_y";
  s.pre_context = text::split_whitespace("x y spoke and then");  // mention ends at 2
  auto f = baselines::extract_features(s, baselines::find_entity_mentions(s.pre_context, "x_y"));
  CHECK(f.position == SyntacticPosition::other);
  CHECK(f.status_text == MentionStatus::subsequent);
  CHECK(f.status_sentence == MentionStatus::subsequent);
  CHECK(f.recency == Recency::within_10);
}

TEST_CASE("extract_features reproduces the pilot-biography reading") {
  // Sentence-initial slot right after a sentence about the same entity.
  corpus::Sample s;
  s.wiki_id = "elliot_see";
  s.pre_context = text::split_whitespace("elliot see was born on 1927-07-23 in dallas .");
  s.post_context = text::split_whitespace("attended the u of texas at austin .");
  auto ends = baselines::find_entity_mentions(s.pre_context, s.wiki_id);
  REQUIRE(ends == std::vector<int>{2});
  auto f = baselines::extract_features(s, ends);
  CHECK(f.position == SyntacticPosition::subject);
  CHECK(f.status_text == MentionStatus::subsequent);
  CHECK(f.status_sentence == MentionStatus::initial);
  CHECK(f.recency == Recency::within_10);
}

TEST_CASE("extract_features buckets far mentions by distance") {
  corpus::Sample s;
  s.wiki_id = "x_y";
  std::vector<std::string> pre = {"x", "y"};
  for (int i = 0; i < 45; ++i) pre.push_back("w" + std::to_string(i));
  s.pre_context = pre;
  auto f = baselines::extract_features(s, {2});
  CHECK(f.recency == Recency::beyond_40);
  s.pre_context.resize(2 + 30);
  f = baselines::extract_features(s, {2});
  CHECK(f.recency == Recency::within_40);
}

TEST_CASE("nb_train smooths priors over the four classes") {
  auto model = baselines::nb_train(six_examples(), 1.0);
  CHECK(model.prior[0] == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(model.prior[1] == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(model.prior[2] == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(model.prior[3] == doctest::Approx(0.2).epsilon(1e-15));
  double prior_sum = model.prior[0] + model.prior[1] + model.prior[2] + model.prior[3];
  CHECK(prior_sum == doctest::Approx(1.0).epsilon(1e-12));
  for (std::size_t c = 0; c < 4; ++c) {
    CHECK(model.p_position[c][0] + model.p_position[c][1] == doctest::Approx(1.0).epsilon(1e-12));
    double rec = model.p_recency[c][0] + model.p_recency[c][1] + model.p_recency[c][2] +
                 model.p_recency[c][3];
    CHECK(rec == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t v = 0; v < 4; ++v) CHECK(model.p_recency[c][v] > 0.0);
  }
}

TEST_CASE("nb posteriors match the hand-computed table") {
  auto model = baselines::nb_train(six_examples(), 1.0);

  auto a = baselines::nb_posteriors(
      model, features(SyntacticPosition::subject, MentionStatus::subsequent,
                      MentionStatus::initial, Recency::within_10));
  CHECK(a[0] == doctest::Approx(0.1711508663191999).epsilon(1e-12));
  CHECK(a[1] == doctest::Approx(0.6846034652767996).epsilon(1e-12));
  CHECK(a[2] == doctest::Approx(0.07212283420200029).epsilon(1e-12));
  CHECK(a[3] == doctest::Approx(0.07212283420200029).epsilon(1e-12));
  CHECK(baselines::nb_predict_form(model,
                                   features(SyntacticPosition::subject, MentionStatus::subsequent,
                                            MentionStatus::initial, Recency::within_10)) ==
        Form::pronoun);

  auto b = baselines::nb_posteriors(
      model, features(SyntacticPosition::other, MentionStatus::subsequent,
                      MentionStatus::subsequent, Recency::beyond_40));
  CHECK(b[0] == doctest::Approx(0.01709077098366882).epsilon(1e-12));
  CHECK(b[1] == doctest::Approx(0.20508925180402582).epsilon(1e-12));
  CHECK(b[2] == doctest::Approx(0.2592733257374351).epsilon(1e-12));
  CHECK(b[3] == doctest::Approx(0.5185466514748702).epsilon(1e-12));
  CHECK(baselines::nb_predict_form(model,
                                   features(SyntacticPosition::other, MentionStatus::subsequent,
                                            MentionStatus::subsequent, Recency::beyond_40)) ==
        Form::demonstrative);
  CHECK(a[0] + a[1] + a[2] + a[3] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(b[0] + b[1] + b[2] + b[3] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("nb_train with one sample per form and equal features gives uniform priors") {
  auto f = features(SyntacticPosition::subject, MentionStatus::initial, MentionStatus::initial,
                    Recency::first);
  std::vector<std::pair<FeatureVector, Form>> examples = {
      {f, Form::name}, {f, Form::pronoun}, {f, Form::description}, {f, Form::demonstrative}};
  auto model = baselines::nb_train(examples, 1.0);
  for (std::size_t c = 0; c < 4; ++c) CHECK(model.prior[c] == doctest::Approx(0.25).epsilon(1e-15));
  // Identical features and priors make every posterior uniform; the argmax
  // tie falls to the first class.
  CHECK(baselines::nb_predict_form(model, f) == Form::name);
}

TEST_CASE("huge smoothing drives likelihood rows toward uniform") {
  auto model = baselines::nb_train(six_examples(), 1e12);
  for (std::size_t c = 0; c < 4; ++c) {
    CHECK(model.p_position[c][0] == doctest::Approx(0.5).epsilon(1e-6));
    for (std::size_t v = 0; v < 4; ++v) {
      CHECK(model.p_recency[c][v] == doctest::Approx(0.25).epsilon(1e-6));
    }
  }
}

TEST_CASE("scaling all priors by a constant never moves the argmax") {
  auto model = baselines::nb_train(six_examples(), 1.0);
  auto scaled = model;
  for (auto& p : scaled.prior) p *= 37.5;
  std::vector<FeatureVector> probes;
  for (auto p : {SyntacticPosition::subject, SyntacticPosition::other}) {
    for (auto r : {Recency::first, Recency::within_10, Recency::within_40, Recency::beyond_40}) {
      probes.push_back(features(p, MentionStatus::subsequent, MentionStatus::initial, r));
    }
  }
  for (const auto& f : probes) {
    CHECK(baselines::nb_predict_form(model, f) == baselines::nb_predict_form(scaled, f));
  }
}

TEST_CASE("nb_train rejects degenerate input") {
  CHECK_THROWS_AS(static_cast<void>(baselines::nb_train({}, 1.0)), std::invalid_argument);
  CHECK_THROWS_AS(static_cast<void>(baselines::nb_train(six_examples(), 0.0)),
                  std::invalid_argument);
}

TEST_CASE("nb model text serialization round-trips exactly") {
  TempDir dir("nb");
  auto model = baselines::nb_train(six_examples(), 1.0);
  baselines::nb_save(model, dir.str("nb.txt"));
  auto loaded = baselines::nb_load(dir.str("nb.txt"));
  CHECK(loaded.alpha == model.alpha);
  for (std::size_t c = 0; c < 4; ++c) {
    CHECK(loaded.prior[c] == model.prior[c]);
    for (std::size_t v = 0; v < 2; ++v) {
      CHECK(loaded.p_position[c][v] == model.p_position[c][v]);
      CHECK(loaded.p_status_text[c][v] == model.p_status_text[c][v]);
      CHECK(loaded.p_status_sentence[c][v] == model.p_status_sentence[c][v]);
    }
    for (std::size_t v = 0; v < 4; ++v) CHECK(loaded.p_recency[c][v] == model.p_recency[c][v]);
  }
  CHECK_THROWS_AS(static_cast<void>(baselines::nb_load(dir.str("missing.txt"))), DataError);
}

TEST_CASE("most_frequent_pronoun counts inventory tokens only") {
  corpus::Profile profile{"elliot_see",
                          {"elliot", "see", "was", "a", "pilot", ".", "he", "was", "selected",
                           "and", "he", "flew", "while", "it", "rained"}};
  CHECK(baselines::most_frequent_pronoun(profile) == "he");
  CHECK(baselines::most_frequent_pronoun(corpus::Profile{"x", {"no", "pronouns"}}) == "it");
  // Equal counts: inventory order puts "he" before "it".
  CHECK(baselines::most_frequent_pronoun(corpus::Profile{"x", {"it", "he"}}) == "he");
}

TEST_CASE("ferreira_realize dispatches per form") {
  auto raw = text::split_whitespace("Elliot See was an American test pilot . He flew .");
  corpus::Profile profile{"elliot_see",
                          {"elliot", "see", "was", "an", "american", "test", "pilot", ".",
                           "he", "flew", "."}};
  std::vector<std::string> gold = {"the", "astronaut"};
  CHECK(baselines::ferreira_realize(Form::name, raw, profile, gold) ==
        std::vector<std::string>{"Elliot", "See"});
  CHECK(baselines::ferreira_realize(Form::pronoun, raw, profile, gold) ==
        std::vector<std::string>{"he"});
  CHECK(baselines::ferreira_realize(Form::description, raw, profile, gold) == gold);
  CHECK(baselines::ferreira_realize(Form::demonstrative, raw, profile, gold) == gold);
}

TEST_CASE("pronoun realizations are always single inventory tokens") {
  std::vector<corpus::Profile> profiles = {
      {"a", {"she", "sang", "her", "songs"}},
      {"b", {"plain", "words", "only"}},
      {"c", {"they", "them", "they"}},
      {"d", {}},
  };
  for (const auto& p : profiles) {
    auto out = baselines::ferreira_realize(Form::pronoun, {"Raw", "Text"}, p, {"gold"});
    REQUIRE(out.size() == 1);
    CHECK(corpus::is_inventory_pronoun(out[0]));
  }
}
