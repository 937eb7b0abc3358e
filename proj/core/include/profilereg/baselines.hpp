#pragma once

#include <array>
#include <string>
#include <vector>

#include "profilereg/corpus.hpp"

namespace profilereg::baselines {

// First maximal run of capitalized tokens in the raw (cased) profile,
// allowing internal of/the/and between capitalized tokens. Falls back to the
// first non-article token when the profile has no capitalized token at all.
std::vector<std::string> only_name(const std::vector<std::string>& raw_profile_tokens);

enum class SyntacticPosition { subject, other };
enum class MentionStatus { initial, subsequent };
enum class Recency { first, within_10, within_40, beyond_40 };

struct FeatureVector {
  SyntacticPosition position = SyntacticPosition::other;
  MentionStatus status_text = MentionStatus::initial;
  MentionStatus status_sentence = MentionStatus::initial;
  Recency recency = Recency::first;
};

// End positions (one past the last token) of earlier mentions of the entity
// inside the pre-context: matches of the id-derived token sequence plus the
// bare wiki_id token. A surface heuristic; delexicalized and relexicalized
// contexts both work.
std::vector<int> find_entity_mentions(const std::vector<std::string>& pre_context,
                                      const std::string& wiki_id);

// `mention_ends` as produced by find_entity_mentions, sorted ascending.
FeatureVector extract_features(const corpus::Sample& sample, const std::vector<int>& mention_ends);

// Multinomial Naive Bayes over the four discrete features, Laplace-smoothed.
// Class order (and argmax tie-break order): name, pronoun, description,
// demonstrative.
struct NaiveBayesModel {
  double alpha = 1.0;
  std::array<double, 4> prior{};                      // P(class)
  std::array<std::array<double, 2>, 4> p_position{};  // P(position | class)
  std::array<std::array<double, 2>, 4> p_status_text{};
  std::array<std::array<double, 2>, 4> p_status_sentence{};
  std::array<std::array<double, 4>, 4> p_recency{};
};

NaiveBayesModel nb_train(const std::vector<std::pair<FeatureVector, corpus::Form>>& examples,
                         double alpha = 1.0);

// Text table of priors and likelihoods; load(save(m)) reproduces m exactly.
void nb_save(const NaiveBayesModel& model, const std::string& path);
NaiveBayesModel nb_load(const std::string& path);

// Normalized class posteriors in class order.
std::array<double, 4> nb_posteriors(const NaiveBayesModel& model, const FeatureVector& features);

corpus::Form nb_predict_form(const NaiveBayesModel& model, const FeatureVector& features);

// Most frequent inventory pronoun among the profile tokens; inventory order
// breaks ties; "it" when the profile has none.
std::string most_frequent_pronoun(const corpus::Profile& profile);

// Realizes a predicted form: name via only_name, pronoun via the profile's
// most frequent pronoun, description and demonstrative pass the gold
// expression through (an upper bound, as in the original formulation).
std::vector<std::string> ferreira_realize(corpus::Form form,
                                          const std::vector<std::string>& raw_profile_tokens,
                                          const corpus::Profile& profile,
                                          const std::vector<std::string>& gold_expression);

}  // namespace profilereg::baselines
