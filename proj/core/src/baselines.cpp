#include "profilereg/baselines.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>

#include "profilereg/error.hpp"
#include "profilereg/text.hpp"

namespace profilereg::baselines {

namespace {

bool is_article(const std::string& token) {
  std::string t = text::lower_ascii(token);
  return t == "a" || t == "an" || t == "the";
}

bool is_name_connector(const std::string& token) {
  return token == "of" || token == "the" || token == "and";
}

bool is_sentence_end(const std::string& token) {
  return token == "." || token == "!" || token == "?";
}

std::size_t feature_index(SyntacticPosition p) { return p == SyntacticPosition::subject ? 0 : 1; }
std::size_t feature_index(MentionStatus s) { return s == MentionStatus::initial ? 0 : 1; }
std::size_t feature_index(Recency r) {
  switch (r) {
    case Recency::first: return 0;
    case Recency::within_10: return 1;
    case Recency::within_40: return 2;
    case Recency::beyond_40: return 3;
  }
  return 3;
}

constexpr std::array<corpus::Form, 4> kClassOrder = {corpus::Form::name, corpus::Form::pronoun,
                                                     corpus::Form::description,
                                                     corpus::Form::demonstrative};

std::size_t class_index(corpus::Form f) {
  for (std::size_t i = 0; i < kClassOrder.size(); ++i) {
    if (kClassOrder[i] == f) return i;
  }
  return 0;
}

}  // namespace

std::vector<std::string> only_name(const std::vector<std::string>& raw_profile_tokens) {
  if (raw_profile_tokens.empty()) {
    throw std::invalid_argument("only_name: empty profile");
  }

  std::size_t start = 0;
  while (start < raw_profile_tokens.size() &&
         !text::starts_upper_ascii(raw_profile_tokens[start])) {
    ++start;
  }

  if (start < raw_profile_tokens.size()) {
    std::vector<std::string> name;
    std::size_t i = start;
    while (i < raw_profile_tokens.size()) {
      const std::string& tok = raw_profile_tokens[i];
      if (text::starts_upper_ascii(tok)) {
        name.push_back(tok);
        ++i;
        continue;
      }
      // Allow a run of connectors, but only when capitalized tokens resume.
      std::size_t j = i;
      while (j < raw_profile_tokens.size() && is_name_connector(raw_profile_tokens[j])) ++j;
      if (j > i && j < raw_profile_tokens.size() &&
          text::starts_upper_ascii(raw_profile_tokens[j])) {
        name.insert(name.end(), raw_profile_tokens.begin() + static_cast<long>(i),
                    raw_profile_tokens.begin() + static_cast<long>(j));
        i = j;
        continue;
      }
      break;
    }
    return name;
  }

  // No capitalized token anywhere: first non-article token.
  for (const std::string& tok : raw_profile_tokens) {
    if (!is_article(tok)) return {tok};
  }
  return {raw_profile_tokens.front()};
}

std::vector<int> find_entity_mentions(const std::vector<std::string>& pre_context,
                                      const std::string& wiki_id) {
  std::string spaced = text::lower_ascii(wiki_id);
  std::replace(spaced.begin(), spaced.end(), '_', ' ');
  std::vector<std::string> id_tokens = text::split_whitespace(spaced);

  std::vector<int> ends;
  for (std::size_t i = 0; i < pre_context.size(); ++i) {
    if (text::lower_ascii(pre_context[i]) == text::lower_ascii(wiki_id)) {
      ends.push_back(static_cast<int>(i + 1));
      continue;
    }
    if (!id_tokens.empty() && i + id_tokens.size() <= pre_context.size()) {
      bool match = true;
      for (std::size_t k = 0; k < id_tokens.size(); ++k) {
        if (text::lower_ascii(pre_context[i + k]) != id_tokens[k]) {
          match = false;
          break;
        }
      }
      if (match) ends.push_back(static_cast<int>(i + id_tokens.size()));
    }
  }
  std::sort(ends.begin(), ends.end());
  ends.erase(std::unique(ends.begin(), ends.end()), ends.end());
  return ends;
}

FeatureVector extract_features(const corpus::Sample& sample, const std::vector<int>& mention_ends) {
  FeatureVector f;

  // The slot is a subject when it opens the text or follows sentence-final
  // punctuation.
  if (sample.pre_context.empty() || is_sentence_end(sample.pre_context.back())) {
    f.position = SyntacticPosition::subject;
  }

  if (mention_ends.empty()) {
    f.status_text = MentionStatus::initial;
    f.status_sentence = MentionStatus::initial;
    f.recency = Recency::first;
    return f;
  }

  f.status_text = MentionStatus::subsequent;

  // Last sentence boundary in the pre-context; mentions after it are
  // same-sentence mentions.
  int sentence_start = 0;
  for (std::size_t i = 0; i < sample.pre_context.size(); ++i) {
    if (is_sentence_end(sample.pre_context[i])) sentence_start = static_cast<int>(i + 1);
  }
  int last_end = mention_ends.back();
  f.status_sentence =
      last_end > sentence_start ? MentionStatus::subsequent : MentionStatus::initial;

  int distance = static_cast<int>(sample.pre_context.size()) - last_end;
  if (distance <= 10) {
    f.recency = Recency::within_10;
  } else if (distance <= 40) {
    f.recency = Recency::within_40;
  } else {
    f.recency = Recency::beyond_40;
  }
  return f;
}

NaiveBayesModel nb_train(const std::vector<std::pair<FeatureVector, corpus::Form>>& examples,
                         double alpha) {
  if (examples.empty()) throw std::invalid_argument("nb_train: no training examples");
  if (alpha <= 0.0) throw std::invalid_argument("nb_train: alpha must be positive");

  NaiveBayesModel model;
  model.alpha = alpha;

  std::array<double, 4> class_count{};
  std::array<std::array<double, 2>, 4> position_count{};
  std::array<std::array<double, 2>, 4> text_count{};
  std::array<std::array<double, 2>, 4> sentence_count{};
  std::array<std::array<double, 4>, 4> recency_count{};

  for (const auto& [features, form] : examples) {
    std::size_t c = class_index(form);
    class_count[c] += 1.0;
    position_count[c][feature_index(features.position)] += 1.0;
    text_count[c][feature_index(features.status_text)] += 1.0;
    sentence_count[c][feature_index(features.status_sentence)] += 1.0;
    recency_count[c][feature_index(features.recency)] += 1.0;
  }

  double n = static_cast<double>(examples.size());
  for (std::size_t c = 0; c < 4; ++c) {
    model.prior[c] = (class_count[c] + alpha) / (n + 4.0 * alpha);
    for (std::size_t v = 0; v < 2; ++v) {
      model.p_position[c][v] = (position_count[c][v] + alpha) / (class_count[c] + 2.0 * alpha);
      model.p_status_text[c][v] = (text_count[c][v] + alpha) / (class_count[c] + 2.0 * alpha);
      model.p_status_sentence[c][v] =
          (sentence_count[c][v] + alpha) / (class_count[c] + 2.0 * alpha);
    }
    for (std::size_t v = 0; v < 4; ++v) {
      model.p_recency[c][v] = (recency_count[c][v] + alpha) / (class_count[c] + 4.0 * alpha);
    }
  }
  return model;
}

namespace {

// 17 significant digits round-trip IEEE doubles exactly.
void write_row(std::ostream& out, const std::string& key, const double* values, std::size_t n) {
  out << key;
  for (std::size_t i = 0; i < n; ++i) out << ' ' << std::setprecision(17) << values[i];
  out << '\n';
}

void read_row(std::istream& in, const std::string& path, const std::string& key, double* values,
              std::size_t n) {
  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": truncated model, expected '" + key + "'");
  std::istringstream fields(line);
  std::string got;
  fields >> got;
  if (got != key) throw DataError(path + ": expected '" + key + "', got '" + got + "'");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(fields >> values[i])) throw DataError(path + ": short row for '" + key + "'");
  }
}

}  // namespace

void nb_save(const NaiveBayesModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  write_row(out, "alpha", &model.alpha, 1);
  write_row(out, "prior", model.prior.data(), 4);
  for (std::size_t c = 0; c < 4; ++c) {
    std::string suffix = std::string(".") + corpus::form_name(kClassOrder[c]);
    write_row(out, "position" + suffix, model.p_position[c].data(), 2);
    write_row(out, "status_text" + suffix, model.p_status_text[c].data(), 2);
    write_row(out, "status_sentence" + suffix, model.p_status_sentence[c].data(), 2);
    write_row(out, "recency" + suffix, model.p_recency[c].data(), 4);
  }
  if (!out) throw DataError("write failed for " + path);
}

NaiveBayesModel nb_load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  NaiveBayesModel model;
  read_row(in, path, "alpha", &model.alpha, 1);
  read_row(in, path, "prior", model.prior.data(), 4);
  for (std::size_t c = 0; c < 4; ++c) {
    std::string suffix = std::string(".") + corpus::form_name(kClassOrder[c]);
    read_row(in, path, "position" + suffix, model.p_position[c].data(), 2);
    read_row(in, path, "status_text" + suffix, model.p_status_text[c].data(), 2);
    read_row(in, path, "status_sentence" + suffix, model.p_status_sentence[c].data(), 2);
    read_row(in, path, "recency" + suffix, model.p_recency[c].data(), 4);
  }
  return model;
}

std::array<double, 4> nb_posteriors(const NaiveBayesModel& model, const FeatureVector& features) {
  std::array<double, 4> score{};
  double total = 0.0;
  for (std::size_t c = 0; c < 4; ++c) {
    score[c] = model.prior[c] * model.p_position[c][feature_index(features.position)] *
               model.p_status_text[c][feature_index(features.status_text)] *
               model.p_status_sentence[c][feature_index(features.status_sentence)] *
               model.p_recency[c][feature_index(features.recency)];
    total += score[c];
  }
  for (double& s : score) s /= total;
  return score;
}

corpus::Form nb_predict_form(const NaiveBayesModel& model, const FeatureVector& features) {
  std::array<double, 4> post = nb_posteriors(model, features);
  std::size_t best = 0;
  for (std::size_t c = 1; c < 4; ++c) {
    if (post[c] > post[best]) best = c;  // ties keep the earlier class
  }
  return kClassOrder[best];
}

std::string most_frequent_pronoun(const corpus::Profile& profile) {
  std::map<std::string, int> counts;
  for (const std::string& tok : profile.tokens) {
    if (corpus::is_inventory_pronoun(tok)) ++counts[tok];
  }
  std::string best = "it";
  int best_count = 0;
  for (const std::string& p : corpus::pronoun_inventory()) {
    auto it = counts.find(p);
    if (it != counts.end() && it->second > best_count) {
      best = p;
      best_count = it->second;
    }
  }
  return best;
}

std::vector<std::string> ferreira_realize(corpus::Form form,
                                          const std::vector<std::string>& raw_profile_tokens,
                                          const corpus::Profile& profile,
                                          const std::vector<std::string>& gold_expression) {
  switch (form) {
    case corpus::Form::name:
      return only_name(raw_profile_tokens);
    case corpus::Form::pronoun:
      return {most_frequent_pronoun(profile)};
    case corpus::Form::description:
    case corpus::Form::demonstrative:
      return gold_expression;
  }
  return gold_expression;
}

}  // namespace profilereg::baselines
