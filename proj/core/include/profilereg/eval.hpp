#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "profilereg/corpus.hpp"

namespace profilereg::eval {

enum class SedGranularity { character, token };

// Canonical comparison string: lowercased, Latin diacritics reduced to base
// letters, everything outside [a-z0-9 ] dropped, whitespace collapsed.
// "Tranmere Rovers F.C." and "Tranmere Rovers FC" normalize identically.
std::string normalize_expression(std::string_view raw);
std::string normalize_expression(const std::vector<std::string>& tokens);

// Levenshtein distance with unit costs.
int edit_distance_chars(std::string_view a, std::string_view b);
int edit_distance_tokens(const std::vector<std::string>& a, const std::vector<std::string>& b);

struct EvalPair {
  std::string wiki_id;
  std::vector<std::string> gold;
  std::vector<std::string> generated;
  corpus::Form gold_form = corpus::Form::name;
  bool seen = true;
};

// Edit distance between the canonical strings of one pair.
int pair_edit_distance(const EvalPair& pair, SedGranularity granularity);

// Exact match on canonical strings.
bool pair_correct(const EvalPair& pair);

// True iff the generated expression is a single inventory pronoun.
bool generated_is_pronoun(const EvalPair& pair);

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Detection-level scores for the decision to use a pronoun. Zero whenever a
// denominator is zero.
Prf pronoun_prf(const std::vector<EvalPair>& pairs);

struct FormStat {
  double accuracy = 0.0;
  int support = 0;
};

struct PartReport {
  int support = 0;
  double total_accuracy = 0.0;
  std::map<corpus::Form, FormStat> by_form;
};

struct EvalReport {
  SedGranularity granularity = SedGranularity::character;
  int pairs = 0;
  double mean_sed = 0.0;
  double total_accuracy = 0.0;
  std::map<corpus::Form, FormStat> by_form;
  Prf pronoun_detection;
  PartReport seen;
  PartReport unseen;
};

EvalReport evaluate(const std::vector<EvalPair>& pairs,
                    SedGranularity granularity = SedGranularity::character);

void write_report_text(const EvalReport& report, std::ostream& out);
void write_report_tsv(const EvalReport& report, std::ostream& out);

}  // namespace profilereg::eval
