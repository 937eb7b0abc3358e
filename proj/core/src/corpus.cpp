#include "profilereg/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "profilereg/error.hpp"
#include "profilereg/text.hpp"

namespace profilereg::corpus {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return fields;
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

bool all_digits(const std::string& s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return in;
}

// Function words that do not decide whether an expression is a name.
const std::set<std::string>& non_content_words() {
  static const std::set<std::string> words = {"a",  "an", "the", "of",  "and", "or",
                                              "for", "in", "on",  "at",  "to",  "'s",
                                              "de",  "la", "le",  "von", "van", "der"};
  return words;
}

}  // namespace

const char* form_name(Form f) {
  switch (f) {
    case Form::name: return "name";
    case Form::pronoun: return "pronoun";
    case Form::description: return "description";
    case Form::demonstrative: return "demonstrative";
  }
  return "unknown";
}

std::optional<Form> form_from_name(const std::string& name) {
  if (name == "name") return Form::name;
  if (name == "pronoun") return Form::pronoun;
  if (name == "description") return Form::description;
  if (name == "demonstrative") return Form::demonstrative;
  return std::nullopt;
}

const std::vector<std::string>& pronoun_inventory() {
  static const std::vector<std::string> inventory = {
      "he",   "she",  "it",    "they",    "him",     "her",    "them",      "his",
      "hers", "its",  "their", "theirs",  "himself", "herself", "itself",   "themselves"};
  return inventory;
}

bool is_inventory_pronoun(const std::string& lowercased_token) {
  const auto& inv = pronoun_inventory();
  return std::find(inv.begin(), inv.end(), lowercased_token) != inv.end();
}

const std::set<std::string>& demonstrative_first_tokens() {
  static const std::set<std::string> tokens = {"this", "that", "these", "those"};
  return tokens;
}

// --- file formats ----------------------------------------------------------

std::vector<Sample> parse_samples_stream(std::istream& in, const std::string& source_name) {
  static const char* kFieldNames[] = {"wiki_id", "expression", "pre_context", "post_context"};
  std::vector<Sample> samples;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(std::move(line));
    if (line.empty()) continue;
    std::vector<std::string> fields = split_tabs(line);
    std::string where = source_name + ":" + std::to_string(line_no);
    if (fields.size() < 4) {
      throw DataError(where + ": missing field '" + kFieldNames[fields.size()] + "'");
    }
    if (fields.size() > 4) {
      throw DataError(where + ": expected 4 tab-separated fields, got " +
                      std::to_string(fields.size()));
    }
    Sample s;
    s.wiki_id = fields[0];
    if (s.wiki_id.empty()) throw DataError(where + ": empty wiki_id");
    s.gold_expression = text::split_whitespace(fields[1]);
    if (s.gold_expression.empty()) throw DataError(where + ": empty expression");
    s.pre_context = text::split_whitespace(fields[2]);
    s.post_context = text::split_whitespace(fields[3]);
    samples.push_back(std::move(s));
  }
  return samples;
}

std::vector<Sample> parse_samples(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  return parse_samples_stream(in, path);
}

void write_samples(const std::vector<Sample>& samples, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  for (const Sample& s : samples) {
    out << s.wiki_id << '\t' << text::join(s.gold_expression) << '\t'
        << text::join(s.pre_context) << '\t' << text::join(s.post_context) << '\n';
  }
}

std::vector<ProfileRecord> load_profiles(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  std::vector<ProfileRecord> records;
  std::set<std::string> seen;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(std::move(line));
    if (line.empty()) continue;
    std::vector<std::string> fields = split_tabs(line);
    std::string where = path + ":" + std::to_string(line_no);
    if (fields.size() < 2) throw DataError(where + ": missing field 'profile_text'");
    if (fields.size() > 2) {
      throw DataError(where + ": expected 2 tab-separated fields, got " +
                      std::to_string(fields.size()));
    }
    if (fields[0].empty()) throw DataError(where + ": empty wiki_id");
    if (!seen.insert(fields[0]).second) {
      throw DataError(where + ": duplicate profile for '" + fields[0] + "'");
    }
    records.push_back(ProfileRecord{fields[0], fields[1]});
  }
  return records;
}

void write_profiles(const std::vector<ProfileRecord>& profiles, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  for (const ProfileRecord& p : profiles) out << p.wiki_id << '\t' << p.raw_text << '\n';
}

std::vector<std::string> load_manifest_file(const std::string& path) {
  std::ifstream in = open_or_throw(path);
  std::vector<std::string> entries;
  std::string line;
  while (std::getline(in, line)) {
    line = strip_cr(std::move(line));
    if (!line.empty()) entries.push_back(line);
  }
  return entries;
}

void write_manifest_file(const std::vector<std::string>& entries, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  for (const std::string& e : entries) out << e << '\n';
}

// --- preprocessing ---------------------------------------------------------

std::vector<std::string> relexicalize(const std::vector<std::string>& tokens,
                                      const std::map<std::string, std::vector<std::string>>& realizations,
                                      const std::set<std::string>& known_ids) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const std::string& tok : tokens) {
    auto it = realizations.find(tok);
    if (it != realizations.end()) {
      for (const std::string& w : it->second) out.push_back(text::lower_ascii(w));
      continue;
    }
    if (known_ids.count(tok)) {
      throw DataError("unresolved entity placeholder '" + tok + "'");
    }
    out.push_back(tok);
  }
  return out;
}

namespace {

std::vector<std::string> id_fallback_tokens(const std::string& wiki_id) {
  std::string spaced = text::lower_ascii(wiki_id);
  std::replace(spaced.begin(), spaced.end(), '_', ' ');
  return text::split_whitespace(spaced);
}

bool id_has_letter(const std::string& wiki_id) {
  return std::any_of(wiki_id.begin(), wiki_id.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
  });
}

bool keep_profile_char(char c) {
  if (c >= 'a' && c <= 'z') return true;
  if (c >= '0' && c <= '9') return true;
  switch (c) {
    case '.': case ',': case ':': case ';': case '\'':
    case '(': case ')': case '-': case ' ': case '\t': case '\n':
      return true;
    default:
      return false;
  }
}

}  // namespace

Profile normalize_profile(const std::string& raw_text, const std::string& wiki_id,
                          int max_tokens) {
  if (max_tokens <= 0) throw std::invalid_argument("normalize_profile: max_tokens must be positive");
  if (wiki_id.empty()) throw std::invalid_argument("normalize_profile: empty wiki_id");

  Profile profile;
  profile.wiki_id = wiki_id;

  auto fallback = [&] {
    profile.tokens = id_fallback_tokens(wiki_id);
    if (profile.tokens.size() > static_cast<std::size_t>(max_tokens)) {
      profile.tokens.resize(static_cast<std::size_t>(max_tokens));
    }
    return profile;
  };

  // Constant numbers and dates have no real profile; use the id itself.
  if (!id_has_letter(wiki_id)) return fallback();

  // Phonetic transcriptions live in square brackets; drop them whole.
  std::string debracketed;
  debracketed.reserve(raw_text.size());
  int depth = 0;
  for (char c : raw_text) {
    if (c == '[') {
      ++depth;
    } else if (c == ']') {
      if (depth > 0) --depth;
    } else if (depth == 0) {
      debracketed += c;
    }
  }

  std::string filtered;
  filtered.reserve(debracketed.size());
  for (char c : text::lower_ascii(debracketed)) {
    if (keep_profile_char(c)) filtered += c;
  }

  profile.tokens = text::split_whitespace(filtered);
  if (profile.tokens.empty()) return fallback();
  if (profile.tokens.size() > static_cast<std::size_t>(max_tokens)) {
    profile.tokens.resize(static_cast<std::size_t>(max_tokens));
  }
  return profile;
}

std::map<std::string, Profile> normalize_profiles(const std::vector<ProfileRecord>& records,
                                                  int max_tokens) {
  std::map<std::string, Profile> out;
  for (const ProfileRecord& r : records) {
    out.emplace(r.wiki_id, normalize_profile(r.raw_text, r.wiki_id, max_tokens));
  }
  return out;
}

Profile profile_for(const std::map<std::string, Profile>& profiles, const std::string& wiki_id,
                    int max_tokens) {
  auto it = profiles.find(wiki_id);
  if (it != profiles.end()) return it->second;
  return normalize_profile("", wiki_id, max_tokens);
}

Form classify_form(const std::vector<std::string>& expression) {
  if (expression.empty()) throw std::invalid_argument("classify_form: empty expression");
  if (expression.size() == 1 && is_inventory_pronoun(text::lower_ascii(expression[0]))) {
    return Form::pronoun;
  }
  if (demonstrative_first_tokens().count(text::lower_ascii(expression[0]))) {
    return Form::demonstrative;
  }
  bool any_content = false;
  bool all_capitalized = true;
  for (const std::string& tok : expression) {
    bool is_word = !tok.empty() && ((tok[0] >= 'a' && tok[0] <= 'z') || (tok[0] >= 'A' && tok[0] <= 'Z'));
    if (!is_word || non_content_words().count(text::lower_ascii(tok))) continue;
    any_content = true;
    if (!text::starts_upper_ascii(tok)) all_capitalized = false;
  }
  if (any_content && all_capitalized) return Form::name;
  return Form::description;
}

// --- splits ----------------------------------------------------------------

namespace {

struct SplitCounts {
  std::size_t train, dev, test;
};

SplitCounts cut_counts(std::size_t n) {
  auto train = static_cast<std::size_t>(std::llround(0.8 * static_cast<double>(n)));
  auto dev = static_cast<std::size_t>(std::llround(0.1 * static_cast<double>(n)));
  return SplitCounts{train, dev, n - train - dev};
}

std::vector<std::string> unique_entities(const std::vector<Sample>& samples) {
  std::set<std::string> ids;
  for (const Sample& s : samples) ids.insert(s.wiki_id);
  return std::vector<std::string>(ids.begin(), ids.end());
}

bool manifest_is_numeric(const SplitManifest& m) {
  auto check = [](const std::vector<std::string>& v) {
    return std::all_of(v.begin(), v.end(), all_digits);
  };
  return check(m.train) && check(m.dev) && check(m.test);
}

}  // namespace

DatasetSplit split_original(const std::vector<Sample>& samples, const SplitManifest& manifest) {
  DatasetSplit split;
  if (manifest_is_numeric(manifest) &&
      !(manifest.train.empty() && manifest.dev.empty() && manifest.test.empty())) {
    // Index manifests: each line is a 0-based position in the sample file.
    std::vector<int> which(samples.size(), -1);
    auto assign = [&](const std::vector<std::string>& entries, int part, const char* name) {
      for (const std::string& e : entries) {
        long idx = std::stol(e);
        if (idx < 0 || idx >= static_cast<long>(samples.size())) {
          throw DataError("manifest index " + e + " out of range for " +
                          std::to_string(samples.size()) + " samples");
        }
        if (which[static_cast<std::size_t>(idx)] != -1) {
          throw DataError("sample index " + e + " listed in more than one partition");
        }
        which[static_cast<std::size_t>(idx)] = part;
        (void)name;
      }
    };
    assign(manifest.train, 0, "train");
    assign(manifest.dev, 1, "dev");
    assign(manifest.test, 2, "test");
    for (std::size_t i = 0; i < samples.size(); ++i) {
      switch (which[i]) {
        case 0: split.train.push_back(samples[i]); break;
        case 1: split.dev.push_back(samples[i]); break;
        case 2: split.test.push_back(samples[i]); break;
        default:
          throw DataError("sample " + std::to_string(i) + " (wiki_id '" + samples[i].wiki_id +
                          "') appears in no partition");
      }
    }
    return split;
  }

  // Id manifests: a wiki_id sends all of its samples to one partition.
  std::map<std::string, int> which;
  auto assign = [&](const std::vector<std::string>& entries, int part) {
    for (const std::string& e : entries) {
      auto [it, inserted] = which.emplace(e, part);
      if (!inserted && it->second != part) {
        throw DataError("wiki_id '" + e + "' listed in more than one partition");
      }
    }
  };
  assign(manifest.train, 0);
  assign(manifest.dev, 1);
  assign(manifest.test, 2);
  for (const Sample& s : samples) {
    auto it = which.find(s.wiki_id);
    if (it == which.end()) {
      throw DataError("wiki_id '" + s.wiki_id + "' appears in no partition");
    }
    switch (it->second) {
      case 0: split.train.push_back(s); break;
      case 1: split.dev.push_back(s); break;
      default: split.test.push_back(s); break;
    }
  }
  return split;
}

SplitManifest manifest_for_entity_split(const std::vector<Sample>& samples, std::uint64_t seed) {
  std::vector<std::string> entities = unique_entities(samples);
  if (entities.size() < 10) {
    throw DataError("entity-separated split needs at least 10 distinct entities, got " +
                    std::to_string(entities.size()));
  }
  Rng rng(seed);
  shuffle_in_place(entities, rng);
  SplitCounts c = cut_counts(entities.size());
  SplitManifest m;
  m.train.assign(entities.begin(), entities.begin() + static_cast<long>(c.train));
  m.dev.assign(entities.begin() + static_cast<long>(c.train),
               entities.begin() + static_cast<long>(c.train + c.dev));
  m.test.assign(entities.begin() + static_cast<long>(c.train + c.dev), entities.end());
  return m;
}

DatasetSplit split_entity_separated(const std::vector<Sample>& samples, std::uint64_t seed) {
  return split_original(samples, manifest_for_entity_split(samples, seed));
}

SplitManifest manifest_for_random_split(const std::vector<Sample>& samples, std::uint64_t seed) {
  if (samples.size() < 10) {
    throw DataError("random split needs at least 10 samples, got " +
                    std::to_string(samples.size()));
  }
  std::vector<std::size_t> order(samples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  shuffle_in_place(order, rng);
  SplitCounts c = cut_counts(order.size());
  SplitManifest m;
  auto emit = [&](std::size_t from, std::size_t to, std::vector<std::string>& out) {
    for (std::size_t i = from; i < to; ++i) out.push_back(std::to_string(order[i]));
  };
  emit(0, c.train, m.train);
  emit(c.train, c.train + c.dev, m.dev);
  emit(c.train + c.dev, order.size(), m.test);
  return m;
}

DatasetSplit split_random(const std::vector<Sample>& samples, std::uint64_t seed) {
  return split_original(samples, manifest_for_random_split(samples, seed));
}

}  // namespace profilereg::corpus
