#include "profilereg/vocabulary.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include "profilereg/error.hpp"
#include "profilereg/text.hpp"

namespace profilereg::corpus {

namespace {

const std::vector<std::string>& special_words() {
  static const std::vector<std::string> specials = {"<pad>", "<unk>", "<bos>", "<eos>"};
  return specials;
}

bool is_special_literal(const std::string& w) {
  const auto& s = special_words();
  return std::find(s.begin(), s.end(), w) != s.end();
}

}  // namespace

void Vocabulary::index_words() {
  word_to_index_.clear();
  for (std::size_t i = 0; i < words_.size(); ++i) {
    word_to_index_.emplace(words_[i], static_cast<int>(i));
  }
  pronoun_indices_.clear();
  for (const std::string& p : pronoun_inventory()) {
    auto it = word_to_index_.find(p);
    if (it != word_to_index_.end()) pronoun_indices_.insert(it->second);
  }
  char_to_index_.clear();
  for (std::size_t i = 0; i < chars_.size(); ++i) {
    char_to_index_.emplace(chars_[i], static_cast<int>(i));
  }
}

Vocabulary Vocabulary::build(const std::vector<Sample>& train_samples,
                             const std::map<std::string, Profile>& profiles, int min_count) {
  if (min_count < 1) throw std::invalid_argument("vocabulary: min_count must be >= 1");

  std::map<std::string, long> freq;
  auto count = [&](const std::string& lowercased) {
    if (!lowercased.empty() && !is_special_literal(lowercased)) ++freq[lowercased];
  };

  std::set<std::string> train_entities;
  for (const Sample& s : train_samples) {
    train_entities.insert(s.wiki_id);
    for (const std::string& w : s.pre_context) count(w);
    for (const std::string& w : s.post_context) count(w);
    for (const std::string& w : s.gold_expression) count(text::lower_ascii(w));
  }
  for (const std::string& id : train_entities) {
    for (const std::string& w : profile_for(profiles, id).tokens) count(w);
  }

  Vocabulary v;
  v.words_ = special_words();
  std::set<std::string> present(v.words_.begin(), v.words_.end());
  for (const std::string& p : pronoun_inventory()) {
    if (present.insert(p).second) v.words_.push_back(p);
  }
  for (const auto& [word, n] : freq) {
    if (n >= min_count && present.insert(word).second) v.words_.push_back(word);
  }

  std::set<char32_t> charset;
  for (const std::string& w : v.words_) {
    for (char32_t cp : text::utf8_decode(w)) charset.insert(cp);
  }
  for (const auto& [id, profile] : profiles) {
    (void)id;
    for (const std::string& w : profile.tokens) {
      for (char32_t cp : text::utf8_decode(w)) charset.insert(cp);
    }
  }
  v.chars_.push_back(0);  // unknown-character slot
  v.chars_.insert(v.chars_.end(), charset.begin(), charset.end());

  v.index_words();
  return v;
}

int Vocabulary::lookup(const std::string& word) const {
  auto it = word_to_index_.find(word);
  return it == word_to_index_.end() ? unk_index : it->second;
}

int Vocabulary::find(const std::string& word) const {
  auto it = word_to_index_.find(word);
  return it == word_to_index_.end() ? -1 : it->second;
}

const std::string& Vocabulary::word_of(int index) const {
  if (index < 0 || index >= size()) {
    throw std::invalid_argument("vocabulary: index " + std::to_string(index) + " out of range");
  }
  return words_[static_cast<std::size_t>(index)];
}

bool Vocabulary::is_pronoun_index(int index) const { return pronoun_indices_.count(index) > 0; }

int Vocabulary::char_lookup(char32_t cp) const {
  auto it = char_to_index_.find(cp);
  return it == char_to_index_.end() ? char_unk_index : it->second;
}

void Vocabulary::save(const std::string& words_path, const std::string& chars_path) const {
  std::ofstream words(words_path);
  if (!words) throw DataError("cannot write " + words_path);
  for (const std::string& w : words_) words << w << '\n';

  std::ofstream chars(chars_path);
  if (!chars) throw DataError("cannot write " + chars_path);
  for (std::size_t i = 0; i < chars_.size(); ++i) {
    if (i == 0) {
      chars << "<cunk>" << '\n';
    } else {
      std::string enc;
      text::utf8_append(enc, chars_[i]);
      chars << enc << '\n';
    }
  }
}

Vocabulary Vocabulary::load(const std::string& words_path, const std::string& chars_path) {
  Vocabulary v;
  std::ifstream words(words_path);
  if (!words) throw DataError("cannot open " + words_path);
  std::string line;
  while (std::getline(words, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    v.words_.push_back(line);
  }
  if (v.words_.size() < special_words().size()) {
    throw DataError(words_path + ": vocabulary file too short");
  }
  for (std::size_t i = 0; i < special_words().size(); ++i) {
    if (v.words_[i] != special_words()[i]) {
      throw DataError(words_path + ": line " + std::to_string(i + 1) +
                      " must be the special token " + special_words()[i]);
    }
  }

  std::ifstream chars(chars_path);
  if (!chars) throw DataError("cannot open " + chars_path);
  int line_no = 0;
  while (std::getline(chars, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1) {
      if (line != "<cunk>") throw DataError(chars_path + ": first line must be <cunk>");
      v.chars_.push_back(0);
      continue;
    }
    std::vector<char32_t> cps = text::utf8_decode(line);
    if (cps.size() != 1) {
      throw DataError(chars_path + ": line " + std::to_string(line_no) +
                      " must hold exactly one character");
    }
    v.chars_.push_back(cps[0]);
  }
  if (v.chars_.empty()) throw DataError(chars_path + ": empty character inventory");

  v.index_words();
  return v;
}

}  // namespace profilereg::corpus
