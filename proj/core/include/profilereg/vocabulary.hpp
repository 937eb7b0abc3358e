#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "profilereg/corpus.hpp"

namespace profilereg::corpus {

// Word and character inventories shared by all encoders and the decoder.
// Indices 0..3 are the specials; the pronoun inventory is always present.
// Everything is lowercased before lookup happens upstream.
class Vocabulary {
 public:
  static constexpr int pad_index = 0;
  static constexpr int unk_index = 1;
  static constexpr int bos_index = 2;
  static constexpr int eos_index = 3;
  static constexpr int char_unk_index = 0;

  // Counts tokens over training contexts, lowercased gold expressions and the
  // profiles of training entities; keeps those with frequency >= min_count.
  static Vocabulary build(const std::vector<Sample>& train_samples,
                          const std::map<std::string, Profile>& profiles, int min_count = 1);

  int size() const { return static_cast<int>(words_.size()); }
  int char_size() const { return static_cast<int>(chars_.size()); }

  // unk_index when absent.
  int lookup(const std::string& word) const;
  // -1 when absent; does not collapse to unk.
  int find(const std::string& word) const;
  const std::string& word_of(int index) const;

  bool is_pronoun_index(int index) const;
  const std::set<int>& pronoun_indices() const { return pronoun_indices_; }

  // char_unk_index for unseen codepoints.
  int char_lookup(char32_t cp) const;

  void save(const std::string& words_path, const std::string& chars_path) const;
  static Vocabulary load(const std::string& words_path, const std::string& chars_path);

 private:
  void index_words();

  std::vector<std::string> words_;
  std::map<std::string, int> word_to_index_;
  std::set<int> pronoun_indices_;
  std::vector<char32_t> chars_;  // chars_[0] is the unknown slot
  std::map<char32_t, int> char_to_index_;
};

}  // namespace profilereg::corpus
