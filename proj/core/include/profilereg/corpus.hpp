#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "profilereg/rng.hpp"

namespace profilereg::corpus {

enum class Form { name, pronoun, description, demonstrative };

const char* form_name(Form f);
std::optional<Form> form_from_name(const std::string& name);

// Closed pronoun inventory, in tie-break order.
const std::vector<std::string>& pronoun_inventory();
bool is_inventory_pronoun(const std::string& lowercased_token);

// First tokens that mark a demonstrative expression.
const std::set<std::string>& demonstrative_first_tokens();

// One referring-expression slot: the gold expression keeps its original
// casing, both contexts are lowercased token sequences. Either context may be
// empty when the slot sits at a text boundary.
struct Sample {
  std::string wiki_id;
  std::vector<std::string> gold_expression;
  std::vector<std::string> pre_context;
  std::vector<std::string> post_context;
  std::optional<Form> gold_form;
};

// Raw profile text as read from disk, casing preserved (the name-extraction
// baseline needs it).
struct ProfileRecord {
  std::string wiki_id;
  std::string raw_text;
};

// Model-side profile: lowercased, filtered, capped token sequence.
struct Profile {
  std::string wiki_id;
  std::vector<std::string> tokens;
};

enum class SplitKind { original, entity_separated, random_split };

struct DatasetSplit {
  std::vector<Sample> train, dev, test;
};

// Three id lists, one per partition. Entries are either sample indices
// (every line numeric) or wiki_ids; loaders accept both.
struct SplitManifest {
  std::vector<std::string> train, dev, test;
};

// --- file formats ----------------------------------------------------------

// TSV: wiki_id <TAB> expression <TAB> pre_context <TAB> post_context.
// Context fields may be empty; the expression may not.
std::vector<Sample> parse_samples(const std::string& path);
std::vector<Sample> parse_samples_stream(std::istream& in, const std::string& source_name);
void write_samples(const std::vector<Sample>& samples, const std::string& path);

// TSV: wiki_id <TAB> profile_text. Duplicate ids are rejected.
std::vector<ProfileRecord> load_profiles(const std::string& path);
void write_profiles(const std::vector<ProfileRecord>& profiles, const std::string& path);

std::vector<std::string> load_manifest_file(const std::string& path);
void write_manifest_file(const std::vector<std::string>& entries, const std::string& path);

// --- preprocessing ---------------------------------------------------------

// Replaces each token found in `realizations` by the (lowercased) expression
// tokens. A token in `known_ids` without a realization is an error; tokens in
// neither pass through untouched.
std::vector<std::string> relexicalize(const std::vector<std::string>& tokens,
                                      const std::map<std::string, std::vector<std::string>>& realizations,
                                      const std::set<std::string>& known_ids);

// Lowercases, drops bracketed [...] spans (phonetic transcriptions), keeps
// only [a-z0-9.,:;'()-], tokenizes and caps the token count. Entities whose
// id carries no letters (numbers, dates) and entities with empty or fully
// filtered text fall back to the id with underscores as spaces.
Profile normalize_profile(const std::string& raw_text, const std::string& wiki_id,
                          int max_tokens = 120);

std::map<std::string, Profile> normalize_profiles(const std::vector<ProfileRecord>& records,
                                                  int max_tokens = 120);

// Looks up a normalized profile; entities missing from the map get the
// id-derived fallback.
Profile profile_for(const std::map<std::string, Profile>& profiles, const std::string& wiki_id,
                    int max_tokens = 120);

// Single-token inventory pronoun -> pronoun; leading this/that/these/those ->
// demonstrative; every content token capitalized -> name; otherwise
// description.
Form classify_form(const std::vector<std::string>& expression);

// --- splits ----------------------------------------------------------------

// Partitions samples by explicit manifests. Every sample must land in exactly
// one partition.
DatasetSplit split_original(const std::vector<Sample>& samples, const SplitManifest& manifest);

// Shuffles entities with the seeded generator and cuts 8:1:1 by entity count;
// an entity's samples all land in one partition. Needs >= 10 entities.
DatasetSplit split_entity_separated(const std::vector<Sample>& samples, std::uint64_t seed);

// Shuffles samples and cuts 8:1:1 by sample count. Needs >= 10 samples.
DatasetSplit split_random(const std::vector<Sample>& samples, std::uint64_t seed);

// Manifests describing an already computed split, suitable for
// write_manifest_file. Entity-separated splits list wiki_ids; random splits
// list sample indices into the original sample order.
SplitManifest manifest_for_entity_split(const std::vector<Sample>& samples, std::uint64_t seed);
SplitManifest manifest_for_random_split(const std::vector<Sample>& samples, std::uint64_t seed);

}  // namespace profilereg::corpus
