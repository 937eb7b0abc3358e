#include "profilereg/eval.hpp"

#include <algorithm>
#include <iomanip>
#include <map>
#include <ostream>
#include <stdexcept>

#include "profilereg/error.hpp"
#include "profilereg/text.hpp"

namespace profilereg::eval {

namespace {

// Base-letter replacements for Latin-1 Supplement, Latin Extended-A and the
// Romanian comma-below letters. Enough for the corpus; anything unmapped and
// non-ASCII is simply dropped by the normalizer.
const std::map<char32_t, const char*>& diacritic_map() {
  static const std::map<char32_t, const char*> table = [] {
    std::map<char32_t, const char*> m;
    auto range = [&m](char32_t lo, char32_t hi, const char* base) {
      for (char32_t c = lo; c <= hi; ++c) m[c] = base;
    };
    range(0x00C0, 0x00C5, "a"); m[0x00C6] = "ae"; m[0x00C7] = "c";
    range(0x00C8, 0x00CB, "e"); range(0x00CC, 0x00CF, "i");
    m[0x00D0] = "d"; m[0x00D1] = "n"; range(0x00D2, 0x00D6, "o"); m[0x00D8] = "o";
    range(0x00D9, 0x00DC, "u"); m[0x00DD] = "y"; m[0x00DE] = "th"; m[0x00DF] = "ss";
    range(0x00E0, 0x00E5, "a"); m[0x00E6] = "ae"; m[0x00E7] = "c";
    range(0x00E8, 0x00EB, "e"); range(0x00EC, 0x00EF, "i");
    m[0x00F0] = "d"; m[0x00F1] = "n"; range(0x00F2, 0x00F6, "o"); m[0x00F8] = "o";
    range(0x00F9, 0x00FC, "u"); m[0x00FD] = "y"; m[0x00FE] = "th"; m[0x00FF] = "y";
    range(0x0100, 0x0105, "a"); range(0x0106, 0x010D, "c"); range(0x010E, 0x0111, "d");
    range(0x0112, 0x011B, "e"); range(0x011C, 0x0123, "g"); range(0x0124, 0x0127, "h");
    range(0x0128, 0x0131, "i"); range(0x0132, 0x0133, "ij"); range(0x0134, 0x0135, "j");
    range(0x0136, 0x0138, "k"); range(0x0139, 0x0142, "l"); range(0x0143, 0x014B, "n");
    range(0x014C, 0x0151, "o"); range(0x0152, 0x0153, "oe"); range(0x0154, 0x0159, "r");
    range(0x015A, 0x0161, "s"); range(0x0162, 0x0167, "t"); range(0x0168, 0x0173, "u");
    range(0x0174, 0x0175, "w"); range(0x0176, 0x0178, "y"); range(0x0179, 0x017E, "z");
    m[0x017F] = "s";
    range(0x0218, 0x0219, "s"); range(0x021A, 0x021B, "t");
    return m;
  }();
  return table;
}

template <typename Seq>
int levenshtein(const Seq& a, const Seq& b) {
  std::size_t n = a.size(), m = b.size();
  if (n == 0) return static_cast<int>(m);
  if (m == 0) return static_cast<int>(n);
  std::vector<int> prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = static_cast<int>(j);
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = static_cast<int>(i);
    for (std::size_t j = 1; j <= m; ++j) {
      int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

FormStat stat_for(const std::vector<const EvalPair*>& pairs, corpus::Form form) {
  FormStat s;
  int correct = 0;
  for (const EvalPair* p : pairs) {
    if (p->gold_form != form) continue;
    ++s.support;
    if (pair_correct(*p)) ++correct;
  }
  s.accuracy = s.support ? static_cast<double>(correct) / s.support : 0.0;
  return s;
}

PartReport part_report(const std::vector<const EvalPair*>& pairs) {
  PartReport r;
  r.support = static_cast<int>(pairs.size());
  int correct = 0;
  for (const EvalPair* p : pairs) {
    if (pair_correct(*p)) ++correct;
  }
  r.total_accuracy = r.support ? static_cast<double>(correct) / r.support : 0.0;
  for (corpus::Form f : {corpus::Form::name, corpus::Form::pronoun, corpus::Form::description,
                         corpus::Form::demonstrative}) {
    r.by_form[f] = stat_for(pairs, f);
  }
  return r;
}

const char* granularity_name(SedGranularity g) {
  return g == SedGranularity::character ? "character" : "token";
}

}  // namespace

std::string normalize_expression(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  auto push = [&](char c) {
    if (pending_space && !out.empty()) out += ' ';
    pending_space = false;
    out += c;
  };
  for (char32_t cp : text::utf8_decode(raw)) {
    if (cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r') {
      pending_space = true;
      continue;
    }
    if (cp >= 'A' && cp <= 'Z') {
      push(static_cast<char>(cp - 'A' + 'a'));
    } else if ((cp >= 'a' && cp <= 'z') || (cp >= '0' && cp <= '9')) {
      push(static_cast<char>(cp));
    } else {
      auto it = diacritic_map().find(cp);
      if (it != diacritic_map().end()) {
        for (const char* p = it->second; *p; ++p) push(*p);
      }
      // everything else contributes nothing, not even a boundary
    }
  }
  return out;
}

std::string normalize_expression(const std::vector<std::string>& tokens) {
  return normalize_expression(std::string_view(text::join(tokens)));
}

int edit_distance_chars(std::string_view a, std::string_view b) { return levenshtein(a, b); }

int edit_distance_tokens(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  return levenshtein(a, b);
}

int pair_edit_distance(const EvalPair& pair, SedGranularity granularity) {
  std::string gold = normalize_expression(pair.gold);
  std::string gen = normalize_expression(pair.generated);
  if (granularity == SedGranularity::character) return edit_distance_chars(gold, gen);
  return edit_distance_tokens(text::split_whitespace(gold), text::split_whitespace(gen));
}

bool pair_correct(const EvalPair& pair) {
  return normalize_expression(pair.gold) == normalize_expression(pair.generated);
}

bool generated_is_pronoun(const EvalPair& pair) {
  return pair.generated.size() == 1 &&
         corpus::is_inventory_pronoun(text::lower_ascii(pair.generated[0]));
}

Prf pronoun_prf(const std::vector<EvalPair>& pairs) {
  int tp = 0, fp = 0, fn = 0;
  for (const EvalPair& p : pairs) {
    bool predicted = generated_is_pronoun(p);
    bool actual = p.gold_form == corpus::Form::pronoun;
    if (predicted && actual) ++tp;
    if (predicted && !actual) ++fp;
    if (!predicted && actual) ++fn;
  }
  Prf out;
  out.precision = (tp + fp) ? static_cast<double>(tp) / (tp + fp) : 0.0;
  out.recall = (tp + fn) ? static_cast<double>(tp) / (tp + fn) : 0.0;
  out.f1 = (out.precision + out.recall > 0.0)
               ? 2.0 * out.precision * out.recall / (out.precision + out.recall)
               : 0.0;
  return out;
}

EvalReport evaluate(const std::vector<EvalPair>& pairs, SedGranularity granularity) {
  if (pairs.empty()) throw DataError("evaluate: no prediction pairs");
  EvalReport r;
  r.granularity = granularity;
  r.pairs = static_cast<int>(pairs.size());

  long sed = 0;
  std::vector<const EvalPair*> all, seen, unseen;
  for (const EvalPair& p : pairs) {
    sed += pair_edit_distance(p, granularity);
    all.push_back(&p);
    (p.seen ? seen : unseen).push_back(&p);
  }
  r.mean_sed = static_cast<double>(sed) / r.pairs;

  PartReport whole = part_report(all);
  r.total_accuracy = whole.total_accuracy;
  r.by_form = whole.by_form;
  r.pronoun_detection = pronoun_prf(pairs);
  r.seen = part_report(seen);
  r.unseen = part_report(unseen);
  return r;
}

namespace {

void write_part_text(const PartReport& part, const char* title, std::ostream& out) {
  out << title << " (" << part.support << " samples)\n";
  if (part.support == 0) return;
  out << "  total accuracy  " << std::fixed << std::setprecision(4) << part.total_accuracy
      << "\n";
  for (const auto& [form, stat] : part.by_form) {
    if (stat.support == 0) continue;
    out << "  " << std::left << std::setw(14) << corpus::form_name(form) << std::right << "  "
        << std::fixed << std::setprecision(4) << stat.accuracy << "  (" << stat.support << ")\n";
  }
}

}  // namespace

void write_report_text(const EvalReport& r, std::ostream& out) {
  out << "pairs            " << r.pairs << "\n";
  out << "sed granularity  " << granularity_name(r.granularity) << "\n";
  out << "mean sed         " << std::fixed << std::setprecision(4) << r.mean_sed << "\n";
  out << "total accuracy   " << std::fixed << std::setprecision(4) << r.total_accuracy << "\n";
  out << "\nby referential form\n";
  for (const auto& [form, stat] : r.by_form) {
    out << "  " << std::left << std::setw(14) << corpus::form_name(form) << std::right << "  "
        << std::fixed << std::setprecision(4) << stat.accuracy << "  (" << stat.support << ")\n";
  }
  const Prf& prf = r.pronoun_detection;
  out << "\npronoun detection\n";
  out << "  precision  " << std::fixed << std::setprecision(4) << prf.precision << "\n";
  out << "  recall     " << std::fixed << std::setprecision(4) << prf.recall << "\n";
  out << "  f1         " << std::fixed << std::setprecision(4) << prf.f1 << "\n\n";
  write_part_text(r.seen, "seen entities", out);
  write_part_text(r.unseen, "unseen entities", out);
}

namespace {

void tsv_row(std::ostream& out, const std::string& key, double value) {
  out << key << '\t' << std::fixed << std::setprecision(6) << value << '\n';
}

void tsv_part(std::ostream& out, const std::string& prefix, const PartReport& part) {
  out << prefix << "_support" << '\t' << part.support << '\n';
  tsv_row(out, prefix + "_total_accuracy", part.total_accuracy);
  for (const auto& [form, stat] : part.by_form) {
    std::string key = prefix + "_" + corpus::form_name(form);
    out << key << "_support" << '\t' << stat.support << '\n';
    tsv_row(out, key + "_accuracy", stat.accuracy);
  }
}

}  // namespace

void write_report_tsv(const EvalReport& r, std::ostream& out) {
  out << "pairs" << '\t' << r.pairs << '\n';
  out << "sed_granularity" << '\t' << granularity_name(r.granularity) << '\n';
  tsv_row(out, "mean_sed", r.mean_sed);
  tsv_row(out, "total_accuracy", r.total_accuracy);
  for (const auto& [form, stat] : r.by_form) {
    std::string key = std::string("form_") + corpus::form_name(form);
    out << key << "_support" << '\t' << stat.support << '\n';
    tsv_row(out, key + "_accuracy", stat.accuracy);
  }
  tsv_row(out, "pronoun_precision", r.pronoun_detection.precision);
  tsv_row(out, "pronoun_recall", r.pronoun_detection.recall);
  tsv_row(out, "pronoun_f1", r.pronoun_detection.f1);
  tsv_part(out, "seen", r.seen);
  tsv_part(out, "unseen", r.unseen);
}

}  // namespace profilereg::eval
