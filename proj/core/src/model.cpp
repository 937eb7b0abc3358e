#include "profilereg/model.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

#include "profilereg/error.hpp"
#include "profilereg/text.hpp"

namespace profilereg::model {

using nn::Graph;
using nn::Var;

void ModelConfig::validate() const {
  auto positive = [](int v, const char* name) {
    if (v <= 0) throw std::invalid_argument(std::string("config: ") + name + " must be positive");
  };
  positive(word_embed_dim, "word_embed_dim");
  positive(char_embed_dim, "char_embed_dim");
  positive(char_merge_dim, "char_merge_dim");
  positive(attn_dim, "attn_dim");
  positive(word_hidden, "word_hidden");
  positive(char_hidden, "char_hidden");
  positive(vocab_size, "vocab_size");
  positive(char_vocab_size, "char_vocab_size");
  positive(max_decode_len, "max_decode_len");
  positive(batch_size, "batch_size");
  positive(max_epochs, "max_epochs");
  if (patience < 0) throw std::invalid_argument("config: patience must be nonnegative");
  if (patience > max_epochs) throw std::invalid_argument("config: patience must not exceed max_epochs");
  if (dropout_rate < 0.0 || dropout_rate >= 1.0) {
    throw std::invalid_argument("config: dropout_rate must lie in [0, 1)");
  }
  if (learning_rate <= 0.0) throw std::invalid_argument("config: learning_rate must be positive");
  if (clip_norm <= 0.0) throw std::invalid_argument("config: clip_norm must be positive");
}

ModelParams ModelParams::init(const ModelConfig& cfg, Rng& rng) {
  cfg.validate();
  ModelParams p;
  auto u = [&](std::vector<int> shape) { return nn::Tensor::uniform(std::move(shape), -0.1, 0.1, rng); };

  p.word_embed = u({cfg.vocab_size, cfg.word_embed_dim});
  p.char_embed = u({cfg.char_vocab_size, cfg.char_embed_dim});

  p.enc_pre_fw = nn::LstmParams::init(cfg.word_embed_dim, cfg.word_hidden, rng);
  p.enc_pre_bw = nn::LstmParams::init(cfg.word_embed_dim, cfg.word_hidden, rng);
  p.enc_post_fw = nn::LstmParams::init(cfg.word_embed_dim, cfg.word_hidden, rng);
  p.enc_post_bw = nn::LstmParams::init(cfg.word_embed_dim, cfg.word_hidden, rng);
  int profile_in = cfg.word_embed_dim + cfg.char_merge_dim;
  p.enc_profile_fw = nn::LstmParams::init(profile_in, cfg.word_hidden, rng);
  p.enc_profile_bw = nn::LstmParams::init(profile_in, cfg.word_hidden, rng);
  p.enc_char_fw = nn::LstmParams::init(cfg.char_embed_dim, cfg.char_hidden, rng);
  p.enc_char_bw = nn::LstmParams::init(cfg.char_embed_dim, cfg.char_hidden, rng);
  p.decoder = nn::LstmParams::init(cfg.word_embed_dim, cfg.word_hidden, rng);

  p.context_merge_w = u({cfg.word_hidden, 4 * cfg.word_hidden});
  p.char_merge_w = u({cfg.char_merge_dim, 2 * cfg.char_hidden});
  p.char_merge_b = nn::Tensor::zeros({cfg.char_merge_dim});

  p.attn_profile_w = u({cfg.attn_dim, 2 * cfg.word_hidden});
  p.attn_state_w = u({cfg.attn_dim, cfg.word_hidden});
  p.attn_score_v = u({cfg.attn_dim});
  p.attn_b = nn::Tensor::zeros({cfg.attn_dim});

  p.vocab_out_w = u({cfg.vocab_size, 3 * cfg.word_hidden});
  p.vocab_out_b = nn::Tensor::zeros({cfg.vocab_size});

  p.switch_summary_w = u({3, 2 * cfg.word_hidden});
  p.switch_context_w = u({3, cfg.word_hidden});
  p.switch_state_w = u({3, cfg.word_hidden});
  p.switch_input_w = u({3, cfg.word_embed_dim});
  p.switch_b = nn::Tensor::zeros({3});
  return p;
}

std::vector<nn::NamedTensor> ModelParams::named() {
  std::vector<nn::NamedTensor> out;
  out.emplace_back("embed.word", &word_embed);
  out.emplace_back("embed.char", &char_embed);
  enc_pre_fw.collect("enc_pre.fw", out);
  enc_pre_bw.collect("enc_pre.bw", out);
  enc_post_fw.collect("enc_post.fw", out);
  enc_post_bw.collect("enc_post.bw", out);
  enc_profile_fw.collect("enc_profile.fw", out);
  enc_profile_bw.collect("enc_profile.bw", out);
  enc_char_fw.collect("enc_char.fw", out);
  enc_char_bw.collect("enc_char.bw", out);
  decoder.collect("decoder", out);
  out.emplace_back("context_merge.w", &context_merge_w);
  out.emplace_back("char_merge.w", &char_merge_w);
  out.emplace_back("char_merge.b", &char_merge_b);
  out.emplace_back("attn.profile_w", &attn_profile_w);
  out.emplace_back("attn.state_w", &attn_state_w);
  out.emplace_back("attn.score_v", &attn_score_v);
  out.emplace_back("attn.b", &attn_b);
  out.emplace_back("vocab_out.w", &vocab_out_w);
  out.emplace_back("vocab_out.b", &vocab_out_b);
  out.emplace_back("switch.summary_w", &switch_summary_w);
  out.emplace_back("switch.context_w", &switch_context_w);
  out.emplace_back("switch.state_w", &switch_state_w);
  out.emplace_back("switch.input_w", &switch_input_w);
  out.emplace_back("switch.b", &switch_b);
  return out;
}

// --- extended vocabulary ----------------------------------------------------

ExtendedVocab ExtendedVocab::build(const corpus::Vocabulary& vocab,
                                   const corpus::Profile& profile) {
  ExtendedVocab ext;
  ext.vocab_size = vocab.size();
  ext.profile_slot_target.reserve(profile.tokens.size());
  for (const std::string& tok : profile.tokens) {
    int id = vocab.find(tok);
    if (id >= 0) {
      ext.profile_slot_target.push_back(id);
      continue;
    }
    auto it = ext.extra_index.find(tok);
    if (it == ext.extra_index.end()) {
      int ext_id = ext.vocab_size + static_cast<int>(ext.extra.size());
      ext.extra.push_back(tok);
      it = ext.extra_index.emplace(tok, ext_id).first;
    }
    ext.profile_slot_target.push_back(it->second);
  }
  return ext;
}

int ExtendedVocab::resolve(const corpus::Vocabulary& vocab, const std::string& token) const {
  int id = vocab.find(token);
  if (id >= 0) return id;
  auto it = extra_index.find(token);
  return it == extra_index.end() ? -1 : it->second;
}

std::string ExtendedVocab::token_of(const corpus::Vocabulary& vocab, int ext_id) const {
  if (ext_id < 0 || ext_id >= size()) {
    throw std::invalid_argument("extended vocabulary: id " + std::to_string(ext_id) +
                                " out of range");
  }
  if (ext_id < vocab_size) return vocab.word_of(ext_id);
  return extra[static_cast<std::size_t>(ext_id - vocab_size)];
}

nn::CopyMixPlan ExtendedVocab::mix_plan(const corpus::Vocabulary& vocab) const {
  nn::CopyMixPlan plan;
  plan.vocab_size = vocab_size;
  plan.extended_size = size();
  plan.copy_target = profile_slot_target;
  plan.pronoun.assign(static_cast<std::size_t>(vocab_size), 0);
  for (int idx : vocab.pronoun_indices()) {
    plan.pronoun[static_cast<std::size_t>(idx)] = 1;
  }
  return plan;
}

// --- encoders ----------------------------------------------------------------

namespace {

std::vector<int> context_ids(const std::vector<std::string>& tokens,
                             const corpus::Vocabulary& vocab, int empty_fallback) {
  if (tokens.empty()) return {empty_fallback};
  std::vector<int> ids;
  ids.reserve(tokens.size());
  for (const std::string& t : tokens) ids.push_back(vocab.lookup(t));
  return ids;
}

std::vector<Var> embedded_sequence(Graph& g, ModelParams& p, const std::vector<int>& ids,
                                   const DropoutPlan& dropout) {
  Var table = g.param(p.word_embed);
  std::vector<Var> out;
  out.reserve(ids.size());
  for (int id : ids) {
    Var e = g.row(table, id);
    if (dropout.training && dropout.rate > 0.0) {
      e = g.dropout(e, dropout.rate, true, *dropout.rng);
    }
    out.push_back(e);
  }
  return out;
}

}  // namespace

Var encode_contexts(Graph& g, ModelParams& p, const ModelConfig& cfg,
                    const std::vector<std::string>& pre_context,
                    const std::vector<std::string>& post_context,
                    const corpus::Vocabulary& vocab, const DropoutPlan& dropout) {
  std::vector<int> pre_ids = context_ids(pre_context, vocab, corpus::Vocabulary::bos_index);
  std::vector<int> post_ids = context_ids(post_context, vocab, corpus::Vocabulary::eos_index);

  nn::BiLstmOut pre = nn::bilstm_encode(g, p.enc_pre_fw, p.enc_pre_bw,
                                        embedded_sequence(g, p, pre_ids, dropout));
  nn::BiLstmOut post = nn::bilstm_encode(g, p.enc_post_fw, p.enc_post_bw,
                                         embedded_sequence(g, p, post_ids, dropout));
  (void)cfg;
  Var merged = g.concat(pre.final, post.final);
  return g.tanh_map(g.matvec(g.param(p.context_merge_w), merged));
}

Var char_encode(Graph& g, ModelParams& p, const ModelConfig& cfg, const std::string& word,
                const corpus::Vocabulary& vocab) {
  (void)cfg;
  std::vector<char32_t> cps = text::utf8_decode(word);
  if (cps.empty()) throw std::invalid_argument("char_encode: empty word");
  Var table = g.param(p.char_embed);
  std::vector<Var> inputs;
  inputs.reserve(cps.size());
  for (char32_t cp : cps) inputs.push_back(g.row(table, vocab.char_lookup(cp)));
  nn::BiLstmOut enc = nn::bilstm_encode(g, p.enc_char_fw, p.enc_char_bw, inputs);
  return g.tanh_map(g.linear(g.param(p.char_merge_w), g.param(p.char_merge_b), enc.final));
}

EncodedProfile encode_profile(Graph& g, ModelParams& p, const ModelConfig& cfg,
                              const corpus::Profile& profile, const corpus::Vocabulary& vocab,
                              const DropoutPlan& dropout) {
  if (profile.tokens.empty()) {
    throw std::invalid_argument("encode_profile: profile for '" + profile.wiki_id +
                                "' has no tokens");
  }
  Var table = g.param(p.word_embed);
  std::vector<Var> inputs;
  inputs.reserve(profile.tokens.size());
  for (const std::string& tok : profile.tokens) {
    Var word_part = g.row(table, vocab.lookup(tok));
    Var char_part = char_encode(g, p, cfg, tok, vocab);
    Var joined = g.concat(word_part, char_part);
    if (dropout.training && dropout.rate > 0.0) {
      joined = g.dropout(joined, dropout.rate, true, *dropout.rng);
    }
    inputs.push_back(joined);
  }
  nn::BiLstmOut enc = nn::bilstm_encode(g, p.enc_profile_fw, p.enc_profile_bw, inputs);
  EncodedProfile out;
  out.step_states = enc.step_states;
  out.states = enc.states;
  out.tokens = profile.tokens;
  return out;
}

SampleEncoding encode_sample(Graph& g, ModelParams& p, const ModelConfig& cfg,
                             const corpus::Sample& sample, const corpus::Profile& profile,
                             const corpus::Vocabulary& vocab, const DropoutPlan& dropout) {
  SampleEncoding enc;
  enc.context = encode_contexts(g, p, cfg, sample.pre_context, sample.post_context, vocab, dropout);
  enc.profile = encode_profile(g, p, cfg, profile, vocab, dropout);
  enc.ext = ExtendedVocab::build(vocab, profile);
  enc.plan = enc.ext.mix_plan(vocab);
  return enc;
}

// --- decoder ------------------------------------------------------------------

Attention attend(Graph& g, ModelParams& p, Var s_t, const EncodedProfile& profile) {
  Var state_part = g.add(g.matvec(g.param(p.attn_state_w), s_t), g.param(p.attn_b));
  Var score_v = g.param(p.attn_score_v);
  Var profile_w = g.param(p.attn_profile_w);
  std::vector<Var> scores;
  scores.reserve(profile.step_states.size());
  for (Var h_i : profile.step_states) {
    Var mixed = g.tanh_map(g.add(g.matvec(profile_w, h_i), state_part));
    scores.push_back(g.dot(score_v, mixed));
  }
  Attention out;
  out.scores = g.concat_many(scores);
  out.attention = g.softmax(out.scores);
  out.summary = g.weighted_sum(profile.states, out.attention);
  return out;
}

Var vocab_distribution(Graph& g, ModelParams& p, Var s_t, Var summary) {
  Var state_summary = g.concat(s_t, summary);
  return g.softmax(g.linear(g.param(p.vocab_out_w), g.param(p.vocab_out_b), state_summary));
}

Var switch_probs(Graph& g, ModelParams& p, Var summary, Var d_c, Var s_t, Var x_t) {
  Var logits = g.add(g.add(g.matvec(g.param(p.switch_summary_w), summary),
                           g.matvec(g.param(p.switch_context_w), d_c)),
                     g.add(g.add(g.matvec(g.param(p.switch_state_w), s_t),
                                 g.matvec(g.param(p.switch_input_w), x_t)),
                           g.param(p.switch_b)));
  return g.softmax(logits);
}

DecoderStep decode_step(Graph& g, ModelParams& p, const ModelConfig& cfg,
                        const SampleEncoding& enc, int input_word_id, nn::Var h_prev,
                        nn::Var c_prev, const DropoutPlan& dropout) {
  DecoderStep step;
  Var x = g.row(g.param(p.word_embed), input_word_id);
  if (dropout.training && dropout.rate > 0.0) {
    x = g.dropout(x, dropout.rate, true, *dropout.rng);
  }
  step.input = x;

  nn::LstmState s = nn::lstm_step(g, p.decoder, x, h_prev, c_prev);
  step.state = s.h;
  step.cell = s.c;

  Attention att = attend(g, p, s.h, enc.profile);
  step.scores = att.scores;
  step.attention = att.attention;
  step.summary = att.summary;

  step.vocab_dist = vocab_distribution(g, p, s.h, step.summary);
  step.switch3 = switch_probs(g, p, step.summary, enc.context, s.h, x);
  step.final = g.copy_mix(step.vocab_dist, step.attention, step.switch3, enc.plan);
  (void)cfg;
  return step;
}

namespace {

// Decoder input ids: BOS then the lowercased gold tokens (UNK when absent
// from the vocabulary). Targets: extended ids of the gold tokens (UNK when
// absent everywhere) plus the closing EOS.
struct TeacherPlan {
  std::vector<int> inputs;
  std::vector<int> targets;
  std::vector<std::string> lower_gold;
};

TeacherPlan teacher_plan(const corpus::Sample& sample, const corpus::Vocabulary& vocab,
                         const ExtendedVocab& ext) {
  TeacherPlan plan;
  plan.inputs.push_back(corpus::Vocabulary::bos_index);
  for (const std::string& raw : sample.gold_expression) {
    std::string tok = text::lower_ascii(raw);
    plan.lower_gold.push_back(tok);
    plan.inputs.push_back(vocab.lookup(tok));
    int target = ext.resolve(vocab, tok);
    plan.targets.push_back(target >= 0 ? target : corpus::Vocabulary::unk_index);
  }
  plan.targets.push_back(corpus::Vocabulary::eos_index);
  return plan;
}

}  // namespace

Var sample_loss(Graph& g, ModelParams& p, const ModelConfig& cfg, const corpus::Sample& sample,
                const corpus::Profile& profile, const corpus::Vocabulary& vocab,
                const DropoutPlan& dropout, std::ostream* warnings) {
  if (sample.gold_expression.empty()) {
    throw std::invalid_argument("sample_loss: empty gold expression for '" + sample.wiki_id + "'");
  }
  SampleEncoding enc = encode_sample(g, p, cfg, sample, profile, vocab, dropout);
  TeacherPlan plan = teacher_plan(sample, vocab, enc.ext);

  Var h = enc.context;
  Var c = g.zeros(cfg.word_hidden);
  std::vector<Var> terms;
  terms.reserve(plan.targets.size());
  for (std::size_t t = 0; t < plan.targets.size(); ++t) {
    DecoderStep step = decode_step(g, p, cfg, enc, plan.inputs[t], h, c, dropout);
    h = step.state;
    c = step.cell;
    int target = plan.targets[t];
    double prob = g.value(step.final).at(target);
    if (prob < kProbabilityFloor && warnings != nullptr) {
      *warnings << "warning: target probability clamped to floor for wiki_id '" << sample.wiki_id
                << "' at step " << t << "\n";
    }
    terms.push_back(g.nll(step.final, target, kProbabilityFloor));
  }
  return g.mean_of(terms);
}

std::vector<std::string> greedy_decode(ModelParams& p, const ModelConfig& cfg,
                                       const corpus::Sample& sample,
                                       const corpus::Profile& profile,
                                       const corpus::Vocabulary& vocab, int max_len) {
  if (max_len <= 0) throw std::invalid_argument("greedy_decode: max_len must be positive");
  Graph g;
  DropoutPlan inference;  // no dropout at decode time
  SampleEncoding enc = encode_sample(g, p, cfg, sample, profile, vocab, inference);

  std::vector<std::string> out;
  Var h = enc.context;
  Var c = g.zeros(cfg.word_hidden);
  int input_id = corpus::Vocabulary::bos_index;
  for (int t = 0; t < max_len; ++t) {
    DecoderStep step = decode_step(g, p, cfg, enc, input_id, h, c, inference);
    h = step.state;
    c = step.cell;
    const nn::Tensor& dist = g.value(step.final);
    int best = 0;
    for (int i = 1; i < dist.size(); ++i) {
      if (dist.at(i) > dist.at(best)) best = i;  // ties keep the lowest id
    }
    if (best == corpus::Vocabulary::eos_index) break;
    std::string token = enc.ext.token_of(vocab, best);
    out.push_back(token);
    input_id = vocab.lookup(token);  // copied out-of-vocabulary tokens feed UNK back in
  }
  return out;
}

SwitchStats switch_statistics(ModelParams& p, const ModelConfig& cfg,
                              const std::vector<corpus::Sample>& samples,
                              const std::map<std::string, corpus::Profile>& profiles,
                              const corpus::Vocabulary& vocab) {
  SwitchStats stats;
  DropoutPlan inference;
  for (const corpus::Sample& sample : samples) {
    corpus::Form form =
        sample.gold_form ? *sample.gold_form : corpus::classify_form(sample.gold_expression);
    corpus::Profile profile = corpus::profile_for(profiles, sample.wiki_id);

    Graph g;
    SampleEncoding enc = encode_sample(g, p, cfg, sample, profile, vocab, inference);
    TeacherPlan plan = teacher_plan(sample, vocab, enc.ext);

    SwitchStats::Row& row = stats.by_form[form];
    Var h = enc.context;
    Var c = g.zeros(cfg.word_hidden);
    // Gold-token steps only; the closing EOS step says nothing about the form.
    std::size_t realized_steps = plan.targets.size() - 1;
    for (std::size_t t = 0; t < realized_steps; ++t) {
      DecoderStep step = decode_step(g, p, cfg, enc, plan.inputs[t], h, c, inference);
      h = step.state;
      c = step.cell;
      const nn::Tensor& sw = g.value(step.switch3);
      row.copy += sw.at(0);
      row.pronoun += sw.at(1);
      row.generate += sw.at(2);
      row.steps += 1;
    }
    row.samples += 1;
  }
  for (auto& [form, row] : stats.by_form) {
    (void)form;
    if (row.steps > 0) {
      row.copy /= static_cast<double>(row.steps);
      row.pronoun /= static_cast<double>(row.steps);
      row.generate /= static_cast<double>(row.steps);
    }
  }
  return stats;
}

void write_switch_stats(const SwitchStats& stats, std::ostream& out) {
  out << "form\tsamples\tsteps\tmean_copy\tmean_pronoun\tmean_generate\n";
  for (const auto& [form, row] : stats.by_form) {
    out << corpus::form_name(form) << '\t' << row.samples << '\t' << row.steps << '\t'
        << std::fixed << std::setprecision(6) << row.copy << '\t' << row.pronoun << '\t'
        << row.generate << '\n';
  }
}

}  // namespace profilereg::model
