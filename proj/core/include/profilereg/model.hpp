#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "profilereg/corpus.hpp"
#include "profilereg/graph.hpp"
#include "profilereg/lstm.hpp"
#include "profilereg/vocabulary.hpp"

namespace profilereg::model {

struct ModelConfig {
  int word_embed_dim = 100;
  int char_embed_dim = 100;
  int char_merge_dim = 50;  // output size of the character merge layer
  int attn_dim = 100;       // inner size of the attention scorer
  int word_hidden = 100;
  int char_hidden = 50;
  int vocab_size = 0;       // set from the vocabulary before init
  int char_vocab_size = 0;
  int max_decode_len = 30;
  double dropout_rate = 0.5;
  int batch_size = 64;
  int max_epochs = 35;
  int patience = 5;
  double learning_rate = 0.0037;
  double clip_norm = 5.0;
  std::uint64_t seed = 1;

  void validate() const;
};

// All trainable tensors. collect()/named() expose them in a fixed order for
// the optimizer, checkpoints and gradient checking.
struct ModelParams {
  nn::Tensor word_embed;  // [vocab x word_embed_dim]
  nn::Tensor char_embed;  // [char_vocab x char_embed_dim]

  nn::LstmParams enc_pre_fw, enc_pre_bw;
  nn::LstmParams enc_post_fw, enc_post_bw;
  nn::LstmParams enc_profile_fw, enc_profile_bw;
  nn::LstmParams enc_char_fw, enc_char_bw;
  nn::LstmParams decoder;

  nn::Tensor context_merge_w;                 // [hidden x 4*hidden]
  nn::Tensor char_merge_w, char_merge_b;      // [merge x 2*char_hidden], [merge]

  nn::Tensor attn_profile_w;  // [attn x 2*hidden]
  nn::Tensor attn_state_w;    // [attn x hidden]
  nn::Tensor attn_score_v;    // [attn]
  nn::Tensor attn_b;          // [attn]

  nn::Tensor vocab_out_w;  // [vocab x 3*hidden]
  nn::Tensor vocab_out_b;  // [vocab]

  nn::Tensor switch_summary_w;  // [3 x 2*hidden]
  nn::Tensor switch_context_w;  // [3 x hidden]
  nn::Tensor switch_state_w;    // [3 x hidden]
  nn::Tensor switch_input_w;    // [3 x word_embed_dim]
  nn::Tensor switch_b;          // [3]

  static ModelParams init(const ModelConfig& cfg, Rng& rng);
  std::vector<nn::NamedTensor> named();
};

// Fixed vocabulary followed by profile-only tokens in first-occurrence order.
struct ExtendedVocab {
  int vocab_size = 0;
  std::vector<std::string> extra;
  std::map<std::string, int> extra_index;   // token -> extended id
  std::vector<int> profile_slot_target;     // extended id per profile position

  static ExtendedVocab build(const corpus::Vocabulary& vocab, const corpus::Profile& profile);

  int size() const { return vocab_size + static_cast<int>(extra.size()); }
  // Extended id, or -1 when the token is neither in the vocabulary nor the
  // profile.
  int resolve(const corpus::Vocabulary& vocab, const std::string& token) const;
  std::string token_of(const corpus::Vocabulary& vocab, int ext_id) const;
  nn::CopyMixPlan mix_plan(const corpus::Vocabulary& vocab) const;
};

struct DropoutPlan {
  bool training = false;
  double rate = 0.0;
  Rng* rng = nullptr;
};

struct EncodedProfile {
  std::vector<nn::Var> step_states;
  nn::Var states;  // [L x 2*hidden]
  std::vector<std::string> tokens;
};

// Per-sample encoding shared by every decoder step.
struct SampleEncoding {
  nn::Var context;  // decoder initial state, word_hidden wide
  EncodedProfile profile;
  ExtendedVocab ext;
  nn::CopyMixPlan plan;
};

// Everything one decoder step produces. All distributions sum to one; `final`
// ranges over the extended vocabulary and is renormalized after the
// copy/pronoun/generate mix.
struct DecoderStep {
  nn::Var input;       // embedded (and possibly dropped-out) input token
  nn::Var state;       // decoder hidden state s_t
  nn::Var cell;
  nn::Var scores;      // unnormalized attention scores over profile slots
  nn::Var attention;   // softmaxed
  nn::Var summary;     // attention-weighted profile summary
  nn::Var vocab_dist;  // P_voc
  nn::Var switch3;     // [copy, pronoun, generate]
  nn::Var final;       // extended-vocabulary distribution
};

// Bi-encodes both contexts and merges the terminal states into the decoder
// initial state. Empty pre-context falls back to a single BOS token, empty
// post-context to a single EOS token.
nn::Var encode_contexts(nn::Graph& g, ModelParams& p, const ModelConfig& cfg,
                        const std::vector<std::string>& pre_context,
                        const std::vector<std::string>& post_context,
                        const corpus::Vocabulary& vocab, const DropoutPlan& dropout);

// Character bi-LSTM over the word's codepoints followed by the nonlinear
// merge layer. Unknown characters use the unknown-character slot.
nn::Var char_encode(nn::Graph& g, ModelParams& p, const ModelConfig& cfg, const std::string& word,
                    const corpus::Vocabulary& vocab);

// Profile token encoder: [word embedding ; char encoding] per token through
// the profile bi-LSTM. Unknown words keep the UNK word embedding but their
// characters are still encoded individually.
EncodedProfile encode_profile(nn::Graph& g, ModelParams& p, const ModelConfig& cfg,
                              const corpus::Profile& profile, const corpus::Vocabulary& vocab,
                              const DropoutPlan& dropout);

SampleEncoding encode_sample(nn::Graph& g, ModelParams& p, const ModelConfig& cfg,
                             const corpus::Sample& sample, const corpus::Profile& profile,
                             const corpus::Vocabulary& vocab, const DropoutPlan& dropout);

// Additive attention over the profile states: score_i = v . tanh(W_h h_i +
// W_s s_t + b), softmaxed, then a weighted sum of the states.
struct Attention {
  nn::Var scores;
  nn::Var attention;
  nn::Var summary;
};
Attention attend(nn::Graph& g, ModelParams& p, nn::Var s_t, const EncodedProfile& profile);

// P_voc = softmax(V [s_t ; summary] + b) over the fixed vocabulary.
nn::Var vocab_distribution(nn::Graph& g, ModelParams& p, nn::Var s_t, nn::Var summary);

// Three-way copy/pronoun/generate softmax from summary, context vector,
// decoder state and input embedding.
nn::Var switch_probs(nn::Graph& g, ModelParams& p, nn::Var summary, nn::Var d_c, nn::Var s_t,
                     nn::Var x_t);

DecoderStep decode_step(nn::Graph& g, ModelParams& p, const ModelConfig& cfg,
                        const SampleEncoding& enc, int input_word_id, nn::Var h_prev,
                        nn::Var c_prev, const DropoutPlan& dropout);

// Teacher-forced mean negative log likelihood of the gold tokens plus the
// closing EOS. Gold tokens are lowercased and resolved in the extended
// vocabulary, falling back to UNK. Probabilities below `floor` are clamped
// and reported on `warnings`.
constexpr double kProbabilityFloor = 1e-12;
nn::Var sample_loss(nn::Graph& g, ModelParams& p, const ModelConfig& cfg,
                    const corpus::Sample& sample, const corpus::Profile& profile,
                    const corpus::Vocabulary& vocab, const DropoutPlan& dropout,
                    std::ostream* warnings = nullptr);

// Greedy argmax decoding; ties break toward the lowest extended id. Stops at
// EOS or after max_len tokens.
std::vector<std::string> greedy_decode(ModelParams& p, const ModelConfig& cfg,
                                       const corpus::Sample& sample,
                                       const corpus::Profile& profile,
                                       const corpus::Vocabulary& vocab, int max_len);

// Mean switch values per referential form under teacher forcing, averaged
// over the gold-token steps (the closing EOS step is not counted).
struct SwitchStats {
  struct Row {
    double copy = 0.0, pronoun = 0.0, generate = 0.0;
    long steps = 0;
    long samples = 0;
  };
  std::map<corpus::Form, Row> by_form;
};

SwitchStats switch_statistics(ModelParams& p, const ModelConfig& cfg,
                              const std::vector<corpus::Sample>& samples,
                              const std::map<std::string, corpus::Profile>& profiles,
                              const corpus::Vocabulary& vocab);

void write_switch_stats(const SwitchStats& stats, std::ostream& out);

struct EpochLog {
  int epoch = 0;
  double mean_loss = 0.0;
  double dev_accuracy = 0.0;
};

struct TrainResult {
  ModelParams params;
  std::vector<EpochLog> log;
  int best_epoch = 0;
  double best_dev_accuracy = 0.0;
};

// Adam with gradient clipping, early stopping on dev total accuracy. Writes
// one log line per epoch to `progress` when given. `after_init` runs once on
// the freshly initialized parameters (pretrained embeddings slot in here).
// Aborts with NumericError naming the offending sample if the loss goes
// non-finite.
TrainResult train(const ModelConfig& cfg, const corpus::DatasetSplit& split,
                  const std::map<std::string, corpus::Profile>& profiles,
                  const corpus::Vocabulary& vocab, std::ostream* progress = nullptr,
                  const std::function<void(ModelParams&)>& after_init = {});

// --- serialization ---------------------------------------------------------

// Versioned flat archive of named float64 tensors; the round-trip is
// lossless.
void save_checkpoint(const std::string& path, const std::vector<nn::NamedTensor>& params);
std::map<std::string, nn::Tensor> load_checkpoint(const std::string& path);
// Copies values into matching names, insisting on identical shapes and full
// coverage in both directions.
void apply_checkpoint(const std::map<std::string, nn::Tensor>& archive,
                      const std::vector<nn::NamedTensor>& params);

// Text embeddings, one "word v1 ... vD" line each. Returns how many
// vocabulary rows were initialized; unknown words keep their random init.
int load_pretrained_embeddings(const std::string& path, const corpus::Vocabulary& vocab,
                               nn::Tensor& word_embed);

}  // namespace profilereg::model
