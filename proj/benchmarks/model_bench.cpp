#include <string>
#include <vector>

#include "benchmark/benchmark.h"
#include "profilereg/corpus.hpp"
#include "profilereg/lstm.hpp"
#include "profilereg/model.hpp"
#include "profilereg/rng.hpp"

using namespace profilereg;

namespace {

std::string tok(int i) { return "tok" + std::to_string(i); }

// One corpus-shaped record at full model size: 15-token contexts, a 20-token
// profile and a two-token gold expression.
struct Fixture {
  corpus::Sample sample;
  corpus::Profile profile;
  std::map<std::string, corpus::Profile> profiles;
  corpus::Vocabulary vocab;
  model::ModelConfig cfg;
  model::ModelParams params;
};

Fixture make_fixture() {
  Fixture f;
  f.sample.wiki_id = "Bench_Entity";
  f.sample.gold_expression = {tok(1), tok(2)};
  for (int i = 0; i < 15; ++i) f.sample.pre_context.push_back(tok(i));
  for (int i = 15; i < 30; ++i) f.sample.post_context.push_back(tok(i));

  std::string raw;
  for (int i = 0; i < 20; ++i) {
    if (!raw.empty()) raw += ' ';
    raw += tok(i);
  }
  f.profiles = corpus::normalize_profiles({{f.sample.wiki_id, raw}});
  f.profile = corpus::profile_for(f.profiles, f.sample.wiki_id);
  f.vocab = corpus::Vocabulary::build({f.sample}, f.profiles, 1);

  f.cfg.word_embed_dim = 100;
  f.cfg.char_embed_dim = 100;
  f.cfg.char_merge_dim = 50;
  f.cfg.attn_dim = 100;
  f.cfg.word_hidden = 100;
  f.cfg.char_hidden = 50;
  f.cfg.dropout_rate = 0.0;
  f.cfg.vocab_size = f.vocab.size();
  f.cfg.char_vocab_size = f.vocab.char_size();
  Rng rng(1);
  f.params = model::ModelParams::init(f.cfg, rng);
  return f;
}

Fixture& fixture() {
  static Fixture f = make_fixture();
  return f;
}

}  // namespace

static void BM_LstmStep(benchmark::State& state) {
  Rng rng(1);
  nn::LstmParams p = nn::LstmParams::init(100, 100, rng);
  nn::Tensor x = nn::Tensor::from({100}, std::vector<double>(100, 0.01));
  nn::Tensor zero = nn::Tensor::from({100}, std::vector<double>(100, 0.0));
  for (auto _ : state) {
    nn::Graph g;
    nn::LstmState st = nn::lstm_step(g, p, g.input(x), g.input(zero), g.input(zero));
    benchmark::DoNotOptimize(g.value(st.h).at(0));
  }
}
BENCHMARK(BM_LstmStep);

static void BM_BilstmEncode(benchmark::State& state) {
  Rng rng(1);
  nn::LstmParams fw = nn::LstmParams::init(100, 100, rng);
  nn::LstmParams bw = nn::LstmParams::init(100, 100, rng);
  nn::Tensor x = nn::Tensor::from({100}, std::vector<double>(100, 0.01));
  const int steps = static_cast<int>(state.range(0));
  for (auto _ : state) {
    nn::Graph g;
    std::vector<nn::Var> inputs;
    inputs.reserve(static_cast<std::size_t>(steps));
    for (int t = 0; t < steps; ++t) inputs.push_back(g.input(x));
    nn::BiLstmOut out = nn::bilstm_encode(g, fw, bw, inputs);
    benchmark::DoNotOptimize(g.value(out.final).at(0));
  }
  state.SetComplexityN(steps);
}
BENCHMARK(BM_BilstmEncode)->RangeMultiplier(4)->Range(4, 64)->Complexity(benchmark::oN);

static void BM_EncodeProfile(benchmark::State& state) {
  Fixture& f = fixture();
  model::DropoutPlan inference;
  for (auto _ : state) {
    nn::Graph g;
    model::EncodedProfile enc = model::encode_profile(g, f.params, f.cfg, f.profile, f.vocab,
                                                      inference);
    benchmark::DoNotOptimize(g.value(enc.states).at(0));
  }
}
BENCHMARK(BM_EncodeProfile);

static void BM_SampleLossForward(benchmark::State& state) {
  Fixture& f = fixture();
  model::DropoutPlan inference;
  for (auto _ : state) {
    nn::Graph g;
    nn::Var loss = model::sample_loss(g, f.params, f.cfg, f.sample, f.profile, f.vocab,
                                      inference);
    benchmark::DoNotOptimize(g.value(loss).at(0));
  }
}
BENCHMARK(BM_SampleLossForward);

static void BM_SampleLossBackward(benchmark::State& state) {
  Fixture& f = fixture();
  model::DropoutPlan inference;
  std::vector<nn::NamedTensor> named = f.params.named();
  for (auto _ : state) {
    for (auto& [name, tensor] : named) {
      (void)name;
      tensor->ensure_grad();
      std::fill(tensor->grad.begin(), tensor->grad.end(), 0.0);
    }
    nn::Graph g;
    nn::Var loss = model::sample_loss(g, f.params, f.cfg, f.sample, f.profile, f.vocab,
                                      inference);
    g.backward(loss);
    benchmark::DoNotOptimize(g.value(loss).at(0));
  }
}
BENCHMARK(BM_SampleLossBackward);

static void BM_GreedyDecode(benchmark::State& state) {
  Fixture& f = fixture();
  for (auto _ : state) {
    std::vector<std::string> tokens = model::greedy_decode(f.params, f.cfg, f.sample, f.profile,
                                                           f.vocab, 30);
    benchmark::DoNotOptimize(tokens.size());
  }
}
BENCHMARK(BM_GreedyDecode);
