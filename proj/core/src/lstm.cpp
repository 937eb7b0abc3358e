#include "profilereg/lstm.hpp"

#include <stdexcept>

namespace profilereg::nn {

LstmParams LstmParams::init(int input_dim, int hidden_dim, Rng& rng) {
  if (input_dim <= 0 || hidden_dim <= 0) {
    throw std::invalid_argument("lstm: dimensions must be positive");
  }
  LstmParams p;
  p.input_dim = input_dim;
  p.hidden_dim = hidden_dim;
  auto w_in = [&] { return Tensor::uniform({hidden_dim, input_dim}, -0.1, 0.1, rng); };
  auto w_rec = [&] { return Tensor::uniform({hidden_dim, hidden_dim}, -0.1, 0.1, rng); };
  p.w_in_input = w_in();
  p.w_in_forget = w_in();
  p.w_in_cell = w_in();
  p.w_in_output = w_in();
  p.w_rec_input = w_rec();
  p.w_rec_forget = w_rec();
  p.w_rec_cell = w_rec();
  p.w_rec_output = w_rec();
  p.b_input = Tensor::zeros({hidden_dim});
  p.b_forget = Tensor::zeros({hidden_dim});
  for (double& v : p.b_forget.values) v = 1.0;
  p.b_cell = Tensor::zeros({hidden_dim});
  p.b_output = Tensor::zeros({hidden_dim});
  return p;
}

void LstmParams::collect(const std::string& prefix, std::vector<NamedTensor>& out) {
  out.emplace_back(prefix + ".w_in_input", &w_in_input);
  out.emplace_back(prefix + ".w_in_forget", &w_in_forget);
  out.emplace_back(prefix + ".w_in_cell", &w_in_cell);
  out.emplace_back(prefix + ".w_in_output", &w_in_output);
  out.emplace_back(prefix + ".w_rec_input", &w_rec_input);
  out.emplace_back(prefix + ".w_rec_forget", &w_rec_forget);
  out.emplace_back(prefix + ".w_rec_cell", &w_rec_cell);
  out.emplace_back(prefix + ".w_rec_output", &w_rec_output);
  out.emplace_back(prefix + ".b_input", &b_input);
  out.emplace_back(prefix + ".b_forget", &b_forget);
  out.emplace_back(prefix + ".b_cell", &b_cell);
  out.emplace_back(prefix + ".b_output", &b_output);
}

LstmState lstm_step(Graph& g, LstmParams& p, Var x, Var h_prev, Var c_prev) {
  if (g.value(x).ndim() != 1 || g.value(x).dim(0) != p.input_dim) {
    throw std::invalid_argument("lstm_step: input must be 1-D of dim " +
                                std::to_string(p.input_dim));
  }
  if (g.value(h_prev).dim(0) != p.hidden_dim || g.value(c_prev).dim(0) != p.hidden_dim) {
    throw std::invalid_argument("lstm_step: state must have dim " + std::to_string(p.hidden_dim));
  }
  auto gate = [&](Tensor& w_in, Tensor& w_rec, Tensor& b) {
    return g.add(g.add(g.matvec(g.param(w_in), x), g.matvec(g.param(w_rec), h_prev)),
                 g.param(b));
  };
  Var i = g.sigmoid(gate(p.w_in_input, p.w_rec_input, p.b_input));
  Var f = g.sigmoid(gate(p.w_in_forget, p.w_rec_forget, p.b_forget));
  Var cand = g.tanh_map(gate(p.w_in_cell, p.w_rec_cell, p.b_cell));
  Var o = g.sigmoid(gate(p.w_in_output, p.w_rec_output, p.b_output));
  Var c = g.add(g.mul(f, c_prev), g.mul(i, cand));
  Var h = g.mul(o, g.tanh_map(c));
  return {h, c};
}

BiLstmOut bilstm_encode(Graph& g, LstmParams& fw, LstmParams& bw, const std::vector<Var>& inputs) {
  if (inputs.empty()) {
    throw std::invalid_argument("bilstm_encode: input sequence must be non-empty");
  }
  std::size_t t = inputs.size();
  std::vector<Var> fwd(t), rev(t);

  Var h = g.zeros(fw.hidden_dim);
  Var c = g.zeros(fw.hidden_dim);
  for (std::size_t i = 0; i < t; ++i) {
    LstmState s = lstm_step(g, fw, inputs[i], h, c);
    h = s.h;
    c = s.c;
    fwd[i] = s.h;
  }
  Var fw_final = h;

  h = g.zeros(bw.hidden_dim);
  c = g.zeros(bw.hidden_dim);
  for (std::size_t i = t; i-- > 0;) {
    LstmState s = lstm_step(g, bw, inputs[i], h, c);
    h = s.h;
    c = s.c;
    rev[i] = s.h;
  }
  Var bw_final = h;

  BiLstmOut out;
  out.step_states.resize(t);
  for (std::size_t i = 0; i < t; ++i) out.step_states[i] = g.concat(fwd[i], rev[i]);
  out.states = g.stack_rows(out.step_states);
  out.final = g.concat(fw_final, bw_final);
  return out;
}

}  // namespace profilereg::nn
