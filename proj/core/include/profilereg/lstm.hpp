#pragma once

#include <string>
#include <vector>

#include "profilereg/graph.hpp"
#include "profilereg/tensor.hpp"

namespace profilereg::nn {

// One direction of an LSTM. Weights are kept per gate so checkpoints and
// gradient checks can address them individually.
struct LstmParams {
  int input_dim = 0;
  int hidden_dim = 0;
  Tensor w_in_input, w_in_forget, w_in_cell, w_in_output;      // [h x d]
  Tensor w_rec_input, w_rec_forget, w_rec_cell, w_rec_output;  // [h x h]
  Tensor b_input, b_forget, b_cell, b_output;                  // [h]

  // uniform(-0.1, 0.1) weights, zero biases except the forget gate at 1.0 so
  // early training does not erase the cell state.
  static LstmParams init(int input_dim, int hidden_dim, Rng& rng);

  void collect(const std::string& prefix, std::vector<NamedTensor>& out);
};

struct LstmState {
  Var h;
  Var c;
};

// Single step of the standard LSTM recurrence.
LstmState lstm_step(Graph& g, LstmParams& p, Var x, Var h_prev, Var c_prev);

struct BiLstmOut {
  std::vector<Var> step_states;  // per position: [forward h_t ; backward h_t]
  Var states;                    // [T x 2h]
  Var final;                     // [forward terminal ; backward terminal]
};

// Runs forward and backward passes over `inputs` and concatenates the two
// directions. `final` pairs the forward state after the last token with the
// backward state after the first token, i.e. both terminal states.
BiLstmOut bilstm_encode(Graph& g, LstmParams& fw, LstmParams& bw, const std::vector<Var>& inputs);

}  // namespace profilereg::nn
