#pragma once

#include <functional>
#include <unordered_map>
#include <vector>

#include "profilereg/rng.hpp"
#include "profilereg/tensor.hpp"

namespace profilereg::nn {

class Graph;

// Handle to a node owned by a Graph.
struct Var {
  int idx = -1;
  bool valid() const { return idx >= 0; }
};

// Index plan for mixing a vocabulary distribution, an attention distribution
// and a three-way switch into one distribution over the extended vocabulary
// (fixed vocabulary followed by profile-only tokens). Vocabulary ids keep
// their indices in the extended space.
struct CopyMixPlan {
  int vocab_size = 0;
  int extended_size = 0;
  // Extended index each profile position copies into, one per attention slot.
  std::vector<int> copy_target;
  // 1 where the vocabulary id is a pronoun, size vocab_size.
  std::vector<unsigned char> pronoun;
};

// Forward-only evaluation of the copy/pronoun/generate mix, including the
// final renormalization. Shared by the graph op and by tests.
std::vector<double> copy_mix_forward(const std::vector<double>& vocab_dist,
                                     const std::vector<double>& attention,
                                     const std::vector<double>& switch3,
                                     const CopyMixPlan& plan);

// Reverse-mode tape. Ops append nodes; backward() walks the tape in reverse
// creation order and accumulates gradients of param() leaves into the bound
// tensors' grad buffers. A Graph is built per forward pass and then dropped.
class Graph {
 public:
  Var input(Tensor value);
  Var zeros(int n);
  // Leases a parameter into the graph; repeated leases return the same node.
  // The tensor must outlive the graph.
  Var param(Tensor& p);

  Var add(Var a, Var b);
  Var mul(Var a, Var b);
  Var matvec(Var w, Var x);                 // [m x n] * [n] -> [m]
  Var linear(Var w, Var b, Var x);          // w*x + b
  Var tanh_map(Var x);
  Var sigmoid(Var x);
  Var softmax(Var x);                       // 1-D, max-subtracted
  Var concat(Var a, Var b);                 // 1-D ++ 1-D
  Var concat_many(const std::vector<Var>& parts);  // 1-D parts -> one 1-D
  Var dot(Var a, Var b);                    // -> [1]
  Var rows(Var table, std::vector<int> indices);  // [V x d] gather -> [T x d]
  Var row(Var table, int index);            // [V x d] gather -> [d]
  Var pick_row(Var m, int r);               // [T x d] -> [d]
  Var stack_rows(const std::vector<Var>& rows);   // T x [d] -> [T x d]
  Var weighted_sum(Var m, Var weights);     // [T x d], [T] -> [d]
  Var nll(Var dist, int index, double floor);     // -log(max(dist[i], floor)) -> [1]
  Var mean_of(const std::vector<Var>& scalars);   // -> [1]
  // Inverted dropout. Identity when !training or rate == 0.
  Var dropout(Var x, double rate, bool training, Rng& rng);
  Var copy_mix(Var vocab_dist, Var attention, Var switch3, CopyMixPlan plan);

  const Tensor& value(Var v) const;
  // Valid after backward(); zero-filled for nodes the loss does not reach.
  const std::vector<double>& grad(Var v) const;

  // root must be scalar. Seeds d(root)/d(root) = 1 and sweeps the tape.
  void backward(Var root);

  int size() const { return static_cast<int>(nodes_.size()); }

 private:
  struct Node {
    Tensor value;
    std::vector<double> grad;
    std::function<void(Graph&)> back;  // empty for plain inputs
  };

  Var emplace(Tensor value, std::function<void(Graph&)> back);
  Node& node(int i) { return nodes_[static_cast<std::size_t>(i)]; }
  const Node& node(int i) const { return nodes_[static_cast<std::size_t>(i)]; }
  const Tensor& val(int i) const { return nodes_[static_cast<std::size_t>(i)].value; }
  std::vector<double>& grd(int i) { return nodes_[static_cast<std::size_t>(i)].grad; }

  void check(Var v) const;

  std::vector<Node> nodes_;
  std::unordered_map<const Tensor*, int> leased_;
};

}  // namespace profilereg::nn
