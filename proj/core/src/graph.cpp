#include "profilereg/graph.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "profilereg/error.hpp"

namespace profilereg::nn {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

std::vector<double> copy_mix_forward(const std::vector<double>& vocab_dist,
                                     const std::vector<double>& attention,
                                     const std::vector<double>& switch3,
                                     const CopyMixPlan& plan) {
  require(static_cast<int>(vocab_dist.size()) == plan.vocab_size,
          "copy_mix: vocabulary distribution size mismatch");
  require(attention.size() == plan.copy_target.size(),
          "copy_mix: attention length does not match copy plan");
  require(switch3.size() == 3, "copy_mix: switch must have three components");
  require(plan.extended_size >= plan.vocab_size, "copy_mix: extended size too small");
  require(static_cast<int>(plan.pronoun.size()) == plan.vocab_size,
          "copy_mix: pronoun mask size mismatch");

  const double s_copy = switch3[0], s_pro = switch3[1], s_gen = switch3[2];
  std::vector<double> out(static_cast<std::size_t>(plan.extended_size), 0.0);
  for (int w = 0; w < plan.vocab_size; ++w) {
    double s = plan.pronoun[static_cast<std::size_t>(w)] ? s_pro : s_gen;
    out[static_cast<std::size_t>(w)] = s * vocab_dist[static_cast<std::size_t>(w)];
  }
  for (std::size_t i = 0; i < attention.size(); ++i) {
    int e = plan.copy_target[i];
    require(e >= 0 && e < plan.extended_size, "copy_mix: copy target out of range");
    out[static_cast<std::size_t>(e)] += s_copy * attention[i];
  }
  double z = 0.0;
  for (double v : out) z += v;
  // Not invalid_argument: a NaN or zero mass is a runtime numeric failure.
  if (!(z > 0.0)) throw NumericError("copy_mix: degenerate total mass " + std::to_string(z));
  for (double& v : out) v /= z;
  return out;
}

Var Graph::emplace(Tensor value, std::function<void(Graph&)> back) {
  Var v{static_cast<int>(nodes_.size())};
  nodes_.push_back(Node{std::move(value), {}, std::move(back)});
  return v;
}

void Graph::check(Var v) const {
  require(v.idx >= 0 && v.idx < static_cast<int>(nodes_.size()), "invalid graph handle");
}

const Tensor& Graph::value(Var v) const {
  check(v);
  return nodes_[static_cast<std::size_t>(v.idx)].value;
}

const std::vector<double>& Graph::grad(Var v) const {
  check(v);
  return nodes_[static_cast<std::size_t>(v.idx)].grad;
}

Var Graph::input(Tensor value) { return emplace(std::move(value), {}); }

Var Graph::zeros(int n) { return input(Tensor::zeros({n})); }

Var Graph::param(Tensor& p) {
  auto it = leased_.find(&p);
  if (it != leased_.end()) return Var{it->second};
  Tensor* bound = &p;
  int self = static_cast<int>(nodes_.size());
  Var v = emplace(p, [bound, self](Graph& g) {
    bound->ensure_grad();
    const std::vector<double>& dg = g.grd(self);
    for (std::size_t i = 0; i < dg.size(); ++i) bound->grad[i] += dg[i];
  });
  leased_.emplace(&p, v.idx);
  return v;
}

Var Graph::add(Var a, Var b) {
  check(a);
  check(b);
  const Tensor& ta = val(a.idx);
  const Tensor& tb = val(b.idx);
  require(ta.same_shape(tb), "add: shape mismatch " + shape_string(ta.shape) + " vs " +
                                 shape_string(tb.shape));
  Tensor out = ta;
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] += tb.values[i];
  int ai = a.idx, bi = b.idx, self = static_cast<int>(nodes_.size());
  return emplace(std::move(out), [ai, bi, self](Graph& g) {
    const std::vector<double>& dg = g.grd(self);
    std::vector<double>& da = g.grd(ai);
    std::vector<double>& db = g.grd(bi);
    for (std::size_t i = 0; i < dg.size(); ++i) {
      da[i] += dg[i];
      db[i] += dg[i];
    }
  });
}

Var Graph::mul(Var a, Var b) {
  check(a);
  check(b);
  const Tensor& ta = val(a.idx);
  const Tensor& tb = val(b.idx);
  require(ta.same_shape(tb), "mul: shape mismatch " + shape_string(ta.shape) + " vs " +
                                 shape_string(tb.shape));
  Tensor out = ta;
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] *= tb.values[i];
  int ai = a.idx, bi = b.idx, self = static_cast<int>(nodes_.size());
  return emplace(std::move(out), [ai, bi, self](Graph& g) {
    const std::vector<double>& dg = g.grd(self);
    const Tensor& va = g.val(ai);
    const Tensor& vb = g.val(bi);
    std::vector<double>& da = g.grd(ai);
    std::vector<double>& db = g.grd(bi);
    for (std::size_t i = 0; i < dg.size(); ++i) {
      da[i] += vb.values[i] * dg[i];
      db[i] += va.values[i] * dg[i];
    }
  });
}

Var Graph::matvec(Var w, Var x) {
  check(w);
  check(x);
  const Tensor& tw = val(w.idx);
  const Tensor& tx = val(x.idx);
  require(tw.ndim() == 2, "matvec: weight must be 2-D, got " + shape_string(tw.shape));
  require(tx.ndim() == 1, "matvec: input must be 1-D, got " + shape_string(tx.shape));
  require(tw.dim(1) == tx.dim(0), "matvec: inner dimension mismatch " +
                                      shape_string(tw.shape) + " vs " + shape_string(tx.shape));
  int m = tw.dim(0), n = tw.dim(1);
  Tensor out = Tensor::zeros({m});
  for (int i = 0; i < m; ++i) {
    double acc = 0.0;
    const double* row = tw.values.data() + static_cast<std::size_t>(i) * n;
    for (int j = 0; j < n; ++j) acc += row[j] * tx.values[static_cast<std::size_t>(j)];
    out.values[static_cast<std::size_t>(i)] = acc;
  }
  int wi = w.idx, xi = x.idx, self = static_cast<int>(nodes_.size());
  return emplace(std::move(out), [wi, xi, m, n, self](Graph& g) {
    const std::vector<double>& dg = g.grd(self);
    const Tensor& vw = g.val(wi);
    const Tensor& vx = g.val(xi);
    std::vector<double>& dw = g.grd(wi);
    std::vector<double>& dx = g.grd(xi);
    for (int i = 0; i < m; ++i) {
      double gi = dg[static_cast<std::size_t>(i)];
      if (gi == 0.0) continue;
      const double* wrow = vw.values.data() + static_cast<std::size_t>(i) * n;
      double* dwrow = dw.data() + static_cast<std::size_t>(i) * n;
      for (int j = 0; j < n; ++j) {
        dwrow[j] += gi * vx.values[static_cast<std::size_t>(j)];
        dx[static_cast<std::size_t>(j)] += gi * wrow[j];
      }
    }
  });
}

Var Graph::linear(Var w, Var b, Var x) { return add(matvec(w, x), b); }

Var Graph::tanh_map(Var x) {
  check(x);
  Tensor out = val(x.idx);
  for (double& v : out.values) v = std::tanh(v);
  int xi = x.idx, self = static_cast<int>(nodes_.size());
  return emplace(std::move(out), [xi, self](Graph& g) {
    const std::vector<double>& dg = g.grd(self);
    const Tensor& y = g.val(self);
    std::vector<double>& dx = g.grd(xi);
    for (std::size_t i = 0; i < dg.size(); ++i) dx[i] += (1.0 - y.values[i] * y.values[i]) * dg[i];
  });
}

Var Graph::sigmoid(Var x) {
  check(x);
  Tensor out = val(x.idx);
  for (double& v : out.values) v = 1.0 / (1.0 + std::exp(-v));
  int xi = x.idx, self = static_cast<int>(nodes_.size());
  return emplace(std::move(out), [xi, self](Graph& g) {
    const std::vector<double>& dg = g.grd(self);
    const Tensor& y = g.val(self);
    std::vector<double>& dx = g.grd(xi);
    for (std::size_t i = 0; i < dg.size(); ++i) dx[i] += y.values[i] * (1.0 - y.values[i]) * dg[i];
  });
}

Var Graph::softmax(Var x) {
  check(x);
  const Tensor& tx = val(x.idx);
  require(tx.ndim() == 1, "softmax: input must be 1-D, got " + shape_string(tx.shape));
  require(tx.size() > 0, "softmax: input must be non-empty");
  Tensor out = tx;
  double mx = *std::max_element(out.values.begin(), out.values.end());
  double z = 0.0;
  for (double& v : out.values) {
    v = std::exp(v - mx);
    z += v;
  }
  for (double& v : out.values) v /= z;
  int xi = x.idx, self = static_cast<int>(nodes_.size());
  return emplace(std::move(out), [xi, self](Graph& g) {
    const std::vector<double>& dg = g.grd(self);
    const Tensor& y = g.val(self);
    std::vector<double>& dx = g.grd(xi);
    double dot = 0.0;
    for (std::size_t i = 0; i < dg.size(); ++i) dot += dg[i] * y.values[i];
    for (std::size_t i = 0; i < dg.size(); ++i) dx[i] += y.values[i] * (dg[i] - dot);
  });
}

Var Graph::concat(Var a, Var b) {
  check(a);
  check(b);
  const Tensor& ta = val(a.idx);
  const Tensor& tb = val(b.idx);
  require(ta.ndim() == 1 && tb.ndim() == 1, "concat: both inputs must be 1-D");
  Tensor out = Tensor::zeros({ta.dim(0) + tb.dim(0)});
  std::copy(ta.values.begin(), ta.values.end(), out.values.begin());
  std::copy(tb.values.begin(), tb.values.end(), out.values.begin() + ta.dim(0));
  int ai = a.idx, bi = b.idx, na = ta.dim(0), self = static_cast<int>(nodes_.size());
  return emplace(std::move(out), [ai, bi, na, self](Graph& g) {
    const std::vector<double>& dg = g.grd(self);
    std::vector<double>& da = g.grd(ai);
    std::vector<double>& db = g.grd(bi);
    for (std::size_t i = 0; i < da.size(); ++i) da[i] += dg[i];
    for (std::size_t i = 0; i < db.size(); ++i) db[i] += dg[static_cast<std::size_t>(na) + i];
  });
}

Var Graph::concat_many(const std::vector<Var>& parts) {
  require(!parts.empty(), "concat_many: need at least one part");
  int total = 0;
  std::vector<int> parents(parts.size());
  std::vector<int> offsets(parts.size());
  for (std::size_t i = 0; i < parts.size(); ++i) {
    check(parts[i]);
    const Tensor& t = val(parts[i].idx);
    require(t.ndim() == 1, "concat_many: all parts must be 1-D");
    parents[i] = parts[i].idx;
    offsets[i] = total;
    total += t.dim(0);
  }
  Tensor out = Tensor::zeros({total});
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const Tensor& t = val(parts[i].idx);
    std::copy(t.values.begin(), t.values.end(),
              out.values.begin() + offsets[i]);
  }
  int self = static_cast<int>(nodes_.size());
  return emplace(std::move(out),
                 [parents = std::move(parents), offsets = std::move(offsets), self](Graph& g) {
                   const std::vector<double>& dg = g.grd(self);
                   for (std::size_t i = 0; i < parents.size(); ++i) {
                     std::vector<double>& dp = g.grd(parents[i]);
                     const double* src = dg.data() + offsets[i];
                     for (std::size_t j = 0; j < dp.size(); ++j) dp[j] += src[j];
                   }
                 });
}

Var Graph::dot(Var a, Var b) {
  check(a);
  check(b);
  const Tensor& ta = val(a.idx);
  const Tensor& tb = val(b.idx);
  require(ta.ndim() == 1 && tb.ndim() == 1 && ta.dim(0) == tb.dim(0),
          "dot: inputs must be 1-D of equal length");
  double acc = 0.0;
  for (std::size_t i = 0; i < ta.values.size(); ++i) acc += ta.values[i] * tb.values[i];
  int ai = a.idx, bi = b.idx, self = static_cast<int>(nodes_.size());
  return emplace(Tensor::scalar(acc), [ai, bi, self](Graph& g) {
    double gy = g.grd(self)[0];
    const Tensor& va = g.val(ai);
    const Tensor& vb = g.val(bi);
    std::vector<double>& da = g.grd(ai);
    std::vector<double>& db = g.grd(bi);
    for (std::size_t i = 0; i < da.size(); ++i) {
      da[i] += vb.values[i] * gy;
      db[i] += va.values[i] * gy;
    }
  });
}

Var Graph::rows(Var table, std::vector<int> indices) {
  check(table);
  const Tensor& tt = val(table.idx);
  require(tt.ndim() == 2, "rows: table must be 2-D, got " + shape_string(tt.shape));
  int v = tt.dim(0), d = tt.dim(1);
  for (int idx : indices) {
    require(idx >= 0 && idx < v,
            "rows: index " + std::to_string(idx) + " out of range for table with " +
                std::to_string(v) + " rows");
  }
  int t = static_cast<int>(indices.size());
  Tensor out = Tensor::zeros({t, d});
  for (int i = 0; i < t; ++i) {
    const double* src = tt.values.data() + static_cast<std::size_t>(indices[static_cast<std::size_t>(i)]) * d;
    std::copy(src, src + d, out.values.begin() + static_cast<std::size_t>(i) * d);
  }
  int ti = table.idx, self = static_cast<int>(nodes_.size());
  return emplace(std::move(out), [ti, idxs = std::move(indices), d, self](Graph& g) {
    const std::vector<double>& dg = g.grd(self);
    std::vector<double>& dt = g.grd(ti);
    for (std::size_t i = 0; i < idxs.size(); ++i) {
      double* dst = dt.data() + static_cast<std::size_t>(idxs[i]) * d;
      const double* src = dg.data() + i * static_cast<std::size_t>(d);
      for (int j = 0; j < d; ++j) dst[j] += src[j];
    }
  });
}

Var Graph::row(Var table, int index) { return pick_row(rows(table, {index}), 0); }

Var Graph::pick_row(Var m, int r) {
  check(m);
  const Tensor& tm = val(m.idx);
  require(tm.ndim() == 2, "pick_row: input must be 2-D");
  require(r >= 0 && r < tm.dim(0), "pick_row: row " + std::to_string(r) + " out of range");
  int d = tm.dim(1);
  Tensor out = Tensor::zeros({d});
  const double* src = tm.values.data() + static_cast<std::size_t>(r) * d;
  std::copy(src, src + d, out.values.begin());
  int mi = m.idx, self = static_cast<int>(nodes_.size());
  return emplace(std::move(out), [mi, r, d, self](Graph& g) {
    const std::vector<double>& dg = g.grd(self);
    std::vector<double>& dm = g.grd(mi);
    double* dst = dm.data() + static_cast<std::size_t>(r) * d;
    for (int j = 0; j < d; ++j) dst[j] += dg[static_cast<std::size_t>(j)];
  });
}

Var Graph::stack_rows(const std::vector<Var>& rows) {
  require(!rows.empty(), "stack_rows: need at least one row");
  for (Var r : rows) check(r);
  int d = val(rows[0].idx).dim(0);
  for (Var r : rows) {
    const Tensor& tr = val(r.idx);
    require(tr.ndim() == 1 && tr.dim(0) == d, "stack_rows: rows must be 1-D of equal length");
  }
  int t = static_cast<int>(rows.size());
  Tensor out = Tensor::zeros({t, d});
  for (int i = 0; i < t; ++i) {
    const Tensor& tr = val(rows[static_cast<std::size_t>(i)].idx);
    std::copy(tr.values.begin(), tr.values.end(), out.values.begin() + static_cast<std::size_t>(i) * d);
  }
  std::vector<int> parents(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) parents[i] = rows[i].idx;
  int self = static_cast<int>(nodes_.size());
  return emplace(std::move(out), [parents = std::move(parents), d, self](Graph& g) {
    const std::vector<double>& dg = g.grd(self);
    for (std::size_t i = 0; i < parents.size(); ++i) {
      std::vector<double>& dr = g.grd(parents[i]);
      const double* src = dg.data() + i * static_cast<std::size_t>(d);
      for (int j = 0; j < d; ++j) dr[static_cast<std::size_t>(j)] += src[j];
    }
  });
}

Var Graph::weighted_sum(Var m, Var weights) {
  check(m);
  check(weights);
  const Tensor& tm = val(m.idx);
  const Tensor& tw = val(weights.idx);
  require(tm.ndim() == 2, "weighted_sum: matrix must be 2-D");
  require(tw.ndim() == 1 && tw.dim(0) == tm.dim(0),
          "weighted_sum: weight length must equal row count");
  int t = tm.dim(0), d = tm.dim(1);
  Tensor out = Tensor::zeros({d});
  for (int i = 0; i < t; ++i) {
    double wi = tw.values[static_cast<std::size_t>(i)];
    const double* src = tm.values.data() + static_cast<std::size_t>(i) * d;
    for (int j = 0; j < d; ++j) out.values[static_cast<std::size_t>(j)] += wi * src[j];
  }
  int mi = m.idx, wi = weights.idx, self = static_cast<int>(nodes_.size());
  return emplace(std::move(out), [mi, wi, t, d, self](Graph& g) {
    const std::vector<double>& dg = g.grd(self);
    const Tensor& vm = g.val(mi);
    const Tensor& vw = g.val(wi);
    std::vector<double>& dm = g.grd(mi);
    std::vector<double>& dw = g.grd(wi);
    for (int i = 0; i < t; ++i) {
      const double* mrow = vm.values.data() + static_cast<std::size_t>(i) * d;
      double* dmrow = dm.data() + static_cast<std::size_t>(i) * d;
      double wv = vw.values[static_cast<std::size_t>(i)];
      double acc = 0.0;
      for (int j = 0; j < d; ++j) {
        acc += mrow[j] * dg[static_cast<std::size_t>(j)];
        dmrow[j] += wv * dg[static_cast<std::size_t>(j)];
      }
      dw[static_cast<std::size_t>(i)] += acc;
    }
  });
}

Var Graph::nll(Var dist, int index, double floor) {
  check(dist);
  const Tensor& td = val(dist.idx);
  require(td.ndim() == 1, "nll: distribution must be 1-D");
  require(index >= 0 && index < td.dim(0), "nll: target index out of range");
  require(floor > 0.0, "nll: floor must be positive");
  double p = td.values[static_cast<std::size_t>(index)];
  bool clamped = p < floor;
  double used = clamped ? floor : p;
  int di = dist.idx, self = static_cast<int>(nodes_.size());
  return emplace(Tensor::scalar(-std::log(used)), [di, index, used, clamped, self](Graph& g) {
    if (clamped) return;  // flat below the floor
    double gy = g.grd(self)[0];
    g.grd(di)[static_cast<std::size_t>(index)] += -gy / used;
  });
}

Var Graph::mean_of(const std::vector<Var>& scalars) {
  require(!scalars.empty(), "mean_of: need at least one term");
  double acc = 0.0;
  std::vector<int> parents(scalars.size());
  for (std::size_t i = 0; i < scalars.size(); ++i) {
    check(scalars[i]);
    require(val(scalars[i].idx).size() == 1, "mean_of: all terms must be scalar");
    acc += val(scalars[i].idx).values[0];
    parents[i] = scalars[i].idx;
  }
  double inv = 1.0 / static_cast<double>(scalars.size());
  int self = static_cast<int>(nodes_.size());
  return emplace(Tensor::scalar(acc * inv), [parents = std::move(parents), inv, self](Graph& g) {
    double gy = g.grd(self)[0] * inv;
    for (int p : parents) g.grd(p)[0] += gy;
  });
}

Var Graph::dropout(Var x, double rate, bool training, Rng& rng) {
  check(x);
  require(rate >= 0.0 && rate < 1.0, "dropout: rate must lie in [0, 1)");
  if (!training || rate == 0.0) return x;
  const Tensor& tx = val(x.idx);
  double keep = 1.0 - rate;
  std::vector<unsigned char> mask(tx.values.size());
  Tensor out = tx;
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    mask[i] = uniform01(rng) >= rate ? 1 : 0;
    out.values[i] = mask[i] ? out.values[i] / keep : 0.0;
  }
  int xi = x.idx, self = static_cast<int>(nodes_.size());
  return emplace(std::move(out), [xi, mask = std::move(mask), keep, self](Graph& g) {
    const std::vector<double>& dg = g.grd(self);
    std::vector<double>& dx = g.grd(xi);
    for (std::size_t i = 0; i < dg.size(); ++i) {
      if (mask[i]) dx[i] += dg[i] / keep;
    }
  });
}

Var Graph::copy_mix(Var vocab_dist, Var attention, Var switch3, CopyMixPlan plan) {
  check(vocab_dist);
  check(attention);
  check(switch3);
  const Tensor& tp = val(vocab_dist.idx);
  const Tensor& ta = val(attention.idx);
  const Tensor& ts = val(switch3.idx);
  require(tp.ndim() == 1 && ta.ndim() == 1 && ts.ndim() == 1, "copy_mix: inputs must be 1-D");
  std::vector<double> mixed = copy_mix_forward(tp.values, ta.values, ts.values, plan);

  // Recover the pre-normalization total for the backward pass.
  double z = 0.0;
  {
    const double s_copy = ts.values[0], s_pro = ts.values[1], s_gen = ts.values[2];
    for (int w = 0; w < plan.vocab_size; ++w) {
      z += (plan.pronoun[static_cast<std::size_t>(w)] ? s_pro : s_gen) * tp.values[static_cast<std::size_t>(w)];
    }
    for (std::size_t i = 0; i < ta.values.size(); ++i) z += s_copy * ta.values[i];
  }

  Tensor out = Tensor::from({plan.extended_size}, std::move(mixed));
  int pi = vocab_dist.idx, ai = attention.idx, si = switch3.idx;
  int self = static_cast<int>(nodes_.size());
  return emplace(std::move(out), [pi, ai, si, plan = std::move(plan), z, self](Graph& g) {
    const std::vector<double>& dg = g.grd(self);
    const Tensor& y = g.val(self);
    const Tensor& vp = g.val(pi);
    const Tensor& va = g.val(ai);
    const Tensor& vs = g.val(si);
    std::vector<double>& dp = g.grd(pi);
    std::vector<double>& da = g.grd(ai);
    std::vector<double>& ds = g.grd(si);

    // y = u / z with z = sum(u): du_j = (dy_j - dot(dy, y)) / z
    double dot = 0.0;
    for (std::size_t k = 0; k < dg.size(); ++k) dot += dg[k] * y.values[k];
    std::vector<double> du(dg.size());
    for (std::size_t k = 0; k < dg.size(); ++k) du[k] = (dg[k] - dot) / z;

    const double s_copy = vs.values[0], s_pro = vs.values[1], s_gen = vs.values[2];
    for (int w = 0; w < plan.vocab_size; ++w) {
      std::size_t k = static_cast<std::size_t>(w);
      if (plan.pronoun[k]) {
        dp[k] += du[k] * s_pro;
        ds[1] += du[k] * vp.values[k];
      } else {
        dp[k] += du[k] * s_gen;
        ds[2] += du[k] * vp.values[k];
      }
    }
    for (std::size_t i = 0; i < plan.copy_target.size(); ++i) {
      std::size_t e = static_cast<std::size_t>(plan.copy_target[i]);
      da[i] += du[e] * s_copy;
      ds[0] += du[e] * va.values[i];
    }
  });
}

void Graph::backward(Var root) {
  check(root);
  require(val(root.idx).size() == 1, "backward: root must be a scalar");
  for (Node& n : nodes_) n.grad.assign(n.value.values.size(), 0.0);
  nodes_[static_cast<std::size_t>(root.idx)].grad[0] = 1.0;
  for (int i = root.idx; i >= 0; --i) {
    Node& n = nodes_[static_cast<std::size_t>(i)];
    if (n.back) n.back(*this);
  }
}

}  // namespace profilereg::nn
