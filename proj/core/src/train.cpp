#include <cmath>
#include <numeric>
#include <ostream>
#include <vector>

#include "profilereg/error.hpp"
#include "profilereg/eval.hpp"
#include "profilereg/model.hpp"
#include "profilereg/optim.hpp"

namespace profilereg::model {

namespace {

double dev_total_accuracy(ModelParams& params, const ModelConfig& cfg,
                          const std::vector<corpus::Sample>& dev,
                          const std::map<std::string, corpus::Profile>& profiles,
                          const corpus::Vocabulary& vocab) {
  if (dev.empty()) return 0.0;
  int correct = 0;
  for (const corpus::Sample& sample : dev) {
    corpus::Profile profile = corpus::profile_for(profiles, sample.wiki_id);
    std::vector<std::string> decoded =
        greedy_decode(params, cfg, sample, profile, vocab, cfg.max_decode_len);
    if (eval::normalize_expression(decoded) == eval::normalize_expression(sample.gold_expression)) {
      ++correct;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(dev.size());
}

std::vector<std::vector<double>> snapshot_values(const std::vector<nn::NamedTensor>& named) {
  std::vector<std::vector<double>> out;
  out.reserve(named.size());
  for (const auto& [name, tensor] : named) {
    (void)name;
    out.push_back(tensor->values);
  }
  return out;
}

void restore_values(const std::vector<std::vector<double>>& snapshot,
                    const std::vector<nn::NamedTensor>& named) {
  for (std::size_t i = 0; i < named.size(); ++i) named[i].second->values = snapshot[i];
}

}  // namespace

TrainResult train(const ModelConfig& cfg, const corpus::DatasetSplit& split,
                  const std::map<std::string, corpus::Profile>& profiles,
                  const corpus::Vocabulary& vocab, std::ostream* progress,
                  const std::function<void(ModelParams&)>& after_init) {
  cfg.validate();
  if (split.train.empty()) throw DataError("train: empty training set");

  Rng rng(cfg.seed);
  TrainResult result;
  result.params = ModelParams::init(cfg, rng);
  if (after_init) after_init(result.params);
  std::vector<nn::NamedTensor> named = result.params.named();

  nn::AdamState opt = nn::AdamState::init(named, cfg.learning_rate, cfg.clip_norm);

  std::vector<std::size_t> order(split.train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  result.best_dev_accuracy = -1.0;
  std::vector<std::vector<double>> best_snapshot;
  int epochs_since_improvement = 0;

  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    shuffle_in_place(order, rng);
    double loss_sum = 0.0;

    std::size_t cursor = 0;
    while (cursor < order.size()) {
      std::size_t batch_end = std::min(cursor + static_cast<std::size_t>(cfg.batch_size),
                                       order.size());
      std::size_t batch_count = batch_end - cursor;
      for (std::size_t k = cursor; k < batch_end; ++k) {
        const corpus::Sample& sample = split.train[order[k]];
        corpus::Profile profile = corpus::profile_for(profiles, sample.wiki_id);
        nn::Graph g;
        DropoutPlan dropout{true, cfg.dropout_rate, &rng};
        double value = 0.0;
        // Numeric guards fire mid-graph once parameters go NaN, so blowups
        // caught anywhere in the sample are reported with the same context.
        try {
          nn::Var loss = sample_loss(g, result.params, cfg, sample, profile, vocab, dropout,
                                     progress);
          value = g.value(loss).at(0);
          if (!std::isfinite(value)) {
            throw NumericError("loss value is " + std::to_string(value));
          }
          g.backward(loss);
        } catch (const NumericError& e) {
          throw NumericError("train: non-finite loss at epoch " + std::to_string(epoch) +
                             " for wiki_id '" + sample.wiki_id + "': " + e.what());
        }
        loss_sum += value;
      }
      double inv = 1.0 / static_cast<double>(batch_count);
      for (const auto& [name, tensor] : named) {
        (void)name;
        tensor->ensure_grad();
        for (double& gv : tensor->grad) gv *= inv;
      }
      nn::clip_gradients(named, cfg.clip_norm);
      nn::adam_step(opt, named);
      cursor = batch_end;
    }

    EpochLog log;
    log.epoch = epoch;
    log.mean_loss = loss_sum / static_cast<double>(split.train.size());
    log.dev_accuracy = dev_total_accuracy(result.params, cfg, split.dev, profiles, vocab);
    result.log.push_back(log);
    if (progress != nullptr) {
      *progress << "epoch " << log.epoch << "\tloss " << log.mean_loss << "\tdev_accuracy "
                << log.dev_accuracy << "\n";
    }

    if (log.dev_accuracy > result.best_dev_accuracy) {
      result.best_dev_accuracy = log.dev_accuracy;
      result.best_epoch = epoch;
      best_snapshot = snapshot_values(named);
      epochs_since_improvement = 0;
    } else {
      ++epochs_since_improvement;
      if (epochs_since_improvement >= cfg.patience) break;
    }
  }

  if (!best_snapshot.empty()) restore_values(best_snapshot, named);
  if (result.best_dev_accuracy < 0.0) result.best_dev_accuracy = 0.0;
  return result;
}

}  // namespace profilereg::model
