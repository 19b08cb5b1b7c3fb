#include "tripletnet/trainer.hpp"

#include <chrono>
#include <cmath>
#include <fstream>

#include "tripletnet/errors.hpp"

namespace tripletnet {

void TrainConfig::validate() const {
  // epochs == 0 is allowed and yields the untouched initialization.
  if (epochs < 0) throw TrainingError("epochs must be >= 0");
  if (triplets_per_epoch < 1) throw TrainingError("triplets_per_epoch must be >= 1");
  if (batch_size < 1 || batch_size > triplets_per_epoch) {
    throw TrainingError("batch_size must be in [1, triplets_per_epoch]");
  }
  if (!(learning_rate >= 0.0)) throw TrainingError("learning_rate must be >= 0");
  if (!(momentum >= 0.0 && momentum < 1.0)) {
    throw TrainingError("momentum must be in [0, 1)");
  }
  if (!(margin > 0.0)) throw TrainingError("margin must be > 0");
}

TrainResult train(const Corpus& corpus, const TrainConfig& config) {
  config.validate();

  TrainResult result;
  result.zscore = fit_zscore_train(corpus);
  result.params = init_params(corpus.dim, config.seed);

  TripletSampler sampler(corpus, {config.strategy, config.seed});
  LossConfig loss_config{config.margin};

  // Inputs are z-scored once up front; the network never sees raw features.
  std::vector<Eigen::VectorXd> standardized(corpus.records.size());
  for (std::size_t i : corpus.indices_in(Split::Train)) {
    standardized[i] = apply_zscore(result.zscore, corpus.records[i].features);
  }

  Eigen::Index d = corpus.dim;
  Gradients velocity;
  velocity.W1 = Eigen::MatrixXd::Zero(d, d);
  velocity.W2 = Eigen::MatrixXd::Zero(d, d);
  velocity.b1 = Eigen::VectorXd::Zero(d);
  velocity.b2 = Eigen::VectorXd::Zero(d);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    auto t0 = std::chrono::steady_clock::now();
    std::uint64_t fallbacks_before = sampler.fallback_count();
    std::vector<Triplet> triplets =
        sampler.sample_epoch(static_cast<std::size_t>(config.triplets_per_epoch),
                             static_cast<std::uint64_t>(epoch));

    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < triplets.size();
         start += static_cast<std::size_t>(config.batch_size)) {
      std::size_t end = std::min(triplets.size(),
                                 start + static_cast<std::size_t>(config.batch_size));
      std::vector<TripletExample> batch;
      batch.reserve(end - start);
      for (std::size_t i = start; i < end; ++i) {
        batch.push_back({standardized[triplets[i].anchor],
                         standardized[triplets[i].positive],
                         standardized[triplets[i].negative]});
      }

      Gradients g = backward(result.params, batch, loss_config);
      epoch_loss += g.loss;
      double inv_n = 1.0 / static_cast<double>(batch.size());

      velocity.W1 = config.momentum * velocity.W1 + inv_n * g.W1;
      velocity.b1 = config.momentum * velocity.b1 + inv_n * g.b1;
      velocity.W2 = config.momentum * velocity.W2 + inv_n * g.W2;
      velocity.b2 = config.momentum * velocity.b2 + inv_n * g.b2;

      result.params.W1 -= config.learning_rate * velocity.W1;
      result.params.b1 -= config.learning_rate * velocity.b1;
      result.params.W2 -= config.learning_rate * velocity.W2;
      result.params.b2 -= config.learning_rate * velocity.b2;
    }

    double mean_loss = epoch_loss / static_cast<double>(triplets.size());
    if (!std::isfinite(mean_loss)) {
      throw TrainingError("non-finite loss at epoch " + std::to_string(epoch));
    }
    double seconds = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - t0).count();
    result.log.epochs.push_back(
        {mean_loss, sampler.fallback_count() - fallbacks_before, seconds});
  }
  return result;
}

void write_train_log(const TrainLog& log, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write train log: " + path);
  out << "epoch\tmean_loss\tfallbacks\tseconds\n";
  for (std::size_t i = 0; i < log.epochs.size(); ++i) {
    const EpochStats& e = log.epochs[i];
    out << i << '\t' << e.mean_loss << '\t' << e.fallbacks << '\t' << e.seconds << '\n';
  }
}

}  // namespace tripletnet
