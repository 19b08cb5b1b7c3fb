#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tripletnet/dataset.hpp"
#include "tripletnet/network.hpp"
#include "tripletnet/sampler.hpp"
#include "tripletnet/transform.hpp"

namespace tripletnet {

struct TrainConfig {
  int epochs = 200;
  int triplets_per_epoch = 512;
  int batch_size = 32;
  double learning_rate = 0.01;
  double momentum = 0.9;
  double margin = 1.0;
  std::uint64_t seed = 0;
  Strategy strategy = Strategy::Random;

  void validate() const;
};

struct EpochStats {
  double mean_loss = 0.0;
  std::uint64_t fallbacks = 0;
  double seconds = 0.0;
};

struct TrainLog {
  std::vector<EpochStats> epochs;
};

struct TrainResult {
  NetworkParams params;
  ZScoreStats zscore;  // fit on the Train split, applied to all inputs
  TrainLog log;
};

// Momentum-SGD over epochs of freshly sampled triplets. Each epoch is
// processed in mini-batches; the mini-batch gradient is divided by the
// batch size before the update v <- momentum*v + g, theta <- theta - lr*v.
TrainResult train(const Corpus& corpus, const TrainConfig& config);

// TSV: epoch, mean_loss, fallbacks, seconds.
void write_train_log(const TrainLog& log, const std::string& path);

}  // namespace tripletnet
