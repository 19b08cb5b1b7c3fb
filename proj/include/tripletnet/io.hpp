#pragma once

#include <optional>
#include <string>

#include "tripletnet/dataset.hpp"
#include "tripletnet/network.hpp"
#include "tripletnet/trainer.hpp"
#include "tripletnet/transform.hpp"

namespace tripletnet {

// Versioned text model format. Header line:
//   TRIPLETNET v1 dim=<d> alpha=<margin> zscore=<0|1>
// then an optional "config ..." line, the z-score mean/std rows when
// zscore=1, and W1 rows, b1, W2 rows, b2. Values are written with
// shortest round-trip precision, so save -> load -> save is byte-identical.
struct ModelFile {
  NetworkParams params;
  double alpha = 1.0;
  std::optional<ZScoreStats> zscore;
  std::optional<TrainConfig> config;
};

void save_model(const ModelFile& model, const std::string& path);
ModelFile load_model(const std::string& path);

// Binary corpus artifact with a "CORPUS v1" text header line.
void save_corpus(const Corpus& corpus, const std::string& path);
Corpus load_corpus(const std::string& path);

// Shortest decimal representation that round-trips the exact double.
std::string format_double(double v);
double parse_double(const std::string& s, const std::string& context);

}  // namespace tripletnet
