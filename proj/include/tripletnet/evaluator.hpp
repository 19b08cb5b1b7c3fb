#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "tripletnet/dataset.hpp"
#include "tripletnet/io.hpp"
#include "tripletnet/transform.hpp"

namespace tripletnet {

// A named pure map from a raw feature vector to an embedding vector.
struct Embedder {
  std::string name;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> embed;
};

Embedder make_raw_embedder();
Embedder make_zscore_embedder(ZScoreStats stats);
Embedder make_triplet_embedder(std::string name, ModelFile model);

// Mann-Whitney AUC: (concordant + 0.5 * tied) / (P * N) over all
// relevant-irrelevant pairs. Higher score means predicted more relevant.
double auc(const std::vector<double>& scores, const std::vector<bool>& relevant);

struct ArtistAuc {
  std::int64_t artist_id = 0;
  std::int64_t query_id = 0;
  std::size_t n_relevant = 0;
  std::size_t n_irrelevant = 0;
  double auc = 0.0;
};

struct AucReport {
  std::vector<ArtistAuc> artists;  // one per Eval artist, in artist-id order
  double mean_auc = 0.0;           // unweighted mean over artists
  std::string embedder;
  std::uint64_t seed = 0;
};

// Artist retrieval over the Eval split: one seeded query track per artist,
// candidates are all other Eval tracks, scored by negative embedding distance.
AucReport evaluate(const Corpus& corpus, const Embedder& embedder,
                   std::uint64_t seed, int threads = 1);

// Same seed for every embedder, so query selections are identical.
std::vector<std::pair<std::string, double>> compare(
    const Corpus& corpus, const std::vector<Embedder>& embedders,
    std::uint64_t seed, int threads = 1);

void write_auc_report(const AucReport& report, const std::string& path);
std::string format_comparison(const std::vector<std::pair<std::string, double>>& rows);

}  // namespace tripletnet
