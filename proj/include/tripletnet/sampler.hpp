#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "tripletnet/dataset.hpp"

namespace tripletnet {

enum class Strategy { Random, SameGenre };

std::string strategy_name(Strategy s);
Strategy parse_strategy(const std::string& name);

struct SamplerConfig {
  Strategy strategy = Strategy::Random;
  std::uint64_t seed = 0;
};

// Record indices into a corpus; anchor and positive share an artist,
// the negative comes from a different artist. All three are Train records.
struct Triplet {
  std::size_t anchor = 0;
  std::size_t positive = 0;
  std::size_t negative = 0;
};

class TripletSampler {
 public:
  TripletSampler(const Corpus& corpus, SamplerConfig config);

  Triplet sample(std::mt19937_64& rng);

  // Deterministic given (config.seed, epoch_index).
  std::vector<Triplet> sample_epoch(std::size_t epoch_size, std::uint64_t epoch_index);

  // Times the SameGenre negative rule could not be applied and the
  // Random rule was used instead.
  std::uint64_t fallback_count() const { return fallbacks_; }
  void reset_fallback_count() { fallbacks_ = 0; }

 private:
  std::size_t sample_negative_random(std::mt19937_64& rng, std::int64_t anchor_artist);

  const Corpus* corpus_;
  SamplerConfig config_;
  std::vector<std::int64_t> train_artists_;               // sorted
  std::vector<std::vector<std::size_t>> artist_tracks_;   // parallel to train_artists_
  std::vector<std::size_t> train_tracks_;
  std::map<std::string, std::vector<std::size_t>> genre_tracks_;
  std::map<std::string, std::map<std::int64_t, std::size_t>> genre_artist_counts_;
  std::uint64_t fallbacks_ = 0;
};

void dump_triplets(const Corpus& corpus, const std::vector<Triplet>& triplets,
                   const std::string& path);

}  // namespace tripletnet
