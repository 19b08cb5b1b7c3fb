#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include "tripletnet/dataset.hpp"

namespace tripletnet {

// Hierarchical Gaussian corpus: genre centers ~ N(0, genre_spread^2 I),
// artist centers ~ N(genre center, artist_spread^2 I), tracks ~
// N(artist center, track_noise^2 I). The spread ordering gives cluster
// structure a retrieval model can exploit.
struct SynthSpec {
  int n_genres = 2;
  int artists_per_genre = 4;
  int tracks_per_artist = 4;
  Eigen::Index dim = 8;
  double genre_spread = 3.0;
  double artist_spread = 1.0;
  double track_noise = 0.5;
  std::uint64_t seed = 0;

  void validate() const;
};

std::pair<FeatureTable, MetadataTable> generate_tables(const SynthSpec& spec);

// Emits the PLAIN_TSV feature and metadata files; byte-identical per seed.
void generate(const SynthSpec& spec, const std::string& features_path,
              const std::string& metadata_path);

}  // namespace tripletnet
