#include "tripletnet/synthgen.hpp"

#include <fstream>
#include <random>

#include "tripletnet/errors.hpp"
#include "tripletnet/io.hpp"
#include "tripletnet/rng.hpp"

namespace tripletnet {

void SynthSpec::validate() const {
  if (n_genres < 1) throw DataError("synthgen: n_genres must be >= 1");
  if (artists_per_genre < 2) throw DataError("synthgen: artists_per_genre must be >= 2");
  if (tracks_per_artist < 2) throw DataError("synthgen: tracks_per_artist must be >= 2");
  if (dim < 2) throw DataError("synthgen: dim must be >= 2");
  if (!(genre_spread > 0 && artist_spread > 0 && track_noise > 0)) {
    throw DataError("synthgen: spreads must be positive");
  }
}

std::pair<FeatureTable, MetadataTable> generate_tables(const SynthSpec& spec) {
  spec.validate();
  std::mt19937_64 rng{mix64(spec.seed)};
  std::normal_distribution<double> unit(0.0, 1.0);

  auto gaussian = [&](const Eigen::VectorXd& center, double sigma) {
    Eigen::VectorXd v(spec.dim);
    for (Eigen::Index i = 0; i < spec.dim; ++i) v[i] = center[i] + sigma * unit(rng);
    return v;
  };
  Eigen::VectorXd origin = Eigen::VectorXd::Zero(spec.dim);

  FeatureTable features;
  MetadataTable metadata;
  std::int64_t track_id = 1;
  std::int64_t artist_id = 1;
  for (int g = 0; g < spec.n_genres; ++g) {
    std::string genre = "genre_" + std::to_string(g);
    Eigen::VectorXd genre_center = gaussian(origin, spec.genre_spread);
    for (int a = 0; a < spec.artists_per_genre; ++a, ++artist_id) {
      Eigen::VectorXd artist_center = gaussian(genre_center, spec.artist_spread);
      for (int t = 0; t < spec.tracks_per_artist; ++t, ++track_id) {
        features.emplace(track_id, gaussian(artist_center, spec.track_noise));
        metadata.emplace(track_id, TrackMeta{artist_id, genre});
      }
    }
  }
  return {std::move(features), std::move(metadata)};
}

void generate(const SynthSpec& spec, const std::string& features_path,
              const std::string& metadata_path) {
  auto [features, metadata] = generate_tables(spec);

  std::ofstream feat(features_path, std::ios::binary);
  if (!feat) throw DataError("cannot write " + features_path);
  feat << "track_id";
  for (Eigen::Index i = 0; i < spec.dim; ++i) feat << "\tf" << i;
  feat << '\n';
  for (const auto& [id, v] : features) {
    feat << id;
    for (Eigen::Index i = 0; i < v.size(); ++i) feat << '\t' << format_double(v[i]);
    feat << '\n';
  }

  std::ofstream meta(metadata_path, std::ios::binary);
  if (!meta) throw DataError("cannot write " + metadata_path);
  meta << "track_id\tartist_id\tgenre\n";
  for (const auto& [id, m] : metadata) {
    meta << id << '\t' << m.artist_id << '\t' << (m.genre ? *m.genre : "") << '\n';
  }
}

}  // namespace tripletnet
