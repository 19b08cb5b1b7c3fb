#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tripletnet {

enum class Split { Train, Eval };

struct TrackRecord {
  std::int64_t track_id = 0;
  std::int64_t artist_id = 0;
  std::optional<std::string> genre;
  Eigen::VectorXd features;
};

// Counts of rows dropped while joining features against metadata.
struct JoinReport {
  std::size_t features_only = 0;
  std::size_t metadata_only = 0;
  std::size_t filtered_tracks = 0;  // removed by the min-songs artist filter

  std::size_t dropped() const { return features_only + metadata_only; }
};

// Immutable after construction; records are sorted by track_id.
struct Corpus {
  std::vector<TrackRecord> records;
  Eigen::Index dim = 0;
  std::map<std::int64_t, Split> split;  // artist_id -> partition; empty until split

  bool has_split() const { return !split.empty(); }
  std::vector<std::size_t> indices_in(Split s) const;
  std::vector<std::int64_t> artist_ids() const;
  void check_invariants() const;
};

enum class FeatureFormat { FmaFeatures, PlainTsv };
enum class MetadataFormat { FmaTracks, PlainTsv };

using FeatureTable = std::map<std::int64_t, Eigen::VectorXd>;

struct TrackMeta {
  std::int64_t artist_id = 0;
  std::optional<std::string> genre;
};
using MetadataTable = std::map<std::int64_t, TrackMeta>;

FeatureTable load_feature_table(const std::string& path, FeatureFormat format);

MetadataTable load_metadata(const std::string& path, MetadataFormat format);

Corpus build_corpus(const FeatureTable& features, const MetadataTable& metadata,
                    int min_songs = 2, JoinReport* report = nullptr);

// Artist-disjoint split: shuffles artists by seed, assigns the first
// round(train_fraction * n) to Train and the rest to Eval.
Corpus split_by_artist(Corpus corpus, double train_fraction, std::uint64_t seed);

}  // namespace tripletnet
