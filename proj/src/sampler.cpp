#include "tripletnet/sampler.hpp"

#include <algorithm>
#include <fstream>

#include "tripletnet/errors.hpp"
#include "tripletnet/rng.hpp"

namespace tripletnet {

std::string strategy_name(Strategy s) {
  return s == Strategy::Random ? "random" : "genre";
}

Strategy parse_strategy(const std::string& name) {
  if (name == "random") return Strategy::Random;
  if (name == "genre") return Strategy::SameGenre;
  throw DataError("unknown sampling strategy: " + name);
}

TripletSampler::TripletSampler(const Corpus& corpus, SamplerConfig config)
    : corpus_(&corpus), config_(config) {
  if (!corpus.has_split()) {
    throw SamplerError("sampler requires a corpus with a train/eval split");
  }

  std::map<std::int64_t, std::vector<std::size_t>> by_artist;
  for (std::size_t i : corpus.indices_in(Split::Train)) {
    const TrackRecord& r = corpus.records[i];
    by_artist[r.artist_id].push_back(i);
    train_tracks_.push_back(i);
    if (r.genre) {
      genre_tracks_[*r.genre].push_back(i);
      ++genre_artist_counts_[*r.genre][r.artist_id];
    }
  }
  if (by_artist.size() < 2) {
    throw SamplerError("need at least 2 train artists, have " +
                       std::to_string(by_artist.size()));
  }
  for (auto& [artist, tracks] : by_artist) {
    train_artists_.push_back(artist);
    artist_tracks_.push_back(std::move(tracks));
  }
}

std::size_t TripletSampler::sample_negative_random(std::mt19937_64& rng,
                                                   std::int64_t anchor_artist) {
  // Rejection over all train tracks; terminates because >= 2 artists exist.
  for (;;) {
    std::size_t idx = train_tracks_[uniform_index(rng, train_tracks_.size())];
    if (corpus_->records[idx].artist_id != anchor_artist) return idx;
  }
}

Triplet TripletSampler::sample(std::mt19937_64& rng) {
  // Anchor artist uniform over artists, not tracks.
  std::size_t ai = uniform_index(rng, train_artists_.size());
  const std::vector<std::size_t>& tracks = artist_tracks_[ai];

  std::size_t a = uniform_index(rng, tracks.size());
  std::size_t p = uniform_index(rng, tracks.size() - 1);
  if (p >= a) ++p;

  Triplet t;
  t.anchor = tracks[a];
  t.positive = tracks[p];

  std::int64_t anchor_artist = train_artists_[ai];
  if (config_.strategy == Strategy::SameGenre) {
    const auto& genre = corpus_->records[t.anchor].genre;
    if (genre) {
      auto git = genre_tracks_.find(*genre);
      std::size_t own = 0;
      auto cit = genre_artist_counts_.find(*genre);
      if (cit != genre_artist_counts_.end()) {
        auto ait = cit->second.find(anchor_artist);
        if (ait != cit->second.end()) own = ait->second;
      }
      if (git != genre_tracks_.end() && git->second.size() > own) {
        for (;;) {
          std::size_t idx = git->second[uniform_index(rng, git->second.size())];
          if (corpus_->records[idx].artist_id != anchor_artist) {
            t.negative = idx;
            return t;
          }
        }
      }
    }
    // No eligible same-genre negative (or genre-less anchor).
    ++fallbacks_;
  }

  t.negative = sample_negative_random(rng, anchor_artist);
  return t;
}

std::vector<Triplet> TripletSampler::sample_epoch(std::size_t epoch_size,
                                                  std::uint64_t epoch_index) {
  if (epoch_size < 1) throw SamplerError("epoch_size must be >= 1");
  std::mt19937_64 rng = substream(config_.seed, epoch_index);
  std::vector<Triplet> triplets;
  triplets.reserve(epoch_size);
  for (std::size_t i = 0; i < epoch_size; ++i) triplets.push_back(sample(rng));
  return triplets;
}

void dump_triplets(const Corpus& corpus, const std::vector<Triplet>& triplets,
                   const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write triplet dump: " + path);
  for (const Triplet& t : triplets) {
    out << corpus.records[t.anchor].track_id << '\t'
        << corpus.records[t.positive].track_id << '\t'
        << corpus.records[t.negative].track_id << '\n';
  }
}

}  // namespace tripletnet
