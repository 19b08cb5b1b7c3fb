#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "helpers.hpp"
#include "tripletnet/errors.hpp"
#include "tripletnet/rng.hpp"
#include "tripletnet/sampler.hpp"

using namespace tripletnet;

namespace {

// Hand-built corpus: explicit artists, tracks, genres, all Train unless told.
Corpus tiny_corpus(const std::vector<std::tuple<std::int64_t, std::int64_t,
                                                std::optional<std::string>>>& tracks,
                   const std::map<std::int64_t, Split>& split) {
  Corpus corpus;
  corpus.dim = 2;
  for (const auto& [track, artist, genre] : tracks) {
    corpus.records.push_back({track, artist, genre,
                              Eigen::Vector2d(double(track), double(artist))});
  }
  corpus.split = split;
  return corpus;
}

void check_triplet(const Corpus& corpus, const Triplet& t) {
  const auto& a = corpus.records[t.anchor];
  const auto& p = corpus.records[t.positive];
  const auto& n = corpus.records[t.negative];
  CHECK(t.anchor != t.positive);
  CHECK(a.artist_id == p.artist_id);
  CHECK(n.artist_id != a.artist_id);
  for (const auto* r : {&a, &p, &n}) {
    CHECK(corpus.split.at(r->artist_id) == Split::Train);
  }
}

}  // namespace

TEST_CASE("random strategy on the two-artist corpus enumerates correctly") {
  // Artists A{a1=1, a2=2}, B{b1=3, b2=4}; anchor artist A forces (a,p) to be a
  // permutation of {1,2} and the negative to come from B.
  Corpus corpus = tiny_corpus({{1, 10, {}}, {2, 10, {}}, {3, 20, {}}, {4, 20, {}}},
                              {{10, Split::Train}, {20, Split::Train}});
  TripletSampler sampler(corpus, {Strategy::Random, 5});
  std::mt19937_64 rng{123};
  std::set<std::pair<std::int64_t, std::int64_t>> seen_pairs;
  for (int i = 0; i < 500; ++i) {
    Triplet t = sampler.sample(rng);
    check_triplet(corpus, t);
    if (corpus.records[t.anchor].artist_id == 10) {
      seen_pairs.insert({corpus.records[t.anchor].track_id,
                         corpus.records[t.positive].track_id});
      CHECK(corpus.records[t.negative].artist_id == 20);
    }
  }
  // Both orderings of the anchor artist's two tracks occur.
  CHECK(seen_pairs == std::set<std::pair<std::int64_t, std::int64_t>>{{1, 2}, {2, 1}});
}

TEST_CASE("same-genre strategy constrains the negative's genre") {
  // A and B share "Rock", C and D share "Jazz": negatives never cross genres.
  Corpus corpus = tiny_corpus({{1, 10, "Rock"}, {2, 10, "Rock"},
                               {3, 20, "Rock"}, {4, 20, "Rock"},
                               {5, 30, "Jazz"}, {6, 30, "Jazz"},
                               {7, 40, "Jazz"}, {8, 40, "Jazz"}},
                              {{10, Split::Train}, {20, Split::Train},
                               {30, Split::Train}, {40, Split::Train}});
  TripletSampler sampler(corpus, {Strategy::SameGenre, 5});
  std::mt19937_64 rng{7};
  for (int i = 0; i < 500; ++i) {
    Triplet t = sampler.sample(rng);
    check_triplet(corpus, t);
    CHECK(corpus.records[t.negative].genre == corpus.records[t.anchor].genre);
  }
  CHECK(sampler.fallback_count() == 0);
}

TEST_CASE("same-genre fallback paths") {
  SUBCASE("anchor genre held by a single artist falls back") {
    Corpus corpus = tiny_corpus({{1, 10, "Rock"}, {2, 10, "Rock"},
                                 {3, 20, "Jazz"}, {4, 20, "Jazz"}},
                                {{10, Split::Train}, {20, Split::Train}});
    TripletSampler sampler(corpus, {Strategy::SameGenre, 5});
    std::mt19937_64 rng{7};
    for (int i = 0; i < 50; ++i) check_triplet(corpus, sampler.sample(rng));
    CHECK(sampler.fallback_count() == 50);
  }

  SUBCASE("genre-less anchors fall back") {
    Corpus corpus = tiny_corpus({{1, 10, {}}, {2, 10, {}}, {3, 20, {}}, {4, 20, {}}},
                                {{10, Split::Train}, {20, Split::Train}});
    TripletSampler sampler(corpus, {Strategy::SameGenre, 5});
    std::mt19937_64 rng{7};
    for (int i = 0; i < 20; ++i) check_triplet(corpus, sampler.sample(rng));
    CHECK(sampler.fallback_count() == 20);
  }
}

TEST_CASE("sampler ignores Eval records entirely") {
  Corpus corpus = tiny_corpus({{1, 10, {}}, {2, 10, {}}, {3, 20, {}}, {4, 20, {}},
                               {5, 30, {}}, {6, 30, {}}},
                              {{10, Split::Train}, {20, Split::Train},
                               {30, Split::Eval}});
  TripletSampler sampler(corpus, {Strategy::Random, 5});
  std::mt19937_64 rng{1};
  for (int i = 0; i < 200; ++i) {
    Triplet t = sampler.sample(rng);
    check_triplet(corpus, t);
    CHECK(corpus.records[t.anchor].artist_id != 30);
    CHECK(corpus.records[t.negative].artist_id != 30);
  }
}

TEST_CASE("preconditions") {
  SUBCASE("single train artist") {
    Corpus corpus = tiny_corpus({{1, 10, {}}, {2, 10, {}}},
                                {{10, Split::Train}});
    CHECK_THROWS_AS(TripletSampler(corpus, {Strategy::Random, 0}), SamplerError);
  }

  SUBCASE("missing split") {
    Corpus corpus = tiny_corpus({{1, 10, {}}, {2, 10, {}}}, {});
    CHECK_THROWS_AS(TripletSampler(corpus, {Strategy::Random, 0}), SamplerError);
  }
}

TEST_CASE("sample_epoch") {
  Corpus corpus = testutil::make_corpus({2, 4, 4, 8, 3.0, 1.0, 0.5, 21}, 0.7, 2);
  TripletSampler sampler(corpus, {Strategy::Random, 9});

  SUBCASE("exact size, all invariants hold") {
    auto triplets = sampler.sample_epoch(512, 0);
    REQUIRE(triplets.size() == 512);
    for (const Triplet& t : triplets) check_triplet(corpus, t);
  }

  SUBCASE("deterministic per (seed, epoch index)") {
    auto first = sampler.sample_epoch(64, 3);
    auto again = sampler.sample_epoch(64, 3);
    auto other = sampler.sample_epoch(64, 4);
    REQUIRE(first.size() == again.size());
    bool identical = true, differs = false;
    for (std::size_t i = 0; i < first.size(); ++i) {
      identical &= first[i].anchor == again[i].anchor &&
                   first[i].positive == again[i].positive &&
                   first[i].negative == again[i].negative;
      differs |= first[i].anchor != other[i].anchor;
    }
    CHECK(identical);
    CHECK(differs);
  }

  SUBCASE("singleton epoch") {
    auto triplets = sampler.sample_epoch(1, 0);
    REQUIRE(triplets.size() == 1);
    check_triplet(corpus, triplets[0]);
  }
}

TEST_CASE("anchor artists are uniform within 3 sigma over 10,000 draws") {
  Corpus corpus = testutil::make_corpus({3, 5, 4, 8, 3.0, 1.0, 0.5, 33}, 0.7, 4);
  TripletSampler sampler(corpus, {Strategy::Random, 17});

  std::set<std::int64_t> train_artists;
  for (std::size_t i : corpus.indices_in(Split::Train)) {
    train_artists.insert(corpus.records[i].artist_id);
  }
  const std::size_t n = 10000;
  std::map<std::int64_t, std::size_t> counts;
  std::mt19937_64 rng = substream(17, 0);
  for (std::size_t i = 0; i < n; ++i) {
    ++counts[corpus.records[sampler.sample(rng).anchor].artist_id];
  }

  double p = 1.0 / double(train_artists.size());
  double expect = double(n) * p;
  double sigma = std::sqrt(double(n) * p * (1.0 - p));
  for (std::int64_t artist : train_artists) {
    CHECK(std::abs(double(counts[artist]) - expect) <= 3.0 * sigma);
  }
}
