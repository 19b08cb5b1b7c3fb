#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "helpers.hpp"
#include "tripletnet/errors.hpp"
#include "tripletnet/evaluator.hpp"
#include "tripletnet/trainer.hpp"

using namespace tripletnet;

namespace {

// Brute-force O(P*N) pairwise AUC; the independent oracle for the rank path.
double auc_bruteforce(const std::vector<double>& scores,
                      const std::vector<bool>& relevant) {
  double concordant = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!relevant[i]) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (relevant[j]) continue;
      ++pairs;
      if (scores[i] > scores[j]) concordant += 1.0;
      else if (scores[i] == scores[j]) concordant += 0.5;
    }
  }
  return concordant / double(pairs);
}

}  // namespace

TEST_CASE("auc hand cases") {
  SUBCASE("perfect ranking") {
    CHECK(auc({0.9, 0.8, 0.2, 0.1}, {true, true, false, false}) == 1.0);
  }

  SUBCASE("interleaved: 3 of 4 pairs concordant") {
    CHECK(auc({0.9, 0.7, 0.8, 0.6}, {true, true, false, false}) ==
          doctest::Approx(0.75).epsilon(1e-15));
  }

  SUBCASE("all scores tied") {
    CHECK(auc({0.5, 0.5, 0.5}, {true, false, false}) == 0.5);
  }

  SUBCASE("single-class labels rejected") {
    CHECK_THROWS_AS(auc({0.1, 0.2}, {true, true}), EvalError);
    CHECK_THROWS_AS(auc({0.1, 0.2}, {false, false}), EvalError);
  }
}

TEST_CASE("auc properties against the brute-force oracle") {
  std::mt19937_64 rng{2024};
  std::uniform_int_distribution<int> size_dist(2, 60);
  std::uniform_int_distribution<int> level_dist(0, 8);  // coarse scores force ties

  for (int trial = 0; trial < 300; ++trial) {
    int n = size_dist(rng);
    std::vector<double> scores(n);
    std::vector<bool> relevant(n);
    bool has_pos = false, has_neg = false;
    for (int i = 0; i < n; ++i) {
      scores[i] = 0.125 * level_dist(rng);
      relevant[i] = rng() & 1;
      (relevant[i] ? has_pos : has_neg) = true;
    }
    if (!has_pos || !has_neg) continue;

    double fast = auc(scores, relevant);
    double brute = auc_bruteforce(scores, relevant);
    CHECK(std::abs(fast - brute) <= 1e-12);

    // Invariance under a strictly increasing transform.
    std::vector<double> warped(scores);
    for (double& s : warped) s = std::exp(2.0 * s) + 1.0;
    CHECK(auc(warped, relevant) == doctest::Approx(fast).epsilon(1e-12));

    // Complement: negating scores flips the AUC when no cross-class ties bias it.
    std::set<double> unique(scores.begin(), scores.end());
    if (unique.size() == scores.size()) {
      std::vector<double> negated(scores);
      for (double& s : negated) s = -s;
      CHECK(auc(negated, relevant) == doctest::Approx(1.0 - fast).epsilon(1e-12));
    }
  }
}

TEST_CASE("evaluate on degenerate corpora") {
  // Each artist's tracks identical, artists mutually distinct.
  Corpus corpus;
  corpus.dim = 2;
  for (std::int64_t artist = 1; artist <= 4; ++artist) {
    for (int t = 0; t < 3; ++t) {
      corpus.records.push_back({artist * 10 + t, artist, {},
                                Eigen::Vector2d(double(artist), -double(artist))});
    }
    corpus.split[artist] = Split::Eval;
  }

  SUBCASE("perfectly separable gives mean AUC 1.0 under RAW") {
    AucReport report = evaluate(corpus, make_raw_embedder(), 3);
    CHECK(report.mean_auc == 1.0);
    CHECK(report.artists.size() == 4);
    for (const ArtistAuc& row : report.artists) {
      CHECK(row.auc == 1.0);
      CHECK(row.n_relevant == 2);
      CHECK(row.n_irrelevant == 9);
    }
  }

  SUBCASE("constant embedder ties everything at 0.5") {
    Embedder zero{"zero", [](const Eigen::VectorXd&) {
                    return Eigen::VectorXd::Zero(2).eval();
                  }};
    AucReport report = evaluate(corpus, zero, 3);
    for (const ArtistAuc& row : report.artists) CHECK(row.auc == 0.5);
    CHECK(report.mean_auc == 0.5);
  }

  SUBCASE("artist with one Eval track flags corpus corruption") {
    corpus.records.pop_back();
    corpus.records.pop_back();
    CHECK_THROWS_AS(evaluate(corpus, make_raw_embedder(), 3), EvalError);
  }
}

TEST_CASE("evaluate determinism and query exclusion") {
  Corpus corpus = testutil::make_corpus({3, 4, 4, 8, 3.0, 1.0, 1.0, 14}, 0.6, 15);

  SUBCASE("same seed, same report; thread count does not matter") {
    AucReport a = evaluate(corpus, make_raw_embedder(), 7, 1);
    AucReport b = evaluate(corpus, make_raw_embedder(), 7, 4);
    REQUIRE(a.artists.size() == b.artists.size());
    for (std::size_t i = 0; i < a.artists.size(); ++i) {
      CHECK(a.artists[i].query_id == b.artists[i].query_id);
      CHECK(a.artists[i].auc == b.artists[i].auc);
    }
    CHECK(a.mean_auc == b.mean_auc);
  }

  SUBCASE("the query track is never its own candidate") {
    // n_relevant + n_irrelevant must equal eval size minus one.
    AucReport report = evaluate(corpus, make_raw_embedder(), 7);
    std::size_t eval_size = corpus.indices_in(Split::Eval).size();
    for (const ArtistAuc& row : report.artists) {
      CHECK(row.n_relevant + row.n_irrelevant == eval_size - 1);
    }
  }

  SUBCASE("different eval seeds pick different queries somewhere") {
    AucReport a = evaluate(corpus, make_raw_embedder(), 7);
    AucReport b = evaluate(corpus, make_raw_embedder(), 8);
    bool any_differs = false;
    for (std::size_t i = 0; i < a.artists.size(); ++i) {
      any_differs |= a.artists[i].query_id != b.artists[i].query_id;
    }
    CHECK(any_differs);
  }
}

TEST_CASE("compare runs all embedders on identical queries") {
  Corpus corpus = testutil::make_corpus({2, 4, 4, 8, 3.0, 1.0, 1.0, 20}, 0.6, 21);
  auto rows = compare(corpus,
                      {make_raw_embedder(), make_raw_embedder()}, 5);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].second == rows[1].second);  // duplicate embedder, identical rows
}

TEST_CASE("trained embedding beats raw in the noisy-genre regime") {
  // Genre clusters overlap under heavy track noise and artists are nearly
  // coincident within a genre: raw distance misranks across genres, which a
  // trained embedding can sharpen.
  Corpus corpus = testutil::make_corpus({4, 8, 6, 16, 1.5, 0.3, 2.0, 9}, 0.7, 5);

  TrainConfig config;
  config.epochs = 100;
  config.triplets_per_epoch = 256;
  config.learning_rate = 0.03;
  config.seed = 3;
  TrainResult result = train(corpus, config);
  Embedder triplet = make_triplet_embedder(
      "triplet", {result.params, config.margin, result.zscore, {}});

  auto rows = compare(corpus, {make_raw_embedder(), triplet}, 11);
  CHECK(rows[1].second >= rows[0].second);
}

TEST_CASE("AUC report TSV layout") {
  testutil::TempDir dir;
  AucReport report;
  report.artists.push_back({10, 101, 3, 40, 0.875});
  report.mean_auc = 0.875;
  auto path = dir.file("report.tsv");
  write_auc_report(report, path);
  std::string content = testutil::read_file(path);
  CHECK(content.rfind("artist_id\tquery_id\tn_rel\tn_irr\tauc\n", 0) == 0);
  CHECK(content.find("10\t101\t3\t40\t0.875000\n") != std::string::npos);
  CHECK(content.find("mean\t\t\t\t0.875000\n") != std::string::npos);
}
